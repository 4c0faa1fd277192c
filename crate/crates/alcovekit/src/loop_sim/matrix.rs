//! `n × n` matrices over truncated Laurent series.

use num_rational::BigRational;
use num_traits::Zero;

use super::series::{Ring, TruncSeries, EXACT};
use crate::apartment::ValuationPattern;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopElement {
    pub ring: Ring,
    pub entries: Vec<Vec<TruncSeries>>,
}

impl LoopElement {
    pub fn from_fn(ring: Ring, n: usize, f: impl Fn(usize, usize) -> TruncSeries) -> Self {
        LoopElement { ring, entries: (0..n).map(|i| (0..n).map(|k| f(i, k)).collect()).collect() }
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        Self::from_fn(ring, n, |i, k| if i == k { TruncSeries::one(ring) } else { TruncSeries::zero(ring, EXACT) })
    }

    pub fn diag(ring: Ring, d: Vec<TruncSeries>) -> Self {
        let n = d.len();
        Self::from_fn(ring, n, |i, k| if i == k { d[i].clone() } else { TruncSeries::zero(ring, EXACT) })
    }

    /// `v^ν` as a diagonal matrix.
    pub fn v_power(ring: Ring, nu: &[i64]) -> Self {
        Self::diag(ring, nu.iter().map(|&k| TruncSeries::monomial(ring, 1, k)).collect())
    }

    /// `(v + p)^ν`, exact since `p` is nilpotent.
    pub fn v_plus_p_power(ring: Ring, nu: &[i64]) -> Self {
        Self::diag(ring, nu.iter().map(|&k| v_plus_p_pow(ring, k)).collect())
    }

    /// Permutation matrix sending `e_k` to `e_{perm[k]}`.
    pub fn permutation(ring: Ring, perm: &[usize]) -> Self {
        Self::from_fn(ring, perm.len(), |i, k| {
            if perm[k] == i {
                TruncSeries::one(ring)
            } else {
                TruncSeries::zero(ring, EXACT)
            }
        })
    }

    /// `1 + s E_{ik}` for `i ≠ k`.
    pub fn elementary(ring: Ring, n: usize, i: usize, k: usize, s: TruncSeries) -> Self {
        let mut m = Self::identity(ring, n);
        m.entries[i][k] = s;
        m
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, k: usize) -> &TruncSeries {
        &self.entries[i][k]
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_capped(o, EXACT)
    }

    pub fn mul_capped(&self, o: &Self, cap: i64) -> Self {
        let n = self.n();
        Self::from_fn(self.ring, n, |i, k| {
            (0..n).fold(TruncSeries::zero(self.ring, cap), |acc, j| acc.add(&self.entries[i][j].mul_capped(&o.entries[j][k], cap)))
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(self.ring, self.n(), |i, k| self.entries[i][k].add(&o.entries[i][k]))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(self.ring, self.n(), |i, k| self.entries[i][k].sub(&o.entries[i][k]))
    }

    pub fn phi(&self) -> Self {
        Self::from_fn(self.ring, self.n(), |i, k| self.entries[i][k].phi())
    }

    pub fn truncate(&self, prec: i64) -> Self {
        Self::from_fn(self.ring, self.n(), |i, k| self.entries[i][k].truncate(prec))
    }

    pub fn min_prec(&self) -> i64 {
        self.entries.iter().flatten().map(TruncSeries::prec).min().unwrap_or(EXACT)
    }

    pub fn is_exact(&self) -> bool {
        self.min_prec() >= EXACT
    }

    /// Largest pole order among the entries.
    pub fn pole_order(&self) -> i64 {
        self.entries.iter().flatten().map(TruncSeries::pole_order).max().unwrap_or(0)
    }

    /// Entries integral and the constant term invertible mod `p`.
    pub fn is_integral_unit(&self) -> bool {
        if self.entries.iter().flatten().any(|s| s.val_bound() < 0) {
            return false;
        }
        let c = self.constant_term();
        det_mod_p(&c, self.ring.p) != 0
    }

    fn constant_term(&self) -> Vec<Vec<u64>> {
        self.entries.iter().map(|row| row.iter().map(|s| s.coeff(0)).collect()).collect()
    }

    /// Valuation of `M - 1`: the depth at the origin.
    pub fn depth(&self) -> i64 {
        self.sub(&Self::identity(self.ring, self.n())).entries.iter().flatten().map(TruncSeries::val_bound).min().unwrap_or(EXACT)
    }

    /// `min(v(m_ik) + ⟨e_i - e_k, η⟩, v(m_ii - 1))` with `η` in `v`-units.
    pub fn pattern_depth(&self, eta: &[BigRational]) -> BigRational {
        let n = self.n();
        let mut best: Option<BigRational> = None;
        for i in 0..n {
            for k in 0..n {
                let d = if i == k {
                    BigRational::from_integer(self.entries[i][i].sub(&TruncSeries::one(self.ring)).val_bound().into())
                } else {
                    BigRational::from_integer(self.entries[i][k].val_bound().into()) + &eta[i] - &eta[k]
                };
                if best.as_ref().is_none_or(|b| d < *b) {
                    best = Some(d);
                }
            }
        }
        best.unwrap_or_else(BigRational::zero)
    }

    /// Entrywise check against a pattern (bounds read in `v`-units, `e = 1`)
    /// together with invertibility of the reduction.
    pub fn in_pattern(&self, pat: &ValuationPattern) -> bool {
        let vb = pat.v_bounds();
        let n = self.n();
        for i in 0..n {
            for k in 0..n {
                let s = &self.entries[i][k];
                if i == k {
                    let torus = pat.torus_level.ceil().to_integer();
                    let bound = if torus.is_zero() { 0 } else { i64::try_from(torus).unwrap_or(i64::MAX) };
                    let d = if bound > 0 { s.sub(&TruncSeries::one(self.ring)) } else { s.clone() };
                    if d.val_bound() < bound {
                        return false;
                    }
                } else if s.val_bound() < vb[i][k] {
                    return false;
                }
            }
        }
        if pat.torus_level > BigRational::zero() {
            return true;
        }
        // the reduction is block diagonal on indices with lb(i,k) + lb(k,i) = 0
        let red: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        let same_block = i == k || vb[i][k] + vb[k][i] == 0;
                        let b = if i == k { 0 } else { vb[i][k] };
                        if same_block { self.entries[i][k].coeff(b) } else { 0 }
                    })
                    .collect()
            })
            .collect();
        det_mod_p(&red, self.ring.p) != 0
    }

    /// Inverse of an integral matrix with invertible constant term:
    /// `M = M_0 (1 + N)`, `M⁻¹ = Σ (-N)^k M_0⁻¹` truncated at `v^cap`.
    pub fn inverse_integral(&self, cap: i64) -> Result<Self> {
        let n = self.n();
        if self.entries.iter().flatten().any(|s| s.val_bound() < 0) {
            return Err(Error::NotInvertible("matrix has poles".into()));
        }
        let m0 = self.constant_term();
        let m0_inv = mat_inverse_mod(&m0, self.ring).ok_or_else(|| Error::NotInvertible("constant term is singular".into()))?;
        let m0_inv_l = Self::from_fn(self.ring, n, |i, k| TruncSeries::constant(self.ring, m0_inv[i][k]));
        let cap = cap.min(self.min_prec());
        let nil = m0_inv_l.mul_capped(self, cap).sub(&Self::identity(self.ring, n)).truncate(cap);
        let neg = Self::from_fn(self.ring, n, |i, k| nil.entries[i][k].neg());
        // N has positive valuation or p-divisible constant term, so the
        // series terminates modulo (v^cap, p^a)
        let mut sum = Self::identity(self.ring, n).truncate(cap);
        let mut pow = Self::identity(self.ring, n);
        for _ in 0..(cap.max(1) as usize * self.ring.a as usize + self.ring.a as usize) {
            pow = pow.mul_capped(&neg, cap);
            if pow.entries.iter().flatten().all(TruncSeries::is_zero) {
                break;
            }
            sum = sum.add(&pow);
        }
        Ok(sum.mul_capped(&m0_inv_l, cap))
    }

    /// Inverse of a monomial matrix (one unit monomial per row and column).
    pub fn inverse_monomial(&self) -> Result<Self> {
        let n = self.n();
        let mut out = Self::from_fn(self.ring, n, |_, _| TruncSeries::zero(self.ring, EXACT));
        for i in 0..n {
            let nz: Vec<usize> = (0..n).filter(|&k| !self.entries[i][k].is_zero()).collect();
            let [k] = nz.as_slice() else {
                return Err(Error::NotInvertible("not monomial".into()));
            };
            let terms = self.entries[i][*k].terms();
            let [(exp, c)] = terms.as_slice() else {
                return Err(Error::NotInvertible("entry is not a monomial".into()));
            };
            let c_inv = self.ring.inv(*c).ok_or_else(|| Error::NotInvertible("non-unit coefficient".into()))?;
            out.entries[*k][i] = TruncSeries::monomial(self.ring, c_inv, -exp);
        }
        Ok(out)
    }

    pub fn display(&self) -> String {
        self.entries
            .iter()
            .map(|row| format!("[{}]", row.iter().map(TruncSeries::display).collect::<Vec<_>>().join(", ")))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.entries.iter().map(|row| serde_json::Value::Array(row.iter().map(TruncSeries::to_json).collect())).collect(),
        )
    }
}

/// `(v + p)^k` for any integer `k`.
pub fn v_plus_p_pow(ring: Ring, k: i64) -> TruncSeries {
    let base = if k >= 0 { TruncSeries::v_plus_p(ring) } else { v_plus_p_inverse(ring) };
    (0..k.unsigned_abs()).fold(TruncSeries::one(ring), |acc, _| acc.mul(&base))
}

/// `(v + p)⁻¹ = v⁻¹ Σ_{n<a} (-p/v)^n`, exact.
pub fn v_plus_p_inverse(ring: Ring) -> TruncSeries {
    let a = ring.a as i64;
    let mut coeffs = vec![0u64; a as usize];
    let mut c = 1u64;
    for n in 0..a {
        coeffs[(a - 1 - n) as usize] = c;
        c = ring.mul(c, ring.neg(ring.p % ring.modulus));
    }
    TruncSeries::from_coeffs(ring, -a, coeffs, EXACT)
}

fn det_mod_p(m: &[Vec<u64>], p: u64) -> u64 {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    let mut det = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| a[r][c] != 0) else { return 0 };
        a.swap(c, piv);
        det = det * a[c][c] % p;
        let inv = modpow(a[c][c], p - 2, p);
        for r in c + 1..n {
            let f = a[r][c] * inv % p;
            for k in c..n {
                a[r][k] = (a[r][k] + p * p - f * a[c][k] % p) % p;
            }
        }
    }
    det
}

fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Gauss–Jordan inverse over `Z/p^a`, pivoting on units.
pub fn mat_inverse_mod(m: &[Vec<u64>], ring: Ring) -> Option<Vec<Vec<u64>>> {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|&x| x % ring.modulus).collect()).collect();
    let mut inv: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|k| u64::from(i == k)).collect()).collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| ring.is_unit(a[r][c]))?;
        a.swap(c, piv);
        inv.swap(c, piv);
        let s = ring.inv(a[c][c])?;
        for k in 0..n {
            a[c][k] = ring.mul(a[c][k], s);
            inv[c][k] = ring.mul(inv[c][k], s);
        }
        for r in 0..n {
            if r != c && a[r][c] != 0 {
                let f = a[r][c];
                for k in 0..n {
                    a[r][k] = ring.sub(a[r][k], ring.mul(f, a[c][k]));
                    inv[r][k] = ring.sub(inv[r][k], ring.mul(f, inv[c][k]));
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Ring {
        Ring::new(5, 2).unwrap()
    }

    #[test]
    fn integral_inverse_roundtrip() {
        let r = ring();
        let m = LoopElement::from_fn(r, 2, |i, k| TruncSeries::from_ints(r, 0, &[(1 + 2 * i + k) as i64, 3, 1], EXACT));
        let inv = m.inverse_integral(12).unwrap();
        let prod = m.mul_capped(&inv, 12).truncate(12);
        assert_eq!(prod, LoopElement::identity(r, 2).truncate(12));
    }

    #[test]
    fn v_plus_p_inverse_is_exact() {
        let r = ring();
        let x = v_plus_p_inverse(r).mul(&TruncSeries::v_plus_p(r));
        assert_eq!(x, TruncSeries::one(r));
    }

    #[test]
    fn sharp_conjugation() {
        let r = Ring::new(7, 1).unwrap();
        let x = LoopElement::v_power(r, &[1, 0]);
        let xi = x.inverse_monomial().unwrap();
        let a = LoopElement::elementary(r, 2, 1, 0, TruncSeries::monomial(r, 1, 5));
        assert_eq!(x.mul(&a).mul(&xi).depth(), 4);
    }
}
