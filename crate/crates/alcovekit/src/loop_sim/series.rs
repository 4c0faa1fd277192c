//! Truncated Laurent series over `Z/p^a`.

use num_integer::Integer;

use crate::error::{Error, Result};

/// Precision of an exactly known series.
pub const EXACT: i64 = i64::MAX / 4;

pub(crate) fn sat_add(x: i64, y: i64) -> i64 {
    if x >= EXACT || y >= EXACT {
        EXACT
    } else {
        (x + y).min(EXACT)
    }
}

pub(crate) fn sat_mul(x: i64, k: i64) -> i64 {
    if x >= EXACT {
        EXACT
    } else {
        x.saturating_mul(k).min(EXACT)
    }
}

/// The coefficient ring `Z/p^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    pub p: u64,
    pub a: u32,
    pub modulus: u64,
}

impl Ring {
    pub fn new(p: u64, a: u32) -> Result<Self> {
        if p < 2 || a == 0 {
            return Err(Error::Invalid(format!("bad coefficient ring Z/{p}^{a}")));
        }
        let modulus = p.checked_pow(a).filter(|&m| m < 1 << 62).ok_or_else(|| Error::Invalid("p^a too large".into()))?;
        Ok(Ring { p, a, modulus })
    }

    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        (x + y) % self.modulus
    }

    pub fn sub(&self, x: u64, y: u64) -> u64 {
        (x + self.modulus - y) % self.modulus
    }

    pub fn neg(&self, x: u64) -> u64 {
        (self.modulus - x) % self.modulus
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.modulus as u128) as u64
    }

    pub fn is_unit(&self, x: u64) -> bool {
        !x.is_multiple_of(self.p)
    }

    pub fn inv(&self, x: u64) -> Option<u64> {
        let g = (x as i128).extended_gcd(&(self.modulus as i128));
        (g.gcd == 1).then(|| g.x.rem_euclid(self.modulus as i128) as u64)
    }
}

/// `Σ_{start ≤ k < prec} c_k v^k + O(v^prec)`; every coefficient outside
/// `coeffs` but below `prec` is zero. Normalized so that the first and last
/// stored coefficients are nonzero; the zero series has `start = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    ring: Ring,
    start: i64,
    coeffs: Vec<u64>,
    prec: i64,
}

impl TruncSeries {
    pub fn from_coeffs(ring: Ring, start: i64, coeffs: Vec<u64>, prec: i64) -> Self {
        let coeffs = coeffs.into_iter().map(|c| c % ring.modulus).collect();
        let mut s = TruncSeries { ring, start, coeffs, prec };
        s.normalize();
        s
    }

    /// From signed integer coefficients.
    pub fn from_ints(ring: Ring, start: i64, coeffs: &[i64], prec: i64) -> Self {
        Self::from_coeffs(ring, start, coeffs.iter().map(|&c| ring.reduce(c)).collect(), prec)
    }

    pub fn zero(ring: Ring, prec: i64) -> Self {
        TruncSeries { ring, start: 0, coeffs: Vec::new(), prec }
    }

    pub fn constant(ring: Ring, c: u64) -> Self {
        Self::from_coeffs(ring, 0, vec![c], EXACT)
    }

    pub fn one(ring: Ring) -> Self {
        Self::constant(ring, 1)
    }

    /// `c v^k`, exact.
    pub fn monomial(ring: Ring, c: u64, k: i64) -> Self {
        Self::from_coeffs(ring, k, vec![c], EXACT)
    }

    /// `v + p`.
    pub fn v_plus_p(ring: Ring) -> Self {
        Self::from_coeffs(ring, 0, vec![ring.p % ring.modulus, 1], EXACT)
    }

    fn normalize(&mut self) {
        let cut = (self.prec - self.start).clamp(0, self.coeffs.len() as i64) as usize;
        self.coeffs.truncate(cut);
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.start = 0;
        } else {
            self.coeffs.drain(..lead);
            self.start += lead as i64;
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// Valuation, or `None` if zero within the precision.
    pub fn val(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    /// Certified lower bound for the valuation.
    pub fn val_bound(&self) -> i64 {
        self.val().unwrap_or(self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest stored exponent plus one (the start for zero).
    pub fn end(&self) -> i64 {
        self.start + self.coeffs.len() as i64
    }

    pub fn coeff(&self, k: i64) -> u64 {
        if k < self.start || k >= self.end() {
            0
        } else {
            self.coeffs[(k - self.start) as usize]
        }
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> Vec<(i64, u64)> {
        (self.start..self.end()).map(|k| (k, self.coeff(k))).filter(|&(_, c)| c != 0).collect()
    }

    pub fn pole_order(&self) -> i64 {
        (-self.val().unwrap_or(0)).max(0)
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let mut s = self.clone();
        s.prec = s.prec.min(prec);
        s.normalize();
        s
    }

    fn combine(&self, o: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        let prec = self.prec.min(o.prec);
        if self.is_zero() && o.is_zero() {
            return Self::zero(self.ring, prec);
        }
        let lo = match (self.val(), o.val()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, b) => b.expect("one side is nonzero"),
        };
        let hi = self.end().max(o.end()).min(prec);
        let coeffs = (lo..hi.max(lo)).map(|k| f(self.coeff(k), o.coeff(k))).collect();
        Self::from_coeffs(self.ring, lo, coeffs, prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, |x, y| self.ring.add(x, y))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, |x, y| self.ring.sub(x, y))
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| self.ring.neg(c)).collect();
        TruncSeries { coeffs, ..self.clone() }
    }

    pub fn scale(&self, c: u64) -> Self {
        let coeffs = self.coeffs.iter().map(|&x| self.ring.mul(x, c)).collect();
        Self::from_coeffs(self.ring, self.start, coeffs, self.prec)
    }

    /// Multiplication by `v^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero(self.ring, sat_add(self.prec, k));
        }
        TruncSeries { start: self.start + k, prec: sat_add(self.prec, k), ..self.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_capped(o, EXACT)
    }

    /// Product known modulo `v^min(N_a + v(b), N_b + v(a), cap)`.
    pub fn mul_capped(&self, o: &Self, cap: i64) -> Self {
        let prec = sat_add(self.prec, o.val_bound()).min(sat_add(o.prec, self.val_bound())).min(cap);
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.ring, prec);
        }
        let start = self.start + o.start;
        let len = (self.coeffs.len() + o.coeffs.len() - 1).min((prec - start).max(0) as usize);
        let m = self.ring.modulus as u128;
        let mut acc = vec![0u128; len];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0 || i >= len {
                continue;
            }
            for (j, &y) in o.coeffs.iter().enumerate().take(len - i) {
                acc[i + j] = (acc[i + j] + x as u128 * y as u128) % m;
            }
        }
        Self::from_coeffs(self.ring, start, acc.into_iter().map(|c| c as u64).collect(), prec)
    }

    /// Frobenius `v ↦ v^p` with trivial action on coefficients.
    pub fn phi(&self) -> Self {
        let p = self.ring.p as i64;
        self.expand(p)
    }

    /// Substitutes `v ↦ v^k` for `k ≥ 1`.
    pub fn expand(&self, k: i64) -> Self {
        assert!(k >= 1);
        let mut coeffs = vec![0u64; if self.coeffs.is_empty() { 0 } else { (self.coeffs.len() - 1) * k as usize + 1 }];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c;
        }
        Self::from_coeffs(self.ring, self.start * k, coeffs, sat_mul(self.prec, k))
    }

    /// Reduction of the coefficients modulo `p`, viewed again in `Z/p^a`.
    pub fn mod_p(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| c % self.ring.p).collect();
        Self::from_coeffs(self.ring, self.start, coeffs, self.prec)
    }

    /// Inverse, known at most modulo `v^cap`.
    ///
    /// The series is split as `U + L` with `U` starting at the first unit
    /// coefficient and `L` the (nilpotent) terms below it; then
    /// `(U + L)⁻¹ = Σ_{n<a} (-U⁻¹L)^n U⁻¹`.
    pub fn inverse(&self, cap: i64) -> Result<Self> {
        let ring = self.ring;
        let k0 = (self.start..self.end())
            .find(|&k| ring.is_unit(self.coeff(k)))
            .ok_or_else(|| {
                if self.is_exact() {
                    Error::NotInvertible("no unit coefficient".into())
                } else {
                    Error::Precision("no unit coefficient inside the precision window".into())
                }
            })?;
        let c_inv = ring.inv(self.coeff(k0)).expect("unit");
        let low_pole = k0 - self.start;
        // relative terms of (1 + δ)⁻¹ we can certify or need
        let rel = if self.is_exact() {
            (cap + 2 * k0 + (ring.a as i64) * (low_pole + 1) + 1).max(1)
        } else {
            (self.prec - k0).max(0)
        };
        let d: Vec<u64> = (0..rel).map(|i| ring.mul(self.coeff(k0 + i), c_inv)).collect();
        let mut y = vec![0u64; rel as usize];
        if rel > 0 {
            y[0] = 1;
        }
        for m in 1..rel as usize {
            let mut s = 0u128;
            for i in 1..=m {
                if d[i] != 0 {
                    s = (s + d[i] as u128 * y[m - i] as u128) % ring.modulus as u128;
                }
            }
            y[m] = ring.neg(s as u64);
        }
        let y_scaled: Vec<u64> = y.iter().map(|&t| ring.mul(t, c_inv)).collect();
        let u_inv = Self::from_coeffs(ring, -k0, y_scaled, -k0 + rel);
        let low_terms: Vec<u64> = (self.start..k0).map(|k| self.coeff(k)).collect();
        let low = Self::from_coeffs(ring, self.start, low_terms, EXACT);
        if low.is_zero() {
            return Ok(u_inv.truncate(cap));
        }
        let t = u_inv.mul(&low).neg();
        let mut sum = Self::one(ring);
        let mut pow = Self::one(ring);
        for _ in 1..ring.a {
            pow = pow.mul(&t);
            sum = sum.add(&pow);
        }
        Ok(sum.mul(&u_inv).truncate(cap))
    }

    /// Compact `c·v^k + ... + O(v^N)` rendering.
    pub fn display(&self) -> String {
        let mut parts: Vec<String> = self
            .terms()
            .into_iter()
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}v"),
                _ => format!("{c}v^{k}"),
            })
            .collect();
        if parts.is_empty() {
            parts.push("0".into());
        }
        let body = parts.join(" + ");
        if self.is_exact() {
            body
        } else {
            format!("{body} + O(v^{})", self.prec)
        }
    }

    /// `{exponent: coefficient}` map for JSON output.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: serde_json::Map<String, serde_json::Value> =
            self.terms().into_iter().map(|(k, c)| (k.to_string(), c.into())).collect();
        let prec = if self.is_exact() { serde_json::Value::Null } else { self.prec.into() };
        serde_json::json!({ "terms": terms, "prec": prec })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_v_plus_p() {
        let r = Ring::new(3, 2).unwrap();
        let inv = TruncSeries::v_plus_p(r).inverse(6).unwrap();
        assert_eq!(inv.terms(), vec![(-2, 6), (-1, 1)]);
        assert!(inv.prec() >= 6);
        let prod = inv.mul(&TruncSeries::v_plus_p(r));
        assert_eq!(prod.truncate(6), TruncSeries::one(r).truncate(6));
    }

    #[test]
    fn cube_mod_nine() {
        let r = Ring::new(3, 2).unwrap();
        let x = TruncSeries::v_plus_p(r);
        assert_eq!(x.mul(&x).mul(&x), TruncSeries::monomial(r, 1, 3));
    }

    #[test]
    fn unit_power_series_inverse() {
        let r = Ring::new(5, 2).unwrap();
        let s = TruncSeries::from_ints(r, 0, &[2, 1, 7, 3], 10);
        let inv = s.inverse(20).unwrap();
        assert_eq!(inv.prec(), 10);
        assert_eq!(s.mul(&inv), TruncSeries::one(r).truncate(10));
    }

    #[test]
    fn precision_rule() {
        let r = Ring::new(7, 1).unwrap();
        let a = TruncSeries::from_ints(r, 1, &[1], 5);
        let b = TruncSeries::from_ints(r, 2, &[3], 8);
        assert_eq!(a.mul(&b).prec(), 7);
        assert_eq!(a.phi().prec(), 35);
        assert_eq!(a.phi().terms(), vec![(7, 1)]);
    }
}
