//! Points of the apartment stored relative to the origin `o`, one rational
//! cocharacter `η_j = x_j - o` per embedding `j ∈ {0, .., r-1}`.
//!
//! Conventions: `u^λ · o = o - λ/e`, translations act by `v^ν · η = η - ν`
//! and Weyl elements linearly, so `(v^ν w) · η = wη - ν`. Frobenius shifts
//! the embedding index by one and scales by `p`; `σ` shifts and applies `ψ`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice;
use crate::rootdata::{FactorKind, GammaData, RootDatum, WeylElement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApartmentPoint {
    pub p: u64,
    pub e: u64,
    pub r: u32,
    pub eta: Vec<Vec<BigRational>>,
}

/// Formats a rational as `num/den` (or `num` when integral).
pub fn fmt_q(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `num/den` or an integer.
pub fn parse_q(s: &str) -> Result<BigRational> {
    let bad = || Error::Invalid(format!("cannot parse rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

fn int_q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `(v^ν w) · η = wη - ν`.
pub fn affine_act(nu: &[i64], w: &WeylElement, eta: &[BigRational]) -> Vec<BigRational> {
    w.apply_q(eta).into_iter().zip(nu).map(|(x, &n)| x - int_q(n)).collect()
}

impl ApartmentPoint {
    /// The point `o` in every slot.
    pub fn origin(rd: &RootDatum, g: &GammaData) -> Self {
        ApartmentPoint { p: g.p, e: g.e, r: g.r, eta: vec![vec![BigRational::zero(); rd.rank]; g.r as usize] }
    }

    /// A Γ-fixed point with slot-0 value `eta0`, the other slots filled by
    /// `η_j = ψ^j(η_0)`.
    pub fn fixed_from_slot0(g: &GammaData, eta0: Vec<BigRational>) -> Self {
        let mut eta = vec![eta0];
        for j in 1..g.r as usize {
            let next = lattice::mat_vec_q(&g.psi, &eta[j - 1]);
            eta.push(next);
        }
        ApartmentPoint { p: g.p, e: g.e, r: g.r, eta }
    }

    pub fn rank(&self) -> usize {
        self.eta.first().map_or(0, Vec::len)
    }

    /// Frobenius: `φ(x)_j = p · η_{j-1}`.
    pub fn frobenius(&self) -> ApartmentPoint {
        let r = self.eta.len();
        let p = int_q(self.p as i64);
        let eta = (0..r).map(|j| self.eta[(j + r - 1) % r].iter().map(|x| x * &p).collect()).collect();
        ApartmentPoint { eta, ..self.clone() }
    }

    /// Action of `σ`: `(σx)_j = ψ(η_{j-1})`.
    pub fn sigma_action(&self, g: &GammaData) -> ApartmentPoint {
        let r = self.eta.len();
        let eta = (0..r).map(|j| lattice::mat_vec_q(&g.psi, &self.eta[(j + r - 1) % r])).collect();
        ApartmentPoint { eta, ..self.clone() }
    }

    /// Action of `γ` through the inertial lattice automorphism.
    pub fn gamma_action(&self, g: &GammaData) -> ApartmentPoint {
        let eta = self.eta.iter().map(|v| lattice::mat_vec_q(&g.inertia, v)).collect();
        ApartmentPoint { eta, ..self.clone() }
    }

    pub fn is_gamma_fixed(&self, g: &GammaData) -> bool {
        self.sigma_action(g) == *self && self.gamma_action(g) == *self
    }

    /// Every coordinate has denominator dividing `2e`.
    pub fn denominators_ok(&self) -> bool {
        let two_e = BigInt::from(2 * self.e);
        self.eta.iter().flatten().all(|x| (&two_e % x.denom()).is_zero())
    }

    pub fn to_json(&self) -> Value {
        let eta: Vec<Vec<String>> = self.eta.iter().map(|v| v.iter().map(fmt_q).collect()).collect();
        json!({ "e": self.e, "p": self.p, "r": self.r, "eta": eta })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Invalid(format!("apartment point JSON: {what}"));
        let num = |k: &str| v.get(k).and_then(Value::as_u64).ok_or_else(|| bad(k));
        let eta = v
            .get("eta")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("eta"))?
            .iter()
            .map(|slot| {
                slot.as_array()
                    .ok_or_else(|| bad("eta slot"))?
                    .iter()
                    .map(|s| parse_q(s.as_str().ok_or_else(|| bad("coordinate"))?))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ApartmentPoint { p: num("p")?, e: num("e")?, r: num("r")? as u32, eta })
    }
}

/// `x = n · o = o - (1/e) w⁻¹ λ` slot by slot.
pub fn point_from_type(rd: &RootDatum, g: &GammaData, lambda: &[Vec<i64>], w: &[WeylElement]) -> Result<ApartmentPoint> {
    let r = g.r as usize;
    if lambda.len() != r || w.len() != r {
        return Err(Error::Dimension(format!("need {r} slots of (λ, w), got {} and {}", lambda.len(), w.len())));
    }
    let e = int_q(g.e as i64);
    let mut eta = Vec::with_capacity(r);
    for (l, wj) in lambda.iter().zip(w) {
        if l.len() != rd.rank {
            return Err(Error::Dimension(format!("λ has {} coordinates, rank is {}", l.len(), rd.rank)));
        }
        let v = wj.inverse().apply(l);
        eta.push(v.into_iter().map(|x| -int_q(x) / &e).collect());
    }
    Ok(ApartmentPoint { p: g.p, e: g.e, r: g.r, eta })
}

/// `x` is `d`-generic: for every positive root `a` some integer `n_a`
/// satisfies `n_a + d/p < ⟨a, η⟩ < n_a + 1 - d/p`. Evaluated on slot 0.
pub fn is_d_generic(rd: &RootDatum, x: &ApartmentPoint, d: &BigRational) -> bool {
    let margin = d / int_q(x.p as i64);
    rd.positive_roots().into_iter().all(|a| {
        let t = rd.pairing_q(a, &x.eta[0]);
        // smallest integer strictly above t - 1 + margin
        let lo = (&t - BigRational::one() + &margin).floor() + BigRational::one();
        lo < &t - &margin
    })
}

/// `0 ≤ ⟨a, η⟩ < 1` for every positive root (slot 0).
pub fn is_lowest_alcove(rd: &RootDatum, x: &ApartmentPoint) -> bool {
    rd.positive_roots().into_iter().all(|a| {
        let t = rd.pairing_q(a, &x.eta[0]);
        !t.is_negative() && t < BigRational::one()
    })
}

/// `d + 1 < ⟨a, μ+η⟩ < p - d - 1` for every positive root.
pub fn is_deep_lowest_alcove(rd: &RootDatum, mu_eta: &[i64], d: &BigRational, p: u64) -> bool {
    let one = BigRational::one();
    let lo = d + &one;
    let hi = int_q(p as i64) - d - &one;
    rd.positive_roots().into_iter().all(|a| {
        let t = int_q(rd.pairing(a, mu_eta));
        lo < t && t < hi
    })
}

/// Concave-function level: a constant `f`, or the jump just above it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Level {
    At(BigRational),
    Plus(BigRational),
}

impl Level {
    pub fn zero() -> Self {
        Level::At(BigRational::zero())
    }

    fn ceil_shift(&self, t: &BigRational, e: &BigRational) -> BigInt {
        match self {
            Level::At(f) => (t + e * f).ceil().to_integer(),
            Level::Plus(f) => (t + e * f).floor().to_integer() + 1,
        }
    }

    fn torus(&self) -> BigRational {
        match self {
            Level::At(f) => f.ceil(),
            Level::Plus(f) => f.floor() + BigRational::one(),
        }
    }
}

/// Entrywise valuation pattern of a parahoric (or its filtration subgroup)
/// for `GL_n`. Bounds are integral exponents of `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationPattern {
    pub n: usize,
    pub e: u64,
    pub lower_bounds: Vec<Vec<BigRational>>,
    pub torus_level: BigRational,
    /// `η` in ambient coordinates; determines the pattern at every level.
    pub eta: Vec<BigRational>,
}

impl ValuationPattern {
    /// Bounds in units of `v = u^e`.
    pub fn v_bounds(&self) -> Vec<Vec<i64>> {
        let e = BigInt::from(self.e);
        self.lower_bounds
            .iter()
            .map(|row| row.iter().map(|b| i64::try_from(b.to_integer().div_ceil(&e)).expect("small bound")).collect())
            .collect()
    }

    /// `⟨e_i - e_k, η⟩`.
    pub fn pairing(&self, i: usize, k: usize) -> BigRational {
        &self.eta[i] - &self.eta[k]
    }
}

/// Parahoric valuation pattern of slot `j` of `x` at level `f`, for a
/// single `GL_n` factor: `lb(i,k) = ⌈-e⟨e_i - e_k, η_j⟩ + e f⌉`.
pub fn parahoric_pattern(rd: &RootDatum, x: &ApartmentPoint, f: &Level, j: usize) -> Result<ValuationPattern> {
    let [c] = rd.components.as_slice() else {
        return Err(Error::Invalid(format!("valuation patterns need a single GL_n, got {}", rd.label)));
    };
    if c.factor.kind != FactorKind::GL {
        return Err(Error::Invalid(format!("valuation patterns need GL_n, got {}", rd.label)));
    }
    let eta = x.eta.get(j).ok_or_else(|| Error::Dimension(format!("no embedding {j}")))?.clone();
    let n = c.factor.n;
    let e = int_q(x.e as i64);
    let lower_bounds = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    if i == k {
                        BigRational::zero()
                    } else {
                        let t = -(&eta[i] - &eta[k]) * &e;
                        BigRational::from_integer(f.ceil_shift(&t, &e))
                    }
                })
                .collect()
        })
        .collect();
    Ok(ValuationPattern { n, e: x.e, lower_bounds, torus_level: f.torus(), eta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{q, qv};

    fn gl(n: usize) -> RootDatum {
        format!("GL{n}").parse().unwrap()
    }

    #[test]
    fn sl2_point() {
        let rd: RootDatum = "SL2".parse().unwrap();
        let g = GammaData::split(&rd, 7, 24, 2).unwrap();
        let id = WeylElement::identity(&rd);
        let x = point_from_type(&rd, &g, &[vec![-3], vec![-3]], &[id.clone(), id]).unwrap();
        assert_eq!(rd.to_ambient_q(&x.eta[0]), vec![q(1, 8), q(-1, 8)]);
        assert!(is_lowest_alcove(&rd, &x));
        assert!(x.is_gamma_fixed(&g));
        let y = x.frobenius();
        assert_eq!(y.eta[0], vec![q(7, 8)]);
    }

    #[test]
    fn origin_walls() {
        let rd = gl(3);
        let g = GammaData::split(&rd, 5, 4, 1).unwrap();
        let o = ApartmentPoint::origin(&rd, &g);
        assert!(is_lowest_alcove(&rd, &o));
        assert!(!is_d_generic(&rd, &o, &q(0, 1)));
        assert!(is_d_generic(&rd, &o, &q(-1, 1)));
        assert_eq!(o.frobenius(), o);
    }

    #[test]
    fn deep_lowest() {
        let rd = gl(3);
        assert!(is_deep_lowest_alcove(&rd, &[18, 12, 7], &q(3, 1), 19));
        assert!(!is_deep_lowest_alcove(&rd, &[1, 0, 0], &q(1, 1), 19));
        assert!(is_deep_lowest_alcove(&rd, &[4, 2, 1], &q(-1, 1), 7));
    }

    #[test]
    fn gl3_pattern_below_diagonal() {
        let rd = gl(3);
        let g = GammaData::split(&rd, 7, 6, 1).unwrap();
        let e = 6;
        let x = ApartmentPoint { p: 7, e, r: 1, eta: vec![vec![q(1, 3 * e as i64), q(0, 1), q(-1, 3 * e as i64)]] };
        let pat = parahoric_pattern(&rd, &x, &Level::zero(), 0).unwrap();
        let lb: Vec<Vec<BigRational>> = pat.lower_bounds.clone();
        assert_eq!(lb, vec![qv(&[0, 0, 0]), qv(&[1, 0, 0]), qv(&[1, 1, 0])]);
        assert!(g.inertia_is_trivial());
    }

    #[test]
    fn gl2_upper_triangular_mod_v() {
        let rd = gl(2);
        let g = GammaData::split(&rd, 7, 6, 1).unwrap();
        let id = WeylElement::identity(&rd);
        let x = point_from_type(&rd, &g, &[vec![0, 1]], &[id]).unwrap();
        let pat = parahoric_pattern(&rd, &x, &Level::zero(), 0).unwrap();
        assert_eq!(pat.lower_bounds, vec![qv(&[0, -1]), qv(&[1, 0])]);
        assert_eq!(pat.v_bounds(), vec![vec![0, 0], vec![1, 0]]);
        let fx = parahoric_pattern(&rd, &x.frobenius(), &Level::zero(), 0).unwrap();
        assert_eq!(fx.v_bounds(), vec![vec![0, -1], vec![2, 0]]);
        let plus = parahoric_pattern(&rd, &ApartmentPoint::origin(&rd, &g), &Level::Plus(q(0, 1)), 0).unwrap();
        assert_eq!(plus.lower_bounds, vec![qv(&[0, 1]), qv(&[1, 0])]);
        assert_eq!(plus.torus_level, q(1, 1));
    }

    #[test]
    fn json_roundtrip() {
        let x = ApartmentPoint { p: 7, e: 24, r: 2, eta: vec![vec![q(1, 8)], vec![q(-3, 4)]] };
        let v = x.to_json();
        assert_eq!(v["eta"][0][0], "1/8");
        assert_eq!(ApartmentPoint::from_json(&v).unwrap(), x);
    }
}
