//! Comparison of the `v`- and `(v+p)`-adic filtrations modulo `p^a`.

use super::series::{Ring, TruncSeries};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompareReport {
    pub p: u64,
    pub a: u32,
    pub n: i64,
    /// `(v+p)^n = v^{n-a+1} q_1`.
    pub q1: Vec<u64>,
    pub first_divides: bool,
    /// `v^n = (v+p)^{n-a+1} q_2 + r`.
    pub q2: Vec<u64>,
    pub remainder: Vec<u64>,
    /// `(v+p)^{p^{a-1}} ≡ v^{p^{a-1}} mod p`.
    pub frobenius_congruence: bool,
}

impl CompareReport {
    pub fn holds(&self) -> bool {
        self.first_divides && self.remainder.iter().all(|&c| c == 0) && self.frobenius_congruence
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p, "a": self.a, "n": self.n,
            "q1": self.q1, "first_divides": self.first_divides,
            "q2": self.q2, "remainder": self.remainder,
            "frobenius_congruence": self.frobenius_congruence,
            "holds": self.holds(),
        })
    }
}

fn coeffs_from(s: &TruncSeries, lo: i64, hi: i64) -> Vec<u64> {
    (lo..hi).map(|k| s.coeff(k)).collect()
}

/// Checks both inclusions between `v^n` and `(v+p)^n` ideals over `Z/p^a`
/// and the Frobenius-power congruence.
pub fn congruence_compare(p: u64, a: u32, n: i64) -> Result<CompareReport> {
    let ring = Ring::new(p, a)?;
    let m = n - a as i64 + 1;
    if m < 0 {
        return Err(Error::Invalid(format!("need n ≥ a - 1, got n = {n}, a = {a}")));
    }
    let vp = TruncSeries::v_plus_p(ring);
    let pow_n = (0..n).fold(TruncSeries::one(ring), |acc, _| acc.mul(&vp));
    let first_divides = pow_n.terms().iter().all(|&(k, _)| k >= m);
    let q1 = coeffs_from(&pow_n, m, n + 1);

    // long division of v^n by the monic (v+p)^m, highest degree first
    let pow_m = (0..m).fold(TruncSeries::one(ring), |acc, _| acc.mul(&vp));
    let divisor = coeffs_from(&pow_m, 0, m + 1);
    let mut rem: Vec<u64> = vec![0; n as usize + 1];
    rem[n as usize] = 1;
    let mut q2 = vec![0u64; (n - m) as usize + 1];
    for deg in (m..=n).rev() {
        let c = rem[deg as usize];
        if c == 0 {
            continue;
        }
        let shift = (deg - m) as usize;
        q2[shift] = c;
        for (i, &d) in divisor.iter().enumerate() {
            rem[shift + i] = ring.sub(rem[shift + i], ring.mul(c, d));
        }
    }
    rem.truncate(m as usize);

    let e = (p as i64).pow(a - 1);
    let pow_e = (0..e).fold(TruncSeries::one(ring), |acc, _| acc.mul(&vp));
    let frobenius_congruence = pow_e.mod_p() == TruncSeries::monomial(ring, 1, e);

    Ok(CompareReport { p, a, n, q1, first_divides, q2, remainder: rem, frobenius_congruence })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        for (p, a, n) in [(3, 2, 7), (5, 3, 9), (2, 4, 5), (7, 1, 3)] {
            let r = congruence_compare(p, a, n).unwrap();
            assert!(r.holds(), "{r:?}");
        }
    }

    #[test]
    fn quotient_values() {
        // (v+3)^2 = v^2 + 6v mod 9, so q1 = 6 + v
        let r = congruence_compare(3, 2, 2).unwrap();
        assert_eq!(r.q1, vec![6, 1]);
    }
}
