//! Truncated loop-group simulator over `Z/p^a[[v]]`.
//!
//! Series carry explicit precision, so every reported valuation is a
//! certified lower bound. Randomness is drawn from per-trial ChaCha streams.

pub mod compare;
pub mod matrix;
pub mod series;
pub mod straighten;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use compare::{congruence_compare, CompareReport};
pub use matrix::{v_plus_p_inverse, v_plus_p_pow, LoopElement};
pub use series::{Ring, TruncSeries, EXACT};
pub use straighten::{straighten_right, StraightenProblem, StraightenReport};

use crate::error::{Error, Result};

/// Environment variable overriding the straightening window.
pub const PRECISION_ENV: &str = "ALCOVEKIT_PRECISION";

/// Default window `4p`.
pub fn default_window(p: u64) -> i64 {
    4 * p as i64
}

/// Window from [`PRECISION_ENV`], falling back to [`default_window`].
pub fn window_from_env(p: u64) -> Result<i64> {
    match std::env::var(PRECISION_ENV) {
        Ok(s) => s
            .trim()
            .parse::<i64>()
            .ok()
            .filter(|&w| w > 0)
            .ok_or_else(|| Error::Invalid(format!("{PRECISION_ENV} must be a positive integer, got {s:?}"))),
        Err(_) => Ok(default_window(p)),
    }
}

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Random exact polynomial with exponents in `lo..lo + len`.
pub fn random_poly(ring: Ring, lo: i64, len: usize, rng: &mut impl Rng) -> TruncSeries {
    let coeffs = (0..len).map(|_| rng.random_range(0..ring.modulus)).collect();
    TruncSeries::from_coeffs(ring, lo, coeffs, EXACT)
}

/// `1 + v^depth R` with `R` a random integral polynomial matrix.
pub fn random_deep(ring: Ring, n: usize, depth: i64, len: usize, rng: &mut impl Rng) -> LoopElement {
    let mut m = LoopElement::identity(ring, n);
    for i in 0..n {
        for k in 0..n {
            m.entries[i][k] = m.entries[i][k].add(&random_poly(ring, depth, len, rng));
        }
    }
    m
}

/// A loop element together with its exact inverse.
#[derive(Clone, Debug)]
pub struct Invertible {
    pub m: LoopElement,
    pub inv: LoopElement,
}

impl Invertible {
    pub fn identity(ring: Ring, n: usize) -> Self {
        Invertible { m: LoopElement::identity(ring, n), inv: LoopElement::identity(ring, n) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Invertible { m: self.m.mul(&o.m), inv: o.inv.mul(&self.inv) }
    }

    /// Product of a random constant monomial matrix and `steps` elementary
    /// matrices with integral polynomial entries.
    pub fn random_integral(ring: Ring, n: usize, steps: usize, len: usize, rng: &mut impl Rng) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let units: Vec<TruncSeries> = (0..n)
            .map(|_| loop {
                let c = rng.random_range(1..ring.modulus);
                if ring.is_unit(c) {
                    break TruncSeries::constant(ring, c);
                }
            })
            .collect();
        let mono = LoopElement::permutation(ring, &perm).mul(&LoopElement::diag(ring, units));
        let mono_inv = mono.inverse_monomial().expect("monomial");
        let mut acc = Invertible { m: mono, inv: mono_inv };
        if n < 2 {
            return acc;
        }
        for _ in 0..steps {
            let i = rng.random_range(0..n);
            let k = (i + rng.random_range(1..n)) % n;
            let s = random_poly(ring, 0, len, rng);
            let e = LoopElement::elementary(ring, n, i, k, s.clone());
            let e_inv = LoopElement::elementary(ring, n, i, k, s.neg());
            acc = acc.mul(&Invertible { m: e, inv: e_inv });
        }
        acc
    }
}

/// `X = U (v+p)^ν V` with `U, V` integral units and `ν` a permutation of `μ`.
#[derive(Clone, Debug)]
pub struct BoundedElement {
    pub x: Invertible,
    pub nu: Vec<i64>,
    /// `max_i μ_i - min_i μ_i`.
    pub h: i64,
}

impl BoundedElement {
    pub fn new(u: &Invertible, nu: &[i64], v: &Invertible) -> Self {
        let ring = u.m.ring;
        let neg: Vec<i64> = nu.iter().map(|k| -k).collect();
        let d = Invertible { m: LoopElement::v_plus_p_power(ring, nu), inv: LoopElement::v_plus_p_power(ring, &neg) };
        let h = nu.iter().max().copied().unwrap_or(0) - nu.iter().min().copied().unwrap_or(0);
        BoundedElement { x: u.mul(&d).mul(v), nu: nu.to_vec(), h }
    }

    pub fn random(ring: Ring, mu: &[i64], rng: &mut impl Rng) -> Self {
        let n = mu.len();
        let mut nu = mu.to_vec();
        for i in (1..n).rev() {
            nu.swap(i, rng.random_range(0..=i));
        }
        let u = Invertible::random_integral(ring, n, 2, 2, rng);
        let v = Invertible::random_integral(ring, n, 2, 2, rng);
        Self::new(&u, &nu, &v)
    }

    pub fn conjugate(&self, a: &LoopElement) -> LoopElement {
        self.x.m.mul(a).mul(&self.x.inv)
    }
}

/// Outcome of one conjugation-bound check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugationReport {
    pub input_depth: i64,
    pub measured: i64,
    pub bound: i64,
}

impl ConjugationReport {
    pub fn holds(&self) -> bool {
        self.measured >= self.bound
    }
}

/// `depth(X A X⁻¹) ≥ depth(A) - h - 2a + 2`, computed exactly.
pub fn conjugation_depth(x: &BoundedElement, a: &LoopElement) -> ConjugationReport {
    let input_depth = a.depth();
    let measured = x.conjugate(a).depth();
    let bound = input_depth - x.h - 2 * a.ring.a as i64 + 2;
    ConjugationReport { input_depth, measured, bound }
}

/// Random conjugation-bound trials for `GL_n` with cocharacter `mu`.
pub fn conjugation_trials(ring: Ring, mu: &[i64], trials: u64, seed: u64) -> Vec<ConjugationReport> {
    (0..trials)
        .map(|t| {
            let mut rng = rng_for(seed, t);
            let x = BoundedElement::random(ring, mu, &mut rng);
            let depth = rng.random_range(x.h + 2 * ring.a as i64..x.h + 2 * ring.a as i64 + 6);
            let a = random_deep(ring, mu.len(), depth, 3, &mut rng);
            conjugation_depth(&x, &a)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugation_bound_random() {
        for (p, a, mu) in [(7u64, 1u32, vec![1i64, 0]), (3, 2, vec![1, 0, 0]), (5, 2, vec![2, 1, 0]), (3, 3, vec![1, 0])] {
            let ring = Ring::new(p, a).unwrap();
            for r in conjugation_trials(ring, &mu, 40, 11) {
                assert!(r.holds(), "{p} {a} {mu:?} {r:?}");
            }
        }
    }

    #[test]
    fn bounded_inverse_exact() {
        let ring = Ring::new(5, 2).unwrap();
        let mut rng = rng_for(3, 0);
        let x = BoundedElement::random(ring, &[1, 0, -1], &mut rng);
        assert_eq!(x.x.m.mul(&x.x.inv), LoopElement::identity(ring, 3));
    }
}
