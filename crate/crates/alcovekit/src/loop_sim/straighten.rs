//! Iterative solution of `A⁻¹ X φ_c(A) = B X` for `A ≡ 1 mod v^f`.
//!
//! The map `Ψ(A) = X φ_c(A) X⁻¹ B⁻¹` contracts depth by at least
//! `δ = (p-1)f - h - 2a + 2` per step, so iterates agree modulo `v^W` after
//! about `W/δ` steps.

use rand::Rng;

use super::matrix::LoopElement;
use super::series::TruncSeries;
use super::{random_deep, rng_for, BoundedElement, Invertible};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct StraightenProblem {
    pub x: BoundedElement,
    pub b: LoopElement,
    /// Monomial twist of the Frobenius, `φ_c(A) = c φ(A) c⁻¹`.
    pub c: Invertible,
    pub f: i64,
    /// Extra genericity depth gained per step, when known.
    pub d: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct StraightenReport {
    pub a: LoopElement,
    pub window: i64,
    pub delta: i64,
    pub iterations: usize,
    pub max_iterations: usize,
    /// `v(A_{k+1} - A_k)` per step.
    pub trace: Vec<i64>,
    pub residual_ok: bool,
    pub b_roundtrip_ok: bool,
}

impl StraightenReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "window": self.window,
            "delta": self.delta,
            "iterations": self.iterations,
            "max_iterations": self.max_iterations,
            "trace": self.trace,
            "residual_ok": self.residual_ok,
            "b_roundtrip_ok": self.b_roundtrip_ok,
            "a": self.a.to_json(),
        })
    }
}

impl StraightenProblem {
    pub fn p(&self) -> u64 {
        self.b.ring.p
    }

    pub fn delta(&self) -> i64 {
        let p = self.p() as i64;
        (p - 1) * self.f - self.x.h - 2 * self.b.ring.a as i64 + 2 + self.d.unwrap_or(0)
    }

    fn margin(&self) -> i64 {
        self.x.x.m.pole_order() + self.x.x.inv.pole_order() + self.c.m.pole_order() + self.c.inv.pole_order() + 1
    }

    /// `X c φ(A) c⁻¹ X⁻¹`, correct modulo `v^window`.
    fn twisted(&self, a: &LoopElement, window: i64) -> Result<LoopElement> {
        let cap = window + self.margin();
        let pa = a.phi().truncate(cap);
        let t = self.c.m.mul_capped(&pa, cap).mul_capped(&self.c.inv, cap);
        let t = self.x.x.m.mul_capped(&t, cap).mul_capped(&self.x.x.inv, cap);
        if t.min_prec() < window {
            return Err(Error::Precision(format!("lost precision: {} < {window}", t.min_prec())));
        }
        Ok(t.truncate(window))
    }

    /// One application of `Ψ` modulo `v^window`.
    pub fn psi(&self, a: &LoopElement, b_inv: &LoopElement, window: i64) -> Result<LoopElement> {
        let t = self.twisted(a, window)?;
        Ok(t.mul_capped(b_inv, window).truncate(window))
    }

    /// A random problem with `B ≡ 1 mod v^f`, `X` bounded by `mu` and `c = 1`.
    pub fn random(ring: super::Ring, mu: &[i64], f: i64, rng: &mut impl Rng) -> Self {
        let n = mu.len();
        let x = BoundedElement::random(ring, mu, rng);
        let b = random_deep(ring, n, f, 3, rng);
        StraightenProblem { x, b, c: Invertible::identity(ring, n), f, d: None }
    }
}

/// Runs the iteration from `start` (the identity when `None`).
pub fn straighten_right(problem: &StraightenProblem, window: i64, start: Option<&LoopElement>) -> Result<StraightenReport> {
    let delta = problem.delta();
    if delta <= 0 {
        return Err(Error::Refused(format!(
            "contraction rate (p-1)f - h - 2a + 2 = {delta} is not positive; straightening is not guaranteed"
        )));
    }
    if window <= 0 {
        return Err(Error::Invalid("window must be positive".into()));
    }
    let ring = problem.b.ring;
    let n = problem.b.n();
    if problem.b.depth() < problem.f {
        return Err(Error::Refused(format!("B has depth {} < f = {}", problem.b.depth(), problem.f)));
    }
    let b_inv = problem.b.inverse_integral(window)?;
    let max_iterations = (window / delta) as usize + 2;
    let mut a = start.cloned().unwrap_or_else(|| LoopElement::identity(ring, n)).truncate(window);
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        if iterations > max_iterations + 1 {
            return Err(Error::Refused(format!("no convergence after {iterations} iterations")));
        }
        let next = problem.psi(&a, &b_inv, window)?;
        iterations += 1;
        let diff = next.sub(&a).entries.iter().flatten().map(TruncSeries::val_bound).min().unwrap_or(window);
        trace.push(diff.min(window));
        a = next;
        if diff >= window {
            break;
        }
    }
    let a_inv = a.inverse_integral(window)?;
    let psi_a = problem.psi(&a, &b_inv, window)?;
    let residual_ok = a_inv.mul_capped(&psi_a, window).truncate(window) == LoopElement::identity(ring, n).truncate(window);
    let b_back = a_inv.mul_capped(&problem.twisted(&a, window)?, window).truncate(window);
    let b_roundtrip_ok = b_back == problem.b.truncate(window);
    Ok(StraightenReport { a, window, delta, iterations, max_iterations, trace, residual_ok, b_roundtrip_ok })
}

/// Summary of a batch of random straightening runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchReport {
    pub instances: usize,
    pub converged: usize,
    pub within_bound: usize,
    pub residual_ok: usize,
    pub unique: usize,
}

impl BatchReport {
    pub fn all_ok(&self) -> bool {
        [self.converged, self.within_bound, self.residual_ok, self.unique].iter().all(|&c| c == self.instances)
    }
}

/// Runs `instances` random problems for `GL_n` with cocharacter `mu`, each
/// from two starting points.
pub fn straighten_batch(ring: super::Ring, mu: &[i64], f: i64, window: i64, instances: usize, seed: u64) -> BatchReport {
    let mut rep = BatchReport { instances, converged: 0, within_bound: 0, residual_ok: 0, unique: 0 };
    for t in 0..instances {
        let mut rng = rng_for(seed, t as u64);
        let prob = StraightenProblem::random(ring, mu, f, &mut rng);
        let start2 = random_deep(ring, mu.len(), f, 3, &mut rng);
        let (Ok(r1), Ok(r2)) = (straighten_right(&prob, window, None), straighten_right(&prob, window, Some(&start2))) else {
            continue;
        };
        rep.converged += 1;
        if r1.iterations <= r1.max_iterations && r2.iterations <= r2.max_iterations {
            rep.within_bound += 1;
        }
        if r1.residual_ok && r2.residual_ok && r1.b_roundtrip_ok {
            rep.residual_ok += 1;
        }
        if r1.a == r2.a {
            rep.unique += 1;
        }
    }
    rep
}

/// Checks `depth(Ψ(A)⁻¹Ψ(A')) ≥ depth(A⁻¹A') + 1` on random pairs.
pub fn contraction_trials(ring: super::Ring, mu: &[i64], f: i64, window: i64, trials: usize, seed: u64) -> Result<Vec<(i64, i64)>> {
    let n = mu.len();
    let mut out = Vec::new();
    for t in 0..trials {
        let mut rng = rng_for(seed, t as u64);
        let prob = StraightenProblem::random(ring, mu, f, &mut rng);
        let b_inv = prob.b.inverse_integral(window)?;
        let a = random_deep(ring, n, f, 3, &mut rng);
        let gap = rng.random_range(f..f + 3);
        let a2 = a.mul(&random_deep(ring, n, gap, 2, &mut rng)).truncate(window);
        let before = a.inverse_integral(window)?.mul_capped(&a2, window).depth().min(window);
        let pa = prob.psi(&a, &b_inv, window)?;
        let pa2 = prob.psi(&a2, &b_inv, window)?;
        let after = pa.inverse_integral(window)?.mul_capped(&pa2, window).depth().min(window);
        out.push((before, after));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::Ring;
    use super::*;

    #[test]
    fn converges_and_unique() {
        let ring = Ring::new(7, 1).unwrap();
        let rep = straighten_batch(ring, &[1, 0], 1, 28, 10, 5);
        assert!(rep.all_ok(), "{rep:?}");
        let ring = Ring::new(5, 1).unwrap();
        let rep = straighten_batch(ring, &[2, 1, 0], 2, 20, 5, 6);
        assert!(rep.all_ok(), "{rep:?}");
    }

    #[test]
    fn refuses_without_contraction() {
        let ring = Ring::new(3, 2).unwrap();
        let mut rng = rng_for(1, 0);
        let prob = StraightenProblem::random(ring, &[2, 0], 1, &mut rng);
        assert!(matches!(straighten_right(&prob, 12, None), Err(Error::Refused(_))));
    }

    #[test]
    fn contraction() {
        let ring = Ring::new(7, 1).unwrap();
        for (before, after) in contraction_trials(ring, &[1, 0, 0], 1, 28, 10, 2).unwrap() {
            assert!(after >= (before + 1).min(28), "{before} {after}");
        }
    }
}
