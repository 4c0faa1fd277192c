//! Galois types as normalizer data `(λ, w)`, their cocycles as monomial
//! matrices, Frobenius invariance, censuses, strictification and the
//! Weil-restriction constructor.
//!
//! Cocycle values live slot by slot in `Ĝ(F_j((u)))`. A power `ω^k` in slot
//! `j` stands for `ι_j(ω)^k`. On slot vectors `σ` acts by
//! `(^σ g)_j = ψ(F(g_{j-1}))`, where `F` is the coefficient Frobenius on
//! `ω`-exponents (see [`SigmaAction`]), and `γ` acts on `u^m` by `ω^m`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::apartment::{affine_act, point_from_type, ApartmentPoint};
use crate::error::{Error, Result};
use crate::iwahori_weyl::AffineWeylElement;
use crate::lattice::{self, IntMat};
use crate::rootdata::{FactorKind, GammaData, RootDatum, WeylElement, WEYL_CAP};

/// One nonzero entry `sign · ω^omega · u^u` of a monomial matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MonoEntry {
    pub sign: i8,
    pub omega: u64,
    pub u: i64,
}

impl MonoEntry {
    pub const ONE: MonoEntry = MonoEntry { sign: 1, omega: 0, u: 0 };

    fn mul(self, o: MonoEntry, e: u64) -> MonoEntry {
        MonoEntry { sign: self.sign * o.sign, omega: (self.omega + o.omega) % e, u: self.u + o.u }
    }

    fn inv(self, e: u64) -> MonoEntry {
        MonoEntry { sign: self.sign, omega: (e - self.omega) % e, u: -self.u }
    }
}

/// Monomial matrix over `Z[ω, u, u⁻¹]` with `ω^e = 1`: column `k` has its
/// single nonzero entry `entries[k]` in row `perm[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Monomial {
    pub e: u64,
    pub perm: Vec<usize>,
    pub entries: Vec<MonoEntry>,
}

impl Monomial {
    pub fn identity(n: usize, e: u64) -> Self {
        Monomial { e, perm: (0..n).collect(), entries: vec![MonoEntry::ONE; n] }
    }

    /// Permutation matrix `P e_k = e_{w(k)}` of a Weyl element.
    pub fn from_weyl(w: &WeylElement, e: u64) -> Self {
        Monomial { e, perm: w.perm.clone(), entries: vec![MonoEntry::ONE; w.perm.len()] }
    }

    /// `diag(ω^{x_i})`.
    pub fn omega_diag(x: &[i64], e: u64) -> Self {
        let entries = x.iter().map(|&k| MonoEntry { sign: 1, omega: k.rem_euclid(e as i64) as u64, u: 0 }).collect();
        Monomial { e, perm: (0..x.len()).collect(), entries }
    }

    /// `diag(u^{x_i})`.
    pub fn u_diag(x: &[i64], e: u64) -> Self {
        let entries = x.iter().map(|&k| MonoEntry { sign: 1, omega: 0, u: k }).collect();
        Monomial { e, perm: (0..x.len()).collect(), entries }
    }

    /// Signed permutation matrix from a dense `0, ±1` matrix.
    pub fn from_signed(m: &IntMat, e: u64) -> Result<Self> {
        let n = m.len();
        let mut perm = vec![0; n];
        let mut entries = vec![MonoEntry::ONE; n];
        for k in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&i| m[i][k] != 0).collect();
            match rows.as_slice() {
                [i] if m[*i][k].abs() == 1 => {
                    perm[k] = *i;
                    entries[k].sign = m[*i][k] as i8;
                }
                _ => return Err(Error::Invalid(format!("column {k} is not a signed unit vector"))),
            }
        }
        let mut seen = vec![false; n];
        for &i in &perm {
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Invalid("not a monomial matrix".into()));
            }
        }
        Ok(Monomial { e, perm, entries })
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn mul(&self, b: &Monomial) -> Monomial {
        let mut perm = Vec::with_capacity(b.size());
        let mut entries = Vec::with_capacity(b.size());
        for k in 0..b.size() {
            let mid = b.perm[k];
            perm.push(self.perm[mid]);
            entries.push(self.entries[mid].mul(b.entries[k], self.e));
        }
        Monomial { e: self.e, perm, entries }
    }

    pub fn inverse(&self) -> Monomial {
        let n = self.size();
        let mut perm = vec![0; n];
        let mut entries = vec![MonoEntry::ONE; n];
        for k in 0..n {
            perm[self.perm[k]] = k;
            entries[self.perm[k]] = self.entries[k].inv(self.e);
        }
        Monomial { e: self.e, perm, entries }
    }

    pub fn pow(&self, k: u64) -> Monomial {
        let mut out = Monomial::identity(self.size(), self.e);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        *self == Monomial::identity(self.size(), self.e)
    }

    /// Multiplies every `ω`-exponent by `k` (the coefficient Frobenius when
    /// `k = p`).
    pub fn scale_omega(&self, k: u64) -> Monomial {
        let e = self.e;
        let entries = self
            .entries
            .iter()
            .map(|x| MonoEntry { omega: ((x.omega as u128 * k as u128) % e as u128) as u64, ..*x })
            .collect();
        Monomial { entries, ..self.clone() }
    }

    /// Action of `γ^k`: `u^m ↦ ω^{km} u^m`.
    pub fn gamma_act(&self, k: u64) -> Monomial {
        let e = self.e as i128;
        let entries = self
            .entries
            .iter()
            .map(|x| {
                let add = (x.u as i128 * k as i128).rem_euclid(e) as u64;
                MonoEntry { omega: (x.omega + add) % self.e, ..*x }
            })
            .collect();
        Monomial { entries, ..self.clone() }
    }

    /// Conjugation `P g P⁻¹` by an ambient permutation.
    pub fn conj_perm(&self, p: &[usize]) -> Monomial {
        let pm = Monomial { e: self.e, perm: p.to_vec(), entries: vec![MonoEntry::ONE; p.len()] };
        pm.mul(self).mul(&pm.inverse())
    }

    /// Equality in `Ĝ`: exact on `GL`/`SL` blocks, up to a block scalar on
    /// `PGL` blocks.
    pub fn eq_in_group(&self, other: &Monomial, rd: &RootDatum) -> bool {
        if self.perm != other.perm {
            return false;
        }
        rd.components.iter().all(|c| {
            let range = c.ambient_offset..c.ambient_offset + c.factor.n;
            if c.factor.kind != FactorKind::PGL {
                return range.clone().all(|k| self.entries[k] == other.entries[k]);
            }
            let ratio = |k: usize| self.entries[k].mul(other.entries[k].inv(self.e), self.e);
            let first = ratio(c.ambient_offset);
            range.into_iter().all(|k| ratio(k) == first)
        })
    }

    pub fn to_json(&self) -> Value {
        let cols: Vec<Value> = (0..self.size())
            .map(|k| {
                let x = self.entries[k];
                json!({ "row": self.perm[k], "col": k, "sign": x.sign, "omega": x.omega, "u": x.u })
            })
            .collect();
        json!({ "e": self.e, "entries": cols })
    }
}

/// Ambient permutation realizing a lattice automorphism that permutes
/// coordinates, if it does.
pub fn automorphism_perm(rd: &RootDatum, theta: &IntMat) -> Option<Vec<usize>> {
    if rd.components.iter().all(|c| c.factor.kind == FactorKind::GL) {
        let mono = Monomial::from_signed(theta, 1).ok()?;
        return mono.entries.iter().all(|x| x.sign == 1).then_some(mono.perm);
    }
    // factor permutations of equal SL/PGL factors: match coroots e_i - e_k
    let mut perm = vec![usize::MAX; rd.ambient_dim];
    for c in &rd.components {
        let n = c.factor.n;
        if n < 2 {
            return None;
        }
        for i in 0..n {
            let k = if i == 0 { 1 } else { 0 };
            let a = c.ambient_offset;
            let root = (0..rd.num_roots()).find(|&t| rd.ends[t].i == a + i && rd.ends[t].j == a + k)?;
            let img = lattice::mat_mul(theta, &rd.coroots[root].iter().map(|&x| vec![x]).collect::<Vec<_>>());
            let img: Vec<i64> = img.into_iter().map(|r| r[0]).collect();
            let t = rd.coroots.iter().position(|cv| *cv == img)?;
            perm[a + i] = rd.ends[t].i;
        }
    }
    let mut check = vec![vec![0i64; rd.rank]; rd.rank];
    for k in 0..rd.rank {
        let mut b = vec![0; rd.rank];
        b[k] = 1;
        let amb = rd.to_ambient(&b);
        let mut moved = vec![0; rd.ambient_dim];
        for (i, &t) in perm.iter().enumerate() {
            moved[t] = amb[i];
        }
        for (r, x) in rd.from_ambient(&moved).ok()?.into_iter().enumerate() {
            check[r][k] = x;
        }
    }
    (check == *theta).then_some(perm)
}

/// How `σ` treats `ω` on coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SigmaAction {
    /// `ω ↦ ω^p`; the matching relation is `τ(γ)^p = τ(σ)(^στ(γ))τ(σ)⁻¹`.
    FrobeniusTwisted,
    /// `ω ↦ ω^q = ω`; the matching relation is with `τ(γ)^q`.
    Plain,
}

/// A Galois type given by normalizer data: `λ_j` and `w_j` per slot, with
/// `n = w⁻¹ u^λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisType {
    pub lambda: Vec<Vec<i64>>,
    pub w: Vec<WeylElement>,
}

impl GaloisType {
    /// `λ_j = ψ^j(λ)` and `w_j = 1`.
    pub fn from_fixed(rd: &RootDatum, g: &GammaData, lambda: &[i64]) -> Result<Self> {
        if lambda.len() != rd.rank {
            return Err(Error::Dimension(format!("λ has {} coordinates, rank is {}", lambda.len(), rd.rank)));
        }
        let mut lam = vec![lambda.to_vec()];
        for j in 1..g.r as usize {
            lam.push(mat_apply(&g.psi, &lam[j - 1]));
        }
        let t = GaloisType { lambda: lam, w: vec![WeylElement::identity(rd); g.r as usize] };
        t.validate(g)?;
        Ok(t)
    }

    pub fn validate(&self, g: &GammaData) -> Result<()> {
        if self.lambda.len() != g.r as usize || self.w.len() != g.r as usize {
            return Err(Error::Dimension("one (λ_j, w_j) per embedding".into()));
        }
        for l in &self.lambda {
            if mat_apply(&g.inertia, l) != *l {
                return Err(Error::Invalid(format!("λ = {l:?} is not fixed by inertia")));
            }
        }
        Ok(())
    }

    pub fn point(&self, rd: &RootDatum, g: &GammaData) -> Result<ApartmentPoint> {
        point_from_type(rd, g, &self.lambda, &self.w)
    }
}

fn mat_apply(m: &IntMat, v: &[i64]) -> Vec<i64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Slot-wise cocycle values on the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    pub gamma: Vec<Monomial>,
    pub sigma: Vec<Monomial>,
    psi_perm: Vec<usize>,
}

/// `τ(γ)_j = ω^{λ_j}` and `τ(σ)_j = u^{-λ_j + w'ψλ_{j-1}} w'` with
/// `w' = w_j ψ(w_{j-1})⁻¹`.
pub fn cocycle_values(rd: &RootDatum, g: &GammaData, t: &GaloisType) -> Result<Cocycle> {
    t.validate(g)?;
    if !g.inertia_is_trivial() {
        return Err(Error::Refused("monomial cocycles are only built for split inertia".into()));
    }
    let psi_perm = automorphism_perm(rd, &g.psi)
        .ok_or_else(|| Error::Invalid("the pinned automorphism has no monomial lift".into()))?;
    let r = g.r as usize;
    let mut gamma = Vec::with_capacity(r);
    let mut sigma = Vec::with_capacity(r);
    for j in 0..r {
        let prev = (j + r - 1) % r;
        gamma.push(Monomial::omega_diag(&rd.to_ambient(&t.lambda[j]), g.e));
        let wprime = t.w[j].compose(&g.psi_twist(rd, &t.w[prev], 1).inverse());
        let shifted = wprime.apply(&mat_apply(&g.psi, &t.lambda[prev]));
        let m: Vec<i64> = shifted.iter().zip(&t.lambda[j]).map(|(a, b)| a - b).collect();
        sigma.push(Monomial::u_diag(&rd.to_ambient(&m), g.e).mul(&Monomial::from_weyl(&wprime, g.e)));
    }
    Ok(Cocycle { gamma, sigma, psi_perm })
}

impl Cocycle {
    /// `^σ g` on slot vectors.
    pub fn sigma_twist(&self, g: &GammaData, v: &[Monomial], action: SigmaAction) -> Vec<Monomial> {
        let r = v.len();
        let k = match action {
            SigmaAction::FrobeniusTwisted => g.p,
            SigmaAction::Plain => 1,
        };
        (0..r).map(|j| v[(j + r - 1) % r].scale_omega(k).conj_perm(&self.psi_perm)).collect()
    }

    /// `τ(γ)^e = 1` slot by slot.
    pub fn gamma_order_ok(&self, rd: &RootDatum) -> bool {
        self.gamma.iter().all(|t| t.pow(t.e).eq_in_group(&Monomial::identity(t.size(), t.e), rd))
    }

    /// `τ(σ) (^στ(γ)) τ(σ)⁻¹ = τ(γ)^k` with `k = p` for the twisted action
    /// and `k = q` for the plain one.
    pub fn conjugation_relation_ok(&self, rd: &RootDatum, g: &GammaData, action: SigmaAction) -> bool {
        let k = match action {
            SigmaAction::FrobeniusTwisted => g.p,
            SigmaAction::Plain => g.q(),
        };
        let tw = self.sigma_twist(g, &self.gamma, action);
        (0..self.gamma.len()).all(|j| {
            let lhs = self.sigma[j].mul(&tw[j]).mul(&self.sigma[j].inverse());
            lhs.eq_in_group(&self.gamma[j].pow(k), rd)
        })
    }

    /// The cocycle identity for `σγ = γ^k σ` without simplification:
    /// `τ(σ) ^στ(γ) = τ(γ)^k ^{γ^k}τ(σ)`.
    pub fn full_relation_ok(&self, rd: &RootDatum, g: &GammaData, action: SigmaAction) -> bool {
        let k = match action {
            SigmaAction::FrobeniusTwisted => g.p,
            SigmaAction::Plain => g.q(),
        };
        let tw = self.sigma_twist(g, &self.gamma, action);
        (0..self.gamma.len()).all(|j| {
            let lhs = self.sigma[j].mul(&tw[j]);
            let rhs = self.gamma[j].pow(k).mul(&self.sigma[j].gamma_act(k));
            lhs.eq_in_group(&rhs, rd)
        })
    }

    /// `τ(σ) ^στ(σ) ⋯ ^{σ^{r-1}}τ(σ) = 1`.
    pub fn sigma_norm_ok(&self, rd: &RootDatum, g: &GammaData, action: SigmaAction) -> bool {
        let r = self.sigma.len();
        let mut acc: Vec<Monomial> = self.sigma.clone();
        let mut twisted = self.sigma.clone();
        for _ in 1..r {
            twisted = self.sigma_twist(g, &twisted, action);
            acc = acc.iter().zip(&twisted).map(|(a, b)| a.mul(b)).collect();
        }
        acc.iter().all(|m| m.eq_in_group(&Monomial::identity(m.size(), m.e), rd))
    }
}

/// Witness `(w*, m)` with `w*(p ψ⁻¹ η_0) - m = η_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub w: WeylElement,
    pub m: Vec<i64>,
}

impl Witness {
    pub fn to_json(&self, rd: &RootDatum) -> Value {
        json!({ "w": self.w.cycle_string(rd), "m": self.m })
    }
}

/// Decides whether `c · φ(x) = x` has a solution `c = v^m w*` in the
/// normalizer, returning a witness when it does.
pub fn frobenius_invariant(rd: &RootDatum, g: &GammaData, t: &GaloisType) -> Result<Option<Witness>> {
    if !g.inertia_is_trivial() {
        return Err(Error::Refused("Frobenius invariance is only decided for split inertia".into()));
    }
    t.validate(g)?;
    let weyl = rd.weyl_group(WEYL_CAP)?;
    Ok(frobenius_witness(g, t, &weyl))
}

fn frobenius_witness(g: &GammaData, t: &GaloisType, weyl: &[WeylElement]) -> Option<Witness> {
    // e·η_0 = -w_0⁻¹λ_0, so e·m = w*(p ψ⁻¹ (-w_0⁻¹λ_0)) + w_0⁻¹λ_0.
    let base = t.w[0].inverse().apply(&t.lambda[0]);
    let pulled = mat_apply(&g.psi_inverse(), &base);
    let e = g.e as i128;
    let p = g.p as i128;
    for w in weyl {
        let img = w.apply(&pulled);
        let em: Vec<i128> = img.iter().zip(&base).map(|(&a, &b)| -p * a as i128 + b as i128).collect();
        if em.iter().all(|x| x.rem_euclid(e) == 0) {
            let m = em.iter().map(|x| (x / e) as i64).collect();
            return Some(Witness { w: w.clone(), m });
        }
    }
    None
}

/// Default cap on `e^rank` for censuses.
pub const CENSUS_CAP: u64 = 4_000_000;

#[derive(Clone, Debug)]
pub struct CensusClass {
    pub representative: Vec<i64>,
    pub orbit_size: usize,
    pub invariant: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct Census {
    pub total: usize,
    pub invariant: usize,
    pub classes: Vec<CensusClass>,
}

impl Census {
    pub fn to_json(&self, rd: &RootDatum) -> Value {
        let classes: Vec<Value> = self
            .classes
            .iter()
            .enumerate()
            .map(|(k, c)| {
                json!({
                    "class": k,
                    "representative": c.representative,
                    "orbit_size": c.orbit_size,
                    "invariant": c.invariant,
                    "witness": c.witness.as_ref().map(|w| w.to_json(rd)),
                })
            })
            .collect();
        json!({ "total": self.total, "invariant": self.invariant, "classes": classes })
    }
}

/// Classes of types `λ ∈ X_*/eX_*` modulo `W`, each tested for Frobenius
/// invariance. Representatives are lexicographically least in `[0, e)^rank`.
pub fn census(rd: &RootDatum, g: &GammaData, cap: u64) -> Result<Census> {
    if !g.inertia_is_trivial() {
        return Err(Error::Refused("censuses are only enumerated for split inertia".into()));
    }
    let e = g.e as i64;
    let size = (g.e as u128).checked_pow(rd.rank as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::CapExceeded { what: format!("e^rank = {}^{}", g.e, rd.rank), cap });
    }
    let weyl = rd.weyl_group(WEYL_CAP)?;
    let index = |v: &[i64]| v.iter().fold(0usize, |acc, &x| acc * e as usize + x as usize);
    let mut seen = vec![false; size as usize];
    let mut classes = Vec::new();
    let mut lam = vec![0i64; rd.rank];
    for _ in 0..size {
        if !seen[index(&lam)] {
            let mut orbit = HashSet::new();
            for w in &weyl {
                let img: Vec<i64> = w.apply(&lam).into_iter().map(|x| x.rem_euclid(e)).collect();
                seen[index(&img)] = true;
                orbit.insert(img);
            }
            let t = GaloisType::from_fixed(rd, g, &lam)?;
            let witness = frobenius_witness(g, &t, &weyl);
            classes.push(CensusClass {
                representative: lam.clone(),
                orbit_size: orbit.len(),
                invariant: witness.is_some(),
                witness,
            });
        }
        // next vector in mixed radix, last coordinate fastest
        for k in (0..rd.rank).rev() {
            lam[k] += 1;
            if lam[k] < e {
                break;
            }
            lam[k] = 0;
        }
    }
    let invariant = classes.iter().filter(|c| c.invariant).count();
    Ok(Census { total: classes.len(), invariant, classes })
}

/// Output of [`strictify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoboundaryChain {
    pub c: Vec<Monomial>,
    pub s_extension: usize,
}

/// Solves `b_j = c_{j-1} c_j⁻¹` by `c_0 = 1`, `c_j = b_j⁻¹ c_{j-1}` after
/// repeating the chain `s` times, `s` the order of `b_0 b_1 ⋯ b_{r-1}`.
pub fn strictify(b: &[Monomial]) -> Result<CoboundaryChain> {
    let first = b.first().ok_or_else(|| Error::Invalid("empty chain".into()))?;
    let (n, e) = (first.size(), first.e);
    let prod = b.iter().skip(1).fold(first.clone(), |acc, x| acc.mul(x));
    let mut s = 1usize;
    let mut pow = prod.clone();
    while !pow.is_identity() {
        s += 1;
        if s > 1_000_000 {
            return Err(Error::CapExceeded { what: "order of b_0 ⋯ b_(r-1)".into(), cap: 1_000_000 });
        }
        pow = pow.mul(&prod);
    }
    let r = b.len();
    let ext = |j: usize| &b[j % r];
    let mut c = vec![Monomial::identity(n, e)];
    for j in 1..r * s {
        let next = ext(j).inverse().mul(&c[j - 1]);
        c.push(next);
    }
    for j in 1..r * s {
        if *ext(j) != c[j - 1].mul(&c[j].inverse()) {
            return Err(Error::Invalid(format!("coboundary check failed at {j}")));
        }
    }
    if ext(0).inverse().mul(&c[r * s - 1]) != c[0] {
        return Err(Error::Invalid("coboundary chain does not close up".into()));
    }
    Ok(CoboundaryChain { c, s_extension: s })
}

/// Result of [`type_from_s_mu`].
#[derive(Clone, Debug)]
pub struct WeilType {
    pub t: GaloisType,
    /// `c_j = ψ^j(s⁻¹ v^{-μ-η})`, stored as `v^ν w`.
    pub c: Vec<AffineWeylElement>,
    pub x: ApartmentPoint,
    pub mu_eta: Vec<i64>,
}

/// The type attached to `(s, μ)` for products of `GL_n` with `e = p^r - 1`:
/// `λ_0 = Σ_k p^k (sψ)^{-k}(μ+η)`, `λ_j = sψ λ_{j-1}`, `w_j = s ψ(w_{j-1})`
/// with `w_{r-1} = 1`.
pub fn type_from_s_mu(rd: &RootDatum, s: &WeylElement, mu: &[i64], g: &GammaData) -> Result<WeilType> {
    if rd.components.iter().any(|c| c.factor.kind != FactorKind::GL) {
        return Err(Error::Invalid(format!("{} is not a product of GL_n", rd.label)));
    }
    if mu.len() != rd.rank {
        return Err(Error::Dimension(format!("μ has {} coordinates, rank is {}", mu.len(), rd.rank)));
    }
    if g.q() - 1 != g.e {
        return Err(Error::Invalid(format!("need e = p^r - 1 = {}, got {}", g.q() - 1, g.e)));
    }
    let rho: Vec<i64> = rd
        .components
        .iter()
        .flat_map(|c| (0..c.factor.n).rev().map(|k| k as i64))
        .collect();
    let mu_eta: Vec<i64> = mu.iter().zip(&rho).map(|(a, b)| a + b).collect();
    if mu_eta.iter().any(|&x| x < 0 || x > g.p as i64 - 1) {
        return Err(Error::Refused(format!("μ+η = {mu_eta:?} has entries outside [0, p-1]")));
    }
    let r = g.r as usize;
    let a = lattice::mat_mul(&s.matrix, &g.psi);
    let a_inv = lattice::unimodular_inverse(&a).expect("product of automorphisms");
    let mut lambda0 = vec![BigInt::zero(); rd.rank];
    let mut term = mu_eta.clone();
    let mut pk = BigInt::from(1);
    for _ in 0..r {
        for (acc, &t) in lambda0.iter_mut().zip(&term) {
            *acc += &pk * t;
        }
        term = mat_apply(&a_inv, &term);
        pk *= g.p;
    }
    let lambda0: Vec<i64> = lambda0
        .iter()
        .map(|x| x.to_i64().ok_or_else(|| Error::Invalid("λ overflows 64 bits".into())))
        .collect::<Result<_>>()?;
    let mut lambda = vec![lambda0];
    for j in 1..r {
        lambda.push(mat_apply(&a, &lambda[j - 1]));
    }
    if mat_apply(&a, &lambda[r - 1]) != lambda[0] {
        return Err(Error::Invalid("λ_0 ≠ sψ(λ_(r-1))".into()));
    }
    let mut w: Vec<WeylElement> = Vec::with_capacity(r);
    let mut prev = WeylElement::identity(rd);
    for _ in 0..r {
        let next = s.compose(&g.psi_twist(rd, &prev, 1));
        w.push(next.clone());
        prev = next;
    }
    if !w[r - 1].is_identity() {
        return Err(Error::Invalid("(sψ)^r ≠ 1, so w_(r-1) cannot be normalized to 1".into()));
    }
    let t = GaloisType { lambda, w };
    t.validate(g)?;
    let x = t.point(rd, g)?;
    if !x.is_gamma_fixed(g) {
        return Err(Error::Invalid("constructed point is not Γ-fixed".into()));
    }
    let s_inv = s.inverse();
    let base_nu: Vec<i64> = s_inv.apply(&mu_eta).into_iter().map(|x| -x).collect();
    let c: Vec<AffineWeylElement> = (0..r)
        .map(|j| AffineWeylElement {
            translation: mat_apply(&g.psi_pow(j as i64), &base_nu),
            finite: g.psi_twist(rd, &s_inv, j as i64),
        })
        .collect();
    let fx = x.frobenius();
    for j in 0..r {
        if affine_act(&c[j].translation, &c[j].finite, &fx.eta[j]) != x.eta[j] {
            return Err(Error::Invalid(format!("c · φ(x) ≠ x in slot {j}")));
        }
    }
    Ok(WeilType { t, c, x, mu_eta })
}

/// Checks `c · φ(x) = x` slot by slot for normalizer elements `c_j`.
pub fn c_fixes_frobenius(c: &[AffineWeylElement], x: &ApartmentPoint) -> bool {
    let fx = x.frobenius();
    c.iter().zip(fx.eta.iter().zip(&x.eta)).all(|(cj, (f, xj))| affine_act(&cj.translation, &cj.finite, f) == *xj)
}

fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    (g.gcd == 1).then(|| g.x.rem_euclid(m as i128) as u64)
}

fn shapiro_twist(rd: &RootDatum, g: &GammaData, x: &Monomial, j: i64) -> Result<Monomial> {
    let psi = g.psi_pow(j);
    let perm = automorphism_perm(rd, &psi)
        .ok_or_else(|| Error::Invalid("the pinned automorphism has no monomial lift".into()))?;
    let e = x.e;
    let k = if j >= 0 {
        (0..j).fold(1u64, |acc, _| ((acc as u128 * g.p as u128) % e as u128) as u64)
    } else {
        let pinv = inverse_mod(g.p % e, e).ok_or_else(|| Error::Invalid("p is not invertible mod e".into()))?;
        (0..-j).fold(1u64, |acc, _| ((acc as u128 * pinv as u128) % e as u128) as u64)
    };
    Ok(x.scale_omega(k).conj_perm(&perm))
}

/// `g_j = σ^j f(σ^{-j})` from the values of `f` on `1, σ⁻¹, .., σ^{-(r-1)}`.
pub fn shapiro(rd: &RootDatum, g: &GammaData, f: &[Monomial]) -> Result<Vec<Monomial>> {
    if f.len() != g.r as usize {
        return Err(Error::Dimension(format!("need {} coset values, got {}", g.r, f.len())));
    }
    f.iter().enumerate().map(|(j, x)| shapiro_twist(rd, g, x, j as i64)).collect()
}

/// Inverse of [`shapiro`].
pub fn shapiro_inverse(rd: &RootDatum, g: &GammaData, tuple: &[Monomial]) -> Result<Vec<Monomial>> {
    if tuple.len() != g.r as usize {
        return Err(Error::Dimension(format!("need {} slots, got {}", g.r, tuple.len())));
    }
    tuple.iter().enumerate().map(|(j, x)| shapiro_twist(rd, g, x, -(j as i64))).collect()
}

/// `ψ^j` applied to a rational cocharacter, for callers working with points.
pub fn psi_apply_q(g: &GammaData, j: i64, v: &[BigRational]) -> Vec<BigRational> {
    lattice::mat_vec_q(&g.psi_pow(j), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apartment::is_d_generic;
    use crate::rootdata::q;

    fn sl2() -> (RootDatum, GammaData) {
        let rd: RootDatum = "SL2".parse().unwrap();
        let g = GammaData::split(&rd, 7, 24, 2).unwrap();
        (rd, g)
    }

    #[test]
    fn sl2_census_counts() {
        let (rd, g) = sl2();
        let c = census(&rd, &g, CENSUS_CAP).unwrap();
        assert_eq!((c.total, c.invariant), (13, 7));
        let inv: Vec<i64> = c.classes.iter().filter(|k| k.invariant).map(|k| k.representative[0]).collect();
        assert_eq!(inv, vec![0, 3, 4, 6, 8, 9, 12]);
    }

    #[test]
    fn sl2_minus_three() {
        let (rd, g) = sl2();
        let t = GaloisType::from_fixed(&rd, &g, &[-3]).unwrap();
        let wit = frobenius_invariant(&rd, &g, &t).unwrap().unwrap();
        assert_eq!(wit.w.cycle_string(&rd), "(12)");
        assert_eq!(wit.m, vec![-1]);
        let t2 = GaloisType::from_fixed(&rd, &g, &[2]).unwrap();
        assert!(frobenius_invariant(&rd, &g, &t2).unwrap().is_none());
        let t0 = GaloisType::from_fixed(&rd, &g, &[0]).unwrap();
        let w0 = frobenius_invariant(&rd, &g, &t0).unwrap().unwrap();
        assert!(w0.w.is_identity() && w0.m == vec![0]);
    }

    #[test]
    fn sl2_cocycle() {
        let (rd, g) = sl2();
        let t = GaloisType::from_fixed(&rd, &g, &[-3]).unwrap();
        let c = cocycle_values(&rd, &g, &t).unwrap();
        assert_eq!(c.gamma[0], Monomial::omega_diag(&[-3, 3], 24));
        assert!(c.sigma.iter().all(Monomial::is_identity));
    }

    #[test]
    fn strictify_sl2() {
        let b = Monomial::from_signed(&vec![vec![0, 1], vec![-1, 0]], 24).unwrap();
        let out = strictify(&[b.clone(), b]).unwrap();
        assert_eq!(out.s_extension, 2);
        let want: Vec<Monomial> = [
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![0, -1], vec![1, 0]],
            vec![vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![-1, 0]],
        ]
        .iter()
        .map(|m| Monomial::from_signed(m, 24).unwrap())
        .collect();
        assert_eq!(out.c, want);
    }

    #[test]
    fn strictify_order_three() {
        let rd: RootDatum = "GL3".parse().unwrap();
        let w = rd.weyl_from_cycles("(123)").unwrap();
        let b0 = Monomial::from_weyl(&w, 5);
        let out = strictify(&[b0, Monomial::identity(3, 5)]).unwrap();
        assert_eq!(out.s_extension, 3);
        assert_eq!(out.c.len(), 6);
        let id = strictify(&vec![Monomial::identity(2, 5); 3]).unwrap();
        assert_eq!(id.s_extension, 1);
        assert!(id.c.iter().all(Monomial::is_identity));
    }

    #[test]
    fn trivial_s_mu() {
        let rd: RootDatum = "GL2".parse().unwrap();
        let g = GammaData::split(&rd, 5, 24, 2).unwrap();
        let s = WeylElement::identity(&rd);
        let out = type_from_s_mu(&rd, &s, &[0, 0], &g).unwrap();
        assert_eq!(out.t.lambda[0], vec![6, 0]);
        assert!(out.t.w.iter().all(WeylElement::is_identity));
        assert!(c_fixes_frobenius(&out.c, &out.x));
    }

    #[test]
    fn weil_restriction_genericity() {
        let rd: RootDatum = "GL3xGL3".parse().unwrap();
        let psi = rd.cyclic_factor_shift().unwrap();
        let g = GammaData::new(&rd, 19, 19u64.pow(4) - 1, 4, psi, lattice::identity(6)).unwrap();
        let s = rd.weyl_from_cycles("((123),(12))").unwrap();
        let out = type_from_s_mu(&rd, &s, &[16, 11, 7, 4, 2, 1], &g).unwrap();
        assert!(is_d_generic(&rd, &out.x, &q(2, 1)));
        assert!(!is_d_generic(&rd, &out.x, &q(3, 1)));
    }

    #[test]
    fn shapiro_r2() {
        let rd: RootDatum = "GL2xGL2".parse().unwrap();
        let psi = rd.cyclic_factor_shift().unwrap();
        let g = GammaData::new(&rd, 5, 24, 2, psi, lattice::identity(4)).unwrap();
        let a = Monomial::from_weyl(&rd.weyl_from_cycles("((12),1)").unwrap(), 24);
        let b = Monomial::from_weyl(&rd.weyl_from_cycles("(1,(12))").unwrap(), 24);
        let out = shapiro(&rd, &g, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(out[0], a);
        assert_eq!(out[1], Monomial::from_weyl(&rd.weyl_from_cycles("((12),1)").unwrap(), 24));
        assert_eq!(shapiro_inverse(&rd, &g, &out).unwrap(), vec![a, b]);
    }
}
