//! Extended affine Weyl group `X_* ⋊ W`: lengths, reduced words, Bruhat
//! order and admissible sets.
//!
//! The base alcove is `{η : -1 < ⟨a, η⟩ < 0 for a > 0}` under the action
//! `(v^ν w) · η = wη - ν`. Its walls give the simple affine reflections,
//! numbered per factor: the finite simple reflections in order, then
//! `v^{θ∨} s_θ` for the highest root `θ`.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice;
use crate::rootdata::{FactorKind, RootDatum, WeylElement, WEYL_CAP};

/// `v^ν w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineWeylElement {
    pub translation: Vec<i64>,
    pub finite: WeylElement,
}

impl AffineWeylElement {
    pub fn identity(rd: &RootDatum) -> Self {
        AffineWeylElement { translation: vec![0; rd.rank], finite: WeylElement::identity(rd) }
    }

    pub fn translation(rd: &RootDatum, nu: &[i64]) -> Self {
        AffineWeylElement { translation: nu.to_vec(), finite: WeylElement::identity(rd) }
    }

    /// `(ν₁, w₁)(ν₂, w₂) = (ν₁ + w₁ν₂, w₁w₂)`.
    pub fn compose(&self, o: &AffineWeylElement) -> AffineWeylElement {
        let moved = self.finite.apply(&o.translation);
        AffineWeylElement {
            translation: self.translation.iter().zip(moved).map(|(a, b)| a + b).collect(),
            finite: self.finite.compose(&o.finite),
        }
    }

    pub fn inverse(&self) -> AffineWeylElement {
        let winv = self.finite.inverse();
        AffineWeylElement { translation: winv.apply(&self.translation).into_iter().map(|x| -x).collect(), finite: winv }
    }

    /// `wη - ν`.
    pub fn act(&self, eta: &[BigRational]) -> Vec<BigRational> {
        crate::apartment::affine_act(&self.translation, &self.finite, eta)
    }

    /// `v^(ambient ν)·(cycles)`.
    pub fn display(&self, rd: &RootDatum) -> String {
        let amb = rd.to_ambient(&self.translation);
        let nu: Vec<String> = amb.iter().map(i64::to_string).collect();
        format!("v^({})·{}", nu.join(","), self.finite.cycle_string(rd))
    }
}

/// Simple affine reflections and the generators of the alcove stabilizer.
#[derive(Clone, Debug)]
pub struct BaseAlcove {
    pub simple_affine_reflections: Vec<AffineWeylElement>,
    pub omega_generators: Vec<AffineWeylElement>,
}

/// Iwahori–Weyl group of a root datum with its base alcove.
#[derive(Clone, Debug)]
pub struct IwahoriWeyl {
    pub rd: RootDatum,
    pub base: BaseAlcove,
    eta0: Vec<BigRational>,
    positive: Vec<usize>,
}

/// An element with its reduced expression `s_{i_1} ⋯ s_{i_l} ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedWord {
    /// 1-based indices of simple affine reflections.
    pub word: Vec<usize>,
    pub omega: AffineWeylElement,
}

impl IwahoriWeyl {
    pub fn new(rd: &RootDatum) -> Result<Self> {
        let mut simple = Vec::new();
        let mut omega_generators = Vec::new();
        let mut rows = Vec::new();
        let mut target = Vec::new();
        for (ci, c) in rd.components.iter().enumerate() {
            let n = c.factor.n;
            let simples = rd.component_simples(ci);
            for &k in &simples {
                simple.push(AffineWeylElement { translation: vec![0; rd.rank], finite: rd.reflection(k) });
                rows.push(rd.roots[k].clone());
                target.push(BigRational::new((-1).into(), (n as i64).into()));
            }
            if let Some(th) = rd.highest_root(ci) {
                simple.push(AffineWeylElement { translation: rd.coroots[th].clone(), finite: rd.reflection(th) });
            }
            if c.factor.kind != FactorKind::SL {
                let mut e1 = vec![0i64; rd.ambient_dim];
                e1[c.ambient_offset] = 1;
                let mut perm: Vec<usize> = (0..rd.ambient_dim).collect();
                for i in 0..n {
                    perm[c.ambient_offset + i] = c.ambient_offset + (i + 1) % n;
                }
                omega_generators.push(AffineWeylElement {
                    translation: rd.from_ambient(&e1)?,
                    finite: rd.weyl_from_perm(&perm)?,
                });
            }
        }
        let basis: Vec<Vec<BigRational>> = (0..rd.rank)
            .map(|k| rows.iter().map(|r| BigRational::from_integer(BigInt::from(r[k]))).collect())
            .collect();
        let eta0 = if rows.is_empty() {
            vec![BigRational::from_integer(0.into()); rd.rank]
        } else {
            lattice::solve_rational(&basis, &target).ok_or_else(|| Error::Invalid("no interior point of the base alcove".into()))?
        };
        let iw = IwahoriWeyl {
            rd: rd.clone(),
            base: BaseAlcove { simple_affine_reflections: simple, omega_generators },
            eta0,
            positive: rd.positive_roots(),
        };
        debug_assert!(iw.base.omega_generators.iter().all(|w| iw.length(w) == 0));
        Ok(iw)
    }

    /// A point in the interior of the base alcove.
    pub fn base_point(&self) -> &[BigRational] {
        &self.eta0
    }

    pub fn simple(&self, i: usize) -> &AffineWeylElement {
        &self.base.simple_affine_reflections[i - 1]
    }

    pub fn num_simple(&self) -> usize {
        self.base.simple_affine_reflections.len()
    }

    /// Number of affine root hyperplanes separating the base alcove from
    /// its image: `Σ_{a>0} |⌊⟨a, w̃η₀⟩⌋ + 1|`.
    pub fn length(&self, x: &AffineWeylElement) -> usize {
        let y = x.act(&self.eta0);
        self.positive
            .iter()
            .map(|&a| {
                let t = self.rd.pairing_q(a, &y).floor() + BigRational::one();
                t.abs().to_integer().to_usize().expect("small length")
            })
            .sum()
    }

    /// Greedy gallery walk: repeatedly left-multiply by the lowest-index
    /// simple reflection that shortens the element.
    pub fn reduced_word(&self, x: &AffineWeylElement) -> ReducedWord {
        let mut cur = x.clone();
        let mut len = self.length(&cur);
        let mut word = Vec::with_capacity(len);
        while len > 0 {
            let (i, next, l) = (1..=self.num_simple())
                .find_map(|i| {
                    let y = self.simple(i).compose(&cur);
                    let l = self.length(&y);
                    (l < len).then_some((i, y, l))
                })
                .expect("a positive-length element has a descent");
            word.push(i);
            cur = next;
            len = l;
        }
        ReducedWord { word, omega: cur }
    }

    pub fn from_word(&self, word: &[usize], omega: &AffineWeylElement) -> AffineWeylElement {
        word.iter().rev().fold(omega.clone(), |acc, &i| self.simple(i).compose(&acc))
    }

    /// All `a ≤ b`: subword products of a reduced word of `b`.
    pub fn lower_set(&self, b: &AffineWeylElement) -> HashSet<AffineWeylElement> {
        let rw = self.reduced_word(b);
        let mut set: HashSet<AffineWeylElement> = HashSet::from([AffineWeylElement::identity(&self.rd)]);
        for &i in &rw.word {
            let s = self.simple(i);
            let extra: Vec<AffineWeylElement> = set.iter().map(|y| y.compose(s)).collect();
            set.extend(extra);
        }
        set.into_iter().map(|y| y.compose(&rw.omega)).collect()
    }

    /// Bruhat order: equal `Ω`-parts and a subword relation.
    pub fn bruhat_leq(&self, a: &AffineWeylElement, b: &AffineWeylElement) -> bool {
        let (ra, rb) = (self.reduced_word(a), self.reduced_word(b));
        if ra.omega != rb.omega || ra.word.len() > rb.word.len() {
            return false;
        }
        self.lower_set(b).contains(a)
    }

    /// `Adm(μ)`, sorted by length and then by reduced word.
    pub fn admissible_set(&self, mu: &[i64]) -> Result<Vec<(AffineWeylElement, ReducedWord)>> {
        if mu.len() != self.rd.rank {
            return Err(Error::Dimension(format!("μ has {} coordinates, rank is {}", mu.len(), self.rd.rank)));
        }
        let weyl = self.rd.weyl_group(WEYL_CAP)?;
        let mut all: HashSet<AffineWeylElement> = HashSet::new();
        let mut tops: HashSet<Vec<i64>> = HashSet::new();
        for w in &weyl {
            let nu = w.apply(mu);
            if tops.insert(nu.clone()) {
                all.extend(self.lower_set(&AffineWeylElement::translation(&self.rd, &nu)));
            }
        }
        let mut out: Vec<(AffineWeylElement, ReducedWord)> =
            all.into_iter().map(|x| (x.clone(), self.reduced_word(&x))).collect();
        out.sort_by(|a, b| {
            (a.1.word.len(), &a.1.word, &a.0.translation, &a.0.finite.perm).cmp(&(
                b.1.word.len(),
                &b.1.word,
                &b.0.translation,
                &b.0.finite.perm,
            ))
        });
        Ok(out)
    }

    /// `s3 s2 · ω` style rendering.
    pub fn word_string(&self, rw: &ReducedWord) -> String {
        let mut s = String::new();
        for i in &rw.word {
            let _ = write!(s, "s{i} ");
        }
        if self.length(&rw.omega) == 0 && rw.omega == AffineWeylElement::identity(&self.rd) {
            s.push('1');
        } else {
            s.push_str(&rw.omega.display(&self.rd));
        }
        s
    }

    pub fn element_json(&self, x: &AffineWeylElement) -> Value {
        let rw = self.reduced_word(x);
        json!({
            "translation": self.rd.to_ambient(&x.translation),
            "finite": x.finite.cycle_string(&self.rd),
            "length": rw.word.len(),
            "word": rw.word,
            "omega": rw.omega.display(&self.rd),
        })
    }
}

/// `h_μ = max_a ⟨a, μ⟩`.
pub fn h_mu(rd: &RootDatum, mu: &[i64]) -> i64 {
    (0..rd.num_roots()).map(|a| rd.pairing(a, mu)).max().unwrap_or(0).max(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gl3() -> IwahoriWeyl {
        IwahoriWeyl::new(&"GL3".parse().unwrap()).unwrap()
    }

    fn t_tilde(iw: &IwahoriWeyl) -> AffineWeylElement {
        AffineWeylElement { translation: vec![1, 0, 0], finite: iw.rd.weyl_from_cycles("(123)").unwrap() }
    }

    #[test]
    fn lengths() {
        let iw = gl3();
        assert_eq!(iw.length(&AffineWeylElement::identity(&iw.rd)), 0);
        assert_eq!(iw.length(&t_tilde(&iw)), 0);
        assert_eq!(iw.length(&AffineWeylElement::translation(&iw.rd, &[1, 0, 0])), 2);
        assert_eq!(iw.base.omega_generators, vec![t_tilde(&iw)]);
        let s3 = iw.simple(3);
        assert_eq!(s3.translation, vec![1, 0, -1]);
        assert_eq!(s3.finite.cycle_string(&iw.rd), "(13)");
    }

    #[test]
    fn reduced_words() {
        let iw = gl3();
        let t = t_tilde(&iw);
        let rw = iw.reduced_word(&AffineWeylElement::translation(&iw.rd, &[1, 0, 0]));
        assert_eq!((rw.word.clone(), rw.omega.clone()), (vec![3, 2], t.clone()));
        let rw = iw.reduced_word(&AffineWeylElement::translation(&iw.rd, &[0, 0, 1]));
        assert_eq!((rw.word, rw.omega), (vec![2, 1], t.clone()));
        assert!(iw.reduced_word(&t).word.is_empty());
    }

    #[test]
    fn adm_gl3() {
        let iw = gl3();
        let adm = iw.admissible_set(&[1, 0, 0]).unwrap();
        assert_eq!(adm.len(), 7);
        let t = t_tilde(&iw);
        let words: Vec<Vec<usize>> = adm.iter().map(|(_, rw)| rw.word.clone()).collect();
        assert!(adm.iter().all(|(_, rw)| rw.omega == t));
        assert_eq!(words[0], Vec::<usize>::new());
        assert_eq!(&words[1..4], &[vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn adm_gl2_and_zero() {
        let iw = IwahoriWeyl::new(&"GL2".parse().unwrap()).unwrap();
        assert_eq!(iw.admissible_set(&[1, 0]).unwrap().len(), 3);
        let iw3 = gl3();
        let z = iw3.admissible_set(&[0, 0, 0]).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z[0].0, AffineWeylElement::identity(&iw3.rd));
    }

    #[test]
    fn bruhat_examples() {
        let iw = gl3();
        let t = t_tilde(&iw);
        let top = AffineWeylElement::translation(&iw.rd, &[1, 0, 0]);
        assert!(iw.bruhat_leq(&iw.from_word(&[2], &t), &top));
        assert!(iw.bruhat_leq(&t, &top));
        assert!(!iw.bruhat_leq(&iw.from_word(&[1], &t), &top));
    }

    #[test]
    fn heights() {
        let rd: RootDatum = "GL3xGL3".parse().unwrap();
        assert_eq!(h_mu(&rd, &[1, 0, 0, 1, 0, 0]), 1);
        assert_eq!(h_mu(&rd, &[0; 6]), 0);
        assert_eq!(h_mu(&"GL3".parse().unwrap(), &[2, 1, 0]), 2);
    }
}
