//! Based root data for products of `GL_n`, `SL_n` and `PGL_n`.
//!
//! Cocharacters live in an internal Z-basis of `X_*`. Every factor also has
//! an ambient `Z^n` picture in which roots are `e_i - e_j` and Weyl elements
//! are permutations; the internal coordinates are:
//!
//! * `GL_n`: the ambient coordinates themselves.
//! * `SL_n`: `c_1..c_{n-1}`, standing for `(c_1, .., c_{n-1}, -sum c)`.
//! * `PGL_n`: the images of `e_1..e_{n-1}`, with representative
//!   `(v_1, .., v_{n-1}, 0)`.
//!
//! Roots are stored as characters in the dual basis, so the pairing is the
//! plain dot product.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, big_vec, AbelianGroup, BigMat, IntMat};

/// Default cap on `|W|` for full enumeration.
pub const WEYL_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FactorKind {
    GL,
    SL,
    PGL,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub kind: FactorKind,
    pub n: usize,
}

impl Factor {
    pub fn rank(&self) -> usize {
        match self.kind {
            FactorKind::GL => self.n,
            FactorKind::SL | FactorKind::PGL => self.n - 1,
        }
    }
}

/// Structured group name: a product of classical factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupLabel {
    pub factors: Vec<Factor>,
}

impl FromStr for GroupLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnsupportedLabel(s.to_string());
        let mut factors = Vec::new();
        for part in s.split(['x', '×', '*']) {
            let part = part.trim();
            let (kind, digits) = if let Some(d) = part.strip_prefix("PGL") {
                (FactorKind::PGL, d)
            } else if let Some(d) = part.strip_prefix("GL") {
                (FactorKind::GL, d)
            } else if let Some(d) = part.strip_prefix("SL") {
                (FactorKind::SL, d)
            } else {
                return Err(bad());
            };
            let n: usize = digits.parse().map_err(|_| bad())?;
            if n == 0 || n > 12 {
                return Err(bad());
            }
            factors.push(Factor { kind, n });
        }
        if factors.is_empty() {
            return Err(bad());
        }
        Ok(GroupLabel { factors })
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|fa| {
                let k = match fa.kind {
                    FactorKind::GL => "GL",
                    FactorKind::SL => "SL",
                    FactorKind::PGL => "PGL",
                };
                format!("{k}{}", fa.n)
            })
            .collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Placement of one factor inside the product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub factor: Factor,
    /// First internal coordinate.
    pub offset: usize,
    /// First ambient coordinate.
    pub ambient_offset: usize,
}

/// Ambient description of a root `e_i - e_j` (global ambient indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootEnds {
    pub component: usize,
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatum {
    pub label: GroupLabel,
    pub rank: usize,
    /// Characters, in the basis dual to the internal cocharacter basis.
    pub roots: Vec<Vec<i64>>,
    pub coroots: Vec<Vec<i64>>,
    pub simple_indices: Vec<usize>,
    pub components: Vec<Component>,
    pub ends: Vec<RootEnds>,
    pub ambient_dim: usize,
}

/// Finite Weyl group element: its matrix on `X_*` together with the
/// ambient permutation it comes from.
///
/// Permutations act by `P e_i = e_{w(i)}`, so `(w v)_{w(i)} = v_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylElement {
    pub matrix: IntMat,
    pub perm: Vec<usize>,
}

impl WeylElement {
    pub fn identity(rd: &RootDatum) -> Self {
        WeylElement { matrix: lattice::identity(rd.rank), perm: (0..rd.ambient_dim).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        WeylElement {
            matrix: lattice::mat_mul(&self.matrix, &other.matrix),
            perm: other.perm.iter().map(|&i| self.perm[i]).collect(),
        }
    }

    pub fn inverse(&self) -> WeylElement {
        let mut perm = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
        }
        let matrix = lattice::unimodular_inverse(&self.matrix).expect("Weyl matrices are unimodular");
        WeylElement { matrix, perm }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matrix.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn apply_big(&self, v: &[BigInt]) -> Vec<BigInt> {
        lattice::mat_vec(&self.matrix, v)
    }

    pub fn apply_q(&self, v: &[BigRational]) -> Vec<BigRational> {
        lattice::mat_vec_q(&self.matrix, v)
    }

    /// Cycle notation per factor, e.g. `((123),(12))`; `1` for the identity.
    pub fn cycle_string(&self, rd: &RootDatum) -> String {
        let parts: Vec<String> = rd
            .components
            .iter()
            .map(|c| {
                let n = c.factor.n;
                let off = c.ambient_offset;
                let mut seen = vec![false; n];
                let mut s = String::new();
                for start in 0..n {
                    if seen[start] || self.perm[off + start] == off + start {
                        continue;
                    }
                    s.push('(');
                    let mut i = start;
                    while !seen[i] {
                        seen[i] = true;
                        s.push_str(&(i + 1).to_string());
                        i = self.perm[off + i] - off;
                    }
                    s.push(')');
                }
                if s.is_empty() {
                    "1".to_string()
                } else {
                    s
                }
            })
            .collect();
        if parts.len() == 1 {
            parts[0].clone()
        } else {
            format!("({})", parts.join(","))
        }
    }
}

/// Builds the standard based root datum for `label`.
pub fn build_root_datum(label: &GroupLabel) -> Result<RootDatum> {
    let mut components = Vec::new();
    let (mut off, mut aoff) = (0, 0);
    for &factor in &label.factors {
        components.push(Component { factor, offset: off, ambient_offset: aoff });
        off += factor.rank();
        aoff += factor.n;
    }
    let rank = off;
    let mut roots = Vec::new();
    let mut coroots = Vec::new();
    let mut simple_indices = Vec::new();
    let mut ends = Vec::new();
    for (ci, comp) in components.iter().enumerate() {
        let n = comp.factor.n;
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        let negs: Vec<(usize, usize)> = pairs.iter().map(|&(i, j)| (j, i)).collect();
        for (i, j) in pairs.into_iter().chain(negs) {
            if j == i + 1 {
                simple_indices.push(roots.len());
            }
            let (r, c) = local_root(comp.factor, i, j);
            roots.push(embed(&r, rank, comp.offset));
            coroots.push(embed(&c, rank, comp.offset));
            ends.push(RootEnds { component: ci, i: comp.ambient_offset + i, j: comp.ambient_offset + j });
        }
    }
    Ok(RootDatum { label: label.clone(), rank, roots, coroots, simple_indices, components, ends, ambient_dim: aoff })
}

fn embed(v: &[i64], rank: usize, offset: usize) -> Vec<i64> {
    let mut out = vec![0; rank];
    out[offset..offset + v.len()].copy_from_slice(v);
    out
}

// Character and cocharacter coordinates of e_i - e_j in one factor.
fn local_root(f: Factor, i: usize, j: usize) -> (Vec<i64>, Vec<i64>) {
    let n = f.n;
    let d = |a: usize, b: usize| i64::from(a == b);
    match f.kind {
        FactorKind::GL => {
            let v: Vec<i64> = (0..n).map(|k| d(i, k) - d(j, k)).collect();
            (v.clone(), v)
        }
        FactorKind::SL => {
            let root = (0..n - 1).map(|k| (d(i, k) - d(j, k)) - (d(i, n - 1) - d(j, n - 1))).collect();
            let coroot = (0..n - 1).map(|k| d(i, k) - d(j, k)).collect();
            (root, coroot)
        }
        FactorKind::PGL => {
            let root = (0..n - 1).map(|k| d(i, k) - d(j, k)).collect();
            let last = d(i, n - 1) - d(j, n - 1);
            let coroot = (0..n - 1).map(|k| d(i, k) - d(j, k) - last).collect();
            (root, coroot)
        }
    }
}

impl FromStr for RootDatum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        build_root_datum(&s.parse()?)
    }
}

impl RootDatum {
    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    /// Indices of the positive roots `e_i - e_j`, `i < j`.
    pub fn positive_roots(&self) -> Vec<usize> {
        (0..self.roots.len()).filter(|&k| self.ends[k].i < self.ends[k].j).collect()
    }

    /// Highest root `e_1 - e_n` of a component, if it has roots.
    pub fn highest_root(&self, component: usize) -> Option<usize> {
        let c = &self.components[component];
        let n = c.factor.n;
        (n >= 2).then(|| {
            (0..self.roots.len())
                .find(|&k| self.ends[k].i == c.ambient_offset && self.ends[k].j == c.ambient_offset + n - 1)
                .expect("highest root present")
        })
    }

    /// Simple root indices belonging to a component, in order.
    pub fn component_simples(&self, component: usize) -> Vec<usize> {
        self.simple_indices.iter().copied().filter(|&k| self.ends[k].component == component).collect()
    }

    /// `⟨α, x⟩` for a root index and a rational cocharacter.
    pub fn pairing_q(&self, root: usize, x: &[BigRational]) -> BigRational {
        self.roots[root]
            .iter()
            .zip(x)
            .fold(BigRational::zero(), |acc, (&a, b)| acc + b * BigInt::from(a))
    }

    pub fn pairing(&self, root: usize, x: &[i64]) -> i64 {
        self.roots[root].iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Cartan integer `⟨α_a, α_b∨⟩`.
    pub fn cartan(&self, a: usize, b: usize) -> i64 {
        self.pairing(a, &self.coroots[b])
    }

    /// Ambient representative of an internal integral cocharacter.
    pub fn to_ambient(&self, x: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.ambient_dim];
        for c in &self.components {
            let n = c.factor.n;
            let a = c.ambient_offset;
            let o = c.offset;
            match c.factor.kind {
                FactorKind::GL => out[a..a + n].copy_from_slice(&x[o..o + n]),
                FactorKind::SL => {
                    out[a..a + n - 1].copy_from_slice(&x[o..o + n - 1]);
                    out[a + n - 1] = -x[o..o + n - 1].iter().sum::<i64>();
                }
                FactorKind::PGL => out[a..a + n - 1].copy_from_slice(&x[o..o + n - 1]),
            }
        }
        out
    }

    /// Ambient representative of an internal rational cocharacter.
    pub fn to_ambient_q(&self, x: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.ambient_dim];
        for c in &self.components {
            let n = c.factor.n;
            let a = c.ambient_offset;
            let o = c.offset;
            match c.factor.kind {
                FactorKind::GL => out[a..a + n].clone_from_slice(&x[o..o + n]),
                FactorKind::SL => {
                    out[a..a + n - 1].clone_from_slice(&x[o..o + n - 1]);
                    out[a + n - 1] = -x[o..o + n - 1].iter().fold(BigRational::zero(), |s, t| s + t);
                }
                FactorKind::PGL => out[a..a + n - 1].clone_from_slice(&x[o..o + n - 1]),
            }
        }
        out
    }

    /// Internal coordinates of an ambient integral vector. For `SL_n` the
    /// block must have sum zero; for `PGL_n` it is read modulo `(1,..,1)`.
    pub fn from_ambient(&self, y: &[i64]) -> Result<Vec<i64>> {
        if y.len() != self.ambient_dim {
            return Err(Error::Dimension(format!("expected {} ambient coordinates, got {}", self.ambient_dim, y.len())));
        }
        let mut out = vec![0; self.rank];
        for c in &self.components {
            let n = c.factor.n;
            let a = c.ambient_offset;
            let o = c.offset;
            let block = &y[a..a + n];
            match c.factor.kind {
                FactorKind::GL => out[o..o + n].copy_from_slice(block),
                FactorKind::SL => {
                    if block.iter().sum::<i64>() != 0 {
                        return Err(Error::Invalid(format!("SL{n} cocharacter {block:?} must have coordinate sum 0")));
                    }
                    out[o..o + n - 1].copy_from_slice(&block[..n - 1]);
                }
                FactorKind::PGL => {
                    for k in 0..n - 1 {
                        out[o + k] = block[k] - block[n - 1];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Weyl element of a global ambient permutation preserving the factors.
    pub fn weyl_from_perm(&self, perm: &[usize]) -> Result<WeylElement> {
        if perm.len() != self.ambient_dim {
            return Err(Error::Dimension(format!("permutation of length {} for ambient dimension {}", perm.len(), self.ambient_dim)));
        }
        let mut seen = vec![false; perm.len()];
        for c in &self.components {
            for i in c.ambient_offset..c.ambient_offset + c.factor.n {
                let t = perm[i];
                if t < c.ambient_offset || t >= c.ambient_offset + c.factor.n || seen[t] {
                    return Err(Error::Invalid(format!("{perm:?} is not a permutation within factors")));
                }
                seen[t] = true;
            }
        }
        let mut matrix = vec![vec![0i64; self.rank]; self.rank];
        for k in 0..self.rank {
            let mut b = vec![0i64; self.rank];
            b[k] = 1;
            let amb = self.to_ambient(&b);
            let mut moved = vec![0i64; self.ambient_dim];
            for (i, &t) in perm.iter().enumerate() {
                moved[t] = amb[i];
            }
            let col = self.from_ambient(&moved)?;
            for (r, v) in col.into_iter().enumerate() {
                matrix[r][k] = v;
            }
        }
        Ok(WeylElement { matrix, perm: perm.to_vec() })
    }

    /// Per-factor permutations given as 0-based image lists.
    pub fn weyl_from_factor_perms(&self, perms: &[Vec<usize>]) -> Result<WeylElement> {
        if perms.len() != self.components.len() {
            return Err(Error::Dimension(format!("{} factor permutations for {} factors", perms.len(), self.components.len())));
        }
        let mut global = Vec::with_capacity(self.ambient_dim);
        for (c, p) in self.components.iter().zip(perms) {
            if p.len() != c.factor.n {
                return Err(Error::Dimension(format!("permutation {p:?} for a factor of size {}", c.factor.n)));
            }
            global.extend(p.iter().map(|&t| t + c.ambient_offset));
        }
        self.weyl_from_perm(&global)
    }

    /// Parses cycle notation such as `(123),(12)` or `((123),(12))`; `1`
    /// denotes a trivial factor.
    pub fn weyl_from_cycles(&self, s: &str) -> Result<WeylElement> {
        let bad = || Error::Invalid(format!("cannot parse Weyl element `{s}`"));
        let mut t = s.trim();
        if self.components.len() > 1 && t.starts_with('(') && t.ends_with(')') {
            // strip one enclosing pair if it spans the whole string
            let mut depth = 0i32;
            let closes_at_end = t.char_indices().all(|(i, ch)| {
                match ch {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    _ => {}
                }
                depth > 0 || i == t.len() - 1
            });
            if closes_at_end {
                t = &t[1..t.len() - 1];
            }
        }
        // split at top-level commas
        let mut parts = Vec::new();
        let (mut depth, mut start) = (0i32, 0usize);
        for (i, ch) in t.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    parts.push(&t[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        parts.push(&t[start..]);
        if parts.len() != self.components.len() {
            return Err(bad());
        }
        let mut perms = Vec::new();
        for (c, part) in self.components.iter().zip(parts) {
            let n = c.factor.n;
            let mut perm: Vec<usize> = (0..n).collect();
            let part = part.trim();
            if part != "1" && !part.is_empty() {
                for cyc in part.split(')') {
                    let cyc = cyc.trim().trim_start_matches('(');
                    if cyc.is_empty() {
                        continue;
                    }
                    let idx: Vec<usize> = cyc
                        .split([' ', ';'])
                        .flat_map(|tok| {
                            if tok.chars().all(|ch| ch.is_ascii_digit()) && n <= 9 {
                                tok.chars().map(|ch| ch.to_digit(10).map(|d| d as usize)).collect::<Vec<_>>()
                            } else {
                                vec![tok.parse::<usize>().ok()]
                            }
                        })
                        .collect::<Option<Vec<usize>>>()
                        .ok_or_else(bad)?;
                    if idx.iter().any(|&k| k == 0 || k > n) {
                        return Err(bad());
                    }
                    // compose cycle on the left of what we have so far
                    let mut cycle: Vec<usize> = (0..n).collect();
                    for w in 0..idx.len() {
                        cycle[idx[w] - 1] = idx[(w + 1) % idx.len()] - 1;
                    }
                    perm = perm.iter().map(|&k| cycle[k]).collect();
                }
            }
            perms.push(perm);
        }
        self.weyl_from_factor_perms(&perms)
    }

    /// Simple reflection for a root index.
    pub fn reflection(&self, root: usize) -> WeylElement {
        let e = self.ends[root];
        let mut perm: Vec<usize> = (0..self.ambient_dim).collect();
        perm.swap(e.i, e.j);
        self.weyl_from_perm(&perm).expect("transposition inside a factor")
    }

    pub fn simple_reflections(&self) -> Vec<WeylElement> {
        self.simple_indices.iter().map(|&k| self.reflection(k)).collect()
    }

    /// `|W|` as a product of factorials.
    pub fn weyl_order(&self) -> u128 {
        self.components
            .iter()
            .map(|c| (1..=c.factor.n as u128).product::<u128>())
            .fold(1u128, |a, b| a.saturating_mul(b))
    }

    /// Full enumeration of `W` by breadth-first search over simple
    /// reflections; identity first.
    pub fn weyl_group(&self, cap: u64) -> Result<Vec<WeylElement>> {
        if self.weyl_order() > cap as u128 {
            return Err(Error::CapExceeded { what: format!("|W({})| = {}", self.label, self.weyl_order()), cap });
        }
        let gens = self.simple_reflections();
        let id = WeylElement::identity(self);
        let mut seen: HashSet<Vec<usize>> = HashSet::from([id.perm.clone()]);
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for s in &gens {
                let y = s.compose(&x);
                if seen.insert(y.perm.clone()) {
                    if out.len() as u64 >= cap {
                        return Err(Error::CapExceeded { what: "Weyl group enumeration".into(), cap });
                    }
                    out.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(out)
    }

    fn coroot_index(&self) -> HashMap<&[i64], usize> {
        self.coroots.iter().enumerate().map(|(k, c)| (c.as_slice(), k)).collect()
    }

    /// Recovers the Weyl element with the given matrix, if there is one.
    pub fn weyl_from_matrix(&self, m: &IntMat) -> Option<WeylElement> {
        let index = self.coroot_index();
        let mut perm: Vec<usize> = (0..self.ambient_dim).collect();
        for (ci, c) in self.components.iter().enumerate() {
            let n = c.factor.n;
            if n < 2 {
                continue;
            }
            for i in 0..n {
                let k = if i == 0 { 1 } else { 0 };
                let root = (0..self.roots.len()).find(|&r| {
                    self.ends[r].i == c.ambient_offset + i && self.ends[r].j == c.ambient_offset + k
                })?;
                let img: Vec<i64> = m.iter().map(|row| row.iter().zip(&self.coroots[root]).map(|(a, b)| a * b).sum()).collect();
                let &t = index.get(img.as_slice())?;
                if self.ends[t].component != ci {
                    return None;
                }
                perm[c.ambient_offset + i] = self.ends[t].i;
            }
        }
        let w = self.weyl_from_perm(&perm).ok()?;
        (&w.matrix == m).then_some(w)
    }

    /// Matrix of the automorphism permuting equal factors: factor `k` is
    /// sent to factor `target[k]`.
    pub fn factor_permutation(&self, target: &[usize]) -> Result<IntMat> {
        let comps = &self.components;
        if target.len() != comps.len() {
            return Err(Error::Dimension("factor permutation length".into()));
        }
        let mut m = vec![vec![0i64; self.rank]; self.rank];
        for (k, &t) in target.iter().enumerate() {
            if t >= comps.len() || comps[t].factor != comps[k].factor {
                return Err(Error::Invalid(format!("cannot send factor {k} to factor {t}")));
            }
            for d in 0..comps[k].factor.rank() {
                m[comps[t].offset + d][comps[k].offset + d] = 1;
            }
        }
        if lattice::unimodular_inverse(&m).is_none() {
            return Err(Error::Invalid("factor map is not a permutation".into()));
        }
        Ok(m)
    }

    /// The cyclic shift of factors `k -> k + 1`.
    pub fn cyclic_factor_shift(&self) -> Result<IntMat> {
        let c = self.components.len();
        self.factor_permutation(&(0..c).map(|k| (k + 1) % c).collect::<Vec<_>>())
    }

    /// `π₁ = X_* / (coroot lattice)`.
    pub fn pi1(&self) -> AbelianGroup {
        let gens: Vec<Vec<BigInt>> = self.coroots.iter().map(|c| big_vec(c)).collect();
        lattice::quotient(self.rank, &gens)
    }

    /// Coinvariants of `π₁` under the inertial action, and whether they are
    /// torsion free.
    pub fn pi1_coinvariants(&self, g: &GammaData) -> (AbelianGroup, bool) {
        let mut gens: Vec<Vec<BigInt>> = self.coroots.iter().map(|c| big_vec(c)).collect();
        for k in 0..self.rank {
            let col: Vec<BigInt> =
                (0..self.rank).map(|i| BigInt::from(i64::from(i == k) - g.inertia[i][k])).collect();
            gens.push(col);
        }
        let grp = lattice::quotient(self.rank, &gens);
        let free = grp.is_torsion_free();
        (grp, free)
    }

    /// Tate cohomology `Ĥ⁰(I, X_*)`: inertia invariants modulo norms.
    pub fn tate_h0(&self, g: &GammaData) -> AbelianGroup {
        let n = self.rank;
        let theta = &g.inertia;
        let one_minus: BigMat = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j) - theta[i][j])).collect())
            .collect();
        let fixed = lattice::kernel_basis(&one_minus, n);
        if fixed.is_empty() {
            return AbelianGroup::trivial();
        }
        let k = matrix_order(theta, 10_000).expect("validated inertial action has finite order");
        let mut sum = vec![vec![0i64; n]; n];
        let mut pow = lattice::identity(n);
        for _ in 0..k {
            for i in 0..n {
                for j in 0..n {
                    sum[i][j] += pow[i][j];
                }
            }
            pow = lattice::mat_mul(&pow, theta);
        }
        let scale = BigInt::from(g.e / k as u64);
        let basis_q: Vec<Vec<BigRational>> = fixed.iter().map(|b| lattice::to_q(b)).collect();
        let mut coords = Vec::new();
        for col in 0..n {
            let img: Vec<BigInt> = (0..n).map(|i| BigInt::from(sum[i][col]) * &scale).collect();
            let sol = lattice::solve_rational(&basis_q, &lattice::to_q(&img)).expect("norms are inertia invariant");
            coords.push(
                sol.into_iter()
                    .map(|c| {
                        assert!(c.is_integer(), "norm image outside the fixed lattice");
                        c.to_integer()
                    })
                    .collect(),
            );
        }
        lattice::quotient(fixed.len(), &coords)
    }
}

/// Order of an integer matrix, if at most `cap`.
pub fn matrix_order(m: &IntMat, cap: usize) -> Option<usize> {
    let id = lattice::identity(m.len());
    let mut pow = m.clone();
    for k in 1..=cap {
        if pow == id {
            return Some(k);
        }
        pow = lattice::mat_mul(&pow, m);
    }
    None
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Galois data: the prime `p`, ramification `e`, unramified degree `r`, the
/// pinned automorphism `ψ` (image of `σ`) and the inertial action (image of
/// `γ`), both as matrices on `X_*`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaData {
    pub p: u64,
    pub e: u64,
    pub r: u32,
    pub psi: IntMat,
    pub inertia: IntMat,
}

impl GammaData {
    pub fn new(rd: &RootDatum, p: u64, e: u64, r: u32, psi: IntMat, inertia: IntMat) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidGamma(format!("{p} is not prime")));
        }
        if e == 0 || e.is_multiple_of(p) {
            return Err(Error::InvalidGamma(format!("e = {e} must be positive and prime to p")));
        }
        if r == 0 {
            return Err(Error::InvalidGamma("r must be positive".into()));
        }
        let q = p.checked_pow(r).ok_or_else(|| Error::InvalidGamma("q = p^r overflows".into()))?;
        if (q - 1) % e != 0 {
            return Err(Error::InvalidGamma(format!("e = {e} does not divide q - 1 = {}", q - 1)));
        }
        for (name, m) in [("pinned automorphism", &psi), ("inertial action", &inertia)] {
            if m.len() != rd.rank || m.iter().any(|row| row.len() != rd.rank) {
                return Err(Error::Dimension(format!("{name} must be {0}x{0}", rd.rank)));
            }
            check_preserves(rd, m).map_err(|why| Error::InvalidGamma(format!("{name}: {why}")))?;
        }
        let ord_psi = matrix_order(&psi, 10_000).ok_or_else(|| Error::InvalidGamma("ψ has infinite order".into()))?;
        if !(r as usize).is_multiple_of(ord_psi) {
            return Err(Error::InvalidGamma(format!("order {ord_psi} of ψ does not divide r = {r}")));
        }
        let ord_i = matrix_order(&inertia, 10_000)
            .ok_or_else(|| Error::InvalidGamma("inertial action has infinite order".into()))?;
        if !e.is_multiple_of(ord_i as u64) {
            return Err(Error::InvalidGamma(format!("order {ord_i} of the inertial action does not divide e = {e}")));
        }
        Ok(GammaData { p, e, r, psi, inertia })
    }

    /// Split data: `ψ` and the inertial action trivial.
    pub fn split(rd: &RootDatum, p: u64, e: u64, r: u32) -> Result<Self> {
        let id = lattice::identity(rd.rank);
        Self::new(rd, p, e, r, id.clone(), id)
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.r)
    }

    pub fn inertia_is_trivial(&self) -> bool {
        self.inertia == lattice::identity(self.inertia.len())
    }

    pub fn psi_inverse(&self) -> IntMat {
        lattice::unimodular_inverse(&self.psi).expect("validated automorphism")
    }

    /// `ψ^k` for any integer `k`.
    pub fn psi_pow(&self, k: i64) -> IntMat {
        let base = if k >= 0 { self.psi.clone() } else { self.psi_inverse() };
        let mut out = lattice::identity(self.psi.len());
        for _ in 0..k.unsigned_abs() {
            out = lattice::mat_mul(&out, &base);
        }
        out
    }

    /// `ψ(w) = ψ w ψ⁻¹`.
    pub fn psi_twist(&self, rd: &RootDatum, w: &WeylElement, k: i64) -> WeylElement {
        let a = self.psi_pow(k);
        let b = self.psi_pow(-k);
        let m = lattice::mat_mul(&lattice::mat_mul(&a, &w.matrix), &b);
        rd.weyl_from_matrix(&m).expect("pinned automorphisms normalize W")
    }
}

fn check_preserves(rd: &RootDatum, theta: &IntMat) -> std::result::Result<(), String> {
    let inv = lattice::unimodular_inverse(theta).ok_or("not invertible over Z")?;
    let dual = lattice::transpose(&inv);
    let coroots: HashSet<&[i64]> = rd.coroots.iter().map(|c| c.as_slice()).collect();
    let roots: HashSet<&[i64]> = rd.roots.iter().map(|c| c.as_slice()).collect();
    let apply = |m: &IntMat, v: &[i64]| -> Vec<i64> {
        m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    };
    for c in &rd.coroots {
        if !coroots.contains(apply(theta, c).as_slice()) {
            return Err(format!("coroot {c:?} is not sent to a coroot"));
        }
    }
    for r in &rd.roots {
        if !roots.contains(apply(&dual, r).as_slice()) {
            return Err(format!("root {r:?} is not sent to a root"));
        }
    }
    let simple: HashSet<Vec<i64>> = rd.simple_indices.iter().map(|&k| rd.coroots[k].clone()).collect();
    for &k in &rd.simple_indices {
        if !simple.contains(&apply(theta, &rd.coroots[k])) {
            return Err("the base is not preserved".into());
        }
    }
    Ok(())
}

/// The order-two automorphism `(a, b, c) ↦ (-c, -b, -a)` of `X_*(GL_3)`.
pub fn unitary_involution(n: usize) -> IntMat {
    (0..n).map(|i| (0..n).map(|j| if i + j == n - 1 { -1 } else { 0 }).collect()).collect()
}

/// Exact rational from two integers.
pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Rational vector from integers.
pub fn qv(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rd(s: &str) -> RootDatum {
        s.parse().unwrap()
    }

    #[test]
    fn standard_sizes() {
        let g = rd("GL3");
        assert_eq!((g.num_roots(), g.rank), (6, 3));
        assert_eq!(g.roots[g.simple_indices[0]], vec![1, -1, 0]);
        assert_eq!(g.roots[g.simple_indices[1]], vec![0, 1, -1]);
        let s = rd("SL2");
        assert_eq!((s.num_roots(), s.rank), (2, 1));
        let p = rd("GL3xGL3");
        assert_eq!((p.num_roots(), p.rank), (12, 6));
    }

    #[test]
    fn pgl_coordinates() {
        let g = rd("PGL3");
        let k = (0..g.num_roots()).find(|&k| g.ends[k].i == 0 && g.ends[k].j == 2).unwrap();
        assert_eq!(g.roots[k], vec![1, 0]);
        assert_eq!(g.coroots[k], vec![2, 1]);
        assert_eq!(g.cartan(k, k), 2);
    }

    #[test]
    fn weyl_orders() {
        assert_eq!(rd("GL3").weyl_group(WEYL_CAP).unwrap().len(), 6);
        assert_eq!(rd("GL3xGL3").weyl_group(WEYL_CAP).unwrap().len(), 36);
        assert_eq!(rd("SL2").weyl_group(WEYL_CAP).unwrap().len(), 2);
        assert!(matches!(rd("GL9").weyl_group(1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn permutation_convention() {
        let g = rd("GL3");
        let c = g.weyl_from_cycles("(123)").unwrap();
        assert_eq!(c.apply(&[6, 3, 1]), vec![1, 6, 3]);
        let t = g.weyl_from_cycles("(12)").unwrap();
        assert_eq!(c.compose(&t).cycle_string(&g), "(13)");
        assert_eq!(t.compose(&c).cycle_string(&g), "(23)");
        let p = rd("GL3xGL3");
        let s = p.weyl_from_cycles("((123),(12))").unwrap();
        assert_eq!(s.cycle_string(&p), "((123),(12))");
        assert_eq!(s.inverse().cycle_string(&p), "((132),(12))");
    }

    #[test]
    fn fundamental_groups() {
        assert_eq!(rd("PGL3").pi1().to_string(), "Z/3");
        assert_eq!(rd("GL4").pi1().to_string(), "Z");
        assert!(rd("SL3").pi1().is_trivial());
        assert_eq!(rd("SL2xPGL2").pi1().to_string(), "Z/2");
    }

    #[test]
    fn unitary_data() {
        let g = rd("GL3");
        let gd = GammaData::new(&g, 7, 6, 1, lattice::identity(3), unitary_involution(3)).unwrap();
        assert_eq!(g.pi1_coinvariants(&gd).0.to_string(), "Z/2");
        assert_eq!(g.tate_h0(&gd).to_string(), "Z/3");
    }

    #[test]
    fn tate_trivial_inertia() {
        let s = rd("SL2");
        assert_eq!(s.tate_h0(&GammaData::split(&s, 7, 24, 2).unwrap()).to_string(), "Z/24");
        let t = rd("GL1");
        assert_eq!(t.tate_h0(&GammaData::split(&t, 11, 5, 1).unwrap()).to_string(), "Z/5");
    }

    #[test]
    fn gamma_validation() {
        let g = rd("GL2");
        assert!(GammaData::split(&g, 7, 5, 1).is_err());
        assert!(GammaData::split(&g, 8, 7, 1).is_err());
        let swap = vec![vec![0, 1], vec![1, 0]];
        assert!(GammaData::new(&g, 7, 6, 1, swap.clone(), lattice::identity(2)).is_err());
        let p = rd("GL2xGL2");
        let psi = p.cyclic_factor_shift().unwrap();
        assert!(GammaData::new(&p, 5, 24, 2, psi, lattice::identity(4)).is_ok());
    }

    #[test]
    fn psi_twist_swaps_factors() {
        let p = rd("GL3xGL3");
        let psi = p.cyclic_factor_shift().unwrap();
        let gd = GammaData::new(&p, 19, 18, 2, psi, lattice::identity(6)).unwrap();
        let s = p.weyl_from_cycles("((123),(12))").unwrap();
        assert_eq!(gd.psi_twist(&p, &s, 1).cycle_string(&p), "((12),(123))");
    }
}
