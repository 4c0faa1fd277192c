//! Integer lattice utilities: Smith normal form, kernels, quotients and
//! exact rational solving.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Dense matrix of arbitrary-precision integers, row major.
pub type BigMat = Vec<Vec<BigInt>>;

/// Dense matrix of machine integers, row major. Used for Weyl elements and
/// lattice automorphisms, whose entries stay tiny.
pub type IntMat = Vec<Vec<i64>>;

/// Result of a Smith normal form computation: `u * m * v = d`.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Diagonal of `d`, length `min(rows, cols)`, nonnegative, each entry
    /// dividing the next nonzero one.
    pub diag: Vec<BigInt>,
    /// Unimodular row transform.
    pub u: BigMat,
    /// Unimodular column transform.
    pub v: BigMat,
}

fn identity_big(n: usize) -> BigMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Converts a machine-integer matrix.
pub fn to_big(m: &IntMat) -> BigMat {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Identity matrix.
pub fn identity(n: usize) -> IntMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// Matrix product of machine-integer matrices.
pub fn mat_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![0i64; m]; n];
    for i in 0..n {
        for t in 0..k {
            let x = a[i][t];
            if x == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += x * b[t][j];
            }
        }
    }
    out
}

/// Applies a machine-integer matrix to an integer vector.
pub fn mat_vec(a: &IntMat, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(&x, y)| BigInt::from(x) * y).sum())
        .collect()
}

/// Applies a machine-integer matrix to a rational vector.
pub fn mat_vec_q(a: &IntMat, v: &[BigRational]) -> Vec<BigRational> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(BigRational::zero(), |acc, (&x, y)| acc + y * BigInt::from(x))
        })
        .collect()
}

/// Transpose.
pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Inverse of a unimodular matrix, or `None` if it is not invertible over Z.
pub fn unimodular_inverse(a: &IntMat) -> Option<IntMat> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<BigRational> = r.iter().map(|&x| BigRational::from_integer(x.into())).collect();
            row.extend((0..n).map(|j| BigRational::from_integer(i64::from(i == j).into())));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let t = &m[col][c] * &f;
                    m[r][c] = &m[r][c] - t;
                }
            }
        }
    }
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let x = &m[i][n + j];
            if !x.is_integer() {
                return None;
            }
            out[i][j] = i64::try_from(x.to_integer()).ok()?;
        }
    }
    Some(out)
}

/// Smith normal form over the integers.
pub fn smith_normal_form(m: &BigMat, cols: usize) -> Snf {
    let rows = m.len();
    let mut a = m.clone();
    let mut u = identity_big(rows);
    let mut v = identity_big(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        for r in v.iter_mut() {
            r.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    u.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    for r in a.iter_mut() {
                        r.swap(t, j);
                    }
                    for r in v.iter_mut() {
                        r.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // enforce divisibility of the trailing block
            let mut bad = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    let one = BigInt::from(-1);
                    row_axpy(&mut a, t, i, &one);
                    row_axpy(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
        t += 1;
    }
    let diag = (0..rows.min(cols)).map(|i| a[i][i].clone()).collect();
    Snf { diag, u, v }
}

// row_i -= q * row_t
fn row_axpy(a: &mut BigMat, i: usize, t: usize, q: &BigInt) {
    let src = a[t].clone();
    for (x, y) in a[i].iter_mut().zip(src.iter()) {
        *x -= q * y;
    }
}

// col_j -= q * col_t
fn col_axpy(a: &mut BigMat, j: usize, t: usize, q: &BigInt) {
    for r in a.iter_mut() {
        let y = r[t].clone();
        r[j] -= q * y;
    }
}

/// A finitely generated abelian group `Z^free_rank ⊕ ⊕ Z/d_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub free_rank: usize,
    /// Invariant factors greater than one, each dividing the next.
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { free_rank: 0, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            k => parts.push(format!("Z^{k}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// Quotient of `Z^dim` by the sublattice spanned by `generators`.
pub fn quotient(dim: usize, generators: &[Vec<BigInt>]) -> AbelianGroup {
    if generators.is_empty() {
        return AbelianGroup { free_rank: dim, torsion: Vec::new() };
    }
    let m: BigMat = (0..dim).map(|i| generators.iter().map(|g| g[i].clone()).collect()).collect();
    let snf = smith_normal_form(&m, generators.len());
    let nonzero: Vec<&BigInt> = snf.diag.iter().filter(|d| !d.is_zero()).collect();
    AbelianGroup {
        free_rank: dim - nonzero.len(),
        torsion: nonzero.into_iter().filter(|d| !d.is_one()).cloned().collect(),
    }
}

/// A Z-basis of the kernel of `m : Z^cols -> Z^rows`.
pub fn kernel_basis(m: &BigMat, cols: usize) -> Vec<Vec<BigInt>> {
    if m.is_empty() {
        return identity_big(cols);
    }
    let snf = smith_normal_form(m, cols);
    let rank = snf.diag.iter().filter(|d| !d.is_zero()).count();
    (rank..cols).map(|j| snf.v.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Solves `sum_k c_k basis[k] = target` over the rationals; returns one
/// solution or `None` when the system is inconsistent.
pub fn solve_rational(basis: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = target.len();
    let k = basis.len();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..n).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=k {
                    let t = &m[r][j] * &f;
                    m[i][j] = &m[i][j] - t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = m[i][k].clone();
    }
    Some(sol)
}

/// Integer vector as rationals.
pub fn to_q(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Machine-integer vector as big integers.
pub fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bm(rows: &[&[i64]]) -> BigMat {
        rows.iter().map(|r| big_vec(r)).collect()
    }

    fn mul_big(a: &BigMat, b: &BigMat) -> BigMat {
        let m = b[0].len();
        a.iter()
            .map(|r| (0..m).map(|j| r.iter().zip(b).map(|(x, br)| x * &br[j]).sum()).collect())
            .collect()
    }

    #[test]
    fn snf_reconstructs() {
        let m = bm(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&m, 3);
        assert_eq!(s.diag, big_vec(&[2, 6, 12]));
        let d = mul_big(&mul_big(&s.u, &m), &s.v);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s.diag[i].clone() } else { BigInt::zero() };
                assert_eq!(d[i][j], want);
            }
        }
    }

    #[test]
    fn quotient_by_sum_map_kernel() {
        // Z^2 / <(2,-1), (-1,2)> is Z/3
        let g = quotient(2, &[big_vec(&[2, -1]), big_vec(&[-1, 2])]);
        assert_eq!(g.to_string(), "Z/3");
    }

    #[test]
    fn kernel_of_one_plus_theta() {
        let m = bm(&[&[1, 0, 1], &[0, 2, 0], &[1, 0, 1]]);
        let k = kernel_basis(&m, 3);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert!(v[1].is_zero() && (&v[0] + &v[2]).is_zero() && v[0].abs().is_one());
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let a = vec![vec![2, 1], vec![1, 1]];
        let b = unimodular_inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &b), identity(2));
        assert!(unimodular_inverse(&vec![vec![2, 0], vec![0, 1]]).is_none());
    }
}
