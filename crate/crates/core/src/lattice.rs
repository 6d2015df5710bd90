//! Integer lattices: Smith and Hermite normal forms, sublattice saturation,
//! and finite abelian quotients `Z^d / <relations>`.
//!
//! All arithmetic is checked 64-bit; an overflow aborts the computation with
//! [`LatticeError::Overflow`] rather than wrapping.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{LaurentPoly, Monomial, PolyError, VarContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice: integer overflow during elimination")]
    Overflow,
    #[error("lattice: vector of length {got} in a {expected}-dimensional lattice")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lattice: quotient is infinite (free rank {free_rank})")]
    InfiniteQuotient { free_rank: usize },
    #[error("lattice: quotient too large to enumerate")]
    TooLarge,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub type Result<T> = std::result::Result<T, LatticeError>;

fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(LatticeError::Overflow)
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(LatticeError::Overflow)
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Stacks equal-length rows. `cols` is needed for the empty case.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LatticeError::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(LatticeError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = add(out[(i, j)], mul(a, other[(k, j)])?)?;
                }
            }
        }
        Ok(out)
    }

    /// Determinant of a square matrix via fraction-free elimination.
    pub fn determinant(&self) -> Result<i64> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<Vec<i128>> = self.to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i][j]
                        .checked_mul(a[k][k])
                        .and_then(|x| a[i][k].checked_mul(a[k][j]).and_then(|y| x.checked_sub(y)))
                        .ok_or(LatticeError::Overflow)?;
                    a[i][j] = v / prev;
                }
            }
            prev = a[k][k];
        }
        i64::try_from(sign * a[n - 1][n - 1]).map_err(|_| LatticeError::Overflow)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        for j in 0..self.cols {
            let v = add(self[(dst, j)], mul(k, self[(src, j)])?)?;
            self[(dst, j)] = v;
        }
        Ok(())
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        for i in 0..self.rows {
            let v = add(self[(i, dst)], mul(k, self[(i, src)])?)?;
            self[(i, dst)] = v;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// `u * m * v == s` with `u`, `v` unimodular and `s` diagonal, nonnegative,
/// each diagonal entry dividing the next.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.s.nrows().min(self.s.ncols())).map(|i| self.s[(i, i)]).collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Result<Snf> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize, i64)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = a[(i, j)].checked_abs().ok_or(LatticeError::Overflow)?;
                    if x != 0 && best.is_none_or(|(_, _, b)| x < b) {
                        best = Some((i, j, x));
                    }
                }
            }
            let Some((pi, pj, _)) = best else {
                return Ok(Snf { u, s: a, v });
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = a[(t, t)];
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[(i, t)] / p;
                a.add_row(i, t, -q)?;
                u.add_row(i, t, -q)?;
                clean &= a[(i, t)] == 0;
            }
            for j in t + 1..cols {
                let q = a[(t, j)] / p;
                a.add_col(j, t, -q)?;
                v.add_col(j, t, -q)?;
                clean &= a[(t, j)] == 0;
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[(i, j)] % p != 0));
            if let Some(i) = bad {
                a.add_row(t, i, 1)?;
                u.add_row(t, i, 1)?;
                continue;
            }
            if p < 0 {
                a.negate_row(t);
                u.negate_row(t);
            }
            break;
        }
    }
    Ok(Snf { u, s: a, v })
}

/// Row-style Hermite normal form with transform: `u * m == h`, `u`
/// unimodular, nonzero rows of `h` first, pivots positive, entries above a
/// pivot reduced into `[0, pivot)`.
pub fn hermite_with_transform(m: &IntMatrix) -> Result<(IntMatrix, IntMatrix, usize)> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let mut best: Option<(usize, i64)> = None;
            for i in r..rows {
                let x = h[(i, c)].checked_abs().ok_or(LatticeError::Overflow)?;
                if x != 0 && best.is_none_or(|(_, b)| x < b) {
                    best = Some((i, x));
                }
            }
            let Some((pi, _)) = best else { break };
            h.swap_rows(r, pi);
            u.swap_rows(r, pi);
            let p = h[(r, c)];
            let mut done = true;
            for i in r + 1..rows {
                let q = h[(i, c)] / p;
                h.add_row(i, r, -q)?;
                u.add_row(i, r, -q)?;
                done &= h[(i, c)] == 0;
            }
            if done {
                break;
            }
        }
        if h[(r, c)] == 0 {
            continue;
        }
        if h[(r, c)] < 0 {
            h.negate_row(r);
            u.negate_row(r);
        }
        let p = h[(r, c)];
        for i in 0..r {
            let q = h[(i, c)].div_euclid(p);
            h.add_row(i, r, -q)?;
            u.add_row(i, r, -q)?;
        }
        r += 1;
    }
    Ok((h, u, r))
}

/// Canonical basis (nonzero HNF rows) of the lattice spanned by `vectors`.
pub fn hnf_basis(vectors: &[Vec<i64>], dim: usize) -> Result<Vec<Vec<i64>>> {
    let m = IntMatrix::from_rows(vectors, dim)?;
    let (h, _, rank) = hermite_with_transform(&m)?;
    Ok((0..rank).map(|i| h.row(i).to_vec()).collect())
}

/// Basis of the integer left kernel `{c : c * m = 0}`.
pub fn left_kernel(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    let (_, u, rank) = hermite_with_transform(m)?;
    Ok((rank..m.nrows()).map(|i| u.row(i).to_vec()).collect())
}

/// Structure of `Z^d / L` for the lattice `L` spanned by some vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeQuotient {
    /// Nontrivial invariant factors, each dividing the next.
    pub torsion: Vec<i64>,
    pub free_rank: usize,
}

impl LatticeQuotient {
    /// `|Z^d / L|`, or `None` when the quotient is infinite.
    pub fn index(&self) -> Option<u128> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().map(|&t| t as u128).product())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

pub fn lattice_quotient(vectors: &[Vec<i64>], dim: usize) -> Result<LatticeQuotient> {
    if vectors.is_empty() {
        return Ok(LatticeQuotient {
            torsion: vec![],
            free_rank: dim,
        });
    }
    let snf = smith_normal_form(&IntMatrix::from_rows(vectors, dim)?)?;
    let diag = snf.diagonal();
    let nonzero = diag.iter().filter(|&&x| x != 0).count();
    Ok(LatticeQuotient {
        torsion: diag.into_iter().filter(|&x| x > 1).collect(),
        free_rank: dim - nonzero,
    })
}

/// True iff the vectors generate all of `Z^dim`.
pub fn lattice_saturates(vectors: &[Vec<i64>], dim: usize) -> Result<bool> {
    Ok(lattice_quotient(vectors, dim)?.is_trivial())
}

/// Generators plus relation vectors; `v` stands for `prod x_i^{v_i} = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    ctx: VarContext,
    relations: Vec<Vec<i64>>,
}

impl GroupPresentation {
    pub fn new(ctx: &VarContext, relations: Vec<Vec<i64>>) -> Result<Self> {
        for r in &relations {
            if r.len() != ctx.dim() {
                return Err(LatticeError::DimensionMismatch {
                    expected: ctx.dim(),
                    got: r.len(),
                });
            }
        }
        Ok(GroupPresentation {
            ctx: ctx.clone(),
            relations,
        })
    }

    /// `x_i^{L_i} = 1` for each variable.
    pub fn periodic(ctx: &VarContext, lengths: &[i64]) -> Result<Self> {
        if lengths.len() != ctx.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: ctx.dim(),
                got: lengths.len(),
            });
        }
        let relations = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let mut v = vec![0; ctx.dim()];
                v[i] = l;
                v
            })
            .collect();
        Self::new(ctx, relations)
    }

    /// Adds the relation `lhs = rhs`, i.e. `lhs * rhs^-1 = 1`.
    pub fn with_identity(mut self, lhs: &Monomial, rhs: &Monomial) -> Result<Self> {
        let rel = lhs.mul(&rhs.inv()?)?;
        if rel.dim() != self.ctx.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.ctx.dim(),
                got: rel.dim(),
            });
        }
        self.relations.push(rel.exponents().to_vec());
        Ok(self)
    }

    pub fn context(&self) -> &VarContext {
        &self.ctx
    }

    pub fn relations(&self) -> &[Vec<i64>] {
        &self.relations
    }

    pub fn structure(&self) -> Result<LatticeQuotient> {
        lattice_quotient(&self.relations, self.ctx.dim())
    }

    /// Per-variable periods when every relation is a pure power `x_i^l = 1`
    /// and each variable has one.
    fn diagonal_periods(&self) -> Option<Vec<u64>> {
        let d = self.ctx.dim();
        let mut periods = vec![0u64; d];
        for r in &self.relations {
            let nz: Vec<usize> = (0..d).filter(|&i| r[i] != 0).collect();
            match nz.as_slice() {
                [] => {}
                [i] => periods[*i] = gcd(periods[*i], r[*i].unsigned_abs()),
                _ => return None,
            }
        }
        if periods.iter().all(|&p| p > 0) {
            Some(periods)
        } else {
            None
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Finite quotient `Z^d / <relations>` with a fixed element indexing.
///
/// Elements are mixed-radix coordinate tuples. For pure periodic tori the
/// coordinates are the exponents of each variable (first variable most
/// significant), matching `x = S_l ⊗ I_m`; otherwise they are coordinates in
/// a Smith basis, ordered by invariant factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    ctx: VarContext,
    moduli: Vec<u64>,
    /// d x r: exponent row vector times this gives coordinates.
    coord_map: IntMatrix,
    invariant_factors: Vec<i64>,
    order: usize,
}

/// Largest group we are willing to index.
pub const MAX_GROUP_ORDER: u128 = 1 << 32;

pub fn quotient(pres: &GroupPresentation) -> Result<FiniteAbelianGroup> {
    let structure = pres.structure()?;
    if structure.free_rank > 0 {
        return Err(LatticeError::InfiniteQuotient {
            free_rank: structure.free_rank,
        });
    }
    let order = structure.index().expect("finite");
    if order > MAX_GROUP_ORDER {
        return Err(LatticeError::TooLarge);
    }
    let d = pres.ctx.dim();
    let (moduli, coord_map) = match pres.diagonal_periods() {
        Some(p) => (p, IntMatrix::identity(d)),
        None => {
            let snf = smith_normal_form(&IntMatrix::from_rows(&pres.relations, d)?)?;
            let diag = snf.diagonal();
            let keep: Vec<usize> = (0..d).filter(|&i| diag[i] > 1).collect();
            let mut map = IntMatrix::zeros(d, keep.len());
            for (c, &k) in keep.iter().enumerate() {
                for r in 0..d {
                    map[(r, c)] = snf.v[(r, k)];
                }
            }
            (keep.iter().map(|&k| diag[k] as u64).collect(), map)
        }
    };
    Ok(FiniteAbelianGroup {
        ctx: pres.ctx.clone(),
        moduli,
        coord_map,
        invariant_factors: structure.torsion,
        order: order as usize,
    })
}

impl FiniteAbelianGroup {
    pub fn context(&self) -> &VarContext {
        &self.ctx
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Invariant factors `d_1 | d_2 | ...`, each at least 2.
    pub fn invariant_factors(&self) -> &[i64] {
        &self.invariant_factors
    }

    /// Radices of the element indexing.
    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn coords(&self, index: usize) -> Vec<u64> {
        let mut rest = index as u64;
        let mut out = vec![0; self.moduli.len()];
        for (i, &m) in self.moduli.iter().enumerate().rev() {
            out[i] = rest % m;
            rest /= m;
        }
        out
    }

    pub fn index_of(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.moduli)
            .fold(0u64, |acc, (&c, &m)| acc * m + c % m) as usize
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let sum: Vec<u64> = ca.iter().zip(&cb).zip(&self.moduli).map(|((x, y), m)| (x + y) % m).collect();
        self.index_of(&sum)
    }

    pub fn neg(&self, a: usize) -> usize {
        let c: Vec<u64> = self.coords(a).iter().zip(&self.moduli).map(|(x, m)| (m - x) % m).collect();
        self.index_of(&c)
    }

    /// Image of a monomial under the quotient map.
    pub fn reduce_monomial(&self, m: &Monomial) -> Result<usize> {
        self.reduce_exponents(m.exponents())
    }

    pub fn reduce_exponents(&self, e: &[i64]) -> Result<usize> {
        if e.len() != self.ctx.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.ctx.dim(),
                got: e.len(),
            });
        }
        let mut coords = Vec::with_capacity(self.moduli.len());
        for (c, &m) in self.moduli.iter().enumerate() {
            let mut acc: i128 = 0;
            for (r, &x) in e.iter().enumerate() {
                acc += i128::from(x) * i128::from(self.coord_map[(r, c)]);
            }
            coords.push(acc.rem_euclid(i128::from(m)) as u64);
        }
        Ok(self.index_of(&coords))
    }

    /// Images of the monomials of a polynomial, in canonical term order.
    pub fn reduce_poly(&self, p: &LaurentPoly) -> Result<Vec<usize>> {
        p.monomials().map(|m| self.reduce_monomial(m)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_snf(m: &IntMatrix) -> Snf {
        let snf = smith_normal_form(m).unwrap();
        let prod = snf.u.checked_mul(m).unwrap().checked_mul(&snf.v).unwrap();
        assert_eq!(prod, snf.s);
        assert_eq!(snf.u.determinant().unwrap().abs(), 1);
        assert_eq!(snf.v.determinant().unwrap().abs(), 1);
        for i in 0..snf.s.nrows() {
            for j in 0..snf.s.ncols() {
                if i != j {
                    assert_eq!(snf.s[(i, j)], 0);
                }
            }
        }
        let d = snf.diagonal();
        for w in d.windows(2) {
            assert!(w[0] >= 0);
            if w[0] == 0 {
                assert_eq!(w[1], 0);
            } else {
                assert_eq!(w[1] % w[0], 0);
            }
        }
        snf
    }

    #[test]
    fn snf_examples() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]], 2).unwrap();
        assert_eq!(check_snf(&m).diagonal(), vec![1, 6]);
        assert_eq!(check_snf(&IntMatrix::identity(3)).diagonal(), vec![1, 1, 1]);
        let m = IntMatrix::from_rows(&[vec![3]], 1).unwrap();
        assert_eq!(check_snf(&m).diagonal(), vec![3]);
        let m = IntMatrix::from_rows(&[vec![12, 0], vec![0, 6]], 2).unwrap();
        assert_eq!(check_snf(&m).diagonal(), vec![6, 12]);
    }

    #[test]
    fn snf_overflow_is_an_error() {
        let m = IntMatrix::from_rows(&[vec![i64::MAX, i64::MAX - 1], vec![i64::MAX - 2, 3]], 2).unwrap();
        assert_eq!(smith_normal_form(&m).unwrap_err(), LatticeError::Overflow);
    }

    #[test]
    fn saturation_examples() {
        assert!(lattice_saturates(&[vec![1, 0], vec![0, 1]], 2).unwrap());
        // xy, x^2y, xz, z^2
        let v = vec![vec![1, 1, 0], vec![2, 1, 0], vec![1, 0, 1], vec![0, 0, 2]];
        assert!(lattice_saturates(&v, 3).unwrap());
        let v = vec![vec![-1, 1, 0], vec![-1, 0, 1], vec![0, 1, -1]];
        assert!(!lattice_saturates(&v, 3).unwrap());
        assert!(!lattice_saturates(&[], 1).unwrap());
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hnf_basis(&[vec![2, 1], vec![0, 3]], 2).unwrap();
        let b = hnf_basis(&[vec![2, 4], vec![2, 1], vec![-4, 1]], 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, vec![vec![2, 1], vec![0, 3]]);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = IntMatrix::from_rows(&[vec![1, 1, 0], vec![2, 1, 0], vec![0, 3, 0], vec![1, 0, 1], vec![0, 0, 2]], 3).unwrap();
        let k = left_kernel(&m).unwrap();
        assert_eq!(k.len(), 2);
        for c in &k {
            for j in 0..3 {
                let s: i64 = (0..5).map(|i| c[i] * m[(i, j)]).sum();
                assert_eq!(s, 0);
            }
        }
    }

    fn xy() -> VarContext {
        VarContext::new(&["x", "y"]).unwrap()
    }

    #[test]
    fn periodic_quotients() {
        let g = quotient(&GroupPresentation::periodic(&xy(), &[3, 3]).unwrap()).unwrap();
        assert_eq!(g.order(), 9);
        assert_eq!(g.invariant_factors(), &[3, 3]);
        let g = quotient(&GroupPresentation::periodic(&xy(), &[12, 6]).unwrap()).unwrap();
        assert_eq!(g.order(), 72);
        assert_eq!(g.invariant_factors(), &[6, 12]);
    }

    /// Brute-force coset count of Z^2 / L: walk a box large enough to
    /// contain a fundamental domain, reduce each point by membership tests.
    fn brute_force_order(relations: &[Vec<i64>]) -> usize {
        let basis = hnf_basis(relations, 2).unwrap();
        let in_lattice = |p: [i64; 2]| {
            // HNF basis is upper triangular with 2 rows for full rank.
            let (a, b, c) = (basis[0][0], basis[0][1], basis[1][1]);
            if p[0] % a != 0 {
                return false;
            }
            let k = p[0] / a;
            (p[1] - k * b) % c == 0
        };
        let mut reps: Vec<[i64; 2]> = Vec::new();
        for i in -12..12 {
            for j in -12..12 {
                let p = [i, j];
                if !reps.iter().any(|r| in_lattice([p[0] - r[0], p[1] - r[1]])) {
                    reps.push(p);
                }
            }
        }
        reps.len()
    }

    #[test]
    fn twisted_torus_is_cyclic_of_order_nine() {
        let x3 = Monomial::new(vec![3, 0]);
        let y = Monomial::new(vec![0, 1]);
        let pres = GroupPresentation::new(&xy(), vec![vec![0, 3]])
            .unwrap()
            .with_identity(&x3, &y)
            .unwrap();
        assert_eq!(pres.relations()[1], vec![3, -1]);
        let g = quotient(&pres).unwrap();
        assert_eq!(g.order(), 9);
        assert_eq!(brute_force_order(pres.relations()), 9);
        assert_eq!(g.invariant_factors(), &[9]);
        // x applied three times lands on y
        let x = g.reduce_monomial(&Monomial::new(vec![1, 0])).unwrap();
        let x3 = g.add(g.add(x, x), x);
        assert_eq!(x3, g.reduce_monomial(&y).unwrap());
    }

    #[test]
    fn infinite_quotient_is_distinct() {
        let pres = GroupPresentation::new(&xy(), vec![vec![3, -1]]).unwrap();
        assert_eq!(quotient(&pres).unwrap_err(), LatticeError::InfiniteQuotient { free_rank: 1 });
        assert_eq!(pres.structure().unwrap().free_rank, 1);
    }

    #[test]
    fn reduce_identity_and_lagrange() {
        let pres = GroupPresentation::new(&xy(), vec![vec![4, 2], vec![-2, 6]]).unwrap();
        let g = quotient(&pres).unwrap();
        assert_eq!(g.reduce_monomial(&Monomial::one(2)).unwrap(), g.identity());
        let m = g.reduce_monomial(&Monomial::new(vec![1, -1])).unwrap();
        let mut acc = g.identity();
        for _ in 0..g.order() {
            acc = g.add(acc, m);
        }
        assert_eq!(acc, g.identity());
    }

    fn small_matrix() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
        (1usize..=4).prop_flat_map(|d| (Just(d), prop::collection::vec(prop::collection::vec(-4i64..=4, d), 1..=5)))
    }

    proptest! {
        #[test]
        fn snf_reconstructs((d, rows) in small_matrix()) {
            let m = IntMatrix::from_rows(&rows, d).unwrap();
            check_snf(&m);
        }

        #[test]
        fn quotient_order_is_determinant((d, rows) in (1usize..=4).prop_flat_map(|d| (Just(d), prop::collection::vec(prop::collection::vec(-4i64..=4, d), d)))) {
            let m = IntMatrix::from_rows(&rows, d).unwrap();
            let det = m.determinant().unwrap();
            prop_assume!(det != 0);
            let ctx = VarContext::new(&["a", "b", "c", "e"][..d]).unwrap();
            let g = quotient(&GroupPresentation::new(&ctx, rows).unwrap()).unwrap();
            prop_assert_eq!(g.order() as i64, det.abs());
        }

        #[test]
        fn reduction_is_a_surjective_homomorphism(
            (d, rows) in (1usize..=3).prop_flat_map(|d| (Just(d), prop::collection::vec(prop::collection::vec(-4i64..=4, d), d))),
            a in prop::collection::vec(-20i64..=20, 3),
            b in prop::collection::vec(-20i64..=20, 3),
        ) {
            let m = IntMatrix::from_rows(&rows, d).unwrap();
            prop_assume!(m.determinant().unwrap() != 0);
            let ctx = VarContext::new(&["a", "b", "c"][..d]).unwrap();
            let g = quotient(&GroupPresentation::new(&ctx, rows.clone()).unwrap()).unwrap();
            let (a, b) = (&a[..d], &b[..d]);
            let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            prop_assert_eq!(
                g.reduce_exponents(&sum).unwrap(),
                g.add(g.reduce_exponents(a).unwrap(), g.reduce_exponents(b).unwrap())
            );
            for r in &rows {
                prop_assert_eq!(g.reduce_exponents(r).unwrap(), g.identity());
            }
            // surjective: the images of the unit vectors generate everything
            let gens: Vec<usize> = (0..d).map(|i| {
                let mut e = vec![0; d];
                e[i] = 1;
                g.reduce_exponents(&e).unwrap()
            }).collect();
            let mut seen = vec![false; g.order()];
            seen[g.identity()] = true;
            let mut stack = vec![g.identity()];
            while let Some(h) = stack.pop() {
                for &s in &gens {
                    let n = g.add(h, s);
                    if !seen[n] { seen[n] = true; stack.push(n); }
                }
            }
            prop_assert!(seen.iter().all(|&s| s));
        }
    }
}
