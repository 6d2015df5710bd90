//! Finite instances of two-block codes on a quotient lattice.
//!
//! Qubits are ordered left block first, each block in group-element order.
//! Check `h` of `H_X` touches left qubits `h*m` for `m` in `f` and right
//! qubits `h*m` for `m` in `g`; `H_Z` uses `antipode(g)` and `antipode(f)`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::TwoBlockCode;
use crate::gf2::{BinaryMatrix, BitVec};
use crate::lattice::{self, FiniteAbelianGroup, GroupPresentation, LatticeError};
use crate::poly::LaurentPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instantiate: code and boundary use different variable contexts")]
    ContextMismatch,
    #[error("instantiate: H_X * H_Z^T != 0")]
    CommutationFailure,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T> = std::result::Result<T, InstanceError>;

/// Which Pauli type an operator (or a check matrix) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    X,
    Z,
}

impl Sector {
    pub fn other(self) -> Sector {
        match self {
            Sector::X => Sector::Z,
            Sector::Z => Sector::X,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CodeInstance {
    code: TwoBlockCode,
    presentation: GroupPresentation,
    group: FiniteAbelianGroup,
    hx: BinaryMatrix,
    hz: BinaryMatrix,
}

fn fill_block(m: &mut BinaryMatrix, group: &FiniteAbelianGroup, p: &LaurentPoly, offset: usize) -> Result<()> {
    let shifts = group.reduce_poly(p)?;
    for h in 0..group.order() {
        for &s in &shifts {
            m.toggle(h, offset + group.add(h, s));
        }
    }
    Ok(())
}

/// Builds `H_X` and `H_Z` for `c` on `Z^d / <relations>`.
pub fn instantiate(c: &TwoBlockCode, pres: &GroupPresentation) -> Result<CodeInstance> {
    if c.context() != pres.context() {
        return Err(InstanceError::ContextMismatch);
    }
    let group = lattice::quotient(pres)?;
    let size = group.order();
    let mut hx = BinaryMatrix::zeros(size, 2 * size);
    let mut hz = BinaryMatrix::zeros(size, 2 * size);
    let (zl, zr) = c.z_blocks();
    fill_block(&mut hx, &group, c.f(), 0)?;
    fill_block(&mut hx, &group, c.g(), size)?;
    fill_block(&mut hz, &group, &zl, 0)?;
    fill_block(&mut hz, &group, &zr, size)?;
    let inst = CodeInstance {
        code: c.clone(),
        presentation: pres.clone(),
        group,
        hx,
        hz,
    };
    if !inst.commutes() {
        return Err(InstanceError::CommutationFailure);
    }
    Ok(inst)
}

/// Circulant parity-check matrix of a single classical generator: check
/// `h` acts on bits `h*m` for the monomials `m` of `p`.
pub fn classical_check_matrix(p: &LaurentPoly, pres: &GroupPresentation) -> Result<BinaryMatrix> {
    if p.context() != pres.context() {
        return Err(InstanceError::ContextMismatch);
    }
    let group = lattice::quotient(pres)?;
    let mut h = BinaryMatrix::zeros(group.order(), group.order());
    fill_block(&mut h, &group, p, 0)?;
    Ok(h)
}

/// `n`, `k` and optional distance bounds with the method that produced them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d_lower: Option<(usize, String)>,
    pub d_upper: Option<(usize, String)>,
}

impl CodeInstance {
    pub fn code(&self) -> &TwoBlockCode {
        &self.code
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn hx(&self) -> &BinaryMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &BinaryMatrix {
        &self.hz
    }

    /// Checks that detect errors of the given Pauli type.
    pub fn detecting(&self, sector: Sector) -> &BinaryMatrix {
        match sector {
            Sector::X => &self.hz,
            Sector::Z => &self.hx,
        }
    }

    /// Stabilizers of the given Pauli type.
    pub fn stabilizers(&self, sector: Sector) -> &BinaryMatrix {
        match sector {
            Sector::X => &self.hx,
            Sector::Z => &self.hz,
        }
    }

    pub fn n(&self) -> usize {
        self.hx.ncols()
    }

    pub fn k(&self) -> usize {
        self.n() - self.hx.rank() - self.hz.rank()
    }

    pub fn commutes(&self) -> bool {
        self.hx.mul_transpose(&self.hz).map(|m| m.is_zero()).unwrap_or(false)
    }

    /// Column of the qubit at group element `element` on the given side.
    pub fn qubit(&self, element: usize, right: bool) -> usize {
        element + if right { self.group.order() } else { 0 }
    }

    /// Image of a qubit vector under translation by a group element.
    pub fn translate(&self, v: &BitVec, element: usize) -> BitVec {
        let size = self.group.order();
        let mut out = BitVec::zeros(v.len());
        for q in v.ones() {
            let (side, h) = (q / size, q % size);
            out.set(side * size + self.group.add(h, element), true);
        }
        out
    }

    /// Connected components of the Tanner graph over qubits and both check
    /// types.
    pub fn tanner_components(&self) -> usize {
        let n = self.n();
        let rx = self.hx.nrows();
        let total = n + rx + self.hz.nrows();
        let mut uf = UnionFind::new(total);
        for (r, c) in self.hx.nonzeros() {
            uf.union(n + r, c);
        }
        for (r, c) in self.hz.nonzeros() {
            uf.union(n + rx + r, c);
        }
        uf.count()
    }
}

pub fn params(inst: &CodeInstance) -> CodeParams {
    CodeParams {
        n: inst.n(),
        k: inst.k(),
        d_lower: None,
        d_upper: None,
    }
}

struct UnionFind {
    parent: Vec<usize>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            components: n,
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
            self.components -= 1;
        }
    }

    fn count(&self) -> usize {
        self.components
    }
}

/// Sparse text formats for exporting check matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    /// Header `rows cols`, then 0-based `row col` pairs.
    Coo,
    /// Matrix Market coordinate pattern, 1-based.
    Mtx,
}

pub fn export_matrix(m: &BinaryMatrix, format: MatrixFormat) -> String {
    let mut out = String::new();
    match format {
        MatrixFormat::Coo => {
            let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
            for (r, c) in m.nonzeros() {
                let _ = writeln!(out, "{r} {c}");
            }
        }
        MatrixFormat::Mtx => {
            out.push_str("%%MatrixMarket matrix coordinate pattern general\n");
            let _ = writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.count_ones());
            for (r, c) in m.nonzeros() {
                let _ = writeln!(out, "{} {}", r + 1, c + 1);
            }
        }
    }
    out
}
