//! Two-block (A2BGA) and hypergraph-product codes as symbolic objects.
//!
//! A two-block code over a variable context is a pair of Laurent polynomials
//! `(f, g)`. Its X checks are the translates of `(f | g)` and its Z checks the
//! translates of `(antipode(g) | antipode(f))`, acting on left and right
//! qubits respectively.

mod bounds;
mod lift;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{self, GroupPresentation, LatticeError, LatticeQuotient};
use crate::poly::{LaurentPoly, PolyError, VarContext};

pub use bounds::{bound_report, BoundReport, ExactRoot};
pub use lift::{
    compactify, lift_to_parent, resolve_assignments, twists_generate_kernel, Assignment, LiftStrategy, ParentLift,
    TwistExpression,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("codes: polynomials live in different contexts")]
    ContextMismatch,
    #[error("codes: variable `{0}` used by both generators of a hypergraph product")]
    VariableCollision(String),
    #[error("codes: generator polynomial is zero")]
    ZeroGenerator,
    #[error("codes: code is decomposable (monomial group has index {index} in the full lattice)")]
    Decomposable { index: String },
    #[error("codes: {dim} variables but only {terms} non-constant terms")]
    TooFewTerms { dim: usize, terms: usize },
    #[error("codes: a generator has no non-constant terms")]
    Degenerate,
    #[error("codes: twist {0} is not satisfied by the substitution")]
    TwistViolated(String),
    #[error("codes: cannot determine an image for parent variable `{0}`")]
    UnresolvedVariable(String),
    #[error("codes: parent variable `{0}` assigned twice")]
    DuplicateAssignment(String),
    #[error("codes: `{0}` is not a parent variable")]
    UnknownVariable(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T> = std::result::Result<T, CodeError>;

/// A translation-invariant classical check, normalized to contain `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalGenerator {
    poly: LaurentPoly,
}

impl ClassicalGenerator {
    pub fn new(p: &LaurentPoly) -> Result<Self> {
        let (poly, _) = p.normalize_to_one().map_err(|_| CodeError::ZeroGenerator)?;
        Ok(ClassicalGenerator { poly })
    }

    pub fn poly(&self) -> &LaurentPoly {
        &self.poly
    }
}

/// Pair of generating polynomials over one shared context.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwoBlockCode {
    f: LaurentPoly,
    g: LaurentPoly,
}

/// One exponent vector per group element hit an odd number of times.
fn reduced_support(p: &LaurentPoly, group: &lattice::FiniteAbelianGroup) -> Result<Vec<Vec<i64>>> {
    let mut seen: std::collections::BTreeMap<usize, (usize, Vec<i64>)> = std::collections::BTreeMap::new();
    for m in p.monomials() {
        let e = seen.entry(group.reduce_monomial(m)?).or_insert((0, m.exponents().to_vec()));
        e.0 += 1;
    }
    Ok(seen.into_values().filter(|(c, _)| c % 2 == 1).map(|(_, v)| v).collect())
}

impl TwoBlockCode {
    pub fn new(f: LaurentPoly, g: LaurentPoly) -> Result<Self> {
        if f.context() != g.context() {
            return Err(CodeError::ContextMismatch);
        }
        Ok(TwoBlockCode { f, g })
    }

    pub fn parse(ctx: &VarContext, f: &str, g: &str) -> Result<Self> {
        Self::new(LaurentPoly::parse(ctx, f)?, LaurentPoly::parse(ctx, g)?)
    }

    pub fn context(&self) -> &VarContext {
        self.f.context()
    }

    pub fn f(&self) -> &LaurentPoly {
        &self.f
    }

    pub fn g(&self) -> &LaurentPoly {
        &self.g
    }

    /// Blocks of the X checks: `(f, g)`.
    pub fn x_blocks(&self) -> (&LaurentPoly, &LaurentPoly) {
        (&self.f, &self.g)
    }

    /// Blocks of the Z checks: `(antipode(g), antipode(f))`.
    pub fn z_blocks(&self) -> (LaurentPoly, LaurentPoly) {
        (self.g.antipode(), self.f.antipode())
    }

    /// Total check weight `w = |f| + |g|`.
    pub fn weight(&self) -> usize {
        self.f.weight() + self.g.weight()
    }

    pub fn variables_used(&self) -> std::collections::BTreeSet<usize> {
        let mut v = self.f.variables_used();
        v.extend(self.g.variables_used());
        v
    }

    /// Both generators shifted to contain the constant monomial.
    pub fn normalized(&self) -> Result<TwoBlockCode> {
        let (f, _) = self.f.normalize_to_one().map_err(|_| CodeError::ZeroGenerator)?;
        let (g, _) = self.g.normalize_to_one().map_err(|_| CodeError::ZeroGenerator)?;
        Ok(TwoBlockCode { f, g })
    }

    /// The mirrored code `(antipode(g), antipode(f))`, whose X checks are
    /// this code's Z checks.
    pub fn dual(&self) -> TwoBlockCode {
        TwoBlockCode {
            f: self.g.antipode(),
            g: self.f.antipode(),
        }
    }

    /// Equality up to independent monomial shifts of `f` and `g`.
    pub fn shift_equivalent(&self, other: &TwoBlockCode) -> bool {
        self.f.shift_equivalent(&other.f) && self.g.shift_equivalent(&other.g)
    }

    /// `f*g + g*f == 0` in the group algebra.
    pub fn css_commutes_symbolically(&self) -> bool {
        let (zl, zr) = self.z_blocks();
        // X.Z^T in polynomial form: f * antipode(antipode(g)) + g * antipode(antipode(f))
        let lhs = self.f.mul(&zl.antipode());
        let rhs = self.g.mul(&zr.antipode());
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => a.add(&b).map(|s| s.is_zero()).unwrap_or(false),
            _ => false,
        }
    }

    /// Exponent vectors of all non-constant monomials of `f` then `g`, each
    /// in canonical order. Callers wanting the monomial group of the code
    /// should normalize first.
    pub fn monomial_group_vectors(&self) -> Vec<Vec<i64>> {
        self.f
            .monomials()
            .chain(self.g.monomials())
            .filter(|m| !m.is_one())
            .map(|m| m.exponents().to_vec())
            .collect()
    }

    /// `Z^d / G` for the monomial group `G` of the normalized code.
    pub fn lattice_index(&self) -> Result<LatticeQuotient> {
        let n = self.normalized()?;
        Ok(lattice::lattice_quotient(&n.monomial_group_vectors(), self.context().dim())?)
    }

    /// The monomial group generates every lattice translation.
    pub fn is_indecomposable(&self) -> Result<bool> {
        Ok(self.lattice_index()?.is_trivial())
    }

    /// Indecomposability of the instance on the finite group given by `pres`.
    pub fn is_indecomposable_finite(&self, pres: &GroupPresentation) -> Result<bool> {
        if pres.context() != self.context() {
            return Err(CodeError::ContextMismatch);
        }
        let structure = pres.structure()?;
        if structure.free_rank > 0 {
            return Err(LatticeError::InfiniteQuotient {
                free_rank: structure.free_rank,
            }
            .into());
        }
        // Terms can cancel in pairs once reduced onto the finite group, so
        // only the surviving support links qubits.
        let group = lattice::quotient(pres)?;
        let mut vectors = Vec::new();
        for p in [&self.f, &self.g] {
            let survivors = reduced_support(p, &group)?;
            let Some((base, rest)) = survivors.split_first() else {
                return Ok(false);
            };
            vectors.extend(rest.iter().map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect()));
        }
        vectors.extend(pres.relations().iter().cloned());
        Ok(lattice::lattice_saturates(&vectors, self.context().dim())?)
    }

    pub fn family_tree(&self) -> FamilyTreeTag {
        FamilyTreeTag::from_weights(self.f.weight(), self.g.weight())
    }
}

impl fmt::Display for TwoBlockCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X({} | {})", self.f, self.g)
    }
}

/// A two-block code whose generators use disjoint variable sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HgpCode {
    code: TwoBlockCode,
}

impl HgpCode {
    pub fn from_two_block(code: TwoBlockCode) -> Result<Self> {
        let fv = code.f.variables_used();
        if let Some(&shared) = code.g.variables_used().intersection(&fv).next() {
            return Err(CodeError::VariableCollision(code.context().names()[shared].clone()));
        }
        Ok(HgpCode { code })
    }

    /// The parent of a weight `(k1 + 1, k2 + 1)` family:
    /// `1 + a1 + ... + a_k1` and `1 + b1 + ... + b_k2`.
    pub fn standard_parent(left: &[&str], right: &[&str]) -> Result<Self> {
        let names: Vec<&str> = left.iter().chain(right).copied().collect();
        let ctx = VarContext::new(&names)?;
        let f = format!("1 + {}", left.join(" + "));
        let g = format!("1 + {}", right.join(" + "));
        let f = if left.is_empty() { "1".to_string() } else { f };
        let g = if right.is_empty() { "1".to_string() } else { g };
        Self::from_two_block(TwoBlockCode::parse(&ctx, &f, &g)?)
    }

    pub fn code(&self) -> &TwoBlockCode {
        &self.code
    }

    pub fn into_code(self) -> TwoBlockCode {
        self.code
    }
}

/// Hypergraph product of two classical generators over disjoint contexts.
pub fn hgp(f: &ClassicalGenerator, g: &ClassicalGenerator) -> Result<HgpCode> {
    let ctx = f.poly.context().join(g.poly.context()).map_err(|e| match e {
        PolyError::InvalidContext(_) => {
            let shared = f
                .poly
                .context()
                .names()
                .iter()
                .find(|n| g.poly.context().index_of(n).is_some())
                .cloned()
                .unwrap_or_default();
            CodeError::VariableCollision(shared)
        }
        other => other.into(),
    })?;
    let code = TwoBlockCode::new(f.poly.embed(&ctx)?, g.poly.embed(&ctx)?)?;
    HgpCode::from_two_block(code)
}

/// Unordered parity pair of the generator weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyTreeTag {
    #[serde(rename = "(even,even)")]
    EvenEven,
    #[serde(rename = "(odd,odd)")]
    OddOdd,
    #[serde(rename = "(odd,even)")]
    OddEven,
}

impl FamilyTreeTag {
    pub fn from_weights(a: usize, b: usize) -> Self {
        match (a % 2, b % 2) {
            (0, 0) => FamilyTreeTag::EvenEven,
            (1, 1) => FamilyTreeTag::OddOdd,
            _ => FamilyTreeTag::OddEven,
        }
    }

    /// Smallest parent of the tree, as weights of the two generators.
    pub fn smallest_parent_weights(self) -> (usize, usize) {
        match self {
            FamilyTreeTag::EvenEven => (2, 2),
            FamilyTreeTag::OddOdd => (3, 3),
            FamilyTreeTag::OddEven => (3, 2),
        }
    }
}

impl fmt::Display for FamilyTreeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyTreeTag::EvenEven => "(even,even)",
            FamilyTreeTag::OddOdd => "(odd,odd)",
            FamilyTreeTag::OddEven => "(odd,even)",
        })
    }
}
