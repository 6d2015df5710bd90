//! Lifting a two-block code to a hypergraph-product parent over fresh
//! variables, and the inverse direction (compactification).

use serde::{Deserialize, Serialize};

use super::{CodeError, HgpCode, Result, TwoBlockCode};
use crate::lattice::{self, IntMatrix};
use crate::poly::{Monomial, Substitution, VarContext};
use crate::syntax;

/// How the child variables were expressed through parent variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftStrategy {
    /// Degree-one elimination plus pairwise term differences.
    Reduction,
    /// First unimodular choice of `d` parent variables.
    UnimodularSubset,
    /// Hermite transform of all parent monomials.
    Hermite,
}

/// A dependent parent variable written through the independent ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistExpression {
    pub variable: String,
    /// Relation vector over the parent context (`prod a_i^{v_i} = 1`).
    pub relation: Vec<i64>,
    /// E.g. `a3 = (a1^2*a2^-1)^3`.
    pub rendered: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentLift {
    pub parent: HgpCode,
    /// The child with both generators normalized to contain `1`.
    pub child: TwoBlockCode,
    pub substitution: Substitution,
    /// For each child variable, a parent exponent vector mapping onto it.
    pub witnesses: Vec<Vec<i64>>,
    /// Parent variables used by the witnesses, in context order.
    pub independent: Vec<usize>,
    /// Hermite basis of all relations among the parent variables.
    pub twists: Vec<Vec<i64>>,
    pub expressions: Vec<TwistExpression>,
    pub strategy: LiftStrategy,
}

impl ParentLift {
    pub fn parent_context(&self) -> &VarContext {
        self.parent.code().context()
    }

    /// `a_i = m_i` lines for the independent parent variables.
    pub fn substitution_lines(&self) -> Vec<String> {
        let ctx = self.parent_context();
        self.independent
            .iter()
            .map(|&i| format!("{} = {}", ctx.names()[i], self.substitution.image(i).render(self.child.context())))
            .collect()
    }

    /// `x = ...` lines giving each child variable through parent variables.
    pub fn witness_lines(&self) -> Vec<String> {
        let ctx = self.parent_context();
        self.child
            .context()
            .names()
            .iter()
            .zip(&self.witnesses)
            .map(|(n, w)| format!("{n} = {}", Monomial::new(w.clone()).render(ctx)))
            .collect()
    }

    pub fn twist_lines(&self) -> Vec<String> {
        self.expressions.iter().map(|e| e.rendered.clone()).collect()
    }

    /// Compactifies the parent with the stored data and compares with the child.
    pub fn verify(&self) -> Result<bool> {
        let c = compactify(&self.parent, &self.substitution, &self.twists)?;
        Ok(c == self.child)
    }
}

fn unit(k: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; k];
    v[i] = 1;
    v
}

fn axpy(y: &mut [i64], a: i64, x: &[i64]) -> Result<()> {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = a
            .checked_mul(*xi)
            .and_then(|t| yi.checked_add(t))
            .ok_or(lattice::LatticeError::Overflow)?;
    }
    Ok(())
}

/// `Some((u, sign))` if `v = sign * e_u`.
fn as_signed_unit(v: &[i64]) -> Option<(usize, i64)> {
    let mut hit = None;
    for (i, &x) in v.iter().enumerate() {
        if x == 0 {
            continue;
        }
        if hit.is_some() || x.abs() != 1 {
            return None;
        }
        hit = Some((i, x));
    }
    hit
}

/// Eliminated variable, its sign, and the weighted terms that produced it.
type Combination = (usize, i64, Vec<(usize, i64)>);

/// Witnesses from repeatedly eliminating child variables: first terms that
/// reduce to a single variable, then combinations `p*r_s - q*r_t` with small
/// powers. `None` if the procedure gets stuck.
fn reduction_witnesses(m: &[Vec<i64>], d: usize) -> Result<Option<Vec<Vec<i64>>>> {
    let k = m.len();
    let mut reduced = m.to_vec();
    let mut repr: Vec<Vec<i64>> = (0..k).map(|s| unit(k, s)).collect();
    let mut witnesses: Vec<Option<Vec<i64>>> = vec![None; d];
    let mut powers: Vec<(i64, i64)> = (1..=3).flat_map(|p| (1..=3).map(move |q| (p, q))).collect();
    powers.sort_by_key(|&(p, q)| (p + q, p));

    while witnesses.iter().any(Option::is_none) {
        let mut found: Option<Combination> = None;
        for (s, r) in reduced.iter().enumerate() {
            if let Some((u, sign)) = as_signed_unit(r) {
                found = Some((u, sign, vec![(s, 1)]));
                break;
            }
        }
        if found.is_none() {
            'search: for &(p, q) in &powers {
                for s in 0..k {
                    if reduced[s].iter().all(|&x| x == 0) {
                        continue;
                    }
                    for t in 0..k {
                        if s == t || reduced[t].iter().all(|&x| x == 0) {
                            continue;
                        }
                        let mut v = vec![0i64; d];
                        axpy(&mut v, p, &reduced[s])?;
                        axpy(&mut v, -q, &reduced[t])?;
                        if let Some((u, sign)) = as_signed_unit(&v) {
                            found = Some((u, sign, vec![(s, p), (t, -q)]));
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((u, sign, combo)) = found else {
            return Ok(None);
        };
        let mut w = vec![0i64; k];
        for (s, c) in combo {
            axpy(&mut w, sign * c, &repr[s])?;
        }
        for s in 0..k {
            let e = reduced[s][u];
            if e != 0 {
                reduced[s][u] = 0;
                axpy(&mut repr[s], -e, &w)?;
            }
        }
        witnesses[u] = Some(w);
    }
    Ok(Some(witnesses.into_iter().map(Option::unwrap).collect()))
}

/// Witnesses supported on `rows` via the Hermite transform, if those rows
/// span the full lattice.
fn hermite_witnesses(m: &[Vec<i64>], rows: &[usize], d: usize) -> Result<Option<Vec<Vec<i64>>>> {
    let sub: Vec<Vec<i64>> = rows.iter().map(|&r| m[r].clone()).collect();
    let (h, u, rank) = lattice::hermite_with_transform(&IntMatrix::from_rows(&sub, d)?)?;
    if rank != d {
        return Ok(None);
    }
    for i in 0..d {
        for j in 0..d {
            if h[(i, j)] != i64::from(i == j) {
                return Ok(None);
            }
        }
    }
    let k = m.len();
    Ok(Some(
        (0..d)
            .map(|i| {
                let mut w = vec![0i64; k];
                for (c, &r) in rows.iter().enumerate() {
                    w[r] = u[(i, c)];
                }
                w
            })
            .collect(),
    ))
}

const MAX_SUBSETS: usize = 200_000;

fn unimodular_subset(m: &[Vec<i64>], d: usize) -> Result<Option<Vec<usize>>> {
    let k = m.len();
    if d > k {
        return Ok(None);
    }
    let mut idx: Vec<usize> = (0..d).collect();
    for _ in 0..MAX_SUBSETS {
        let sub: Vec<Vec<i64>> = idx.iter().map(|&r| m[r].clone()).collect();
        if IntMatrix::from_rows(&sub, d)?.determinant()?.abs() == 1 {
            return Ok(Some(idx));
        }
        // next combination in lexicographic order
        let Some(pos) = (0..d).rev().find(|&i| idx[i] < k - d + i) else {
            return Ok(None);
        };
        idx[pos] += 1;
        for i in pos + 1..d {
            idx[i] = idx[i - 1] + 1;
        }
    }
    Ok(None)
}

fn parent_names(k1: usize, k2: usize) -> (Vec<String>, Vec<String>) {
    (
        (1..=k1).map(|i| format!("a{i}")).collect(),
        (1..=k2).map(|i| format!("b{i}")).collect(),
    )
}

fn render_factor(w: &[i64], e: i64, ctx: &VarContext, several: bool) -> String {
    let body = Monomial::new(w.to_vec()).render(ctx);
    let plain_var = as_signed_unit(w) == Some((w.iter().position(|&x| x != 0).unwrap_or(0), 1));
    let compound = w.iter().filter(|&&x| x != 0).count() > 1 || !plain_var;
    match (e, compound) {
        (1, true) if several => format!("({body})"),
        (1, _) => body,
        (_, false) => format!("{body}^{e}"),
        (_, true) => format!("({body})^{e}"),
    }
}

/// Lifts an indecomposable two-block code to the HGP parent
/// `(1 + a1 + ... + a_k1, 1 + b1 + ... + b_k2)`.
///
/// Parent variables are assigned to the non-constant monomials of the
/// normalized generators in print order. The returned twists generate every
/// relation among the parent variables under that assignment.
pub fn lift_to_parent(c: &TwoBlockCode) -> Result<ParentLift> {
    let child = c.normalized()?;
    let d = child.context().dim();
    let fm: Vec<Monomial> = child.f().graded_monomials().into_iter().filter(|m| !m.is_one()).cloned().collect();
    let gm: Vec<Monomial> = child.g().graded_monomials().into_iter().filter(|m| !m.is_one()).cloned().collect();
    let (k1, k2) = (fm.len(), gm.len());
    if k1 == 0 || k2 == 0 {
        return Err(CodeError::Degenerate);
    }
    if d > k1 + k2 {
        return Err(CodeError::TooFewTerms { dim: d, terms: k1 + k2 });
    }
    let q = child.lattice_index()?;
    if !q.is_trivial() {
        let index = q.index().map_or_else(|| "infinite".to_string(), |i| i.to_string());
        return Err(CodeError::Decomposable { index });
    }

    let (an, bn) = parent_names(k1, k2);
    let parent = HgpCode::standard_parent(
        &an.iter().map(String::as_str).collect::<Vec<_>>(),
        &bn.iter().map(String::as_str).collect::<Vec<_>>(),
    )?;
    let pctx = parent.code().context().clone();
    let images: Vec<Monomial> = fm.iter().chain(&gm).cloned().collect();
    let substitution = Substitution::new(&pctx, child.context(), images.clone())?;
    let m: Vec<Vec<i64>> = images.iter().map(|x| x.exponents().to_vec()).collect();
    let k = m.len();

    let (witnesses, strategy) = if let Some(w) = reduction_witnesses(&m, d)? {
        (w, LiftStrategy::Reduction)
    } else if let Some(w) = match unimodular_subset(&m, d)? {
        Some(rows) => hermite_witnesses(&m, &rows, d)?,
        None => None,
    } {
        (w, LiftStrategy::UnimodularSubset)
    } else {
        let all: Vec<usize> = (0..k).collect();
        let w = hermite_witnesses(&m, &all, d)?.ok_or_else(|| CodeError::Decomposable {
            index: "unknown".into(),
        })?;
        (w, LiftStrategy::Hermite)
    };

    let independent: Vec<usize> = (0..k).filter(|&j| witnesses.iter().any(|w| w[j] != 0)).collect();
    let mut expressions = Vec::new();
    for j in (0..k).filter(|j| !independent.contains(j)) {
        let mut relation = unit(k, j);
        let factors: Vec<(usize, i64)> = (0..d).filter(|&u| m[j][u] != 0).map(|u| (u, m[j][u])).collect();
        for &(u, e) in &factors {
            axpy(&mut relation, -e, &witnesses[u])?;
        }
        let several = factors.len() > 1;
        let rhs: Vec<String> = factors
            .iter()
            .map(|&(u, e)| render_factor(&witnesses[u], e, &pctx, several))
            .collect();
        expressions.push(TwistExpression {
            variable: pctx.names()[j].clone(),
            relation,
            rendered: format!("{} = {}", pctx.names()[j], rhs.join("*")),
        });
    }

    let kernel = lattice::left_kernel(&IntMatrix::from_rows(&m, d)?)?;
    let twists = lattice::hnf_basis(&kernel, k)?;

    Ok(ParentLift {
        parent,
        child,
        substitution,
        witnesses,
        independent,
        twists,
        expressions,
        strategy,
    })
}

/// Applies `substitution` to the parent after checking that every twist
/// relation becomes trivial in the child context.
pub fn compactify(parent: &HgpCode, substitution: &Substitution, twists: &[Vec<i64>]) -> Result<TwoBlockCode> {
    let pctx = parent.code().context();
    if substitution.source() != pctx {
        return Err(CodeError::ContextMismatch);
    }
    for t in twists {
        let image = substitution.apply_monomial(&Monomial::new(t.clone()))?;
        if !image.is_one() {
            return Err(CodeError::TwistViolated(format!("{} = 1", Monomial::new(t.clone()).render(pctx))));
        }
    }
    TwoBlockCode::new(
        parent.code().f().substitute(substitution)?,
        parent.code().g().substitute(substitution)?,
    )
}

/// One `parent_var = expression` line, the expression being a monomial in
/// child and/or parent variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub variable: String,
    pub expression: String,
}

impl Assignment {
    pub fn new(variable: &str, expression: &str) -> Self {
        Assignment {
            variable: variable.to_string(),
            expression: expression.to_string(),
        }
    }
}

/// Resolves assignment lines into a substitution, following references to
/// other parent variables. Lines whose right side mentions only parent
/// variables are also returned as twist relations.
pub fn resolve_assignments(
    parent: &VarContext,
    child: &VarContext,
    assignments: &[Assignment],
) -> Result<(Substitution, Vec<Vec<i64>>)> {
    let k = parent.dim();
    if let Some(shared) = parent.names().iter().find(|n| child.index_of(n).is_some()) {
        return Err(CodeError::VariableCollision(shared.clone()));
    }
    let joint = parent.join(child)?;
    let mut exprs: Vec<Option<Monomial>> = vec![None; k];
    for a in assignments {
        let i = parent
            .index_of(&a.variable)
            .ok_or_else(|| CodeError::UnknownVariable(a.variable.clone()))?;
        if exprs[i].is_some() {
            return Err(CodeError::DuplicateAssignment(a.variable.clone()));
        }
        exprs[i] = Some(syntax::parse_monomial(&joint, &a.expression)?);
    }

    let mut twists = Vec::new();
    for (i, e) in exprs.iter().enumerate() {
        if let Some(e) = e {
            let ex = e.exponents();
            if ex[k..].iter().all(|&x| x == 0) {
                let mut t = unit(k, i);
                axpy(&mut t, -1, &ex[..k])?;
                twists.push(t);
            }
        }
    }

    let mut images: Vec<Option<Monomial>> = vec![None; k];
    loop {
        let mut progress = false;
        for i in 0..k {
            if images[i].is_some() {
                continue;
            }
            let Some(e) = &exprs[i] else { continue };
            let ex = e.exponents();
            if (0..k).any(|j| ex[j] != 0 && images[j].is_none()) {
                continue;
            }
            let mut acc = Monomial::new(ex[k..].to_vec());
            for j in (0..k).filter(|&j| ex[j] != 0) {
                acc = acc.mul(&images[j].as_ref().expect("resolved").pow(ex[j])?)?;
            }
            images[i] = Some(acc);
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, m)| m.ok_or_else(|| CodeError::UnresolvedVariable(parent.names()[i].clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok((Substitution::new(parent, child, images)?, twists))
}

/// True iff the twists span exactly the relations among the images of the
/// parent variables.
pub fn twists_generate_kernel(substitution: &Substitution, twists: &[Vec<i64>]) -> Result<bool> {
    let k = substitution.source().dim();
    let d = substitution.target().dim();
    let m: Vec<Vec<i64>> = substitution.images().iter().map(|x| x.exponents().to_vec()).collect();
    let kernel = lattice::left_kernel(&IntMatrix::from_rows(&m, d)?)?;
    Ok(lattice::hnf_basis(&kernel, k)? == lattice::hnf_basis(twists, k)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn child(vars: &[&str], f: &str, g: &str) -> TwoBlockCode {
        TwoBlockCode::parse(&VarContext::new(vars).unwrap(), f, g).unwrap()
    }

    fn example1() -> TwoBlockCode {
        child(&["x", "y", "z"], "1 + x*y + x^2*y + y^3", "1 + x*z + z^2")
    }

    #[test]
    fn example_one_lift() {
        let lift = lift_to_parent(&example1()).unwrap();
        assert_eq!(lift.strategy, LiftStrategy::Reduction);
        assert_eq!(lift.parent_context().names(), &["a1", "a2", "a3", "b1", "b2"]);
        assert_eq!(lift.substitution_lines(), vec!["a1 = x*y", "a2 = x^2*y", "b1 = x*z"]);
        assert_eq!(
            lift.witness_lines(),
            vec!["x = a1^-1*a2", "y = a1^2*a2^-1", "z = a1*a2^-1*b1"]
        );
        assert_eq!(lift.twist_lines(), vec!["a3 = (a1^2*a2^-1)^3", "b2 = (a1*a2^-1*b1)^2"]);
        let expected = lattice::hnf_basis(&[vec![-6, 3, 1, 0, 0], vec![-2, 2, 0, -2, 1]], 5).unwrap();
        assert_eq!(lift.twists, expected);
        assert!(lift.verify().unwrap());
        let back = compactify(&lift.parent, &lift.substitution, &lift.twists).unwrap();
        assert_eq!(back, example1());
    }

    #[test]
    fn haah_lift_uses_products() {
        let haah = child(&["x", "y", "z"], "1 + x + y + z", "1 + x*y + x*z + y*z");
        let lift = lift_to_parent(&haah).unwrap();
        assert_eq!(lift.substitution_lines(), vec!["a1 = x", "a2 = y", "a3 = z"]);
        assert_eq!(lift.twist_lines(), vec!["b1 = a1*a2", "b2 = a1*a3", "b3 = a2*a3"]);
        assert!(lift.verify().unwrap());
    }

    #[test]
    fn toric_code_is_its_own_parent() {
        let toric = child(&["x", "y"], "1 + x", "1 + y");
        let lift = lift_to_parent(&toric).unwrap();
        assert!(lift.twists.is_empty());
        assert!(lift.expressions.is_empty());
        assert_eq!(lift.parent.code().f().weight(), 2);
        assert!(lift.verify().unwrap());
    }

    #[test]
    fn lift_errors() {
        let dec = child(&["x", "y", "z"], "1 + x^-1*y + x^-1*z", "1 + z^-1*y");
        assert!(matches!(lift_to_parent(&dec), Err(CodeError::Decomposable { .. })));
        let few = child(&["x", "y", "z"], "1 + x", "1 + y");
        assert_eq!(
            lift_to_parent(&few).unwrap_err(),
            CodeError::TooFewTerms { dim: 3, terms: 2 }
        );
        let degenerate = child(&["x"], "1 + x", "1");
        assert_eq!(lift_to_parent(&degenerate).unwrap_err(), CodeError::Degenerate);
    }

    #[test]
    fn fallback_strategies_still_lift() {
        // 6*11 - 5*13 = 1 needs powers beyond the small-combination search
        let c = child(&["x"], "1 + x^11", "1 + x^13");
        let lift = lift_to_parent(&c).unwrap();
        assert_eq!(lift.strategy, LiftStrategy::Hermite);
        assert!(lift.verify().unwrap());
        assert_eq!(lift.twists.len(), 1);
    }

    #[test]
    fn compactify_identity_and_violation() {
        let p = HgpCode::standard_parent(&["a"], &["b"]).unwrap();
        let ctx = p.code().context().clone();
        let same = compactify(&p, &Substitution::identity(&ctx), &[]).unwrap();
        assert_eq!(&same, p.code());
        let err = compactify(&p, &Substitution::identity(&ctx), &[vec![1, -1]]).unwrap_err();
        assert_eq!(err, CodeError::TwistViolated("a*b^-1 = 1".into()));
    }

    #[test]
    fn assignments_resolve_through_parent_references() {
        let parent = HgpCode::standard_parent(&["a", "b", "c", "d", "e", "f", "g"], &["h", "i", "j", "k", "l"]).unwrap();
        let pctx = parent.code().context().clone();
        let cctx = VarContext::new(&["x", "y", "z"]).unwrap();
        let lines = [
            ("a", "z"),
            ("b", "y"),
            ("c", "b"),
            ("d", "b"),
            ("e", "b"),
            ("f", "b"),
            ("g", "b"),
            ("h", "x"),
            ("i", "h^-1"),
            ("j", "h*b"),
            ("k", "b"),
            ("l", "b"),
        ];
        let assigns: Vec<Assignment> = lines.iter().map(|(v, e)| Assignment::new(v, e)).collect();
        let (sub, twists) = resolve_assignments(&pctx, &cctx, &assigns).unwrap();
        assert_eq!(twists.len(), 9);
        assert!(twists_generate_kernel(&sub, &twists).unwrap());
        let c = compactify(&parent, &sub, &twists).unwrap();
        assert_eq!(c, TwoBlockCode::parse(&cctx, "1 + z", "1 + x + x^-1 + x*y").unwrap());
    }

    #[test]
    fn assignment_errors() {
        let pctx = VarContext::new(&["a", "b"]).unwrap();
        let cctx = VarContext::new(&["x"]).unwrap();
        let cyc = [Assignment::new("a", "b"), Assignment::new("b", "a")];
        assert_eq!(
            resolve_assignments(&pctx, &cctx, &cyc).unwrap_err(),
            CodeError::UnresolvedVariable("a".into())
        );
        let dup = [Assignment::new("a", "x"), Assignment::new("a", "x")];
        assert_eq!(
            resolve_assignments(&pctx, &cctx, &dup).unwrap_err(),
            CodeError::DuplicateAssignment("a".into())
        );
        let unknown = [Assignment::new("q", "x")];
        assert!(matches!(
            resolve_assignments(&pctx, &cctx, &unknown),
            Err(CodeError::UnknownVariable(_))
        ));
        let missing = [Assignment::new("a", "x")];
        assert_eq!(
            resolve_assignments(&pctx, &cctx, &missing).unwrap_err(),
            CodeError::UnresolvedVariable("b".into())
        );
    }
}
