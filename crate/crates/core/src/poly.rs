//! Laurent polynomials over F2 in a fixed set of named variables.
//!
//! A polynomial is a set of monomials; every coefficient is implicitly 1 and
//! repeated monomials cancel in pairs. Monomials are exponent vectors ordered
//! lexicographically by context variable order, which is the canonical order
//! used for normalization and hashing.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("poly: invalid variable context: {0}")]
    InvalidContext(String),
    #[error("poly: variable context mismatch ({left} vs {right})")]
    ContextMismatch { left: String, right: String },
    #[error("poly: exponent vector has length {got}, context has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("poly: no image given for variable `{0}`")]
    MissingImage(String),
    #[error("poly: image for `{0}` is not a single monomial")]
    NotAMonomial(String),
    #[error("poly: the zero polynomial has no normal form")]
    ZeroPolynomial,
    #[error("poly: exponent overflow")]
    Overflow,
    #[error("poly: parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, PolyError>;

/// Ordered list of distinct variable names.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct VarContext {
    names: Arc<[String]>,
}

impl VarContext {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.is_empty() {
            return Err(PolyError::InvalidContext("no variables".into()));
        }
        let mut seen = BTreeSet::new();
        for n in names {
            let n = n.as_ref();
            if !is_identifier(n) {
                return Err(PolyError::InvalidContext(format!("`{n}` is not a valid variable name")));
            }
            if !seen.insert(n) {
                return Err(PolyError::InvalidContext(format!("duplicate variable `{n}`")));
            }
        }
        Ok(VarContext {
            names: names.iter().map(|n| n.as_ref().to_string()).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Concatenation of two contexts; fails if a name is shared.
    pub fn join(&self, other: &VarContext) -> Result<VarContext> {
        let all: Vec<&str> = self.names.iter().chain(other.names.iter()).map(String::as_str).collect();
        VarContext::new(&all)
    }

    fn check_same(&self, other: &VarContext) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(PolyError::ContextMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for VarContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join(", "))
    }
}

impl fmt::Debug for VarContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VarContext({self})")
    }
}

impl TryFrom<Vec<String>> for VarContext {
    type Error = PolyError;
    fn try_from(v: Vec<String>) -> Result<Self> {
        VarContext::new(&v)
    }
}

impl From<VarContext> for Vec<String> {
    fn from(c: VarContext) -> Self {
        c.names.to_vec()
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Exponent vector of a Laurent monomial. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<i64>);

impl Monomial {
    pub fn new(exponents: Vec<i64>) -> Self {
        Monomial(exponents)
    }

    pub fn one(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    pub fn var(dim: usize, index: usize) -> Self {
        let mut e = vec![0; dim];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        if self.dim() != other.dim() {
            return Err(PolyError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(PolyError::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
    }

    pub fn inv(&self) -> Result<Monomial> {
        self.0
            .iter()
            .map(|e| e.checked_neg().ok_or(PolyError::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
    }

    pub fn pow(&self, k: i64) -> Result<Monomial> {
        self.0
            .iter()
            .map(|e| e.checked_mul(k).ok_or(PolyError::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
    }

    /// Renders the monomial with the given variable names, e.g. `x^2*y^-1`.
    pub fn render(&self, ctx: &VarContext) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(ctx.names())
            .filter(|(e, _)| **e != 0)
            .map(|(&e, n)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// A Laurent polynomial with F2 coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    ctx: VarContext,
    terms: BTreeSet<Monomial>,
}

impl LaurentPoly {
    pub fn zero(ctx: &VarContext) -> Self {
        LaurentPoly {
            ctx: ctx.clone(),
            terms: BTreeSet::new(),
        }
    }

    pub fn one(ctx: &VarContext) -> Self {
        Self::monomial(ctx, Monomial::one(ctx.dim())).expect("dimension matches")
    }

    pub fn monomial(ctx: &VarContext, m: Monomial) -> Result<Self> {
        Self::from_monomials(ctx, [m])
    }

    /// Builds a polynomial from monomials; repeated monomials cancel in pairs.
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(ctx: &VarContext, monomials: I) -> Result<Self> {
        let mut terms = BTreeSet::new();
        for m in monomials {
            if m.dim() != ctx.dim() {
                return Err(PolyError::DimensionMismatch {
                    expected: ctx.dim(),
                    got: m.dim(),
                });
            }
            toggle(&mut terms, m);
        }
        Ok(LaurentPoly { ctx: ctx.clone(), terms })
    }

    /// Parses the text syntax, e.g. `1 + x^-1*y + x^2*y`.
    pub fn parse(ctx: &VarContext, text: &str) -> Result<Self> {
        crate::syntax::parse_poly(ctx, text)
    }

    pub fn context(&self) -> &VarContext {
        &self.ctx
    }

    pub fn weight(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains_one(&self) -> bool {
        self.terms.contains(&Monomial::one(self.ctx.dim()))
    }

    /// Monomials in canonical (lexicographic) order.
    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    pub fn as_monomial(&self) -> Option<&Monomial> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Indices of the variables that occur with a nonzero exponent.
    pub fn variables_used(&self) -> BTreeSet<usize> {
        self.terms
            .iter()
            .flat_map(|m| m.exponents().iter().enumerate().filter(|(_, e)| **e != 0).map(|(i, _)| i))
            .collect()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.ctx.check_same(&other.ctx)?;
        let terms = self.terms.symmetric_difference(&other.terms).cloned().collect();
        Ok(LaurentPoly { ctx: self.ctx.clone(), terms })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.ctx.check_same(&other.ctx)?;
        let mut terms = BTreeSet::new();
        for a in &self.terms {
            for b in &other.terms {
                toggle(&mut terms, a.mul(b)?);
            }
        }
        Ok(LaurentPoly { ctx: self.ctx.clone(), terms })
    }

    pub fn pow(&self, k: u32) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::one(&self.ctx);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplies by a single monomial (a lattice translation).
    pub fn shift(&self, m: &Monomial) -> Result<LaurentPoly> {
        let terms = self.terms.iter().map(|t| t.mul(m)).collect::<Result<BTreeSet<_>>>()?;
        Ok(LaurentPoly { ctx: self.ctx.clone(), terms })
    }

    /// Inverts every monomial (the overline operation).
    pub fn antipode(&self) -> LaurentPoly {
        let terms = self
            .terms
            .iter()
            .map(|t| t.inv().expect("negating an exponent only overflows at i64::MIN"))
            .collect();
        LaurentPoly { ctx: self.ctx.clone(), terms }
    }

    /// Divides by the lexicographically smallest monomial so that the
    /// constant term appears. Returns the quotient and that monomial.
    pub fn normalize_to_one(&self) -> Result<(LaurentPoly, Monomial)> {
        let smallest = self.terms.iter().next().ok_or(PolyError::ZeroPolynomial)?.clone();
        let shifted = self.shift(&smallest.inv()?)?;
        Ok((shifted, smallest))
    }

    /// True if the two polynomials differ by a monomial factor.
    pub fn shift_equivalent(&self, other: &LaurentPoly) -> bool {
        match (self.normalize_to_one(), other.normalize_to_one()) {
            (Ok((a, _)), Ok((b, _))) => a == b,
            (Err(_), Err(_)) => self.ctx == other.ctx,
            _ => false,
        }
    }

    pub fn substitute(&self, map: &Substitution) -> Result<LaurentPoly> {
        self.ctx.check_same(&map.source)?;
        let mut terms = BTreeSet::new();
        for t in &self.terms {
            toggle(&mut terms, map.apply_monomial(t)?);
        }
        Ok(LaurentPoly {
            ctx: map.target.clone(),
            terms,
        })
    }

    /// Re-expresses the polynomial in a context that contains every variable
    /// of this one (by name), padding unused variables with zero exponents.
    pub fn embed(&self, target: &VarContext) -> Result<LaurentPoly> {
        let positions = self
            .ctx
            .names()
            .iter()
            .map(|n| target.index_of(n).ok_or_else(|| PolyError::MissingImage(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        let terms = self
            .terms
            .iter()
            .map(|m| {
                let mut e = vec![0; target.dim()];
                for (src, &dst) in positions.iter().enumerate() {
                    e[dst] = m.exponents()[src];
                }
                Monomial(e)
            })
            .collect();
        Ok(LaurentPoly {
            ctx: target.clone(),
            terms,
        })
    }

    /// Monomials ordered by total absolute degree, then reverse
    /// lexicographically (`1, x, y, z, x*y, x*z, ...`). This is the print
    /// order and the order in which fresh parent variables are assigned.
    pub fn graded_monomials(&self) -> Vec<&Monomial> {
        self.display_order()
    }

    fn display_order(&self) -> Vec<&Monomial> {
        let mut v: Vec<&Monomial> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            let da: i64 = a.exponents().iter().map(|e| e.abs()).sum();
            let db: i64 = b.exponents().iter().map(|e| e.abs()).sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        v
    }
}

fn toggle(terms: &mut BTreeSet<Monomial>, m: Monomial) {
    if !terms.remove(&m) {
        terms.insert(m);
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.display_order().into_iter().map(|m| m.render(&self.ctx)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly[{}]({self})", self.ctx)
    }
}

/// Ring homomorphism induced by sending each source variable to a monomial
/// in a target context.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Substitution {
    source: VarContext,
    target: VarContext,
    images: Vec<Monomial>,
}

impl Substitution {
    pub fn new(source: &VarContext, target: &VarContext, images: Vec<Monomial>) -> Result<Self> {
        if images.len() != source.dim() {
            let missing = source.names().get(images.len()).cloned().unwrap_or_default();
            return Err(PolyError::MissingImage(missing));
        }
        for m in &images {
            if m.dim() != target.dim() {
                return Err(PolyError::DimensionMismatch {
                    expected: target.dim(),
                    got: m.dim(),
                });
            }
        }
        Ok(Substitution {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    /// Builds a substitution from named single-monomial images. Every source
    /// variable needs an image and all images must share one context.
    pub fn from_images(source: &VarContext, images: &[(&str, &LaurentPoly)]) -> Result<Self> {
        let target = images
            .first()
            .map(|(_, p)| p.context().clone())
            .ok_or_else(|| PolyError::MissingImage(source.names()[0].clone()))?;
        let mut out: Vec<Option<Monomial>> = vec![None; source.dim()];
        for (name, p) in images {
            target.check_same(p.context())?;
            let i = source
                .index_of(name)
                .ok_or_else(|| PolyError::InvalidContext(format!("`{name}` is not a source variable")))?;
            let m = p.as_monomial().ok_or_else(|| PolyError::NotAMonomial(name.to_string()))?;
            out[i] = Some(m.clone());
        }
        let images = out
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| PolyError::MissingImage(source.names()[i].clone())))
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(source, &target, images)
    }

    pub fn identity(ctx: &VarContext) -> Self {
        let images = (0..ctx.dim()).map(|i| Monomial::var(ctx.dim(), i)).collect();
        Substitution {
            source: ctx.clone(),
            target: ctx.clone(),
            images,
        }
    }

    pub fn source(&self) -> &VarContext {
        &self.source
    }

    pub fn target(&self) -> &VarContext {
        &self.target
    }

    pub fn images(&self) -> &[Monomial] {
        &self.images
    }

    pub fn image(&self, var: usize) -> &Monomial {
        &self.images[var]
    }

    pub fn apply_monomial(&self, m: &Monomial) -> Result<Monomial> {
        if m.dim() != self.source.dim() {
            return Err(PolyError::DimensionMismatch {
                expected: self.source.dim(),
                got: m.dim(),
            });
        }
        let mut acc = Monomial::one(self.target.dim());
        for (e, img) in m.exponents().iter().zip(&self.images) {
            if *e != 0 {
                acc = acc.mul(&img.pow(*e)?)?;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> VarContext {
        VarContext::new(&["x", "y", "z"]).unwrap()
    }

    fn p(ctx: &VarContext, s: &str) -> LaurentPoly {
        LaurentPoly::parse(ctx, s).unwrap()
    }

    #[test]
    fn context_rules() {
        assert!(VarContext::new::<&str>(&[]).is_err());
        assert!(VarContext::new(&["x", "x"]).is_err());
        assert!(VarContext::new(&["x", ""]).is_err());
        assert_eq!(VarContext::new(&["a1", "a2"]).unwrap().dim(), 2);
    }

    #[test]
    fn addition_cancels() {
        let c = xyz();
        assert_eq!(p(&c, "1 + x").add(&p(&c, "x + y")).unwrap(), p(&c, "1 + y"));
        let q = p(&c, "1 + x + y");
        assert!(q.add(&q).unwrap().is_zero());
        assert_eq!(q.add(&LaurentPoly::zero(&c)).unwrap(), q);
    }

    #[test]
    fn multiplication() {
        let c = xyz();
        assert_eq!(p(&c, "x").mul(&p(&c, "y")).unwrap(), p(&c, "x*y"));
        assert_eq!(p(&c, "1 + x").mul(&p(&c, "1 + x")).unwrap(), p(&c, "1 + x^2"));
        assert_eq!(p(&c, "1 + x").mul(&p(&c, "1 + y")).unwrap(), p(&c, "1 + x + y + x*y"));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let c = xyz();
        let d = VarContext::new(&["x", "y"]).unwrap();
        assert!(matches!(
            p(&c, "x").add(&p(&d, "x")),
            Err(PolyError::ContextMismatch { .. })
        ));
        assert!(p(&c, "x").mul(&p(&d, "x")).is_err());
    }

    #[test]
    fn antipode_examples() {
        let c = xyz();
        assert_eq!(
            p(&c, "1 + x*y + x*z + y*z").antipode(),
            p(&c, "1 + x^-1*y^-1 + x^-1*z^-1 + y^-1*z^-1")
        );
        assert!(LaurentPoly::zero(&c).antipode().is_zero());
    }

    #[test]
    fn substitution_examples() {
        let a = VarContext::new(&["a1", "a2", "a3"]).unwrap();
        let b = VarContext::new(&["b1", "b2"]).unwrap();
        let c = xyz();
        let xy = p(&c, "x*y");
        let x2y = p(&c, "x^2*y");
        let y3 = p(&c, "y^3");
        let s = Substitution::from_images(&a, &[("a1", &xy), ("a2", &x2y), ("a3", &y3)]).unwrap();
        assert_eq!(
            p(&a, "1 + a1 + a2 + a3").substitute(&s).unwrap(),
            p(&c, "1 + x*y + x^2*y + y^3")
        );
        let xz = p(&c, "x*z");
        let z2 = p(&c, "z^2");
        let s = Substitution::from_images(&b, &[("b1", &xz), ("b2", &z2)]).unwrap();
        assert_eq!(p(&b, "1 + b1 + b2").substitute(&s).unwrap(), p(&c, "1 + x*z + z^2"));

        let q = p(&c, "1 + x^-2*y + z^3 + x*y*z");
        assert_eq!(q.substitute(&Substitution::identity(&c)).unwrap(), q);
    }

    #[test]
    fn substitution_errors() {
        let a = VarContext::new(&["a1", "a2"]).unwrap();
        let c = xyz();
        let d = VarContext::new(&["u"]).unwrap();
        let x = p(&c, "x");
        let u = p(&d, "u");
        assert!(matches!(
            Substitution::from_images(&a, &[("a1", &x)]),
            Err(PolyError::MissingImage(n)) if n == "a2"
        ));
        assert!(matches!(
            Substitution::from_images(&a, &[("a1", &x), ("a2", &u)]),
            Err(PolyError::ContextMismatch { .. })
        ));
        let two = p(&c, "x + y");
        assert!(matches!(
            Substitution::from_images(&a, &[("a1", &x), ("a2", &two)]),
            Err(PolyError::NotAMonomial(_))
        ));
    }

    #[test]
    fn normalize_examples() {
        let c = VarContext::new(&["x", "y"]).unwrap();
        let (q, m) = p(&c, "x + x*y").normalize_to_one().unwrap();
        assert_eq!(q, p(&c, "1 + y"));
        assert_eq!(m, Monomial::new(vec![1, 0]));
        let (q, m) = p(&c, "1 + x + y").normalize_to_one().unwrap();
        assert_eq!(q, p(&c, "1 + x + y"));
        assert!(m.is_one());
        assert_eq!(LaurentPoly::zero(&c).normalize_to_one(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn normalize_picks_smallest_divisor() {
        // Oracle: try every monomial of p as divisor, keep those whose quotient
        // has a constant term, take the lexicographically smallest divisor.
        let c = VarContext::new(&["x"]).unwrap();
        let q = p(&c, "x^-1 + 1");
        let best = q
            .monomials()
            .filter(|m| q.shift(&m.inv().unwrap()).unwrap().contains_one())
            .min()
            .unwrap()
            .clone();
        let (norm, m) = q.normalize_to_one().unwrap();
        assert_eq!(m, best);
        assert_eq!(m, Monomial::new(vec![-1]));
        assert_eq!(norm, p(&c, "1 + x"));
    }

    #[test]
    fn overflow_is_reported() {
        let c = VarContext::new(&["x"]).unwrap();
        let big = LaurentPoly::monomial(&c, Monomial::new(vec![i64::MAX])).unwrap();
        assert_eq!(big.mul(&p(&c, "x")), Err(PolyError::Overflow));
    }

    #[test]
    fn display_is_stable() {
        let c = xyz();
        assert_eq!(p(&c, "y*z + 1 + z + x*y").to_string(), "1 + z + x*y + y*z");
        assert_eq!(p(&c, "x^-1 + x^2*y").to_string(), "x^-1 + x^2*y");
        assert_eq!(LaurentPoly::zero(&c).to_string(), "0");
    }
}
