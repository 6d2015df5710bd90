//! Line-oriented code description files.
//!
//! ```text
//! [code]
//! name = gross
//! vars = x, y
//! f = x^3 + y + y^2
//! g = y^3 + x + x^2
//!
//! [boundary]
//! periodic = 12, 6
//! x^3 = y
//!
//! [lift]
//! left = a, b
//! right = c, d
//! a = x
//! ```
//!
//! `g` may be omitted for a classical code. `[lift]` assignments send parent
//! variables to monomials in child and/or parent variables. An `[erratum]`
//! section carries a `note` and replacement assignments for `[lift]`.

use std::fmt;

use thiserror::Error;

use crate::codes::{self, Assignment, CodeError, HgpCode, TwoBlockCode};
use crate::lattice::{GroupPresentation, LatticeError};
use crate::poly::{self, LaurentPoly, Monomial, PolyError, Substitution, VarContext};
use crate::syntax;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecErrorKind {
    Syntax,
    UndeclaredVariable,
    NonMonomial,
    DuplicateSection,
    DuplicateKey,
    MissingKey,
    UnknownSection,
    InvalidValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("spec: line {line}, column {column}: {message}")]
pub struct SpecError {
    pub kind: SpecErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SpecError {
    fn new(kind: SpecErrorKind, line: usize, column: usize, message: impl Into<String>) -> Self {
        SpecError {
            kind,
            line,
            column,
            message: message.into(),
        }
    }

    /// Maps a polynomial error at `column` inside a value starting at
    /// `start` (1-based) on `line`.
    fn from_poly(e: PolyError, line: usize, start: usize) -> Self {
        match e {
            PolyError::Parse { column, message } => {
                let kind = if message.starts_with("undeclared variable") {
                    SpecErrorKind::UndeclaredVariable
                } else if message.contains("not a single monomial") {
                    SpecErrorKind::NonMonomial
                } else {
                    SpecErrorKind::Syntax
                };
                SpecError::new(kind, line, start + column - 1, message)
            }
            other => SpecError::new(SpecErrorKind::InvalidValue, line, start, other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, SpecError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Boundary {
    pub periodic: Option<Vec<i64>>,
    /// `lhs = rhs` monomial identities.
    pub identities: Vec<(Monomial, Monomial)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftSection {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub assignments: Vec<Assignment>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Erratum {
    pub note: Option<String>,
    pub assignments: Vec<Assignment>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub name: Option<String>,
    pub context: VarContext,
    pub f: LaurentPoly,
    pub g: Option<LaurentPoly>,
    pub boundary: Option<Boundary>,
    pub lift: Option<LiftSection>,
    pub erratum: Option<Erratum>,
}

struct Line<'a> {
    number: usize,
    key: &'a str,
    key_col: usize,
    value: &'a str,
    value_col: usize,
}

fn split_line(number: usize, raw: &str) -> Result<Line<'_>> {
    let Some(eq) = raw.find('=') else {
        let col = raw.len() - raw.trim_start().len() + 1;
        return Err(SpecError::new(SpecErrorKind::Syntax, number, col, "expected `key = value`"));
    };
    let (k, v) = (&raw[..eq], &raw[eq + 1..]);
    let key = k.trim();
    let key_col = k.len() - k.trim_start().len() + 1;
    let value = v.trim();
    let value_col = eq + 2 + (v.len() - v.trim_start().len());
    if key.is_empty() {
        return Err(SpecError::new(SpecErrorKind::Syntax, number, key_col, "missing key before `=`"));
    }
    Ok(Line {
        number,
        key,
        key_col,
        value,
        value_col,
    })
}

fn names_list(line: &Line) -> Result<Vec<String>> {
    let names: Vec<String> = line.value.split(',').map(|s| s.trim().to_string()).collect();
    for n in &names {
        if !poly::is_identifier(n) {
            return Err(SpecError::new(
                SpecErrorKind::InvalidValue,
                line.number,
                line.value_col,
                format!("`{n}` is not a valid variable name"),
            ));
        }
    }
    Ok(names)
}

fn context_of(line: &Line, names: &[String]) -> Result<VarContext> {
    VarContext::new(names).map_err(|e| SpecError::new(SpecErrorKind::InvalidValue, line.number, line.value_col, e.to_string()))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    Code,
    Boundary,
    Lift,
    Erratum,
}

impl Section {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "code" => Some(Section::Code),
            "boundary" => Some(Section::Boundary),
            "lift" => Some(Section::Lift),
            "erratum" => Some(Section::Erratum),
            _ => None,
        }
    }
}

pub fn parse_spec(text: &str) -> Result<SpecFile> {
    let mut lines: Vec<(Section, Line)> = Vec::new();
    let mut current: Option<Section> = None;
    let mut seen: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len() + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(SpecError::new(SpecErrorKind::Syntax, number, indent, "unterminated section header"));
            };
            let s = Section::parse(name.trim()).ok_or_else(|| {
                SpecError::new(
                    SpecErrorKind::UnknownSection,
                    number,
                    indent + 1,
                    format!("unknown section `{}`", name.trim()),
                )
            })?;
            if seen.contains(&s) {
                return Err(SpecError::new(
                    SpecErrorKind::DuplicateSection,
                    number,
                    indent,
                    format!("duplicate section `[{}]`", name.trim()),
                ));
            }
            seen.push(s);
            current = Some(s);
            continue;
        }
        let Some(s) = current else {
            return Err(SpecError::new(SpecErrorKind::Syntax, number, indent, "line outside of any section"));
        };
        lines.push((s, split_line(number, content)?));
    }

    let section = |s: Section| lines.iter().filter(move |(t, _)| *t == s).map(|(_, l)| l);
    let last_line = text.lines().count().max(1);

    // [code]
    if !seen.contains(&Section::Code) {
        return Err(SpecError::new(SpecErrorKind::MissingKey, last_line, 1, "missing `[code]` section"));
    }
    let mut name = None;
    let mut vars: Option<(&Line, VarContext)> = None;
    let mut f_line: Option<&Line> = None;
    let mut g_line: Option<&Line> = None;
    for l in section(Section::Code) {
        let dup = || SpecError::new(SpecErrorKind::DuplicateKey, l.number, l.key_col, format!("duplicate key `{}`", l.key));
        match l.key {
            "name" => {
                if name.replace(l.value.to_string()).is_some() {
                    return Err(dup());
                }
            }
            "vars" => {
                if vars.is_some() {
                    return Err(dup());
                }
                let ctx = context_of(l, &names_list(l)?)?;
                vars = Some((l, ctx));
            }
            "f" => {
                if f_line.replace(l).is_some() {
                    return Err(dup());
                }
            }
            "g" => {
                if g_line.replace(l).is_some() {
                    return Err(dup());
                }
            }
            other => {
                return Err(SpecError::new(
                    SpecErrorKind::InvalidValue,
                    l.number,
                    l.key_col,
                    format!("unknown key `{other}` in [code]"),
                ))
            }
        }
    }
    let missing = |k: &str| SpecError::new(SpecErrorKind::MissingKey, last_line, 1, format!("missing key `{k}` in [code]"));
    let (_, context) = vars.ok_or_else(|| missing("vars"))?;
    let f_line = f_line.ok_or_else(|| missing("f"))?;
    let poly_of = |l: &Line| LaurentPoly::parse(&context, l.value).map_err(|e| SpecError::from_poly(e, l.number, l.value_col));
    let f = poly_of(f_line)?;
    let g = g_line.map(poly_of).transpose()?;

    // [boundary]
    let boundary = if seen.contains(&Section::Boundary) {
        let mut periodic: Option<Vec<i64>> = None;
        let mut identities = Vec::new();
        for l in section(Section::Boundary) {
            if l.key == "periodic" {
                if periodic.is_some() {
                    return Err(SpecError::new(SpecErrorKind::DuplicateKey, l.number, l.key_col, "duplicate key `periodic`"));
                }
                let lengths = l
                    .value
                    .split(',')
                    .map(|s| s.trim().parse::<i64>().ok().filter(|&x| x > 0))
                    .collect::<Option<Vec<_>>>()
                    .filter(|v| v.len() == context.dim())
                    .ok_or_else(|| {
                        SpecError::new(
                            SpecErrorKind::InvalidValue,
                            l.number,
                            l.value_col,
                            format!("expected {} positive periods", context.dim()),
                        )
                    })?;
                periodic = Some(lengths);
            } else {
                let lhs = syntax::parse_monomial(&context, l.key).map_err(|e| SpecError::from_poly(e, l.number, l.key_col))?;
                let rhs =
                    syntax::parse_monomial(&context, l.value).map_err(|e| SpecError::from_poly(e, l.number, l.value_col))?;
                identities.push((lhs, rhs));
            }
        }
        Some(Boundary { periodic, identities })
    } else {
        None
    };

    // [lift]
    let lift = if seen.contains(&Section::Lift) {
        let mut left = None;
        let mut right = None;
        let mut pending = Vec::new();
        for l in section(Section::Lift) {
            match l.key {
                "left" if left.is_none() => left = Some(names_list(l)?),
                "right" if right.is_none() => right = Some(names_list(l)?),
                "left" | "right" => {
                    return Err(SpecError::new(SpecErrorKind::DuplicateKey, l.number, l.key_col, format!("duplicate key `{}`", l.key)))
                }
                _ => pending.push(l),
            }
        }
        let miss = |k: &str| SpecError::new(SpecErrorKind::MissingKey, last_line, 1, format!("missing key `{k}` in [lift]"));
        let left = left.ok_or_else(|| miss("left"))?;
        let right = right.ok_or_else(|| miss("right"))?;
        let assignments = check_assignments(&context, &left, &right, &pending, true)?;
        Some(LiftSection { left, right, assignments })
    } else {
        None
    };

    // [erratum]
    let erratum = if seen.contains(&Section::Erratum) {
        let Some(lift) = &lift else {
            let l = section(Section::Erratum).next();
            return Err(SpecError::new(
                SpecErrorKind::MissingKey,
                l.map_or(last_line, |l| l.number),
                1,
                "[erratum] requires a [lift] section",
            ));
        };
        let mut note = None;
        let mut pending = Vec::new();
        for l in section(Section::Erratum) {
            if l.key == "note" {
                if note.replace(l.value.to_string()).is_some() {
                    return Err(SpecError::new(SpecErrorKind::DuplicateKey, l.number, l.key_col, "duplicate key `note`"));
                }
            } else {
                pending.push(l);
            }
        }
        let assignments = check_assignments(&context, &lift.left, &lift.right, &pending, false)?;
        Some(Erratum { note, assignments })
    } else {
        None
    };

    Ok(SpecFile {
        name,
        context,
        f,
        g,
        boundary,
        lift,
        erratum,
    })
}

fn check_assignments(
    child: &VarContext,
    left: &[String],
    right: &[String],
    lines: &[&Line],
    unique: bool,
) -> Result<Vec<Assignment>> {
    let parent_names: Vec<&String> = left.iter().chain(right).collect();
    let first = lines.first().map_or(1, |l| l.number);
    let parent = VarContext::new(&parent_names)
        .map_err(|e| SpecError::new(SpecErrorKind::InvalidValue, first, 1, e.to_string()))?;
    let joint = parent
        .join(child)
        .map_err(|e| SpecError::new(SpecErrorKind::InvalidValue, first, 1, e.to_string()))?;
    let mut out: Vec<Assignment> = Vec::new();
    for l in lines {
        if parent.index_of(l.key).is_none() {
            let kind = if poly::is_identifier(l.key) {
                SpecErrorKind::UndeclaredVariable
            } else {
                SpecErrorKind::Syntax
            };
            return Err(SpecError::new(kind, l.number, l.key_col, format!("`{}` is not a parent variable", l.key)));
        }
        if unique && out.iter().any(|a| a.variable == l.key) {
            return Err(SpecError::new(
                SpecErrorKind::DuplicateKey,
                l.number,
                l.key_col,
                format!("`{}` assigned twice", l.key),
            ));
        }
        syntax::parse_monomial(&joint, l.value).map_err(|e| SpecError::from_poly(e, l.number, l.value_col))?;
        out.push(Assignment::new(l.key, l.value));
    }
    Ok(out)
}

/// Failure to turn a parsed file into codes or presentations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecUseError {
    #[error("spec: the file describes a classical code (no `g`)")]
    Classical,
    #[error("spec: no [boundary] section")]
    NoBoundary,
    #[error("spec: no [lift] section")]
    NoLift,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl SpecFile {
    pub fn code(&self) -> std::result::Result<TwoBlockCode, SpecUseError> {
        let g = self.g.clone().ok_or(SpecUseError::Classical)?;
        Ok(TwoBlockCode::new(self.f.clone(), g)?)
    }

    pub fn presentation(&self) -> std::result::Result<GroupPresentation, SpecUseError> {
        let b = self.boundary.as_ref().ok_or(SpecUseError::NoBoundary)?;
        let mut pres = match &b.periodic {
            Some(p) => GroupPresentation::periodic(&self.context, p)?,
            None => GroupPresentation::new(&self.context, vec![])?,
        };
        for (lhs, rhs) in &b.identities {
            pres = pres.with_identity(lhs, rhs)?;
        }
        Ok(pres)
    }

    /// The `[lift]` parent.
    pub fn parent(&self) -> std::result::Result<HgpCode, SpecUseError> {
        let lift = self.lift.as_ref().ok_or(SpecUseError::NoLift)?;
        let l: Vec<&str> = lift.left.iter().map(String::as_str).collect();
        let r: Vec<&str> = lift.right.iter().map(String::as_str).collect();
        Ok(HgpCode::standard_parent(&l, &r)?)
    }

    /// `[lift]` assignments, with `[erratum]` replacements applied when
    /// `corrected` is set.
    pub fn assignments(&self, corrected: bool) -> Vec<Assignment> {
        let Some(lift) = &self.lift else { return vec![] };
        let mut out = lift.assignments.clone();
        if corrected {
            if let Some(e) = &self.erratum {
                for fix in &e.assignments {
                    match out.iter_mut().find(|a| a.variable == fix.variable) {
                        Some(a) => *a = fix.clone(),
                        None => out.push(fix.clone()),
                    }
                }
            }
        }
        out
    }

    /// Substitution and explicit twists of the `[lift]` section.
    pub fn resolve_lift(&self, corrected: bool) -> std::result::Result<(HgpCode, Substitution, Vec<Vec<i64>>), SpecUseError> {
        let parent = self.parent()?;
        let (sub, twists) = codes::resolve_assignments(parent.code().context(), &self.context, &self.assignments(corrected))?;
        Ok((parent, sub, twists))
    }
}

fn join_names(v: &[String]) -> String {
    v.join(", ")
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[code]")?;
        if let Some(n) = &self.name {
            writeln!(f, "name = {n}")?;
        }
        writeln!(f, "vars = {}", join_names(self.context.names()))?;
        writeln!(f, "f = {}", self.f)?;
        if let Some(g) = &self.g {
            writeln!(f, "g = {g}")?;
        }
        if let Some(b) = &self.boundary {
            writeln!(f, "\n[boundary]")?;
            if let Some(p) = &b.periodic {
                let p: Vec<String> = p.iter().map(i64::to_string).collect();
                writeln!(f, "periodic = {}", p.join(", "))?;
            }
            for (l, r) in &b.identities {
                writeln!(f, "{} = {}", l.render(&self.context), r.render(&self.context))?;
            }
        }
        if let Some(l) = &self.lift {
            writeln!(f, "\n[lift]")?;
            writeln!(f, "left = {}", join_names(&l.left))?;
            writeln!(f, "right = {}", join_names(&l.right))?;
            for a in &l.assignments {
                writeln!(f, "{} = {}", a.variable, a.expression)?;
            }
        }
        if let Some(e) = &self.erratum {
            writeln!(f, "\n[erratum]")?;
            if let Some(n) = &e.note {
                writeln!(f, "note = {n}")?;
            }
            for a in &e.assignments {
                writeln!(f, "{} = {}", a.variable, a.expression)?;
            }
        }
        Ok(())
    }
}
