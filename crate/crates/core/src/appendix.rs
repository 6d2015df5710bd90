//! Replays the bundled compactification table: every row's parent is
//! substituted with the row's assignments and compared to the row's child.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codes::{self, FamilyTreeTag, TwoBlockCode};
use crate::fixtures;
use crate::poly::{LaurentPoly, Substitution};
use crate::specfile::SpecFile;

/// Outcome of one substitution attempt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub pass: bool,
    /// The compactified `(f, g)`, normalized, when the substitution resolved.
    pub produced: Option<(String, String)>,
    pub error: Option<String>,
    /// Two parent terms land on the same child monomial and cancel.
    pub requires_cancellation: bool,
    /// The explicit twists span every relation of the substitution.
    pub twists_generate_kernel: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendixRow {
    pub name: String,
    pub parent: String,
    pub child: String,
    pub parent_tree: FamilyTreeTag,
    pub child_tree: FamilyTreeTag,
    pub literal: Attempt,
    /// Present when the row carries an erratum.
    pub corrected: Option<Attempt>,
    pub erratum_note: Option<String>,
}

impl AppendixRow {
    pub fn passes_literally(&self) -> bool {
        self.literal.pass
    }

    /// Passes with the row's erratum applied, or literally when it has none.
    pub fn passes_corrected(&self) -> bool {
        self.corrected.as_ref().map_or(self.literal.pass, |a| a.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub rows: Vec<AppendixRow>,
    /// Every row reproduces its child from the printed data.
    pub all_pass_literal: bool,
    /// Every row reproduces its child once errata are applied.
    pub all_pass_corrected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AppendixError {
    #[error("appendix: fixture `{0}` is missing")]
    MissingFixture(String),
    #[error("appendix: fixture `{0}` has no [lift] data")]
    MissingLift(String),
    #[error("appendix: fixture `{name}` is unusable: {message}")]
    BadFixture { name: String, message: String },
}

fn render_pair(c: &TwoBlockCode) -> (String, String) {
    match c.normalized() {
        Ok(n) => (n.f().to_string(), n.g().to_string()),
        Err(_) => (c.f().to_string(), c.g().to_string()),
    }
}

fn cancels(p: &LaurentPoly, sub: &Substitution) -> bool {
    let mut seen = HashSet::new();
    p.monomials()
        .any(|m| sub.apply_monomial(m).map(|img| !seen.insert(img)).unwrap_or(false))
}

fn attempt(spec: &SpecFile, child: &TwoBlockCode, corrected: bool) -> Attempt {
    let resolved = spec.resolve_lift(corrected);
    let (parent, sub, twists) = match resolved {
        Ok(r) => r,
        Err(e) => {
            return Attempt {
                pass: false,
                produced: None,
                error: Some(e.to_string()),
                requires_cancellation: false,
                twists_generate_kernel: None,
            }
        }
    };
    let requires_cancellation = cancels(parent.code().f(), &sub) || cancels(parent.code().g(), &sub);
    let twists_generate_kernel = codes::twists_generate_kernel(&sub, &twists).ok();
    match codes::compactify(&parent, &sub, &twists) {
        Ok(got) => Attempt {
            pass: got.shift_equivalent(child),
            produced: Some(render_pair(&got)),
            error: None,
            requires_cancellation,
            twists_generate_kernel,
        },
        Err(e) => Attempt {
            pass: false,
            produced: None,
            error: Some(e.to_string()),
            requires_cancellation,
            twists_generate_kernel,
        },
    }
}

pub fn reproduce_row(name: &str) -> Result<AppendixRow, AppendixError> {
    let spec = fixtures::load(name).ok_or_else(|| AppendixError::MissingFixture(name.into()))?;
    if spec.lift.is_none() {
        return Err(AppendixError::MissingLift(name.into()));
    }
    let bad = |e: &dyn fmt::Display| AppendixError::BadFixture {
        name: name.into(),
        message: e.to_string(),
    };
    let child = spec.code().map_err(|e| bad(&e))?;
    let parent = spec.parent().map_err(|e| bad(&e))?;
    let literal = attempt(&spec, &child, false);
    let corrected = spec.erratum.as_ref().map(|_| attempt(&spec, &child, true));
    Ok(AppendixRow {
        name: name.into(),
        parent: parent.code().to_string(),
        child: child.to_string(),
        parent_tree: parent.code().family_tree(),
        child_tree: child.family_tree(),
        literal,
        corrected,
        erratum_note: spec.erratum.as_ref().and_then(|e| e.note.clone()),
    })
}

pub fn reproduce_appendix() -> Result<AppendixReport, AppendixError> {
    let rows = fixtures::TABLE_ROWS
        .iter()
        .map(|n| reproduce_row(n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AppendixReport {
        all_pass_literal: rows.iter().all(AppendixRow::passes_literally),
        all_pass_corrected: rows.iter().all(AppendixRow::passes_corrected),
        rows,
    })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

impl fmt::Display for AppendixReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            write!(f, "{:<7} {:<20} {} -> {}", verdict(r.literal.pass), r.name, r.parent, r.child)?;
            if r.literal.requires_cancellation {
                write!(f, "  [F2 cancellation]")?;
            }
            writeln!(f)?;
            if !r.literal.pass {
                match (&r.literal.produced, &r.literal.error) {
                    (Some((pf, pg)), _) => writeln!(f, "        printed data gives X({pf} | {pg})")?,
                    (None, Some(e)) => writeln!(f, "        {e}")?,
                    (None, None) => {}
                }
            }
            if let Some(c) = &r.corrected {
                writeln!(
                    f,
                    "        erratum: {} ({})",
                    verdict(c.pass),
                    r.erratum_note.as_deref().unwrap_or("no note")
                )?;
            }
        }
        let failed = self.rows.iter().filter(|r| !r.literal.pass).count();
        writeln!(
            f,
            "overall: {} ({} of {} rows as printed)",
            verdict(self.all_pass_literal),
            self.rows.len() - failed,
            self.rows.len()
        )?;
        write!(f, "with errata: {}", verdict(self.all_pass_corrected))
    }
}
