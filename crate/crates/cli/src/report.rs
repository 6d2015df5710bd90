//! The machine-readable result record and its text rendering.

use std::fmt::{self, Write as _};

use fracton::appendix::AppendixReport;
use fracton::barrier::{BarrierSector, FourWayBarrier};
use fracton::codes::{BoundReport, FamilyTreeTag, LiftStrategy};
use fracton::distance::DistanceResult;
use fracton::instantiate::MatrixFormat;
use serde::{Deserialize, Serialize};

pub const FORMAT: &str = "fracton-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub format: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecEcho>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_tree: Option<FamilyTreeTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift: Option<LiftReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compactify: Option<CompactifyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<DistanceResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier: Option<BarrierReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub appendix: Option<AppendixReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub export: Option<ExportReport>,
    pub timing: Timing,
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        ReportDocument {
            format: FORMAT.into(),
            command: command.into(),
            spec: None,
            check: None,
            family_tree: None,
            lift: None,
            compactify: None,
            instance: None,
            distance: None,
            bounds: None,
            barrier: None,
            appendix: None,
            export: None,
            timing: Timing::default(),
        }
    }
}

/// Wall-clock data, excluded from reproducibility comparisons.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
    pub cached: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecEcho {
    pub name: Option<String>,
    pub vars: Vec<String>,
    pub f: String,
    pub g: Option<String>,
    /// Boundary relation vectors, when a boundary is given.
    pub relations: Option<Vec<Vec<i64>>>,
    /// The canonical rendering of the input file.
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSummary {
    pub torsion: Vec<i64>,
    pub free_rank: usize,
    /// `|Z^d / G|` as a decimal string, or `"infinite"`.
    pub index: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteCheck {
    pub indecomposable: bool,
    pub lattice: LatticeSummary,
    pub group_order: usize,
    /// Connected components of the Tanner graph, when the instance is small
    /// enough to build.
    pub tanner_components: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: String,
    pub indecomposable: bool,
    pub lattice: LatticeSummary,
    pub monomial_vectors: Vec<Vec<i64>>,
    pub finite: Option<FiniteCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub parent: String,
    pub parent_vars: Vec<String>,
    pub substitutions: Vec<String>,
    pub witnesses: Vec<String>,
    pub twists: Vec<String>,
    pub twist_basis: Vec<Vec<i64>>,
    pub strategy: LiftStrategy,
    pub verified: bool,
    /// A code file that `compactify` turns back into the child.
    pub lift_spec: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactifyReport {
    pub parent: String,
    pub child: String,
    pub twists: Vec<Vec<i64>>,
    pub twists_generate_kernel: bool,
    pub erratum_applied: bool,
    /// Whether the result equals the `[code]` polynomials up to shifts.
    pub matches_code: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixShape {
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub classical: bool,
    pub n: usize,
    pub k: usize,
    pub group_order: usize,
    pub invariant_factors: Vec<i64>,
    pub hx: MatrixShape,
    pub hz: Option<MatrixShape>,
    pub commutes: Option<bool>,
    pub tanner_components: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierEntry {
    pub sector: BarrierSector,
    pub barrier: usize,
    pub target: Vec<usize>,
    pub path: Option<Vec<usize>>,
    pub explored: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierReport {
    pub cap: usize,
    /// Minimum over the computed sectors.
    pub barrier: Option<usize>,
    pub sectors: Vec<BarrierEntry>,
    pub four_way: Option<FourWayBarrier>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportReport {
    pub matrix: String,
    pub format: MatrixFormat,
    pub shape: MatrixShape,
    pub path: Option<String>,
    /// The exported text when no output path was given.
    pub content: Option<String>,
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".into(), T::to_string)
}

impl fmt::Display for ReportDocument {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        if let Some(spec) = &self.spec {
            let _ = write!(s, "code: {}", spec.name.as_deref().unwrap_or("(unnamed)"));
            let _ = match &spec.g {
                Some(g) => writeln!(s, "  X({} | {g})", spec.f),
                None => writeln!(s, "  classical f = {}", spec.f),
            };
        }
        if let Some(c) = &self.check {
            let _ = writeln!(s, "verdict: {}", c.verdict);
            let _ = writeln!(
                s,
                "lattice index: {} (torsion {:?}, free rank {})",
                c.lattice.index, c.lattice.torsion, c.lattice.free_rank
            );
            if let Some(f) = &c.finite {
                let _ = writeln!(
                    s,
                    "finite instance: {} (index {}, |G| = {}, Tanner components {})",
                    if f.indecomposable { "indecomposable" } else { "decomposable" },
                    f.lattice.index,
                    f.group_order,
                    opt(&f.tanner_components)
                );
            }
        }
        if let Some(t) = &self.family_tree {
            let (l, r) = t.smallest_parent_weights();
            let _ = writeln!(s, "family tree: {t} (smallest parent weights {l}, {r})");
        }
        if let Some(l) = &self.lift {
            let _ = writeln!(s, "parent: {}", l.parent);
            let _ = writeln!(s, "strategy: {:?}", l.strategy);
            for line in &l.substitutions {
                let _ = writeln!(s, "  {line}");
            }
            let _ = writeln!(s, "twists:");
            for line in &l.twists {
                let _ = writeln!(s, "  {line}");
            }
            let _ = writeln!(s, "child variables:");
            for line in &l.witnesses {
                let _ = writeln!(s, "  {line}");
            }
            let _ = writeln!(s, "verified: {}", l.verified);
        }
        if let Some(c) = &self.compactify {
            let _ = writeln!(s, "parent: {}", c.parent);
            let _ = writeln!(s, "child: {}", c.child);
            let _ = writeln!(s, "twists generate all relations: {}", c.twists_generate_kernel);
            if let Some(m) = c.matches_code {
                let _ = writeln!(s, "matches [code]: {m}");
            }
        }
        if let Some(i) = &self.instance {
            let _ = writeln!(s, "n = {}, k = {}, |G| = {} {:?}", i.n, i.k, i.group_order, i.invariant_factors);
            let _ = writeln!(s, "H_X: {}x{} ({} ones)", i.hx.rows, i.hx.cols, i.hx.nnz);
            if let Some(hz) = &i.hz {
                let _ = writeln!(s, "H_Z: {}x{} ({} ones)", hz.rows, hz.cols, hz.nnz);
            }
            if let Some(c) = i.commutes {
                let _ = writeln!(s, "H_X H_Z^T = 0: {c}");
            }
            let _ = writeln!(s, "Tanner components: {}", i.tanner_components);
        }
        if let Some(d) = &self.distance {
            let _ = writeln!(
                s,
                "distance: d_upper = {}, d_lower = {} ({:?}, trials {}, seed {})",
                d.d_upper,
                opt(&d.d_lower),
                d.method,
                opt(&d.trials),
                opt(&d.seed)
            );
            let _ = writeln!(s, "  d_X = {}, d_Z = {}", opt(&d.d_x), opt(&d.d_z));
            if let Some(w) = &d.witness {
                let _ = writeln!(s, "  witness ({:?}): {:?}", w.sector, w.support);
            }
        }
        if let Some(b) = &self.bounds {
            let _ = writeln!(s, "n = {}, w = {}, v = {}, D = {}", b.n, b.w, b.v, b.dimension);
            for st in &b.statements {
                let _ = writeln!(s, "  {st}");
            }
            for w in &b.warnings {
                let _ = writeln!(s, "  warning: {w}");
            }
        }
        if let Some(b) = &self.barrier {
            let _ = writeln!(s, "barrier (cap {}): {}", b.cap, opt(&b.barrier));
            for e in &b.sectors {
                let _ = writeln!(
                    s,
                    "  {:?}: {} (target {:?}, {} states)",
                    e.sector, e.barrier, e.target, e.explored
                );
                if let Some(p) = &e.path {
                    let _ = writeln!(s, "    path {p:?}");
                }
            }
            if let Some(f) = &b.four_way {
                let _ = writeln!(
                    s,
                    "  four-way: H_X {}, H_Z {}, H_X^T {}, H_Z^T {}, min {}",
                    opt(&f.hx),
                    opt(&f.hz),
                    opt(&f.hx_t),
                    opt(&f.hz_t),
                    opt(&f.minimum)
                );
            }
        }
        if let Some(a) = &self.appendix {
            let _ = writeln!(s, "{a}");
        }
        if let Some(e) = &self.export {
            match (&e.path, &e.content) {
                (_, Some(c)) => s.push_str(c),
                (Some(p), None) => {
                    let _ = writeln!(s, "wrote {} ({}x{}) to {p}", e.matrix, e.shape.rows, e.shape.cols);
                }
                (None, None) => {}
            }
        }
        out.write_str(s.trim_end())
    }
}
