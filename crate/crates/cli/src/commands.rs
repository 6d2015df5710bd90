use std::path::Path;

use fracton::appendix;
use fracton::barrier::{self, BarrierResult};
use fracton::codes::{self, Assignment, TwoBlockCode};
use fracton::distance::{self, DistanceError};
use fracton::fixtures;
use fracton::gf2::BinaryMatrix;
use fracton::instantiate::{self, CodeInstance, MatrixFormat, Sector};
use fracton::lattice::{self, GroupPresentation, LatticeQuotient};
use fracton::specfile::{self, Boundary, LiftSection, SpecFile};

use crate::error::CliError;
use crate::report::*;
use crate::{Context, DistanceMethodArg, DistanceOpts, FormatArg, Input, MatrixArg, SectorArg};

/// Largest group order for which `check` builds the Tanner graph.
const TANNER_LIMIT: usize = 1 << 20;

pub fn load(input: &Input) -> Result<SpecFile, CliError> {
    let mut spec = match (&input.spec, &input.fixture) {
        (_, Some(name)) => fixtures::load(name).ok_or_else(|| CliError::UnknownFixture(name.clone()))?,
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
            specfile::parse_spec(&text)?
        }
        (None, None) => return Err(CliError::Usage("give a code file or --fixture".into())),
    };
    if let Some(p) = &input.periodic {
        if p.len() != spec.context.dim() || p.iter().any(|&x| x <= 0) {
            return Err(CliError::Usage(format!(
                "--periodic needs {} positive periods",
                spec.context.dim()
            )));
        }
        spec.boundary = Some(Boundary {
            periodic: Some(p.clone()),
            identities: vec![],
        });
    }
    Ok(spec)
}

/// Cache key material: command, options and the canonical file text.
pub fn material(command: &str, spec: &SpecFile, params: &str) -> String {
    format!("{command}\n{params}\n{spec}")
}

pub fn distance_params(d: &DistanceOpts, ctx: &Context) -> String {
    format!("method={:?} trials={} cap={} seed={}", d.method, d.trials, d.exact_cap, ctx.seed)
}

fn echo(spec: &SpecFile) -> SpecEcho {
    SpecEcho {
        name: spec.name.clone(),
        vars: spec.context.names().to_vec(),
        f: spec.f.to_string(),
        g: spec.g.as_ref().map(ToString::to_string),
        relations: spec.presentation().ok().map(|p| p.relations().to_vec()),
        text: spec.to_string(),
    }
}

fn with_spec(command: &str, spec: &SpecFile) -> ReportDocument {
    let mut r = ReportDocument::new(command);
    r.spec = Some(echo(spec));
    r
}

fn summary(q: &LatticeQuotient) -> LatticeSummary {
    LatticeSummary {
        torsion: q.torsion.clone(),
        free_rank: q.free_rank,
        index: q.index().map_or_else(|| "infinite".into(), |i| i.to_string()),
    }
}

fn shape(m: &BinaryMatrix) -> MatrixShape {
    MatrixShape {
        rows: m.nrows(),
        cols: m.ncols(),
        nnz: m.count_ones(),
    }
}

fn code_instance(spec: &SpecFile) -> Result<(TwoBlockCode, CodeInstance), CliError> {
    let code = spec.code()?;
    let pres = spec.presentation()?;
    let inst = instantiate::instantiate(&code, &pres)?;
    Ok((code, inst))
}

fn classical_matrix(spec: &SpecFile) -> Result<(BinaryMatrix, GroupPresentation), CliError> {
    let pres = spec.presentation()?;
    Ok((instantiate::classical_check_matrix(&spec.f, &pres)?, pres))
}

/// Connected components of the bipartite graph of `h`.
fn components(h: &BinaryMatrix) -> usize {
    let n = h.ncols() + h.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    let mut count = n;
    for (r, c) in h.nonzeros() {
        let (a, b) = (find(&mut parent, h.ncols() + r), find(&mut parent, c));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

pub fn check(spec: &SpecFile) -> Result<ReportDocument, CliError> {
    let code = spec.code()?;
    let lq = code.lattice_index()?;
    let vectors = code.normalized()?.monomial_group_vectors();
    let finite = match spec.presentation() {
        Ok(pres) if pres.structure()?.free_rank == 0 => {
            let mut all = vectors.clone();
            all.extend(pres.relations().iter().cloned());
            let fq = lattice::lattice_quotient(&all, spec.context.dim())?;
            let group_order = lattice::quotient(&pres)?.order();
            let tanner_components = if group_order <= TANNER_LIMIT {
                Some(instantiate::instantiate(&code, &pres)?.tanner_components())
            } else {
                None
            };
            Some(FiniteCheck {
                indecomposable: code.is_indecomposable_finite(&pres)?,
                lattice: summary(&fq),
                group_order,
                tanner_components,
            })
        }
        _ => None,
    };
    let mut r = with_spec("check", spec);
    r.check = Some(CheckReport {
        verdict: if lq.is_trivial() { "indecomposable" } else { "decomposable" }.into(),
        indecomposable: lq.is_trivial(),
        lattice: summary(&lq),
        monomial_vectors: vectors,
        finite,
    });
    r.family_tree = Some(code.family_tree());
    Ok(r)
}

pub fn classify(spec: &SpecFile) -> Result<ReportDocument, CliError> {
    let code = spec.code()?;
    let mut r = with_spec("classify", spec);
    r.family_tree = Some(code.family_tree());
    Ok(r)
}

fn split_assignment(line: &str) -> Assignment {
    let (v, e) = line.split_once(" = ").unwrap_or((line, ""));
    Assignment::new(v.trim(), e.trim())
}

pub fn lift(spec: &SpecFile) -> Result<ReportDocument, CliError> {
    let code = spec.code()?;
    let pl = codes::lift_to_parent(&code)?;
    let pctx = pl.parent_context().clone();
    let left_used = pl.parent.code().f().variables_used();
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for (i, name) in pctx.names().iter().enumerate() {
        if left_used.contains(&i) {
            left.push(name.clone());
        } else {
            right.push(name.clone());
        }
    }
    let substitutions = pl.substitution_lines();
    let twists = pl.twist_lines();
    let assignments = substitutions.iter().chain(&twists).map(|l| split_assignment(l)).collect();
    let lift_file = SpecFile {
        name: spec.name.clone(),
        context: code.context().clone(),
        f: code.f().clone(),
        g: Some(code.g().clone()),
        boundary: spec.boundary.clone(),
        lift: Some(LiftSection {
            left,
            right,
            assignments,
        }),
        erratum: None,
    };
    let mut r = with_spec("lift", spec);
    r.lift = Some(LiftReport {
        parent: pl.parent.code().to_string(),
        parent_vars: pctx.names().to_vec(),
        substitutions,
        witnesses: pl.witness_lines(),
        twists,
        twist_basis: pl.twists.clone(),
        strategy: pl.strategy,
        verified: pl.verify()?,
        lift_spec: lift_file.to_string(),
    });
    r.family_tree = Some(code.family_tree());
    Ok(r)
}

pub fn compactify(spec: &SpecFile, erratum: bool) -> Result<ReportDocument, CliError> {
    let (parent, sub, twists) = spec.resolve_lift(erratum)?;
    let child = codes::compactify(&parent, &sub, &twists)?;
    let matches_code = spec.code().ok().map(|c| c.shift_equivalent(&child));
    let mut r = with_spec("compactify", spec);
    r.compactify = Some(CompactifyReport {
        parent: parent.code().to_string(),
        child: child.normalized().unwrap_or_else(|_| child.clone()).to_string(),
        twists_generate_kernel: codes::twists_generate_kernel(&sub, &twists)?,
        twists,
        erratum_applied: erratum && spec.erratum.is_some(),
        matches_code,
    });
    r.family_tree = Some(child.family_tree());
    Ok(r)
}

fn instance_report(spec: &SpecFile) -> Result<InstanceReport, CliError> {
    if spec.g.is_none() {
        let (h, pres) = classical_matrix(spec)?;
        let group = lattice::quotient(&pres)?;
        return Ok(InstanceReport {
            classical: true,
            n: h.ncols(),
            k: h.ncols() - h.rank(),
            group_order: group.order(),
            invariant_factors: group.invariant_factors().to_vec(),
            hx: shape(&h),
            hz: None,
            commutes: None,
            tanner_components: components(&h),
        });
    }
    let (_, inst) = code_instance(spec)?;
    Ok(InstanceReport {
        classical: false,
        n: inst.n(),
        k: inst.k(),
        group_order: inst.group().order(),
        invariant_factors: inst.group().invariant_factors().to_vec(),
        hx: shape(inst.hx()),
        hz: Some(shape(inst.hz())),
        commutes: Some(inst.commutes()),
        tanner_components: inst.tanner_components(),
    })
}

pub fn instantiate(spec: &SpecFile) -> Result<ReportDocument, CliError> {
    let mut r = with_spec("instantiate", spec);
    r.instance = Some(instance_report(spec)?);
    Ok(r)
}

fn run_distance(inst: &CodeInstance, d: &DistanceOpts, ctx: &Context) -> Result<distance::DistanceResult, CliError> {
    let random = || distance::random_upper_bound(inst, d.trials, ctx.seed, ctx.exec);
    let res = match d.method {
        DistanceMethodArg::Exact => distance::exact_distance(inst, d.exact_cap, ctx.exec)?,
        DistanceMethodArg::Random => random()?,
        DistanceMethodArg::Auto => match distance::exact_distance(inst, d.exact_cap, ctx.exec) {
            Ok(r) => r,
            Err(DistanceError::CapExceeded { .. } | DistanceError::KernelTooLarge(_)) => random()?,
            Err(e) => return Err(e.into()),
        },
    };
    Ok(res)
}

pub fn distance(spec: &SpecFile, d: &DistanceOpts, ctx: &Context) -> Result<ReportDocument, CliError> {
    let (_, inst) = code_instance(spec)?;
    let mut r = with_spec("distance", spec);
    r.distance = Some(run_distance(&inst, d, ctx)?);
    Ok(r)
}

pub fn params(spec: &SpecFile, d: &DistanceOpts, ctx: &Context) -> Result<ReportDocument, CliError> {
    let mut r = with_spec("params", spec);
    r.instance = Some(instance_report(spec)?);
    if spec.g.is_some() {
        let (code, inst) = code_instance(spec)?;
        match run_distance(&inst, d, ctx) {
            Ok(res) => r.distance = Some(res),
            Err(CliError::Distance(DistanceError::NoLogicals)) => {}
            Err(e) => return Err(e),
        }
        r.bounds = Some(codes::bound_report(&code, inst.n() as u64));
    }
    Ok(r)
}

fn entry(res: BarrierResult, emit_path: bool) -> BarrierEntry {
    BarrierEntry {
        sector: res.sector,
        barrier: res.barrier,
        target: res.target,
        path: emit_path.then_some(res.path),
        explored: res.explored,
    }
}

pub fn barrier(spec: &SpecFile, cap: usize, sector: SectorArg, emit_path: bool, ctx: &Context) -> Result<ReportDocument, CliError> {
    if cap > barrier::MAX_CAP {
        return Err(CliError::Usage(format!("--cap is at most {}", barrier::MAX_CAP)));
    }
    let mut sectors = Vec::new();
    let mut four_way = None;
    if spec.g.is_none() {
        let (h, _) = classical_matrix(spec)?;
        let res = barrier::classical_code_barrier(&h, cap)?
            .ok_or_else(|| CliError::Domain("barrier: classical code has no nonzero codewords".into()))?;
        sectors.push(entry(res, emit_path));
    } else {
        let (_, inst) = code_instance(spec)?;
        match sector {
            SectorArg::X | SectorArg::Z => {
                let s = if sector == SectorArg::X { Sector::X } else { Sector::Z };
                sectors.push(entry(barrier::logical_barrier(&inst, s, cap)?, emit_path));
            }
            SectorArg::Both => {
                let b = barrier::code_barrier(&inst, cap, ctx.exec)?;
                sectors.push(entry(b.x, emit_path));
                sectors.push(entry(b.z, emit_path));
            }
            SectorArg::FourWay => four_way = Some(barrier::four_way_barrier(&inst, cap, ctx.exec)),
        }
    }
    let mut r = with_spec("barrier", spec);
    r.barrier = Some(BarrierReport {
        cap,
        barrier: sectors
            .iter()
            .map(|e| e.barrier)
            .min()
            .or_else(|| four_way.as_ref().and_then(|f| f.minimum)),
        sectors,
        four_way,
    });
    Ok(r)
}

pub fn bounds(spec: &SpecFile, n: Option<u64>) -> Result<ReportDocument, CliError> {
    let code = spec.code()?;
    let n = match n {
        Some(n) => n,
        None => code_instance(spec)?.1.n() as u64,
    };
    let mut r = with_spec("bounds", spec);
    r.bounds = Some(codes::bound_report(&code, n));
    Ok(r)
}

pub fn reproduce_appendix() -> Result<ReportDocument, CliError> {
    let mut r = ReportDocument::new("reproduce-appendix");
    r.appendix = Some(appendix::reproduce_appendix()?);
    Ok(r)
}

pub fn export_matrix(
    spec: &SpecFile,
    which: MatrixArg,
    format: FormatArg,
    output: Option<&Path>,
) -> Result<ReportDocument, CliError> {
    let m = if spec.g.is_none() {
        if which == MatrixArg::Hz {
            return Err(CliError::Domain("export-matrix: a classical code has only H_X".into()));
        }
        classical_matrix(spec)?.0
    } else {
        let (_, inst) = code_instance(spec)?;
        match which {
            MatrixArg::Hx => inst.hx().clone(),
            MatrixArg::Hz => inst.hz().clone(),
        }
    };
    let format = match format {
        FormatArg::Coo => MatrixFormat::Coo,
        FormatArg::Mtx => MatrixFormat::Mtx,
    };
    let text = instantiate::export_matrix(&m, format);
    if let Some(p) = output {
        std::fs::write(p, &text).map_err(|e| CliError::Io(p.display().to_string(), e))?;
    }
    let mut r = with_spec("export-matrix", spec);
    r.export = Some(ExportReport {
        matrix: match which {
            MatrixArg::Hx => "hx",
            MatrixArg::Hz => "hz",
        }
        .into(),
        format,
        shape: shape(&m),
        path: output.map(|p| p.display().to_string()),
        content: output.is_none().then_some(text),
    });
    Ok(r)
}
