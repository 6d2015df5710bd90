//! Exact energy barriers by bottleneck shortest paths over all `2^n` bit
//! states, one bit flip per step.
//!
//! X and Z errors are detected by different checks, so each Pauli sector of
//! a CSS code is searched as a classical problem: the X sector walks over X
//! errors with energy `wt(H_Z x)` and stops at an X logical.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::gf2::{BinaryMatrix, BitVec, Gf2Error, RowSpace};
use crate::instantiate::{CodeInstance, Sector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BarrierError {
    #[error("barrier: {n} bits exceed the search cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("barrier: target is trivial")]
    TrivialTarget,
    #[error("barrier: target is not annihilated by the checks")]
    NotInKernel,
    #[error("barrier: code has no logical qubits (k = 0)")]
    NoLogicals,
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

pub type Result<T> = std::result::Result<T, BarrierError>;

pub const DEFAULT_CAP: usize = 20;
/// Largest cap accepted; memory is about `2^cap` bytes.
pub const MAX_CAP: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BarrierSector {
    X,
    Z,
    Classical,
}

impl From<Sector> for BarrierSector {
    fn from(s: Sector) -> Self {
        match s {
            Sector::X => BarrierSector::X,
            Sector::Z => BarrierSector::Z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarrierResult {
    pub barrier: usize,
    pub sector: BarrierSector,
    /// Support of the logical operator reached.
    pub target: Vec<usize>,
    /// Bits flipped in order, from the zero state to the target.
    pub path: Vec<usize>,
    /// States discovered before the search stopped.
    pub explored: u64,
}

/// `wt(H v)`.
pub fn energy(h: &BinaryMatrix, v: &BitVec) -> Result<usize> {
    Ok(h.mul_vec(v)?.weight())
}

/// Syndromes of single-bit flips, packed per column.
struct Columns {
    cols: Vec<Vec<u64>>,
}

impl Columns {
    fn new(h: &BinaryMatrix) -> Self {
        let t = h.transpose();
        Columns {
            cols: (0..h.ncols()).map(|j| t.row(j).words().to_vec()).collect(),
        }
    }

    fn energy(&self, state: u32, buf: &mut [u64]) -> usize {
        buf.fill(0);
        let mut s = state;
        while s != 0 {
            let j = s.trailing_zeros() as usize;
            for (b, c) in buf.iter_mut().zip(&self.cols[j]) {
                *b ^= c;
            }
            s &= s - 1;
        }
        buf.iter().map(|w| w.count_ones() as usize).sum()
    }
}

fn pack(v: &BitVec) -> u32 {
    v.ones().fold(0u32, |acc, i| acc | 1 << i)
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap || n > MAX_CAP {
        return Err(BarrierError::CapExceeded { n, cap: cap.min(MAX_CAP) });
    }
    Ok(())
}

/// Minimax search from the zero state until `is_target(state, energy)`
/// accepts a discovered state. Discovery order is nondecreasing in
/// bottleneck value, so a state's value is final when it is first reached.
fn search(h: &BinaryMatrix, is_target: impl Fn(u32, usize) -> bool) -> Option<(usize, u32, Vec<usize>, u64)> {
    let n = h.ncols();
    let cols = Columns::new(h);
    let words = h.nrows().div_ceil(64).max(1);
    let mut buf = vec![0u64; words];
    let states = 1usize << n;
    let mut visited = vec![0u64; states.div_ceil(64)];
    let mut parent_flip = vec![u8::MAX; states];
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); h.nrows() + 1];
    visited[0] |= 1;
    buckets[0].push(0);
    let mut explored = 1u64;
    let mut level = 0;
    while level < buckets.len() {
        let Some(state) = buckets[level].pop() else {
            level += 1;
            continue;
        };
        for j in 0..n {
            let next = state ^ (1 << j);
            let idx = next as usize;
            if visited[idx / 64] >> (idx % 64) & 1 == 1 {
                continue;
            }
            visited[idx / 64] |= 1 << (idx % 64);
            parent_flip[idx] = j as u8;
            explored += 1;
            let e = cols.energy(next, &mut buf);
            let key = level.max(e);
            if is_target(next, e) {
                let mut path = Vec::new();
                let mut s = next;
                while s != 0 {
                    let f = parent_flip[s as usize];
                    path.push(f as usize);
                    s ^= 1 << f;
                }
                path.reverse();
                return Some((key, next, path, explored));
            }
            buckets[key].push(next);
        }
    }
    None
}

fn unpack(n: usize, s: u32) -> Vec<usize> {
    (0..n).filter(|&i| s >> i & 1 == 1).collect()
}

/// Exact barrier between the zero state and `target` for checks `h`.
pub fn barrier(h: &BinaryMatrix, target: &BitVec, cap: usize) -> Result<BarrierResult> {
    let n = h.ncols();
    check_cap(n, cap)?;
    if target.len() != n {
        return Err(Gf2Error::DimensionMismatch {
            expected: n,
            got: target.len(),
        }
        .into());
    }
    if target.is_zero() {
        return Err(BarrierError::TrivialTarget);
    }
    if energy(h, target)? != 0 {
        return Err(BarrierError::NotInKernel);
    }
    let t = pack(target);
    let (barrier, reached, path, explored) = search(h, |s, _| s == t).expect("target reachable");
    Ok(BarrierResult {
        barrier,
        sector: BarrierSector::Classical,
        target: unpack(n, reached),
        path,
        explored,
    })
}

/// Smallest barrier to any nonzero codeword of `ker h`, or `None` when the
/// kernel is trivial.
pub fn classical_code_barrier(h: &BinaryMatrix, cap: usize) -> Result<Option<BarrierResult>> {
    let n = h.ncols();
    check_cap(n, cap)?;
    if h.nullspace().is_empty() {
        return Ok(None);
    }
    let found = search(h, |_, e| e == 0);
    Ok(found.map(|(barrier, reached, path, explored)| BarrierResult {
        barrier,
        sector: BarrierSector::Classical,
        target: unpack(n, reached),
        path,
        explored,
    }))
}

fn sector_barrier(inst: &CodeInstance, sector: Sector) -> Option<BarrierResult> {
    let n = inst.n();
    let detect = inst.detecting(sector);
    let stabilizers = RowSpace::new(inst.stabilizers(sector));
    let found = search(detect, |s, e| {
        if e != 0 {
            return false;
        }
        let mut w = vec![u64::from(s)];
        stabilizers.reduce_words(&mut w);
        w[0] != 0
    });
    found.map(|(barrier, reached, path, explored)| BarrierResult {
        barrier,
        sector: sector.into(),
        target: unpack(n, reached),
        path,
        explored,
    })
}

/// Least barrier over the nontrivial logical operators of one sector.
pub fn logical_barrier(inst: &CodeInstance, sector: Sector, cap: usize) -> Result<BarrierResult> {
    check_cap(inst.n(), cap)?;
    if inst.k() == 0 {
        return Err(BarrierError::NoLogicals);
    }
    sector_barrier(inst, sector).ok_or(BarrierError::NoLogicals)
}

/// Barrier of a CSS instance: per sector, the least barrier over every
/// nontrivial logical operator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeBarrier {
    pub barrier: usize,
    pub x: BarrierResult,
    pub z: BarrierResult,
}

pub fn code_barrier(inst: &CodeInstance, cap: usize, exec: Execution) -> Result<CodeBarrier> {
    check_cap(inst.n(), cap)?;
    if inst.k() == 0 {
        return Err(BarrierError::NoLogicals);
    }
    let mut found = exec::map_slice(exec, &[Sector::X, Sector::Z], |&s| sector_barrier(inst, s)).into_iter();
    let x = found.next().flatten().ok_or(BarrierError::NoLogicals)?;
    let z = found.next().flatten().ok_or(BarrierError::NoLogicals)?;
    Ok(CodeBarrier {
        barrier: x.barrier.min(z.barrier),
        x,
        z,
    })
}

/// The four classical barriers `Δ(H_X)`, `Δ(H_Z)`, `Δ(H_X^T)`, `Δ(H_Z^T)`,
/// each the least barrier to a nonzero codeword of the kernel of that
/// matrix. Entries are `None` when the matrix is wider than the cap or its
/// kernel is trivial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourWayBarrier {
    pub hx: Option<usize>,
    pub hz: Option<usize>,
    pub hx_t: Option<usize>,
    pub hz_t: Option<usize>,
    pub minimum: Option<usize>,
}

pub fn four_way_barrier(inst: &CodeInstance, cap: usize, exec: Execution) -> FourWayBarrier {
    let mats = [
        inst.hx().clone(),
        inst.hz().clone(),
        inst.hx().transpose(),
        inst.hz().transpose(),
    ];
    let vals = exec::map_slice(exec, &mats, |m| {
        classical_code_barrier(m, cap).ok().flatten().map(|r| r.barrier)
    });
    FourWayBarrier {
        hx: vals[0],
        hz: vals[1],
        hx_t: vals[2],
        hz_t: vals[3],
        minimum: vals.iter().flatten().min().copied(),
    }
}

/// Replays a path and returns the largest energy met, if the path is a
/// valid single-flip walk from zero to `target`.
pub fn path_bottleneck(h: &BinaryMatrix, target: &[usize], path: &[usize]) -> Option<usize> {
    let n = h.ncols();
    let mut v = BitVec::zeros(n);
    let mut worst = 0;
    for &j in path {
        if j >= n {
            return None;
        }
        v.toggle(j);
        worst = worst.max(energy(h, &v).ok()?);
    }
    (v == BitVec::from_indices(n, target)).then_some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::TwoBlockCode;
    use crate::instantiate::{classical_check_matrix, instantiate};
    use crate::lattice::GroupPresentation;
    use crate::poly::{LaurentPoly, VarContext};

    fn ising(l: i64) -> BinaryMatrix {
        let ctx = VarContext::new(&["x"]).unwrap();
        let p = LaurentPoly::parse(&ctx, "1 + x").unwrap();
        classical_check_matrix(&p, &GroupPresentation::periodic(&ctx, &[l]).unwrap()).unwrap()
    }

    fn toric(l: i64) -> CodeInstance {
        let ctx = VarContext::new(&["x", "y"]).unwrap();
        let c = TwoBlockCode::parse(&ctx, "1 + x", "1 + y").unwrap();
        instantiate(&c, &GroupPresentation::periodic(&ctx, &[l, l]).unwrap()).unwrap()
    }

    #[test]
    fn energies() {
        let h = ising(8);
        assert_eq!(energy(&h, &BitVec::zeros(8)).unwrap(), 0);
        assert_eq!(energy(&h, &BitVec::from_indices(8, &[0])).unwrap(), 2);
        assert!(energy(&h, &BitVec::zeros(3)).is_err());
    }

    #[test]
    fn ising_barrier_is_two() {
        for l in 2..=10 {
            let h = ising(l);
            let all = BitVec::from_indices(l as usize, &(0..l as usize).collect::<Vec<_>>());
            let r = barrier(&h, &all, DEFAULT_CAP).unwrap();
            assert_eq!(r.barrier, 2, "L = {l}");
            assert_eq!(path_bottleneck(&h, &r.target, &r.path), Some(r.barrier));
        }
    }

    #[test]
    fn barrier_errors() {
        let h = ising(4);
        assert_eq!(barrier(&h, &BitVec::zeros(4), DEFAULT_CAP).unwrap_err(), BarrierError::TrivialTarget);
        assert_eq!(
            barrier(&h, &BitVec::from_indices(4, &[0]), DEFAULT_CAP).unwrap_err(),
            BarrierError::NotInKernel
        );
        assert_eq!(
            barrier(&ising(21), &BitVec::from_indices(21, &[0]), DEFAULT_CAP).unwrap_err(),
            BarrierError::CapExceeded { n: 21, cap: 20 }
        );
    }

    #[test]
    fn toric_code_barriers() {
        for l in [2, 3] {
            let inst = toric(l);
            let b = code_barrier(&inst, DEFAULT_CAP, Execution::Parallel).unwrap();
            assert_eq!(b.barrier, 2, "L = {l}");
            for r in [&b.x, &b.z] {
                let s = match r.sector {
                    BarrierSector::X => Sector::X,
                    _ => Sector::Z,
                };
                assert_eq!(path_bottleneck(inst.detecting(s), &r.target, &r.path), Some(r.barrier));
                let t = BitVec::from_indices(inst.n(), &r.target);
                assert!(crate::distance::is_logical(&inst, s, &t));
            }
        }
    }

    #[test]
    fn single_sector_matches_code_barrier() {
        let inst = toric(3);
        let b = code_barrier(&inst, DEFAULT_CAP, Execution::Sequential).unwrap();
        assert_eq!(logical_barrier(&inst, Sector::X, DEFAULT_CAP).unwrap(), b.x);
        assert_eq!(logical_barrier(&inst, Sector::Z, DEFAULT_CAP).unwrap(), b.z);
        assert_eq!(
            logical_barrier(&inst, Sector::X, 10).unwrap_err(),
            BarrierError::CapExceeded { n: 18, cap: 10 }
        );
    }

    #[test]
    fn code_barrier_needs_logicals() {
        let ctx = VarContext::new(&["x"]).unwrap();
        let c = TwoBlockCode::parse(&ctx, "1 + x", "1").unwrap();
        let inst = instantiate(&c, &GroupPresentation::periodic(&ctx, &[3]).unwrap()).unwrap();
        assert_eq!(
            code_barrier(&inst, DEFAULT_CAP, Execution::Sequential).unwrap_err(),
            BarrierError::NoLogicals
        );
    }

    #[test]
    fn four_way_on_small_toric() {
        let fw = four_way_barrier(&toric(2), DEFAULT_CAP, Execution::Sequential);
        assert!(fw.minimum.is_some());
        assert_eq!(fw.minimum, [fw.hx, fw.hz, fw.hx_t, fw.hz_t].into_iter().flatten().min());
    }
}
