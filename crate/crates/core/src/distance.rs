//! Minimum distance of CSS instances: exact enumeration for small codes and
//! seeded information-set search for larger ones.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::gf2::{self, BinaryMatrix, BitVec, RowSpace};
use crate::instantiate::{CodeInstance, Sector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistanceError {
    #[error("distance: n = {n} exceeds the exact-search cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("distance: code has no logical qubits (k = 0)")]
    NoLogicals,
    #[error("distance: kernel of dimension {0} is too large to enumerate")]
    KernelTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, DistanceError>;

pub const DEFAULT_EXACT_CAP: usize = 28;
/// Hard limit on the number of enumerated kernel basis vectors.
pub const MAX_KERNEL_DIM: usize = 40;
/// Exact enumeration packs vectors into one `u128`.
pub const MAX_EXACT_BITS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMethod {
    ExactEnumeration,
    RandomInformationSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub sector: Sector,
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub n: usize,
    pub k: usize,
    /// Smallest logical weight found; `n` when nothing was found.
    pub d_upper: usize,
    pub d_lower: Option<usize>,
    /// Best weight per sector, if any logical of that type was found.
    pub d_x: Option<usize>,
    pub d_z: Option<usize>,
    pub witness: Option<Witness>,
    pub method: DistanceMethod,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

impl DistanceResult {
    pub fn witness_vector(&self) -> Option<BitVec> {
        self.witness.as_ref().map(|w| BitVec::from_indices(self.n, &w.support))
    }
}

/// True iff `v` commutes with every check of the other type and is not a
/// product of stabilizers of its own type.
pub fn is_logical(inst: &CodeInstance, sector: Sector, v: &BitVec) -> bool {
    v.len() == inst.n()
        && inst.detecting(sector).mul_vec(v).map(|s| s.is_zero()).unwrap_or(false)
        && !RowSpace::new(inst.stabilizers(sector)).contains(v)
}

fn to_u128(v: &BitVec) -> u128 {
    v.words().iter().enumerate().fold(0u128, |acc, (i, &w)| acc | (u128::from(w) << (64 * i)))
}

fn from_u128(len: usize, x: u128) -> BitVec {
    BitVec::from_indices(len, &(0..len).filter(|&i| x >> i & 1 == 1).collect::<Vec<_>>())
}

/// Kernel basis of `detect` with stabilizer rows first, then one vector per
/// independent logical class. Returns the basis and the logical count.
fn ordered_kernel_basis(detect: &BinaryMatrix, stabilizers: Option<&BinaryMatrix>) -> (Vec<BitVec>, usize) {
    let kernel = detect.nullspace();
    let mut span = RowSpace::new(&BinaryMatrix::zeros(0, detect.ncols()));
    let mut basis = Vec::new();
    if let Some(s) = stabilizers {
        for row in RowSpace::new(s).basis() {
            span.insert(&row);
            basis.push(row);
        }
    }
    let stab = basis.len();
    for v in kernel {
        if span.insert(&v) {
            basis.push(v);
        }
    }
    let logical = basis.len() - stab;
    (basis, logical)
}

/// Lightest vector whose logical-coefficient part is nonzero, enumerating
/// all combinations of `basis` in Gray-code order. The top basis indices
/// from `first_logical` on are the logical ones.
fn enumerate_min(basis: &[u128], first_logical: usize, exec: Execution) -> Option<(usize, u128)> {
    let m = basis.len();
    if first_logical >= m {
        return None;
    }
    let top = m.min(10);
    let low = m - top;
    let low_logical = first_logical < low;
    let results = exec::map_range(exec, 1usize << top, |c| {
        let chunk_logical = (0..top).any(|b| c >> b & 1 == 1 && low + b >= first_logical);
        if !chunk_logical && !low_logical {
            return None;
        }
        let mut v = (0..top)
            .filter(|b| c >> b & 1 == 1)
            .fold(0u128, |acc, b| acc ^ basis[low + b]);
        let mut low_mask: u64 = 0;
        let mut best: Option<(usize, u128)> = None;
        let consider = |v: u128, logical: bool, best: &mut Option<(usize, u128)>| {
            if logical {
                let w = v.count_ones() as usize;
                if best.is_none_or(|(bw, _)| w < bw) {
                    *best = Some((w, v));
                }
            }
        };
        consider(v, chunk_logical, &mut best);
        for i in 1u64..(1u64 << low) {
            let j = i.trailing_zeros() as usize;
            v ^= basis[j];
            if j >= first_logical {
                low_mask ^= 1 << j;
            }
            consider(v, chunk_logical || low_mask != 0, &mut best);
        }
        best
    });
    results
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(usize, u128)>, x| match acc {
            Some(a) if a.0 <= x.0 => Some(a),
            _ => Some(x),
        })
}

fn sector_exact(inst: &CodeInstance, sector: Sector, exec: Execution) -> Result<Option<(usize, BitVec)>> {
    let (basis, logical) = ordered_kernel_basis(inst.detecting(sector), Some(inst.stabilizers(sector)));
    if basis.len() > MAX_KERNEL_DIM {
        return Err(DistanceError::KernelTooLarge(basis.len()));
    }
    let packed: Vec<u128> = basis.iter().map(to_u128).collect();
    Ok(enumerate_min(&packed, basis.len() - logical, exec).map(|(w, v)| (w, from_u128(inst.n(), v))))
}

fn assemble(
    inst: &CodeInstance,
    k: usize,
    x: Option<(usize, BitVec)>,
    z: Option<(usize, BitVec)>,
    method: DistanceMethod,
) -> DistanceResult {
    let n = inst.n();
    let best = match (&x, &z) {
        (Some(a), Some(b)) if b.0 < a.0 => Some((Sector::Z, b)),
        (Some(a), _) => Some((Sector::X, a)),
        (None, Some(b)) => Some((Sector::Z, b)),
        (None, None) => None,
    };
    DistanceResult {
        n,
        k,
        d_upper: best.map_or(n, |(_, b)| b.0),
        d_lower: None,
        d_x: x.as_ref().map(|p| p.0),
        d_z: z.as_ref().map(|p| p.0),
        witness: best.map(|(sector, b)| Witness {
            sector,
            support: b.1.ones().collect(),
        }),
        method,
        trials: None,
        seed: None,
    }
}

/// Exact minimum distance by enumerating both logical sectors.
pub fn exact_distance(inst: &CodeInstance, cap: usize, exec: Execution) -> Result<DistanceResult> {
    let n = inst.n();
    if n > cap || n > MAX_EXACT_BITS {
        return Err(DistanceError::CapExceeded {
            n,
            cap: cap.min(MAX_EXACT_BITS),
        });
    }
    let k = inst.k();
    if k == 0 {
        return Err(DistanceError::NoLogicals);
    }
    let x = sector_exact(inst, Sector::X, exec)?;
    let z = sector_exact(inst, Sector::Z, exec)?;
    let mut r = assemble(inst, k, x, z, DistanceMethod::ExactEnumeration);
    r.d_lower = Some(r.d_upper);
    Ok(r)
}

/// Minimum weight of a nonzero vector in `ker h`, with a witness; `None`
/// when the kernel is trivial.
pub fn classical_distance(h: &BinaryMatrix, exec: Execution) -> Result<Option<(usize, BitVec)>> {
    let n = h.ncols();
    if n > MAX_EXACT_BITS {
        return Err(DistanceError::CapExceeded { n, cap: MAX_EXACT_BITS });
    }
    let (basis, _) = ordered_kernel_basis(h, None);
    if basis.len() > MAX_KERNEL_DIM {
        return Err(DistanceError::KernelTooLarge(basis.len()));
    }
    let packed: Vec<u128> = basis.iter().map(to_u128).collect();
    Ok(enumerate_min(&packed, 0, exec).map(|(w, v)| (w, from_u128(n, v))))
}

/// Per-sector data shared by all trials.
struct SectorSearch {
    kernel: Vec<Vec<u64>>,
    stabilizers: RowSpace,
}

impl SectorSearch {
    fn new(inst: &CodeInstance, sector: Sector) -> Self {
        let kernel = inst.detecting(sector).nullspace();
        SectorSearch {
            kernel: kernel.iter().map(|v| v.words().to_vec()).collect(),
            stabilizers: RowSpace::new(inst.stabilizers(sector)),
        }
    }

    fn is_logical(&self, words: &[u64]) -> bool {
        let mut w = words.to_vec();
        self.stabilizers.reduce_words(&mut w);
        w.iter().any(|&x| x != 0)
    }

    /// Eliminates the kernel generator along a random column order and
    /// checks its rows and pairwise row sums.
    fn trial(&self, order: &[usize], best: &mut Option<(usize, Vec<u64>)>) {
        let mut rows = self.kernel.clone();
        let mut next = 0;
        for &c in order {
            if next == rows.len() {
                break;
            }
            let Some(p) = (next..rows.len()).find(|&r| gf2::bit(&rows[r], c)) else {
                continue;
            };
            rows.swap(next, p);
            let (head, tail) = rows.split_at_mut(next);
            let (pivot, tail) = tail.split_first_mut().expect("pivot row");
            for r in head.iter_mut().chain(tail.iter_mut()) {
                if gf2::bit(r, c) {
                    gf2::xor_into(r, pivot);
                }
            }
            next += 1;
        }
        let offer = |w: usize, v: &[u64], best: &mut Option<(usize, Vec<u64>)>| {
            if best.as_ref().is_none_or(|(bw, _)| w < *bw) && self.is_logical(v) {
                *best = Some((w, v.to_vec()));
            }
        };
        for r in &rows {
            offer(gf2::popcount(r), r, best);
        }
        let mut sum = vec![0u64; rows.first().map_or(0, Vec::len)];
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let mut w = 0;
                for (s, (a, b)) in sum.iter_mut().zip(rows[i].iter().zip(&rows[j])) {
                    *s = a ^ b;
                    w += s.count_ones() as usize;
                }
                if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
                    offer(w, &sum, best);
                }
            }
        }
    }
}

const TRIALS_PER_TASK: u64 = 64;

/// Seeded information-set search. Trial `t` draws its column order from
/// the ChaCha stream `t` of `seed`, so the result does not depend on how
/// trials are spread over threads; ties go to the earliest trial.
pub fn random_upper_bound(inst: &CodeInstance, trials: u64, seed: u64, exec: Execution) -> Result<DistanceResult> {
    let k = inst.k();
    if k == 0 {
        return Err(DistanceError::NoLogicals);
    }
    let sectors = [SectorSearch::new(inst, Sector::X), SectorSearch::new(inst, Sector::Z)];
    let n = inst.n();
    let tasks = trials.div_ceil(TRIALS_PER_TASK) as usize;
    // per task and sector: (weight, first trial reaching it, vector)
    type Found = [Option<(usize, u64, Vec<u64>)>; 2];
    let found: Vec<Found> = exec::map_range(exec, tasks, |task| {
        let mut out: Found = [None, None];
        let start = task as u64 * TRIALS_PER_TASK;
        let end = (start + TRIALS_PER_TASK).min(trials);
        let mut order: Vec<usize> = (0..n).collect();
        for t in start..end {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(t);
            order.sort_unstable();
            order.shuffle(&mut rng);
            for (s, search) in sectors.iter().enumerate() {
                let mut best = out[s].as_ref().map(|(w, _, v)| (*w, v.clone()));
                let before = best.as_ref().map(|b| b.0);
                search.trial(&order, &mut best);
                if let Some((w, v)) = best {
                    if before.is_none_or(|b| w < b) {
                        out[s] = Some((w, t, v));
                    }
                }
            }
        }
        out
    });
    let mut merged: [Option<(usize, u64, Vec<u64>)>; 2] = [None, None];
    for f in found {
        for s in 0..2 {
            if let Some(cand) = &f[s] {
                let better = merged[s].as_ref().is_none_or(|m| (cand.0, cand.1) < (m.0, m.1));
                if better {
                    merged[s] = Some(cand.clone());
                }
            }
        }
    }
    let to_vec = |o: &Option<(usize, u64, Vec<u64>)>| {
        o.as_ref().map(|(w, _, v)| (*w, BitVec::from_indices(n, &words_ones(v, n))))
    };
    let mut r = assemble(
        inst,
        k,
        to_vec(&merged[0]),
        to_vec(&merged[1]),
        DistanceMethod::RandomInformationSet,
    );
    r.trials = Some(trials);
    r.seed = Some(seed);
    Ok(r)
}

fn words_ones(words: &[u64], n: usize) -> Vec<usize> {
    (0..n).filter(|&i| gf2::bit(words, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::TwoBlockCode;
    use crate::instantiate::instantiate;
    use crate::lattice::GroupPresentation;
    use crate::poly::VarContext;

    fn toric(l: i64) -> CodeInstance {
        let ctx = VarContext::new(&["x", "y"]).unwrap();
        let c = TwoBlockCode::parse(&ctx, "1 + x", "1 + y").unwrap();
        instantiate(&c, &GroupPresentation::periodic(&ctx, &[l, l]).unwrap()).unwrap()
    }

    /// Minimum logical weight by enumerating every vector of `F2^n`.
    fn brute_force(inst: &CodeInstance) -> usize {
        let n = inst.n();
        let mut best = n;
        for bits in 1u64..1 << n {
            let w = bits.count_ones() as usize;
            if w >= best {
                continue;
            }
            let v = BitVec::from_indices(n, &(0..n).filter(|i| bits >> i & 1 == 1).collect::<Vec<_>>());
            if is_logical(inst, Sector::X, &v) || is_logical(inst, Sector::Z, &v) {
                best = w;
            }
        }
        best
    }

    #[test]
    fn toric_two_by_two_exact() {
        let inst = toric(2);
        let r = exact_distance(&inst, DEFAULT_EXACT_CAP, Execution::Sequential).unwrap();
        assert_eq!(r.d_upper, 2);
        assert_eq!(r.d_lower, Some(2));
        assert_eq!(brute_force(&inst), 2);
        let w = r.witness.as_ref().unwrap();
        assert!(is_logical(&inst, w.sector, &r.witness_vector().unwrap()));
    }

    #[test]
    fn toric_three_by_three_exact() {
        let inst = toric(3);
        let r = exact_distance(&inst, DEFAULT_EXACT_CAP, Execution::Parallel).unwrap();
        assert_eq!((r.d_upper, r.d_x, r.d_z), (3, Some(3), Some(3)));
        assert_eq!(brute_force(&inst), 3);
    }

    #[test]
    fn exact_errors() {
        let inst = toric(4);
        assert_eq!(
            exact_distance(&inst, DEFAULT_EXACT_CAP, Execution::Sequential).unwrap_err(),
            DistanceError::CapExceeded { n: 32, cap: 28 }
        );
        let ctx = VarContext::new(&["x"]).unwrap();
        let c = TwoBlockCode::parse(&ctx, "1 + x", "1").unwrap();
        let inst = instantiate(&c, &GroupPresentation::periodic(&ctx, &[3]).unwrap()).unwrap();
        assert_eq!(inst.k(), 0);
        assert_eq!(
            exact_distance(&inst, DEFAULT_EXACT_CAP, Execution::Sequential).unwrap_err(),
            DistanceError::NoLogicals
        );
    }

    #[test]
    fn repetition_code_classical_distance() {
        let ctx = VarContext::new(&["x"]).unwrap();
        let c = TwoBlockCode::parse(&ctx, "1 + x", "1 + x").unwrap();
        let inst = instantiate(&c, &GroupPresentation::periodic(&ctx, &[5]).unwrap()).unwrap();
        // the left block of H_X is the circulant of 1 + x on Z_5
        let h = BinaryMatrix::from_rows(5, &(0..5).map(|r| {
            BitVec::from_indices(5, &inst.hx().row(r).ones().filter(|&c| c < 5).collect::<Vec<_>>())
        }).collect::<Vec<_>>())
        .unwrap();
        let (d, w) = classical_distance(&h, Execution::Sequential).unwrap().unwrap();
        assert_eq!(d, 5);
        assert_eq!(w.weight(), 5);
        assert!(classical_distance(&BinaryMatrix::identity(4), Execution::Sequential).unwrap().is_none());
    }

    #[test]
    fn random_search_matches_exact_on_toric() {
        let inst = toric(3);
        let r = random_upper_bound(&inst, 200, 7, Execution::Parallel).unwrap();
        assert_eq!(r.d_upper, 3);
        assert_eq!((r.trials, r.seed), (Some(200), Some(7)));
        let w = r.witness.as_ref().unwrap();
        assert!(is_logical(&inst, w.sector, &r.witness_vector().unwrap()));
    }

    #[test]
    fn zero_trials_is_vacuous() {
        let inst = toric(3);
        let r = random_upper_bound(&inst, 0, 1, Execution::Sequential).unwrap();
        assert_eq!(r.d_upper, 18);
        assert!(r.witness.is_none());
    }

    #[test]
    fn random_search_is_deterministic_across_execution_modes() {
        let inst = toric(4);
        let a = random_upper_bound(&inst, 300, 11, Execution::Sequential).unwrap();
        let b = random_upper_bound(&inst, 300, 11, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn upper_bound_never_increases_with_trials() {
        let inst = toric(4);
        let mut last = usize::MAX;
        for t in [0u64, 1, 5, 20, 100] {
            let d = random_upper_bound(&inst, t, 3, Execution::Sequential).unwrap().d_upper;
            assert!(d <= last);
            last = d;
        }
        assert_eq!(last, 4);
    }
}
