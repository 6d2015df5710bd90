//! Invariants checked on random inputs and on the bundled fixtures.

use fracton::barrier;
use fracton::codes::{self, TwoBlockCode};
use fracton::distance::{self, DistanceResult};
use fracton::exec::Execution;
use fracton::fixtures;
use fracton::instantiate::{self, CodeInstance, Sector};
use fracton::lattice::{self, GroupPresentation, IntMatrix};
use fracton::poly::{LaurentPoly, Monomial, VarContext};
use proptest::prelude::*;

const PRIMES: [i64; 5] = [2, 3, 5, 7, 11];

fn ctx(dim: usize) -> VarContext {
    VarContext::new(&["x", "y", "z"][..dim]).unwrap()
}

fn poly_strategy(dim: usize, max_terms: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, dim), 1..=max_terms)
}

fn poly(c: &VarContext, terms: &[Vec<i64>]) -> LaurentPoly {
    LaurentPoly::from_monomials(c, terms.iter().map(|e| Monomial::new(e.clone()))).unwrap()
}

/// Qubit components, joining any two qubits that share a check.
fn qubit_components(inst: &CodeInstance) -> usize {
    let n = inst.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    for h in [inst.hx(), inst.hz()] {
        for row in h.rows() {
            let mut ones = row.ones();
            if let Some(first) = ones.next() {
                for j in ones {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

fn fixture_instance(name: &str, periods: Option<&[i64]>) -> CodeInstance {
    let spec = fixtures::load(name).unwrap();
    let code = spec.code().unwrap();
    let pres = match periods {
        Some(p) => GroupPresentation::periodic(&spec.context, p).unwrap(),
        None => spec.presentation().unwrap(),
    };
    instantiate::instantiate(&code, &pres).unwrap()
}

fn quantum_fixtures() -> Vec<(String, TwoBlockCode)> {
    fixtures::names()
        .filter_map(|name| fixtures::load(name).and_then(|s| s.code().ok()).map(|c| (name.to_string(), c)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// On a torus whose side lengths are distinct primes the group is cyclic,
    /// and the monomials generate it once every variable appears with an
    /// exponent that the corresponding prime does not divide, provided no
    /// terms cancel on the torus.
    #[test]
    fn distinct_prime_tori_are_indecomposable(
        dim in 2usize..=3,
        picks in prop::sample::subsequence(PRIMES.to_vec(), 3),
        f in poly_strategy(3, 4),
        g in poly_strategy(3, 4),
    ) {
        let c = ctx(dim);
        let lengths: Vec<i64> = picks[..dim].to_vec();
        let trim = |t: &[Vec<i64>]| t.iter().map(|e| e[..dim].to_vec()).collect::<Vec<_>>();
        let (f, g) = (poly(&c, &trim(&f)), poly(&c, &trim(&g)));
        prop_assume!(!f.is_zero() && !g.is_zero());
        let code = TwoBlockCode::new(f, g).unwrap();
        let vectors = code.normalized().unwrap().monomial_group_vectors();
        let covers = lengths
            .iter()
            .enumerate()
            .all(|(i, &p)| vectors.iter().any(|v| v[i].rem_euclid(p) != 0));
        prop_assume!(covers);
        let pres = GroupPresentation::periodic(&c, &lengths).unwrap();
        let group = lattice::quotient(&pres).unwrap();
        let distinct = |p: &LaurentPoly| {
            let mut r = group.reduce_poly(p).unwrap();
            r.sort_unstable();
            r.windows(2).all(|w| w[0] != w[1])
        };
        prop_assume!(distinct(code.f()) && distinct(code.g()));
        prop_assert!(code.is_indecomposable_finite(&pres).unwrap());
        let order: i64 = lengths.iter().product();
        if order <= 1000 {
            let inst = instantiate::instantiate(&code, &pres).unwrap();
            prop_assert_eq!(qubit_components(&inst), 1);
        }
    }

    #[test]
    fn finite_verdict_matches_connectivity(
        f in poly_strategy(2, 3),
        g in poly_strategy(2, 3),
        lx in 2i64..=6,
        ly in 2i64..=6,
    ) {
        let c = ctx(2);
        let (f, g) = (poly(&c, &f), poly(&c, &g));
        prop_assume!(!f.is_zero() && !g.is_zero());
        let code = TwoBlockCode::new(f, g).unwrap();
        let pres = GroupPresentation::periodic(&c, &[lx, ly]).unwrap();
        let inst = instantiate::instantiate(&code, &pres).unwrap();
        prop_assert_eq!(code.is_indecomposable_finite(&pres).unwrap(), qubit_components(&inst) == 1);
    }

    #[test]
    fn random_codes_commute(
        f in poly_strategy(2, 4),
        g in poly_strategy(2, 4),
        lx in 2i64..=7,
        ly in 2i64..=7,
    ) {
        let c = ctx(2);
        let (f, g) = (poly(&c, &f), poly(&c, &g));
        prop_assume!(!f.is_zero() && !g.is_zero());
        let code = TwoBlockCode::new(f, g).unwrap();
        prop_assert!(code.css_commutes_symbolically());
        let inst = instantiate::instantiate(&code, &GroupPresentation::periodic(&c, &[lx, ly]).unwrap()).unwrap();
        prop_assert!(inst.hx().mul_transpose(inst.hz()).unwrap().is_zero());
    }

    #[test]
    fn k_is_shift_invariant(
        f in poly_strategy(2, 3),
        g in poly_strategy(2, 3),
        l in 2i64..=6,
    ) {
        let c = ctx(2);
        let (f, g) = (poly(&c, &f), poly(&c, &g));
        prop_assume!(!f.is_zero() && !g.is_zero());
        let code = TwoBlockCode::new(f, g).unwrap();
        let pres = GroupPresentation::periodic(&c, &[l, l]).unwrap();
        let a = instantiate::instantiate(&code, &pres).unwrap();
        let b = instantiate::instantiate(&code.normalized().unwrap(), &pres).unwrap();
        prop_assert_eq!(a.k(), b.k());
    }

    #[test]
    fn ring_axioms(a in poly_strategy(2, 4), b in poly_strategy(2, 4), d in poly_strategy(2, 4)) {
        let c = ctx(2);
        let (a, b, d) = (poly(&c, &a), poly(&c, &b), poly(&c, &d));
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&d).unwrap(), a.mul(&b.mul(&d).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&d).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&d).unwrap()).unwrap()
        );
        prop_assert!(a.add(&a).unwrap().is_zero());
        prop_assert_eq!(a.mul(&LaurentPoly::one(&c)).unwrap(), a.clone());
        prop_assert_eq!(a.antipode().antipode(), a.clone());
        prop_assert_eq!(a.mul(&b).unwrap().antipode(), a.antipode().mul(&b.antipode()).unwrap());
    }

    #[test]
    fn normalization_keeps_weight(a in poly_strategy(3, 5)) {
        let c = ctx(3);
        let a = poly(&c, &a);
        prop_assume!(!a.is_zero());
        let (n, shift) = a.normalize_to_one().unwrap();
        prop_assert_eq!(n.weight(), a.weight());
        prop_assert!(n.contains_one());
        prop_assert_eq!(a.shift(&shift.inv().unwrap()).unwrap(), n.clone());
        prop_assert!(n.shift_equivalent(&a));
    }

    #[test]
    fn smith_form_factors(rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 1..=4)) {
        let m = IntMatrix::from_rows(&rows, 3).unwrap();
        let snf = lattice::smith_normal_form(&m).unwrap();
        let product = snf.u.checked_mul(&m).unwrap().checked_mul(&snf.v).unwrap();
        prop_assert_eq!(product.to_rows(), snf.s.to_rows());
        prop_assert_eq!(snf.u.determinant().unwrap().abs(), 1);
        prop_assert_eq!(snf.v.determinant().unwrap().abs(), 1);
        let diag = snf.diagonal();
        for w in diag.windows(2) {
            prop_assert!(w[0] >= 0 && (w[0] == 0 && w[1] == 0 || w[0] != 0 && w[1] % w[0] == 0));
        }
        if rows.len() == 3 {
            let q = lattice::lattice_quotient(&rows, 3).unwrap();
            let det = m.determinant().unwrap();
            prop_assert_eq!(q.index(), if det == 0 { None } else { Some(det.unsigned_abs() as u128) });
        }
    }

    #[test]
    fn reduction_is_a_homomorphism(
        lengths in prop::collection::vec(1i64..=6, 2),
        a in prop::collection::vec(-20i64..=20, 2),
        b in prop::collection::vec(-20i64..=20, 2),
    ) {
        let c = ctx(2);
        let group = lattice::quotient(&GroupPresentation::periodic(&c, &lengths).unwrap()).unwrap();
        let (ma, mb) = (Monomial::new(a), Monomial::new(b));
        let ra = group.reduce_monomial(&ma).unwrap();
        let rb = group.reduce_monomial(&mb).unwrap();
        prop_assert_eq!(group.reduce_monomial(&ma.mul(&mb).unwrap()).unwrap(), group.add(ra, rb));
        prop_assert_eq!(group.reduce_monomial(&ma.inv().unwrap()).unwrap(), group.neg(ra));
        prop_assert_eq!(group.order() as i64, lengths.iter().product::<i64>());
    }
}

#[test]
fn fixtures_commute_on_their_boundaries() {
    for (name, code) in quantum_fixtures() {
        assert!(code.css_commutes_symbolically(), "{name}");
        let spec = fixtures::load(&name).unwrap();
        let inst = instantiate::instantiate(&code, &spec.presentation().unwrap()).unwrap();
        assert!(inst.commutes(), "{name}");
        assert!(inst.hx().mul_transpose(inst.hz()).unwrap().is_zero(), "{name}");
    }
}

#[test]
fn fixture_verdicts_match_connectivity_on_six_tori() {
    for (name, code) in quantum_fixtures() {
        let d = code.context().dim();
        let pres = GroupPresentation::periodic(code.context(), &vec![6; d]).unwrap();
        let inst = instantiate::instantiate(&code, &pres).unwrap();
        let finite = code.is_indecomposable_finite(&pres).unwrap();
        assert_eq!(finite, qubit_components(&inst) == 1, "{name}");
        if code.is_indecomposable().unwrap() {
            assert!(finite, "{name}");
        }
    }
}

#[test]
fn lift_then_compactify_recovers_the_code() {
    let mut checked = 0;
    for (name, code) in quantum_fixtures() {
        if !code.is_indecomposable().unwrap() {
            continue;
        }
        let Ok(l) = codes::lift_to_parent(&code) else { continue };
        assert!(l.verify().unwrap(), "{name}");
        let back = codes::compactify(&l.parent, &l.substitution, &l.twists).unwrap();
        assert!(back.shift_equivalent(&code.normalized().unwrap()), "{name}: {back:?}");
        checked += 1;
    }
    assert!(checked >= 5, "only {checked} fixtures lifted");
}

/// Small instances for the distance checks: every one has `n <= 24`.
fn small_suite() -> Vec<CodeInstance> {
    let mut suite = vec![
        fixture_instance("toric", Some(&[2, 2])),
        fixture_instance("toric", Some(&[3, 3])),
        fixture_instance("toric", Some(&[2, 3])),
        fixture_instance("toric", Some(&[2, 4])),
        fixture_instance("toric", Some(&[3, 4])),
    ];
    let c = ctx(2);
    let shapes: [&[i64]; 8] = [&[2, 2], &[2, 3], &[3, 3], &[2, 4], &[3, 4], &[2, 6], &[2, 5], &[4, 2]];
    let gens = [
        ("1 + x + y", "1 + x*y"),
        ("1 + x", "1 + x + y"),
        ("1 + x^2", "1 + y"),
        ("1 + x + y", "1 + x + x*y"),
        ("1 + x*y + y^2", "1 + x"),
        ("1 + x + x^2", "1 + y + y^2"),
        ("1 + x + x*y", "1 + y"),
        ("1 + y + x^2", "1 + x*y"),
    ];
    for shape in shapes {
        for (f, g) in gens {
            let code = TwoBlockCode::parse(&c, f, g).unwrap();
            let inst = instantiate::instantiate(&code, &GroupPresentation::periodic(&c, shape).unwrap()).unwrap();
            if inst.k() > 0 {
                suite.push(inst);
            }
        }
    }
    suite.retain(|i| i.n() <= 24);
    suite
}

fn check_witness(inst: &CodeInstance, r: &DistanceResult) {
    let w = r.witness.as_ref().expect("witness");
    let v = r.witness_vector().unwrap();
    assert_eq!(v.weight(), r.d_upper);
    assert!(distance::is_logical(inst, w.sector, &v));
}

#[test]
fn random_search_bounds_exact_distance() {
    let suite = small_suite();
    assert!(suite.len() >= 15, "suite has {} codes", suite.len());
    let mut equal = 0;
    for inst in &suite {
        let exact = distance::exact_distance(inst, 24, Execution::Parallel).unwrap();
        let random = distance::random_upper_bound(inst, 10_000, 1, Execution::Parallel).unwrap();
        assert!(random.d_upper >= exact.d_upper);
        check_witness(inst, &exact);
        check_witness(inst, &random);
        if random.d_upper == exact.d_upper {
            equal += 1;
        }
    }
    assert!(equal * 100 >= suite.len() * 95, "{equal} of {}", suite.len());
}

#[test]
fn dual_swaps_sector_distances() {
    for inst in small_suite() {
        let dual = instantiate::instantiate(&inst.code().dual(), inst.presentation()).unwrap();
        let a = distance::exact_distance(&inst, 24, Execution::Sequential).unwrap();
        let b = distance::exact_distance(&dual, 24, Execution::Sequential).unwrap();
        assert_eq!((a.d_x, a.d_z), (b.d_z, b.d_x));
        assert_eq!(a.k, b.k);
    }
}

#[test]
fn barrier_paths_replay_to_their_bottleneck() {
    for inst in small_suite().into_iter().filter(|i| i.n() <= 18) {
        for sector in [Sector::X, Sector::Z] {
            let r = barrier::logical_barrier(&inst, sector, barrier::DEFAULT_CAP).unwrap();
            let h = inst.detecting(sector);
            assert_eq!(barrier::path_bottleneck(h, &r.target, &r.path), Some(r.barrier));
            let target = fracton::gf2::BitVec::from_indices(inst.n(), &r.target);
            assert!(distance::is_logical(&inst, sector, &target));
            // Energy never exceeds the number of checks.
            assert!(r.barrier <= h.nrows());
        }
        let seq = barrier::code_barrier(&inst, barrier::DEFAULT_CAP, Execution::Sequential).unwrap();
        let par = barrier::code_barrier(&inst, barrier::DEFAULT_CAP, Execution::Parallel).unwrap();
        assert_eq!(seq.barrier, par.barrier);
        assert_eq!(seq.barrier, seq.x.barrier.min(seq.z.barrier));
    }
}
