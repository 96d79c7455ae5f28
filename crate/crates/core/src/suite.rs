//! The acceptance properties as seeded, size-parametrized checks. The
//! acceptance test target runs them at full size; `giroux selftest` runs
//! them at a reduced size.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bilinearization::{
    bilinearize, build_cylinder, rational_grid, search_augmentations_bounded, tensor_lift_defects, validate_augmentation, Augmentation,
};
use crate::criterion::{decide_criterion, homotopy_transport, linearized_homology, DEFAULT_WORD_BOUND};
use crate::error::{Error, Result};
use crate::gluing_oracle::{
    aggregate_differential, random_cancellation_family, random_inventory, solve_branch, CurveDatum, GluingShape, Inventory,
    InventoryParams, MultisectionBranch, PlaneDatum, Side,
};
use crate::graded_algebra::{CdgaPresentation, Generator, Grading, PresentationBuilder};
use crate::model_geometry::{cz_iterate, cz_parity_check, normal_spectrum, random_block_path, Block, BlockPath, SpectrumQuery};
use crate::random::{random_homotopic_instance, random_instance, RandomParams};
use crate::rational::{q, qf, Q};
use crate::surface_doubles::{ch_surface, enumerate_configs, giroux_tightness, SurfaceHomology, Tightness};

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub result: std::result::Result<String, String>,
    pub elapsed: Duration,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.result.is_ok()
    }

    pub fn line(&self) -> String {
        let (tag, msg) = match &self.result {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        format!("[{tag}] {:>2}. {} ({:.2}s): {msg}", self.id, self.name, self.elapsed.as_secs_f64())
    }
}

fn timed(id: usize, name: &'static str, f: impl FnOnce() -> Result<String>) -> CheckOutcome {
    let start = Instant::now();
    let result = f().map_err(|e| e.to_string());
    CheckOutcome { id, name, result, elapsed: start.elapsed() }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Internal(msg()))
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Counts per degree of the word-length ≤ w monomials in a graded basis,
/// by listing them. Independent of `symmetric_series`.
pub fn exterior_symmetric_count(grading: Grading, basis_degrees: &[i64], w: usize) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    let n = basis_degrees.len();
    for len in 0..=w {
        for word in (0..n).combinations_with_replacement(len) {
            let repeats_odd = word.windows(2).any(|p| p[0] == p[1] && grading.is_odd(grading.reduce(basis_degrees[p[0]])));
            if repeats_odd {
                continue;
            }
            let d = grading.reduce(word.iter().map(|&i| basis_degrees[i]).sum());
            *out.entry(d).or_insert(0) += 1;
        }
    }
    out
}

fn basis_degrees(dims: &BTreeMap<i64, usize>) -> Vec<i64> {
    dims.iter().flat_map(|(&d, &k)| std::iter::repeat_n(d, k)).collect()
}

fn mixed_grading(i: usize) -> Grading {
    if i.is_multiple_of(2) {
        Grading::Integer
    } else {
        Grading::Cyclic(2)
    }
}

// 1

/// Cylinder validity over a batch of random presentations. Each invalid
/// cylinder is matched against the generators whose symmetrized
/// differential fails to square to zero in the tensor algebra.
#[derive(Clone, Debug, Default)]
pub struct CylinderCensus {
    pub checked: usize,
    pub terms: usize,
    /// Instance index and the failing hat ids.
    pub failures: Vec<(usize, Vec<String>)>,
    /// Failures with no tensor-lift defect.
    pub unexplained: Vec<usize>,
}

pub fn cylinder_census(seed: u64, count: usize) -> Result<CylinderCensus> {
    let mut r = rng(seed, 1);
    let mut c = CylinderCensus { checked: count, ..Default::default() };
    for i in 0..count {
        let p = RandomParams { grading: mixed_grading(i), max_generators: 6, max_word_length: 3, ..Default::default() };
        let a = random_instance(&mut r, &p).presentation;
        let cyl = build_cylinder(&a)?;
        let report = cyl.cylinder.validate();
        c.terms += cyl.cylinder.differentials().iter().map(|d| d.len()).sum::<usize>();
        if !report.is_valid() {
            c.failures.push((i, report.violations.iter().map(|v| v.to_string()).collect()));
            if tensor_lift_defects(&a).is_empty() {
                c.unexplained.push(i);
            }
        }
    }
    Ok(c)
}

pub fn cylinder_squares_to_zero(seed: u64, count: usize) -> Result<String> {
    let c = cylinder_census(seed, count)?;
    ensure(c.failures.is_empty(), || {
        format!(
            "{} of {count} cylinders have ∂² ≠ 0 (first: instance {}: {})",
            c.failures.len(),
            c.failures[0].0,
            c.failures[0].1.join("; ")
        )
    })?;
    Ok(format!("{count} cylinders valid, {} differential terms", c.terms))
}

/// Checks that stay red by analysis rather than by a bug.
pub const DOCUMENTED_RED: [usize; 1] = [1];

/// Confirms the analysis behind a documented red check. For the cylinder:
/// every failure comes from a generator whose differential only squares
/// to zero modulo graded commutativity, and the smallest such algebra
/// (|a| = -1, |b| = |c| = 1, ∂c = ab, ∂z = abc) fails.
pub fn diagnose_red(id: usize, seed: u64, size: &SuiteSize) -> Result<String> {
    match id {
        1 => {
            let c = cylinder_census(seed, size.cylinders)?;
            ensure(c.unexplained.is_empty(), || format!("cylinder failures without a tensor defect: instances {:?}", c.unexplained))?;
            let a = PresentationBuilder::new(Grading::Integer)
                .generator("a", -1)
                .generator("b", 1)
                .generator("c", 1)
                .generator("z", 2)
                .term("c", q(1), &["a", "b"])
                .term("z", q(1), &["a", "b", "c"])
                .build()?;
            ensure(!build_cylinder(&a)?.cylinder.is_valid(), || "minimal commutativity example gives a valid cylinder".into())?;
            Ok(format!("{} of {} failures explained by commutativity defects", c.failures.len(), c.checked))
        }
        _ => Err(Error::Invalid(format!("check {id} is not a documented red check"))),
    }
}

/// A run is acceptable when every check passes, or fails only where
/// `DOCUMENTED_RED` says it must and the diagnosis holds.
pub fn suite_acceptable(outcomes: &[CheckOutcome], seed: u64, size: &SuiteSize) -> std::result::Result<(), String> {
    for o in outcomes.iter().filter(|o| !o.passed()) {
        if !DOCUMENTED_RED.contains(&o.id) {
            return Err(o.line());
        }
        diagnose_red(o.id, seed, size).map_err(|e| format!("{}; diagnosis failed: {e}", o.line()))?;
    }
    Ok(())
}

// 2

pub fn criterion_agreement(seed: u64, count: usize) -> Result<String> {
    let mut r = rng(seed, 2);
    let mut split = [0usize; 2];
    for i in 0..count {
        let grading = [Grading::Integer, Grading::Cyclic(2), Grading::Cyclic(4)][i % 3];
        let inst = random_instance(&mut r, &RandomParams { grading, ..Default::default() });
        for e in [&inst.left, &inst.right] {
            validate_augmentation(&inst.presentation, e).into_result()?;
        }
        let v = decide_criterion(&inst.presentation, &inst.left, &inst.right, DEFAULT_WORD_BOUND)?;
        let [a, b, c, d] = v.agreement();
        ensure(a == b && b == c && c == d, || format!("instance {i}: sub-results {:?}", v.agreement()))?;
        ensure(v.homotopy.as_ref().is_none_or(|k| k.verify(&inst.presentation, &inst.left, &inst.right)), || {
            format!("instance {i}: homotopy witness fails")
        })?;
        split[v.nonvanishing as usize] += 1;
    }
    Ok(format!("{} vanishing, {} nonvanishing, all four tests agree", split[0], split[1]))
}

// 3

fn intro_presentation() -> Result<CdgaPresentation> {
    PresentationBuilder::new(Grading::Integer).generator("x", 0).generator("y", 1).unit("y", q(1)).term("y", q(1), &["x", "x"]).build()
}

pub fn intro_has_no_augmentation(p_max: i64, q_max: i64) -> Result<String> {
    let a = intro_presentation()?;
    let x = a.algebra().lookup("x")?;
    let grid = rational_grid(p_max, q_max);
    for c in &grid {
        let mut e = Augmentation::zero(a.algebra());
        e.set(x, c.clone());
        ensure(!validate_augmentation(&a, &e).is_valid(), || format!("x ↦ {c} accepted"))?;
    }
    let found = search_augmentations_bounded(&a, &grid, 1 << 20)?;
    ensure(found.is_empty(), || format!("search found {} augmentations", found.len()))?;
    Ok(format!("{} candidates rejected", grid.len()))
}

// 4

pub fn surface_sweep(max_circles: usize, max_cover: usize) -> Result<String> {
    let mut counts = [0usize; 2];
    for genus in 0..=2 {
        for cfg in enumerate_configs(max_circles, genus) {
            let tight = giroux_tightness(&cfg)?;
            for m in 1..=max_cover {
                let (answer, verdict) = ch_surface(&cfg, m)?;
                ensure(answer.is_zero() == (tight == Tightness::Overtwisted), || format!("{cfg:?}, M = {m}: CH disagrees with tightness"))?;
                let (a, plus, minus) = crate::surface_doubles::surface_cdga(&cfg, m)?;
                let direct = decide_criterion(&a, &plus, &minus, DEFAULT_WORD_BOUND)?;
                ensure(direct.nonvanishing == verdict.nonvanishing, || format!("{cfg:?}, M = {m}: word bounds disagree"))?;
                if let SurfaceHomology::Exterior(gens) = &answer {
                    ensure(gens.len() == cfg.circles.len() * m, || format!("{cfg:?}: {} exterior generators", gens.len()))?;
                    let expected = exterior_symmetric_count(Grading::Cyclic(2), &vec![1; gens.len()], verdict.word_bound);
                    ensure(verdict.truncated_dims.as_ref() == Some(&expected), || {
                        format!("{cfg:?}, M = {m}: dims {:?}, exterior algebra {expected:?}", verdict.truncated_dims)
                    })?;
                }
                counts[verdict.nonvanishing as usize] += 1;
            }
        }
    }
    Ok(format!("{} overtwisted and {} tight (config, M) pairs", counts[0], counts[1]))
}

// 5

fn check_structure(label: &str, a: &CdgaPresentation, el: &Augmentation, er: &Augmentation, w: usize) -> Result<bool> {
    let v = decide_criterion(a, el, er, w)?;
    if !v.nonvanishing {
        return Ok(false);
    }
    let h = v.linearized.dims();
    let expected = exterior_symmetric_count(a.grading(), &basis_degrees(&h), w);
    let mut got = v.truncated_dims.clone().unwrap_or_default();
    got.retain(|_, d| *d > 0);
    ensure(got == expected, || format!("{label}: H(A^ε) dims {got:?}, S(H^ε) {expected:?}"))?;
    Ok(true)
}

/// Reruns the random instances of check 2 and the tight surface configurations of check 4 at word bound `w`.
pub fn symmetric_structure(seed: u64, count: usize, max_circles: usize, max_cover: usize, w: usize) -> Result<String> {
    let mut r = rng(seed, 2);
    let mut checked = 0;
    for i in 0..count {
        let grading = [Grading::Integer, Grading::Cyclic(2), Grading::Cyclic(4)][i % 3];
        let inst = random_instance(&mut r, &RandomParams { grading, ..Default::default() });
        checked += check_structure(&format!("instance {i}"), &inst.presentation, &inst.left, &inst.right, w)? as usize;
    }
    for genus in 0..=2 {
        for cfg in enumerate_configs(max_circles, genus) {
            for m in 1..=max_cover {
                let (a, plus, minus) = crate::surface_doubles::surface_cdga(&cfg, m)?;
                checked += check_structure(&format!("{cfg:?}, M = {m}"), &a, &plus, &minus, w)? as usize;
            }
        }
    }
    Ok(format!("{checked} nonvanishing cases match S(H^ε) at word bound {w}"))
}

// 6

pub fn homotopy_invariance(seed: u64, count: usize) -> Result<String> {
    let mut r = rng(seed, 6);
    let (mut moved, mut corrected) = (0, 0);
    for i in 0..count {
        let h = random_homotopic_instance(&mut r, mixed_grading(i));
        let map = homotopy_transport(&h.presentation, &h.left, &h.left1, &h.homotopy, &h.right)?;
        let target = bilinearize(&h.presentation, &h.left, &h.right)?;
        let source = bilinearize(&h.presentation, &h.left1, &h.right)?;
        let failures = map.intertwining_failures(&target, &source);
        ensure(failures.is_empty(), || format!("instance {i}: Φ fails to intertwine on {failures:?}"))?;
        ensure(!map.determinant().is_zero(), || format!("instance {i}: Φ is not invertible"))?;
        let (d0, d1) = (linearized_homology(&target)?.dims(), linearized_homology(&source)?.dims());
        ensure(d0 == d1, || format!("instance {i}: H dims {d0:?} vs {d1:?}"))?;
        moved += (h.left != h.left1) as usize;
        corrected += !map.formula_failures.is_empty() as usize;
    }
    Ok(format!("{count} transports intertwine, {moved} moved εl, {corrected} needed the exact correction"))
}

// 7

pub fn gluing_equivalence(seed: u64, count: usize) -> Result<String> {
    let mut r = rng(seed, 7);
    let (mut shapes, mut nontrivial) = (0, 0);
    for i in 0..count {
        let grading = if i % 4 == 3 { Grading::Cyclic(2) } else { Grading::Integer };
        let inv = random_inventory(&mut r, &InventoryParams { max_orbits: 5, max_ends: 4, grading });
        ensure(inv.curves.iter().all(|c| c.minus.len() <= 4), || format!("inventory {i}: more than 4 ends"))?;
        let cmp = aggregate_differential(&inv)?;
        ensure(cmp.agrees() && cmp.counted == cmp.expected, || format!("inventory {i}: {}", cmp.mismatches.join("; ")))?;
        shapes += cmp.shapes;
        nontrivial += cmp.expected.iter().any(|p| !p.is_zero()) as usize;
    }
    Ok(format!("{count} inventories agree with the bilinearization ({shapes} shapes, {nontrivial} nonzero differentials)"))
}

// 8

fn three_end_inventory() -> Inventory {
    let mut orbits = vec![Generator::new("g", 1)];
    let mut planes = Vec::new();
    for o in ["a", "b", "c"] {
        orbits.push(Generator::new(o, 0));
        planes.push(PlaneDatum::new(o, Side::Minus, 1));
        planes.push(PlaneDatum::new(o, Side::Plus, 1));
    }
    let curve = CurveDatum {
        plus: "g".into(),
        minus: vec!["a".into(), "b".into(), "c".into()],
        sign: 1,
        coeff: q(1),
        levels: vec![q(-1), q(-2), q(-3)],
    };
    Inventory { grading: Grading::Integer, orbits, curves: vec![curve], planes }
}

/// Rank of end `e` among the branch values.
fn rank(b: &MultisectionBranch, e: usize) -> usize {
    let v = b.value_at(e);
    b.values.iter().filter(|w| *w < v).count()
}

pub fn lemma_table(seed: u64, resamples: usize) -> Result<String> {
    let inv = three_end_inventory();
    inv.validate()?;
    let mut r = rng(seed, 8);
    let mut rows = 0;
    let mut solvable = 0;
    for k in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
        for sides in others.iter().map(|_| [Side::Minus, Side::Plus]).multi_cartesian_product() {
            let caps: BTreeMap<usize, usize> = others.iter().zip(&sides).map(|(&i, &s)| (i, 2 * i + (s == Side::Plus) as usize)).collect();
            let shape = GluingShape::capped_curve(0, 3, &caps);
            for perm in (0..3).permutations(3) {
                let base = MultisectionBranch::new(perm.clone(), vec![q(1), q(2), q(3)])?;
                let rk = rank(&base, k);
                let predicted = others.iter().zip(&sides).all(|(&i, s)| match s {
                    Side::Minus => rank(&base, i) < rk,
                    Side::Plus => rank(&base, i) > rk,
                });
                let got = solve_branch(&inv, &shape, &base, 1.0)?.is_some();
                ensure(got == predicted, || format!("k = {k}, sides {sides:?}, perm {perm:?}: solver {got}, table {predicted}"))?;
                for _ in 0..resamples {
                    let mut v: Vec<Q> = (0..3).map(|_| qf(r.gen_range(1..10_000), r.gen_range(1..100))).collect();
                    v.sort();
                    v.dedup();
                    if v.len() < 3 {
                        continue;
                    }
                    let b = MultisectionBranch::new(perm.clone(), v)?;
                    let eps = r.gen_range(0.001..10.0);
                    let again = solve_branch(&inv, &shape, &b, eps)?.is_some();
                    ensure(again == predicted, || format!("k = {k}, perm {perm:?}: resampled existence changed"))?;
                }
                rows += 1;
                solvable += predicted as usize;
            }
        }
    }
    Ok(format!("{rows} (k, I⁻, I⁺, branch) rows match, {solvable} solvable"))
}

// 9

pub fn cancellation(seed: u64, count: usize) -> Result<String> {
    let mut r = rng(seed, 9);
    let mut zeros = 0;
    for i in 0..count {
        let curves = 2 + i % 2;
        let family = random_cancellation_family(&mut r, curves, 3);
        let cert = crate::gluing_oracle::verify_cancellation(&family)?;
        ensure(cert.total == 0, || format!("family {i}: total {}", cert.total))?;
        zeros += cert.zeros.len();
    }
    Ok(format!("{count} families cancel exactly, {zeros} zeros paired"))
}

// 10

pub fn cz_identities(seed: u64, count: usize, spectra: usize) -> Result<String> {
    let mut r = rng(seed, 10);
    let paths: Vec<BlockPath> = (0..count).map(|_| random_block_path(&mut r, 4)).collect();
    let mut iterates = 0;
    for (i, p) in paths.iter().enumerate() {
        let has_rotation = p.blocks.iter().any(|b| matches!(b, Block::SmallRotation { .. }));
        let max_m = if has_rotation { 1 } else { 4 };
        for m in 1..=max_m {
            let c = cz_parity_check(p, m)?;
            ensure(c.holds, || format!("path {i}, m = {m}: CZ {} with n = {} but det sign {}", c.cz, c.n, c.det_sign))?;
            iterates += 1;
        }
    }
    let mut pairs = 0;
    for (p, q) in paths.iter().tuple_combinations() {
        let q = BlockPath { blocks: q.blocks.clone(), action: p.action.clone() };
        let sum = p.concat(&q)?;
        ensure(cz_iterate(&sum, 1)? == cz_iterate(p, 1)? + cz_iterate(&q, 1)?, || format!("additivity fails on {p:?} ⊕ {q:?}"))?;
        pairs += 1;
    }
    for _ in 0..spectra {
        let s = qf(r.gen_range(1..50), r.gen_range(1..10));
        let cutoff = &s + qf(r.gen_range(1..20), r.gen_range(1..10));
        let t = &cutoff + qf(r.gen_range(1..20), r.gen_range(1..10));
        // 2π/a > Λ + max(ε) keeps every m ≥ 1 branch outside the window
        let bound = crate::rational::to_f64(&t) + crate::rational::to_f64(&cutoff);
        let a = qf(6, ((bound.ceil() as i64) + 1).max(1));
        let query = SpectrumQuery { eps_tau: t.clone(), eps_sigma: s.clone(), action: a, cutoff, small_eps: true };
        let sp = normal_spectrum(&query)?;
        let window: Vec<Option<Q>> = sp.window.iter().map(|e| e.exact.clone()).collect();
        ensure(window == vec![Some(-s.clone())], || format!("window {window:?} for ε_σ = {s}"))?;
        let dist: Vec<Option<Q>> = sp.distinguished.iter().map(|e| e.exact.clone()).collect();
        ensure(dist == vec![Some(-s.clone()), Some(t.clone())], || format!("distinguished {dist:?}"))?;
        let long = SpectrumQuery { action: q(10_000), ..query };
        ensure(matches!(normal_spectrum(&long), Err(Error::Invalid(_))), || "long action accepted under the flag".into())?;
    }
    Ok(format!("parity on {iterates} iterates of {count} paths, additivity on {pairs} pairs, {spectra} spectra"))
}

/// Sizes for one run of the suite.
#[derive(Clone, Copy, Debug)]
pub struct SuiteSize {
    pub cylinders: usize,
    pub criteria: usize,
    pub grid: (i64, i64),
    pub circles: usize,
    pub covers: usize,
    pub structure_word_bound: usize,
    pub homotopies: usize,
    pub inventories: usize,
    pub resamples: usize,
    pub families: usize,
    pub paths: usize,
    pub spectra: usize,
}

impl SuiteSize {
    pub const FULL: SuiteSize = SuiteSize {
        cylinders: 200,
        criteria: 100,
        grid: (16, 8),
        circles: 3,
        covers: 3,
        structure_word_bound: 4,
        homotopies: 50,
        inventories: 100,
        resamples: 5,
        families: 50,
        paths: 500,
        spectra: 50,
    };

    pub const QUICK: SuiteSize = SuiteSize {
        cylinders: 40,
        criteria: 20,
        grid: (16, 8),
        circles: 2,
        covers: 2,
        structure_word_bound: 4,
        homotopies: 10,
        inventories: 20,
        resamples: 2,
        families: 10,
        paths: 100,
        spectra: 10,
    };
}

pub const CHECK_NAMES: [&str; 10] = [
    "cylinder differential squares to zero",
    "criterion four-way agreement",
    "intro algebra has no augmentation",
    "surface sweep",
    "S(H) structure",
    "homotopy invariance",
    "gluing oracle equivalence",
    "branch existence table",
    "N ≥ 2 cancellation",
    "CZ identities",
];

pub fn run_check(id: usize, seed: u64, size: &SuiteSize) -> CheckOutcome {
    let name = CHECK_NAMES[id - 1];
    timed(id, name, || match id {
        1 => cylinder_squares_to_zero(seed, size.cylinders),
        2 => criterion_agreement(seed, size.criteria),
        3 => intro_has_no_augmentation(size.grid.0, size.grid.1),
        4 => surface_sweep(size.circles, size.covers),
        5 => symmetric_structure(seed, size.criteria, size.circles, size.covers, size.structure_word_bound),
        6 => homotopy_invariance(seed, size.homotopies),
        7 => gluing_equivalence(seed, size.inventories),
        8 => lemma_table(seed, size.resamples),
        9 => cancellation(seed, size.families),
        10 => cz_identities(seed, size.paths, size.spectra),
        _ => Err(Error::Invalid(format!("no check {id}"))),
    })
}

pub fn run_suite(seed: u64, size: &SuiteSize) -> Vec<CheckOutcome> {
    (1..=10).map(|id| run_check(id, seed, size)).collect()
}
