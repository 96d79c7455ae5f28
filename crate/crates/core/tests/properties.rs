//! Property tests over seeded random instances.

use giroux_core::bilinearization::{bilinearize, validate_augmentation};
use giroux_core::criterion::{decide_criterion, fundamental_class, linearized_homology, solve_homotopy};
use giroux_core::gluing_oracle::{
    aggregate_differential, all_branches, random_cancellation_family, random_inventory, verify_cancellation, InventoryParams,
};
use giroux_core::graded_algebra::{CdgaPresentation, GradedAlgebra, Grading, Monomial, Polynomial};
use giroux_core::model_geometry::{cz_index, cz_iterate, cz_parity_check, mode_eigenvalues, random_block_path, Block, SpectrumQuery};
use giroux_core::random::{random_homotopic_instance, random_instance, RandomParams};
use giroux_core::rational::{factorial, q, qf};
use giroux_core::Q;
use num_traits::Zero;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grading_for(i: u8) -> Grading {
    [Grading::Integer, Grading::Cyclic(2), Grading::Cyclic(4)][i as usize % 3]
}

fn random_monomial(rng: &mut ChaCha8Rng, alg: &GradedAlgebra, max_len: usize) -> Option<(i8, Monomial)> {
    let len = rng.gen_range(0..=max_len);
    let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..alg.len())).collect();
    let (s, m) = alg.normalize_word(&word);
    m.map(|m| (s, m))
}

fn random_polynomial(rng: &mut ChaCha8Rng, alg: &GradedAlgebra, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero();
    for _ in 0..terms {
        if let Some((_, m)) = random_monomial(rng, alg, 3) {
            p.add_term(m, qf(rng.gen_range(-3..=3), rng.gen_range(1..=2)));
        }
    }
    p
}

fn sign_of(alg: &GradedAlgebra, a: &Monomial, b: &Monomial) -> Q {
    if alg.monomial_is_odd(a) && alg.monomial_is_odd(b) {
        q(-1)
    } else {
        q(1)
    }
}

fn valid_cdga(rng: &mut ChaCha8Rng, g: Grading) -> CdgaPresentation {
    random_instance(rng, &RandomParams { grading: g, ..Default::default() }).presentation
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn normalizing_twice_changes_nothing(seed in any::<u64>(), g in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = valid_cdga(&mut rng, grading_for(g)).algebra().clone();
        if let Some((_, m)) = random_monomial(&mut rng, &alg, 5) {
            let (s, again) = alg.normalize_word(&m.word());
            prop_assert_eq!(s, 1);
            prop_assert_eq!(again, Some(m));
        }
    }

    #[test]
    fn products_are_graded_commutative(seed in any::<u64>(), g in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = valid_cdga(&mut rng, grading_for(g)).algebra().clone();
        let (Some((_, a)), Some((_, b))) = (random_monomial(&mut rng, &alg, 3), random_monomial(&mut rng, &alg, 3)) else {
            return Ok(());
        };
        let (pa, pb) = (Polynomial::term(a.clone(), q(2)), Polynomial::term(b.clone(), qf(-1, 3)));
        let lhs = alg.multiply(&pa, &pb);
        let rhs = alg.multiply(&pb, &pa).scaled(&sign_of(&alg, &a, &b));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn differential_squares_to_zero_and_is_a_derivation(seed in any::<u64>(), g in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = valid_cdga(&mut rng, grading_for(g));
        prop_assert!(a.is_valid());
        let alg = a.algebra();
        let p = random_polynomial(&mut rng, alg, 4);
        prop_assert!(a.apply_differential(&a.apply_differential(&p)).is_zero());
        if let (Some((_, m)), q2) = (random_monomial(&mut rng, alg, 2), random_polynomial(&mut rng, alg, 3)) {
            let pm = Polynomial::term(m.clone(), q(1));
            let lhs = a.apply_differential(&alg.multiply(&pm, &q2));
            let mut rhs = alg.multiply(&a.apply_differential(&pm), &q2);
            let s = if alg.monomial_is_odd(&m) { q(-1) } else { q(1) };
            rhs.add_scaled(&alg.multiply(&pm, &a.apply_differential(&q2)), &s);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn corrupted_differentials_are_rejected(seed in any::<u64>(), g in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = valid_cdga(&mut rng, grading_for(g));
        let targets: Vec<usize> = (0..a.len()).filter(|&i| !a.differential_of(i).is_zero()).collect();
        let Some(&i) = targets.choose(&mut rng) else { return Ok(()) };
        let mut d = a.differentials().to_vec();
        let (m, c) = d[i].terms().next().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        d[i].add_term(m, c * qf(1, 2));
        let bad = CdgaPresentation::new(a.algebra().clone(), d).unwrap();
        let breaks = (0..bad.len()).any(|j| !bad.apply_differential(bad.differential_of(j)).is_zero());
        if breaks {
            prop_assert!(!bad.validate().is_valid());
        }
    }

    #[test]
    fn swapping_augmentations_negates_the_unit_part(seed in any::<u64>(), g in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, &RandomParams { grading: grading_for(g), ..Default::default() });
        let a = &inst.presentation;
        let lr = bilinearize(a, &inst.left, &inst.right).unwrap();
        let rl = bilinearize(a, &inst.right, &inst.left).unwrap();
        prop_assert_eq!(&lr.module, &rl.module);
        prop_assert!(lr.fundamental.iter().zip(&rl.fundamental).all(|(x, y)| (x + y).is_zero()));
        let v1 = decide_criterion(a, &inst.left, &inst.right, 3).unwrap();
        let v2 = decide_criterion(a, &inst.right, &inst.left, 3).unwrap();
        prop_assert_eq!(v1.nonvanishing, v2.nonvanishing);
        prop_assert_eq!(v1.linearized.dims(), v2.linearized.dims());
    }

    #[test]
    fn homotopy_exists_exactly_when_the_class_vanishes(seed in any::<u64>(), g in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, &RandomParams { grading: grading_for(g), ..Default::default() });
        let a = &inst.presentation;
        let pkg = bilinearize(a, &inst.left, &inst.right).unwrap();
        let fc = fundamental_class(&pkg, &linearized_homology(&pkg).unwrap());
        let k = solve_homotopy(a, &inst.left, &inst.right).unwrap();
        prop_assert_eq!(k.is_some(), fc.is_zero);
        if let Some(k) = k {
            prop_assert!(k.verify(a, &inst.left, &inst.right));
        }
    }

    #[test]
    fn homotopic_left_augmentations_give_equal_dims(seed in any::<u64>(), g in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_homotopic_instance(&mut rng, grading_for(g));
        prop_assert!(validate_augmentation(&h.presentation, &h.left1).is_valid());
        let d0 = linearized_homology(&bilinearize(&h.presentation, &h.left, &h.right).unwrap()).unwrap().dims();
        let d1 = linearized_homology(&bilinearize(&h.presentation, &h.left1, &h.right).unwrap()).unwrap().dims();
        prop_assert_eq!(d0, d1);
    }

    #[test]
    fn reducing_the_grading_keeps_the_verdict(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, &RandomParams::default());
        let v = decide_criterion(&inst.presentation, &inst.left, &inst.right, 3).unwrap();
        for d in [2, 4] {
            let r = inst.presentation.reduce_grading(d).unwrap();
            let w = decide_criterion(&r, &inst.left, &inst.right, 3).unwrap();
            prop_assert_eq!(v.nonvanishing, w.nonvanishing);
        }
    }

    #[test]
    fn cz_parity_and_additivity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_block_path(&mut rng, 4);
        let mut q2 = random_block_path(&mut rng, 3);
        q2.action = p.action.clone();
        // Iterates of a small rotation leave the nondegenerate range.
        let top = if p.blocks.iter().any(|b| matches!(b, Block::SmallRotation { .. })) { 1 } else { 3 };
        for m in 1..=top {
            let c = cz_parity_check(&p, m).unwrap();
            prop_assert!(c.holds);
            prop_assert_eq!(c.cz, cz_iterate(&p, m).unwrap());
        }
        let pq = p.concat(&q2).unwrap();
        prop_assert_eq!(cz_index(&pq).unwrap(), cz_index(&p).unwrap() + cz_index(&q2).unwrap());
    }

    #[test]
    fn spectrum_branches_swap_under_eps_exchange(t in 1i64..20, s in 1i64..20, a in 1i64..20, m in 1u32..6) {
        let query = |t: i64, s: i64| SpectrumQuery { eps_tau: qf(t, 10), eps_sigma: qf(s, 10), action: q(a), cutoff: q(1), small_eps: false };
        let [lo, hi] = mode_eigenvalues(&query(t, s), m);
        let [lo2, hi2] = mode_eigenvalues(&query(s, t), m);
        prop_assert!((lo + hi2).abs() < 1e-12 && (hi + lo2).abs() < 1e-12);
    }

    #[test]
    fn gluing_counts_match_and_ignore_end_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inv = random_inventory(&mut rng, &InventoryParams::default());
        let cmp = aggregate_differential(&inv).unwrap();
        prop_assert!(cmp.agrees(), "{:?}", cmp.mismatches);
        for c in &mut inv.curves {
            let mut idx: Vec<usize> = (0..c.minus.len()).collect();
            idx.shuffle(&mut rng);
            c.minus = idx.iter().map(|&i| c.minus[i].clone()).collect();
            c.levels = idx.iter().map(|&i| c.levels[i].clone()).collect();
        }
        let again = aggregate_differential(&inv).unwrap();
        prop_assert_eq!(cmp.counted, again.counted);
    }

    #[test]
    fn branch_families_have_factorial_size(n in 1usize..6) {
        let values: Vec<Q> = (1..=n as i64).map(q).collect();
        let b = all_branches(&values).unwrap();
        prop_assert_eq!(Q::from_integer(b.len().into()), Q::from_integer(factorial(n)));
    }

    #[test]
    fn cancellation_totals_zero(seed in any::<u64>(), curves in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_cancellation_family(&mut rng, curves, 2);
        let cert = verify_cancellation(&fam).unwrap();
        prop_assert_eq!(cert.total, 0);
    }
}
