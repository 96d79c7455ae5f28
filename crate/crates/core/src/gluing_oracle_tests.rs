use super::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn orbits(specs: &[(&str, i64)]) -> Vec<Generator> {
    specs.iter().map(|(id, d)| Generator::new(*id, *d)).collect()
}

fn curve(plus: &str, minus: &[&str], coeff: i64) -> CurveDatum {
    CurveDatum {
        plus: plus.into(),
        minus: minus.iter().map(|s| s.to_string()).collect(),
        sign: 1,
        coeff: q(coeff),
        levels: (1..=minus.len() as i64).map(|i| -q(i)).collect(),
    }
}

/// One curve γ → γ1 γ2 γ3 and planes on every end of both sides.
fn three_end_inventory() -> Inventory {
    let mut planes = Vec::new();
    for g in ["a", "b", "c"] {
        planes.push(PlaneDatum::new(g, Side::Plus, 1));
        planes.push(PlaneDatum::new(g, Side::Minus, 1));
    }
    Inventory {
        grading: Grading::Integer,
        orbits: orbits(&[("g", 1), ("a", 0), ("b", 0), ("c", 0)]),
        curves: vec![curve("g", &["a", "b", "c"], 1)],
        planes,
    }
}

fn plane_index(inv: &Inventory, orbit: &str, side: Side) -> usize {
    inv.planes.iter().position(|p| p.orbit == orbit && p.side == side).unwrap()
}

#[test]
fn normal_section_examples() {
    let inv = three_end_inventory();
    let bare = GluingShape::capped_curve(0, 3, &BTreeMap::new());
    let s = normal_section(&inv, &bare, &BTreeMap::from([(0, q(1))])).unwrap();
    assert_eq!(s.len(), 3);
    assert!(s.values().all(|c| c.constant() == q(1) && c.terms.len() == 1));

    let caps = BTreeMap::from([(1, plane_index(&inv, "b", Side::Minus))]);
    let capped = GluingShape::capped_curve(0, 3, &caps);
    let s = normal_section(&inv, &capped, &BTreeMap::from([(0, q(1))])).unwrap();
    let t = &s[&(0, 1)].terms;
    assert_eq!(t.len(), 2);
    assert_eq!(t[1], ExpTerm { coeff: q(-1), var: Some(plane_var((0, 1))), shift: q(-2) });
    let vars = BTreeMap::from([(plane_var((0, 1)), 0.5)]);
    let v = s[&(0, 1)].eval(2.0, &vars).unwrap();
    assert!((v - (1.0 - (-2.0f64 * 2.5).exp())).abs() < 1e-12);

    let z = normal_section(&inv, &bare, &BTreeMap::from([(0, q(0))])).unwrap();
    assert!(z.values().all(ExpSum::is_zero));
}

#[test]
fn solve_branch_examples() {
    let inv = three_end_inventory();
    let values = vec![q(1), q(2), q(3)];
    let id = MultisectionBranch::new(vec![0, 1, 2], values.clone()).unwrap();
    // uncapped second end, W⁻ plane on the first, W⁺ on the third
    let caps = BTreeMap::from([(0, plane_index(&inv, "a", Side::Minus)), (2, plane_index(&inv, "c", Side::Plus))]);
    let shape = GluingShape::capped_curve(0, 3, &caps);
    let sol = solve_branch(&inv, &shape, &id, 1.0).unwrap().expect("unique solution");
    assert_eq!(sol.c, q(2));
    // the section evaluated at the solution equals the branch
    let mut vars = BTreeMap::new();
    for (i, l) in &sol.ell {
        vars.insert(plane_var((0, *i)), *l);
    }
    let s = normal_section(&inv, &shape, &BTreeMap::from([(0, sol.c.clone())])).unwrap();
    for (e, c) in &s {
        let got = c.eval(1.0, &vars).unwrap();
        assert!((got - to_f64(id.value_at(e.1))).abs() < 1e-12, "{e:?}: {got}");
    }

    let caps = BTreeMap::from([(1, plane_index(&inv, "b", Side::Minus)), (2, plane_index(&inv, "c", Side::Minus))]);
    let shape = GluingShape::capped_curve(0, 3, &caps);
    assert!(solve_branch(&inv, &shape, &id, 1.0).unwrap().is_none());

    let single =
        Inventory { grading: Grading::Integer, orbits: orbits(&[("g", 1), ("a", 0)]), curves: vec![curve("g", &["a"], 1)], planes: vec![] };
    let shape = GluingShape::capped_curve(0, 1, &BTreeMap::new());
    let b = MultisectionBranch::new(vec![0], vec![qf(7, 3)]).unwrap();
    assert_eq!(solve_branch(&single, &shape, &b, 0.5).unwrap().unwrap().c, qf(7, 3));
}

#[test]
fn branch_existence_ignores_values_and_eps() {
    let inv = three_end_inventory();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..3 {
        for sides in (0..2).map(|_| [Side::Plus, Side::Minus]).multi_cartesian_product() {
            let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
            let caps: BTreeMap<usize, usize> =
                others.iter().zip(&sides).map(|(&i, &s)| (i, plane_index(&inv, ["a", "b", "c"][i], s))).collect();
            let shape = GluingShape::capped_curve(0, 3, &caps);
            for perm in (0..3).permutations(3) {
                let base = MultisectionBranch::new(perm.clone(), vec![q(1), q(2), q(3)]).unwrap();
                let expected = solve_branch(&inv, &shape, &base, 1.0).unwrap().is_some();
                for _ in 0..5 {
                    let mut v: Vec<Q> = (0..3).map(|_| qf(rng.gen_range(1..1000), rng.gen_range(1..50))).collect();
                    v.sort();
                    v.dedup();
                    if v.len() < 3 {
                        continue;
                    }
                    let b = MultisectionBranch::new(perm.clone(), v).unwrap();
                    let eps = rng.gen_range(0.01..5.0);
                    assert_eq!(solve_branch(&inv, &shape, &b, eps).unwrap().is_some(), expected);
                }
            }
        }
    }
}

#[test]
fn count_contribution_examples() {
    let inv = Inventory {
        grading: Grading::Integer,
        orbits: orbits(&[("g", 1), ("g1", 0), ("g2", 0)]),
        curves: vec![curve("g", &["g1", "g2"], 1)],
        planes: vec![PlaneDatum::new("g1", Side::Plus, 1), PlaneDatum::new("g1", Side::Minus, 1)],
    };
    assert_eq!(count_contribution(&inv, &GluingShape::plane(0), &[]).unwrap(), q(1));
    assert_eq!(count_contribution(&inv, &GluingShape::plane(1), &[]).unwrap(), q(-1));
    let shape = GluingShape::capped_curve(0, 2, &BTreeMap::from([(0, 1)]));
    let branches = all_branches(&[q(1), q(2)]).unwrap();
    assert_eq!(count_contribution(&inv, &shape, &branches).unwrap(), qf(1, 2));
    assert!(count_contribution(&inv, &shape, &branches[..1]).is_err());
}

#[test]
fn aggregate_examples() {
    let planes_only = Inventory {
        grading: Grading::Integer,
        orbits: orbits(&[("a", 0), ("b", 0)]),
        curves: vec![],
        planes: vec![PlaneDatum::new("a", Side::Plus, 1), PlaneDatum::new("b", Side::Plus, 1)],
    };
    let cmp = aggregate_differential(&planes_only).unwrap();
    assert!(cmp.agrees(), "{:?}", cmp.mismatches);
    assert!(cmp.counted.iter().all(|p| *p == Polynomial::one()));

    // ∂̌γ = 2 γ1 γ2 from two curve data in both orders, ε⁻(γ1) = 1
    let inv = Inventory {
        grading: Grading::Integer,
        orbits: orbits(&[("g", 1), ("g1", 0), ("g2", 0)]),
        curves: vec![curve("g", &["g1", "g2"], 1), curve("g", &["g2", "g1"], 1)],
        planes: vec![PlaneDatum::new("g1", Side::Minus, 1)],
    };
    let cmp = aggregate_differential(&inv).unwrap();
    assert!(cmp.agrees(), "{:?}", cmp.mismatches);
    let h = cmp.hats.lookup("g^").unwrap();
    let g2 = cmp.hats.lookup("g2^").unwrap();
    assert_eq!(cmp.counted[h], Polynomial::generator(g2));
}

#[test]
fn aggregate_matches_bilinearization_on_random_inventories() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nontrivial = 0;
    for round in 0..60 {
        let grading = if round % 3 == 0 { Grading::Cyclic(2) } else { Grading::Integer };
        let inv = random_inventory(&mut rng, &InventoryParams { grading, ..Default::default() });
        let cmp = aggregate_differential(&inv).unwrap();
        assert!(cmp.agrees(), "round {round}: {:?}\n{inv:#?}", cmp.mismatches);
        if cmp.counted.iter().any(|p| p.terms().any(|(m, _)| m.word_length() == 1)) {
            nontrivial += 1;
        }
    }
    assert!(nontrivial > 10, "only {nontrivial} inventories had linear terms");
}

#[test]
fn reordering_ends_keeps_the_count() {
    let inv = three_end_inventory();
    let caps = BTreeMap::from([(0, plane_index(&inv, "a", Side::Minus)), (2, plane_index(&inv, "c", Side::Plus))]);
    let base = count_contribution(&inv, &GluingShape::capped_curve(0, 3, &caps), &all_branches(&[q(1), q(2), q(3)]).unwrap()).unwrap();
    for perm in (0..3).permutations(3) {
        let mut re = inv.clone();
        re.curves[0].minus = perm.iter().map(|&i| inv.curves[0].minus[i].clone()).collect();
        re.curves[0].levels = perm.iter().map(|&i| inv.curves[0].levels[i].clone()).collect();
        let moved: BTreeMap<usize, usize> = perm.iter().enumerate().filter_map(|(new, &old)| caps.get(&old).map(|&p| (new, p))).collect();
        let shape = GluingShape::capped_curve(0, 3, &moved);
        let c = count_contribution(&re, &shape, &all_branches(&[q(1), q(2), q(3)]).unwrap()).unwrap();
        assert_eq!(c, base);
    }
}

#[test]
fn shapes_reject_bad_trees() {
    let inv = three_end_inventory();
    let mut s = GluingShape::capped_curve(0, 3, &BTreeMap::new());
    s.tree.children[0][0] = Some(0);
    assert!(s.validate(&inv).is_err());
    let wrong = GluingShape::capped_curve(0, 3, &BTreeMap::from([(0, plane_index(&inv, "b", Side::Plus))]));
    assert!(wrong.validate(&inv).is_err());
}

/// Root with one free end and a bad child with one free end and a plane.
fn two_vertex_tree() -> Tree {
    Tree {
        kinds: vec![VertexKind::Curve, VertexKind::Curve, VertexKind::Plane],
        children: vec![vec![None, Some(1)], vec![Some(2), None], vec![]],
        root: 0,
    }
}

#[test]
fn cancellation_on_two_curve_vertices() {
    let tree = two_vertex_tree();
    assert_eq!(bad_vertices(&tree), vec![false, true, false]);
    assert_eq!(symmetry_transpositions(&tree), vec![(0, 1)]);
    let base = SlotBranch {
        values: BTreeMap::from([((0, 0), q(3)), ((0, 1), q(5))]),
        perturbations: BTreeMap::from([((0, 0), vec![q(0), q(1)]), ((0, 1), vec![q(0), q(-2)])]),
    };
    let partner = transpose_branch(&tree, &base, (0, 1));
    let cert = verify_cancellation(&CancellationFamily { tree: tree.clone(), branches: vec![base, partner] }).unwrap();
    assert_eq!(cert.total, 0);
    // x + 3 + W = 0, x + 5 − 2W = 0 → W = 2/3
    assert_eq!(cert.zeros.len(), 2);
    assert_eq!(cert.zeros[0].point, vec![qf(-11, 3), qf(2, 3)]);
    assert_eq!(cert.zeros[0].sign, -cert.zeros[1].sign);

    let empty = verify_cancellation(&CancellationFamily { tree: tree.clone(), branches: vec![] }).unwrap();
    assert_eq!(empty.total, 0);
    let lone = SlotBranch { values: BTreeMap::from([((0, 0), q(3)), ((0, 1), q(5))]), perturbations: BTreeMap::new() };
    assert!(verify_cancellation(&CancellationFamily { tree, branches: vec![lone] }).is_err());
}

#[test]
fn cancellation_on_random_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut zeros = 0;
    for round in 0..40 {
        let fam = random_cancellation_family(&mut rng, 2 + round % 2, 4);
        let cert = verify_cancellation(&fam).unwrap();
        assert_eq!(cert.total, 0);
        zeros += cert.zeros.len();
    }
    assert!(zeros > 20, "only {zeros} zeros");
}
