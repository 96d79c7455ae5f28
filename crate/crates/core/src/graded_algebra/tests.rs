use super::*;
use crate::rational::{q, Q};

fn xyz() -> GradedAlgebra {
    GradedAlgebra::new(Grading::Integer, vec![Generator::new("x", 0), Generator::new("y", 1), Generator::new("z", 1)]).unwrap()
}

fn poly(alg: &GradedAlgebra, terms: &[(i64, &[&str])]) -> Polynomial {
    let t: Vec<(Q, Vec<usize>)> = terms.iter().map(|(c, w)| (q(*c), w.iter().map(|s| alg.lookup(s).unwrap()).collect())).collect();
    alg.polynomial_from_words(&t)
}

#[test]
fn normalize_examples() {
    let alg = xyz();
    let (s, m) = alg.normalize_ids(&[]).unwrap();
    assert_eq!((s, m.unwrap()), (1, Monomial::one()));
    assert_eq!(alg.normalize_ids(&["y", "y"]).unwrap().0, 0);
    let (s, m) = alg.normalize_ids(&["z", "y"]).unwrap();
    assert_eq!(s, -1);
    assert_eq!(alg.format_monomial(&m.unwrap()), "y*z");
    let (s, m) = alg.normalize_ids(&["y", "x", "z"]).unwrap();
    assert_eq!(s, 1);
    assert_eq!(alg.format_monomial(&m.unwrap()), "x*y*z");
    assert!(alg.normalize_ids(&["w"]).is_err());
}

#[test]
fn normalize_is_idempotent() {
    let alg = xyz();
    let (_, m) = alg.normalize_ids(&["z", "x", "x", "y"]).unwrap();
    let m = m.unwrap();
    let (s2, m2) = alg.normalize_word(&m.word());
    assert_eq!((s2, m2.unwrap()), (1, m));
}

#[test]
fn multiply_examples() {
    let alg = xyz();
    let p = poly(&alg, &[(1, &["x"]), (1, &["y"])]);
    let m = poly(&alg, &[(1, &["x"]), (-1, &["y"])]);
    assert_eq!(alg.multiply(&p, &m), poly(&alg, &[(1, &["x", "x"])]));
    let y = poly(&alg, &[(1, &["y"])]);
    assert!(alg.multiply(&y, &y).is_zero());
    assert_eq!(alg.multiply(&Polynomial::one(), &p), p);
    let z = poly(&alg, &[(1, &["z"])]);
    assert_eq!(alg.multiply(&z, &y), alg.multiply(&y, &z).scaled(&q(-1)));
}

fn intro_yz() -> CdgaPresentation {
    PresentationBuilder::new(Grading::Integer)
        .generator("x", 0)
        .generator("y", 1)
        .generator("z", 1)
        .unit("y", q(1))
        .term("y", q(1), &["x", "x"])
        .term("z", q(1), &["x"])
        .build()
        .unwrap()
}

#[test]
fn differential_examples() {
    let a = intro_yz();
    let alg = a.algebra();
    assert!(a.apply_differential(&Polynomial::one()).is_zero());
    let yz = poly(alg, &[(1, &["y", "z"])]);
    let expect = poly(alg, &[(1, &["z"]), (1, &["x", "x", "z"]), (-1, &["x", "y"])]);
    assert_eq!(a.apply_differential(&yz), expect);

    let b = PresentationBuilder::new(Grading::Integer)
        .generator("x", 0)
        .generator("y", 1)
        .unit("y", q(1))
        .term("y", q(1), &["x", "x"])
        .build()
        .unwrap();
    let xy = poly(b.algebra(), &[(1, &["x", "y"])]);
    assert_eq!(b.apply_differential(&xy), poly(b.algebra(), &[(1, &["x"]), (1, &["x", "x", "x"])]));
}

#[test]
fn validation_examples() {
    let free = CdgaPresentation::free(xyz());
    assert!(free.is_valid());
    let intro = PresentationBuilder::new(Grading::Integer)
        .generator("x", 0)
        .generator("y", 1)
        .unit("y", q(1))
        .term("y", q(1), &["x", "x"])
        .build()
        .unwrap();
    assert!(intro.is_valid());
    let bad = PresentationBuilder::new(Grading::Integer).generator("x", 1).generator("y", 1).term("y", q(1), &["x"]).build().unwrap();
    let r = bad.validate();
    assert!(matches!(r.violations[..], [Violation::Degree { .. }]));
    // ∂z = x with ∂x ≠ 0 in a way that breaks ∂²: here intro_yz has ∂²z = ∂x = 0.
    assert!(intro_yz().is_valid());
    let sq = PresentationBuilder::new(Grading::Integer)
        .generator("a", 2)
        .generator("b", 1)
        .generator("c", 0)
        .term("a", q(1), &["b"])
        .unit("b", q(1))
        .build()
        .unwrap();
    assert!(sq.validate().violations.iter().any(|v| matches!(v, Violation::SquareNonzero { .. })));
}

#[test]
fn action_filtration() {
    let a = PresentationBuilder::new(Grading::Integer)
        .generator_with_action("x", 0, q(1))
        .generator_with_action("y", 1, q(1))
        .term("y", q(1), &["x", "x"])
        .build()
        .unwrap();
    assert!(a.validate().violations.iter().any(|v| matches!(v, Violation::Action { .. })));
    let mixed = GradedAlgebra::new(Grading::Integer, vec![Generator::new("x", 0).with_action(q(1)), Generator::new("y", 1)]);
    assert!(mixed.is_err());
}

#[test]
fn decompose_examples() {
    let a = PresentationBuilder::new(Grading::Integer)
        .generator("x", 0)
        .generator("y", 1)
        .generator("z", 1)
        .generator("w", 1)
        .unit("y", q(1))
        .term("y", q(1), &["x", "x"])
        .term("z", q(1), &["x", "y"])
        .build()
        .unwrap();
    let alg = a.algebra();
    let y = alg.lookup("y").unwrap();
    let parts = a.decompose_differential(y);
    assert_eq!(parts.len(), 3);
    assert_eq!(parts[0], Polynomial::one());
    assert!(parts[1].is_zero());
    assert_eq!(parts[2], poly(alg, &[(1, &["x", "x"])]));
    let z = alg.lookup("z").unwrap();
    let parts = a.decompose_differential(z);
    assert_eq!(parts.len(), 3);
    assert!(parts[0].is_zero() && parts[1].is_zero());

    let b = PresentationBuilder::new(Grading::cyclic(2).unwrap())
        .generator("x", 0)
        .generator("y", 1)
        .generator("z", 1)
        .generator("w", 1)
        .unit("w", q(3))
        .term("w", q(2), &["x"])
        .term("w", q(-5), &["x", "y", "z"])
        .build()
        .unwrap();
    let w = b.algebra().lookup("w").unwrap();
    let lens: Vec<usize> = b.decompose_differential(w).iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(n, _)| n).collect();
    assert_eq!(lens, vec![0, 1, 3]);
}

#[test]
fn empty_presentation_is_valid() {
    let a = CdgaPresentation::free(GradedAlgebra::new(Grading::Integer, vec![]).unwrap());
    assert!(a.is_valid());
}
