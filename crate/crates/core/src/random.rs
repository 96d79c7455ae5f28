//! Seeded generators of valid random instances for fuzzing and acceptance runs.

use itertools::Itertools;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::bilinearization::{validate_augmentation, Augmentation};
use crate::criterion::{homotopic_augmentation, HomotopyCertificate};
use crate::graded_algebra::{CdgaPresentation, Generator, GradedAlgebra, Grading, Monomial, Polynomial};
use crate::rational::{q, qf, Q};

#[derive(Clone, Debug)]
pub struct RandomParams {
    pub max_generators: usize,
    pub max_word_length: usize,
    pub grading: Grading,
    /// Augmentation values on degree-0 generators are drawn from −r..=r.
    pub augmentation_range: i64,
    /// Probability that the two augmentations coincide.
    pub equal_augmentations: f64,
    /// Degrees to draw from instead of the default mix.
    pub degree_pool: Option<Vec<i64>>,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            max_generators: 6,
            max_word_length: 3,
            grading: Grading::Integer,
            augmentation_range: 2,
            equal_augmentations: 0.3,
            degree_pool: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub presentation: CdgaPresentation,
    pub left: Augmentation,
    pub right: Augmentation,
}

fn random_degree<R: Rng>(rng: &mut R, g: Grading, pool: Option<&[i64]>) -> i64 {
    if let Some(p) = pool {
        return g.reduce(*p.choose(rng).expect("nonempty degree pool"));
    }
    match g {
        Grading::Integer => *[-1, 0, 0, 0, 1, 1, 1, 2].choose(rng).unwrap(),
        Grading::Cyclic(d) => rng.gen_range(0..d as i64),
    }
}

fn random_coeff<R: Rng>(rng: &mut R) -> Q {
    let c = [q(1), q(-1), q(2), q(-2), qf(1, 2), qf(-3, 2)];
    c.choose(rng).unwrap().clone()
}

/// All monomials of word length 1..=max in generators `0..n`.
fn monomials(alg: &GradedAlgebra, n: usize, max: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for len in 1..=max {
        for w in (0..n).combinations_with_replacement(len) {
            if let (_, Some(m)) = alg.normalize_word(&w) {
                out.push(m);
            }
        }
    }
    out
}

/// A valid presentation with two valid augmentations, built triangularly:
/// ∂ of each new generator is a combination of cycles in earlier ones.
pub fn random_instance<R: Rng>(rng: &mut R, p: &RandomParams) -> RandomInstance {
    let n = rng.gen_range(1..=p.max_generators);
    let gens: Vec<Generator> =
        (0..n).map(|i| Generator::new(format!("g{i}"), random_degree(rng, p.grading, p.degree_pool.as_deref()))).collect();
    let alg = GradedAlgebra::new(p.grading, gens).expect("generated ids are unique");
    let r = p.augmentation_range;
    let mut el = Augmentation::zero(&alg);
    let mut er = Augmentation::zero(&alg);
    let same = rng.gen_bool(p.equal_augmentations);
    for i in alg.generators_in_degree(0) {
        let a = q(rng.gen_range(-r..=r));
        el.set(i, a.clone());
        er.set(i, if same { a } else { q(rng.gen_range(-r..=r)) });
    }
    let mut diff = vec![Polynomial::zero(); n];
    for i in 0..n {
        let target = p.grading.shift(alg.degree(i), -1);
        let partial = CdgaPresentation::new(alg.clone(), diff.clone()).expect("sizes match");
        let mut cands: Vec<Polynomial> = Vec::new();
        for m in monomials(&alg, i, p.max_word_length) {
            let d = alg.monomial_degree(&m);
            let dm = partial.differential_monomial(&m);
            if d == target && dm.is_zero() {
                cands.push(Polynomial::term(m.clone(), q(1)));
            }
            if p.grading.shift(d, -1) == target && !dm.is_zero() && dm.max_word_length().unwrap_or(0) <= p.max_word_length {
                cands.push(dm);
            }
        }
        if cands.is_empty() || rng.gen_bool(0.2) {
            continue;
        }
        let k = rng.gen_range(1..=cands.len().min(3));
        let chosen: Vec<Polynomial> = cands.choose_multiple(rng, k).cloned().collect();
        let mut coeffs: Vec<Q> = (0..k).map(|_| random_coeff(rng)).collect();
        if target == 0 {
            let gaps: Vec<Q> = chosen.iter().map(|c| el.eval(c) - er.eval(c)).collect();
            let d: Q = gaps.iter().zip(&coeffs).map(|(g, a)| g * a).sum();
            if !d.is_zero() {
                match gaps.iter().position(|g| !g.is_zero()) {
                    Some(j) => coeffs[j] -= &d / &gaps[j],
                    None => unreachable!("nonzero total gap"),
                }
            }
        }
        let mut dx = Polynomial::zero();
        for (c, a) in chosen.iter().zip(&coeffs) {
            dx.add_scaled(c, a);
        }
        if target == 0 {
            let b = -el.eval(&dx);
            dx.add_term(Monomial::one(), b);
        }
        diff[i] = dx;
    }
    let presentation = CdgaPresentation::new(alg, diff).expect("sizes match");
    debug_assert!(presentation.is_valid());
    debug_assert!(validate_augmentation(&presentation, &el).is_valid());
    debug_assert!(validate_augmentation(&presentation, &er).is_valid());
    RandomInstance { presentation, left: el, right: er }
}

pub fn random_cdga<R: Rng>(rng: &mut R, p: &RandomParams) -> CdgaPresentation {
    random_instance(rng, p).presentation
}

#[derive(Clone, Debug)]
pub struct HomotopicInstance {
    pub presentation: CdgaPresentation,
    pub left: Augmentation,
    /// εl + K∘∂.
    pub left1: Augmentation,
    pub homotopy: HomotopyCertificate,
    pub right: Augmentation,
}

/// A random instance with K drawn on the degree −1 generators.
pub fn random_homotopic_instance<R: Rng>(rng: &mut R, grading: Grading) -> HomotopicInstance {
    let p = RandomParams { grading, equal_augmentations: 0.5, degree_pool: Some(vec![-1, -1, 0, 0, 0, 1]), ..Default::default() };
    let inst = random_instance(rng, &p);
    let alg = inst.presentation.algebra();
    let mut k = HomotopyCertificate::zero(alg);
    for v in alg.generators_in_degree(grading.reduce(-1)) {
        k.values[v] = [q(1), q(-1), q(2), qf(1, 2), q(0)].choose(rng).unwrap().clone();
    }
    let left1 = homotopic_augmentation(&inst.presentation, &inst.left, &k).expect("triangular instances admit εl + K∘∂");
    HomotopicInstance { presentation: inst.presentation, left: inst.left, left1, homotopy: k, right: inst.right }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for grading in [Grading::Integer, Grading::Cyclic(2), Grading::Cyclic(4)] {
            let p = RandomParams { grading, ..Default::default() };
            let mut nontrivial = 0;
            for _ in 0..40 {
                let inst = random_instance(&mut rng, &p);
                assert!(inst.presentation.is_valid());
                assert!(validate_augmentation(&inst.presentation, &inst.left).is_valid());
                assert!(validate_augmentation(&inst.presentation, &inst.right).is_valid());
                if inst.presentation.differentials().iter().any(|d| !d.is_zero()) {
                    nontrivial += 1;
                }
            }
            assert!(nontrivial > 10, "{grading:?}: only {nontrivial} nontrivial differentials");
        }
    }
}
