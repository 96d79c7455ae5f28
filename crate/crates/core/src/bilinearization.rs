//! Augmentations, the Baues–Lemaire cylinder with its `stab` operator, and
//! bilinearized algebras ∂^ε = ∂^ε₀ + ∂^ε₁ for a pair of augmentations.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graded_algebra::{CdgaPresentation, Generator, GradedAlgebra, Monomial, Polynomial};
use crate::linalg::{self, SparseVec};
use crate::rational::{binomial, factorial, fmt_q, pow, Q};

/// Default word length up to which Sym_N sums are enumerated literally.
pub const LITERAL_BOUND: usize = 6;

pub const LEFT_SUFFIX: &str = "@l";
pub const RIGHT_SUFFIX: &str = "@r";
pub const HAT_SUFFIX: &str = "^";

pub fn hat_id(id: &str) -> String {
    format!("{id}{HAT_SUFFIX}")
}

/// Values on generators (by index in the presentation's algebra).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augmentation {
    values: Vec<Q>,
}

impl Augmentation {
    pub fn zero(alg: &GradedAlgebra) -> Self {
        Augmentation { values: vec![Q::zero(); alg.len()] }
    }

    pub fn from_values(values: Vec<Q>) -> Self {
        Augmentation { values }
    }

    pub fn from_pairs(alg: &GradedAlgebra, pairs: &[(&str, Q)]) -> Result<Self> {
        let mut a = Augmentation::zero(alg);
        for (id, v) in pairs {
            a.values[alg.lookup(id)?] = v.clone();
        }
        Ok(a)
    }

    pub fn from_map(alg: &GradedAlgebra, map: &BTreeMap<String, Q>) -> Result<Self> {
        let mut a = Augmentation::zero(alg);
        for (id, v) in map {
            a.values[alg.lookup(id)?] = v.clone();
        }
        Ok(a)
    }

    /// Nonzero values keyed by id.
    pub fn to_map(&self, alg: &GradedAlgebra) -> BTreeMap<String, Q> {
        self.values.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (alg.id(i).to_string(), v.clone())).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, i: usize) -> &Q {
        &self.values[i]
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn set(&mut self, i: usize, v: Q) {
        self.values[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn eval_monomial(&self, m: &Monomial) -> Q {
        let mut acc = Q::one();
        for &(i, e) in m.factors() {
            if self.values[i].is_zero() {
                return Q::zero();
            }
            acc *= pow(&self.values[i], e);
        }
        acc
    }

    pub fn eval(&self, p: &Polynomial) -> Q {
        let mut acc = Q::zero();
        for (m, c) in p.terms() {
            acc += c * self.eval_monomial(m);
        }
        acc
    }

    pub fn difference(&self, other: &Augmentation) -> Vec<Q> {
        self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AugmentationIssue {
    WrongLength { expected: usize, found: usize },
    NonzeroDegree { generator: String, degree: i64, value: Q },
    NotKilled { generator: String, value: Q },
}

impl std::fmt::Display for AugmentationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AugmentationIssue::WrongLength { expected, found } => {
                write!(f, "{found} values for {expected} generators")
            }
            AugmentationIssue::NonzeroDegree { generator, degree, value } => {
                write!(f, "ε({generator}) = {} in degree {degree}", fmt_q(value))
            }
            AugmentationIssue::NotKilled { generator, value } => {
                write!(f, "ε(∂{generator}) = {} ≠ 0", fmt_q(value))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AugmentationReport {
    pub issues: Vec<AugmentationIssue>,
}

impl AugmentationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        match self.issues.into_iter().next() {
            None => Ok(()),
            Some(AugmentationIssue::WrongLength { expected, found }) => {
                Err(Error::InvalidAugmentation { generator: String::new(), reason: format!("{found} values for {expected} generators") })
            }
            Some(i @ AugmentationIssue::NonzeroDegree { .. }) | Some(i @ AugmentationIssue::NotKilled { .. }) => {
                let generator = match &i {
                    AugmentationIssue::NonzeroDegree { generator, .. } => generator.clone(),
                    AugmentationIssue::NotKilled { generator, .. } => generator.clone(),
                    _ => unreachable!(),
                };
                Err(Error::InvalidAugmentation { generator, reason: i.to_string() })
            }
        }
    }
}

pub fn validate_augmentation(a: &CdgaPresentation, eps: &Augmentation) -> AugmentationReport {
    let alg = a.algebra();
    if eps.len() != alg.len() {
        return AugmentationReport { issues: vec![AugmentationIssue::WrongLength { expected: alg.len(), found: eps.len() }] };
    }
    let mut issues = Vec::new();
    for i in 0..alg.len() {
        let d = alg.degree(i);
        if d != 0 && !eps.value(i).is_zero() {
            issues.push(AugmentationIssue::NonzeroDegree { generator: alg.id(i).to_string(), degree: d, value: eps.value(i).clone() });
        }
    }
    for i in 0..alg.len() {
        let v = eps.eval(a.differential_of(i));
        if !v.is_zero() {
            issues.push(AugmentationIssue::NotKilled { generator: alg.id(i).to_string(), value: v });
        }
    }
    AugmentationReport { issues }
}

/// All valid augmentations with values from `candidates` on degree-0
/// generators (zero elsewhere).  Complete only relative to the candidate set.
pub fn search_augmentations_bounded(a: &CdgaPresentation, candidates: &[Q], cap: u128) -> Result<Vec<Augmentation>> {
    let alg = a.algebra();
    let free = alg.generators_in_degree(0);
    let cands: Vec<Q> = candidates.iter().cloned().sorted().dedup().collect();
    let count = (cands.len() as u128).checked_pow(free.len() as u32).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::SearchTooLarge { count, cap });
    }
    let mut found = Vec::new();
    if free.is_empty() {
        let eps = Augmentation::zero(alg);
        if validate_augmentation(a, &eps).is_valid() {
            found.push(eps);
        }
        return Ok(found);
    }
    for choice in free.iter().map(|_| cands.iter()).multi_cartesian_product() {
        let mut eps = Augmentation::zero(alg);
        for (&i, v) in free.iter().zip(choice) {
            eps.set(i, v.clone());
        }
        if validate_augmentation(a, &eps).is_valid() {
            found.push(eps);
        }
    }
    Ok(found)
}

/// The candidate grid {p/q : |p| ≤ p_max, 1 ≤ q ≤ q_max}.
pub fn rational_grid(p_max: i64, q_max: i64) -> Vec<Q> {
    (-p_max..=p_max).cartesian_product(1..=q_max).map(|(p, q)| Q::new(BigInt::from(p), BigInt::from(q))).sorted().dedup().collect()
}

/// Generators x̂ of degree |x| + 1, with maps between base and hat indices.
#[derive(Clone, Debug)]
pub struct HatAlgebra {
    pub algebra: GradedAlgebra,
    pub hat_of: Vec<usize>,
    pub base_of: Vec<usize>,
}

pub fn hat_algebra(base: &GradedAlgebra) -> Result<HatAlgebra> {
    let gens: Vec<Generator> =
        base.generators().iter().map(|g| Generator { id: hat_id(&g.id), degree: g.degree + 1, action: g.action.clone() }).collect();
    let algebra = GradedAlgebra::new(base.grading(), gens)?;
    let mut hat_of = vec![0; base.len()];
    let mut base_of = vec![0; base.len()];
    for i in 0..base.len() {
        let h = algebra.lookup(&hat_id(base.id(i)))?;
        hat_of[i] = h;
        base_of[h] = i;
    }
    Ok(HatAlgebra { algebra, hat_of, base_of })
}

/// A_Cyl on V^l ⊎ V̂ ⊎ V^r.
#[derive(Clone, Debug)]
pub struct CylinderPresentation {
    pub base: CdgaPresentation,
    pub cylinder: CdgaPresentation,
    pub left: Vec<usize>,
    pub hat: Vec<usize>,
    pub right: Vec<usize>,
    literal_bound: usize,
}

impl CylinderPresentation {
    pub fn algebra(&self) -> &GradedAlgebra {
        self.cylinder.algebra()
    }

    fn side_image(&self, side: &[usize], p: &Polynomial) -> Polynomial {
        let base = self.base.algebra();
        let images: Vec<Polynomial> = (0..base.len()).map(|i| Polynomial::generator(side[i])).collect();
        base.substitute(p, self.algebra(), &images)
    }

    /// `p^l`: every generator replaced by its left copy.
    pub fn left_copy(&self, p: &Polynomial) -> Polynomial {
        self.side_image(&self.left, p)
    }

    pub fn right_copy(&self, p: &Polynomial) -> Polynomial {
        self.side_image(&self.right, p)
    }

    fn inclusion(&self, side: &[usize], p: &Polynomial) -> Polynomial {
        let base = self.base.algebra();
        let images: Vec<Polynomial> = (0..base.len())
            .map(|i| {
                let s = if base.is_odd(i) { -Q::one() } else { Q::one() };
                Polynomial::term(Monomial::generator(side[i]), s)
            })
            .collect();
        base.substitute(p, self.algebra(), &images)
    }

    /// Chain map A → A_Cyl sending x ↦ (−1)^{|x|} x^l.
    pub fn left_inclusion(&self, p: &Polynomial) -> Polynomial {
        self.inclusion(&self.left, p)
    }

    /// Chain map A → A_Cyl sending x ↦ (−1)^{|x|} x^r.
    pub fn right_inclusion(&self, p: &Polynomial) -> Polynomial {
        self.inclusion(&self.right, p)
    }

    /// Algebra maps x ↦ −x^l and x ↦ −x^r on generators.
    pub fn negated_inclusions(&self, p: &Polynomial) -> (Polynomial, Polynomial) {
        let base = self.base.algebra();
        let l: Vec<Polynomial> = (0..base.len()).map(|i| Polynomial::term(Monomial::generator(self.left[i]), -Q::one())).collect();
        let r: Vec<Polynomial> = (0..base.len()).map(|i| Polynomial::term(Monomial::generator(self.right[i]), -Q::one())).collect();
        (base.substitute(p, self.algebra(), &l), base.substitute(p, self.algebra(), &r))
    }

    pub fn stab(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in p.terms() {
            let s = if m.word_length() <= self.literal_bound { self.stab_literal(m) } else { self.stab_orbits(m) };
            out.add_scaled(&s, c);
        }
        out
    }

    /// π_S ∘ stab_T ∘ I_T by enumerating every ordering of the word.
    pub fn stab_literal(&self, m: &Monomial) -> Polynomial {
        let base = self.base.algebra();
        let cyl = self.algebra();
        let w = m.word();
        let k = w.len();
        let mut out = Polynomial::zero();
        if k == 0 {
            return out;
        }
        let inv = Q::new(BigInt::one(), factorial(k));
        for g in (0..k).permutations(k) {
            let gw: Vec<usize> = g.iter().map(|&t| w[t]).collect();
            let (sg, _) = base.normalize_word(&gw);
            if sg == 0 {
                continue;
            }
            let mut prefix_odd = false;
            for j in 0..k {
                let mut word = Vec::with_capacity(k);
                word.extend(gw[..j].iter().map(|&x| self.left[x]));
                word.push(self.hat[gw[j]]);
                word.extend(gw[j + 1..].iter().map(|&x| self.right[x]));
                if let (s, Some(mono)) = cyl.normalize_word(&word) {
                    let sign = sg as i32 * s as i32 * if prefix_odd { -1 } else { 1 };
                    out.add_term(mono, if sign > 0 { inv.clone() } else { -inv.clone() });
                }
                if base.is_odd(gw[j]) {
                    prefix_odd = !prefix_odd;
                }
            }
        }
        out
    }

    /// Same operator, one representative ordering per (left set, hatted
    /// position, right set) class, weighted by the class size.
    pub fn stab_orbits(&self, m: &Monomial) -> Polynomial {
        let base = self.base.algebra();
        let cyl = self.algebra();
        let w = m.word();
        let k = w.len();
        let mut out = Polynomial::zero();
        if k == 0 {
            return out;
        }
        let kf = factorial(k);
        for j in 0..k {
            let others: Vec<usize> = (0..k).filter(|&t| t != j).collect();
            for mask in 0u64..(1u64 << others.len()) {
                let left: Vec<usize> = others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &t)| t).collect();
                let right: Vec<usize> = others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 0).map(|(_, &t)| t).collect();
                let order: Vec<usize> = left.iter().chain(std::iter::once(&j)).chain(right.iter()).map(|&t| w[t]).collect();
                let (sg, _) = base.normalize_word(&order);
                if sg == 0 {
                    continue;
                }
                let prefix_odd = left.iter().filter(|&&t| base.is_odd(w[t])).count() % 2 == 1;
                let mut word = Vec::with_capacity(k);
                word.extend(left.iter().map(|&t| self.left[w[t]]));
                word.push(self.hat[w[j]]);
                word.extend(right.iter().map(|&t| self.right[w[t]]));
                if let (s, Some(mono)) = cyl.normalize_word(&word) {
                    let weight = Q::new(factorial(left.len()) * factorial(right.len()), kf.clone());
                    let sign = sg as i32 * s as i32 * if prefix_odd { -1 } else { 1 };
                    out.add_term(mono, if sign > 0 { weight } else { -weight });
                }
            }
        }
        out
    }

    /// π^ε: x^l ↦ εl(x), x^r ↦ εr(x), x̂ ↦ x̂ (into the hat algebra).
    pub fn project(&self, hats: &HatAlgebra, el: &Augmentation, er: &Augmentation, p: &Polynomial) -> Polynomial {
        let n = self.base.len();
        let mut images = vec![Polynomial::zero(); 3 * n];
        for i in 0..n {
            images[self.left[i]] = Polynomial::constant(el.value(i).clone());
            images[self.right[i]] = Polynomial::constant(er.value(i).clone());
            images[self.hat[i]] = Polynomial::generator(hats.hat_of[i]);
        }
        self.algebra().substitute(p, &hats.algebra, &images)
    }
}

/// Element of the tensor algebra T(V): words in generator indices.
pub type TensorElement = BTreeMap<Vec<usize>, Q>;

fn tensor_add(t: &mut TensorElement, w: Vec<usize>, c: Q) {
    use std::collections::btree_map::Entry;
    match t.entry(w) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// I_T(p): each monomial replaced by the signed average of its orderings.
pub fn symmetrize(alg: &GradedAlgebra, p: &Polynomial) -> TensorElement {
    let mut out = TensorElement::new();
    for (m, c) in p.terms() {
        let w = m.word();
        let k = w.len();
        let scale = c / Q::from_integer(factorial(k));
        for g in (0..k).permutations(k) {
            let gw: Vec<usize> = g.iter().map(|&t| w[t]).collect();
            let (sg, _) = alg.normalize_word(&gw);
            if sg != 0 {
                tensor_add(&mut out, gw, if sg > 0 { scale.clone() } else { -scale.clone() });
            }
        }
    }
    out
}

/// Generators x on which D_T = I_T ∘ ∂ fails D_T² x = 0 in T(V). When this
/// is empty the cylinder is the image of the tensor-algebra cylinder under
/// π_S, so its differential squares to zero.
pub fn tensor_lift_defects(a: &CdgaPresentation) -> Vec<usize> {
    let alg = a.algebra();
    let lifts: Vec<TensorElement> = (0..alg.len()).map(|x| symmetrize(alg, a.differential_of(x))).collect();
    let apply = |t: &TensorElement| {
        let mut out = TensorElement::new();
        for (w, c) in t {
            let mut odd = false;
            for (i, &x) in w.iter().enumerate() {
                for (dw, dc) in &lifts[x] {
                    let mut word = w[..i].to_vec();
                    word.extend_from_slice(dw);
                    word.extend_from_slice(&w[i + 1..]);
                    let v = c * dc;
                    tensor_add(&mut out, word, if odd { -v } else { v });
                }
                odd ^= alg.is_odd(x);
            }
        }
        out
    };
    (0..alg.len()).filter(|&x| !apply(&lifts[x]).is_empty()).collect()
}

pub fn build_cylinder(a: &CdgaPresentation) -> Result<CylinderPresentation> {
    build_cylinder_with(a, LITERAL_BOUND)
}

pub fn build_cylinder_with(a: &CdgaPresentation, literal_bound: usize) -> Result<CylinderPresentation> {
    a.validate().into_result()?;
    let base = a.algebra();
    let mut gens = Vec::with_capacity(3 * base.len());
    for g in base.generators() {
        gens.push(Generator { id: format!("{}{LEFT_SUFFIX}", g.id), degree: g.degree, action: g.action.clone() });
        gens.push(Generator { id: hat_id(&g.id), degree: g.degree + 1, action: g.action.clone() });
        gens.push(Generator { id: format!("{}{RIGHT_SUFFIX}", g.id), degree: g.degree, action: g.action.clone() });
    }
    let alg = GradedAlgebra::new(base.grading(), gens)?;
    let n = base.len();
    let (mut left, mut hat, mut right) = (vec![0; n], vec![0; n], vec![0; n]);
    for i in 0..n {
        let id = base.id(i);
        left[i] = alg.lookup(&format!("{id}{LEFT_SUFFIX}"))?;
        hat[i] = alg.lookup(&hat_id(id))?;
        right[i] = alg.lookup(&format!("{id}{RIGHT_SUFFIX}"))?;
    }
    let mut shell =
        CylinderPresentation { base: a.clone(), cylinder: CdgaPresentation::free(alg.clone()), left, hat, right, literal_bound };
    let mut diff = vec![Polynomial::zero(); 3 * n];
    for i in 0..n {
        let dx = a.differential_of(i);
        diff[shell.left[i]] = shell.left_copy(dx).scaled(&-Q::one());
        diff[shell.right[i]] = shell.right_copy(dx).scaled(&-Q::one());
        let mut dh = shell.stab(dx);
        dh.add_term(Monomial::generator(shell.left[i]), Q::one());
        dh.add_term(Monomial::generator(shell.right[i]), -Q::one());
        diff[shell.hat[i]] = dh;
    }
    shell.cylinder = CdgaPresentation::new(alg, diff)?;
    Ok(shell)
}

/// stab(p) for a polynomial of `a`, realized inside a freshly built cylinder.
pub fn stab(p: &Polynomial, a: &CdgaPresentation) -> Result<(CylinderPresentation, Polynomial)> {
    let cyl = build_cylinder(a)?;
    let s = cyl.stab(p);
    Ok((cyl, s))
}

/// Capping weights of one monomial: coefficient of x̂_i in
/// (1/k!) Σ_g Σ_j εl(prefix) x̂_{g(j)} εr(suffix), by literal enumeration.
pub fn capping_literal(m: &Monomial, el: &Augmentation, er: &Augmentation) -> SparseVec {
    let w = m.word();
    let k = w.len();
    let mut out = SparseVec::new();
    if k == 0 {
        return out;
    }
    let inv = Q::new(BigInt::one(), factorial(k));
    for g in (0..k).permutations(k) {
        for j in 0..k {
            let mut v = inv.clone();
            for t in 0..j {
                v *= el.value(w[g[t]]);
            }
            for t in j + 1..k {
                v *= er.value(w[g[t]]);
            }
            if !v.is_zero() {
                linalg::axpy(&mut out, &linalg::unit_vec(w[g[j]]), &v);
            }
        }
    }
    out
}

/// Same weights grouped by multiplicities: for the hatted generator y_i and
/// a choice of a_t ≤ e'_t left copies of each remaining y_t, the class has
/// Π C(e'_t, a_t) · s!(K−s)! orderings per hatted position.
pub fn capping_orbits(m: &Monomial, el: &Augmentation, er: &Augmentation) -> SparseVec {
    let f = m.factors();
    let k = m.word_length();
    let mut out = SparseVec::new();
    if k == 0 {
        return out;
    }
    let kf = factorial(k);
    for (pos, &(i, e)) in f.iter().enumerate() {
        let rest: Vec<(usize, u32)> = f
            .iter()
            .enumerate()
            .filter_map(|(p, &(g, ex))| if p == pos { (ex > 1).then_some((g, ex - 1)) } else { Some((g, ex)) })
            .collect();
        let big_k = k - 1;
        let mut total = Q::zero();
        if rest.is_empty() {
            total = Q::one();
        }
        for split in rest.iter().map(|&(_, ex)| 0..=ex).multi_cartesian_product().filter(|_| !rest.is_empty()) {
            let s: usize = split.iter().map(|&a| a as usize).sum();
            let mut v = Q::from_integer(factorial(s) * factorial(big_k - s));
            for (&(g, ex), &a) in rest.iter().zip(&split) {
                v *= Q::from_integer(binomial(ex as usize, a as usize));
                v *= pow(el.value(g), a) * pow(er.value(g), ex - a);
                if v.is_zero() {
                    break;
                }
            }
            total += v;
        }
        total *= Q::from_integer(BigInt::from(e));
        total /= Q::from_integer(kf.clone());
        if !total.is_zero() {
            out.insert(i, total);
        }
    }
    out
}

pub fn capping(m: &Monomial, el: &Augmentation, er: &Augmentation, literal_bound: usize) -> SparseVec {
    if m.word_length() <= literal_bound {
        capping_literal(m, el, er)
    } else {
        capping_orbits(m, el, er)
    }
}

/// ∂^ε₁ and ∂^ε₀ on base-indexed generators without validating anything.
pub fn bilinear_parts(a: &CdgaPresentation, el: &Augmentation, er: &Augmentation, literal_bound: usize) -> (Vec<SparseVec>, Vec<Q>) {
    let n = a.len();
    let mut d1 = Vec::with_capacity(n);
    let mut d0 = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = SparseVec::new();
        for (m, c) in a.differential_of(i).terms() {
            linalg::axpy(&mut v, &capping(m, el, er, literal_bound), c);
        }
        d1.push(v);
        d0.push(el.value(i) - er.value(i));
    }
    (d1, d0)
}

/// A^ε on V̂ together with its linear pieces, indexed by hat generators.
#[derive(Clone, Debug)]
pub struct BilinearizedPackage {
    pub base: CdgaPresentation,
    pub hats: HatAlgebra,
    pub algebra: CdgaPresentation,
    /// `module[h]` = ∂^ε₁ ĥ in hat coordinates.
    pub module: Vec<SparseVec>,
    /// `fundamental[h]` = ∂^ε₀ ĥ.
    pub fundamental: Vec<Q>,
    pub left: Augmentation,
    pub right: Augmentation,
}

impl BilinearizedPackage {
    pub fn hat_algebra(&self) -> &GradedAlgebra {
        &self.hats.algebra
    }

    /// ∂^ε₀ ∘ ∂^ε₁ = 0 and (∂^ε₁)² = 0.
    pub fn check_invariants(&self) -> Result<()> {
        for (h, col) in self.module.iter().enumerate() {
            if !linalg::dot(col, &self.fundamental.iter().cloned().enumerate().collect()).is_zero() {
                return Err(Error::Internal(format!("∂₀∂₁ ≠ 0 on {}", self.hat_algebra().id(h))));
            }
            if !linalg::apply(&self.module, col).is_empty() {
                return Err(Error::Internal(format!("∂₁² ≠ 0 on {}", self.hat_algebra().id(h))));
            }
        }
        Ok(())
    }

    pub fn fundamental_of(&self, v: &SparseVec) -> Q {
        let mut acc = Q::zero();
        for (h, c) in v {
            acc += c * &self.fundamental[*h];
        }
        acc
    }
}

pub fn bilinearize(a: &CdgaPresentation, el: &Augmentation, er: &Augmentation) -> Result<BilinearizedPackage> {
    bilinearize_with(a, el, er, LITERAL_BOUND)
}

pub fn bilinearize_with(a: &CdgaPresentation, el: &Augmentation, er: &Augmentation, literal_bound: usize) -> Result<BilinearizedPackage> {
    a.validate().into_result()?;
    validate_augmentation(a, el).into_result()?;
    validate_augmentation(a, er).into_result()?;
    let hats = hat_algebra(a.algebra())?;
    let (d1, d0) = bilinear_parts(a, el, er, literal_bound);
    let n = a.len();
    let mut module = vec![SparseVec::new(); n];
    let mut fundamental = vec![Q::zero(); n];
    let mut diff = vec![Polynomial::zero(); n];
    for i in 0..n {
        let h = hats.hat_of[i];
        let col: SparseVec = d1[i].iter().map(|(b, c)| (hats.hat_of[*b], c.clone())).collect();
        let mut p = Polynomial::constant(d0[i].clone());
        for (t, c) in &col {
            p.add_term(Monomial::generator(*t), c.clone());
        }
        module[h] = col;
        fundamental[h] = d0[i].clone();
        diff[h] = p;
    }
    let algebra = CdgaPresentation::new(hats.algebra.clone(), diff)?;
    let pkg = BilinearizedPackage { base: a.clone(), hats, algebra, module, fundamental, left: el.clone(), right: er.clone() };
    pkg.check_invariants()?;
    Ok(pkg)
}

#[cfg(test)]
#[path = "bilinearization_tests.rs"]
mod tests;
