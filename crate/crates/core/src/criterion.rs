//! Linearized homology, the fundamental class, DG homotopies of augmentations
//! and the four-way vanishing decision for bilinearized algebras.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::{One, Zero};

use crate::bilinearization::{bilinearize, validate_augmentation, Augmentation, BilinearizedPackage};
use crate::error::{Error, Result};
use crate::graded_algebra::{CdgaPresentation, GradedAlgebra, Grading, Monomial, Polynomial};
use crate::homology::{homology, GradedChainComplex, HomologySummary};
use crate::linalg::{self, unit_vec, Echelon, SparseVec};
use crate::rational::Q;

pub const DEFAULT_WORD_BOUND: usize = 4;

/// (V̂, ∂^ε₁) with hats grouped by degree, in hat-index order.
pub fn module_complex(pkg: &BilinearizedPackage) -> GradedChainComplex {
    let alg = pkg.hat_algebra();
    let g = alg.grading();
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for h in 0..alg.len() {
        by_degree.entry(g.reduce(alg.degree(h))).or_default().push(h);
    }
    let pos: BTreeMap<usize, usize> = by_degree.values().flat_map(|hs| hs.iter().enumerate().map(|(p, &h)| (h, p))).collect();
    let mut c = GradedChainComplex::new(g);
    for (&d, hs) in &by_degree {
        c.add_degree(d, hs.iter().map(|&h| alg.id(h).to_string()).collect());
    }
    for (&d, hs) in &by_degree {
        let cols = hs.iter().map(|&h| pkg.module[h].iter().map(|(t, v)| (pos[t], v.clone())).collect()).collect();
        c.set_differential(d, cols);
    }
    c
}

/// Homology representatives of [`module_complex`] rewritten in hat coordinates.
#[derive(Clone, Debug)]
pub struct LinearizedHomology {
    pub summary: HomologySummary,
    /// `(degree, representative in hat coordinates)` in summary order.
    pub representatives: Vec<(i64, SparseVec)>,
}

impl LinearizedHomology {
    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.summary.dims()
    }
}

pub fn linearized_homology(pkg: &BilinearizedPackage) -> Result<LinearizedHomology> {
    let c = module_complex(pkg);
    let summary = homology(&c)?;
    let alg = pkg.hat_algebra();
    let g = alg.grading();
    let mut representatives = Vec::new();
    for (&d, hd) in &summary.degrees {
        let hats: Vec<usize> = (0..alg.len()).filter(|&h| g.reduce(alg.degree(h)) == d).collect();
        for r in &hd.representatives {
            representatives.push((d, r.iter().map(|(p, v)| (hats[*p], v.clone())).collect()));
        }
    }
    Ok(LinearizedHomology { summary, representatives })
}

/// ε⃗_* evaluated on the chosen homology basis.
#[derive(Clone, Debug)]
pub struct FundamentalClass {
    /// One value per entry of [`LinearizedHomology::representatives`].
    pub values: Vec<Q>,
    pub is_zero: bool,
}

impl FundamentalClass {
    /// First representative with a nonzero value.
    pub fn witness<'a>(&self, h: &'a LinearizedHomology) -> Option<(&'a SparseVec, &Q)> {
        self.values.iter().position(|v| !v.is_zero()).map(|i| (&h.representatives[i].1, &self.values[i]))
    }
}

pub fn fundamental_class(pkg: &BilinearizedPackage, h: &LinearizedHomology) -> FundamentalClass {
    let values: Vec<Q> = h.representatives.iter().map(|(_, r)| pkg.fundamental_of(r)).collect();
    let is_zero = values.iter().all(Zero::is_zero);
    FundamentalClass { values, is_zero }
}

// ---------------------------------------------------------------------------
// ε⃗-derivations

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn integrate_unit(p: &[Q]) -> Q {
    p.iter().enumerate().map(|(k, c)| c / Q::from_integer((k as i64 + 1).into())).sum()
}

/// For a monomial with exactly one factor of degree −1 and all others of
/// degree 0, returns that factor and the averaged weight
/// ∫₀¹ Π (t εl + (1−t) εr)(x_i) dt over the remaining factors.
/// This equals the average over orderings of εl(prefix)·εr(suffix).
pub fn derivation_weight(alg: &GradedAlgebra, m: &Monomial, el: &Augmentation, er: &Augmentation) -> Option<(usize, Q)> {
    let g = alg.grading();
    let minus_one = g.reduce(-1);
    let mut odd = None;
    let mut poly = vec![Q::one()];
    for &(x, e) in m.factors() {
        let d = g.reduce(alg.degree(x));
        if d == 0 {
            let lin = [er.value(x).clone(), el.value(x) - er.value(x)];
            for _ in 0..e {
                poly = poly_mul(&poly, &lin);
            }
        } else if d == minus_one && e == 1 && odd.is_none() {
            odd = Some(x);
        } else {
            return None;
        }
    }
    odd.map(|v| (v, integrate_unit(&poly)))
}

/// K(m) for the ε⃗-derivation determined by `k` on generators.
pub fn derivation_value(alg: &GradedAlgebra, m: &Monomial, k: &[Q], el: &Augmentation, er: &Augmentation) -> Q {
    match derivation_weight(alg, m, el, er) {
        Some((v, w)) => &k[v] * w,
        None => Q::zero(),
    }
}

pub fn derivation_eval(alg: &GradedAlgebra, p: &Polynomial, k: &[Q], el: &Augmentation, er: &Augmentation) -> Q {
    p.terms().map(|(m, c)| c * derivation_value(alg, m, k, el, er)).sum()
}

/// K(m) by literal enumeration of orderings.  Only usable on short words.
pub fn derivation_value_literal(alg: &GradedAlgebra, m: &Monomial, k: &[Q], el: &Augmentation, er: &Augmentation) -> Q {
    let w = m.word();
    let n = w.len();
    if n == 0 {
        return Q::zero();
    }
    let deg0 = |x: usize| alg.grading().reduce(alg.degree(x)) == 0;
    let mut total = Q::zero();
    let mut count = 0u64;
    for perm in (0..n).permutations(n) {
        count += 1;
        for j in 0..n {
            // Terms survive only when every other factor has degree 0, so no
            // Koszul sign appears.
            if (0..n).any(|i| i != j && !deg0(w[perm[i]])) {
                continue;
            }
            let mut t = k[w[perm[j]]].clone();
            for i in 0..j {
                t *= el.value(w[perm[i]]);
            }
            for i in j + 1..n {
                t *= er.value(w[perm[i]]);
            }
            total += t;
        }
    }
    total / Q::from_integer(count.into())
}

/// Values K(v) on generators; zero off degree −1.
#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyCertificate {
    pub values: Vec<Q>,
}

impl HomotopyCertificate {
    pub fn zero(alg: &GradedAlgebra) -> Self {
        HomotopyCertificate { values: vec![Q::zero(); alg.len()] }
    }

    pub fn to_map(&self, alg: &GradedAlgebra) -> BTreeMap<String, Q> {
        self.values.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (alg.id(i).to_string(), v.clone())).collect()
    }

    /// K(∂x) = (εl − εr)(x) on every generator, K extended as an ε⃗-derivation.
    pub fn verify(&self, a: &CdgaPresentation, el: &Augmentation, er: &Augmentation) -> bool {
        let alg = a.algebra();
        let minus_one = alg.grading().reduce(-1);
        if self.values.len() != alg.len()
            || self.values.iter().enumerate().any(|(i, v)| !v.is_zero() && alg.grading().reduce(alg.degree(i)) != minus_one)
        {
            return false;
        }
        (0..alg.len()).all(|i| derivation_eval(alg, a.differential_of(i), &self.values, el, er) == el.value(i) - er.value(i))
    }
}

/// Solves K∘∂ = εl − εr for an ε⃗-derivation K, or proves there is none.
pub fn solve_homotopy(a: &CdgaPresentation, el: &Augmentation, er: &Augmentation) -> Result<Option<HomotopyCertificate>> {
    a.validate().into_result()?;
    validate_augmentation(a, el).into_result()?;
    validate_augmentation(a, er).into_result()?;
    let alg = a.algebra();
    let g = alg.grading();
    let unknowns = alg.generators_in_degree(-1);
    let eqs = alg.generators_in_degree(0);
    let col_of: BTreeMap<usize, usize> = unknowns.iter().enumerate().map(|(c, &v)| (v, c)).collect();
    let mut cols = vec![SparseVec::new(); unknowns.len()];
    let mut rhs = SparseVec::new();
    for (r, &x) in eqs.iter().enumerate() {
        for (m, c) in a.differential_of(x).terms() {
            if let Some((v, w)) = derivation_weight(alg, m, el, er) {
                let mut e = SparseVec::new();
                e.insert(r, c * w);
                linalg::axpy(&mut cols[col_of[&v]], &e, &Q::one());
            }
        }
        let d = el.value(x) - er.value(x);
        if !d.is_zero() {
            rhs.insert(r, d);
        }
    }
    debug_assert!(unknowns.iter().all(|&v| g.reduce(alg.degree(v)) == g.reduce(-1)));
    let mut ech = Echelon::new();
    for (c, col) in cols.iter().enumerate() {
        ech.insert(col, unit_vec(c));
    }
    let Some(x) = ech.solve(&rhs) else { return Ok(None) };
    let mut cert = HomotopyCertificate::zero(alg);
    for (c, v) in x {
        cert.values[unknowns[c]] = v;
    }
    if !cert.verify(a, el, er) {
        return Err(Error::Internal("homotopy solution fails its own check".into()));
    }
    Ok(Some(cert))
}

/// ε̂ on S(V̂) built from a right inverse of ∂^ε₁ : V̂₁ → V̂₀, returned only
/// if it passes the augmentation check.
pub fn construct_bilin_augmentation(pkg: &BilinearizedPackage) -> Result<Option<Augmentation>> {
    let alg = pkg.hat_algebra();
    let g = alg.grading();
    let mut ech = Echelon::new();
    for h in 0..alg.len() {
        if g.reduce(alg.degree(h)) == g.reduce(1) {
            ech.insert(&pkg.module[h], unit_vec(h));
        }
    }
    let mut eps = Augmentation::zero(alg);
    for u in 0..alg.len() {
        if g.reduce(alg.degree(u)) != 0 {
            continue;
        }
        // e_u = ∂₁(−combo) + residual, residual supported off the pivots.
        let (_, combo) = ech.reduce(&unit_vec(u), SparseVec::new());
        eps.set(u, pkg.fundamental_of(&combo));
    }
    Ok(validate_augmentation(&pkg.algebra, &eps).is_valid().then_some(eps))
}

// ---------------------------------------------------------------------------
// Word-length truncations of (S(V̂), ∂^ε)

/// All monomials of the hat algebra of word length ≤ `w`.
pub fn monomials_up_to(alg: &GradedAlgebra, w: usize) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for len in 1..=w {
        for word in (0..alg.len()).combinations_with_replacement(len) {
            if let (_, Some(m)) = alg.normalize_word(&word) {
                out.push(m);
            }
        }
    }
    out
}

/// S^{≤w}(V̂) with ∂^ε; the unit is labelled "1".
pub fn truncated_complex(pkg: &BilinearizedPackage, w: usize) -> GradedChainComplex {
    let alg = pkg.hat_algebra();
    let g = alg.grading();
    let mut by_degree: BTreeMap<i64, Vec<Monomial>> = BTreeMap::new();
    for m in monomials_up_to(alg, w) {
        by_degree.entry(g.reduce(alg.monomial_degree(&m))).or_default().push(m);
    }
    let pos: BTreeMap<Monomial, usize> = by_degree.values().flat_map(|ms| ms.iter().enumerate().map(|(p, m)| (m.clone(), p))).collect();
    let mut c = GradedChainComplex::new(g);
    for (&d, ms) in &by_degree {
        let labels = ms.iter().map(|m| if m.is_one() { "1".to_string() } else { alg.format_monomial(m) }).collect();
        c.add_degree(d, labels);
    }
    for (&d, ms) in &by_degree {
        let cols = ms.iter().map(|m| pkg.algebra.differential_monomial(m).terms().map(|(t, v)| (pos[t], v.clone())).collect()).collect();
        c.set_differential(d, cols);
    }
    c
}

/// Whether the unit of a [`truncated_complex`] is a boundary.
pub fn unit_is_boundary(c: &GradedChainComplex) -> Result<bool> {
    c.check()?;
    let unit = c.basis(0).iter().position(|l| l == "1").ok_or_else(|| Error::Internal("truncated complex lacks a unit".into()))?;
    let mut ech = Echelon::new();
    for col in c.differential(c.grading().shift(0, 1)) {
        ech.insert(&col, SparseVec::new());
    }
    Ok(ech.contains(&unit_vec(unit)))
}

/// Dimensions of S(H) split by (word length, degree), up to word length `w`.
pub fn symmetric_series_by_word_length(grading: Grading, hdims: &BTreeMap<i64, usize>, w: usize) -> BTreeMap<(usize, i64), usize> {
    let mut table: BTreeMap<(usize, i64), usize> = BTreeMap::new();
    table.insert((0, 0), 1);
    for (&d, &n) in hdims {
        for _ in 0..n {
            let max_e = if grading.is_odd(d) { 1 } else { w };
            let mut next = BTreeMap::new();
            for (&(len, deg), &cnt) in &table {
                for e in 0..=max_e {
                    if len + e > w {
                        break;
                    }
                    let key = (len + e, grading.reduce(deg + d * e as i64));
                    *next.entry(key).or_insert(0) += cnt;
                }
            }
            table = next;
        }
    }
    table
}

/// Per-degree dimensions of S^{≤w}(H).
pub fn symmetric_series(grading: Grading, hdims: &BTreeMap<i64, usize>, w: usize) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for ((_, d), n) in symmetric_series_by_word_length(grading, hdims, w) {
        *out.entry(d).or_insert(0) += n;
    }
    out.retain(|_, n| *n > 0);
    out
}

// ---------------------------------------------------------------------------
// The decision

#[derive(Clone, Debug)]
pub struct CriterionVerdict {
    pub nonvanishing: bool,
    /// (a) a DG homotopy from εl to εr.
    pub homotopy: Option<HomotopyCertificate>,
    /// (b) ε⃗_* on H^ε.
    pub fundamental: FundamentalClass,
    /// (c) an augmentation of A^ε.
    pub augmentation: Option<Augmentation>,
    /// (d) the unit survives in H(S^{≤w}(V̂), ∂^ε).
    pub unit_survives: bool,
    pub word_bound: usize,
    pub linearized: LinearizedHomology,
    /// Per-degree dims of H(S^{≤w}(V̂), ∂^ε), filled in when nonvanishing.
    pub truncated_dims: Option<BTreeMap<i64, usize>>,
    pub package: BilinearizedPackage,
}

impl CriterionVerdict {
    pub fn agreement(&self) -> [bool; 4] {
        [self.homotopy.is_some(), self.fundamental.is_zero, self.augmentation.is_some(), self.unit_survives]
    }
}

pub fn decide_criterion(a: &CdgaPresentation, el: &Augmentation, er: &Augmentation, word_bound: usize) -> Result<CriterionVerdict> {
    if word_bound == 0 {
        return Err(Error::Invalid("word bound must be at least 1".into()));
    }
    let package = bilinearize(a, el, er)?;
    let linearized = linearized_homology(&package)?;
    let fundamental = fundamental_class(&package, &linearized);
    let homotopy = solve_homotopy(a, el, er)?;
    let augmentation = construct_bilin_augmentation(&package)?;
    let trunc = truncated_complex(&package, word_bound);
    let unit_survives = !unit_is_boundary(&trunc)?;
    let mut verdict = CriterionVerdict {
        nonvanishing: unit_survives,
        homotopy,
        fundamental,
        augmentation,
        unit_survives,
        word_bound,
        linearized,
        truncated_dims: None,
        package,
    };
    let [ha, hb, hc, hd] = verdict.agreement();
    if !(ha == hb && hb == hc && hc == hd) {
        return Err(Error::Internal(format!(
            "criterion tests disagree: homotopy {ha}, class zero {hb}, augmentation {hc}, unit survives {hd}"
        )));
    }
    if verdict.nonvanishing {
        let dims = homology(&trunc)?.dims();
        let series = symmetric_series(a.grading(), &verdict.linearized.dims(), word_bound);
        if dims != series {
            return Err(Error::Internal(format!("truncated homology {dims:?} differs from S(H) series {series:?}")));
        }
        verdict.truncated_dims = Some(dims);
    }
    Ok(verdict)
}

// ---------------------------------------------------------------------------
// Homotopy transport

/// εl1 = εl + K∘∂, computed by generator order (K read as an (εl1, εl)-derivation).
pub fn homotopic_augmentation(a: &CdgaPresentation, el: &Augmentation, k: &HomotopyCertificate) -> Result<Augmentation> {
    let alg = a.algebra();
    let g = alg.grading();
    if k.values.iter().enumerate().any(|(i, v)| !v.is_zero() && g.reduce(alg.degree(i)) != g.reduce(-1)) {
        return Err(Error::Invalid("homotopy values must sit on degree −1 generators".into()));
    }
    let mut el1 = el.clone();
    for x in alg.generators_in_degree(0) {
        let dx = a.differential_of(x);
        for (m, _) in dx.terms() {
            if derivation_weight(alg, m, el, el).is_some() && m.factors().iter().any(|&(y, _)| y >= x && g.reduce(alg.degree(y)) == 0) {
                return Err(Error::Unsupported(format!("∂{} uses a degree 0 generator that is not earlier", alg.id(x))));
            }
        }
        let shift = derivation_eval(alg, dx, &k.values, &el1, el);
        el1.set(x, el.value(x) + shift);
    }
    validate_augmentation(a, &el1).into_result().map_err(|e| Error::Internal(format!("εl + K∘∂ is not an augmentation: {e}")))?;
    Ok(el1)
}

/// Φ(ĥ) = Σ linear[h] + constant[h], an algebra automorphism of S(V̂) of degree 0.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportMap {
    pub linear: Vec<SparseVec>,
    pub constant: Vec<Q>,
    /// Hats on which the closed-form map failed before correction.
    pub formula_failures: Vec<usize>,
}

impl TransportMap {
    pub fn identity(n: usize) -> Self {
        TransportMap { linear: (0..n).map(unit_vec).collect(), constant: vec![Q::zero(); n], formula_failures: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        let id = TransportMap::identity(self.linear.len());
        self.linear == id.linear && self.constant == id.constant
    }

    pub fn determinant(&self) -> Q {
        let n = self.linear.len();
        let dense: Vec<Vec<Q>> =
            (0..n).map(|c| (0..n).map(|r| self.linear[c].get(&r).cloned().unwrap_or_else(Q::zero)).collect()).collect();
        linalg::determinant(&dense)
    }

    /// ∂^target ∘ Φ = Φ ∘ ∂^source on every hat; returns the failing hats.
    pub fn intertwining_failures(&self, target: &BilinearizedPackage, source: &BilinearizedPackage) -> Vec<usize> {
        let (lin, cst) = self.residual(target, source);
        (0..self.linear.len()).filter(|&v| !lin[v].is_empty() || !cst[v].is_zero()).collect()
    }

    /// Per hat: (∂Φ − Φ∂) split into its linear and constant parts.
    fn residual(&self, target: &BilinearizedPackage, source: &BilinearizedPackage) -> (Vec<SparseVec>, Vec<Q>) {
        let n = self.linear.len();
        let mut lin = Vec::with_capacity(n);
        let mut cst = Vec::with_capacity(n);
        for v in 0..n {
            let mut l = linalg::apply(&target.module, &self.linear[v]);
            linalg::axpy(&mut l, &linalg::apply(&self.linear, &source.module[v]), &-Q::one());
            let mut c = target.fundamental_of(&self.linear[v]) - &source.fundamental[v];
            for (w, x) in &source.module[v] {
                c -= x * &self.constant[*w];
            }
            lin.push(l);
            cst.push(c);
        }
        (lin, cst)
    }
}

/// Corrects `start` by the exact solution (ΔL, Δc) of the linearized
/// intertwining equations, keeping Φ of degree 0 and invertible.
fn correct_transport(start: &TransportMap, target: &BilinearizedPackage, source: &BilinearizedPackage) -> Result<TransportMap> {
    let alg = target.hat_algebra();
    let g = alg.grading();
    let n = alg.len();
    let deg = |h: usize| g.reduce(alg.degree(h));
    // unknowns: ΔL[y][v] for deg y = deg v, then Δc[w] for deg w = 0
    let mut unknowns: Vec<(usize, Option<usize>)> = Vec::new();
    for v in 0..n {
        for y in 0..n {
            if deg(y) == deg(v) {
                unknowns.push((y, Some(v)));
            }
        }
    }
    for w in 0..n {
        if deg(w) == 0 {
            unknowns.push((w, None));
        }
    }
    let lin_eq = |r: usize, v: usize| r * n + v;
    let cst_eq = |v: usize| n * n + v;
    let mut cols = Vec::with_capacity(unknowns.len());
    for &(y, v) in &unknowns {
        let mut col = SparseVec::new();
        let mut add = |e: usize, x: &Q| {
            let mut t = SparseVec::new();
            t.insert(e, x.clone());
            linalg::axpy(&mut col, &t, &Q::one());
        };
        match v {
            Some(v) => {
                // (M ΔL)[r][v] gains M[r][y]; (ΔL M1)[y][v'] gains M1[v][v']
                for (r, x) in &target.module[y] {
                    add(lin_eq(*r, v), x);
                }
                for vp in 0..n {
                    if let Some(x) = source.module[vp].get(&v) {
                        add(lin_eq(y, vp), &-x);
                    }
                }
                add(cst_eq(v), &target.fundamental[y]);
            }
            None => {
                for vp in 0..n {
                    if let Some(x) = source.module[vp].get(&y) {
                        add(cst_eq(vp), &-x);
                    }
                }
            }
        }
        cols.push(col);
    }
    let (lin, cst) = start.residual(target, source);
    let mut rhs = SparseVec::new();
    for v in 0..n {
        for (r, x) in &lin[v] {
            rhs.insert(lin_eq(*r, v), -x);
        }
        if !cst[v].is_zero() {
            rhs.insert(cst_eq(v), -cst[v].clone());
        }
    }
    let (null, _) = linalg::kernel(&cols);
    let mut ech = Echelon::new();
    for (j, c) in cols.iter().enumerate() {
        ech.insert(c, unit_vec(j));
    }
    let particular =
        ech.solve(&rhs).ok_or_else(|| Error::Internal("no affine intertwiner between the bilinearized differentials".into()))?;
    let build = |x: &SparseVec| {
        let mut m = start.clone();
        for (j, a) in x {
            match unknowns[*j] {
                (y, Some(v)) => linalg::axpy(&mut m.linear[v], &unit_vec(y), a),
                (w, None) => m.constant[w] += a,
            }
        }
        m
    };
    let mut x = particular.clone();
    for attempt in 0..=null.len().max(1) * 4 {
        let m = build(&x);
        if !m.determinant().is_zero() {
            debug_assert!(m.intertwining_failures(target, source).is_empty());
            return Ok(m);
        }
        // deterministic nudges along the null space
        x = particular.clone();
        for (i, z) in null.iter().enumerate() {
            let a = crate::rational::q((((attempt + 1) * (i + 2) * 7919) % 13) as i64 - 6);
            linalg::axpy(&mut x, z, &a);
        }
    }
    Err(Error::Internal("every intertwiner found is singular".into()))
}

fn bipoly_mul(a: &BTreeMap<(u32, u32), Q>, b: &BTreeMap<(u32, u32), Q>) -> BTreeMap<(u32, u32), Q> {
    let mut out: BTreeMap<(u32, u32), Q> = BTreeMap::new();
    for (&(i, j), x) in a {
        for (&(k, l), y) in b {
            *out.entry((i + k, j + l)).or_insert_with(Q::zero) += x * y;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// ∫∫_{0<s<t<1} of a polynomial in (s, t).
fn integrate_triangle(p: &BTreeMap<(u32, u32), Q>) -> Q {
    p.iter().map(|(&(a, b), c)| c / Q::from_integer((((a + 1) * (a + b + 2)) as i64).into())).sum()
}

/// K̃(m) ∈ V for K̃(x₁⋯x_k) = avg_g Σ_j K(prefix) x_{g(j)} εr(suffix), with K on
/// the prefix read as an (εl, εl1)-derivation.  Placing the K-factor at time s
/// and the kept factor at time t > s, each other factor contributes
/// s·εl + (t − s)·εl1 + (1 − t)·εr.
///
/// The opposite reading (εl1 before the K-factor) does not intertwine.
pub fn k_tilde(alg: &GradedAlgebra, m: &Monomial, k: &[Q], el: &Augmentation, el1: &Augmentation, er: &Augmentation) -> SparseVec {
    let g = alg.grading();
    let w = m.word();
    let mut out = SparseVec::new();
    for p in 0..w.len() {
        if k[w[p]].is_zero() {
            continue;
        }
        for j in 0..w.len() {
            if j == p || (0..w.len()).any(|i| i != p && i != j && g.reduce(alg.degree(w[i])) != 0) {
                continue;
            }
            let mut poly: BTreeMap<(u32, u32), Q> = BTreeMap::from([((0, 0), Q::one())]);
            for (i, &x) in w.iter().enumerate() {
                if i == p || i == j {
                    continue;
                }
                let lin = BTreeMap::from([
                    ((0, 0), er.value(x).clone()),
                    ((1, 0), el.value(x) - el1.value(x)),
                    ((0, 1), el1.value(x) - er.value(x)),
                ]);
                poly = bipoly_mul(&poly, &lin);
            }
            let mut c = &k[w[p]] * integrate_triangle(&poly);
            if j < p && alg.is_odd(w[j]) && alg.is_odd(w[p]) {
                c = -c;
            }
            let mut e = SparseVec::new();
            e.insert(w[j], c);
            linalg::axpy(&mut out, &e, &Q::one());
        }
    }
    out
}

/// Φ with ∂^{(εl,εr)} Φ = Φ ∂^{(εl1,εr)}, starting from the closed form
/// Φ(v̂) = v̂ + hat(K̃(∂v)) − K(v).  The closed form does not always
/// intertwine; any residual is removed by solving the intertwining equations
/// exactly, and the failing hats are kept in `formula_failures`.
pub fn homotopy_transport(
    a: &CdgaPresentation,
    el: &Augmentation,
    el1: &Augmentation,
    k: &HomotopyCertificate,
    er: &Augmentation,
) -> Result<TransportMap> {
    if !k.verify(a, el1, el) {
        return Err(Error::Invalid("K∘∂ ≠ εl1 − εl".into()));
    }
    let target = bilinearize(a, el, er)?;
    let source = bilinearize(a, el1, er)?;
    let alg = a.algebra();
    let hats = &target.hats;
    let n = alg.len();
    let mut map = TransportMap::identity(n);
    for v in 0..n {
        let h = hats.hat_of[v];
        let mut lin = unit_vec(h);
        for (m, c) in a.differential_of(v).terms() {
            let kt = k_tilde(alg, m, &k.values, el, el1, er);
            let kt: SparseVec = kt.into_iter().map(|(x, y)| (hats.hat_of[x], y)).collect();
            linalg::axpy(&mut lin, &kt, c);
        }
        map.linear[h] = lin;
        map.constant[h] = -k.values[v].clone();
    }
    map.formula_failures = map.intertwining_failures(&target, &source);
    if map.formula_failures.is_empty() && !map.determinant().is_zero() {
        return Ok(map);
    }
    let fixed = correct_transport(&map, &target, &source)?;
    if let Some(&h) = fixed.intertwining_failures(&target, &source).first() {
        return Err(Error::Internal(format!("transport fails to intertwine on {}", target.hat_algebra().id(h))));
    }
    Ok(fixed)
}

#[cfg(test)]
#[path = "criterion_tests.rs"]
mod tests;
