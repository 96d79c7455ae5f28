//! Counting model for rigid gluings in a contact neighborhood of a convex
//! hypersurface: trees of rigid curves and planes, the normal obstruction
//! section, branch-by-branch solvability, and aggregation into ∂ on the hats.
//!
//! Decisions are exact sign combinatorics.  Neck lengths are reported as
//! floats only.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::bilinearization::{bilinearize, hat_id, Augmentation};
use crate::error::{Error, Result};
use crate::graded_algebra::{CdgaPresentation, Generator, GradedAlgebra, Grading, Monomial, Polynomial};
use crate::linalg::{self, Echelon, SparseVec};
use crate::random::{random_instance, RandomParams};
use crate::rational::{factorial, fmt_q, q, qf, sign, to_f64, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn symbol(self) -> &'static str {
        match self {
            Side::Plus => "+",
            Side::Minus => "-",
        }
    }

    /// The plane asymptotic coefficient used when none is given.
    pub fn default_k(self) -> Q {
        match self {
            Side::Plus => q(-1),
            Side::Minus => q(1),
        }
    }
}

/// A rigid curve in ℝ × Γ with one positive end and ordered negative ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveDatum {
    pub plus: String,
    pub minus: Vec<String>,
    pub sign: i8,
    pub coeff: Q,
    /// Boundary levels s_i, one per negative end.
    pub levels: Vec<Q>,
}

/// A rigid plane filling the ± side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneDatum {
    pub orbit: String,
    pub side: Side,
    pub sign: i8,
    pub k: Q,
}

impl PlaneDatum {
    pub fn new(orbit: &str, side: Side, sign: i8) -> Self {
        PlaneDatum { orbit: orbit.to_string(), side, sign, k: side.default_k() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inventory {
    pub grading: Grading,
    pub orbits: Vec<Generator>,
    pub curves: Vec<CurveDatum>,
    pub planes: Vec<PlaneDatum>,
}

impl Inventory {
    pub fn algebra(&self) -> Result<GradedAlgebra> {
        GradedAlgebra::new(self.grading, self.orbits.clone())
    }

    pub fn validate(&self) -> Result<GradedAlgebra> {
        let alg = self.algebra()?;
        for (n, c) in self.curves.iter().enumerate() {
            let what = |m: &str| Error::Invalid(format!("curve {n}: {m}"));
            let top = alg.lookup(&c.plus)?;
            let mut deg = 0;
            for m in &c.minus {
                deg += alg.degree(alg.lookup(m)?);
            }
            if !self.grading.same(alg.degree(top) - 1, deg) {
                return Err(what("negative ends do not have degree one less than the positive end"));
            }
            if c.sign.abs() != 1 {
                return Err(what("sign must be ±1"));
            }
            if c.coeff.is_zero() {
                return Err(what("zero coefficient"));
            }
            if c.levels.len() != c.minus.len() {
                return Err(what("one boundary level per negative end"));
            }
            if c.levels.iter().any(|s| !s.is_negative()) {
                return Err(what("boundary levels must be negative"));
            }
        }
        for (n, p) in self.planes.iter().enumerate() {
            let what = |m: &str| Error::Invalid(format!("plane {n}: {m}"));
            let g = alg.lookup(&p.orbit)?;
            if alg.degree(g) != 0 {
                return Err(what("rigid planes only end on degree 0 orbits"));
            }
            if p.sign.abs() != 1 {
                return Err(what("sign must be ±1"));
            }
            let ok = match p.side {
                Side::Plus => p.k.is_negative(),
                Side::Minus => p.k.is_positive(),
            };
            if !ok {
                return Err(what("asymptotic coefficient has the wrong sign for its side"));
            }
        }
        Ok(alg)
    }

    /// ∂̌ as the signed count of curves per monomial.
    pub fn presentation(&self) -> Result<CdgaPresentation> {
        let alg = self.validate()?;
        let mut diff = vec![Polynomial::zero(); alg.len()];
        for c in &self.curves {
            let ids: Vec<&str> = c.minus.iter().map(String::as_str).collect();
            let (s, m) = alg.normalize_ids(&ids)?;
            if let Some(m) = m {
                let coeff = &c.coeff * q(i64::from(s) * i64::from(c.sign));
                diff[alg.lookup(&c.plus)?].add_term(m, coeff);
            }
        }
        CdgaPresentation::new(alg, diff)
    }

    /// (ε⁺, ε⁻) as signed plane counts per orbit.
    pub fn augmentations(&self) -> Result<(Augmentation, Augmentation)> {
        let alg = self.validate()?;
        let mut plus = Augmentation::zero(&alg);
        let mut minus = Augmentation::zero(&alg);
        for p in &self.planes {
            let g = alg.lookup(&p.orbit)?;
            let eps = if p.side == Side::Plus { &mut plus } else { &mut minus };
            let v = eps.value(g) + q(i64::from(p.sign));
            eps.set(g, v);
        }
        Ok((plus, minus))
    }
}

// ---------------------------------------------------------------------------
// Trees and shapes

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Curve,
    Plane,
}

/// Rooted tree; `children[v][j]` is the far end of the j-th outgoing edge of
/// `v`, `None` for a free edge.  Each vertex has exactly one incoming edge
/// (the root's is the positive end of the whole configuration).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub kinds: Vec<VertexKind>,
    pub children: Vec<Vec<Option<usize>>>,
    pub root: usize,
}

pub type Edge = (usize, usize);

impl Tree {
    pub fn validate(&self) -> Result<()> {
        let n = self.kinds.len();
        if self.children.len() != n || self.root >= n {
            return Err(Error::Invalid("tree tables have inconsistent sizes".into()));
        }
        let mut incoming = vec![0usize; n];
        for (v, out) in self.children.iter().enumerate() {
            if self.kinds[v] == VertexKind::Plane && !out.is_empty() {
                return Err(Error::Invalid(format!("plane vertex {v} has outgoing edges")));
            }
            for &c in out.iter().flatten() {
                if c >= n {
                    return Err(Error::Invalid(format!("edge to missing vertex {c}")));
                }
                incoming[c] += 1;
            }
        }
        if incoming[self.root] != 0 {
            return Err(Error::Invalid("the root has a gluing edge coming in".into()));
        }
        if let Some(v) = (0..n).find(|&v| v != self.root && incoming[v] != 1) {
            return Err(Error::Invalid(format!("vertex {v} has {} incoming edges", incoming[v])));
        }
        if self.preorder().len() != n {
            return Err(Error::Invalid("tree is not connected".into()));
        }
        Ok(())
    }

    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut seen = vec![false; self.kinds.len()];
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            out.push(v);
            for &c in self.children[v].iter().rev().flatten() {
                stack.push(c);
            }
        }
        out
    }

    pub fn parents(&self) -> Vec<Option<Edge>> {
        let mut p = vec![None; self.kinds.len()];
        for (v, out) in self.children.iter().enumerate() {
            for (j, c) in out.iter().enumerate() {
                if let Some(c) = c {
                    p[*c] = Some((v, j));
                }
            }
        }
        p
    }

    pub fn curve_count(&self) -> usize {
        self.kinds.iter().filter(|k| **k == VertexKind::Curve).count()
    }

    /// Free edges in preorder.
    pub fn free_edges(&self) -> Vec<Edge> {
        self.preorder()
            .into_iter()
            .flat_map(|v| self.children[v].iter().enumerate().filter(|(_, c)| c.is_none()).map(move |(j, _)| (v, j)))
            .collect()
    }

    fn is_plane(&self, c: Option<usize>) -> bool {
        c.is_some_and(|c| self.kinds[c] == VertexKind::Plane)
    }

    fn is_curve(&self, c: Option<usize>) -> bool {
        c.is_some_and(|c| self.kinds[c] == VertexKind::Curve)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexDatum {
    Curve(usize),
    Plane(usize),
}

/// A tree with a rigid datum (index into the inventory) at every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingShape {
    pub tree: Tree,
    pub data: Vec<VertexDatum>,
}

impl GluingShape {
    /// One curve with planes on the listed ends; the rest stay free.
    pub fn capped_curve(curve: usize, arity: usize, caps: &BTreeMap<usize, usize>) -> Self {
        let mut kinds = vec![VertexKind::Curve];
        let mut data = vec![VertexDatum::Curve(curve)];
        let mut out = Vec::new();
        for j in 0..arity {
            match caps.get(&j) {
                Some(&p) => {
                    out.push(Some(kinds.len()));
                    kinds.push(VertexKind::Plane);
                    data.push(VertexDatum::Plane(p));
                }
                None => out.push(None),
            }
        }
        let mut children = vec![out];
        children.resize(kinds.len(), Vec::new());
        GluingShape { tree: Tree { kinds, children, root: 0 }, data }
    }

    pub fn plane(p: usize) -> Self {
        GluingShape { tree: Tree { kinds: vec![VertexKind::Plane], children: vec![vec![]], root: 0 }, data: vec![VertexDatum::Plane(p)] }
    }

    pub fn validate(&self, inv: &Inventory) -> Result<()> {
        self.tree.validate()?;
        if self.data.len() != self.tree.kinds.len() {
            return Err(Error::Invalid("one datum per vertex".into()));
        }
        for (v, d) in self.data.iter().enumerate() {
            match (*d, self.tree.kinds[v]) {
                (VertexDatum::Curve(c), VertexKind::Curve) => {
                    let cd = inv.curves.get(c).ok_or_else(|| Error::Invalid(format!("no curve {c}")))?;
                    if cd.minus.len() != self.tree.children[v].len() {
                        return Err(Error::Invalid(format!("vertex {v}: curve {c} has {} negative ends", cd.minus.len())));
                    }
                    for (j, ch) in self.tree.children[v].iter().enumerate() {
                        if let Some(ch) = ch {
                            if self.positive_orbit(inv, *ch)? != cd.minus[j] {
                                return Err(Error::Invalid(format!("orbit mismatch on edge ({v}, {j})")));
                            }
                        }
                    }
                }
                (VertexDatum::Plane(p), VertexKind::Plane) => {
                    if p >= inv.planes.len() {
                        return Err(Error::Invalid(format!("no plane {p}")));
                    }
                }
                _ => return Err(Error::Invalid(format!("vertex {v}: datum does not match vertex kind"))),
            }
        }
        Ok(())
    }

    pub fn positive_orbit<'a>(&self, inv: &'a Inventory, v: usize) -> Result<&'a str> {
        match self.data[v] {
            VertexDatum::Curve(c) => inv.curves.get(c).map(|c| c.plus.as_str()),
            VertexDatum::Plane(p) => inv.planes.get(p).map(|p| p.orbit.as_str()),
        }
        .ok_or_else(|| Error::Invalid(format!("vertex {v} refers to missing data")))
    }

    fn curve<'a>(&self, inv: &'a Inventory, v: usize) -> &'a CurveDatum {
        match self.data[v] {
            VertexDatum::Curve(c) => &inv.curves[c],
            VertexDatum::Plane(_) => unreachable!("validated shape"),
        }
    }

    fn plane_at<'a>(&self, inv: &'a Inventory, v: usize) -> &'a PlaneDatum {
        match self.data[v] {
            VertexDatum::Plane(p) => &inv.planes[p],
            VertexDatum::Curve(_) => unreachable!("validated shape"),
        }
    }
}

// ---------------------------------------------------------------------------
// Normal section

/// `coeff · exp(−ε_σ (var − shift))`, or just `coeff` when `var` is `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpTerm {
    pub coeff: Q,
    pub var: Option<String>,
    pub shift: Q,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpSum {
    pub terms: Vec<ExpTerm>,
}

impl ExpSum {
    fn push(&mut self, t: ExpTerm) {
        if !t.coeff.is_zero() {
            self.terms.push(t);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant part (terms without a variable).
    pub fn constant(&self) -> Q {
        self.terms.iter().filter(|t| t.var.is_none()).map(|t| t.coeff.clone()).sum()
    }

    pub fn eval(&self, eps_sigma: f64, vars: &BTreeMap<String, f64>) -> Result<f64> {
        let mut acc = 0.0;
        for t in &self.terms {
            let c = to_f64(&t.coeff);
            acc += match &t.var {
                None => c,
                Some(v) => {
                    let x = vars.get(v).ok_or_else(|| Error::Invalid(format!("no value for `{v}`")))?;
                    c * (-eps_sigma * (x - to_f64(&t.shift))).exp()
                }
            };
        }
        Ok(acc)
    }
}

pub fn neck_var(e: Edge) -> String {
    format!("nl{}.{}", e.0, e.1)
}

pub fn plane_var(e: Edge) -> String {
    format!("l{}.{}", e.0, e.1)
}

/// Components in the rescaled basis μ̃, one per outgoing edge of a curve
/// vertex, keyed by edge.
pub fn normal_section(inv: &Inventory, shape: &GluingShape, coeffs: &BTreeMap<usize, Q>) -> Result<BTreeMap<Edge, ExpSum>> {
    shape.validate(inv)?;
    let t = &shape.tree;
    let mut out = BTreeMap::new();
    for v in t.preorder() {
        if t.kinds[v] != VertexKind::Curve {
            continue;
        }
        let c = coeffs.get(&v).ok_or_else(|| Error::Invalid(format!("no coefficient for curve vertex {v}")))?;
        let cd = shape.curve(inv, v);
        for (j, ch) in t.children[v].iter().enumerate() {
            let e = (v, j);
            let mut s = ExpSum::default();
            s.push(ExpTerm { coeff: c.clone(), var: None, shift: Q::zero() });
            match ch {
                None => {}
                Some(w) if t.kinds[*w] == VertexKind::Plane => {
                    let k = &shape.plane_at(inv, *w).k;
                    s.push(ExpTerm { coeff: -k.clone(), var: Some(plane_var(e)), shift: cd.levels[j].clone() });
                }
                Some(w) => {
                    let cw = coeffs.get(w).ok_or_else(|| Error::Invalid(format!("no coefficient for curve vertex {w}")))?;
                    s.push(ExpTerm { coeff: -cw.clone(), var: Some(neck_var(e)), shift: cd.levels[j].clone() });
                }
            }
            out.insert(e, s);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Branches and N = 1 solutions

/// End p of the curve receives `values[perm[p]]`; values strictly increase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultisectionBranch {
    pub perm: Vec<usize>,
    pub values: Vec<Q>,
}

impl MultisectionBranch {
    pub fn new(perm: Vec<usize>, values: Vec<Q>) -> Result<Self> {
        let n = values.len();
        if perm.len() != n || perm.iter().sorted().cloned().ne(0..n) {
            return Err(Error::Invalid("branch permutation is not a permutation of the ends".into()));
        }
        if values.iter().any(|v| !v.is_positive()) || values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("branch values must be positive and strictly increasing".into()));
        }
        Ok(MultisectionBranch { perm, values })
    }

    pub fn value_at(&self, end: usize) -> &Q {
        &self.values[self.perm[end]]
    }
}

/// The N̲! branches over one increasing value list.
pub fn all_branches(values: &[Q]) -> Result<Vec<MultisectionBranch>> {
    let n = values.len();
    (0..n).permutations(n).map(|p| MultisectionBranch::new(p, values.to_vec())).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchSolution {
    pub c: Q,
    /// Neck length ℓ_i per capped end.
    pub ell: BTreeMap<usize, f64>,
}

/// Curve vertex, uncapped end, and (end, plane vertex) per capped end.
type SingleCurve = (usize, usize, Vec<(usize, usize)>);

/// The N = 1 shape's curve vertex, its uncapped end and the capped ends.
fn single_curve(shape: &GluingShape) -> Result<SingleCurve> {
    let t = &shape.tree;
    if t.curve_count() != 1 || t.kinds[t.root] != VertexKind::Curve {
        return Err(Error::Invalid("not a single-curve shape".into()));
    }
    let v = t.root;
    let free: Vec<usize> = (0..t.children[v].len()).filter(|&j| t.children[v][j].is_none()).collect();
    if free.len() != 1 {
        return Err(Error::Invalid(format!("a single-curve shape leaves exactly one end uncapped, found {}", free.len())));
    }
    let caps = t.children[v].iter().enumerate().filter_map(|(j, c)| c.map(|w| (j, w))).collect();
    Ok((v, free[0], caps))
}

/// Solvability is sgn(𝔰_k − 𝔰_i) = sgn(k_i) at every capped end i.
pub fn solve_branch(inv: &Inventory, shape: &GluingShape, branch: &MultisectionBranch, eps_sigma: f64) -> Result<Option<BranchSolution>> {
    shape.validate(inv)?;
    let (v, k, caps) = single_curve(shape)?;
    let cd = shape.curve(inv, v);
    if branch.perm.len() != cd.minus.len() {
        return Err(Error::Invalid("branch size differs from the number of negative ends".into()));
    }
    let sk = branch.value_at(k);
    let mut ell = BTreeMap::new();
    for (i, w) in caps {
        let ki = &shape.plane_at(inv, w).k;
        let gap = sk - branch.value_at(i);
        if sign(&gap) != sign(ki) {
            return Ok(None);
        }
        let l = to_f64(&cd.levels[i]) - (to_f64(&(gap / ki))).ln() / eps_sigma;
        ell.insert(i, l);
    }
    Ok(Some(BranchSolution { c: sk.clone(), ell }))
}

/// Signed weight of an N ≤ 1 shape; `branches` must be the full branch family.
pub fn count_contribution(inv: &Inventory, shape: &GluingShape, branches: &[MultisectionBranch]) -> Result<Q> {
    shape.validate(inv)?;
    match shape.tree.curve_count() {
        0 => {
            let p = shape.plane_at(inv, shape.tree.root);
            let s = q(i64::from(p.sign));
            Ok(if p.side == Side::Plus { s } else { -s })
        }
        1 => {
            let (v, _, caps) = single_curve(shape)?;
            let cd = shape.curve(inv, v);
            let n = cd.minus.len();
            let perms: BTreeSet<&Vec<usize>> = branches.iter().map(|b| &b.perm).collect();
            if branches.len() as u64 != (1..=n as u64).product::<u64>() || perms.len() != branches.len() {
                return Err(Error::Invalid("count needs every branch exactly once".into()));
            }
            let mut solved = 0i64;
            for b in branches {
                if solve_branch(inv, shape, b, 1.0)?.is_some() {
                    solved += 1;
                }
            }
            let mut s = i64::from(cd.sign);
            for (_, w) in caps {
                s *= i64::from(shape.plane_at(inv, w).sign);
            }
            Ok(Q::new(BigInt::from(solved * s), factorial(n)) * &cd.coeff)
        }
        _ => Err(Error::Unsupported("shapes with several curve vertices cancel; see verify_cancellation".into())),
    }
}

/// All N = 0 and N = 1 shapes with positive end on `orbit`.
pub fn shapes_for(inv: &Inventory, orbit: &str) -> Vec<GluingShape> {
    let mut out = Vec::new();
    for (p, pd) in inv.planes.iter().enumerate() {
        if pd.orbit == orbit {
            out.push(GluingShape::plane(p));
        }
    }
    let caps_on = |o: &str| -> Vec<usize> { inv.planes.iter().enumerate().filter(|(_, p)| p.orbit == o).map(|(i, _)| i).collect() };
    for (c, cd) in inv.curves.iter().enumerate() {
        if cd.plus != orbit {
            continue;
        }
        let n = cd.minus.len();
        for k in 0..n {
            let others: Vec<usize> = (0..n).filter(|&i| i != k).collect();
            if others.is_empty() {
                out.push(GluingShape::capped_curve(c, n, &BTreeMap::new()));
                continue;
            }
            let choices: Vec<Vec<usize>> = others.iter().map(|&i| caps_on(&cd.minus[i])).collect();
            if choices.iter().any(Vec::is_empty) {
                continue;
            }
            for pick in choices.iter().map(|c| c.iter().copied()).multi_cartesian_product() {
                let caps: BTreeMap<usize, usize> = others.iter().copied().zip(pick).collect();
                out.push(GluingShape::capped_curve(c, n, &caps));
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct GluingComparison {
    /// ∂ on the hats from the shape counts, indexed by hat generator.
    pub counted: Vec<Polynomial>,
    /// ∂ from bilinearizing ∂̌ with (ε⁺, ε⁻).
    pub expected: Vec<Polynomial>,
    pub hats: GradedAlgebra,
    pub shapes: usize,
    pub mismatches: Vec<String>,
}

impl GluingComparison {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Sums the N ≤ 1 contributions on every orbit and compares them with the
/// bilinearized differential coefficient by coefficient.
pub fn aggregate_differential(inv: &Inventory) -> Result<GluingComparison> {
    let pres = inv.presentation()?;
    let (plus, minus) = inv.augmentations()?;
    let pkg = bilinearize(&pres, &plus, &minus)?;
    let alg = pres.algebra();
    let hats = pkg.hat_algebra().clone();
    let mut counted = vec![Polynomial::zero(); hats.len()];
    let mut shapes = 0;
    for i in 0..alg.len() {
        let h = pkg.hats.hat_of[i];
        for shape in shapes_for(inv, alg.id(i)) {
            shapes += 1;
            let out = match shape.tree.free_edges().as_slice() {
                [] => Monomial::one(),
                [(v, j)] => {
                    let id = &shape.curve(inv, *v).minus[*j];
                    Monomial::generator(hats.lookup(&hat_id(id))?)
                }
                _ => unreachable!("N ≤ 1 shapes have at most one free edge"),
            };
            let branches = match shape.data[shape.tree.root] {
                VertexDatum::Curve(c) => all_branches(&(1..=inv.curves[c].minus.len() as i64).map(q).collect_vec())?,
                VertexDatum::Plane(_) => Vec::new(),
            };
            let w = count_contribution(inv, &shape, &branches)?;
            counted[h].add_term(out, w);
        }
    }
    let expected: Vec<Polynomial> = (0..hats.len()).map(|h| pkg.algebra.differential_of(h).clone()).collect();
    let mut mismatches = Vec::new();
    for h in 0..hats.len() {
        let diff = counted[h].sub(&expected[h]);
        for (m, _) in diff.terms() {
            mismatches.push(format!(
                "∂{}: coefficient of {} counted {}, bilinearized {}",
                hats.id(h),
                hats.format_monomial(m),
                fmt_q(&counted[h].coefficient(m)),
                fmt_q(&expected[h].coefficient(m))
            ));
        }
    }
    Ok(GluingComparison { counted, expected, hats, shapes, mismatches })
}

// ---------------------------------------------------------------------------
// Several curve vertices

/// Where a free row's own multisection value lives: the row's own edge for
/// ordinary curve vertices, the incoming gluing edge for a bad subtree.
fn slot_of(parents: &[Option<Edge>], bad: &[bool], e: Edge) -> Edge {
    if bad[e.0] {
        parents[e.0].expect("bad vertices are not the root")
    } else {
        e
    }
}

/// Bad subtrees: a non-root curve vertex whose only non-plane end is a single
/// free edge.
pub fn bad_vertices(tree: &Tree) -> Vec<bool> {
    (0..tree.kinds.len())
        .map(|v| {
            v != tree.root
                && tree.kinds[v] == VertexKind::Curve
                && tree.children[v].iter().filter(|c| c.is_none()).count() == 1
                && !tree.children[v].iter().any(|c| tree.is_curve(*c))
        })
        .collect()
}

/// Free rows grouped by enlarged subtree (an ordinary curve vertex together
/// with its bad children).
pub fn enlarged_groups(tree: &Tree) -> Vec<Vec<usize>> {
    let parents = tree.parents();
    let bad = bad_vertices(tree);
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (row, (v, _)) in tree.free_edges().into_iter().enumerate() {
        let owner = if bad[v] { parents[v].expect("bad vertices are not the root").0 } else { v };
        groups.entry(owner).or_default().push(row);
    }
    groups.into_values().collect()
}

/// Transpositions of free rows inside one enlarged subtree.
pub fn symmetry_transpositions(tree: &Tree) -> Vec<(usize, usize)> {
    enlarged_groups(tree).iter().flat_map(|g| g.iter().copied().tuple_combinations()).collect()
}

/// Multisection data on the non-plane ends of the curve vertices: a value
/// and a generic linear perturbation in the unknowns (x, W_v).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotBranch {
    pub values: BTreeMap<Edge, Q>,
    pub perturbations: BTreeMap<Edge, Vec<Q>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CancellationFamily {
    pub tree: Tree,
    pub branches: Vec<SlotBranch>,
}

/// Unknowns: x (common normal translation) and W_v for non-root curves.
fn unknowns(tree: &Tree) -> Vec<usize> {
    (0..tree.kinds.len()).filter(|&v| v != tree.root && tree.kinds[v] == VertexKind::Curve).collect()
}

/// The reduced section on the free rows as an affine map `A u + b`.
pub fn reduced_section(tree: &Tree, branch: &SlotBranch) -> Result<(Vec<Vec<Q>>, Vec<Q>)> {
    let parents = tree.parents();
    let bad = bad_vertices(tree);
    let vars = unknowns(tree);
    let col: BTreeMap<usize, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i + 1)).collect();
    let dim = vars.len() + 1;
    let free = tree.free_edges();
    let mut a = vec![vec![Q::zero(); dim]; free.len()];
    let mut b = vec![Q::zero(); free.len()];
    let value = |e: Edge| branch.values.get(&e).cloned().ok_or_else(|| Error::Invalid(format!("no branch value on edge {e:?}")));
    for (row, &e) in free.iter().enumerate() {
        a[row][0] += Q::one();
        // path of gluing edges from the root down to e's vertex
        let mut path = Vec::new();
        let mut v = e.0;
        while let Some(p) = parents[v] {
            path.push(p);
            v = p.0;
        }
        let mut terms: Vec<Edge> = path;
        if !bad[e.0] {
            terms.push(e);
        }
        for t in terms {
            let s = value(t)?;
            match col.get(&t.0) {
                Some(&c) => a[row][c] += s,
                None => b[row] += s,
            }
        }
        let slot = slot_of(&parents, &bad, e);
        if let Some(beta) = branch.perturbations.get(&slot) {
            if beta.len() != dim {
                return Err(Error::Invalid("perturbation has the wrong length".into()));
            }
            for (c, x) in beta.iter().enumerate() {
                a[row][c] += x;
            }
        }
    }
    Ok((a, b))
}

/// The branch acted on by the transposition of free rows `(r, s)`.
pub fn transpose_branch(tree: &Tree, branch: &SlotBranch, rows: (usize, usize)) -> SlotBranch {
    let parents = tree.parents();
    let bad = bad_vertices(tree);
    let free = tree.free_edges();
    let (x, y) = (slot_of(&parents, &bad, free[rows.0]), slot_of(&parents, &bad, free[rows.1]));
    let mut out = branch.clone();
    let swap = |m: &mut BTreeMap<Edge, Q>| {
        let (vx, vy) = (m.remove(&x), m.remove(&y));
        if let Some(v) = vy {
            m.insert(x, v);
        }
        if let Some(v) = vx {
            m.insert(y, v);
        }
    };
    swap(&mut out.values);
    let (px, py) = (out.perturbations.remove(&x), out.perturbations.remove(&y));
    if let Some(v) = py {
        out.perturbations.insert(x, v);
    }
    if let Some(v) = px {
        out.perturbations.insert(y, v);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroRecord {
    pub branch: usize,
    pub point: Vec<Q>,
    pub sign: i32,
    pub partner: usize,
}

#[derive(Clone, Debug)]
pub struct CancellationCertificate {
    pub transposition: (usize, usize),
    pub zeros: Vec<ZeroRecord>,
    pub total: i64,
}

/// Zero of the reduced section with W_v > 0, with its orientation sign.
fn isolated_zero(a: &[Vec<Q>], b: &[Q]) -> Result<Option<(Vec<Q>, i32)>> {
    let rows = a.len();
    let dim = a.first().map_or(0, Vec::len);
    let mut ech = Echelon::new();
    for c in 0..dim {
        let col: SparseVec = (0..rows).filter(|&r| !a[r][c].is_zero()).map(|r| (r, a[r][c].clone())).collect();
        ech.insert(&col, linalg::unit_vec(c));
    }
    let rhs: SparseVec = b.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(r, v)| (r, -v.clone())).collect();
    let Some(u) = ech.solve(&rhs) else { return Ok(None) };
    if ech.rank() < dim || rows != dim {
        return Err(Error::Degenerate("the reduced section is not transversely cut out".into()));
    }
    let point: Vec<Q> = (0..dim).map(|c| u.get(&c).cloned().unwrap_or_else(Q::zero)).collect();
    if point[1..].iter().any(|w| !w.is_positive()) {
        return Ok(None);
    }
    Ok(Some((point, sign(&linalg::determinant(a)))))
}

/// Pairs every zero with the zero of the transposed branch and checks that
/// the orientations are opposite.
pub fn verify_cancellation(family: &CancellationFamily) -> Result<CancellationCertificate> {
    let tree = &family.tree;
    tree.validate()?;
    if tree.curve_count() < 2 {
        return Err(Error::Invalid("cancellation families have at least two curve vertices".into()));
    }
    let n = tree.free_edges().len();
    if n != unknowns(tree).len() + 1 {
        return Err(Error::Invalid(format!("{n} free edges for {} curve vertices", tree.curve_count())));
    }
    let tau = *symmetry_transpositions(tree).first().ok_or_else(|| Error::Invalid("no enlarged subtree has two free edges".into()))?;
    if family.branches.is_empty() {
        return Ok(CancellationCertificate { transposition: tau, zeros: Vec::new(), total: 0 });
    }
    let mut zeros = Vec::new();
    for (i, br) in family.branches.iter().enumerate() {
        let partner_branch = transpose_branch(tree, br, tau);
        let partner = family
            .branches
            .iter()
            .position(|b| *b == partner_branch)
            .ok_or_else(|| Error::Invalid(format!("branch {i} has no transposed partner in the family")))?;
        if partner == i {
            return Err(Error::Degenerate(format!("branch {i} is fixed by the transposition")));
        }
        let (a, b) = reduced_section(tree, br)?;
        let (pa, pb) = reduced_section(tree, &partner_branch)?;
        let mut swapped_a = a.clone();
        let mut swapped_b = b.clone();
        swapped_a.swap(tau.0, tau.1);
        swapped_b.swap(tau.0, tau.1);
        if swapped_a != pa || swapped_b != pb {
            return Err(Error::Internal(format!("branch {i}: transposed section is not the row swap")));
        }
        if let Some((point, s)) = isolated_zero(&a, &b)? {
            zeros.push(ZeroRecord { branch: i, point, sign: s, partner });
        }
    }
    for z in &zeros {
        let Some(m) = zeros.iter().find(|y| y.branch == z.partner) else {
            return Err(Error::Internal(format!("zero of branch {} is unpaired", z.branch)));
        };
        if m.point != z.point || m.sign != -z.sign || m.partner != z.branch {
            return Err(Error::Internal(format!("zero of branch {} does not cancel its partner", z.branch)));
        }
    }
    let total = zeros.iter().map(|z| i64::from(z.sign)).sum();
    if total != 0 {
        return Err(Error::Internal(format!("signed count {total} ≠ 0")));
    }
    Ok(CancellationCertificate { transposition: tau, zeros, total })
}

// ---------------------------------------------------------------------------
// Random instances

#[derive(Clone, Debug)]
pub struct InventoryParams {
    pub max_orbits: usize,
    pub max_ends: usize,
    pub grading: Grading,
}

impl Default for InventoryParams {
    fn default() -> Self {
        InventoryParams { max_orbits: 5, max_ends: 4, grading: Grading::Integer }
    }
}

fn random_levels<R: Rng>(rng: &mut R, n: usize) -> Vec<Q> {
    let mut l: Vec<Q> = (1..=n as i64).map(|i| -qf(2 * i - 1, rng.gen_range(1..=3) * 2)).collect();
    l.shuffle(rng);
    l
}

/// An inventory realizing a random valid cDGA and augmentation pair.
pub fn random_inventory<R: Rng>(rng: &mut R, p: &InventoryParams) -> Inventory {
    let rp = RandomParams {
        max_generators: p.max_orbits,
        max_word_length: p.max_ends,
        grading: p.grading,
        degree_pool: Some(vec![-1, 0, 0, 0, 1, 1]),
        ..Default::default()
    };
    let inst = random_instance(rng, &rp);
    let alg = inst.presentation.algebra().clone();
    let mut curves = Vec::new();
    for i in 0..alg.len() {
        for (m, c) in inst.presentation.differential_of(i).terms() {
            let parts = if m.word_length() >= 2 && rng.gen_bool(0.3) { vec![c / q(2), c / q(2)] } else { vec![c.clone()] };
            for part in parts {
                let mut word = m.word();
                word.shuffle(rng);
                let (s, _) = alg.normalize_word(&word);
                let sgn: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
                curves.push(CurveDatum {
                    plus: alg.id(i).to_string(),
                    minus: word.iter().map(|&g| alg.id(g).to_string()).collect(),
                    sign: sgn,
                    coeff: part * q(i64::from(s) * i64::from(sgn)),
                    levels: random_levels(rng, word.len()),
                });
            }
        }
    }
    let mut planes = Vec::new();
    for (side, eps) in [(Side::Plus, &inst.left), (Side::Minus, &inst.right)] {
        for g in 0..alg.len() {
            let v = eps.value(g);
            let count = v.abs().to_integer();
            let s: i8 = if v.is_negative() { -1 } else { 1 };
            for _ in 0..count.to_string().parse::<usize>().expect("small integer augmentation") {
                planes.push(PlaneDatum {
                    orbit: alg.id(g).to_string(),
                    side,
                    sign: s,
                    k: side.default_k() * qf(rng.gen_range(1..=4), rng.gen_range(1..=3)),
                });
            }
            if alg.degree(g) == 0 && rng.gen_bool(0.15) {
                planes.push(PlaneDatum::new(alg.id(g), side, 1));
                planes.push(PlaneDatum::new(alg.id(g), side, -1));
            }
        }
    }
    planes.shuffle(rng);
    Inventory { grading: p.grading, orbits: alg.generators().to_vec(), curves, planes }
}

/// A random tree with `curves` curve vertices, as many free edges, planes
/// sprinkled on extra ends, and at least one symmetry transposition.
pub fn random_cancellation_tree<R: Rng>(rng: &mut R, curves: usize) -> Tree {
    loop {
        let mut kinds = vec![VertexKind::Curve; curves];
        let mut children: Vec<Vec<Option<usize>>> = vec![Vec::new(); curves];
        for v in 1..curves {
            let p = rng.gen_range(0..v);
            children[p].push(Some(v));
        }
        let mut free_left = curves;
        for v in 0..curves {
            let leaf = children[v].is_empty();
            let want = if leaf { 1 } else { 0 };
            for _ in 0..want {
                children[v].push(None);
                free_left = free_left.saturating_sub(1);
            }
        }
        for _ in 0..free_left {
            let v = rng.gen_range(0..curves);
            children[v].push(None);
        }
        for v in 0..curves {
            for _ in 0..rng.gen_range(0..=1) {
                children[v].push(Some(kinds.len()));
                kinds.push(VertexKind::Plane);
                children.push(Vec::new());
            }
            children[v].shuffle(rng);
        }
        let tree = Tree { kinds, children, root: 0 };
        if tree.free_edges().len() == curves && !symmetry_transpositions(&tree).is_empty() && tree.validate().is_ok() {
            return tree;
        }
    }
}

fn random_slot_branch<R: Rng>(rng: &mut R, tree: &Tree) -> SlotBranch {
    let parents = tree.parents();
    let bad = bad_vertices(tree);
    let dim = unknowns(tree).len() + 1;
    let mut values = BTreeMap::new();
    let mut perturbations = BTreeMap::new();
    let slots: BTreeSet<Edge> = tree.free_edges().into_iter().map(|e| slot_of(&parents, &bad, e)).collect();
    let mut pool: Vec<i64> = (1..=40).collect();
    pool.shuffle(rng);
    let mut next = pool.into_iter();
    for (v, out) in tree.children.iter().enumerate() {
        if tree.kinds[v] != VertexKind::Curve {
            continue;
        }
        for (j, c) in out.iter().enumerate() {
            if tree.is_plane(*c) || (c.is_none() && bad[v]) {
                continue;
            }
            values.insert((v, j), qf(next.next().expect("enough values"), 8));
        }
    }
    for s in slots {
        perturbations.insert(s, (0..dim).map(|_| qf(rng.gen_range(-4..=4), 16)).collect());
    }
    SlotBranch { values, perturbations }
}

/// `bases` random branches closed under the first symmetry transposition.
pub fn random_cancellation_family<R: Rng>(rng: &mut R, curves: usize, bases: usize) -> CancellationFamily {
    let tree = random_cancellation_tree(rng, curves);
    let tau = symmetry_transpositions(&tree)[0];
    let mut branches = Vec::new();
    for _ in 0..bases {
        let b = random_slot_branch(rng, &tree);
        let t = transpose_branch(&tree, &b, tau);
        if b != t && !branches.contains(&b) {
            branches.push(b);
            branches.push(t);
        }
    }
    CancellationFamily { tree, branches }
}

#[cfg(test)]
#[path = "gluing_oracle_tests.rs"]
mod tests;
