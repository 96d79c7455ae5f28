use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use super::{Grading, Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::rational::{fmt_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub degree: i64,
    pub action: Option<Q>,
}

impl Generator {
    pub fn new(id: impl Into<String>, degree: i64) -> Self {
        Generator { id: id.into(), degree, action: None }
    }

    pub fn with_action(mut self, a: Q) -> Self {
        self.action = Some(a);
        self
    }
}

/// The free graded-commutative algebra S(V) on finitely many generators.
/// Generators are kept sorted by id, so index order is id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAlgebra {
    grading: Grading,
    gens: Vec<Generator>,
    index: HashMap<String, usize>,
}

impl GradedAlgebra {
    pub fn new(grading: Grading, mut gens: Vec<Generator>) -> Result<Self> {
        gens.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = HashMap::new();
        for (i, g) in gens.iter_mut().enumerate() {
            if g.id.is_empty() {
                return Err(Error::Invalid("empty generator id".into()));
            }
            if index.insert(g.id.clone(), i).is_some() {
                return Err(Error::DuplicateGenerator(g.id.clone()));
            }
            g.degree = grading.reduce(g.degree);
            if let Some(a) = &g.action {
                if a.is_negative() {
                    return Err(Error::Invalid(format!("negative action on `{}`", g.id)));
                }
            }
        }
        let with_action = gens.iter().filter(|g| g.action.is_some()).count();
        if with_action != 0 && with_action != gens.len() {
            return Err(Error::Invalid("action must be given on all generators or none".into()));
        }
        Ok(GradedAlgebra { grading, gens, index })
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn has_actions(&self) -> bool {
        self.gens.first().is_some_and(|g| g.action.is_some())
    }

    pub fn lookup(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownGenerator(id.to_string()))
    }

    pub fn id(&self, i: usize) -> &str {
        &self.gens[i].id
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.gens[i].degree
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.grading.is_odd(self.gens[i].degree)
    }

    /// Generators whose degree is ≡ `d`.
    pub fn generators_in_degree(&self, d: i64) -> Vec<usize> {
        let d = self.grading.reduce(d);
        (0..self.len()).filter(|&i| self.gens[i].degree == d).collect()
    }

    pub fn monomial_degree(&self, m: &Monomial) -> i64 {
        let raw: i64 = m.factors().iter().map(|&(i, e)| self.gens[i].degree * e as i64).sum();
        self.grading.reduce(raw)
    }

    pub fn monomial_is_odd(&self, m: &Monomial) -> bool {
        m.factors().iter().filter(|&&(i, _)| self.is_odd(i)).count() % 2 == 1
    }

    pub fn monomial_action(&self, m: &Monomial) -> Option<Q> {
        let mut total = Q::zero();
        for &(i, e) in m.factors() {
            total += self.gens[i].action.clone()? * Q::from_integer(e.into());
        }
        Some(total)
    }

    /// Degree of a polynomial if all its terms share one.
    pub fn homogeneous_degree(&self, p: &Polynomial) -> Option<i64> {
        let mut degs = p.terms().map(|(m, _)| self.monomial_degree(m));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Koszul-normalizes a word of generator indices.  Returns sign 0 (and no
    /// monomial) when an odd generator repeats.
    pub fn normalize_word(&self, word: &[usize]) -> (i8, Option<Monomial>) {
        let mut inversions = 0usize;
        for (a, &i) in word.iter().enumerate() {
            if !self.is_odd(i) {
                continue;
            }
            for &j in &word[a + 1..] {
                if self.is_odd(j) {
                    if i == j {
                        return (0, None);
                    }
                    if i > j {
                        inversions += 1;
                    }
                }
            }
        }
        let mut sorted = word.to_vec();
        sorted.sort_unstable();
        let mut factors: Vec<(usize, u32)> = Vec::new();
        for i in sorted {
            match factors.last_mut() {
                Some((j, e)) if *j == i => *e += 1,
                _ => factors.push((i, 1)),
            }
        }
        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        (sign, Some(Monomial::from_factors(factors)))
    }

    pub fn normalize_ids(&self, word: &[&str]) -> Result<(i8, Option<Monomial>)> {
        let idx = word.iter().map(|w| self.lookup(w)).collect::<Result<Vec<_>>>()?;
        Ok(self.normalize_word(&idx))
    }

    /// Product of canonical monomials with its Koszul sign, `None` for zero.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(i8, Monomial)> {
        let mut swaps = 0usize;
        let (fa, fb) = (a.factors(), b.factors());
        let odd_a: Vec<usize> = fa.iter().filter(|f| self.is_odd(f.0)).map(|f| f.0).collect();
        for &(j, _) in fb {
            if !self.is_odd(j) {
                continue;
            }
            for &i in &odd_a {
                if i == j {
                    return None;
                }
                if i > j {
                    swaps += 1;
                }
            }
        }
        let mut out = Vec::with_capacity(fa.len() + fb.len());
        let (mut x, mut y) = (0, 0);
        while x < fa.len() || y < fb.len() {
            if y == fb.len() || (x < fa.len() && fa[x].0 < fb[y].0) {
                out.push(fa[x]);
                x += 1;
            } else if x == fa.len() || fb[y].0 < fa[x].0 {
                out.push(fb[y]);
                y += 1;
            } else {
                out.push((fa[x].0, fa[x].1 + fb[y].1));
                x += 1;
                y += 1;
            }
        }
        let sign = if swaps.is_multiple_of(2) { 1 } else { -1 };
        Some((sign, Monomial::from_factors(out)))
    }

    pub fn multiply(&self, p: &Polynomial, q: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (a, ca) in p.terms() {
            for (b, cb) in q.terms() {
                if let Some((s, m)) = self.mul_monomials(a, b) {
                    let c = ca * cb;
                    out.add_term(m, if s > 0 { c } else { -c });
                }
            }
        }
        out
    }

    /// `left · p · right` for monomials `left`, `right`.
    pub fn sandwich(&self, left: &Monomial, p: &Polynomial, right: &Monomial, scale: &Q) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in p.terms() {
            let Some((s1, lm)) = self.mul_monomials(left, m) else { continue };
            let Some((s2, full)) = self.mul_monomials(&lm, right) else { continue };
            let c = c * scale;
            out.add_term(full, if s1 * s2 > 0 { c } else { -c });
        }
        out
    }

    /// Polynomial from a list of `(coefficient, word)` terms.
    pub fn polynomial_from_words(&self, terms: &[(Q, Vec<usize>)]) -> Polynomial {
        let mut p = Polynomial::zero();
        for (c, w) in terms {
            if let (s, Some(m)) = self.normalize_word(w) {
                p.add_term(m, if s > 0 { c.clone() } else { -c.clone() });
            }
        }
        p
    }

    /// Algebra map determined by images of generators.
    pub fn substitute(&self, p: &Polynomial, target: &GradedAlgebra, images: &[Polynomial]) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in p.terms() {
            let mut acc = Polynomial::constant(c.clone());
            for &(i, e) in m.factors() {
                for _ in 0..e {
                    acc = target.multiply(&acc, &images[i]);
                }
            }
            out.add_assign(&acc);
        }
        out
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        m.factors()
            .iter()
            .map(|&(i, e)| if e == 1 { self.gens[i].id.clone() } else { format!("{}^{}", self.gens[i].id, e) })
            .collect::<Vec<_>>()
            .join("*")
    }

    pub fn format_polynomial(&self, p: &Polynomial) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in p.terms().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&fmt_q(&a));
            } else if a.is_one() {
                s.push_str(&self.format_monomial(m));
            } else {
                s.push_str(&format!("{} {}", fmt_q(&a), self.format_monomial(m)));
            }
        }
        s
    }
}
