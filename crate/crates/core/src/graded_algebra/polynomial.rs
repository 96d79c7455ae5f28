use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::Q;

/// Sorted `(generator index, exponent)` pairs; the empty list is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn generator(i: usize) -> Self {
        Monomial(vec![(i, 1)])
    }

    /// Caller guarantees strictly increasing indices and positive exponents.
    pub fn from_factors(factors: Vec<(usize, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|&(_, e)| e > 0));
        Monomial(factors)
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn word_length(&self) -> usize {
        self.0.iter().map(|&(_, e)| e as usize).sum()
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.iter().find(|f| f.0 == i).map_or(0, |f| f.1)
    }

    /// Expanded word, each generator repeated by its exponent.
    pub fn word(&self) -> Vec<usize> {
        self.0.iter().flat_map(|&(i, e)| std::iter::repeat_n(i, e as usize)).collect()
    }

    pub fn as_generator(&self) -> Option<usize> {
        match self.0.as_slice() {
            [(i, 1)] => Some(*i),
            _ => None,
        }
    }
}

/// Finite map monomial → nonzero rational.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Polynomial::term(Monomial::one(), c)
    }

    pub fn generator(i: usize) -> Self {
        Polynomial::term(Monomial::generator(i), Q::one())
    }

    pub fn term(m: Monomial, c: Q) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficient(&Monomial::one())
    }

    pub fn add_assign(&mut self, other: &Polynomial) {
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Polynomial, s: &Q) {
        if s.is_zero() {
            return;
        }
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn scaled(&self, s: &Q) -> Polynomial {
        let mut p = Polynomial::zero();
        p.add_scaled(self, s);
        p
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        p.add_scaled(other, &-Q::one());
        p
    }

    pub fn max_word_length(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::word_length).max()
    }

    /// The word-length-`n` homogeneous part.
    pub fn word_length_part(&self, n: usize) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in self.terms() {
            if m.word_length() == n {
                p.add_term(m.clone(), c.clone());
            }
        }
        p
    }

    /// Substitutes a linear form for every generator of a word-length-≤1
    /// polynomial: constant term plus coefficients per generator.
    pub fn linear_parts(&self) -> Option<(Q, BTreeMap<usize, Q>)> {
        let mut lin = BTreeMap::new();
        let mut c0 = Q::zero();
        for (m, c) in self.terms() {
            if m.is_one() {
                c0 = c.clone();
            } else {
                let i = m.as_generator()?;
                lin.insert(i, c.clone());
            }
        }
        Some((c0, lin))
    }
}

impl FromIterator<(Monomial, Q)> for Polynomial {
    fn from_iter<I: IntoIterator<Item = (Monomial, Q)>>(iter: I) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }
}
