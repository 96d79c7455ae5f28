use std::fmt;

use super::{Generator, GradedAlgebra, Grading, Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::rational::{fmt_q, Q};

/// (S(V), ∂) on a finite generating set.  Construction only checks structure
/// (ids, lengths); `validate` reports the algebraic conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgaPresentation {
    algebra: GradedAlgebra,
    differential: Vec<Polynomial>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Degree { generator: String, monomial: String, expected: i64, found: i64 },
    SquareNonzero { generator: String, residual: Polynomial, display: String },
    Action { generator: String, monomial: String, total: Q, bound: Q },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Degree { generator, monomial, expected, found } => {
                write!(f, "∂{generator}: term {monomial} has degree {found}, expected {expected}")
            }
            Violation::SquareNonzero { generator, display, .. } => {
                write!(f, "∂²{generator} = {display} ≠ 0")
            }
            Violation::Action { generator, monomial, total, bound } => {
                write!(f, "∂{generator}: term {monomial} has action {} > {}", fmt_q(total), fmt_q(bound))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            let msg = self.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
            Err(Error::InvalidPresentation(msg))
        }
    }
}

impl CdgaPresentation {
    pub fn new(algebra: GradedAlgebra, differential: Vec<Polynomial>) -> Result<Self> {
        if differential.len() != algebra.len() {
            return Err(Error::Invalid(format!("{} differentials for {} generators", differential.len(), algebra.len())));
        }
        let n = algebra.len();
        for p in &differential {
            if p.terms().any(|(m, _)| m.factors().iter().any(|&(i, _)| i >= n)) {
                return Err(Error::Invalid("differential uses an out-of-range generator".into()));
            }
        }
        Ok(CdgaPresentation { algebra, differential })
    }

    /// Presentation with ∂ = 0.
    pub fn free(algebra: GradedAlgebra) -> Self {
        let n = algebra.len();
        CdgaPresentation { algebra, differential: vec![Polynomial::zero(); n] }
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn grading(&self) -> Grading {
        self.algebra.grading()
    }

    pub fn len(&self) -> usize {
        self.algebra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.algebra.is_empty()
    }

    pub fn differential_of(&self, i: usize) -> &Polynomial {
        &self.differential[i]
    }

    pub fn differentials(&self) -> &[Polynomial] {
        &self.differential
    }

    /// ∂ on a canonical monomial by the graded Leibniz rule.
    pub fn differential_monomial(&self, m: &Monomial) -> Polynomial {
        let alg = &self.algebra;
        let f = m.factors();
        let mut out = Polynomial::zero();
        let mut prefix_odd = false;
        for (pos, &(i, e)) in f.iter().enumerate() {
            let left = Monomial::from_factors(f[..pos].to_vec());
            let mut rest = Vec::with_capacity(f.len() - pos);
            if e > 1 {
                rest.push((i, e - 1));
            }
            rest.extend_from_slice(&f[pos + 1..]);
            let right = Monomial::from_factors(rest);
            let mut scale = Q::from_integer(e.into());
            if prefix_odd {
                scale = -scale;
            }
            out.add_assign(&alg.sandwich(&left, &self.differential[i], &right, &scale));
            if alg.is_odd(i) {
                prefix_odd = !prefix_odd;
            }
        }
        out
    }

    pub fn apply_differential(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in p.terms() {
            out.add_scaled(&self.differential_monomial(m), c);
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let alg = &self.algebra;
        let g = alg.grading();
        let mut violations = Vec::new();
        for i in 0..alg.len() {
            let gen = &alg.generators()[i];
            let expected = g.shift(gen.degree, -1);
            for (m, _) in self.differential[i].terms() {
                let found = alg.monomial_degree(m);
                if found != expected {
                    violations.push(Violation::Degree { generator: gen.id.clone(), monomial: alg.format_monomial(m), expected, found });
                }
                if let (Some(total), Some(bound)) = (alg.monomial_action(m), gen.action.clone()) {
                    if total > bound {
                        violations.push(Violation::Action { generator: gen.id.clone(), monomial: alg.format_monomial(m), total, bound });
                    }
                }
            }
        }
        for i in 0..alg.len() {
            let residual = self.apply_differential(&self.differential[i]);
            if !residual.is_zero() {
                violations.push(Violation::SquareNonzero {
                    generator: alg.id(i).to_string(),
                    display: alg.format_polynomial(&residual),
                    residual,
                });
            }
        }
        ValidationReport { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// Word-length-homogeneous parts ∂₀x, ∂₁x, …; index N holds ∂_N.
    pub fn decompose_differential(&self, i: usize) -> Vec<Polynomial> {
        let p = &self.differential[i];
        let top = p.max_word_length().map_or(0, |l| l + 1);
        (0..top).map(|n| p.word_length_part(n)).collect()
    }

    /// The same presentation with its grading reduced mod an even `d`.
    pub fn reduce_grading(&self, d: u32) -> Result<CdgaPresentation> {
        let grading = self.grading().coarsen(d)?;
        let gens = self.algebra.generators().to_vec();
        let alg = GradedAlgebra::new(grading, gens)?;
        CdgaPresentation::new(alg, self.differential.clone())
    }
}

/// Incremental construction by generator ids, mainly for tests and fixtures.
#[derive(Clone, Debug)]
pub struct PresentationBuilder {
    grading: Grading,
    gens: Vec<Generator>,
    terms: Vec<(String, Q, Vec<String>)>,
}

impl PresentationBuilder {
    pub fn new(grading: Grading) -> Self {
        PresentationBuilder { grading, gens: Vec::new(), terms: Vec::new() }
    }

    pub fn generator(mut self, id: &str, degree: i64) -> Self {
        self.gens.push(Generator::new(id, degree));
        self
    }

    pub fn generator_with_action(mut self, id: &str, degree: i64, action: Q) -> Self {
        self.gens.push(Generator::new(id, degree).with_action(action));
        self
    }

    pub fn term(mut self, target: &str, coeff: Q, word: &[&str]) -> Self {
        self.terms.push((target.into(), coeff, word.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn unit(self, target: &str, coeff: Q) -> Self {
        self.term(target, coeff, &[])
    }

    pub fn build(self) -> Result<CdgaPresentation> {
        let alg = GradedAlgebra::new(self.grading, self.gens)?;
        let mut diff = vec![Polynomial::zero(); alg.len()];
        for (target, c, word) in self.terms {
            let t = alg.lookup(&target)?;
            let idx = word.iter().map(|w| alg.lookup(w)).collect::<Result<Vec<_>>>()?;
            if let (s, Some(m)) = alg.normalize_word(&idx) {
                diff[t].add_term(m, if s > 0 { c } else { -c });
            }
        }
        CdgaPresentation::new(alg, diff)
    }
}
