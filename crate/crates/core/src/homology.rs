//! Graded chain complexes over ℚ and their homology.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded_algebra::Grading;
use crate::linalg::{self, Echelon, SparseVec};

/// Per-degree bases with the degree −1 map stored column-wise: `maps[k][j]`
/// is the image of basis vector `j` of `C_k` in the coordinates of `C_{k−1}`.
#[derive(Clone, Debug)]
pub struct GradedChainComplex {
    grading: Grading,
    bases: BTreeMap<i64, Vec<String>>,
    maps: BTreeMap<i64, Vec<SparseVec>>,
}

impl GradedChainComplex {
    pub fn new(grading: Grading) -> Self {
        GradedChainComplex { grading, bases: BTreeMap::new(), maps: BTreeMap::new() }
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn add_degree(&mut self, degree: i64, labels: Vec<String>) {
        self.bases.insert(self.grading.reduce(degree), labels);
    }

    pub fn set_differential(&mut self, degree: i64, cols: Vec<SparseVec>) {
        self.maps.insert(self.grading.reduce(degree), cols);
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.bases.keys().copied()
    }

    pub fn basis(&self, degree: i64) -> &[String] {
        self.bases.get(&self.grading.reduce(degree)).map_or(&[], |v| v.as_slice())
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.basis(degree).len()
    }

    /// Columns of `d_k`, padded with zero columns if unset.
    pub fn differential(&self, degree: i64) -> Vec<SparseVec> {
        let k = self.grading.reduce(degree);
        let n = self.dim(k);
        match self.maps.get(&k) {
            Some(cols) => cols.clone(),
            None => vec![SparseVec::new(); n],
        }
    }

    /// Structural check: column counts, target ranges, and d∘d = 0.
    pub fn check(&self) -> Result<()> {
        for (&k, cols) in &self.maps {
            if cols.len() != self.dim(k) {
                return Err(Error::Invalid(format!("degree {k}: {} columns for a {}-dimensional space", cols.len(), self.dim(k))));
            }
            let below = self.dim(self.grading.shift(k, -1));
            if cols.iter().any(|c| c.keys().any(|&r| r >= below)) {
                return Err(Error::Invalid(format!("degree {k}: differential leaves its target")));
            }
        }
        for &k in self.maps.keys() {
            let lower = self.differential(self.grading.shift(k, -1));
            for c in &self.maps[&k] {
                if !linalg::apply(&lower, c).is_empty() {
                    return Err(Error::Invalid(format!("d∘d ≠ 0 starting in degree {k}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct HomologyDegree {
    pub degree: i64,
    pub dim: usize,
    pub cycle_dim: usize,
    pub boundary_dim: usize,
    pub representatives: Vec<SparseVec>,
    pub boundaries: Vec<SparseVec>,
}

#[derive(Clone, Debug, Default)]
pub struct HomologySummary {
    pub degrees: BTreeMap<i64, HomologyDegree>,
}

impl HomologySummary {
    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.degrees.iter().filter(|(_, h)| h.dim > 0).map(|(k, h)| (*k, h.dim)).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.values().map(|h| h.dim).sum()
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.degrees.get(&degree).map_or(0, |h| h.dim)
    }
}

pub fn homology(c: &GradedChainComplex) -> Result<HomologySummary> {
    c.check()?;
    let g = c.grading();
    let mut out = HomologySummary::default();
    for k in c.degrees() {
        let dk = c.differential(k);
        let up = g.shift(k, 1);
        let dup = c.differential(up);
        let (ker, _) = linalg::kernel(&dk);
        let mut ech = Echelon::new();
        let mut boundaries = Vec::new();
        for col in &dup {
            if ech.insert(col, SparseVec::new()).is_some() {
                boundaries.push(col.clone());
            }
        }
        let mut reps = Vec::new();
        for z in &ker {
            if ech.insert(z, SparseVec::new()).is_some() {
                reps.push(z.clone());
            }
        }
        let cycle_dim = c.dim(k) - linalg::rank(&dk);
        let boundary_dim = linalg::rank(&dup);
        if cycle_dim != ker.len() || boundary_dim != boundaries.len() || reps.len() + boundary_dim != cycle_dim {
            return Err(Error::Internal(format!("rank computations disagree in degree {k}")));
        }
        out.degrees.insert(k, HomologyDegree { degree: k, dim: reps.len(), cycle_dim, boundary_dim, representatives: reps, boundaries });
    }
    Ok(out)
}
