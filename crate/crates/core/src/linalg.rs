//! Exact sparse linear algebra over ℚ.
//!
//! Matrices are stored by columns: column `j` is the image of source basis
//! vector `j`.  `Echelon` does ordered elimination (deterministic kernels and
//! pivots in basis order); `rank` uses Markowitz pivoting.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::rational::Q;

pub type SparseVec = BTreeMap<usize, Q>;

pub fn unit_vec(i: usize) -> SparseVec {
    let mut v = SparseVec::new();
    v.insert(i, Q::one());
    v
}

/// `y += a·x`
pub fn axpy(y: &mut SparseVec, x: &SparseVec, a: &Q) {
    if a.is_zero() {
        return;
    }
    for (k, v) in x {
        let e = y.entry(*k).or_insert_with(Q::zero);
        *e += v * a;
        if e.is_zero() {
            y.remove(k);
        }
    }
}

pub fn scale(x: &SparseVec, a: &Q) -> SparseVec {
    if a.is_zero() {
        return SparseVec::new();
    }
    x.iter().map(|(k, v)| (*k, v * a)).collect()
}

pub fn dot(x: &SparseVec, y: &SparseVec) -> Q {
    let mut acc = Q::zero();
    for (k, v) in x {
        if let Some(w) = y.get(k) {
            acc += v * w;
        }
    }
    acc
}

/// `Σ_j x_j · cols[j]`
pub fn apply(cols: &[SparseVec], x: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (j, a) in x {
        axpy(&mut out, &cols[*j], a);
    }
    out
}

#[derive(Clone, Debug, Default)]
struct Row {
    vec: SparseVec,
    combo: SparseVec,
}

/// Row echelon form with pivot = smallest index, pivot entry 1, and a record
/// of how every stored row combines the inserted inputs.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, Row>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Returns `(residual, combo')` with
    /// `residual = v − Σ a_r row_r` and `combo' = combo − Σ a_r combo_r`.
    pub fn reduce(&self, v: &SparseVec, combo: SparseVec) -> (SparseVec, SparseVec) {
        let mut res = v.clone();
        let mut cmb = combo;
        let mut cursor = 0usize;
        loop {
            let next = res.range(cursor..).map(|(k, _)| *k).find(|k| self.rows.contains_key(k));
            let Some(c) = next else { break };
            let a = -res[&c].clone();
            let r = &self.rows[&c];
            axpy(&mut res, &r.vec, &a);
            axpy(&mut cmb, &r.combo, &a);
            cursor = c + 1;
        }
        (res, cmb)
    }

    /// Inserts `v` (remembering that it equals `combo` in input coordinates).
    /// Returns the new pivot, or `None` if `v` was dependent.
    pub fn insert(&mut self, v: &SparseVec, combo: SparseVec) -> Option<usize> {
        let (res, cmb) = self.reduce(v, combo);
        let (&p, lead) = res.iter().next()?;
        let inv = Q::one() / lead;
        let row = Row { vec: scale(&res, &inv), combo: scale(&cmb, &inv) };
        self.rows.insert(p, row);
        Some(p)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v, SparseVec::new()).0.is_empty()
    }

    /// Coefficients `x` (in input coordinates) with `Σ x_j input_j = v`.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        let (res, cmb) = self.reduce(v, SparseVec::new());
        res.is_empty().then(|| scale(&cmb, &-Q::one()))
    }
}

/// Kernel basis of the column matrix: one vector per dependent column, in
/// column order.  Also returns the echelon form of the image.
pub fn kernel(cols: &[SparseVec]) -> (Vec<SparseVec>, Echelon) {
    let mut ech = Echelon::new();
    let mut ker = Vec::new();
    for (j, c) in cols.iter().enumerate() {
        let (res, cmb) = ech.reduce(c, unit_vec(j));
        if res.is_empty() {
            ker.push(cmb);
        } else {
            ech.insert(c, unit_vec(j));
        }
    }
    (ker, ech)
}

/// Rank by Markowitz-pivoted elimination.
pub fn rank(cols: &[SparseVec]) -> usize {
    let mut matrix: Vec<SparseVec> = cols.iter().filter(|c| !c.is_empty()).cloned().collect();
    // matrix[j] is column j as a map row → value; build the row incidence
    let mut row_cols: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (j, c) in matrix.iter().enumerate() {
        for r in c.keys() {
            row_cols.entry(*r).or_default().insert(j);
        }
    }
    let mut active: BTreeSet<usize> = (0..matrix.len()).collect();
    let mut rank = 0;
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for &j in &active {
            let cc = matrix[j].len();
            if cc == 0 {
                continue;
            }
            for r in matrix[j].keys() {
                let rc = row_cols[r].len();
                let cost = (rc - 1) * (cc - 1);
                if best.is_none_or(|b| cost < b.0) {
                    best = Some((cost, *r, j));
                }
            }
        }
        let Some((_, r, j)) = best else { break };
        rank += 1;
        active.remove(&j);
        let pivot_col = matrix[j].clone();
        let pv = pivot_col[&r].clone();
        let others: Vec<usize> = row_cols[&r].iter().copied().filter(|&k| k != j).collect();
        for k in others {
            let f = -(&matrix[k][&r] / &pv);
            let before: BTreeSet<usize> = matrix[k].keys().copied().collect();
            axpy(&mut matrix[k], &pivot_col, &f);
            let after: BTreeSet<usize> = matrix[k].keys().copied().collect();
            for gone in before.difference(&after) {
                row_cols.get_mut(gone).unwrap().remove(&k);
            }
            for new in after.difference(&before) {
                row_cols.entry(*new).or_default().insert(k);
            }
        }
        for rr in pivot_col.keys() {
            row_cols.get_mut(rr).unwrap().remove(&j);
        }
        matrix[j].clear();
    }
    rank
}

/// Exact determinant by Gaussian elimination.
pub fn determinant(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let pv = a[c][c].clone();
        det *= &pv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &pv;
            for k in c..n {
                let t = &a[c][k] * &f;
                a[r][k] -= t;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn col(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(i, v)| (i, q(v))).collect()
    }

    #[test]
    fn kernel_and_rank() {
        let cols = vec![col(&[(0, 1), (1, 2)]), col(&[(0, 2), (1, 4)]), col(&[(1, 1)])];
        let (ker, ech) = kernel(&cols);
        assert_eq!(ech.rank(), 2);
        assert_eq!(rank(&cols), 2);
        assert_eq!(ker.len(), 1);
        assert!(apply(&cols, &ker[0]).is_empty());
        assert_eq!(ker[0], col(&[(0, -2), (1, 1)]));
    }

    #[test]
    fn solve_in_image() {
        let cols = vec![col(&[(0, 1), (1, 1)]), col(&[(1, 1)])];
        let (_, ech) = kernel(&cols);
        let b = col(&[(0, 3), (1, 5)]);
        let x = ech.solve(&b).unwrap();
        assert_eq!(apply(&cols, &x), b);
        let single = vec![col(&[(0, 1), (1, 1)])];
        let (_, e1) = kernel(&single);
        assert!(e1.solve(&col(&[(0, 1)])).is_none());
    }

    #[test]
    fn determinant_signs() {
        let m = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        assert_eq!(determinant(&m), q(-1));
        let m = vec![vec![q(2), q(1), q(0)], vec![q(1), q(3), q(1)], vec![q(0), q(1), q(4)]];
        assert_eq!(determinant(&m), q(18));
    }
}
