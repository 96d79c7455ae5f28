//! Conley–Zehnder indices of block-diagonal symplectic paths, contact
//! homology gradings, bad orbits, and the spectrum of the normal asymptotic
//! operator −J₀∂_q + diag(ε_τ, −ε_σ) on ℝ/aℤ.

use std::f64::consts::PI;

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::{to_f64, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Framing {
    Plus,
    Minus,
}

/// One 2×2 block of the linearized return path.
#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    /// e^{±J₀εt} with 0 < ε < 2π/a.
    SmallRotation { dir: i8 },
    /// diag(e^{bt}, e^{−bt}).
    Hyperbolic { b: Q },
    /// Return map −diag(e^{c}, e^{−c}), framed by f±.
    NegHyperbolicPair { framing: Framing },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockPath {
    pub blocks: Vec<Block>,
    pub action: Q,
}

impl BlockPath {
    pub fn new(blocks: Vec<Block>, action: Q) -> Result<Self> {
        if !action.is_positive() {
            return Err(Error::Invalid(format!("action must be positive, got {action}")));
        }
        if let Some(Block::SmallRotation { dir }) = blocks.iter().find(|b| matches!(b, Block::SmallRotation { dir } if dir.abs() != 1)) {
            return Err(Error::Invalid(format!("rotation direction must be ±1, got {dir}")));
        }
        Ok(BlockPath { blocks, action })
    }

    pub fn half_dimension(&self) -> usize {
        self.blocks.len()
    }

    pub fn concat(&self, other: &BlockPath) -> Result<BlockPath> {
        if self.action != other.action {
            return Err(Error::Invalid("direct sums need equal actions".into()));
        }
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        Ok(BlockPath { blocks, action: self.action.clone() })
    }

    fn check_nondegenerate(&self) -> Result<()> {
        if self.blocks.iter().any(|b| matches!(b, Block::Hyperbolic { b } if b.is_zero())) {
            return Err(Error::Degenerate("hyperbolic block with b = 0 has eigenvalue 1".into()));
        }
        Ok(())
    }
}

fn block_iterate_cz(b: &Block, m: u32) -> Result<i64> {
    Ok(match b {
        Block::SmallRotation { dir } => {
            if m != 1 {
                return Err(Error::Unsupported("iterates of a small rotation leave the small-angle window".into()));
            }
            *dir as i64
        }
        Block::Hyperbolic { .. } => 0,
        Block::NegHyperbolicPair { framing: Framing::Plus } => -(m as i64),
        Block::NegHyperbolicPair { framing: Framing::Minus } => m as i64,
    })
}

pub fn cz_index(path: &BlockPath) -> Result<i64> {
    cz_iterate(path, 1)
}

/// CZ of the m-fold iterate, framing inherited from the embedded orbit.
pub fn cz_iterate(path: &BlockPath, m: u32) -> Result<i64> {
    if m == 0 {
        return Err(Error::Invalid("multiplicity must be at least 1".into()));
    }
    path.check_nondegenerate()?;
    path.blocks.iter().map(|b| block_iterate_cz(b, m)).sum()
}

/// det(Id − A) of the m-fold return map of one block, in floating point.
fn block_det(b: &Block, a: f64, m: u32) -> Result<f64> {
    let mf = m as f64;
    Ok(match b {
        Block::SmallRotation { dir } => {
            if m != 1 {
                return Err(Error::Unsupported("iterates of a small rotation leave the small-angle window".into()));
            }
            // εa = 1 lies in (0, 2π)
            let theta = *dir as f64;
            2.0 - 2.0 * theta.cos()
        }
        Block::Hyperbolic { b } => {
            let x = to_f64(b) * a * mf;
            (1.0 - x.exp()) * (1.0 - (-x).exp())
        }
        Block::NegHyperbolicPair { .. } => {
            let s = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
            let x = a * mf;
            (1.0 - s * x.exp()) * (1.0 - s * (-x).exp())
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParityCheck {
    pub cz: i64,
    pub n: usize,
    pub det_sign: i8,
    pub holds: bool,
}

/// (−1)^{CZ+n} = sgn det(Id − A(a)) for the m-fold iterate.
pub fn cz_parity_check(path: &BlockPath, m: u32) -> Result<ParityCheck> {
    let cz = cz_iterate(path, m)?;
    let a = to_f64(&path.action);
    let mut det = 1.0f64;
    for b in &path.blocks {
        let d = block_det(b, a, m)?;
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Degenerate(format!("block {b:?} has det(Id − A) = {d}")));
        }
        det *= d.signum();
    }
    let n = path.half_dimension();
    let det_sign = if det > 0.0 { 1 } else { -1 };
    let predicted = if (cz + n as i64).rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(ParityCheck { cz, n, det_sign, holds: predicted == det_sign })
}

/// |γ| = CZ(γ) + n − 3 on a contact manifold of dimension 2n − 1.
pub fn ch_grading(cz: i64, n: i64) -> i64 {
    cz + n - 3
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitModel {
    pub path: BlockPath,
    pub multiplicity: u32,
    /// Half-dimension of ξ plus one, so that dim Γ = 2n − 1.
    pub n: usize,
}

impl OrbitModel {
    pub fn new(path: BlockPath, multiplicity: u32) -> Result<Self> {
        if multiplicity == 0 {
            return Err(Error::Invalid("multiplicity must be at least 1".into()));
        }
        let n = path.half_dimension() + 1;
        Ok(OrbitModel { path, multiplicity, n })
    }

    pub fn cz(&self) -> Result<i64> {
        cz_iterate(&self.path, self.multiplicity)
    }

    pub fn grading(&self) -> Result<i64> {
        Ok(ch_grading(self.cz()?, self.n as i64))
    }
}

/// γ^m is bad when CZ(γ^m) − CZ(γ) is odd.
pub fn is_bad(orbit: &OrbitModel) -> Result<bool> {
    if orbit.multiplicity == 1 {
        orbit.path.check_nondegenerate()?;
        return Ok(false);
    }
    let d = cz_iterate(&orbit.path, orbit.multiplicity)? - cz_iterate(&orbit.path, 1)?;
    Ok(d.rem_euclid(2) == 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftedOrbit {
    pub cz: i64,
    pub base_grading: i64,
    pub grading: i64,
    pub good: bool,
}

/// The orbit {τ = σ = 0} × γ̌ in the neighborhood of the dividing set: the
/// normal (τ, σ) plane adds one hyperbolic block.
pub fn lift_grading(orbit: &OrbitModel) -> Result<LiftedOrbit> {
    let base_cz = orbit.cz()?;
    let base_grading = orbit.grading()?;
    let normal = BlockPath { blocks: vec![Block::Hyperbolic { b: Q::from_integer(1.into()) }], action: orbit.path.action.clone() };
    let lifted = OrbitModel::new(orbit.path.concat(&normal)?, orbit.multiplicity)?;
    let cz = lifted.cz()?;
    let grading = lifted.grading()?;
    if cz != base_cz || grading != base_grading + 1 {
        return Err(Error::Internal("lifted index does not match the dividing-set orbit".into()));
    }
    Ok(LiftedOrbit { cz, base_grading, grading, good: !is_bad(&lifted)? })
}

pub fn random_block_path<R: Rng>(rng: &mut R, max_blocks: usize) -> BlockPath {
    let n = rng.gen_range(1..=max_blocks);
    let blocks = (0..n)
        .map(|_| match rng.gen_range(0..3) {
            0 => Block::SmallRotation { dir: if rng.gen_bool(0.5) { 1 } else { -1 } },
            1 => {
                let v = rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 };
                Block::Hyperbolic { b: Q::new(v.into(), rng.gen_range(1..=3).into()) }
            }
            _ => Block::NegHyperbolicPair { framing: if rng.gen_bool(0.5) { Framing::Plus } else { Framing::Minus } },
        })
        .collect();
    BlockPath { blocks, action: Q::new(rng.gen_range(1..=8).into(), rng.gen_range(1..=4).into()) }
}

// ---------------------------------------------------------------------------
// Normal spectrum

#[derive(Clone, Debug)]
pub struct SpectrumQuery {
    pub eps_tau: Q,
    pub eps_sigma: Q,
    pub action: Q,
    pub cutoff: Q,
    /// Require ε_σ < Λ < ε_τ and that −ε_σ is the only eigenvalue in (−Λ, Λ).
    pub small_eps: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenvalue {
    /// Fourier mode m of 2λ = (ε_τ − ε_σ) ± √(4(2πm/a)² + (ε_τ + ε_σ)²).
    pub mode: u32,
    pub branch: i8,
    /// Exact for m = 0, where the square root is rational.
    pub exact: Option<Q>,
    pub approx: f64,
    pub multiplicity: u32,
}

#[derive(Clone, Debug)]
pub struct NormalSpectrum {
    /// λ₋₁ = −ε_σ and λ₁ = ε_τ.
    pub distinguished: [Eigenvalue; 2],
    /// All eigenvalues in (−Λ, Λ), sorted.
    pub window: Vec<Eigenvalue>,
}

fn branch_value(q: &SpectrumQuery, m: u32, branch: i8) -> f64 {
    let (t, s, a) = (to_f64(&q.eps_tau), to_f64(&q.eps_sigma), to_f64(&q.action));
    let k = 2.0 * PI * m as f64 / a;
    let root = (4.0 * k * k + (t + s) * (t + s)).sqrt();
    ((t - s) + branch as f64 * root) / 2.0
}

pub fn normal_spectrum(q: &SpectrumQuery) -> Result<NormalSpectrum> {
    for (name, v) in [("ε_τ", &q.eps_tau), ("ε_σ", &q.eps_sigma), ("a", &q.action), ("Λ", &q.cutoff)] {
        if !v.is_positive() {
            return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
        }
    }
    if q.small_eps && !(q.eps_sigma < q.cutoff && q.cutoff < q.eps_tau) {
        return Err(Error::Invalid(format!("need ε_σ < Λ < ε_τ, got {} , {}, {}", q.eps_sigma, q.cutoff, q.eps_tau)));
    }
    let low = Eigenvalue { mode: 0, branch: -1, exact: Some(-q.eps_sigma.clone()), approx: -to_f64(&q.eps_sigma), multiplicity: 1 };
    let high = Eigenvalue { mode: 0, branch: 1, exact: Some(q.eps_tau.clone()), approx: to_f64(&q.eps_tau), multiplicity: 1 };
    let cutoff = to_f64(&q.cutoff);
    let mut window: Vec<Eigenvalue> = [&low, &high].into_iter().filter(|e| e.exact.as_ref().unwrap().abs() < q.cutoff).cloned().collect();
    let mut m = 1u32;
    loop {
        let vals = [branch_value(q, m, -1), branch_value(q, m, 1)];
        if vals.iter().all(|v| v.abs() >= cutoff) {
            break;
        }
        for (branch, v) in [(-1i8, vals[0]), (1, vals[1])] {
            if v.abs() < cutoff {
                window.push(Eigenvalue { mode: m, branch, exact: None, approx: v, multiplicity: 2 });
            }
        }
        m += 1;
    }
    window.sort_by(|a, b| a.approx.total_cmp(&b.approx));
    if q.small_eps {
        if let Some(e) = window.iter().find(|e| e.mode != 0) {
            return Err(Error::Invalid(format!(
                "eigenvalue {:.6} (mode {}) lies inside (−Λ, Λ); the action is too long for these ε",
                e.approx, e.mode
            )));
        }
        if window.len() != 1 || window[0] != low {
            return Err(Error::Internal("small-ε window is not exactly {−ε_σ}".into()));
        }
    }
    Ok(NormalSpectrum { distinguished: [low, high], window })
}

/// The closed form at mode m, both branches, whether or not inside the window.
pub fn mode_eigenvalues(q: &SpectrumQuery, m: u32) -> [f64; 2] {
    [branch_value(q, m, -1), branch_value(q, m, 1)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn path(blocks: Vec<Block>) -> BlockPath {
        BlockPath::new(blocks, q(2)).unwrap()
    }

    #[test]
    fn cz_examples() {
        assert_eq!(cz_index(&path(vec![Block::SmallRotation { dir: 1 }])).unwrap(), 1);
        assert_eq!(cz_index(&path(vec![Block::Hyperbolic { b: qf(3, 2) }])).unwrap(), 0);
        let p = path(vec![Block::Hyperbolic { b: q(1) }, Block::SmallRotation { dir: -1 }]);
        assert_eq!(cz_index(&p).unwrap(), -1);
        assert_eq!(cz_index(&path(vec![Block::NegHyperbolicPair { framing: Framing::Plus }])).unwrap(), -1);
        assert_eq!(cz_index(&path(vec![Block::NegHyperbolicPair { framing: Framing::Minus }])).unwrap(), 1);
        assert!(BlockPath::new(vec![Block::SmallRotation { dir: 2 }], q(1)).is_err());
        assert!(BlockPath::new(vec![], q(0)).is_err());
    }

    #[test]
    fn parity_examples() {
        let r = cz_parity_check(&path(vec![Block::SmallRotation { dir: 1 }]), 1).unwrap();
        assert_eq!((r.cz, r.n, r.det_sign, r.holds), (1, 1, 1, true));
        let h = cz_parity_check(&path(vec![Block::Hyperbolic { b: q(1) }]), 1).unwrap();
        assert_eq!((h.cz, h.n, h.det_sign, h.holds), (0, 1, -1, true));
        let sum = cz_parity_check(&path(vec![Block::Hyperbolic { b: q(1) }, Block::SmallRotation { dir: 1 }]), 1).unwrap();
        assert_eq!(sum.det_sign, -1);
        assert!(sum.holds);
        assert!(matches!(cz_parity_check(&path(vec![Block::Hyperbolic { b: q(0) }]), 1), Err(Error::Degenerate(_))));
    }

    #[test]
    fn grading_examples() {
        assert_eq!(ch_grading(1, 1), -1);
        assert_eq!(ch_grading(0, 2), -1);
        assert_eq!(ch_grading(3, 3), 3);
    }

    #[test]
    fn lift_and_badness() {
        // circle dividing set: ξ on Γ has rank 0, so n = 1
        let circle = OrbitModel::new(BlockPath::new(vec![], q(1)).unwrap(), 1).unwrap();
        let l = lift_grading(&circle).unwrap();
        assert_eq!((l.cz, l.base_grading, l.grading, l.good), (0, -2, -1, true));

        let hyp = BlockPath::new(vec![Block::Hyperbolic { b: q(1) }], q(3)).unwrap();
        for m in 1..6 {
            let o = OrbitModel::new(hyp.clone(), m).unwrap();
            assert_eq!(o.cz().unwrap(), 0);
            assert!(!is_bad(&o).unwrap());
            let l = lift_grading(&o).unwrap();
            assert_eq!(l.grading, l.base_grading + 1);
            assert!(l.good);
        }
        let neg = BlockPath::new(vec![Block::NegHyperbolicPair { framing: Framing::Plus }], q(1)).unwrap();
        assert!(!is_bad(&OrbitModel::new(neg.clone(), 1).unwrap()).unwrap());
        assert!(is_bad(&OrbitModel::new(neg.clone(), 2).unwrap()).unwrap());
        assert!(!is_bad(&OrbitModel::new(neg.clone(), 3).unwrap()).unwrap());
        assert!(!lift_grading(&OrbitModel::new(neg, 4).unwrap()).unwrap().good);
        let rot = BlockPath::new(vec![Block::SmallRotation { dir: 1 }], q(1)).unwrap();
        assert!(matches!(is_bad(&OrbitModel::new(rot, 2).unwrap()), Err(Error::Unsupported(_))));
    }

    fn query(t: Q, s: Q, a: Q, cut: Q, small: bool) -> SpectrumQuery {
        SpectrumQuery { eps_tau: t, eps_sigma: s, action: a, cutoff: cut, small_eps: small }
    }

    #[test]
    fn spectrum_examples() {
        let sp = normal_spectrum(&query(q(1), q(1), q(1), qf(1, 2), false)).unwrap();
        assert_eq!(sp.distinguished[0].exact, Some(q(-1)));
        assert_eq!(sp.distinguished[1].exact, Some(q(1)));
        assert!(sp.window.is_empty());

        // a = 710/113 ≈ 2π
        let a = qf(710, 113);
        let sp = normal_spectrum(&query(q(1), q(1), a.clone(), q(10), false)).unwrap();
        let [lo, hi] = mode_eigenvalues(&query(q(1), q(1), a, q(10), false), 1);
        assert!((hi - 2f64.sqrt()).abs() < 1e-6 && (lo + 2f64.sqrt()).abs() < 1e-6);
        assert!(sp.window.iter().any(|e| e.mode == 1 && e.multiplicity == 2));
        assert!(sp.window.windows(2).all(|w| w[0].approx <= w[1].approx));

        let ok = normal_spectrum(&query(q(2), q(1), q(1), qf(3, 2), true)).unwrap();
        assert_eq!(ok.window.len(), 1);
        assert_eq!(ok.window[0].exact, Some(q(-1)));
        assert!(normal_spectrum(&query(q(2), q(1), q(1), qf(5, 2), true)).is_err());
        // a long orbit brings λ₋ of mode 1 inside the window
        assert!(normal_spectrum(&query(q(2), q(1), q(100), qf(3, 2), true)).is_err());
    }

    #[test]
    fn mode_zero_recovers_distinguished() {
        let qq = query(q(3), qf(1, 2), q(1), q(1), false);
        let [lo, hi] = mode_eigenvalues(&qq, 0);
        assert!((lo + 0.5).abs() < 1e-12 && (hi - 3.0).abs() < 1e-12);
    }
}
