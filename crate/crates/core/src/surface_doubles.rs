//! Convex surfaces in contact 3-manifolds: dividing-set configurations, their
//! contact homology algebras, and symmetric doubles of arbitrary cDGAs.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::bilinearization::{validate_augmentation, Augmentation};
use crate::criterion::{decide_criterion, symmetric_series, CriterionVerdict};
use crate::error::{Error, Result};
use crate::graded_algebra::{CdgaPresentation, Generator, GradedAlgebra, Grading};
use crate::rational::Q;

/// Word bound used when cross-checking a surface verdict.
pub const SURFACE_WORD_BOUND: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionInfo {
    /// Sides naming the same id are the same region; unnamed sides are distinct.
    pub id: Option<String>,
    pub disk: bool,
    pub chi: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleSides {
    pub plus: RegionInfo,
    pub minus: RegionInfo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceConfig {
    pub genus: u32,
    pub circles: Vec<CircleSides>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub key: String,
    pub positive: bool,
    pub chi: i64,
    pub boundary: usize,
    pub disk: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tightness {
    Tight,
    Overtwisted,
}

impl SurfaceConfig {
    /// Checks that the regions glue to a closed connected surface of the
    /// stated genus and returns them.
    pub fn regions(&self) -> Result<Vec<Region>> {
        if self.circles.is_empty() {
            return Err(Error::Invalid("a dividing set has at least one circle".into()));
        }
        let mut regions: BTreeMap<String, Region> = BTreeMap::new();
        let mut ends: Vec<[String; 2]> = Vec::new();
        for (i, c) in self.circles.iter().enumerate() {
            let mut pair = [String::new(), String::new()];
            for (slot, (info, positive)) in [(&c.plus, true), (&c.minus, false)].into_iter().enumerate() {
                let key = match &info.id {
                    Some(id) => format!("id:{id}"),
                    None => format!("circle {}{}", i + 1, if positive { "+" } else { "-" }),
                };
                let r = regions.entry(key.clone()).or_insert(Region {
                    key: key.clone(),
                    positive,
                    chi: info.chi,
                    boundary: 0,
                    disk: info.disk,
                });
                if r.positive != positive {
                    return Err(Error::Invalid(format!("region {key} lies on both sides of the dividing set")));
                }
                if r.chi != info.chi || r.disk != info.disk {
                    return Err(Error::Invalid(format!("region {key} is described inconsistently")));
                }
                r.boundary += 1;
                pair[slot] = key;
            }
            ends.push(pair);
        }
        for r in regions.values() {
            let b = r.boundary as i64;
            if r.chi > 2 - b || (2 - b - r.chi) % 2 != 0 {
                return Err(Error::Invalid(format!("region {} has χ = {} with {} boundary circles", r.key, r.chi, b)));
            }
            if r.disk != (r.chi == 1 && b == 1) {
                return Err(Error::Invalid(format!("region {} disk flag contradicts χ = {}, b = {}", r.key, r.chi, b)));
            }
        }
        let total: i64 = regions.values().map(|r| r.chi).sum();
        if total != 2 - 2 * self.genus as i64 {
            return Err(Error::Invalid(format!("Euler characteristics sum to {total}, expected {}", 2 - 2 * self.genus as i64)));
        }
        // connectivity of the region graph
        let keys: Vec<&String> = regions.keys().collect();
        let idx: BTreeMap<&String, usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let mut parent: Vec<usize> = (0..keys.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for [a, b] in &ends {
            let (ra, rb) = (find(&mut parent, idx[a]), find(&mut parent, idx[b]));
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        if (0..keys.len()).any(|i| find(&mut parent, i) != root) {
            return Err(Error::Invalid("regions do not glue to a connected surface".into()));
        }
        Ok(regions.into_values().collect())
    }
}

/// Giroux's criterion in dimension 3.
pub fn giroux_tightness(cfg: &SurfaceConfig) -> Result<Tightness> {
    let regions = cfg.regions()?;
    let tight = if cfg.genus == 0 { cfg.circles.len() == 1 } else { !regions.iter().any(|r| r.disk) };
    Ok(if tight { Tightness::Tight } else { Tightness::Overtwisted })
}

pub fn orbit_id(circle: usize, cover: usize) -> String {
    format!("c{circle}.{cover}")
}

/// ∂̌ = 0 on γ̌_i^m (degree 0 mod 2); ε±(γ̌_i^m) = 1 when the ± side of Γ_i is a disk.
pub fn surface_cdga(cfg: &SurfaceConfig, max_cover: usize) -> Result<(CdgaPresentation, Augmentation, Augmentation)> {
    if max_cover == 0 {
        return Err(Error::Invalid("cover bound must be at least 1".into()));
    }
    cfg.regions()?;
    let mut gens = Vec::new();
    for i in 1..=cfg.circles.len() {
        for m in 1..=max_cover {
            gens.push(Generator::new(orbit_id(i, m), 0));
        }
    }
    let alg = GradedAlgebra::new(Grading::Cyclic(2), gens)?;
    let mut plus = Augmentation::zero(&alg);
    let mut minus = Augmentation::zero(&alg);
    for (i, c) in cfg.circles.iter().enumerate() {
        for m in 1..=max_cover {
            let g = alg.lookup(&orbit_id(i + 1, m))?;
            plus.set(g, Q::from_integer((c.plus.disk as i64).into()));
            minus.set(g, Q::from_integer((c.minus.disk as i64).into()));
        }
    }
    Ok((CdgaPresentation::free(alg), plus, minus))
}

#[derive(Clone, Debug)]
pub enum SurfaceHomology {
    Zero,
    /// Exterior algebra on the listed degree 1 generators.
    Exterior(Vec<String>),
}

impl SurfaceHomology {
    pub fn is_zero(&self) -> bool {
        matches!(self, SurfaceHomology::Zero)
    }
}

/// Closed-form answer, cross-checked against the algebraic criterion.
pub fn ch_surface(cfg: &SurfaceConfig, max_cover: usize) -> Result<(SurfaceHomology, CriterionVerdict)> {
    let tight = giroux_tightness(cfg)?;
    let (a, plus, minus) = surface_cdga(cfg, max_cover)?;
    let verdict = decide_criterion(&a, &plus, &minus, SURFACE_WORD_BOUND)?;
    let answer = match tight {
        Tightness::Overtwisted => SurfaceHomology::Zero,
        Tightness::Tight => {
            let hats = verdict.package.hat_algebra();
            SurfaceHomology::Exterior((0..hats.len()).map(|h| hats.id(h).to_string()).collect())
        }
    };
    if verdict.nonvanishing == answer.is_zero() {
        return Err(Error::Internal(format!("tightness {tight:?} disagrees with the criterion")));
    }
    if let SurfaceHomology::Exterior(gens) = &answer {
        let expected = BTreeMap::from([(1, gens.len())]);
        if verdict.linearized.dims() != expected {
            return Err(Error::Internal("linearized homology is not spanned by the orbits".into()));
        }
    }
    Ok((answer, verdict))
}

/// All consistent configurations with at most `max_circles` circles on the
/// closed surface of the given genus, up to relabelling duplicates.
pub fn enumerate_configs(max_circles: usize, genus: u32) -> Vec<SurfaceConfig> {
    let mut out = Vec::new();
    for c in 1..=max_circles {
        for np in 1..=c {
            for nm in 1..=(c + 1 - np) {
                let b1 = c as i64 - (np + nm) as i64 + 1;
                if b1 < 0 || b1 > genus as i64 {
                    continue;
                }
                let spare = genus as i64 - b1;
                for edges in (0..c).map(|_| (0..np).cartesian_product(0..nm)).multi_cartesian_product() {
                    if !edges.windows(2).all(|w| w[0] <= w[1]) {
                        continue;
                    }
                    let mut deg_p = vec![0usize; np];
                    let mut deg_m = vec![0usize; nm];
                    for &(p, m) in &edges {
                        deg_p[p] += 1;
                        deg_m[m] += 1;
                    }
                    if deg_p.contains(&0) || deg_m.contains(&0) {
                        continue;
                    }
                    for split in compositions(spare as u32, np + nm) {
                        let info = |positive: bool, r: usize| {
                            let (deg, h) = if positive { (deg_p[r], split[r]) } else { (deg_m[r], split[np + r]) };
                            let chi = 2 - 2 * h as i64 - deg as i64;
                            RegionInfo { id: Some(format!("{}{r}", if positive { "P" } else { "N" })), disk: chi == 1 && deg == 1, chi }
                        };
                        let circles = edges.iter().map(|&(p, m)| CircleSides { plus: info(true, p), minus: info(false, m) }).collect();
                        let cfg = SurfaceConfig { genus, circles };
                        if cfg.regions().is_ok() {
                            out.push(cfg);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Ways to write `total` as an ordered sum of `parts` nonnegative integers.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Symmetric doubles

#[derive(Clone, Debug)]
pub struct SymmetricDoubleSpec {
    pub base: CdgaPresentation,
    pub filling: Augmentation,
}

impl SymmetricDoubleSpec {
    pub fn new(base: CdgaPresentation, filling: Augmentation) -> Result<Self> {
        base.validate().into_result()?;
        validate_augmentation(&base, &filling).into_result()?;
        Ok(SymmetricDoubleSpec { base, filling })
    }
}

#[derive(Clone, Debug)]
pub struct DoubleReport {
    pub verdict: CriterionVerdict,
    pub hdims: BTreeMap<i64, usize>,
    /// Per-degree dims of S^{≤w}(H^ε).
    pub series: BTreeMap<i64, usize>,
}

pub fn symmetric_double(spec: &SymmetricDoubleSpec, word_bound: usize) -> Result<DoubleReport> {
    let verdict = decide_criterion(&spec.base, &spec.filling, &spec.filling, word_bound)?;
    if !verdict.nonvanishing {
        return Err(Error::Internal("a symmetric double came out vanishing".into()));
    }
    let hdims = verdict.linearized.dims();
    let series = symmetric_series(spec.base.grading(), &hdims, word_bound);
    Ok(DoubleReport { verdict, hdims, series })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_algebra::PresentationBuilder;
    use crate::rational::q;

    fn side(id: Option<&str>, disk: bool, chi: i64) -> RegionInfo {
        RegionInfo { id: id.map(String::from), disk, chi }
    }

    fn sphere(c: usize) -> SurfaceConfig {
        match c {
            1 => SurfaceConfig { genus: 0, circles: vec![CircleSides { plus: side(None, true, 1), minus: side(None, true, 1) }] },
            _ => SurfaceConfig {
                genus: 0,
                circles: vec![
                    CircleSides { plus: side(None, true, 1), minus: side(Some("A"), false, 0) },
                    CircleSides { plus: side(None, true, 1), minus: side(Some("A"), false, 0) },
                ],
            },
        }
    }

    fn torus() -> SurfaceConfig {
        let c = CircleSides { plus: side(Some("P"), false, 0), minus: side(Some("N"), false, 0) };
        SurfaceConfig { genus: 1, circles: vec![c.clone(), c] }
    }

    #[test]
    fn tightness_examples() {
        assert_eq!(giroux_tightness(&sphere(1)).unwrap(), Tightness::Tight);
        assert_eq!(giroux_tightness(&sphere(2)).unwrap(), Tightness::Overtwisted);
        assert_eq!(giroux_tightness(&torus()).unwrap(), Tightness::Tight);
    }

    #[test]
    fn rejects_inconsistent_configs() {
        let mut bad = sphere(1);
        bad.genus = 1;
        assert!(giroux_tightness(&bad).is_err());
        let mut flag = sphere(1);
        flag.circles[0].plus.disk = false;
        assert!(flag.regions().is_err());
        let both =
            SurfaceConfig { genus: 0, circles: vec![CircleSides { plus: side(Some("A"), false, 0), minus: side(Some("A"), false, 0) }] };
        assert!(both.regions().is_err());
        assert!(SurfaceConfig { genus: 0, circles: vec![] }.regions().is_err());
    }

    #[test]
    fn cdga_examples() {
        let (a, p, m) = surface_cdga(&sphere(1), 2).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(p.values(), &[q(1), q(1)]);
        assert_eq!(m.values(), &[q(1), q(1)]);
        let (_, p, m) = surface_cdga(&sphere(2), 1).unwrap();
        assert_eq!(p.values(), &[q(1), q(1)]);
        assert_eq!(m.values(), &[q(0), q(0)]);
        let (_, p, m) = surface_cdga(&torus(), 3).unwrap();
        assert!(p.is_zero() && m.is_zero());
    }

    #[test]
    fn ch_surface_examples() {
        let (h, _) = ch_surface(&sphere(1), 3).unwrap();
        match h {
            SurfaceHomology::Exterior(g) => assert_eq!(g, vec!["c1.1^", "c1.2^", "c1.3^"]),
            SurfaceHomology::Zero => panic!("sphere with one circle is tight"),
        }
        assert!(ch_surface(&sphere(2), 2).unwrap().0.is_zero());
        let genus2 = SurfaceConfig {
            genus: 2,
            circles: vec![
                CircleSides { plus: side(Some("P"), false, -2), minus: side(Some("N"), false, 0) },
                CircleSides { plus: side(Some("P"), false, -2), minus: side(Some("N"), false, 0) },
            ],
        };
        let (h, v) = ch_surface(&genus2, 2).unwrap();
        assert!(matches!(h, SurfaceHomology::Exterior(ref g) if g.len() == 4));
        assert_eq!(v.truncated_dims, Some(BTreeMap::from([(0, 1 + 6), (1, 4 + 4)])));
    }

    #[test]
    fn enumeration_covers_known_cases() {
        let s = enumerate_configs(3, 0);
        assert!(s.iter().any(|c| c.circles.len() == 1));
        assert!(s.iter().all(|c| c.regions().is_ok()));
        let t = enumerate_configs(2, 1);
        assert!(t.iter().any(|c| giroux_tightness(c).unwrap() == Tightness::Tight));
        assert!(t.iter().any(|c| giroux_tightness(c).unwrap() == Tightness::Overtwisted));
    }

    #[test]
    fn symmetric_double_examples() {
        let free = PresentationBuilder::new(Grading::Integer).generator("x", 0).generator("y", 2).build().unwrap();
        let spec = SymmetricDoubleSpec::new(free.clone(), Augmentation::zero(free.algebra())).unwrap();
        let r = symmetric_double(&spec, 2).unwrap();
        assert_eq!(r.hdims, BTreeMap::from([(1, 1), (3, 1)]));
        assert_eq!(r.series, BTreeMap::from([(0, 1), (1, 1), (3, 1), (4, 1)]));

        let a = PresentationBuilder::new(Grading::Integer)
            .generator("x", 0)
            .generator("y", 1)
            .unit("y", q(-1))
            .term("y", q(1), &["x", "x"])
            .build()
            .unwrap();
        let e = Augmentation::from_pairs(a.algebra(), &[("x", q(1))]).unwrap();
        let r = symmetric_double(&SymmetricDoubleSpec::new(a, e).unwrap(), 4).unwrap();
        assert!(r.hdims.is_empty());
        assert_eq!(r.series, BTreeMap::from([(0, 1)]));
    }
}
