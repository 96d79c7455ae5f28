//! JSON file formats. Loaders walk a `serde_json::Value` by hand so that every
//! fault is reported with the JSON pointer of the offending node.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::bilinearization::{Augmentation, BilinearizedPackage};
use crate::error::{Error, Result};
use crate::gluing_oracle::{CurveDatum, Inventory, PlaneDatum, Side};
use crate::graded_algebra::{CdgaPresentation, Generator, GradedAlgebra, Grading, Polynomial};
use crate::model_geometry::{Block, BlockPath, Framing, OrbitModel};
use crate::rational::{fmt_q, parse_q, Q};
use crate::surface_doubles::{CircleSides, RegionInfo, SurfaceConfig};

/// A node together with its pointer.
#[derive(Clone, Copy)]
struct At<'a> {
    v: &'a Value,
    ptr: &'a str,
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn fail<T>(ptr: &str, msg: impl Into<String>) -> Result<T> {
    Err(Error::parse(if ptr.is_empty() { "/" } else { ptr }, msg))
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

impl<'a> At<'a> {
    fn object(self) -> Result<&'a Map<String, Value>> {
        self.v.as_object().map_or_else(|| fail(self.ptr, format!("expected an object, found {}", kind(self.v))), Ok)
    }

    fn array(self) -> Result<&'a Vec<Value>> {
        self.v.as_array().map_or_else(|| fail(self.ptr, format!("expected an array, found {}", kind(self.v))), Ok)
    }

    fn str(self) -> Result<&'a str> {
        self.v.as_str().map_or_else(|| fail(self.ptr, format!("expected a string, found {}", kind(self.v))), Ok)
    }

    fn bool(self) -> Result<bool> {
        self.v.as_bool().map_or_else(|| fail(self.ptr, format!("expected a boolean, found {}", kind(self.v))), Ok)
    }

    fn int(self) -> Result<i64> {
        self.v.as_i64().map_or_else(|| fail(self.ptr, format!("expected an integer, found {}", kind(self.v))), Ok)
    }

    /// Rationals are strings; plain JSON integers are accepted too.
    fn rational(self) -> Result<Q> {
        match self.v {
            Value::String(s) => parse_q(s).or_else(|m| fail(self.ptr, m)),
            Value::Number(n) if n.is_i64() => Ok(Q::from_integer(n.as_i64().unwrap().into())),
            v => fail(self.ptr, format!("expected a rational string like \"-5/3\", found {}", kind(v))),
        }
    }
}

fn field<'a, T>(at: At<'a>, key: &str, f: impl FnOnce(At<'_>) -> Result<T>) -> Result<T> {
    let obj = at.object()?;
    let ptr = format!("{}/{}", at.ptr, escape(key));
    match obj.get(key) {
        Some(v) => f(At { v, ptr: &ptr }),
        None => fail(at.ptr, format!("missing field `{key}`")),
    }
}

fn opt_field<'a, T>(at: At<'a>, key: &str, f: impl FnOnce(At<'_>) -> Result<T>) -> Result<Option<T>> {
    let obj = at.object()?;
    let ptr = format!("{}/{}", at.ptr, escape(key));
    match obj.get(key) {
        Some(Value::Null) | None => Ok(None),
        Some(v) => f(At { v, ptr: &ptr }).map(Some),
    }
}

fn each<T>(at: At<'_>, mut f: impl FnMut(usize, At<'_>) -> Result<T>) -> Result<Vec<T>> {
    at.array()?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let ptr = format!("{}/{i}", at.ptr);
            f(i, At { v, ptr: &ptr })
        })
        .collect()
}

fn entries<T>(at: At<'_>, mut f: impl FnMut(&str, At<'_>) -> Result<T>) -> Result<Vec<T>> {
    at.object()?
        .iter()
        .map(|(k, v)| {
            let ptr = format!("{}/{}", at.ptr, escape(k));
            f(k, At { v, ptr: &ptr })
        })
        .collect()
}

fn root(v: &Value) -> At<'_> {
    At { v, ptr: "" }
}

pub fn parse_str(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::parse("/", format!("malformed JSON at line {}, column {}: {e}", e.line(), e.column())))
}

fn q_str(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

// Gradings and generators

fn grading_at(at: At<'_>) -> Result<Grading> {
    let k = field(at, "kind", |a| a.str().map(str::to_string))?;
    match k.as_str() {
        "Z" => Ok(Grading::Integer),
        "Zmod" => {
            let d = field(at, "d", |a| a.int())?;
            if d < 2 || d % 2 == 1 {
                return fail(&format!("{}/d", at.ptr), format!("modulus must be even and at least 2, got {d}"));
            }
            Ok(Grading::Cyclic(d as u32))
        }
        other => fail(&format!("{}/kind", at.ptr), format!("unknown grading kind `{other}`, expected \"Z\" or \"Zmod\"")),
    }
}

pub fn grading_to_json(g: Grading) -> Value {
    match g {
        Grading::Integer => json!({"kind": "Z"}),
        Grading::Cyclic(d) => json!({"kind": "Zmod", "d": d}),
    }
}

fn generators_at(at: At<'_>) -> Result<Vec<Generator>> {
    let mut seen = BTreeMap::new();
    each(at, |i, g| {
        let id = field(g, "id", |a| a.str().map(str::to_string))?;
        if id.is_empty() {
            return fail(&format!("{}/id", g.ptr), "empty generator id");
        }
        if seen.insert(id.clone(), i).is_some() {
            return fail(&format!("{}/id", g.ptr), format!("duplicate generator `{id}`"));
        }
        let degree = field(g, "degree", |a| a.int())?;
        let action = opt_field(g, "action", |a| a.rational())?;
        if action.as_ref().is_some_and(|a| a < &Q::zero()) {
            return fail(&format!("{}/action", g.ptr), "action must be nonnegative");
        }
        Ok(Generator { id, degree, action })
    })
}

fn generators_to_json(alg: &GradedAlgebra) -> Value {
    Value::Array(
        alg.generators()
            .iter()
            .map(|g| {
                let mut o = json!({"id": g.id, "degree": g.degree});
                if let Some(a) = &g.action {
                    o["action"] = q_str(a);
                }
                o
            })
            .collect(),
    )
}

fn algebra_at(at: At<'_>, grading: Grading, gens: Vec<Generator>) -> Result<GradedAlgebra> {
    GradedAlgebra::new(grading, gens).or_else(|e| fail(&format!("{}/generators", at.ptr), e.to_string()))
}

fn lookup(alg: &GradedAlgebra, at: At<'_>) -> Result<usize> {
    let id = at.str()?;
    alg.lookup(id).or_else(|_| fail(at.ptr, format!("unknown generator `{id}`")))
}

// Presentations

/// A presentation file, with any named augmentations it carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgaFile {
    pub presentation: CdgaPresentation,
    pub augmentations: BTreeMap<String, Augmentation>,
}

fn polynomial_at(alg: &GradedAlgebra, at: At<'_>) -> Result<Polynomial> {
    let mut terms = Vec::new();
    each(at, |_, t| {
        let coeff = field(t, "coeff", |a| a.rational())?;
        let word = field(t, "word", |w| each(w, |_, x| lookup(alg, x)))?;
        terms.push((coeff, word));
        Ok(())
    })?;
    Ok(alg.polynomial_from_words(&terms))
}

pub fn polynomial_to_json(alg: &GradedAlgebra, p: &Polynomial) -> Value {
    Value::Array(
        p.terms()
            .map(|(m, c)| {
                let word: Vec<&str> = m.word().into_iter().map(|i| alg.id(i)).collect();
                json!({"coeff": fmt_q(c), "word": word})
            })
            .collect(),
    )
}

fn augmentation_at(alg: &GradedAlgebra, at: At<'_>) -> Result<Augmentation> {
    let mut eps = Augmentation::zero(alg);
    entries(at, |id, v| {
        let i = alg.lookup(id).or_else(|_| fail(v.ptr, format!("unknown generator `{id}`")))?;
        eps.set(i, v.rational()?);
        Ok(())
    })?;
    Ok(eps)
}

/// Augmentation JSON: id → rational, absent ids are 0. Zero values are omitted.
pub fn augmentation_to_json(alg: &GradedAlgebra, eps: &Augmentation) -> Value {
    Value::Object((0..alg.len()).filter(|&i| !eps.value(i).is_zero()).map(|i| (alg.id(i).to_string(), q_str(eps.value(i)))).collect())
}

pub fn parse_augmentation(alg: &GradedAlgebra, v: &Value) -> Result<Augmentation> {
    augmentation_at(alg, root(v))
}

fn presentation_at(at: At<'_>) -> Result<DgaFile> {
    let grading = field(at, "grading", grading_at)?;
    let gens = field(at, "generators", generators_at)?;
    let alg = algebra_at(at, grading, gens)?;
    let mut diff = vec![Polynomial::zero(); alg.len()];
    opt_field(at, "differential", |d| {
        entries(d, |id, terms| {
            let i = alg.lookup(id).or_else(|_| fail(terms.ptr, format!("unknown generator `{id}`")))?;
            diff[i] = polynomial_at(&alg, terms)?;
            Ok(())
        })
    })?;
    let augmentations = opt_field(at, "augmentations", |a| entries(a, |name, e| Ok((name.to_string(), augmentation_at(&alg, e)?))))?
        .unwrap_or_default()
        .into_iter()
        .collect();
    let presentation = CdgaPresentation::new(alg, diff).or_else(|e| fail(at.ptr, e.to_string()))?;
    Ok(DgaFile { presentation, augmentations })
}

/// Structural parse only; call `validate` on the result for ∂² and degrees.
pub fn parse_presentation(v: &Value) -> Result<DgaFile> {
    presentation_at(root(v))
}

pub fn presentation_to_json(a: &CdgaPresentation) -> Value {
    let alg = a.algebra();
    let diff: Map<String, Value> = (0..alg.len())
        .filter(|&i| !a.differential_of(i).is_zero())
        .map(|i| (alg.id(i).to_string(), polynomial_to_json(alg, a.differential_of(i))))
        .collect();
    json!({
        "grading": grading_to_json(a.grading()),
        "generators": generators_to_json(alg),
        "differential": diff,
    })
}

pub fn dga_file_to_json(f: &DgaFile) -> Value {
    let mut v = presentation_to_json(&f.presentation);
    if !f.augmentations.is_empty() {
        let alg = f.presentation.algebra();
        v["augmentations"] = Value::Object(f.augmentations.iter().map(|(k, e)| (k.clone(), augmentation_to_json(alg, e))).collect());
    }
    v
}

/// A^ε as a presentation on the hats, plus the ∂^ε₀ functional.
pub fn package_to_json(pkg: &BilinearizedPackage) -> Value {
    let hats = pkg.hat_algebra();
    let d0: Map<String, Value> =
        pkg.fundamental.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(h, c)| (hats.id(h).to_string(), q_str(c))).collect();
    json!({"presentation": presentation_to_json(&pkg.algebra), "d0": d0})
}

/// Inverse of `package_to_json`, for round-trip checks.
pub fn parse_package(v: &Value) -> Result<(CdgaPresentation, Vec<Q>)> {
    let at = root(v);
    let file = field(at, "presentation", presentation_at)?;
    let alg = file.presentation.algebra();
    let d0 = field(at, "d0", |d| augmentation_at(alg, d))?;
    Ok((file.presentation, d0.values().to_vec()))
}

// Orbit models

fn block_at(at: At<'_>) -> Result<Block> {
    let k = field(at, "kind", |a| a.str().map(str::to_string))?;
    match k.as_str() {
        "rot" => {
            let dir = field(at, "dir", |a| a.int())?;
            if dir.abs() != 1 {
                return fail(&format!("{}/dir", at.ptr), "rotation direction must be 1 or -1");
            }
            Ok(Block::SmallRotation { dir: dir as i8 })
        }
        "hyp" => Ok(Block::Hyperbolic { b: field(at, "b", |a| a.rational())? }),
        "neghyp" => {
            let f = field(at, "framing", |a| a.str().map(str::to_string))?;
            let framing = match f.as_str() {
                "+" => Framing::Plus,
                "-" => Framing::Minus,
                _ => return fail(&format!("{}/framing", at.ptr), "framing must be \"+\" or \"-\""),
            };
            Ok(Block::NegHyperbolicPair { framing })
        }
        other => fail(&format!("{}/kind", at.ptr), format!("unknown block kind `{other}`")),
    }
}

fn block_to_json(b: &Block) -> Value {
    match b {
        Block::SmallRotation { dir } => json!({"kind": "rot", "dir": dir}),
        Block::Hyperbolic { b } => json!({"kind": "hyp", "b": fmt_q(b)}),
        Block::NegHyperbolicPair { framing } => {
            json!({"kind": "neghyp", "framing": if *framing == Framing::Plus { "+" } else { "-" }})
        }
    }
}

pub fn parse_orbit(v: &Value) -> Result<OrbitModel> {
    let at = root(v);
    let blocks = field(at, "blocks", |b| each(b, |_, x| block_at(x)))?;
    if blocks.is_empty() {
        return fail("/blocks", "an orbit needs at least one block");
    }
    let action = field(at, "action", |a| a.rational())?;
    let path = BlockPath::new(blocks, action).or_else(|e| fail("/action", e.to_string()))?;
    let m = opt_field(at, "multiplicity", |a| a.int())?.unwrap_or(1);
    if m < 1 || m > u32::MAX as i64 {
        return fail("/multiplicity", "multiplicity must be a positive integer");
    }
    OrbitModel::new(path, m as u32).or_else(|e| fail("/multiplicity", e.to_string()))
}

pub fn orbit_to_json(o: &OrbitModel) -> Value {
    json!({
        "blocks": o.path.blocks.iter().map(block_to_json).collect::<Vec<_>>(),
        "action": fmt_q(&o.path.action),
        "multiplicity": o.multiplicity,
    })
}

// Surfaces

fn region_at(at: At<'_>) -> Result<RegionInfo> {
    Ok(RegionInfo {
        id: opt_field(at, "id", |a| a.str().map(str::to_string))?,
        disk: field(at, "disk", |a| a.bool())?,
        chi: field(at, "chi", |a| a.int())?,
    })
}

fn region_to_json(r: &RegionInfo) -> Value {
    let mut o = json!({"disk": r.disk, "chi": r.chi});
    if let Some(id) = &r.id {
        o["id"] = Value::String(id.clone());
    }
    o
}

/// Structural parse; `SurfaceConfig::regions` checks the topology.
pub fn parse_surface(v: &Value) -> Result<SurfaceConfig> {
    let at = root(v);
    let genus = field(at, "surface", |s| field(s, "genus", |g| g.int()))?;
    if genus < 0 || genus > u32::MAX as i64 {
        return fail("/surface/genus", "genus must be a nonnegative integer");
    }
    let circles = field(at, "circles", |c| {
        each(c, |_, s| Ok(CircleSides { plus: field(s, "plus", region_at)?, minus: field(s, "minus", region_at)? }))
    })?;
    Ok(SurfaceConfig { genus: genus as u32, circles })
}

pub fn surface_to_json(cfg: &SurfaceConfig) -> Value {
    json!({
        "surface": {"genus": cfg.genus},
        "circles": cfg.circles.iter().map(|c| json!({"plus": region_to_json(&c.plus), "minus": region_to_json(&c.minus)})).collect::<Vec<_>>(),
    })
}

// Rigid-curve inventories

fn sign_at(at: At<'_>) -> Result<i8> {
    match at.int()? {
        1 => Ok(1),
        -1 => Ok(-1),
        s => fail(at.ptr, format!("sign must be 1 or -1, got {s}")),
    }
}

fn curve_at(at: At<'_>) -> Result<CurveDatum> {
    Ok(CurveDatum {
        plus: field(at, "plus", |a| a.str().map(str::to_string))?,
        minus: field(at, "minus", |m| each(m, |_, x| x.str().map(str::to_string)))?,
        sign: field(at, "sign", sign_at)?,
        coeff: opt_field(at, "coeff", |a| a.rational())?.unwrap_or_else(|| Q::from_integer(1.into())),
        levels: field(at, "levels", |l| each(l, |_, x| x.rational()))?,
    })
}

fn plane_at(at: At<'_>) -> Result<PlaneDatum> {
    let orbit = field(at, "orbit", |a| a.str().map(str::to_string))?;
    let side = match field(at, "side", |a| a.str().map(str::to_string))?.as_str() {
        "+" => Side::Plus,
        "-" => Side::Minus,
        _ => return fail(&format!("{}/side", at.ptr), "side must be \"+\" or \"-\""),
    };
    let sign = field(at, "sign", sign_at)?;
    let k = opt_field(at, "k", |a| a.rational())?.unwrap_or_else(|| side.default_k());
    Ok(PlaneDatum { orbit, side, sign, k })
}

/// Structural parse; `Inventory::validate` checks degrees, levels and signs.
pub fn parse_inventory(v: &Value) -> Result<Inventory> {
    let at = root(v);
    let grading = match opt_field(at, "grading", grading_at)? {
        Some(g) => g,
        None => Grading::Integer,
    };
    let orbits = field(at, "orbits", generators_at)?;
    algebra_at(at, grading, orbits.clone())?;
    let known: BTreeMap<&str, ()> = orbits.iter().map(|g| (g.id.as_str(), ())).collect();
    let curves = opt_field(at, "curves", |c| each(c, |_, x| curve_at(x)))?.unwrap_or_default();
    let planes = opt_field(at, "planes", |p| each(p, |_, x| plane_at(x)))?.unwrap_or_default();
    for (i, c) in curves.iter().enumerate() {
        if !known.contains_key(c.plus.as_str()) {
            return fail(&format!("/curves/{i}/plus"), format!("unknown orbit `{}`", c.plus));
        }
        if let Some(j) = c.minus.iter().position(|m| !known.contains_key(m.as_str())) {
            return fail(&format!("/curves/{i}/minus/{j}"), format!("unknown orbit `{}`", c.minus[j]));
        }
    }
    if let Some(i) = planes.iter().position(|p| !known.contains_key(p.orbit.as_str())) {
        return fail(&format!("/planes/{i}/orbit"), format!("unknown orbit `{}`", planes[i].orbit));
    }
    Ok(Inventory { grading, orbits, curves, planes })
}

pub fn inventory_to_json(inv: &Inventory) -> Value {
    let mut orbits = inv.orbits.clone();
    orbits.sort_by(|a, b| a.id.cmp(&b.id));
    let orbits: Vec<Value> = orbits
        .iter()
        .map(|g| {
            let mut o = json!({"id": g.id, "degree": inv.grading.reduce(g.degree)});
            if let Some(a) = &g.action {
                o["action"] = q_str(a);
            }
            o
        })
        .collect();
    json!({
        "grading": grading_to_json(inv.grading),
        "orbits": orbits,
        "curves": inv.curves.iter().map(|c| json!({
            "plus": c.plus,
            "minus": c.minus,
            "sign": c.sign,
            "coeff": fmt_q(&c.coeff),
            "levels": c.levels.iter().map(fmt_q).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "planes": inv.planes.iter().map(|p| json!({
            "orbit": p.orbit,
            "side": p.side.symbol(),
            "sign": p.sign,
            "k": fmt_q(&p.k),
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
#[path = "io_tests.rs"]
mod tests;
