use std::fmt::Write as _;
use std::path::Path;

use giroux_core::bilinearization::{
    bilinearize as bilinearize_pair, rational_grid, search_augmentations_bounded, validate_augmentation, Augmentation, BilinearizedPackage,
};
use giroux_core::criterion::{decide_criterion, fundamental_class, linearized_homology, CriterionVerdict};
use giroux_core::gluing_oracle::aggregate_differential;
use giroux_core::io::{self, DgaFile};
use giroux_core::model_geometry::{cz_parity_check, is_bad, lift_grading, normal_spectrum, SpectrumQuery};
use giroux_core::rational::{fmt_q, parse_q};
use giroux_core::suite::{diagnose_red, run_suite, suite_acceptable, SuiteSize};
use giroux_core::surface_doubles::{ch_surface, giroux_tightness, symmetric_double, SurfaceHomology, SymmetricDoubleSpec};
use giroux_core::{Error, Q};
use serde_json::{json, Value};

use crate::render::{self, pretty};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_INTERNAL: u8 = 2;
pub const EXIT_VANISHING: u8 = 3;

pub struct Report {
    pub text: String,
    pub json: Value,
    pub exit: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, exit: EXIT_OK }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub pointer: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        if self.kind == "internal" {
            EXIT_INTERNAL
        } else {
            EXIT_INPUT
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"kind": self.kind, "pointer": self.pointer, "message": self.message})
    }

    fn input(message: impl Into<String>) -> Self {
        CliError { kind: "invalid", pointer: None, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Parse { .. } => "parse",
            Error::UnknownGenerator(_) | Error::DuplicateGenerator(_) | Error::InvalidGrading(_) => "invalid-algebra",
            Error::InvalidPresentation(_) => "invalid-presentation",
            Error::InvalidAugmentation { .. } => "invalid-augmentation",
            Error::SearchTooLarge { .. } => "search-too-large",
            Error::Degenerate(_) => "degenerate",
            Error::Unsupported(_) => "unsupported",
            Error::Invalid(_) => "invalid",
            Error::Internal(_) => "internal",
        };
        let pointer = match &e {
            Error::Parse { pointer, .. } => Some(pointer.clone()),
            _ => None,
        };
        CliError { kind, pointer, message: e.to_string() }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError {
        kind: "io",
        pointer: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    Ok(io::parse_str(&text)?)
}

fn load_dga(path: &Path) -> Result<DgaFile> {
    let f = io::parse_presentation(&read_json(path)?)?;
    f.presentation.validate().into_result()?;
    Ok(f)
}

/// A named augmentation from the file, or else a path to an augmentation file.
fn resolve_aug(file: &DgaFile, spec: &str) -> Result<Augmentation> {
    let eps = match file.augmentations.get(spec) {
        Some(e) => e.clone(),
        None => {
            let path = Path::new(spec);
            if !path.is_file() {
                let names: Vec<&str> = file.augmentations.keys().map(String::as_str).collect();
                return Err(CliError::input(format!(
                    "`{spec}` is neither an augmentation in the file (have: {}) nor a readable file",
                    if names.is_empty() { "none".to_string() } else { names.join(", ") }
                )));
            }
            io::parse_augmentation(file.presentation.algebra(), &read_json(path)?)?
        }
    };
    validate_augmentation(&file.presentation, &eps).into_result()?;
    Ok(eps)
}

fn parse_rational(flag: &str, s: &str) -> Result<Q> {
    parse_q(s).map_err(|e| CliError::input(format!("{flag}: {e}")))
}

// validate

pub fn validate(path: &Path) -> Result<Report> {
    let f = io::parse_presentation(&read_json(path)?)?;
    let report = f.presentation.validate();
    let alg = f.presentation.algebra();
    let mut text = String::new();
    let mut augs = serde_json::Map::new();
    let mut ok = report.is_valid();
    for v in &report.violations {
        writeln!(text, "violation: {v}").unwrap();
    }
    for (name, eps) in &f.augmentations {
        let r = validate_augmentation(&f.presentation, eps);
        let issues: Vec<String> = r.issues.iter().map(|i| i.to_string()).collect();
        ok &= issues.is_empty();
        for i in &issues {
            writeln!(text, "augmentation {name}: {i}").unwrap();
        }
        augs.insert(name.clone(), json!({"valid": issues.is_empty(), "issues": issues}));
    }
    let summary = format!(
        "{}: {} generators, grading {}, {} augmentation(s)",
        if ok { "valid" } else { "invalid" },
        alg.len(),
        alg.grading(),
        f.augmentations.len()
    );
    text.insert_str(0, &format!("{summary}\n"));
    let json = json!({
        "valid": ok,
        "generators": alg.len(),
        "violations": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "augmentations": augs,
    });
    Ok(Report { text: text.trim_end().to_string(), json, exit: if ok { EXIT_OK } else { EXIT_INPUT } })
}

// homology

fn homology_report(pkg: &BilinearizedPackage) -> Result<(String, Value)> {
    let h = linearized_homology(pkg)?;
    let hats = pkg.hat_algebra();
    let mut text = format!("linearized homology: {}\n", render::dims(&h.dims()));
    let mut reps = Vec::new();
    for (d, r) in &h.representatives {
        writeln!(text, "  degree {d}: {}", render::vector(hats, r)).unwrap();
        reps.push(json!({"degree": d, "vector": render::vector_json(hats, r)}));
    }
    let fc = fundamental_class(pkg, &h);
    Ok((
        text,
        json!({"dims": render::dims_json(&h.dims()), "representatives": reps, "fundamental": fc.values.iter().map(render::q_json).collect::<Vec<_>>()}),
    ))
}

pub fn homology(path: &Path, aug: Option<&str>) -> Result<Report> {
    let f = load_dga(path)?;
    let eps = match aug {
        Some(spec) => resolve_aug(&f, spec)?,
        None => {
            let zero = Augmentation::zero(f.presentation.algebra());
            validate_augmentation(&f.presentation, &zero)
                .into_result()
                .map_err(|e| CliError::input(format!("the zero map is not an augmentation ({e}); pass --linearize")))?;
            zero
        }
    };
    let pkg = bilinearize_pair(&f.presentation, &eps, &eps)?;
    let (text, json) = homology_report(&pkg)?;
    Ok(Report::ok(text.trim_end().to_string(), json))
}

// bilinearize

pub fn bilinearize(path: &Path, left: &str, right: &str) -> Result<Report> {
    let f = load_dga(path)?;
    let (el, er) = (resolve_aug(&f, left)?, resolve_aug(&f, right)?);
    let pkg = bilinearize_pair(&f.presentation, &el, &er)?;
    pkg.check_invariants()?;
    let hats = pkg.hat_algebra();
    let mut text = String::new();
    for h in 0..hats.len() {
        writeln!(text, "∂{} = {}", pretty(hats.id(h)), render::poly(hats, pkg.algebra.differential_of(h))).unwrap();
    }
    let (htext, hjson) = homology_report(&pkg)?;
    text.push_str(&htext);
    let json = json!({"package": io::package_to_json(&pkg), "homology": hjson});
    Ok(Report::ok(text.trim_end().to_string(), json))
}

// criterion

fn verdict_report(v: &CriterionVerdict) -> (String, Value) {
    let base = v.package.base.algebra();
    let hats = v.package.hat_algebra();
    let mut text = String::new();
    let mut witness = serde_json::Map::new();
    if v.nonvanishing {
        writeln!(text, "nonvanishing").unwrap();
        if let Some(k) = &v.homotopy {
            let m = k.to_map(base);
            writeln!(text, "DG homotopy K: {}", render::assignments(&m)).unwrap();
            witness.insert("homotopy".into(), render::q_map_json(&m));
        }
        if let Some(e) = &v.augmentation {
            let m = e.to_map(hats);
            let m = m.into_iter().filter(|(_, q)| *q != Q::from_integer(0.into())).collect();
            writeln!(text, "augmentation of A^ε: {}", render::assignments(&m)).unwrap();
            witness.insert("augmentation".into(), render::q_map_json(&m));
        }
        if let Some(d) = &v.truncated_dims {
            writeln!(text, "H(S^≤{}(V̂)): {}", v.word_bound, render::dims(d)).unwrap();
        }
    } else {
        writeln!(text, "vanishing").unwrap();
        if let Some((r, val)) = v.fundamental.witness(&v.linearized) {
            writeln!(text, "fundamental class nonzero: {} ↦ {}", render::vector(hats, r), fmt_q(val)).unwrap();
            witness.insert("fundamental".into(), json!({"class": render::vector_json(hats, r), "value": fmt_q(val)}));
        }
        writeln!(text, "unit is a boundary in S^≤{}(V̂)", v.word_bound).unwrap();
    }
    writeln!(text, "linearized homology: {}", render::dims(&v.linearized.dims())).unwrap();
    let [a, b, c, d] = v.agreement();
    let json = json!({
        "nonvanishing": v.nonvanishing,
        "word_bound": v.word_bound,
        "tests": {"homotopy": a, "fundamental_zero": b, "augmentation": c, "unit_survives": d},
        "witness": witness,
        "linearized_dims": render::dims_json(&v.linearized.dims()),
        "truncated_dims": v.truncated_dims.as_ref().map(render::dims_json),
    });
    (text, json)
}

pub fn criterion(path: &Path, left: &str, right: &str, word_bound: usize) -> Result<Report> {
    let f = load_dga(path)?;
    let (el, er) = (resolve_aug(&f, left)?, resolve_aug(&f, right)?);
    let v = decide_criterion(&f.presentation, &el, &er, word_bound)?;
    let (text, json) = verdict_report(&v);
    Ok(Report { text: text.trim_end().to_string(), json, exit: if v.nonvanishing { EXIT_OK } else { EXIT_VANISHING } })
}

// surface

/// Λ(γ^1..γ^M) for one circle, Λ(γ_1^1..γ_1^M, …) for several.
fn exterior_name(circles: usize, covers: usize) -> String {
    let range = |sub: String| format!("γ{sub}^1..γ{sub}^{covers}");
    let parts: Vec<String> =
        if circles == 1 { vec![range(String::new())] } else { (1..=circles).map(|i| range(format!("_{i}"))).collect() };
    format!("Λ({})", parts.join(", "))
}

pub fn surface(path: &Path, covers: usize) -> Result<Report> {
    let cfg = io::parse_surface(&read_json(path)?)?;
    let tight = giroux_tightness(&cfg)?;
    let (answer, verdict) = ch_surface(&cfg, covers)?;
    let (vtext, vjson) = verdict_report(&verdict);
    let (head, gens) = match &answer {
        SurfaceHomology::Zero => ("overtwisted; CH = 0".to_string(), Vec::new()),
        SurfaceHomology::Exterior(g) => (format!("tight; CH = {}", exterior_name(cfg.circles.len(), covers)), g.clone()),
    };
    let json = json!({
        "tight": matches!(tight, giroux_core::surface_doubles::Tightness::Tight),
        "covers": covers,
        "exterior_generators": gens,
        "verdict": vjson,
    });
    let text = format!("{head}\n{}", vtext.trim_end());
    Ok(Report { text, json, exit: if answer.is_zero() { EXIT_VANISHING } else { EXIT_OK } })
}

// double

pub fn double(path: &Path, aug: &str, word_bound: usize) -> Result<Report> {
    let f = load_dga(path)?;
    let eps = resolve_aug(&f, aug)?;
    let spec = SymmetricDoubleSpec::new(f.presentation.clone(), eps)?;
    let r = symmetric_double(&spec, word_bound)?;
    let (vtext, vjson) = verdict_report(&r.verdict);
    let text = format!("H^ε: {}\nS^≤{word_bound}(H^ε): {}\n{}", render::dims(&r.hdims), render::dims(&r.series), vtext.trim_end());
    let json = json!({"hdims": render::dims_json(&r.hdims), "series": render::dims_json(&r.series), "verdict": vjson});
    Ok(Report::ok(text, json))
}

// glue

pub fn glue(path: &Path) -> Result<Report> {
    let inv = io::parse_inventory(&read_json(path)?)?;
    inv.validate()?;
    let cmp = aggregate_differential(&inv)?;
    let mut text = format!(
        "{} shapes counted; {}\n",
        cmp.shapes,
        if cmp.agrees() { "counts agree with the bilinearized differential" } else { "MISMATCH" }
    );
    let mut counted = serde_json::Map::new();
    for h in 0..cmp.hats.len() {
        writeln!(text, "∂{} = {}", pretty(cmp.hats.id(h)), render::poly(&cmp.hats, &cmp.counted[h])).unwrap();
        counted.insert(cmp.hats.id(h).to_string(), io::polynomial_to_json(&cmp.hats, &cmp.counted[h]));
    }
    for m in &cmp.mismatches {
        writeln!(text, "  {}", pretty(m)).unwrap();
    }
    let json = json!({"agrees": cmp.agrees(), "shapes": cmp.shapes, "counted": counted, "mismatches": cmp.mismatches});
    Ok(Report { text: text.trim_end().to_string(), json, exit: if cmp.agrees() { EXIT_OK } else { EXIT_INTERNAL } })
}

// cz

pub fn cz(path: &Path, spectrum: Option<(&str, &str, &str, bool)>) -> Result<Report> {
    let orbit = io::parse_orbit(&read_json(path)?)?;
    let cz = orbit.cz()?;
    let grading = orbit.grading()?;
    let bad = is_bad(&orbit)?;
    let parity = cz_parity_check(&orbit.path, orbit.multiplicity)?;
    let lifted = lift_grading(&orbit)?;
    if !parity.holds {
        return Err(Error::Internal(format!("parity identity fails: CZ {cz}, n {}, det sign {}", parity.n, parity.det_sign)).into());
    }
    let mut text = format!(
        "CZ = {cz}, n = {}, |γ| = {grading}, {}\nparity: (−1)^(CZ+n) = sgn det(Id − A) = {}\nlifted: CZ = {}, |γ| = {}, {}\n",
        orbit.n,
        if bad { "bad" } else { "good" },
        parity.det_sign,
        lifted.cz,
        lifted.grading,
        if lifted.good { "good" } else { "bad" }
    );
    let mut json = json!({
        "cz": cz, "n": orbit.n, "grading": grading, "bad": bad,
        "parity": {"det_sign": parity.det_sign, "holds": parity.holds},
        "lifted": {"cz": lifted.cz, "grading": lifted.grading, "good": lifted.good},
    });
    if let Some((t, s, c, small)) = spectrum {
        let q = SpectrumQuery {
            eps_tau: parse_rational("--eps-tau", t)?,
            eps_sigma: parse_rational("--eps-sigma", s)?,
            cutoff: parse_rational("--cutoff", c)?,
            action: orbit.path.action.clone(),
            small_eps: small,
        };
        let sp = normal_spectrum(&q)?;
        let show = |e: &giroux_core::model_geometry::Eigenvalue| e.exact.as_ref().map_or_else(|| format!("{:.6}", e.approx), fmt_q);
        writeln!(text, "distinguished: {}, {}", show(&sp.distinguished[0]), show(&sp.distinguished[1])).unwrap();
        writeln!(text, "inside (−Λ, Λ): {}", sp.window.iter().map(show).collect::<Vec<_>>().join(", ")).unwrap();
        json["spectrum"] = json!({
            "distinguished": sp.distinguished.iter().map(show).collect::<Vec<_>>(),
            "window": sp.window.iter().map(|e| json!({"mode": e.mode, "branch": e.branch, "value": show(e), "multiplicity": e.multiplicity})).collect::<Vec<_>>(),
        });
    }
    Ok(Report::ok(text.trim_end().to_string(), json))
}

// augmentations

pub fn augmentations(path: &Path, p: i64, q: i64, cap: u128) -> Result<Report> {
    if p < 0 || q < 1 {
        return Err(CliError::input("--grid needs P ≥ 0 and Q ≥ 1"));
    }
    let f = load_dga(path)?;
    let found = search_augmentations_bounded(&f.presentation, &rational_grid(p, q), cap)?;
    let alg = f.presentation.algebra();
    let mut text = format!("{} augmentation(s) with degree 0 values in {{p/q : |p| ≤ {p}, 1 ≤ q ≤ {q}}}\n", found.len());
    for e in &found {
        writeln!(text, "  {}", render::assignments(&e.to_map(alg))).unwrap();
    }
    let json = json!({"grid": [p, q], "augmentations": found.iter().map(|e| io::augmentation_to_json(alg, e)).collect::<Vec<_>>()});
    Ok(Report::ok(text.trim_end().to_string(), json))
}

// selftest

pub fn selftest(seed: u64, quick: bool) -> Report {
    let size = if quick { SuiteSize::QUICK } else { SuiteSize::FULL };
    let outcomes = run_suite(seed, &size);
    let mut text = String::new();
    let mut checks = Vec::new();
    for o in &outcomes {
        writeln!(text, "{}", o.line()).unwrap();
        let mut c = json!({"id": o.id, "name": o.name, "passed": o.passed(), "seconds": o.elapsed.as_secs_f64()});
        match &o.result {
            Ok(m) => c["message"] = json!(m),
            Err(m) => {
                c["message"] = json!(m);
                if let Ok(d) = diagnose_red(o.id, seed, &size) {
                    writeln!(text, "       documented red: {d}").unwrap();
                    c["diagnosis"] = json!(d);
                }
            }
        }
        checks.push(c);
    }
    let verdict = suite_acceptable(&outcomes, seed, &size);
    match &verdict {
        Ok(()) => writeln!(text, "suite acceptable").unwrap(),
        Err(e) => writeln!(text, "suite FAILED: {e}").unwrap(),
    }
    let json = json!({"seed": seed, "quick": quick, "checks": checks, "acceptable": verdict.is_ok()});
    Report { text: text.trim_end().to_string(), json, exit: if verdict.is_ok() { EXIT_OK } else { EXIT_INTERNAL } }
}
