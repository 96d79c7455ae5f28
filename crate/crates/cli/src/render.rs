//! Human-readable rendering. Hat ids are stored as `x^`; text output shows
//! them with a combining circumflex.

use std::collections::BTreeMap;

use giroux_core::graded_algebra::{GradedAlgebra, Monomial, Polynomial};
use giroux_core::linalg::SparseVec;
use giroux_core::rational::fmt_q;
use giroux_core::Q;
use serde_json::{Map, Value};

/// Replaces each hat marker (a `^` not followed by a digit) with U+0302.
pub fn pretty(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    for (i, &c) in chars.iter().enumerate() {
        if c == '^' && !chars.get(i + 1).is_some_and(|n| n.is_ascii_digit()) {
            out.push('\u{302}');
        } else {
            out.push(c);
        }
    }
    out
}

pub fn poly(alg: &GradedAlgebra, p: &Polynomial) -> String {
    pretty(&alg.format_polynomial(p))
}

fn as_polynomial(v: &SparseVec) -> Polynomial {
    let mut p = Polynomial::zero();
    for (i, c) in v {
        p.add_term(Monomial::generator(*i), c.clone());
    }
    p
}

/// A vector in generator coordinates, written as a linear combination.
pub fn vector(alg: &GradedAlgebra, v: &SparseVec) -> String {
    poly(alg, &as_polynomial(v))
}

pub fn vector_json(alg: &GradedAlgebra, v: &SparseVec) -> Value {
    Value::Object(v.iter().map(|(i, c)| (alg.id(*i).to_string(), Value::String(fmt_q(c)))).collect())
}

pub fn q_json(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

pub fn q_map_json(m: &BTreeMap<String, Q>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.clone(), q_json(v))).collect::<Map<_, _>>())
}

pub fn dims_json(d: &BTreeMap<i64, usize>) -> Value {
    Value::Object(d.iter().map(|(k, v)| (k.to_string(), Value::from(*v))).collect())
}

/// `{0: 1, 1: 2}` as "H_0 = 1, H_1 = 2", or "0" when empty.
pub fn dims(d: &BTreeMap<i64, usize>) -> String {
    if d.is_empty() {
        return "0".into();
    }
    d.iter().map(|(k, v)| format!("dim H_{k} = {v}")).collect::<Vec<_>>().join(", ")
}

pub fn assignments(m: &BTreeMap<String, Q>) -> String {
    if m.is_empty() {
        return "0".into();
    }
    m.iter().map(|(k, v)| format!("{} ↦ {}", pretty(k), fmt_q(v))).collect::<Vec<_>>().join(", ")
}
