//! JSON reports with provenance (tool version, seed, input digests) and
//! timings kept apart from the deterministic payload.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{Decomposition, LengthBounds};
use crate::catalog::{CatalogEntry, Verification};
use crate::error::Result;
use crate::exterior::{AlternatingForm, Subspace, Vector};
use crate::flatten::{FlattenResult, InvolutivityFailure, InvolutivityResult};
use crate::io;
use crate::isotropic::{CanonicalRep, ComplementResult, NlResult};
use crate::rational::fmt_q;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn vector_json(v: &Vector) -> Value {
    Value::Array(v.coords.iter().map(|c| Value::String(fmt_q(c))).collect())
}

pub fn vectors_json(vs: &[Vector]) -> Value {
    Value::Array(vs.iter().map(vector_json).collect())
}

pub fn form_json(f: &AlternatingForm) -> Value {
    to_value(&io::form_to_json(f))
}

pub fn subspace_json(s: &Subspace) -> Value {
    to_value(&io::subspace_to_json(s))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

pub fn decomposition_json(d: &Decomposition) -> Value {
    json!({
        "decomposable": d.decomposable,
        "support_dim": d.support_dim,
        "factors": d.factors.as_ref().map(|fs| fs.iter().map(form_json).collect::<Vec<_>>()),
    })
}

pub fn length_json(b: &LengthBounds) -> Value {
    let mut v = to_value(b);
    if let (Value::Object(m), Some(w)) = (&mut v, &b.witness_basis) {
        m.insert("witness_basis".into(), vectors_json(w));
    }
    v
}

pub fn nl_json(r: &NlResult) -> Value {
    let mut v = to_value(r);
    if let Value::Object(m) = &mut v {
        m.insert("certified".into(), Value::Bool(r.value_upper == r.value_lower));
        m.insert("witness_basis".into(), vectors_json(&r.witness_basis));
    }
    v
}

pub fn complement_json(r: &ComplementResult) -> Value {
    json!({
        "method": r.method,
        "dimension": r.f.dim(),
        "basis": vectors_json(&r.f_basis),
        "checks": r.checks,
        "certified": r.checks.all_hold(),
    })
}

pub fn canonical_json(rep: &CanonicalRep, reconstructs: bool) -> Value {
    let hats: Vec<Value> = rep
        .hat_forms
        .iter()
        .map(|(t, f)| json!({"index": t.indices(), "form": form_json(f)}))
        .collect();
    let index_set: Vec<Vec<usize>> = rep.index_set().iter().map(|t| t.indices()).collect();
    json!({
        "l_basis": vectors_json(&rep.l_basis),
        "f_basis": vectors_json(&rep.f_basis),
        "dual_forms": rep.dual_forms.iter().map(form_json).collect::<Vec<_>>(),
        "hat_forms": hats,
        "index_set": index_set,
        "sign": rep.sign,
        "length": rep.length,
        "length_witness": vectors_json(&rep.length_witness),
        "checks": {"reconstructs": reconstructs},
        "certified": reconstructs,
    })
}

pub fn flatten_json(r: &FlattenResult) -> Value {
    json!({
        "omega0": form_json(&r.omega0),
        "steps": r.steps,
        "flow_params": {"steps": r.steps, "step_size": r.step_size, "scheme": "rk4"},
        "seed": r.seed,
        "tol": r.tol,
        "max_error": r.max_error,
        "max_x_drift": r.max_x_drift,
        "passed": r.passed,
        "samples": r.samples.iter().map(|s| json!({
            "point": s.point,
            "error": s.error,
            "x_drift": s.x_drift,
        })).collect::<Vec<_>>(),
    })
}

pub fn involutive_json(r: &InvolutivityResult) -> Value {
    let witness = r.witness.as_ref().map(|w| {
        let failure = match &w.failure {
            InvolutivityFailure::NotInSpan { point } => json!({
                "kind": "not_in_span",
                "point": point.iter().map(fmt_q).collect::<Vec<_>>(),
            }),
            InvolutivityFailure::SingularCoefficient {
                generator,
                numerator,
                denominator,
            } => json!({
                "kind": "singular_coefficient",
                "generator": generator + 1,
                "numerator": format!("{numerator:?}"),
                "denominator": format!("{denominator:?}"),
            }),
        };
        json!({
            "pair": [w.pair.0 + 1, w.pair.1 + 1],
            "bracket": to_value(&io::vector_field_to_json(&w.bracket)),
            "failure": failure,
        })
    });
    json!({
        "involutive": r.involutive,
        "rank": r.rank,
        "probes": r.probes.iter().map(|p| p.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "witness": witness,
    })
}

pub fn catalog_meta_json(e: &CatalogEntry, checks: &[Verification]) -> Value {
    json!({
        "name": e.name,
        "coordinate_names": e.coordinate_names,
        "dimension": e.form.dimension(),
        "degree": e.form.degree(),
        "expected": e.expected,
        "L": subspace_json(&e.l),
        "V": e.v.as_ref().map(|v| json!({"subspace": subspace_json(&v.v), "r": v.r})),
        "F": e.f.as_ref().map(subspace_json),
        "checks": checks,
        "certified": checks.iter().all(|c| c.ok),
    })
}

/// Accumulates a report. The payload is deterministic given inputs and seed;
/// timings are stored separately and excluded from `payload_sha256`.
pub struct Report {
    command: String,
    seed: Option<u64>,
    inputs: Vec<Value>,
    results: Map<String, Value>,
    timings: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        Report {
            command: command.to_string(),
            seed,
            inputs: Vec::new(),
            results: Map::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, role: &str, path: &str, bytes: &[u8]) {
        self.inputs.push(json!({"role": role, "path": path, "sha256": sha256_hex(bytes)}));
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.results.insert(key.to_string(), value);
    }

    /// Runs `f`, recording its wall time under `name`.
    pub fn timed<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.timings.entry(name.to_string()).or_default() += start.elapsed().as_secs_f64() * 1e3;
        out
    }

    pub fn payload(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "seed": self.seed,
            "inputs": self.inputs,
            "results": Value::Object(self.results.clone()),
        })
    }

    pub fn finish(&self) -> Result<Value> {
        let payload = self.payload();
        let digest = sha256_hex(serde_json::to_string(&payload)?.as_bytes());
        let mut v = payload;
        if let Value::Object(m) = &mut v {
            m.insert("payload_sha256".into(), Value::String(digest));
            m.insert("timings_ms".into(), to_value(&self.timings));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_hex_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn timings_do_not_affect_payload_digest() {
        let mut a = Report::new("analyze", Some(7));
        a.input("form", "f.json", b"{}");
        a.set("x", json!(1));
        let mut b = Report::new("analyze", Some(7));
        b.input("form", "f.json", b"{}");
        b.set("x", json!(1));
        b.timed("slow", || std::thread::sleep(std::time::Duration::from_millis(2)));
        let (fa, fb) = (a.finish().unwrap(), b.finish().unwrap());
        assert_eq!(fa["payload_sha256"], fb["payload_sha256"]);
        assert_ne!(fa["timings_ms"], fb["timings_ms"]);
    }
}
