//! JSON encodings of core values. Rationals are always `"p/q"` strings.

use serde_json::{json, Map, Value};
use wkstab_core::measures::{CaseData, MeasurePair, SignedMeasure};
use wkstab_core::poly::{format_rational, PieceProof, PiecewisePoly, Polynomial, Rational, RootInterval};
use wkstab_core::stability::{Certificate, StabilityVerdict, ThresholdResult};
use wkstab_core::weights::PairingResult;
use wkstab_core::Point;

pub const SCHEMA_VERSION: &str = "1";

pub fn rational(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn point(p: &Point) -> Value {
    json!([rational(&p.x), rational(&p.y)])
}

pub fn polynomial(p: &Polynomial) -> Value {
    Value::Array(p.coeffs().iter().map(rational).collect())
}

pub fn piecewise(p: &PiecewisePoly) -> Value {
    let pieces: Vec<Value> = p
        .segments()
        .map(|(lo, hi, q)| {
            json!({
                "lo": rational(lo),
                "hi": rational(hi),
                "coefficients": polynomial(q),
                "text": q.to_string(),
            })
        })
        .collect();
    json!({ "pieces": pieces, "exact": true })
}

pub fn measure(m: &SignedMeasure) -> Value {
    let mut v = piecewise(&m.density);
    v["kind"] = json!(m.kind.to_string());
    v["total"] = rational(&m.density.total());
    v
}

pub fn measure_pair(p: &MeasurePair) -> Value {
    let (lo, hi) = p.support();
    json!({
        "support": [rational(lo), rational(hi)],
        "mu": measure(&p.mu),
        "nu": measure(&p.nu),
        "y_symmetric": p.y_symmetric,
    })
}

pub fn case(c: &CaseData) -> Value {
    let p = &c.polytope;
    json!({
        "dm_id": c.dm_id,
        "mori_mukai": c.mori_mukai,
        "vertices": c.listed_vertices.iter().map(point).collect::<Vec<_>>(),
        "kappa": point(p.kappa()),
        "dh_exponent": p.dh_exponent(),
        "notes": c.notes,
    })
}

pub fn pairing(r: &PairingResult) -> Value {
    let mut v = json!({
        "value": r.value,
        "method": r.method.to_string(),
        "error_bound": r.error_bound,
    });
    if let Some(e) = &r.exact {
        v["exact"] = rational(e);
    }
    v
}

pub fn verdict(v: &StabilityVerdict) -> Value {
    json!({
        "classification": v.classification.to_string(),
        "futaki": pairing(&v.futaki),
        "margin": pairing(&v.margin),
        "tolerance": v.tolerance,
    })
}

pub fn threshold(t: &ThresholdResult, tol: f64) -> Value {
    json!({
        "a0": t.a0,
        "bracket": [t.bracket.0, t.bracket.1],
        "residual": t.residual,
        "iterations": t.iterations,
        "tolerance": tol,
        "quadrature_cross_check": if t.cross_check.is_finite() { json!(t.cross_check) } else { Value::Null },
    })
}

fn root(r: &RootInterval) -> Value {
    json!({ "lo": rational(&r.lo), "hi": rational(&r.hi), "multiplicity": r.multiplicity })
}

fn proof(p: &PieceProof) -> Value {
    json!({
        "lo": rational(&p.lo),
        "hi": rational(&p.hi),
        "roots": p.roots.iter().map(root).collect::<Vec<_>>(),
        "samples": p.samples.iter().map(|(x, v)| json!([rational(x), rational(v)])).collect::<Vec<_>>(),
    })
}

pub fn certificate(c: &Certificate) -> Value {
    json!({
        "found": true,
        "lambda": rational(&c.lambda),
        "combined_density": piecewise(&c.combined_density),
        "proofs": c.proofs.iter().map(proof).collect::<Vec<_>>(),
    })
}

/// Rebuilds every object with keys inserted in sorted order, so output is
/// canonical whichever map representation serde_json was built with.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, canonical(v));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

pub fn record(command: &str, inputs: Value, results: Value, provenance: Value) -> Value {
    canonical(json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "provenance": provenance,
    }))
}
