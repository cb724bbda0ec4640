//! JSON form of a verification report and its schema validator.
//!
//! Schema: `{meta: {rho, grid_n, tolerances, version}, claims: [{id, anchor,
//! passed, worst_violation, witness, runtime_ms}]}`. Non-finite violations are
//! written as `null`.

use dsbs_core::verify::{ClaimId, VerificationReport};
use serde_json::{json, Map, Value};

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn witness(w: &dsbs_core::verify::Witness) -> Value {
    let coords: Vec<Value> = w
        .coords
        .iter()
        .map(|c| Value::Array(c.iter().map(|&x| number(x)).collect()))
        .collect();
    json!({
        "check": w.check,
        "indices": w.indices,
        "coords": coords,
    })
}

pub fn to_json(report: &VerificationReport) -> Value {
    let tolerances = serde_json::to_value(report.meta.tolerances).expect("plain numbers serialize");
    let claims: Vec<Value> = report
        .claims
        .iter()
        .zip(&report.runtime_ms)
        .map(|(c, &ms)| {
            json!({
                "id": c.id.as_str(),
                "anchor": c.anchor,
                "passed": c.passed,
                "worst_violation": number(c.worst_violation),
                "witness": witness(&c.witness),
                "runtime_ms": number(ms),
            })
        })
        .collect();
    json!({
        "meta": {
            "rho": report.meta.rho,
            "grid_n": report.meta.grid_n,
            "tolerances": tolerances,
            "version": report.meta.version,
        },
        "claims": claims,
    })
}

/// The report with every `runtime_ms` removed, serialized with sorted keys.
/// Equal inputs give byte-identical output.
pub fn canonical_json(report: &Value) -> String {
    let mut v = report.clone();
    if let Some(claims) = v.get_mut("claims").and_then(Value::as_array_mut) {
        for c in claims {
            if let Some(obj) = c.as_object_mut() {
                obj.remove("runtime_ms");
            }
        }
    }
    // serde_json's default map is ordered by key
    serde_json::to_string(&v).expect("values serialize")
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value, String> {
    obj.get(key).ok_or_else(|| format!("{at}: missing field {key:?}"))
}

fn object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>, String> {
    v.as_object().ok_or_else(|| format!("{at}: expected an object"))
}

fn finite_number(v: &Value, at: &str) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("{at}: expected a number"))
}

fn exact_keys(obj: &Map<String, Value>, keys: &[&str], at: &str) -> Result<(), String> {
    for k in obj.keys() {
        if !keys.contains(&k.as_str()) {
            return Err(format!("{at}: unexpected field {k:?}"));
        }
    }
    for k in keys {
        field(obj, k, at)?;
    }
    Ok(())
}

/// Checks a parsed report against the schema, including one record per
/// registered claim id in registry order.
pub fn validate(report: &Value) -> Result<(), String> {
    let top = object(report, "report")?;
    exact_keys(top, &["meta", "claims"], "report")?;
    let meta = object(&top["meta"], "meta")?;
    exact_keys(meta, &["rho", "grid_n", "tolerances", "version"], "meta")?;
    let rho = finite_number(&meta["rho"], "meta.rho")?;
    if !(rho > 0.0 && rho < 1.0) {
        return Err(format!("meta.rho: {rho} is not in (0, 1)"));
    }
    meta["grid_n"]
        .as_u64()
        .ok_or("meta.grid_n: expected a nonnegative integer")?;
    for (k, v) in object(&meta["tolerances"], "meta.tolerances")? {
        finite_number(v, &format!("meta.tolerances.{k}"))?;
    }
    meta["version"].as_str().ok_or("meta.version: expected a string")?;
    let claims = top["claims"].as_array().ok_or("claims: expected an array")?;
    if claims.len() != ClaimId::ALL.len() {
        return Err(format!(
            "claims: expected {} records, found {}",
            ClaimId::ALL.len(),
            claims.len()
        ));
    }
    for (k, (c, id)) in claims.iter().zip(ClaimId::ALL).enumerate() {
        let at = format!("claims[{k}]");
        let obj = object(c, &at)?;
        exact_keys(
            obj,
            &["id", "anchor", "passed", "worst_violation", "witness", "runtime_ms"],
            &at,
        )?;
        if obj["id"].as_str() != Some(id.as_str()) {
            return Err(format!("{at}.id: expected {:?}", id.as_str()));
        }
        obj["anchor"].as_str().ok_or(format!("{at}.anchor: expected a string"))?;
        let passed = obj["passed"].as_bool().ok_or(format!("{at}.passed: expected a boolean"))?;
        match &obj["worst_violation"] {
            Value::Null if !passed => {}
            v => {
                finite_number(v, &format!("{at}.worst_violation"))?;
            }
        }
        let w = object(&obj["witness"], &format!("{at}.witness"))?;
        exact_keys(w, &["check", "indices", "coords"], &format!("{at}.witness"))?;
        finite_number(&obj["runtime_ms"], &format!("{at}.runtime_ms"))?;
    }
    Ok(())
}
