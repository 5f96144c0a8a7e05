//! Operator spec files: JSON in, validated `EllipticOperator64` out.

use fnel_core::matcore::{OperatorKind, SymMatrix};
use fnel_core::{EllipticOperator64, Error as CoreError};
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// A spec problem, located by the JSON field that caused it.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("operator spec field `{field}`: {message}")]
pub struct SpecError {
    pub field: String,
    pub message: String,
}

impl SpecError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

const KNOWN_FIELDS: [&str; 6] = ["n", "kind", "lambda", "Lambda", "rot_invariant", "families"];

/// Canonical serializable form of an operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorSpec {
    pub n: usize,
    pub kind: &'static str,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rot_invariant: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<Vec<Vec<Vec<f64>>>>>,
}

impl OperatorSpec {
    pub fn from_operator(op: &EllipticOperator64) -> Self {
        let isaacs = op.kind() == OperatorKind::Isaacs;
        Self {
            n: op.dim(),
            kind: op.kind().name(),
            lambda: op.lambda(),
            big_lambda: op.big_lambda(),
            rot_invariant: isaacs.then(|| op.rot_invariant() || op.rot_claim_downgraded()),
            families: isaacs.then(|| op.families().iter().map(|f| f.iter().map(|a| a.to_rows()).collect()).collect()),
        }
    }

    /// Compact JSON used for the digest.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    /// Hex SHA-256 of [`OperatorSpec::canonical_json`].
    pub fn digest(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn number(obj: &Map<String, Value>, field: &str) -> Result<Option<f64>, SpecError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .map(Some)
            .ok_or_else(|| SpecError::new(field, format!("expected a finite number, found {v}"))),
    }
}

fn matrix(v: &Value, field: &str, n: usize) -> Result<SymMatrix<f64>, SpecError> {
    let rows = v.as_array().ok_or_else(|| SpecError::new(field, "expected an array of rows"))?;
    if rows.len() != n {
        return Err(SpecError::new(field, format!("expected {n} rows, found {}", rows.len())));
    }
    let mut out = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| SpecError::new(format!("{field}[{i}]"), "expected an array"))?;
        if row.len() != n {
            return Err(SpecError::new(format!("{field}[{i}]"), format!("expected {n} entries, found {}", row.len())));
        }
        out.push(
            row.iter()
                .enumerate()
                .map(|(j, x)| {
                    x.as_f64().filter(|x| x.is_finite()).ok_or_else(|| {
                        SpecError::new(format!("{field}[{i}][{j}]"), format!("expected a finite number, found {x}"))
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?,
        );
    }
    SymMatrix::from_rows(&out).map_err(|e| SpecError::new(field, e.to_string()))
}

fn core_error(e: CoreError) -> SpecError {
    match e {
        CoreError::InvalidOperator { field, message } => SpecError::new(field, message),
        CoreError::ControlOutOfBounds { sup_index, inf_index, .. } => {
            SpecError::new(format!("families[{sup_index}][{inf_index}]"), e.to_string())
        }
        CoreError::ParameterDomain(m) => SpecError::new("n", m),
        other => SpecError::new("kind", other.to_string()),
    }
}

/// Parses and validates an operator spec document.
///
/// The Laplacian ignores `lambda` and `Lambda` and always uses `λ = Λ = 1`.
pub fn parse_operator_spec(text: &str) -> Result<EllipticOperator64, SpecError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| SpecError::new("$", format!("malformed JSON: {e}")))?;
    let obj = doc.as_object().ok_or_else(|| SpecError::new("$", "expected a JSON object"))?;
    if let Some(k) = obj.keys().find(|k| !KNOWN_FIELDS.contains(&k.as_str())) {
        return Err(SpecError::new(k.clone(), "unknown field"));
    }
    let n = match obj.get("n") {
        None => return Err(SpecError::new("n", "missing")),
        Some(v) => v
            .as_u64()
            .filter(|&n| n >= 1)
            .ok_or_else(|| SpecError::new("n", format!("expected a positive integer, found {v}")))? as usize,
    };
    let kind = match obj.get("kind") {
        None => return Err(SpecError::new("kind", "missing")),
        Some(v) => v.as_str().ok_or_else(|| SpecError::new("kind", format!("expected a string, found {v}")))?,
    };
    let lambda = number(obj, "lambda")?;
    let big_lambda = number(obj, "Lambda")?;
    let constants = || -> Result<(f64, f64), SpecError> {
        let l = lambda.ok_or_else(|| SpecError::new("lambda", "missing"))?;
        let b = big_lambda.ok_or_else(|| SpecError::new("Lambda", "missing"))?;
        if !(l > 0.0) {
            return Err(SpecError::new("lambda", format!("must be positive, found {l}")));
        }
        if l > b {
            return Err(SpecError::new("Lambda", format!("must be at least lambda = {l}, found {b}")));
        }
        Ok((l, b))
    };
    let isaacs_only = |field: &str| -> Result<(), SpecError> {
        if obj.contains_key(field) {
            return Err(SpecError::new(field, format!("only allowed for kind \"isaacs\", not \"{kind}\"")));
        }
        Ok(())
    };
    if kind != "isaacs" {
        isaacs_only("families")?;
        isaacs_only("rot_invariant")?;
    }
    match kind {
        "laplacian" => EllipticOperator64::laplacian(n).map_err(core_error),
        "pucci_max" => {
            let (l, b) = constants()?;
            EllipticOperator64::pucci_max(n, l, b).map_err(core_error)
        }
        "pucci_min" => {
            let (l, b) = constants()?;
            EllipticOperator64::pucci_min(n, l, b).map_err(core_error)
        }
        "isaacs" => {
            let (l, b) = constants()?;
            let rot = match obj.get("rot_invariant") {
                None => false,
                Some(v) => v.as_bool().ok_or_else(|| SpecError::new("rot_invariant", format!("expected a boolean, found {v}")))?,
            };
            let fams = obj
                .get("families")
                .ok_or_else(|| SpecError::new("families", "missing"))?
                .as_array()
                .ok_or_else(|| SpecError::new("families", "expected an array of families"))?;
            let mut families = Vec::with_capacity(fams.len());
            for (i, fam) in fams.iter().enumerate() {
                let fam = fam.as_array().ok_or_else(|| SpecError::new(format!("families[{i}]"), "expected an array"))?;
                families.push(
                    fam.iter()
                        .enumerate()
                        .map(|(j, m)| matrix(m, &format!("families[{i}][{j}]"), n))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
            EllipticOperator64::isaacs(n, l, b, families, rot).map_err(core_error)
        }
        other => Err(SpecError::new(
            "kind",
            format!("unknown kind \"{other}\" (expected laplacian, pucci_max, pucci_min or isaacs)"),
        )),
    }
}

/// Spec document for an operator; re-parses to an equal operator.
pub fn operator_to_spec(op: &EllipticOperator64) -> String {
    serde_json::to_string_pretty(&OperatorSpec::from_operator(op)).expect("spec serializes")
}
