//! Result-table serialization: CSV and JSON, byte-stable for identical
//! inputs.
//!
//! CSV carries a header row and one data row per grid point, numbers as
//! decimal text with 12 significant digits. A `status` column is appended
//! only when at least one row is infeasible, so feasible tables keep the
//! documented bare column layout. JSON mirrors the columns plus the sweep
//! metadata; wall time is deliberately excluded there (it lives in the run
//! manifest) to keep result files reproducible byte for byte.

use hybridlink::SweepResult;
use serde_json::{json, Map, Value};

/// Formats one numeric cell: 12 significant digits, `nan` for flagged rows.
fn cell(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.11e}")
    }
}

/// RFC-4180-style field quoting: only when the field needs it.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders the result as CSV text.
pub fn to_csv(result: &SweepResult) -> String {
    let with_status = result.any_infeasible();
    let mut out = String::new();

    let mut header: Vec<String> = result
        .columns
        .iter()
        .map(|c| csv_field(&c.name))
        .collect();
    if with_status {
        header.push("status".to_string());
    }
    out.push_str(&header.join(","));
    out.push('\n');

    for row in 0..result.rows() {
        let mut fields: Vec<String> = result
            .columns
            .iter()
            .map(|c| cell(c.values[row]))
            .collect();
        if with_status {
            fields.push(result.status[row].as_str().to_string());
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Renders the result as a JSON document with `columns` and `metadata`
/// members. NaN cells of flagged rows become `null`.
pub fn to_json(result: &SweepResult) -> String {
    let mut columns = Map::new();
    for col in &result.columns {
        let values: Vec<Value> = col
            .values
            .iter()
            .map(|v| {
                if v.is_nan() {
                    Value::Null
                } else {
                    json!(v)
                }
            })
            .collect();
        columns.insert(col.name.clone(), Value::Array(values));
    }
    if result.any_infeasible() {
        let status: Vec<Value> = result
            .status
            .iter()
            .map(|s| Value::String(s.as_str().to_string()))
            .collect();
        columns.insert("status".to_string(), Value::Array(status));
    }

    let mut inputs = Map::new();
    for (k, v) in &result.metadata.inputs {
        inputs.insert(k.clone(), Value::String(v.clone()));
    }
    let metadata = json!({
        "figure": result.metadata.figure,
        "tool_version": result.metadata.tool_version,
        "quad_rel_tol": result.metadata.quad_rel_tol,
        "quad_abs_tol": result.metadata.quad_abs_tol,
        "root_x_tol": result.metadata.root_x_tol,
        "inputs": Value::Object(inputs),
    });

    let doc = json!({
        "columns": Value::Object(columns),
        "metadata": metadata,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("result tables are serializable");
    text.push('\n');
    text
}
