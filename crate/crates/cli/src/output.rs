use crate::construct::Provenance;
use serde_json::{json, Value};

/// Pretty JSON document with provenance, quantity and result.
pub fn envelope(prov: &Provenance, quantity: &str, result: Value) -> String {
    let mut s = serde_json::to_string_pretty(&json!({
        "provenance": prov,
        "quantity": quantity,
        "result": result,
    }))
    .expect("serializable");
    s.push('\n');
    s
}

/// Flat `key,value` CSV for a JSON object of scalars.
pub fn csv_rows(result: &Value) -> String {
    let mut out = String::from("key,value\n");
    if let Some(obj) = result.as_object() {
        for (k, v) in obj {
            let v = match v {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k},{v}\n"));
        }
    }
    out
}
