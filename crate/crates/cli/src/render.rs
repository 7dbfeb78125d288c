//! Plain-text rendering of a JSON report.
//!
//! Every number is printed with the same digits as in the JSON output.

use serde_json::Value;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(x) => Some(x.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Object(map) if map.len() == 2 => match (map.get("re"), map.get("im")) {
            (Some(Value::Number(re)), Some(Value::Number(im))) => Some(format!("({re}, {im})")),
            _ => None,
        },
        _ => None,
    }
}

fn walk(v: &Value, path: &str, out: &mut String) {
    if let Some(s) = scalar(v) {
        out.push_str(&format!("{path}: {s}\n"));
        return;
    }
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let p = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                walk(child, &p, out);
            }
        }
        Value::Array(items) => {
            let flat: Option<Vec<String>> = items.iter().map(scalar).collect();
            match flat {
                Some(parts) => out.push_str(&format!("{path}: [{}]\n", parts.join(", "))),
                None => {
                    for (i, child) in items.iter().enumerate() {
                        walk(child, &format!("{path}[{i}]"), out);
                    }
                }
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

pub fn text(v: &Value) -> String {
    let mut out = String::new();
    walk(v, "", &mut out);
    out
}
