use serde_json::Value;

use crate::analysis::SweepRow;

/// Shortest round-trip decimal, switching to scientific notation for
/// nonzero magnitudes below `1e-3`.
pub fn format_number(v: f64) -> String {
    if v != 0.0 && v.is_finite() && v.abs() < 1e-3 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn format_json_scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (None, Some(i)) => i.to_string(),
            _ => format_number(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => unreachable!("flattened before formatting"),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, child) in m {
                flatten(&key(k), child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), child, out);
            }
        }
        scalar => out.push((prefix.to_string(), format_json_scalar(scalar))),
    }
}

/// Two-column `key,value` rendering of a JSON document, keys as dotted paths.
pub fn json_to_csv(doc: &Value) -> String {
    let mut pairs = Vec::new();
    flatten("", doc, &mut pairs);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("in-memory write");
    for (k, v) in pairs {
        w.write_record([k, v]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Figure-data table; inadmissible rows leave the derived columns empty and
/// give the violated constraint in `reason`.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "alpha",
        "d",
        "theta",
        "N",
        "p1",
        "gap",
        "qubits_per_bit",
        "gc_qubits_per_bit",
        "admissible",
        "d_requested",
        "reason",
    ])
    .expect("in-memory write");
    for r in rows {
        w.write_record([
            format_number(r.alpha),
            r.d.to_string(),
            format_number(r.theta),
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            opt(r.p1),
            opt(r.gap),
            opt(r.qubits_per_bit),
            opt(r.gc_qubits_per_bit),
            r.admissible.to_string(),
            format_number(r.d_requested),
            r.reason.clone().unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn numbers() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1e-9), "1e-9");
        assert_eq!(format_number(0.000123), "1.23e-4");
        assert_eq!(format_number(0.001), "0.001");
        assert_eq!(format_number(0.75), "0.75");
        assert_eq!(format_number(-2e-5), "-2e-5");
    }

    #[test]
    fn flattened_document() {
        let doc = json!({"a": 1, "b": {"c": 0.5, "d": [true, null]}, "e": "x,y"});
        assert_eq!(
            json_to_csv(&doc),
            "key,value\na,1\nb.c,0.5\nb.d.0,true\nb.d.1,\ne,\"x,y\"\n"
        );
    }
}
