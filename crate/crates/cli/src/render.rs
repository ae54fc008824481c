//! Plain-text rendering of JSON reports.

use std::fmt::Write;

use serde_json::Value;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => Some(format!("[{}]", a.iter().map(|x| scalar(x).unwrap_or_default()).collect::<Vec<_>>().join(", "))),
        _ => None,
    }
}

fn grid(rows: &[Vec<String>], header: Option<&[String]>, indent: usize, out: &mut String) {
    let ncols = rows.iter().map(Vec::len).chain(header.map(|h| h.len())).max().unwrap_or(0);
    let mut width = vec![0; ncols];
    for r in rows.iter().chain(header.map(|h| h.to_vec()).as_ref()) {
        for (i, c) in r.iter().enumerate() {
            width[i] = width[i].max(c.chars().count());
        }
    }
    let line = |r: &[String], out: &mut String| {
        let cells: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, c)| if c.parse::<f64>().is_ok() || c.contains('/') && c.chars().all(|x| x.is_ascii_digit() || x == '/' || x == '-') { format!("{c:>w$}", w = width[i]) } else { format!("{c:<w$}", w = width[i]) })
            .collect();
        let _ = writeln!(out, "{:indent$}{}", "", cells.join("  ").trim_end());
    };
    if let Some(h) = header {
        line(h, out);
    }
    for r in rows {
        line(r, out);
    }
}

/// Optional header and rows of cells.
type Table = (Option<Vec<String>>, Vec<Vec<String>>);

/// Arrays of scalar arrays become aligned grids; arrays of flat objects become tables.
fn table_of(a: &[Value]) -> Option<Table> {
    if a.is_empty() {
        return None;
    }
    if a.iter().all(|r| r.as_array().is_some_and(|x| x.iter().all(|c| scalar(c).is_some() && !c.is_array()))) {
        let rows = a.iter().map(|r| r.as_array().unwrap().iter().map(|c| scalar(c).unwrap()).collect()).collect();
        return Some((None, rows));
    }
    let first = a[0].as_object()?;
    let keys: Vec<String> = first.keys().cloned().collect();
    let flat = a.iter().all(|r| r.as_object().is_some_and(|o| o.keys().eq(keys.iter()) && o.values().all(|v| scalar(v).is_some())));
    if !flat {
        return None;
    }
    let rows = a.iter().map(|r| r.as_object().unwrap().values().map(|v| scalar(v).unwrap()).collect()).collect();
    Some((Some(keys), rows))
}

fn walk(key: &str, v: &Value, indent: usize, out: &mut String) {
    if let Some(s) = scalar(v) {
        let _ = writeln!(out, "{:indent$}{key}: {s}", "");
        return;
    }
    match v {
        Value::Array(a) => {
            let _ = writeln!(out, "{:indent$}{key}:", "");
            match table_of(a) {
                Some((header, rows)) => grid(&rows, header.as_deref(), indent + 2, out),
                None => {
                    for (i, x) in a.iter().enumerate() {
                        walk(&format!("[{}]", i + 1), x, indent + 2, out);
                    }
                }
            }
        }
        Value::Object(o) => {
            if !key.is_empty() {
                let _ = writeln!(out, "{:indent$}{key}:", "");
            }
            let inner = if key.is_empty() { indent } else { indent + 2 };
            for (k, x) in o {
                walk(k, x, inner, out);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

pub fn render(v: &Value) -> String {
    let mut out = String::new();
    walk("", v, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn matrices_are_aligned() {
        let s = render(&json!({ "cartan": [[7, 3], [3, 15]] }));
        assert_eq!(s, "cartan:\n  7   3\n  3  15\n");
    }

    #[test]
    fn flat_objects_become_tables() {
        let s = render(&json!({ "orbits": [{ "j": 1, "length": 1 }, { "j": 2, "length": 30 }] }));
        assert_eq!(s, "orbits:\n  j  length\n  1       1\n  2      30\n");
    }
}
