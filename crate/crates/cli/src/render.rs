//! Output formatting for single-record results.

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Plain,
}

pub fn render(record: &Map<String, Value>, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(record).expect("map serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let header: Vec<&str> = record.keys().map(String::as_str).collect();
            let row: Vec<String> = record.values().map(|v| scalar(v, true)).collect();
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
        OutputFormat::Plain => record
            .iter()
            .map(|(k, v)| format!("{k}: {}\n", scalar(v, false)))
            .collect(),
    }
}

fn scalar(v: &Value, full_precision: bool) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_f64(), n.is_f64()) {
            (Some(x), true) if !full_precision => sig6(x),
            _ => n.to_string(),
        },
        Value::String(s) if full_precision && s.contains([',', '"', '\n']) => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let sep = if full_precision { ";" } else { "," };
            items
                .iter()
                .map(|i| scalar(i, full_precision))
                .collect::<Vec<_>>()
                .join(sep)
        }
        Value::Object(_) => v.to_string(),
    }
}

/// Six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let a = x.abs();
    if !(1e-4..1e6).contains(&a) {
        return format!("{x:.5e}");
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("valid float");
    rounded.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Map<String, Value> {
        match json!({"n": 2, "p": 0.7272727272727273, "party": [0, 2], "ok": true}) {
            Value::Object(m) => m,
            _ => unreachable!(),
        }
    }

    #[test]
    fn sig6_rounds() {
        assert_eq!(sig6(0.7272727272727273), "0.727273");
        assert_eq!(sig6(0.2), "0.2");
        assert_eq!(sig6(1.5e-12), "1.50000e-12");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn formats() {
        let m = sample();
        assert_eq!(
            render(&m, OutputFormat::Csv),
            "n,p,party,ok\n2,0.7272727272727273,0;2,true\n"
        );
        assert_eq!(
            render(&m, OutputFormat::Plain),
            "n: 2\np: 0.727273\nparty: 0,2\nok: true\n"
        );
        let back: Value = serde_json::from_str(&render(&m, OutputFormat::Json)).unwrap();
        assert_eq!(back, Value::Object(m));
    }
}
