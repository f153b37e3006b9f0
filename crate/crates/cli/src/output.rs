use serde_json::{json, Value};

/// Result of a command in both renderings, plus an optional contract
/// violation that turns the exit code to 1 after printing.
pub struct Output {
    pub result: Value,
    pub text: String,
    pub violation: Option<String>,
}

impl Output {
    pub fn new(result: Value, text: String) -> Self {
        Self {
            result,
            text,
            violation: None,
        }
    }
}

pub fn render(command: &str, config: &Value, out: &Output, as_json: bool) -> String {
    if as_json {
        let doc = json!({ "command": command, "config": config, "result": out.result });
        let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
        s.push('\n');
        return s;
    }
    let mut s = format!("# gaugenet {command}\n");
    if let Value::Object(map) = config {
        for (k, v) in map {
            s.push_str(&format!("# {k} = {}\n", scalar(v)));
        }
    }
    s.push_str(&out.text);
    s
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Columns padded to their widest cell.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(headers.to_vec());
    let rules: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    s.push_str(&line(rules.iter().map(String::as_str).collect()));
    for r in rows {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    s
}

pub fn csv(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = headers.join(",") + "\n";
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

/// `key  value` pairs.
pub fn pairs(items: &[(&str, String)]) -> String {
    let w = items.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    items.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
}

pub fn fixed(x: f64) -> String {
    format!("{x:.10}")
}

pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}
