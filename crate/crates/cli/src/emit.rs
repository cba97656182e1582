//! Report rendering. JSON is the report itself; CSV flattens it to one row
//! per element of its first list field, with scalar fields repeated.

use serde_json::{Map, Value};

use telic_core::exact::{Quad, Surd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(value),
    }
}

type Row = Vec<(String, String)>;

fn flatten(key: &str, value: &Value, out: &mut Row) {
    match value {
        Value::Object(m) => {
            for (k, v) in m {
                let sub = if key.is_empty() { k.clone() } else { format!("{key}.{k}") };
                flatten(&sub, v, out);
            }
        }
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            let cells: Vec<String> = items.iter().map(scalar).collect();
            out.push((key.to_string(), cells.join(";")));
        }
        Value::Array(_) => out.push((key.to_string(), value.to_string())),
        v => out.push((if key.is_empty() { "value".into() } else { key.to_string() }, scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        v => v.to_string(),
    }
}

fn rows(value: &Value) -> Vec<Row> {
    let (list_key, items, rest) = match value {
        Value::Array(items) => (String::new(), items.clone(), Map::new()),
        Value::Object(m) => match m.iter().find(|(_, v)| matches!(v, Value::Array(a) if !a.is_empty())) {
            Some((k, Value::Array(items))) => {
                let mut rest = m.clone();
                rest.remove(k);
                (k.clone(), items.clone(), rest)
            }
            _ => (String::new(), vec![value.clone()], Map::new()),
        },
        v => (String::new(), vec![v.clone()], Map::new()),
    };
    let mut prefix = Row::new();
    flatten("", &Value::Object(rest), &mut prefix);
    items
        .iter()
        .map(|item| {
            let mut row = prefix.clone();
            let key = if item.is_object() { "" } else { list_key.as_str() };
            flatten(key, item, &mut row);
            row
        })
        .collect()
}

fn approx(cell: &str) -> Option<f64> {
    if !(cell.contains('/') || cell.contains("sqrt2")) {
        return None;
    }
    if let Ok(x) = cell.parse::<Quad>() {
        return Some(x.to_f64());
    }
    cell.parse::<Surd>().ok().map(|x| x.to_f64())
}

/// Exact cells stay in the number grammar; a column holding fractions or
/// surds gets a neighbouring `~approx` column for plotting.
fn to_csv(value: &Value) -> String {
    let rows = rows(value);
    let mut columns: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
    }
    let cell = |row: &Row, col: &str| row.iter().find(|(k, _)| k == col).map(|(_, v)| v.clone()).unwrap_or_default();
    let needs_approx: Vec<bool> = columns
        .iter()
        .map(|c| rows.iter().any(|r| approx(&cell(r, c)).is_some()))
        .collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = Vec::new();
    for (c, &a) in columns.iter().zip(&needs_approx) {
        header.push(c.clone());
        if a {
            header.push(format!("{c}~approx"));
        }
    }
    w.write_record(&header).expect("in-memory write");
    for row in &rows {
        let mut record = Vec::new();
        for (c, &a) in columns.iter().zip(&needs_approx) {
            let v = cell(row, c);
            if a {
                let f = approx(&v).map(|f| f.to_string()).unwrap_or_default();
                record.push(v);
                record.push(f);
            } else {
                record.push(v);
            }
        }
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
