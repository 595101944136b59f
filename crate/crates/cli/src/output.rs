use serde_json::{Map, Value};
use std::collections::BTreeSet;
use std::io::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flattens nested objects into dotted keys; arrays become JSON text.
fn flatten(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        _ => {
            out.insert(prefix.to_string(), v.clone());
        }
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Array(_)) => v.map(|x| x.to_string()).unwrap_or_default(),
        Some(x) => x.to_string(),
    }
}

/// One CSV row per record, each carrying the configuration columns.
pub fn write_csv(config: &Value, records: &[Value], w: impl Write) -> csv::Result<()> {
    let mut rows = Vec::new();
    for r in records {
        let mut flat = Map::new();
        flatten("config", config, &mut flat);
        flatten("", r, &mut flat);
        rows.push(flat);
    }
    let columns: BTreeSet<&String> = rows.iter().flat_map(|r| r.keys()).collect();
    let mut out = csv::Writer::from_writer(w);
    out.write_record(columns.iter().map(|c| c.as_str()))?;
    for r in &rows {
        out.write_record(columns.iter().map(|c| cell(r.get(*c))))?;
    }
    out.flush()?;
    Ok(())
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn write_json(v: &Value, mut w: impl Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)
}
