use clap::ValueEnum;
use serde_json::Value;

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

fn cell(v: &Value) -> String {
    let raw = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    };
    if raw.contains(',') || raw.contains('"') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

/// Header row of keys, one row of values. Nested values are flattened with `;`.
pub fn to_csv(report: &Value) -> String {
    match report {
        Value::Object(map) => {
            let keys: Vec<&str> = map.keys().map(String::as_str).collect();
            let values: Vec<String> = map.values().map(cell).collect();
            format!("{}\n{}\n", keys.join(","), values.join(","))
        }
        other => format!("{}\n", cell(other)),
    }
}

pub fn emit(format: Format, report: &Value, text: &str) -> Result<(), Failure> {
    match format {
        Format::Text => println!("{text}"),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(report).map_err(|e| Failure::Runtime(e.to_string()))?
        ),
        Format::Csv => print!("{}", to_csv(report)),
    }
    Ok(())
}
