use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

pub const CSV_SCHEMA: &str = "cayley-csv-v1";

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Flattens `v` into `(path, value)` leaves. Object keys join with `.`,
/// array positions with `[i]`; scalars print as JSON, strings unquoted.
fn flatten(v: &Value, path: &mut String, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let len = path.len();
                if !path.is_empty() {
                    path.push('.');
                }
                path.push_str(k);
                flatten(child, path, out);
                path.truncate(len);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, child) in items.iter().enumerate() {
                let len = path.len();
                path.push_str(&format!("[{i}]"));
                flatten(child, path, out);
                path.truncate(len);
            }
        }
        Value::String(s) => out.push((path.clone(), s.clone())),
        other => out.push((path.clone(), other.to_string())),
    }
}

fn write_csv<W: Write>(v: &Value, w: W) -> io::Result<()> {
    let mut leaves = Vec::new();
    flatten(v, &mut String::new(), &mut leaves);
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["schema", "path", "value"])?;
    for (path, value) in leaves {
        csv.write_record([CSV_SCHEMA, &path, &value])?;
    }
    csv.flush()
}

fn write_to<W: Write>(v: &Value, format: Format, mut w: W) -> io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, v)?;
            writeln!(w)
        }
        Format::Csv => write_csv(v, w),
    }
}

pub fn write(v: &Value, format: Format, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => write_to(v, format, io::BufWriter::new(File::create(path)?)),
        None => write_to(v, format, io::stdout().lock()),
    }
}
