//! Output files: provenance headers, structured documents and delimited tables.

use std::fs;
use std::path::{Path, PathBuf};

use bosewalk::graph::{export_dot, serialize_graph, HermitianWeightedGraph};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Tsv => "tsv",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub command: String,
    pub seed: u64,
    pub version: &'static str,
    /// SHA-256 of the canonical JSON of the resolved parameters.
    pub config_hash: String,
}

impl Provenance {
    pub fn new(argv: &[String], seed: u64, config: &Value) -> Self {
        let canonical = serde_json::to_string(config).expect("json values serialize");
        let digest = Sha256::digest(canonical.as_bytes());
        Self {
            command: argv.iter().map(|a| shell_quote(a)).collect::<Vec<_>>().join(" "),
            seed,
            version: env!("CARGO_PKG_VERSION"),
            config_hash: digest.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }

    fn header_lines(&self, comment: &str) -> String {
        format!(
            "{comment} command: {}\n{comment} seed: {}\n{comment} version: {}\n{comment} config_hash: {}\n",
            self.command, self.seed, self.version, self.config_hash
        )
    }
}

fn shell_quote(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "-_./=:,@+".contains(c)) {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', "'\\''"))
    }
}

pub struct Emitter {
    pub out_dir: PathBuf,
    pub format: Format,
    pub provenance: Provenance,
}

impl Emitter {
    pub fn new(out_dir: PathBuf, format: Format, provenance: Provenance) -> Result<Self, CliError> {
        fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
        Ok(Self { out_dir, format, provenance })
    }

    fn write(&self, file: String, text: String) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(file);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// Graph document (loadable by `dual` and `walk`) plus a Graphviz rendering.
    ///
    /// The graph document has a fixed schema, so its provenance lives in the DOT
    /// header and in the accompanying summary document.
    pub fn graph(&self, name: &str, g: &HermitianWeightedGraph) -> Result<Vec<PathBuf>, CliError> {
        let doc = self.write(format!("{name}.graph.json"), serialize_graph(g))?;
        let dot = self.write(
            format!("{name}.dot"),
            self.provenance.header_lines("//") + &export_dot(g),
        )?;
        Ok(vec![doc, dot])
    }

    /// A structured document in the selected format.
    pub fn document(&self, name: &str, body: &Value) -> Result<PathBuf, CliError> {
        let text = match self.format {
            Format::Json => {
                let doc = json!({ "provenance": self.provenance, "result": body });
                serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n"
            }
            Format::Tsv => {
                let mut out = self.provenance.header_lines("#");
                out.push_str("key\tvalue\n");
                let mut rows = Vec::new();
                flatten("", body, &mut rows);
                for (k, v) in rows {
                    out.push_str(&format!("{k}\t{v}\n"));
                }
                out
            }
        };
        self.write(format!("{name}.{}", self.format.extension()), text)
    }

    /// Tab-delimited numeric table, always text regardless of `--format`.
    pub fn table(&self, name: &str, columns: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<PathBuf, CliError> {
        let mut out = self.provenance.header_lines("#");
        out.push_str(&columns.join("\t"));
        out.push('\n');
        for r in rows {
            out.push_str(&r.join("\t"));
            out.push('\n');
        }
        self.write(format!("{name}.tsv"), out)
    }
}

/// Dotted-key rows; arrays of scalars are joined with commas.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            out.push((prefix.to_string(), xs.iter().map(scalar).collect::<Vec<_>>().join(",")))
        }
        Value::Array(xs) => xs.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

pub fn display(path: &Path) -> String {
    path.display().to_string()
}
