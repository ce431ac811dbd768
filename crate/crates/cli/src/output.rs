//! Result writers. Every file carries a metadata block with the version,
//! config hash, seed and grid, enough to rerun the command exactly.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use hermite_spectral::GridSpec;
use serde_json::{json, Value};

use crate::config::Settings;

pub struct Metadata {
    pub command: String,
    pub args: BTreeMap<String, String>,
    pub settings: Settings,
    pub grid: Option<GridSpec>,
}

impl Metadata {
    pub fn new(command: &str, settings: &Settings) -> Self {
        Self {
            command: command.to_string(),
            args: BTreeMap::new(),
            settings: settings.clone(),
            grid: None,
        }
    }

    pub fn arg(mut self, key: &str, value: impl ToString) -> Self {
        self.args.insert(key.to_string(), value.to_string());
        self
    }

    pub fn grid(mut self, grid: GridSpec) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn to_json(&self) -> Value {
        let grid = self.grid.map(|g| {
            json!({
                "dim": g.dim,
                "half_width": g.half_width,
                "points_per_dim": g.points_per_dim,
                "time_points": g.time_points,
            })
        });
        json!({
            "tool": "hermite",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "args": self.args,
            "settings": self.settings.to_json(),
            "config_hash": self.settings.hash(&self.command, &self.args),
            "seed": self.settings.seed,
            "grid": grid,
        })
    }

    /// `key: value` lines for comment headers.
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("tool: hermite {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", self.command),
            format!("config_hash: {}", self.settings.hash(&self.command, &self.args)),
            format!("seed: {}", self.settings.seed),
        ];
        for (k, v) in &self.args {
            out.push(format!("arg.{k}: {v}"));
        }
        for (k, v) in self.settings.canonical() {
            out.push(format!("setting.{k}: {v}"));
        }
        if let Some(g) = self.grid {
            out.push(format!(
                "grid: dim={} half_width={} points_per_dim={} time_points={}",
                g.dim, g.half_width, g.points_per_dim, g.time_points
            ));
        }
        out
    }
}

/// JSON number, or "inf"/"-inf" for infinities.
pub fn real(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        Value::Null
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn fmt_real(v: f64) -> String {
    match real(v) {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

/// Adds `metadata` to a JSON object result.
pub fn with_metadata(mut body: Value, meta: &Metadata) -> Value {
    if let Value::Object(map) = &mut body {
        map.insert("metadata".into(), meta.to_json());
        body
    } else {
        json!({ "metadata": meta.to_json(), "result": body })
    }
}

pub fn json_text(body: Value, meta: &Metadata) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&with_metadata(body, meta))?;
    text.push('\n');
    Ok(text)
}

/// CSV text preceded by `# key: value` metadata lines and optional notes.
pub fn csv_text(header: &[&str], rows: &[Vec<String>], meta: &Metadata, notes: &[String]) -> Result<String> {
    let mut text = String::new();
    for line in meta.lines().iter().chain(notes) {
        text.push_str("# ");
        text.push_str(line);
        text.push('\n');
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    text.push_str(&String::from_utf8(w.into_inner().context("flushing CSV")?)?);
    Ok(text)
}

/// Writes to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
