//! Run settings: defaults, then the config file, then command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hermite_spectral::verification::{ExperimentConfig, Numerics};
use hermite_spectral::GridSpec;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::{parse_real, Common};

/// Exponents left unset are chosen per subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub d: usize,
    pub cutoff: usize,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub grid_n: Option<usize>,
    pub box_scale: f64,
    pub half_width: Option<f64>,
    pub time_points: Option<usize>,
    pub seed: u64,
    pub ensemble: usize,
    pub trials: usize,
}

impl Default for Settings {
    fn default() -> Self {
        let exp = ExperimentConfig::default();
        Self {
            d: exp.dim,
            cutoff: exp.cutoff,
            p: None,
            q: None,
            s: None,
            t: None,
            grid_n: None,
            box_scale: 1.0,
            half_width: None,
            time_points: None,
            seed: exp.seed,
            ensemble: exp.ensemble,
            trials: exp.wainger_trials,
        }
    }
}

pub const KEYS: [&str; 13] = [
    "d",
    "cutoff",
    "p",
    "q",
    "s",
    "t",
    "grid_n",
    "box_scale",
    "half_width",
    "time_points",
    "seed",
    "ensemble",
    "trials",
];

impl Settings {
    pub fn resolve(common: &Common) -> Result<Self> {
        let mut settings = Self::default();
        if let Some(path) = &common.config {
            settings.apply_file(path)?;
        }
        settings.apply_flags(common);
        settings.validate()?;
        Ok(settings)
    }

    fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        for (key, value) in parse_config(&text)? {
            self.set(&key, &value)
                .with_context(|| format!("config {}: key '{key}'", path.display()))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let real = || parse_real(value).map_err(anyhow::Error::msg);
        let int = || value.parse::<u64>().with_context(|| format!("'{value}' is not a non-negative integer"));
        match key {
            "d" => self.d = int()? as usize,
            "cutoff" => self.cutoff = int()? as usize,
            "p" => self.p = Some(real()?),
            "q" => self.q = Some(real()?),
            "s" => self.s = Some(real()?),
            "t" => self.t = Some(real()?),
            "grid_n" => self.grid_n = Some(int()? as usize),
            "box_scale" => self.box_scale = real()?,
            "half_width" => self.half_width = Some(real()?),
            "time_points" => self.time_points = Some(int()? as usize),
            "seed" => self.seed = int()?,
            "ensemble" => self.ensemble = int()? as usize,
            "trials" => self.trials = int()? as usize,
            other => bail!("unknown key '{other}' (known: {})", KEYS.join(", ")),
        }
        Ok(())
    }

    fn apply_flags(&mut self, c: &Common) {
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = c.$field {
                    self.$field = v;
                }
            )*};
        }
        macro_rules! take_opt {
            ($($field:ident),*) => {$(
                if c.$field.is_some() {
                    self.$field = c.$field;
                }
            )*};
        }
        take!(d, cutoff, box_scale, seed, ensemble, trials);
        take_opt!(p, q, s, t, grid_n, half_width, time_points);
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            bail!("dimension d must be at least 1");
        }
        if !(self.box_scale > 0.0 && self.box_scale.is_finite()) {
            bail!("box_scale must be a positive number");
        }
        if let Some(l) = self.half_width {
            if !(l > 0.0 && l.is_finite()) {
                bail!("half_width must be a positive number");
            }
        }
        if self.grid_n == Some(0) || self.time_points == Some(0) {
            bail!("grid_n and time_points must be positive");
        }
        if self.ensemble == 0 || self.trials == 0 {
            bail!("ensemble and trials must be positive");
        }
        Ok(())
    }

    pub fn numerics(&self) -> Numerics {
        Numerics {
            grid_n: self.grid_n,
            box_scale: self.box_scale,
            half_width: self.half_width,
            time_points: self.time_points,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid_for(self.cutoff, self.d)
    }

    pub fn grid_for(&self, cutoff: usize, d: usize) -> GridSpec {
        self.numerics().grid_for(cutoff, d)
    }

    pub fn experiment(&self) -> ExperimentConfig {
        let base = ExperimentConfig::default();
        ExperimentConfig {
            dim: self.d,
            cutoff: self.cutoff,
            p: self.p.unwrap_or(base.p),
            q: self.q.unwrap_or(base.q),
            s: self.s,
            numerics: self.numerics(),
            ensemble: self.ensemble,
            wainger_trials: self.trials,
            seed: self.seed,
        }
    }

    /// `key=value` lines in fixed key order; unset values are `-`.
    pub fn canonical(&self) -> Vec<(String, String)> {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map_or_else(|| "-".to_string(), |v| v.to_string())
        }
        vec![
            ("d".into(), self.d.to_string()),
            ("cutoff".into(), self.cutoff.to_string()),
            ("p".into(), opt(self.p)),
            ("q".into(), opt(self.q)),
            ("s".into(), opt(self.s)),
            ("t".into(), opt(self.t)),
            ("grid_n".into(), opt(self.grid_n)),
            ("box_scale".into(), self.box_scale.to_string()),
            ("half_width".into(), opt(self.half_width)),
            ("time_points".into(), opt(self.time_points)),
            ("seed".into(), self.seed.to_string()),
            ("ensemble".into(), self.ensemble.to_string()),
            ("trials".into(), self.trials.to_string()),
        ]
    }

    /// SHA-256 over the command, its own arguments and the canonical settings.
    pub fn hash(&self, command: &str, extra: &BTreeMap<String, String>) -> String {
        let mut h = Sha256::new();
        h.update(format!("command={command}\n"));
        for (k, v) in extra {
            h.update(format!("arg.{k}={v}\n"));
        }
        for (k, v) in self.canonical() {
            h.update(format!("{k}={v}\n"));
        }
        format!("{:x}", h.finalize())
    }

    pub fn to_json(&self) -> Value {
        let map: serde_json::Map<String, Value> = self
            .canonical()
            .into_iter()
            .map(|(k, v)| (k, Value::String(v)))
            .collect();
        json!(map)
    }
}

/// Parses `key = value` lines; `#` starts a comment, `-` in keys reads as `_`.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected 'key = value', got '{raw}'", n + 1);
        };
        let key = key.trim().replace('-', "_");
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            bail!("line {}: empty key or value", n + 1);
        }
        if out.iter().any(|(k, _)| *k == key) {
            bail!("line {}: duplicate key '{key}'", n + 1);
        }
        out.push((key, value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_files() {
        let kv = parse_config("# comment\nseed = 7\nbox-scale=1.5 # trailing\n\n p = inf\n").unwrap();
        assert_eq!(
            kv,
            vec![
                ("seed".to_string(), "7".to_string()),
                ("box_scale".to_string(), "1.5".to_string()),
                ("p".to_string(), "inf".to_string())
            ]
        );
        assert!(parse_config("seed 7").is_err());
        assert!(parse_config("seed = 1\nseed = 2").is_err());
    }

    #[test]
    fn precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "seed = 7\ncutoff = 20\nt = pi/4\n").unwrap();
        let common = Common {
            config: Some(path),
            seed: Some(9),
            ..Common::default()
        };
        let s = Settings::resolve(&common).unwrap();
        assert_eq!(s.seed, 9);
        assert_eq!(s.cutoff, 20);
        assert_eq!(s.t, Some(std::f64::consts::FRAC_PI_4));
        assert_eq!(s.d, 1);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut s = Settings::default();
        assert!(s.set("colour", "red").is_err());
        assert!(s.set("seed", "-1").is_err());
    }

    #[test]
    fn hash_tracks_settings() {
        let a = Settings::default();
        let b = Settings { seed: 1, ..Settings::default() };
        let none = BTreeMap::new();
        assert_eq!(a.hash("verify", &none), a.hash("verify", &none));
        assert_ne!(a.hash("verify", &none), b.hash("verify", &none));
        assert_ne!(a.hash("verify", &none), a.hash("kappa", &none));
        assert_eq!(a.hash("verify", &none).len(), 64);
    }
}
