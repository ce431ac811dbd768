//! The full battery of checks behind `run_suite`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiments::{
    eigenfunction_grid, lemma1_identity_check, projection_norm_1d, random_band_limited, sharpness_probe,
    strichartz_ratio, wainger_probe, Numerics,
};
use super::fit::{fit_exponent, geometric_k_values};
use super::kappa::{kappa_p, kappa_pq};
use super::rodrigues::rodrigues_value;
use crate::error::{Error, Result};
use crate::hermite::{gauss_hermite_rule, hermite_eval_1d, GridSpec};
use crate::propagator::{evolve_eigen, evolve_kernel, kernel_grid, mehler_kernel, BOUNDARY_DECAY};
use crate::spaces::{sobolev_norm, time_norm, triebel_norm};
use crate::spectral::{mehler_closed_form, mehler_series, synthesize, SampledField};
use crate::{propagator::evolve_space_time, sum};

/// Names of every check, in execution order.
pub const CHECK_NAMES: [&str; 13] = [
    "rodrigues",
    "orthonormality",
    "mehler",
    "kernel_magnitude",
    "propagator_cross",
    "unitarity_periodicity",
    "lemma1",
    "kappa_fit",
    "sharpness",
    "strichartz_bounded",
    "function_spaces",
    "wainger",
    "boundary_decay",
];

/// Suite parameters. Most checks run at fixed sizes; `dim`, `cutoff` and
/// `numerics` drive the boundary-decay check, `seed` every random draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub cutoff: usize,
    #[serde(with = "extended_real")]
    pub p: f64,
    #[serde(with = "extended_real")]
    pub q: f64,
    pub s: Option<f64>,
    pub numerics: Numerics,
    pub ensemble: usize,
    pub wainger_trials: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            cutoff: 16,
            p: f64::INFINITY,
            q: 4.0,
            s: None,
            numerics: Numerics::default(),
            ensemble: 100,
            wainger_trials: 200,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > crate::spectral::DEFAULT_MAX_DIM {
            return Err(Error::DimensionLimit(self.dim));
        }
        if !(self.p >= 1.0) || !(self.q >= 1.0) {
            return Err(Error::InvalidParameter(format!("exponents p = {}, q = {} out of range", self.p, self.q)));
        }
        if self.ensemble == 0 || self.wainger_trials == 0 {
            return Err(Error::InvalidParameter("ensemble sizes must be positive".into()));
        }
        if !(self.numerics.box_scale > 0.0) {
            return Err(Error::InvalidParameter("box scale must be positive".into()));
        }
        if let Some(l) = self.numerics.half_width {
            if !(l > 0.0) {
                return Err(Error::InvalidParameter("box half-width must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Serializes ±∞ as the strings "inf" / "-inf" so JSON stays valid.
mod extended_real {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

/// How `measured` is compared with `reference` and `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// |measured − reference| ≤ tolerance
    Within,
    /// measured < tolerance
    Below,
    /// measured ≤ reference + tolerance
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub inputs: String,
    pub measured: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl CaseRecord {
    fn new(inputs: impl Into<String>, measured: f64, reference: f64, tolerance: f64, relation: Relation) -> Self {
        let passed = match relation {
            Relation::Within => (measured - reference).abs() <= tolerance,
            Relation::Below => measured < tolerance,
            Relation::AtMost => measured <= reference + tolerance,
        };
        Self {
            inputs: inputs.into(),
            measured,
            reference,
            tolerance,
            relation,
            passed,
        }
    }

    fn within(inputs: impl Into<String>, measured: f64, reference: f64, tolerance: f64) -> Self {
        Self::new(inputs, measured, reference, tolerance, Relation::Within)
    }

    fn below(inputs: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self::new(inputs, measured, 0.0, tolerance, Relation::Below)
    }

    fn at_most(inputs: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(inputs, measured, bound, 0.0, Relation::AtMost)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub cases: Vec<CaseRecord>,
    pub diagnostics: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

impl Report {
    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs every check.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<Report> {
    run_checks(cfg, None)
}

/// Runs the named checks, or all of them. Check failures, including library
/// errors inside a check, are recorded rather than returned.
pub fn run_checks(cfg: &ExperimentConfig, only: Option<&[String]>) -> Result<Report> {
    cfg.validate()?;
    let selected: Vec<&str> = match only {
        None => CHECK_NAMES.to_vec(),
        Some(names) => {
            if names.is_empty() {
                return Err(Error::Empty("check selection"));
            }
            for n in names {
                if !CHECK_NAMES.contains(&n.as_str()) {
                    return Err(Error::InvalidParameter(format!(
                        "unknown check '{n}'; available: {}",
                        CHECK_NAMES.join(", ")
                    )));
                }
            }
            CHECK_NAMES.iter().copied().filter(|c| names.iter().any(|n| n == c)).collect()
        }
    };
    let checks: Vec<CheckRecord> = selected.into_iter().map(|name| run_one(name, cfg)).collect();
    let passed = checks.iter().all(|c| c.passed);
    Ok(Report {
        config: cfg.clone(),
        checks,
        passed,
    })
}

type Outcome = Result<(Vec<CaseRecord>, Vec<String>)>;

fn run_one(name: &str, cfg: &ExperimentConfig) -> CheckRecord {
    let outcome = match name {
        "rodrigues" => check_rodrigues(),
        "orthonormality" => check_orthonormality(),
        "mehler" => check_mehler(cfg),
        "kernel_magnitude" => check_kernel_magnitude(),
        "propagator_cross" => check_propagator_cross(cfg),
        "unitarity_periodicity" => check_unitarity(cfg),
        "lemma1" => check_lemma1(cfg),
        "kappa_fit" => check_kappa_fit(),
        "sharpness" => check_sharpness(cfg),
        "strichartz_bounded" => check_strichartz_bounded(cfg),
        "function_spaces" => check_function_spaces(cfg),
        "wainger" => check_wainger(cfg),
        "boundary_decay" => check_boundary_decay(cfg),
        other => Err(Error::InvalidParameter(format!("unknown check '{other}'"))),
    };
    let (cases, diagnostics) = match outcome {
        Ok(out) => out,
        Err(e) => (Vec::new(), vec![format!("error: {e}")]),
    };
    let passed = !cases.is_empty() && cases.iter().all(|c| c.passed);
    log::info!("check {name}: {}", if passed { "pass" } else { "FAIL" });
    CheckRecord {
        name: name.to_string(),
        cases,
        diagnostics,
        passed,
    }
}

/// Rodrigues sample points as exact fractions.
pub const RODRIGUES_POINTS: [(i128, i128); 5] = [(-3, 1), (-1, 1), (0, 1), (1, 2), (2, 1)];

fn check_rodrigues() -> Outcome {
    let mut worst: f64 = 0.0;
    for &(num, den) in &RODRIGUES_POINTS {
        let values = hermite_eval_1d(12, num as f64 / den as f64);
        for (k, v) in values.iter().enumerate() {
            let exact = rodrigues_value(k, num, den);
            let err = if exact == 0.0 { v.abs() } else { (v - exact).abs() / exact.abs() };
            worst = worst.max(err);
        }
    }
    Ok((vec![CaseRecord::below("k <= 12, x in {-3,-1,0,0.5,2}", worst, 1e-10)], vec![]))
}

fn check_orthonormality() -> Outcome {
    let k_max = 40;
    let rule = gauss_hermite_rule(81)?;
    let rows: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| hermite_eval_1d(k_max, x)).collect();
    let mut worst: f64 = 0.0;
    for j in 0..=k_max {
        for k in 0..=j {
            let g = sum::sum(rule.scaled_weights.iter().zip(&rows).map(|(w, r)| w * r[j] * r[k]));
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    Ok((vec![CaseRecord::below("Gram matrix k <= 40, 81 nodes", worst, 1e-8)], vec![]))
}

fn check_mehler(cfg: &ExperimentConfig) -> Outcome {
    let mut cases = Vec::new();
    for d in [1usize, 2] {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (0x4d45_484c << 8) ^ d as u64);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let omega = rng.random_range(-0.5..=0.5);
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..=2.0)).collect();
            let y: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..=2.0)).collect();
            let closed = mehler_closed_form(omega, &x, &y)?;
            let series = mehler_series(omega, &x, &y, 60)?;
            worst = worst.max((series - closed).abs() / closed.abs());
        }
        cases.push(CaseRecord::below(format!("d={d}, 20 samples, |omega|<=0.5, K=60"), worst, 1e-8));
    }
    Ok((cases, vec![]))
}

fn check_kernel_magnitude() -> Outcome {
    let line: Vec<f64> = (0..50).map(|i| -3.0 + 6.0 * i as f64 / 49.0).collect();
    let point = |i: usize, d: usize, shift: usize| -> Vec<f64> {
        (0..d).map(|a| line[(i + a * shift) % 50]).collect()
    };
    let mut cases = Vec::new();
    for (t_name, t) in [("pi/8", PI / 8.0), ("pi/4", PI / 4.0), ("pi/3", PI / 3.0)] {
        for d in [1usize, 2] {
            let expected = (2.0 * PI).powf(-(d as f64) / 2.0) * (2.0 * t).sin().abs().powf(-(d as f64) / 2.0);
            let devs = (0..50 * 50)
                .into_par_iter()
                .map(|ij| {
                    let x = point(ij / 50, d, 17);
                    let y = point(ij % 50, d, 31);
                    Ok((mehler_kernel(t, &x, &y)?.norm() - expected).abs())
                })
                .collect::<Result<Vec<f64>>>()?;
            let worst = devs.into_iter().fold(0.0, f64::max);
            cases.push(CaseRecord::below(format!("t={t_name}, d={d}, 50x50 points"), worst, 1e-12));
        }
    }
    Ok((cases, vec![]))
}

fn relative_l2(a: &SampledField, b: &SampledField) -> f64 {
    let w = a.grid.weights();
    let num = sum::sum(w.iter().zip(a.values.iter().zip(&b.values)).map(|(w, (x, y))| w * (x - y).norm_sqr()));
    let den = sum::sum(w.iter().zip(&b.values).map(|(w, y)| w * y.norm_sqr()));
    (num / den).sqrt()
}

fn check_propagator_cross(cfg: &ExperimentConfig) -> Outcome {
    let t = PI / 4.0;
    let f = random_band_limited(12, 1, cfg.seed)?;
    let grid = kernel_grid(t, 12, 1, 10.0)?;
    let out = evolve_kernel(&synthesize(&f, &grid)?, t)?;
    let reference = synthesize(&evolve_eigen(&f, t), &grid)?;
    let err = relative_l2(&out.field, &reference);
    let diag = vec![format!(
        "calibration phase {:.15} {:+.15}i (residual {:.3e}), branch: {}",
        out.phase.global_phase.re, out.phase.global_phase.im, out.phase.residual, out.phase.branch_rule
    )];
    Ok((vec![CaseRecord::below("d=1, K=12, t=pi/4", err, 1e-5)], diag))
}

fn check_unitarity(cfg: &ExperimentConfig) -> Outcome {
    let mut cases = Vec::new();
    for d in [1usize, 2, 3] {
        let f = random_band_limited(10, d, cfg.seed.wrapping_add(d as u64))?;
        let norm = f.l2_norm();
        let mut norm_err: f64 = 0.0;
        let mut period_err: f64 = 0.0;
        for t in [0.37, 1.1, -2.3, 5.0] {
            let g = evolve_eigen(&f, t);
            norm_err = norm_err.max((g.l2_norm() - norm).abs() / norm);
            let mut shifted = g.clone();
            shifted.scale(Complex64::from_polar(1.0, PI * d as f64));
            period_err = period_err.max(evolve_eigen(&f, t + PI).max_abs_diff(&shifted)?);
        }
        cases.push(CaseRecord::below(format!("unitarity, d={d}, K=10"), norm_err, 1e-14));
        cases.push(CaseRecord::below(format!("periodicity, d={d}, K=10"), period_err, 1e-12));
    }
    Ok((cases, vec![]))
}

fn check_lemma1(cfg: &ExperimentConfig) -> Outcome {
    let mut cases = Vec::new();
    for d in [1usize, 2] {
        let grid = GridSpec::for_cutoff(16, d);
        for (p_name, p) in [("2", 2.0), ("4", 4.0), ("inf", f64::INFINITY)] {
            let mut worst: f64 = 0.0;
            for i in 0..10u64 {
                let f = random_band_limited(16, d, cfg.seed.wrapping_add(100 * d as u64 + i))?;
                worst = worst.max(lemma1_identity_check(&f, p, &grid)?.relative_error);
            }
            cases.push(CaseRecord::below(format!("d={d}, p={p_name}, K=16, 10 fields"), worst, 1e-8));
        }
    }
    Ok((cases, vec![]))
}

fn check_kappa_fit() -> Outcome {
    let ks = geometric_k_values(64, 1024);
    let mut cases = Vec::new();
    let mut diags = Vec::new();
    for (p_name, p, tol) in [("2", 2.0, 1e-6), ("inf", f64::INFINITY, 0.03), ("6", 6.0, 0.03), ("3", 3.0, 0.03)] {
        let points = ks
            .par_iter()
            .map(|&k| Ok((k, projection_norm_1d(k as usize, p, &eigenfunction_grid(k as usize))?)))
            .collect::<Result<Vec<_>>>()?;
        let fit = fit_exponent(&points)?;
        diags.push(format!("p={p_name}: R^2 = {:.6}", fit.r_squared));
        cases.push(CaseRecord::within(format!("d=1, p={p_name}, k in 64..1024"), fit.slope, kappa_p(p, 1)?, tol));
    }
    Ok((cases, diags))
}

fn check_sharpness(cfg: &ExperimentConfig) -> Outcome {
    let ks = geometric_k_values(64, 512);
    let kappa = kappa_pq(f64::INFINITY, 2.0, 1)?;
    let mut cases = Vec::new();
    for (label, shift) in [("kappa-0.1", 0.1), ("kappa", 0.0)] {
        let out = sharpness_probe(&ks, f64::INFINITY, 2.0, kappa - shift, 1, cfg.seed, &Numerics::default())?;
        cases.push(CaseRecord::within(
            format!("d=1, p=inf, q=2, s={label}, k in 64..512"),
            out.fit.slope,
            shift,
            0.03,
        ));
    }
    Ok((cases, vec![]))
}

fn check_strichartz_bounded(cfg: &ExperimentConfig) -> Outcome {
    let s = kappa_pq(f64::INFINITY, 4.0, 1)?;
    let mut points = Vec::new();
    let mut diags = Vec::new();
    for kk in [16u64, 32, 64, 128] {
        let ratios = (0..cfg.ensemble as u64)
            .into_par_iter()
            .map(|i| {
                let f = random_band_limited(kk as usize, 1, cfg.seed.wrapping_add(kk << 20).wrapping_add(i))?;
                strichartz_ratio(&f, f64::INFINITY, 4.0, s, &Numerics::default())
            })
            .collect::<Result<Vec<f64>>>()?;
        let max = ratios.into_iter().fold(0.0, f64::max);
        diags.push(format!("K={kk}: max ratio {max:.6}"));
        points.push((kk, max));
    }
    let fit = fit_exponent(&points)?;
    Ok((
        vec![CaseRecord::at_most(
            format!("d=1, p=inf, q=4, s=1/6, ensemble {}", cfg.ensemble),
            fit.slope,
            0.02,
        )],
        diags,
    ))
}

fn check_function_spaces(cfg: &ExperimentConfig) -> Outcome {
    let mut sobolev_err: f64 = 0.0;
    let mut mono: f64 = 0.0;
    let mut holder: f64 = 0.0;
    let mut embedding: f64 = 0.0;
    for d in [1usize, 2] {
        let grid = GridSpec::for_cutoff(12, d);
        for i in 0..3u64 {
            let f = random_band_limited(12, d, cfg.seed.wrapping_add(1000 + 10 * d as u64 + i))?;
            for s in [-0.5, 0.0, 0.7] {
                let w = sobolev_norm(&f, s);
                sobolev_err = sobolev_err.max((triebel_norm(&f, s, 2.0, 2.0, &grid)? - w).abs() / w);
            }
            for p in [2.0, 4.0, f64::INFINITY] {
                for r in [0.0, 0.5] {
                    let norms = [1.0, 2.0, 4.0, f64::INFINITY]
                        .iter()
                        .map(|&q| triebel_norm(&f, r, p, q, &grid))
                        .collect::<Result<Vec<f64>>>()?;
                    for w in norms.windows(2) {
                        mono = mono.max(w[1] / w[0]);
                    }
                    let shifted = triebel_norm(&f, r + 0.25, p, 1.0, &grid)?;
                    embedding = embedding.max(norms[3] / shifted);
                }
            }
            let u = evolve_space_time(&f, &grid, 8 * 12 + 16)?;
            for q in [4.0, 6.0] {
                let factor = (2.0 * PI).powf(0.5 - 1.0 / q);
                for pt in 0..grid.num_points() {
                    let series = u.series(pt);
                    let rhs = factor * time_norm(&series, q);
                    if rhs > 0.0 {
                        holder = holder.max(time_norm(&series, 2.0) / rhs);
                    }
                }
            }
        }
    }
    Ok((
        vec![
            CaseRecord::below("W^s vs F^s_{2,2}, d in {1,2}, s in {-0.5,0,0.7}", sobolev_err, 1e-10),
            CaseRecord::at_most("F^r_{p,q2} / F^r_{p,q1}, q1 < q2", mono, 1.0),
            CaseRecord::at_most("pointwise L^2_t / ((2pi)^(1/2-1/q) L^q_t), q in {4,6}", holder, 1.0),
        ],
        vec![format!(
            "measured embedding constant F^r_{{p,inf}} <= C F^{{r+1/4}}_{{p,1}}: C = {embedding:.6}"
        )],
    ))
}

fn check_wainger(cfg: &ExperimentConfig) -> Outcome {
    let mut cases = Vec::new();
    let mut diags = Vec::new();
    for q in [4.0, 6.0] {
        let mut points = Vec::new();
        for kk in [32u64, 64, 128] {
            let profile = vec![Complex64::new(1.0 / ((kk + 1) as f64).sqrt(), 0.0); kk as usize + 1];
            let ratio = wainger_probe(&profile, q, cfg.wainger_trials, cfg.seed.wrapping_add(kk), 1)?;
            diags.push(format!("q={q}, K={kk}: max ratio {ratio:.6}"));
            points.push((kk, ratio));
        }
        let fit = fit_exponent(&points)?;
        cases.push(CaseRecord::at_most(
            format!("q={q}, K in {{32,64,128}}, {} trials", cfg.wainger_trials),
            fit.slope,
            0.02,
        ));
    }
    Ok((cases, diags))
}

fn check_boundary_decay(cfg: &ExperimentConfig) -> Outcome {
    let grid = cfg.numerics.grid_for(cfg.cutoff, cfg.dim);
    let f = random_band_limited(cfg.cutoff, cfg.dim, cfg.seed)?;
    let initial = synthesize(&f, &grid)?.boundary_magnitude();
    let evolved = synthesize(&evolve_eigen(&f, PI / 4.0), &grid)?.boundary_magnitude();
    let worst = initial.max(evolved);
    let mut diags = vec![format!(
        "box half-width {:.4}, {} points per axis, turning point {:.4}",
        grid.half_width,
        grid.points_per_dim,
        ((2 * cfg.cutoff + 1) as f64).sqrt()
    )];
    if worst >= BOUNDARY_DECAY {
        diags.push(format!(
            "boundary magnitude {worst:.3e} exceeds {BOUNDARY_DECAY:e}: the box is too small for K={}",
            cfg.cutoff
        ));
    }
    Ok((
        vec![CaseRecord::below(
            format!("d={}, K={}, t in {{0, pi/4}}", cfg.dim, cfg.cutoff),
            worst,
            BOUNDARY_DECAY,
        )],
        diags,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_relations() {
        assert!(CaseRecord::within("", 0.11, 0.1, 0.03).passed);
        assert!(!CaseRecord::within("", 0.14, 0.1, 0.03).passed);
        assert!(!CaseRecord::below("", f64::NAN, 1.0).passed);
        assert!(CaseRecord::at_most("", 0.02, 0.02).passed);
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = ExperimentConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"p\":\"inf\""));
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let empty: ExperimentConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(empty, cfg);
    }

    #[test]
    fn selection() {
        let cfg = ExperimentConfig::default();
        let only = vec!["rodrigues".to_string(), "orthonormality".to_string()];
        let report = run_checks(&cfg, Some(&only)).unwrap();
        assert_eq!(report.checks.len(), 2);
        assert!(report.passed);
        assert!(run_checks(&cfg, Some(&["nope".to_string()])).is_err());
    }

    #[test]
    fn tiny_box_fails_boundary_check() {
        let cfg = ExperimentConfig {
            cutoff: 64,
            numerics: Numerics {
                half_width: Some(2.0),
                ..Numerics::default()
            },
            ..ExperimentConfig::default()
        };
        let report = run_checks(&cfg, Some(&["boundary_decay".to_string()])).unwrap();
        assert!(!report.passed);
        assert!(report.checks[0].diagnostics.iter().any(|d| d.contains("too small")));
    }
}
