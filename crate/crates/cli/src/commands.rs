use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use hermite_spectral::propagator::{default_time_points, kernel_grid};
use hermite_spectral::spectral::{mehler_closed_form, mehler_series};
use hermite_spectral::verification::{
    eigenfunction_grid, fit_exponent, geometric_k_values, kappa_p, kappa_pq, projection_norm_1d, random_band_limited,
    run_checks, sharpness_probe, strichartz_ratio, ExponentFit,
};
use hermite_spectral::{
    analyze_samples, evolution_mixed_norm, evolve_eigen, evolve_kernel, hermite_eval_1d, lp_norm, phi_eval, project,
    sobolev_norm, synthesize, triebel_norm, GridSpec, MultiIndex, SampledField, SpectralField,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{
    parse_list, Cli, Command, Direction, EvalArgs, EvolveArgs, Format, InputArgs, MehlerArgs, Method, NormArgs,
    NormKind, PlotArgs, ProjectArgs, RangeArgs, SharpnessArgs, TransformArgs, VerifyArgs,
};
use crate::config::Settings;
use crate::output::{csv_text, emit, fmt_real, json_text, real, Metadata};
use crate::plot;

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    CheckFailed,
}

struct Ctx {
    settings: Settings,
    format: Option<Format>,
    output: Option<std::path::PathBuf>,
    check: bool,
}

impl Ctx {
    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        ensure!(allowed.contains(&f), "format {f:?} is not available for this command");
        Ok(f)
    }

    fn emit(&self, text: &str) -> Result<()> {
        emit(text, self.output.as_deref())
    }

    fn status(&self, ok: bool) -> Status {
        if self.check && !ok {
            Status::CheckFailed
        } else {
            Status::Success
        }
    }
}

pub fn run(cli: Cli) -> Result<Status> {
    let ctx = Ctx {
        settings: Settings::resolve(&cli.common)?,
        format: cli.common.format,
        output: cli.common.output.clone(),
        check: cli.common.check,
    };
    match cli.command {
        Command::Eval(a) => eval(&ctx, a),
        Command::Transform(a) => transform(&ctx, a),
        Command::Project(a) => project_cmd(&ctx, a),
        Command::Evolve(a) => evolve(&ctx, a),
        Command::Norm(a) => norm(&ctx, a),
        Command::Kappa => kappa(&ctx),
        Command::FitKappa(a) => fit_kappa(&ctx, a),
        Command::Strichartz(a) => strichartz(&ctx, a),
        Command::Sharpness(a) => sharpness(&ctx, a),
        Command::MehlerCheck(a) => mehler_check(&ctx, a),
        Command::Verify(a) => verify(&ctx, a),
        Command::Plot(a) => plot_cmd(&ctx, a),
    }
}

fn read_field(path: &Path) -> Result<SpectralField> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SpectralField::from_json(&text).with_context(|| format!("parsing field {}", path.display()))
}

fn field_output(ctx: &Ctx, field: &SpectralField, meta: &Metadata, extra: Value) -> Result<Status> {
    ctx.format(Format::Json, &[Format::Json])?;
    let mut body: Value = serde_json::from_str(&field.to_json()?)?;
    if let (Value::Object(map), Value::Object(more)) = (&mut body, extra) {
        map.extend(more);
    }
    ctx.emit(&json_text(body, meta)?)?;
    Ok(Status::Success)
}

fn eval(ctx: &Ctx, a: EvalArgs) -> Result<Status> {
    let fmt = ctx.format(Format::Json, &[Format::Json, Format::Csv])?;
    match (a.k, a.x, a.mu, a.point) {
        (Some(k), Some(x), None, None) => {
            let values = hermite_eval_1d(k, x);
            let meta = Metadata::new("eval", &ctx.settings).arg("k", k).arg("x", x);
            let text = match fmt {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = values
                        .iter()
                        .enumerate()
                        .map(|(j, v)| vec![j.to_string(), x.to_string(), v.to_string()])
                        .collect();
                    csv_text(&["k", "x", "value"], &rows, &meta, &[])?
                }
                _ => json_text(json!({ "k": k, "x": x, "value": values[k], "values": values }), &meta)?,
            };
            ctx.emit(&text)?;
        }
        (None, None, Some(mu), Some(point)) => {
            let mu = MultiIndex::new(parse_list::<u32>(&mu, "multi-index").map_err(anyhow::Error::msg)?);
            let pt = parse_list::<f64>(&point, "point").map_err(anyhow::Error::msg)?;
            let value = phi_eval(&mu, &pt)?;
            let meta = Metadata::new("eval", &ctx.settings)
                .arg("mu", &mu)
                .arg("point", format!("{pt:?}"));
            let text = match fmt {
                Format::Csv => csv_text(&["mu", "value"], &[vec![mu.to_string(), value.to_string()]], &meta, &[])?,
                _ => json_text(json!({ "mu": mu, "point": pt, "value": value }), &meta)?,
            };
            ctx.emit(&text)?;
        }
        _ => bail!("eval needs either --k with --x, or --mu with --point"),
    }
    Ok(Status::Success)
}

fn transform(ctx: &Ctx, a: TransformArgs) -> Result<Status> {
    let s = &ctx.settings;
    if a.random {
        let field = random_band_limited(s.cutoff, s.d, s.seed)?;
        let meta = Metadata::new("transform", s).arg("random", true);
        return field_output(ctx, &field, &meta, json!({}));
    }
    let input = a.input.as_deref().context("--input is required")?;
    match a.direction {
        Direction::Synthesize => {
            let field = read_field(input)?;
            let grid = s.grid_for(field.cutoff(), field.dim());
            let samples = synthesize(&field, &grid)?;
            let meta = Metadata::new("transform", s)
                .arg("direction", "synthesize")
                .arg("input", input.display())
                .grid(grid);
            let fmt = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
            let axis = grid.axis();
            let mut idx = vec![0usize; grid.dim];
            let text = if fmt == Format::Csv {
                let mut header: Vec<String> = (1..=grid.dim).map(|i| format!("x{i}")).collect();
                header.extend(["re".to_string(), "im".to_string()]);
                let header: Vec<&str> = header.iter().map(String::as_str).collect();
                let rows: Vec<Vec<String>> = samples
                    .values
                    .iter()
                    .enumerate()
                    .map(|(p, v)| {
                        grid.unravel(p, &mut idx);
                        let mut row: Vec<String> = idx.iter().map(|&i| axis[i].to_string()).collect();
                        row.extend([v.re.to_string(), v.im.to_string()]);
                        row
                    })
                    .collect();
                csv_text(&header, &rows, &meta, &[])?
            } else {
                let values: Vec<[f64; 2]> = samples.values.iter().map(|v| [v.re, v.im]).collect();
                json_text(json!({ "grid": grid, "values": values }), &meta)?
            };
            ctx.emit(&text)?;
            Ok(Status::Success)
        }
        Direction::Analyze => {
            let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
            let samples = read_samples(&text)?;
            let field = analyze_samples(&samples, s.cutoff)?;
            let meta = Metadata::new("transform", s)
                .arg("direction", "analyze")
                .arg("input", input.display())
                .grid(samples.grid);
            field_output(ctx, &field, &meta, json!({}))
        }
    }
}

/// Samples CSV as written by `transform`: columns x1..xd, re, im on a
/// symmetric uniform tensor grid, last axis fastest.
fn read_samples(text: &str) -> Result<SampledField> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let d = headers.len().checked_sub(2).filter(|&d| d > 0).context("samples CSV needs x1..xd, re, im")?;
    ensure!(
        &headers[d] == "re" && &headers[d + 1] == "im",
        "samples CSV must end with re, im columns"
    );
    let mut coords = Vec::new();
    let mut values = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let nums = row
            .iter()
            .map(|c| c.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .with_context(|| format!("samples row {}", i + 1))?;
        coords.push(nums[..d].to_vec());
        values.push(Complex64::new(nums[d], nums[d + 1]));
    }
    ensure!(!values.is_empty(), "samples CSV has no rows");
    let n = (values.len() as f64).powf(1.0 / d as f64).round() as usize;
    ensure!(n.pow(d as u32) == values.len(), "{} samples do not form a {d}-dimensional tensor grid", values.len());
    let half_width = coords[values.len() - 1][0];
    let grid = GridSpec::new(d, half_width, n, 1)?;
    let axis = grid.axis();
    let mut idx = vec![0usize; d];
    for (p, c) in coords.iter().enumerate() {
        grid.unravel(p, &mut idx);
        for (a, (&i, &x)) in idx.iter().zip(c).enumerate() {
            ensure!(
                (axis[i] - x).abs() <= 1e-9 * half_width.max(1.0),
                "row {}: coordinate x{} = {x} is off the uniform grid",
                p + 1,
                a + 1
            );
        }
    }
    Ok(SampledField::new(grid, values)?)
}

fn project_cmd(ctx: &Ctx, a: ProjectArgs) -> Result<Status> {
    let field = read_field(&a.input)?;
    let out = project(&field, a.k)?;
    let meta = Metadata::new("project", &ctx.settings)
        .arg("input", a.input.display())
        .arg("k", a.k);
    field_output(ctx, &out, &meta, json!({}))
}

fn relative_coeff_diff(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    let mut diff = a.clone();
    for (x, y) in diff.coeffs_mut().iter_mut().zip(b.coeffs()) {
        *x -= y;
    }
    ensure!(a.len() == b.len(), "field shapes differ");
    Ok(diff.l2_norm() / b.l2_norm())
}

fn evolve(ctx: &Ctx, a: EvolveArgs) -> Result<Status> {
    let t = ctx.settings.t.context("evolve needs --t")?;
    let field = read_field(&a.input)?;
    let eigen = evolve_eigen(&field, t);
    let meta = Metadata::new("evolve", &ctx.settings)
        .arg("input", a.input.display())
        .arg("method", format!("{:?}", a.method).to_lowercase());
    match a.method {
        Method::Eigen => field_output(ctx, &eigen, &meta, json!({ "t": t })),
        Method::Kernel => {
            let grid = kernel_grid(t, field.cutoff(), field.dim(), 10.0)?;
            let out = evolve_kernel(&synthesize(&field, &grid)?, t)?;
            let kernel = analyze_samples(&out.field, field.cutoff())?;
            let diff = relative_coeff_diff(&kernel, &eigen)?;
            log::info!("kernel vs eigen relative L2 difference {diff:.3e}");
            let phase = &out.phase;
            let extra = json!({
                "t": t,
                "phase": { "re": phase.global_phase.re, "im": phase.global_phase.im,
                           "residual": phase.residual, "branch_rule": phase.branch_rule },
                "boundary_magnitude": out.boundary_magnitude,
                "eigen_relative_l2_difference": diff,
            });
            field_output(ctx, &kernel, &meta.grid(grid), extra)
        }
    }
}

fn norm(ctx: &Ctx, a: NormArgs) -> Result<Status> {
    ctx.format(Format::Json, &[Format::Json])?;
    let s = &ctx.settings;
    let field = read_field(&a.input)?;
    let p = s.p.unwrap_or(2.0);
    let q = s.q.unwrap_or(2.0);
    let r = s.s.unwrap_or(0.0);
    let grid = s.grid_for(field.cutoff(), field.dim());
    let kind = format!("{:?}", a.kind).to_lowercase();
    let mut meta = Metadata::new("norm", s).arg("input", a.input.display()).arg("kind", &kind);
    let value = match a.kind {
        NormKind::Lp => {
            meta = meta.grid(grid);
            lp_norm(&synthesize(&field, &grid)?, p)?
        }
        NormKind::Mixed => {
            let nt = s.time_points.unwrap_or_else(|| default_time_points(&field));
            meta = meta.grid(GridSpec { time_points: nt, ..grid });
            evolution_mixed_norm(&field, &grid, nt, p, q)?
        }
        NormKind::Triebel => {
            meta = meta.grid(grid);
            triebel_norm(&field, r, p, q, &grid)?
        }
        NormKind::Sobolev => sobolev_norm(&field, r),
    };
    let body = json!({ "kind": kind, "p": real(p), "q": real(q), "s": r, "value": value });
    ctx.emit(&json_text(body, &meta)?)?;
    Ok(Status::Success)
}

fn kappa(ctx: &Ctx) -> Result<Status> {
    ctx.format(Format::Json, &[Format::Json])?;
    let s = &ctx.settings;
    let p = s.p.unwrap_or(f64::INFINITY);
    let mut body = json!({ "d": s.d, "p": real(p), "kappa_p": kappa_p(p, s.d)? });
    if let Some(q) = s.q {
        body["q"] = real(q);
        body["kappa_pq"] = json!(kappa_pq(p, q, s.d)?);
    }
    ctx.emit(&json_text(body, &Metadata::new("kappa", s))?)?;
    Ok(Status::Success)
}

/// Emits fitted points as CSV, JSON or SVG.
fn fit_output(ctx: &Ctx, meta: &Metadata, points: &[(u64, f64)], fit: &ExponentFit, summary: Value, title: &str) -> Result<()> {
    let fmt = ctx.format(Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let mut notes = vec![
        format!("slope: {}", fit.slope),
        format!("intercept: {}", fit.intercept),
        format!("r_squared: {}", fit.r_squared),
    ];
    if let Value::Object(map) = &summary {
        for (k, v) in map {
            notes.push(format!("{k}: {v}"));
        }
    }
    let text = match fmt {
        Format::Csv => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|&(k, v)| {
                    vec![k.to_string(), v.to_string(), (k as f64).ln().to_string(), v.ln().to_string()]
                })
                .collect();
            csv_text(&["k", "value", "log_k", "log_value"], &rows, meta, &notes)?
        }
        Format::Json => {
            let pts: Vec<Value> = points.iter().map(|&(k, v)| json!({ "k": k, "value": v })).collect();
            json_text(json!({ "points": pts, "fit": fit, "summary": summary }), meta)?
        }
        Format::Svg => {
            let comment: Vec<String> = meta.lines().into_iter().chain(notes).collect();
            plot::render(points, Some(fit), title, &comment)
        }
    };
    ctx.emit(&text)
}

fn fit_kappa(ctx: &Ctx, a: RangeArgs) -> Result<Status> {
    let s = &ctx.settings;
    ensure!(
        s.d == 1,
        "fit-kappa runs in d = 1 only, where ‖P_k‖ = ‖h_k‖_p exactly; got d = {}",
        s.d
    );
    let p = s.p.unwrap_or(f64::INFINITY);
    let reference = kappa_p(p, 1)?;
    let ks = geometric_k_values(a.k.0, a.k.1);
    ensure!(ks.len() >= 3, "range {}:{} gives fewer than 3 sample degrees", a.k.0, a.k.1);
    let points = ks
        .iter()
        .map(|&k| {
            let grid = if s.grid_n.is_some() || s.half_width.is_some() || s.box_scale != 1.0 {
                s.grid_for(k as usize, 1)
            } else {
                eigenfunction_grid(k as usize)
            };
            Ok((k, projection_norm_1d(k as usize, p, &grid)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_exponent(&points)?;
    let ok = (fit.slope - reference).abs() <= a.tol;
    log::info!("fit-kappa p={}: slope {:.6} vs kappa_p {:.6}", fmt_real(p), fit.slope, reference);
    let meta = Metadata::new("fit-kappa", s)
        .arg("k", format!("{}:{}", a.k.0, a.k.1))
        .arg("tol", a.tol);
    let summary = json!({ "kappa_p": reference, "tolerance": a.tol, "within_tolerance": ok });
    fit_output(ctx, &meta, &points, &fit, summary, &format!("‖h_k‖_p, p = {}", fmt_real(p)))?;
    Ok(ctx.status(ok))
}

fn strichartz(ctx: &Ctx, a: InputArgs) -> Result<Status> {
    ctx.format(Format::Json, &[Format::Json])?;
    let s = &ctx.settings;
    let field = match &a.input {
        Some(path) => read_field(path)?,
        None => random_band_limited(s.cutoff, s.d, s.seed)?,
    };
    let p = s.p.unwrap_or(f64::INFINITY);
    let q = s.q.unwrap_or(4.0);
    let reg = match s.s {
        Some(v) => v,
        None => kappa_pq(p, q, field.dim())?,
    };
    let ratio = strichartz_ratio(&field, p, q, reg, &s.numerics())?;
    let mut meta = Metadata::new("strichartz", s).grid(s.grid_for(field.cutoff(), field.dim()));
    if let Some(path) = &a.input {
        meta = meta.arg("input", path.display());
    }
    let body = json!({ "p": real(p), "q": real(q), "s": reg, "ratio": ratio });
    ctx.emit(&json_text(body, &meta)?)?;
    Ok(Status::Success)
}

fn sharpness(ctx: &Ctx, a: SharpnessArgs) -> Result<Status> {
    let s = &ctx.settings;
    let p = s.p.unwrap_or(f64::INFINITY);
    let q = s.q.unwrap_or(2.0);
    let kappa = kappa_pq(p, 2.0, s.d)?;
    let reg = s.s.unwrap_or(kappa_pq(p, q, s.d)?);
    let ks = geometric_k_values(a.k.0, a.k.1);
    let out = sharpness_probe(&ks, p, q, reg, s.d, s.seed, &s.numerics())?;
    let expected = (q == 2.0).then_some(kappa - reg);
    let ok = expected.is_none_or(|e| (out.fit.slope - e).abs() <= a.tol);
    if expected.is_none() {
        log::warn!("q = {q} > 2: slope is reported without a sharpness claim");
    }
    let meta = Metadata::new("sharpness", s)
        .arg("k", format!("{}:{}", a.k.0, a.k.1))
        .arg("tol", a.tol);
    let summary = json!({
        "s": reg,
        "kappa_p2": kappa,
        "expected_slope": expected,
        "tolerance": a.tol,
        "within_tolerance": ok,
    });
    fit_output(ctx, &meta, &out.ratios, &out.fit, summary, "Strichartz ratio on f = P_k g")?;
    Ok(ctx.status(ok))
}

fn mehler_check(ctx: &Ctx, a: MehlerArgs) -> Result<Status> {
    let fmt = ctx.format(Format::Json, &[Format::Json, Format::Csv])?;
    let s = &ctx.settings;
    ensure!(a.omega_max.abs() < 1.0, "|omega| must stay below 1");
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut rows = Vec::with_capacity(a.samples);
    for _ in 0..a.samples {
        let omega = rng.random_range(-a.omega_max..=a.omega_max);
        let x: Vec<f64> = (0..s.d).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let y: Vec<f64> = (0..s.d).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let closed = mehler_closed_form(omega, &x, &y)?;
        let series = mehler_series(omega, &x, &y, a.terms)?;
        rows.push((omega, x, y, closed, series, (series - closed).abs() / closed.abs()));
    }
    let worst = rows.iter().map(|r| r.5).fold(0.0, f64::max);
    let ok = worst < a.tol;
    let meta = Metadata::new("mehler-check", s)
        .arg("samples", a.samples)
        .arg("terms", a.terms)
        .arg("omega_max", a.omega_max);
    let text = if fmt == Format::Csv {
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|(o, x, y, c, sr, e)| {
                vec![o.to_string(), format!("{x:?}"), format!("{y:?}"), c.to_string(), sr.to_string(), e.to_string()]
            })
            .collect();
        let notes = vec![format!("max_relative_error: {worst}")];
        csv_text(&["omega", "x", "y", "closed_form", "series", "relative_error"], &table, &meta, &notes)?
    } else {
        json_text(json!({ "max_relative_error": worst, "tolerance": a.tol, "passed": ok }), &meta)?
    };
    ctx.emit(&text)?;
    Ok(ctx.status(ok))
}

fn verify(ctx: &Ctx, a: VerifyArgs) -> Result<Status> {
    ctx.format(Format::Json, &[Format::Json])?;
    let cfg = ctx.settings.experiment();
    let only = (!a.only.is_empty()).then_some(a.only.as_slice());
    let report = run_checks(&cfg, only)?;
    for c in &report.checks {
        eprintln!("{:<24} {}", c.name, if c.passed { "pass" } else { "FAIL" });
        if !c.passed {
            for d in &c.diagnostics {
                eprintln!("    {d}");
            }
        }
    }
    let mut meta = Metadata::new("verify", &ctx.settings).grid(ctx.settings.grid());
    if !a.only.is_empty() {
        meta = meta.arg("only", a.only.join(","));
    }
    let body = serde_json::to_value(&report)?;
    ctx.emit(&json_text(body, &meta)?)?;
    Ok(if report.passed { Status::Success } else { Status::CheckFailed })
}

fn plot_cmd(ctx: &Ctx, a: PlotArgs) -> Result<Status> {
    ctx.format(Format::Svg, &[Format::Svg])?;
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let points = plot::read_points(&text)?;
    let fit = if points.len() >= 3 { Some(fit_exponent(&points)?) } else { None };
    let meta = Metadata::new("plot", &ctx.settings);
    let svg = plot::render(&points, fit.as_ref(), "log-log fit", &meta.lines());
    ctx.emit(&svg)?;
    Ok(Status::Success)
}
