use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use mixed_mops::cd::sigma_sets;
use mixed_mops::combinatorics::{family, multi_index, shift_exact_prefix};
use mixed_mops::jacobi::band_support;
use mixed_mops::verify::{run_check, Check, Pipeline, SampleGrid};
use mixed_mops::{Exec, Float, Matrix, Rational, Scalar};
use serde_json::{json, Value};

use crate::config::{Backend, RunConfig};
use crate::export::{export_matrix, Format, Meta};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_SETUP: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    G,
    S,
    Sbar,
    J,
}

impl Which {
    pub fn name(self) -> &'static str {
        match self {
            Which::G => "g",
            Which::S => "S",
            Which::Sbar => "Sbar",
            Which::J => "J",
        }
    }
}

fn header(cfg: &RunConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("name".into(), json!(cfg.name));
    m.insert("backend".into(), json!(cfg.backend.label()));
    m.insert("N".into(), json!(cfg.n));
    m.insert("n1".into(), json!(cfg.setup.comp1.parts()));
    m.insert("n2".into(), json!(cfg.setup.comp2.parts()));
    m
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    std::fs::write(path, s).with_context(|| format!("cannot write {}", path.display()))
}

/// Report for a run that stopped before any check.
pub fn write_error_report(out: &Path, cfg: Option<&RunConfig>, error: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut m = cfg.map(header).unwrap_or_default();
    m.insert("status".into(), json!("error"));
    m.insert("error".into(), json!(error));
    m.insert("checks".into(), json!([]));
    let path = out.join("report.json");
    write_json(&path, &Value::Object(m))?;
    Ok(path)
}

/// Execute the configured checks; returns the process exit code.
pub fn run(cfg: &RunConfig, exec: Exec) -> Result<u8> {
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;
    match cfg.backend {
        Backend::Rational => run_backend::<Rational>(cfg, (), exec),
        Backend::Float(p) => run_backend::<Float>(cfg, p, exec),
    }
}

fn grid_for(cfg: &RunConfig, splitting_limit: usize) -> SampleGrid {
    let mut grid = SampleGrid::default_for(&cfg.setup, splitting_limit);
    if let Some(s) = &cfg.scales {
        grid.scales = s.clone();
    }
    if let Some(x) = &cfg.x {
        grid.points = x.clone();
        grid.pairs = x
            .iter()
            .flat_map(|a| x.iter().filter(move |b| *b != a).map(move |b| (a.clone(), b.clone())))
            .collect();
    }
    if let Some(z) = &cfg.z {
        grid.z = z.clone();
    }
    grid
}

fn j_window<T: Scalar>(p: &Pipeline<'_, T>) -> usize {
    p.j.row_limit.min(p.j.col_limit + 1).min(p.size())
}

fn write_artifacts<T: Scalar>(cfg: &RunConfig, p: &Pipeline<'_, T>) -> Result<Vec<String>> {
    let mut files = Vec::new();
    for which in [Which::G, Which::S, Which::Sbar, Which::J] {
        for format in [Format::Csv, Format::Text] {
            let path = export_one(cfg, p, which, format, &cfg.out)?;
            files.push(path.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    Ok(files)
}

fn export_one<T: Scalar>(cfg: &RunConfig, p: &Pipeline<'_, T>, which: Which, format: Format, dir: &Path) -> Result<PathBuf> {
    let n = p.size();
    let (m, window): (Matrix<T>, usize) = match which {
        Which::G => (p.g.g.clone(), n),
        Which::S => (p.fp.s.clone(), n),
        Which::Sbar => (p.fp.sbar.clone(), n),
        Which::J => {
            let k = j_window(p);
            (p.j.j.leading(k, k), k)
        }
    };
    let meta = Meta {
        fixture: cfg.name.clone(),
        matrix: which.name().into(),
        n,
        backend: cfg.backend.label(),
        window: (window, window),
    };
    export_matrix(&m, dir, format, cfg.digits, &meta)
}

fn run_backend<T: Scalar>(cfg: &RunConfig, ctx: T::Context, exec: Exec) -> Result<u8> {
    let started = Instant::now();
    let p = match Pipeline::<T>::build(&cfg.setup, cfg.n, ctx, exec) {
        Ok(p) => p,
        Err(e) => {
            let path = write_error_report(&cfg.out, Some(cfg), &e.to_string())?;
            eprintln!("error: {e}");
            eprintln!("report: {}", path.display());
            return Ok(EXIT_SETUP);
        }
    };
    let artifacts = write_artifacts(cfg, &p)?;
    let grid = grid_for(cfg, p.j.splitting_limit());
    let precision = T::quadrature_precision(ctx).unwrap_or(mixed_mops::scalar::DEFAULT_PRECISION);
    let mut records = Vec::new();
    let mut timings = serde_json::Map::new();
    let mut all_pass = true;
    for &check in &cfg.checks {
        let threshold = match (T::EXACT, check) {
            (_, Check::SecondKind) => check.float_threshold(),
            (true, _) => 0.0,
            (false, c) => cfg.tol.unwrap_or(c.float_threshold()),
        };
        let threshold_text = if threshold == 0.0 { "0".to_string() } else { format!("{threshold:e}") };
        let t0 = Instant::now();
        let record = match run_check(&p, check, &grid, precision) {
            Ok(o) => {
                let pass = o.passes(T::EXACT, threshold);
                all_pass &= pass;
                let mut r = json!({
                    "name": check.name(),
                    "residual": o.residual,
                    "threshold": threshold_text,
                    "pass": pass,
                });
                if o.violations > 0 {
                    r["violations"] = json!(o.violations);
                }
                r
            }
            Err(e) => {
                all_pass = false;
                json!({
                    "name": check.name(),
                    "residual": null,
                    "threshold": threshold_text,
                    "pass": false,
                    "error": e.to_string(),
                })
            }
        };
        timings.insert(check.name().into(), json!(t0.elapsed().as_secs_f64()));
        println!(
            "{:<15} residual {:<28} threshold {:<8} {}",
            check.name(),
            record["residual"].as_str().unwrap_or("-"),
            threshold_text,
            if record["pass"] == json!(true) { "PASS" } else { "FAIL" }
        );
        if let Some(e) = record.get("error") {
            println!("                {}", e.as_str().unwrap_or_default());
        }
        records.push(record);
    }
    let mut m = header(cfg);
    m.insert("status".into(), json!(if all_pass { "pass" } else { "fail" }));
    m.insert("splitting_window".into(), json!(p.j.splitting_limit()));
    m.insert("scales".into(), json!(grid.scales));
    m.insert("checks".into(), Value::Array(records));
    m.insert("artifacts".into(), json!(artifacts));
    m.insert("csv_digits".into(), json!(cfg.digits));
    write_json(&cfg.out.join("report.json"), &Value::Object(m))?;
    timings.insert("total".into(), json!(started.elapsed().as_secs_f64()));
    write_json(&cfg.out.join("timing.json"), &Value::Object(timings))?;
    println!("report: {}", cfg.out.join("report.json").display());
    Ok(if all_pass { EXIT_PASS } else { EXIT_FAIL })
}

/// Build the pipeline and write one matrix.
pub fn export(cfg: &RunConfig, which: Which, format: Format, exec: Exec) -> Result<std::result::Result<PathBuf, String>> {
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;
    fn go<T: Scalar>(cfg: &RunConfig, ctx: T::Context, which: Which, format: Format, exec: Exec) -> Result<std::result::Result<PathBuf, String>> {
        match Pipeline::<T>::build(&cfg.setup, cfg.n, ctx, exec) {
            Ok(p) => Ok(Ok(export_one(cfg, &p, which, format, &cfg.out)?)),
            Err(e) => Ok(Err(e.to_string())),
        }
    }
    match cfg.backend {
        Backend::Rational => go::<Rational>(cfg, (), which, format, exec),
        Backend::Float(p) => go::<Float>(cfg, p, which, format, exec),
    }
}

fn range(lo: usize, hi: usize) -> String {
    match hi.saturating_sub(lo) {
        0 => format!("{{{lo}}}"),
        1 => format!("{{{lo},{hi}}}"),
        _ => format!("{{{lo}..{hi}}}"),
    }
}

/// Plan of a run from the compositions alone.
pub fn describe(cfg: &RunConfig, scales: &[usize]) -> String {
    let s = &cfg.setup;
    let (n1, n2) = (&s.comp1, &s.comp2);
    let n = cfg.n;
    let mut out = String::new();
    let list = |ws: &[mixed_mops::measures::Weight]| ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ");
    let _ = writeln!(out, "name: {}", cfg.name);
    let _ = writeln!(out, "support: [{}, {}]", s.measure.lo, s.measure.hi);
    let _ = writeln!(out, "system 1: n1 = {n1}, weights ({})", list(&s.weights1));
    let _ = writeln!(out, "system 2: n2 = {n2}, weights ({})", list(&s.weights2));
    let _ = writeln!(out, "backend: {}, N = {n}", cfg.backend.label());
    let checks: Vec<&str> = cfg.checks.iter().map(|c| c.name()).collect();
    let _ = writeln!(out, "checks: {}", checks.join(", "));
    let (rows, cols) = (shift_exact_prefix(n1, n), shift_exact_prefix(n2, n));
    let split = rows.min(cols);
    let _ = writeln!(out, "exact J: rows < {rows} (upper part), columns < {cols} (lower part); kernel scales 1..={split}");
    let _ = writeln!(out, "kernel margin: N >= {}", crate::config::kernel_margin(s));
    if n1.families() == 1 && n2.families() == 1 {
        let _ = writeln!(out, "J is tridiagonal");
    }
    let _ = writeln!(out, "\nstaircase (l: a1 nu1 | a2 nu2)");
    for l in 0..n {
        let _ = writeln!(
            out,
            "{l:>4}: {} {} | {} {}",
            family(n1, l),
            multi_index(n1, l as i64),
            family(n2, l),
            multi_index(n2, l as i64)
        );
    }
    let lmin = n1.total().max(n2.total());
    let _ = writeln!(out, "\nband support (l: row columns, column rows)");
    for l in lmin..n {
        if let Ok(b) = band_support(n1, n2, l) {
            let _ = writeln!(out, "{l:>4}: {}  {}", range(b.row.0, b.row.1), range(b.col.0, b.col.1));
        }
    }
    let _ = writeln!(out, "\nindex sets (Q indices x Qbar indices)");
    for &l in scales {
        match sigma_sets(n1, n2, l) {
            Ok(t) => {
                let _ = writeln!(
                    out,
                    "l = {l}: sigma1 = {}x{}, sigma2 = {}x{}",
                    range(t.sigma1.q.0, t.sigma1.q.1),
                    range(t.sigma1.qbar.0, t.sigma1.qbar.1),
                    range(t.sigma2.q.0, t.sigma2.q.1),
                    range(t.sigma2.qbar.0, t.sigma2.qbar.1)
                );
            }
            Err(e) => {
                let _ = writeln!(out, "l = {l}: {e}");
            }
        }
    }
    out
}

/// Scales shown by `describe` when none are requested.
pub fn default_scales(cfg: &RunConfig) -> Vec<usize> {
    if let Some(s) = &cfg.scales {
        return s.clone();
    }
    let (n1, n2) = (&cfg.setup.comp1, &cfg.setup.comp2);
    let split = shift_exact_prefix(n1, cfg.n).min(shift_exact_prefix(n2, cfg.n));
    let lmin = n1.total().max(n2.total());
    mixed_mops::fixtures::grid_scales(lmin, split.max(lmin))
}
