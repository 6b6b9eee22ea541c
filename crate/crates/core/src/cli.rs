//! Batch workflows behind the `metasnell` binary.
//!
//! Each subcommand reads a [`RunConfig`], runs one family of checks, and
//! writes `report.json` plus CSV tables into the output directory. The
//! outcome maps to exit status 0 (all checks within tolerance), 2 (a check
//! failed) or 1 (usage, configuration or I/O error).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::admissibility::{admissibility_report, AdmissibilityReport};
use crate::config::{load, parse_override, RunConfig};
use crate::error::{Error, Result};
use crate::fields::FdSteps;
use crate::grid::{GridSpec, Rect};
use crate::math::{cnorm, Vec3};
use crate::output::{csv_writer, fmt_f64, write_json};
use crate::phase::{integrate_phase, TangentialGradientField};
use crate::snell::{distance_to_ray, law_residual, refract, trace_bundle, Ray, RayOutcome, TraceOptions, TracedRay};
use crate::weakform::{
    boundary_audit, dist_divergence, random_jump_suite, surface_integral, tangential_match, JumpCase,
    JumpReport, Piece, PiecewiseField, TestFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Trace,
    Audit,
    Weakcheck,
    Admit,
    Design,
}

impl Subcommand {
    pub const ALL: [Subcommand; 5] = [Self::Trace, Self::Audit, Self::Weakcheck, Self::Admit, Self::Design];

    pub fn name(self) -> &'static str {
        match self {
            Self::Trace => "trace",
            Self::Audit => "audit",
            Self::Weakcheck => "weakcheck",
            Self::Admit => "admit",
            Self::Design => "design",
        }
    }

    /// Config key that `--tol` overrides.
    fn tol_key(self) -> &'static str {
        match self {
            Self::Trace => "trace.tol",
            Self::Audit => "audit.tol",
            Self::Weakcheck => "weakcheck.tol",
            Self::Admit => "admit.tol",
            Self::Design => "design.focus_tol",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownSubcommand(s.to_string()))
    }
}

/// Command-line level options; everything else comes from the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    /// Raw `key.path=value` strings.
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
}

/// Process exit status for a run result.
pub fn exit_code(result: &Result<RunOutcome>) -> i32 {
    match result {
        Ok(o) if o.passed => 0,
        Ok(_) => 2,
        Err(_) => 1,
    }
}

/// Resolve the configuration for `sub` from options.
pub fn resolve_config(sub: Subcommand, opts: &RunOptions) -> Result<RunConfig> {
    let mut overrides = opts
        .overrides
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>>>()?;
    if let Some(seed) = opts.seed {
        overrides.push(("seed".into(), toml::Value::Integer(seed as i64)));
    }
    if let Some(tol) = opts.tol {
        overrides.push((sub.tol_key().into(), toml::Value::Float(tol)));
    }
    if let Some(out) = &opts.out {
        overrides.push(("output.dir".into(), toml::Value::String(out.display().to_string())));
    }
    load(opts.config.as_deref(), &overrides)
}

pub fn run(subcommand: &str, opts: &RunOptions) -> Result<RunOutcome> {
    let sub: Subcommand = subcommand.parse()?;
    let cfg = resolve_config(sub, opts)?;
    run_config(sub, &cfg)
}

pub fn run_config(sub: Subcommand, cfg: &RunConfig) -> Result<RunOutcome> {
    let dir = cfg.output.dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    log::info!("running {sub} into {}", dir.display());
    match sub {
        Subcommand::Trace => trace(cfg, &dir),
        Subcommand::Audit => audit(cfg, &dir),
        Subcommand::Weakcheck => weakcheck(cfg, &dir),
        Subcommand::Admit => admit(cfg, &dir),
        Subcommand::Design => design(cfg, &dir),
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    subcommand: &'static str,
    passed: bool,
    config: &'a RunConfig,
    results: T,
}

fn finish<T: Serialize>(
    sub: Subcommand,
    cfg: &RunConfig,
    dir: &Path,
    passed: bool,
    results: T,
    mut files: Vec<PathBuf>,
) -> Result<RunOutcome> {
    let path = dir.join("report.json");
    write_json(
        &path,
        &Report {
            subcommand: sub.name(),
            passed,
            config: cfg,
            results,
        },
    )?;
    files.insert(0, path);
    log::info!("{sub}: {}", if passed { "pass" } else { "FAIL" });
    Ok(RunOutcome { passed, files })
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| if n == 1 { a } else { a + (b - a) * k as f64 / (n - 1) as f64 })
}

fn incident_rays(cfg: &RunConfig) -> Result<Vec<Ray>> {
    let t = &cfg.trace;
    let s = cfg.surface()?;
    match t.mode.as_str() {
        "fan" => {
            let target = s.point(t.target[0], t.target[1])?;
            let az = t.azimuth_deg.to_radians();
            Ok(linspace(t.theta_min_deg, t.theta_max_deg, t.count)
                .map(|deg| {
                    let th = deg.to_radians();
                    let d = Vec3::new(th.sin() * az.cos(), th.sin() * az.sin(), th.cos());
                    Ray::new(target - d * t.distance, d)
                })
                .collect())
        }
        _ => {
            let d = Vec3::from(t.direction);
            if !(d.norm() > 0.0) {
                return Err(Error::ConfigParse("`trace.direction` must be non-zero".into()));
            }
            let d = d.normalize();
            let mut rays = Vec::with_capacity(t.count * t.count);
            for y in linspace(-t.half_width, t.half_width, t.count) {
                for x in linspace(-t.half_width, t.half_width, t.count) {
                    rays.push(Ray::new(Vec3::new(x, y, t.launch_height), d));
                }
            }
            Ok(rays)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct RayRow {
    ray: usize,
    status: String,
    hit: Option<Vec3>,
    transmitted: Option<Vec3>,
    reflected: Option<Vec3>,
    sin_theta_i: Option<f64>,
    sin_theta_t: Option<f64>,
    law_residual_t: Option<f64>,
    law_residual_r: Option<f64>,
}

fn status_of(tr: &TracedRay) -> String {
    match &tr.outcome {
        RayOutcome::Hit { transmitted: Ok(_), .. } => "hit".into(),
        RayOutcome::Hit {
            transmitted: Err(Error::TotalInternalReflection { .. }),
            ..
        } => "tir".into(),
        RayOutcome::Hit { transmitted: Err(e), .. } => format!("hit-no-transmission: {e}"),
        RayOutcome::Escaped => "escaped".into(),
        RayOutcome::Failed(e) => format!("failed: {e}"),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn opt3(v: Option<Vec3>) -> [String; 3] {
    match v {
        Some(v) => [fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2])],
        None => Default::default(),
    }
}

fn write_rays(path: &Path, traced: &[TracedRay], rows: &[RayRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "ray", "status", "ox", "oy", "oz", "dx", "dy", "dz", "hx", "hy", "hz", "ktx", "kty", "ktz", "krx", "kry",
        "krz", "sin_theta_i", "sin_theta_t", "law_residual_t", "law_residual_r",
    ])?;
    for (tr, row) in traced.iter().zip(rows) {
        let mut rec = vec![row.ray.to_string(), row.status.clone()];
        rec.extend(opt3(Some(tr.ray.origin)));
        rec.extend(opt3(Some(tr.ray.direction)));
        rec.extend(opt3(row.hit));
        rec.extend(opt3(row.transmitted));
        rec.extend(opt3(row.reflected));
        for v in [row.sin_theta_i, row.sin_theta_t, row.law_residual_t, row.law_residual_r] {
            rec.push(opt(v));
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn ray_rows(cfg: &RunConfig, traced: &[TracedRay]) -> Result<Vec<RayRow>> {
    let s = cfg.surface()?;
    let phi = cfg.phase()?;
    let (m1, m2) = (cfg.lower()?, cfg.upper()?);
    let mut rows = Vec::with_capacity(traced.len());
    for (k, tr) in traced.iter().enumerate() {
        let mut row = RayRow {
            ray: k,
            status: status_of(tr),
            hit: tr.hit_point(),
            transmitted: tr.transmitted().map(|r| r.k_out),
            reflected: tr.reflected().map(|r| r.k_out),
            sin_theta_i: None,
            sin_theta_t: None,
            law_residual_t: None,
            law_residual_r: None,
        };
        if let Some(p) = row.hit {
            let n = s.normals(p[0], p[1])?.n_hat;
            row.sin_theta_i = Some(tr.ray.direction.cross(&n).norm());
            row.sin_theta_t = row.transmitted.map(|k| k.cross(&n).norm());
            let residual = |r| {
                law_residual(&tr.ray.direction, r, p[0], p[1], &s, &phi, &m1, &m2, cfg.omega).map(|l| l.max())
            };
            row.law_residual_t = tr.transmitted().map(residual).transpose()?;
            row.law_residual_r = tr.reflected().map(residual).transpose()?;
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Serialize)]
struct TraceResults {
    rays: usize,
    hits: usize,
    escaped: usize,
    total_internal_reflection: usize,
    failed: usize,
    max_law_residual: f64,
    rows: Vec<RayRow>,
}

fn trace(cfg: &RunConfig, dir: &Path) -> Result<RunOutcome> {
    let s = cfg.surface()?;
    let phi = cfg.phase()?;
    let (m1, m2) = (cfg.lower()?, cfg.upper()?);
    let rays = incident_rays(cfg)?;
    let opts = TraceOptions {
        segment_length: cfg.trace.segment_length,
        ..TraceOptions::default()
    };
    let traced = trace_bundle(&rays, &s, &phi, &m1, &m2, cfg.omega, &opts);
    let rows = ray_rows(cfg, &traced)?;
    let rays_csv = dir.join("rays.csv");
    write_rays(&rays_csv, &traced, &rows)?;

    let count = |p: &dyn Fn(&TracedRay) -> bool| traced.iter().filter(|t| p(t)).count();
    let max_law_residual = rows
        .iter()
        .flat_map(|r| [r.law_residual_t, r.law_residual_r])
        .flatten()
        .fold(0.0, f64::max);
    let failed = count(&|t| matches!(t.outcome, RayOutcome::Failed(_)));
    let results = TraceResults {
        rays: traced.len(),
        hits: count(&|t| t.hit_point().is_some()),
        escaped: count(&|t| matches!(t.outcome, RayOutcome::Escaped)),
        total_internal_reflection: rows.iter().filter(|r| r.status == "tir").count(),
        failed,
        max_law_residual,
        rows,
    };
    let passed = failed == 0 && max_law_residual < cfg.trace.tol;
    finish(Subcommand::Trace, cfg, dir, passed, results, vec![rays_csv])
}

#[derive(Serialize)]
struct AuditResults {
    transmitted_amplitude: crate::math::CVec3,
    transmitted_direction: Vec3,
    report: JumpReport,
}

fn audit(cfg: &RunConfig, dir: &Path) -> Result<RunOutcome> {
    let a = &cfg.audit;
    let s = cfg.surface()?;
    let phi = cfg.phase()?;
    let (m1, m2) = (cfg.lower()?, cfg.upper()?);
    let incident = a.incident.build(cfg.omega, m1)?;
    let reflected = a.reflected.map(|r| r.build(cfg.omega, m1)).transpose()?;
    let transmitted = match &a.transmitted {
        Some(t) => t.build(cfg.omega, m2)?.with_phase(phi.clone()),
        None => {
            if reflected.is_some() {
                return Err(Error::bad_params(
                    "audit",
                    "an explicit transmitted wave is required when a reflected wave is given",
                ));
            }
            let [x1, x2] = a.match_point;
            let k_r = refract(&incident.k_dir, x1, x2, &s, &phi, &m1, &m2, cfg.omega)?.k_out;
            let p = s.point(x1, x2)?;
            let amp = tangential_match(
                &incident.amplitude,
                &incident.k_dir,
                &k_r,
                m1.speed(),
                m2.speed(),
                cfg.omega,
                &phi,
                &p,
                &s,
            )? * num_complex::Complex64::from(a.amplitude_scale);
            crate::fields::ModulatedWave::new(amp, k_r, cfg.omega, m2)?.with_phase(phi.clone())
        }
    };
    let samples: Vec<(f64, f64)> = linspace(-a.sample_half, a.sample_half, a.samples_per_axis)
        .flat_map(|dy| {
            linspace(-a.sample_half, a.sample_half, a.samples_per_axis)
                .map(move |dx| (a.match_point[0] + dx, a.match_point[1] + dy))
        })
        .collect();
    let report = boundary_audit(&incident, &transmitted, reflected.as_ref(), &s, a.time, &samples)?;

    let jumps_csv = dir.join("jumps.csv");
    let mut w = csv_writer(&jumps_csv)?;
    w.write_record([
        "x1", "x2", "x3", "e_cross_n_abs", "b_dot_n_abs", "mu_re", "mu_im", "nu_x_re", "nu_x_im", "nu_y_re",
        "nu_y_im", "nu_z_re", "nu_z_im",
    ])?;
    for j in &report.samples {
        let mut rec = vec![fmt_f64(j.point[0]), fmt_f64(j.point[1]), fmt_f64(j.point[2])];
        rec.push(fmt_f64(cnorm(&j.e_cross_n)));
        rec.push(fmt_f64(j.b_dot_n.norm()));
        rec.push(fmt_f64(j.mu_density.re));
        rec.push(fmt_f64(j.mu_density.im));
        for c in j.nu_density.iter() {
            rec.push(fmt_f64(c.re));
            rec.push(fmt_f64(c.im));
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(&jumps_csv, e))?;

    let passed = report.sup_e_cross_n < a.tol && report.sup_b_dot_n < a.tol;
    let results = AuditResults {
        transmitted_amplitude: transmitted.amplitude,
        transmitted_direction: transmitted.k_dir,
        report,
    };
    finish(Subcommand::Audit, cfg, dir, passed, results, vec![jumps_csv])
}

#[derive(Serialize)]
struct Benchmark {
    distributional: f64,
    surface_integral: f64,
    error: f64,
    passed: bool,
}

#[derive(Serialize)]
struct WeakcheckResults {
    benchmark: Benchmark,
    cases: Vec<JumpCase>,
    failed_cases: usize,
}

/// Step field `0` below / `(0, 0, 1)` above a flat interface: its
/// divergence is the surface measure, so the pairing equals `int_S f dS`.
pub fn step_benchmark(quad: &crate::quadrature::QuadSpec) -> Result<(f64, f64)> {
    let s = crate::geometry::Surface::flat(0.0, Rect::centered(2.0));
    let g = PiecewiseField::new(
        Piece::constant(crate::math::CVec3::zeros()),
        Piece::constant(crate::math::complexify(&Vec3::z())),
        s.clone(),
    );
    let tf = TestFunction::new(Vec3::new(0.05, -0.1, 0.1), 0.5)?;
    let div = dist_divergence(&g, &tf, quad)?;
    Ok((div.re, surface_integral(&s, &tf, quad)?))
}

fn weakcheck(cfg: &RunConfig, dir: &Path) -> Result<RunOutcome> {
    let w = &cfg.weakcheck;
    let (distributional, surface) = step_benchmark(&w.quadrature)?;
    let error = (distributional - surface).abs();
    let benchmark = Benchmark {
        distributional,
        surface_integral: surface,
        error,
        passed: error < w.benchmark_tol,
    };
    let cases = random_jump_suite(w.cases, cfg.seed, &w.quadrature, w.tol)?;
    let failed_cases = cases.iter().filter(|c| !c.passed).count();
    let passed = benchmark.passed && failed_cases == 0;
    let results = WeakcheckResults {
        benchmark,
        cases,
        failed_cases,
    };
    finish(Subcommand::Weakcheck, cfg, dir, passed, results, Vec::new())
}

fn admit(cfg: &RunConfig, dir: &Path) -> Result<RunOutcome> {
    let a = &cfg.admit;
    let s = cfg.surface()?;
    let wave = a.wave.build(cfg.omega, cfg.upper()?)?.with_phase(cfg.phase()?);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples: Vec<Vec3> = (0..a.samples)
        .map(|_| -> Result<Vec3> {
            let x1 = rng.random_range(-a.half..=a.half);
            let x2 = rng.random_range(-a.half..=a.half);
            let z = rng.random_range(a.z_min..=a.z_max);
            Ok(Vec3::new(x1, x2, s.u(x1, x2)? + z))
        })
        .collect::<Result<_>>()?;
    let report: AdmissibilityReport = admissibility_report(
        &wave,
        &samples,
        a.time,
        FdSteps::uniform(a.fd_step),
        a.orthogonality_tol,
        Some(&s),
    )?;
    // The ohmic verdict is informational only.
    let passed = report.admissible && report.max_residual < a.tol;
    finish(Subcommand::Admit, cfg, dir, passed, report, Vec::new())
}

#[derive(Serialize)]
struct DesignResults {
    curl_residual: f64,
    max_focus_distance: f64,
    focus_distances: Vec<f64>,
    rays: Vec<RayRow>,
}

fn design(cfg: &RunConfig, dir: &Path) -> Result<RunOutcome> {
    let d = &cfg.design;
    let s = cfg.surface()?;
    let (m1, m2) = (cfg.lower()?, cfg.upper()?);
    let k_i = Vec3::from(d.incident);
    if !(k_i.norm() > 0.0) {
        return Err(Error::ConfigParse("`design.incident` must be non-zero".into()));
    }
    let k_i = k_i.normalize();
    let focus = Vec3::from(d.focus);
    let grid = GridSpec::new(Rect::centered(d.half), d.grid, d.grid);
    let g = TangentialGradientField::point_focus(k_i, focus, m1, m2, s.clone());
    let integrated = integrate_phase(&g, &s, grid)?;
    let phase_csv = dir.join("phase.csv");
    integrated.write_csv(&phase_csv, cfg.omega, cfg.c)?;
    let phi = integrated.to_phase(cfg.omega, cfg.c);

    // Verification bundle aimed at evenly spaced design nodes.
    let n = d.rays_per_axis;
    let pick = |k: usize| -> usize {
        if n == 1 {
            (d.grid - 1) / 2
        } else {
            let lo = (d.grid - 1) / 10;
            let hi = d.grid - 1 - lo;
            lo + ((hi - lo) * k + (n - 1) / 2) / (n - 1)
        }
    };
    let mut rays = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let (x1, x2) = grid.node(pick(i), pick(j));
            rays.push(Ray::new(s.point(x1, x2)? - k_i, k_i));
        }
    }
    let traced = trace_bundle(&rays, &s, &phi, &m1, &m2, cfg.omega, &TraceOptions::default());
    let focus_distances: Vec<f64> = traced
        .iter()
        .map(|t| match (t.hit_point(), t.transmitted()) {
            (Some(p), Some(r)) => distance_to_ray(&p, &r.k_out, &focus),
            _ => f64::INFINITY,
        })
        .collect();
    let rows: Vec<RayRow> = traced
        .iter()
        .enumerate()
        .map(|(k, t)| RayRow {
            ray: k,
            status: status_of(t),
            hit: t.hit_point(),
            transmitted: t.transmitted().map(|r| r.k_out),
            reflected: t.reflected().map(|r| r.k_out),
            sin_theta_i: None,
            sin_theta_t: None,
            law_residual_t: None,
            law_residual_r: None,
        })
        .collect();
    let rays_csv = dir.join("rays.csv");
    write_rays(&rays_csv, &traced, &rows)?;
    let max_focus_distance = focus_distances.iter().copied().fold(0.0, f64::max);
    let passed = max_focus_distance < d.focus_tol && integrated.curl_residual < d.curl_tol;
    let results = DesignResults {
        curl_residual: integrated.curl_residual,
        max_focus_distance,
        focus_distances,
        rays: rows,
    };
    finish(Subcommand::Design, cfg, dir, passed, results, vec![phase_csv, rays_csv])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subcommand_names_round_trip() {
        for c in Subcommand::ALL {
            assert_eq!(c.name().parse::<Subcommand>().unwrap(), c);
        }
        assert!(matches!("plot".parse::<Subcommand>(), Err(Error::UnknownSubcommand(_))));
    }

    #[test]
    fn exit_codes() {
        let ok = Ok(RunOutcome {
            passed: true,
            files: vec![],
        });
        let bad = Ok(RunOutcome {
            passed: false,
            files: vec![],
        });
        assert_eq!(exit_code(&ok), 0);
        assert_eq!(exit_code(&bad), 2);
        assert_eq!(exit_code(&Err(Error::UnknownSubcommand("x".into()))), 1);
    }
}
