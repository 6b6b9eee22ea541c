//! Acceptance gate. Each criterion runs at its stated tolerance and runtime
//! budget and prints one PASS/FAIL line; the process fails if any does.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use metasnell::admissibility::{check_orthogonality, ohmic_compatibility, AdmissibleTriple};
use metasnell::fields::{FdSteps, Medium, ModulatedWave};
use metasnell::geometry::{Surface, SurfaceShape};
use metasnell::grid::{GridSpec, Rect};
use metasnell::math::{ccross_real, cdot_real, cnorm, complexify, CVec3, Mat3, Vec3};
use metasnell::phase::{integrate_phase, PhaseDiscontinuity, TangentialGradientField};
use metasnell::quadrature::QuadSpec;
use metasnell::snell::{distance_to_ray, law_residual, refract, trace_bundle, Ray, TraceOptions};
use metasnell::weakform::{
    boundary_audit, dist_divergence, random_jump_suite, tangential_match, Piece, PiecewiseField, TestFunction,
};
use metasnell::Error;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn flat() -> Surface {
    Surface::flat(0.0, Rect::centered(2.0))
}

fn dir(theta: f64, azimuth: f64) -> Vec3 {
    Vec3::new(theta.sin() * azimuth.cos(), theta.sin() * azimuth.sin(), theta.cos())
}

/// Phase whose `grad(lambda0 phi / 2 pi)` is the constant `g`.
fn gradient_phase(g: Vec3, omega: f64, c: f64) -> PhaseDiscontinuity {
    PhaseDiscontinuity::linear(g * (omega / c))
}

fn classical_snell() -> Outcome {
    let omega = 2.0 * PI;
    let (m1, m2) = (Medium::with_index(1.0), Medium::with_index(1.5));
    let k_i = dir(30f64.to_radians(), 0.0);
    let r = refract(&k_i, 0.0, 0.0, &flat(), &PhaseDiscontinuity::Zero, &m1, &m2, omega).unwrap();
    let base_err = (r.k_out[0] - 1.0 / 3.0).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    while cases < 1000 {
        let n1 = rng.random_range(1.0..2.0);
        let n2 = rng.random_range(1.0..2.5);
        let theta = rng.random_range(0.0..85f64.to_radians());
        let az = rng.random_range(0.0..2.0 * PI);
        let sin2 = n1 * theta.sin() / n2;
        if sin2 >= 0.999 {
            continue;
        }
        let oracle = Vec3::new(sin2 * az.cos(), sin2 * az.sin(), (1.0 - sin2 * sin2).sqrt());
        let (x1, x2) = (rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let r = refract(
            &dir(theta, az),
            x1,
            x2,
            &flat(),
            &PhaseDiscontinuity::Zero,
            &Medium::with_index(n1),
            &Medium::with_index(n2),
            omega,
        )
        .unwrap();
        worst = worst.max((r.k_out - oracle).norm());
        cases += 1;
    }
    outcome(
        base_err < 1e-12 && worst < 1e-12,
        format!("|sin t2 - 1/3| = {base_err:.1e}, worst of 1000 = {worst:.1e}"),
    )
}

fn random_surface(rng: &mut ChaCha8Rng) -> Surface {
    let dom = Rect::centered(2.0);
    match rng.random_range(0..4u32) {
        0 => Surface::flat(rng.random_range(-0.5..0.5), dom),
        1 => Surface::plane(rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6), 0.1, dom),
        2 => Surface::paraboloid(0.0, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), dom),
        _ => Surface::new(
            SurfaceShape::GaussianBump {
                amplitude: rng.random_range(-0.4..0.4),
                center: [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)],
                sigma: rng.random_range(0.3..1.0),
            },
            dom,
        )
        .unwrap(),
    }
}

fn random_phase(rng: &mut ChaCha8Rng, omega: f64) -> PhaseDiscontinuity {
    // Phase gradients of order omega keep grad(lambda0 phi / 2 pi) of order 0.3.
    let s = 0.3 * omega;
    match rng.random_range(0..4u32) {
        0 => PhaseDiscontinuity::Zero,
        1 => PhaseDiscontinuity::linear(Vec3::new(
            rng.random_range(-s..s),
            rng.random_range(-s..s),
            rng.random_range(-s..s),
        )),
        2 => {
            let m = Mat3::from_fn(|_, _| rng.random_range(-s..s));
            PhaseDiscontinuity::quadratic((m + m.transpose()) * 0.25)
        }
        _ => PhaseDiscontinuity::RadialFocusing {
            focus: Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(1.0..4.0)),
            strength: -rng.random_range(0.0..s),
            reference: 0.0,
        },
    }
}

fn generalized_residual() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let omega = 2.0 * PI;
    let (mut solved, mut attempts) = (0, 0);
    let (mut cross, mut tangential): (f64, f64) = (0.0, 0.0);
    while solved < 200 && attempts < 2000 {
        attempts += 1;
        let s = random_surface(&mut rng);
        let phi = random_phase(&mut rng, omega);
        let m1 = Medium::with_index(rng.random_range(1.0..1.6));
        let m2 = Medium::with_index(rng.random_range(1.2..2.2));
        let k_i = dir(rng.random_range(0.0..0.6), rng.random_range(0.0..2.0 * PI));
        let (x1, x2) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let r = match refract(&k_i, x1, x2, &s, &phi, &m1, &m2, omega) {
            Ok(r) => r,
            Err(Error::TotalInternalReflection { .. } | Error::WrongSideIncidence(_)) => continue,
            Err(e) => panic!("unexpected error {e}"),
        };
        let l = law_residual(&k_i, &r, x1, x2, &s, &phi, &m1, &m2, omega).unwrap();
        cross = cross.max(l.cross_nu);
        tangential = tangential.max(l.tangential[0].abs()).max(l.tangential[1].abs());
        solved += 1;
    }
    outcome(
        solved == 200 && cross < 1e-10 && tangential < 1e-10,
        format!("{solved} solved in {attempts} draws, cross = {cross:.1e}, tangential = {tangential:.1e}"),
    )
}

fn scalar_law() -> Outcome {
    let omega = 2.0 * PI;
    let (n1, n2, g) = (1.5, 1.0, 0.3);
    let (m1, m2) = (Medium::with_index(n1), Medium::with_index(n2));
    let phi = gradient_phase(Vec3::new(g, 0.0, 0.0), omega, 1.0);
    let mut worst: f64 = 0.0;
    let mut mismatched = 0;
    let mut tir = 0;
    for k in 0..19 {
        let theta = (-81.0 + 9.0 * k as f64).to_radians();
        let k_i = dir(theta, 0.0);
        let predicted_tir = (n1 * theta.sin() - g).abs() > n2;
        match refract(&k_i, 0.2, -0.3, &flat(), &phi, &m1, &m2, omega) {
            Ok(r) => {
                if predicted_tir {
                    mismatched += 1;
                }
                worst = worst.max((n1 * theta.sin() - n2 * r.k_out[0] - g).abs());
            }
            Err(Error::TotalInternalReflection { .. }) => {
                tir += 1;
                if !predicted_tir {
                    mismatched += 1;
                }
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }
    outcome(
        worst < 1e-10 && mismatched == 0 && tir > 0,
        format!("worst = {worst:.1e}, TIR at {tir} of 19 angles, threshold mismatches = {mismatched}"),
    )
}

/// Integral of the bump over the plane `x3 = 0`, in polar coordinates with
/// composite Simpson in the radius.
fn plane_bump_oracle(tf: &TestFunction) -> f64 {
    let d2 = tf.center[2] * tf.center[2];
    let r2 = tf.radius * tf.radius;
    let rho_max = (r2 - d2).sqrt();
    let f = |rho: f64| {
        let s = (rho * rho + d2) / r2;
        if s >= 1.0 {
            0.0
        } else {
            2.0 * PI * rho * (-1.0 / (1.0 - s)).exp()
        }
    };
    let n = 200_000;
    let h = rho_max / n as f64;
    let mut acc = f(0.0) + f(rho_max);
    for k in 1..n {
        acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

fn weak_form() -> Outcome {
    let quad = QuadSpec::default();
    let g = PiecewiseField::new(
        Piece::constant(CVec3::zeros()),
        Piece::constant(complexify(&Vec3::z())),
        flat(),
    );
    let tf = TestFunction::new(Vec3::new(0.05, -0.1, 0.1), 0.5).unwrap();
    let div = dist_divergence(&g, &tf, &quad).unwrap();
    let bench = (div - Complex64::from(plane_bump_oracle(&tf))).norm();
    let cases = random_jump_suite(50, 42, &quad, 1e-5).unwrap();
    let failed = cases.iter().filter(|c| !c.passed).count();
    let worst = cases.iter().map(|c| c.check.max_error()).fold(0.0, f64::max);
    outcome(
        bench < 1e-6 && failed == 0,
        format!("benchmark error = {bench:.1e}, suite worst = {worst:.1e}, failed = {failed}/50"),
    )
}

fn jump_audit() -> Outcome {
    let omega = 2.0 * PI;
    let (m1, m2) = (Medium::with_index(1.0), Medium::with_index(1.5));
    let s = Surface::plane(0.2, -0.1, 0.05, Rect::centered(2.0));
    let phi = gradient_phase(Vec3::new(0.15, -0.05, 0.0), omega, 1.0);
    let k_i = dir(20f64.to_radians(), 0.4);
    let a_i = CVec3::new(Complex64::new(0.3, 0.1), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let a_i = a_i - complexify(&k_i) * cdot_real(&a_i, &k_i);
    let incident = ModulatedWave::new(a_i, k_i, omega, m1).unwrap();
    let (x1, x2) = (0.1, -0.2);
    let p = s.point(x1, x2).unwrap();
    let n = s.normals(x1, x2).unwrap().n_hat;
    let k_r = refract(&k_i, x1, x2, &s, &phi, &m1, &m2, omega).unwrap().k_out;
    let a_r = tangential_match(&a_i, &k_i, &k_r, m1.speed(), m2.speed(), omega, &phi, &p, &s).unwrap();
    let t = 0.37;

    let matched = ModulatedWave::new(a_r, k_r, omega, m2).unwrap().with_phase(phi.clone());
    let report = boundary_audit(&incident, &matched, None, &s, t, &[(x1, x2)]).unwrap();
    let matched_sup = report.sup_e_cross_n;

    let scaled = matched.clone().with_amplitude(a_r * Complex64::from(1.7));
    let report = boundary_audit(&incident, &scaled, None, &s, t, &[(x1, x2)]).unwrap();
    let analytic = ccross_real(&(scaled.eval_e(&p, t) - incident.eval_e(&p, t)), &n);
    let diff = cnorm(&(report.samples[0].e_cross_n - analytic));
    let size = cnorm(&analytic);
    outcome(
        matched_sup < 1e-10 && size > 1e-3 && diff < 1e-8,
        format!("matched = {matched_sup:.1e}, scaled |[[E]] x n| = {size:.3}, vs analytic = {diff:.1e}"),
    )
}

fn end_to_end_admissibility() -> Outcome {
    let vacuum = Medium::new(1.0, 1.0);
    let omega = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let points: Vec<Vec3> = (0..20)
        .map(|_| {
            Vec3::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(0.1..0.6))
        })
        .collect();
    let linear = PhaseDiscontinuity::linear(Vec3::new(0.3, 0.0, 0.0));
    let quadratic = PhaseDiscontinuity::quadratic(Mat3::from_diagonal(&Vec3::new(0.4, 0.0, 0.0)));
    // k = z; A = y is orthogonal to omega k + grad phi for both phases.
    let a = complexify(&Vec3::y());
    let mut lines = Vec::new();
    let mut passed = true;
    for (name, phi) in [("linear", linear), ("quadratic", quadratic)] {
        let orth = check_orthogonality(&a, &Vec3::z(), &vacuum, omega, &phi, &points);
        let w = ModulatedWave::new(a, Vec3::z(), omega, vacuum).unwrap().with_phase(phi);
        let triple = AdmissibleTriple::new(&w, None);
        let worst = |h: f64| {
            points
                .iter()
                .map(|x| triple.residual(x, 0.2, FdSteps::uniform(h), Some(&flat())).unwrap().max())
                .fold(0.0, f64::max)
        };
        let (r4, r2, r1) = (worst(4e-3), worst(2e-3), worst(1e-3));
        let ratios = [r4 / r2, r2 / r1];
        let quadratic_decay = ratios.iter().all(|q| (3.5..4.5).contains(q));
        passed &= orth < 1e-10 && r1 < 1e-6 && quadratic_decay;
        lines.push(format!("{name}: residual {r1:.1e}, ratios {:.2}/{:.2}", ratios[0], ratios[1]));
    }
    outcome(passed, lines.join("; "))
}

fn ohmic_remark() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let omega = 2.0 * PI;
    let samples: Vec<Vec3> = (0..12)
        .map(|_| Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.1..1.0)))
        .collect();
    let mut compatible_ok = 0;
    let mut worst_fit: f64 = 0.0;
    for _ in 0..10 {
        let m2 = Medium::with_index(rng.random_range(1.0..2.0));
        let k_dir = dir(rng.random_range(0.0..1.0), rng.random_range(0.0..2.0 * PI));
        let k = k_dir / m2.speed();
        let k_prime = dir(rng.random_range(0.0..1.2), rng.random_range(0.0..2.0 * PI)) * (omega / m2.speed());
        let phi = PhaseDiscontinuity::Linear {
            offset: rng.random_range(-3.0..3.0),
            a: k_prime - k * omega,
        };
        let v = ohmic_compatibility(&phi, omega, &k_dir, &m2, &samples).unwrap();
        worst_fit = worst_fit.max(v.fit_residual);
        if v.compatible && v.fit_residual < 1e-6 {
            compatible_ok += 1;
        }
    }
    let mut incompatible_ok = 0;
    for k in 0..10 {
        let m2 = Medium::with_index(rng.random_range(1.0..2.0));
        let phi = if k % 2 == 0 {
            let m = Mat3::from_fn(|_, _| rng.random_range(-2.0..2.0));
            let q = (m + m.transpose()) * 0.5 + Mat3::identity() * 0.5;
            PhaseDiscontinuity::quadratic(q)
        } else {
            PhaseDiscontinuity::RadialFocusing {
                focus: Vec3::new(0.0, 0.0, rng.random_range(2.0..5.0)),
                strength: rng.random_range(1.0..5.0),
                reference: 0.0,
            }
        };
        let v = ohmic_compatibility(&phi, omega, &Vec3::z(), &m2, &samples).unwrap();
        if !v.compatible {
            incompatible_ok += 1;
        }
    }
    outcome(
        compatible_ok == 10 && incompatible_ok == 10,
        format!("compatible {compatible_ok}/10 (worst fit {worst_fit:.1e}), incompatible {incompatible_ok}/10"),
    )
}

fn design_round_trip() -> Outcome {
    let omega = 2.0 * PI;
    let (m1, m2) = (Medium::with_index(1.0), Medium::with_index(1.5));
    let s = flat();
    let k_i = dir(10f64.to_radians(), 0.0);
    let focus = Vec3::new(0.1, 0.05, 4.0);
    let grid = GridSpec::new(Rect::centered(0.25), 64, 64);
    let g = TangentialGradientField::point_focus(k_i, focus, m1, m2, s.clone());
    let designed = integrate_phase(&g, &s, grid).unwrap();
    let phi = designed.to_phase(omega, 1.0);
    let mut rays = Vec::new();
    for j in 0..5 {
        for i in 0..5 {
            let target = Vec3::new(-0.2 + 0.1 * i as f64 + 0.013, -0.2 + 0.1 * j as f64 - 0.007, 0.0);
            rays.push(Ray::new(target - k_i, k_i));
        }
    }
    let traced = trace_bundle(&rays, &s, &phi, &m1, &m2, omega, &TraceOptions::default());
    let worst = traced
        .iter()
        .map(|t| match (t.hit_point(), t.transmitted()) {
            (Some(p), Some(r)) => distance_to_ray(&p, &r.k_out, &focus),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    outcome(
        worst < 1e-3 && designed.curl_residual < 1e-6,
        format!("worst focus miss = {worst:.1e}, curl residual = {:.1e}", designed.curl_residual),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("1 classical Snell reduction", Duration::from_secs(1), classical_snell),
        ("2 generalized Snell residual", Duration::from_secs(5), generalized_residual),
        ("3 scalar metasurface law", Duration::from_secs(1), scalar_law),
        ("4 weak-form decomposition", Duration::from_secs(60), weak_form),
        ("5 interface jump audit", Duration::from_secs(5), jump_audit),
        ("6 end-to-end admissibility", Duration::from_secs(10), end_to_end_admissibility),
        ("7 ohmic remark", Duration::from_secs(1), ohmic_remark),
        ("8 design round trip", Duration::from_secs(10), design_round_trip),
    ];
    let mut failures = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let ok = o.passed && elapsed < budget;
        if !ok {
            failures += 1;
        }
        println!(
            "acceptance {name}: {} ({}; {:.2}s of {}s)",
            if ok { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
