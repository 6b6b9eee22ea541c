//! Admissibility of modulated waves in the upper medium: the transversality
//! condition, the magnetic field obtained from Faraday's law, the current
//! density Ampere's law then demands, and the ohmic-current test.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{
    fd_divergence, maxwell_residual, FdSteps, GaugeField, MaxwellFields, MaxwellResiduals, Medium,
    ModulatedWave, Zero,
};
use crate::geometry::Surface;
use crate::math::{cdot_real, complexify, CVec3, Vec3, I};
use crate::phase::PhaseDiscontinuity;

/// `sup |A . (omega k + grad phi)|` over `samples`, with `k = k_dir / v`
/// computed from the medium.
pub fn check_orthogonality(
    a: &CVec3,
    k_dir: &Vec3,
    medium: &Medium,
    omega: f64,
    phi: &PhaseDiscontinuity,
    samples: &[Vec3],
) -> f64 {
    let k = k_dir / medium.speed();
    samples
        .iter()
        .map(|x| cdot_real(a, &(k * omega + phi.grad(x))).norm())
        .fold(0.0, f64::max)
}

/// Current density making Ampere's law hold for a wave and its constructed
/// magnetic field: `J = m(x) E`, plus `(c / 4 pi) curl C` for a non-constant
/// gauge field `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RequiredCurrent {
    pub multiplier: Complex64,
    /// `(c / 4 pi) curl C(x)`; zero for constant gauges.
    pub gauge_term: CVec3,
}

impl RequiredCurrent {
    /// `Some(m)` when `J` is a pure multiple of `E`.
    pub fn as_multiplier(&self) -> Option<Complex64> {
        (self.gauge_term == CVec3::zeros()).then_some(self.multiplier)
    }

    pub fn current(&self, e: &CVec3) -> CVec3 {
        e * self.multiplier + self.gauge_term
    }
}

/// `m(x) = (c / 4 pi) [ i omega eps / c - (c / (mu omega)) (lap phi + i |omega k + grad phi|^2) ]`.
pub fn required_current(w: &ModulatedWave, gauge: Option<&dyn GaugeField>, x: &Vec3) -> RequiredCurrent {
    let m = &w.medium;
    let four_pi = 4.0 * std::f64::consts::PI;
    let b = w.total_phase_gradient(x);
    let bracket = I * (w.omega * m.eps / m.c)
        - (Complex64::from(w.phase_laplacian(x)) + I * b.norm_squared()) * (m.c / (m.mu * w.omega));
    let gauge_term = gauge.map_or_else(CVec3::zeros, |g| g.curl(x) * Complex64::from(m.c / four_pi));
    RequiredCurrent {
        multiplier: bracket * (m.c / four_pi),
        gauge_term,
    }
}

/// `E`, the constructed `H` and the required `J` of one wave, ready for the
/// Maxwell residual. Charge density is zero.
pub struct AdmissibleTriple<'a> {
    pub wave: &'a ModulatedWave,
    pub gauge: Option<&'a dyn GaugeField>,
}

impl<'a> AdmissibleTriple<'a> {
    pub fn new(wave: &'a ModulatedWave, gauge: Option<&'a dyn GaugeField>) -> Self {
        Self { wave, gauge }
    }

    pub fn e(&self, x: &Vec3, t: f64) -> CVec3 {
        self.wave.eval_e(x, t)
    }

    pub fn h(&self, x: &Vec3, t: f64) -> CVec3 {
        self.wave.eval_h_constructed(self.gauge, x, t)
    }

    pub fn j(&self, x: &Vec3, t: f64) -> CVec3 {
        required_current(self.wave, self.gauge, x).current(&self.e(x, t))
    }

    pub fn residual(&self, x: &Vec3, t: f64, steps: FdSteps, guard: Option<&Surface>) -> Result<MaxwellResiduals> {
        let e = |x: &Vec3, t: f64| self.e(x, t);
        let h = |x: &Vec3, t: f64| self.h(x, t);
        let j = |x: &Vec3, t: f64| self.j(x, t);
        let fields = MaxwellFields {
            e: &e,
            h: &h,
            j: &j,
            rho: &Zero,
        };
        maxwell_residual(&fields, &self.wave.medium, x, t, steps, guard)
    }

    pub fn div_h(&self, x: &Vec3, t: f64, h: f64) -> f64 {
        let hf = |x: &Vec3, t: f64| self.h(x, t);
        fd_divergence(&hf, x, t, h).norm()
    }
}

/// Outcome of the ohmic-current test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OhmicVerdict {
    pub compatible: bool,
    /// `max |lap phi|` over the samples.
    pub max_laplacian: f64,
    /// `max | |omega k + grad phi| - omega / v2 |`.
    pub max_modulus_deviation: f64,
    /// Max residual of the least-squares affine fit of `phi`.
    pub fit_residual: f64,
}

/// Tolerance on both deviations for declaring a phase ohmic-compatible.
pub const OHMIC_TOL: f64 = 1e-8;

/// An ohmic current `J = sigma E` with constant gauge requires
/// `lap phi = 0` and `|omega k + grad phi| = omega / v2`, which forces `phi`
/// to be affine. At least ten non-coplanar samples are required for the fit.
pub fn ohmic_compatibility(
    phi: &PhaseDiscontinuity,
    omega: f64,
    k_dir: &Vec3,
    m2: &Medium,
    samples: &[Vec3],
) -> Result<OhmicVerdict> {
    if samples.len() < 10 {
        return Err(Error::bad_params("ohmic", "at least 10 samples are required"));
    }
    let v2 = m2.speed();
    let k = k_dir / v2;
    let mut max_laplacian: f64 = 0.0;
    let mut max_modulus_deviation: f64 = 0.0;
    for x in samples {
        max_laplacian = max_laplacian.max(phi.laplacian(x).abs());
        let modulus = (k * omega + phi.grad(x)).norm();
        max_modulus_deviation = max_modulus_deviation.max((modulus - omega / v2).abs());
    }
    let design = DMatrix::from_fn(samples.len(), 4, |r, c| if c == 0 { 1.0 } else { samples[r][c - 1] });
    let values = DVector::from_iterator(samples.len(), samples.iter().map(|x| phi.value(x)));
    let svd = design.clone().svd(true, true);
    if svd.rank(1e-12 * svd.singular_values.max()) < 4 {
        return Err(Error::bad_params("ohmic", "samples are coplanar"));
    }
    let coef = svd.solve(&values, 1e-14).map_err(|e| Error::Solver(e.to_string()))?;
    let fit_residual = (design * coef - values).amax();
    Ok(OhmicVerdict {
        compatible: max_laplacian < OHMIC_TOL && max_modulus_deviation < OHMIC_TOL,
        max_laplacian,
        max_modulus_deviation,
        fit_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRow {
    pub point: Vec3,
    pub multiplier: Complex64,
    pub residuals: MaxwellResiduals,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub orthogonality_sup: f64,
    pub admissible: bool,
    pub div_h_sup: f64,
    pub max_residual: f64,
    pub samples: Vec<SampleRow>,
    pub ohmic: Option<OhmicVerdict>,
}

/// Evaluate every admissibility check of `w` (with zero gauge) at `samples`
/// and time `t`. The ohmic test runs when at least ten samples are given.
pub fn admissibility_report(
    w: &ModulatedWave,
    samples: &[Vec3],
    t: f64,
    steps: FdSteps,
    orthogonality_tol: f64,
    guard: Option<&Surface>,
) -> Result<AdmissibilityReport> {
    let phi = w.phi.clone().unwrap_or(PhaseDiscontinuity::Zero);
    let orthogonality_sup = check_orthogonality(&w.amplitude, &w.k_dir, &w.medium, w.omega, &phi, samples);
    let triple = AdmissibleTriple::new(w, None);
    let mut rows = Vec::with_capacity(samples.len());
    let mut div_h_sup: f64 = 0.0;
    for x in samples {
        let residuals = triple.residual(x, t, steps, guard)?;
        div_h_sup = div_h_sup.max(residuals.gauss_magnetic);
        rows.push(SampleRow {
            point: *x,
            multiplier: required_current(w, None, x).multiplier,
            residuals,
        });
    }
    let ohmic = if samples.len() >= 10 {
        Some(ohmic_compatibility(&phi, w.omega, &w.k_dir, &w.medium, samples)?)
    } else {
        None
    };
    Ok(AdmissibilityReport {
        orthogonality_sup,
        admissible: orthogonality_sup < orthogonality_tol,
        div_h_sup,
        max_residual: rows.iter().map(|r| r.residuals.max()).fold(0.0, f64::max),
        samples: rows,
        ohmic,
    })
}

/// Unit amplitude direction orthogonal to `b`, preferring `hint`.
pub fn orthogonal_amplitude(b: &Vec3, hint: &Vec3) -> CVec3 {
    let bh = b.normalize();
    let mut a = hint - bh * hint.dot(&bh);
    if a.norm() < 1e-8 {
        let alt = if bh[0].abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        a = alt - bh * alt.dot(&bh);
    }
    complexify(&a.normalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ConstantGauge;
    use crate::math::cnorm;
    use std::f64::consts::PI;

    fn vacuum() -> Medium {
        Medium::new(1.0, 1.0)
    }

    fn line() -> Vec<Vec3> {
        (0..12)
            .map(|k| {
                let t = k as f64 / 11.0;
                Vec3::new(t - 0.5, 0.4 * t * t, 0.3 + 0.5 * t * t * t)
            })
            .collect()
    }

    #[test]
    fn orthogonality_examples() {
        let phi = PhaseDiscontinuity::linear(Vec3::x());
        let k = Vec3::z();
        let ok = check_orthogonality(&complexify(&Vec3::y()), &k, &vacuum(), 1.0, &phi, &line());
        assert_eq!(ok, 0.0);
        let bad = check_orthogonality(&complexify(&Vec3::x()), &k, &vacuum(), 1.0, &phi, &line());
        assert!((bad - 1.0).abs() < 1e-15);
    }

    #[test]
    fn radial_phase_breaks_constant_amplitude() {
        let phi = PhaseDiscontinuity::RadialFocusing {
            focus: Vec3::new(0.0, 0.0, 2.0),
            strength: 1.0,
            reference: 0.0,
        };
        let samples = line();
        let a = orthogonal_amplitude(&(Vec3::z() + phi.grad(&samples[0])), &Vec3::x());
        let sup = check_orthogonality(&a, &Vec3::z(), &vacuum(), 1.0, &phi, &samples);
        let direct = samples
            .iter()
            .map(|x| cdot_real(&a, &(Vec3::z() + phi.grad(x))).norm())
            .fold(0.0, f64::max);
        assert_eq!(sup, direct);
        assert!(sup > 1e-3);
    }

    #[test]
    fn lossless_plane_wave_needs_no_current() {
        let m = Medium::new(2.25, 1.0);
        let w = ModulatedWave::new(complexify(&Vec3::x()), Vec3::z(), 2.0 * PI, m).unwrap();
        let r = required_current(&w, None, &Vec3::new(0.3, 0.1, 0.2));
        assert!(r.multiplier.norm() < 1e-15);
    }

    #[test]
    fn quadratic_phase_multiplier() {
        let w = ModulatedWave::new(complexify(&Vec3::y()), Vec3::z(), 1.0, vacuum())
            .unwrap()
            .with_phase(PhaseDiscontinuity::quadratic(nalgebra::Matrix3::from_diagonal(&Vec3::new(2.0, 0.0, 0.0))));
        let r = required_current(&w, None, &Vec3::zeros());
        let expect = Complex64::new(-2.0 / (4.0 * PI), 0.0);
        assert!((r.as_multiplier().unwrap() - expect).norm() < 1e-15);
    }

    #[test]
    fn multiplier_real_negative_on_the_shell() {
        // |omega k + grad phi|^2 = omega^2 eps mu / c^2 with lap phi > 0
        let m = Medium::new(1.5, 1.2);
        let omega = 1.7;
        let w = ModulatedWave::new(complexify(&Vec3::y()), Vec3::z(), omega, m)
            .unwrap()
            .with_phase(PhaseDiscontinuity::quadratic(nalgebra::Matrix3::from_diagonal(&Vec3::new(0.8, 0.0, 0.0))));
        let r = required_current(&w, None, &Vec3::new(0.0, 0.4, 0.5));
        assert!(r.multiplier.im.abs() < 1e-15 && r.multiplier.re < 0.0);
    }

    #[test]
    fn gauge_curl_adds_a_current() {
        struct Swirl;
        impl GaugeField for Swirl {
            fn value(&self, x: &Vec3) -> CVec3 {
                complexify(&Vec3::new(-x[1], x[0], 0.0))
            }
            fn curl(&self, _x: &Vec3) -> CVec3 {
                complexify(&Vec3::new(0.0, 0.0, 2.0))
            }
        }
        let w = ModulatedWave::new(complexify(&Vec3::x()), Vec3::z(), 1.0, vacuum()).unwrap();
        let r = required_current(&w, Some(&Swirl), &Vec3::zeros());
        assert!(r.as_multiplier().is_none());
        let triple = AdmissibleTriple::new(&w, Some(&Swirl));
        let res = triple.residual(&Vec3::new(0.1, 0.2, 0.3), 0.0, FdSteps::default(), None).unwrap();
        assert!(res.max() < 1e-6, "{res:?}");
    }

    #[test]
    fn constant_gauge_changes_no_residual() {
        let phi = PhaseDiscontinuity::linear(Vec3::new(0.3, 0.0, 0.0));
        let w = ModulatedWave::new(complexify(&Vec3::y()), Vec3::z(), 1.0, vacuum())
            .unwrap()
            .with_phase(phi);
        let gauge = ConstantGauge(CVec3::new(Complex64::new(1.0, -2.0), Complex64::from(0.5), I));
        let x = Vec3::new(0.2, -0.1, 0.4);
        let plain = AdmissibleTriple::new(&w, None).residual(&x, 0.3, FdSteps::default(), None).unwrap();
        let gauged = AdmissibleTriple::new(&w, Some(&gauge)).residual(&x, 0.3, FdSteps::default(), None).unwrap();
        for (a, b) in plain.as_array().iter().zip(gauged.as_array()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(cnorm(&(AdmissibleTriple::new(&w, Some(&gauge)).h(&x, 0.3) - AdmissibleTriple::new(&w, None).h(&x, 0.3) - gauge.0)) < 1e-15);
    }

    #[test]
    fn ohmic_examples() {
        let m2 = Medium::with_index(1.5);
        let omega = 2.0 * PI;
        let k_dir = Vec3::z();
        let samples = line();
        // phi = (k' - omega k) . x with |k'| = omega / v2
        let k_prime = Vec3::new(0.6, 0.0, 0.8) * (omega / m2.speed());
        let exact = PhaseDiscontinuity::linear(k_prime - k_dir * (omega / m2.speed()));
        let v = ohmic_compatibility(&exact, omega, &k_dir, &m2, &samples).unwrap();
        assert!(v.compatible && v.fit_residual < 1e-6, "{v:?}");
        assert!(v.max_laplacian == 0.0 && v.max_modulus_deviation < 1e-12);

        let quad = PhaseDiscontinuity::quadratic(nalgebra::Matrix3::from_diagonal(&Vec3::new(2.0, 0.0, 0.0)));
        let v = ohmic_compatibility(&quad, omega, &k_dir, &m2, &samples).unwrap();
        assert!(!v.compatible && (v.max_laplacian - 2.0).abs() < 1e-12);

        let mismatched = PhaseDiscontinuity::linear(Vec3::new(2.0, 0.0, 0.0));
        let v = ohmic_compatibility(&mismatched, omega, &k_dir, &m2, &samples).unwrap();
        let modulus = (k_dir * (omega / m2.speed()) + Vec3::new(2.0, 0.0, 0.0)).norm();
        assert!(!v.compatible && v.max_laplacian == 0.0);
        assert!((v.max_modulus_deviation - (modulus - omega / m2.speed())).abs() < 1e-12);
    }

    #[test]
    fn ohmic_rejects_short_or_flat_samples() {
        let phi = PhaseDiscontinuity::Zero;
        let few = &line()[..5];
        assert!(ohmic_compatibility(&phi, 1.0, &Vec3::z(), &vacuum(), few).is_err());
        let flat: Vec<_> = (0..12).map(|k| Vec3::new(k as f64, (k * k) as f64, 0.0)).collect();
        assert!(ohmic_compatibility(&phi, 1.0, &Vec3::z(), &vacuum(), &flat).is_err());
    }
}
