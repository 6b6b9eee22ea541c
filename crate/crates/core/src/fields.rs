//! Media, plane and phase-modulated waves, and finite-difference Maxwell
//! residuals away from the interface.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Region, Surface};
use crate::math::{ccross_real, cdot_real, cnorm, CVec3, Vec3, I};
use crate::phase::PhaseDiscontinuity;

/// Complex vector field of position and time.
pub trait VectorField: Send + Sync {
    fn eval(&self, x: &Vec3, t: f64) -> CVec3;
}

impl<F> VectorField for F
where
    F: Fn(&Vec3, f64) -> CVec3 + Send + Sync,
{
    fn eval(&self, x: &Vec3, t: f64) -> CVec3 {
        self(x, t)
    }
}

/// Complex scalar field of position and time.
pub trait ScalarField: Send + Sync {
    fn eval(&self, x: &Vec3, t: f64) -> Complex64;
}

impl<F> ScalarField for F
where
    F: Fn(&Vec3, f64) -> Complex64 + Send + Sync,
{
    fn eval(&self, x: &Vec3, t: f64) -> Complex64 {
        self(x, t)
    }
}

/// The identically zero field, usable as either a vector or scalar field.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl VectorField for Zero {
    fn eval(&self, _: &Vec3, _: f64) -> CVec3 {
        CVec3::zeros()
    }
}

impl ScalarField for Zero {
    fn eval(&self, _: &Vec3, _: f64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

/// Time-independent field `C(x)` added to the constructed magnetic field,
/// together with its curl.
pub trait GaugeField: Send + Sync {
    fn value(&self, x: &Vec3) -> CVec3;
    fn curl(&self, x: &Vec3) -> CVec3;
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantGauge(pub CVec3);

impl GaugeField for ConstantGauge {
    fn value(&self, _: &Vec3) -> CVec3 {
        self.0
    }

    fn curl(&self, _: &Vec3) -> CVec3 {
        CVec3::zeros()
    }
}

/// Isotropic homogeneous medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub eps: f64,
    pub mu: f64,
    #[serde(default = "default_c")]
    pub c: f64,
}

fn default_c() -> f64 {
    1.0
}

impl Medium {
    pub fn new(eps: f64, mu: f64) -> Self {
        Self { eps, mu, c: 1.0 }
    }

    /// Non-magnetic medium (`mu = 1`) with refractive index `n`.
    pub fn with_index(n: f64) -> Self {
        Self::new(n * n, 1.0)
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.eps, self.mu, self.c]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::bad_params("medium", "eps, mu and c must be positive"))
        }
    }

    /// Refractive index `sqrt(eps mu)`.
    pub fn index(&self) -> f64 {
        (self.eps * self.mu).sqrt()
    }

    /// Phase speed `c / n`.
    pub fn speed(&self) -> f64 {
        self.c / self.index()
    }
}

/// `A exp(i omega (k . x / v - t)) exp(i phi(x))`; a plane wave when `phi` is
/// absent.
#[derive(Debug, Clone)]
pub struct ModulatedWave {
    pub amplitude: CVec3,
    pub k_dir: Vec3,
    pub omega: f64,
    pub medium: Medium,
    pub phi: Option<PhaseDiscontinuity>,
}

impl ModulatedWave {
    pub fn new(amplitude: CVec3, k_dir: Vec3, omega: f64, medium: Medium) -> Result<Self> {
        if (k_dir.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnit(k_dir.norm()));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::bad_params("wave", "omega must be positive"));
        }
        medium.validate()?;
        Ok(Self {
            amplitude,
            k_dir,
            omega,
            medium,
            phi: None,
        })
    }

    pub fn with_phase(mut self, phi: PhaseDiscontinuity) -> Self {
        self.phi = Some(phi);
        self
    }

    pub fn with_amplitude(mut self, amplitude: CVec3) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// Scaled wave vector `k_dir / v`.
    pub fn wave_vector(&self) -> Vec3 {
        self.k_dir / self.medium.speed()
    }

    /// Vacuum wavelength `2 pi c / omega`.
    pub fn lambda0(&self) -> f64 {
        crate::phase::vacuum_wavelength(self.omega, self.medium.c)
    }

    pub fn phase_value(&self, x: &Vec3) -> f64 {
        self.phi.as_ref().map_or(0.0, |p| p.value(x))
    }

    pub fn phase_grad(&self, x: &Vec3) -> Vec3 {
        self.phi.as_ref().map_or_else(Vec3::zeros, |p| p.grad(x))
    }

    pub fn phase_laplacian(&self, x: &Vec3) -> f64 {
        self.phi.as_ref().map_or(0.0, |p| p.laplacian(x))
    }

    /// Spatial gradient of the total phase, `omega k + grad phi`.
    pub fn total_phase_gradient(&self, x: &Vec3) -> Vec3 {
        self.wave_vector() * self.omega + self.phase_grad(x)
    }

    pub fn eval_e(&self, x: &Vec3, t: f64) -> CVec3 {
        let phase = self.omega * (self.wave_vector().dot(x) - t) + self.phase_value(x);
        self.amplitude * (I * phase).exp()
    }

    /// `H = -(c / (mu omega)) E x (omega k + grad phi) + C(x)`, the magnetic
    /// field obtained by integrating Faraday's law in time.
    pub fn eval_h_constructed(&self, gauge: Option<&dyn GaugeField>, x: &Vec3, t: f64) -> CVec3 {
        let m = &self.medium;
        let e = self.eval_e(x, t);
        let h = ccross_real(&e, &self.total_phase_gradient(x)) * Complex64::from(-m.c / (m.mu * self.omega));
        match gauge {
            Some(g) => h + g.value(x),
            None => h,
        }
    }

    pub fn sample(&self, gauge: Option<&dyn GaugeField>, x: &Vec3, t: f64) -> FieldSample {
        let e = self.eval_e(x, t);
        let h = self.eval_h_constructed(gauge, x, t);
        FieldSample {
            e,
            h,
            d: e * Complex64::from(self.medium.eps),
            b: h * Complex64::from(self.medium.mu),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub e: CVec3,
    pub h: CVec3,
    pub d: CVec3,
    pub b: CVec3,
}

/// Central-difference steps in space and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdSteps {
    pub h: f64,
    pub ht: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        Self { h: 1e-3, ht: 1e-3 }
    }
}

impl FdSteps {
    pub fn uniform(h: f64) -> Self {
        Self { h, ht: h }
    }
}

pub fn fd_divergence(f: &dyn VectorField, x: &Vec3, t: f64, h: f64) -> Complex64 {
    (0..3)
        .map(|j| {
            let e = Vec3::ith(j, h);
            (f.eval(&(x + e), t)[j] - f.eval(&(x - e), t)[j]) / (2.0 * h)
        })
        .sum()
}

pub fn fd_curl(f: &dyn VectorField, x: &Vec3, t: f64, h: f64) -> CVec3 {
    let d: [CVec3; 3] = std::array::from_fn(|j| {
        let e = Vec3::ith(j, h);
        (f.eval(&(x + e), t) - f.eval(&(x - e), t)) / Complex64::from(2.0 * h)
    });
    // d[j][i] = dF_i / dx_j
    CVec3::new(d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0])
}

pub fn fd_time_derivative(f: &dyn VectorField, x: &Vec3, t: f64, ht: f64) -> CVec3 {
    (f.eval(x, t + ht) - f.eval(x, t - ht)) / Complex64::from(2.0 * ht)
}

pub fn fd_time_derivative_scalar(f: &dyn ScalarField, x: &Vec3, t: f64, ht: f64) -> Complex64 {
    (f.eval(x, t + ht) - f.eval(x, t - ht)) / (2.0 * ht)
}

/// Fail unless every spatial stencil point lies strictly on the same side of
/// the interface as `x`.
pub fn check_stencil(s: &Surface, x: &Vec3, h: f64) -> Result<Region> {
    let region = s.classify(x)?;
    let crosses = region == Region::On
        || (0..3).any(|j| {
            let e = Vec3::ith(j, h);
            [x + e, x - e]
                .iter()
                .any(|p| s.classify(p).map_or(true, |r| r != region))
        });
    if crosses {
        Err(Error::StencilCrossesInterface([x[0], x[1], x[2]]))
    } else {
        Ok(region)
    }
}

/// The fields entering the Maxwell system in one region.
pub struct MaxwellFields<'a> {
    pub e: &'a dyn VectorField,
    pub h: &'a dyn VectorField,
    pub j: &'a dyn VectorField,
    pub rho: &'a dyn ScalarField,
}

/// Magnitudes of the four classical Maxwell residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxwellResiduals {
    /// `|div E - 4 pi rho / eps|`
    pub gauss_electric: f64,
    /// `|div H|`
    pub gauss_magnetic: f64,
    /// `|curl E + (mu / c) dH/dt|`
    pub faraday: f64,
    /// `|curl H - (4 pi / c) J - (eps / c) dE/dt|`
    pub ampere: f64,
}

impl MaxwellResiduals {
    pub fn as_array(&self) -> [f64; 4] {
        [self.gauss_electric, self.gauss_magnetic, self.faraday, self.ampere]
    }

    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }
}

/// Evaluate the Maxwell system with the material laws `D = eps E`,
/// `B = mu H` at `x` by central differences. When `guard` is given, the
/// stencil must not touch the interface.
pub fn maxwell_residual(
    fields: &MaxwellFields<'_>,
    m: &Medium,
    x: &Vec3,
    t: f64,
    steps: FdSteps,
    guard: Option<&Surface>,
) -> Result<MaxwellResiduals> {
    if let Some(s) = guard {
        check_stencil(s, x, steps.h)?;
    }
    let four_pi = 4.0 * std::f64::consts::PI;
    let div_e = fd_divergence(fields.e, x, t, steps.h);
    let div_h = fd_divergence(fields.h, x, t, steps.h);
    let curl_e = fd_curl(fields.e, x, t, steps.h);
    let curl_h = fd_curl(fields.h, x, t, steps.h);
    let dh_dt = fd_time_derivative(fields.h, x, t, steps.ht);
    let de_dt = fd_time_derivative(fields.e, x, t, steps.ht);
    let rho = fields.rho.eval(x, t);
    let j = fields.j.eval(x, t);

    let r = MaxwellResiduals {
        gauss_electric: (div_e - rho * (four_pi / m.eps)).norm(),
        gauss_magnetic: div_h.norm(),
        faraday: cnorm(&(curl_e + dh_dt * Complex64::from(m.mu / m.c))),
        ampere: cnorm(
            &(curl_h - j * Complex64::from(four_pi / m.c) - de_dt * Complex64::from(m.eps / m.c)),
        ),
    };
    if r.as_array().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("maxwell residual"));
    }
    Ok(r)
}

/// `A . (omega k + grad phi)` at `x` for a wave; zero means the divergence
/// of `E` vanishes there.
pub fn transversality(w: &ModulatedWave, x: &Vec3) -> Complex64 {
    cdot_real(&w.amplitude, &w.total_phase_gradient(x))
}
