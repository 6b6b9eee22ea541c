//! Phase discontinuities `phi(x)` imprinted by the interface, their
//! derivatives, and inverse design of `phi` from a prescribed refraction map.
//!
//! Only the tangential part of `grad(lambda0 phi / 2 pi)` enters the
//! refraction law. Designed phases therefore carry a purely tangential
//! gradient on the interface and are extended off it without a normal
//! derivative.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Medium;
use crate::geometry::Surface;
use crate::grid::{GridData, GridSpec};
use crate::math::{Mat3, Vec3};

/// Analytic phase supplied by the caller.
pub trait PhaseFn: Send + Sync {
    fn value(&self, x: &Vec3) -> f64;
    fn grad(&self, x: &Vec3) -> Vec3;
    fn hessian(&self, x: &Vec3) -> Mat3;
}

/// Real phase `phi(x)` in radians with gradient, Hessian and Laplacian.
#[derive(Clone)]
pub enum PhaseDiscontinuity {
    Zero,
    /// `offset + a . x`
    Linear { offset: f64, a: Vec3 },
    /// `offset + b . x + x^T q x / 2` with symmetric `q`.
    Quadratic { offset: f64, b: Vec3, q: Mat3 },
    /// `strength * (|x - focus| - reference)`. With `strength = n2 omega / c`
    /// this focuses a normally incident beam at `focus`.
    RadialFocusing {
        focus: Vec3,
        strength: f64,
        reference: f64,
    },
    Sampled(SampledPhase),
    Designed(DesignedPhase),
    Scaled {
        factor: f64,
        inner: Box<PhaseDiscontinuity>,
    },
    Custom(Arc<dyn PhaseFn>),
}

impl fmt::Debug for PhaseDiscontinuity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Linear { offset, a } => write!(f, "Linear({offset}, {:?})", a.as_slice()),
            Self::Quadratic { offset, b, q } => {
                write!(f, "Quadratic({offset}, {:?}, {:?})", b.as_slice(), q.as_slice())
            }
            Self::RadialFocusing {
                focus,
                strength,
                reference,
            } => write!(f, "RadialFocusing({:?}, {strength}, {reference})", focus.as_slice()),
            Self::Sampled(s) => write!(f, "Sampled({}x{})", s.values.spec.n1, s.values.spec.n2),
            Self::Designed(d) => write!(f, "Designed({}x{})", d.values.spec.n1, d.values.spec.n2),
            Self::Scaled { factor, inner } => write!(f, "Scaled({factor}, {inner:?})"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl PhaseDiscontinuity {
    pub fn linear(a: Vec3) -> Self {
        Self::Linear { offset: 0.0, a }
    }

    pub fn quadratic(q: Mat3) -> Self {
        Self::Quadratic {
            offset: 0.0,
            b: Vec3::zeros(),
            q,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self::Scaled {
            factor,
            inner: Box::new(self),
        }
    }

    pub fn value(&self, x: &Vec3) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Linear { offset, a } => offset + a.dot(x),
            Self::Quadratic { offset, b, q } => offset + b.dot(x) + 0.5 * x.dot(&(q * x)),
            Self::RadialFocusing {
                focus,
                strength,
                reference,
            } => strength * ((x - focus).norm() - reference),
            Self::Sampled(s) => s.values.bilinear(x[0], x[1]),
            Self::Designed(d) => d.values.bilinear(x[0], x[1]),
            Self::Scaled { factor, inner } => factor * inner.value(x),
            Self::Custom(p) => p.value(x),
        }
    }

    pub fn grad(&self, x: &Vec3) -> Vec3 {
        match self {
            Self::Zero => Vec3::zeros(),
            Self::Linear { a, .. } => *a,
            Self::Quadratic { b, q, .. } => b + q * x,
            Self::RadialFocusing {
                focus, strength, ..
            } => {
                let d = x - focus;
                d * (*strength / d.norm())
            }
            Self::Sampled(s) => s.grad(x),
            Self::Designed(d) => d.grad(x),
            Self::Scaled { factor, inner } => inner.grad(x) * *factor,
            Self::Custom(p) => p.grad(x),
        }
    }

    pub fn hessian(&self, x: &Vec3) -> Mat3 {
        match self {
            Self::Zero | Self::Linear { .. } => Mat3::zeros(),
            Self::Quadratic { q, .. } => *q,
            Self::RadialFocusing {
                focus, strength, ..
            } => {
                let d = x - focus;
                let r = d.norm();
                (Mat3::identity() - d * d.transpose() / (r * r)) * (*strength / r)
            }
            Self::Sampled(s) => s.hessian(x),
            Self::Designed(d) => d.hessian(x),
            Self::Scaled { factor, inner } => inner.hessian(x) * *factor,
            Self::Custom(p) => p.hessian(x),
        }
    }

    pub fn laplacian(&self, x: &Vec3) -> f64 {
        match self {
            Self::Zero | Self::Linear { .. } => 0.0,
            Self::Quadratic { q, .. } => q.trace(),
            Self::RadialFocusing {
                focus, strength, ..
            } => 2.0 * strength / (x - focus).norm(),
            Self::Sampled(s) => s.laplacian(x),
            Self::Scaled { factor, inner } => factor * inner.laplacian(x),
            _ => self.hessian(x).trace(),
        }
    }
}

/// Nodal derivative tables of a gridded phase, interpolated bilinearly.
#[derive(Debug, Clone)]
struct NodalDerivatives {
    g1: GridData,
    g2: GridData,
    hxx: GridData,
    hyy: GridData,
    hxy: GridData,
}

impl NodalDerivatives {
    /// Central differences with step equal to the grid spacing; second order
    /// one-sided formulas on the boundary rows.
    fn from_samples(f: &GridData) -> Self {
        let spec = f.spec;
        let (n1, n2) = (spec.n1, spec.n2);
        let d1 = |g: &GridData, i: usize, j: usize| -> f64 {
            let h = spec.h1();
            if n1 < 3 {
                (g.at(1, j) - g.at(0, j)) / h
            } else if i == 0 {
                (-3.0 * g.at(0, j) + 4.0 * g.at(1, j) - g.at(2, j)) / (2.0 * h)
            } else if i == n1 - 1 {
                (3.0 * g.at(i, j) - 4.0 * g.at(i - 1, j) + g.at(i - 2, j)) / (2.0 * h)
            } else {
                (g.at(i + 1, j) - g.at(i - 1, j)) / (2.0 * h)
            }
        };
        let d2 = |g: &GridData, i: usize, j: usize| -> f64 {
            let h = spec.h2();
            if n2 < 3 {
                (g.at(i, 1) - g.at(i, 0)) / h
            } else if j == 0 {
                (-3.0 * g.at(i, 0) + 4.0 * g.at(i, 1) - g.at(i, 2)) / (2.0 * h)
            } else if j == n2 - 1 {
                (3.0 * g.at(i, j) - 4.0 * g.at(i, j - 1) + g.at(i, j - 2)) / (2.0 * h)
            } else {
                (g.at(i, j + 1) - g.at(i, j - 1)) / (2.0 * h)
            }
        };
        let second = |g: &GridData, i: usize, j: usize, along_x1: bool| -> f64 {
            let (n, h) = if along_x1 {
                (n1, spec.h1())
            } else {
                (n2, spec.h2())
            };
            if n < 3 {
                return 0.0;
            }
            let k = if along_x1 { i } else { j }.clamp(1, n - 2);
            let at = |m: usize| if along_x1 { g.at(m, j) } else { g.at(i, m) };
            (at(k + 1) - 2.0 * at(k) + at(k - 1)) / (h * h)
        };
        let table = |f: &dyn Fn(usize, usize) -> f64| GridData {
            spec,
            values: spec.nodes().map(|(i, j, _, _)| f(i, j)).collect(),
        };
        let g1 = table(&|i, j| d1(f, i, j));
        let g2 = table(&|i, j| d2(f, i, j));
        let hxx = table(&|i, j| second(f, i, j, true));
        let hyy = table(&|i, j| second(f, i, j, false));
        let hxy = table(&|i, j| d2(&g1, i, j));
        Self {
            g1,
            g2,
            hxx,
            hyy,
            hxy,
        }
    }

    fn hessian(&self, x: &Vec3) -> Mat3 {
        let (a, b, c) = (
            self.hxx.bilinear(x[0], x[1]),
            self.hyy.bilinear(x[0], x[1]),
            self.hxy.bilinear(x[0], x[1]),
        );
        Mat3::new(a, c, 0.0, c, b, 0.0, 0.0, 0.0, 0.0)
    }
}

/// Phase sampled on an `(x1, x2)` grid, constant along `x3`.
#[derive(Debug, Clone)]
pub struct SampledPhase {
    values: GridData,
    derivs: NodalDerivatives,
}

impl SampledPhase {
    pub fn new(values: GridData) -> Result<Self> {
        if values.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sampled phase"));
        }
        let derivs = NodalDerivatives::from_samples(&values);
        Ok(Self { values, derivs })
    }

    pub fn values(&self) -> &GridData {
        &self.values
    }

    fn grad(&self, x: &Vec3) -> Vec3 {
        Vec3::new(
            self.derivs.g1.bilinear(x[0], x[1]),
            self.derivs.g2.bilinear(x[0], x[1]),
            0.0,
        )
    }

    fn hessian(&self, x: &Vec3) -> Mat3 {
        self.derivs.hessian(x)
    }

    /// Five-point Laplacian interpolated from the nodes.
    fn laplacian(&self, x: &Vec3) -> f64 {
        self.derivs.hxx.bilinear(x[0], x[1]) + self.derivs.hyy.bilinear(x[0], x[1])
    }
}

/// Phase obtained by integrating a designed tangential gradient field. Values
/// come from the least-squares potential; the gradient interpolates the
/// designed field itself, so it is exact at grid nodes.
#[derive(Debug, Clone)]
pub struct DesignedPhase {
    values: GridData,
    grads: [GridData; 3],
    derivs: [NodalDerivatives; 3],
}

impl DesignedPhase {
    pub fn values(&self) -> &GridData {
        &self.values
    }

    fn grad(&self, x: &Vec3) -> Vec3 {
        Vec3::from_fn(|k, _| self.grads[k].bilinear(x[0], x[1]))
    }

    fn hessian(&self, x: &Vec3) -> Mat3 {
        let mut h = Mat3::zeros();
        for k in 0..3 {
            h[(k, 0)] = self.derivs[k].g1.bilinear(x[0], x[1]);
            h[(k, 1)] = self.derivs[k].g2.bilinear(x[0], x[1]);
        }
        0.5 * (h + h.transpose())
    }
}

/// Optional parameters for [`make_phase`]; each catalog entry reads the
/// fields it needs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseParams {
    pub offset: Option<f64>,
    pub a: Option<[f64; 3]>,
    pub b: Option<[f64; 3]>,
    pub q: Option<[[f64; 3]; 3]>,
    pub focus: Option<[f64; 3]>,
    pub strength: Option<f64>,
    pub reference: Option<f64>,
    pub csv: Option<std::path::PathBuf>,
}

/// Build a phase from the catalog: `zero`, `linear`, `quadratic`,
/// `radial-focusing`, `grid`.
pub fn make_phase(name: &str, params: &PhaseParams) -> Result<PhaseDiscontinuity> {
    let need = |v: Option<[f64; 3]>, field: &str| {
        v.map(Vec3::from).ok_or_else(|| Error::bad_params(name, format!("missing `{field}`")))
    };
    let finite = |v: &Vec3| v.iter().all(|c| c.is_finite());
    match name {
        "zero" => Ok(PhaseDiscontinuity::Zero),
        "linear" => {
            let a = need(params.a, "a")?;
            if !finite(&a) {
                return Err(Error::bad_params(name, "non-finite gradient"));
            }
            Ok(PhaseDiscontinuity::Linear {
                offset: params.offset.unwrap_or(0.0),
                a,
            })
        }
        "quadratic" => {
            let rows = params
                .q
                .ok_or_else(|| Error::bad_params(name, "missing `q`"))?;
            let q = Mat3::from_fn(|i, j| rows[i][j]);
            if (q - q.transpose()).amax() > 1e-14 * q.amax().max(1.0) {
                return Err(Error::bad_params(name, "`q` must be symmetric"));
            }
            Ok(PhaseDiscontinuity::Quadratic {
                offset: params.offset.unwrap_or(0.0),
                b: params.b.map(Vec3::from).unwrap_or_else(Vec3::zeros),
                q,
            })
        }
        "radial-focusing" => {
            let focus = need(params.focus, "focus")?;
            let strength = params
                .strength
                .ok_or_else(|| Error::bad_params(name, "missing `strength`"))?;
            if !strength.is_finite() {
                return Err(Error::bad_params(name, "non-finite strength"));
            }
            Ok(PhaseDiscontinuity::RadialFocusing {
                focus,
                strength,
                reference: params.reference.unwrap_or(focus.norm()),
            })
        }
        "grid" => {
            let path = params
                .csv
                .as_ref()
                .ok_or_else(|| Error::bad_params(name, "missing `csv`"))?;
            Ok(PhaseDiscontinuity::Sampled(SampledPhase::new(
                GridData::read_csv(path)?,
            )?))
        }
        other => Err(Error::UnknownCatalogEntry(other.to_string())),
    }
}

/// Tangent-plane projection `v - (v . n_hat) n_hat`.
fn tangential(v: &Vec3, n_hat: &Vec3) -> Vec3 {
    v - n_hat * v.dot(n_hat)
}

/// Tangential value that `grad(lambda0 phi / 2 pi)` must take at the surface
/// point above `(x1, x2)` so that `k_i` refracts into `target`.
pub fn required_tangential_gradient(
    k_i: &Vec3,
    target: &Vec3,
    x1: f64,
    x2: f64,
    media: (&Medium, &Medium),
    s: &Surface,
) -> Result<Vec3> {
    for k in [k_i, target] {
        if (k.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnit(k.norm()));
        }
    }
    let np = s.normals(x1, x2)?;
    let forward = target.dot(&np.n_hat);
    if forward <= 0.0 {
        return Err(Error::NonTransmittedTarget(forward));
    }
    let v = k_i * media.0.index() - target * media.1.index();
    Ok(tangential(&v, &np.n_hat))
}

type GradientFn = Arc<dyn Fn(&Vec3) -> Vec3 + Send + Sync>;

/// Field of tangent vectors on the interface, in units of refractive index
/// (the tangential part of `grad(lambda0 phi / 2 pi)`).
#[derive(Clone)]
pub struct TangentialGradientField {
    f: GradientFn,
}

impl fmt::Debug for TangentialGradientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TangentialGradientField")
    }
}

impl TangentialGradientField {
    /// Wrap an arbitrary field; values are projected onto the tangent plane
    /// of `s` when evaluated through [`Self::eval`].
    pub fn from_fn(f: impl Fn(&Vec3) -> Vec3 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    /// Tangential part of `grad(lambda0 phi / 2 pi)` for an existing phase.
    pub fn from_phase(phi: PhaseDiscontinuity, omega: f64, c: f64) -> Self {
        let scale = c / omega;
        Self::from_fn(move |p| phi.grad(p) * scale)
    }

    /// Field steering `k_i` toward a point `focus` in the upper medium.
    pub fn point_focus(k_i: Vec3, focus: Vec3, m1: Medium, m2: Medium, s: Surface) -> Self {
        Self::from_fn(move |p| {
            let target = (focus - p).normalize();
            required_tangential_gradient(&k_i, &target, p[0], p[1], (&m1, &m2), &s)
                .unwrap_or_else(|_| Vec3::repeat(f64::NAN))
        })
    }

    /// Evaluate at the surface point above `(x1, x2)`, projected tangentially.
    pub fn eval(&self, s: &Surface, x1: f64, x2: f64) -> Result<Vec3> {
        let p = s.point(x1, x2)?;
        let np = s.normals(x1, x2)?;
        Ok(tangential(&(self.f)(&p), &np.n_hat))
    }
}

/// Least-squares potential of a tangential gradient field on a grid.
#[derive(Debug, Clone)]
pub struct IntegratedPhase {
    /// Potential in length units (the quantity `lambda0 phi / 2 pi`), pinned
    /// to zero at the grid center node.
    pub potential: GridData,
    /// Designed tangential gradient at the nodes.
    pub gradients: Vec<Vec3>,
    /// Max over cells of the discrete circulation divided by the cell area.
    pub curl_residual: f64,
}

impl IntegratedPhase {
    /// Phase in radians for angular frequency `omega`: `phi = (omega / c) * potential`.
    pub fn to_phase(&self, omega: f64, c: f64) -> PhaseDiscontinuity {
        let scale = omega / c;
        let spec = self.potential.spec;
        let values = GridData {
            spec,
            values: self.potential.values.iter().map(|v| v * scale).collect(),
        };
        let grads: [GridData; 3] = std::array::from_fn(|k| GridData {
            spec,
            values: self.gradients.iter().map(|g| g[k] * scale).collect(),
        });
        let derivs = std::array::from_fn(|k| NodalDerivatives::from_samples(&grads[k]));
        PhaseDiscontinuity::Designed(DesignedPhase {
            values,
            grads,
            derivs,
        })
    }

    /// Export `x1,x2,phi` in radians.
    pub fn write_csv(&self, path: &Path, omega: f64, c: f64) -> Result<()> {
        let scale = omega / c;
        GridData {
            spec: self.potential.spec,
            values: self.potential.values.iter().map(|v| v * scale).collect(),
        }
        .write_csv(path, "phi")
    }
}

/// Integrate `g` over `grid` by least squares on the grid graph. Each edge
/// contributes the equation `psi_b - psi_a = h * (g_a + g_b) / 2 . t` with `t`
/// the tangent along the edge; the center node is pinned to zero.
pub fn integrate_phase(
    g: &TangentialGradientField,
    s: &Surface,
    grid: GridSpec,
) -> Result<IntegratedPhase> {
    let (n1, n2) = (grid.n1, grid.n2);
    if n1 < 2 || n2 < 2 {
        return Err(Error::SingularSystem(n1, n2));
    }
    let (h1, h2) = (grid.h1(), grid.h2());
    let mut gradients = Vec::with_capacity(grid.len());
    let mut gt1 = Vec::with_capacity(grid.len());
    let mut gt2 = Vec::with_capacity(grid.len());
    for (_, _, x1, x2) in grid.nodes() {
        let gv = g.eval(s, x1, x2)?;
        if gv.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("tangential gradient field"));
        }
        let (t1, t2) = s.tangent_frame(x1, x2)?;
        gt1.push(gv.dot(&t1));
        gt2.push(gv.dot(&t2));
        gradients.push(gv);
    }

    // Edge list: (a, b, increment).
    let mut edges = Vec::with_capacity(2 * grid.len());
    for j in 0..n2 {
        for i in 0..n1 - 1 {
            let (a, b) = (grid.index(i, j), grid.index(i + 1, j));
            edges.push((a, b, 0.5 * h1 * (gt1[a] + gt1[b])));
        }
    }
    for j in 0..n2 - 1 {
        for i in 0..n1 {
            let (a, b) = (grid.index(i, j), grid.index(i, j + 1));
            edges.push((a, b, 0.5 * h2 * (gt2[a] + gt2[b])));
        }
    }

    let pinned = grid.index(n1 / 2, n2 / 2);
    let unknown = |k: usize| -> Option<usize> {
        match k.cmp(&pinned) {
            std::cmp::Ordering::Less => Some(k),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(k - 1),
        }
    };
    let m = grid.len() - 1;
    let mut coo = CooMatrix::new(m, m);
    let mut rhs = nalgebra::DVector::<f64>::zeros(m);
    for &(a, b, d) in &edges {
        let (ua, ub) = (unknown(a), unknown(b));
        if let Some(ua) = ua {
            coo.push(ua, ua, 1.0);
            rhs[ua] -= d;
        }
        if let Some(ub) = ub {
            coo.push(ub, ub, 1.0);
            rhs[ub] += d;
        }
        if let (Some(ua), Some(ub)) = (ua, ub) {
            coo.push(ua, ub, -1.0);
            coo.push(ub, ua, -1.0);
        }
    }
    let normal = CscMatrix::from(&coo);
    let chol = CscCholesky::factor(&normal).map_err(|e| Error::Solver(format!("{e:?}")))?;
    let sol = chol.solve(&rhs);
    let values: Vec<f64> = (0..grid.len())
        .map(|k| unknown(k).map_or(0.0, |u| sol[(u, 0)]))
        .collect();

    let mut curl_residual: f64 = 0.0;
    for j in 0..n2 - 1 {
        for i in 0..n1 - 1 {
            let (p00, p10) = (grid.index(i, j), grid.index(i + 1, j));
            let (p01, p11) = (grid.index(i, j + 1), grid.index(i + 1, j + 1));
            let circulation = 0.5 * h1 * (gt1[p00] + gt1[p10]) + 0.5 * h2 * (gt2[p10] + gt2[p11])
                - 0.5 * h1 * (gt1[p01] + gt1[p11])
                - 0.5 * h2 * (gt2[p00] + gt2[p01]);
            curl_residual = curl_residual.max((circulation / (h1 * h2)).abs());
        }
    }

    Ok(IntegratedPhase {
        potential: GridData::new(grid, values)?,
        gradients,
        curl_residual,
    })
}

/// Vacuum wavelength `2 pi c / omega`.
pub fn vacuum_wavelength(omega: f64, c: f64) -> f64 {
    2.0 * PI * c / omega
}
