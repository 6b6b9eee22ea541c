//! Graph interfaces `x3 = u(x1, x2)` and the lower/upper split of space.
//!
//! The lower region (`x3 < u`) holds medium I and the incident wave, the upper
//! region (`x3 > u`) holds medium II. Two normals are in play: the
//! unnormalized `nu = (u_x1, u_x2, -1)` that appears in the refraction law, and
//! the unit normal `n_hat = -nu / |nu|` pointing into the upper region.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridData, Rect};
use crate::math::Vec3;

type HeightFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;

/// Closed-form or sampled height function of the interface.
#[derive(Clone)]
pub enum SurfaceShape {
    /// `u = height`
    Flat { height: f64 },
    /// `u = a x1 + b x2 + c`
    Plane { a: f64, b: f64, c: f64 },
    /// `u = height + (a x1^2 + b x2^2) / 2`
    Paraboloid { height: f64, a: f64, b: f64 },
    /// `u = amplitude * exp(-|x - center|^2 / (2 sigma^2))`
    GaussianBump {
        amplitude: f64,
        center: [f64; 2],
        sigma: f64,
    },
    /// Bilinear interpolation of nodal heights.
    Sampled(GridData),
    /// User-supplied height with an optional analytic gradient.
    Custom { u: HeightFn, grad: Option<GradFn> },
}

impl fmt::Debug for SurfaceShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Flat { height } => write!(f, "Flat({height})"),
            Self::Plane { a, b, c } => write!(f, "Plane({a}, {b}, {c})"),
            Self::Paraboloid { height, a, b } => write!(f, "Paraboloid({height}, {a}, {b})"),
            Self::GaussianBump {
                amplitude,
                center,
                sigma,
            } => write!(f, "GaussianBump({amplitude}, {center:?}, {sigma})"),
            Self::Sampled(g) => write!(f, "Sampled({}x{})", g.spec.n1, g.spec.n2),
            Self::Custom { grad, .. } => write!(f, "Custom(analytic_grad={})", grad.is_some()),
        }
    }
}

/// Which side of the interface a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    Below,
    On,
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalPair {
    /// `(u_x1, u_x2, -1)`
    pub nu: Vec3,
    /// Unit normal toward the upper region.
    pub n_hat: Vec3,
}

/// Interface given as a graph over a rectangle. Immutable once built.
#[derive(Debug, Clone)]
pub struct Surface {
    shape: SurfaceShape,
    domain: Rect,
    tol_on: f64,
    fd_step: f64,
}

impl Surface {
    pub fn new(shape: SurfaceShape, domain: Rect) -> Result<Self> {
        match &shape {
            SurfaceShape::GaussianBump { sigma, .. } if !(*sigma > 0.0) => {
                return Err(Error::bad_params("gaussian-bump", "sigma must be positive"));
            }
            SurfaceShape::Sampled(g) => {
                let r = g.spec.rect;
                let inside = r.contains(domain.x1_min, domain.x2_min)
                    && r.contains(domain.x1_max, domain.x2_max);
                if !inside {
                    return Err(Error::bad_params("grid", "domain exceeds the sampled grid"));
                }
            }
            _ => {}
        }
        let diam = domain.diameter();
        Ok(Self {
            shape,
            domain,
            tol_on: 1e-10 * diam,
            fd_step: 1e-5 * diam,
        })
    }

    pub fn flat(height: f64, domain: Rect) -> Self {
        Self::new(SurfaceShape::Flat { height }, domain).expect("flat surface is always valid")
    }

    pub fn plane(a: f64, b: f64, c: f64, domain: Rect) -> Self {
        Self::new(SurfaceShape::Plane { a, b, c }, domain).expect("plane is always valid")
    }

    pub fn paraboloid(height: f64, a: f64, b: f64, domain: Rect) -> Self {
        Self::new(SurfaceShape::Paraboloid { height, a, b }, domain)
            .expect("paraboloid is always valid")
    }

    pub fn custom(
        u: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        grad: Option<GradFn>,
        domain: Rect,
    ) -> Self {
        Self::new(
            SurfaceShape::Custom {
                u: Arc::new(u),
                grad,
            },
            domain,
        )
        .expect("custom surface is always valid")
    }

    /// Override the on-surface classification tolerance.
    pub fn with_tol_on(mut self, tol_on: f64) -> Self {
        self.tol_on = tol_on;
        self
    }

    pub fn shape(&self) -> &SurfaceShape {
        &self.shape
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn tol_on(&self) -> f64 {
        self.tol_on
    }

    fn check(&self, x1: f64, x2: f64) -> Result<()> {
        if self.domain.contains(x1, x2) {
            Ok(())
        } else {
            Err(Error::OutOfDomain(x1, x2))
        }
    }

    pub fn u(&self, x1: f64, x2: f64) -> Result<f64> {
        self.check(x1, x2)?;
        Ok(self.height(x1, x2))
    }

    pub fn grad_u(&self, x1: f64, x2: f64) -> Result<(f64, f64)> {
        self.check(x1, x2)?;
        Ok(self.gradient(x1, x2))
    }

    /// Height without the domain check; callers guarantee `(x1, x2)` is valid.
    pub(crate) fn height(&self, x1: f64, x2: f64) -> f64 {
        match &self.shape {
            SurfaceShape::Flat { height } => *height,
            SurfaceShape::Plane { a, b, c } => a * x1 + b * x2 + c,
            SurfaceShape::Paraboloid { height, a, b } => height + 0.5 * (a * x1 * x1 + b * x2 * x2),
            SurfaceShape::GaussianBump {
                amplitude,
                center,
                sigma,
            } => {
                let r2 = (x1 - center[0]).powi(2) + (x2 - center[1]).powi(2);
                amplitude * (-r2 / (2.0 * sigma * sigma)).exp()
            }
            SurfaceShape::Sampled(g) => g.bilinear(x1, x2),
            SurfaceShape::Custom { u, .. } => u(x1, x2),
        }
    }

    pub(crate) fn gradient(&self, x1: f64, x2: f64) -> (f64, f64) {
        match &self.shape {
            SurfaceShape::Flat { .. } => (0.0, 0.0),
            SurfaceShape::Plane { a, b, .. } => (*a, *b),
            SurfaceShape::Paraboloid { a, b, .. } => (a * x1, b * x2),
            SurfaceShape::GaussianBump {
                amplitude,
                center,
                sigma,
            } => {
                let s2 = sigma * sigma;
                let (d1, d2) = (x1 - center[0], x2 - center[1]);
                let e = amplitude * (-(d1 * d1 + d2 * d2) / (2.0 * s2)).exp();
                (-e * d1 / s2, -e * d2 / s2)
            }
            SurfaceShape::Custom { grad: Some(g), .. } => g(x1, x2),
            SurfaceShape::Sampled(_) | SurfaceShape::Custom { grad: None, .. } => {
                let h = self.fd_step;
                (
                    (self.height(x1 + h, x2) - self.height(x1 - h, x2)) / (2.0 * h),
                    (self.height(x1, x2 + h) - self.height(x1, x2 - h)) / (2.0 * h),
                )
            }
        }
    }

    pub(crate) fn normals_unchecked(&self, x1: f64, x2: f64) -> NormalPair {
        let (g1, g2) = self.gradient(x1, x2);
        let nu = Vec3::new(g1, g2, -1.0);
        NormalPair {
            nu,
            n_hat: -nu / nu.norm(),
        }
    }

    /// Point `(x1, x2, u(x1, x2))` on the interface.
    pub fn point(&self, x1: f64, x2: f64) -> Result<Vec3> {
        Ok(Vec3::new(x1, x2, self.u(x1, x2)?))
    }

    pub fn classify(&self, p: &Vec3) -> Result<Region> {
        let u = self.u(p[0], p[1])?;
        Ok(self.classify_against(p[2], u))
    }

    pub(crate) fn classify_against(&self, x3: f64, u: f64) -> Region {
        if x3 < u - self.tol_on {
            Region::Below
        } else if (x3 - u).abs() <= self.tol_on {
            Region::On
        } else {
            Region::Above
        }
    }

    pub fn normals(&self, x1: f64, x2: f64) -> Result<NormalPair> {
        self.check(x1, x2)?;
        Ok(self.normals_unchecked(x1, x2))
    }

    /// Tangent vectors `(1, 0, u_x1)` and `(0, 1, u_x2)`.
    pub fn tangent_frame(&self, x1: f64, x2: f64) -> Result<(Vec3, Vec3)> {
        let (g1, g2) = self.grad_u(x1, x2)?;
        Ok((Vec3::new(1.0, 0.0, g1), Vec3::new(0.0, 1.0, g2)))
    }

    /// Surface measure density `sqrt(1 + |grad u|^2)` with respect to `dx1 dx2`.
    pub fn area_element(&self, x1: f64, x2: f64) -> f64 {
        let (g1, g2) = self.gradient(x1, x2);
        (1.0 + g1 * g1 + g2 * g2).sqrt()
    }
}
