//! Distributional divergence and curl of fields that jump across the
//! interface, evaluated by pairing with smooth bump test functions.
//!
//! For a field with smooth pieces `G-` below and `G+` above the interface,
//!
//! ```text
//! <div G, f>  =  int_S f [[G]] . n dS  + int f div G+-  dx
//! <curl G, f> = -int_S f [[G]] x n dS  + int f curl G+- dx
//! ```
//!
//! with `[[G]] = G+ - G-` and `n` the unit normal into the upper region. The
//! left-hand sides are computed straight from the definitions
//! (`-int G . grad f` and `int G x grad f`), the right-hand sides from the
//! classical derivatives and one-sided interface limits, so comparing them is
//! an independent check of both.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{
    check_stencil, fd_divergence, fd_time_derivative_scalar, FdSteps, ModulatedWave, ScalarField,
    VectorField,
};
use crate::geometry::{Region, Surface, SurfaceShape};
use crate::grid::Rect;
use crate::math::{ccross_real, cdot_real, cnorm, complexify, CVec3, Vec3, I};
use crate::phase::PhaseDiscontinuity;
use crate::quadrature::{converge, integrate_rect, integrate_split_box, Aabb, GlRule, QuadSpec};

pub type CMat3 = Matrix3<Complex64>;

/// Standard mollifier `exp(-1 / (1 - |x - c|^2 / r^2))` supported in the ball
/// of radius `r` around `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestFunction {
    pub center: Vec3,
    pub radius: f64,
}

impl TestFunction {
    pub fn new(center: Vec3, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::bad_params("bump", "radius must be positive and center finite"));
        }
        Ok(Self { center, radius })
    }

    fn s(&self, x: &Vec3) -> f64 {
        (x - self.center).norm_squared() / (self.radius * self.radius)
    }

    pub fn value(&self, x: &Vec3) -> f64 {
        let s = self.s(x);
        if s >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - s)).exp()
        }
    }

    pub fn grad(&self, x: &Vec3) -> Vec3 {
        self.value_grad(x).1
    }

    pub fn value_grad(&self, x: &Vec3) -> (f64, Vec3) {
        let s = self.s(x);
        if s >= 1.0 {
            return (0.0, Vec3::zeros());
        }
        let one_minus = 1.0 - s;
        let v = (-1.0 / one_minus).exp();
        let g = (x - self.center) * (-2.0 * v / (self.radius * self.radius * one_minus * one_minus));
        (v, g)
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::around(&self.center, self.radius)
    }

    /// Whether the box `lo..hi` meets the open support ball.
    pub fn touches(&self, lo: &Vec3, hi: &Vec3) -> bool {
        let nearest = Vec3::from_fn(|k, _| self.center[k].clamp(lo[k], hi[k]));
        (nearest - self.center).norm() < self.radius
    }
}

type ValueFn = Arc<dyn Fn(&Vec3) -> CVec3 + Send + Sync>;
type JacobianFn = Arc<dyn Fn(&Vec3) -> CMat3 + Send + Sync>;
type BothFn = Arc<dyn Fn(&Vec3) -> (CVec3, CMat3) + Send + Sync>;

/// One smooth piece of a piecewise field, evaluable on a neighbourhood of
/// its region. The Jacobian `J[(i, j)] = dG_i / dx_j` is optional; central
/// differences are used otherwise.
#[derive(Clone)]
pub struct Piece {
    value: ValueFn,
    jacobian: Option<JacobianFn>,
    both: Option<BothFn>,
    fd_step: f64,
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Piece(analytic_jacobian={})", self.jacobian.is_some())
    }
}

impl Piece {
    pub fn new(value: impl Fn(&Vec3) -> CVec3 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(value),
            jacobian: None,
            both: None,
            fd_step: 1e-5,
        }
    }

    pub fn constant(v: CVec3) -> Self {
        let mut p = Self::new(move |_| v);
        p.jacobian = Some(Arc::new(|_| CMat3::zeros()));
        p
    }

    pub fn with_jacobian(mut self, j: impl Fn(&Vec3) -> CMat3 + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }

    /// Value and Jacobian from a single closure, for pieces where computing
    /// both together is cheaper.
    pub fn with_value_and_jacobian(
        mut self,
        both: impl Fn(&Vec3) -> (CVec3, CMat3) + Send + Sync + 'static,
    ) -> Self {
        let both: BothFn = Arc::new(both);
        let b = both.clone();
        self.jacobian = Some(Arc::new(move |x| b(x).1));
        self.both = Some(both);
        self
    }

    pub fn eval(&self, x: &Vec3) -> CVec3 {
        (self.value)(x)
    }

    pub fn eval_with_jacobian(&self, x: &Vec3) -> (CVec3, CMat3) {
        match &self.both {
            Some(b) => b(x),
            None => (self.eval(x), self.jacobian(x)),
        }
    }

    pub fn jacobian(&self, x: &Vec3) -> CMat3 {
        if let Some(j) = &self.jacobian {
            return j(x);
        }
        let h = self.fd_step;
        let mut m = CMat3::zeros();
        for j in 0..3 {
            let e = Vec3::ith(j, h);
            let d = (self.eval(&(x + e)) - self.eval(&(x - e))) / Complex64::from(2.0 * h);
            m.set_column(j, &d);
        }
        m
    }

    pub fn divergence(&self, x: &Vec3) -> Complex64 {
        self.jacobian(x).trace()
    }

    pub fn curl(&self, x: &Vec3) -> CVec3 {
        let j = self.jacobian(x);
        CVec3::new(
            j[(2, 1)] - j[(1, 2)],
            j[(0, 2)] - j[(2, 0)],
            j[(1, 0)] - j[(0, 1)],
        )
    }
}

/// Distance along the normal used for one-sided interface limits.
pub const LIMIT_DELTA: f64 = 1e-7;

/// Field equal to `minus` below the interface and `plus` above it.
#[derive(Debug, Clone)]
pub struct PiecewiseField {
    pub minus: Piece,
    pub plus: Piece,
    pub surface: Surface,
}

impl PiecewiseField {
    pub fn new(minus: Piece, plus: Piece, surface: Surface) -> Self {
        Self {
            minus,
            plus,
            surface,
        }
    }

    /// Single smooth field on both sides.
    pub fn smooth(piece: Piece, surface: Surface) -> Self {
        Self::new(piece.clone(), piece, surface)
    }

    fn piece(&self, side: Region) -> &Piece {
        match side {
            Region::Below => &self.minus,
            _ => &self.plus,
        }
    }

    pub fn eval(&self, x: &Vec3) -> Result<CVec3> {
        Ok(self.piece(self.surface.classify(x)?).eval(x))
    }

    /// Limit of the `side` piece at the surface point above `(x1, x2)`.
    pub fn one_sided_limit(&self, x1: f64, x2: f64, side: Region) -> CVec3 {
        let p = Vec3::new(x1, x2, self.surface.height(x1, x2));
        let n = self.surface.normals_unchecked(x1, x2).n_hat;
        let sign = if side == Region::Below { -1.0 } else { 1.0 };
        one_sided(&|x| self.piece(side).eval(x), &p, &(n * sign))
    }

    /// `[[G]] = G+ - G-` above `(x1, x2)`.
    pub fn jump(&self, x1: f64, x2: f64) -> CVec3 {
        self.one_sided_limit(x1, x2, Region::Above) - self.one_sided_limit(x1, x2, Region::Below)
    }
}

/// Limit of `f` at `p` approached along `dir`, from samples at `p + delta dir`
/// and `p + 2 delta dir` combined by Richardson extrapolation.
fn one_sided<T>(f: &dyn Fn(&Vec3) -> T, p: &Vec3, dir: &Vec3) -> T
where
    T: std::ops::Mul<Complex64, Output = T> + std::ops::Sub<Output = T>,
{
    let a = f(&(p + dir * LIMIT_DELTA));
    let b = f(&(p + dir * (2.0 * LIMIT_DELTA)));
    a * Complex64::from(2.0) - b
}

fn check_support(g: &PiecewiseField, tf: &TestFunction) -> Result<()> {
    let fp = tf.bounding_box().footprint();
    let dom = g.surface.domain();
    if dom.contains(fp.x1_min, fp.x2_min) && dom.contains(fp.x1_max, fp.x2_max) {
        Ok(())
    } else {
        Err(Error::SupportOutsideDomain)
    }
}

fn push(out: &mut [f64], at: usize, z: Complex64) {
    out[at] = z.re;
    out[at + 1] = z.im;
}

fn pull(v: &[f64], at: usize) -> Complex64 {
    Complex64::new(v[at], v[at + 1])
}

fn pull3(v: &[f64], at: usize) -> CVec3 {
    CVec3::new(pull(v, at), pull(v, at + 2), pull(v, at + 4))
}

/// Volume pairings in one pass:
/// `[-int G . grad f, int G x grad f, int f div G+-, int f curl G+-]`.
fn volume_pairings(g: &PiecewiseField, tf: &TestFunction, quad: &QuadSpec) -> Result<[f64; 16]> {
    check_support(g, tf)?;
    let rule = GlRule::new(quad.order);
    let bbox = tf.bounding_box();
    converge(quad, |cells| {
        integrate_split_box(
            &bbox,
            &g.surface,
            cells,
            &rule,
            |lo, hi| tf.touches(lo, hi),
            |x, side| {
                let mut out = [0.0; 16];
                let (f, grad) = tf.value_grad(x);
                if f == 0.0 {
                    return out;
                }
                let (v, jac) = g.piece(side).eval_with_jacobian(x);
                push(&mut out, 0, -cdot_real(&v, &grad));
                let c = ccross_real(&v, &grad);
                for k in 0..3 {
                    push(&mut out, 2 + 2 * k, c[k]);
                }
                push(&mut out, 8, jac.trace() * f);
                let curl = CVec3::new(
                    jac[(2, 1)] - jac[(1, 2)],
                    jac[(0, 2)] - jac[(2, 0)],
                    jac[(1, 0)] - jac[(0, 1)],
                );
                for k in 0..3 {
                    push(&mut out, 10 + 2 * k, curl[k] * f);
                }
                out
            },
        )
    })
}

/// Surface pairings `[int f [[G]] . n dS, -int f [[G]] x n dS]`.
fn surface_pairings(g: &PiecewiseField, tf: &TestFunction, quad: &QuadSpec) -> Result<[f64; 8]> {
    check_support(g, tf)?;
    let rule = GlRule::new(quad.order);
    let rect = tf.bounding_box().footprint();
    converge(quad, |cells| {
        integrate_rect(&rect, cells, &rule, |x1, x2| {
            let mut out = [0.0; 8];
            let p = Vec3::new(x1, x2, g.surface.height(x1, x2));
            let f = tf.value(&p);
            if f == 0.0 {
                return out;
            }
            let (g1, g2) = g.surface.gradient(x1, x2);
            // n dS = (-u_x1, -u_x2, 1) dx1 dx2
            let n_ds = Vec3::new(-g1, -g2, 1.0);
            let jump = g.jump(x1, x2);
            push(&mut out, 0, cdot_real(&jump, &n_ds) * f);
            let c = ccross_real(&jump, &n_ds);
            for k in 0..3 {
                push(&mut out, 2 + 2 * k, -c[k] * f);
            }
            out
        })
    })
}

/// `<div G, f> = -int G . grad f dx`.
pub fn dist_divergence(g: &PiecewiseField, tf: &TestFunction, quad: &QuadSpec) -> Result<Complex64> {
    Ok(pull(&volume_pairings(g, tf, quad)?, 0))
}

/// `<curl G, f> = int G x grad f dx`.
pub fn dist_curl(g: &PiecewiseField, tf: &TestFunction, quad: &QuadSpec) -> Result<CVec3> {
    Ok(pull3(&volume_pairings(g, tf, quad)?, 2))
}

/// Surface integral `int_S f dS` of the test function over the interface.
pub fn surface_integral(s: &Surface, tf: &TestFunction, quad: &QuadSpec) -> Result<f64> {
    let rule = GlRule::new(quad.order);
    let rect = tf.bounding_box().footprint();
    let [v] = converge(quad, |cells| {
        integrate_rect(&rect, cells, &rule, |x1, x2| {
            let p = Vec3::new(x1, x2, s.height(x1, x2));
            [tf.value(&p) * s.area_element(x1, x2)]
        })
    })?;
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarComparison {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VectorComparison {
    pub lhs: CVec3,
    pub rhs: CVec3,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpCheck {
    pub divergence: ScalarComparison,
    pub curl: VectorComparison,
    /// Surface parts of the right-hand sides, for reporting.
    pub surface_div: Complex64,
    pub surface_curl: CVec3,
}

impl JumpCheck {
    pub fn max_error(&self) -> f64 {
        self.divergence.error.max(self.curl.error)
    }
}

/// Compare both sides of the jump decomposition for divergence and curl.
pub fn jump_decomposition_check(
    g: &PiecewiseField,
    tf: &TestFunction,
    quad: &QuadSpec,
) -> Result<JumpCheck> {
    let vol = volume_pairings(g, tf, quad)?;
    let surf = surface_pairings(g, tf, quad)?;
    let lhs_div = pull(&vol, 0);
    let lhs_curl = pull3(&vol, 2);
    let surface_div = pull(&surf, 0);
    let surface_curl = pull3(&surf, 2);
    let rhs_div = surface_div + pull(&vol, 8);
    let rhs_curl = surface_curl + pull3(&vol, 10);
    Ok(JumpCheck {
        divergence: ScalarComparison {
            lhs: lhs_div,
            rhs: rhs_div,
            error: (lhs_div - rhs_div).norm(),
        },
        curl: VectorComparison {
            lhs: lhs_curl,
            rhs: rhs_curl,
            error: cnorm(&(lhs_curl - rhs_curl)),
        },
        surface_div,
        surface_curl,
    })
}

/// `<div (curl G), f>` with the curl taken as the distribution "piecewise
/// classical curl plus surface term". Vanishes for every `G`.
pub fn div_of_curl_pairing(g: &PiecewiseField, tf: &TestFunction, quad: &QuadSpec) -> Result<Complex64> {
    check_support(g, tf)?;
    let rule = GlRule::new(quad.order);
    let bbox = tf.bounding_box();
    let vol = converge(quad, |cells| {
        integrate_split_box(
            &bbox,
            &g.surface,
            cells,
            &rule,
            |lo, hi| tf.touches(lo, hi),
            |x, side| {
                let grad = tf.grad(x);
                if grad == Vec3::zeros() {
                    return [0.0, 0.0];
                }
                let z = cdot_real(&g.piece(side).curl(x), &grad);
                [z.re, z.im]
            },
        )
    })?;
    let rect = bbox.footprint();
    let surf = converge(quad, |cells| {
        integrate_rect(&rect, cells, &rule, |x1, x2| {
            let p = Vec3::new(x1, x2, g.surface.height(x1, x2));
            let grad = tf.grad(&p);
            if grad == Vec3::zeros() {
                return [0.0, 0.0];
            }
            let (g1, g2) = g.surface.gradient(x1, x2);
            let term = ccross_real(&g.jump(x1, x2), &Vec3::new(-g1, -g2, 1.0));
            let z = -cdot_real(&term, &grad);
            [z.re, z.im]
        })
    })?;
    // <div T, f> = -sum_i <T_i, d_i f>
    Ok(-(Complex64::new(vol[0], vol[1]) + Complex64::new(surf[0], surf[1])))
}

/// Interface quantities at one surface sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpSample {
    pub x1: f64,
    pub x2: f64,
    pub point: Vec3,
    /// `[[E]] x n`
    pub e_cross_n: CVec3,
    /// `[[B]] . n`
    pub b_dot_n: Complex64,
    /// Surface charge density `[[D]] . n / (4 pi)`.
    pub mu_density: Complex64,
    /// Surface current density `-(c / 4 pi) [[H]] x n`.
    pub nu_density: CVec3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpReport {
    pub samples: Vec<JumpSample>,
    pub sup_e_cross_n: f64,
    pub sup_b_dot_n: f64,
    pub sup_mu_density: f64,
    pub sup_nu_density: f64,
}

/// Audit the interface conditions for incident (+ optional reflected) waves
/// below and a transmitted wave above. Magnetic fields are the constructed
/// ones with zero gauge.
pub fn boundary_audit(
    incident: &ModulatedWave,
    transmitted: &ModulatedWave,
    reflected: Option<&ModulatedWave>,
    s: &Surface,
    t: f64,
    samples: &[(f64, f64)],
) -> Result<JumpReport> {
    let below_e = |x: &Vec3| {
        let mut e = incident.eval_e(x, t);
        if let Some(r) = reflected {
            e += r.eval_e(x, t);
        }
        e
    };
    let below_h = |x: &Vec3| {
        let mut h = incident.eval_h_constructed(None, x, t);
        if let Some(r) = reflected {
            h += r.eval_h_constructed(None, x, t);
        }
        h
    };
    let above_e = |x: &Vec3| transmitted.eval_e(x, t);
    let above_h = |x: &Vec3| transmitted.eval_h_constructed(None, x, t);
    let (m1, m2) = (incident.medium, transmitted.medium);
    let four_pi = 4.0 * std::f64::consts::PI;

    let mut out = Vec::with_capacity(samples.len());
    for &(x1, x2) in samples {
        let p = s.point(x1, x2)?;
        let n = s.normals(x1, x2)?.n_hat;
        let e_minus = one_sided(&below_e, &p, &-n);
        let e_plus = one_sided(&above_e, &p, &n);
        let h_minus = one_sided(&below_h, &p, &-n);
        let h_plus = one_sided(&above_h, &p, &n);
        let e_jump = e_plus - e_minus;
        let h_jump = h_plus - h_minus;
        let d_jump = e_plus * Complex64::from(m2.eps) - e_minus * Complex64::from(m1.eps);
        let b_jump = h_plus * Complex64::from(m2.mu) - h_minus * Complex64::from(m1.mu);
        out.push(JumpSample {
            x1,
            x2,
            point: p,
            e_cross_n: ccross_real(&e_jump, &n),
            b_dot_n: cdot_real(&b_jump, &n),
            mu_density: cdot_real(&d_jump, &n) / four_pi,
            nu_density: ccross_real(&h_jump, &n) * Complex64::from(-m2.c / four_pi),
        });
    }
    let sup = |f: &dyn Fn(&JumpSample) -> f64| out.iter().map(f).fold(0.0, f64::max);
    Ok(JumpReport {
        sup_e_cross_n: sup(&|s| cnorm(&s.e_cross_n)),
        sup_b_dot_n: sup(&|s| s.b_dot_n.norm()),
        sup_mu_density: sup(&|s| s.mu_density.norm()),
        sup_nu_density: sup(&|s| cnorm(&s.nu_density)),
        samples: out,
    })
}

/// Tangential amplitude of the transmitted wave that makes `[[E]] x n`
/// vanish at the surface point `p`:
/// `A_i^tan exp(i omega (k_i . p / v1 - k_r . p / v2)) exp(-i phi(p))`.
#[allow(clippy::too_many_arguments)]
pub fn tangential_match(
    a_i: &CVec3,
    k_i: &Vec3,
    k_r: &Vec3,
    v1: f64,
    v2: f64,
    omega: f64,
    phi: &PhaseDiscontinuity,
    p: &Vec3,
    s: &Surface,
) -> Result<CVec3> {
    let n = s.normals(p[0], p[1])?.n_hat;
    let normal_part = cdot_real(a_i, &n);
    let a_tan = a_i - complexify(&n) * normal_part;
    let phase = omega * (k_i.dot(p) / v1 - k_r.dot(p) / v2) - phi.value(p);
    Ok(a_tan * (I * phase).exp())
}

/// `|div J + d rho / dt|` by central differences at `x`.
pub fn continuity_residual(
    j: &dyn VectorField,
    rho: &dyn ScalarField,
    x: &Vec3,
    t: f64,
    steps: FdSteps,
    guard: Option<&Surface>,
) -> Result<f64> {
    if let Some(s) = guard {
        check_stencil(s, x, steps.h)?;
    }
    let r = fd_divergence(j, x, t, steps.h) + fd_time_derivative_scalar(rho, x, t, steps.ht);
    if !r.norm().is_finite() {
        return Err(Error::NonFinite("continuity residual"));
    }
    Ok(r.norm())
}

/// Complex quadratic vector polynomial `c0 + L x + (x^T Q_i x)_i`.
#[derive(Debug, Clone)]
pub struct QuadraticPiece {
    pub c0: CVec3,
    pub linear: CMat3,
    pub quad: [CMat3; 3],
}

impl QuadraticPiece {
    pub fn random(rng: &mut ChaCha8Rng, scale: f64) -> Self {
        let mut z = || Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale));
        let c0 = CVec3::new(z(), z(), z());
        let linear = CMat3::from_fn(|_, _| z());
        let quad = std::array::from_fn(|_| {
            let m = CMat3::from_fn(|_, _| z());
            (m + m.transpose()) * Complex64::from(0.5)
        });
        Self { c0, linear, quad }
    }

    pub fn value_and_jacobian(&self, x: &Vec3) -> (CVec3, CMat3) {
        let mut v = self.c0;
        let mut j = self.linear;
        for i in 0..3 {
            let mut acc = Complex64::default();
            for k in 0..3 {
                // (Q_i x)_k
                let y = self.quad[i][(k, 0)] * x[0] + self.quad[i][(k, 1)] * x[1] + self.quad[i][(k, 2)] * x[2];
                acc += y * x[k] + self.linear[(i, k)] * x[k];
                j[(i, k)] += y * 2.0;
            }
            v[i] += acc;
        }
        (v, j)
    }

    pub fn into_piece(self) -> Piece {
        let this = Arc::new(self);
        let v = this.clone();
        Piece::new(move |x| v.value_and_jacobian(x).0).with_value_and_jacobian(move |x| this.value_and_jacobian(x))
    }
}

/// One randomized decomposition case.
#[derive(Debug, Clone, Serialize)]
pub struct JumpCase {
    pub index: usize,
    pub surface: String,
    pub bump: TestFunction,
    pub check: JumpCheck,
    pub passed: bool,
}

/// Surfaces used by the randomized suite, all over `[-2, 2]^2`.
fn random_surface(rng: &mut ChaCha8Rng) -> (String, Surface) {
    let dom = Rect::centered(2.0);
    match rng.random_range(0..4u32) {
        0 => {
            let h = rng.random_range(-0.2..0.2);
            (format!("flat({h:.3})"), Surface::flat(h, dom))
        }
        1 => {
            let (a, b) = (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
            (format!("plane({a:.3},{b:.3})"), Surface::plane(a, b, 0.0, dom))
        }
        2 => {
            let (a, b) = (rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8));
            (format!("paraboloid({a:.3},{b:.3})"), Surface::paraboloid(0.0, a, b, dom))
        }
        _ => {
            let amp = rng.random_range(-0.3..0.3);
            let sigma = rng.random_range(0.4..1.0);
            let shape = SurfaceShape::GaussianBump {
                amplitude: amp,
                center: [0.1, -0.1],
                sigma,
            };
            (
                format!("gaussian-bump({amp:.3},{sigma:.3})"),
                Surface::new(shape, dom).expect("valid bump"),
            )
        }
    }
}

/// Randomized suite of piecewise-quadratic fields, bumps straddling the
/// interface, and catalog surfaces.
pub fn random_jump_suite(cases: usize, seed: u64, quad: &QuadSpec, tol: f64) -> Result<Vec<JumpCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cases);
    for index in 0..cases {
        let (name, surface) = random_surface(&mut rng);
        let minus = QuadraticPiece::random(&mut rng, 1.0).into_piece();
        let plus = QuadraticPiece::random(&mut rng, 1.0).into_piece();
        let radius = rng.random_range(0.3..0.6);
        let c1 = rng.random_range(-0.4..0.4);
        let c2 = rng.random_range(-0.4..0.4);
        let c3 = surface.height(c1, c2) + rng.random_range(-0.5..0.5) * radius;
        let bump = TestFunction::new(Vec3::new(c1, c2, c3), radius)?;
        let g = PiecewiseField::new(minus, plus, surface);
        let check = jump_decomposition_check(&g, &bump, quad)?;
        out.push(JumpCase {
            index,
            surface: name,
            bump,
            passed: check.max_error() < tol,
            check,
        });
    }
    Ok(out)
}
