//! Generalized refraction and reflection laws across a phase-discontinuity
//! interface, and ray tracing through it.
//!
//! With `w = n1 k_i - grad(lambda0 phi / 2 pi)` at the hit point, the outgoing
//! direction is `k_out = (w - lambda nu) / n_out` where `lambda` solves
//! `lambda^2 |nu|^2 - 2 lambda (w . nu) + |w|^2 - n_out^2 = 0`. The larger
//! root always points into the upper region and the smaller one back into
//! the lower region, which is how the transmitted and reflected branches are
//! picked.

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::Medium;
use crate::geometry::{Region, Surface};
use crate::math::Vec3;
use crate::phase::PhaseDiscontinuity;

const GRAZING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Transmitted,
    Reflected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefractionResult {
    pub k_out: Vec3,
    /// Multiplier of `nu` in the law for the selected root.
    pub lambda: f64,
    pub branch: Branch,
    /// Both real roots of the quadratic, ascending.
    pub roots: [f64; 2],
}

/// Where the law is applied: the surface point, its normals and the scaled
/// phase gradient there.
struct Contact {
    nu: Vec3,
    n_hat: Vec3,
    phase_term: Vec3,
}

fn contact(
    k_i: &Vec3,
    x1: f64,
    x2: f64,
    s: &Surface,
    phi: &PhaseDiscontinuity,
    c: f64,
    omega: f64,
) -> Result<Contact> {
    if (k_i.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnit(k_i.norm()));
    }
    if !(omega > 0.0) {
        return Err(Error::bad_params("refract", "omega must be positive"));
    }
    let np = s.normals(x1, x2)?;
    let cos_i = k_i.dot(&np.n_hat);
    if cos_i.abs() < GRAZING_TOL {
        return Err(Error::GrazingIncidence(cos_i.abs()));
    }
    if cos_i < 0.0 {
        return Err(Error::WrongSideIncidence(cos_i));
    }
    let p = s.point(x1, x2)?;
    Ok(Contact {
        nu: np.nu,
        n_hat: np.n_hat,
        phase_term: phi.grad(&p) * (c / omega),
    })
}

fn solve_branch(
    k_i: &Vec3,
    n1: f64,
    n_out: f64,
    at: &Contact,
    branch: Branch,
) -> Result<RefractionResult> {
    let w = k_i * n1 - at.phase_term;
    let a = at.nu.norm_squared();
    let b = at.nu.dot(&w);
    let cc = w.norm_squared() - n_out * n_out;
    let discriminant = b * b - a * cc;
    if discriminant < 0.0 {
        return Err(match branch {
            Branch::Transmitted => Error::TotalInternalReflection { discriminant },
            Branch::Reflected => Error::NoBackwardRoot,
        });
    }
    // Stable form of (b +- sqrt(disc)) / a.
    let q = b + b.signum() * discriminant.sqrt();
    let (r1, r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / a, cc / q)
    };
    let roots = if r1 <= r2 { [r1, r2] } else { [r2, r1] };

    let want_forward = branch == Branch::Transmitted;
    let candidates: Vec<(f64, Vec3)> = roots
        .iter()
        .map(|&l| (l, (w - at.nu * l) / n_out))
        .filter(|(_, k)| {
            let f = k.dot(&at.n_hat);
            if want_forward {
                f > 0.0
            } else {
                f < 0.0
            }
        })
        .collect();
    let (lambda, k_out) = match candidates.as_slice() {
        [] => {
            return Err(match branch {
                Branch::Transmitted => Error::NoForwardRoot,
                Branch::Reflected => Error::NoBackwardRoot,
            })
        }
        [one] => *one,
        [first, second] => {
            warn!(
                "both roots {:?} qualify for {branch:?}; choosing the one closest to k_i",
                roots
            );
            if (first.1 - k_i).norm() <= (second.1 - k_i).norm() {
                *first
            } else {
                *second
            }
        }
        _ => unreachable!(),
    };
    Ok(RefractionResult {
        k_out,
        lambda,
        branch,
        roots,
    })
}

/// Transmitted direction for `k_i` hitting the surface above `(x1, x2)` from
/// below.
#[allow(clippy::too_many_arguments)]
pub fn refract(
    k_i: &Vec3,
    x1: f64,
    x2: f64,
    s: &Surface,
    phi: &PhaseDiscontinuity,
    m1: &Medium,
    m2: &Medium,
    omega: f64,
) -> Result<RefractionResult> {
    let at = contact(k_i, x1, x2, s, phi, m1.c, omega)?;
    solve_branch(k_i, m1.index(), m2.index(), &at, Branch::Transmitted)
}

/// Reflected direction back into the lower medium.
pub fn reflect(
    k_i: &Vec3,
    x1: f64,
    x2: f64,
    s: &Surface,
    phi: &PhaseDiscontinuity,
    m1: &Medium,
    omega: f64,
) -> Result<RefractionResult> {
    let at = contact(k_i, x1, x2, s, phi, m1.c, omega)?;
    solve_branch(k_i, m1.index(), m1.index(), &at, Branch::Reflected)
}

/// Violation of the law for a solved direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LawResidual {
    /// `|(n1 k_i - n_out k_out - grad(lambda0 phi / 2 pi)) x nu|`
    pub cross_nu: f64,
    /// Dot products of the same vector with `(1, 0, u_x1)` and `(0, 1, u_x2)`.
    pub tangential: [f64; 2],
    /// `|k_out| - 1`
    pub unit_defect: f64,
}

impl LawResidual {
    pub fn max(&self) -> f64 {
        self.cross_nu
            .max(self.tangential[0].abs())
            .max(self.tangential[1].abs())
    }
}

#[allow(clippy::too_many_arguments)]
pub fn law_residual(
    k_i: &Vec3,
    result: &RefractionResult,
    x1: f64,
    x2: f64,
    s: &Surface,
    phi: &PhaseDiscontinuity,
    m1: &Medium,
    m2: &Medium,
    omega: f64,
) -> Result<LawResidual> {
    let n_out = match result.branch {
        Branch::Transmitted => m2.index(),
        Branch::Reflected => m1.index(),
    };
    let p = s.point(x1, x2)?;
    let nu = s.normals(x1, x2)?.nu;
    let (t1, t2) = s.tangent_frame(x1, x2)?;
    let v = k_i * m1.index() - result.k_out * n_out - phi.grad(&p) * (m1.c / omega);
    Ok(LawResidual {
        cross_nu: v.cross(&nu).norm(),
        tangential: [v.dot(&t1), v.dot(&t2)],
        unit_defect: result.k_out.norm() - 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, direction: Vec3) -> Self {
        Self { origin, direction }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceOptions {
    /// Samples used to bracket the first crossing along the ray.
    pub bracket_samples: usize,
    /// Absolute tolerance on the ray parameter of the hit.
    pub root_tol: f64,
    /// Length of the outgoing segments reported for plotting.
    pub segment_length: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            bracket_samples: 512,
            root_tol: 1e-12,
            segment_length: 1.0,
        }
    }
}

#[derive(Debug)]
pub enum RayOutcome {
    Hit {
        point: Vec3,
        transmitted: Result<RefractionResult>,
        reflected: Result<RefractionResult>,
    },
    Escaped,
    Failed(Error),
}

#[derive(Debug)]
pub struct TracedRay {
    pub ray: Ray,
    pub outcome: RayOutcome,
}

impl TracedRay {
    pub fn hit_point(&self) -> Option<Vec3> {
        match &self.outcome {
            RayOutcome::Hit { point, .. } => Some(*point),
            _ => None,
        }
    }

    pub fn transmitted(&self) -> Option<&RefractionResult> {
        match &self.outcome {
            RayOutcome::Hit {
                transmitted: Ok(r), ..
            } => Some(r),
            _ => None,
        }
    }

    pub fn reflected(&self) -> Option<&RefractionResult> {
        match &self.outcome {
            RayOutcome::Hit { reflected: Ok(r), .. } => Some(r),
            _ => None,
        }
    }

    /// Polyline pieces `(label, start, end)`: the incoming leg and each
    /// outgoing leg of the given length.
    pub fn segments(&self, length: f64) -> Vec<(&'static str, Vec3, Vec3)> {
        let Some(hit) = self.hit_point() else {
            return vec![("escaped", self.ray.origin, self.ray.at(length))];
        };
        let mut out = vec![("incident", self.ray.origin, hit)];
        if let Some(t) = self.transmitted() {
            out.push(("transmitted", hit, hit + t.k_out * length));
        }
        if let Some(r) = self.reflected() {
            out.push(("reflected", hit, hit + r.k_out * length));
        }
        out
    }

    /// Point where the transmitted ray crosses the plane `x3 = z`.
    pub fn transmitted_at_height(&self, z: f64) -> Option<Vec3> {
        let hit = self.hit_point()?;
        let k = self.transmitted()?.k_out;
        (k[2].abs() > 0.0).then(|| hit + k * ((z - hit[2]) / k[2]))
    }
}

/// Distance from `target` to the half-line `start + s dir`, `s >= 0`.
pub fn distance_to_ray(start: &Vec3, dir: &Vec3, target: &Vec3) -> f64 {
    let d = target - start;
    let s = d.dot(dir).max(0.0) / dir.norm_squared();
    (d - dir * s).norm()
}

/// First crossing of the ray with the surface, or `None` if the ray leaves
/// the domain without crossing.
pub fn intersect(ray: &Ray, s: &Surface, opts: &TraceOptions) -> Result<Option<Vec3>> {
    let o = ray.origin;
    let k = ray.direction;
    if s.classify(&o)? != Region::Below {
        return Err(Error::bad_params("ray", "origin must lie below the surface"));
    }
    let f = |t: f64| {
        let p = ray.at(t);
        p[2] - s.height(p[0], p[1])
    };
    let dom = s.domain();
    let mut t_exit = f64::INFINITY;
    for (kc, oc, lo, hi) in [
        (k[0], o[0], dom.x1_min, dom.x1_max),
        (k[1], o[1], dom.x2_min, dom.x2_max),
    ] {
        if kc > 0.0 {
            t_exit = t_exit.min((hi - oc) / kc);
        } else if kc < 0.0 {
            t_exit = t_exit.min((lo - oc) / kc);
        }
    }
    if !t_exit.is_finite() {
        // Vertical ray: the height along it is constant.
        if k[2] <= 0.0 {
            return Ok(None);
        }
        return Ok(Some(s.point(o[0], o[1])?));
    }

    let n = opts.bracket_samples.max(2);
    let mut bracket = None;
    let mut prev = (0.0, f(0.0));
    for step in 1..=n {
        let t = t_exit * step as f64 / n as f64;
        let ft = f(t);
        if ft >= 0.0 {
            bracket = Some((prev.0, t));
            break;
        }
        prev = (t, ft);
    }
    let Some((mut lo, mut hi)) = bracket else {
        return Ok(None);
    };
    let df = |t: f64| {
        let p = ray.at(t);
        let (g1, g2) = s.gradient(p[0], p[1]);
        k[2] - g1 * k[0] - g2 * k[1]
    };
    while hi - lo > 1e-9 * (1.0 + hi) {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..20 {
        let d = df(t);
        if d == 0.0 {
            break;
        }
        let next = t - f(t) / d;
        if !(lo..=hi).contains(&next) {
            break;
        }
        let done = (next - t).abs() <= opts.root_tol;
        t = next;
        if done {
            break;
        }
    }
    let p = ray.at(t);
    Ok(Some(s.point(p[0], p[1])?))
}

/// Trace every ray to the surface and apply both laws at the hit. Per-ray
/// failures are recorded in the outcome; the bundle is never aborted.
#[allow(clippy::too_many_arguments)]
pub fn trace_bundle(
    rays: &[Ray],
    s: &Surface,
    phi: &PhaseDiscontinuity,
    m1: &Medium,
    m2: &Medium,
    omega: f64,
    opts: &TraceOptions,
) -> Vec<TracedRay> {
    rays.par_iter()
        .map(|ray| {
            let outcome = match intersect(ray, s, opts) {
                Ok(Some(point)) => RayOutcome::Hit {
                    point,
                    transmitted: refract(&ray.direction, point[0], point[1], s, phi, m1, m2, omega),
                    reflected: reflect(&ray.direction, point[0], point[1], s, phi, m1, omega),
                },
                Ok(None) => RayOutcome::Escaped,
                Err(e) => RayOutcome::Failed(e),
            };
            TracedRay { ray: *ray, outcome }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Rect;
    use crate::phase::required_tangential_gradient;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const OMEGA: f64 = 2.0 * PI;

    fn flat() -> Surface {
        Surface::flat(0.0, Rect::centered(2.0))
    }

    fn air() -> Medium {
        Medium::with_index(1.0)
    }

    fn glass() -> Medium {
        Medium::with_index(1.5)
    }

    fn dir_deg(theta: f64) -> Vec3 {
        let t = theta.to_radians();
        Vec3::new(t.sin(), 0.0, t.cos())
    }

    /// Phase whose scaled gradient `(c / omega) grad phi` equals `g`.
    fn gradient_phase(g: Vec3) -> PhaseDiscontinuity {
        PhaseDiscontinuity::linear(g * (OMEGA / 1.0))
    }

    #[test]
    fn matched_media_leave_direction_unchanged() {
        let k = dir_deg(25.0);
        let r = refract(&k, 0.1, 0.2, &flat(), &PhaseDiscontinuity::Zero, &air(), &air(), OMEGA).unwrap();
        assert_eq!(r.k_out, k);
        assert_eq!(r.lambda, 0.0);
        assert_eq!(r.branch, Branch::Transmitted);
    }

    #[test]
    fn classical_snell_at_thirty_degrees() {
        let r = refract(&dir_deg(30.0), 0.0, 0.0, &flat(), &PhaseDiscontinuity::Zero, &air(), &glass(), OMEGA)
            .unwrap();
        assert!((r.k_out[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.k_out[2] - (8.0f64 / 9.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn metasurface_gradient_bends_normal_ray_to_thirty_degrees() {
        let phi = gradient_phase(Vec3::new(-0.75, 0.0, 0.0));
        let r = refract(&Vec3::z(), 0.0, 0.0, &flat(), &phi, &air(), &glass(), OMEGA).unwrap();
        assert!((r.k_out[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn total_internal_reflection_beyond_critical_angle() {
        let err = refract(&dir_deg(60.0), 0.0, 0.0, &flat(), &PhaseDiscontinuity::Zero, &glass(), &air(), OMEGA);
        assert!(matches!(err, Err(Error::TotalInternalReflection { .. })));
        // just below asin(1/1.5) = 41.81 deg still transmits
        assert!(refract(&dir_deg(41.8), 0.0, 0.0, &flat(), &PhaseDiscontinuity::Zero, &glass(), &air(), OMEGA).is_ok());
    }

    #[test]
    fn grazing_and_wrong_side_rejected() {
        let p = PhaseDiscontinuity::Zero;
        assert!(matches!(
            refract(&Vec3::x(), 0.0, 0.0, &flat(), &p, &air(), &glass(), OMEGA),
            Err(Error::GrazingIncidence(_))
        ));
        assert!(matches!(
            refract(&-Vec3::z(), 0.0, 0.0, &flat(), &p, &air(), &glass(), OMEGA),
            Err(Error::WrongSideIncidence(_))
        ));
    }

    #[test]
    fn mirror_reflection() {
        let k = dir_deg(35.0);
        let r = reflect(&k, 0.0, 0.0, &flat(), &PhaseDiscontinuity::Zero, &air(), OMEGA).unwrap();
        assert!((r.k_out - Vec3::new(k[0], 0.0, -k[2])).norm() < 1e-15);
        assert_eq!(r.branch, Branch::Reflected);

        let tilted = Surface::plane(1.0, 0.0, 0.0, Rect::centered(2.0));
        let k = Vec3::new(-0.2, 0.3, 0.9).normalize();
        let n = tilted.normals(0.3, 0.3).unwrap().n_hat;
        let r = reflect(&k, 0.3, 0.3, &tilted, &PhaseDiscontinuity::Zero, &air(), OMEGA).unwrap();
        assert!((r.k_out - (k - n * (2.0 * k.dot(&n)))).norm() < 1e-12);
    }

    #[test]
    fn anomalous_reflection() {
        let g = 0.3;
        let phi = gradient_phase(Vec3::new(g, 0.0, 0.0));
        let k = dir_deg(20.0);
        let r = reflect(&k, 0.0, 0.0, &flat(), &phi, &air(), OMEGA).unwrap();
        assert!((r.k_out[0] - (k[0] - g)).abs() < 1e-12);
        assert!(r.k_out[2] < 0.0);
    }

    #[test]
    fn normal_component_of_phase_gradient_is_absorbed() {
        let k = dir_deg(15.0);
        let tangential = gradient_phase(Vec3::new(0.2, -0.1, 0.0));
        let with_normal = gradient_phase(Vec3::new(0.2, -0.1, 0.7));
        let a = refract(&k, 0.0, 0.0, &flat(), &tangential, &air(), &glass(), OMEGA).unwrap();
        let b = refract(&k, 0.0, 0.0, &flat(), &with_normal, &air(), &glass(), OMEGA).unwrap();
        assert!((a.k_out - b.k_out).norm() < 1e-14);
        assert!((a.lambda - b.lambda).abs() > 0.1);
    }

    #[test]
    fn designed_gradient_round_trip() {
        let s = Surface::paraboloid(0.0, 0.4, -0.3, Rect::centered(2.0));
        let k_i = Vec3::new(0.1, 0.2, 1.0).normalize();
        let target = Vec3::new(-0.3, 0.25, 1.0).normalize();
        let (x1, x2) = (0.5, -0.4);
        let g = required_tangential_gradient(&k_i, &target, x1, x2, (&air(), &glass()), &s).unwrap();
        let phi = gradient_phase(g);
        let r = refract(&k_i, x1, x2, &s, &phi, &air(), &glass(), OMEGA).unwrap();
        assert!((r.k_out - target).norm() < 1e-10);
    }

    #[test]
    fn frequency_covariance() {
        let s = Surface::plane(0.2, -0.1, 0.0, Rect::centered(2.0));
        let phi = PhaseDiscontinuity::quadratic(nalgebra::Matrix3::from_diagonal(&Vec3::new(0.5, 0.2, 0.0)));
        let k = Vec3::new(0.1, 0.1, 1.0).normalize();
        let a = refract(&k, 0.3, 0.4, &s, &phi, &air(), &glass(), 1.0).unwrap();
        let b = refract(&k, 0.3, 0.4, &s, &phi.clone().scaled(2.0), &air(), &glass(), 2.0).unwrap();
        assert!((a.k_out - b.k_out).norm() < 1e-15);
    }

    #[test]
    fn single_normal_ray_goes_straight() {
        let rays = [Ray::new(Vec3::new(0.0, 0.0, -1.0), Vec3::z())];
        let out = trace_bundle(&rays, &flat(), &PhaseDiscontinuity::Zero, &air(), &glass(), OMEGA, &TraceOptions::default());
        assert_eq!(out[0].hit_point().unwrap(), Vec3::zeros());
        assert!((out[0].transmitted().unwrap().k_out - Vec3::z()).norm() < 1e-15);
    }

    #[test]
    fn oblique_ray_hits_curved_surface_accurately() {
        let s = Surface::new(
            crate::geometry::SurfaceShape::GaussianBump {
                amplitude: 0.3,
                center: [0.2, 0.0],
                sigma: 0.5,
            },
            Rect::centered(2.0),
        )
        .unwrap();
        let ray = Ray::new(Vec3::new(-1.0, -0.3, -1.0), Vec3::new(0.5, 0.2, 1.0).normalize());
        let hit = intersect(&ray, &s, &TraceOptions::default()).unwrap().unwrap();
        assert!((hit[2] - s.u(hit[0], hit[1]).unwrap()).abs() < 1e-14);
        assert!(distance_to_ray(&ray.origin, &ray.direction, &hit) < 1e-11);
    }

    #[test]
    fn rays_leaving_the_domain_escape() {
        let rays = [
            Ray::new(Vec3::new(1.9, 0.0, -1.0), Vec3::new(1.0, 0.0, 0.1).normalize()),
            Ray::new(Vec3::new(0.0, 0.0, 1.0), Vec3::z()),
        ];
        let out = trace_bundle(&rays, &flat(), &PhaseDiscontinuity::Zero, &air(), &glass(), OMEGA, &TraceOptions::default());
        assert!(matches!(out[0].outcome, RayOutcome::Escaped));
        assert!(matches!(out[1].outcome, RayOutcome::Failed(_)));
    }

    proptest! {
        #[test]
        fn zero_phase_matches_vector_snell(
            a in -0.8..0.8f64, b in -0.8..0.8f64,
            theta in 0.0..1.2f64, az in 0.0..std::f64::consts::TAU,
            n1 in 1.0..2.0f64, n2 in 1.0..2.0f64,
        ) {
            let s = Surface::plane(a, b, 0.0, Rect::centered(1.0));
            let n = s.normals(0.1, 0.1).unwrap().n_hat;
            // build k_i at angle theta from n_hat
            let t = n.cross(&Vec3::new(az.cos(), az.sin(), 0.0)).normalize();
            let k = (n * theta.cos() + t * theta.sin()).normalize();
            let m1 = Medium::with_index(n1);
            let m2 = Medium::with_index(n2);
            let ratio = n1 / n2;
            let cos_i = k.dot(&n);
            let sin2_t = ratio * ratio * (1.0 - cos_i * cos_i);
            prop_assume!(sin2_t < 1.0 - 1e-6);
            let expect = k * ratio + n * ((1.0 - sin2_t).sqrt() - ratio * cos_i);
            let r = refract(&k, 0.1, 0.1, &s, &PhaseDiscontinuity::Zero, &m1, &m2, OMEGA).unwrap();
            prop_assert!((r.k_out - expect).norm() < 1e-12);
        }
    }
}
