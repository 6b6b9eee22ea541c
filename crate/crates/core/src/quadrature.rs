//! Tensor-product Gauss-Legendre quadrature over boxes cut by the interface.
//!
//! Volume integrals split every `(x1, x2)` quadrature column exactly at
//! `x3 = u(x1, x2)`, so integrands that jump across the interface are
//! integrated piecewise smoothly. Column sums are reduced pairwise in a fixed
//! order, which makes results independent of the thread count.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Region, Surface};
use crate::grid::Rect;
use crate::math::{pairwise_sum_rows, Vec3};

/// Refinement policy for the volume and surface quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    /// Cells per axis at the finest regular level.
    pub base_cells: usize,
    /// Gauss-Legendre points per axis per cell.
    pub order: usize,
    /// Extra doublings allowed when the two finest estimates disagree.
    pub max_refinements: usize,
    /// Agreement required between the two finest estimates, relative to
    /// `max(1, |estimate|)`.
    pub tol: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            base_cells: 32,
            order: 8,
            max_refinements: 1,
            tol: 1e-7,
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GlRule {
    points: Vec<(f64, f64)>,
}

impl GlRule {
    pub fn new(order: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(order.max(1)).expect("order >= 1"));
        let points = rule
            .nodes()
            .zip(rule.weights())
            .map(|(x, w)| (*x, *w))
            .collect();
        Self { points }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.points.iter().map(move |&(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Axis-aligned box `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl Aabb {
    pub fn around(center: &Vec3, half: f64) -> Self {
        Self {
            lo: center - Vec3::repeat(half),
            hi: center + Vec3::repeat(half),
        }
    }

    pub fn footprint(&self) -> Rect {
        Rect {
            x1_min: self.lo[0],
            x1_max: self.hi[0],
            x2_min: self.lo[1],
            x2_max: self.hi[1],
        }
    }
}

/// Integrate `f(x, side)` over `bbox` with `cells^3` cells, splitting each
/// quadrature column at the surface. `active(lo, hi)` may veto cells where
/// the integrand is known to vanish.
pub fn integrate_split_box<const N: usize, F, A>(
    bbox: &Aabb,
    s: &Surface,
    cells: usize,
    rule: &GlRule,
    active: A,
    f: F,
) -> [f64; N]
where
    F: Fn(&Vec3, Region) -> [f64; N] + Sync,
    A: Fn(&Vec3, &Vec3) -> bool + Sync,
{
    let h = (bbox.hi - bbox.lo) / cells as f64;
    let columns: Vec<[f64; N]> = (0..cells * cells)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % cells, idx / cells);
            let a1 = bbox.lo[0] + i as f64 * h[0];
            let a2 = bbox.lo[1] + j as f64 * h[1];
            let col_lo = Vec3::new(a1, a2, bbox.lo[2]);
            let col_hi = Vec3::new(a1 + h[0], a2 + h[1], bbox.hi[2]);
            let mut acc = [0.0; N];
            if !active(&col_lo, &col_hi) {
                return acc;
            }
            for (x1, w1) in rule.mapped(a1, a1 + h[0]) {
                for (x2, w2) in rule.mapped(a2, a2 + h[1]) {
                    let u = s.height(x1, x2);
                    let w12 = w1 * w2;
                    for k in 0..cells {
                        let z0 = bbox.lo[2] + k as f64 * h[2];
                        let z1 = z0 + h[2];
                        let cell_lo = Vec3::new(a1, a2, z0);
                        let cell_hi = Vec3::new(a1 + h[0], a2 + h[1], z1);
                        if !active(&cell_lo, &cell_hi) {
                            continue;
                        }
                        let pieces: [(f64, f64, Region); 2] = if u <= z0 {
                            [(z0, z1, Region::Above), (z1, z1, Region::Above)]
                        } else if u >= z1 {
                            [(z0, z1, Region::Below), (z1, z1, Region::Below)]
                        } else {
                            [(z0, u, Region::Below), (u, z1, Region::Above)]
                        };
                        for (za, zb, side) in pieces {
                            if zb <= za {
                                continue;
                            }
                            for (x3, w3) in rule.mapped(za, zb) {
                                let v = f(&Vec3::new(x1, x2, x3), side);
                                let w = w12 * w3;
                                for (a, b) in acc.iter_mut().zip(v) {
                                    *a += w * b;
                                }
                            }
                        }
                    }
                }
            }
            acc
        })
        .collect();
    pairwise_sum_rows(&columns)
}

/// Integrate `f(x1, x2)` over a rectangle with `cells^2` cells.
pub fn integrate_rect<const N: usize, F>(rect: &Rect, cells: usize, rule: &GlRule, f: F) -> [f64; N]
where
    F: Fn(f64, f64) -> [f64; N] + Sync,
{
    let h1 = (rect.x1_max - rect.x1_min) / cells as f64;
    let h2 = (rect.x2_max - rect.x2_min) / cells as f64;
    let rows: Vec<[f64; N]> = (0..cells * cells)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % cells, idx / cells);
            let a1 = rect.x1_min + i as f64 * h1;
            let a2 = rect.x2_min + j as f64 * h2;
            let mut acc = [0.0; N];
            for (x1, w1) in rule.mapped(a1, a1 + h1) {
                for (x2, w2) in rule.mapped(a2, a2 + h2) {
                    let v = f(x1, x2);
                    for (a, b) in acc.iter_mut().zip(v) {
                        *a += w1 * w2 * b;
                    }
                }
            }
            acc
        })
        .collect();
    pairwise_sum_rows(&rows)
}

/// Run `estimate(cells)` at half the base resolution and at the base, then
/// double up to `max_refinements` times until the two finest agree.
pub fn converge<const N: usize>(
    spec: &QuadSpec,
    estimate: impl Fn(usize) -> [f64; N],
) -> Result<[f64; N]> {
    let gap = |a: &[f64; N], b: &[f64; N]| {
        let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
            / scale
    };
    let mut cells = spec.base_cells.max(2);
    let mut coarse = estimate(cells / 2);
    let mut fine = estimate(cells);
    let mut diff = gap(&coarse, &fine);
    for _ in 0..spec.max_refinements {
        if diff <= spec.tol {
            break;
        }
        cells *= 2;
        coarse = fine;
        fine = estimate(cells);
        diff = gap(&coarse, &fine);
    }
    if diff > spec.tol || fine.iter().any(|v| !v.is_finite()) {
        return Err(Error::QuadratureBudgetExceeded(diff));
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_rule_integrates_polynomials_exactly() {
        let rule = GlRule::new(4);
        // degree 7 is exact for 4 points
        let v = rule.integrate(-0.5, 2.0, |x| x.powi(7) - 3.0 * x.powi(2));
        let exact = (2.0f64.powi(8) - 0.5f64.powi(8)) / 8.0 - (8.0 + 0.125);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn split_box_measures_region_volumes() {
        let s = Surface::plane(0.3, 0.0, 0.1, Rect::centered(2.0));
        let bbox = Aabb::around(&Vec3::zeros(), 1.0);
        let rule = GlRule::new(3);
        let [below, above] = integrate_split_box(&bbox, &s, 8, &rule, |_, _| true, |_, side| match side {
            Region::Below => [1.0, 0.0],
            _ => [0.0, 1.0],
        });
        // below volume = integral of (u + 1) over [-1,1]^2 = 4 * 1.1
        assert!((below - 4.4).abs() < 1e-12);
        assert!((above - 3.6).abs() < 1e-12);
    }

    #[test]
    fn converge_reports_budget_failure() {
        let spec = QuadSpec {
            base_cells: 4,
            order: 2,
            max_refinements: 0,
            tol: 1e-12,
        };
        let r = converge(&spec, |cells| [1.0 / cells as f64]);
        assert!(matches!(r, Err(Error::QuadratureBudgetExceeded(_))));
        let ok = converge(&spec, |_| [2.5]).unwrap();
        assert_eq!(ok, [2.5]);
    }
}
