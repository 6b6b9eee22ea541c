// Inverse design of a flat lens. The phase that bends a tilted plane wave
// into a point focus is computed on a grid by least squares, then checked
// by tracing rays through the designed interface.

use std::f64::consts::PI;

use metasnell::grid::{GridSpec, Rect};
use metasnell::phase::{integrate_phase, TangentialGradientField};
use metasnell::snell::{distance_to_ray, trace_bundle, Ray, TraceOptions};
use metasnell::{Medium, Surface, Vec3};

fn main() -> metasnell::Result<()> {
    let omega = 2.0 * PI;
    let (m1, m2) = (Medium::with_index(1.0), Medium::with_index(1.5));
    let s = Surface::flat(0.0, Rect::centered(1.0));
    let tilt = 8f64.to_radians();
    let k_i = Vec3::new(tilt.sin(), 0.0, tilt.cos());
    let focus = Vec3::new(0.05, 0.0, 3.0);

    let grid = GridSpec::new(Rect::centered(0.3), 64, 64);
    let target = TangentialGradientField::point_focus(k_i, focus, m1, m2, s.clone());
    let designed = integrate_phase(&target, &s, grid)?;
    println!("discrete curl of the designed gradient: {:.3e}", designed.curl_residual);

    let phi = designed.to_phase(omega, 1.0);
    let rays: Vec<Ray> = (0..7)
        .flat_map(|j| (0..7).map(move |i| (i, j)))
        .map(|(i, j)| {
            let p = Vec3::new(-0.24 + 0.08 * i as f64, -0.24 + 0.08 * j as f64, 0.0);
            Ray::new(p - k_i, k_i)
        })
        .collect();
    let traced = trace_bundle(&rays, &s, &phi, &m1, &m2, omega, &TraceOptions::default());
    let misses: Vec<f64> = traced
        .iter()
        .filter_map(|t| Some(distance_to_ray(&t.hit_point()?, &t.transmitted()?.k_out, &focus)))
        .collect();
    let worst = misses.iter().copied().fold(0.0, f64::max);
    println!("{} rays traced, worst distance from the focus {worst:.3e}", misses.len());
    Ok(())
}
