// Refraction of a fan of rays through a flat interface, first without and
// then with a constant phase gradient. The second table shows the anomalous
// shift of every refracted angle by the same amount and the angles at which
// transmission stops.

use std::f64::consts::PI;

use metasnell::grid::Rect;
use metasnell::snell::refract;
use metasnell::{Error, Medium, PhaseDiscontinuity, Surface, Vec3};

fn table(title: &str, phi: &PhaseDiscontinuity) -> Result<(), Error> {
    let omega = 2.0 * PI;
    let s = Surface::flat(0.0, Rect::centered(1.0));
    let (m1, m2) = (Medium::with_index(1.0), Medium::with_index(1.5));
    println!("{title}");
    println!("{:>8} {:>12} {:>12}", "theta1", "theta2", "n1 s1 - n2 s2");
    for k in -6..=6 {
        let t1 = (12.0 * k as f64).to_radians();
        let k_i = Vec3::new(t1.sin(), 0.0, t1.cos());
        match refract(&k_i, 0.0, 0.0, &s, phi, &m1, &m2, omega) {
            Ok(r) => {
                let t2 = r.k_out[0].asin();
                let g = m1.index() * t1.sin() - m2.index() * t2.sin();
                println!("{:>8.2} {:>12.6} {:>12.6}", t1.to_degrees(), t2.to_degrees(), g);
            }
            Err(Error::TotalInternalReflection { .. }) => {
                println!("{:>8.2} {:>12}", t1.to_degrees(), "no transmission")
            }
            Err(e) => return Err(e),
        }
    }
    println!();
    Ok(())
}

fn main() -> Result<(), Error> {
    table("plain interface", &PhaseDiscontinuity::Zero)?;
    // grad(lambda0 phi / 2 pi) = (0.75, 0, 0) with lambda0 = 1
    let phi = PhaseDiscontinuity::linear(Vec3::new(0.75 * 2.0 * PI, 0.0, 0.0));
    table("phase gradient 0.75 along x1", &phi)
}
