// Interface conditions for an incident wave meeting a curved metasurface.
// The transmitted amplitude is matched tangentially at one point; scaling it
// afterwards leaves a tangential jump of E, which the audit reports together
// with the induced charge and current sheet densities.

use std::f64::consts::PI;

use metasnell::grid::Rect;
use metasnell::math::{cdot_real, cnorm, complexify};
use metasnell::snell::refract;
use metasnell::weakform::{boundary_audit, tangential_match};
use metasnell::{CVec3, Medium, ModulatedWave, PhaseDiscontinuity, Surface, Vec3};
use num_complex::Complex64;

fn main() -> metasnell::Result<()> {
    let omega = 2.0 * PI;
    let (m1, m2) = (Medium::with_index(1.0), Medium::new(2.25, 1.0));
    let s = Surface::paraboloid(0.0, 0.3, -0.1, Rect::centered(2.0));
    let phi = PhaseDiscontinuity::linear(Vec3::new(0.4 * omega, 0.0, 0.0));

    let k_i = Vec3::new(0.3, 0.1, 1.0).normalize();
    let a = CVec3::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5), Complex64::from(0.0));
    let a = a - complexify(&k_i) * cdot_real(&a, &k_i);
    let incident = ModulatedWave::new(a, k_i, omega, m1)?;

    let (x1, x2) = (0.2, 0.1);
    let p = s.point(x1, x2)?;
    let k_r = refract(&k_i, x1, x2, &s, &phi, &m1, &m2, omega)?.k_out;
    let a_r = tangential_match(&a, &k_i, &k_r, m1.speed(), m2.speed(), omega, &phi, &p, &s)?;

    for scale in [1.0, 1.5] {
        let tr = ModulatedWave::new(a_r * Complex64::from(scale), k_r, omega, m2)?.with_phase(phi.clone());
        let report = boundary_audit(&incident, &tr, None, &s, 0.0, &[(x1, x2)])?;
        let j = &report.samples[0];
        println!("transmitted amplitude x{scale}");
        println!("  |[[E]] x n|          {:.3e}", cnorm(&j.e_cross_n));
        println!("  |[[B]] . n|          {:.3e}", j.b_dot_n.norm());
        println!("  charge sheet density {:.6}", j.mu_density);
        println!("  current sheet |nu|   {:.6}", cnorm(&j.nu_density));
    }
    Ok(())
}
