// Which phases allow an ohmic current J = sigma E? Only affine ones whose
// total wave vector has the medium's wavenumber. A tilted linear phase with
// the right modulus passes; a quadratic phase and a mismatched linear phase
// do not.

use std::f64::consts::PI;

use metasnell::admissibility::ohmic_compatibility;
use metasnell::{Mat3, Medium, PhaseDiscontinuity, Vec3};

fn main() -> metasnell::Result<()> {
    let omega = 2.0 * PI;
    let m2 = Medium::with_index(1.5);
    let k_dir = Vec3::z();
    let k = k_dir / m2.speed();
    let samples: Vec<Vec3> = (0..16)
        .map(|i| {
            let t = i as f64 / 15.0;
            Vec3::new(t - 0.5, (3.0 * t).sin() * 0.4, 0.2 + t * t)
        })
        .collect();
    let k_prime = Vec3::new(0.6, 0.0, 0.8) * (omega / m2.speed());
    let candidates = [
        ("tilted linear", PhaseDiscontinuity::linear(k_prime - k * omega)),
        ("quadratic", PhaseDiscontinuity::quadratic(Mat3::from_diagonal(&Vec3::new(2.0, 0.0, 0.0)))),
        ("mismatched linear", PhaseDiscontinuity::linear(Vec3::new(2.0, 0.0, 0.0))),
    ];
    for (name, phi) in candidates {
        let v = ohmic_compatibility(&phi, omega, &k_dir, &m2, &samples)?;
        println!(
            "{name:<18} compatible={:<5} max|lap phi|={:.2e} modulus gap={:.2e} affine fit={:.2e}",
            v.compatible, v.max_laplacian, v.max_modulus_deviation, v.fit_residual
        );
    }
    Ok(())
}
