// A phase-modulated wave in the upper medium made into an exact Maxwell
// solution: the magnetic field follows from Faraday's law and the current
// density from Ampere's law. Residuals shrink by four each time the step
// is halved.

use metasnell::admissibility::{required_current, AdmissibleTriple};
use metasnell::fields::FdSteps;
use metasnell::math::complexify;
use metasnell::{Mat3, Medium, ModulatedWave, PhaseDiscontinuity, Vec3};

fn main() -> metasnell::Result<()> {
    let phi = PhaseDiscontinuity::quadratic(Mat3::from_diagonal(&Vec3::new(0.6, 0.0, 0.0)));
    // A along x2 is orthogonal to k = x3 and to every grad phi = (0.6 x1, 0, 0).
    let w = ModulatedWave::new(complexify(&Vec3::y()), Vec3::z(), 1.0, Medium::new(1.0, 1.0))?.with_phase(phi);
    let x = Vec3::new(0.3, -0.2, 0.5);

    let m = required_current(&w, None, &x).as_multiplier().expect("zero gauge");
    println!("J = m E with m = {m:.6}");

    let triple = AdmissibleTriple::new(&w, None);
    for h in [4e-3, 2e-3, 1e-3] {
        let r = triple.residual(&x, 0.0, FdSteps::uniform(h), None)?;
        println!(
            "h = {h:.0e}: div E {:.2e}  div H {:.2e}  Faraday {:.2e}  Ampere {:.2e}",
            r.gauss_electric, r.gauss_magnetic, r.faraday, r.ampere
        );
    }
    Ok(())
}
