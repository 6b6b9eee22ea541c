// Distributional derivatives of a field that jumps across a curved
// interface. Pairing with a bump test function gives the divergence and
// curl directly; the jump decomposition rebuilds them from the classical
// derivatives on each side plus a surface term.

use metasnell::grid::Rect;
use metasnell::math::complexify;
use metasnell::quadrature::QuadSpec;
use metasnell::weakform::{jump_decomposition_check, random_jump_suite, Piece, PiecewiseField, TestFunction};
use metasnell::{Surface, Vec3};

fn main() -> metasnell::Result<()> {
    let s = Surface::paraboloid(0.0, 0.5, 0.2, Rect::centered(2.0));
    let below = Piece::new(|x| complexify(&Vec3::new(x[1], -x[0], 1.0)));
    let above = Piece::new(|x| complexify(&Vec3::new(x[0] * x[2], 0.5, x[1] * x[1])));
    let g = PiecewiseField::new(below, above, s);
    let tf = TestFunction::new(Vec3::new(0.1, 0.0, 0.05), 0.45)?;
    let quad = QuadSpec::default();

    let check = jump_decomposition_check(&g, &tf, &quad)?;
    println!("<div G, f>   direct {:.10}  decomposed {:.10}", check.divergence.lhs, check.divergence.rhs);
    println!("             surface part {:.10}", check.surface_div);
    for k in 0..3 {
        println!(
            "<curl G, f>_{}  direct {:.10}  decomposed {:.10}",
            k + 1,
            check.curl.lhs[k],
            check.curl.rhs[k]
        );
    }

    let cases = random_jump_suite(5, 42, &quad, 1e-5)?;
    for c in &cases {
        println!("case {} on {:<28} error {:.2e}", c.index, c.surface, c.check.max_error());
    }
    Ok(())
}
