//! Vector aliases and small helpers shared by every module.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

pub type Vec3 = Vector3<f64>;
pub type CVec3 = Vector3<Complex64>;
pub type Mat3 = Matrix3<f64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Promote a real vector to a complex one.
pub fn complexify(v: &Vec3) -> CVec3 {
    v.map(|c| Complex64::new(c, 0.0))
}

/// Bilinear (non-conjugating) dot product `a . b` with a real vector.
pub fn cdot_real(a: &CVec3, b: &Vec3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Cross product `a x b` of a complex and a real vector.
pub fn ccross_real(a: &CVec3, b: &Vec3) -> CVec3 {
    CVec3::new(
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
}

/// Euclidean norm of a complex vector, `sqrt(sum |z_j|^2)`.
pub fn cnorm(v: &CVec3) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Pairwise (cascade) summation. The result depends only on the order of
/// `values`, never on how the caller produced them.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise summation of fixed-width rows, column by column.
pub fn pairwise_sum_rows<const N: usize>(rows: &[[f64; N]]) -> [f64; N] {
    const LEAF: usize = 8;
    if rows.len() <= LEAF {
        let mut acc = [0.0; N];
        for row in rows {
            for (a, r) in acc.iter_mut().zip(row) {
                *a += r;
            }
        }
        return acc;
    }
    let mid = rows.len() / 2;
    let left = pairwise_sum_rows(&rows[..mid]);
    let right = pairwise_sum_rows(&rows[mid..]);
    let mut out = [0.0; N];
    for j in 0..N {
        out[j] = left[j] + right[j];
    }
    out
}
