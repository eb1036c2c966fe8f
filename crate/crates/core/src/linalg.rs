//! Small 2×2 helpers on top of `nalgebra`.

use nalgebra::{Matrix2, Vector2};

pub type Vec2 = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;

/// Rotation by `angle` radians.
pub fn rotation(angle: f64) -> Mat2 {
    let (s, c) = angle.sin_cos();
    Mat2::new(c, -s, s, c)
}

/// Spectral norm of a 2×2 matrix, in closed form.
pub fn operator_norm(m: &Mat2) -> f64 {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let p = (a + d).hypot(c - b);
    let q = (a - d).hypot(b + c);
    0.5 * (p + q)
}

/// Smallest singular value of a 2×2 matrix.
pub fn min_singular_value(m: &Mat2) -> f64 {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let p = (a + d).hypot(c - b);
    let q = (a - d).hypot(b + c);
    0.5 * (p - q).abs()
}

/// Unit right singular vector for the largest singular value.
pub fn top_singular_direction(m: &Mat2) -> Vec2 {
    let gram = m.transpose() * m;
    let eig = gram.symmetric_eigen();
    let k = if eig.eigenvalues[0] >= eig.eigenvalues[1] { 0 } else { 1 };
    let v: Vec2 = eig.eigenvectors.column(k).into_owned();
    let n = v.norm();
    if n > 0.0 {
        v / n
    } else {
        Vec2::new(1.0, 0.0)
    }
}
