use std::sync::OnceLock;

use super::{Direction, MapSystem};
use crate::linalg::{operator_norm, Mat2, Vec2};
use crate::spaces::{torus_distance, TorusPoint};
use crate::{Error, Result};

/// A hyperbolic automorphism of the 2-torus, `x ↦ Ax mod 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ToralAutomorphism {
    name: String,
    matrix: [[i64; 2]; 2],
    inverse: [[i64; 2]; 2],
    lambda_u: f64,
    lambda_s: f64,
    e_u: Vec2,
    e_s: Vec2,
    to_eigen: Mat2,
}

fn unit_eigenvector(m: &[[i64; 2]; 2], lambda: f64) -> Vec2 {
    let (a, b, c, d) = (m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64);
    let v1 = Vec2::new(b, lambda - a);
    let v2 = Vec2::new(lambda - d, c);
    let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
    let v = v / v.norm();
    if v.x < 0.0 || (v.x == 0.0 && v.y < 0.0) {
        -v
    } else {
        v
    }
}

impl ToralAutomorphism {
    pub fn new(matrix: [[i64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = matrix;
        let det = a * d - b * c;
        if det.abs() != 1 {
            return Err(Error::InvalidParameter(format!("determinant {det} is not ±1")));
        }
        let tr = (a + d) as f64;
        let disc = tr * tr - 4.0 * det as f64;
        if disc <= 0.0 {
            return Err(Error::InvalidParameter(format!("matrix {matrix:?} has no real eigenvalues")));
        }
        let root = disc.sqrt();
        let lambda_u = if tr >= 0.0 { 0.5 * (tr + root) } else { 0.5 * (tr - root) };
        let lambda_s = det as f64 / lambda_u;
        if !(lambda_u.abs() > 1.0 && lambda_s.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!("matrix {matrix:?} is not hyperbolic")));
        }
        let inverse = [[d * det, -b * det], [-c * det, a * det]];
        let e_u = unit_eigenvector(&matrix, lambda_u);
        let e_s = unit_eigenvector(&matrix, lambda_s);
        let to_eigen = Mat2::from_columns(&[e_u, e_s])
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("degenerate eigenbasis".into()))?;
        let name = if matrix == [[2, 1], [1, 1]] { "cat".to_string() } else { format!("toral:{a},{b},{c},{d}") };
        Ok(Self { name, matrix, inverse, lambda_u, lambda_s, e_u, e_s, to_eigen })
    }

    /// The cat map `[[2,1],[1,1]]`.
    pub fn cat() -> Self {
        static CAT: OnceLock<ToralAutomorphism> = OnceLock::new();
        CAT.get_or_init(|| Self::new([[2, 1], [1, 1]]).expect("cat matrix is hyperbolic")).clone()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.matrix
    }

    pub fn inverse_matrix(&self) -> [[i64; 2]; 2] {
        self.inverse
    }

    pub fn det(&self) -> i64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    pub fn lambda_u(&self) -> f64 {
        self.lambda_u
    }

    pub fn lambda_s(&self) -> f64 {
        self.lambda_s
    }

    pub fn unstable_direction(&self) -> Vec2 {
        self.e_u
    }

    pub fn stable_direction(&self) -> Vec2 {
        self.e_s
    }

    pub fn mat(&self) -> Mat2 {
        to_mat(&self.matrix)
    }

    pub fn inv_mat(&self) -> Mat2 {
        to_mat(&self.inverse)
    }

    /// `P` with the unit eigenvectors `(e_u, e_s)` as columns.
    pub fn from_eigen(&self) -> Mat2 {
        Mat2::from_columns(&[self.e_u, self.e_s])
    }

    /// `P⁻¹`: vector to `(unstable, stable)` coordinates.
    pub fn to_eigen(&self) -> Mat2 {
        self.to_eigen
    }

    pub fn eigen_coords(&self, v: &Vec2) -> Vec2 {
        self.to_eigen * v
    }

    pub fn apply_vec(&self, v: &Vec2) -> Vec2 {
        mul(&self.matrix, v)
    }

    pub fn apply_inverse_vec(&self, v: &Vec2) -> Vec2 {
        mul(&self.inverse, v)
    }

    pub fn apply(&self, p: &TorusPoint) -> TorusPoint {
        TorusPoint::from_vec(mul(&self.matrix, &p.to_vec()))
    }

    pub fn apply_inverse(&self, p: &TorusPoint) -> TorusPoint {
        TorusPoint::from_vec(mul(&self.inverse, &p.to_vec()))
    }

    pub fn system(&self) -> MapSystem<TorusPoint> {
        let (f, g) = (self.clone(), self.clone());
        MapSystem::exact(self.name.clone(), move |p| f.apply(p), move |p| g.apply_inverse(p))
    }
}

fn to_mat(m: &[[i64; 2]; 2]) -> Mat2 {
    Mat2::new(m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64)
}

fn mul(m: &[[i64; 2]; 2], v: &Vec2) -> Vec2 {
    Vec2::new(m[0][0] as f64 * v.x + m[0][1] as f64 * v.y, m[1][0] as f64 * v.x + m[1][1] as f64 * v.y)
}

/// The cat map or its inverse at a point.
pub fn cat_map(p: &TorusPoint, direction: Direction) -> TorusPoint {
    let a = ToralAutomorphism::cat();
    match direction {
        Direction::Forward => a.apply(p),
        Direction::Inverse => a.apply_inverse(p),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Perturbation {
    /// `x ↦ Ax + c`.
    Affine { c: Vec2 },
    /// `x ↦ Ax + amp·s(|x − center|/radius)·(cos angle, sin angle)` with the
    /// smoothstep hat `s(t) = 1 − 3t² + 2t³` on `[0, 1]`.
    Bump { center: TorusPoint, radius: f64, amp: f64, angle: f64 },
}

/// Largest slope of the smoothstep hat.
pub const HAT_SLOPE: f64 = 1.5;

fn hat(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        1.0 - t * t * (3.0 - 2.0 * t)
    }
}

const INVERSE_MAX_ITER: usize = 200;
const INVERSE_TOL: f64 = 1e-12;

/// A perturbation of `base`. Bump perturbations require
/// `‖A⁻¹‖·1.5·amp/radius < 1`, which makes `y ↦ A⁻¹(x − φ(y))` a contraction,
/// and `radius < 1/2` so the support is an embedded disk.
pub fn perturb_torus(base: &ToralAutomorphism, kind: Perturbation) -> Result<MapSystem<TorusPoint>> {
    match kind {
        Perturbation::Affine { c } => {
            if !(c.x.is_finite() && c.y.is_finite()) {
                return Err(Error::InvalidParameter("affine offset must be finite".into()));
            }
            let (f, g) = (base.clone(), base.clone());
            let name = format!("{}-affine:{},{}", base.name, c.x, c.y);
            Ok(MapSystem::exact(
                name,
                move |p| f.apply(p).translate(c),
                move |p| g.apply_inverse(&p.translate(-c)),
            ))
        }
        Perturbation::Bump { center, radius, amp, angle } => {
            if !(radius > 0.0 && radius < 0.5) {
                return Err(Error::Precondition(format!("bump radius {radius} must lie in (0, 1/2)")));
            }
            if !(amp >= 0.0 && amp.is_finite() && angle.is_finite()) {
                return Err(Error::InvalidParameter(format!("bump amplitude {amp} must be finite and nonnegative")));
            }
            let contraction = operator_norm(&base.inv_mat()) * HAT_SLOPE * amp / radius;
            if contraction >= 1.0 {
                return Err(Error::Precondition(format!(
                    "bump is not invertible by contraction: ‖A⁻¹‖·1.5·amp/radius = {contraction}"
                )));
            }
            let dir = Vec2::new(angle.cos(), angle.sin());
            let phi = move |x: &TorusPoint| amp * hat(torus_distance(x, &center) / radius) * dir;
            let name = if angle == 0.0 {
                format!("{}-bump:{},{},{},{}", base.name, center.x(), center.y(), radius, amp)
            } else {
                format!("{}-bump:{},{},{},{},{}", base.name, center.x(), center.y(), radius, amp, angle)
            };
            let (f, g) = (base.clone(), base.clone());
            let inv_name = name.clone();
            Ok(MapSystem::new(
                name,
                move |x| Ok(f.apply(x).translate(phi(x))),
                move |x| {
                    let mut y = g.apply_inverse(x);
                    let mut step = f64::INFINITY;
                    for _ in 0..INVERSE_MAX_ITER {
                        let next = g.apply_inverse(&x.translate(-phi(&y)));
                        step = torus_distance(&next, &y);
                        y = next;
                        if step <= 1e-15 {
                            return Ok(y);
                        }
                    }
                    if step <= INVERSE_TOL {
                        Ok(y)
                    } else {
                        Err(Error::InverseDidNotConverge { map: inv_name.clone(), last_step: step })
                    }
                },
            ))
        }
    }
}

/// The translation `x ↦ x + t`, an isometry of the flat torus.
pub fn torus_rotation(t: Vec2) -> MapSystem<TorusPoint> {
    MapSystem::exact(format!("rot:{},{}", t.x, t.y), move |p: &TorusPoint| p.translate(t), move |p: &TorusPoint| p.translate(-t))
}
