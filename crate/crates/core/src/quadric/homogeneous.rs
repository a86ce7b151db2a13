use nalgebra::{Matrix2, Matrix3, Matrix4, Vector4};

use crate::Vec3;

/// A quadric `x^T Q x = 0` in homogeneous coordinates `[x : y : z : 1]`,
/// normalized so the entry of largest magnitude equals `+1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousQuadric {
    matrix: Matrix4<f64>,
}

impl HomogeneousQuadric {
    pub fn new(matrix: Matrix4<f64>) -> Self {
        let sym = (matrix + matrix.transpose()) * 0.5;
        let pivot = sym
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        let matrix = if pivot != 0.0 { sym / pivot } else { sym };
        Self { matrix }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn value(&self, x: &Vector4<f64>) -> f64 {
        x.dot(&(self.matrix * x))
    }

    /// `|x^T Q x| / |x|^2` for the affine point `x = [p : 1]`.
    pub fn incidence(&self, p: &Vec3) -> f64 {
        let x = p.push(1.0);
        self.value(&x).abs() / x.norm_squared()
    }

    /// Tangent plane `Q x` at a point of the quadric.
    pub fn tangent_plane(&self, x: &Vector4<f64>) -> Vector4<f64> {
        self.matrix * x
    }

    /// Gradient direction at an affine point.
    pub fn normal_at(&self, p: &Vec3) -> Vec3 {
        (self.matrix * p.push(1.0)).xyz()
    }

    /// Quadric of the image under `x -> linear * x + translation`.
    pub fn transformed(&self, linear: &Matrix3<f64>, translation: &Vec3) -> Option<Self> {
        let inv = affine_matrix(linear, translation).try_inverse()?;
        Some(Self::new(inv.transpose() * self.matrix * inv))
    }

    /// Frobenius distance to another quadric, minimized over the sign.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.matrix - other.matrix).norm().min((self.matrix + other.matrix).norm())
    }

    /// Symmetry center, if the quadratic part is invertible.
    pub fn center(&self) -> Option<Vec3> {
        let q3: Matrix3<f64> = self.matrix.fixed_view::<3, 3>(0, 0).into();
        let q: Vec3 = self.matrix.fixed_view::<3, 1>(0, 3).into();
        q3.try_inverse().map(|inv| -(inv * q))
    }

    /// Unit directions of the two lines through `p` lying on the quadric, or
    /// `None` when the tangent section has no real lines.
    ///
    /// The directions are the null vectors of the quadratic form restricted
    /// to the tangent plane at `p`.
    pub fn generators_at(&self, p: &Vec3) -> Option<[Vec3; 2]> {
        let normal = self.normal_at(p);
        if normal.norm() == 0.0 {
            return None;
        }
        let n = normal.normalize();
        let seed = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = n.cross(&seed).normalize();
        let e2 = n.cross(&e1);
        let q3: Matrix3<f64> = self.matrix.fixed_view::<3, 3>(0, 0).into();
        let form = Matrix2::new(
            e1.dot(&(q3 * e1)),
            e1.dot(&(q3 * e2)),
            e2.dot(&(q3 * e1)),
            e2.dot(&(q3 * e2)),
        );
        let (f11, f12, f22) = (form[(0, 0)], form[(0, 1)], form[(1, 1)]);
        let disc = f12 * f12 - f11 * f22;
        if disc < 0.0 {
            return None;
        }
        let root = disc.sqrt();
        // Null directions (x, y) of f11 x^2 + 2 f12 x y + f22 y^2.
        let dirs = if f11.abs() >= f22.abs() && f11 != 0.0 {
            [(-f12 + root, f11), (-f12 - root, f11)]
        } else if f22 != 0.0 {
            [(f22, -f12 + root), (f22, -f12 - root)]
        } else {
            [(1.0, 0.0), (0.0, 1.0)]
        };
        Some(dirs.map(|(x, y)| (e1 * x + e2 * y).normalize()))
    }
}

/// Homogeneous matrix of `x -> linear * x + translation`.
pub(crate) fn affine_matrix(linear: &Matrix3<f64>, translation: &Vec3) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(linear);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(translation);
    m
}

/// A point of projective 3-space `[X1 : X2 : X3 : X4]`; `X4 = 0` is at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousPoint(pub Vector4<f64>);

impl HomogeneousPoint {
    pub fn coords(&self) -> &Vector4<f64> {
        &self.0
    }

    /// Affine representative, or `None` at infinity (relative to `eps`).
    pub fn affine(&self, eps: f64) -> Option<Vec3> {
        let w = self.0.w;
        (w.abs() > eps * self.0.xyz().norm()).then(|| self.0.xyz() / w)
    }

    /// Distance between the two points as lines through the origin of R^4.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        let a = self.0.normalize();
        let b = other.0.normalize();
        (a - b).norm().min((a + b).norm())
    }
}
