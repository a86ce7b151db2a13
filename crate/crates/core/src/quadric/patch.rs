use nalgebra::{Matrix3, Matrix4, Vector4};

use super::homogeneous::{affine_matrix, HomogeneousPoint, HomogeneousQuadric};
use super::{mean_curvature, Permutation, POLE_EPS};
use crate::error::{Error, Result};
use crate::Vec3;

/// Parameters with `|a|` below this are treated as paraboloids.
pub const PARABOLOID_EPS: f64 = 1e-12;

/// Interpolating quadric over a quadrangle `(A, B, C, D)`:
/// `T o phi(u, v)` with `T(e1) = B - A`, `T(e2) = C - A`,
/// `T(e3) = D + A - B - C` and translation `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadricPatch {
    corners: [Vec3; 4],
    a: f64,
    frame: Matrix3<f64>,
    frame_inv: Matrix3<f64>,
}

impl QuadricPatch {
    pub fn new(corners: [Vec3; 4], a: f64) -> Result<Self> {
        if !(a > -1.0) || !a.is_finite() {
            return Err(Error::ParameterOutOfRange { a });
        }
        let [pa, pb, pc, pd] = corners;
        let frame = Matrix3::from_columns(&[pb - pa, pc - pa, pd + pa - pb - pc]);
        let det = frame.determinant();
        let scale = frame.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !(det.abs() > 1e-14 * scale.powi(3)) {
            return Err(Error::DegenerateTetrahedron { det });
        }
        let frame_inv = frame.try_inverse().ok_or(Error::DegenerateTetrahedron { det })?;
        Ok(Self { corners, a, frame, frame_inv })
    }

    /// The member of the interpolating family that also passes through `p`.
    ///
    /// In standard coordinates the family is linear in `a`:
    /// `z - xy + a (xz + yz - z^2 - xy) = 0`.
    pub fn through_point(corners: [Vec3; 4], p: &Vec3) -> Result<Self> {
        let probe = Self::new(corners, 0.0)?;
        let s = probe.to_standard(p);
        let denom = s.x * s.z + s.y * s.z - s.z * s.z - s.x * s.y;
        if denom.abs() < POLE_EPS {
            return Err(Error::InvalidInput("point lies on the base locus of the family".into()));
        }
        Self::new(corners, (s.x * s.y - s.z) / denom)
    }

    pub fn corners(&self) -> &[Vec3; 4] {
        &self.corners
    }

    pub fn parameter(&self) -> f64 {
        self.a
    }

    pub fn frame(&self) -> &Matrix3<f64> {
        &self.frame
    }

    pub fn origin(&self) -> Vec3 {
        self.corners[0]
    }

    /// `det(T)`, equal to `delta` of the quadrangle in net order.
    pub fn frame_det(&self) -> f64 {
        self.frame.determinant()
    }

    /// `Omega = sqrt(|det T|)`.
    pub fn affine_metric(&self) -> f64 {
        self.frame_det().abs().sqrt()
    }

    pub fn mean_curvature(&self) -> f64 {
        mean_curvature(self.a, self.affine_metric())
    }

    /// Homogeneous point `[T(N) + A w : w]` with `w = 1 + auv`.
    pub fn eval_homogeneous(&self, u: f64, v: f64) -> Vector4<f64> {
        let a = self.a;
        let w = 1.0 + a * u * v;
        let n = Vec3::new(u + a * u * v, v + a * u * v, (1.0 + a) * u * v);
        (self.frame * n + self.origin() * w).push(w)
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<Vec3> {
        let w = 1.0 + self.a * u * v;
        if w.abs() < POLE_EPS {
            return Err(Error::Pole { denominator: w });
        }
        let h = self.eval_homogeneous(u, v);
        Ok(h.xyz() / w)
    }

    /// Coordinates of a world point in the standard quadrangle frame.
    pub fn to_standard(&self, p: &Vec3) -> Vec3 {
        self.frame_inv * (p - self.origin())
    }

    pub fn from_standard(&self, s: &Vec3) -> Vec3 {
        self.frame * s + self.origin()
    }

    /// Center `T(1/2 (1, 1, (a+1)/a))`.
    pub fn center(&self) -> Result<Vec3> {
        if self.a.abs() <= PARABOLOID_EPS {
            return Err(Error::Paraboloid);
        }
        let a = self.a;
        Ok(self.from_standard(&Vec3::new(0.5, 0.5, 0.5 * (a + 1.0) / a)))
    }

    /// Implicit form: pullback of `z - a z^2 + a xz + a yz - (a+1) xy = 0`
    /// through the inverse frame.
    pub fn homogeneous(&self) -> HomogeneousQuadric {
        let a = self.a;
        let h = 0.5 * a;
        let g = -0.5 * (a + 1.0);
        #[rustfmt::skip]
        let standard = Matrix4::new(
            0.0, g,   h,   0.0,
            g,   0.0, h,   0.0,
            h,   h,   -a,  0.5,
            0.0, 0.0, 0.5, 0.0,
        );
        let inv = affine_matrix(&self.frame_inv, &(-(self.frame_inv * self.origin())));
        HomogeneousQuadric::new(inv.transpose() * standard * inv)
    }

    /// Second intersection of the normal line at `A` with the quadric:
    /// `[(1+a) D + A - B - C : a]`.
    pub fn demoulin_point(&self) -> HomogeneousPoint {
        let [pa, pb, pc, pd] = self.corners;
        let a = self.a;
        HomogeneousPoint(((1.0 + a) * pd + pa - pb - pc).push(a))
    }

    /// Direction of the discrete normal line at `A`, `T(phi_uv(0, 0))`.
    pub fn normal_direction(&self) -> Vec3 {
        let a = self.a;
        self.frame * Vec3::new(a, a, 1.0 + a)
    }

    /// Same quadric described with reordered corners.
    pub fn permuted(&self, permutation: Permutation) -> Result<Self> {
        Self::new(permutation.apply(self.corners), permutation.parameter(self.a))
    }

    /// Image under `x -> linear * x + translation`.
    pub fn map_affine(&self, linear: &Matrix3<f64>, translation: &Vec3) -> Result<Self> {
        Self::new(self.corners.map(|c| linear * c + translation), self.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadric::eval_standard;

    fn standard(a: f64) -> QuadricPatch {
        QuadricPatch::new(
            [Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::new(1.0, 1.0, 1.0)],
            a,
        )
        .unwrap()
    }

    fn sheared() -> ([Vec3; 4], Matrix3<f64>, Vec3) {
        let corners = [
            Vec3::new(0.1, -0.2, 0.3),
            Vec3::new(1.2, 0.1, 0.2),
            Vec3::new(-0.1, 0.9, 0.5),
            Vec3::new(1.3, 1.1, 1.4),
        ];
        #[rustfmt::skip]
        let m: Matrix3<f64> = Matrix3::new(
            1.0, 0.7, 0.0,
            0.0, 1.0, -0.4,
            0.3, 0.21, 0.88,
        );
        let m = m / m.determinant().cbrt();
        (corners, m, Vec3::new(2.0, -1.0, 0.5))
    }

    #[test]
    fn standard_frame_is_identity() {
        for a in [-0.5, 0.0, 1.0, 3.0] {
            let patch = standard(a);
            for (u, v) in [(0.2, 0.3), (0.9, 0.1), (0.5, 0.5)] {
                let p = patch.eval(u, v).unwrap();
                assert!((p - eval_standard(a, u, v).unwrap()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn bottom_edge_is_affine() {
        let (corners, _, _) = sheared();
        let patch = QuadricPatch::new(corners, 0.8).unwrap();
        for k in 0..=10 {
            let u = k as f64 / 10.0;
            let expected = corners[0] + (corners[1] - corners[0]) * u;
            assert!((patch.eval(u, 0.0).unwrap() - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn affine_equivariance() {
        let (corners, m, t) = sheared();
        let patch = QuadricPatch::new(corners, 0.6).unwrap();
        let image = patch.map_affine(&m, &t).unwrap();
        for (u, v) in [(0.1, 0.2), (0.6, 0.7), (0.95, 0.4)] {
            let expected = m * patch.eval(u, v).unwrap() + t;
            assert!((image.eval(u, v).unwrap() - expected).norm() < 1e-13);
        }
        assert!((image.mean_curvature() - patch.mean_curvature()).abs() < 1e-12);
        let transported = patch.homogeneous().transformed(&m, &t).unwrap();
        assert!(transported.distance(&image.homogeneous()) < 1e-12);
        let z = image.demoulin_point().affine(1e-12).unwrap();
        let expected = m * patch.demoulin_point().affine(1e-12).unwrap() + t;
        assert!((z - expected).norm() < 1e-12);
    }

    #[test]
    fn standard_center() {
        let c = standard(1.0).center().unwrap();
        assert!((c - Vec3::new(0.5, 0.5, 1.0)).norm() < 1e-15);
        assert!(matches!(standard(0.0).center(), Err(Error::Paraboloid)));
    }

    #[test]
    fn center_is_symmetry_center() {
        let (corners, _, _) = sheared();
        for a in [-0.6, 0.4, 2.5] {
            let patch = QuadricPatch::new(corners, a).unwrap();
            let c = patch.center().unwrap();
            let q = patch.homogeneous();
            for p in corners {
                assert!(q.incidence(&(2.0 * c - p)) < 1e-9);
            }
            assert!((q.center().unwrap() - c).norm() < 1e-10);
        }
    }

    #[test]
    fn standard_homogeneous_at_one() {
        // z - z^2 + xz + yz - 2xy = 0, normalized by the entry -2/2 -> +1
        let q = standard(1.0).homogeneous();
        let m = q.matrix();
        let scale = m[(0, 1)] / -1.0;
        assert!((m[(2, 2)] / scale + 1.0).abs() < 1e-15);
        assert!((m[(2, 3)] / scale - 0.5).abs() < 1e-15);
        assert!((m[(0, 2)] / scale - 0.5).abs() < 1e-15);
        assert!(q.incidence(&Vec3::new(1.0, 1.0, 1.0)) < 1e-15);
        assert!(q.incidence(&Vec3::new(0.6, 0.6, 0.4)) < 1e-15);
    }

    #[test]
    fn implicit_matches_parametric() {
        let (corners, _, _) = sheared();
        for a in [-0.9, 0.0, 1.0, 5.0] {
            let patch = QuadricPatch::new(corners, a).unwrap();
            let q = patch.homogeneous();
            for p in corners {
                assert!(q.incidence(&p) < 1e-13);
            }
            for k in 0..100 {
                let u = ((k * 37) % 101) as f64 / 100.0;
                let v = ((k * 53) % 103) as f64 / 102.0;
                assert!(q.incidence(&patch.eval(u, v).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn permuted_patch_is_the_same_quadric() {
        let (corners, _, _) = sheared();
        let patch = QuadricPatch::new(corners, 0.7).unwrap();
        let q = patch.homogeneous();
        for p in Permutation::ALL {
            let other = patch.permuted(p).unwrap();
            assert!(other.homogeneous().distance(&q) < 1e-12, "{p:?}");
            assert!(
                (other.mean_curvature() - p.mean_curvature(patch.mean_curvature())).abs() < 1e-12
            );
        }
    }

    #[test]
    fn demoulin_point_standard() {
        let patch = standard(1.0);
        let z = patch.demoulin_point().affine(1e-12).unwrap();
        assert!((z - Vec3::new(1.0, 1.0, 2.0)).norm() < 1e-15);
        // 2 (1 + 2 - 1 - 1) = 2 * 1 * 1
        assert!(patch.homogeneous().incidence(&z) < 1e-15);
        assert!(z.cross(&patch.normal_direction()).norm() < 1e-15);

        let flat = standard(0.0).demoulin_point();
        assert!(flat.affine(1e-12).is_none());
        assert_eq!(flat.coords(), &Vector4::new(0.0, 0.0, 1.0, 0.0));
        assert!(standard(0.0).homogeneous().value(flat.coords()).abs() < 1e-15);
    }

    #[test]
    fn through_point_recovers_parameter() {
        let (corners, _, _) = sheared();
        for a in [-0.8, 0.0, 0.45, 3.0] {
            let patch = QuadricPatch::new(corners, a).unwrap();
            let p = patch.eval(0.3, 0.6).unwrap();
            let found = QuadricPatch::through_point(corners, &p).unwrap();
            assert!((found.parameter() - a).abs() < 1e-10 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let corners = [Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::new(1.0, 1.0, 0.0)];
        assert!(matches!(QuadricPatch::new(corners, 0.5), Err(Error::DegenerateTetrahedron { .. })));
        let corners = [Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::new(1.0, 1.0, 1.0)];
        assert!(matches!(QuadricPatch::new(corners, -1.0), Err(Error::ParameterOutOfRange { .. })));
    }
}
