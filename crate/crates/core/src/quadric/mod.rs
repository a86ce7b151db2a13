//! Interpolating quadric patches.
//!
//! On the standard quadrangle `A = 0`, `B = e1`, `C = e2`, `D = (1,1,1)` the
//! interpolators form the family
//! `phi(u,v) = (u + auv, v + auv, (1+a)uv) / (1 + auv)`, `a > -1`, lying on
//! `z(1 + z - x - y) = (a+1)(z - y)(z - x)`. A general quadrangle uses the
//! affine frame sending the standard quadrangle onto it.

mod canonical;
mod field;
mod homogeneous;
mod patch;

pub use canonical::{canonicalize_pair, canonicalize_pair_on, CanonicalPair, Side};
pub use field::{edge_compatibility, QuadricField, DEFAULT_COMPAT_TOL};
pub use homogeneous::{HomogeneousPoint, HomogeneousQuadric};
pub use patch::{QuadricPatch, PARABOLOID_EPS};

use crate::error::{Error, Result};
use crate::Vec3;

/// Smallest `|1 + a u v|` accepted before reporting a pole.
pub const POLE_EPS: f64 = 1e-12;

/// Point of the standard interpolator with parameter `a`.
pub fn eval_standard(a: f64, u: f64, v: f64) -> Result<Vec3> {
    let w = 1.0 + a * u * v;
    if w.abs() < POLE_EPS {
        return Err(Error::Pole { denominator: w });
    }
    let auv = a * u * v;
    Ok(Vec3::new(u + auv, v + auv, (1.0 + a) * u * v) / w)
}

/// `H = -2a / (sqrt(1 + a) * Omega)`.
pub fn mean_curvature(a: f64, omega: f64) -> f64 {
    -2.0 * a / ((1.0 + a).sqrt() * omega)
}

/// `-a / (a + 1)`, the parameter after an odd reordering of the corners.
pub fn bar(a: f64) -> f64 {
    -a / (a + 1.0)
}

/// Orientation-preserving reorderings of the corners `(A, B, C, D)` that keep
/// the interpolating quadric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Permutation {
    Identity,
    /// `(B, D, A, C)`
    Bdac,
    /// `(C, A, D, B)`
    Cadb,
    /// `(D, C, B, A)`
    Dcba,
}

impl Permutation {
    pub const ALL: [Permutation; 4] =
        [Permutation::Identity, Permutation::Bdac, Permutation::Cadb, Permutation::Dcba];

    /// Source index for each new corner.
    pub fn indices(self) -> [usize; 4] {
        match self {
            Permutation::Identity => [0, 1, 2, 3],
            Permutation::Bdac => [1, 3, 0, 2],
            Permutation::Cadb => [2, 0, 3, 1],
            Permutation::Dcba => [3, 2, 1, 0],
        }
    }

    pub fn apply<T: Copy>(self, corners: [T; 4]) -> [T; 4] {
        self.indices().map(|k| corners[k])
    }

    /// True for the reorderings that swap the roles of the two rulings.
    pub fn swaps_rulings(self) -> bool {
        matches!(self, Permutation::Bdac | Permutation::Cadb)
    }

    /// Parameter describing the same quadric in the reordered corners.
    pub fn parameter(self, a: f64) -> f64 {
        if self.swaps_rulings() {
            bar(a)
        } else {
            a
        }
    }

    /// `lambda` transforms as `lambda -> 1/lambda` under the swapping orders.
    pub fn lambda(self, lambda: f64) -> f64 {
        if self.swaps_rulings() {
            lambda.recip()
        } else {
            lambda
        }
    }

    /// `H` changes sign under the swapping orders.
    pub fn mean_curvature(self, h: f64) -> f64 {
        if self.swaps_rulings() {
            -h
        } else {
            h
        }
    }
}

/// Same as [`Permutation::parameter`].
pub fn permute_parameter(a: f64, permutation: Permutation) -> f64 {
    permutation.parameter(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cartesian(a: f64, p: Vec3) -> f64 {
        p.z * (1.0 + p.z - p.x - p.y) - (a + 1.0) * (p.z - p.y) * (p.z - p.x)
    }

    #[test]
    fn standard_values() {
        assert_eq!(eval_standard(1.0, 1.0, 1.0).unwrap(), Vec3::new(1.0, 1.0, 1.0));
        let p = eval_standard(1.0, 0.5, 0.5).unwrap();
        assert!((p - Vec3::new(0.6, 0.6, 0.4)).norm() < 1e-15);
        // 0.4 * (1 + 0.4 - 1.2) = 2 * (0.4 - 0.6)^2 = 0.08
        assert!((p.z * (1.0 + p.z - p.x - p.y) - 0.08).abs() < 1e-15);
        assert!(cartesian(1.0, p).abs() < 1e-15);
        for (u, v) in [(0.2, 0.9), (0.7, 0.3)] {
            assert_eq!(eval_standard(0.0, u, v).unwrap(), Vec3::new(u, v, u * v));
        }
    }

    #[test]
    fn pole_outside_unit_square() {
        assert!(matches!(eval_standard(1.0, -1.0, 1.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn curvature_values() {
        assert!((mean_curvature(1.0, 1.0) + 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(mean_curvature(0.0, 1.7), 0.0);
        assert!((mean_curvature(3.0, 2.0) + 1.5).abs() < 1e-15);
    }

    #[test]
    fn permuted_parameter() {
        assert_eq!(permute_parameter(1.0, Permutation::Bdac), -0.5);
        assert_eq!(permute_parameter(1.0, Permutation::Cadb), -0.5);
        assert_eq!(permute_parameter(1.0, Permutation::Dcba), 1.0);
        for p in Permutation::ALL {
            assert_eq!(permute_parameter(0.0, p), 0.0);
        }
        for a in [-0.7, 0.3, 1.0, 4.0] {
            let twice = bar(bar(a));
            assert!((twice - a).abs() < 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn permuted_curvature_flips() {
        let a = 1.3;
        let omega = 0.8;
        let h = mean_curvature(a, omega);
        let h_bar = mean_curvature(bar(a), omega);
        assert!((h_bar - Permutation::Bdac.mean_curvature(h)).abs() < 1e-14);
        let lambda = (1.0 + a).sqrt();
        assert!(((1.0 + bar(a)).sqrt() - Permutation::Cadb.lambda(lambda)).abs() < 1e-14);
    }
}
