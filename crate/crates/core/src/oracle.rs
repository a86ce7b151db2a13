//! Finite-difference Blaschke invariants of a smooth patch in asymptotic
//! coordinates.
//!
//! With `omega^2 = [f_u, f_v, f_uv]` and `f_uv = omega xi`, the derivatives
//! of the affine normal are tangent: `xi_u = k f_u + c1 f_v` and
//! `xi_v = c2 f_u + k f_v`. Both equations are solved in the frame
//! `(f_u, f_v, xi)`, giving two estimates of `k` that must agree.
//!
//! The reported `h` is `k` itself. This is the orientation in which the
//! interpolating quadrics have `H = -2a / (sqrt(1 + a) Omega)` and in which
//! the discrete sphere identities hold; the shape-operator convention
//! `xi_u = -H f_u` gives `-h`.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::Vec3;

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlaschkeSample {
    pub omega: f64,
    pub xi: Vec3,
    pub h: f64,
    /// `|H_u - H_v|` plus the `xi`-components of `xi_u` and `xi_v`.
    pub residual: f64,
}

struct Jet {
    fu: Vec3,
    fv: Vec3,
    omega: f64,
    xi: Vec3,
}

fn jet(f: &impl Fn(f64, f64) -> Vec3, u: f64, v: f64, h: f64) -> Result<Jet> {
    let fu = (f(u + h, v) - f(u - h, v)) / (2.0 * h);
    let fv = (f(u, v + h) - f(u, v - h)) / (2.0 * h);
    let fuv = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4.0 * h * h);
    let det = Matrix3::from_columns(&[fu, fv, fuv]).determinant();
    if !(det > 0.0) {
        return Err(Error::InvalidInput(format!(
            "degenerate affine metric at ({u}, {v}): [f_u, f_v, f_uv] = {det:e}"
        )));
    }
    let omega = det.sqrt();
    Ok(Jet { fu, fv, omega, xi: fuv / omega })
}

/// Blaschke data of `f` at `(u, v)` using central differences of step `h`.
pub fn blaschke_numeric(f: impl Fn(f64, f64) -> Vec3, u: f64, v: f64, h: f64) -> Result<BlaschkeSample> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
    }
    let center = jet(&f, u, v, h)?;
    let xi_u = (jet(&f, u + h, v, h)?.xi - jet(&f, u - h, v, h)?.xi) / (2.0 * h);
    let xi_v = (jet(&f, u, v + h, h)?.xi - jet(&f, u, v - h, h)?.xi) / (2.0 * h);

    let frame = Matrix3::from_columns(&[center.fu, center.fv, center.xi]);
    let lu = frame.lu();
    let cu = lu
        .solve(&xi_u)
        .ok_or_else(|| Error::InvalidInput("singular frame (f_u, f_v, xi)".into()))?;
    let cv = lu
        .solve(&xi_v)
        .ok_or_else(|| Error::InvalidInput("singular frame (f_u, f_v, xi)".into()))?;
    let (h_u, h_v) = (cu.x, cv.y);
    Ok(BlaschkeSample {
        omega: center.omega,
        xi: center.xi,
        h: 0.5 * (h_u + h_v),
        residual: (h_u - h_v).abs() + cu.z.abs() + cv.z.abs(),
    })
}
