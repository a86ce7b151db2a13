use nalgebra::Matrix3;

use super::{bar, Permutation, QuadricPatch};
use crate::error::{Error, Result};
use crate::net::{AsymptoticNet, Edge, Quad};
use crate::Vec3;

/// Side of the reference quadrangle shared with its neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Side {
    /// Edge `AC`, neighbour `(i-1, j)`.
    Left,
    /// Edge `BD`, neighbour `(i+1, j)`.
    Right,
    /// Edge `AB`, neighbour `(i, j-1)`.
    Bottom,
    /// Edge `CD`, neighbour `(i, j+1)`.
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    /// Reordering that moves the shared edge to `A'C'`. The neighbour's
    /// corners under the same reordering come out as `(E, A', F, C')`.
    pub fn permutation(self) -> Permutation {
        match self {
            Side::Left => Permutation::Identity,
            Side::Right => Permutation::Dcba,
            Side::Bottom => Permutation::Bdac,
            Side::Top => Permutation::Cadb,
        }
    }

    fn neighbor(self, quad: Quad) -> Option<Quad> {
        let Quad { i, j } = quad;
        match self {
            Side::Left => i.checked_sub(1).map(|i| Quad::new(i, j)),
            Side::Right => Some(Quad::new(i + 1, j)),
            Side::Bottom => j.checked_sub(1).map(|j| Quad::new(i, j)),
            Side::Top => Some(Quad::new(i, j + 1)),
        }
    }
}

/// An adjacent pair mapped affinely onto
/// `A = 0, B = e1, C = e2, D = (1,1,1), E = (x1, y1, 0), F = (x2, y2, x2)`,
/// where `ABCD` is the reference quadrangle and `EAFC` its neighbour across
/// the edge `AC`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalPair {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub reference: Quad,
    pub neighbor: Quad,
    pub side: Side,
    /// Largest deviation of `E` from `z = 0` and of `F` from `z = x`.
    pub cross_residual: f64,
    frame: Matrix3<f64>,
    frame_inv: Matrix3<f64>,
    origin: Vec3,
}

impl CanonicalPair {
    /// A pair given directly in canonical coordinates.
    pub fn from_coordinates(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        if !(x1 < 0.0 && x2 < 0.0) {
            return Err(Error::FoldedPair { x1, x2 });
        }
        Ok(Self {
            x1,
            y1,
            x2,
            y2,
            reference: Quad::new(1, 0),
            neighbor: Quad::new(0, 0),
            side: Side::Left,
            cross_residual: 0.0,
            frame: Matrix3::identity(),
            frame_inv: Matrix3::identity(),
            origin: Vec3::zeros(),
        })
    }

    pub fn permutation(&self) -> Permutation {
        self.side.permutation()
    }

    pub fn to_canonical(&self, p: &Vec3) -> Vec3 {
        self.frame_inv * (p - self.origin)
    }

    pub fn from_canonical(&self, s: &Vec3) -> Vec3 {
        self.frame * s + self.origin
    }

    /// World-to-canonical map as `(linear, translation)`.
    pub fn canonical_map(&self) -> (Matrix3<f64>, Vec3) {
        (self.frame_inv, -(self.frame_inv * self.origin))
    }

    pub fn e(&self) -> Vec3 {
        Vec3::new(self.x1, self.y1, 0.0)
    }

    pub fn f(&self) -> Vec3 {
        Vec3::new(self.x2, self.y2, self.x2)
    }

    /// `Omega` of the neighbour over `Omega` of the reference.
    pub fn omega_ratio(&self) -> f64 {
        (self.x1 * self.x2).sqrt()
    }

    /// Canonical-frame parameter `a` from the reference quadrangle's
    /// net-order parameter (and back: the map is an involution).
    pub fn a_from_net(&self, a_net: f64) -> f64 {
        self.permutation().parameter(a_net)
    }

    /// Parameter `b` of `EAFC` from the neighbour's net-order parameter.
    pub fn b_from_net(&self, b_net: f64) -> f64 {
        self.permutation().parameter(b_net)
    }

    /// Parameter `b_bar` of the `ACEF` ordering from the neighbour's
    /// net-order parameter.
    pub fn b_bar_from_net(&self, b_net: f64) -> f64 {
        bar(self.b_from_net(b_net))
    }

    pub fn b_net_from_bar(&self, b_bar: f64) -> f64 {
        self.permutation().parameter(bar(b_bar))
    }

    /// The `b_bar` compatible with `a`: `(1+a) x1 = (1+b_bar) x2`.
    pub fn compatible_b_bar(&self, a: f64) -> f64 {
        (1.0 + a) * self.x1 / self.x2 - 1.0
    }

    /// Scale-free defect of `(1+a) x1 = (1+b_bar) x2`.
    pub fn compatibility_defect(&self, a: f64, b_bar: f64) -> f64 {
        let lhs = (1.0 + a) * self.x1;
        let rhs = (1.0 + b_bar) * self.x2;
        (lhs - rhs).abs() / lhs.abs().max(rhs.abs())
    }

    /// The unique CAMC pair `(a, b)`:
    /// `b = (x1 - x2)/(1 - x1)`, `a = -(x1 - x2)/(x1 (1 - x2))`.
    pub fn camc_parameters(&self) -> Result<(f64, f64)> {
        let (x1, x2) = (self.x1, self.x2);
        let singular = |d: f64| d.abs() < 1e-14;
        if singular(1.0 - x1) || singular(1.0 - x2) || singular(x1) {
            return Err(Error::SolverSingular { x1, x2 });
        }
        let b = (x1 - x2) / (1.0 - x1);
        let a = -(x1 - x2) / (x1 * (1.0 - x2));
        Ok((a, b))
    }

    /// Reference patch in canonical coordinates (the standard quadrangle).
    pub fn reference_patch(&self, a: f64) -> Result<QuadricPatch> {
        QuadricPatch::new(
            [Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::new(1.0, 1.0, 1.0)],
            a,
        )
    }

    /// Neighbour patch in canonical coordinates, corners ordered `ACEF`.
    pub fn neighbor_patch(&self, b_bar: f64) -> Result<QuadricPatch> {
        QuadricPatch::new([Vec3::zeros(), Vec3::y(), self.e(), self.f()], b_bar)
    }
}

/// Canonical pair of an interior edge. Vertical edges use the right-hand
/// quadrangle as reference (shared side `Left`); horizontal edges use the
/// upper one (shared side `Bottom`).
pub fn canonicalize_pair(net: &AsymptoticNet, edge: Edge, tol: f64) -> Result<CanonicalPair> {
    if !net.domain().is_interior(edge) {
        return Err(Error::NotInterior);
    }
    match edge {
        Edge::Vertical { i, j } => canonicalize_pair_on(net, Quad::new(i, j), Side::Left, tol),
        Edge::Horizontal { i, j } => canonicalize_pair_on(net, Quad::new(i, j), Side::Bottom, tol),
    }
}

/// Canonical pair with `reference` as `ABCD` and its neighbour across `side`.
pub fn canonicalize_pair_on(
    net: &AsymptoticNet,
    reference: Quad,
    side: Side,
    tol: f64,
) -> Result<CanonicalPair> {
    let domain = net.domain();
    let neighbor = side
        .neighbor(reference)
        .filter(|q| domain.contains_quad(*q) && domain.contains_quad(reference))
        .ok_or(Error::NotInterior)?;
    for quad in [reference, neighbor] {
        let delta = net.delta(quad);
        if !(delta > 0.0) {
            return Err(Error::DegenerateQuad { quad, delta });
        }
    }
    let permutation = side.permutation();
    let [a, b, c, d] = permutation.apply(net.corners(reference));
    let [e, a2, f, c2] = permutation.apply(net.corners(neighbor));
    debug_assert!(a == a2 && c == c2, "neighbour ordering must share A and C");

    let frame = Matrix3::from_columns(&[b - a, c - a, d + a - b - c]);
    let frame_inv = frame.try_inverse().ok_or(Error::DegenerateQuad {
        quad: reference,
        delta: net.delta(reference),
    })?;
    let ec = frame_inv * (e - a);
    let fc = frame_inv * (f - a);
    let cross_residual = (ec.z.abs() / ec.norm())
        .max((fc.z - fc.x).abs() / (std::f64::consts::SQRT_2 * (fc - Vec3::y()).norm()));
    if !(cross_residual <= tol) {
        return Err(Error::CrossResidual { residual: cross_residual });
    }
    let (x1, y1, x2, y2) = (ec.x, ec.y, fc.x, fc.y);
    if !(x1 < 0.0 && x2 < 0.0) {
        return Err(Error::FoldedPair { x1, x2 });
    }
    Ok(CanonicalPair {
        x1,
        y1,
        x2,
        y2,
        reference,
        neighbor,
        side,
        cross_residual,
        frame,
        frame_inv,
        origin: a,
    })
}
