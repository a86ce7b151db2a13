//! Exact test nets.
//!
//! * [`minimal_from_polylines`]: `nu(i,j) = alpha(i) + beta(j)` integrated
//!   through the Lelieuvre equations, an affine minimal net.
//! * [`sphere_from_quadric`]: the standard interpolator sampled along its
//!   rulings, a proper affine sphere (improper when `a = 0`).
//! * [`standard_pair`]: two quadrangles in canonical pair coordinates.
//! * [`moutard_net`]: a Moutard co-normal field with prescribed `lambda`,
//!   which gives generic asymptotic nets.
//!
//! Pseudo-random choices go through [`SplitMix64`], so seeds reproduce
//! across platforms.

use crate::conormal::ConormalField;
use crate::error::{Error, Result};
use crate::net::{AsymptoticNet, GridDomain, Quad};
use crate::quadric::eval_standard;
use crate::Vec3;

/// SplitMix64 generator (Steele, Lea and Flood).
///
/// `next_u64` adds `0x9E3779B97F4A7C15` to the state and mixes it with
/// `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
/// z *= 0x94D049BB133111EB; z ^= z >> 31`. Floats take the top 53 bits.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform in the cube `[-1, 1)^3`.
    pub fn cube(&mut self) -> Vec3 {
        Vec3::new(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Vec3>,
}

impl Polyline {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a polyline needs at least 2 points, got {}",
                points.len()
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Affine minimal net with co-normals `alpha(i) + beta(j)` and `lambda = 1`.
pub fn minimal_from_polylines(
    alpha: &Polyline,
    beta: &Polyline,
    origin: Vec3,
) -> Result<(AsymptoticNet, ConormalField)> {
    let domain = GridDomain::new(alpha.len() - 1, beta.len() - 1)?;
    let mut nu = Vec::with_capacity(domain.vertex_count());
    for b in beta.points() {
        for a in alpha.points() {
            nu.push(a + b);
        }
    }
    integrate(domain, nu, origin)
}

/// Net of the co-normal field spanned by the axis data
/// `nu(i, 0) = axis_u[i]`, `nu(0, j) = axis_v[j]` and the Moutard relation
/// `nu(i+1,j+1) = (nu(i+1,j) + nu(i,j+1)) / lambda^2 - nu(i,j)`.
pub fn moutard_net(
    axis_u: &[Vec3],
    axis_v: &[Vec3],
    mut lambda: impl FnMut(Quad) -> f64,
    origin: Vec3,
) -> Result<(AsymptoticNet, ConormalField)> {
    if axis_u.len() < 2 || axis_v.len() < 2 {
        return Err(Error::InvalidInput("axis data needs at least 2 vectors per direction".into()));
    }
    if axis_u[0] != axis_v[0] {
        return Err(Error::InvalidInput("axis data must agree at the corner (0, 0)".into()));
    }
    let domain = GridDomain::new(axis_u.len() - 1, axis_v.len() - 1)?;
    let mut nu = vec![Vec3::zeros(); domain.vertex_count()];
    for (i, v) in axis_u.iter().enumerate() {
        nu[domain.vertex_index(i, 0)] = *v;
    }
    for (j, v) in axis_v.iter().enumerate() {
        nu[domain.vertex_index(0, j)] = *v;
    }
    for j in 0..domain.n() {
        for i in 0..domain.m() {
            let l = lambda(Quad::new(i, j));
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidInput(format!("lambda must be positive, got {l}")));
            }
            let b = nu[domain.vertex_index(i + 1, j)];
            let c = nu[domain.vertex_index(i, j + 1)];
            let a = nu[domain.vertex_index(i, j)];
            nu[domain.vertex_index(i + 1, j + 1)] = (b + c) / (l * l) - a;
        }
    }
    integrate(domain, nu, origin)
}

/// A generic (non-minimal) net from [`moutard_net`] with axis co-normals
/// near `(i, j, 2)` and `lambda` drawn from `[1 - spread, 1 + spread]`.
pub fn random_moutard_net(
    m: usize,
    n: usize,
    spread: f64,
    seed: u64,
) -> Result<(AsymptoticNet, ConormalField)> {
    let mut rng = SplitMix64::new(seed);
    let axis_u: Vec<Vec3> = (0..=m)
        .map(|i| Vec3::new(i as f64, 0.0, 2.0) + 0.2 * rng.cube() * (i > 0) as u8 as f64)
        .collect();
    let axis_v: Vec<Vec3> = (0..=n)
        .map(|j| {
            if j == 0 {
                axis_u[0]
            } else {
                Vec3::new(0.0, j as f64, 2.0) + 0.2 * rng.cube()
            }
        })
        .collect();
    let lambdas: Vec<f64> = (0..m * n).map(|_| 1.0 + spread * rng.uniform(-1.0, 1.0)).collect();
    moutard_net(&axis_u, &axis_v, |q| lambdas[q.j * m + q.i], Vec3::zeros())
}

/// Integrates `q` from the Lelieuvre equations, along the first row and
/// then up every column. Fields whose `det[nu, nu1, nu2]` changes sign are
/// rejected; an all-negative field is negated.
fn integrate(
    domain: GridDomain,
    nu: Vec<Vec3>,
    origin: Vec3,
) -> Result<(AsymptoticNet, ConormalField)> {
    let at = |i: usize, j: usize| nu[domain.vertex_index(i, j)];
    for (i, j) in domain.vertices() {
        if !(at(i, j).norm() > 0.0) || !at(i, j).iter().all(|c| c.is_finite()) {
            return Err(Error::InconsistentNet(format!("co-normal at ({i}, {j}) is zero or not finite")));
        }
    }
    let mut q = vec![Vec3::zeros(); domain.vertex_count()];
    q[0] = origin;
    for i in 0..domain.m() {
        q[domain.vertex_index(i + 1, 0)] = q[domain.vertex_index(i, 0)] + at(i, 0).cross(&at(i + 1, 0));
    }
    for i in 0..=domain.m() {
        for j in 0..domain.n() {
            q[domain.vertex_index(i, j + 1)] = q[domain.vertex_index(i, j)] - at(i, j).cross(&at(i, j + 1));
        }
    }
    let net = AsymptoticNet::new(domain, q)?;
    for edge in domain.edges() {
        if net.edge_vector(edge).norm() == 0.0 {
            let ((i, j), _) = edge.endpoints();
            return Err(Error::InconsistentNet(format!("parallel co-normals on the edge at ({i}, {j})")));
        }
    }
    check_nondegenerate(&net)?;
    let mut field = ConormalField::from_vectors(domain, nu)?;
    let dets: Vec<f64> = domain.quads().map(|q| field.det(q)).collect();
    if dets.iter().all(|&d| d < 0.0) {
        field = ConormalField::from_vectors(domain, field.vectors().iter().map(|v| -v).collect())?;
    } else if let Some(k) = dets.iter().position(|&d| !(d > 0.0)) {
        let quad = domain.quads().nth(k).expect("index within the domain");
        return Err(Error::InconsistentNet(format!(
            "co-normal field folds at quadrangle ({}, {}): det changes sign",
            quad.i, quad.j
        )));
    }
    Ok((net, field))
}

fn check_nondegenerate(net: &AsymptoticNet) -> Result<()> {
    for quad in net.domain().quads() {
        let delta = net.delta(quad);
        if !(delta > 0.0) {
            return Err(Error::DegenerateQuad { quad, delta });
        }
    }
    Ok(())
}

/// `q(i, j) = eval_standard(a, u[i], v[j])`: a net on one quadric whose
/// polylines are its rulings.
pub fn sphere_from_quadric(a: f64, u_grid: &[f64], v_grid: &[f64]) -> Result<AsymptoticNet> {
    if !(a > -1.0) || !a.is_finite() {
        return Err(Error::ParameterOutOfRange { a });
    }
    for grid in [u_grid, v_grid] {
        if grid.len() < 2 {
            return Err(Error::InvalidInput("parameter grids need at least 2 values".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("parameter grids must be strictly increasing".into()));
        }
    }
    let mut positions = Vec::with_capacity(u_grid.len() * v_grid.len());
    for &v in v_grid {
        for &u in u_grid {
            let w = 1.0 + a * u * v;
            if !(w > 0.0) {
                return Err(Error::Pole { denominator: w });
            }
            positions.push(eval_standard(a, u, v)?);
        }
    }
    let net = AsymptoticNet::new(GridDomain::new(u_grid.len() - 1, v_grid.len() - 1)?, positions)?;
    check_nondegenerate(&net)?;
    Ok(net)
}

/// Two quadrangles `EAFC` and `ABCD` with `A = 0`, `B = e1`, `C = e2`,
/// `D = (1,1,1)`, `E = (x1, y1, 0)`, `F = (x2, y2, x2)`.
pub fn standard_pair(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<AsymptoticNet> {
    if !(x1 < 0.0 && x2 < 0.0) {
        return Err(Error::FoldedPair { x1, x2 });
    }
    let positions = vec![
        Vec3::new(x1, y1, 0.0),
        Vec3::zeros(),
        Vec3::x(),
        Vec3::new(x2, y2, x2),
        Vec3::y(),
        Vec3::new(1.0, 1.0, 1.0),
    ];
    let net = AsymptoticNet::new(GridDomain::new(2, 1)?, positions)?;
    check_nondegenerate(&net)?;
    Ok(net)
}

/// Moves every polyline vertex by a pseudo-random vector of length at most
/// `magnitude`.
pub fn perturb_polylines(
    alpha: &Polyline,
    beta: &Polyline,
    magnitude: f64,
    seed: u64,
) -> (Polyline, Polyline) {
    let mut rng = SplitMix64::new(seed);
    let scale = magnitude / 3f64.sqrt();
    let mut shift = |p: &Polyline| Polyline {
        points: p.points().iter().map(|x| x + rng.cube() * scale).collect(),
    };
    let a = shift(alpha);
    let b = shift(beta);
    (a, b)
}

/// The polylines `alpha(i) = (i, 0, 1)`, `beta(j) = (0, j, 1)`.
pub fn planar_polylines(m: usize, n: usize) -> (Polyline, Polyline) {
    let alpha = (0..=m).map(|i| Vec3::new(i as f64, 0.0, 1.0)).collect();
    let beta = (0..=n).map(|j| Vec3::new(0.0, j as f64, 1.0)).collect();
    (Polyline { points: alpha }, Polyline { points: beta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conormal::propagate_default;

    #[test]
    fn splitmix_reference_values() {
        // First outputs for seed 0 of the reference implementation.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        let x = SplitMix64::new(7).next_f64();
        assert!((0.0..1.0).contains(&x));
    }

    #[test]
    fn minimal_example_has_unit_lambda() {
        let (alpha, beta) = planar_polylines(4, 4);
        let (net, field) = minimal_from_polylines(&alpha, &beta, Vec3::zeros()).unwrap();
        assert!(net.validate(1e-9).is_valid());
        for l in field.lambdas() {
            assert!((l - 1.0).abs() < 1e-12);
        }
        assert!(field.lelieuvre_residual(&net) < 1e-12);
    }

    #[test]
    fn repeated_polyline_point_is_rejected() {
        let alpha = Polyline::new(vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, 1.0)]).unwrap();
        let beta = Polyline::new(vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 1.0, 1.0)]).unwrap();
        assert!(minimal_from_polylines(&alpha, &beta, Vec3::zeros()).is_err());
        assert!(Polyline::new(vec![Vec3::zeros()]).is_err());
    }

    #[test]
    fn sphere_nets_are_nondegenerate() {
        for a in [-0.5, 0.0, 1.0, 3.0] {
            let net = sphere_from_quadric(a, &[0.0, 0.5, 1.0], &[0.0, 0.5, 1.0]).unwrap();
            assert!(net.validate(1e-9).is_valid(), "a = {a}");
        }
        assert!(matches!(
            sphere_from_quadric(-1.0, &[0.0, 1.0], &[0.0, 1.0]),
            Err(Error::ParameterOutOfRange { .. })
        ));
        assert!(sphere_from_quadric(1.0, &[0.0, 0.0, 1.0], &[0.0, 1.0]).is_err());
        assert!(matches!(
            sphere_from_quadric(1.0, &[-2.0, 1.0], &[0.0, 1.0]),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn standard_pair_layout() {
        let net = standard_pair(-1.0, 0.1, -0.9, 1.2).unwrap();
        assert_eq!(net.at(1, 0), Vec3::zeros());
        assert_eq!(net.at(0, 1), Vec3::new(-0.9, 1.2, -0.9));
        assert!(standard_pair(0.5, 0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn perturbation_is_bounded_and_deterministic() {
        let (alpha, beta) = planar_polylines(3, 3);
        let (a0, b0) = perturb_polylines(&alpha, &beta, 0.0, 9);
        assert_eq!((a0.clone(), b0), (alpha.clone(), beta.clone()));
        let (a1, b1) = perturb_polylines(&alpha, &beta, 0.1, 9);
        let (a2, b2) = perturb_polylines(&alpha, &beta, 0.1, 9);
        assert_eq!((a1.clone(), b1), (a2, b2));
        for (p, q) in a1.points().iter().zip(alpha.points()) {
            assert!((p - q).norm() <= 0.1);
        }
    }

    #[test]
    fn moutard_nets_are_asymptotic() {
        let nets: Vec<_> = (0..40).filter_map(|seed| random_moutard_net(3, 3, 0.2, seed).ok()).collect();
        assert!(nets.len() >= 20);
        for (net, field) in nets {
            assert!(field.domain().quads().all(|q| field.det(q) > 0.0));
            assert!(net.validate(1e-9).is_valid());
            assert!(field.lelieuvre_residual(&net) < 1e-12);
            let recovered = propagate_default(&net, 1e-9).unwrap();
            let ratio = recovered.lambda(Quad::new(0, 0)) / field.lambda(Quad::new(0, 0));
            assert!(ratio > 0.0);
        }
    }
}
