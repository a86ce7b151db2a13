//! Co-normal fields and Moutard factors.
//!
//! A co-normal field satisfies the discrete Lelieuvre equations
//! `nu(i,j) x nu(i+1,j) = q1` and `nu(i,j) x nu(i,j+1) = -q2`, and then the
//! Moutard relation `lambda^2 (nu_A + nu_D) = nu_B + nu_C` on every
//! quadrangle with `lambda > 0`.

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::net::{AsymptoticNet, Edge, GridDomain, Quad};
use crate::Vec3;

/// Largest accepted angle (radians) between the two Moutard sums.
pub const MOUTARD_ANGLE_TOL: f64 = 1e-8;

/// Default relative tolerance for Lelieuvre residuals.
pub const DEFAULT_LELIEUVRE_TOL: f64 = 1e-9;

/// Spanning-tree order used when propagating the seed through the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Traversal {
    /// Along the seed row first, then up and down every column.
    #[default]
    RowFirst,
    /// Along the seed column first, then left and right along every row.
    ColumnFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConormalField {
    domain: GridDomain,
    nu: Vec<Vec3>,
    lambda: Vec<f64>,
}

impl ConormalField {
    /// Builds a field from explicit vectors, computing and checking `lambda`.
    pub fn from_vectors(domain: GridDomain, nu: Vec<Vec3>) -> Result<Self> {
        if nu.len() != domain.vertex_count() {
            return Err(Error::DimensionMismatch { expected: domain.vertex_count(), found: nu.len() });
        }
        let mut field = Self { domain, nu, lambda: Vec::new() };
        field.lambda = field
            .domain
            .quads()
            .map(|q| field.compute_lambda(q, MOUTARD_ANGLE_TOL))
            .collect::<Result<_>>()?;
        Ok(field)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn nu(&self, i: usize, j: usize) -> Vec3 {
        self.nu[self.domain.vertex_index(i, j)]
    }

    pub fn vectors(&self) -> &[Vec3] {
        &self.nu
    }

    /// Stored Moutard factor of a quadrangle.
    pub fn lambda(&self, quad: Quad) -> f64 {
        self.lambda[self.domain.quad_index(quad)]
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    fn quad_vectors(&self, quad: Quad) -> [Vec3; 4] {
        let Quad { i, j } = quad;
        [self.nu(i, j), self.nu(i + 1, j), self.nu(i, j + 1), self.nu(i + 1, j + 1)]
    }

    /// `lambda` recomputed from the vectors; errors unless the two Moutard
    /// sums are positively parallel within `angle_tol`.
    pub fn compute_lambda(&self, quad: Quad, angle_tol: f64) -> Result<f64> {
        let [a, b, c, d] = self.quad_vectors(quad);
        let diagonal = a + d;
        let cross = b + c;
        let angle = angle_between(&diagonal, &cross);
        if !(angle <= angle_tol) {
            return Err(Error::InconsistentNet(format!(
                "Moutard sums on quadrangle ({}, {}) are not positively parallel (angle {angle:e} rad)",
                quad.i, quad.j
            )));
        }
        let dn = diagonal.norm();
        if dn == 0.0 {
            return Err(Error::InconsistentNet(format!(
                "vanishing Moutard sum on quadrangle ({}, {})",
                quad.i, quad.j
            )));
        }
        Ok((cross.norm() / dn).sqrt())
    }

    /// `det[nu(i,j), nu(i+1,j), nu(i,j+1)]`.
    pub fn det(&self, quad: Quad) -> f64 {
        let [a, b, c, _] = self.quad_vectors(quad);
        Matrix3::from_columns(&[a, b, c]).determinant()
    }

    /// `Omega` as given by the field: `det / lambda`.
    pub fn omega(&self, quad: Quad) -> f64 {
        self.det(quad) / self.lambda(quad)
    }

    /// Scales `nu` by `rho` on even vertices and `1/rho` on odd ones.
    pub fn black_white_rescale(&self, rho: f64) -> Result<ConormalField> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidInput(format!("black-white parameter must be positive, got {rho}")));
        }
        let nu = self
            .domain
            .vertices()
            .map(|(i, j)| {
                let s = if (i + j) % 2 == 0 { rho } else { rho.recip() };
                self.nu(i, j) * s
            })
            .collect();
        let lambda = self
            .domain
            .quads()
            .map(|q| self.lambda(q) * rho.powi(-q.parity()))
            .collect();
        Ok(ConormalField { domain: self.domain, nu, lambda })
    }

    /// Largest relative Lelieuvre residual `|nu x nu' -/+ e| / |e|` over all edges.
    pub fn lelieuvre_residual(&self, net: &AsymptoticNet) -> f64 {
        net.domain()
            .edges()
            .map(|edge| {
                let ((i0, j0), (i1, j1)) = edge.endpoints();
                let target = lelieuvre_sign(edge) * net.edge_vector(edge);
                let got = self.nu(i0, j0).cross(&self.nu(i1, j1));
                (got - target).norm() / target.norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest angle between the Moutard sums over all quadrangles.
    pub fn moutard_angle(&self) -> f64 {
        self.domain
            .quads()
            .map(|q| {
                let [a, b, c, d] = self.quad_vectors(q);
                angle_between(&(a + d), &(b + c))
            })
            .fold(0.0, f64::max)
    }

    /// Largest relative deviation between the net's `Omega` and `det / lambda`.
    pub fn omega_residual(&self, net: &AsymptoticNet) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for q in self.domain.quads() {
            let omega = net.affine_metric(q)?;
            worst = worst.max((omega - self.omega(q)).abs() / omega);
        }
        Ok(worst)
    }
}

/// `+1` for horizontal edges, `-1` for vertical ones.
fn lelieuvre_sign(edge: Edge) -> f64 {
    match edge {
        Edge::Horizontal { .. } => 1.0,
        Edge::Vertical { .. } => -1.0,
    }
}

fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Propagates a seed co-normal through the net along [`Traversal::RowFirst`].
pub fn propagate(
    net: &AsymptoticNet,
    seed_vertex: (usize, usize),
    seed_vector: Vec3,
    tol: f64,
) -> Result<ConormalField> {
    propagate_with(net, seed_vertex, seed_vector, Traversal::RowFirst, tol)
}

/// Unit seed at `(0, 0)`, oriented so that `det[nu, nu1, nu2] > 0` on the
/// first quadrangle.
pub fn propagate_default(net: &AsymptoticNet, tol: f64) -> Result<ConormalField> {
    let p = net.at(0, 0);
    let seed = (net.at(1, 0) - p).cross(&(net.at(0, 1) - p));
    if seed.norm() == 0.0 {
        return Err(Error::InconsistentNet("parallel edges at vertex (0, 0)".into()));
    }
    let field = propagate(net, (0, 0), seed.normalize(), tol)?;
    if field.det(Quad::new(0, 0)) < 0.0 {
        let nu = field.nu.iter().map(|v| -v).collect();
        return Ok(ConormalField { nu, ..field });
    }
    Ok(field)
}

pub fn propagate_with(
    net: &AsymptoticNet,
    seed_vertex: (usize, usize),
    seed_vector: Vec3,
    traversal: Traversal,
    tol: f64,
) -> Result<ConormalField> {
    let domain = *net.domain();
    let (m, n) = (domain.m(), domain.n());
    let (i0, j0) = seed_vertex;
    if i0 > m || j0 > n {
        return Err(Error::InvalidSeed(format!("vertex ({i0}, {j0}) outside the domain")));
    }
    let normal = vertex_normal(net, (i0, j0), None)?;
    let seed_norm = seed_vector.norm();
    if !(seed_norm > 0.0) {
        return Err(Error::InvalidSeed("seed vector must be nonzero".into()));
    }
    let off_normal = seed_vector.cross(&normal).norm() / seed_norm;
    if off_normal > tol.max(DEFAULT_LELIEUVRE_TOL) {
        return Err(Error::InvalidSeed(format!(
            "seed is not orthogonal to the edges at ({i0}, {j0}) (sine {off_normal:e})"
        )));
    }
    // Keep only the component along the exact normal line.
    let seed = normal * normal.dot(&seed_vector);

    let mut nu: Vec<Option<Vec3>> = vec![None; domain.vertex_count()];
    nu[domain.vertex_index(i0, j0)] = Some(seed);

    let mut steps: Vec<((usize, usize), (usize, usize))> = Vec::new();
    let axis = |len: usize, start: usize| -> Vec<(usize, usize)> {
        // (from, to) pairs walking outward from `start`.
        let mut out: Vec<(usize, usize)> = ((start + 1)..=len).map(|k| (k - 1, k)).collect();
        out.extend((0..start).rev().map(|k| (k + 1, k)));
        out
    };
    match traversal {
        Traversal::RowFirst => {
            for (a, b) in axis(m, i0) {
                steps.push(((a, j0), (b, j0)));
            }
            for i in 0..=m {
                for (a, b) in axis(n, j0) {
                    steps.push(((i, a), (i, b)));
                }
            }
        }
        Traversal::ColumnFirst => {
            for (a, b) in axis(n, j0) {
                steps.push(((i0, a), (i0, b)));
            }
            for j in 0..=n {
                for (a, b) in axis(m, i0) {
                    steps.push(((a, j), (b, j)));
                }
            }
        }
    }

    for (from, to) in steps {
        let known = nu[domain.vertex_index(from.0, from.1)]
            .expect("spanning order visits a known vertex first");
        let direction = vertex_normal(net, to, Some(from))?;
        let sign = if from.1 == to.1 { 1.0 } else { -1.0 };
        let target = sign * (net.at(to.0, to.1) - net.at(from.0, from.1));
        let c = known.cross(&direction);
        let cn2 = c.norm_squared();
        if !(cn2 > f64::EPSILON * known.norm_squared() * direction.norm_squared()) {
            return Err(Error::InconsistentNet(format!(
                "co-normals at ({}, {}) and ({}, {}) are parallel",
                from.0, from.1, to.0, to.1
            )));
        }
        let t = c.dot(&target) / cn2;
        nu[domain.vertex_index(to.0, to.1)] = Some(direction * t);
    }

    let nu: Vec<Vec3> = nu.into_iter().map(|v| v.expect("every vertex visited")).collect();
    let mut field = ConormalField { domain, nu, lambda: Vec::new() };

    let residual = field.lelieuvre_residual(net);
    if !(residual <= tol) {
        return Err(Error::InconsistentNet(format!(
            "Lelieuvre residual {residual:e} exceeds tolerance {tol:e}"
        )));
    }
    let angle_tol = MOUTARD_ANGLE_TOL.max(tol);
    field.lambda = domain
        .quads()
        .map(|q| field.compute_lambda(q, angle_tol))
        .collect::<Result<_>>()?;
    Ok(field)
}

/// Unit normal at a vertex from two of its edges. When `towards` is given the
/// first edge is the one to that neighbour.
fn vertex_normal(
    net: &AsymptoticNet,
    vertex: (usize, usize),
    towards: Option<(usize, usize)>,
) -> Result<Vec3> {
    let (m, n) = (net.domain().m(), net.domain().n());
    let (i, j) = vertex;
    let p = net.at(i, j);
    let horizontal: Vec<(usize, usize)> = [i.checked_sub(1), (i < m).then_some(i + 1)]
        .into_iter()
        .flatten()
        .map(|k| (k, j))
        .collect();
    let vertical: Vec<(usize, usize)> = [j.checked_sub(1), (j < n).then_some(j + 1)]
        .into_iter()
        .flatten()
        .map(|k| (i, k))
        .collect();
    let pairs: Vec<((usize, usize), (usize, usize))> = match towards {
        Some(t) if t.1 == j => vertical.iter().map(|&v| (t, v)).collect(),
        Some(t) => horizontal.iter().map(|&h| (h, t)).collect(),
        None => horizontal
            .iter()
            .flat_map(|&h| vertical.iter().map(move |&v| (h, v)))
            .collect(),
    };
    for (a, b) in pairs {
        let ea = net.at(a.0, a.1) - p;
        let eb = net.at(b.0, b.1) - p;
        let d = ea.cross(&eb);
        if d.norm() > 1e-12 * ea.norm() * eb.norm() {
            return Ok(d.normalize());
        }
    }
    Err(Error::InconsistentNet(format!("parallel incident edges at vertex ({i}, {j})")))
}
