use super::QuadricPatch;
use crate::conormal::ConormalField;
use crate::error::{Error, Result};
use crate::net::{AsymptoticNet, Edge, GridDomain, Quad};
use crate::Vec3;

/// Default tangent-plane angle tolerance along shared edges (radians).
pub const DEFAULT_COMPAT_TOL: f64 = 1e-8;

/// Number of sample intervals used along an edge by [`edge_compatibility`].
const EDGE_SAMPLES: usize = 10;

/// Largest angle between the tangent planes of two quadrics at sample
/// points of the segment `p0 p1` (endpoints included).
pub fn edge_compatibility(left: &QuadricPatch, right: &QuadricPatch, p0: &Vec3, p1: &Vec3) -> f64 {
    let ql = left.homogeneous();
    let qr = right.homogeneous();
    (0..=EDGE_SAMPLES)
        .map(|k| {
            let t = k as f64 / EDGE_SAMPLES as f64;
            let p = p0 + (p1 - p0) * t;
            let nl = ql.normal_at(&p);
            let nr = qr.normal_at(&p);
            nl.cross(&nr).norm().atan2(nl.dot(&nr).abs())
        })
        .fold(0.0, f64::max)
}

/// One interpolating quadric per quadrangle, built from a co-normal field
/// with `a = lambda^2 - 1`.
#[derive(Debug, Clone)]
pub struct QuadricField {
    domain: GridDomain,
    patches: Vec<QuadricPatch>,
    conormal: ConormalField,
    edge_residuals: Vec<(Edge, f64)>,
}

impl QuadricField {
    pub fn from_conormal(net: &AsymptoticNet, conormal: &ConormalField) -> Result<Self> {
        let domain = *net.domain();
        if conormal.domain() != &domain {
            return Err(Error::InvalidInput("co-normal field does not match the net".into()));
        }
        let patches = domain
            .quads()
            .map(|q| QuadricPatch::new(net.corners(q), conormal.lambda(q).powi(2) - 1.0))
            .collect::<Result<Vec<_>>>()?;
        let mut field = Self { domain, patches, conormal: conormal.clone(), edge_residuals: Vec::new() };
        field.edge_residuals = domain
            .interior_edges()
            .map(|edge| {
                let (left, right) = adjacent_quads(edge);
                let ((i0, j0), (i1, j1)) = edge.endpoints();
                let residual = edge_compatibility(
                    field.patch(left),
                    field.patch(right),
                    &net.at(i0, j0),
                    &net.at(i1, j1),
                );
                (edge, residual)
            })
            .collect();
        Ok(field)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn patch(&self, quad: Quad) -> &QuadricPatch {
        &self.patches[self.domain.quad_index(quad)]
    }

    pub fn patches(&self) -> &[QuadricPatch] {
        &self.patches
    }

    pub fn parameter(&self, quad: Quad) -> f64 {
        self.patch(quad).parameter()
    }

    pub fn conormal(&self) -> &ConormalField {
        &self.conormal
    }

    pub fn edge_residuals(&self) -> &[(Edge, f64)] {
        &self.edge_residuals
    }

    pub fn max_edge_residual(&self) -> f64 {
        self.edge_residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    /// `H` per quadrangle in row-major order.
    pub fn mean_curvatures(&self) -> Vec<f64> {
        self.patches.iter().map(QuadricPatch::mean_curvature).collect()
    }
}

/// The two quadrangles sharing an interior edge, lower/left first.
pub(crate) fn adjacent_quads(edge: Edge) -> (Quad, Quad) {
    match edge {
        Edge::Vertical { i, j } => (Quad::new(i - 1, j), Quad::new(i, j)),
        Edge::Horizontal { i, j } => (Quad::new(i, j - 1), Quad::new(i, j)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conormal::propagate_default;
    use crate::generators::{minimal_from_polylines, sphere_from_quadric, standard_pair, Polyline};
    use crate::quadric::{bar, canonicalize_pair};

    #[test]
    fn fig3_pair_is_compatible() {
        let net = standard_pair(-1.0, 0.1, -0.9, 1.2).unwrap();
        let pair = canonicalize_pair(&net, Edge::Vertical { i: 1, j: 0 }, 1e-9).unwrap();
        let b_bar = pair.compatible_b_bar(1.0);
        assert!((b_bar - 11.0 / 9.0).abs() < 1e-14);
        let reference = pair.reference_patch(1.0).unwrap();
        let neighbor = pair.neighbor_patch(b_bar).unwrap();
        let (a, c) = (Vec3::zeros(), Vec3::y());
        assert!(edge_compatibility(&reference, &neighbor, &a, &c) < 1e-12);
        let neighbor = pair.neighbor_patch(1.0).unwrap();
        assert!(edge_compatibility(&reference, &neighbor, &a, &c) > 1e-3);
    }

    #[test]
    fn patches_of_one_quadric_are_compatible() {
        let net = sphere_from_quadric(2.0, &[0.0, 0.5, 1.0], &[0.0, 1.0]).unwrap();
        let through = |q: Quad, u: f64, v: f64| {
            let p = crate::quadric::eval_standard(2.0, u, v).unwrap();
            QuadricPatch::through_point(net.corners(q), &p).unwrap()
        };
        let left = through(Quad::new(0, 0), 0.25, 0.5);
        let right = through(Quad::new(1, 0), 0.75, 0.5);
        assert!(left.homogeneous().distance(&right.homogeneous()) < 1e-12);
        let (p0, p1) = (net.at(1, 0), net.at(1, 1));
        assert!(edge_compatibility(&left, &right, &p0, &p1) < 1e-12);

        let qf = QuadricField::from_conormal(&net, &propagate_default(&net, 1e-9).unwrap()).unwrap();
        assert!(qf.max_edge_residual() < DEFAULT_COMPAT_TOL);
    }

    #[test]
    fn minimal_field_is_paraboloid() {
        let alpha = Polyline::new(vec![
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 1.0),
            Vec3::new(2.0, 0.0, 1.0),
        ])
        .unwrap();
        let beta = Polyline::new(vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 1.0, 1.0)]).unwrap();
        let (net, conormal) = minimal_from_polylines(&alpha, &beta, Vec3::zeros()).unwrap();
        let field = QuadricField::from_conormal(&net, &conormal).unwrap();
        for p in field.patches() {
            assert!(p.parameter().abs() < 1e-14);
        }
        assert!(field.max_edge_residual() < 1e-12);
    }

    #[test]
    fn rescaled_family_stays_compatible() {
        let net = standard_pair(-1.0, 0.1, -0.9, 1.2).unwrap();
        let base = propagate_default(&net, 1e-9).unwrap();
        let mut params = Vec::new();
        for rho in [0.5, 1.0, 2.0] {
            let field = QuadricField::from_conormal(&net, &base.black_white_rescale(rho).unwrap()).unwrap();
            assert!(field.max_edge_residual() < DEFAULT_COMPAT_TOL);
            params.push(field.parameter(Quad::new(1, 0)));
            let pair = canonicalize_pair(&net, Edge::Vertical { i: 1, j: 0 }, 1e-9).unwrap();
            let a = field.parameter(Quad::new(1, 0));
            let b_bar = bar(field.parameter(Quad::new(0, 0)));
            assert!(pair.compatibility_defect(a, b_bar) < 1e-12);
        }
        assert!(params[0] != params[1] && params[1] != params[2]);
    }
}
