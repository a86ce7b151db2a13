//! Constant affine mean curvature.
//!
//! The compatible quadric fields of a net form the one-parameter family
//! obtained by black-white rescaling one co-normal field. On a canonical
//! pair the CAMC condition `a x1 = b_bar` together with compatibility fixes
//! `a = -(x1 - x2) / (x1 (1 - x2))`, `b = (x1 - x2) / (1 - x1)`, so one
//! interior edge selects the only candidate and the rest of the net either
//! confirms it or not.

use nalgebra::{Dyn, OMatrix, U3};
use serde::Serialize;

use crate::conormal::{propagate_default, ConormalField, DEFAULT_LELIEUVRE_TOL};
use crate::demoulin::{demoulin_report, q_surface_report, DemoulinReport, QSurfaceReport, PAIR_CROSS_TOL};
use crate::error::{Error, Result};
use crate::net::{AsymptoticNet, Direction, Edge, Quad, StripId, DEFAULT_CROSS_TOL};
use crate::quadric::{canonicalize_pair, QuadricField, PARABOLOID_EPS};
use crate::Vec3;

/// Default relative tolerance on `H`: `|H(quad) - H| <= tol (1 + |H|)`.
pub const DEFAULT_CAMC_TOL: f64 = 1e-7;

/// Canonical pair data of the edge that fixed the CAMC candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairParameters {
    pub edge: Edge,
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    /// Reference parameter in canonical coordinates.
    pub a: f64,
    /// Neighbour parameter in canonical coordinates (`EAFC` order).
    pub b: f64,
}

#[derive(Debug, Clone)]
pub struct CamcResult {
    /// Black-white parameter relative to the default co-normal field.
    pub rho: f64,
    pub field: QuadricField,
    pub h: f64,
    pub max_h_deviation: f64,
    pub pair: Option<PairParameters>,
}

impl CamcResult {
    pub fn summary(&self, is_camc: bool) -> CamcSummary {
        CamcSummary {
            is_camc,
            rho: self.rho,
            h: self.h,
            max_h_deviation: self.max_h_deviation,
            pair: self.pair,
            parameters: self.field.patches().iter().map(|p| p.parameter()).collect(),
            mean_curvatures: self.field.mean_curvatures(),
        }
    }
}

/// Serializable digest of a [`CamcResult`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CamcSummary {
    pub is_camc: bool,
    pub rho: f64,
    pub h: f64,
    pub max_h_deviation: f64,
    pub pair: Option<PairParameters>,
    /// `a` per quadrangle, row-major.
    pub parameters: Vec<f64>,
    /// `H` per quadrangle, row-major.
    pub mean_curvatures: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum CamcOutcome {
    Camc(CamcResult),
    /// The only candidate field, with its worst deviation.
    NotCamc(CamcResult),
}

impl CamcOutcome {
    pub fn is_camc(&self) -> bool {
        matches!(self, CamcOutcome::Camc(_))
    }

    pub fn candidate(&self) -> &CamcResult {
        match self {
            CamcOutcome::Camc(r) | CamcOutcome::NotCamc(r) => r,
        }
    }

    pub fn into_candidate(self) -> CamcResult {
        match self {
            CamcOutcome::Camc(r) | CamcOutcome::NotCamc(r) => r,
        }
    }

    pub fn summary(&self) -> CamcSummary {
        self.candidate().summary(self.is_camc())
    }
}

/// Mean `H` over the field and the largest relative deviation from it,
/// `max |H(quad) - H| / (1 + |H|)`.
pub fn h_deviation(field: &QuadricField) -> (f64, f64) {
    let hs = field.mean_curvatures();
    let h = hs.iter().sum::<f64>() / hs.len() as f64;
    let dev = hs.iter().map(|x| (x - h).abs()).fold(0.0, f64::max) / (1.0 + h.abs());
    (h, dev)
}

/// Black-white parameter giving `quad` the net-order parameter `a`, starting
/// from `base`: `rho^(-2p) lambda^2 = a + 1` with `p` the parity of `quad`.
pub fn rho_for_parameter(base: &ConormalField, quad: Quad, a: f64) -> Result<f64> {
    if !(a > -1.0) {
        return Err(Error::ParameterOutOfRange { a });
    }
    let lambda = base.lambda(quad);
    let ratio = (a + 1.0) / (lambda * lambda);
    Ok(ratio.powf(-0.5 * quad.parity() as f64))
}

/// Compatible quadric field of the default co-normal field rescaled by `rho`.
pub fn field_at_rho(net: &AsymptoticNet, rho: f64) -> Result<QuadricField> {
    let base = propagate_default(net, DEFAULT_LELIEUVRE_TOL)?;
    QuadricField::from_conormal(net, &base.black_white_rescale(rho)?)
}

/// Compatible field in which `quad` has the net-order parameter `a`.
pub fn field_with_parameter(net: &AsymptoticNet, quad: Quad, a: f64) -> Result<(f64, QuadricField)> {
    let base = propagate_default(net, DEFAULT_LELIEUVRE_TOL)?;
    let rho = rho_for_parameter(&base, quad, a)?;
    Ok((rho, QuadricField::from_conormal(net, &base.black_white_rescale(rho)?)?))
}

/// First interior edge: vertical if the net is at least two quadrangles wide.
fn solving_edge(net: &AsymptoticNet) -> Option<Edge> {
    net.domain().interior_edges().next()
}

/// Solves for the CAMC field from one interior edge and verifies it on every
/// quadrangle.
pub fn solve_camc(net: &AsymptoticNet, tol: f64) -> Result<CamcOutcome> {
    let base = propagate_default(net, DEFAULT_LELIEUVRE_TOL)?;
    solve_camc_from(net, &base, tol)
}

/// [`solve_camc`] with an explicit starting co-normal field; `rho` is
/// reported relative to `base`.
pub fn solve_camc_from(net: &AsymptoticNet, base: &ConormalField, tol: f64) -> Result<CamcOutcome> {
    let (quad, a_net, pair) = match solving_edge(net) {
        // Any parameter is CAMC on one quadrangle; take the paraboloid.
        None => (Quad::new(0, 0), 0.0, None),
        Some(edge) => {
            let cp = canonicalize_pair(net, edge, PAIR_CROSS_TOL)?;
            let (a, b) = cp.camc_parameters()?;
            let params = PairParameters { edge, x1: cp.x1, y1: cp.y1, x2: cp.x2, y2: cp.y2, a, b };
            (cp.reference, cp.a_from_net(a), Some(params))
        }
    };
    let rho = rho_for_parameter(base, quad, a_net)?;
    let field = QuadricField::from_conormal(net, &base.black_white_rescale(rho)?)?;
    let (h, max_h_deviation) = h_deviation(&field);
    let result = CamcResult { rho, field, h, max_h_deviation, pair };
    Ok(if max_h_deviation <= tol {
        CamcOutcome::Camc(result)
    } else {
        CamcOutcome::NotCamc(result)
    })
}

/// Centre data of a proper affine sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereCenter {
    pub center: Vec3,
    pub h: f64,
    /// Largest distance between two quadric centres over the net diameter.
    pub center_spread: f64,
    /// Relative defect of `nu(i+1,j) - nu(i,j) = -H q(i+1,j) x q(i,j)` and
    /// `nu(i,j+1) - nu(i,j) = H q(i,j+1) x q(i,j)` about the centre.
    pub dual_lelieuvre: f64,
    /// Relative defect of `Omega^2 = 2 (1 - lambda^2) / lambda^2 [A, B, C]`.
    pub omega_identity: f64,
    /// Relative defect of `1 - lambda^2 = (H / 2) lambda Omega`.
    pub curvature_identity: f64,
    /// Largest `|alpha - lambda| / lambda`, with `alpha^2 (A + D) = B + C`.
    pub dual_moutard: f64,
}

/// Centres of all patches and their spread relative to the net diameter.
pub fn quadric_centers(net: &AsymptoticNet, field: &QuadricField) -> Result<(Vec<Vec3>, f64)> {
    let centers = field.patches().iter().map(|p| p.center()).collect::<Result<Vec<_>>>()?;
    let mut spread: f64 = 0.0;
    for (k, c) in centers.iter().enumerate() {
        for d in &centers[k + 1..] {
            spread = spread.max((c - d).norm());
        }
    }
    Ok((centers, spread / net.diameter()))
}

fn rel(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// Proper-sphere check of a CAMC field: the quadric centres coincide within
/// `tol` times the diameter. Also evaluates the sphere identities about the
/// common centre.
pub fn sphere_center_check(net: &AsymptoticNet, field: &QuadricField, tol: f64) -> Result<Option<SphereCenter>> {
    let domain = *net.domain();
    for quad in domain.quads() {
        if field.parameter(quad).abs() <= PARABOLOID_EPS {
            return Err(Error::Paraboloid);
        }
    }
    let (centers, center_spread) = quadric_centers(net, field)?;
    if center_spread > tol {
        return Ok(None);
    }
    let center = centers.iter().sum::<Vec3>() / centers.len() as f64;
    let (h, _) = h_deviation(field);
    let conormal = field.conormal();
    let q = |i: usize, j: usize| net.at(i, j) - center;

    let mut dual_lelieuvre: f64 = 0.0;
    for edge in domain.edges() {
        let ((i0, j0), (i1, j1)) = edge.endpoints();
        let lhs = conormal.nu(i1, j1) - conormal.nu(i0, j0);
        let rhs = match edge {
            Edge::Horizontal { .. } => -h * q(i1, j1).cross(&q(i0, j0)),
            Edge::Vertical { .. } => h * q(i1, j1).cross(&q(i0, j0)),
        };
        let scale = lhs.norm().max(rhs.norm());
        if scale > 0.0 {
            dual_lelieuvre = dual_lelieuvre.max((lhs - rhs).norm() / scale);
        }
    }

    let (mut omega_identity, mut curvature_identity, mut dual_moutard) = (0.0f64, 0.0f64, 0.0f64);
    for quad in domain.quads() {
        let Quad { i, j } = quad;
        let (a, b, c, d) = (q(i, j), q(i + 1, j), q(i, j + 1), q(i + 1, j + 1));
        let lambda = conormal.lambda(quad);
        let l2 = lambda * lambda;
        let omega = net.affine_metric(quad)?;
        let abc = nalgebra::Matrix3::from_columns(&[a, b, c]).determinant();
        omega_identity = omega_identity.max(rel(omega * omega, 2.0 * (1.0 - l2) / l2 * abc));
        curvature_identity = curvature_identity.max(rel(1.0 - l2, 0.5 * h * lambda * omega));
        let alpha = ((b + c).norm() / (a + d).norm()).sqrt();
        dual_moutard = dual_moutard.max((alpha - lambda).abs() / lambda);
    }

    Ok(Some(SphereCenter {
        center,
        h,
        center_spread,
        dual_lelieuvre,
        omega_identity,
        curvature_identity,
        dual_moutard,
    }))
}

/// Tolerances used by [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Planar-cross residual.
    pub cross: f64,
    /// Relative `H` deviation.
    pub camc: f64,
    /// Strip coplanarity, straightness and `|a|` for minimal fields.
    pub strip: f64,
    /// Centre spread over the net diameter.
    pub center: f64,
    /// Normalized coincidence coefficients and Q-surface angles.
    pub demoulin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { cross: DEFAULT_CROSS_TOL, camc: DEFAULT_CAMC_TOL, strip: 1e-9, center: 1e-9, demoulin: 1e-8 }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Self { cross: tol, camc: tol, strip: tol, center: tol, demoulin: tol }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalReport {
    /// The CAMC field exists and has `a = 0` on every quadrangle.
    pub camc_h_zero: bool,
    /// Every strip's transverse edges are coplanar.
    pub strips_coplanar: bool,
    pub strip_residuals: Vec<(StripId, f64)>,
    pub is_minimal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub tolerances: Tolerances,
    pub camc: CamcSummary,
    pub minimal: MinimalReport,
    /// Minimal with all co-normals in one affine plane.
    pub improper_sphere: bool,
    /// Relative flatness of the co-normal cloud (smallest over largest
    /// singular value of the centred co-normals).
    pub conormal_flatness: f64,
    pub proper_sphere: Option<SphereCenter>,
    pub demoulin: bool,
    pub demoulin_report: Option<DemoulinReport>,
    /// Only evaluated for minimal nets.
    pub q_surface: Option<QSurfaceReport>,
    pub ruled: Option<Direction>,
    #[serde(skip)]
    pub outcome: CamcOutcome,
}

fn conormal_flatness(field: &ConormalField) -> f64 {
    let nu = field.vectors();
    let mean = nu.iter().sum::<Vec3>() / nu.len() as f64;
    let rows: Vec<_> = nu.iter().map(|v| (v - mean).transpose()).collect();
    let matrix: OMatrix<f64, Dyn, U3> = OMatrix::from_rows(&rows);
    let sv = matrix.singular_values();
    let hi = sv.max();
    if hi == 0.0 || nu.len() < 3 {
        return 0.0;
    }
    if sv.len() < 3 {
        return 0.0;
    }
    sv.min() / hi
}

/// Runs every predicate on a valid net.
pub fn classify(net: &AsymptoticNet, tol: &Tolerances) -> Result<ClassificationReport> {
    let validation = net.validate(tol.cross);
    if !validation.is_valid() {
        return Err(Error::InconsistentNet(format!(
            "net is not asymptotic: cross residual {:e}, min delta {:e}",
            validation.max_cross_residual, validation.min_delta
        )));
    }
    let outcome = solve_camc(net, tol.camc)?;
    let candidate = outcome.candidate();
    let field = &candidate.field;

    let strip_residuals = net
        .domain()
        .strips()
        .map(|s| net.strip_coplanarity(s).map(|r| (s, r)))
        .collect::<Result<Vec<_>>>()?;
    let strips_coplanar = strip_residuals.iter().all(|r| r.1 <= tol.strip);
    let camc_h_zero =
        outcome.is_camc() && field.patches().iter().all(|p| p.parameter().abs() <= tol.strip.max(PARABOLOID_EPS));
    let minimal = MinimalReport {
        camc_h_zero,
        strips_coplanar,
        is_minimal: camc_h_zero && strips_coplanar,
        strip_residuals,
    };

    let flatness = conormal_flatness(field.conormal());
    let improper_sphere = minimal.is_minimal && flatness <= tol.strip;
    let proper_sphere = if outcome.is_camc() && !camc_h_zero {
        sphere_center_check(net, field, tol.center).ok().flatten()
    } else {
        None
    };
    let demoulin_report = demoulin_report(net, field, tol.demoulin).ok();
    let demoulin = demoulin_report.as_ref().is_some_and(|r| r.is_demoulin);
    let q_surface = if minimal.is_minimal {
        q_surface_report(net, field, tol.strip.max(PARABOLOID_EPS).max(tol.demoulin)).ok()
    } else {
        None
    };
    Ok(ClassificationReport {
        tolerances: *tol,
        camc: outcome.summary(),
        minimal,
        improper_sphere,
        conormal_flatness: flatness,
        proper_sphere,
        demoulin,
        demoulin_report,
        q_surface,
        ruled: net.is_ruled(tol.strip),
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{minimal_from_polylines, planar_polylines, random_moutard_net, sphere_from_quadric, standard_pair};
    use crate::quadric::{bar, mean_curvature};

    #[test]
    fn standard_pair_closed_form() {
        let net = standard_pair(-1.0, 0.1, -0.9, 1.2).unwrap();
        let outcome = solve_camc(&net, DEFAULT_CAMC_TOL).unwrap();
        assert!(outcome.is_camc());
        let r = outcome.candidate();
        let pair = r.pair.unwrap();
        assert!((pair.b + 0.05).abs() < 1e-14);
        assert!((pair.a + 1.0 / 19.0).abs() < 1e-14);
        assert!((pair.a * pair.x1 - bar(pair.b)).abs() < 1e-14);
        let h1 = mean_curvature(pair.a, 1.0);
        let h2 = mean_curvature(pair.b, 0.9f64.sqrt());
        assert!((h1 - h2).abs() < 1e-12 * h1.abs());
        assert!((r.field.parameter(Quad::new(1, 0)) - pair.a).abs() < 1e-12);
        assert!((r.field.parameter(Quad::new(0, 0)) - pair.b).abs() < 1e-12);
    }

    #[test]
    fn single_quad_is_paraboloid() {
        let net = sphere_from_quadric(1.0, &[0.0, 1.0], &[0.0, 1.0]).unwrap();
        let outcome = solve_camc(&net, DEFAULT_CAMC_TOL).unwrap();
        assert!(outcome.is_camc());
        assert!(outcome.candidate().field.parameter(Quad::new(0, 0)).abs() < 1e-14);
    }

    #[test]
    fn minimal_net_has_zero_curvature() {
        let (alpha, beta) = planar_polylines(4, 4);
        let (net, _) = minimal_from_polylines(&alpha, &beta, Vec3::zeros()).unwrap();
        let outcome = solve_camc(&net, DEFAULT_CAMC_TOL).unwrap();
        assert!(outcome.is_camc());
        assert!(outcome.candidate().h.abs() < 1e-12);
        assert!(matches!(
            sphere_center_check(&net, &outcome.candidate().field, 1e-9),
            Err(Error::Paraboloid)
        ));
    }

    #[test]
    fn sphere_net_center_and_identities() {
        let net = sphere_from_quadric(1.0, &[0.0, 0.5, 1.0], &[0.0, 0.5, 1.0]).unwrap();
        let outcome = solve_camc(&net, DEFAULT_CAMC_TOL).unwrap();
        assert!(outcome.is_camc());
        assert!(outcome.candidate().max_h_deviation < 1e-9);
        assert!((outcome.candidate().h - mean_curvature(1.0, 1.0)).abs() < 1e-9);
        let sphere = sphere_center_check(&net, &outcome.candidate().field, 1e-9).unwrap().unwrap();
        assert!((sphere.center - Vec3::new(0.5, 0.5, 1.0)).norm() < 1e-9);
        assert!(sphere.dual_lelieuvre < 1e-9, "{sphere:?}");
        assert!(sphere.omega_identity < 1e-9, "{sphere:?}");
        assert!(sphere.curvature_identity < 1e-9);
        assert!(sphere.dual_moutard < 1e-9);
    }

    #[test]
    fn camc_pair_off_sphere_has_two_centers() {
        // y2 - 1 != (1 + b) y1
        let net = standard_pair(-1.0, 0.3, -0.9, 1.1).unwrap();
        let outcome = solve_camc(&net, DEFAULT_CAMC_TOL).unwrap();
        assert!(outcome.is_camc());
        assert!(sphere_center_check(&net, &outcome.candidate().field, 1e-9).unwrap().is_none());
    }

    #[test]
    fn generic_net_is_not_camc() {
        let (net, _) = random_moutard_net(3, 3, 0.1, 11).unwrap();
        let outcome = solve_camc(&net, DEFAULT_CAMC_TOL).unwrap();
        assert!(!outcome.is_camc());
        assert!(outcome.candidate().max_h_deviation > 1e-4);
    }

    #[test]
    fn classify_sphere_and_minimal() {
        let net = sphere_from_quadric(1.0, &[0.0, 0.5, 1.0], &[0.0, 0.5, 1.0]).unwrap();
        let report = classify(&net, &Tolerances::default()).unwrap();
        assert!(report.camc.is_camc);
        assert!(report.proper_sphere.is_some());
        assert!(report.demoulin);
        assert!(!report.minimal.is_minimal);

        let (alpha, beta) = planar_polylines(4, 4);
        let (net, _) = minimal_from_polylines(&alpha, &beta, Vec3::zeros()).unwrap();
        let report = classify(&net, &Tolerances::default()).unwrap();
        assert!(report.minimal.is_minimal);
        assert!(report.improper_sphere);
        assert!(report.proper_sphere.is_none());
        assert!(report.q_surface.unwrap().is_q_surface);
    }
}
