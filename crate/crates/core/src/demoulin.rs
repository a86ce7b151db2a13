//! Generator coincidence, Demoulin points, and the Demoulin, ruled-strip and
//! Q-surface predicates.
//!
//! All pairwise statements are made in canonical pair coordinates: the
//! reference quadrangle is the standard one with parameter `a`, the
//! neighbour `ACEF` carries `b_bar`. Along the shared edge `(0, s, 0)` the
//! transverse generators of the two quadrics coincide exactly at the roots
//! of
//!
//! `(b_bar - a x1) s^2 + (a x1 + y1 + 1 - b_bar y2 - y2) s - y1 = 0`,
//!
//! read projectively so that `s = infinity` is a root when the leading
//! coefficient vanishes.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::net::{unit, AsymptoticNet, Edge, Orientation, StripId};
use crate::quadric::{
    canonicalize_pair, CanonicalPair, HomogeneousPoint, HomogeneousQuadric, QuadricField, QuadricPatch,
};
use crate::Vec3;

/// Cross residual accepted when canonicalizing pairs inside predicates.
pub const PAIR_CROSS_TOL: f64 = 1e-7;

/// A root `[s : w]` of a binary quadratic; `w = 0` is `s = infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectiveRoot {
    pub s: f64,
    pub w: f64,
    pub multiplicity: u32,
}

impl ProjectiveRoot {
    fn finite(s: f64, multiplicity: u32) -> Self {
        Self { s, w: 1.0, multiplicity }
    }

    fn infinite(multiplicity: u32) -> Self {
        Self { s: 1.0, w: 0.0, multiplicity }
    }

    pub fn is_infinite(&self) -> bool {
        self.w == 0.0
    }

    /// `s / w`, or `None` at infinity.
    pub fn value(&self) -> Option<f64> {
        (!self.is_infinite()).then(|| self.s / self.w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "roots", rename_all = "snake_case")]
pub enum CoincidenceRoots {
    /// The quadratic vanishes identically: every edge point is a coincidence.
    Identity,
    /// Real roots with multiplicity; empty when the roots are complex.
    Roots(Vec<ProjectiveRoot>),
}

impl CoincidenceRoots {
    pub fn infinite_multiplicity(&self) -> u32 {
        match self {
            CoincidenceRoots::Identity => 2,
            CoincidenceRoots::Roots(roots) => {
                roots.iter().filter(|r| r.is_infinite()).map(|r| r.multiplicity).sum()
            }
        }
    }

    pub fn finite(&self) -> Vec<f64> {
        match self {
            CoincidenceRoots::Identity => Vec::new(),
            CoincidenceRoots::Roots(roots) => roots.iter().filter_map(ProjectiveRoot::value).collect(),
        }
    }
}

/// Coefficients of `c2 s^2 + c1 s w + c0 w^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoincidencePolynomial {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl CoincidencePolynomial {
    pub fn new(pair: &CanonicalPair, a: f64, b_bar: f64) -> Self {
        let (x1, y1, y2) = (pair.x1, pair.y1, pair.y2);
        Self {
            c2: b_bar - a * x1,
            c1: a * x1 + y1 + 1.0 - b_bar * y2 - y2,
            c0: -y1,
        }
    }

    pub fn scale(&self) -> f64 {
        self.c2.abs().max(self.c1.abs()).max(self.c0.abs())
    }

    /// Coefficients divided by the largest magnitude (unchanged when zero).
    pub fn normalized(&self) -> Self {
        let s = self.scale();
        if s == 0.0 {
            return *self;
        }
        Self { c2: self.c2 / s, c1: self.c1 / s, c0: self.c0 / s }
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.c2 * s + self.c1) * s + self.c0
    }

    /// Projective roots. A polynomial whose largest coefficient is at most
    /// `tol` counts as identically zero; otherwise coefficients of the
    /// normalized polynomial at most `tol` count as zero.
    pub fn roots(&self, tol: f64) -> CoincidenceRoots {
        if self.scale() <= tol {
            return CoincidenceRoots::Identity;
        }
        let p = self.normalized();
        let zero = |c: f64| c.abs() <= tol;
        if zero(p.c2) {
            if zero(p.c1) {
                return CoincidenceRoots::Roots(vec![ProjectiveRoot::infinite(2)]);
            }
            return CoincidenceRoots::Roots(vec![
                ProjectiveRoot::infinite(1),
                ProjectiveRoot::finite(-p.c0 / p.c1, 1),
            ]);
        }
        let disc = p.c1 * p.c1 - 4.0 * p.c2 * p.c0;
        if disc.abs() <= tol {
            return CoincidenceRoots::Roots(vec![ProjectiveRoot::finite(-p.c1 / (2.0 * p.c2), 2)]);
        }
        if disc < 0.0 {
            return CoincidenceRoots::Roots(Vec::new());
        }
        // Cancellation-free pair of roots.
        let sign = if p.c1 >= 0.0 { 1.0 } else { -1.0 };
        let q = -0.5 * (p.c1 + sign * disc.sqrt());
        let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / p.c2, p.c0 / q) };
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        CoincidenceRoots::Roots(vec![ProjectiveRoot::finite(lo, 1), ProjectiveRoot::finite(hi, 1)])
    }
}

pub fn coincidence_roots(pair: &CanonicalPair, a: f64, b_bar: f64, tol: f64) -> CoincidenceRoots {
    CoincidencePolynomial::new(pair, a, b_bar).roots(tol)
}

/// Transverse generator through an edge point: of the two lines on the
/// quadric through `p`, the one further from `along`.
fn transverse_generator(quadric: &HomogeneousQuadric, p: &Vec3, along: &Vec3) -> Option<Vec3> {
    let [g1, g2] = quadric.generators_at(p)?;
    let along = unit(*along);
    Some(if g1.dot(&along).abs() <= g2.dot(&along).abs() { g1 } else { g2 })
}

/// Angle between the transverse generators of the two canonical patches at
/// the shared-edge point `(0, s, 0)`.
pub fn generator_angle(pair: &CanonicalPair, a: f64, b_bar: f64, s: f64) -> Result<f64> {
    let p = Vec3::new(0.0, s, 0.0);
    let phi = pair.reference_patch(a)?.homogeneous();
    let psi = pair.neighbor_patch(b_bar)?.homogeneous();
    let fail = || Error::InvalidInput(format!("no real generators at s = {s}"));
    let g = transverse_generator(&phi, &p, &Vec3::y()).ok_or_else(fail)?;
    let h = transverse_generator(&psi, &p, &Vec3::y()).ok_or_else(fail)?;
    Ok(g.cross(&h).norm().atan2(g.dot(&h).abs()))
}

/// Demoulin point of a patch: second intersection of the normal line at `A`
/// with the quadric.
pub fn demoulin_point(patch: &QuadricPatch) -> HomogeneousPoint {
    patch.demoulin_point()
}

/// `|Y^T Q Z| / (|Y| |Q Z|)`, where `Z` is the reference Demoulin point,
/// `Q Z` its tangent plane and `Y` the neighbour's Demoulin point.
pub fn tangent_incidence_residual(pair: &CanonicalPair, a: f64, b_bar: f64) -> Result<f64> {
    let reference = pair.reference_patch(a)?;
    let z = reference.demoulin_point();
    let plane = reference.homogeneous().tangent_plane(z.coords());
    let y = pair.neighbor_patch(b_bar)?.demoulin_point();
    let denom = y.coords().norm() * plane.norm();
    if denom == 0.0 {
        return Err(Error::InvalidInput("degenerate tangent plane at the Demoulin point".into()));
    }
    Ok(y.coords().dot(&plane).abs() / denom)
}

/// Whether the neighbour's Demoulin point lies on the tangent plane of the
/// reference quadric at its Demoulin point.
pub fn tangent_incidence(pair: &CanonicalPair, a: f64, b_bar: f64, tol: f64) -> Result<bool> {
    Ok(tangent_incidence_residual(pair, a, b_bar)? <= tol)
}

/// Canonical pair of an interior edge with the field's parameters in
/// canonical terms `(a, b_bar)`.
pub fn edge_parameters(net: &AsymptoticNet, field: &QuadricField, edge: Edge) -> Result<(CanonicalPair, f64, f64)> {
    let pair = canonicalize_pair(net, edge, PAIR_CROSS_TOL)?;
    let a = pair.a_from_net(field.parameter(pair.reference));
    let b_bar = pair.b_bar_from_net(field.parameter(pair.neighbor));
    Ok((pair, a, b_bar))
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeCoincidence {
    pub edge: Edge,
    pub polynomial: CoincidencePolynomial,
    pub roots: CoincidenceRoots,
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoulinReport {
    pub tol: f64,
    pub edges: Vec<EdgeCoincidence>,
    pub is_demoulin: bool,
}

/// Coincidence quadratic on every interior edge; Demoulin means a double
/// root at infinity everywhere.
pub fn demoulin_report(net: &AsymptoticNet, field: &QuadricField, tol: f64) -> Result<DemoulinReport> {
    let mut edges = Vec::new();
    for edge in net.domain().interior_edges() {
        let (pair, a, b_bar) = edge_parameters(net, field, edge)?;
        let polynomial = CoincidencePolynomial::new(&pair, a, b_bar);
        edges.push(EdgeCoincidence { edge, polynomial, roots: polynomial.roots(tol) });
    }
    let is_demoulin = edges.iter().all(|e| e.roots.infinite_multiplicity() == 2);
    Ok(DemoulinReport { tol, edges, is_demoulin })
}

pub fn is_demoulin(net: &AsymptoticNet, field: &QuadricField, tol: f64) -> Result<bool> {
    Ok(demoulin_report(net, field, tol)?.is_demoulin)
}

/// The two planes through the origin whose union is the quadratic cone of
/// a hyperbolic paraboloid, as unit normals.
fn asymptotic_planes(quadric: &HomogeneousQuadric) -> Option<[Vec3; 2]> {
    let q3: Matrix3<f64> = quadric.matrix().fixed_view::<3, 3>(0, 0).into();
    let eig = q3.symmetric_eigen();
    let (mut hi, mut lo) = (0, 0);
    for k in 1..3 {
        if eig.eigenvalues[k] > eig.eigenvalues[hi] {
            hi = k;
        }
        if eig.eigenvalues[k] < eig.eigenvalues[lo] {
            lo = k;
        }
    }
    let (mu_hi, mu_lo) = (eig.eigenvalues[hi], eig.eigenvalues[lo]);
    if !(mu_hi > 0.0 && mu_lo < 0.0) {
        return None;
    }
    let p: Vec3 = eig.eigenvectors.column(hi).into_owned() * mu_hi.sqrt();
    let m: Vec3 = eig.eigenvectors.column(lo).into_owned() * (-mu_lo).sqrt();
    Some([unit(p + m), unit(p - m)])
}

fn line_angle(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b).abs())
}

#[derive(Debug, Clone, Serialize)]
pub struct QSurfaceReport {
    pub tol: f64,
    /// Per strip: largest angle between the strip's generators at infinity.
    pub strip_residuals: Vec<(StripId, f64)>,
    pub is_q_surface: bool,
}

/// Every strip of an affine minimal field shares one generator at infinity.
///
/// For each paraboloid the generator is the line at infinity of the
/// asymptotic plane containing the strip's transverse edges.
pub fn q_surface_report(net: &AsymptoticNet, field: &QuadricField, tol: f64) -> Result<QSurfaceReport> {
    let domain = net.domain();
    for quad in domain.quads() {
        let a = field.parameter(quad);
        if a.abs() > tol {
            return Err(Error::NonMinimalField { quad, a });
        }
    }
    let mut strip_residuals = Vec::new();
    for strip in domain.strips() {
        let mut normals: Vec<Vec3> = Vec::new();
        let mut residual: f64 = 0.0;
        for quad in domain.strip_quads(strip) {
            let [pa, pb, pc, pd] = net.corners(quad);
            let transverse = match strip.orientation {
                Orientation::Horizontal => [unit(pc - pa), unit(pd - pb)],
                Orientation::Vertical => [unit(pb - pa), unit(pd - pc)],
            };
            let planes = asymptotic_planes(&field.patch(quad).homogeneous()).ok_or_else(|| {
                Error::InvalidInput(format!("patch {quad:?} is not a hyperbolic paraboloid"))
            })?;
            let fit = |n: &Vec3| transverse.iter().map(|t| n.dot(t).abs()).fold(0.0, f64::max);
            let n = if fit(&planes[0]) <= fit(&planes[1]) { planes[0] } else { planes[1] };
            residual = residual.max(fit(&n));
            if let Some(first) = normals.first() {
                residual = residual.max(line_angle(first, &n));
            }
            normals.push(n);
        }
        strip_residuals.push((strip, residual));
    }
    let is_q_surface = strip_residuals.iter().all(|r| r.1 <= tol);
    Ok(QSurfaceReport { tol, strip_residuals, is_q_surface })
}

pub fn q_surface_check(net: &AsymptoticNet, field: &QuadricField, tol: f64) -> Result<bool> {
    Ok(q_surface_report(net, field, tol)?.is_q_surface)
}

#[derive(Debug, Clone, Serialize)]
pub struct RuledStrip {
    /// The common quadric, when all patches of the strip agree within `tol`.
    #[serde(skip)]
    pub quadric: Option<HomogeneousQuadric>,
    /// Largest normalized matrix distance to the first patch's quadric.
    pub max_distance: f64,
    /// Largest defect of `x2 = x1 (1 + a) / (1 + a x1)` over the strip's
    /// interior edges.
    pub max_pair_relation: f64,
}

/// Single quadric through all quadrangles of a ruled strip.
pub fn ruled_strip_quadric(
    net: &AsymptoticNet,
    strip: StripId,
    field: &QuadricField,
    tol: f64,
) -> Result<RuledStrip> {
    let domain = net.domain();
    let quads = domain.strip_quads(strip);
    if quads.is_empty() {
        return Err(Error::InvalidInput(format!("strip {strip:?} outside the domain")));
    }
    let rails: [Vec<Vec3>; 2] = match strip.orientation {
        Orientation::Horizontal => {
            let j = strip.index;
            [0, 1].map(|dj| (0..=domain.m()).map(|i| net.at(i, j + dj)).collect())
        }
        Orientation::Vertical => {
            let i = strip.index;
            [0, 1].map(|di| (0..=domain.n()).map(|j| net.at(i + di, j)).collect())
        }
    };
    let bend = rails
        .iter()
        .flat_map(|r| r.windows(3).map(|w| unit(w[1] - w[0]).cross(&unit(w[2] - w[1])).norm()))
        .fold(0.0, f64::max);
    if bend > tol {
        return Err(Error::InvalidInput(format!("strip {strip:?} is not ruled (bend {bend:e})")));
    }

    let first = field.patch(quads[0]).homogeneous();
    let max_distance = quads
        .iter()
        .map(|&q| field.patch(q).homogeneous().distance(&first))
        .fold(0.0, f64::max);

    let mut max_pair_relation: f64 = 0.0;
    for pair in quads.windows(2) {
        let edge = match strip.orientation {
            Orientation::Horizontal => Edge::Vertical { i: pair[1].i, j: pair[1].j },
            Orientation::Vertical => Edge::Horizontal { i: pair[1].i, j: pair[1].j },
        };
        let (cp, a, _) = edge_parameters(net, field, edge)?;
        let predicted = cp.x1 * (1.0 + a) / (1.0 + a * cp.x1);
        max_pair_relation = max_pair_relation.max((cp.x2 - predicted).abs() / cp.x2.abs().max(predicted.abs()));
    }
    Ok(RuledStrip {
        quadric: (max_distance <= tol).then_some(first),
        max_distance,
        max_pair_relation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadric::bar;

    fn pair(x1: f64, y1: f64, x2: f64, y2: f64) -> CanonicalPair {
        CanonicalPair::from_coordinates(x1, y1, x2, y2).unwrap()
    }

    #[test]
    fn camc_pair_has_root_at_infinity() {
        let p = pair(-1.0, 0.3, -0.9, 1.1);
        let (a, b) = p.camc_parameters().unwrap();
        let b_bar = bar(b);
        let roots = coincidence_roots(&p, a, b_bar, 1e-12);
        assert_eq!(roots.infinite_multiplicity(), 1);
        let expected = p.y1 / ((b_bar + 1.0) * (1.0 - p.y2) + p.y1);
        let finite = roots.finite();
        assert_eq!(finite.len(), 1);
        assert!((finite[0] - expected).abs() < 1e-12);
        assert!(generator_angle(&p, a, b_bar, expected).unwrap() < 1e-7);
        assert!(tangent_incidence(&p, a, b_bar, 1e-12).unwrap());
    }

    #[test]
    fn generic_roots_match_generator_scan() {
        let p = pair(-1.0, 0.1, -0.9, 1.2);
        let a = 1.0;
        let b_bar = p.compatible_b_bar(a);
        let roots = coincidence_roots(&p, a, b_bar, 1e-12);
        assert_eq!(roots.infinite_multiplicity(), 0);
        for s in roots.finite() {
            assert!(generator_angle(&p, a, b_bar, s).unwrap() < 1e-7, "s = {s}");
        }
        assert!(generator_angle(&p, a, b_bar, 0.77).unwrap() > 1e-4);
        assert!(!tangent_incidence(&p, a, b_bar, 1e-9).unwrap());
    }

    #[test]
    fn double_and_complex_roots() {
        let poly = CoincidencePolynomial { c2: 1.0, c1: -2.0, c0: 1.0 };
        assert_eq!(poly.roots(1e-12), CoincidenceRoots::Roots(vec![ProjectiveRoot::finite(1.0, 2)]));
        let poly = CoincidencePolynomial { c2: 1.0, c1: 0.0, c0: 1.0 };
        assert_eq!(poly.roots(1e-12), CoincidenceRoots::Roots(Vec::new()));
        let poly = CoincidencePolynomial { c2: 0.0, c1: 0.0, c0: 3.0 };
        assert_eq!(poly.roots(1e-12).infinite_multiplicity(), 2);
        let poly = CoincidencePolynomial { c2: 0.0, c1: 1e-15, c0: 0.0 };
        assert_eq!(poly.roots(1e-12), CoincidenceRoots::Identity);
        let poly = CoincidencePolynomial { c2: 2.0, c1: -6.0, c0: 4.0 };
        let finite = poly.roots(1e-12).finite();
        assert_eq!(finite.len(), 2);
        assert!((finite[0] - 1.0).abs() < 1e-14 && (finite[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn shared_paraboloid_line() {
        // Minimal pair: x1 = x2, both parameters zero.
        let p = pair(-0.7, 0.2, -0.7, 1.3);
        let phi = p.reference_patch(0.0).unwrap().homogeneous();
        let psi = p.neighbor_patch(0.0).unwrap().homogeneous();
        // The plane x = 0 through the origin carries the common line X1 = X4 = 0.
        let on_both = |n: &Vec3| {
            let ours = asymptotic_planes(&phi).unwrap();
            let theirs = asymptotic_planes(&psi).unwrap();
            ours.iter().any(|m| line_angle(m, n) < 1e-12) && theirs.iter().any(|m| line_angle(m, n) < 1e-12)
        };
        assert!(on_both(&Vec3::x()));
    }
}
