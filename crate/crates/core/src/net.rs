//! Discrete asymptotic nets on a rectangular grid.
//!
//! Vertices are indexed by `(i, j)` with `0 <= i <= m`, `0 <= j <= n`; the
//! quadrangle `(i, j)` is the one whose lower-left vertex is `(i, j)`. Corners
//! of a quadrangle are always ordered `A = q(i,j)`, `B = q(i+1,j)`,
//! `C = q(i,j+1)`, `D = q(i+1,j+1)`, which fixes the sign conventions for the
//! affine metric, the Moutard factor and the interpolator parameter.

use nalgebra::{Matrix3, OMatrix, U3, Dyn};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::Vec3;

/// Default tolerance for the planar-cross residual.
pub const DEFAULT_CROSS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Quad {
    pub i: usize,
    pub j: usize,
}

impl Quad {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    /// +1 when the lower-left vertex has even `i + j`, -1 otherwise.
    pub fn parity(self) -> i32 {
        if (self.i + self.j) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// A net edge. `Horizontal { i, j }` joins `(i,j)`–`(i+1,j)`;
/// `Vertical { i, j }` joins `(i,j)`–`(i,j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Edge {
    Horizontal { i: usize, j: usize },
    Vertical { i: usize, j: usize },
}

impl Edge {
    pub fn endpoints(self) -> ((usize, usize), (usize, usize)) {
        match self {
            Edge::Horizontal { i, j } => ((i, j), (i + 1, j)),
            Edge::Vertical { i, j } => ((i, j), (i, j + 1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A strip of quadrangles. A horizontal strip with index `j` is the row of
/// quadrangles `(i, j)` (the strip `j + 1/2`); a vertical strip with index `i`
/// is the column `(i, j)` for all `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct StripId {
    pub orientation: Orientation,
    pub index: usize,
}

impl StripId {
    pub const fn horizontal(j: usize) -> Self {
        Self { orientation: Orientation::Horizontal, index: j }
    }

    pub const fn vertical(i: usize) -> Self {
        Self { orientation: Orientation::Vertical, index: i }
    }
}

/// Family of net polylines: `U` is `i -> q(i, j)` for fixed `j`, `V` is
/// `j -> q(i, j)` for fixed `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    U,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GridDomain {
    m: usize,
    n: usize,
}

impl GridDomain {
    /// A domain with `m` quadrangles along `i` and `n` along `j`.
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::EmptyDomain { m, n });
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        (self.m + 1) * (self.n + 1)
    }

    pub fn quad_count(&self) -> usize {
        self.m * self.n
    }

    /// Row-major index with `i` fastest.
    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.m && j <= self.n);
        j * (self.m + 1) + i
    }

    pub fn quad_index(&self, quad: Quad) -> usize {
        debug_assert!(quad.i < self.m && quad.j < self.n);
        quad.j * self.m + quad.i
    }

    pub fn contains_quad(&self, quad: Quad) -> bool {
        quad.i < self.m && quad.j < self.n
    }

    pub fn quads(&self) -> impl Iterator<Item = Quad> + '_ {
        (0..self.n).flat_map(move |j| (0..self.m).map(move |i| Quad::new(i, j)))
    }

    pub fn vertices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.n).flat_map(move |j| (0..=self.m).map(move |i| (i, j)))
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let horizontal = (0..=self.n)
            .flat_map(move |j| (0..self.m).map(move |i| Edge::Horizontal { i, j }));
        let vertical =
            (0..=self.m).flat_map(move |i| (0..self.n).map(move |j| Edge::Vertical { i, j }));
        horizontal.chain(vertical)
    }

    /// Edges shared by two quadrangles: vertical ones first, then horizontal.
    pub fn interior_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let vertical =
            (1..self.m).flat_map(move |i| (0..self.n).map(move |j| Edge::Vertical { i, j }));
        let horizontal =
            (1..self.n).flat_map(move |j| (0..self.m).map(move |i| Edge::Horizontal { i, j }));
        vertical.chain(horizontal)
    }

    pub fn is_interior(&self, edge: Edge) -> bool {
        match edge {
            Edge::Vertical { i, j } => i >= 1 && i < self.m && j < self.n,
            Edge::Horizontal { i, j } => j >= 1 && j < self.n && i < self.m,
        }
    }

    pub fn strips(&self) -> impl Iterator<Item = StripId> + '_ {
        (0..self.n)
            .map(StripId::horizontal)
            .chain((0..self.m).map(StripId::vertical))
    }

    pub fn strip_quads(&self, strip: StripId) -> Vec<Quad> {
        match strip.orientation {
            Orientation::Horizontal => (0..self.m).map(|i| Quad::new(i, strip.index)).collect(),
            Orientation::Vertical => (0..self.n).map(|j| Quad::new(strip.index, j)).collect(),
        }
    }

    fn contains_strip(&self, strip: StripId) -> bool {
        match strip.orientation {
            Orientation::Horizontal => strip.index < self.n,
            Orientation::Vertical => strip.index < self.m,
        }
    }
}

/// Residuals gathered by [`AsymptoticNet::validate`].
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub tol: f64,
    pub max_cross_residual: f64,
    pub min_delta: f64,
    /// `(i, j, residual)` for every vertex with at least three incident edges.
    pub cross_residuals: Vec<(usize, usize, f64)>,
    /// `delta` per quadrangle in row-major order.
    pub deltas: Vec<f64>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.max_cross_residual <= self.tol && self.min_delta > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticNet {
    domain: GridDomain,
    positions: Vec<Vec3>,
}

impl AsymptoticNet {
    /// Positions in row-major order, `i` fastest.
    pub fn new(domain: GridDomain, positions: Vec<Vec3>) -> Result<Self> {
        if positions.len() != domain.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: domain.vertex_count(),
                found: positions.len(),
            });
        }
        for (i, j) in domain.vertices() {
            let p = positions[domain.vertex_index(i, j)];
            if !p.iter().all(|c| c.is_finite()) {
                return Err(Error::NonFinite { i, j });
            }
        }
        Ok(Self { domain, positions })
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> Vec3) -> Result<Self> {
        let domain = GridDomain::new(m, n)?;
        let positions = domain.vertices().map(|(i, j)| f(i, j)).collect();
        Self::new(domain, positions)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn at(&self, i: usize, j: usize) -> Vec3 {
        self.positions[self.domain.vertex_index(i, j)]
    }

    /// `[A, B, C, D]` of a quadrangle.
    pub fn corners(&self, quad: Quad) -> [Vec3; 4] {
        let Quad { i, j } = quad;
        [self.at(i, j), self.at(i + 1, j), self.at(i, j + 1), self.at(i + 1, j + 1)]
    }

    pub fn edge_vector(&self, edge: Edge) -> Vec3 {
        let ((i0, j0), (i1, j1)) = edge.endpoints();
        self.at(i1, j1) - self.at(i0, j0)
    }

    /// `delta = det[q1, q2, q12]`.
    pub fn delta(&self, quad: Quad) -> f64 {
        let [a, b, c, d] = self.corners(quad);
        Matrix3::from_columns(&[b - a, c - a, d - b - c + a]).determinant()
    }

    /// `Omega = sqrt(delta)`.
    pub fn affine_metric(&self, quad: Quad) -> Result<f64> {
        let delta = self.delta(quad);
        if delta > 0.0 {
            Ok(delta.sqrt())
        } else {
            Err(Error::DegenerateQuad { quad, delta })
        }
    }

    /// Planar-cross residuals and the minimum of `delta`.
    ///
    /// At interior vertices the residual is the largest `|det[d1, d2, s]|` of
    /// the unit cross diagonals `d1 = q(i+1,j) - q(i-1,j)`,
    /// `d2 = q(i,j+1) - q(i,j-1)` against each unit spoke `s`. Boundary
    /// vertices with three incident edges use the triple product of their
    /// unit spokes. Corners carry no constraint.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let (m, n) = (self.domain.m, self.domain.n);
        let mut cross_residuals = Vec::new();
        for (i, j) in self.domain.vertices() {
            let p = self.at(i, j);
            let mut spokes = Vec::with_capacity(4);
            if i > 0 {
                spokes.push(self.at(i - 1, j) - p);
            }
            if i < m {
                spokes.push(self.at(i + 1, j) - p);
            }
            if j > 0 {
                spokes.push(self.at(i, j - 1) - p);
            }
            if j < n {
                spokes.push(self.at(i, j + 1) - p);
            }
            let residual = match spokes.len() {
                4 => {
                    let d1 = unit(self.at(i + 1, j) - self.at(i - 1, j));
                    let d2 = unit(self.at(i, j + 1) - self.at(i, j - 1));
                    spokes
                        .iter()
                        .map(|s| Matrix3::from_columns(&[d1, d2, unit(*s)]).determinant().abs())
                        .fold(0.0, f64::max)
                }
                3 => Matrix3::from_columns(&[unit(spokes[0]), unit(spokes[1]), unit(spokes[2])])
                    .determinant()
                    .abs(),
                _ => continue,
            };
            cross_residuals.push((i, j, residual));
        }
        let deltas: Vec<f64> = self.domain.quads().map(|q| self.delta(q)).collect();
        ValidationReport {
            tol,
            max_cross_residual: cross_residuals.iter().map(|r| r.2).fold(0.0, f64::max),
            min_delta: deltas.iter().copied().fold(f64::INFINITY, f64::min),
            cross_residuals,
            deltas,
        }
    }

    /// Transverse edge vectors of a strip: `q2(i, j+1/2)` for a horizontal
    /// strip, `q1(i+1/2, j)` for a vertical one.
    pub fn strip_edge_vectors(&self, strip: StripId) -> Result<Vec<Vec3>> {
        if !self.domain.contains_strip(strip) {
            return Err(Error::InvalidInput(format!("strip {strip:?} outside the domain")));
        }
        Ok(match strip.orientation {
            Orientation::Horizontal => {
                let j = strip.index;
                (0..=self.domain.m).map(|i| self.at(i, j + 1) - self.at(i, j)).collect()
            }
            Orientation::Vertical => {
                let i = strip.index;
                (0..=self.domain.n).map(|j| self.at(i + 1, j) - self.at(i, j)).collect()
            }
        })
    }

    /// Smallest singular value of the stacked unit transverse edge vectors of
    /// the strip; zero exactly when they are coplanar.
    pub fn strip_coplanarity(&self, strip: StripId) -> Result<f64> {
        let vectors = self.strip_edge_vectors(strip)?;
        if vectors.len() < 3 {
            return Ok(0.0);
        }
        let rows: Vec<_> = vectors.iter().map(|v| unit(*v).transpose()).collect();
        let matrix: OMatrix<f64, Dyn, U3> = OMatrix::from_rows(&rows);
        let sv = matrix.singular_values();
        Ok(sv.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Largest sine of the turning angle over all polylines of a family.
    pub fn straightness(&self, direction: Direction) -> f64 {
        let (m, n) = (self.domain.m, self.domain.n);
        let lines: Vec<Vec<Vec3>> = match direction {
            Direction::U => (0..=n).map(|j| (0..=m).map(|i| self.at(i, j)).collect()).collect(),
            Direction::V => (0..=m).map(|i| (0..=n).map(|j| self.at(i, j)).collect()).collect(),
        };
        lines
            .iter()
            .flat_map(|line| {
                line.windows(3).map(|w| unit(w[1] - w[0]).cross(&unit(w[2] - w[1])).norm())
            })
            .fold(0.0, f64::max)
    }

    /// Which polyline families are straight within `tol`, as `(u, v)`.
    pub fn ruled_directions(&self, tol: f64) -> (bool, bool) {
        (self.straightness(Direction::U) <= tol, self.straightness(Direction::V) <= tol)
    }

    /// The straight polyline family, preferring `U` when both are straight.
    pub fn is_ruled(&self, tol: f64) -> Option<Direction> {
        match self.ruled_directions(tol) {
            (true, _) => Some(Direction::U),
            (false, true) => Some(Direction::V),
            _ => None,
        }
    }

    /// Diagonal of the axis-aligned bounding box.
    pub fn diameter(&self) -> f64 {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in &self.positions {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).norm()
    }

    /// Image of the net under `x -> linear * x + translation`.
    pub fn map_affine(&self, linear: &Matrix3<f64>, translation: &Vec3) -> AsymptoticNet {
        AsymptoticNet {
            domain: self.domain,
            positions: self.positions.iter().map(|p| linear * p + translation).collect(),
        }
    }
}

pub(crate) fn unit(v: Vec3) -> Vec3 {
    let n = v.norm();
    if n > 0.0 {
        v / n
    } else {
        v
    }
}
