use crate::net::Quad;

/// Errors raised by net construction and the geometric operations on it.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid must contain at least one quadrangle (got {m}x{n})")]
    EmptyDomain { m: usize, n: usize },

    #[error("expected {expected} vertices for the domain, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at vertex ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    #[error("quadrangle ({}, {}) is degenerate: delta = {delta:e}", quad.i, quad.j)]
    DegenerateQuad { quad: Quad, delta: f64 },

    #[error("degenerate tetrahedron: det(T) = {det:e}")]
    DegenerateTetrahedron { det: f64 },

    #[error("interpolator parameter a = {a} must be > -1")]
    ParameterOutOfRange { a: f64 },

    #[error("interpolator pole: 1 + a*u*v = {denominator:e}")]
    Pole { denominator: f64 },

    #[error("paraboloid patch (a = 0) has its center at infinity")]
    Paraboloid,

    #[error("inconsistent net: {0}")]
    InconsistentNet(String),

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("edge is not interior to the domain")]
    NotInterior,

    #[error("cross residual {residual:e} exceeds tolerance at the shared edge")]
    CrossResidual { residual: f64 },

    #[error("folded quadrangle pair: canonical coordinates x1 = {x1}, x2 = {x2} must both be negative")]
    FoldedPair { x1: f64, x2: f64 },

    #[error("CAMC solver is singular for this pair (x1 = {x1}, x2 = {x2})")]
    SolverSingular { x1: f64, x2: f64 },

    #[error("field is not affine minimal: a = {a:e} on quadrangle ({}, {})", quad.i, quad.j)]
    NonMinimalField { quad: Quad, a: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
