//! Discrete asymptotic nets and their interpolating quadrics.
//!
//! The crate builds co-normal fields for quadrilateral nets with planar
//! vertex stars, turns them into compatible fields of interpolating quadrics,
//! solves for the field of constant affine mean curvature, and checks the
//! affine-sphere, affine-minimal, Demoulin, ruled and Q-surface predicates.
//!
//! ```
//! use asymnet::{generators, camc};
//!
//! let net = generators::standard_pair(-1.0, 0.3, -0.9, 1.1).unwrap();
//! let outcome = camc::solve_camc(&net, camc::DEFAULT_CAMC_TOL).unwrap();
//! let pair = outcome.candidate().pair.unwrap();
//! assert!((pair.b + 0.05).abs() < 1e-12);
//! ```

pub mod camc;
pub mod conormal;
pub mod demoulin;
pub mod error;
pub mod generators;
pub mod io;
pub mod net;
pub mod oracle;
pub mod quadric;

/// Points and vectors of affine 3-space.
pub type Vec3 = nalgebra::Vector3<f64>;

pub use camc::{classify, solve_camc, CamcOutcome, CamcResult, ClassificationReport};
pub use conormal::{propagate, propagate_default, ConormalField, Traversal};
pub use error::{Error, Result};
pub use generators::Polyline;
pub use net::{AsymptoticNet, Direction, Edge, GridDomain, Quad, StripId, ValidationReport};
pub use quadric::{
    CanonicalPair, HomogeneousPoint, HomogeneousQuadric, Permutation, QuadricField, QuadricPatch,
};
