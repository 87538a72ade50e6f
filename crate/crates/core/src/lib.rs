//! Analysis of one-dimensional dynamical systems ẋ = f(x) on the circle.
//!
//! The crate parses vector fields from a small expression DSL, locates and
//! classifies their fixed points, decides structural stability with a
//! robustness-radius certificate, checks and constructs topological
//! equivalences, synthesizes verified bump-function perturbations that
//! destabilize or stabilize a system, and integrates orbits.
//!
//! The usual entry points:
//!
//! * [`expr::parse`] and [`expr::validate_c1`] to load and vet a field;
//! * [`analysis::assess`] for the stability verdict;
//! * [`equivalence::check_equivalence`] / [`equivalence::build_plh`];
//! * [`perturb::destabilize`] / [`perturb::stabilize`];
//! * [`flow::integrate`] for orbits.

pub mod analysis;
pub mod circle;
pub mod corpus;
pub mod equivalence;
pub mod error;
pub mod expr;
pub mod flow;
pub mod norms;
pub mod perturb;
pub mod report;

pub use analysis::{
    assess, classify, find_fixed_points, phase_portrait, robustness_radius, AnalysisOpts,
    Diagnosis, FixedPoint, FixedPointKind, FixedPointSet, StabilityVerdict,
};
pub use circle::{circ_dist, wrap, Arc, CirclePoint};
pub use equivalence::{build_plh, check_equivalence, Homeo, Orientation, PiecewiseLinearHomeo};
pub use error::{Error, Result};
pub use expr::{differentiate, parse, validate_c1, C1Report, VectorFieldExpr};
pub use flow::{classify_limit, integrate, Orbit, OrbitClass};
pub use norms::{c1_dist, c1_norm, in_ball, NormCertificate};
pub use perturb::{
    destabilize, make_bump, make_double_bump, make_interval_double, make_plateau, size_sigma,
    stabilize, Perturbation, Recipe,
};
pub use report::Report;
