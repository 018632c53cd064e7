//! Convex integrands on S¹ and S².
//!
//! * [`sphere_fn`]: functions on spheres, intrinsic derivatives, critical-point census.
//! * [`convexity`]: the dual embedding θ ↦ θ/γ(−θ), its convex hull, convexity verdicts.
//! * [`stability`]: Morse-type stability, Morse inequalities, the two-point index lemma.
//! * [`perturbation`]: translating the dual body and rebuilding the integrand.
//! * [`caustic`]: caustics, symmetry sets and wave fronts of the dual boundary.
//! * [`corpus`]: named integrands used by tests, benches and the CLI examples.

pub mod caustic;
pub mod convexity;
pub mod corpus;
pub mod error;
pub mod par;
pub mod perturbation;
pub mod sphere_fn;
pub mod stability;
pub mod tangent;

pub use error::{Error, Result};
pub use sphere_fn::{CriticalPoint, SampledFunction, SolverConfig, SphereField, SphereFunction};
