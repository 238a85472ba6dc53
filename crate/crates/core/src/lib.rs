//! Exact computations on the boundary of the homogeneous tree of degree
//! `n + 1`, seen as the Cayley graph of `Γ = Z_2 * ... * Z_2 * Z * ... * Z`
//! (`s` copies of `Z_2`, `t` of `Z`, `s + 2t = n + 1`).
//!
//! * [`group`]: reduced words, spheres, the reduced-word transition matrix.
//! * [`boundary`]: cylinders `Ω^x`, their finite unions and the measure
//!   `ν(Ω^x) = 1/(n+1) · n^-(|x|-1)`; eventually periodic boundary points.
//! * [`action`]: the action of `Γ` on `Ω` and its Radon–Nikodym cocycle.
//! * [`full_group`]: the measure-preserving involutions `k_{x,y}`.
//! * [`ratio_set`]: realized derivative values and ratio-set witnesses.
//! * [`sampler`]: Monte Carlo sampling from `ν`.
//!
//! Measure-valued functions are generic over [`Scalar`]; use [`Exact`] for
//! certified values and [`Approx`] for statistics.

pub mod action;
pub mod boundary;
pub mod error;
pub mod full_group;
pub mod group;
pub mod ratio_set;
pub mod sampler;
pub mod scalar;

pub use action::{act_cylinder, act_point, fixed_points, RnTable};
pub use boundary::{BoundaryPoint, Cylinder, CylinderUnion};
pub use error::{Error, Result};
pub use full_group::{transitivity_check, PiecewiseTranslation, VerificationReport};
pub use group::{Letter, Presentation, Word};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;
/// Floating-point scalar for statistics and plotting.
pub type Approx = f64;

pub type ExactRnTable = RnTable<Exact>;
pub type ApproxRnTable = RnTable<Approx>;
