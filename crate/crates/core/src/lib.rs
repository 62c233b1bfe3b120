//! Linear extension operators for real-valued pair functions on finite metric
//! spaces.
//!
//! Given a finite metric space `Y` and a subset `X` with two distinguished base
//! points `a` and `b`, the operators in this crate send an arbitrary function
//! `p: X × X → ℝ` to a function on `Y × Y` that agrees with `p` on `X × X`:
//!
//! * `T`, the weighted series `Σ 2⁻ⁿ Tₙ` built from mesh covers and step
//!   functions, summed exactly through its stabilization level;
//! * `S`, `S₁`, `S₂`, the cheaper operators obtained by integrating along the
//!   Dugundji map `h: Y → HM(X)`;
//! * `I = A ∘ T`, the group-invariant extension for a finite group action.
//!
//! All of the numeric machinery is generic over the scalar type; the aliases at
//! the crate root fix it to `f64`.

#![allow(clippy::needless_range_loop)]

pub mod covers;
pub mod dugundji;
pub mod error;
pub mod group;
pub mod hm;
pub mod instance_file;
pub mod operators;
pub mod pair;
pub mod random;
pub mod scalar;
pub mod space;
pub mod verify;

pub use covers::MeshCoverFamily;
pub use dugundji::{CoverBall, InnerCover, WeightedCover};
pub use error::{Error, Result};
pub use group::GroupAction;
pub use hm::{Label, StepFunction};
pub use instance_file::{InstanceFile, LoadedInstance};
pub use operators::{DiagVariant, ExtensionResult, Extender, OperatorKind, SFamily};
pub use pair::{Domain, PairFunction};
pub use scalar::Scalar;
pub use space::{FiniteMetricSpace, Instance, SubsetSpec};
pub use verify::{CheckReport, CheckStatus, MetricMode, SuiteConfig, Witness};

/// A finite metric space with `f64` distances.
pub type Space = FiniteMetricSpace<f64>;
/// An instance (space plus subset) with `f64` distances.
pub type Instance64 = Instance<f64>;
/// A pair function with `f64` values.
pub type Pairs = PairFunction<f64>;
/// A step function with `f64` breakpoints over the default label alphabet.
pub type Step = StepFunction<f64, Label>;
/// A weighted cover with `f64` radii and weights.
pub type Cover = WeightedCover<f64>;
/// An operator output with `f64` values.
pub type Extension = ExtensionResult<f64>;
/// An operator evaluator over an `f64` instance.
pub type Extender64<'a> = Extender<'a, f64>;
