//! Best-item identification for Plackett-Luce subset-choice models.
//!
//! The learner repeatedly plays subsets of `k` items and observes either the
//! winner or the top-`m` ranking drawn from the model. [`wrapper`] finds the
//! best item with confidence `1 - delta` (or an `eps`-good item),
//! [`uniform`] does the same under a fixed play budget, and [`bounds`]
//! evaluates the matching complexity expressions. [`experiments`] drives
//! seeded sweeps over the built-in environments.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.

pub mod best_item;
pub mod bounds;
pub mod error;
pub mod experiments;
pub mod model;
pub mod oracle;
pub mod rank_breaking;
pub mod report;
pub mod scalar;
pub mod subroutines;
pub mod uniform;
pub mod wrapper;

pub use error::{Error, Result};
pub use model::{InstanceFile, PlModel, RankedFeedback};
pub use rank_breaking::WinCountMatrix;
pub use report::{survival_profile, RunReport, Trace};
pub use scalar::Scalar;

pub type PlInstance = model::PlModel<f64>;
pub type PlInstanceF32 = model::PlModel<f32>;
pub type GapProfile = model::GapProfile<f64>;
pub type ComplexityTerms = bounds::ComplexityTerms<f64>;
pub type WrapperConfig = wrapper::WrapperConfig<f64>;
pub type BestItemConfig = best_item::BestItemConfig<f64>;
pub type SubroutineReport = best_item::SubroutineReport<f64>;
pub use uniform::BudgetConfig;
