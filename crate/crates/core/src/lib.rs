//! Linear model selection by screening, ordering and selection (SOS) and
//! its ordering–selection variant (OS), with identifiability diagnostics,
//! closed-form error bounds and a seeded simulation harness.

pub mod bounds;
pub mod design;
pub mod error;
pub mod identifiability;
pub mod io;
pub mod lasso;
pub mod linalg;
pub mod select;
pub mod simlab;
pub mod subsets;

pub use design::{standardize, Dataset, ModelSet, Parametrization, StandardizedDesign};
pub use error::{Error, Result};
pub use lasso::PenaltyPair;
pub use select::{run_os, run_sos, SelectOptions, SelectionOutcome};
