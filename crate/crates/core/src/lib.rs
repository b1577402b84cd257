//! Exact numerical machinery for bilateral-trade gains-from-trade analysis:
//! piecewise-linear value/cost distributions, benchmark mechanisms, per-cost
//! decomposition bounds, a discrete second-best linear program, and Monte
//! Carlo cross-validation.

pub mod bounds;
pub mod distributions;
pub mod error;
pub mod ladder;
pub mod mechanisms;
pub mod montecarlo;
pub mod secondbest;
mod numeric;
pub(crate) mod simplex;

pub use bounds::{BoundReport, BoundRow, SearchResult};
pub use distributions::{AffineMap, Distribution, Instance};
pub use error::{Error, Result};
pub use ladder::QuantileLadder;
pub use secondbest::{DiscreteInstance, LPModel, SBSolution, SecondBestReport, SolveStatus};
pub use mechanisms::{MechanismDetail, MechanismOutcome};
pub use montecarlo::{Mechanism, SimReport};
