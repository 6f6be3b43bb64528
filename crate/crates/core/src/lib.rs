//! Exact arithmetic for the equation `n! + 1 = m^2`: every solution criterion
//! as an integer predicate, fixed-point expansions of the fractional part of
//! `sqrt(n!)`, the associated polynomial system, and a quadratic-residue
//! filtered scan over `n` with checkpoint and resume.

pub mod conditions;
pub mod epsilon_lab;
pub mod error;
pub mod exact_arith;
pub mod factorial_engine;
pub mod poly_system;
pub mod qr_filter;
pub mod report;
pub mod search_engine;

pub use error::{CheckpointError, Error, Result};
pub use exact_arith::{BitBudget, Natural, ScaledDecimal};
pub use rug::Integer;
