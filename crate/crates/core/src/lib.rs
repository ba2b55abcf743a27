//! Exact polynomial algebra and combinatorial enumeration for Charlier
//! polynomials, Charlier configurations, and their generating-function
//! identities.

pub mod budget;
pub mod charlier;
pub mod configs;
pub mod error;
pub mod identities;
pub mod polyring;
pub mod series;

pub use budget::EnumerationBudget;
pub use error::{Error, Result};
