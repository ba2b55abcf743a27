//! Error type shared by the polynomial ring, series algebra, and enumeration
//! layers.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two polynomials over different parameter sets were combined.
    #[error("parameter set mismatch: {0} vs {1}")]
    ParamSetMismatch(String, String),

    /// Two series over different variable sets were combined.
    #[error("series variable mismatch: {0} vs {1}")]
    SeriesVarMismatch(String, String),

    /// Evaluation point omits an indeterminate that occurs in the polynomial.
    #[error("no assignment for indeterminate `{0}`")]
    MissingAssignment(String),

    /// A name not declared in the parameter set was referenced.
    #[error("unknown indeterminate `{0}`")]
    UnknownIndeterminate(String),

    /// `exp` and the negative-binomial power require a zero constant term.
    #[error("series has a nonzero constant term")]
    NonzeroConstantTerm,

    /// Coefficient extraction past the truncation order.
    #[error("degree {degree} exceeds truncation order {order}")]
    DegreeExceedsOrder { degree: u32, order: u32 },

    /// An enumeration or verification request exceeds the configured budget.
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    /// Verification was requested for an unregistered identity key.
    #[error("unknown identity: {0}")]
    UnknownIdentity(String),

    /// A configuration, tuple, or digraph failed structural validation.
    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    /// An inserted vertex label is already present in the digraph.
    #[error("label {0} collides with an existing vertex")]
    LabelCollision(u32),

    /// A splice was requested on a digraph with a non-type-3 component.
    #[error("digraph has a component that is not of type 3")]
    NotType3,
}
