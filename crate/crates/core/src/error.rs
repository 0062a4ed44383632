use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The Rankine-Hugoniot quotient is undefined for identical states.
    #[error("shock speed requested for identical states u = {0}")]
    EqualStates(f64),

    #[error("root search for {what} did not converge (u = {at})")]
    NoConvergence { what: &'static str, at: f64 },

    #[error("map is not defined for this flux: {0}")]
    Unsupported(&'static str),

    #[error("invalid flux: {0}")]
    InvalidFlux(String),

    #[error("kinetic function is not admissible for this flux: {0}")]
    InvalidKinetics(String),

    #[error("bad domain [{lo}, {hi}] with {cells} cells")]
    BadDomain { lo: f64, hi: f64, cells: usize },

    #[error("reconstructed discontinuity in cell {cell} has speed {speed} against the flow direction")]
    DegenerateSpeed { cell: isize, speed: f64 },

    #[error("degenerate convergence fit: {0}")]
    DegenerateFit(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite value {value} in cell {cell} at t = {t}")]
    NonFinite { cell: usize, value: f64, t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
