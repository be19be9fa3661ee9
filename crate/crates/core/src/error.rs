use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate geometry: {0}")]
    Geometry(String),
    #[error("singular Jacobian in element {element}")]
    SingularJacobian { element: usize },
    #[error("inverse map did not converge in element {element} for point ({x}, {y})")]
    InverseMap { element: usize, x: f64, y: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("structurally singular matrix at column {0}")]
    StructurallySingular(usize),
    #[error("zero pivot at column {0}")]
    ZeroPivot(usize),
    #[error("infeasible mesh schedule: {0}")]
    Infeasible(String),
    #[error("interfaces not colinear: {0}")]
    NonColinear(String),
    #[error("frequency {0} Hz lies outside every reduced-model window")]
    OutsideWindows(f64),
    #[error("at {frequency} Hz: {source}")]
    AtFrequency {
        frequency: f64,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub fn at(self, frequency: f64) -> Self {
        Error::AtFrequency { frequency, source: alloc::boxed::Box::new(self) }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
