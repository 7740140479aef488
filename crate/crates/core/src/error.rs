use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input matrix is not Hermitian (deviation {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("input matrix is not unitary (residual {residual:.3e})")]
    NonUnitaryInput { residual: f64 },

    #[error("state is not normalized (norm {norm})")]
    NonNormalizedState { norm: f64 },

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("KAK decomposition failed (reconstruction residual {residual:.3e})")]
    DecompositionFailed { residual: f64 },

    #[error("basis is not orthonormal (Gram deviation {deviation:.3e})")]
    NonOrthonormalBasis { deviation: f64 },

    #[error("value {value} outside the domain {domain}")]
    DomainError { value: f64, domain: &'static str },

    #[error("index {index} out of range (0..{len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("insufficient data: {nonzero} nonzero points, at least {required} required")]
    InsufficientData { nonzero: usize, required: usize },

    #[error("fit diverged: {0}")]
    FitDiverged(String),

    #[error("sample store does not contain the {0} measure pair")]
    MissingMeasure(&'static str),
}
