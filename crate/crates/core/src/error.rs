use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain specification: {0}")]
    InvalidSpec(String),
    #[error("anisotropy chi = {chi} outside [0, 1)")]
    ChiOutOfRange { chi: f64 },
    #[error("degenerate coupling: v_x equals v_z")]
    DegenerateCoupling,
    #[error("system size {n} exceeds the limit {max} for this operation")]
    SizeTooLarge { n: usize, max: usize },
    #[error("mixture weight q = {q} outside [0, 1]")]
    WeightOutOfRange { q: f64 },
    #[error("block size {l} outside 1..={max}")]
    BlockOutOfRange { l: usize, max: usize },
    #[error("scaled anisotropy must be positive, got {delta}")]
    NonPositiveDelta { delta: f64 },
    #[error("negative discriminant {value} for the parallel populations")]
    NegativeDiscriminant { value: f64 },
    #[error("not a density matrix: {0}")]
    NotADensityMatrix(String),
    #[error("bad site indices ({i}, {j}) for n = {n}")]
    BadIndices { i: usize, j: usize, n: usize },
    #[error("collective model requires the constant range profile r_l = 2/(n-1)")]
    NotFullyConnected,
    #[error("free-fermion model requires nearest-neighbour couplings and n >= 3")]
    NotNearestNeighbor,
    #[error("free-fermion model requires v_z = 0; use the exact-diagonalization oracle")]
    VzUnsupported,
    #[error("separation {l} outside 1..={max}")]
    SeparationOutOfRange { l: usize, max: usize },
    #[error("field grid is empty")]
    EmptyGrid,
    #[error("field grid is not sorted ascending")]
    UnsortedGrid,
    #[error("temperature must be positive, got {t}")]
    NonPositiveTemperature { t: f64 },
    #[error("eigensolver did not converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;
