use thiserror::Error;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tree order k must be at least 1")]
    InvalidOrder,
    #[error("generator index {index} out of range 1..={max}")]
    GeneratorOutOfRange { index: usize, max: usize },
    #[error("words belong to different groups (k = {left} vs k = {right})")]
    MismatchedOrder { left: usize, right: usize },
    #[error("ball of radius {radius} has {size} vertices, exceeding the cap of {cap}")]
    BallTooLarge { radius: usize, size: u128, cap: usize },
    #[error("malformed word {0:?}")]
    MalformedWord(String),
    #[error("malformed permutation {0:?}")]
    MalformedPermutation(String),
    #[error("image of generator a_{0} is not an involution")]
    NotInvolution(usize),
    #[error("homomorphism needs {expected} generator images, got {got}")]
    WrongImageCount { expected: usize, got: usize },
    #[error("image group exceeds the cap of {cap} elements")]
    ImageTooLarge { cap: usize },
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("eigen-solver failed: residual {residual:e} exceeds tolerance {tolerance:e}")]
    SolverFailure { residual: f64, tolerance: f64 },
    #[error("sequence overflows floating point range at n = {n}")]
    Overflow { n: i64 },
    #[error("characteristic roots are nearly equal (|l1 - l2| = {gap:e}); the fit is ill-conditioned")]
    IllConditioned { gap: f64 },
    #[error("operation requires a constant potential")]
    NonConstantPotential,
    #[error("sequence covers [{have_min}, {have_max}], need [{need_min}, {need_max}]")]
    RangeTooSmall {
        have_min: i64,
        have_max: i64,
        need_min: i64,
        need_max: i64,
    },
    #[error("empty or invalid index range")]
    InvalidRange,
    #[error("radius must be at least {0}")]
    RadiusTooSmall(usize),
    #[error("found only {found} of {wanted} kernel elements within the ball; increase the radius")]
    InsufficientKernel { found: usize, wanted: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
