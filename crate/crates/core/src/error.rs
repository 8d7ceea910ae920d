use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("p = {0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("invalid precision k = {0}")]
    InvalidPrecision(u32),
    #[error("precision mismatch: (p={p1}, k={k1}) vs (p={p2}, k={k2})")]
    PrecisionMismatch { p1: u64, k1: u32, p2: u64, k2: u32 },
    #[error("curve is not ordinary at p: p divides a_p = {0}")]
    NotOrdinary(i64),
    #[error("{g} is not a primitive root modulo {modulus}")]
    NotPrimitiveRoot { g: u64, modulus: u64 },
    #[error("{a} is not a unit modulo {modulus}")]
    NotUnit { a: String, modulus: u64 },
    #[error("{0} is not p-integral")]
    NotPIntegral(String),
    #[error("layer {requested} out of range (available: {available})")]
    LayerOutOfRange { requested: i64, available: u32 },
    #[error("operation needs a mod-p^k ring, got the exact-rational mode")]
    ExactModeUnsupported,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unsupported quotient: {0}")]
    UnsupportedQuotient(String),
    #[error("presentation has {0} generators; at most 6 are supported for minor enumeration")]
    TooManyGenerators(usize),
    #[error("constant terms violate b1(0) = ((p-1)/2) b2(0): b1(0) = {b1}, b2(0) = {b2}")]
    ConstantTermMismatch { b1: u64, b2: u64 },
    #[error("bad reduction at {0}")]
    BadReduction(u64),
    #[error("prime {0} exceeds the point-counting bound")]
    PrimeTooLarge(u64),
    #[error("level {0} exceeds the supported bound")]
    LevelTooLarge(u64),
    #[error("singular curve (zero discriminant)")]
    SingularCurve,
    #[error("plus eigenspace has dimension {0}, expected 1")]
    EigenspaceNotRankOne(usize),
    #[error("inconsistent eigenvalues: {0}")]
    InconsistentEigenvalues(String),
    #[error("cache miss for {0}")]
    CacheMiss(String),
    #[error("corrupt cache file {0}")]
    CorruptCache(String),
    #[error("p = {p} divides the conductor {conductor}")]
    BadPrime { p: u64, conductor: u64 },
    #[error("modular symbol unavailable: {0}")]
    SymbolUnavailable(String),
    #[error("theta is not divisible by the plus/minus factor: {0}")]
    NotDivisible(Box<NotDivisibleDiagnostics>),
    #[error("{ell} is not a Kolyvagin prime")]
    NotKolyvagin { ell: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Everything needed to tell a convention error from a precision artifact.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct NotDivisibleDiagnostics {
    pub p: u64,
    pub n: u32,
    pub k: u32,
    pub divisor: String,
    pub element: Vec<u64>,
    pub element_lattice: Vec<Vec<u64>>,
    pub divisor_ideal_lattice: Vec<Vec<u64>>,
}

impl std::fmt::Display for NotDivisibleDiagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "p={} n={} k={} divisor={} element={:?}",
            self.p, self.n, self.k, self.divisor, self.element
        )
    }
}

impl Error {
    /// Errors that describe a mathematical verdict rather than bad input or IO.
    pub fn is_math_failure(&self) -> bool {
        matches!(
            self,
            Error::NotDivisible(_)
                | Error::NotOrdinary(_)
                | Error::EigenspaceNotRankOne(_)
                | Error::InconsistentEigenvalues(_)
                | Error::NotKolyvagin { .. }
                | Error::NotPIntegral(_)
                | Error::ConstantTermMismatch { .. }
                | Error::BadPrime { .. }
                | Error::BadReduction(_)
                | Error::SymbolUnavailable(_)
        )
    }

    /// Stable snake-case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPrime(_) => "invalid_prime",
            Error::InvalidPrecision(_) => "invalid_precision",
            Error::PrecisionMismatch { .. } => "precision_mismatch",
            Error::NotOrdinary(_) => "not_ordinary",
            Error::NotPrimitiveRoot { .. } => "not_primitive_root",
            Error::NotUnit { .. } => "not_unit",
            Error::NotPIntegral(_) => "not_p_integral",
            Error::LayerOutOfRange { .. } => "layer_out_of_range",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::UnsupportedQuotient(_) => "unsupported_quotient",
            Error::TooManyGenerators(_) => "too_many_generators",
            Error::ConstantTermMismatch { .. } => "constant_term_mismatch",
            Error::BadReduction(_) => "bad_reduction",
            Error::PrimeTooLarge(_) => "prime_too_large",
            Error::LevelTooLarge(_) => "level_too_large",
            Error::EigenspaceNotRankOne(_) => "eigenspace_not_rank_one",
            Error::InconsistentEigenvalues(_) => "inconsistent_eigenvalues",
            Error::CacheMiss(_) => "cache_miss",
            Error::CorruptCache(_) => "corrupt_cache",
            Error::BadPrime { .. } => "bad_prime",
            Error::SymbolUnavailable(_) => "symbol_unavailable",
            Error::ExactModeUnsupported => "exact_mode_unsupported",
            Error::SingularCurve => "singular_curve",
            Error::NotDivisible(_) => "not_divisible",
            Error::NotKolyvagin { .. } => "not_kolyvagin",
            Error::InvalidInput(_) => "invalid_input",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io(_) | Error::CacheMiss(_) | Error::CorruptCache(_)
        )
    }
}
