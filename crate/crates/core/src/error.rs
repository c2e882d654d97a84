use curvscan_symbolic::KernelError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("chart needs at least two coordinates, got {0}")]
    ChartTooSmall(usize),
    #[error("coordinate '{0}' is declared twice")]
    DuplicateCoordinate(String),
    #[error("unknown coordinate '{0}'")]
    UnknownCoordinate(String),
    #[error("metric must be {n}x{n}")]
    MetricShape { n: usize },
    #[error("metric is not symmetric: g[{0}][{1}] != g[{1}][{0}]")]
    NotSymmetric(usize, usize),
    #[error("signature ({p},{q}) does not match dimension {n}")]
    SignatureMismatch { p: usize, q: usize, n: usize },
    #[error("metric is degenerate (det g = 0)")]
    DegenerateMetric,
    #[error("tensors live on different charts")]
    ChartMismatch,
    #[error("slot {slot} is out of range for a rank-{rank} tensor")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("slot variance mismatch: {0}")]
    SlotVariance(String),
    #[error("{what} needs dimension {need}, chart has {n}")]
    Dimension { what: String, need: String, n: usize },
    #[error("torsion is not antisymmetric in its lower slots at ({0},{1},{2})")]
    TorsionNotAntisymmetric(usize, usize, usize),
    #[error("{0}")]
    NotAntisymmetric(String),
    #[error("recipe '{recipe}' needs derivative order {needed}, bundle has {available}")]
    InsufficientOrder {
        recipe: String,
        needed: usize,
        available: usize,
    },
    #[error("the zero vector field is not a valid input")]
    ZeroField,
    #[error("Kundt constraint violated: {0}")]
    KundtConstraint(String),
    #[error("unknown catalog entry '{0}'")]
    UnknownEntry(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("incompatible geometries: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
