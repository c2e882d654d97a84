use curvscan_core::symbolic::KernelError;
use curvscan_core::CoreError;

/// Exit code table: 0 success or DISTINGUISHED, 1 INCONCLUSIVE,
/// 2 input error, 3 mathematical precondition failure.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MATH: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Input(_) | CliError::Io(_) => EXIT_INPUT,
            CliError::Core(e) => match e {
                CoreError::Kernel(KernelError::Parse { .. } | KernelError::Unbound(_))
                | CoreError::UnknownEntry(_)
                | CoreError::BadParameter(_)
                | CoreError::DuplicateCoordinate(_)
                | CoreError::UnknownCoordinate(_)
                | CoreError::ChartTooSmall(_) => EXIT_INPUT,
                _ => EXIT_MATH,
            },
        }
    }
}
