use kpz_cond::Error as CoreError;

/// Failure classes of the harness, one per process exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numerical diagnostic failed: {0}")]
    Numerical(String),
    #[error("convergence check failed: {0}")]
    Convergence(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Validation(_) => 2,
            LabError::Numerical(_) | LabError::Io(_) => 3,
            LabError::Convergence(_) => 4,
        }
    }

    /// Short machine-readable class name used in the stderr error record.
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Validation(_) => "validation",
            LabError::Numerical(_) => "numerical",
            LabError::Convergence(_) => "convergence",
            LabError::Io(_) => "io",
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        LabError::Validation(msg.into())
    }

    /// Classifies a core error, prefixing it with what was being evaluated.
    pub fn core(context: impl std::fmt::Display, e: CoreError) -> Self {
        let msg = format!("{context}: {e}");
        match e {
            CoreError::InvalidInput(_)
            | CoreError::DimensionTooLarge { .. }
            | CoreError::CostGuard { .. }
            | CoreError::OutOfRange { .. }
            | CoreError::InsufficientRange { .. } => LabError::Validation(msg),
            CoreError::NonFinite { .. }
            | CoreError::Divergent { .. }
            | CoreError::BlowUp { .. }
            | CoreError::ResidualTooLarge { .. } => LabError::Numerical(msg),
        }
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;
