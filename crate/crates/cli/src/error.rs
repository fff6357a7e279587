use deloc_core::DelocError;

/// Failure of a command, with the exit status it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable file or a value the schema cannot express.
    Input(String),
    /// JSON that does not match the expected shape.
    Schema {
        file: String,
        pointer: String,
        message: String,
    },
    Core(DelocError),
    /// The independent route disagrees beyond tolerance.
    OracleMismatch(String),
}

impl CliError {
    /// 2 for bad input, 3 when the numerics did not converge or disagree.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Schema { .. } => 2,
            CliError::OracleMismatch(_) => 3,
            CliError::Core(e) => match e {
                DelocError::Convergence { .. } | DelocError::Numeric(_) | DelocError::Consistency { .. } => 3,
                _ => 2,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Schema { .. } => "schema",
            CliError::OracleMismatch(_) => "oracle-mismatch",
            CliError::Core(e) => match e {
                DelocError::Schema(_) => "schema",
                DelocError::Domain(_) => "domain",
                DelocError::Convergence { .. } => "convergence",
                DelocError::Validation(_) => "validation",
                DelocError::Pole { .. } => "pole",
                DelocError::Consistency { .. } => "consistency",
                DelocError::InsufficientData(_) => "insufficient-data",
                DelocError::Unsupported(_) => "unsupported",
                DelocError::Numeric(_) => "numeric",
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::OracleMismatch(m) => f.write_str(m),
            CliError::Schema { file, pointer, message } => write!(f, "{file}: at {pointer}: {message}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<DelocError> for CliError {
    fn from(e: DelocError) -> Self {
        CliError::Core(e)
    }
}
