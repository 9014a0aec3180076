use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("malformed CSV at line {line}: {message}")]
    MalformedCsv { line: u64, message: String },

    #[error("line {line} has {found} cells, header has {expected}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("no column named {0:?}")]
    NoSuchColumn(String),

    #[error("row {row}: cell {content:?} is not a finite decimal number")]
    NonNumericCell { row: usize, content: String },

    #[error("row {row}: empty cell")]
    EmptyCell { row: usize },

    #[error("ledger {}: {message}", path.display())]
    CorruptLedger { path: PathBuf, message: String },

    #[error("ledger {} already exists", .0.display())]
    LedgerExists(PathBuf),

    #[error(transparent)]
    Core(#[from] gramdp_core::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl AppError {
    /// Process exit code: 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Short machine-readable kind for the error JSON.
    pub fn kind(&self) -> &'static str {
        use gramdp_core::Error as E;
        match self {
            Self::Usage(_) => "usage",
            Self::FileNotFound(_) => "file_not_found",
            Self::MalformedCsv { .. } => "malformed_csv",
            Self::RaggedRow { .. } => "ragged_row",
            Self::NoSuchColumn(_) => "no_such_column",
            Self::NonNumericCell { .. } => "non_numeric_cell",
            Self::EmptyCell { .. } => "empty_cell",
            Self::CorruptLedger { .. } => "corrupt_ledger",
            Self::LedgerExists(_) => "ledger_exists",
            Self::Core(E::BudgetExhausted { .. }) => "budget_exhausted",
            Self::Core(E::EmptyColumn) => "empty_column",
            Self::Core(E::NotEnoughRows { .. }) => "not_enough_rows",
            Self::Core(_) => "invalid_input",
            Self::Json(_) => "json",
            Self::Io(_) => "io",
        }
    }
}

pub type Result<T, E = AppError> = std::result::Result<T, E>;
