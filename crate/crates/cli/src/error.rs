use std::process::ExitCode;

use serde::Serialize;

/// A failed run. Printed to stderr as `{"error": {...}}`.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip)]
    pub exit: u8,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: "usage",
            message: message.into(),
            exit: 2,
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: "io",
            message: message.into(),
            exit: 1,
        }
    }

    pub fn numeric(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            exit: 1,
        }
    }

    pub fn report(&self) -> ExitCode {
        let record = serde_json::json!({ "error": self });
        eprintln!("{record}");
        ExitCode::from(self.exit)
    }
}

impl From<degen_dt::Error> for CliError {
    fn from(e: degen_dt::Error) -> Self {
        use degen_dt::Error as E;
        let message = e.to_string();
        match e {
            E::InvalidInput(_) | E::InvalidArgument(_) | E::Precondition(_) => Self {
                kind: "invalid_argument",
                message,
                exit: 2,
            },
            E::Degenerate(_) => Self::numeric("degenerate", message),
            E::NotConvex => Self::numeric("not_convex", message),
            E::DegenerateSystem(_) => Self::numeric("degenerate_system", message),
            E::BudgetExceeded { .. } => Self::numeric("budget_exceeded", message),
            E::AccuracyFailure { .. } => Self::numeric("accuracy_failure", message),
            E::Internal(_) => Self::numeric("internal", message),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self {
            kind: "malformed_input",
            message: e.to_string(),
            exit: 1,
        }
    }
}
