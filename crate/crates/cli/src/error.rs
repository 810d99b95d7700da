use std::fmt;

use qbayes::{BayesNetError, CompileError, InferenceError, SimError};

/// Failure of a command, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input: exit 2.
    Input(String),
    /// Impossible evidence, or a draw budget or restart cap ran out: exit 3.
    Budget(String),
    /// Width or enumeration guard: exit 4.
    Guard(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Guard(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Budget(m) | CliError::Guard(m) => f.write_str(m),
        }
    }
}

impl From<BayesNetError> for CliError {
    fn from(e: BayesNetError) -> Self {
        let msg = e.to_string();
        match e {
            BayesNetError::ImpossibleEvidence | BayesNetError::DrawBudgetExhausted { .. } => {
                CliError::Budget(msg)
            }
            BayesNetError::EnumerationGuard(_) | BayesNetError::TooManyNodes(_) => {
                CliError::Guard(msg)
            }
            _ => CliError::Input(msg),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::WidthGuard { .. } => CliError::Guard(e.to_string()),
            SimError::VanishingBranch(_) => CliError::Budget(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        match e {
            CompileError::Net(n) => n.into(),
            CompileError::TableGuard(_) => CliError::Guard(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<InferenceError> for CliError {
    fn from(e: InferenceError) -> Self {
        match e {
            InferenceError::Net(n) => n.into(),
            InferenceError::Compile(c) => c.into(),
            InferenceError::Sim(s) => s.into(),
            InferenceError::RestartCap { .. } | InferenceError::VanishingEvidence { .. } => {
                CliError::Budget(e.to_string())
            }
            InferenceError::EmptyEvidence => CliError::Input(e.to_string()),
        }
    }
}
