use thiserror::Error;

/// Failure classes of the command-line runner, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] incvol_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn class(&self) -> &'static str {
        use incvol_core::Error as E;
        match self {
            Self::Config(_) => "config",
            Self::Io(_) | Self::Core(E::Io(_)) => "io",
            Self::Core(E::DegenerateField) => "degenerate-field",
            Self::Core(E::IndistinguishablePhases) => "indistinguishable-phases",
            Self::Core(E::SolverFailure { .. }) => "solver",
            Self::Core(_) => "config",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            "config" => 2,
            "solver" => 3,
            "degenerate-field" => 4,
            "indistinguishable-phases" => 5,
            _ => 6,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use incvol_core::Error as E;

    #[test]
    fn exit_codes_are_distinct_per_class() {
        let cases = [
            CliError::Config("x".into()),
            CliError::Core(E::SolverFailure { dofs: 1, reason: "x".into() }),
            CliError::Core(E::DegenerateField),
            CliError::Core(E::IndistinguishablePhases),
            CliError::Io(std::io::Error::other("x")),
        ];
        let codes: Vec<i32> = cases.iter().map(|e| e.exit_code()).collect();
        assert_eq!(codes, vec![2, 3, 4, 5, 6]);
        assert_eq!(CliError::Core(E::InvalidParameters("x".into())).exit_code(), 2);
    }
}
