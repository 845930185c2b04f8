//! CLI error classification and exit codes.

use std::fmt;

/// Exit codes: 1 data/validation, 2 usage, 3 numerical failure.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag combinations.
    Usage(String),
    /// Unreadable or invalid input data.
    Data(String),
    /// The math refused: singular system, non-representable kernel,
    /// inconsistent signs.
    Numerical(String),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError::Data(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numerical(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message())
    }
}

impl From<locpoly::Error> for CliError {
    fn from(err: locpoly::Error) -> Self {
        if err.is_numerical() {
            CliError::Numerical(err.to_string())
        } else {
            CliError::Data(err.to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::usage("x").exit_code(), 2);
        assert_eq!(CliError::data("x").exit_code(), 1);
        assert_eq!(CliError::Numerical("x".into()).exit_code(), 3);
    }

    #[test]
    fn core_errors_are_classified() {
        let singular = locpoly::Error::SingularSystem {
            supported: 1,
            needed: 2,
        };
        assert_eq!(CliError::from(singular).exit_code(), 3);
        let data = locpoly::Error::EmptyDesign;
        assert_eq!(CliError::from(data).exit_code(), 1);
    }
}
