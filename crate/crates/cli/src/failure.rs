use std::fmt;

use serde::Serialize;

/// Exit code for invalid flags, literals or parameters.
pub const EXIT_VALIDATION: u8 = 2;
/// Exit code for eigensolver or quadrature non-convergence.
pub const EXIT_NUMERICAL: u8 = 3;
/// Exit code for I/O failures while writing reports.
pub const EXIT_IO: u8 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub kind: Kind,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Failure {
            kind: Kind::Validation,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Failure {
            kind: Kind::Io,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            Kind::Validation => EXIT_VALIDATION,
            Kind::Numerical => EXIT_NUMERICAL,
            Kind::Io => EXIT_IO,
        }
    }

    /// `{"error": {"kind": ..., "exit_code": ..., "message": ...}}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a Kind,
            exit_code: u8,
            message: &'a str,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Body {
                kind: &self.kind,
                exit_code: self.exit_code(),
                message: &self.message,
            },
        })
        .expect("error JSON serializes")
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<tflimit::Error> for Failure {
    fn from(e: tflimit::Error) -> Self {
        let kind = match e {
            tflimit::Error::NonConvergence(_) | tflimit::Error::RankDeficient(_) => Kind::Numerical,
            _ => Kind::Validation,
        };
        Failure {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e.to_string())
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;
