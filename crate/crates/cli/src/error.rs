use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    /// Input that does not parse or configuration that does not make sense.
    Schema(String),
    /// A named failure from the numerical library.
    Numerical(hankel_spectra::Error),
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Serialize)]
struct Report<'a> {
    error: &'a str,
    class: &'a str,
    message: String,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn to_json(&self) -> String {
        let report = match self {
            CliError::Schema(m) => Report { error: "SchemaViolation", class: "schema", message: m.clone() },
            CliError::Numerical(e) => Report { error: e.kind(), class: "numerical", message: e.to_string() },
            CliError::Io { path, source } => Report { error: "Io", class: "io", message: format!("{}: {source}", path.display()) },
        };
        serde_json::to_string(&report).expect("report serializes")
    }
}

impl From<hankel_spectra::Error> for CliError {
    fn from(e: hankel_spectra::Error) -> Self {
        CliError::Numerical(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}

impl From<hankel_spectra::schema::DecodeError> for CliError {
    fn from(e: hankel_spectra::schema::DecodeError) -> Self {
        CliError::Schema(e.to_string())
    }
}
