use alloc::string::{String, ToString};

/// A string that is not one of an enumeration's names.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {kind} `{value}`")]
pub struct UnknownName {
    pub kind: &'static str,
    pub value: String,
}

impl UnknownName {
    pub fn new(kind: &'static str, value: &str) -> Self {
        UnknownName { kind, value: value.to_string() }
    }
}

/// Malformed bundled or user-supplied table file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("{table}: line {line}: {message}")]
    Syntax { table: &'static str, line: usize, message: String },
    #[error("{table}: line {line}: {source}")]
    Name {
        table: &'static str,
        line: usize,
        #[source]
        source: UnknownName,
    },
    #[error("{table}: `{key}` listed more than once")]
    Duplicate { table: &'static str, key: String },
    #[error("{table}: `{key}` has no row")]
    Missing { table: &'static str, key: String },
}
