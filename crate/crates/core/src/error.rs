use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tau has no complement")]
    ComplementOfTau,

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{line}:{column}: unknown action `{name}` (not in the alphabet)")]
    UnknownAction {
        line: usize,
        column: usize,
        name: String,
    },

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("term is not closed: {0}")]
    OpenTerm(String),

    #[error("duplicate equation name `{0}`")]
    DuplicateEquation(String),

    #[error("unknown schema tag `{0}`")]
    UnknownSchemaTag(String),

    #[error("rule set is not in de Simone format: {}", .0.join("; "))]
    NonDeSimone(Vec<String>),

    #[error("operator `{op}` has arity {arity}, only binary operators are supported")]
    ArityMismatch { op: String, arity: usize },

    #[error("schema `{tag}` would generate {count} instances, above the cap of {cap}")]
    SchemaCap { tag: String, count: usize, cap: usize },

    #[error("no axiom named `{0}` in the system")]
    UnknownAxiom(String),

    #[error("elimination cannot progress on `{0}`")]
    StuckTerm(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("gave up after {0} rewrite moves")]
    StepBudget(usize),

    #[error("unknown semantics `{0}`")]
    UnknownSemantics(String),

    #[error("`{axiom}` does not match at position {position:?}")]
    NoMatch { axiom: String, position: Vec<usize> },

    #[error("invalid position {0:?}")]
    BadPosition(Vec<usize>),

    #[error("malformed proof: {0}")]
    MalformedProof(String),

    #[error("invalid witness family request: {0}")]
    Family(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Error {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
