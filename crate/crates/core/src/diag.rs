use std::fmt;

use serde::Serialize;

/// A recoverable data problem found while processing an input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    /// Which stage or input raised it (`records`, `abbrev-map`, `catalog`, ...).
    pub source: String,
    /// 1-based line number within the input, when the problem is tied to one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    pub message: String,
}

impl Warning {
    pub fn new(source: impl Into<String>, message: impl Into<String>) -> Self {
        Warning {
            source: source.into(),
            line: None,
            message: message.into(),
        }
    }

    pub fn at_line(source: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Warning {
            source: source.into(),
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.source, line, self.message),
            None => write!(f, "{}: {}", self.source, self.message),
        }
    }
}
