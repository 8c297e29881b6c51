use std::fmt;

/// A diagnostic from one of the line-oriented text formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    /// 1-based line number.
    pub line: usize,
    /// The offending token, empty when the problem is not tied to one.
    pub token: String,
    pub message: String,
}

impl FormatError {
    pub(crate) fn new(line: usize, token: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError {
            line,
            token: token.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.token.is_empty() {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "line {}: `{}`: {}", self.line, self.token, self.message)
        }
    }
}

impl std::error::Error for FormatError {}

/// Yields `(line_number, tokens)` for every non-blank line, with `#` comments stripped.
pub(crate) fn content_lines(src: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    src.lines().enumerate().filter_map(|(i, line)| {
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            None
        } else {
            Some((i + 1, toks))
        }
    })
}
