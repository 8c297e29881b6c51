//! Loading and writing the text formats, with diagnostics that name the
//! file, the line and the token.

use std::fmt;
use std::fs;
use std::path::Path;

use opvp::grammar::{enumerate_language, GrammarError};
use opvp::precedence::{build_opm, classify_vp, total_vp_matrix, PrecedenceError};
use opvp::vpda::enumerate_accepted;
use opvp::{FormatError, Grammar, PrecedenceMatrix, VpPartition, Vpda, VpdaError, Word};
use std::collections::BTreeSet;

/// An input problem; always exit status 2.
#[derive(Debug)]
pub struct InputError {
    /// The file or flag the problem is in.
    pub origin: String,
    pub line: Option<usize>,
    pub token: Option<String>,
    pub message: String,
}

impl InputError {
    pub fn new(origin: impl Into<String>, message: impl Into<String>) -> Self {
        InputError {
            origin: origin.into(),
            line: None,
            token: None,
            message: message.into(),
        }
    }

    pub fn with_token(mut self, token: impl Into<String>) -> Self {
        self.token = Some(token.into());
        self
    }

    fn from_format(origin: &Path, e: &FormatError) -> Self {
        InputError {
            origin: origin.display().to_string(),
            line: Some(e.line),
            token: (!e.token.is_empty()).then(|| e.token.clone()),
            message: e.message.clone(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.origin)?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(token) = &self.token {
            write!(f, ": `{token}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// A parsed input file.
pub enum Artifact {
    Grammar(Grammar),
    Vpda(Vpda),
    Matrix(PrecedenceMatrix),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Grammar,
    Vpda,
    Matrix,
}

/// The extension decides; unknown extensions are sniffed from the
/// directives the file uses.
fn kind_of(path: &Path, src: &str) -> Option<Kind> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("fg") => return Some(Kind::Grammar),
        Some("vpda") => return Some(Kind::Vpda),
        Some("opm") => return Some(Kind::Matrix),
        _ => {}
    }
    let words: BTreeSet<&str> = src
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .collect();
    if words.contains("%axiom") {
        Some(Kind::Grammar)
    } else if words.contains("%initial") {
        Some(Kind::Vpda)
    } else {
        None
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError::new(path.display().to_string(), e.to_string()))
}

fn grammar_error(path: &Path, e: GrammarError) -> InputError {
    match &e {
        GrammarError::Format(f) => InputError::from_format(path, f),
        GrammarError::OverlappingNames(t)
        | GrammarError::UndeclaredSymbol(t)
        | GrammarError::AxiomNotNonterminal(t)
        | GrammarError::EmptyRuleNotAxiom(t)
        | GrammarError::UnknownNonterminal(t) => {
            InputError::new(path.display().to_string(), e.to_string()).with_token(&**t)
        }
        _ => InputError::new(path.display().to_string(), e.to_string()),
    }
}

fn vpda_error(path: &Path, e: VpdaError) -> InputError {
    match &e {
        VpdaError::Format(f) | VpdaError::Partition(PrecedenceError::Format(f)) => {
            InputError::from_format(path, f)
        }
        VpdaError::UnknownState(t)
        | VpdaError::UnknownLetter(t)
        | VpdaError::UnknownStackSymbol(t) => {
            InputError::new(path.display().to_string(), e.to_string()).with_token(&**t)
        }
        _ => InputError::new(path.display().to_string(), e.to_string()),
    }
}

fn matrix_error(path: &Path, e: PrecedenceError) -> InputError {
    match &e {
        PrecedenceError::Format(f) => InputError::from_format(path, f),
        _ => InputError::new(path.display().to_string(), e.to_string()),
    }
}

pub fn load(path: &Path) -> Result<Artifact, InputError> {
    let src = read(path)?;
    match kind_of(path, &src) {
        Some(Kind::Grammar) => Grammar::parse_text(&src)
            .map(Artifact::Grammar)
            .map_err(|e| grammar_error(path, e)),
        Some(Kind::Vpda) => Vpda::parse_text(&src)
            .map(Artifact::Vpda)
            .map_err(|e| vpda_error(path, e)),
        Some(Kind::Matrix) => PrecedenceMatrix::parse_text(&src)
            .map(Artifact::Matrix)
            .map_err(|e| matrix_error(path, e)),
        None => Err(InputError::new(
            path.display().to_string(),
            "cannot tell the format; use the .fg, .vpda or .opm extension",
        )),
    }
}

pub fn load_grammar(path: &Path) -> Result<Grammar, InputError> {
    match load(path)? {
        Artifact::Grammar(g) => Ok(g),
        _ => Err(InputError::new(
            path.display().to_string(),
            "expected a grammar",
        )),
    }
}

pub fn load_vpda(path: &Path) -> Result<Vpda, InputError> {
    match load(path)? {
        Artifact::Vpda(a) => Ok(a),
        _ => Err(InputError::new(
            path.display().to_string(),
            "expected an automaton",
        )),
    }
}

impl Artifact {
    /// The precedence matrix: the OPM of a grammar, the total VP matrix of
    /// an automaton's partition, or the matrix itself.
    pub fn matrix(&self, path: &Path) -> Result<PrecedenceMatrix, InputError> {
        match self {
            Artifact::Grammar(g) => build_opm(g)
                .map(|a| a.matrix)
                .map_err(|e| InputError::new(path.display().to_string(), e.to_string())),
            Artifact::Vpda(a) => Ok(total_vp_matrix(a.partition())),
            Artifact::Matrix(m) => Ok(m.clone()),
        }
    }

    /// The partition of an automaton, or the classification of a matrix.
    pub fn partition(&self, path: &Path) -> Result<Option<VpPartition>, InputError> {
        match self {
            Artifact::Vpda(a) => Ok(Some(a.partition().clone())),
            _ => classify_vp(&self.matrix(path)?)
                .map_err(|e| InputError::new(path.display().to_string(), e.to_string())),
        }
    }

    pub fn language(&self, path: &Path, max_len: usize) -> Result<BTreeSet<Word>, InputError> {
        let origin = || path.display().to_string();
        match self {
            Artifact::Grammar(g) => {
                enumerate_language(g, max_len).map_err(|e| InputError::new(origin(), e.to_string()))
            }
            Artifact::Vpda(a) => {
                enumerate_accepted(a, max_len).map_err(|e| InputError::new(origin(), e.to_string()))
            }
            Artifact::Matrix(_) => Err(InputError::new(
                origin(),
                "a matrix does not define a language",
            )),
        }
    }
}

pub fn write(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|e| InputError::new(path.display().to_string(), e.to_string()))
}
