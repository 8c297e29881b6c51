//! Floyd (operator-precedence) grammars and visibly pushdown automata.
//!
//! The crate covers the two formalisms and the bridges between them:
//!
//! * [`grammar`]: context-free grammars, structural predicates, reduction,
//!   and two independent bounded-membership oracles.
//! * [`precedence`]: left/right terminal sets, operator precedence matrices,
//!   conflict detection, and classification of a matrix against a
//!   call/return/internal partition of the alphabet.
//! * [`parser`]: precedence-driven shift-reduce recognition.
//! * [`vpda`]: visibly pushdown automata, their runs, and the structure of
//!   strings over a partitioned alphabet.
//! * [`transforms`]: automaton to grammar, grammar to automaton, and grammar
//!   reversal.
//!
//! Terminals, nonterminals, states and stack symbols are all plain tokens
//! ([`Token`]); a string over an alphabet is a [`Word`].

use std::sync::Arc;

pub mod grammar;
pub mod parser;
pub mod precedence;
pub mod transforms;
pub mod vpda;

mod text;

pub use grammar::{Grammar, GrammarError, Rule, Symbol};
pub use parser::{
    parse, precedence_trace, render_trace, OpParser, ParseError, ParseNode, ParseOutcome,
};
pub use precedence::{PrecRel, PrecedenceError, PrecedenceMatrix, RelSet, VpPartition};
pub use text::FormatError;
pub use transforms::{fg_to_vpda, reverse_fg, vpda_to_fg, ConstructionReport, TransformError};
pub use vpda::{Configuration, Factorization, StackTop, Vpda, VpdaError, VpdaTransition};

/// A terminal, nonterminal, state or stack-symbol name.
pub type Token = Arc<str>;

/// A string of terminal tokens.
pub type Word = Vec<Token>;

/// Splits whitespace-separated input into a word.
pub fn tokenize(input: &str) -> Word {
    input.split_whitespace().map(Token::from).collect()
}

/// Renders a word as whitespace-separated tokens; the empty word renders as `ε`.
pub fn display_word(w: &[Token]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.iter().map(|t| &**t).collect::<Vec<_>>().join(" ")
    }
}
