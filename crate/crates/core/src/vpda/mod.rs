//! Visibly pushdown automata.
//!
//! A call pushes a symbol other than `⊥`, a return pops the top symbol (a
//! return on the bare bottom leaves `⊥` in place) and an internal letter
//! leaves the stack alone. Acceptance is by final state with any stack.

mod run;
mod text;
mod words;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::precedence::{LetterClass, PrecedenceError, VpPartition};
use crate::text::FormatError;
use crate::Token;

pub use run::{
    enumerate_accepted, enumerate_accepted_with_budget, Configuration, DEFAULT_CONFIGURATION_BUDGET,
};
pub use words::{
    factorize, factorize_all, is_well_balanced, is_well_closed, is_well_parenthesized, rho,
    Factorization, YPart,
};

/// Text-format name of the stack bottom.
pub const BOTTOM: &str = "_bot";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VpdaError {
    #[error("unknown state `{0}`")]
    UnknownState(Token),
    #[error("`{0}` is not a letter of the alphabet")]
    UnknownLetter(Token),
    #[error("`{letter}` is used as a {used:?} letter but is not one")]
    WrongLetterClass { letter: Token, used: LetterClass },
    #[error("unknown stack symbol `{0}`")]
    UnknownStackSymbol(Token),
    #[error("`{BOTTOM}` is implicit and cannot be declared or pushed")]
    ReservedStackSymbol,
    #[error("the alphabet is empty")]
    EmptyAlphabet,
    #[error(transparent)]
    Partition(#[from] PrecedenceError),
    #[error("budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("{0}")]
    Format(#[from] FormatError),
}

/// The stack symbol a return transition reads.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StackTop {
    Bottom,
    Symbol(Token),
}

impl StackTop {
    pub fn from_name(name: &str) -> StackTop {
        if name == BOTTOM {
            StackTop::Bottom
        } else {
            StackTop::Symbol(name.into())
        }
    }

    pub fn name(&self) -> &str {
        match self {
            StackTop::Bottom => BOTTOM,
            StackTop::Symbol(z) => z,
        }
    }
}

impl fmt::Display for StackTop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for StackTop {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VpdaTransition {
    Call {
        from: Token,
        letter: Token,
        to: Token,
        push: Token,
    },
    #[serde(rename = "ret")]
    Return {
        from: Token,
        letter: Token,
        top: StackTop,
        to: Token,
    },
    #[serde(rename = "int")]
    Internal {
        from: Token,
        letter: Token,
        to: Token,
    },
}

impl VpdaTransition {
    pub fn call(from: &str, letter: &str, to: &str, push: &str) -> Self {
        VpdaTransition::Call {
            from: from.into(),
            letter: letter.into(),
            to: to.into(),
            push: push.into(),
        }
    }

    /// `top` is a stack symbol name or `_bot`.
    pub fn ret(from: &str, letter: &str, top: &str, to: &str) -> Self {
        VpdaTransition::Return {
            from: from.into(),
            letter: letter.into(),
            top: StackTop::from_name(top),
            to: to.into(),
        }
    }

    pub fn int(from: &str, letter: &str, to: &str) -> Self {
        VpdaTransition::Internal {
            from: from.into(),
            letter: letter.into(),
            to: to.into(),
        }
    }

    pub fn from(&self) -> &Token {
        match self {
            VpdaTransition::Call { from, .. }
            | VpdaTransition::Return { from, .. }
            | VpdaTransition::Internal { from, .. } => from,
        }
    }

    pub fn to(&self) -> &Token {
        match self {
            VpdaTransition::Call { to, .. }
            | VpdaTransition::Return { to, .. }
            | VpdaTransition::Internal { to, .. } => to,
        }
    }

    pub fn letter(&self) -> &Token {
        match self {
            VpdaTransition::Call { letter, .. }
            | VpdaTransition::Return { letter, .. }
            | VpdaTransition::Internal { letter, .. } => letter,
        }
    }

    fn class(&self) -> LetterClass {
        match self {
            VpdaTransition::Call { .. } => LetterClass::Call,
            VpdaTransition::Return { .. } => LetterClass::Return,
            VpdaTransition::Internal { .. } => LetterClass::Internal,
        }
    }
}

impl fmt::Display for VpdaTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VpdaTransition::Call {
                from,
                letter,
                to,
                push,
            } => write!(f, "call {from} {letter} {to} {push}"),
            VpdaTransition::Return {
                from,
                letter,
                top,
                to,
            } => write!(f, "ret {from} {letter} {top} {to}"),
            VpdaTransition::Internal { from, letter, to } => write!(f, "int {from} {letter} {to}"),
        }
    }
}

/// A nondeterministic visibly pushdown automaton without ε-moves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Vpda {
    partition: VpPartition,
    states: BTreeSet<Token>,
    initial: Token,
    finals: BTreeSet<Token>,
    /// Stack symbols other than `⊥`.
    stack: BTreeSet<Token>,
    transitions: BTreeSet<VpdaTransition>,
}

impl Vpda {
    pub fn new(
        partition: VpPartition,
        states: impl IntoIterator<Item = Token>,
        initial: impl Into<Token>,
        finals: impl IntoIterator<Item = Token>,
        stack: impl IntoIterator<Item = Token>,
        transitions: impl IntoIterator<Item = VpdaTransition>,
    ) -> Result<Vpda, VpdaError> {
        let a = Vpda {
            partition,
            states: states.into_iter().collect(),
            initial: initial.into(),
            finals: finals.into_iter().collect(),
            stack: stack.into_iter().collect(),
            transitions: transitions.into_iter().collect(),
        };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<(), VpdaError> {
        if self.partition.alphabet().is_empty() {
            return Err(VpdaError::EmptyAlphabet);
        }
        if self.stack.contains(BOTTOM) {
            return Err(VpdaError::ReservedStackSymbol);
        }
        let state = |q: &Token| {
            if self.states.contains(q) {
                Ok(())
            } else {
                Err(VpdaError::UnknownState(q.clone()))
            }
        };
        state(&self.initial)?;
        self.finals.iter().try_for_each(state)?;
        for t in &self.transitions {
            state(t.from())?;
            state(t.to())?;
            match self.partition.class_of(t.letter()) {
                None => return Err(VpdaError::UnknownLetter(t.letter().clone())),
                Some(class) if class != t.class() => {
                    return Err(VpdaError::WrongLetterClass {
                        letter: t.letter().clone(),
                        used: t.class(),
                    })
                }
                Some(_) => {}
            }
            let symbol = match t {
                VpdaTransition::Call { push, .. } if &**push == BOTTOM => {
                    return Err(VpdaError::ReservedStackSymbol)
                }
                VpdaTransition::Call { push, .. } => Some(push),
                VpdaTransition::Return {
                    top: StackTop::Symbol(z),
                    ..
                } => Some(z),
                _ => None,
            };
            if let Some(z) = symbol {
                if !self.stack.contains(z) {
                    return Err(VpdaError::UnknownStackSymbol(z.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn partition(&self) -> &VpPartition {
        &self.partition
    }

    pub fn states(&self) -> &BTreeSet<Token> {
        &self.states
    }

    pub fn initial(&self) -> &Token {
        &self.initial
    }

    pub fn finals(&self) -> &BTreeSet<Token> {
        &self.finals
    }

    pub fn stack_alphabet(&self) -> &BTreeSet<Token> {
        &self.stack
    }

    pub fn transitions(&self) -> &BTreeSet<VpdaTransition> {
        &self.transitions
    }

    pub fn parse_text(src: &str) -> Result<Vpda, VpdaError> {
        text::parse(src)
    }

    pub fn to_text(&self) -> String {
        text::render(self)
    }

    /// All configurations reachable from `q0 ⊥` on `w`.
    pub fn run(&self, w: &[Token]) -> Result<BTreeSet<Configuration>, VpdaError> {
        run::Delta::new(self).run(w)
    }

    pub fn accepts(&self, w: &[Token]) -> Result<bool, VpdaError> {
        Ok(self.run(w)?.iter().any(|c| self.finals.contains(&c.state)))
    }
}

impl fmt::Display for Vpda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
