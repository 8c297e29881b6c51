//! Nondeterministic runs and bounded enumeration of accepted words.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::{StackTop, Vpda, VpdaError, VpdaTransition};
use crate::precedence::LetterClass;
use crate::{Token, Word};

/// Default cap on configurations created by [`enumerate_accepted`].
pub const DEFAULT_CONFIGURATION_BUDGET: u64 = 10_000_000;

/// A state and the stack above `⊥`, bottom first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Configuration {
    pub state: Token,
    pub stack: Vec<Token>,
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, ⊥", self.state)?;
        for z in &self.stack {
            write!(f, " {z}")?;
        }
        f.write_str(")")
    }
}

/// Transition lookup tables.
pub(super) struct Delta<'a> {
    a: &'a Vpda,
    internal: HashMap<(Token, Token), Vec<Token>>,
    call: HashMap<(Token, Token), Vec<(Token, Token)>>,
    ret: HashMap<(Token, Token, StackTop), Vec<Token>>,
}

impl<'a> Delta<'a> {
    pub(super) fn new(a: &'a Vpda) -> Self {
        let mut d = Delta {
            a,
            internal: HashMap::new(),
            call: HashMap::new(),
            ret: HashMap::new(),
        };
        for t in a.transitions() {
            match t {
                VpdaTransition::Internal { from, letter, to } => d
                    .internal
                    .entry((from.clone(), letter.clone()))
                    .or_default()
                    .push(to.clone()),
                VpdaTransition::Call {
                    from,
                    letter,
                    to,
                    push,
                } => d
                    .call
                    .entry((from.clone(), letter.clone()))
                    .or_default()
                    .push((to.clone(), push.clone())),
                VpdaTransition::Return {
                    from,
                    letter,
                    top,
                    to,
                } => d
                    .ret
                    .entry((from.clone(), letter.clone(), top.clone()))
                    .or_default()
                    .push(to.clone()),
            }
        }
        d
    }

    fn class(&self, letter: &Token) -> Result<LetterClass, VpdaError> {
        self.a
            .partition()
            .class_of(letter)
            .ok_or_else(|| VpdaError::UnknownLetter(letter.clone()))
    }

    fn step(
        &self,
        frontier: &BTreeSet<Configuration>,
        letter: &Token,
        class: LetterClass,
    ) -> BTreeSet<Configuration> {
        let mut next = BTreeSet::new();
        for conf in frontier {
            let key = (conf.state.clone(), letter.clone());
            match class {
                LetterClass::Internal => {
                    for to in self.internal.get(&key).into_iter().flatten() {
                        next.insert(Configuration {
                            state: to.clone(),
                            stack: conf.stack.clone(),
                        });
                    }
                }
                LetterClass::Call => {
                    for (to, push) in self.call.get(&key).into_iter().flatten() {
                        let mut stack = conf.stack.clone();
                        stack.push(push.clone());
                        next.insert(Configuration {
                            state: to.clone(),
                            stack,
                        });
                    }
                }
                LetterClass::Return => {
                    let mut stack = conf.stack.clone();
                    let top = match stack.pop() {
                        Some(z) => StackTop::Symbol(z),
                        None => StackTop::Bottom,
                    };
                    for to in self.ret.get(&(key.0, key.1, top)).into_iter().flatten() {
                        next.insert(Configuration {
                            state: to.clone(),
                            stack: stack.clone(),
                        });
                    }
                }
            }
        }
        next
    }

    fn start(&self) -> BTreeSet<Configuration> {
        BTreeSet::from([Configuration {
            state: self.a.initial().clone(),
            stack: Vec::new(),
        }])
    }

    pub(super) fn run(&self, w: &[Token]) -> Result<BTreeSet<Configuration>, VpdaError> {
        let mut frontier = self.start();
        for letter in w {
            let class = self.class(letter)?;
            frontier = self.step(&frontier, letter, class);
        }
        Ok(frontier)
    }

    fn accepting(&self, frontier: &BTreeSet<Configuration>) -> bool {
        frontier.iter().any(|c| self.a.finals().contains(&c.state))
    }
}

/// Every accepted word of length at most `max_len`.
pub fn enumerate_accepted(a: &Vpda, max_len: usize) -> Result<BTreeSet<Word>, VpdaError> {
    enumerate_accepted_with_budget(a, max_len, DEFAULT_CONFIGURATION_BUDGET)
}

/// Breadth-first enumeration over word length. Words reaching the same
/// configuration set are grouped, so each distinct frontier is advanced
/// once per letter; `budget` caps the configurations created.
pub fn enumerate_accepted_with_budget(
    a: &Vpda,
    max_len: usize,
    budget: u64,
) -> Result<BTreeSet<Word>, VpdaError> {
    let delta = Delta::new(a);
    let letters: Vec<(Token, LetterClass)> = a
        .partition()
        .alphabet()
        .into_iter()
        .map(|t| {
            let class = a.partition().class_of(&t).expect("alphabet letter");
            (t, class)
        })
        .collect();
    let mut spent = 0u64;
    let mut accepted = BTreeSet::new();
    let mut layer: BTreeMap<BTreeSet<Configuration>, Vec<Word>> =
        BTreeMap::from([(delta.start(), vec![Vec::new()])]);
    for len in 0..=max_len {
        let mut next: BTreeMap<BTreeSet<Configuration>, Vec<Word>> = BTreeMap::new();
        for (frontier, words) in &layer {
            if delta.accepting(frontier) {
                accepted.extend(words.iter().cloned());
            }
            if len == max_len {
                continue;
            }
            for (letter, class) in &letters {
                let succ = delta.step(frontier, letter, *class);
                spent += succ.len() as u64;
                if spent > budget {
                    return Err(VpdaError::BudgetExceeded(budget));
                }
                if succ.is_empty() {
                    continue;
                }
                let bucket = next.entry(succ).or_default();
                bucket.extend(words.iter().map(|w| {
                    let mut w = w.clone();
                    w.push(letter.clone());
                    w
                }));
            }
        }
        layer = next;
    }
    Ok(accepted)
}
