//! Left and right terminal sets.

use std::collections::{BTreeMap, BTreeSet};

use super::PrecedenceError;
use crate::grammar::{Grammar, Rule, Symbol};
use crate::Token;

/// `L(A)` and `R(A)` for every nonterminal of an operator grammar.
///
/// `L(A)` holds the terminals that can appear first in a sentential form
/// derived from `A`, where a single leading nonterminal may be skipped;
/// `R(A)` is the mirror image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminalSets {
    left: BTreeMap<Token, BTreeSet<Token>>,
    right: BTreeMap<Token, BTreeSet<Token>>,
}

impl TerminalSets {
    pub fn of(g: &Grammar) -> Result<Self, PrecedenceError> {
        if let Some(r) = g.rules().iter().find(|r| !r.is_operator_form()) {
            return Err(PrecedenceError::NotOperatorForm(r.to_string()));
        }
        Ok(Self::of_rules(g.nonterminals(), g.rules()))
    }

    fn of_rules(nonterminals: &BTreeSet<Token>, rules: &[Rule]) -> Self {
        let empty = || -> BTreeMap<Token, BTreeSet<Token>> {
            nonterminals
                .iter()
                .map(|n| (n.clone(), BTreeSet::new()))
                .collect()
        };
        let (mut left, mut right) = (empty(), empty());
        // Each productive pass adds at least one (nonterminal, terminal) pair.
        let bound = nonterminals.len() * (1 + rules.iter().flat_map(|r| r.terminals()).count()) + 1;
        for pass in 0.. {
            assert!(pass <= bound, "terminal set fixpoint did not converge");
            let mut changed = false;
            for rule in rules {
                changed |= step(&mut left, &rule.lhs, rule.rhs.iter());
                changed |= step(&mut right, &rule.lhs, rule.rhs.iter().rev());
            }
            if !changed {
                break;
            }
        }
        TerminalSets { left, right }
    }

    pub fn left(&self, nonterminal: &str) -> Option<&BTreeSet<Token>> {
        self.left.get(nonterminal)
    }

    pub fn right(&self, nonterminal: &str) -> Option<&BTreeSet<Token>> {
        self.right.get(nonterminal)
    }
}

/// Applies one rule to `sets`, reading the right part in the given
/// direction. Returns whether anything was added.
fn step<'a>(
    sets: &mut BTreeMap<Token, BTreeSet<Token>>,
    lhs: &Token,
    mut rhs: impl Iterator<Item = &'a Symbol>,
) -> bool {
    let mut add: Vec<Token> = Vec::new();
    match rhs.next() {
        Some(Symbol::Terminal(a)) => add.push(a.clone()),
        Some(Symbol::Nonterminal(b)) => {
            add.extend(sets[b].iter().cloned());
            if let Some(Symbol::Terminal(a)) = rhs.next() {
                add.push(a.clone());
            }
        }
        None => {}
    }
    let target = sets.get_mut(lhs).expect("left part is a nonterminal");
    let before = target.len();
    target.extend(add);
    target.len() != before
}

pub fn left_terminal_set(
    g: &Grammar,
    nonterminal: &str,
) -> Result<BTreeSet<Token>, PrecedenceError> {
    TerminalSets::of(g)?
        .left(nonterminal)
        .cloned()
        .ok_or_else(|| PrecedenceError::UnknownNonterminal(nonterminal.into()))
}

pub fn right_terminal_set(
    g: &Grammar,
    nonterminal: &str,
) -> Result<BTreeSet<Token>, PrecedenceError> {
    TerminalSets::of(g)?
        .right(nonterminal)
        .cloned()
        .ok_or_else(|| PrecedenceError::UnknownNonterminal(nonterminal.into()))
}

/// `(L(β), R(β))` for a nonempty operator string `β` over the symbols of
/// `g`, computed as the sets of a fresh nonterminal `D` with the single
/// extra rule `D → β`.
pub fn terminal_sets_of_string(
    g: &Grammar,
    beta: &[&str],
) -> Result<(BTreeSet<Token>, BTreeSet<Token>), PrecedenceError> {
    if beta.is_empty() {
        return Err(PrecedenceError::EmptyString);
    }
    let rhs = beta
        .iter()
        .map(|name| {
            g.symbol(name)
                .ok_or_else(|| PrecedenceError::UnknownSymbol((*name).into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut fresh = String::from("D");
    while g.symbol(&fresh).is_some() {
        fresh.push('\'');
    }
    let extra = Rule::new(fresh.as_str(), rhs);
    if !extra.is_operator_form() {
        return Err(PrecedenceError::NotOperatorForm(beta.join(" ")));
    }
    let mut nonterminals = g.nonterminals().clone();
    nonterminals.insert(extra.lhs.clone());
    let mut rules = g.rules().to_vec();
    rules.push(extra);
    if let Some(r) = rules.iter().find(|r| !r.is_operator_form()) {
        return Err(PrecedenceError::NotOperatorForm(r.to_string()));
    }
    let sets = TerminalSets::of_rules(&nonterminals, &rules);
    Ok((
        sets.left[fresh.as_str()].clone(),
        sets.right[fresh.as_str()].clone(),
    ))
}
