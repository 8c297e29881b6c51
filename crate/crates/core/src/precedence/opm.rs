//! OPM construction and conflict reporting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{PrecRel, PrecedenceError, PrecedenceMatrix, RelSet, TerminalSets};
use crate::grammar::{Grammar, Symbol};
use crate::Token;

/// A conflicting cell together with the rules inducing each relation in it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub left: Token,
    pub right: Token,
    pub relations: RelSet,
    /// For every relation in the cell, the rules (rendered) that induce it.
    pub sources: Vec<(PrecRel, Vec<String>)>,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "conflict at ({}, {}): {}",
            self.left,
            self.right,
            self.relations.glyph()
        )?;
        for (rel, rules) in &self.sources {
            write!(
                f,
                "\n  {}{}{} from {}",
                self.left,
                rel,
                self.right,
                rules.join("; ")
            )?;
        }
        Ok(())
    }
}

/// The OPM of a grammar with its conflict list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpmAnalysis {
    pub matrix: PrecedenceMatrix,
    pub conflicts: Vec<Conflict>,
}

impl OpmAnalysis {
    /// True iff the grammar is a Floyd grammar.
    pub fn is_floyd(&self) -> bool {
        self.conflicts.is_empty()
    }
}

/// Computes the operator precedence matrix of an operator grammar.
///
/// The matrix alphabet is the terminal alphabet of `g`, so letters that
/// take part in no relation still get a row and a column.
pub fn build_opm(g: &Grammar) -> Result<OpmAnalysis, PrecedenceError> {
    let sets = TerminalSets::of(g)?;
    let mut matrix = PrecedenceMatrix::new(g.terminals().iter().cloned());
    let mut sources: BTreeMap<(Token, Token, PrecRel), BTreeSet<usize>> = BTreeMap::new();
    let mut record = |a: &Token, rel: PrecRel, b: &Token, rule: usize| {
        matrix.insert(a.clone(), rel, b.clone());
        sources
            .entry((a.clone(), b.clone(), rel))
            .or_default()
            .insert(rule);
    };

    for (idx, rule) in g.rules().iter().enumerate() {
        let rhs = &rule.rhs;
        for i in 0..rhs.len() {
            match (&rhs[i], rhs.get(i + 1)) {
                (Symbol::Terminal(a), Some(Symbol::Terminal(b))) => {
                    record(a, PrecRel::Equal, b, idx)
                }
                (Symbol::Terminal(a), Some(Symbol::Nonterminal(d))) => {
                    if let Some(Symbol::Terminal(b)) = rhs.get(i + 2) {
                        record(a, PrecRel::Equal, b, idx);
                    }
                    for b in sets.left(d).expect("declared nonterminal") {
                        record(a, PrecRel::Yields, b, idx);
                    }
                }
                (Symbol::Nonterminal(d), Some(Symbol::Terminal(b))) => {
                    for a in sets.right(d).expect("declared nonterminal") {
                        record(a, PrecRel::Takes, b, idx);
                    }
                }
                _ => {}
            }
        }
    }

    let conflicts = matrix
        .conflicts()
        .into_iter()
        .map(|(left, right, relations)| {
            let sources = relations
                .iter()
                .map(|rel| {
                    let rules = sources[&(left.clone(), right.clone(), rel)]
                        .iter()
                        .map(|&i| g.rules()[i].to_string())
                        .collect();
                    (rel, rules)
                })
                .collect();
            Conflict {
                left,
                right,
                relations,
                sources,
            }
        })
        .collect();
    Ok(OpmAnalysis { matrix, conflicts })
}
