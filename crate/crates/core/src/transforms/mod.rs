//! Constructions between visibly pushdown automata and Floyd grammars whose
//! matrix fits a call/return/internal partition, plus grammar reversal.

mod to_grammar;
mod to_vpda;

use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::grammar::{Grammar, GrammarError};
use crate::parser::format_cells;
use crate::precedence::{build_opm, PrecedenceError, PrecedenceMatrix, VpPartition};
use crate::vpda::VpdaError;
use crate::Token;

pub use to_grammar::{vpda_to_fg, GrammarNonterminal, PhaseState, UNMATCHED};
pub use to_vpda::fg_to_vpda;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("not a Floyd grammar: conflicting cells {}", format_cells(.0))]
    NotFloyd(Vec<(Token, Token)>),
    #[error("the precedence matrix is not a VP-matrix")]
    NotVpMatrix,
    #[error(transparent)]
    Precedence(#[from] PrecedenceError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Vpda(#[from] VpdaError),
}

/// How many rules (or transitions) one construction row produced.
///
/// An item produced by several rows is counted once, under the first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowCount {
    pub group: &'static str,
    pub row: &'static str,
    pub count: usize,
}

/// What a construction emitted and what the result looks like.
///
/// `emitted_total() - removed == final_count` always holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionReport {
    pub construction: &'static str,
    /// `"rules"` or `"transitions"`.
    pub unit: &'static str,
    pub rows: Vec<RowCount>,
    pub removed: usize,
    pub final_count: usize,
    /// Set when the grammar side has an unproductive axiom, i.e. `L = ∅`.
    pub axiom_unproductive: bool,
    /// The operator precedence matrix of the grammar side.
    pub matrix: PrecedenceMatrix,
    /// The partition the construction worked with.
    pub partition: VpPartition,
    pub conflict_free: bool,
    /// `matrix ⊆ total_vp_matrix(partition)`.
    pub within_total_matrix: bool,
    /// The canonical partition recovered from `matrix`, if any.
    pub classified: Option<VpPartition>,
    /// Table rows whose literal reading was changed to make the
    /// construction sound.
    pub reconciliations: Vec<&'static str>,
}

impl ConstructionReport {
    pub fn emitted_total(&self) -> usize {
        self.rows.iter().map(|r| r.count).sum()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "construction: {}", self.construction);
        let _ = writeln!(out, "{} emitted per row:", self.unit);
        let width = self
            .rows
            .iter()
            .map(|r| r.group.chars().count() + r.row.chars().count() + 2)
            .max()
            .unwrap_or(0);
        for r in &self.rows {
            let label = format!("{}: {}", r.group, r.row);
            let _ = writeln!(out, "  {label:<width$}  {}", r.count);
        }
        let _ = writeln!(out, "emitted: {}", self.emitted_total());
        let _ = writeln!(out, "removed by reduction: {}", self.removed);
        let _ = writeln!(out, "final: {}", self.final_count);
        if self.axiom_unproductive {
            let _ = writeln!(out, "the axiom is unproductive: the language is empty");
        }
        let _ = writeln!(out, "conflict-free: {}", yes_no(self.conflict_free));
        let _ = writeln!(
            out,
            "within the total VP-matrix: {}",
            yes_no(self.within_total_matrix)
        );
        let _ = write!(out, "partition:\n{}", indent(&self.partition.to_string()));
        match &self.classified {
            Some(p) => {
                let _ = write!(out, "classification: VP-matrix\n{}", indent(&p.to_string()));
            }
            None => out.push_str("classification: not a VP-matrix\n"),
        }
        if !self.reconciliations.is_empty() {
            out.push_str("reconciliations:\n");
            for r in &self.reconciliations {
                let _ = writeln!(out, "  - {r}");
            }
        }
        let _ = write!(out, "matrix:\n{}", indent(&self.matrix.render()));
        out
    }
}

impl fmt::Display for ConstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn indent(block: &str) -> String {
    block.lines().map(|l| format!("  {l}\n")).collect()
}

/// The grammar with every right part reversed, and its matrix.
///
/// The matrix is the original one transposed with `⋖` and `⋗` swapped, so
/// the reversed grammar is again a Floyd grammar.
pub fn reverse_fg(g: &Grammar) -> Result<(Grammar, PrecedenceMatrix), TransformError> {
    let original = build_opm(g)?;
    if !original.is_floyd() {
        return Err(not_floyd(&original.matrix));
    }
    let reversed = g.reverse_rules();
    let matrix = build_opm(&reversed)?.matrix;
    debug_assert_eq!(matrix, original.matrix.mirrored());
    Ok((reversed, matrix))
}

fn not_floyd(m: &PrecedenceMatrix) -> TransformError {
    TransformError::NotFloyd(m.conflicts().into_iter().map(|(a, b, _)| (a, b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precedence::PrecRel;
    use crate::tokenize;

    #[test]
    fn reversal_swaps_the_matrix() {
        let g = Grammar::parse_text("%axiom A\n%terminals b c\nA -> b A c | b c\n").unwrap();
        let (r, m) = reverse_fg(&g).unwrap();
        assert_eq!(r.to_text(), "%axiom A\n%terminals b c\nA -> c A b | c b\n");
        let expected = PrecedenceMatrix::from_relations(
            tokenize("b c"),
            [
                ("c", PrecRel::Equal, "b"),
                ("b", PrecRel::Takes, "b"),
                ("c", PrecRel::Yields, "c"),
            ],
        );
        assert_eq!(m, expected);
        let (back, m2) = reverse_fg(&r).unwrap();
        assert_eq!(back, g);
        assert_eq!(m2, build_opm(&g).unwrap().matrix);
    }

    #[test]
    fn reversal_needs_a_floyd_grammar() {
        let g = Grammar::parse_text("%axiom S\n%terminals a b\nS -> a S b | a b | a S\n").unwrap();
        assert!(matches!(reverse_fg(&g), Err(TransformError::NotFloyd(cells)) if cells.len() == 1));
    }
}
