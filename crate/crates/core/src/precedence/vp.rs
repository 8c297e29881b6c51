//! VP alphabets, the total VP matrix and VP-matrix classification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{PrecRel, PrecedenceError, PrecedenceMatrix};
use crate::grammar::{Rule, Symbol};
use crate::Token;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LetterClass {
    Call,
    Return,
    Internal,
}

impl LetterClass {
    /// Relation prescribed by the total VP matrix between letters of the
    /// two classes.
    pub fn total_relation(self, right: LetterClass) -> PrecRel {
        match (self, right) {
            (LetterClass::Call, LetterClass::Return) => PrecRel::Equal,
            (LetterClass::Call, _) => PrecRel::Yields,
            _ => PrecRel::Takes,
        }
    }
}

/// A partition of a terminal alphabet into calls, returns and internals.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VpPartition {
    calls: BTreeSet<Token>,
    returns: BTreeSet<Token>,
    internals: BTreeSet<Token>,
}

impl VpPartition {
    pub fn new<T: Into<Token>>(
        calls: impl IntoIterator<Item = T>,
        returns: impl IntoIterator<Item = T>,
        internals: impl IntoIterator<Item = T>,
    ) -> Result<Self, PrecedenceError> {
        let p = VpPartition {
            calls: calls.into_iter().map(Into::into).collect(),
            returns: returns.into_iter().map(Into::into).collect(),
            internals: internals.into_iter().map(Into::into).collect(),
        };
        let mut overlap: BTreeSet<Token> = p.calls.intersection(&p.returns).cloned().collect();
        overlap.extend(p.calls.intersection(&p.internals).cloned());
        overlap.extend(p.returns.intersection(&p.internals).cloned());
        if overlap.is_empty() {
            Ok(p)
        } else {
            Err(PrecedenceError::OverlappingPartition(
                overlap.into_iter().collect(),
            ))
        }
    }

    /// Builds a partition from a total class assignment.
    pub fn from_classes<'a>(classes: impl IntoIterator<Item = (&'a Token, LetterClass)>) -> Self {
        let mut p = VpPartition::default();
        for (t, class) in classes {
            p.class_set_mut(class).insert(t.clone());
        }
        p
    }

    fn class_set_mut(&mut self, class: LetterClass) -> &mut BTreeSet<Token> {
        match class {
            LetterClass::Call => &mut self.calls,
            LetterClass::Return => &mut self.returns,
            LetterClass::Internal => &mut self.internals,
        }
    }

    pub fn calls(&self) -> &BTreeSet<Token> {
        &self.calls
    }

    pub fn returns(&self) -> &BTreeSet<Token> {
        &self.returns
    }

    pub fn internals(&self) -> &BTreeSet<Token> {
        &self.internals
    }

    pub fn alphabet(&self) -> BTreeSet<Token> {
        self.calls
            .iter()
            .chain(&self.returns)
            .chain(&self.internals)
            .cloned()
            .collect()
    }

    pub fn class_of(&self, letter: &str) -> Option<LetterClass> {
        if self.calls.contains(letter) {
            Some(LetterClass::Call)
        } else if self.returns.contains(letter) {
            Some(LetterClass::Return)
        } else if self.internals.contains(letter) {
            Some(LetterClass::Internal)
        } else {
            None
        }
    }

    /// True when every class of `self` is contained in the same class of `other`.
    pub fn is_refined_by(&self, other: &VpPartition) -> bool {
        self.calls.is_subset(&other.calls)
            && self.returns.is_subset(&other.returns)
            && self.internals.is_subset(&other.internals)
    }
}

impl fmt::Display for VpPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<Token>| s.iter().map(|t| format!(" {t}")).collect::<String>();
        writeln!(f, "calls:{}", list(&self.calls))?;
        writeln!(f, "returns:{}", list(&self.returns))?;
        writeln!(f, "internals:{}", list(&self.internals))
    }
}

/// The stencil of a rule under a partition: `N` for each nonterminal and
/// `c`, `r` or `s` for calls, returns and internals, e.g. `NcNr`.
///
/// Terminals outside the partition print as `?`.
pub fn stencil(rule: &Rule, p: &VpPartition) -> String {
    rule.rhs
        .iter()
        .map(|sym| match sym {
            Symbol::Nonterminal(_) => 'N',
            Symbol::Terminal(t) => match p.class_of(t) {
                Some(LetterClass::Call) => 'c',
                Some(LetterClass::Return) => 'r',
                Some(LetterClass::Internal) => 's',
                None => '?',
            },
        })
        .collect()
}

/// The maximal conflict-free OPM for a partition: calls yield to calls and
/// internals and equal returns; returns and internals take precedence over
/// everything.
pub fn total_vp_matrix(p: &VpPartition) -> PrecedenceMatrix {
    let alphabet = p.alphabet();
    let mut m = PrecedenceMatrix::new(alphabet.iter().cloned());
    for a in &alphabet {
        let ca = p.class_of(a).expect("letter of the partition");
        for b in &alphabet {
            let cb = p.class_of(b).expect("letter of the partition");
            m.insert(a.clone(), ca.total_relation(cb), b.clone());
        }
    }
    m
}

/// Candidate classes in canonical preference order.
const PREFERENCE: [LetterClass; 3] = [
    LetterClass::Internal,
    LetterClass::Return,
    LetterClass::Call,
];

struct Search<'m> {
    matrix: &'m PrecedenceMatrix,
    letters: Vec<Token>,
    domains: Vec<Vec<LetterClass>>,
    assigned: Vec<LetterClass>,
}

impl<'m> Search<'m> {
    fn new(matrix: &'m PrecedenceMatrix) -> Result<Self, PrecedenceError> {
        if let Some((a, b, _)) = matrix.conflicts().into_iter().next() {
            return Err(PrecedenceError::ConflictingMatrix(a, b));
        }
        let letters: Vec<Token> = matrix.alphabet().iter().cloned().collect();
        let index: BTreeMap<&Token, usize> =
            letters.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut allowed: Vec<BTreeSet<LetterClass>> =
            vec![PREFERENCE.into_iter().collect(); letters.len()];
        for (a, b, cell) in matrix.cells() {
            let (ia, ib) = (index[a], index[b]);
            match cell.only().expect("conflict-free") {
                PrecRel::Yields => {
                    allowed[ia].retain(|c| *c == LetterClass::Call);
                    allowed[ib].remove(&LetterClass::Return);
                }
                PrecRel::Equal => {
                    allowed[ia].retain(|c| *c == LetterClass::Call);
                    allowed[ib].retain(|c| *c == LetterClass::Return);
                }
                PrecRel::Takes => {
                    allowed[ia].remove(&LetterClass::Call);
                }
            }
        }
        let domains = allowed
            .into_iter()
            .map(|set| PREFERENCE.into_iter().filter(|c| set.contains(c)).collect())
            .collect();
        Ok(Search {
            matrix,
            letters,
            domains,
            assigned: Vec::new(),
        })
    }

    /// Whether the newest assignment agrees with the matrix against every
    /// earlier (and its own) assignment.
    fn consistent(&self) -> bool {
        let k = self.assigned.len() - 1;
        let (xk, ck) = (&self.letters[k], self.assigned[k]);
        (0..=k).all(|j| {
            let (xj, cj) = (&self.letters[j], self.assigned[j]);
            let fits = |a: &Token, ca: LetterClass, b: &Token, cb: LetterClass| {
                self.matrix
                    .get(a, b)
                    .only()
                    .is_none_or(|rel| rel == ca.total_relation(cb))
            };
            fits(xk, ck, xj, cj) && fits(xj, cj, xk, ck)
        })
    }

    fn partition(&self) -> VpPartition {
        VpPartition::from_classes(self.letters.iter().zip(self.assigned.iter().copied()))
    }

    /// Depth-first search; `visit` returns false to stop.
    fn run(&mut self, visit: &mut dyn FnMut(VpPartition) -> bool) -> bool {
        let k = self.assigned.len();
        if k == self.letters.len() {
            return visit(self.partition());
        }
        for ci in 0..self.domains[k].len() {
            self.assigned.push(self.domains[k][ci]);
            let go_on = !self.consistent() || self.run(visit);
            self.assigned.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// A partition `p` with `m ⊆ total_vp_matrix(p)`, if one exists.
///
/// When several partitions fit, the canonical one is the first in the
/// order that assigns letters alphabetically and tries internal, then
/// return, then call for each.
pub fn classify_vp(m: &PrecedenceMatrix) -> Result<Option<VpPartition>, PrecedenceError> {
    let mut found = None;
    Search::new(m)?.run(&mut |p| {
        found = Some(p);
        false
    });
    Ok(found)
}

/// Every partition `p` with `m ⊆ total_vp_matrix(p)`, canonical one first.
pub fn classify_vp_all(m: &PrecedenceMatrix) -> Result<Vec<VpPartition>, PrecedenceError> {
    let mut all = Vec::new();
    Search::new(m)?.run(&mut |p| {
        all.push(p);
        true
    });
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precedence::build_opm;
    use crate::Grammar;

    fn crs() -> VpPartition {
        VpPartition::new(["c"], ["r"], ["s"]).unwrap()
    }

    #[test]
    fn total_matrix_cells() {
        let m = total_vp_matrix(&crs());
        let row = |a: &str| -> String {
            ["c", "r", "s"]
                .iter()
                .map(|b| m.get(a, b).glyph())
                .collect()
        };
        assert_eq!(row("c"), "<=<");
        assert_eq!(row("r"), ">>>");
        assert_eq!(row("s"), ">>>");

        let only_s = total_vp_matrix(&VpPartition::new([], [], ["s"]).unwrap());
        assert_eq!(only_s.relations().len(), 1);
        assert_eq!(
            only_s.get("s", "s"),
            crate::precedence::RelSet::single(PrecRel::Takes)
        );

        let two_calls = total_vp_matrix(&VpPartition::new(["c1", "c2"], ["r"], []).unwrap());
        for c in ["c1", "c2"] {
            let row: String = ["c1", "c2", "r"]
                .iter()
                .map(|b| two_calls.get(c, b).glyph())
                .collect();
            assert_eq!(row, "<<=");
        }
    }

    #[test]
    fn classify_total_matrix() {
        assert_eq!(classify_vp(&total_vp_matrix(&crs())).unwrap(), Some(crs()));
        assert_eq!(
            classify_vp_all(&total_vp_matrix(&crs())).unwrap(),
            vec![crs()]
        );
    }

    #[test]
    fn classify_g3_fails() {
        let g = Grammar::parse_text(
            "%axiom S\n%terminals b c d e f\nS -> A | B | C\nA -> b A c | b c\nB -> f B d | f d\nC -> e C f b | e f b\n",
        )
        .unwrap();
        let m = build_opm(&g).unwrap().matrix;
        assert_eq!(classify_vp(&m).unwrap(), None);
        assert!(classify_vp_all(&m).unwrap().is_empty());
    }

    #[test]
    fn empty_matrix_prefers_internal() {
        let m = PrecedenceMatrix::new([Token::from("a")]);
        assert_eq!(
            classify_vp(&m).unwrap(),
            Some(VpPartition::new([], [], ["a"]).unwrap())
        );
        assert_eq!(classify_vp_all(&m).unwrap().len(), 3);
    }

    #[test]
    fn conflicting_matrix_is_an_error() {
        let m = PrecedenceMatrix::from_relations(
            [],
            [("a", PrecRel::Yields, "b"), ("a", PrecRel::Takes, "b")],
        );
        assert!(matches!(
            classify_vp(&m),
            Err(PrecedenceError::ConflictingMatrix(..))
        ));
    }

    #[test]
    fn overlapping_partition_rejected() {
        assert!(VpPartition::new(["a"], ["a"], []).is_err());
    }

    #[test]
    fn stencils() {
        let terminals: BTreeSet<Token> = ["c", "r", "s"].into_iter().map(Token::from).collect();
        let rule = crate::grammar::rule_from_str("A", "B c C r", &terminals);
        assert_eq!(stencil(&rule, &crs()), "NcNr");
        let rule = crate::grammar::rule_from_str("A", "B s", &terminals);
        assert_eq!(stencil(&rule, &crs()), "Ns");
    }
}
