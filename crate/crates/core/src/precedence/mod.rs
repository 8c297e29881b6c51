//! Operator precedence relations and matrices.
//!
//! The three relations are identified by their glyphs: `⋖` ([`PrecRel::Yields`]),
//! `≐` ([`PrecRel::Equal`]) and `⋗` ([`PrecRel::Takes`]). For an operator
//! grammar, `a ≐ b` when `a` and `b` occur in one right part separated by at
//! most one nonterminal, `a ⋖ b` when `a` is followed by a nonterminal `D`
//! with `b` in the left terminal set of `D`, and `a ⋗ b` when a nonterminal
//! `D` with `a` in its right terminal set is followed by `b`.

mod balanced;
mod opm;
mod sets;
mod vp;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::text::{content_lines, FormatError};
use crate::Token;

pub use balanced::{check_balanced_restrictions, BalancedReport, BalancedViolation, Pairing};
pub use opm::{build_opm, Conflict, OpmAnalysis};
pub use sets::{left_terminal_set, right_terminal_set, terminal_sets_of_string, TerminalSets};
pub use vp::{classify_vp, classify_vp_all, stencil, total_vp_matrix, LetterClass, VpPartition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrecedenceError {
    #[error("the grammar is not in operator form: `{0}` has adjacent nonterminals")]
    NotOperatorForm(String),
    #[error("unknown nonterminal `{0}`")]
    UnknownNonterminal(Token),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(Token),
    #[error("terminal sets are undefined for the empty string")]
    EmptyString,
    #[error("the matrix has a conflict at ({0}, {1})")]
    ConflictingMatrix(Token, Token),
    #[error("letters {0:?} occur in more than one class of the partition")]
    OverlappingPartition(Vec<Token>),
    #[error("the call/return pairing is not a bijection: {0}")]
    UnpairedAlphabet(String),
    #[error("{0}")]
    Format(#[from] FormatError),
}

/// One operator precedence relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrecRel {
    /// `⋖`
    Yields,
    /// `≐`
    Equal,
    /// `⋗`
    Takes,
}

impl PrecRel {
    pub const ALL: [PrecRel; 3] = [PrecRel::Yields, PrecRel::Equal, PrecRel::Takes];

    /// The ASCII glyph used by the text formats: `<`, `=` or `>`.
    pub fn ascii(self) -> char {
        match self {
            PrecRel::Yields => '<',
            PrecRel::Equal => '=',
            PrecRel::Takes => '>',
        }
    }

    pub fn from_ascii(c: char) -> Option<PrecRel> {
        match c {
            '<' => Some(PrecRel::Yields),
            '=' => Some(PrecRel::Equal),
            '>' => Some(PrecRel::Takes),
            _ => None,
        }
    }

    /// The relation that holds on reversed strings: `⋖` and `⋗` swap.
    pub fn mirrored(self) -> PrecRel {
        match self {
            PrecRel::Yields => PrecRel::Takes,
            PrecRel::Equal => PrecRel::Equal,
            PrecRel::Takes => PrecRel::Yields,
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

impl fmt::Display for PrecRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrecRel::Yields => "⋖",
            PrecRel::Equal => "≐",
            PrecRel::Takes => "⋗",
        })
    }
}

impl Serialize for PrecRel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_char(self.ascii())
    }
}

/// A subset of `{⋖, ≐, ⋗}`: the content of one matrix cell.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelSet(u8);

impl RelSet {
    pub const EMPTY: RelSet = RelSet(0);

    pub fn single(rel: PrecRel) -> Self {
        RelSet(rel.bit())
    }

    pub fn insert(&mut self, rel: PrecRel) {
        self.0 |= rel.bit();
    }

    pub fn contains(self, rel: PrecRel) -> bool {
        self.0 & rel.bit() != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_conflict(self) -> bool {
        self.len() > 1
    }

    pub fn union(self, other: RelSet) -> RelSet {
        RelSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: RelSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// The relation, when the cell holds exactly one.
    pub fn only(self) -> Option<PrecRel> {
        let mut it = self.iter();
        match (it.next(), it.next()) {
            (Some(r), None) => Some(r),
            _ => None,
        }
    }

    pub fn iter(self) -> impl Iterator<Item = PrecRel> {
        PrecRel::ALL.into_iter().filter(move |r| self.contains(*r))
    }

    pub fn mirrored(self) -> RelSet {
        self.iter().map(PrecRel::mirrored).collect()
    }

    /// Cell glyph: `.`, `<`, `=`, `>`, or `!..!` around a conflict.
    pub fn glyph(self) -> String {
        match self.len() {
            0 => ".".to_string(),
            1 => self.iter().map(PrecRel::ascii).collect(),
            _ => format!("!{}!", self.iter().map(PrecRel::ascii).collect::<String>()),
        }
    }

    pub fn from_glyph(s: &str) -> Option<RelSet> {
        let inner = match s {
            "." => return Some(RelSet::EMPTY),
            _ if s.len() > 2 && s.starts_with('!') && s.ends_with('!') => &s[1..s.len() - 1],
            _ if s.len() == 1 => s,
            _ => return None,
        };
        let mut set = RelSet::EMPTY;
        for c in inner.chars() {
            set.insert(PrecRel::from_ascii(c)?);
        }
        Some(set)
    }
}

impl FromIterator<PrecRel> for RelSet {
    fn from_iter<I: IntoIterator<Item = PrecRel>>(iter: I) -> Self {
        let mut set = RelSet::EMPTY;
        for r in iter {
            set.insert(r);
        }
        set
    }
}

impl fmt::Debug for RelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(|r| r.ascii()))
            .finish()
    }
}

impl Serialize for RelSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

/// A relation instance `left rel right`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Relation {
    pub left: Token,
    pub rel: PrecRel,
    pub right: Token,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.left, self.rel, self.right)
    }
}

/// An operator precedence matrix over an ordered terminal alphabet.
///
/// Only nonempty cells are stored, so two matrices are equal exactly when
/// they have the same alphabet and the same relations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrecedenceMatrix {
    alphabet: BTreeSet<Token>,
    cells: BTreeMap<Token, BTreeMap<Token, RelSet>>,
}

impl PrecedenceMatrix {
    pub fn new(alphabet: impl IntoIterator<Item = Token>) -> Self {
        PrecedenceMatrix {
            alphabet: alphabet.into_iter().collect(),
            cells: BTreeMap::new(),
        }
    }

    /// Builds a matrix from `(left, rel, right)` triples; the alphabet is
    /// `alphabet` plus every letter mentioned.
    pub fn from_relations<'a>(
        alphabet: impl IntoIterator<Item = Token>,
        relations: impl IntoIterator<Item = (&'a str, PrecRel, &'a str)>,
    ) -> Self {
        let mut m = PrecedenceMatrix::new(alphabet);
        for (a, rel, b) in relations {
            m.insert(Token::from(a), rel, Token::from(b));
        }
        m
    }

    pub fn alphabet(&self) -> &BTreeSet<Token> {
        &self.alphabet
    }

    pub fn insert(&mut self, left: Token, rel: PrecRel, right: Token) {
        self.alphabet.insert(left.clone());
        self.alphabet.insert(right.clone());
        self.cells
            .entry(left)
            .or_default()
            .entry(right)
            .or_default()
            .insert(rel);
    }

    fn set_cell(&mut self, left: Token, right: Token, set: RelSet) {
        if !set.is_empty() {
            self.cells.entry(left).or_default().insert(right, set);
        }
    }

    pub fn get(&self, left: &str, right: &str) -> RelSet {
        self.cells
            .get(left)
            .and_then(|row| row.get(right))
            .copied()
            .unwrap_or_default()
    }

    /// Nonempty cells in row-major alphabet order.
    pub fn cells(&self) -> impl Iterator<Item = (&Token, &Token, RelSet)> {
        self.cells
            .iter()
            .flat_map(|(a, row)| row.iter().map(move |(b, s)| (a, b, *s)))
    }

    /// Every relation instance, in row-major order with `⋖ < ≐ < ⋗` per cell.
    pub fn relations(&self) -> Vec<Relation> {
        self.cells()
            .flat_map(|(a, b, s)| {
                s.iter().map(move |rel| Relation {
                    left: a.clone(),
                    rel,
                    right: b.clone(),
                })
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn conflicts(&self) -> Vec<(Token, Token, RelSet)> {
        self.cells()
            .filter(|(_, _, s)| s.is_conflict())
            .map(|(a, b, s)| (a.clone(), b.clone(), s))
            .collect()
    }

    pub fn is_conflict_free(&self) -> bool {
        self.cells().all(|(_, _, s)| !s.is_conflict())
    }

    /// Cellwise union over the union of the alphabets.
    pub fn union(&self, other: &PrecedenceMatrix) -> PrecedenceMatrix {
        let mut out = self.clone();
        out.alphabet.extend(other.alphabet.iter().cloned());
        for (a, b, s) in other.cells() {
            let merged = out.get(a, b).union(s);
            out.set_cell(a.clone(), b.clone(), merged);
        }
        out
    }

    /// Cellwise containment; absent cells are empty.
    pub fn is_subset(&self, other: &PrecedenceMatrix) -> bool {
        self.cells().all(|(a, b, s)| s.is_subset(other.get(a, b)))
    }

    /// True iff the union of the two matrices is conflict-free.
    pub fn compatible(&self, other: &PrecedenceMatrix) -> bool {
        self.union(other).is_conflict_free()
    }

    /// The matrix of the reversed language: transposed, with `⋖` and `⋗`
    /// interchanged.
    pub fn mirrored(&self) -> PrecedenceMatrix {
        let mut out = PrecedenceMatrix::new(self.alphabet.iter().cloned());
        for (a, b, s) in self.cells() {
            out.set_cell(b.clone(), a.clone(), s.mirrored());
        }
        out
    }

    /// Text rendering: a header row of the alphabet, then one row per
    /// letter with cells `<`, `=`, `>`, `.` or `!..!` for conflicts.
    pub fn render(&self) -> String {
        let letters: Vec<&Token> = self.alphabet.iter().collect();
        let glyphs: Vec<Vec<String>> = letters
            .iter()
            .map(|a| letters.iter().map(|b| self.get(a, b).glyph()).collect())
            .collect();
        let head_w = letters.iter().map(|t| t.chars().count()).max().unwrap_or(0);
        let col_w: Vec<usize> = (0..letters.len())
            .map(|j| {
                glyphs
                    .iter()
                    .map(|row| row[j].len())
                    .chain([letters[j].chars().count()])
                    .max()
                    .unwrap_or(1)
            })
            .collect();
        let mut out = String::new();
        let mut line = " ".repeat(head_w);
        for (j, t) in letters.iter().enumerate() {
            line.push_str(&format!(" {:>w$}", t, w = col_w[j]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
        for (i, a) in letters.iter().enumerate() {
            let mut line = format!("{:<w$}", a, w = head_w);
            for (j, g) in glyphs[i].iter().enumerate() {
                line.push_str(&format!(" {:>w$}", g, w = col_w[j]));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    /// Parses the format produced by [`PrecedenceMatrix::render`].
    pub fn parse_text(src: &str) -> Result<PrecedenceMatrix, PrecedenceError> {
        let mut lines = content_lines(src);
        let Some((_, header)) = lines.next() else {
            return Ok(PrecedenceMatrix::default());
        };
        let letters: Vec<Token> = header.iter().map(|t| Token::from(*t)).collect();
        let mut m = PrecedenceMatrix::new(letters.iter().cloned());
        if m.alphabet.len() != letters.len() {
            return Err(FormatError::new(1, "", "repeated letter in the header row").into());
        }
        let mut rows_seen = BTreeSet::new();
        for (line, toks) in lines {
            let row = toks[0];
            if !m.alphabet.contains(row) {
                return Err(
                    FormatError::new(line, row, "row letter missing from the header").into(),
                );
            }
            if !rows_seen.insert(row.to_string()) {
                return Err(FormatError::new(line, row, "row given twice").into());
            }
            if toks.len() != letters.len() + 1 {
                return Err(FormatError::new(
                    line,
                    row,
                    format!("expected {} cells, found {}", letters.len(), toks.len() - 1),
                )
                .into());
            }
            for (b, glyph) in letters.iter().zip(&toks[1..]) {
                let set = RelSet::from_glyph(glyph)
                    .ok_or_else(|| FormatError::new(line, *glyph, "not a cell glyph"))?;
                m.set_cell(Token::from(row), b.clone(), set);
            }
        }
        Ok(m)
    }
}

impl fmt::Display for PrecedenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for PrecedenceMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PrecedenceMatrix", 2)?;
        st.serialize_field("alphabet", &self.alphabet)?;
        st.serialize_field("relations", &self.relations())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::PrecRel::*;
    use super::*;

    fn m(rels: &[(&'static str, PrecRel, &'static str)]) -> PrecedenceMatrix {
        PrecedenceMatrix::from_relations([], rels.iter().copied())
    }

    #[test]
    fn union_examples() {
        let x = m(&[("a", Yields, "b"), ("b", Takes, "b")]);
        let empty = PrecedenceMatrix::new(x.alphabet().iter().cloned());
        assert_eq!(x.union(&empty), x);
        assert_eq!(x.union(&x), x);
        let u = m(&[("a", Yields, "b")]).union(&m(&[("a", Takes, "b")]));
        assert_eq!(u.get("a", "b"), [Yields, Takes].into_iter().collect());
    }

    #[test]
    fn subset_examples() {
        let x = m(&[("a", Yields, "b"), ("b", Takes, "b")]);
        assert!(PrecedenceMatrix::default().is_subset(&x));
        assert!(x.is_subset(&x));
        assert!(!m(&[("a", Yields, "b")]).is_subset(&m(&[("a", Takes, "b")])));
    }

    #[test]
    fn compatibility_examples() {
        let x = m(&[("a", Yields, "b"), ("b", Takes, "b")]);
        assert!(x.compatible(&x));
        assert!(!m(&[("a", Yields, "b")]).compatible(&m(&[("a", Takes, "b")])));
        assert!(m(&[("a", Yields, "b")]).compatible(&m(&[("b", Takes, "a")])));
    }

    #[test]
    fn render_and_parse() {
        let mut x = m(&[("c", Yields, "c"), ("c", Equal, "r"), ("r", Takes, "c")]);
        x.insert("c0".into(), Takes, "r".into());
        x.insert("c0".into(), Yields, "r".into());
        let text = x.render();
        assert_eq!(
            text,
            "   c c0    r\nc  <  .    =\nc0 .  . !<>!\nr  >  .    .\n"
        );
        assert_eq!(PrecedenceMatrix::parse_text(&text).unwrap(), x);
        let err = PrecedenceMatrix::parse_text("a b\na < ?\n").unwrap_err();
        assert!(matches!(
            err,
            PrecedenceError::Format(FormatError { line: 2, .. })
        ));
    }

    #[test]
    fn mirrored_swaps_and_transposes() {
        let x = m(&[("b", Equal, "c"), ("b", Yields, "b"), ("c", Takes, "c")]);
        assert_eq!(
            x.mirrored(),
            m(&[("c", Equal, "b"), ("b", Takes, "b"), ("c", Yields, "c")])
        );
        assert_eq!(x.mirrored().mirrored(), x);
    }
}
