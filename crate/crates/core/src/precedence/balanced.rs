//! Restrictions characterizing grammars of balanced languages.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{build_opm, stencil, total_vp_matrix, PrecRel, PrecedenceError, RelSet, VpPartition};
use crate::grammar::Grammar;
use crate::Token;

/// Right-part stencils that may not occur in a balanced grammar.
///
/// A bare return cannot occur either: it would derive an unmatched return.
pub const FORBIDDEN_STENCILS: [&str; 6] = ["NcN", "Nc", "cN", "c", "Nr", "r"];

/// A bijection between call letters and return letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Pairing {
    pairs: BTreeMap<Token, Token>,
}

impl Pairing {
    pub fn new<T: Into<Token>>(
        pairs: impl IntoIterator<Item = (T, T)>,
    ) -> Result<Self, PrecedenceError> {
        let mut map = BTreeMap::new();
        for (c, r) in pairs {
            let (c, r): (Token, Token) = (c.into(), r.into());
            if c == r {
                return Err(PrecedenceError::UnpairedAlphabet(format!(
                    "`{c}` paired with itself"
                )));
            }
            if map.values().any(|x| *x == r) || map.contains_key(&r) {
                return Err(PrecedenceError::UnpairedAlphabet(format!(
                    "return `{r}` paired twice"
                )));
            }
            if map.values().any(|x| *x == c) || map.insert(c.clone(), r).is_some() {
                return Err(PrecedenceError::UnpairedAlphabet(format!(
                    "call `{c}` paired twice"
                )));
            }
        }
        Ok(Pairing { pairs: map })
    }

    /// Parses `c1:r1,c2:r2`.
    pub fn parse(spec: &str) -> Result<Self, PrecedenceError> {
        let mut pairs = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (c, r) = item.split_once(':').ok_or_else(|| {
                PrecedenceError::UnpairedAlphabet(format!(
                    "`{item}` is not of the form call:return"
                ))
            })?;
            pairs.push((c.trim(), r.trim()));
        }
        Pairing::new(pairs)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Token, &Token)> {
        self.pairs.iter()
    }

    pub fn return_of(&self, call: &str) -> Option<&Token> {
        self.pairs.get(call)
    }

    /// The partition with the paired letters as calls and returns and the
    /// other letters of `alphabet` as internals.
    pub fn partition<'a>(&self, alphabet: impl IntoIterator<Item = &'a Token>) -> VpPartition {
        let internals: Vec<Token> = alphabet
            .into_iter()
            .filter(|t| !self.pairs.contains_key(*t) && !self.pairs.values().any(|r| r == *t))
            .cloned()
            .collect();
        VpPartition::new(
            self.pairs.keys().cloned(),
            self.pairs.values().cloned(),
            internals,
        )
        .expect("a pairing is injective and disjoint")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BalancedViolation {
    /// A rule whose right part has a forbidden stencil.
    ForbiddenStencil { rule: String, stencil: String },
    /// `c ≐ r` for a call and a return that are not paired.
    OffDiagonalEqual { call: Token, ret: Token },
    /// A matrix cell outside the total VP matrix of the partition.
    NotVpMatrix {
        left: Token,
        right: Token,
        relations: RelSet,
    },
}

impl fmt::Display for BalancedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BalancedViolation::ForbiddenStencil { rule, stencil } => {
                write!(f, "rule `{rule}` has forbidden stencil {stencil}")
            }
            BalancedViolation::OffDiagonalEqual { call, ret } => {
                write!(
                    f,
                    "{call}{}{ret} relates an unpaired call and return",
                    PrecRel::Equal
                )
            }
            BalancedViolation::NotVpMatrix {
                left,
                right,
                relations,
            } => {
                write!(
                    f,
                    "cell ({left}, {right}) = {} is outside the total VP matrix",
                    relations.glyph()
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalancedReport {
    pub partition: VpPartition,
    pub violations: Vec<BalancedViolation>,
}

impl BalancedReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the stencil and diagonal restrictions for a balanced grammar.
///
/// The partition is induced by `pairing`; every grammar terminal outside the
/// pairing is an internal. Cells of the OPM outside the total VP matrix are
/// reported as violations rather than errors so that the stencil report is
/// still produced.
pub fn check_balanced_restrictions(
    g: &Grammar,
    pairing: &Pairing,
) -> Result<BalancedReport, PrecedenceError> {
    for (c, r) in pairing.pairs() {
        for t in [c, r] {
            if !g.terminals().contains(t) {
                return Err(PrecedenceError::UnpairedAlphabet(format!(
                    "`{t}` is not a terminal of the grammar"
                )));
            }
        }
    }
    let partition = pairing.partition(g.terminals());
    let opm = build_opm(g)?.matrix;
    let total = total_vp_matrix(&partition);
    let mut violations = Vec::new();

    for (a, b, cell) in opm.cells() {
        if !cell.is_subset(total.get(a, b)) {
            violations.push(BalancedViolation::NotVpMatrix {
                left: a.clone(),
                right: b.clone(),
                relations: cell,
            });
        }
    }
    for rule in g.rules() {
        if rule.is_empty() || rule.renamed().is_some() {
            continue;
        }
        let st = stencil(rule, &partition);
        if FORBIDDEN_STENCILS.contains(&st.as_str()) {
            violations.push(BalancedViolation::ForbiddenStencil {
                rule: rule.to_string(),
                stencil: st,
            });
        }
    }
    for c in partition.calls() {
        for r in partition.returns() {
            if opm.get(c, r).contains(PrecRel::Equal) && pairing.return_of(c) != Some(r) {
                violations.push(BalancedViolation::OffDiagonalEqual {
                    call: c.clone(),
                    ret: r.clone(),
                });
            }
        }
    }
    Ok(BalancedReport {
        partition,
        violations,
    })
}
