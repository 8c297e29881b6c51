//! Context-free grammars with operator-form predicates, reduction and reversal.
//!
//! A [`Grammar`] is validated on construction: every symbol is declared, the
//! terminal and nonterminal name spaces are disjoint, rules are unique, and
//! the only permitted empty rule is `axiom -> %empty` with the axiom absent
//! from every right part.

mod oracle;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::text::FormatError;
use crate::{Token, Word};

pub use oracle::{
    enumerate_language, enumerate_language_with_budget, membership_oracle, MembershipOracle,
    DEFAULT_NODE_BUDGET,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("symbol `{0}` is declared both as a terminal and as a nonterminal")]
    OverlappingNames(Token),
    #[error("symbol `{0}` is not declared")]
    UndeclaredSymbol(Token),
    #[error("axiom `{0}` is not a nonterminal")]
    AxiomNotNonterminal(Token),
    #[error("duplicate rule `{0}`")]
    DuplicateRule(String),
    #[error("empty rule for `{0}`: only the axiom may derive the empty string")]
    EmptyRuleNotAxiom(Token),
    #[error("the axiom has an empty rule but also occurs in the right part of `{0}`")]
    AxiomInRightPart(String),
    #[error("unknown nonterminal `{0}`")]
    UnknownNonterminal(Token),
    #[error("the axiom derives no terminal string")]
    AxiomUnproductive,
    #[error("enumeration budget of {0} nodes exhausted")]
    BudgetExceeded(u64),
    #[error("{0}")]
    Format(#[from] FormatError),
}

/// A grammar symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Symbol {
    Terminal(Token),
    Nonterminal(Token),
}

impl Symbol {
    pub fn name(&self) -> &Token {
        match self {
            Symbol::Terminal(t) | Symbol::Nonterminal(t) => t,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::Terminal(_))
    }

    pub fn as_nonterminal(&self) -> Option<&Token> {
        match self {
            Symbol::Nonterminal(n) => Some(n),
            Symbol::Terminal(_) => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A production `lhs -> rhs`; an empty `rhs` is the empty rule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Rule {
    pub lhs: Token,
    pub rhs: Vec<Symbol>,
}

impl Rule {
    pub fn new(lhs: impl Into<Token>, rhs: Vec<Symbol>) -> Self {
        Rule {
            lhs: lhs.into(),
            rhs,
        }
    }

    /// A renaming rule has a single nonterminal as right part.
    pub fn renamed(&self) -> Option<&Token> {
        match self.rhs.as_slice() {
            [Symbol::Nonterminal(n)] => Some(n),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn is_operator_form(&self) -> bool {
        !self
            .rhs
            .windows(2)
            .any(|w| !w[0].is_terminal() && !w[1].is_terminal())
    }

    /// Terminals of the right part, in order.
    pub fn terminals(&self) -> impl Iterator<Item = &Token> {
        self.rhs.iter().filter_map(|s| match s {
            Symbol::Terminal(t) => Some(t),
            Symbol::Nonterminal(_) => None,
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs)?;
        if self.rhs.is_empty() {
            return f.write_str(" %empty");
        }
        for s in &self.rhs {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

/// One leftmost-derivation step: rewrite the nonterminal at `position` of the
/// current sentential form with rule number `rule`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationStep {
    pub rule: usize,
    pub position: usize,
}

/// A context-free grammar `(V_N, Σ, P, S)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Grammar {
    terminals: BTreeSet<Token>,
    nonterminals: BTreeSet<Token>,
    rules: Vec<Rule>,
    axiom: Token,
}

impl Grammar {
    /// Builds and validates a grammar.
    pub fn new(
        terminals: BTreeSet<Token>,
        nonterminals: BTreeSet<Token>,
        rules: Vec<Rule>,
        axiom: Token,
    ) -> Result<Self, GrammarError> {
        if let Some(t) = terminals.intersection(&nonterminals).next() {
            return Err(GrammarError::OverlappingNames(t.clone()));
        }
        if !nonterminals.contains(&axiom) {
            return Err(GrammarError::AxiomNotNonterminal(axiom));
        }
        let mut seen = BTreeSet::new();
        for rule in &rules {
            if !nonterminals.contains(&rule.lhs) {
                return Err(GrammarError::UndeclaredSymbol(rule.lhs.clone()));
            }
            for s in &rule.rhs {
                let declared = match s {
                    Symbol::Terminal(t) => terminals.contains(t),
                    Symbol::Nonterminal(n) => nonterminals.contains(n),
                };
                if !declared {
                    return Err(GrammarError::UndeclaredSymbol(s.name().clone()));
                }
            }
            if rule.is_empty() && rule.lhs != axiom {
                return Err(GrammarError::EmptyRuleNotAxiom(rule.lhs.clone()));
            }
            if !seen.insert(rule) {
                return Err(GrammarError::DuplicateRule(rule.to_string()));
            }
        }
        let g = Grammar {
            terminals,
            nonterminals,
            rules,
            axiom,
        };
        if g.derives_empty() {
            if let Some(r) = g.rules.iter().find(|r| g.rhs_mentions(r, &g.axiom)) {
                return Err(GrammarError::AxiomInRightPart(r.to_string()));
            }
        }
        Ok(g)
    }

    /// Builds a grammar whose nonterminals are the axiom plus every symbol of
    /// `rules` not listed among `terminals`.
    pub fn from_rules(
        axiom: impl Into<Token>,
        terminals: impl IntoIterator<Item = Token>,
        rules: Vec<Rule>,
    ) -> Result<Self, GrammarError> {
        let axiom = axiom.into();
        let terminals: BTreeSet<Token> = terminals.into_iter().collect();
        let mut nonterminals = BTreeSet::from([axiom.clone()]);
        for r in &rules {
            nonterminals.insert(r.lhs.clone());
            for s in &r.rhs {
                if let Symbol::Nonterminal(n) = s {
                    nonterminals.insert(n.clone());
                }
            }
        }
        Grammar::new(terminals, nonterminals, rules, axiom)
    }

    pub fn terminals(&self) -> &BTreeSet<Token> {
        &self.terminals
    }

    pub fn nonterminals(&self) -> &BTreeSet<Token> {
        &self.nonterminals
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn axiom(&self) -> &Token {
        &self.axiom
    }

    /// Classifies a bare name against the grammar's declarations.
    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        if let Some(t) = self.terminals.get(name) {
            Some(Symbol::Terminal(t.clone()))
        } else {
            self.nonterminals
                .get(name)
                .map(|n| Symbol::Nonterminal(n.clone()))
        }
    }

    /// True iff the axiom has the empty rule.
    pub fn derives_empty(&self) -> bool {
        self.rules.iter().any(|r| r.is_empty())
    }

    fn rhs_mentions(&self, rule: &Rule, nt: &Token) -> bool {
        rule.rhs.iter().any(|s| s.as_nonterminal() == Some(nt))
    }

    pub fn max_rhs_len(&self) -> usize {
        self.rules.iter().map(|r| r.rhs.len()).max().unwrap_or(0)
    }

    /// No right part contains two adjacent nonterminals.
    pub fn is_operator_form(&self) -> bool {
        self.rules.iter().all(Rule::is_operator_form)
    }

    /// No two rules with distinct left parts share a right part.
    pub fn is_invertible(&self) -> bool {
        let mut owner: BTreeMap<&[Symbol], &Token> = BTreeMap::new();
        for r in &self.rules {
            match owner.get(r.rhs.as_slice()) {
                Some(lhs) if *lhs != &r.lhs => return false,
                _ => {
                    owner.insert(&r.rhs, &r.lhs);
                }
            }
        }
        true
    }

    /// Invertible, axiom absent from every right part, and every renaming
    /// rule has the axiom as left part.
    pub fn is_fischer_normal_form(&self) -> bool {
        self.is_invertible()
            && !self.rules.iter().any(|r| self.rhs_mentions(r, &self.axiom))
            && self
                .rules
                .iter()
                .filter(|r| r.renamed().is_some())
                .all(|r| r.lhs == self.axiom)
    }

    /// Every rule with each right part reversed.
    pub fn reverse_rules(&self) -> Grammar {
        Grammar {
            terminals: self.terminals.clone(),
            nonterminals: self.nonterminals.clone(),
            rules: self
                .rules
                .iter()
                .map(|r| Rule {
                    lhs: r.lhs.clone(),
                    rhs: r.rhs.iter().rev().cloned().collect(),
                })
                .collect(),
            axiom: self.axiom.clone(),
        }
    }

    /// Nonterminals that derive at least one terminal string.
    pub fn productive(&self) -> BTreeSet<Token> {
        let mut productive = BTreeSet::new();
        loop {
            let before = productive.len();
            for r in &self.rules {
                if !productive.contains(&r.lhs)
                    && r.rhs
                        .iter()
                        .all(|s| s.as_nonterminal().is_none_or(|n| productive.contains(n)))
                {
                    productive.insert(r.lhs.clone());
                }
            }
            if productive.len() == before {
                return productive;
            }
        }
    }

    /// Nonterminals reachable from the axiom.
    pub fn reachable(&self) -> BTreeSet<Token> {
        let mut reached = BTreeSet::from([self.axiom.clone()]);
        let mut work = vec![self.axiom.clone()];
        while let Some(nt) = work.pop() {
            for r in self.rules.iter().filter(|r| r.lhs == nt) {
                for n in r.rhs.iter().filter_map(Symbol::as_nonterminal) {
                    if reached.insert(n.clone()) {
                        work.push(n.clone());
                    }
                }
            }
        }
        reached
    }

    /// For each nonterminal `A`, the set `{A' | A' =>* A}` using renaming rules
    /// only (reflexive).
    pub fn renaming_ancestors(&self) -> BTreeMap<Token, BTreeSet<Token>> {
        let mut up: BTreeMap<Token, BTreeSet<Token>> = self
            .nonterminals
            .iter()
            .map(|n| (n.clone(), BTreeSet::from([n.clone()])))
            .collect();
        loop {
            let mut changed = false;
            for r in &self.rules {
                if let Some(child) = r.renamed() {
                    // everything that reaches r.lhs also reaches child
                    let above: Vec<Token> = up[&r.lhs].iter().cloned().collect();
                    let set = up.get_mut(child).expect("declared nonterminal");
                    for a in above {
                        changed |= set.insert(a);
                    }
                }
            }
            if !changed {
                return up;
            }
        }
    }

    /// Removes unproductive and unreachable nonterminals and rules, then
    /// collapses renaming cycles into one representative per cycle (the
    /// axiom when it is on the cycle, otherwise the least name).
    pub fn reduce(&self) -> Result<Grammar, GrammarError> {
        let productive = self.productive();
        if !productive.contains(&self.axiom) {
            return Err(GrammarError::AxiomUnproductive);
        }
        let useful_rules: Vec<Rule> = self
            .rules
            .iter()
            .filter(|r| {
                productive.contains(&r.lhs)
                    && r.rhs
                        .iter()
                        .all(|s| s.as_nonterminal().is_none_or(|n| productive.contains(n)))
            })
            .cloned()
            .collect();
        let mut g = Grammar {
            terminals: self.terminals.clone(),
            nonterminals: productive,
            rules: useful_rules,
            axiom: self.axiom.clone(),
        };
        let reachable = g.reachable();
        g.rules.retain(|r| reachable.contains(&r.lhs));
        g.nonterminals = reachable;
        Ok(g.collapse_renaming_cycles())
    }

    /// Like [`Grammar::reduce`], but an unproductive axiom yields the grammar
    /// with no rules instead of an error.
    pub fn reduce_or_empty(&self) -> Grammar {
        self.reduce().unwrap_or_else(|_| Grammar {
            terminals: self.terminals.clone(),
            nonterminals: BTreeSet::from([self.axiom.clone()]),
            rules: Vec::new(),
            axiom: self.axiom.clone(),
        })
    }

    fn collapse_renaming_cycles(self) -> Grammar {
        let up = self.renaming_ancestors();
        let mut rep: BTreeMap<Token, Token> = BTreeMap::new();
        for n in &self.nonterminals {
            // the cycle through n: ancestors of n that n also reaches by renaming
            let cycle: Vec<&Token> = up[n].iter().filter(|a| up[*a].contains(n)).collect();
            let chosen = if cycle.contains(&&self.axiom) {
                self.axiom.clone()
            } else {
                (*cycle.iter().min().expect("reflexive")).clone()
            };
            rep.insert(n.clone(), chosen);
        }
        if rep.iter().all(|(k, v)| k == v) {
            return self;
        }
        let rename = |s: &Symbol| match s {
            Symbol::Nonterminal(n) => Symbol::Nonterminal(rep[n].clone()),
            t => t.clone(),
        };
        let mut seen = BTreeSet::new();
        let mut rules = Vec::new();
        for r in &self.rules {
            let nr = Rule {
                lhs: rep[&r.lhs].clone(),
                rhs: r.rhs.iter().map(rename).collect(),
            };
            if nr.renamed() == Some(&nr.lhs) {
                continue;
            }
            if seen.insert(nr.clone()) {
                rules.push(nr);
            }
        }
        Grammar {
            terminals: self.terminals,
            nonterminals: rep.values().cloned().collect(),
            rules,
            axiom: self.axiom,
        }
    }

    /// Replays a leftmost derivation from the axiom; returns the final
    /// sentential form, or `None` if a step does not apply.
    pub fn replay(&self, steps: &[DerivationStep]) -> Option<Vec<Symbol>> {
        let mut form = vec![Symbol::Nonterminal(self.axiom.clone())];
        for step in steps {
            let rule = self.rules.get(step.rule)?;
            match form.get(step.position) {
                Some(Symbol::Nonterminal(n)) if *n == rule.lhs => {}
                _ => return None,
            }
            form.splice(step.position..=step.position, rule.rhs.iter().cloned());
        }
        Some(form)
    }

    /// Parses the line-oriented grammar format.
    pub fn parse_text(src: &str) -> Result<Grammar, GrammarError> {
        text::parse(src)
    }

    /// Renders the grammar in the line-oriented format accepted by
    /// [`Grammar::parse_text`].
    pub fn to_text(&self) -> String {
        text::render(self)
    }

    /// Exhaustive language enumeration up to `max_len` (see [`enumerate_language`]).
    pub fn language(&self, max_len: usize) -> Result<BTreeSet<Word>, GrammarError> {
        enumerate_language(self, max_len)
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Shorthand used by tests and fixtures: `rule("A", "b A c", &g_terminals)`.
pub fn rule_from_str(lhs: &str, rhs: &str, terminals: &BTreeSet<Token>) -> Rule {
    let rhs = rhs
        .split_whitespace()
        .filter(|s| *s != "%empty")
        .map(|s| {
            if terminals.contains(s) {
                Symbol::Terminal(Token::from(s))
            } else {
                Symbol::Nonterminal(Token::from(s))
            }
        })
        .collect();
    Rule::new(lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(src: &str) -> Grammar {
        Grammar::parse_text(src).unwrap()
    }

    const G3: &str = "%axiom S\n%terminals b c d e f\n\
        S -> A | B | C\nA -> b A c | b c\nB -> f B d | f d\nC -> e C f b | e f b\n";

    #[test]
    fn operator_form() {
        assert!(g(G3).is_operator_form());
        assert!(!g("%axiom S\n%terminals a b\nS -> A B\nA -> a\nB -> b\n").is_operator_form());
        assert!(g("%axiom S\n%terminals s\nS -> s\n").is_operator_form());
    }

    #[test]
    fn invertibility() {
        assert!(g(G3).is_invertible());
        assert!(!g("%axiom S\n%terminals a b\nS -> a b | T\nT -> a b\n").is_invertible());
        assert!(g("%axiom S\n%terminals a\nS -> a\n").is_invertible());
    }

    #[test]
    fn fischer_normal_form() {
        // renaming rules S -> A | B | C have the axiom as left part
        assert!(g(G3).is_fischer_normal_form());
        assert!(g("%axiom S\n%terminals a b\nS -> A\nA -> a A b | a b\n").is_fischer_normal_form());
        assert!(!g("%axiom A\n%terminals b\nA -> B\nB -> b\nC -> B\n").is_fischer_normal_form());
        assert!(!g("%axiom S\n%terminals a\nS -> a S | a\n").is_fischer_normal_form());
    }

    #[test]
    fn reduce_examples() {
        let g3 = g(G3);
        assert_eq!(g3.reduce().unwrap(), g3);
        let extra = g(&format!("{G3}%terminals x\nX -> x\n"));
        let reduced = extra.reduce().unwrap();
        assert_eq!(reduced.rules(), g3.rules());
        assert!(!reduced.nonterminals().contains("X"));
        assert_eq!(
            g("%axiom S\n%terminals a\nS -> a S\n").reduce(),
            Err(GrammarError::AxiomUnproductive)
        );
        assert!(g("%axiom S\n%terminals a\nS -> a S\n")
            .reduce_or_empty()
            .rules()
            .is_empty());
    }

    #[test]
    fn reduce_collapses_renaming_cycles() {
        let cyc = g("%axiom S\n%terminals a b\nS -> A\nA -> B | a\nB -> A | b\n");
        let r = cyc.reduce().unwrap();
        assert_eq!(
            r.to_text(),
            "%axiom S\n%terminals a b\nS -> A\nA -> a | b\n"
        );
        assert_eq!(r.reduce().unwrap(), r);
        assert_eq!(cyc.language(3).unwrap(), r.language(3).unwrap());
    }

    #[test]
    fn reverse_examples() {
        let a = g("%axiom A\n%terminals b c\nA -> b A c | b c\n");
        assert_eq!(
            a.reverse_rules().to_text(),
            "%axiom A\n%terminals b c\nA -> c A b | c b\n"
        );
        let s = g("%axiom S\n%terminals s\nS -> s\n");
        assert_eq!(s.reverse_rules(), s);
        let r3 = g(G3).reverse_rules();
        assert!(r3.rules().iter().any(|r| r.to_string() == "C -> b f C e"));
        assert_eq!(r3.reverse_rules(), g(G3));
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            Grammar::parse_text("%axiom S\n%terminals a\nS -> a | a\n"),
            Err(GrammarError::Format(FormatError { line: 3, .. }))
        ));
        let terminals: BTreeSet<Token> = [Token::from("a")].into();
        let a = rule_from_str("S", "a", &terminals);
        assert!(matches!(
            Grammar::from_rules("S", terminals.clone(), vec![a.clone(), a]),
            Err(GrammarError::DuplicateRule(_))
        ));
        assert!(matches!(
            Grammar::from_rules(
                "S",
                terminals.clone(),
                vec![rule_from_str("S", "A", &terminals), Rule::new("A", vec![])]
            ),
            Err(GrammarError::EmptyRuleNotAxiom(_))
        ));
        assert!(matches!(
            Grammar::parse_text("%axiom S\n%terminals a\nS -> %empty | a S\n"),
            Err(GrammarError::AxiomInRightPart(_))
        ));
        assert!(matches!(
            Grammar::parse_text("%axiom a\n%terminals a\nS -> a\n"),
            Err(GrammarError::AxiomNotNonterminal(_))
        ));
    }

    #[test]
    fn replay_derivation() {
        let a = g("%axiom A\n%terminals b c\nA -> b A c | b c\n");
        let form = a
            .replay(&[
                DerivationStep {
                    rule: 0,
                    position: 0,
                },
                DerivationStep {
                    rule: 1,
                    position: 1,
                },
            ])
            .unwrap();
        let names: Vec<&str> = form.iter().map(|s| &**s.name()).collect();
        assert_eq!(names, ["b", "b", "c", "c"]);
        assert!(a
            .replay(&[DerivationStep {
                rule: 0,
                position: 1
            }])
            .is_none());
    }
}
