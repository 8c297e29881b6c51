//! Line-oriented grammar format.
//!
//! ```text
//! # comment
//! %axiom S
//! %terminals b c d e f
//! S -> A | B | C
//! A -> b A c | b c
//! E -> %empty
//! ```
//!
//! Symbols not listed in `%terminals` are nonterminals.

use std::collections::BTreeSet;

use super::{Grammar, GrammarError, Rule, Symbol};
use crate::text::{content_lines, FormatError};
use crate::Token;

pub(super) fn parse(src: &str) -> Result<Grammar, GrammarError> {
    let mut axiom: Option<Token> = None;
    let mut terminals: BTreeSet<Token> = BTreeSet::new();
    // (line, lhs, alternatives)
    let mut raw_rules: Vec<(usize, &str, Vec<Vec<&str>>)> = Vec::new();

    for (line, toks) in content_lines(src) {
        match toks[0] {
            "%axiom" => {
                if toks.len() != 2 {
                    return Err(
                        FormatError::new(line, toks[0], "expected exactly one axiom name").into(),
                    );
                }
                if axiom.is_some() {
                    return Err(FormatError::new(line, toks[1], "axiom declared twice").into());
                }
                axiom = Some(Token::from(toks[1]));
            }
            "%terminals" => terminals.extend(toks[1..].iter().map(|t| Token::from(*t))),
            directive if directive.starts_with('%') => {
                return Err(FormatError::new(line, directive, "unknown directive").into());
            }
            lhs => {
                if toks.get(1) != Some(&"->") {
                    let tok = toks.get(1).copied().unwrap_or(lhs);
                    return Err(
                        FormatError::new(line, tok, "expected `->` after the left part").into(),
                    );
                }
                let mut alts = vec![Vec::new()];
                for tok in &toks[2..] {
                    if *tok == "|" {
                        alts.push(Vec::new());
                    } else {
                        alts.last_mut().expect("nonempty").push(*tok);
                    }
                }
                raw_rules.push((line, lhs, alts));
            }
        }
    }

    let axiom = axiom.ok_or_else(|| FormatError::new(1, "", "missing `%axiom` declaration"))?;
    if terminals.contains(&axiom) {
        return Err(GrammarError::AxiomNotNonterminal(axiom));
    }

    let mut rules = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, lhs, alts) in raw_rules {
        if terminals.contains(lhs) {
            return Err(FormatError::new(line, lhs, "a terminal cannot be a left part").into());
        }
        for alt in alts {
            let rhs: Vec<Symbol> = match alt.as_slice() {
                [] => {
                    return Err(
                        FormatError::new(line, "|", "empty alternative; write `%empty`").into(),
                    )
                }
                ["%empty"] => Vec::new(),
                toks => {
                    let mut rhs = Vec::with_capacity(toks.len());
                    for t in toks {
                        if t.starts_with('%') || *t == "->" {
                            return Err(FormatError::new(
                                line,
                                *t,
                                "unexpected token in right part",
                            )
                            .into());
                        }
                        rhs.push(if terminals.contains(*t) {
                            Symbol::Terminal(Token::from(*t))
                        } else {
                            Symbol::Nonterminal(Token::from(*t))
                        });
                    }
                    rhs
                }
            };
            let rule = Rule::new(lhs, rhs);
            if rule.is_empty() && *lhs != *axiom {
                return Err(
                    FormatError::new(line, lhs, "only the axiom may have an empty rule").into(),
                );
            }
            if !seen.insert(rule.clone()) {
                return Err(FormatError::new(line, lhs, format!("duplicate rule `{rule}`")).into());
            }
            rules.push(rule);
        }
    }
    Grammar::from_rules(axiom, terminals, rules)
}

pub(super) fn render(g: &Grammar) -> String {
    let mut out = format!("%axiom {}\n%terminals", g.axiom());
    for t in g.terminals() {
        out.push(' ');
        out.push_str(t);
    }
    out.push('\n');
    let rules = g.rules();
    let mut i = 0;
    while i < rules.len() {
        let lhs = &rules[i].lhs;
        out.push_str(lhs);
        out.push_str(" ->");
        let mut first = true;
        while i < rules.len() && rules[i].lhs == *lhs {
            if !first {
                out.push_str(" |");
            }
            first = false;
            if rules[i].rhs.is_empty() {
                out.push_str(" %empty");
            }
            for s in &rules[i].rhs {
                out.push(' ');
                out.push_str(s.name());
            }
            i += 1;
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostics_name_line_and_token() {
        let err = parse("%axiom S\n%terminals a\nS => a\n").unwrap_err();
        match err {
            GrammarError::Format(e) => {
                assert_eq!(e.line, 3);
                assert_eq!(e.token, "=>");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse("%terminals a\nS -> a\n").unwrap_err();
        assert!(err.to_string().contains("%axiom"));
        let err = parse("%axiom S\n%terminals a\na -> S\n").unwrap_err();
        assert!(matches!(
            err,
            GrammarError::Format(FormatError { line: 3, .. })
        ));
    }

    #[test]
    fn comments_and_split_declarations() {
        let g = parse("# G\n%axiom S # axiom\n%terminals a\n%terminals b\nS -> a S b\nS -> a b\n")
            .unwrap();
        assert_eq!(g.rules().len(), 2);
        assert_eq!(render(&g), "%axiom S\n%terminals a b\nS -> a S b | a b\n");
    }

    #[test]
    fn interleaved_rules_keep_their_order() {
        let src = "%axiom S\n%terminals a b\nS -> A\nA -> a\nS -> B\nB -> b\n";
        let g = parse(src).unwrap();
        assert_eq!(render(&g), src);
        assert_eq!(parse(&render(&g)).unwrap(), g);
    }
}
