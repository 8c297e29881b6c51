//! Operator-precedence shift-reduce parsing of Floyd grammars.
//!
//! The driver keeps a stack of terminals and subtrees. The topmost terminal
//! `a` is compared with the lookahead `b` (delimited by `⊢` and `⊣`, with
//! `⊢ ⋖ b` and `a ⋗ ⊣`): on `⋖` or `≐` the lookahead is shifted, on `⋗` the
//! handle between the nearest `⋖` and the top is reduced. Node labels are
//! sets of nonterminals, so non-invertible grammars parse without choosing
//! among candidate left parts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::grammar::{Grammar, Symbol};
use crate::precedence::{build_opm, PrecRel, PrecedenceError, PrecedenceMatrix, RelSet};
use crate::Token;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("not a Floyd grammar: conflicting cells {}", format_cells(.0))]
    NotFloyd(Vec<(Token, Token)>),
    #[error("`{0}` is not a terminal of the grammar")]
    UnknownTerminal(Token),
    #[error(transparent)]
    Precedence(#[from] PrecedenceError),
}

pub(crate) fn format_cells(cells: &[(Token, Token)]) -> String {
    cells
        .iter()
        .map(|(a, b)| format!("({a}, {b})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// A letter or one of the two end delimiters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Marker {
    Start,
    End,
    Letter(Token),
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marker::Start => f.write_str("|-"),
            Marker::End => f.write_str("-|"),
            Marker::Letter(t) => f.write_str(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Compare {
        left: Marker,
        rel: PrecRel,
        right: Marker,
    },
    Shift {
        letter: Token,
    },
    Reduce {
        length: usize,
        labels: BTreeSet<Token>,
    },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Compare { left, rel, right } => {
                write!(f, "compare {left} {} {right}", rel.ascii())
            }
            TraceEvent::Shift { letter } => write!(f, "shift {letter}"),
            TraceEvent::Reduce { length, labels } => {
                write!(f, "reduce {length} -> {}", label_text(labels))
            }
        }
    }
}

/// Why an input was rejected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rejection {
    /// Two adjacent letters with an empty matrix cell.
    PrecedenceGap {
        left: Token,
        right: Token,
        position: usize,
    },
    /// A fenced handle that no rule right part matches.
    NoMatchingRule { handle: String },
    /// The input reduced to one tree whose labels do not reach the axiom.
    AxiomNotReached { labels: BTreeSet<Token> },
    /// The empty word, without an empty axiom rule.
    EmptyWord,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::PrecedenceGap {
                left,
                right,
                position,
            } => {
                write!(
                    f,
                    "no precedence relation between `{left}` and `{right}` at position {position}"
                )
            }
            Rejection::NoMatchingRule { handle } => {
                write!(f, "no rule matches the handle `{handle}`")
            }
            Rejection::AxiomNotReached { labels } => {
                write!(
                    f,
                    "the input reduces to {} which does not reach the axiom",
                    label_text(labels)
                )
            }
            Rejection::EmptyWord => f.write_str("the empty word is not in the language"),
        }
    }
}

/// A subtree or an input letter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ParseChild {
    Leaf(Token),
    Node(ParseNode),
}

/// An internal node of a parse tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseNode {
    /// Left parts of every rule matching this node's handle.
    pub label: BTreeSet<Token>,
    pub children: Vec<ParseChild>,
    /// Covered input positions, half open.
    pub span: (usize, usize),
}

impl ParseNode {
    /// Leaves in order; equals the parsed input.
    pub fn leaves(&self) -> Vec<Token> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Token>) {
        for c in &self.children {
            match c {
                ParseChild::Leaf(t) => out.push(t.clone()),
                ParseChild::Node(n) => n.collect_leaves(out),
            }
        }
    }

    /// Node spans in preorder: the shape of the tree.
    pub fn shape(&self) -> Vec<(usize, usize)> {
        let mut out = vec![self.span];
        for c in &self.children {
            if let ParseChild::Node(n) = c {
                out.extend(n.shape());
            }
        }
        out
    }

    /// Indented rendering, one node or leaf per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        out.push_str(&format!(
            "{}{} [{}..{})\n",
            "  ".repeat(depth),
            label_text(&self.label),
            self.span.0,
            self.span.1
        ));
        for c in &self.children {
            match c {
                ParseChild::Leaf(t) => out.push_str(&format!("{}{}\n", "  ".repeat(depth + 1), t)),
                ParseChild::Node(n) => n.render_into(depth + 1, out),
            }
        }
    }
}

fn label_text(labels: &BTreeSet<Token>) -> String {
    format!(
        "{{{}}}",
        labels.iter().map(|t| &**t).collect::<Vec<_>>().join(", ")
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseOutcome {
    pub accepted: bool,
    /// The tree of an accepted nonempty input.
    pub tree: Option<ParseNode>,
    pub trace: Vec<TraceEvent>,
    pub rejection: Option<Rejection>,
}

/// Right-part shape: terminals by name, nonterminal positions as `None`.
type Shape = Vec<Option<Token>>;

/// A parser with the matrix and the rule index of one grammar precomputed.
#[derive(Clone, Debug)]
pub struct OpParser {
    matrix: PrecedenceMatrix,
    terminals: BTreeSet<Token>,
    axiom: Token,
    accepts_empty: bool,
    /// shape -> (left part, nonterminals of the right part in order)
    rules_by_shape: HashMap<Shape, Vec<(Token, Vec<Token>)>>,
    ancestors: BTreeMap<Token, BTreeSet<Token>>,
}

enum Entry {
    /// A shifted letter, its input position, and its relation to the
    /// terminal below it.
    Letter(Token, usize, PrecRel),
    Node(ParseNode),
}

impl OpParser {
    pub fn new(g: &Grammar) -> Result<Self, ParseError> {
        let opm = build_opm(g)?;
        if !opm.is_floyd() {
            return Err(ParseError::NotFloyd(
                opm.conflicts
                    .into_iter()
                    .map(|c| (c.left, c.right))
                    .collect(),
            ));
        }
        let mut rules_by_shape: HashMap<Shape, Vec<(Token, Vec<Token>)>> = HashMap::new();
        for rule in g.rules() {
            if rule.is_empty() || rule.renamed().is_some() {
                continue;
            }
            let shape = rule
                .rhs
                .iter()
                .map(|s| match s {
                    Symbol::Terminal(t) => Some(t.clone()),
                    Symbol::Nonterminal(_) => None,
                })
                .collect();
            let nts = rule
                .rhs
                .iter()
                .filter_map(|s| s.as_nonterminal().cloned())
                .collect();
            rules_by_shape
                .entry(shape)
                .or_default()
                .push((rule.lhs.clone(), nts));
        }
        Ok(OpParser {
            matrix: opm.matrix,
            terminals: g.terminals().clone(),
            axiom: g.axiom().clone(),
            accepts_empty: g.derives_empty(),
            rules_by_shape,
            ancestors: g.renaming_ancestors(),
        })
    }

    pub fn matrix(&self) -> &PrecedenceMatrix {
        &self.matrix
    }

    /// Closes a label set under renaming rules.
    pub fn closure(&self, labels: &BTreeSet<Token>) -> BTreeSet<Token> {
        labels
            .iter()
            .flat_map(|a| self.ancestors.get(a).into_iter().flatten().cloned())
            .collect()
    }

    pub fn accepts(&self, w: &[Token]) -> Result<bool, ParseError> {
        Ok(self.parse(w)?.accepted)
    }

    pub fn parse(&self, w: &[Token]) -> Result<ParseOutcome, ParseError> {
        if let Some(t) = w.iter().find(|t| !self.terminals.contains(*t)) {
            return Err(ParseError::UnknownTerminal(t.clone()));
        }
        let mut trace = Vec::new();
        if w.is_empty() {
            let accepted = self.accepts_empty;
            return Ok(ParseOutcome {
                accepted,
                tree: None,
                trace,
                rejection: (!accepted).then_some(Rejection::EmptyWord),
            });
        }
        let reject = |trace, why| {
            Ok(ParseOutcome {
                accepted: false,
                tree: None,
                trace,
                rejection: Some(why),
            })
        };

        let mut stack: Vec<Entry> = Vec::new();
        let mut next = 0;
        loop {
            let top = stack.iter().rev().find_map(|e| match e {
                Entry::Letter(t, pos, _) => Some((t, *pos)),
                Entry::Node(_) => None,
            });
            let (left, right) = (
                top.map_or(Marker::Start, |(t, _)| Marker::Letter(t.clone())),
                w.get(next)
                    .map_or(Marker::End, |t| Marker::Letter(t.clone())),
            );
            let rel = match (&left, &right) {
                (Marker::Start, Marker::End) => break,
                (Marker::Start, _) => PrecRel::Yields,
                (_, Marker::End) => PrecRel::Takes,
                (Marker::Letter(a), Marker::Letter(b)) => match self.matrix.get(a, b).only() {
                    Some(rel) => rel,
                    None => {
                        return reject(
                            trace,
                            Rejection::PrecedenceGap {
                                left: a.clone(),
                                right: b.clone(),
                                position: next,
                            },
                        )
                    }
                },
                _ => unreachable!("delimiters occur only at the ends"),
            };
            trace.push(TraceEvent::Compare { left, rel, right });
            if rel != PrecRel::Takes {
                let letter = w[next].clone();
                trace.push(TraceEvent::Shift {
                    letter: letter.clone(),
                });
                stack.push(Entry::Letter(letter, next, rel));
                next += 1;
                continue;
            }

            // Pop the handle: up to and including the letter fenced by ⋖,
            // plus a subtree directly below it.
            let mut handle = Vec::new();
            while let Some(e) = stack.pop() {
                let fenced = matches!(e, Entry::Letter(_, _, PrecRel::Yields));
                handle.push(e);
                if fenced {
                    if matches!(stack.last(), Some(Entry::Node(_))) {
                        handle.push(stack.pop().expect("checked"));
                    }
                    break;
                }
            }
            handle.reverse();
            let node = match self.reduce(handle) {
                Ok(node) => node,
                Err(text) => return reject(trace, Rejection::NoMatchingRule { handle: text }),
            };
            trace.push(TraceEvent::Reduce {
                length: node.children.len(),
                labels: node.label.clone(),
            });
            stack.push(Entry::Node(node));
        }

        match stack.pop() {
            Some(Entry::Node(node)) if stack.is_empty() => {
                if self.closure(&node.label).contains(&self.axiom) {
                    Ok(ParseOutcome {
                        accepted: true,
                        tree: Some(node),
                        trace,
                        rejection: None,
                    })
                } else {
                    let labels = node.label.clone();
                    reject(trace, Rejection::AxiomNotReached { labels })
                }
            }
            _ => unreachable!("a nonempty input always reduces to one subtree"),
        }
    }

    /// Builds the node for a handle, or returns the handle text when no
    /// rule matches.
    fn reduce(&self, handle: Vec<Entry>) -> Result<ParseNode, String> {
        let shape: Shape = handle
            .iter()
            .map(|e| match e {
                Entry::Letter(t, _, _) => Some(t.clone()),
                Entry::Node(_) => None,
            })
            .collect();
        let child_labels: Vec<BTreeSet<Token>> = handle
            .iter()
            .filter_map(|e| match e {
                Entry::Node(n) => Some(self.closure(&n.label)),
                Entry::Letter(..) => None,
            })
            .collect();
        let label: BTreeSet<Token> = self
            .rules_by_shape
            .get(&shape)
            .into_iter()
            .flatten()
            .filter(|(_, nts)| nts.iter().zip(&child_labels).all(|(b, ls)| ls.contains(b)))
            .map(|(lhs, _)| lhs.clone())
            .collect();
        if label.is_empty() {
            return Err(handle
                .iter()
                .map(|e| match e {
                    Entry::Letter(t, _, _) => t.to_string(),
                    Entry::Node(n) => label_text(&n.label),
                })
                .collect::<Vec<_>>()
                .join(" "));
        }
        let span_of = |e: &Entry| match e {
            Entry::Letter(_, pos, _) => (*pos, pos + 1),
            Entry::Node(n) => n.span,
        };
        let span = (
            span_of(handle.first().expect("nonempty handle")).0,
            span_of(handle.last().expect("nonempty handle")).1,
        );
        let children = handle
            .into_iter()
            .map(|e| match e {
                Entry::Letter(t, _, _) => ParseChild::Leaf(t),
                Entry::Node(n) => ParseChild::Node(n),
            })
            .collect();
        Ok(ParseNode {
            label,
            children,
            span,
        })
    }
}

/// Parses `w` with a freshly built [`OpParser`].
pub fn parse(g: &Grammar, w: &[Token]) -> Result<ParseOutcome, ParseError> {
    OpParser::new(g)?.parse(w)
}

/// One link of a relation chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub left: Marker,
    /// Empty for a gap.
    pub rels: RelSet,
    pub right: Marker,
}

/// The relations between consecutive symbols of `⊢ w ⊣`, read from `m`
/// with the delimiter conventions `⊢ ⋖ a` and `a ⋗ ⊣`.
pub fn precedence_trace(m: &PrecedenceMatrix, w: &[Token]) -> Vec<TraceStep> {
    let markers: Vec<Marker> = std::iter::once(Marker::Start)
        .chain(w.iter().cloned().map(Marker::Letter))
        .chain(std::iter::once(Marker::End))
        .collect();
    markers
        .windows(2)
        .map(|pair| {
            let rels = match (&pair[0], &pair[1]) {
                (Marker::Start, _) => RelSet::single(PrecRel::Yields),
                (_, Marker::End) => RelSet::single(PrecRel::Takes),
                (Marker::Letter(a), Marker::Letter(b)) => m.get(a, b),
                _ => unreachable!("delimiters occur only at the ends"),
            };
            TraceStep {
                left: pair[0].clone(),
                rels,
                right: pair[1].clone(),
            }
        })
        .collect()
}

/// Renders a relation chain as one line, e.g. `|- < b = c > -|`; gaps
/// print as `?`.
pub fn render_trace(steps: &[TraceStep]) -> String {
    let Some(first) = steps.first() else {
        return String::new();
    };
    let mut out = first.left.to_string();
    for step in steps {
        let glyph = if step.rels.is_empty() {
            "?".to_string()
        } else {
            step.rels.glyph()
        };
        out.push_str(&format!(" {glyph} {}", step.right));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize;

    const G3: &str = "%axiom S\n%terminals b c d e f\n\
        S -> A | B | C\nA -> b A c | b c\nB -> f B d | f d\nC -> e C f b | e f b\n";

    fn g(src: &str) -> Grammar {
        Grammar::parse_text(src).unwrap()
    }

    #[test]
    fn g3_examples() {
        let p = OpParser::new(&g(G3)).unwrap();
        let out = p.parse(&tokenize("b b c c")).unwrap();
        assert!(out.accepted);
        assert_eq!(out.tree.unwrap().leaves(), tokenize("b b c c"));
        let out = p.parse(&tokenize("b c d")).unwrap();
        assert!(!out.accepted);
        assert!(matches!(
            out.rejection,
            Some(Rejection::PrecedenceGap { .. })
        ));
        assert!(!p.accepts(&[]).unwrap());
        assert!(p.accepts(&tokenize("e e f b f b")).unwrap());
    }

    #[test]
    fn single_rule_tree() {
        let out = parse(
            &g("%axiom A\n%terminals b c\nA -> b A c | b c\n"),
            &tokenize("b c"),
        )
        .unwrap();
        let tree = out.tree.unwrap();
        assert_eq!(tree.label, BTreeSet::from([Token::from("A")]));
        assert_eq!(
            tree.children,
            vec![ParseChild::Leaf("b".into()), ParseChild::Leaf("c".into())]
        );
        assert_eq!(tree.render(), "{A} [0..2)\n  b\n  c\n");
    }

    #[test]
    fn no_matching_rule() {
        // `a x b` reduces `a x` to T and is left with the handle `T b`.
        let grammar = g("%axiom S\n%terminals a b x\nS -> a T b\nT -> a x\n");
        let out = parse(&grammar, &tokenize("a a x b")).unwrap();
        assert!(out.accepted);
        let out = parse(&grammar, &tokenize("a x b")).unwrap();
        assert!(matches!(
            out.rejection,
            Some(Rejection::NoMatchingRule { .. })
        ));
    }

    #[test]
    fn renaming_closure_at_acceptance() {
        let grammar = g("%axiom S\n%terminals a\nS -> A\nA -> a\n");
        assert!(parse(&grammar, &tokenize("a")).unwrap().accepted);
    }

    #[test]
    fn empty_word() {
        let grammar = g("%axiom S\n%terminals a\nS -> %empty | a\n");
        assert!(parse(&grammar, &[]).unwrap().accepted);
        assert_eq!(
            parse(&g(G3), &[]).unwrap().rejection,
            Some(Rejection::EmptyWord)
        );
    }

    #[test]
    fn errors() {
        let conflicted = g("%axiom S\n%terminals a b\nS -> a S b | a b | a S\n");
        assert!(matches!(
            OpParser::new(&conflicted),
            Err(ParseError::NotFloyd(_))
        ));
        assert!(matches!(
            parse(&g(G3), &tokenize("b z")),
            Err(ParseError::UnknownTerminal(_))
        ));
    }

    #[test]
    fn trace_rendering() {
        let m = build_opm(&g(G3)).unwrap().matrix;
        assert_eq!(
            render_trace(&precedence_trace(&m, &tokenize("b c"))),
            "|- < b = c > -|"
        );
        assert_eq!(
            render_trace(&precedence_trace(&m, &tokenize("a"))),
            "|- < a > -|"
        );
        assert_eq!(
            render_trace(&precedence_trace(&m, &tokenize("c b"))),
            "|- < c ? b > -|"
        );
    }

    #[test]
    fn reduce_events_follow_the_handles() {
        let out = parse(&g(G3), &tokenize("b b c c")).unwrap();
        let events: Vec<String> = out.trace.iter().map(ToString::to_string).collect();
        assert_eq!(
            events,
            [
                "compare |- < b",
                "shift b",
                "compare b < b",
                "shift b",
                "compare b = c",
                "shift c",
                "compare c > c",
                "reduce 2 -> {A}",
                "compare b = c",
                "shift c",
                "compare c > -|",
                "reduce 3 -> {A}",
            ]
        );
    }
}
