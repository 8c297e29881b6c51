//! Grammar to automaton.
//!
//! With a VP-matrix every right part is `[B] s`, `[B] r`, `[B] c [C] r`
//! or `[B] c [C]`, a renaming, or empty. Each nesting level of a syntax
//! tree is a left-linear chain of such rules, and the automaton reads a
//! chain left to right: `Done(X)` means a subtree rooted in `X` was just
//! completed, `Open` that nothing was read yet on this level.
//!
//! A call matched inside its rule pushes a frame `<B,c,C>` holding the left
//! part and the nonterminal expected under the call; its return pops the
//! frame once the nested level completed as `C`. A call left unmatched by
//! its rule can only sit on the right spine of the tree: it pushes `Z_U`
//! and the rest of the input must derive from the nonterminal after it,
//! its *target*. States and frames carry the target of the spine level
//! they belong to (none inside matched calls), so acceptance happens only
//! when the current spine level completes as its target.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::{not_floyd, ConstructionReport, RowCount, TransformError, UNMATCHED};
use crate::grammar::{Grammar, Rule, Symbol};
use crate::precedence::{build_opm, classify_vp, total_vp_matrix, LetterClass, VpPartition};
use crate::vpda::{StackTop, Vpda, VpdaTransition, BOTTOM};
use crate::Token;

/// Target of a spine level; `None` inside a matched call.
type Level = Option<Token>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum State {
    Start,
    Open(Level),
    Done(Token, Level),
    Accept,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Frame {
    Matched {
        left: Option<Token>,
        call: Token,
        inner: Option<Token>,
        level: Level,
    },
    Unmatched,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Move {
    Call(State, Token, State, Frame),
    Ret(State, Token, Option<Frame>, State),
    Int(State, Token, State),
}

/// The right part of a rule, split by stencil.
enum Shape<'a> {
    Internal(Option<&'a Token>, &'a Token),
    Bottom(Option<&'a Token>, &'a Token),
    Matched(Option<&'a Token>, &'a Token, Option<&'a Token>, &'a Token),
    Unmatched(Option<&'a Token>, &'a Token, Option<&'a Token>),
}

fn shape<'a>(rule: &'a Rule, p: &VpPartition) -> Option<Shape<'a>> {
    let mut rest = rule.rhs.as_slice();
    let mut nonterminal = || match rest.first() {
        Some(Symbol::Nonterminal(n)) => {
            rest = &rest[1..];
            Some(n)
        }
        _ => None,
    };
    let left = nonterminal();
    let Some(Symbol::Terminal(a)) = rest.first() else {
        return None;
    };
    rest = &rest[1..];
    let shape = match p.class_of(a)? {
        LetterClass::Internal => Shape::Internal(left, a),
        LetterClass::Return => Shape::Bottom(left, a),
        LetterClass::Call => {
            let inner = match rest.first() {
                Some(Symbol::Nonterminal(n)) => {
                    rest = &rest[1..];
                    Some(n)
                }
                _ => None,
            };
            match rest.first() {
                Some(Symbol::Terminal(r)) if p.class_of(r) == Some(LetterClass::Return) => {
                    rest = &rest[1..];
                    Shape::Matched(left, a, inner, r)
                }
                _ => Shape::Unmatched(left, a, inner),
            }
        }
    };
    rest.is_empty().then_some(shape)
}

const ROWS: [(&str, &str); 13] = [
    ("start", "A -> s"),
    ("start", "A -> r"),
    ("chain", "A -> s"),
    ("chain", "A -> B s"),
    ("chain", "A -> B r"),
    ("unmatched call", "A -> c C"),
    ("unmatched call", "A -> B c C"),
    ("unmatched call", "A -> c"),
    ("unmatched call", "A -> B c"),
    ("matched call", "A -> B c C r"),
    ("matched call", "A -> B c r"),
    ("matched call", "A -> c C r"),
    ("matched call", "A -> c r"),
];

const RECONCILIATIONS: [&str; 4] = [
    "states and frames carry the target of their spine level, so a subtree completed inside a matched call is never accepting",
    "final states are the completed spine targets and qF, instead of every nonterminal that ends a sentential form",
    "A -> c C r and A -> c r push from the start state or an open level and pop in the completed body or an open level",
    "a rule with an unmatched call applies to any spine level whose target renames to its left part, not only to the axiom",
];

struct Builder {
    rows: Vec<RowCount>,
    index: HashMap<(&'static str, &'static str), usize>,
    seen: HashSet<Move>,
    moves: Vec<Move>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            rows: ROWS
                .iter()
                .map(|&(group, row)| RowCount {
                    group,
                    row,
                    count: 0,
                })
                .collect(),
            index: ROWS.iter().enumerate().map(|(i, &k)| (k, i)).collect(),
            seen: HashSet::new(),
            moves: Vec::new(),
        }
    }

    fn emit(&mut self, group: &'static str, row: &'static str, m: Move) {
        if self.seen.insert(m.clone()) {
            self.rows[self.index[&(group, row)]].count += 1;
            self.moves.push(m);
        }
    }
}

struct Context<'a> {
    axiom: &'a Token,
    /// Reflexive renaming ancestors.
    up: BTreeMap<Token, BTreeSet<Token>>,
    levels: Vec<Level>,
}

impl Context<'_> {
    /// States entered when a subtree rooted in `a` completes on `level`.
    fn done(&self, a: &Token, level: &Level) -> Vec<State> {
        self.up[a]
            .iter()
            .map(|x| State::Done(x.clone(), level.clone()))
            .collect()
    }

    /// States in which `level` has read nothing yet.
    fn open(&self, level: &Level) -> Vec<State> {
        let mut v = vec![State::Open(level.clone())];
        if level.as_ref() == Some(self.axiom) {
            v.push(State::Start);
        }
        v
    }
}

fn emit_rule(cx: &Context, b: &mut Builder, lhs: &Token, sh: &Shape) {
    let top = Some(cx.axiom.clone());
    match *sh {
        Shape::Internal(None, s) => {
            for to in cx.done(lhs, &top) {
                b.emit("start", "A -> s", Move::Int(State::Start, s.clone(), to));
            }
            for l in &cx.levels {
                for to in cx.done(lhs, l) {
                    b.emit(
                        "chain",
                        "A -> s",
                        Move::Int(State::Open(l.clone()), s.clone(), to),
                    );
                }
            }
        }
        Shape::Internal(Some(left), s) => {
            for l in &cx.levels {
                for to in cx.done(lhs, l) {
                    let from = State::Done(left.clone(), l.clone());
                    b.emit("chain", "A -> B s", Move::Int(from, s.clone(), to));
                }
            }
        }
        // Returns without a call in their rule only occur before any call
        // on the outermost level, where the stack is bare.
        Shape::Bottom(None, r) => {
            for to in cx.done(lhs, &top) {
                b.emit(
                    "start",
                    "A -> r",
                    Move::Ret(State::Start, r.clone(), None, to),
                );
            }
        }
        Shape::Bottom(Some(left), r) => {
            for to in cx.done(lhs, &top) {
                let from = State::Done(left.clone(), top.clone());
                b.emit("chain", "A -> B r", Move::Ret(from, r.clone(), None, to));
            }
        }
        Shape::Unmatched(left, c, next) => {
            let row = match (left, next) {
                (None, Some(_)) => "A -> c C",
                (Some(_), Some(_)) => "A -> B c C",
                (None, None) => "A -> c",
                (Some(_), None) => "A -> B c",
            };
            let to = match next {
                Some(n) => State::Open(Some(n.clone())),
                None => State::Accept,
            };
            for target in cx.up[lhs]
                .iter()
                .filter(|t| cx.levels.contains(&Some((*t).clone())))
            {
                let level = Some(target.clone());
                let from = match left {
                    Some(bn) => vec![State::Done(bn.clone(), level)],
                    None => cx.open(&level),
                };
                for f in from {
                    b.emit(
                        "unmatched call",
                        row,
                        Move::Call(f, c.clone(), to.clone(), Frame::Unmatched),
                    );
                }
            }
        }
        Shape::Matched(left, c, inner, r) => {
            let row = match (left, inner) {
                (Some(_), Some(_)) => "A -> B c C r",
                (Some(_), None) => "A -> B c r",
                (None, Some(_)) => "A -> c C r",
                (None, None) => "A -> c r",
            };
            for l in &cx.levels {
                let frame = Frame::Matched {
                    left: left.cloned(),
                    call: c.clone(),
                    inner: inner.cloned(),
                    level: l.clone(),
                };
                let from = match left {
                    Some(bn) => vec![State::Done(bn.clone(), l.clone())],
                    None => cx.open(l),
                };
                for f in from {
                    b.emit(
                        "matched call",
                        row,
                        Move::Call(f, c.clone(), State::Open(None), frame.clone()),
                    );
                }
                let body = match inner {
                    Some(cn) => State::Done(cn.clone(), None),
                    None => State::Open(None),
                };
                for to in cx.done(lhs, l) {
                    b.emit(
                        "matched call",
                        row,
                        Move::Ret(body.clone(), r.clone(), Some(frame.clone()), to),
                    );
                }
            }
        }
    }
}

/// Hands out distinct names by appending primes.
struct Namer<'a> {
    taken: HashSet<String>,
    grammar_names: &'a BTreeSet<Token>,
}

impl Namer<'_> {
    fn fresh(&mut self, base: String) -> Token {
        let mut name = base;
        while !self.taken.insert(name.clone()) {
            name.push('\'');
        }
        Token::from(name)
    }

    /// Like `fresh`, but also avoids the grammar's nonterminal names.
    fn fixed(&mut self, base: &str) -> Token {
        let mut name = base.to_string();
        while self.grammar_names.contains(name.as_str()) || !self.taken.insert(name.clone()) {
            name.push('\'');
        }
        Token::from(name)
    }
}

fn suffix(level: &Level) -> String {
    level.as_ref().map(|t| format!("@{t}")).unwrap_or_default()
}

/// An automaton accepting the language of `g`, over the canonical partition
/// for which the matrix of `g` is a VP-matrix.
pub fn fg_to_vpda(g: &Grammar) -> Result<(Vpda, ConstructionReport), TransformError> {
    let analysis = build_opm(g)?;
    if !analysis.is_floyd() {
        return Err(not_floyd(&analysis.matrix));
    }
    let matrix = analysis.matrix;
    let partition = classify_vp(&matrix)?.ok_or(TransformError::NotVpMatrix)?;
    let (reduced, axiom_unproductive) = match g.reduce() {
        Ok(r) => (r, false),
        Err(_) => (g.reduce_or_empty(), true),
    };

    let shapes: Vec<(&Rule, Option<Shape>)> = reduced
        .rules()
        .iter()
        .map(|r| (r, shape(r, &partition)))
        .collect();
    let mut targets = BTreeSet::from([reduced.axiom().clone()]);
    for (r, sh) in &shapes {
        match sh {
            Some(Shape::Unmatched(_, _, Some(next))) => {
                targets.insert((*next).clone());
            }
            None if !r.is_empty() && r.renamed().is_none() => {
                return Err(TransformError::NotVpMatrix)
            }
            _ => {}
        }
    }
    let mut levels: Vec<Level> = vec![None];
    levels.extend(targets.iter().map(|t| Some(t.clone())));
    let cx = Context {
        axiom: reduced.axiom(),
        up: reduced.renaming_ancestors(),
        levels,
    };

    let mut b = Builder::new();
    for (r, sh) in &shapes {
        if let Some(sh) = sh {
            emit_rule(&cx, &mut b, &r.lhs, sh);
        }
    }

    let mut finals: BTreeSet<State> = targets
        .iter()
        .map(|t| State::Done(t.clone(), Some(t.clone())))
        .collect();
    finals.insert(State::Accept);
    if reduced
        .rules()
        .iter()
        .any(|r| r.lhs == *reduced.axiom() && r.is_empty())
    {
        finals.insert(State::Start);
    }

    // Name states and stack symbols.
    let mut states: BTreeSet<State> = BTreeSet::from([State::Start, State::Accept]);
    states.extend(finals.iter().cloned());
    let mut frames: BTreeSet<Frame> = BTreeSet::new();
    for m in &b.moves {
        match m {
            Move::Call(f, _, t, z) => {
                states.extend([f.clone(), t.clone()]);
                frames.insert(z.clone());
            }
            Move::Ret(f, _, _, t) | Move::Int(f, _, t) => states.extend([f.clone(), t.clone()]),
        }
    }
    let nonterminal_names = reduced.nonterminals();
    let mut namer = Namer {
        taken: HashSet::new(),
        grammar_names: nonterminal_names,
    };
    let start = namer.fixed("q0");
    let accept = namer.fixed("qF");
    let open = namer.fixed("p");
    let mut state_name: BTreeMap<State, Token> = BTreeMap::new();
    for s in &states {
        let name = match s {
            State::Start => start.clone(),
            State::Accept => accept.clone(),
            State::Open(None) => open.clone(),
            State::Open(l) => namer.fresh(format!("{open}{}", suffix(l))),
            State::Done(x, l) => namer.fresh(format!("{x}{}", suffix(l))),
        };
        state_name.insert(s.clone(), name);
    }
    let mut stack_namer = Namer {
        taken: HashSet::from([BOTTOM.to_string()]),
        grammar_names: nonterminal_names,
    };
    let mut frame_name: BTreeMap<Frame, Token> = BTreeMap::new();
    let unmatched = stack_namer.fresh(UNMATCHED.to_string());
    for f in &frames {
        let name = match f {
            Frame::Unmatched => unmatched.clone(),
            Frame::Matched {
                left,
                call,
                inner,
                level,
            } => {
                let part = |n: &Option<Token>| n.as_deref().unwrap_or("-").to_string();
                stack_namer.fresh(format!(
                    "<{},{call},{}>{}",
                    part(left),
                    part(inner),
                    suffix(level)
                ))
            }
        };
        frame_name.insert(f.clone(), name);
    }

    let transitions: Vec<VpdaTransition> = b
        .moves
        .iter()
        .map(|m| match m {
            Move::Call(f, c, t, z) => VpdaTransition::Call {
                from: state_name[f].clone(),
                letter: c.clone(),
                to: state_name[t].clone(),
                push: frame_name[z].clone(),
            },
            Move::Ret(f, r, z, t) => VpdaTransition::Return {
                from: state_name[f].clone(),
                letter: r.clone(),
                top: z.as_ref().map_or(StackTop::Bottom, |z| {
                    StackTop::Symbol(frame_name[z].clone())
                }),
                to: state_name[t].clone(),
            },
            Move::Int(f, s, t) => VpdaTransition::Internal {
                from: state_name[f].clone(),
                letter: s.clone(),
                to: state_name[t].clone(),
            },
        })
        .collect();
    let a = Vpda::new(
        partition.clone(),
        state_name.values().cloned(),
        start,
        finals.iter().map(|f| state_name[f].clone()),
        frame_name.values().cloned(),
        transitions,
    )?;

    let report = ConstructionReport {
        construction: "grammar to automaton",
        unit: "transitions",
        removed: 0,
        final_count: a.transitions().len(),
        rows: b.rows,
        axiom_unproductive,
        conflict_free: true,
        within_total_matrix: matrix.is_subset(&total_vp_matrix(&partition)),
        classified: Some(partition.clone()),
        partition,
        matrix,
        reconciliations: RECONCILIATIONS.to_vec(),
    };
    Ok((a, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::enumerate_language;
    use crate::tokenize;
    use crate::vpda::enumerate_accepted;

    fn check(src: &str, n: usize) -> Vpda {
        let g = Grammar::parse_text(src).unwrap();
        let (a, report) = fg_to_vpda(&g).unwrap();
        assert_eq!(
            enumerate_accepted(&a, n).unwrap(),
            enumerate_language(&g, n).unwrap(),
            "{a}"
        );
        assert_eq!(report.emitted_total(), report.final_count);
        a
    }

    #[test]
    fn nested_pairs() {
        let a = check("%axiom S\n%terminals c r\nS -> c S r | c r\n", 8);
        let expected: BTreeSet<_> = ["c r", "c c r r", "c c c r r r", "c c c c r r r r"]
            .iter()
            .map(|w| tokenize(w))
            .collect();
        assert_eq!(enumerate_accepted(&a, 8).unwrap(), expected);
    }

    #[test]
    fn internals_and_unmatched_calls() {
        check(
            "%axiom S\n%terminals c r s\nS -> Y c Z | Y | c Z | c\nY -> Y s | s | Y c r | c Y r\nZ -> W c Z | W | c | c Z\nW -> W s | s | c r\n",
            7,
        );
    }

    #[test]
    fn bottom_returns_and_renamings() {
        check(
            "%axiom S\n%terminals c r s\nS -> A | S r | S c A r\nA -> s | A s | c r\n",
            7,
        );
    }

    #[test]
    fn empty_word_only() {
        let a = check("%axiom S\n%terminals s\nS -> %empty\n", 4);
        assert!(a.accepts(&[]).unwrap());
    }

    #[test]
    fn rejects_non_vp_matrices() {
        let g3 = "%axiom S\n%terminals b c d e f\nS -> A | B | C\nA -> b A c | b c\nB -> f B d | f d\nC -> e C f b | e f b\n";
        let g = Grammar::parse_text(g3).unwrap();
        assert_eq!(fg_to_vpda(&g).unwrap_err(), TransformError::NotVpMatrix);
    }
}
