//! Randomized checks of the constructions, the parser and factorization.

use std::collections::BTreeSet;

use proptest::collection::vec;
use proptest::prelude::*;

use opvp::grammar::{enumerate_language, membership_oracle};
use opvp::precedence::{build_opm, classify_vp, total_vp_matrix, LetterClass};
use opvp::vpda::{enumerate_accepted, factorize, factorize_all, is_well_balanced, is_well_closed};
use opvp::{
    fg_to_vpda, parse, reverse_fg, vpda_to_fg, Grammar, Rule, Symbol, Token, VpPartition, Vpda,
    VpdaTransition, Word,
};

fn partition() -> VpPartition {
    VpPartition::new(["c", "d"], ["r"], ["s"]).unwrap()
}

fn state(i: usize) -> String {
    format!("q{i}")
}

prop_compose! {
    fn arb_vpda()(n in 1usize..=3, k in 1usize..=2)(
        n in Just(n),
        k in Just(k),
        ints in vec((0..n, 0..n), 0..5),
        calls in vec((0..n, 0..2usize, 0..n, 0..k), 1..6),
        // `k` stands for the bottom
        rets in vec((0..n, 0..=k, 0..n), 1..6),
        finals in vec(any::<bool>(), n),
    ) -> Vpda {
        let stack = |z: usize| format!("Z{z}");
        let mut t = Vec::new();
        for (a, b) in ints {
            t.push(VpdaTransition::int(&state(a), "s", &state(b)));
        }
        for (a, c, b, z) in calls {
            t.push(VpdaTransition::call(&state(a), ["c", "d"][c], &state(b), &stack(z)));
        }
        for (a, z, b) in rets {
            let top = if z == k { "_bot".to_string() } else { stack(z) };
            t.push(VpdaTransition::ret(&state(a), "r", &top, &state(b)));
        }
        Vpda::new(
            partition(),
            (0..n).map(|i| Token::from(state(i))),
            "q0",
            (0..n).filter(|&i| finals[i]).map(|i| Token::from(state(i))),
            (0..k).map(|z| Token::from(stack(z))),
            t,
        )
        .unwrap()
    }
}

const NONTERMINALS: [&str; 3] = ["S", "A", "B"];

/// A rule `lhs -> [X] a [Y] [b]` with the letters drawn from `letters`;
/// `None` picks skip the optional parts.
fn rule(
    lhs: usize,
    left: Option<usize>,
    a: &str,
    inner: Option<usize>,
    b: Option<&str>,
    terminals: &[&str],
) -> Rule {
    let sym = |x: &str| {
        if terminals.contains(&x) {
            Symbol::Terminal(x.into())
        } else {
            Symbol::Nonterminal(x.into())
        }
    };
    let mut rhs = Vec::new();
    rhs.extend(left.map(|i| sym(NONTERMINALS[i])));
    rhs.push(sym(a));
    rhs.extend(inner.map(|i| sym(NONTERMINALS[i])));
    rhs.extend(b.map(sym));
    Rule::new(NONTERMINALS[lhs], rhs)
}

fn grammar_from(rules: Vec<Rule>, terminals: &[&str]) -> Option<Grammar> {
    let mut seen = BTreeSet::new();
    let rules: Vec<Rule> = rules
        .into_iter()
        .filter(|r| seen.insert(r.clone()))
        .collect();
    Grammar::from_rules("S", terminals.iter().map(|t| Token::from(*t)), rules).ok()
}

type RawRule = (usize, Option<usize>, usize, Option<usize>, Option<usize>);

/// Free-form rules, one terminal-only base rule per nonterminal (so that
/// most nonterminals are productive) and optional renamings of the axiom.
#[derive(Debug, Clone)]
struct RawGrammar {
    rules: Vec<RawRule>,
    bases: Vec<usize>,
    renamings: Vec<bool>,
}

fn raw_rules() -> impl Strategy<Value = RawGrammar> {
    let rule = (
        0..3usize,
        proptest::option::of(0..3usize),
        0..4usize,
        proptest::option::of(0..3usize),
        proptest::option::of(0..3usize),
    );
    (vec(rule, 1..8), vec(0..4usize, 3), vec(any::<bool>(), 2)).prop_map(
        |(rules, bases, renamings)| RawGrammar {
            rules,
            bases,
            renamings,
        },
    )
}

fn extra_rules(raw: &RawGrammar, bases: [&[&str]; 4], terminals: &[&str]) -> Vec<Rule> {
    let mut out = Vec::new();
    for (lhs, &b) in raw.bases.iter().enumerate() {
        let rhs = bases[b]
            .iter()
            .map(|t| Symbol::Terminal(Token::from(*t)))
            .collect();
        out.push(Rule::new(NONTERMINALS[lhs], rhs));
    }
    for (i, &on) in raw.renamings.iter().enumerate() {
        if on {
            out.push(Rule::new(
                "S",
                vec![Symbol::Nonterminal(NONTERMINALS[i + 1].into())],
            ));
        }
    }
    debug_assert!(out
        .iter()
        .all(|r| r.terminals().all(|t| terminals.contains(&&**t))));
    out
}

/// Grammars whose right parts follow the VP stencils over `c | r q | s`;
/// many have conflicts or fall outside the total matrix and are skipped.
fn vp_grammar(raw: RawGrammar) -> Option<Grammar> {
    const TERMINALS: [&str; 4] = ["c", "r", "q", "s"];
    let mut rules = extra_rules(&raw, [&["s"], &["c", "r"], &["c", "q"], &["c"]], &TERMINALS);
    rules.extend(
        raw.rules
            .into_iter()
            .map(|(lhs, left, a, inner, b)| match TERMINALS[a] {
                "c" => rule(
                    lhs,
                    left,
                    "c",
                    inner,
                    b.and_then(|i| ["r", "q"].get(i).copied()),
                    &TERMINALS,
                ),
                other => rule(lhs, left, other, None, None, &TERMINALS),
            }),
    );
    grammar_from(rules, &TERMINALS)
}

/// Operator grammars over `a b e` with right parts `[X] a [Y] [b]`.
fn operator_grammar(raw: RawGrammar) -> Option<Grammar> {
    const TERMINALS: [&str; 3] = ["a", "b", "e"];
    let mut rules = extra_rules(&raw, [&["a"], &["b"], &["e"], &["a", "b"]], &TERMINALS);
    rules.extend(raw.rules.into_iter().map(|(lhs, left, a, inner, b)| {
        rule(
            lhs,
            left,
            TERMINALS[a % 3],
            inner,
            b.map(|i| TERMINALS[i]),
            &TERMINALS,
        )
    }));
    grammar_from(rules, &TERMINALS)
}

fn words(alphabet: &[&str], max_len: usize) -> Vec<Word> {
    let mut all = vec![Vec::new()];
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |a| {
                    let mut w = w.clone();
                    w.push(Token::from(*a));
                    w
                })
            })
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}

fn mirrored(language: BTreeSet<Word>) -> BTreeSet<Word> {
    language
        .into_iter()
        .map(|mut w| {
            w.reverse();
            w
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn automaton_to_grammar(a in arb_vpda()) {
        let (g, report) = vpda_to_fg(&a);
        prop_assert_eq!(enumerate_language(&g, 5).unwrap(), enumerate_accepted(&a, 5).unwrap());
        let m = build_opm(&g).unwrap().matrix;
        prop_assert!(m.is_conflict_free());
        prop_assert!(m.is_subset(&total_vp_matrix(a.partition())));
        prop_assert!(g.max_rhs_len() <= 4);
        prop_assert_eq!(report.emitted_total() - report.removed, report.final_count);
    }

    #[test]
    fn grammar_to_automaton(raw in raw_rules()) {
        let g = vp_grammar(raw);
        prop_assume!(g.is_some());
        let g = g.unwrap();
        let opm = build_opm(&g).unwrap();
        prop_assume!(opm.is_floyd() && classify_vp(&opm.matrix).unwrap().is_some());
        let (a, _) = fg_to_vpda(&g).unwrap();
        prop_assert_eq!(enumerate_accepted(&a, 6).unwrap(), enumerate_language(&g, 6).unwrap());
    }

    #[test]
    fn reversal(raw in raw_rules()) {
        let g = operator_grammar(raw);
        prop_assume!(g.is_some());
        let g = g.unwrap();
        let opm = build_opm(&g).unwrap();
        prop_assume!(opm.is_floyd());
        let (r, m) = reverse_fg(&g).unwrap();
        prop_assert_eq!(&m, &opm.matrix.mirrored());
        prop_assert!(m.is_conflict_free());
        prop_assert_eq!(enumerate_language(&r, 6).unwrap(), mirrored(enumerate_language(&g, 6).unwrap()));
        let (back, m2) = reverse_fg(&r).unwrap();
        prop_assert_eq!(back, g);
        prop_assert_eq!(m2, opm.matrix);
    }

    #[test]
    fn parser_agrees_with_the_oracle(raw in raw_rules()) {
        let g = operator_grammar(raw);
        prop_assume!(g.is_some());
        let g = g.unwrap();
        prop_assume!(build_opm(&g).unwrap().is_floyd());
        for w in words(&["a", "b", "e"], 5) {
            prop_assert_eq!(parse(&g, &w).unwrap().accepted, membership_oracle(&g, &w), "{:?}", w);
        }
    }

    #[test]
    fn factorization(x in vec(prop::sample::select(vec!["c", "c0", "r", "s"]), 0..14)) {
        let p = VpPartition::new(["c", "c0"], ["r"], ["s"]).unwrap();
        let x: Word = x.into_iter().map(Token::from).collect();
        let all = factorize_all(&p, &x).unwrap();
        prop_assert!(all[0].canonical);
        prop_assert_eq!(&factorize(&p, &x).unwrap(), &all[0]);
        prop_assert!(all[1..].iter().all(|f| !f.canonical));
        for f in &all {
            prop_assert_eq!(f.reassemble(), x.clone());
            for part in &f.y {
                prop_assert!(part.u.iter().all(|t| p.class_of(t) != Some(LetterClass::Call)));
                if let Some(w) = &part.w {
                    prop_assert!(is_well_closed(&p, w));
                }
            }
            prop_assert!(f.z.iter().all(|v| is_well_balanced(&p, v)));
            if f.c0.is_some() && !f.z.is_empty() {
                prop_assert_eq!(f.z.len(), f.z_calls.len() + 1);
            }
        }
    }
}
