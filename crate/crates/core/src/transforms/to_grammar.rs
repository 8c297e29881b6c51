//! Automaton to grammar.
//!
//! The automaton is first split into phases: a fresh initial state `q0`
//! with copies of the initial state's moves, a `q` copy of every state for
//! the input before the first unmatched call, and a `p` copy for the rest.
//! A crossing call (`q` to `p`, or `p` to `p`) pushes [`UNMATCHED`], which
//! no return pops, and bottom returns exist only in the `q` phase.
//!
//! Nonterminals name computations that never look below their starting
//! stack:
//! * `<q0,x>` reads the prefix before the first unmatched call, from the
//!   empty stack back to it;
//! * `<x,y>` and `<x,W,y>` read a nonempty well-balanced word inside one
//!   phase; the triple is the body of a call that pushed `W`;
//! * `[x,f]` reads what follows the first unmatched call and ends in the
//!   final state `f`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use super::{ConstructionReport, RowCount};
use crate::grammar::{Grammar, Rule, Symbol};
use crate::precedence::{build_opm, classify_vp, total_vp_matrix};
use crate::vpda::{StackTop, Vpda, VpdaTransition};
use crate::Token;

/// Stack symbol pushed by calls guessed to stay unmatched.
pub const UNMATCHED: &str = "Z_U";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhaseState {
    /// The fresh initial state; no transition enters it.
    Initial,
    /// Before the first unmatched call.
    Q(Token),
    /// From the first unmatched call on.
    P(Token),
}

impl PhaseState {
    /// The copy of `x` in the phase a non-crossing move from `self` stays in.
    fn sibling(&self, x: &Token) -> PhaseState {
        match self {
            PhaseState::Initial | PhaseState::Q(_) => PhaseState::Q(x.clone()),
            PhaseState::P(_) => PhaseState::P(x.clone()),
        }
    }

    fn is_p(&self) -> bool {
        matches!(self, PhaseState::P(_))
    }
}

impl fmt::Display for PhaseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseState::Initial => f.write_str("q0"),
            PhaseState::Q(x) => write!(f, "q.{x}"),
            PhaseState::P(x) => write!(f, "p.{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GrammarNonterminal {
    Axiom,
    /// Both states in one phase, or `q0` on the left for the prefix.
    Pair(PhaseState, PhaseState),
    Triple(PhaseState, Token, PhaseState),
    /// Both states in the `p` phase, the right one final.
    Pending(PhaseState, PhaseState),
}

impl fmt::Display for GrammarNonterminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrammarNonterminal::Axiom => f.write_str("S"),
            GrammarNonterminal::Pair(l, r) => write!(f, "<{l},{r}>"),
            GrammarNonterminal::Triple(l, w, r) => write!(f, "<{l},{w},{r}>"),
            GrammarNonterminal::Pending(l, r) => write!(f, "[{l},{r}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Sym {
    T(Token),
    N(GrammarNonterminal),
}

/// The phase-split automaton.
struct Phased {
    q: Vec<PhaseState>,
    p: Vec<PhaseState>,
    stack: Vec<Token>,
    ints: Vec<(PhaseState, Token, PhaseState)>,
    calls: Vec<(PhaseState, Token, PhaseState, Token)>,
    /// Returns popping a symbol other than `⊥`.
    rets: Vec<(PhaseState, Token, Token, PhaseState)>,
    bottom_rets: Vec<(PhaseState, Token, PhaseState)>,
    /// Calls pushing [`UNMATCHED`].
    crossing: Vec<(PhaseState, Token, PhaseState)>,
    finals: BTreeSet<PhaseState>,
}

impl Phased {
    fn new(a: &Vpda) -> Phased {
        let init = a.initial();
        // Every state a move of `x` leaves from, in the given phases.
        let sources = |x: &Token, q: bool, p: bool| {
            let mut v = Vec::new();
            if x == init {
                v.push(PhaseState::Initial);
            }
            if q {
                v.push(PhaseState::Q(x.clone()));
            }
            if p {
                v.push(PhaseState::P(x.clone()));
            }
            v
        };
        let mut ph = Phased {
            q: a.states()
                .iter()
                .map(|x| PhaseState::Q(x.clone()))
                .collect(),
            p: a.states()
                .iter()
                .map(|x| PhaseState::P(x.clone()))
                .collect(),
            stack: a.stack_alphabet().iter().cloned().collect(),
            ints: Vec::new(),
            calls: Vec::new(),
            rets: Vec::new(),
            bottom_rets: Vec::new(),
            crossing: Vec::new(),
            finals: BTreeSet::new(),
        };
        for t in a.transitions() {
            match t {
                VpdaTransition::Internal { from, letter, to } => {
                    for s in sources(from, true, true) {
                        let to = s.sibling(to);
                        ph.ints.push((s, letter.clone(), to));
                    }
                }
                VpdaTransition::Call {
                    from,
                    letter,
                    to,
                    push,
                } => {
                    for s in sources(from, true, true) {
                        let to = s.sibling(to);
                        ph.calls.push((s, letter.clone(), to, push.clone()));
                    }
                    for s in sources(from, true, true) {
                        ph.crossing
                            .push((s, letter.clone(), PhaseState::P(to.clone())));
                    }
                }
                VpdaTransition::Return {
                    from,
                    letter,
                    top: StackTop::Symbol(z),
                    to,
                } => {
                    // `q0` only ever sees the bare bottom.
                    for s in [PhaseState::Q(from.clone()), PhaseState::P(from.clone())] {
                        let to = s.sibling(to);
                        ph.rets.push((s, letter.clone(), z.clone(), to));
                    }
                }
                VpdaTransition::Return {
                    from,
                    letter,
                    top: StackTop::Bottom,
                    to,
                } => {
                    // The `p` phase always has `Z_U` above the bottom.
                    for s in sources(from, true, false) {
                        ph.bottom_rets
                            .push((s, letter.clone(), PhaseState::Q(to.clone())));
                    }
                }
            }
        }
        for f in a.finals() {
            ph.finals.insert(PhaseState::Q(f.clone()));
            ph.finals.insert(PhaseState::P(f.clone()));
        }
        if a.finals().contains(init) {
            ph.finals.insert(PhaseState::Initial);
        }
        ph
    }

    fn phase_of(&self, s: &PhaseState) -> &[PhaseState] {
        if s.is_p() {
            &self.p
        } else {
            &self.q
        }
    }
}

const ROWS: [(&str, &str); 36] = [
    ("axiom", "S -> Y c Z"),
    ("axiom", "S -> Y"),
    ("axiom", "S -> Y c"),
    ("axiom", "S -> c Z"),
    ("axiom", "S -> c"),
    ("axiom", "S -> %empty"),
    ("prefix", "Y -> s"),
    ("prefix", "Y -> r"),
    ("prefix", "Y -> Y s"),
    ("prefix", "Y -> Y r"),
    ("prefix", "Y -> c B r"),
    ("prefix", "Y -> c r"),
    ("prefix", "Y -> Y c B r"),
    ("prefix", "Y -> Y c r"),
    ("balanced", "B -> B c B r"),
    ("balanced", "B -> B c r"),
    ("balanced", "B -> c B r"),
    ("balanced", "B -> c r"),
    ("balanced", "B -> B s"),
    ("balanced", "B -> s"),
    ("call body", "B -> B c B r"),
    ("call body", "B -> B c r"),
    ("call body", "B -> c B r"),
    ("call body", "B -> c r"),
    ("call body", "B -> B s"),
    ("call body", "B -> s"),
    ("suffix", "Z -> c Z"),
    ("suffix", "Z -> c"),
    ("suffix", "Z -> B c Z"),
    ("suffix", "Z -> B c"),
    ("suffix", "Z -> B c B r"),
    ("suffix", "Z -> c B r"),
    ("suffix", "Z -> B c r"),
    ("suffix", "Z -> c r"),
    ("suffix", "Z -> B s"),
    ("suffix", "Z -> s"),
];

const RECONCILIATIONS: [&str; 8] = [
    "the fresh initial state and bottom returns belong to the q phase; every call also has a crossing copy pushing Z_U",
    "suffix nonterminals are written [x,f], apart from the balanced pairs <x,y>, so call bodies cannot derive unmatched calls",
    "balanced B -> c B r: the body triple ends in the state the return leaves from",
    "call body B -> c B r: the left state is the calling state",
    "balanced B -> B s, B -> s and call body B -> c r: added so that every nonempty well-balanced word has a derivation",
    "suffix Z -> B c B r, Z -> c B r, Z -> B c r, Z -> c r: the return enters the final state of the suffix",
    "suffix Z -> B c: the symbol after the pair is the call letter",
    "axiom S -> %empty: added when the initial state is final",
];

struct Builder {
    rows: Vec<RowCount>,
    index: HashMap<(&'static str, &'static str), usize>,
    seen: HashSet<(GrammarNonterminal, Vec<Sym>)>,
    rules: Vec<(GrammarNonterminal, Vec<Sym>)>,
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
            rules: Vec::new(),
        }
    }

    fn emit(
        &mut self,
        group: &'static str,
        row: &'static str,
        lhs: GrammarNonterminal,
        rhs: Vec<Sym>,
    ) {
        if self.seen.insert((lhs.clone(), rhs.clone())) {
            self.rows[self.index[&(group, row)]].count += 1;
            self.rules.push((lhs, rhs));
        }
    }
}

fn t(x: &Token) -> Sym {
    Sym::T(x.clone())
}

fn pair(l: &PhaseState, r: &PhaseState) -> Sym {
    Sym::N(GrammarNonterminal::Pair(l.clone(), r.clone()))
}

fn triple(l: &PhaseState, w: &Token, r: &PhaseState) -> Sym {
    Sym::N(GrammarNonterminal::Triple(l.clone(), w.clone(), r.clone()))
}

fn pending(l: &PhaseState, r: &PhaseState) -> Sym {
    Sym::N(GrammarNonterminal::Pending(l.clone(), r.clone()))
}

fn axiom_rows(ph: &Phased, b: &mut Builder) {
    use GrammarNonterminal::Axiom;
    let init = PhaseState::Initial;
    let p_finals: Vec<&PhaseState> = ph.finals.iter().filter(|s| s.is_p()).collect();
    for (x, c, to) in &ph.crossing {
        let accepting = ph.finals.contains(to);
        match x {
            PhaseState::Q(_) => {
                for f in &p_finals {
                    b.emit(
                        "axiom",
                        "S -> Y c Z",
                        Axiom,
                        vec![pair(&init, x), t(c), pending(to, f)],
                    );
                }
                if accepting {
                    b.emit("axiom", "S -> Y c", Axiom, vec![pair(&init, x), t(c)]);
                }
            }
            PhaseState::Initial => {
                for f in &p_finals {
                    b.emit("axiom", "S -> c Z", Axiom, vec![t(c), pending(to, f)]);
                }
                if accepting {
                    b.emit("axiom", "S -> c", Axiom, vec![t(c)]);
                }
            }
            PhaseState::P(_) => {}
        }
    }
    for f in &ph.finals {
        if let PhaseState::Q(_) = f {
            b.emit("axiom", "S -> Y", Axiom, vec![pair(&init, f)]);
        }
    }
    if ph.finals.contains(&init) {
        b.emit("axiom", "S -> %empty", Axiom, vec![]);
    }
}

fn prefix_rows(ph: &Phased, b: &mut Builder) {
    let init = PhaseState::Initial;
    let y = |x: &PhaseState| GrammarNonterminal::Pair(PhaseState::Initial, x.clone());
    for (x, s, to) in &ph.ints {
        match x {
            PhaseState::Initial => b.emit("prefix", "Y -> s", y(to), vec![t(s)]),
            PhaseState::Q(_) => b.emit("prefix", "Y -> Y s", y(to), vec![pair(&init, x), t(s)]),
            PhaseState::P(_) => {}
        }
    }
    for (x, r, to) in &ph.bottom_rets {
        match x {
            PhaseState::Initial => b.emit("prefix", "Y -> r", y(to), vec![t(r)]),
            _ => b.emit("prefix", "Y -> Y r", y(to), vec![pair(&init, x), t(r)]),
        }
    }
    for (i, c, j, z) in ph.calls.iter().filter(|c| !c.0.is_p()) {
        for (m, r, _, n) in ph.rets.iter().filter(|r| !r.0.is_p() && r.2 == *z) {
            let body = triple(j, z, m);
            if *i == init {
                b.emit("prefix", "Y -> c B r", y(n), vec![t(c), body, t(r)]);
                if m == j {
                    b.emit("prefix", "Y -> c r", y(n), vec![t(c), t(r)]);
                }
            } else {
                b.emit(
                    "prefix",
                    "Y -> Y c B r",
                    y(n),
                    vec![pair(&init, i), t(c), body, t(r)],
                );
                if m == j {
                    b.emit(
                        "prefix",
                        "Y -> Y c r",
                        y(n),
                        vec![pair(&init, i), t(c), t(r)],
                    );
                }
            }
        }
    }
}

fn balanced_rows(ph: &Phased, b: &mut Builder) {
    use GrammarNonterminal::{Pair, Triple};
    let triple_lhs =
        |l: &PhaseState, w: &Token, r: &PhaseState| Triple(l.clone(), w.clone(), r.clone());
    for (i, c, j, z) in ph.calls.iter().filter(|c| c.0 != PhaseState::Initial) {
        for (m, r, _, n) in ph
            .rets
            .iter()
            .filter(|r| r.0.is_p() == i.is_p() && r.2 == *z)
        {
            let body = triple(j, z, m);
            let empty = m == j;
            for x in ph.phase_of(i) {
                let rhs = vec![pair(x, i), t(c), body.clone(), t(r)];
                b.emit(
                    "balanced",
                    "B -> B c B r",
                    Pair(x.clone(), n.clone()),
                    rhs.clone(),
                );
                for w in &ph.stack {
                    b.emit(
                        "call body",
                        "B -> B c B r",
                        triple_lhs(x, w, n),
                        rhs.clone(),
                    );
                }
                if empty {
                    let rhs = vec![pair(x, i), t(c), t(r)];
                    b.emit(
                        "balanced",
                        "B -> B c r",
                        Pair(x.clone(), n.clone()),
                        rhs.clone(),
                    );
                    for w in &ph.stack {
                        b.emit("call body", "B -> B c r", triple_lhs(x, w, n), rhs.clone());
                    }
                }
            }
            let rhs = vec![t(c), body.clone(), t(r)];
            b.emit(
                "balanced",
                "B -> c B r",
                Pair(i.clone(), n.clone()),
                rhs.clone(),
            );
            for w in &ph.stack {
                b.emit("call body", "B -> c B r", triple_lhs(i, w, n), rhs.clone());
            }
            if empty {
                let rhs = vec![t(c), t(r)];
                b.emit(
                    "balanced",
                    "B -> c r",
                    Pair(i.clone(), n.clone()),
                    rhs.clone(),
                );
                for w in &ph.stack {
                    b.emit("call body", "B -> c r", triple_lhs(i, w, n), rhs.clone());
                }
            }
        }
    }
    for (h, s, m) in ph.ints.iter().filter(|i| i.0 != PhaseState::Initial) {
        for x in ph.phase_of(h) {
            let rhs = vec![pair(x, h), t(s)];
            b.emit(
                "balanced",
                "B -> B s",
                Pair(x.clone(), m.clone()),
                rhs.clone(),
            );
            for w in &ph.stack {
                b.emit("call body", "B -> B s", triple_lhs(x, w, m), rhs.clone());
            }
        }
        b.emit("balanced", "B -> s", Pair(h.clone(), m.clone()), vec![t(s)]);
        for w in &ph.stack {
            b.emit("call body", "B -> s", triple_lhs(h, w, m), vec![t(s)]);
        }
    }
}

fn suffix_rows(ph: &Phased, b: &mut Builder) {
    use GrammarNonterminal::Pending;
    let p_finals: Vec<&PhaseState> = ph.finals.iter().filter(|s| s.is_p()).collect();
    let lhs = |l: &PhaseState, r: &PhaseState| Pending(l.clone(), r.clone());
    for (x, c, to) in ph.crossing.iter().filter(|c| c.0.is_p()) {
        let accepting = ph.finals.contains(to);
        for f in &p_finals {
            b.emit("suffix", "Z -> c Z", lhs(x, f), vec![t(c), pending(to, f)]);
        }
        if accepting {
            b.emit("suffix", "Z -> c", lhs(x, to), vec![t(c)]);
        }
        for p in &ph.p {
            for f in &p_finals {
                b.emit(
                    "suffix",
                    "Z -> B c Z",
                    lhs(p, f),
                    vec![pair(p, x), t(c), pending(to, f)],
                );
            }
            if accepting {
                b.emit("suffix", "Z -> B c", lhs(p, to), vec![pair(p, x), t(c)]);
            }
        }
    }
    for (i, c, j, z) in ph.calls.iter().filter(|c| c.0.is_p()) {
        for (m, r, _, n) in ph
            .rets
            .iter()
            .filter(|r| r.0.is_p() && r.2 == *z && ph.finals.contains(&r.3))
        {
            let body = triple(j, z, m);
            for p in &ph.p {
                b.emit(
                    "suffix",
                    "Z -> B c B r",
                    lhs(p, n),
                    vec![pair(p, i), t(c), body.clone(), t(r)],
                );
            }
            b.emit("suffix", "Z -> c B r", lhs(i, n), vec![t(c), body, t(r)]);
            if m == j {
                for p in &ph.p {
                    b.emit(
                        "suffix",
                        "Z -> B c r",
                        lhs(p, n),
                        vec![pair(p, i), t(c), t(r)],
                    );
                }
                b.emit("suffix", "Z -> c r", lhs(i, n), vec![t(c), t(r)]);
            }
        }
    }
    for (h, s, m) in ph
        .ints
        .iter()
        .filter(|i| i.0.is_p() && ph.finals.contains(&i.2))
    {
        for p in &ph.p {
            b.emit("suffix", "Z -> B s", lhs(p, m), vec![pair(p, h), t(s)]);
        }
        b.emit("suffix", "Z -> s", lhs(h, m), vec![t(s)]);
    }
}

/// Gives every nonterminal a printable name distinct from all terminals
/// and from each other; clashes get primes appended.
fn names(
    nonterminals: &BTreeSet<GrammarNonterminal>,
    terminals: &BTreeSet<Token>,
) -> BTreeMap<GrammarNonterminal, Token> {
    let mut taken: HashSet<String> = terminals.iter().map(|t| t.to_string()).collect();
    let mut out = BTreeMap::new();
    for n in nonterminals {
        let mut name = n.to_string();
        while !taken.insert(name.clone()) {
            name.push('\'');
        }
        out.insert(n.clone(), Token::from(name));
    }
    out
}

/// A reduced Floyd grammar generating the language of `a`, whose matrix
/// fits the total VP-matrix of the partition of `a`.
pub fn vpda_to_fg(a: &Vpda) -> (Grammar, ConstructionReport) {
    let ph = Phased::new(a);
    let mut b = Builder::new();
    axiom_rows(&ph, &mut b);
    prefix_rows(&ph, &mut b);
    balanced_rows(&ph, &mut b);
    suffix_rows(&ph, &mut b);

    let terminals = a.partition().alphabet();
    let mut nonterminals = BTreeSet::from([GrammarNonterminal::Axiom]);
    for (lhs, rhs) in &b.rules {
        nonterminals.insert(lhs.clone());
        nonterminals.extend(rhs.iter().filter_map(|s| match s {
            Sym::N(n) => Some(n.clone()),
            Sym::T(_) => None,
        }));
    }
    let name = names(&nonterminals, &terminals);
    // Alternatives of one left part stay adjacent, in emission order.
    let mut ordered: Vec<&(GrammarNonterminal, Vec<Sym>)> = b.rules.iter().collect();
    ordered.sort_by(|x, y| x.0.cmp(&y.0));
    let rules = ordered
        .into_iter()
        .map(|(lhs, rhs)| {
            let rhs = rhs
                .iter()
                .map(|s| match s {
                    Sym::T(x) => Symbol::Terminal(x.clone()),
                    Sym::N(n) => Symbol::Nonterminal(name[n].clone()),
                })
                .collect();
            Rule::new(name[lhs].clone(), rhs)
        })
        .collect();
    let raw = Grammar::new(
        terminals,
        name.values().cloned().collect(),
        rules,
        name[&GrammarNonterminal::Axiom].clone(),
    )
    .expect("constructed rules are well formed");
    let (g, axiom_unproductive) = match raw.reduce() {
        Ok(g) => (g, false),
        Err(_) => (raw.reduce_or_empty(), true),
    };

    let matrix = build_opm(&g)
        .expect("constructed rules are in operator form")
        .matrix;
    let report = ConstructionReport {
        construction: "automaton to grammar",
        unit: "rules",
        removed: b.rules.len() - g.rules().len(),
        final_count: g.rules().len(),
        rows: b.rows,
        axiom_unproductive,
        conflict_free: matrix.is_conflict_free(),
        within_total_matrix: matrix.is_subset(&total_vp_matrix(a.partition())),
        classified: classify_vp(&matrix).expect("matrix over the grammar alphabet"),
        partition: a.partition().clone(),
        matrix,
        reconciliations: RECONCILIATIONS.to_vec(),
    };
    (g, report)
}
