//! Two bounded-membership oracles that share nothing with precedence parsing.
//!
//! [`enumerate_language`] builds the language bottom-up, one length at a
//! time, memoizing the strings of each length derived from each nonterminal.
//! [`MembershipOracle`] runs CYK over a binarized copy of the grammar.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{DerivationStep, Grammar, GrammarError, Symbol};
use crate::{Token, Word};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// `{ w : |w| <= max_len, S =>* w }`, with the default node budget.
pub fn enumerate_language(g: &Grammar, max_len: usize) -> Result<BTreeSet<Word>, GrammarError> {
    enumerate_language_with_budget(g, max_len, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_language_with_budget(
    g: &Grammar,
    max_len: usize,
    budget: u64,
) -> Result<BTreeSet<Word>, GrammarError> {
    let mut table: BTreeMap<Token, Vec<BTreeSet<Word>>> = g
        .nonterminals()
        .iter()
        .map(|n| (n.clone(), vec![BTreeSet::new(); max_len + 1]))
        .collect();
    let mut spent = 0u64;

    for len in 1..=max_len {
        for rule in g.rules() {
            if rule.rhs.is_empty() || rule.renamed().is_some() {
                continue;
            }
            let mut found = Vec::new();
            expand(
                &rule.rhs,
                len,
                &table,
                &mut Vec::new(),
                &mut found,
                &mut spent,
                budget,
            )?;
            table.get_mut(&rule.lhs).expect("declared")[len].extend(found);
        }
        // same-length closure under renaming rules
        loop {
            let mut changed = false;
            for rule in g.rules() {
                if let Some(child) = rule.renamed() {
                    let new: Vec<Word> = table[child][len]
                        .difference(&table[&rule.lhs][len])
                        .cloned()
                        .collect();
                    spent += new.len() as u64;
                    if spent > budget {
                        return Err(GrammarError::BudgetExceeded(budget));
                    }
                    if !new.is_empty() {
                        changed = true;
                        table.get_mut(&rule.lhs).expect("declared")[len].extend(new);
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    let mut out: BTreeSet<Word> = table[g.axiom()].iter().flatten().cloned().collect();
    if g.derives_empty() {
        out.insert(Vec::new());
    }
    Ok(out)
}

fn expand(
    rhs: &[Symbol],
    remaining: usize,
    table: &BTreeMap<Token, Vec<BTreeSet<Word>>>,
    prefix: &mut Word,
    out: &mut Vec<Word>,
    spent: &mut u64,
    budget: u64,
) -> Result<(), GrammarError> {
    *spent += 1;
    if *spent > budget {
        return Err(GrammarError::BudgetExceeded(budget));
    }
    let Some((first, rest)) = rhs.split_first() else {
        if remaining == 0 {
            out.push(prefix.clone());
        }
        return Ok(());
    };
    // every remaining symbol covers at least one letter
    if remaining < rhs.len() {
        return Ok(());
    }
    match first {
        Symbol::Terminal(t) => {
            prefix.push(t.clone());
            expand(rest, remaining - 1, table, prefix, out, spent, budget)?;
            prefix.pop();
        }
        Symbol::Nonterminal(n) => {
            for len in 1..=remaining - rest.len() {
                for w in &table[n][len] {
                    let mark = prefix.len();
                    prefix.extend(w.iter().cloned());
                    expand(rest, remaining - len, table, prefix, out, spent, budget)?;
                    prefix.truncate(mark);
                }
            }
        }
    }
    Ok(())
}

/// True iff `S =>* w`.
pub fn membership_oracle(g: &Grammar, w: &[Token]) -> bool {
    MembershipOracle::new(g).accepts(w)
}

#[derive(Clone, Copy, Debug)]
enum NtKind {
    Original,
    /// Stands for one terminal inside a long right part.
    Letter,
    /// Suffix of a long right part.
    Tail,
}

#[derive(Clone, Copy, Debug)]
struct Binary {
    lhs: usize,
    left: usize,
    right: usize,
    /// Original rule whose right part this binary rule starts, if any.
    rule: Option<usize>,
}

#[derive(Clone, Copy, Debug)]
enum Back {
    Lexical(Option<usize>),
    Unit { child: usize, rule: usize },
    Split { at: usize, bin: usize },
}

/// CYK recognizer over a binarized copy of a grammar.
///
/// Every right part of length `k >= 2` becomes a chain of `k - 1` binary
/// rules over fresh tail nonterminals, with terminals replaced by fresh
/// letter nonterminals. Renaming rules are kept as unit rules and closed
/// per cell.
#[derive(Clone, Debug)]
pub struct MembershipOracle {
    kinds: Vec<NtKind>,
    axiom: usize,
    accepts_empty: bool,
    letters: HashMap<Token, usize>,
    /// per letter id: (nonterminal, original rule if any)
    lexical: Vec<Vec<(usize, Option<usize>)>>,
    binary: Vec<Binary>,
    /// per child nonterminal: (parent, original rule)
    units_by_child: Vec<Vec<(usize, usize)>>,
}

impl MembershipOracle {
    pub fn new(g: &Grammar) -> Self {
        let nt_ids: HashMap<&Token, usize> = g
            .nonterminals()
            .iter()
            .enumerate()
            .map(|(i, n)| (n, i))
            .collect();
        let mut kinds = vec![NtKind::Original; nt_ids.len()];
        let letter_names: Vec<Token> = g.terminals().iter().cloned().collect();
        let letters: HashMap<Token, usize> = letter_names
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let mut lexical = vec![Vec::new(); letter_names.len()];
        let mut letter_nt: HashMap<usize, usize> = HashMap::new();
        let mut binary = Vec::new();
        let mut units = Vec::new();

        for (ri, rule) in g.rules().iter().enumerate() {
            let lhs = nt_ids[&rule.lhs];
            match rule.rhs.as_slice() {
                [] => {}
                [Symbol::Terminal(t)] => lexical[letters[t]].push((lhs, Some(ri))),
                [Symbol::Nonterminal(n)] => units.push((lhs, nt_ids[n], ri)),
                rhs => {
                    let mut ids = Vec::with_capacity(rhs.len());
                    for s in rhs {
                        ids.push(match s {
                            Symbol::Nonterminal(n) => nt_ids[n],
                            Symbol::Terminal(t) => {
                                let li = letters[t];
                                *letter_nt.entry(li).or_insert_with(|| {
                                    kinds.push(NtKind::Letter);
                                    lexical[li].push((kinds.len() - 1, None));
                                    kinds.len() - 1
                                })
                            }
                        });
                    }
                    let mut head = lhs;
                    let mut rule_tag = Some(ri);
                    for (k, &sym) in ids.iter().enumerate().take(ids.len() - 1) {
                        let right = if k + 2 == ids.len() {
                            ids[k + 1]
                        } else {
                            kinds.push(NtKind::Tail);
                            kinds.len() - 1
                        };
                        binary.push(Binary {
                            lhs: head,
                            left: sym,
                            right,
                            rule: rule_tag,
                        });
                        head = right;
                        rule_tag = None;
                    }
                }
            }
        }
        let mut units_by_child = vec![Vec::new(); kinds.len()];
        for (parent, child, ri) in units {
            units_by_child[child].push((parent, ri));
        }
        MembershipOracle {
            axiom: nt_ids[g.axiom()],
            accepts_empty: g.derives_empty(),
            kinds,
            letters,
            lexical,
            binary,
            units_by_child,
        }
    }

    pub fn accepts(&self, w: &[Token]) -> bool {
        if w.is_empty() {
            return self.accepts_empty;
        }
        match self.table(w) {
            Some(t) => t.cell(0, w.len())[self.axiom].is_some(),
            None => false,
        }
    }

    /// A leftmost derivation of `w` in the original grammar, if one exists.
    pub fn derivation(&self, g: &Grammar, w: &[Token]) -> Option<Vec<DerivationStep>> {
        if w.is_empty() {
            return if self.accepts_empty {
                let ri = g.rules().iter().position(|r| r.is_empty())?;
                Some(vec![DerivationStep {
                    rule: ri,
                    position: 0,
                }])
            } else {
                None
            };
        }
        let table = self.table(w)?;
        table.cell(0, w.len())[self.axiom]?;
        let tree = self.build(&table, self.axiom, 0, w.len());
        let mut steps = Vec::new();
        let mut position = 0;
        leftmost(&tree, &mut position, &mut steps);
        Some(steps)
    }

    fn table(&self, w: &[Token]) -> Option<Table> {
        let n = w.len();
        let width = self.kinds.len();
        let mut table = Table {
            n,
            cells: vec![vec![None; width]; n * (n + 1)],
        };
        for (i, tok) in w.iter().enumerate() {
            let li = *self.letters.get(tok)?;
            for &(nt, rule) in &self.lexical[li] {
                self.add(&mut table, i, 1, nt, Back::Lexical(rule));
            }
        }
        for len in 2..=n {
            for i in 0..=n - len {
                for at in 1..len {
                    for (bi, b) in self.binary.iter().enumerate() {
                        if table.cell(i, at)[b.left].is_some()
                            && table.cell(i + at, len - at)[b.right].is_some()
                            && table.cell(i, len)[b.lhs].is_none()
                        {
                            self.add(&mut table, i, len, b.lhs, Back::Split { at, bin: bi });
                        }
                    }
                }
            }
        }
        Some(table)
    }

    fn add(&self, table: &mut Table, i: usize, len: usize, nt: usize, back: Back) {
        if table.cell(i, len)[nt].is_some() {
            return;
        }
        table.cell_mut(i, len)[nt] = Some(back);
        let mut work = vec![nt];
        while let Some(child) = work.pop() {
            for &(parent, rule) in &self.units_by_child[child] {
                let cell = table.cell_mut(i, len);
                if cell[parent].is_none() {
                    cell[parent] = Some(Back::Unit { child, rule });
                    work.push(parent);
                }
            }
        }
    }

    fn build(&self, table: &Table, nt: usize, i: usize, len: usize) -> Tree {
        match table.cell(i, len)[nt].expect("derivable") {
            Back::Lexical(rule) => Tree::Node {
                rule: rule.expect("original lexical rule"),
                children: vec![Tree::Leaf],
            },
            Back::Unit { child, rule } => Tree::Node {
                rule,
                children: vec![self.build(table, child, i, len)],
            },
            Back::Split { bin, .. } => {
                let rule = self.binary[bin].rule.expect("original binary rule");
                let mut children = Vec::new();
                self.spill(table, nt, i, len, &mut children);
                Tree::Node { rule, children }
            }
        }
    }

    /// Appends the original-grammar children covered by binarized `nt` over the span.
    fn spill(&self, table: &Table, nt: usize, i: usize, len: usize, out: &mut Vec<Tree>) {
        let Some(Back::Split { at, bin }) = table.cell(i, len)[nt] else {
            unreachable!("tail nonterminals derive by binary rules only");
        };
        let b = self.binary[bin];
        self.child(table, b.left, i, at, out);
        if matches!(self.kinds[b.right], NtKind::Tail) {
            self.spill(table, b.right, i + at, len - at, out);
        } else {
            self.child(table, b.right, i + at, len - at, out);
        }
    }

    fn child(&self, table: &Table, nt: usize, i: usize, len: usize, out: &mut Vec<Tree>) {
        match self.kinds[nt] {
            NtKind::Letter => out.push(Tree::Leaf),
            NtKind::Original => out.push(self.build(table, nt, i, len)),
            NtKind::Tail => unreachable!("tails only occur on the right"),
        }
    }
}

struct Table {
    n: usize,
    cells: Vec<Vec<Option<Back>>>,
}

impl Table {
    fn index(&self, i: usize, len: usize) -> usize {
        i * (self.n + 1) + len
    }

    fn cell(&self, i: usize, len: usize) -> &[Option<Back>] {
        &self.cells[self.index(i, len)]
    }

    fn cell_mut(&mut self, i: usize, len: usize) -> &mut Vec<Option<Back>> {
        let idx = self.index(i, len);
        &mut self.cells[idx]
    }
}

enum Tree {
    Leaf,
    Node { rule: usize, children: Vec<Tree> },
}

fn leftmost(tree: &Tree, position: &mut usize, steps: &mut Vec<DerivationStep>) {
    match tree {
        Tree::Leaf => *position += 1,
        Tree::Node { rule, children } => {
            steps.push(DerivationStep {
                rule: *rule,
                position: *position,
            });
            for c in children {
                leftmost(c, position, steps);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize;

    const G3: &str = "%axiom S\n%terminals b c d e f\n\
        S -> A | B | C\nA -> b A c | b c\nB -> f B d | f d\nC -> e C f b | e f b\n";

    fn words(list: &[&str]) -> BTreeSet<Word> {
        list.iter().map(|w| tokenize(w)).collect()
    }

    #[test]
    fn enumerate_g3() {
        let g = Grammar::parse_text(G3).unwrap();
        assert_eq!(
            enumerate_language(&g, 4).unwrap(),
            words(&["b c", "f d", "e f b", "b b c c", "f f d d"])
        );
        assert!(enumerate_language(&g, 0).unwrap().is_empty());
    }

    #[test]
    fn enumerate_single_nonterminal() {
        let g = Grammar::parse_text("%axiom A\n%terminals b c\nA -> b A c | b c\n").unwrap();
        assert_eq!(
            enumerate_language(&g, 6).unwrap(),
            words(&["b c", "b b c c", "b b b c c c"])
        );
    }

    #[test]
    fn empty_word() {
        let g =
            Grammar::parse_text("%axiom S\n%terminals c r\nS -> %empty | T\nT -> c T r | c r\n")
                .unwrap();
        assert_eq!(enumerate_language(&g, 0).unwrap(), words(&[""]));
        assert!(membership_oracle(&g, &[]));
    }

    #[test]
    fn budget_is_enforced() {
        let g = Grammar::parse_text("%axiom S\n%terminals a b\nS -> S a | S b | a | b\n").unwrap();
        assert_eq!(
            enumerate_language_with_budget(&g, 8, 100),
            Err(GrammarError::BudgetExceeded(100))
        );
    }

    #[test]
    fn cyk_examples() {
        let g = Grammar::parse_text(G3).unwrap();
        assert!(membership_oracle(&g, &tokenize("b b c c")));
        assert!(!membership_oracle(&g, &tokenize("b c d")));
        assert!(!membership_oracle(&g, &[]));
        assert!(membership_oracle(&g, &tokenize("e e f b f b")));
        assert!(!membership_oracle(&g, &tokenize("b x")));
    }

    #[test]
    fn derivation_witness_replays() {
        let g = Grammar::parse_text(G3).unwrap();
        let oracle = MembershipOracle::new(&g);
        for w in ["e e f b f b", "b b b c c c", "f d"] {
            let w = tokenize(w);
            let steps = oracle.derivation(&g, &w).expect("member");
            let form = g.replay(&steps).expect("valid derivation");
            let got: Word = form.iter().map(|s| s.name().clone()).collect();
            assert_eq!(got, w);
        }
        assert!(oracle.derivation(&g, &tokenize("b c c")).is_none());
    }
}
