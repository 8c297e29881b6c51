//! Inputs shared by the benchmarks: fixture artifacts and scalable words.

use opvp::{Grammar, Token, Vpda, Word};

pub const NESTED: &str = include_str!("../../core/fixtures/grammars/nested.fg");
pub const OPEN_CALLS: &str = include_str!("../../core/fixtures/grammars/open_calls.fg");
pub const L1: &str = include_str!("../../core/fixtures/grammars/l1.fg");
pub const NONDETERMINISTIC: &str = include_str!("../../core/fixtures/vpda/nondeterministic.vpda");
pub const MULTI_RETURN: &str = include_str!("../../core/fixtures/vpda/multi_return.vpda");

pub fn grammar(src: &str) -> Grammar {
    Grammar::parse_text(src).expect("fixture grammar")
}

pub fn vpda(src: &str) -> Vpda {
    Vpda::parse_text(src).expect("fixture automaton")
}

/// `c^n r^n`, a member of the nested grammar's language.
pub fn nested(n: usize) -> Word {
    let mut w = vec![Token::from("c"); n];
    w.extend(std::iter::repeat_n(Token::from("r"), n));
    w
}

/// Words over `c r s` with internals, pairs, nesting up to `depth` and
/// calls left open at the end; deterministic in `len` and `depth`.
pub fn mixed(len: usize, depth: usize) -> Word {
    let mut w = Vec::with_capacity(len);
    let mut open = 0;
    let mut i = 0usize;
    while w.len() < len {
        let letter = match (i % 5, open) {
            (0 | 1, d) if d < depth => {
                open += 1;
                "c"
            }
            (2 | 3, d) if d > 0 => {
                open -= 1;
                "r"
            }
            _ => "s",
        };
        w.push(Token::from(letter));
        i += 1;
    }
    w
}
