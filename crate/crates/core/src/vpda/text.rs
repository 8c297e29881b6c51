//! Line-oriented automaton format.
//!
//! ```text
//! %calls c
//! %returns r
//! %internals s
//! %states q0 q1
//! %initial q0
//! %final q1
//! %stack Z
//! call q0 c q1 Z
//! ret q1 r Z q1
//! ret q0 r _bot q0
//! int q1 s q1
//! ```

use std::collections::BTreeSet;

use super::{StackTop, Vpda, VpdaError, VpdaTransition, BOTTOM};
use crate::precedence::{LetterClass, VpPartition};
use crate::text::{content_lines, FormatError};
use crate::Token;

pub(super) fn parse(src: &str) -> Result<Vpda, VpdaError> {
    let mut calls = Vec::new();
    let mut returns = Vec::new();
    let mut internals = Vec::new();
    let mut states: BTreeSet<Token> = BTreeSet::new();
    let mut initial: Option<Token> = None;
    let mut finals = Vec::new();
    let mut stack: BTreeSet<Token> = BTreeSet::new();
    let mut raw: Vec<(usize, Vec<&str>)> = Vec::new();

    for (line, toks) in content_lines(src) {
        let args = toks[1..].iter().map(|t| Token::from(*t));
        match toks[0] {
            "%calls" => calls.extend(args),
            "%returns" => returns.extend(args),
            "%internals" => internals.extend(args),
            "%states" => states.extend(args),
            "%final" => finals.extend(toks[1..].iter().map(|t| (line, *t))),
            "%stack" => {
                if let Some(t) = toks[1..].iter().find(|t| **t == BOTTOM) {
                    return Err(FormatError::new(line, *t, "the bottom symbol is implicit").into());
                }
                stack.extend(args)
            }
            "%initial" => {
                if toks.len() != 2 {
                    return Err(FormatError::new(
                        line,
                        toks[0],
                        "expected exactly one initial state",
                    )
                    .into());
                }
                if initial.is_some() {
                    return Err(
                        FormatError::new(line, toks[1], "initial state declared twice").into(),
                    );
                }
                initial = Some(Token::from(toks[1]));
            }
            "call" | "ret" | "int" => raw.push((line, toks)),
            other => {
                return Err(
                    FormatError::new(line, other, "unknown directive or transition kind").into(),
                )
            }
        }
    }

    let partition = VpPartition::new(calls, returns, internals)
        .map_err(|e| FormatError::new(1, "", e.to_string()))?;
    let initial =
        initial.ok_or_else(|| FormatError::new(1, "", "missing `%initial` declaration"))?;
    if !states.contains(&initial) {
        return Err(
            FormatError::new(1, &*initial, "initial state is not declared in `%states`").into(),
        );
    }
    for (line, q) in &finals {
        if !states.contains(*q) {
            return Err(
                FormatError::new(*line, *q, "final state is not declared in `%states`").into(),
            );
        }
    }

    let mut transitions = Vec::with_capacity(raw.len());
    for (line, toks) in raw {
        if toks.len() != 5 && toks[0] != "int" || toks.len() != 4 && toks[0] == "int" {
            let expected = match toks[0] {
                "call" => "call <from> <letter> <to> <push>",
                "ret" => "ret <from> <letter> <top> <to>",
                _ => "int <from> <letter> <to>",
            };
            return Err(FormatError::new(line, toks[0], format!("expected `{expected}`")).into());
        }
        let (from, letter) = (toks[1], toks[2]);
        let (to, symbol) = match toks[0] {
            "call" => (toks[3], Some(toks[4])),
            "ret" => (toks[4], Some(toks[3])),
            _ => (toks[3], None),
        };
        for q in [from, to] {
            if !states.contains(q) {
                return Err(FormatError::new(line, q, "state is not declared in `%states`").into());
            }
        }
        let used = match toks[0] {
            "call" => LetterClass::Call,
            "ret" => LetterClass::Return,
            _ => LetterClass::Internal,
        };
        match partition.class_of(letter) {
            None => return Err(FormatError::new(line, letter, "letter is not declared").into()),
            Some(class) if class != used => {
                return Err(FormatError::new(
                    line,
                    letter,
                    format!("letter is not a {used:?} letter").to_lowercase(),
                )
                .into())
            }
            Some(_) => {}
        }
        if let Some(z) = symbol {
            let bottom_ok = toks[0] == "ret";
            if z == BOTTOM && !bottom_ok {
                return Err(
                    FormatError::new(line, z, "a call cannot push the bottom symbol").into(),
                );
            }
            if z != BOTTOM && !stack.contains(z) {
                return Err(
                    FormatError::new(line, z, "stack symbol is not declared in `%stack`").into(),
                );
            }
        }
        transitions.push(match toks[0] {
            "call" => {
                VpdaTransition::call(from, letter, to, symbol.expect("call has a push symbol"))
            }
            "ret" => VpdaTransition::Return {
                from: from.into(),
                letter: letter.into(),
                top: StackTop::from_name(symbol.expect("return has a top symbol")),
                to: to.into(),
            },
            _ => VpdaTransition::int(from, letter, to),
        });
    }

    Vpda::new(
        partition,
        states,
        initial,
        finals.into_iter().map(|(_, q)| Token::from(q)),
        stack,
        transitions,
    )
}

pub(super) fn render(a: &Vpda) -> String {
    let line = |head: &str, items: &mut dyn Iterator<Item = &Token>| {
        let mut s = head.to_string();
        for t in items {
            s.push(' ');
            s.push_str(t);
        }
        s.push('\n');
        s
    };
    let p = a.partition();
    let mut out = String::new();
    out += &line("%calls", &mut p.calls().iter());
    out += &line("%returns", &mut p.returns().iter());
    out += &line("%internals", &mut p.internals().iter());
    out += &line("%states", &mut a.states().iter());
    out += &line("%initial", &mut std::iter::once(a.initial()));
    out += &line("%final", &mut a.finals().iter());
    out += &line("%stack", &mut a.stack_alphabet().iter());
    for t in a.transitions() {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}
