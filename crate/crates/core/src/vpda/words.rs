//! The call/return structure of words over a partitioned alphabet.

use std::fmt;

use serde::Serialize;

use super::VpdaError;
use crate::precedence::{LetterClass, VpPartition};
use crate::{display_word, Token, Word};

/// Largest number of optional merges [`factorize_all`] will expand.
const MAX_MERGE_CHOICES: u32 = 20;

/// Maps calls to `c`, returns to `r` and drops internals.
pub fn rho(p: &VpPartition, x: &[Token]) -> Result<String, VpdaError> {
    x.iter()
        .filter_map(|t| match p.class_of(t) {
            None => Some(Err(VpdaError::UnknownLetter(t.clone()))),
            Some(LetterClass::Call) => Some(Ok('c')),
            Some(LetterClass::Return) => Some(Ok('r')),
            Some(LetterClass::Internal) => None,
        })
        .collect()
}

/// True iff `s` cancels to the empty string under `cr → ε`.
pub fn is_well_parenthesized(s: &str) -> bool {
    let mut depth = 0usize;
    for ch in s.chars() {
        match ch {
            'c' => depth += 1,
            'r' if depth > 0 => depth -= 1,
            _ => return false,
        }
    }
    depth == 0
}

/// `ρ(x)` is well parenthesized. Letters outside `p` make this false.
pub fn is_well_balanced(p: &VpPartition, x: &[Token]) -> bool {
    rho(p, x).is_ok_and(|s| is_well_parenthesized(&s))
}

/// Nonempty, well balanced, starting with a call and ending with a return.
pub fn is_well_closed(p: &VpPartition, x: &[Token]) -> bool {
    match (x.first(), x.last()) {
        (Some(first), Some(last)) => {
            p.class_of(first) == Some(LetterClass::Call)
                && p.class_of(last) == Some(LetterClass::Return)
                && is_well_balanced(p, x)
        }
        _ => false,
    }
}

/// One `u_j w_j` pair of the prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YPart {
    /// Internals and returns, possibly empty.
    pub u: Word,
    /// A well-closed word; absent only in the last pair.
    pub w: Option<Word>,
}

/// A decomposition `x = y` or `x = y c0 z` with
/// `y = u1 w1 … uk wk` and `z = v1 c1 v2 … c(r-1) vr`.
///
/// `c0` is the first call without a matching return and `c1 …` are the
/// later ones, so everything except the grouping of `y` into `w` parts is
/// determined by `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub y: Vec<YPart>,
    pub c0: Option<Token>,
    /// `v1 … vr`, each well balanced or empty; empty when `z = ε`.
    pub z: Vec<Word>,
    /// `c1 … c(r-1)`.
    pub z_calls: Vec<Token>,
    /// Set on the decomposition whose `w` parts cannot be split further.
    pub canonical: bool,
}

impl Factorization {
    pub fn reassemble(&self) -> Word {
        let mut out = Vec::new();
        for part in &self.y {
            out.extend(part.u.iter().cloned());
            out.extend(part.w.iter().flatten().cloned());
        }
        out.extend(self.c0.iter().cloned());
        for (i, v) in self.z.iter().enumerate() {
            out.extend(v.iter().cloned());
            out.extend(self.z_calls.get(i).cloned());
        }
        out
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_empty() {
            writeln!(f, "y = {}", display_word(&[]))?;
        }
        for (j, part) in self.y.iter().enumerate() {
            writeln!(f, "u{} = {}", j + 1, display_word(&part.u))?;
            if let Some(w) = &part.w {
                writeln!(f, "w{} = {}", j + 1, display_word(w))?;
            }
        }
        if let Some(c0) = &self.c0 {
            writeln!(f, "c0 = {c0}")?;
            if self.z.is_empty() {
                writeln!(f, "z = {}", display_word(&[]))?;
            }
            for (j, v) in self.z.iter().enumerate() {
                writeln!(f, "v{} = {}", j + 1, display_word(v))?;
                if let Some(c) = self.z_calls.get(j) {
                    writeln!(f, "c{} = {c}", j + 1)?;
                }
            }
        }
        Ok(())
    }
}

struct Structure {
    /// Index of the first unmatched call.
    c0: Option<usize>,
    /// Later unmatched calls.
    pending: Vec<usize>,
    /// Top-level matched blocks of the prefix, as half-open ranges.
    blocks: Vec<(usize, usize)>,
}

fn structure(p: &VpPartition, x: &[Token]) -> Result<Structure, VpdaError> {
    let mut open: Vec<usize> = Vec::new();
    let mut blocks = Vec::new();
    for (i, t) in x.iter().enumerate() {
        match p
            .class_of(t)
            .ok_or_else(|| VpdaError::UnknownLetter(t.clone()))?
        {
            LetterClass::Call => open.push(i),
            LetterClass::Return => {
                if let Some(start) = open.pop() {
                    if open.is_empty() {
                        blocks.push((start, i + 1));
                    }
                }
            }
            LetterClass::Internal => {}
        }
    }
    // The stack never empties after the first unmatched call, so every
    // block lies in the prefix.
    let c0 = open.first().copied();
    let pending = open.iter().skip(1).copied().collect();
    Ok(Structure {
        c0,
        pending,
        blocks,
    })
}

/// Gaps between consecutive top-level blocks that can be absorbed into one
/// `w` part: those holding internals only.
fn mergeable_gaps(p: &VpPartition, x: &[Token], s: &Structure) -> Vec<usize> {
    (1..s.blocks.len())
        .filter(|&i| {
            x[s.blocks[i - 1].1..s.blocks[i].0]
                .iter()
                .all(|t| p.class_of(t) == Some(LetterClass::Internal))
        })
        .collect()
}

/// The decomposition that merges block `i` into its predecessor exactly
/// when `merged(i)`.
fn assemble(x: &[Token], s: &Structure, merged: impl Fn(usize) -> bool) -> Factorization {
    let (c0, z, z_calls) = match s.c0 {
        None => (None, Vec::new(), Vec::new()),
        Some(i) => {
            let mut cuts = s.pending.clone();
            cuts.push(x.len());
            let mut z = Vec::new();
            let mut from = i + 1;
            if from < x.len() {
                for cut in cuts {
                    z.push(x[from..cut].to_vec());
                    from = cut + 1;
                }
            }
            let z_calls = s.pending.iter().map(|&j| x[j].clone()).collect();
            (Some(x[i].clone()), z, z_calls)
        }
    };
    let prefix_end = s.c0.unwrap_or(x.len());

    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut canonical = true;
    for (i, &(start, end)) in s.blocks.iter().enumerate() {
        match groups.last_mut() {
            Some(last) if merged(i) => {
                last.1 = end;
                canonical = false;
            }
            _ => groups.push((start, end)),
        }
    }
    let mut y = Vec::new();
    let mut pos = 0;
    for (start, end) in groups {
        y.push(YPart {
            u: x[pos..start].to_vec(),
            w: Some(x[start..end].to_vec()),
        });
        pos = end;
    }
    if pos < prefix_end {
        y.push(YPart {
            u: x[pos..prefix_end].to_vec(),
            w: None,
        });
    }
    Factorization {
        y,
        c0,
        z,
        z_calls,
        canonical,
    }
}

/// Every decomposition of `x` of the form above, the canonical one first.
pub fn factorize_all(p: &VpPartition, x: &[Token]) -> Result<Vec<Factorization>, VpdaError> {
    let s = structure(p, x)?;
    let mergeable = mergeable_gaps(p, x, &s);
    if mergeable.len() as u32 > MAX_MERGE_CHOICES {
        return Err(VpdaError::BudgetExceeded(1 << MAX_MERGE_CHOICES));
    }
    Ok((0u32..(1 << mergeable.len()))
        .map(|mask| {
            assemble(x, &s, |gap| {
                mergeable
                    .iter()
                    .position(|&g| g == gap)
                    .is_some_and(|k| mask & (1 << k) != 0)
            })
        })
        .collect())
}

/// The canonical decomposition: every `w` part is a single top-level
/// call/return block.
pub fn factorize(p: &VpPartition, x: &[Token]) -> Result<Factorization, VpdaError> {
    let s = structure(p, x)?;
    Ok(assemble(x, &s, |_| false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize;

    fn crs() -> VpPartition {
        VpPartition::new(["c", "c0"], ["r"], ["s"]).unwrap()
    }

    #[test]
    fn rho_examples() {
        let p = crs();
        assert_eq!(rho(&p, &tokenize("c s r")).unwrap(), "cr");
        assert_eq!(rho(&p, &tokenize("s s s")).unwrap(), "");
        assert_eq!(rho(&p, &tokenize("c c r s r")).unwrap(), "ccrr");
        assert!(rho(&p, &tokenize("x")).is_err());
    }

    #[test]
    fn parenthesized() {
        assert!(is_well_parenthesized("ccrr"));
        assert!(is_well_parenthesized("crcr"));
        assert!(is_well_parenthesized(""));
        assert!(!is_well_parenthesized("rc"));
        assert!(!is_well_parenthesized("ccr"));
    }

    #[test]
    fn balanced_and_closed() {
        let p = crs();
        assert!(is_well_balanced(&p, &tokenize("c s r")));
        assert!(is_well_closed(&p, &tokenize("c s r")));
        assert!(is_well_balanced(&p, &tokenize("s c r s")));
        assert!(!is_well_closed(&p, &tokenize("s c r s")));
        assert!(!is_well_balanced(&p, &tokenize("c c r")));
        assert!(!is_well_closed(&p, &[]));
    }

    fn words(ws: &[&str]) -> Vec<Word> {
        ws.iter().map(|w| tokenize(w)).collect()
    }

    #[test]
    fn long_mixed_string() {
        let x = tokenize("s c s r r c c r s r s c0 c s r c c s c r r s");
        let all = factorize_all(&crs(), &x).unwrap();
        assert_eq!(all.len(), 1);
        let f = &all[0];
        assert!(f.canonical);
        assert_eq!(
            f.y,
            vec![
                YPart {
                    u: tokenize("s"),
                    w: Some(tokenize("c s r"))
                },
                YPart {
                    u: tokenize("r"),
                    w: Some(tokenize("c c r s r"))
                },
                YPart {
                    u: tokenize("s"),
                    w: None
                },
            ]
        );
        assert_eq!(f.c0.as_deref(), Some("c0"));
        assert_eq!(f.z, words(&["c s r", "c s c r r s"]));
        assert_eq!(f.z_calls, tokenize("c"));
        assert_eq!(f.reassemble(), x);
    }

    #[test]
    fn trivial_cases() {
        let f = factorize(&crs(), &tokenize("s")).unwrap();
        assert_eq!(
            f.y,
            vec![YPart {
                u: tokenize("s"),
                w: None
            }]
        );
        assert_eq!((f.c0, f.z.len()), (None, 0));

        let f = factorize(&crs(), &tokenize("c")).unwrap();
        assert!(f.y.is_empty());
        assert_eq!(f.c0.as_deref(), Some("c"));
        assert!(f.z.is_empty());

        let f = factorize(&crs(), &tokenize("c c")).unwrap();
        assert_eq!(f.z, words(&["", ""]));
        assert_eq!(f.z_calls, tokenize("c"));
        assert_eq!(f.reassemble(), tokenize("c c"));
    }

    #[test]
    fn grouping_ambiguity() {
        let x = tokenize("c r s c r");
        let all = factorize_all(&crs(), &x).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].y.len(), 2);
        assert_eq!(
            all[1].y,
            vec![YPart {
                u: vec![],
                w: Some(x.clone())
            }]
        );
        assert!(all.iter().all(|f| f.reassemble() == x));
        // A return between blocks blocks the merge.
        assert_eq!(
            factorize_all(&crs(), &tokenize("c r r c r")).unwrap().len(),
            1
        );
    }

    #[test]
    fn canonical_needs_no_enumeration() {
        let x = tokenize(&"c r s ".repeat(40));
        assert!(factorize_all(&crs(), &x).is_err());
        let f = factorize(&crs(), &x).unwrap();
        assert!(f.canonical);
        assert_eq!(f.y.len(), 41);
        assert_eq!(f.reassemble(), x);
    }

    #[test]
    fn display() {
        let f = factorize(&crs(), &tokenize("s c r c0 c")).unwrap();
        assert_eq!(
            f.to_string(),
            "u1 = s\nw1 = c r\nc0 = c0\nv1 = ε\nc1 = c\nv2 = ε\n"
        );
    }
}
