//! One function per subcommand. Each returns the verdict, the
//! human-readable text and the JSON form; nothing is printed here.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use opvp::precedence::{build_opm, check_balanced_restrictions, Pairing};
use opvp::vpda::factorize;
use opvp::{
    display_word, fg_to_vpda, precedence_trace, render_trace, reverse_fg, tokenize, vpda_to_fg,
    ConstructionReport, OpParser, ParseError, Token, TransformError, Word,
};

use crate::artifact::{self, InputError};

/// Exit status 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
}

impl Verdict {
    fn of(b: bool) -> Verdict {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Verdict::Yes => 0,
            Verdict::No => 1,
        }
    }
}

pub struct Output {
    pub verdict: Verdict,
    pub text: String,
    pub json: Value,
}

type Run = Result<Output, InputError>;

fn origin(path: &Path) -> String {
    path.display().to_string()
}

fn input_word(input: &str, alphabet: &BTreeSet<Token>) -> Result<Word, InputError> {
    let w = tokenize(input);
    if let Some(t) = w.iter().find(|t| !alphabet.contains(*t)) {
        return Err(InputError::new("--input", "not a letter of the alphabet").with_token(&**t));
    }
    Ok(w)
}

pub fn check(path: &Path, balanced: bool, pairing: Option<&str>) -> Run {
    let g = artifact::load_grammar(path)?;
    let opm = build_opm(&g).map_err(|e| InputError::new(origin(path), e.to_string()))?;
    let relations = opm.matrix.relations();
    let mut text = String::new();
    writeln!(text, "{} relations", relations.len()).unwrap();
    for r in &relations {
        writeln!(text, "  {r}").unwrap();
    }
    for c in &opm.conflicts {
        writeln!(text, "{c}").unwrap();
    }
    let floyd = opm.is_floyd();
    writeln!(
        text,
        "{}",
        if floyd {
            "Floyd grammar: conflict-free".to_string()
        } else {
            format!("not a Floyd grammar: {} conflicts", opm.conflicts.len())
        }
    )
    .unwrap();
    let mut json = json!({
        "relations": relations,
        "conflicts": opm.conflicts,
        "floyd": floyd,
    });
    let mut ok = floyd;
    if balanced {
        let spec = pairing.ok_or_else(|| {
            InputError::new("--pairing", "`--balanced` needs `--pairing c:r,...`")
        })?;
        let pairing =
            Pairing::parse(spec).map_err(|e| InputError::new("--pairing", e.to_string()))?;
        let report = check_balanced_restrictions(&g, &pairing)
            .map_err(|e| InputError::new("--pairing", e.to_string()))?;
        for v in &report.violations {
            writeln!(text, "{v}").unwrap();
        }
        writeln!(
            text,
            "{}",
            if report.passes() {
                "balanced restrictions hold"
            } else {
                "balanced restrictions violated"
            }
        )
        .unwrap();
        ok &= report.passes();
        json["balanced"] = json!({
            "passes": report.passes(),
            "violations": report.violations,
        });
    }
    Ok(Output {
        verdict: Verdict::of(ok),
        text,
        json,
    })
}

pub fn opm(path: &Path) -> Run {
    let m = artifact::load(path)?.matrix(path)?;
    let free = m.is_conflict_free();
    Ok(Output {
        verdict: Verdict::of(free),
        text: m.render(),
        json: json!({ "matrix": m, "conflict_free": free }),
    })
}

pub fn classify(path: &Path) -> Run {
    let art = artifact::load(path)?;
    let m = art.matrix(path)?;
    let p = opvp::precedence::classify_vp(&m)
        .map_err(|e| InputError::new(origin(path), e.to_string()))?;
    Ok(match p {
        Some(p) => Output {
            verdict: Verdict::Yes,
            text: p.to_string(),
            json: json!({ "vp_matrix": true, "partition": p }),
        },
        None => Output {
            verdict: Verdict::No,
            text: "not a VP-matrix\n".into(),
            json: json!({ "vp_matrix": false, "partition": null }),
        },
    })
}

fn not_floyd(e: ParseError) -> Option<Output> {
    match e {
        ParseError::NotFloyd(cells) => {
            let text = ParseError::NotFloyd(cells.clone()).to_string() + "\n";
            Some(Output {
                verdict: Verdict::No,
                text,
                json: json!({ "floyd": false, "conflicts": cells }),
            })
        }
        _ => None,
    }
}

pub fn parse(path: &Path, input: &str) -> Run {
    let g = artifact::load_grammar(path)?;
    let parser = match OpParser::new(&g) {
        Ok(p) => p,
        Err(e) => {
            let msg = e.to_string();
            return not_floyd(e).ok_or_else(|| InputError::new(origin(path), msg));
        }
    };
    let w = input_word(input, g.terminals())?;
    let out = parser
        .parse(&w)
        .map_err(|e| InputError::new("--input", e.to_string()))?;
    let mut text = String::new();
    if out.accepted {
        text.push_str("accept\n");
        if let Some(tree) = &out.tree {
            text.push_str(&tree.render());
        }
    } else {
        text.push_str("reject\n");
        if let Some(why) = &out.rejection {
            writeln!(text, "{why}").unwrap();
        }
    }
    Ok(Output {
        verdict: Verdict::of(out.accepted),
        text,
        json: serde_json::to_value(&out).expect("serializable"),
    })
}

pub fn trace(path: &Path, input: &str) -> Run {
    let m = artifact::load(path)?.matrix(path)?;
    let w = input_word(input, m.alphabet())?;
    let steps = precedence_trace(&m, &w);
    let complete = steps.iter().all(|s| s.rels.len() == 1);
    Ok(Output {
        verdict: Verdict::of(complete),
        text: render_trace(&steps) + "\n",
        json: json!({ "chain": render_trace(&steps), "steps": steps }),
    })
}

/// Shortest first, then lexicographic.
fn ordered(words: &BTreeSet<Word>) -> Vec<String> {
    let mut sorted: Vec<&Word> = words.iter().collect();
    sorted.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    sorted.into_iter().map(|w| display_word(w)).collect()
}

pub fn enumerate(path: &Path, max_len: usize) -> Run {
    let words = artifact::load(path)?.language(path, max_len)?;
    Ok(Output {
        verdict: Verdict::of(!words.is_empty()),
        text: ordered(&words).iter().map(|w| format!("{w}\n")).collect(),
        json: json!({ "max_len": max_len, "words": ordered(&words) }),
    })
}

pub fn run(path: &Path, input: &str) -> Run {
    let a = artifact::load_vpda(path)?;
    let w = input_word(input, &a.partition().alphabet())?;
    let configs = a
        .run(&w)
        .map_err(|e| InputError::new("--input", e.to_string()))?;
    let accepted = configs.iter().any(|c| a.finals().contains(&c.state));
    let mut text = String::new();
    for c in &configs {
        let mark = if a.finals().contains(&c.state) {
            " final"
        } else {
            ""
        };
        writeln!(text, "{c}{mark}").unwrap();
    }
    writeln!(text, "{}", if accepted { "accept" } else { "reject" }).unwrap();
    Ok(Output {
        verdict: Verdict::of(accepted),
        text,
        json: json!({ "configurations": configs, "accepted": accepted }),
    })
}

pub fn factorize_cmd(path: &Path, input: &str) -> Run {
    let p = artifact::load(path)?.partition(path)?.ok_or_else(|| {
        InputError::new(
            origin(path),
            "no call/return/internal partition fits the matrix",
        )
    })?;
    let w = input_word(input, &p.alphabet())?;
    let f = factorize(&p, &w).map_err(|e| InputError::new("--input", e.to_string()))?;
    Ok(Output {
        verdict: Verdict::Yes,
        text: f.to_string(),
        json: serde_json::to_value(&f).expect("serializable"),
    })
}

/// Writes `artifact` to `out` when given; otherwise it is returned for
/// printing, followed by a blank line.
fn shown(artifact: &str, out: Option<&Path>) -> Result<String, InputError> {
    match out {
        Some(path) => {
            artifact::write(path, artifact)?;
            Ok(String::new())
        }
        None => Ok(format!("{artifact}\n")),
    }
}

fn emit(artifact: String, report: &ConstructionReport, out: Option<&Path>) -> Run {
    let mut text = shown(&artifact, out)?;
    text.push_str(&report.render());
    Ok(Output {
        verdict: Verdict::Yes,
        text,
        json: json!({ "artifact": artifact, "report": report }),
    })
}

fn transform_failure(path: &Path, e: TransformError) -> Run {
    match e {
        TransformError::NotFloyd(_) | TransformError::NotVpMatrix => Ok(Output {
            verdict: Verdict::No,
            text: format!("{e}\n"),
            json: json!({ "error": e.to_string() }),
        }),
        other => Err(InputError::new(origin(path), other.to_string())),
    }
}

pub fn to_vpda(path: &Path, out: Option<&Path>) -> Run {
    let g = artifact::load_grammar(path)?;
    match fg_to_vpda(&g) {
        Ok((a, report)) => emit(a.to_text(), &report, out),
        Err(e) => transform_failure(path, e),
    }
}

pub fn from_vpda(path: &Path, out: Option<&Path>) -> Run {
    let a = artifact::load_vpda(path)?;
    let (g, report) = vpda_to_fg(&a);
    emit(g.to_text(), &report, out)
}

pub fn reverse(path: &Path, out: Option<&Path>) -> Run {
    let g = artifact::load_grammar(path)?;
    let (r, m) = match reverse_fg(&g) {
        Ok(x) => x,
        Err(e) => return transform_failure(path, e),
    };
    let text = r.to_text();
    let mut out_text = shown(&text, out)?;
    out_text.push_str(&m.render());
    Ok(Output {
        verdict: Verdict::Yes,
        text: out_text,
        json: json!({ "artifact": text, "matrix": m }),
    })
}

pub fn equiv(left: &Path, right: &Path, max_len: usize) -> Run {
    let l = artifact::load(left)?.language(left, max_len)?;
    let r = artifact::load(right)?.language(right, max_len)?;
    // Shortest first, then lexicographic.
    let first = l
        .symmetric_difference(&r)
        .min_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    Ok(match first {
        None => Output {
            verdict: Verdict::Yes,
            text: format!("equivalent up to length {max_len} ({} strings)\n", l.len()),
            json: json!({ "equivalent": true, "max_len": max_len, "count": l.len() }),
        },
        Some(w) => {
            let side = if l.contains(w) { left } else { right };
            Output {
                verdict: Verdict::No,
                text: format!(
                    "differ on `{}`: only in {}\n",
                    display_word(w),
                    side.display()
                ),
                json: json!({
                    "equivalent": false,
                    "max_len": max_len,
                    "witness": display_word(w),
                    "only_in": side.display().to_string(),
                }),
            }
        }
    })
}
