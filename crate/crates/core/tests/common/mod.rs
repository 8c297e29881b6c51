//! Fixture loading shared by the integration tests.

#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use opvp::{Grammar, Vpda};

fn dir(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(kind)
}

fn names(kind: &str, ext: &str) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir(kind))
        .expect("fixture directory")
        .filter_map(|e| {
            let path = e.ok()?.path();
            if path.extension()? != ext {
                return None;
            }
            Some(path.file_stem()?.to_string_lossy().into_owned())
        })
        .collect();
    v.sort();
    v
}

pub fn grammar_fixtures() -> Vec<String> {
    names("grammars", "fg")
}

pub fn vpda_fixtures() -> Vec<String> {
    names("vpda", "vpda")
}

pub fn grammar(name: &str) -> Grammar {
    let src = fs::read_to_string(dir("grammars").join(format!("{name}.fg"))).expect("fixture");
    Grammar::parse_text(&src).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn vpda(name: &str) -> Vpda {
    let src = fs::read_to_string(dir("vpda").join(format!("{name}.vpda"))).expect("fixture");
    Vpda::parse_text(&src).unwrap_or_else(|e| panic!("{name}: {e}"))
}
