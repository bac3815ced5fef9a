//! Systematic vocabulary replacement over English fields.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;

use crate::generator::theory_rng;
use crate::record::Record;

const WORDLIST: &str = include_str!("wordlist.txt");

/// Stream reserved for the scramble permutation.
const SCRAMBLE_STREAM: u64 = u64::MAX - 1;

/// Case-insensitive word -> replacement map, applied identically everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScrambleMap {
    pub map: BTreeMap<String, String>,
}

fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphabetic()).filter(|w| !w.is_empty())
}

impl ScrambleMap {
    /// Builds a map over every word in `texts`. Replacements come from the
    /// bundled wordlist (extended with two-word blends when the vocabulary
    /// is larger), permuted by `seed`.
    pub fn build<'a>(texts: impl IntoIterator<Item = &'a str>, seed: u64) -> ScrambleMap {
        let vocab: BTreeSet<String> = texts.into_iter().flat_map(words).map(str::to_lowercase).collect();
        let base: Vec<&str> = WORDLIST.lines().map(str::trim).filter(|w| !w.is_empty()).collect();
        let mut pool: Vec<String> = base.iter().map(|w| w.to_string()).collect();
        'grow: for a in &base {
            for b in &base {
                if pool.len() >= vocab.len() {
                    break 'grow;
                }
                if a != b {
                    pool.push(format!("{a}{b}"));
                }
            }
        }
        pool.shuffle(&mut theory_rng(seed, SCRAMBLE_STREAM));
        ScrambleMap { map: vocab.into_iter().zip(pool).collect() }
    }

    /// Replaces each word, keeping punctuation, spacing and the casing
    /// pattern (lower, Capitalized or UPPER).
    pub fn apply(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        let mut word = String::new();
        let flush = |word: &mut String, out: &mut String| {
            if word.is_empty() {
                return;
            }
            match self.map.get(&word.to_lowercase()) {
                Some(r) => out.push_str(&recase(word, r)),
                None => out.push_str(word),
            }
            word.clear();
        };
        for c in text.chars() {
            if c.is_alphabetic() {
                word.push(c);
            } else {
                flush(&mut word, &mut out);
                out.push(c);
            }
        }
        flush(&mut word, &mut out);
        out
    }
}

fn recase(original: &str, replacement: &str) -> String {
    let upper = original.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase);
    if upper && original.chars().count() > 1 {
        return replacement.to_uppercase();
    }
    if original.chars().next().is_some_and(char::is_uppercase) {
        let mut c = replacement.chars();
        return match c.next() {
            Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
            None => String::new(),
        };
    }
    replacement.to_string()
}

pub fn scramble_text(text: &str, map: &ScrambleMap) -> String {
    map.apply(text)
}

/// Applies one corpus-wide map to every context and question. Formal
/// fields, answers and depths are untouched.
pub fn scramble_records(records: &[Record], seed: u64) -> Vec<Record> {
    let map = ScrambleMap::build(records.iter().flat_map(|r| [r.context.as_str(), r.question.as_str()]), seed);
    records
        .iter()
        .map(|r| Record { context: map.apply(&r.context), question: map.apply(&r.question), ..r.clone() })
        .collect()
}
