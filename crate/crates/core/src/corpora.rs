//! Hand-written rulebases bundled with the crate, with their English
//! wording, known answers and optional scenario generators.
//!
//! A `.theory` fixture is ordinary statement text with a few directive
//! comments:
//!
//! ```text
//! //! case <label>                          starts a new case
//! // English sentence                      attaches to the next statement
//! //? <fact> = true | English question     a question with a printed answer
//! //+ <fact> = false | English question    an extra question checked by hand
//! ```
//!
//! A `.scenario` sidecar lists facts to add to the first case's rules:
//!
//! ```text
//! <fact> | p=0.5 => English
//! choose1: <fact> w=0.9 => English | <fact> => English
//! ```
//!
//! `#` starts a comment line in a sidecar. Weights default to 1.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::engine::forward_chain;
use crate::logic::{Literal, Theory};
use crate::syntax::{emit_literal, emit_theory, parse_literal, parse_theory_annotated, SyntaxError};

const FIXTURES: [(&str, &str, &str, Option<&str>); 9] = [
    (
        "people",
        "Attribute rules over four people; the introductory example.",
        include_str!("../corpora/people.theory"),
        None,
    ),
    ("animals", "Relations with negation over four animals.", include_str!("../corpora/animals.theory"), None),
    (
        "birds1",
        "Flying birds with an abnormality predicate, worded with \"is flying\".",
        include_str!("../corpora/birds1.theory"),
        None,
    ),
    (
        "birds2",
        "Flying birds with an abnormality predicate, worded with \"can fly\".",
        include_str!("../corpora/birds2.theory"),
        None,
    ),
    (
        "electricity1",
        "A circuit with a switch and one appliance.",
        include_str!("../corpora/electricity1.theory"),
        Some(include_str!("../corpora/electricity1.scenario")),
    ),
    (
        "electricity2",
        "A circuit where a current runs through to one appliance.",
        include_str!("../corpora/electricity2.theory"),
        Some(include_str!("../corpora/electricity2.scenario")),
    ),
    (
        "electricity3",
        "A circuit with a battery that may be missing.",
        include_str!("../corpora/electricity3.theory"),
        Some(include_str!("../corpora/electricity3.scenario")),
    ),
    (
        "electricity4",
        "A circuit with a battery, a switch and a metal or plastic wire.",
        include_str!("../corpora/electricity4.theory"),
        Some(include_str!("../corpora/electricity4.scenario")),
    ),
    (
        "counterfactuals",
        "Whether a nail conducts electricity, across four edits of the same context.",
        include_str!("../corpora/counterfactuals.theory"),
        None,
    ),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown corpus `{0}`")]
    UnknownCorpus(String),
    #[error("corpus `{corpus}`: {source}")]
    Syntax {
        corpus: String,
        #[source]
        source: SyntaxError,
    },
    #[error("corpus `{corpus}` line {line}: {message}")]
    Directive { corpus: String, line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldenQuestion {
    #[serde(skip)]
    pub statement: Literal,
    pub formal: String,
    pub english: String,
    pub answer: bool,
    /// False for the extra questions added alongside the printed ones.
    pub printed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusCase {
    pub corpus: String,
    pub label: String,
    #[serde(skip)]
    pub theory: Theory,
    pub formal: String,
    /// English wording per sentence index.
    pub english: Vec<String>,
    pub questions: Vec<GoldenQuestion>,
}

impl CorpusCase {
    pub fn context(&self) -> String {
        self.english.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioFact {
    #[serde(skip)]
    pub fact: Literal,
    pub formal: String,
    pub english: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioLine {
    /// Included independently with probability `p`.
    Optional { fact: ScenarioFact, p: f64 },
    /// Exactly one alternative, drawn by weight.
    ChooseOne { options: Vec<(ScenarioFact, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub lines: Vec<ScenarioLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corpus {
    pub name: String,
    pub description: String,
    pub cases: Vec<CorpusCase>,
    pub scenario: Option<ScenarioSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub has_scenarios: bool,
}

pub fn corpus_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.0).collect()
}

pub fn list_corpora() -> Vec<CorpusInfo> {
    FIXTURES
        .iter()
        .map(|&(name, description, _, scenario)| CorpusInfo { name, description, has_scenarios: scenario.is_some() })
        .collect()
}

pub fn load_corpus(name: &str) -> Result<Corpus, CorpusError> {
    let &(name, description, text, scenario) =
        FIXTURES.iter().find(|f| f.0 == name).ok_or_else(|| CorpusError::UnknownCorpus(name.to_string()))?;
    let cases = parse_cases(name, text)?;
    let scenario = scenario.map(|s| parse_scenario(name, s)).transpose()?;
    Ok(Corpus { name: name.to_string(), description: description.to_string(), cases, scenario })
}

fn directive_error(corpus: &str, line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Directive { corpus: corpus.to_string(), line, message: message.into() }
}

fn syntax_error(corpus: &str) -> impl Fn(SyntaxError) -> CorpusError + '_ {
    move |source| CorpusError::Syntax { corpus: corpus.to_string(), source }
}

fn parse_question(corpus: &str, line: usize, body: &str, printed: bool) -> Result<GoldenQuestion, CorpusError> {
    let (formal, english) = body.split_once('|').ok_or_else(|| directive_error(corpus, line, "missing `| English`"))?;
    let (fact, answer) =
        formal.rsplit_once('=').ok_or_else(|| directive_error(corpus, line, "missing `= true|false`"))?;
    let answer = match answer.trim() {
        "true" => true,
        "false" => false,
        other => return Err(directive_error(corpus, line, format!("answer `{other}` is not true or false"))),
    };
    let statement = parse_literal(fact.trim()).map_err(syntax_error(corpus))?;
    Ok(GoldenQuestion {
        formal: emit_literal(&statement),
        statement,
        english: english.trim().to_string(),
        answer,
        printed,
    })
}

fn finish_case(
    corpus: &str,
    label: String,
    body: &str,
    questions: Vec<GoldenQuestion>,
) -> Result<CorpusCase, CorpusError> {
    let (theory, notes) = parse_theory_annotated(body).map_err(syntax_error(corpus))?;
    let english = notes.iter().map(|n| n.comments.join(" ")).collect();
    Ok(CorpusCase { corpus: corpus.to_string(), label, formal: emit_theory(&theory), theory, english, questions })
}

fn parse_cases(corpus: &str, text: &str) -> Result<Vec<CorpusCase>, CorpusError> {
    let mut cases = Vec::new();
    let mut current: Option<(String, String, Vec<GoldenQuestion>)> = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim_start();
        if let Some(label) = trimmed.strip_prefix("//! case") {
            if let Some((l, body, qs)) = current.take() {
                cases.push(finish_case(corpus, l, &body, qs)?);
            }
            current = Some((label.trim().to_string(), String::new(), Vec::new()));
            continue;
        }
        let Some((_, body, questions)) = current.as_mut() else {
            if trimmed.is_empty() {
                continue;
            }
            return Err(directive_error(corpus, lineno, "text before the first `//! case`"));
        };
        if let Some(q) = trimmed.strip_prefix("//?") {
            questions.push(parse_question(corpus, lineno, q, true)?);
        } else if let Some(q) = trimmed.strip_prefix("//+") {
            questions.push(parse_question(corpus, lineno, q, false)?);
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    if let Some((l, body, qs)) = current {
        cases.push(finish_case(corpus, l, &body, qs)?);
    }
    Ok(cases)
}

/// `<fact> [w=<weight>] [=> English]`, returning the weight if given.
fn parse_scenario_fact(corpus: &str, line: usize, text: &str) -> Result<(ScenarioFact, Option<f64>), CorpusError> {
    let (head, english) = match text.split_once("=>") {
        Some((h, e)) => (h.trim(), Some(e.trim().to_string())),
        None => (text.trim(), None),
    };
    let close = head.rfind(')').ok_or_else(|| directive_error(corpus, line, "expected a fact"))?;
    let fact = parse_literal(&head[..=close]).map_err(syntax_error(corpus))?;
    let rest = head[close + 1..].trim();
    let weight = if rest.is_empty() {
        None
    } else {
        let w = rest.strip_prefix("w=").ok_or_else(|| directive_error(corpus, line, format!("unexpected `{rest}`")))?;
        Some(parse_number(corpus, line, w)?)
    };
    let english = english.unwrap_or_else(|| crate::render::render_fact(&fact));
    Ok((ScenarioFact { formal: emit_literal(&fact), fact, english }, weight))
}

fn parse_number(corpus: &str, line: usize, text: &str) -> Result<f64, CorpusError> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite() && *x >= 0.0)
        .ok_or_else(|| directive_error(corpus, line, format!("`{text}` is not a non-negative number")))
}

fn parse_scenario(corpus: &str, text: &str) -> Result<ScenarioSpec, CorpusError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("choose1:") {
            let mut options = Vec::new();
            for alt in rest.split('|') {
                let (fact, w) = parse_scenario_fact(corpus, lineno, alt)?;
                options.push((fact, w.unwrap_or(1.0)));
            }
            if options.iter().map(|o| o.1).sum::<f64>() <= 0.0 {
                return Err(directive_error(corpus, lineno, "weights sum to zero"));
            }
            lines.push(ScenarioLine::ChooseOne { options });
        } else {
            let (fact_part, rest) =
                line.split_once('|').ok_or_else(|| directive_error(corpus, lineno, "expected `<fact> | p=<p>`"))?;
            let (p_part, english) = match rest.split_once("=>") {
                Some((p, e)) => (p, format!("=> {e}")),
                None => (rest, String::new()),
            };
            let p = p_part
                .trim()
                .strip_prefix("p=")
                .ok_or_else(|| directive_error(corpus, lineno, "expected `p=<probability>`"))?;
            let p = parse_number(corpus, lineno, p)?;
            if p > 1.0 {
                return Err(directive_error(corpus, lineno, "probability above 1"));
            }
            let (fact, _) = parse_scenario_fact(corpus, lineno, &format!("{fact_part} {english}"))?;
            lines.push(ScenarioLine::Optional { fact, p });
        }
    }
    Ok(ScenarioSpec { lines })
}

/// Sampled facts in line order: each optional fact independently, then one
/// alternative per choice line.
pub fn sample_scenario_facts<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Vec<ScenarioFact> {
    let mut out = Vec::new();
    for line in &spec.lines {
        match line {
            ScenarioLine::Optional { fact, p } => {
                if rng.gen_bool(*p) {
                    out.push(fact.clone());
                }
            }
            ScenarioLine::ChooseOne { options } => {
                let dist = WeightedIndex::new(options.iter().map(|o| o.1)).expect("weights validated at load");
                out.push(options[dist.sample(rng)].0.clone());
            }
        }
    }
    out
}

/// Theories made of sampled scenario facts followed by the rules of the
/// corpus's first case. Empty when the corpus has no scenario sidecar.
pub fn generate_scenarios<R: Rng + ?Sized>(corpus: &Corpus, count: usize, rng: &mut R) -> Vec<Theory> {
    let (Some(spec), Some(base)) = (&corpus.scenario, corpus.cases.first()) else {
        return Vec::new();
    };
    (0..count)
        .map(|_| {
            let facts: Vec<Literal> = sample_scenario_facts(spec, rng).into_iter().map(|f| f.fact).collect();
            Theory::new(facts, base.theory.rules.clone())
        })
        .collect()
}

/// Golden questions whose engine answer differs from the fixture, as
/// `(case label, question, engine answer)`.
pub fn check_golden(corpus: &Corpus) -> Vec<(String, String, Option<bool>)> {
    let mut out = Vec::new();
    for case in &corpus.cases {
        let model = forward_chain(&case.theory);
        for q in &case.questions {
            let got = model.answer(&q.statement).ok();
            if got != Some(q.answer) {
                out.push((case.label.clone(), q.english.clone(), got));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Status;
    use crate::generator::theory_rng;

    #[test]
    fn every_fixture_loads_and_answers_hold() {
        for name in corpus_names() {
            let c = load_corpus(name).unwrap();
            assert!(!c.cases.is_empty(), "{name}");
            assert_eq!(check_golden(&c), Vec::new(), "{name}");
            for case in &c.cases {
                assert_eq!(case.english.len(), case.theory.len());
                assert!(case.english.iter().all(|e| !e.is_empty()), "{name}/{}", case.label);
            }
        }
    }

    #[test]
    fn unknown_corpus() {
        assert_eq!(load_corpus("nope").unwrap_err(), CorpusError::UnknownCorpus("nope".into()));
    }

    #[test]
    fn birds_wordings_share_logic() {
        let b1 = load_corpus("birds1").unwrap();
        let b2 = load_corpus("birds2").unwrap();
        let swap = b1.cases[0].formal.replace("\"flying\"", "\"can_fly\"");
        assert_eq!(swap, b2.cases[0].formal);
        assert_ne!(b1.cases[0].english, b2.cases[0].english);
    }

    #[test]
    fn electricity_rule_counts() {
        let counts: Vec<usize> =
            (1..=4).map(|i| load_corpus(&format!("electricity{i}")).unwrap().cases[0].theory.rules.len()).collect();
        assert_eq!(counts, [5, 6, 11, 12]);
    }

    #[test]
    fn one_appliance_per_scenario() {
        let c = load_corpus("electricity1").unwrap();
        let mut rng = theory_rng(1, 0);
        for t in generate_scenarios(&c, 200, &mut rng) {
            let appliances =
                t.facts.iter().filter(|f| ["light bulb", "bell", "radio"].contains(&f.atom.object.as_str()));
            assert_eq!(appliances.count(), 1);
            assert_eq!(forward_chain(&t).status(), Status::Consistent);
        }
    }

    #[test]
    fn no_scenarios_without_sidecar() {
        let c = load_corpus("birds1").unwrap();
        assert!(generate_scenarios(&c, 5, &mut theory_rng(0, 0)).is_empty());
    }
}
