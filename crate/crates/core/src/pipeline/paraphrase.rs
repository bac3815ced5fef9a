//! Assembly of theories from paraphrased fact-group templates and rules.

use std::collections::BTreeSet;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{PipelineError, SplitRatios};
use crate::engine::{forward_chain, Model};
use crate::generator::{theory_rng, TYPE1_ATTRIBUTES, TYPE1_NAMES};
use crate::logic::{Atom, Literal, Predicate, Rule, Term, Theory};
use crate::questions::{generate_questions, QuestionOptions};
use crate::record::{Record, Split};
use crate::render::render_question;
use crate::syntax::{emit_literal, emit_theory, parse_theory};

const SAMPLE_BANK: &str = include_str!("../../data/paraphrase_bank.json");
const PLACEHOLDER: &str = "{name}";

/// Free text about one person, with `{name}` in place of the name, and the
/// attributes it asserts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactGroupTemplate {
    pub text: String,
    pub attributes: Vec<String>,
}

/// Free text for a rule and its formal statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleParaphrase {
    pub text: String,
    pub formal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParaphraseBank {
    pub fact_groups: Vec<FactGroupTemplate>,
    pub rules: Vec<RuleParaphrase>,
}

fn mentioned_attributes(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !c.is_alphabetic())
        .map(str::to_lowercase)
        .filter(|w| TYPE1_ATTRIBUTES.contains(&w.as_str()))
        .collect()
}

fn check_mentions(text: &str, expected: &BTreeSet<String>) -> Result<(), PipelineError> {
    let found = mentioned_attributes(text);
    if &found != expected {
        return Err(PipelineError::Bank(format!("`{text}` mentions {found:?} but its logic uses {expected:?}")));
    }
    Ok(())
}

impl ParaphraseBank {
    /// The small hand-written bank shipped with the crate.
    pub fn sample() -> ParaphraseBank {
        ParaphraseBank::from_json(SAMPLE_BANK).expect("bundled bank is valid")
    }

    pub fn from_json(text: &str) -> Result<ParaphraseBank, PipelineError> {
        let bank: ParaphraseBank = serde_json::from_str(text).map_err(|e| PipelineError::Bank(e.to_string()))?;
        bank.validate()?;
        Ok(bank)
    }

    /// Every template names exactly the attributes of its logic, and rules
    /// are single positive attribute rules over one person.
    pub fn validate(&self) -> Result<(), PipelineError> {
        for t in &self.fact_groups {
            if !t.text.contains(PLACEHOLDER) {
                return Err(PipelineError::Bank(format!("`{}` has no {PLACEHOLDER} placeholder", t.text)));
            }
            if t.attributes.is_empty() {
                return Err(PipelineError::Bank(format!("`{}` asserts no attributes", t.text)));
            }
            check_mentions(&t.text.replace(PLACEHOLDER, ""), &t.attributes.iter().cloned().collect())?;
        }
        for r in &self.rules {
            let rule = parse_rule(r)?;
            let attrs: BTreeSet<String> = rule.literals().map(|l| l.atom.object.clone()).collect();
            check_mentions(&r.text, &attrs)?;
        }
        Ok(())
    }
}

fn parse_rule(r: &RuleParaphrase) -> Result<Rule, PipelineError> {
    let t = parse_theory(&r.formal).map_err(|e| PipelineError::Bank(format!("`{}`: {e}", r.formal)))?;
    if !t.facts.is_empty() || t.rules.len() != 1 {
        return Err(PipelineError::Bank(format!("`{}` is not a single rule", r.formal)));
    }
    let rule = t.rules.into_iter().next().expect("one rule");
    let ok = rule.literals().all(|l| l.is_positive() && l.atom.predicate == Predicate::Is && l.atom.subject.is_var());
    if !ok {
        return Err(PipelineError::Bank(format!(
            "`{}` must use only positive `is` conditions on a variable",
            r.formal
        )));
    }
    Ok(rule)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParaphraseConfig {
    pub theories: usize,
    pub seed: u64,
    pub split: SplitRatios,
    pub min_depth: u32,
    pub max_attempts: usize,
}

impl Default for ParaphraseConfig {
    fn default() -> ParaphraseConfig {
        ParaphraseConfig { theories: 200, seed: 0, split: SplitRatios::default(), min_depth: 3, max_attempts: 10_000 }
    }
}

struct Assembled {
    theory: Theory,
    model: Model,
    context: String,
}

fn assemble_one<R: Rng + ?Sized>(
    templates: &[&FactGroupTemplate],
    rules: &[(Rule, String)],
    cfg: &ParaphraseConfig,
    rng: &mut R,
) -> Option<Assembled> {
    for _ in 0..cfg.max_attempts {
        let n_names = rng.gen_range(2..=4);
        let mut names: Vec<usize> = index::sample(rng, TYPE1_NAMES.len(), n_names).into_vec();
        names.sort_unstable();
        let mut facts: Vec<Literal> = Vec::new();
        let mut sentences: Vec<String> = Vec::new();
        for &n in &names {
            let name = TYPE1_NAMES[n];
            let k = rng.gen_range(1..=2.min(templates.len()));
            for i in index::sample(rng, templates.len(), k) {
                let t = templates[i];
                sentences.push(t.text.replace(PLACEHOLDER, name));
                for a in &t.attributes {
                    let f = Atom::is(Term::name(name), a.clone()).positive();
                    if !facts.contains(&f) {
                        facts.push(f);
                    }
                }
            }
        }
        let n_rules = rng.gen_range(4.min(rules.len())..=8.min(rules.len()));
        let mut chosen: Vec<usize> = index::sample(rng, rules.len(), n_rules).into_vec();
        chosen.sort_unstable();
        let mut theory_rules = Vec::new();
        for (k, &i) in chosen.iter().enumerate() {
            let mut r = rules[i].0.clone();
            r.id = format!("rule{}", k + 1);
            theory_rules.push(r);
            sentences.push(rules[i].1.clone());
        }
        let theory = Theory::new(facts, theory_rules);
        let model = forward_chain(&theory);
        if !model.is_consistent() || model.proof_cap_hit() || model.max_depth().unwrap_or(0) < cfg.min_depth {
            continue;
        }
        return Some(Assembled { theory, model, context: sentences.join(" ") });
    }
    None
}

/// Builds paraphrased records. Fact-group templates are partitioned across
/// splits so no template is shared; rules are drawn from the whole bank.
pub fn assemble_paraphrased(bank: &ParaphraseBank, cfg: &ParaphraseConfig) -> Result<Vec<Record>, PipelineError> {
    bank.validate()?;
    let rules: Vec<(Rule, String)> =
        bank.rules.iter().map(|r| parse_rule(r).map(|rule| (rule, r.text.clone()))).collect::<Result<_, _>>()?;
    if rules.is_empty() {
        return Err(PipelineError::BankTooSmall("no rules".into()));
    }
    let (t_train, t_dev, t_test) = cfg.split.counts(cfg.theories);
    let mut order: Vec<usize> = (0..bank.fact_groups.len()).collect();
    order.shuffle(&mut theory_rng(cfg.seed, u64::MAX));
    let (p_train, p_dev, _) = cfg.split.counts(order.len());
    let parts = [
        (Split::Train, t_train, &order[..p_train]),
        (Split::Dev, t_dev, &order[p_train..p_train + p_dev]),
        (Split::Test, t_test, &order[p_train + p_dev..]),
    ];

    let mut records = Vec::new();
    let mut theory_index = 0usize;
    for (split, count, part) in parts {
        if count == 0 {
            continue;
        }
        if part.is_empty() {
            return Err(PipelineError::BankTooSmall(format!(
                "{} fact-group templates leave none for the {split} split",
                bank.fact_groups.len()
            )));
        }
        let templates: Vec<&FactGroupTemplate> = part.iter().map(|&i| &bank.fact_groups[i]).collect();
        for _ in 0..count {
            let mut rng = theory_rng(cfg.seed, theory_index as u64);
            let a = assemble_one(&templates, &rules, cfg, &mut rng).ok_or_else(|| {
                PipelineError::BankTooSmall(format!(
                    "no theory of depth {} after {} attempts for the {split} split",
                    cfg.min_depth, cfg.max_attempts
                ))
            })?;
            let formal = emit_theory(&a.theory);
            let questions =
                generate_questions(&a.theory, &a.model, cfg.min_depth, QuestionOptions::default(), &mut rng);
            for (n, q) in questions.iter().enumerate() {
                let proofs = super::record_proofs(&a.model, q);
                records.push(Record {
                    id: format!("para-{theory_index}-q{n}"),
                    theory_formal: formal.clone(),
                    context: a.context.clone(),
                    question: render_question(&q.statement),
                    statement_formal: emit_literal(&q.statement),
                    answer: q.answer,
                    depth: q.depth,
                    provenance: q.provenance,
                    proofs,
                    split,
                });
            }
            theory_index += 1;
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_bank_is_valid() {
        let bank = ParaphraseBank::sample();
        assert!(bank.fact_groups.len() >= 20);
        assert!(bank.rules.len() >= 20);
    }

    #[test]
    fn mismatched_template_is_rejected() {
        let bank = ParaphraseBank {
            fact_groups: vec![FactGroupTemplate {
                text: "{name} is big and red.".into(),
                attributes: vec!["big".into()],
            }],
            rules: Vec::new(),
        };
        assert!(matches!(bank.validate(), Err(PipelineError::Bank(_))));
    }

    #[test]
    fn tiny_bank_is_too_small() {
        let mut bank = ParaphraseBank::sample();
        bank.fact_groups.truncate(2);
        let err = assemble_paraphrased(&bank, &ParaphraseConfig { theories: 10, ..Default::default() }).unwrap_err();
        assert!(matches!(err, PipelineError::BankTooSmall(_)));
    }
}
