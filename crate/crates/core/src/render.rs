//! Template-based English for facts, rules, theories and questions.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Atom, Literal, Predicate, Rule, Sentence, Term, Theory, TheoryType, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleTemplate {
    /// "If someone is big then they are rough."
    IfThen,
    /// "All big people are rough."
    AllPeopleThings,
    /// "Big people are rough."
    BarePlural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderStyle {
    pub template: RuleTemplate,
    /// Refer back to the variable with "they"/"it" rather than "that
    /// person"/"that thing".
    pub pronouns: bool,
}

impl RenderStyle {
    pub fn new(template: RuleTemplate) -> RenderStyle {
        RenderStyle { template, pronouns: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("template {0:?} only applies to rules over attributes of a variable")]
    StyleNotApplicable(RuleTemplate),
}

/// Present-tense third-person forms of the relation verbs the generator
/// uses: (singular, plural/base).
const VERBS: [(&str, &str); 6] =
    [("likes", "like"), ("chases", "chase"), ("eats", "eat"), ("sees", "see"), ("visits", "visit"), ("needs", "need")];

/// Base form of a third-person verb phrase; only the first word inflects.
pub fn base_form(relation: &str) -> String {
    let (head, rest) = match relation.split_once(' ') {
        Some((h, r)) => (h, Some(r)),
        None => (relation, None),
    };
    let base = if let Some(&(_, b)) = VERBS.iter().find(|(s, _)| *s == head) {
        b.to_string()
    } else if head == "has" {
        "have".to_string()
    } else if head == "does" {
        "do".to_string()
    } else if ["ches", "shes", "sses", "xes", "zes", "oes"].iter().any(|e| head.ends_with(e)) {
        head[..head.len() - 2].to_string()
    } else if let Some(stem) = head.strip_suffix("ies") {
        format!("{stem}y")
    } else if head.len() > 2 && head.ends_with('s') && !head.ends_with("ss") {
        head[..head.len() - 1].to_string()
    } else {
        head.to_string()
    };
    match rest {
        Some(r) => format!("{base} {r}"),
        None => base,
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

/// "Bob" stays bare; lower-case entity names take a definite article.
pub fn entity_phrase(name: &str) -> String {
    if name.chars().next().is_some_and(char::is_uppercase) {
        name.to_string()
    } else {
        format!("the {name}")
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Number {
    Singular,
    Plural,
}

/// Predicate phrase after the subject: "is big", "are not big",
/// "does not eat the dog", "like the cat".
fn predicate_phrase(atom: &Atom, positive: bool, number: Number) -> String {
    let object = match &atom.predicate {
        Predicate::Is => atom.object.clone(),
        Predicate::Relation(_) => entity_phrase(&atom.object),
    };
    match (&atom.predicate, positive, number) {
        (Predicate::Is, true, Number::Singular) => format!("is {object}"),
        (Predicate::Is, false, Number::Singular) => format!("is not {object}"),
        (Predicate::Is, true, Number::Plural) => format!("are {object}"),
        (Predicate::Is, false, Number::Plural) => format!("are not {object}"),
        (Predicate::Relation(r), true, Number::Singular) => format!("{r} {object}"),
        (Predicate::Relation(r), true, Number::Plural) => format!("{} {object}", base_form(r)),
        (Predicate::Relation(r), false, Number::Singular) => format!("does not {} {object}", base_form(r)),
        (Predicate::Relation(r), false, Number::Plural) => format!("do not {} {object}", base_form(r)),
    }
}

/// A ground literal as a declarative sentence without the final period.
pub fn render_statement(l: &Literal) -> String {
    let subject = match &l.atom.subject {
        Term::Name(n) => entity_phrase(n),
        Term::Var(v) => first_mention(*v).to_string(),
    };
    capitalize(&format!("{subject} {}", predicate_phrase(&l.atom, l.is_positive(), Number::Singular)))
}

pub fn render_fact(l: &Literal) -> String {
    format!("{}.", render_statement(l))
}

fn first_mention(v: Variable) -> &'static str {
    match v {
        Variable::Someone => "someone",
        Variable::Something | Variable::Thing => "something",
    }
}

fn later_mention(v: Variable, pronouns: bool) -> (&'static str, Number) {
    match (v, pronouns) {
        (Variable::Someone, true) => ("they", Number::Plural),
        (Variable::Someone, false) => ("that person", Number::Singular),
        (_, true) => ("it", Number::Singular),
        (_, false) => ("that thing", Number::Singular),
    }
}

/// Whether the attribute-only templates apply: every literal is an `is`
/// atom about the rule's variable and every condition is positive.
pub fn attribute_only(rule: &Rule) -> bool {
    rule.variable().is_some()
        && rule.literals().all(|l| l.atom.predicate == Predicate::Is && l.atom.subject.is_var())
        && rule.conditions.iter().all(Literal::is_positive)
}

pub fn applicable_templates(rule: &Rule) -> Vec<RuleTemplate> {
    if attribute_only(rule) {
        vec![RuleTemplate::IfThen, RuleTemplate::AllPeopleThings, RuleTemplate::BarePlural]
    } else {
        vec![RuleTemplate::IfThen]
    }
}

pub fn render_rule(rule: &Rule, style: RenderStyle, theory_type: TheoryType) -> Result<String, RenderError> {
    match style.template {
        RuleTemplate::IfThen => Ok(render_if_then(rule, style.pronouns)),
        t if !attribute_only(rule) => Err(RenderError::StyleNotApplicable(t)),
        t => {
            let kind = match theory_type {
                TheoryType::Type1Att => "people",
                TheoryType::Type2Rel => "things",
            };
            let attrs: Vec<&str> = rule.conditions.iter().map(|c| c.atom.object.as_str()).collect();
            let conclusion = if rule.conclusion.is_positive() {
                format!("are {}", rule.conclusion.atom.object)
            } else {
                format!("are not {}", rule.conclusion.atom.object)
            };
            let phrase = format!("{} {kind} {conclusion}.", attrs.join(", "));
            Ok(match t {
                RuleTemplate::AllPeopleThings => format!("All {phrase}"),
                _ => capitalize(&phrase),
            })
        }
    }
}

fn render_if_then(rule: &Rule, pronouns: bool) -> String {
    let mut introduced = false;
    let mut subject_text = |t: &Term| -> (String, Number) {
        match t {
            Term::Name(n) => (entity_phrase(n), Number::Singular),
            Term::Var(v) if !introduced => {
                introduced = true;
                (first_mention(*v).to_string(), Number::Singular)
            }
            Term::Var(v) => {
                let (w, n) = later_mention(*v, pronouns);
                (w.to_string(), n)
            }
        }
    };

    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    let conds = &rule.conditions;
    while i < conds.len() {
        let c = &conds[i];
        let (subject, number) = subject_text(&c.atom.subject);
        let mut phrase = format!("{subject} {}", predicate_phrase(&c.atom, c.is_positive(), number));
        // "is young and round": fold following `is` conditions on the same subject
        let mut j = i + 1;
        if c.atom.predicate == Predicate::Is && c.is_positive() {
            while j < conds.len() && conds[j].atom.predicate == Predicate::Is && conds[j].atom.subject == c.atom.subject
            {
                let n = &conds[j];
                if n.is_positive() {
                    phrase.push_str(&format!(" and {}", n.atom.object));
                } else {
                    phrase.push_str(&format!(" and not {}", n.atom.object));
                }
                j += 1;
            }
        }
        parts.push(phrase);
        i = j;
    }
    let (subject, number) = subject_text(&rule.conclusion.atom.subject);
    let conclusion =
        format!("{subject} {}", predicate_phrase(&rule.conclusion.atom, rule.conclusion.is_positive(), number));
    format!("If {} then {conclusion}.", parts.join(" and "))
}

/// Uniform template choice over those applicable to the rule.
pub fn render_rule_random<R: Rng + ?Sized>(rule: &Rule, theory_type: TheoryType, rng: &mut R) -> String {
    let template = *applicable_templates(rule).choose(rng).expect("IfThen always applies");
    render_rule(rule, RenderStyle::new(template), theory_type).expect("template is applicable")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedTheory {
    /// All sentences joined by single spaces, facts first.
    pub context: String,
    /// English sentence per sentence index.
    pub sentences: Vec<String>,
    /// Context position -> sentence index.
    pub order: Vec<usize>,
}

pub fn render_theory<R: Rng + ?Sized>(theory: &Theory, rng: &mut R) -> RenderedTheory {
    let mut sentences = Vec::with_capacity(theory.len());
    for s in &theory.sentence_order {
        sentences.push(match *s {
            Sentence::Fact(f) => render_fact(&theory.facts[f]),
            Sentence::Rule(r) => render_rule_random(&theory.rules[r], theory.theory_type, rng),
        });
    }
    let mut order: Vec<usize> = (0..theory.len()).collect();
    order.sort_by_key(|&i| matches!(theory.sentence_order[i], Sentence::Rule(_)));
    let context = order.iter().map(|&i| sentences[i].as_str()).collect::<Vec<_>>().join(" ");
    RenderedTheory { context, sentences, order }
}

pub fn render_question(statement: &Literal) -> String {
    format!("{}. True/false?", render_statement(statement))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_literal, parse_theory};

    fn rule(text: &str) -> Rule {
        parse_theory(text).unwrap().rules.remove(0)
    }

    #[test]
    fn facts() {
        assert_eq!(render_fact(&parse_literal(r#"("Alan" "is" "blue" "+")"#).unwrap()), "Alan is blue.");
        assert_eq!(
            render_fact(&parse_literal(r#"("bald eagle" "eats" "dog" "-")"#).unwrap()),
            "The bald eagle does not eat the dog."
        );
        assert_eq!(render_fact(&parse_literal(r#"("Bob" "is" "green" "-")"#).unwrap()), "Bob is not green.");
        assert_eq!(render_fact(&parse_literal(r#"("cat" "chases" "dog" "+")"#).unwrap()), "The cat chases the dog.");
    }

    #[test]
    fn attribute_templates() {
        let big = rule(r#"((("someone" "is" "big" "+")) -> ("someone" "is" "rough" "+"))"#);
        let s = |t| render_rule(&big, RenderStyle::new(t), TheoryType::Type1Att).unwrap();
        assert_eq!(s(RuleTemplate::BarePlural), "Big people are rough.");
        assert_eq!(s(RuleTemplate::AllPeopleThings), "All big people are rough.");
        assert_eq!(s(RuleTemplate::IfThen), "If someone is big then they are rough.");
        let two =
            rule(r#"((("someone" "is" "nice" "+") ("someone" "is" "smart" "+")) -> ("someone" "is" "rough" "+"))"#);
        assert_eq!(
            render_rule(&two, RenderStyle::new(RuleTemplate::BarePlural), TheoryType::Type1Att).unwrap(),
            "Nice, smart people are rough."
        );
        assert_eq!(
            render_rule(&two, RenderStyle::new(RuleTemplate::IfThen), TheoryType::Type1Att).unwrap(),
            "If someone is nice and smart then they are rough."
        );
    }

    #[test]
    fn if_then_with_relations_and_pronouns() {
        let r =
            rule(r#"((("something" "loves" "cat" "+") ("cat" "is" "happy" "-")) -> ("something" "loves" "dog" "+"))"#);
        assert_eq!(
            render_rule(&r, RenderStyle::new(RuleTemplate::IfThen), TheoryType::Type2Rel).unwrap(),
            "If something loves the cat and the cat is not happy then it loves the dog."
        );
        assert_eq!(
            render_rule(&r, RenderStyle::new(RuleTemplate::BarePlural), TheoryType::Type2Rel),
            Err(RenderError::StyleNotApplicable(RuleTemplate::BarePlural))
        );
        let r = rule(
            r#"((("someone" "eats" "bald eagle" "+") ("someone" "eats" "rabbit" "-")) -> ("someone" "is" "furry" "+"))"#,
        );
        assert_eq!(
            render_if_then(&r, true),
            "If someone eats the bald eagle and they do not eat the rabbit then they are furry."
        );
        let g = rule(r#"((("Bob" "is" "green" "-")) -> ("Bob" "is" "nice" "+"))"#);
        assert_eq!(render_if_then(&g, true), "If Bob is not green then Bob is nice.");
        let q = rule(r#"((("someone" "is" "quiet" "+") ("someone" "is" "round" "+")) -> ("someone" "is" "big" "-"))"#);
        assert_eq!(render_if_then(&q, true), "If someone is quiet and round then they are not big.");
        assert_eq!(render_if_then(&q, false), "If someone is quiet and round then that person is not big.");
    }

    #[test]
    fn questions() {
        let l = parse_literal(r#"("Dave" "is" "blue" "-")"#).unwrap();
        assert_eq!(render_question(&l), "Dave is not blue. True/false?");
        let l = parse_literal(r#"("rabbit" "likes" "cat" "+")"#).unwrap();
        assert_eq!(render_question(&l), "The rabbit likes the cat. True/false?");
    }

    #[test]
    fn verb_bases() {
        assert_eq!(base_form("chases"), "chase");
        assert_eq!(base_form("has"), "have");
        assert_eq!(base_form("runs through"), "run through");
        assert_eq!(base_form("carries"), "carry");
    }
}
