//! Rule-language data model: terms, atoms, literals, rules and theories,
//! plus the substitution and grounding primitives every other module uses.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One of the three interchangeable variable spellings a rule may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variable {
    Something,
    Someone,
    Thing,
}

impl Variable {
    pub const ALL: [Variable; 3] = [Variable::Something, Variable::Someone, Variable::Thing];

    pub fn as_str(self) -> &'static str {
        match self {
            Variable::Something => "something",
            Variable::Someone => "someone",
            Variable::Thing => "thing",
        }
    }

    pub fn from_word(word: &str) -> Option<Variable> {
        match word {
            "something" => Some(Variable::Something),
            "someone" => Some(Variable::Someone),
            "thing" => Some(Variable::Thing),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Name(String),
    Var(Variable),
}

impl Term {
    pub fn name(s: impl Into<String>) -> Term {
        Term::Name(s.into())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_name(&self) -> Option<&str> {
        match self {
            Term::Name(n) => Some(n),
            Term::Var(_) => None,
        }
    }

    pub fn text(&self) -> &str {
        match self {
            Term::Name(n) => n,
            Term::Var(v) => v.as_str(),
        }
    }
}

/// `is` assigns an attribute; anything else is a binary relation between entities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Predicate {
    Is,
    Relation(String),
}

impl Predicate {
    pub fn text(&self) -> &str {
        match self {
            Predicate::Is => "is",
            Predicate::Relation(r) => r,
        }
    }

    pub fn is_relation(&self) -> bool {
        matches!(self, Predicate::Relation(_))
    }
}

/// `subject predicate object`. The object is an attribute for `is` and an
/// entity name for relations; it is never a variable in a well-formed theory.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub subject: Term,
    pub predicate: Predicate,
    pub object: String,
}

impl Atom {
    pub fn is(subject: Term, attribute: impl Into<String>) -> Atom {
        Atom { subject, predicate: Predicate::Is, object: attribute.into() }
    }

    pub fn relation(subject: Term, relation: impl Into<String>, object: impl Into<String>) -> Atom {
        Atom { subject, predicate: Predicate::Relation(relation.into()), object: object.into() }
    }

    pub fn is_ground(&self) -> bool {
        !self.subject.is_var()
    }

    pub fn variable(&self) -> Option<Variable> {
        match self.subject {
            Term::Var(v) => Some(v),
            Term::Name(_) => None,
        }
    }

    pub fn positive(self) -> Literal {
        Literal { atom: self, polarity: Polarity::Positive }
    }

    pub fn negative(self) -> Literal {
        Literal { atom: self, polarity: Polarity::Negative }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn symbol(self) -> &'static str {
        match self {
            Polarity::Positive => "+",
            Polarity::Negative => "-",
        }
    }

    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub polarity: Polarity,
}

impl Literal {
    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }

    pub fn is_ground(&self) -> bool {
        self.atom.is_ground()
    }

    pub fn negated(&self) -> Literal {
        Literal { atom: self.atom.clone(), polarity: self.polarity.flip() }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::emit_literal(self))
    }
}

/// `conditions -> conclusion`, implicitly universally quantified over its
/// (single) variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub id: String,
    pub conditions: Vec<Literal>,
    pub conclusion: Literal,
}

impl Rule {
    pub fn new(id: impl Into<String>, conditions: Vec<Literal>, conclusion: Literal) -> Rule {
        Rule { id: id.into(), conditions, conclusion }
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.conditions.iter().chain(std::iter::once(&self.conclusion))
    }

    /// The first variable mentioned, if any.
    pub fn variable(&self) -> Option<Variable> {
        self.literals().find_map(|l| l.atom.variable())
    }

    pub fn is_ground(&self) -> bool {
        self.literals().all(Literal::is_ground)
    }

    /// Logical content only; ids are ignored.
    pub fn same_logic(&self, other: &Rule) -> bool {
        self.conditions == other.conditions && self.conclusion == other.conclusion
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoryType {
    /// Attribute-only theories over people names.
    #[serde(alias = "Type1")]
    Type1Att,
    /// Attributes and relations over animal names.
    #[serde(alias = "Type2")]
    Type2Rel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sentence {
    Fact(usize),
    Rule(usize),
}

/// The names, attributes and relations a theory actually mentions, in order
/// of first appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub names: Vec<String>,
    pub attributes: Vec<String>,
    pub relations: Vec<String>,
}

impl Signature {
    fn push_unique(list: &mut Vec<String>, seen: &mut HashSet<String>, s: &str) {
        if seen.insert(s.to_string()) {
            list.push(s.to_string());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub facts: Vec<Literal>,
    pub rules: Vec<Rule>,
    pub theory_type: TheoryType,
    pub negation: bool,
    /// Sentence index -> fact or rule. Perturbation probes address
    /// sentences by this index.
    pub sentence_order: Vec<Sentence>,
}

impl Theory {
    /// Facts first, then rules, in the given order. Type and negation flag
    /// are inferred from the content.
    pub fn new(facts: Vec<Literal>, rules: Vec<Rule>) -> Theory {
        let order = (0..facts.len()).map(Sentence::Fact).chain((0..rules.len()).map(Sentence::Rule)).collect();
        Theory::with_order(facts, rules, order)
    }

    pub fn with_order(facts: Vec<Literal>, rules: Vec<Rule>, sentence_order: Vec<Sentence>) -> Theory {
        let theory_type = infer_type(&facts, &rules);
        let negation = facts.iter().chain(rules.iter().flat_map(|r| r.literals())).any(|l| !l.is_positive());
        Theory { facts, rules, theory_type, negation, sentence_order }
    }

    pub fn empty() -> Theory {
        Theory::new(Vec::new(), Vec::new())
    }

    pub fn len(&self) -> usize {
        self.sentence_order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentence_order.is_empty()
    }

    pub fn sentence(&self, index: usize) -> Option<Sentence> {
        self.sentence_order.get(index).copied()
    }

    pub fn fact_sentence(&self, fact: usize) -> usize {
        self.sentence_order.iter().position(|s| *s == Sentence::Fact(fact)).expect("fact missing from sentence order")
    }

    pub fn rule_sentence(&self, rule: usize) -> usize {
        self.sentence_order.iter().position(|s| *s == Sentence::Rule(rule)).expect("rule missing from sentence order")
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        let mut seen_n = HashSet::new();
        let mut seen_a = HashSet::new();
        let mut seen_r = HashSet::new();
        for s in &self.sentence_order {
            let lits: Vec<&Literal> = match *s {
                Sentence::Fact(i) => vec![&self.facts[i]],
                Sentence::Rule(i) => self.rules[i].literals().collect(),
            };
            for l in lits {
                if let Term::Name(n) = &l.atom.subject {
                    Signature::push_unique(&mut sig.names, &mut seen_n, n);
                }
                match &l.atom.predicate {
                    Predicate::Is => Signature::push_unique(&mut sig.attributes, &mut seen_a, &l.atom.object),
                    Predicate::Relation(r) => {
                        Signature::push_unique(&mut sig.relations, &mut seen_r, r);
                        Signature::push_unique(&mut sig.names, &mut seen_n, &l.atom.object);
                    }
                }
            }
        }
        sig
    }

    /// A copy with one sentence removed. Remaining sentences keep their
    /// relative order.
    pub fn without_sentence(&self, index: usize) -> Theory {
        let mut facts = Vec::new();
        let mut rules = Vec::new();
        let mut order = Vec::new();
        for (i, s) in self.sentence_order.iter().enumerate() {
            if i == index {
                continue;
            }
            match *s {
                Sentence::Fact(f) => {
                    order.push(Sentence::Fact(facts.len()));
                    facts.push(self.facts[f].clone());
                }
                Sentence::Rule(r) => {
                    order.push(Sentence::Rule(rules.len()));
                    rules.push(self.rules[r].clone());
                }
            }
        }
        Theory { facts, rules, theory_type: self.theory_type, negation: self.negation, sentence_order: order }
    }

    /// Same facts and rules (ids ignored) in the same sentence order.
    pub fn same_logic(&self, other: &Theory) -> bool {
        self.sentence_order.len() == other.sentence_order.len()
            && self.sentence_order.iter().zip(&other.sentence_order).all(|(a, b)| match (*a, *b) {
                (Sentence::Fact(x), Sentence::Fact(y)) => self.facts[x] == other.facts[y],
                (Sentence::Rule(x), Sentence::Rule(y)) => self.rules[x].same_logic(&other.rules[y]),
                _ => false,
            })
    }
}

fn infer_type(facts: &[Literal], rules: &[Rule]) -> TheoryType {
    let lits = facts.iter().chain(rules.iter().flat_map(|r| r.literals()));
    let mut relational = false;
    for l in lits {
        if l.atom.predicate.is_relation() {
            relational = true;
            break;
        }
        // animal names are lower case, people names capitalised
        if let Term::Name(n) = &l.atom.subject {
            if n.chars().next().is_some_and(char::is_lowercase) {
                relational = true;
                break;
            }
        }
    }
    if relational {
        TheoryType::Type2Rel
    } else {
        TheoryType::Type1Att
    }
}

/// At most one binding: the rule language is single-variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    pub binding: Option<(Variable, String)>,
}

impl Substitution {
    pub fn empty() -> Substitution {
        Substitution { binding: None }
    }

    pub fn bind(var: Variable, name: impl Into<String>) -> Substitution {
        Substitution { binding: Some((var, name.into())) }
    }

    pub fn value(&self) -> Option<&str> {
        self.binding.as_ref().map(|(_, n)| n.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("variable `{0}` is not bound by the substitution")]
    UnboundVariable(&'static str),
}

pub fn substitute(literal: &Literal, sub: &Substitution) -> Result<Literal, LogicError> {
    match &literal.atom.subject {
        Term::Name(_) => Ok(literal.clone()),
        Term::Var(v) => match &sub.binding {
            Some((bv, name)) if bv == v => {
                let mut out = literal.clone();
                out.atom.subject = Term::Name(name.clone());
                Ok(out)
            }
            _ => Err(LogicError::UnboundVariable(v.as_str())),
        },
    }
}

/// One ground instance per entity when the rule has a variable, otherwise the
/// rule itself. Output order follows `entities`.
pub fn ground_rule(rule: &Rule, entities: &[String]) -> Vec<Rule> {
    match rule.variable() {
        None => vec![rule.clone()],
        Some(var) => entities
            .iter()
            .map(|e| {
                let sub = Substitution::bind(var, e.clone());
                let ground = |l: &Literal| substitute(l, &sub).unwrap_or_else(|_| l.clone());
                Rule {
                    id: rule.id.clone(),
                    conditions: rule.conditions.iter().map(ground).collect(),
                    conclusion: ground(&rule.conclusion),
                }
            })
            .collect(),
    }
}

/// Most conditions a rule may carry. Generated rules use one or two;
/// hand-authored rulebases go up to three.
pub const MAX_RULE_CONDITIONS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    NonGroundFact,
    /// A variable in the second argument slot.
    VariableObject,
    /// More than one distinct variable in a rule.
    MultipleVariables,
    /// A variable first appearing after the first condition.
    UnintroducedVariable,
    NoConditions,
    TooManyConditions(usize),
    InvalidSymbol(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub sentence: usize,
    pub kind: ViolationKind,
}

fn symbol_ok(s: &str) -> bool {
    !s.is_empty() && !s.contains(['"', '\n', '\r', '(', ')']) && s.trim() == s
}

fn check_literal_symbols(l: &Literal, out: &mut Vec<ViolationKind>) {
    for s in [l.atom.subject.text(), l.atom.predicate.text(), l.atom.object.as_str()] {
        if !symbol_ok(s) {
            out.push(ViolationKind::InvalidSymbol(s.to_string()));
        }
    }
    if Variable::from_word(&l.atom.object).is_some() {
        out.push(ViolationKind::VariableObject);
    }
}

pub fn validate_theory(theory: &Theory) -> Vec<Violation> {
    let mut out = Vec::new();
    for (idx, s) in theory.sentence_order.iter().enumerate() {
        let mut kinds = Vec::new();
        match *s {
            Sentence::Fact(f) => {
                let fact = &theory.facts[f];
                if !fact.is_ground() {
                    kinds.push(ViolationKind::NonGroundFact);
                }
                check_literal_symbols(fact, &mut kinds);
            }
            Sentence::Rule(r) => {
                let rule = &theory.rules[r];
                if rule.conditions.is_empty() {
                    kinds.push(ViolationKind::NoConditions);
                }
                if rule.conditions.len() > MAX_RULE_CONDITIONS {
                    kinds.push(ViolationKind::TooManyConditions(rule.conditions.len()));
                }
                let vars: HashSet<Variable> = rule.literals().filter_map(|l| l.atom.variable()).collect();
                if vars.len() > 1 {
                    kinds.push(ViolationKind::MultipleVariables);
                }
                if let Some(v) = rule.variable() {
                    let introduced = rule.conditions.first().and_then(|c| c.atom.variable()) == Some(v);
                    if !introduced {
                        kinds.push(ViolationKind::UnintroducedVariable);
                    }
                }
                for l in rule.literals() {
                    check_literal_symbols(l, &mut kinds);
                }
            }
        }
        kinds.dedup();
        out.extend(kinds.into_iter().map(|kind| Violation { sentence: idx, kind }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is(s: &str, a: &str) -> Literal {
        Atom::is(Term::name(s), a).positive()
    }

    fn var_is(a: &str) -> Literal {
        Atom::is(Term::Var(Variable::Someone), a).positive()
    }

    #[test]
    fn substitute_binds_variable() {
        let l = var_is("kind");
        let out = substitute(&l, &Substitution::bind(Variable::Someone, "Alan")).unwrap();
        assert_eq!(out, is("Alan", "kind"));
    }

    #[test]
    fn substitute_ground_is_identity() {
        let l = is("Bob", "big");
        assert_eq!(substitute(&l, &Substitution::empty()).unwrap(), l);
    }

    #[test]
    fn substitute_relation_subject() {
        let l = Atom::relation(Term::Var(Variable::Something), "likes", "dog").positive();
        let out = substitute(&l, &Substitution::bind(Variable::Something, "cat")).unwrap();
        assert_eq!(out, Atom::relation(Term::name("cat"), "likes", "dog").positive());
    }

    #[test]
    fn substitute_unbound_errors() {
        let l = var_is("kind");
        assert_eq!(substitute(&l, &Substitution::empty()), Err(LogicError::UnboundVariable("someone")));
        assert!(substitute(&l, &Substitution::bind(Variable::Thing, "Bob")).is_err());
    }

    #[test]
    fn grounding_counts_and_order() {
        let rule = Rule::new("rule2", vec![var_is("young"), var_is("round")], var_is("kind"));
        let names: Vec<String> = ["Alan", "Bob", "Charlie", "Dave"].map(String::from).to_vec();
        let ground = ground_rule(&rule, &names);
        assert_eq!(ground.len(), 4);
        for (g, n) in ground.iter().zip(&names) {
            assert!(g.is_ground());
            assert_eq!(g.conclusion, is(n, "kind"));
        }
        let fixed = Rule::new("r", vec![is("Bob", "green")], is("Bob", "nice"));
        assert_eq!(ground_rule(&fixed, &names), vec![fixed.clone()]);
    }

    #[test]
    fn validation_flags_object_variable() {
        let bad = Rule::new(
            "r1",
            vec![Atom::relation(Term::Var(Variable::Someone), "likes", "someone").positive()],
            var_is("kind"),
        );
        let t = Theory::new(vec![is("Bob", "big")], vec![bad]);
        let v = validate_theory(&t);
        assert_eq!(v, vec![Violation { sentence: 1, kind: ViolationKind::VariableObject }]);
    }

    #[test]
    fn validation_flags_two_variables() {
        let bad = Rule::new("r1", vec![var_is("big")], Atom::is(Term::Var(Variable::Something), "kind").positive());
        let t = Theory::new(vec![], vec![bad]);
        let kinds: Vec<_> = validate_theory(&t).into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::MultipleVariables));
    }

    #[test]
    fn validation_flags_late_variable() {
        let bad = Rule::new("r1", vec![is("Bob", "big"), var_is("red")], var_is("kind"));
        let t = Theory::new(vec![], vec![bad]);
        let kinds: Vec<_> = validate_theory(&t).into_iter().map(|v| v.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::UnintroducedVariable]);
    }

    #[test]
    fn type_inference() {
        let t1 = Theory::new(vec![is("Bob", "big")], vec![]);
        assert_eq!(t1.theory_type, TheoryType::Type1Att);
        assert!(!t1.negation);
        let t2 = Theory::new(vec![Atom::is(Term::name("cat"), "big").negative()], vec![]);
        assert_eq!(t2.theory_type, TheoryType::Type2Rel);
        assert!(t2.negation);
    }

    #[test]
    fn remove_sentence_keeps_order() {
        let t = Theory::new(
            vec![is("Bob", "big"), is("Bob", "red")],
            vec![Rule::new("rule1", vec![var_is("big")], var_is("rough"))],
        );
        let r = t.without_sentence(0);
        assert_eq!(r.facts, vec![is("Bob", "red")]);
        assert_eq!(r.sentence_order, vec![Sentence::Fact(0), Sentence::Rule(0)]);
    }
}
