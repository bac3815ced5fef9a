//! Random theory sampling with depth gating by generate-and-test.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, Model, Status};
use crate::logic::{Atom, Literal, Polarity, Rule, Term, Theory, TheoryType, Variable};

pub const TYPE1_NAMES: [&str; 8] = ["Anne", "Bob", "Charlie", "Dave", "Erin", "Fiona", "Gary", "Harry"];
pub const TYPE1_ATTRIBUTES: [&str; 14] = [
    "red", "blue", "green", "kind", "nice", "big", "cold", "young", "round", "rough", "white", "smart", "quiet",
    "furry",
];
pub const TYPE2_NAMES: [&str; 10] =
    ["cat", "dog", "bald eagle", "rabbit", "mouse", "tiger", "lion", "bear", "squirrel", "cow"];
pub const TYPE2_ATTRIBUTES: [&str; 10] =
    ["red", "blue", "green", "kind", "nice", "big", "cold", "young", "round", "rough"];
pub const TYPE2_RELATIONS: [&str; 6] = ["likes", "chases", "eats", "sees", "visits", "needs"];

pub const FACTS_MIN: usize = 1;
pub const FACTS_MAX: usize = 16;
pub const RULES_MIN: usize = 1;
pub const RULES_MAX: usize = 8;

const P_IS_TYPE2: f64 = 0.3;
const P_POSITIVE: f64 = 0.8;
const P_GROUNDED_FIRST: f64 = 0.2;

/// The full symbol pools for one theory type.
#[derive(Debug, Clone, Copy)]
pub struct Pools {
    pub names: &'static [&'static str],
    pub attributes: &'static [&'static str],
    pub relations: &'static [&'static str],
}

impl Pools {
    pub fn for_type(t: TheoryType) -> Pools {
        match t {
            TheoryType::Type1Att => Pools { names: &TYPE1_NAMES, attributes: &TYPE1_ATTRIBUTES, relations: &[] },
            TheoryType::Type2Rel => {
                Pools { names: &TYPE2_NAMES, attributes: &TYPE2_ATTRIBUTES, relations: &TYPE2_RELATIONS }
            }
        }
    }
}

/// Variable spelling used by generated rules.
pub fn variable_for(t: TheoryType) -> Variable {
    match t {
        TheoryType::Type1Att => Variable::Someone,
        TheoryType::Type2Rel => Variable::Something,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationConfig {
    pub theory_type: TheoryType,
    pub negation: bool,
    pub target_depth: u32,
    pub seed: u64,
    pub max_attempts: usize,
}

impl GenerationConfig {
    pub fn new(theory_type: TheoryType, negation: bool, target_depth: u32, seed: u64) -> GenerationConfig {
        GenerationConfig { theory_type, negation, target_depth, seed, max_attempts: 10_000 }
    }
}

/// Deterministic child stream for one theory index.
pub fn theory_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-theory subset of the pools, kept in pool order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledSignature {
    pub names: Vec<String>,
    pub attributes: Vec<String>,
    pub relations: Vec<String>,
}

fn subset<R: Rng + ?Sized>(pool: &[&str], lo: usize, hi: usize, rng: &mut R) -> Vec<String> {
    if pool.is_empty() {
        return Vec::new();
    }
    let k = rng.gen_range(lo..=hi.min(pool.len()));
    let mut idx = rand::seq::index::sample(rng, pool.len(), k).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| pool[i].to_string()).collect()
}

pub fn sample_signature<R: Rng + ?Sized>(t: TheoryType, rng: &mut R) -> SampledSignature {
    let pools = Pools::for_type(t);
    SampledSignature {
        names: subset(pools.names, 2, 4, rng),
        attributes: subset(pools.attributes, 1, 5, rng),
        relations: subset(pools.relations, 1, 4, rng),
    }
}

fn polarity<R: Rng + ?Sized>(negation: bool, rng: &mut R) -> Polarity {
    if !negation || rng.gen_bool(P_POSITIVE) {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

fn pick<'a, R: Rng + ?Sized>(items: &'a [String], rng: &mut R) -> &'a String {
    items.choose(rng).expect("signature pools are non-empty")
}

/// Whether the next literal uses `is` rather than a relation.
fn choose_is<R: Rng + ?Sized>(sig: &SampledSignature, t: TheoryType, rng: &mut R) -> bool {
    t == TheoryType::Type1Att || sig.relations.is_empty() || rng.gen_bool(P_IS_TYPE2)
}

pub fn sample_fact<R: Rng + ?Sized>(sig: &SampledSignature, t: TheoryType, negation: bool, rng: &mut R) -> Literal {
    let subject = Term::Name(pick(&sig.names, rng).clone());
    let atom = if choose_is(sig, t, rng) {
        Atom::is(subject, pick(&sig.attributes, rng).clone())
    } else {
        let rel = pick(&sig.relations, rng).clone();
        Atom::relation(subject, rel, pick(&sig.names, rng).clone())
    };
    Literal { atom, polarity: polarity(negation, rng) }
}

/// Uniform over `pool` entries not in `used`; any entry when all are used.
fn fresh<'a, R: Rng + ?Sized>(pool: &'a [String], used: &[String], rng: &mut R) -> &'a String {
    let unused: Vec<&String> = pool.iter().filter(|s| !used.contains(s)).collect();
    match unused.choose(rng) {
        Some(s) => s,
        None => pick(pool, rng),
    }
}

pub fn sample_rule<R: Rng + ?Sized>(
    sig: &SampledSignature,
    t: TheoryType,
    negation: bool,
    id: String,
    rng: &mut R,
) -> Rule {
    let n_conditions = rng.gen_range(1..=2);
    let var = Term::Var(variable_for(t));
    // distinct terms usable as a later first argument, in order of use
    let mut mentioned: Vec<Term> = Vec::new();
    let mut used_attributes: Vec<String> = Vec::new();
    let mut used_names: Vec<String> = Vec::new();
    let mut literals = Vec::with_capacity(n_conditions + 1);

    for k in 0..=n_conditions {
        let subject = if k == 0 {
            if rng.gen_bool(P_GROUNDED_FIRST) {
                Term::Name(pick(&sig.names, rng).clone())
            } else {
                var.clone()
            }
        } else {
            mentioned.choose(rng).expect("first literal mentions a term").clone()
        };
        if !mentioned.contains(&subject) {
            mentioned.push(subject.clone());
        }
        if let Term::Name(n) = &subject {
            if !used_names.contains(n) {
                used_names.push(n.clone());
            }
        }
        let atom = if choose_is(sig, t, rng) {
            let attr = fresh(&sig.attributes, &used_attributes, rng).clone();
            used_attributes.push(attr.clone());
            Atom::is(subject, attr)
        } else {
            let rel = pick(&sig.relations, rng).clone();
            let object = fresh(&sig.names, &used_names, rng).clone();
            used_names.push(object.clone());
            let object_term = Term::Name(object.clone());
            if !mentioned.contains(&object_term) {
                mentioned.push(object_term);
            }
            Atom::relation(subject, rel, object)
        };
        literals.push(Literal { atom, polarity: polarity(negation, rng) });
    }
    let conclusion = literals.pop().expect("at least two literals");
    Rule::new(id, literals, conclusion)
}

/// One unconditioned draw: signature, sizes, facts and rules with exact
/// duplicates dropped (first occurrence kept).
pub fn sample_theory<R: Rng + ?Sized>(t: TheoryType, negation: bool, rng: &mut R) -> Theory {
    let sig = sample_signature(t, rng);
    let n_facts = rng.gen_range(FACTS_MIN..=FACTS_MAX);
    let n_rules = rng.gen_range(RULES_MIN..=RULES_MAX);
    let mut facts: Vec<Literal> = Vec::with_capacity(n_facts);
    for _ in 0..n_facts {
        let f = sample_fact(&sig, t, negation, rng);
        if !facts.contains(&f) {
            facts.push(f);
        }
    }
    let mut rules: Vec<Rule> = Vec::with_capacity(n_rules);
    for _ in 0..n_rules {
        let r = sample_rule(&sig, t, negation, format!("rule{}", rules.len() + 1), rng);
        if !rules.iter().any(|x| x.same_logic(&r)) {
            rules.push(r);
        }
    }
    let mut theory = Theory::new(facts, rules);
    theory.theory_type = t;
    theory.negation = negation;
    theory
}

/// Counts of discarded draws by reason.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscardStats {
    pub inconsistent: u64,
    pub unstratified: u64,
    pub too_shallow: u64,
    pub proof_cap: u64,
}

impl DiscardStats {
    pub fn total(&self) -> u64 {
        self.inconsistent + self.unstratified + self.too_shallow + self.proof_cap
    }

    pub fn add(&mut self, other: &DiscardStats) {
        self.inconsistent += other.inconsistent;
        self.unstratified += other.unstratified;
        self.too_shallow += other.too_shallow;
        self.proof_cap += other.proof_cap;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("no acceptable theory after {attempts} attempts ({} discarded)", discards.total())]
    AttemptsExhausted { attempts: usize, discards: DiscardStats },
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub theory: Theory,
    pub model: Model,
    pub attempts: usize,
    pub discards: DiscardStats,
}

/// Draws theories until one is consistent, stratified, within the proof cap
/// and reaches the target depth.
pub fn generate_theory<R: Rng + ?Sized>(
    t: TheoryType,
    negation: bool,
    target_depth: u32,
    max_attempts: usize,
    rng: &mut R,
) -> Result<Generated, GenerateError> {
    let mut discards = DiscardStats::default();
    for attempt in 1..=max_attempts {
        let theory = sample_theory(t, negation, rng);
        let mut model = engine::saturate(&theory);
        match model.status() {
            Status::Inconsistent => {
                discards.inconsistent += 1;
                continue;
            }
            Status::Unstratified => {
                discards.unstratified += 1;
                continue;
            }
            Status::Consistent => {}
        }
        if model.max_depth().unwrap_or(0) < target_depth {
            discards.too_shallow += 1;
            continue;
        }
        model.record_proofs();
        if model.proof_cap_hit() {
            discards.proof_cap += 1;
            continue;
        }
        return Ok(Generated { theory, model, attempts: attempt, discards });
    }
    Err(GenerateError::AttemptsExhausted { attempts: max_attempts, discards })
}

/// [`generate_theory`] driven by a config's own seed (stream 0).
pub fn generate_from_config(config: &GenerationConfig) -> Result<Generated, GenerateError> {
    let mut rng = theory_rng(config.seed, 0);
    generate_theory(config.theory_type, config.negation, config.target_depth, config.max_attempts, &mut rng)
}
