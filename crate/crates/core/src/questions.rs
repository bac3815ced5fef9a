//! Balanced, depth-annotated true/false questions for a theory.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::Model;
use crate::logic::{Atom, Literal, Term, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Positive derived literal; true.
    Proven,
    /// Negation of a derived literal; false.
    NegatedProven,
    /// Underivable positive atom; false under the closed world.
    CwaFalse,
    /// Negation of an underivable atom; true under the closed world.
    FlippedTrue,
}

impl Provenance {
    pub fn answer(self) -> bool {
        matches!(self, Provenance::Proven | Provenance::FlippedTrue)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub statement: Literal,
    pub answer: bool,
    pub depth: u32,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionOptions {
    /// Prefer unsatisfied conclusions whose subject is not the subject of
    /// any of the rule's conditions. Such questions are otherwise rare.
    pub oversample_blind_spot: bool,
}

/// Underivable positive atoms split into ground conclusions of rule
/// instances and everything else over the theory's names, attributes and
/// relations. Both lists are in a fixed order.
pub fn partition_unproven(theory: &Theory, model: &Model) -> (Vec<Atom>, Vec<Atom>) {
    let concluded: Vec<Atom> = model.unsatisfied_conclusions().into_iter().map(|(a, _)| a).collect();
    let in_first: HashSet<&Atom> = concluded.iter().collect();
    let sig = theory.signature();
    let mut other = Vec::new();
    for n in &sig.names {
        for a in &sig.attributes {
            other.push(Atom::is(Term::name(n.clone()), a.clone()));
        }
        for r in &sig.relations {
            for m in &sig.names {
                other.push(Atom::relation(Term::name(n.clone()), r.clone(), m.clone()));
            }
        }
    }
    other.retain(|a| !in_first.contains(a) && !model.is_derived(&a.clone().positive()));
    (concluded, other)
}

/// Unsatisfied conclusions whose subject does not appear as the subject of
/// any condition of the instance that concludes them.
pub fn blind_spot_conclusions(model: &Model) -> Vec<Atom> {
    model
        .unsatisfied_conclusions()
        .into_iter()
        .filter(|(a, subjects)| !subjects.iter().any(|s| s == a.subject.text()))
        .map(|(a, _)| a)
        .collect()
}

/// Up to `4(d+1)` questions: per depth `k <= d` one proven and one
/// negated-proven question, then as many unproven ones, half of them
/// flipped. True and false answers are always balanced.
pub fn generate_questions<R: Rng + ?Sized>(
    theory: &Theory,
    model: &Model,
    target_depth: u32,
    options: QuestionOptions,
    rng: &mut R,
) -> Vec<Question> {
    if !model.is_consistent() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut taken: HashSet<Atom> = HashSet::new();
    for k in 0..=target_depth {
        let layer = model.at_depth(k);
        let positives: Vec<&Literal> = layer.iter().filter(|l| l.is_positive()).collect();
        let Some(&proven) = positives.choose(rng) else { continue };
        let negated = layer.choose(rng).expect("layer has a positive literal").negated();
        taken.insert(proven.atom.clone());
        taken.insert(negated.atom.clone());
        out.push(Question { statement: proven.clone(), answer: true, depth: k, provenance: Provenance::Proven });
        out.push(Question { statement: negated, answer: false, depth: k, provenance: Provenance::NegatedProven });
    }

    let wanted = out.len();
    let (mut concluded, mut other) = partition_unproven(theory, model);
    concluded.retain(|a| !taken.contains(a));
    other.retain(|a| !taken.contains(a));
    let from_concluded = if options.oversample_blind_spot {
        let blind: HashSet<Atom> = blind_spot_conclusions(model).into_iter().collect();
        let (mut first, mut rest): (Vec<Atom>, Vec<Atom>) = concluded.into_iter().partition(|a| blind.contains(a));
        first.shuffle(rng);
        rest.shuffle(rng);
        first.extend(rest);
        first
    } else {
        concluded.shuffle(rng);
        concluded
    };
    other.shuffle(rng);

    let half = wanted / 2;
    let mut chosen: Vec<Atom> = from_concluded.iter().take(half).cloned().collect();
    let extra = wanted - chosen.len();
    chosen.extend(other.iter().take(extra).cloned());
    if chosen.len() < wanted {
        let need = wanted - chosen.len();
        chosen.extend(from_concluded.iter().skip(half).take(need).cloned());
    }
    if chosen.len() % 2 == 1 {
        chosen.pop();
    }
    chosen.shuffle(rng);
    for (i, atom) in chosen.into_iter().enumerate() {
        let depth = model.failure_depth(&atom).expect("atom is unproven in a consistent model");
        if i % 2 == 0 {
            out.push(Question { statement: atom.positive(), answer: false, depth, provenance: Provenance::CwaFalse });
        } else {
            out.push(Question { statement: atom.negative(), answer: true, depth, provenance: Provenance::FlippedTrue });
        }
    }
    // keep pairs balanced when unproven atoms ran out
    let trues = out.iter().filter(|q| q.answer).count();
    let falses = out.len() - trues;
    if trues != falses {
        rebalance(&mut out, trues, falses);
    }
    out
}

/// Drops trailing proven / negated-proven pairs until answers balance.
fn rebalance(out: &mut Vec<Question>, mut trues: usize, mut falses: usize) {
    while trues != falses {
        let want_true = trues > falses;
        let pos = out.iter().rposition(|q| q.answer == want_true).expect("an answer of the larger class exists");
        out.remove(pos);
        if want_true {
            trues -= 1;
        } else {
            falses -= 1;
        }
    }
}
