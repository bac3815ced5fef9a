//! Proof trees and exhaustive acyclic proof enumeration.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ground::{lit_id, Grounding, LitId};
use crate::logic::{Atom, Literal, Polarity};

/// Node of a proof: a literal and how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub conclusion: Literal,
    pub via: Derivation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    /// Stated by the sentence at this position.
    Given { sentence: usize },
    Rule {
        rule_id: String,
        sentence: usize,
        binding: Option<String>,
        /// Proofs of the positive conditions, in rule order.
        premises: Vec<Arc<ProofStep>>,
        /// Atoms of negated conditions; they hold because they are not derivable.
        naf: Vec<Atom>,
    },
}

impl ProofStep {
    /// Rule applications on the longest root-to-leaf path.
    pub fn depth(&self) -> u32 {
        match &self.via {
            Derivation::Given { .. } => 0,
            Derivation::Rule { premises, .. } => 1 + premises.iter().map(|p| p.depth()).max().unwrap_or(0),
        }
    }

    pub fn sentence(&self) -> usize {
        match &self.via {
            Derivation::Given { sentence } | Derivation::Rule { sentence, .. } => *sentence,
        }
    }

    pub fn to_tree(&self) -> ProofTree {
        match &self.via {
            Derivation::Given { sentence } => ProofTree {
                literal: self.conclusion.to_string(),
                sentence: *sentence,
                rule: None,
                binding: None,
                children: Vec::new(),
                naf: Vec::new(),
            },
            Derivation::Rule { rule_id, sentence, binding, premises, naf } => ProofTree {
                literal: self.conclusion.to_string(),
                sentence: *sentence,
                rule: Some(rule_id.clone()),
                binding: binding.clone(),
                children: premises.iter().map(|p| p.to_tree()).collect(),
                naf: naf.iter().map(|a| a.clone().positive().to_string()).collect(),
            },
        }
    }
}

/// Serializable form of a proof.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofTree {
    pub literal: String,
    pub sentence: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binding: Option<String>,
    #[serde(default)]
    pub children: Vec<ProofTree>,
    #[serde(default)]
    pub naf: Vec<String>,
}

impl ProofTree {
    pub fn depth(&self) -> u32 {
        if self.rule.is_none() {
            0
        } else {
            1 + self.children.iter().map(ProofTree::depth).max().unwrap_or(0)
        }
    }
}

/// Sentences appearing anywhere in a proof.
pub fn sentences_used(p: &Arc<ProofStep>) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut seen: HashSet<*const ProofStep> = HashSet::new();
    let mut todo = vec![p];
    while let Some(p) = todo.pop() {
        if !seen.insert(Arc::as_ptr(p)) {
            continue;
        }
        out.insert(p.sentence());
        if let Derivation::Rule { premises, .. } = &p.via {
            todo.extend(premises.iter());
        }
    }
    out
}

/// Rule-instance expansions allowed per theory before enumeration gives up.
const WORK_BUDGET: usize = 200_000;

type Proofs = Arc<Vec<Arc<ProofStep>>>;

struct Enumerator<'a> {
    g: &'a Grounding,
    derived: &'a [bool],
    cap: usize,
    stack: Vec<LitId>,
    memo: Vec<Option<Proofs>>,
    work: usize,
    cap_hit: bool,
}

/// Every proof of every derived literal in which no literal occurs below
/// itself, at most `cap` per literal. The flag reports truncation.
pub(crate) fn enumerate(g: &Grounding, derived: &[bool], cap: usize) -> (Vec<Vec<Arc<ProofStep>>>, bool) {
    let mut e =
        Enumerator { g, derived, cap, stack: Vec::new(), memo: vec![None; derived.len()], work: 0, cap_hit: false };
    let mut out = vec![Vec::new(); derived.len()];
    for (lit, slot) in out.iter_mut().enumerate() {
        if derived[lit] {
            *slot = e.prove(lit).0.to_vec();
        }
    }
    (out, e.cap_hit)
}

impl Enumerator<'_> {
    /// Proofs of `lit` avoiding literals on the current path, plus the lowest
    /// path position a cut referred to (`usize::MAX` if none).
    fn prove(&mut self, lit: LitId) -> (Proofs, usize) {
        if let Some(pos) = self.stack.iter().position(|&l| l == lit) {
            return (Arc::new(Vec::new()), pos);
        }
        if let Some(p) = &self.memo[lit] {
            return (p.clone(), usize::MAX);
        }
        let me = self.stack.len();
        self.stack.push(lit);
        let mut low = usize::MAX;
        let mut proofs: Vec<Arc<ProofStep>> = Vec::new();
        let conclusion = self.g.literal(lit);

        for &(l, sentence) in &self.g.given {
            if l == lit {
                proofs
                    .push(Arc::new(ProofStep { conclusion: conclusion.clone(), via: Derivation::Given { sentence } }));
            }
        }

        'instances: for &i in self.g.heads(lit) {
            if proofs.len() >= self.cap {
                self.cap_hit = true;
                break;
            }
            let inst = &self.g.instances[i];
            for a in inst.naf() {
                if self.derived[lit_id(a, Polarity::Positive)] {
                    continue 'instances;
                }
            }
            for a in inst.positive() {
                if !self.derived[lit_id(a, Polarity::Positive)] {
                    continue 'instances;
                }
            }
            self.work += 1;
            if self.work > WORK_BUDGET {
                self.cap_hit = true;
                break;
            }
            let mut options: Vec<Proofs> = Vec::new();
            for a in inst.positive() {
                let (p, l) = self.prove(lit_id(a, Polarity::Positive));
                low = low.min(l);
                if p.is_empty() {
                    continue 'instances;
                }
                options.push(p);
            }
            let naf: Vec<Atom> = inst.naf().map(|a| self.g.atoms[a].clone()).collect();
            let rule_id = self.g.rule_ids[inst.rule].clone();
            // cartesian product of premise proofs, odometer style
            let mut choice = vec![0usize; options.len()];
            loop {
                if proofs.len() >= self.cap {
                    self.cap_hit = true;
                    break 'instances;
                }
                let premises = choice.iter().zip(&options).map(|(&c, o)| o[c].clone()).collect();
                proofs.push(Arc::new(ProofStep {
                    conclusion: conclusion.clone(),
                    via: Derivation::Rule {
                        rule_id: rule_id.clone(),
                        sentence: inst.sentence,
                        binding: inst.binding.clone(),
                        premises,
                        naf: naf.clone(),
                    },
                }));
                let mut k = 0;
                loop {
                    if k == choice.len() {
                        continue 'instances;
                    }
                    choice[k] += 1;
                    if choice[k] < options[k].len() {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
            }
        }

        self.stack.pop();
        let proofs = Arc::new(proofs);
        if low >= me {
            self.memo[lit] = Some(proofs.clone());
            low = usize::MAX;
        }
        (proofs, low)
    }
}
