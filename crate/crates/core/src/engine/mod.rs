//! Stratified forward chaining with negation as failure.
//!
//! The model of a theory is computed stratum by stratum over its ground
//! instances. A negated condition holds when its atom is not derivable; it
//! never requires an explicitly derived negative literal. Negative literals
//! are derived from negative facts and negative rule conclusions and matter
//! only for consistency and for answering negated statements.

mod ground;
mod proof;
mod stratify;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::logic::{Atom, Literal, Theory};
use ground::{atom_of, complement, is_negative, lit_id, Grounding, LitId};
pub use proof::{Derivation, ProofStep, ProofTree};

/// Proofs kept per literal before the model reports a cap breach.
pub const PROOF_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Consistent,
    Inconsistent,
    Unstratified,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("theory is {0:?}; statements have no well-defined truth value")]
    InconsistentTheory(Status),
    #[error("statement is not ground")]
    NonGround,
    #[error("atom is proven; failure depth is undefined")]
    ProvenAtom,
    #[error("literal is not derived")]
    NotProven,
}

/// Sentences used in every proof of a conclusion, and the rest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalSet {
    pub question: String,
    pub critical: BTreeSet<usize>,
    pub irrelevant: BTreeSet<usize>,
}

#[derive(Debug, Clone)]
pub struct Model {
    g: Arc<Grounding>,
    status: Status,
    derived: Vec<bool>,
    depth: Vec<Option<u32>>,
    strata: Vec<usize>,
    proofs: Vec<Vec<Arc<ProofStep>>>,
    proofs_recorded: bool,
    cap_hit: bool,
}

/// Full inference: model, depths, strata and every proof of every derived
/// literal.
pub fn forward_chain(theory: &Theory) -> Model {
    let mut m = saturate(theory);
    m.record_proofs();
    m
}

/// Inference without proof recording. Cheap enough for generate-and-test.
pub fn saturate(theory: &Theory) -> Model {
    let g = Arc::new(Grounding::new(theory));
    let n = g.lit_count();
    let mut m = Model {
        status: Status::Consistent,
        derived: vec![false; n],
        depth: vec![None; n],
        strata: vec![0; n],
        proofs: Vec::new(),
        proofs_recorded: false,
        cap_hit: false,
        g: g.clone(),
    };
    let Some(strata) = stratify::stratify(&g) else {
        m.status = Status::Unstratified;
        return m;
    };
    m.strata = strata;

    for &(lit, _) in &g.given {
        if !m.insert(lit) {
            return m;
        }
    }

    let max_stratum = m.strata.iter().copied().max().unwrap_or(0);
    let mut layers: Vec<Vec<usize>> = vec![Vec::new(); max_stratum + 1];
    for (i, inst) in g.instances.iter().enumerate() {
        layers[m.strata[inst.head]].push(i);
    }
    for layer in &layers {
        loop {
            let mut changed = false;
            for &i in layer {
                let inst = &g.instances[i];
                if m.derived[inst.head] || !m.body_holds(i) {
                    continue;
                }
                if !m.insert(inst.head) {
                    return m;
                }
                changed = true;
            }
            if !changed {
                break;
            }
        }
    }
    m.compute_depths();
    m
}

impl Model {
    /// Marks a literal derived; false (and status Inconsistent) if its
    /// complement already is.
    fn insert(&mut self, lit: LitId) -> bool {
        self.derived[lit] = true;
        if self.derived[complement(lit)] {
            self.status = Status::Inconsistent;
            return false;
        }
        true
    }

    fn pos_derived(&self, atom: usize) -> bool {
        self.derived[lit_id(atom, crate::logic::Polarity::Positive)]
    }

    fn body_holds(&self, inst: usize) -> bool {
        self.g.instances[inst].conditions.iter().all(|&(a, neg)| self.pos_derived(a) != neg)
    }

    /// Shallowest-proof depth by relaxation: given literals are 0, a rule
    /// application is one more than its deepest positive condition.
    fn compute_depths(&mut self) {
        for &(lit, _) in &self.g.given {
            self.depth[lit] = Some(0);
        }
        loop {
            let mut changed = false;
            for i in 0..self.g.instances.len() {
                if !self.body_holds(i) {
                    continue;
                }
                let inst = &self.g.instances[i];
                let mut deepest = 0u32;
                let mut known = true;
                for a in inst.positive() {
                    match self.depth[lit_id(a, crate::logic::Polarity::Positive)] {
                        Some(d) => deepest = deepest.max(d),
                        None => {
                            known = false;
                            break;
                        }
                    }
                }
                if !known {
                    continue;
                }
                let cand = deepest + 1;
                if self.depth[inst.head].is_none_or(|d| cand < d) {
                    self.depth[inst.head] = Some(cand);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_consistent(&self) -> bool {
        self.status == Status::Consistent
    }

    /// True when some literal had more proofs than [`PROOF_CAP`]; proof lists
    /// (and so critical sets) are then incomplete.
    pub fn proof_cap_hit(&self) -> bool {
        self.cap_hit
    }

    pub fn proofs_recorded(&self) -> bool {
        self.proofs_recorded
    }

    pub fn entities(&self) -> &[String] {
        &self.g.entities
    }

    pub fn sentence_count(&self) -> usize {
        self.g.sentence_count
    }

    /// Derived literals in a stable order.
    pub fn derived(&self) -> Vec<Literal> {
        (0..self.derived.len()).filter(|&l| self.derived[l]).map(|l| self.g.literal(l)).collect()
    }

    pub fn is_derived(&self, l: &Literal) -> bool {
        self.g.lookup(l).is_some_and(|id| self.derived[id])
    }

    pub fn depth(&self, l: &Literal) -> Option<u32> {
        self.g.lookup(l).and_then(|id| if self.derived[id] { self.depth[id] } else { None })
    }

    pub fn max_depth(&self) -> Option<u32> {
        if !self.is_consistent() {
            return None;
        }
        (0..self.derived.len()).filter(|&l| self.derived[l]).filter_map(|l| self.depth[l]).max()
    }

    /// Derived literals whose shallowest proof has exactly this depth.
    pub fn at_depth(&self, depth: u32) -> Vec<Literal> {
        (0..self.derived.len())
            .filter(|&l| self.derived[l] && self.depth[l] == Some(depth))
            .map(|l| self.g.literal(l))
            .collect()
    }

    pub fn stratum(&self, l: &Literal) -> Option<usize> {
        if self.status == Status::Unstratified {
            return None;
        }
        self.g.lookup(l).map(|id| self.strata[id])
    }

    pub fn proofs(&self, l: &Literal) -> &[Arc<ProofStep>] {
        match self.g.lookup(l) {
            Some(id) if self.proofs_recorded && id < self.proofs.len() => &self.proofs[id],
            _ => &[],
        }
    }

    /// Closed-world answer. `Not f` holds whenever `f` is not derivable.
    pub fn answer(&self, statement: &Literal) -> Result<bool, EngineError> {
        if !self.is_consistent() {
            return Err(EngineError::InconsistentTheory(self.status));
        }
        if !statement.is_ground() {
            return Err(EngineError::NonGround);
        }
        let proven = self.is_derived(&statement.atom.clone().positive());
        Ok(if statement.is_positive() { proven } else { !proven })
    }

    /// Depth of the shallowest failing branch of an unproven atom: 0 when no
    /// rule instance concludes it, otherwise the deepest (over concluding
    /// instances) of the shallowest failing condition plus one.
    pub fn failure_depth(&self, atom: &Atom) -> Result<u32, EngineError> {
        if !self.is_consistent() {
            return Err(EngineError::InconsistentTheory(self.status));
        }
        if !atom.is_ground() {
            return Err(EngineError::NonGround);
        }
        let Some(&a) = self.g.index.get(atom) else {
            return Ok(0);
        };
        if self.pos_derived(a) {
            return Err(EngineError::ProvenAtom);
        }
        let mut fd = FailureDepth { m: self, stack: Vec::new(), memo: vec![None; self.g.atoms.len()] };
        Ok(fd.eval(a).0)
    }

    /// Sentences used by every recorded proof of `f`.
    pub fn critical_sentences(&self, f: &Literal) -> Result<CriticalSet, EngineError> {
        let id = self.g.lookup(f).filter(|&id| self.derived[id]).ok_or(EngineError::NotProven)?;
        let n = self.g.sentence_count;
        let mut critical: Option<BTreeSet<usize>> = None;
        for p in self.proofs.get(id).map_or(&[][..], Vec::as_slice) {
            let used = proof::sentences_used(p);
            critical = Some(match critical {
                None => used.iter().copied().collect(),
                Some(c) => c.into_iter().filter(|s| used.contains(s)).collect(),
            });
        }
        let critical = critical.unwrap_or_default();
        let irrelevant = (0..n).filter(|s| !critical.contains(s)).collect();
        Ok(CriticalSet { question: f.to_string(), critical, irrelevant })
    }

    pub fn summary(&self) -> ModelSummary {
        ModelSummary {
            status: self.status,
            derived: self.derived.iter().filter(|&&d| d).count(),
            max_depth: self.max_depth(),
            strata: if self.status == Status::Unstratified {
                0
            } else {
                self.strata.iter().copied().max().map_or(0, |m| m + 1)
            },
            proof_cap_hit: self.cap_hit,
        }
    }

    /// Enumerates every acyclic proof of every derived literal, sharing
    /// sub-proofs between parents. No-op unless the model is consistent.
    pub fn record_proofs(&mut self) {
        if self.proofs_recorded {
            return;
        }
        self.proofs_recorded = true;
        if !self.is_consistent() {
            return;
        }
        let (proofs, cap_hit) = proof::enumerate(&self.g, &self.derived, PROOF_CAP);
        self.proofs = proofs;
        self.cap_hit = cap_hit;
    }

    /// Positive conclusions of rule instances that are not derived, in
    /// instance order, with the instance's condition subjects.
    pub fn unsatisfied_conclusions(&self) -> Vec<(Atom, Vec<String>)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for inst in &self.g.instances {
            if is_negative(inst.head) || self.derived[inst.head] {
                continue;
            }
            if seen.insert(inst.head) {
                let subjects =
                    inst.conditions.iter().map(|&(a, _)| self.g.atoms[a].subject.text().to_string()).collect();
                out.push((self.g.atoms[atom_of(inst.head)].clone(), subjects));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelSummary {
    pub status: Status,
    pub derived: usize,
    pub max_depth: Option<u32>,
    pub strata: usize,
    pub proof_cap_hit: bool,
}

struct FailureDepth<'a> {
    m: &'a Model,
    stack: Vec<usize>,
    memo: Vec<Option<u32>>,
}

impl FailureDepth<'_> {
    /// Returns the value and the lowest stack position a cycle cut reached;
    /// values cut against an outer frame are not memoised.
    fn eval(&mut self, a: usize) -> (u32, usize) {
        if let Some(pos) = self.stack.iter().position(|&x| x == a) {
            return (0, pos);
        }
        if let Some(v) = self.memo[a] {
            return (v, usize::MAX);
        }
        let me = self.stack.len();
        self.stack.push(a);
        let mut low = usize::MAX;
        let mut result = 0u32;
        let g = self.m.g.clone();
        for &i in g.heads(lit_id(a, crate::logic::Polarity::Positive)) {
            let inst = &g.instances[i];
            let mut shallowest: Option<u32> = None;
            for &(c, neg) in &inst.conditions {
                let branch = if neg {
                    if !self.m.pos_derived(c) {
                        continue;
                    }
                    self.m.depth[lit_id(c, crate::logic::Polarity::Positive)].unwrap_or(0)
                } else {
                    if self.m.pos_derived(c) {
                        continue;
                    }
                    let (v, l) = self.eval(c);
                    low = low.min(l);
                    v
                };
                shallowest = Some(shallowest.map_or(branch, |s| s.min(branch)));
            }
            if let Some(s) = shallowest {
                result = result.max(s + 1);
            }
        }
        self.stack.pop();
        if low >= me {
            self.memo[a] = Some(result);
            low = usize::MAX;
        }
        (result, low)
    }
}
