use std::collections::HashMap;

use crate::logic::{Atom, Literal, Polarity, Sentence, Substitution, Term, Theory};

pub(crate) type AtomId = usize;
pub(crate) type LitId = usize;

pub(crate) fn lit_id(atom: AtomId, polarity: Polarity) -> LitId {
    atom * 2 + usize::from(polarity == Polarity::Negative)
}

pub(crate) fn atom_of(lit: LitId) -> AtomId {
    lit / 2
}

pub(crate) fn is_negative(lit: LitId) -> bool {
    lit % 2 == 1
}

pub(crate) fn complement(lit: LitId) -> LitId {
    lit ^ 1
}

/// One ground rule instance.
#[derive(Debug, Clone)]
pub(crate) struct Instance {
    pub rule: usize,
    pub sentence: usize,
    pub binding: Option<String>,
    /// Conditions in rule order: (atom, negated).
    pub conditions: Vec<(AtomId, bool)>,
    pub head: LitId,
}

impl Instance {
    pub fn positive(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.conditions.iter().filter(|c| !c.1).map(|c| c.0)
    }

    pub fn naf(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.conditions.iter().filter(|c| c.1).map(|c| c.0)
    }
}

/// A theory compiled to interned ground atoms and rule instances over the
/// names it mentions.
#[derive(Debug)]
pub(crate) struct Grounding {
    pub atoms: Vec<Atom>,
    pub index: HashMap<Atom, AtomId>,
    /// Given literals with the sentence stating them; duplicates keep every
    /// stating sentence.
    pub given: Vec<(LitId, usize)>,
    pub instances: Vec<Instance>,
    /// Instances by head literal.
    pub by_head: HashMap<LitId, Vec<usize>>,
    pub rule_ids: Vec<String>,
    pub sentence_count: usize,
    pub entities: Vec<String>,
}

impl Grounding {
    pub fn new(theory: &Theory) -> Grounding {
        let entities = theory.signature().names;
        let mut g = Grounding {
            atoms: Vec::new(),
            index: HashMap::new(),
            given: Vec::new(),
            instances: Vec::new(),
            by_head: HashMap::new(),
            rule_ids: theory.rules.iter().map(|r| r.id.clone()).collect(),
            sentence_count: theory.sentence_order.len(),
            entities,
        };
        for (idx, s) in theory.sentence_order.iter().enumerate() {
            match *s {
                Sentence::Fact(f) => {
                    let l = &theory.facts[f];
                    // non-ground facts are rejected by validation; skip them here
                    if l.is_ground() {
                        let a = g.intern(&l.atom);
                        g.given.push((lit_id(a, l.polarity), idx));
                    }
                }
                Sentence::Rule(r) => {
                    let rule = &theory.rules[r];
                    let subs: Vec<Substitution> = match rule.variable() {
                        None => vec![Substitution::empty()],
                        Some(v) => g.entities.iter().map(|e| Substitution::bind(v, e.clone())).collect(),
                    };
                    for sub in subs {
                        let ground = |l: &Literal| crate::logic::substitute(l, &sub).ok();
                        let Some(head) = ground(&rule.conclusion) else { continue };
                        let conds: Option<Vec<Literal>> = rule.conditions.iter().map(ground).collect();
                        let Some(conds) = conds else { continue };
                        let conditions =
                            conds.iter().map(|c| (g.intern(&c.atom), c.polarity == Polarity::Negative)).collect();
                        let head = lit_id(g.intern(&head.atom), head.polarity);
                        let id = g.instances.len();
                        g.instances.push(Instance {
                            rule: r,
                            sentence: idx,
                            binding: sub.value().map(str::to_string),
                            conditions,
                            head,
                        });
                        g.by_head.entry(head).or_default().push(id);
                    }
                }
            }
        }
        g
    }

    fn intern(&mut self, atom: &Atom) -> AtomId {
        debug_assert!(matches!(atom.subject, Term::Name(_)));
        if let Some(&id) = self.index.get(atom) {
            return id;
        }
        let id = self.atoms.len();
        self.atoms.push(atom.clone());
        self.index.insert(atom.clone(), id);
        id
    }

    pub fn lit_count(&self) -> usize {
        self.atoms.len() * 2
    }

    pub fn lookup(&self, l: &Literal) -> Option<LitId> {
        self.index.get(&l.atom).map(|&a| lit_id(a, l.polarity))
    }

    pub fn literal(&self, lit: LitId) -> Literal {
        let atom = self.atoms[atom_of(lit)].clone();
        if is_negative(lit) {
            atom.negative()
        } else {
            atom.positive()
        }
    }

    pub fn heads(&self, lit: LitId) -> &[usize] {
        self.by_head.get(&lit).map_or(&[], Vec::as_slice)
    }
}
