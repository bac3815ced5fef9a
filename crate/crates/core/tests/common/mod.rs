//! Reference implementations used to check the engine from the outside.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use rulebase::logic::{Literal, Predicate, Term, Theory};

/// `(subject, predicate, object, positive)`.
pub type Key = (String, String, String, bool);

pub fn key(l: &Literal) -> Key {
    (l.atom.subject.text().to_string(), l.atom.predicate.text().to_string(), l.atom.object.clone(), l.is_positive())
}

fn flip(k: &Key) -> Key {
    (k.0.clone(), k.1.clone(), k.2.clone(), !k.3)
}

struct GroundRule {
    pos: Vec<Key>,
    /// Atoms (positive keys) that must be underivable.
    naf: Vec<Key>,
    head: Key,
}

fn entities(t: &Theory) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut add = |s: &str| {
        if !out.iter().any(|e| e == s) {
            out.push(s.to_string());
        }
    };
    let lits =
        t.facts.iter().chain(t.rules.iter().flat_map(|r| r.conditions.iter().chain(std::iter::once(&r.conclusion))));
    for l in lits {
        if let Term::Name(n) = &l.atom.subject {
            add(n);
        }
        if let Predicate::Relation(_) = l.atom.predicate {
            add(&l.atom.object);
        }
    }
    out
}

fn ground(t: &Theory) -> Vec<GroundRule> {
    let names = entities(t);
    let mut out = Vec::new();
    for r in &t.rules {
        let has_var = r.conditions.iter().chain(std::iter::once(&r.conclusion)).any(|l| l.atom.subject.is_var());
        let bindings: Vec<Option<&String>> = if has_var { names.iter().map(Some).collect() } else { vec![None] };
        for b in bindings {
            let inst = |l: &Literal| -> Key {
                let subject = match (&l.atom.subject, b) {
                    (Term::Var(_), Some(n)) => n.clone(),
                    (s, _) => s.text().to_string(),
                };
                (subject, l.atom.predicate.text().to_string(), l.atom.object.clone(), l.is_positive())
            };
            let mut pos = Vec::new();
            let mut naf = Vec::new();
            for c in &r.conditions {
                let k = inst(c);
                if k.3 {
                    pos.push(k);
                } else {
                    naf.push(flip(&k));
                }
            }
            out.push(GroundRule { pos, naf, head: inst(&r.conclusion) });
        }
    }
    out
}

/// Least model of the reduct with respect to `assumed` (NAF atoms taken as
/// true), with the iteration stage at which each literal first appears.
fn least_model(facts: &[Key], rules: &[GroundRule], assumed: &HashSet<Key>) -> BTreeMap<Key, u32> {
    let mut m: BTreeMap<Key, u32> = facts.iter().map(|f| (f.clone(), 0)).collect();
    let live: Vec<&GroundRule> = rules.iter().filter(|r| !r.naf.iter().any(|a| assumed.contains(a))).collect();
    let mut stage = 0;
    loop {
        stage += 1;
        let new: Vec<Key> = live
            .iter()
            .filter(|r| !m.contains_key(&r.head) && r.pos.iter().all(|p| m.get(p).is_some_and(|&s| s < stage)))
            .map(|r| r.head.clone())
            .collect();
        if new.is_empty() {
            return m;
        }
        for k in new {
            m.entry(k).or_insert(stage);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    /// A negative dependency cycle among ground atoms.
    NegativeCycle,
    /// Every stable model found, as literal -> shallowest stage.
    Models(Vec<BTreeMap<Key, u32>>),
    /// More NAF atoms than the guess limit allows.
    TooLarge,
}

/// Whether some negated condition atom is reachable from the head it
/// feeds, following condition -> head edges over positive heads.
fn negative_cycle(rules: &[GroundRule]) -> bool {
    let mut succ: HashMap<&Key, Vec<&Key>> = HashMap::new();
    for r in rules.iter().filter(|r| r.head.3) {
        for c in r.pos.iter().chain(&r.naf) {
            succ.entry(c).or_default().push(&r.head);
        }
    }
    for r in rules.iter().filter(|r| r.head.3) {
        for a in &r.naf {
            // is `a` reachable from the head?
            let mut seen: HashSet<&Key> = HashSet::new();
            let mut q = VecDeque::from([&r.head]);
            while let Some(x) = q.pop_front() {
                if x == a {
                    return true;
                }
                if seen.insert(x) {
                    q.extend(succ.get(x).into_iter().flatten().copied());
                }
            }
        }
    }
    false
}

/// Stable models by guessing the truth of every NAF atom and keeping the
/// guesses the least model of the reduct reproduces.
pub fn stable_models(t: &Theory, max_guess_atoms: usize) -> OracleResult {
    let rules = ground(t);
    if negative_cycle(&rules) {
        return OracleResult::NegativeCycle;
    }
    let naf: Vec<Key> = rules.iter().flat_map(|r| r.naf.iter().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    if naf.len() > max_guess_atoms {
        return OracleResult::TooLarge;
    }
    let facts: Vec<Key> = t.facts.iter().map(key).collect();
    let mut models = Vec::new();
    for mask in 0u64..(1u64 << naf.len()) {
        let assumed: HashSet<Key> =
            naf.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()).collect();
        let m = least_model(&facts, &rules, &assumed);
        if naf.iter().all(|a| m.contains_key(a) == assumed.contains(a)) {
            models.push(m);
        }
    }
    OracleResult::Models(models)
}

pub fn is_inconsistent(m: &BTreeMap<Key, u32>) -> bool {
    m.keys().any(|k| k.3 && m.contains_key(&flip(k)))
}

/// Compares the engine with the oracle. `None` when they agree or the
/// oracle declined; otherwise a description of the difference.
pub fn compare(t: &Theory, max_guess_atoms: usize) -> Result<(), String> {
    use rulebase::engine::{saturate, Status};
    let model = saturate(t);
    match (stable_models(t, max_guess_atoms), model.status()) {
        (OracleResult::TooLarge, _) => Ok(()),
        (OracleResult::NegativeCycle, Status::Unstratified) => Ok(()),
        (OracleResult::NegativeCycle, s) => Err(format!("oracle found a negative cycle, engine says {s:?}")),
        (OracleResult::Models(_), Status::Unstratified) => {
            Err("engine says unstratified, oracle found no negative cycle".into())
        }
        (OracleResult::Models(ms), _) if ms.len() != 1 => {
            Err(format!("{} stable models for a stratified theory", ms.len()))
        }
        (OracleResult::Models(ms), s) => {
            let m = &ms[0];
            match (is_inconsistent(m), s) {
                (true, Status::Inconsistent) => Ok(()),
                (true, s) => Err(format!("oracle model is inconsistent, engine says {s:?}")),
                (false, Status::Inconsistent) => Err("engine says inconsistent, oracle model is consistent".into()),
                (false, _) => {
                    let got: BTreeMap<Key, u32> = model
                        .derived()
                        .iter()
                        .map(|l| (key(l), model.depth(l).expect("derived literals have depths")))
                        .collect();
                    if &got == m {
                        Ok(())
                    } else {
                        Err(format!("engine {got:?}\noracle {m:?}"))
                    }
                }
            }
        }
    }
}

/// Every variable-only rule over two attributes with one or two distinct
/// condition literals.
pub fn small_rules() -> Vec<rulebase::logic::Rule> {
    use rulebase::logic::{Atom, Rule, Variable};
    let lits: Vec<Literal> = ["red", "blue"]
        .iter()
        .flat_map(|a| {
            let atom = Atom::is(Term::Var(Variable::Someone), *a);
            [atom.clone().positive(), atom.negative()]
        })
        .collect();
    let mut conds: Vec<Vec<Literal>> = lits.iter().map(|l| vec![l.clone()]).collect();
    for i in 0..lits.len() {
        for j in i + 1..lits.len() {
            conds.push(vec![lits[i].clone(), lits[j].clone()]);
        }
    }
    let mut out = Vec::new();
    for c in &conds {
        for h in &lits {
            out.push(Rule::new("r", c.clone(), h.clone()));
        }
    }
    out
}

/// Fact sets for `n` entities, one of nine per-entity states (each of two
/// attributes absent, positive or negative), up to permutation of entities.
pub fn small_fact_sets(n: usize) -> Vec<Vec<Literal>> {
    use rulebase::logic::Atom;
    const NAMES: [&str; 3] = ["Anne", "Bob", "Charlie"];
    fn states(n: usize, min: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == n {
            out.push(acc.clone());
            return;
        }
        for s in min..9 {
            acc.push(s);
            states(n, s, acc, out);
            acc.pop();
        }
    }
    let mut combos = Vec::new();
    states(n, 0, &mut Vec::new(), &mut combos);
    combos
        .into_iter()
        .map(|combo| {
            let mut facts = Vec::new();
            for (e, s) in combo.into_iter().enumerate() {
                for (k, attr) in ["red", "blue"].iter().enumerate() {
                    let atom = Atom::is(Term::name(NAMES[e]), *attr);
                    match (s / 3usize.pow(k as u32)) % 3 {
                        1 => facts.push(atom.positive()),
                        2 => facts.push(atom.negative()),
                        _ => {}
                    }
                }
            }
            // every entity appears even when all its attributes are absent
            if facts.is_empty() {
                facts.push(Atom::is(Term::name(NAMES[0]), "red").positive());
            }
            facts
        })
        .collect()
}
