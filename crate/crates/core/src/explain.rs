//! One-call answers with depth, proofs and critical sentences, as served
//! over HTTP and the C interface.

use serde::Serialize;

use crate::engine::{EngineError, Model, ModelSummary, ProofTree, Status};
use crate::logic::{Literal, Sentence, Theory};
use crate::render::{render_fact, render_rule, render_statement, RenderStyle, RuleTemplate};

/// What the answer rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// The statement itself is derived.
    Derived,
    /// The statement's negation is derived.
    NegationDerived,
    /// Neither is derived; the closed world decides.
    ClosedWorld,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Explanation {
    pub status: Status,
    /// Absent for inconsistent or unstratified theories.
    pub answer: Option<bool>,
    /// Proof depth of the supporting literal, or the failure depth when the
    /// closed world decides.
    pub depth: Option<u32>,
    pub basis: Option<Basis>,
    /// The derived literal the answer rests on, in statement syntax.
    pub support: Option<String>,
    pub proofs: Vec<ProofTree>,
    pub critical: Vec<usize>,
    pub irrelevant: Vec<usize>,
    pub summary: ModelSummary,
}

/// Explains `statement` against a model built with proofs recorded.
pub fn explain(model: &Model, statement: &Literal) -> Result<Explanation, EngineError> {
    if !statement.is_ground() {
        return Err(EngineError::NonGround);
    }
    let summary = model.summary();
    let mut out = Explanation {
        status: model.status(),
        answer: None,
        depth: None,
        basis: None,
        support: None,
        proofs: Vec::new(),
        critical: Vec::new(),
        irrelevant: Vec::new(),
        summary,
    };
    if !model.is_consistent() {
        return Ok(out);
    }
    out.answer = Some(model.answer(statement)?);
    let negation = statement.negated();
    let support = if model.is_derived(statement) {
        out.basis = Some(Basis::Derived);
        Some(statement.clone())
    } else if model.is_derived(&negation) {
        out.basis = Some(Basis::NegationDerived);
        Some(negation)
    } else {
        out.basis = Some(Basis::ClosedWorld);
        None
    };
    match support {
        Some(lit) => {
            out.depth = model.depth(&lit);
            out.proofs = model.proofs(&lit).iter().map(|p| p.to_tree()).collect();
            let cs = model.critical_sentences(&lit)?;
            out.critical = cs.critical.into_iter().collect();
            out.irrelevant = cs.irrelevant.into_iter().collect();
            out.support = Some(crate::syntax::emit_literal(&lit));
        }
        None => {
            out.depth = Some(model.failure_depth(&statement.atom)?);
            out.irrelevant = (0..model.sentence_count()).collect();
        }
    }
    Ok(out)
}

/// English for each sentence, rules in the if-then form with pronouns.
pub fn english_sentences(theory: &Theory) -> Vec<String> {
    let style = RenderStyle::new(RuleTemplate::IfThen);
    theory
        .sentence_order
        .iter()
        .map(|s| match *s {
            Sentence::Fact(i) => render_fact(&theory.facts[i]),
            Sentence::Rule(i) => {
                render_rule(&theory.rules[i], style, theory.theory_type).expect("if-then always applies")
            }
        })
        .collect()
}

pub fn english_statement(statement: &Literal) -> String {
    format!("{}.", render_statement(statement))
}
