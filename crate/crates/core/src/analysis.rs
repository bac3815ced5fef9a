//! Sentence-removal probes, flip scoring and explanation scoring.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{forward_chain, ProofTree};
use crate::logic::{Literal, Theory};
use crate::questions::Provenance;
use crate::record::Record;
use crate::syntax::{emit_theory, parse_literal, parse_theory, SyntaxError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("no prediction for `{0}`")]
    MissingPrediction(String),
    #[error("record {id}: {source}")]
    Syntax { id: String, source: SyntaxError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeCategory {
    CriticalRemoved,
    IrrelevantRemoved,
}

/// A proven question asked again with one sentence removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probe {
    pub id: String,
    pub base_id: String,
    pub removed_sentence: usize,
    pub category: ProbeCategory,
    pub expected: bool,
    /// The theory with the sentence removed.
    pub theory_formal: String,
    /// The positive statement that is proven in the full theory.
    pub statement_formal: String,
}

/// An answer from any predictor, keyed by probe or record id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prediction {
    pub id: String,
    pub answer: bool,
}

fn collect_sentences(t: &ProofTree, out: &mut BTreeSet<usize>) {
    out.insert(t.sentence);
    for c in &t.children {
        collect_sentences(c, out);
    }
}

/// Sentences used by every one of the given proofs.
pub fn critical_from_proofs(proofs: &[ProofTree]) -> BTreeSet<usize> {
    let mut critical: Option<BTreeSet<usize>> = None;
    for p in proofs {
        let mut used = BTreeSet::new();
        collect_sentences(p, &mut used);
        critical = Some(match critical {
            None => used,
            Some(c) => c.intersection(&used).copied().collect(),
        });
    }
    critical.unwrap_or_default()
}

/// Critical sentences found by removing each sentence and re-running the
/// engine: those whose removal makes `statement` unprovable.
pub fn critical_by_removal(theory: &Theory, statement: &Literal) -> BTreeSet<usize> {
    (0..theory.len()).filter(|&i| forward_chain(&theory.without_sentence(i)).answer(statement) != Ok(true)).collect()
}

/// Base statement for probing: proven questions as asked, negated-proven
/// ones with the negation undone. Others have no proof to probe.
fn unflipped(r: &Record, statement: &Literal) -> Option<Literal> {
    match r.provenance {
        Provenance::Proven => Some(statement.clone()),
        Provenance::NegatedProven => Some(statement.negated()),
        Provenance::CwaFalse | Provenance::FlippedTrue => None,
    }
}

/// One probe per (record, sentence) for proven positive statements of
/// theories without negation.
pub fn build_probes(records: &[Record]) -> Result<Vec<Probe>, AnalysisError> {
    let mut out = Vec::new();
    for r in records {
        let syntax = |source| AnalysisError::Syntax { id: r.id.clone(), source };
        let theory = parse_theory(&r.theory_formal).map_err(syntax)?;
        if theory.negation {
            continue;
        }
        let statement = parse_literal(&r.statement_formal).map_err(syntax)?;
        let Some(base) = unflipped(r, &statement) else { continue };
        if !base.is_positive() || r.proofs.is_empty() {
            continue;
        }
        let critical = critical_from_proofs(&r.proofs);
        let base_formal = crate::syntax::emit_literal(&base);
        for i in 0..theory.len() {
            let is_critical = critical.contains(&i);
            out.push(Probe {
                id: format!("{}#s{i}", r.id),
                base_id: r.id.clone(),
                removed_sentence: i,
                category: if is_critical { ProbeCategory::CriticalRemoved } else { ProbeCategory::IrrelevantRemoved },
                expected: !is_critical,
                theory_formal: emit_theory(&theory.without_sentence(i)),
                statement_formal: base_formal.clone(),
            });
        }
    }
    Ok(out)
}

/// Answers every probe, and the unperturbed base question, with the engine.
pub fn engine_predictions(probes: &[Probe], records: &[Record]) -> Result<Vec<Prediction>, AnalysisError> {
    let bases: BTreeSet<&str> = probes.iter().map(|p| p.base_id.as_str()).collect();
    let mut out: Vec<Prediction> = records
        .iter()
        .filter(|r| bases.contains(r.id.as_str()))
        .map(|r| {
            let syntax = |source| AnalysisError::Syntax { id: r.id.clone(), source };
            let theory = parse_theory(&r.theory_formal).map_err(syntax)?;
            let statement = parse_literal(&r.statement_formal).map_err(syntax)?;
            let base = unflipped(r, &statement).unwrap_or(statement);
            Ok(Prediction { id: r.id.clone(), answer: forward_chain(&theory).answer(&base) == Ok(true) })
        })
        .collect::<Result<_, AnalysisError>>()?;
    let answered: Vec<Result<Prediction, AnalysisError>> = probes
        .par_iter()
        .map(|p| {
            let syntax = |source| AnalysisError::Syntax { id: p.id.clone(), source };
            let theory = parse_theory(&p.theory_formal).map_err(syntax)?;
            let statement = parse_literal(&p.statement_formal).map_err(syntax)?;
            Ok(Prediction { id: p.id.clone(), answer: forward_chain(&theory).answer(&statement) == Ok(true) })
        })
        .collect();
    for a in answered {
        out.push(a?);
    }
    Ok(out)
}

/// Counts by (original answer, answer after removal).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipTable {
    pub true_true: usize,
    pub true_false: usize,
    pub false_true: usize,
    pub false_false: usize,
}

impl FlipTable {
    fn add(&mut self, before: bool, after: bool) {
        match (before, after) {
            (true, true) => self.true_true += 1,
            (true, false) => self.true_false += 1,
            (false, true) => self.false_true += 1,
            (false, false) => self.false_false += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.true_true + self.true_false + self.false_true + self.false_false
    }

    /// Fraction of probes whose answer changed.
    pub fn flip_rate(&self) -> f64 {
        ratio(self.true_false + self.false_true, self.total())
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipReport {
    pub critical: FlipTable,
    pub irrelevant: FlipTable,
    /// Fraction of critical-removal probes answered as expected (false).
    pub critical_accuracy: f64,
    /// Fraction of irrelevant-removal probes answered as expected (true).
    pub irrelevant_accuracy: f64,
    pub critical_flip_rate: f64,
    pub irrelevant_flip_rate: f64,
    pub probes: usize,
}

pub fn score_predictions(probes: &[Probe], predictions: &[Prediction]) -> Result<FlipReport, AnalysisError> {
    let by_id: HashMap<&str, bool> = predictions.iter().map(|p| (p.id.as_str(), p.answer)).collect();
    let get = |id: &str| by_id.get(id).copied().ok_or_else(|| AnalysisError::MissingPrediction(id.to_string()));
    let mut critical = FlipTable::default();
    let mut irrelevant = FlipTable::default();
    let (mut c_ok, mut i_ok) = (0usize, 0usize);
    for p in probes {
        let before = get(&p.base_id)?;
        let after = get(&p.id)?;
        match p.category {
            ProbeCategory::CriticalRemoved => {
                critical.add(before, after);
                c_ok += usize::from(after == p.expected);
            }
            ProbeCategory::IrrelevantRemoved => {
                irrelevant.add(before, after);
                i_ok += usize::from(after == p.expected);
            }
        }
    }
    Ok(FlipReport {
        critical_accuracy: ratio(c_ok, critical.total()),
        irrelevant_accuracy: ratio(i_ok, irrelevant.total()),
        critical_flip_rate: critical.flip_rate(),
        irrelevant_flip_rate: irrelevant.flip_rate(),
        critical,
        irrelevant,
        probes: probes.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision, recall and F1 of one predicted set. Two empty sets score 1;
/// an undefined ratio otherwise scores 0.
pub fn prf(predicted: &BTreeSet<usize>, actual: &BTreeSet<usize>) -> Prf {
    if predicted.is_empty() && actual.is_empty() {
        return Prf { precision: 1.0, recall: 1.0, f1: 1.0 };
    }
    let hit = predicted.intersection(actual).count();
    let precision = ratio(hit, predicted.len());
    let recall = ratio(hit, actual.len());
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Prf { precision, recall, f1 }
}

/// Predicted and actual critical sets for one question.
pub type SetPair = (BTreeSet<usize>, BTreeSet<usize>);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationScore {
    pub per_question: Vec<Prf>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    /// F1 in ten half-open bins of width 0.1 plus a final bin holding
    /// exactly 1.0.
    pub f1_histogram: Vec<HistogramBin>,
}

pub fn score_explanations(pairs: &[SetPair]) -> ExplanationScore {
    let per_question: Vec<Prf> = pairs.iter().map(|(p, a)| prf(p, a)).collect();
    let n = per_question.len();
    let mean = |f: fn(&Prf) -> f64| if n == 0 { 0.0 } else { per_question.iter().map(f).sum::<f64>() / n as f64 };
    let mut bins: Vec<HistogramBin> =
        (0..10).map(|i| HistogramBin { lo: i as f64 / 10.0, hi: (i + 1) as f64 / 10.0, count: 0 }).collect();
    bins.push(HistogramBin { lo: 1.0, hi: 1.0, count: 0 });
    for q in &per_question {
        let idx = if q.f1 >= 1.0 { 10 } else { ((q.f1 * 10.0).floor() as usize).min(9) };
        bins[idx].count += 1;
    }
    ExplanationScore {
        macro_precision: mean(|p| p.precision),
        macro_recall: mean(|p| p.recall),
        macro_f1: mean(|p| p.f1),
        per_question,
        f1_histogram: bins,
    }
}

/// A predicted critical-sentence set keyed by record id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplanationPrediction {
    pub id: String,
    pub critical: BTreeSet<usize>,
}

/// Pairs predicted sets with the proof-based critical sets of proven
/// records. Every proven record needs a prediction.
pub fn explanation_pairs(
    records: &[Record],
    predicted: &[ExplanationPrediction],
) -> Result<Vec<SetPair>, AnalysisError> {
    let by_id: HashMap<&str, &BTreeSet<usize>> = predicted.iter().map(|p| (p.id.as_str(), &p.critical)).collect();
    records
        .iter()
        .filter(|r| !r.proofs.is_empty())
        .map(|r| {
            let p = by_id.get(r.id.as_str()).ok_or_else(|| AnalysisError::MissingPrediction(r.id.clone()))?;
            Ok(((*p).clone(), critical_from_proofs(&r.proofs)))
        })
        .collect()
}

/// Critical sets found by remove-and-rerun for every record with proofs.
pub fn engine_explanations(records: &[Record]) -> Result<Vec<ExplanationPrediction>, AnalysisError> {
    records
        .par_iter()
        .filter(|r| !r.proofs.is_empty())
        .map(|r| {
            let syntax = |source| AnalysisError::Syntax { id: r.id.clone(), source };
            let theory = parse_theory(&r.theory_formal).map_err(syntax)?;
            let statement = parse_literal(&r.statement_formal).map_err(syntax)?;
            let base = unflipped(r, &statement).unwrap_or(statement);
            Ok(ExplanationPrediction { id: r.id.clone(), critical: critical_by_removal(&theory, &base) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn prf_conventions() {
        assert_eq!(prf(&set(&[]), &set(&[])).f1, 1.0);
        assert_eq!(prf(&set(&[]), &set(&[1])), Prf { precision: 0.0, recall: 0.0, f1: 0.0 });
        let p = prf(&set(&[1, 2, 3, 4, 5]), &set(&[1, 2, 3, 4]));
        assert!((p.precision - 0.8).abs() < 1e-12);
        assert!((p.recall - 1.0).abs() < 1e-12);
        assert!((p.f1 - 16.0 / 18.0).abs() < 1e-12);
    }

    #[test]
    fn histogram_has_exact_one_bin() {
        let s = score_explanations(&[(set(&[1]), set(&[1])), (set(&[1, 2]), set(&[1]))]);
        assert_eq!(s.f1_histogram.len(), 11);
        assert_eq!(s.f1_histogram[10].count, 1);
        assert_eq!(s.f1_histogram[6].count, 1);
    }

    #[test]
    fn missing_prediction_is_reported() {
        let probe = Probe {
            id: "r#s0".into(),
            base_id: "r".into(),
            removed_sentence: 0,
            category: ProbeCategory::CriticalRemoved,
            expected: false,
            theory_formal: String::new(),
            statement_formal: String::new(),
        };
        let err = score_predictions(&[probe], &[Prediction { id: "r".into(), answer: true }]).unwrap_err();
        assert!(matches!(err, AnalysisError::MissingPrediction(id) if id == "r#s0"));
    }
}
