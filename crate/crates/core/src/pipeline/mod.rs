//! End-to-end dataset construction, verification and statistics.

mod paraphrase;
mod scramble;

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::engine::{forward_chain, Model};
use crate::generator::{generate_theory, theory_rng, DiscardStats, GenerateError};
use crate::logic::{Literal, Theory, TheoryType};
use crate::questions::{generate_questions, Provenance, Question, QuestionOptions};
use crate::record::{read_records, write_records, Record, SchemaError, Split};
use crate::render::{render_question, render_theory};
use crate::syntax::{canonical_text, emit_literal, emit_theory, parse_literal, parse_theory, SyntaxError};

pub use paraphrase::{assemble_paraphrased, FactGroupTemplate, ParaphraseBank, ParaphraseConfig, RuleParaphrase};
pub use scramble::{scramble_records, scramble_text, ScrambleMap};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Theories per (type, negation) class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quotas {
    pub att_noneg: usize,
    pub att_neg: usize,
    pub rel_noneg: usize,
    pub rel_neg: usize,
}

impl Quotas {
    pub fn even(total: usize) -> Quotas {
        let q = total / 4;
        let r = total % 4;
        Quotas {
            att_noneg: q + usize::from(r > 0),
            att_neg: q + usize::from(r > 1),
            rel_noneg: q + usize::from(r > 2),
            rel_neg: q,
        }
    }

    pub fn total(&self) -> usize {
        self.att_noneg + self.att_neg + self.rel_noneg + self.rel_neg
    }

    pub fn classes(&self) -> [(Class, usize); 4] {
        [
            (Class::AttNoNeg, self.att_noneg),
            (Class::AttNeg, self.att_neg),
            (Class::RelNoNeg, self.rel_noneg),
            (Class::RelNeg, self.rel_neg),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Class {
    AttNoNeg,
    AttNeg,
    RelNoNeg,
    RelNeg,
}

impl Class {
    pub fn theory_type(self) -> TheoryType {
        match self {
            Class::AttNoNeg | Class::AttNeg => TheoryType::Type1Att,
            Class::RelNoNeg | Class::RelNeg => TheoryType::Type2Rel,
        }
    }

    pub fn negation(self) -> bool {
        matches!(self, Class::AttNeg | Class::RelNeg)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Class::AttNoNeg => "att-noneg",
            Class::AttNeg => "att-neg",
            Class::RelNoNeg => "rel-noneg",
            Class::RelNeg => "rel-neg",
        }
    }

    fn stream(self) -> u64 {
        self as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitRatios {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> SplitRatios {
        SplitRatios { train: 0.7, dev: 0.1, test: 0.2 }
    }
}

impl SplitRatios {
    /// Exact (train, dev, test) counts for `n` items; test takes the rest.
    pub fn counts(&self, n: usize) -> (usize, usize, usize) {
        let sum = self.train + self.dev + self.test;
        let train = ((n as f64) * self.train / sum).round() as usize;
        let dev = (((n as f64) * self.dev / sum).round() as usize).min(n - train.min(n));
        let train = train.min(n);
        (train, dev, n - train - dev)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub name: String,
    pub target_depth: u32,
    /// Number of theories; each contributes up to `4(d+1)` questions.
    pub total: usize,
    pub quotas: Quotas,
    pub split: SplitRatios,
    pub seed: u64,
    pub output: PathBuf,
    pub scramble: bool,
    pub paraphrase_bank: Option<PathBuf>,
    pub max_attempts: usize,
    pub oversample_blind_spot: bool,
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            name: "depth-3".into(),
            target_depth: 3,
            total: 100_000,
            quotas: Quotas::even(100_000),
            split: SplitRatios::default(),
            seed: 0,
            output: PathBuf::from("out/depth-3"),
            scramble: false,
            paraphrase_bank: None,
            max_attempts: 100_000,
            oversample_blind_spot: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("class {class}: theory {index}: {source} ({completed} theories completed)")]
    Generate { class: &'static str, index: usize, completed: usize, source: GenerateError },
    #[error("quotas sum to {quotas}, but total is {total}")]
    QuotaMismatch { quotas: usize, total: usize },
    #[error("split ratios must be non-negative with a positive sum")]
    BadSplit,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Schema { path: PathBuf, source: SchemaError },
    #[error("record {id}: {source}")]
    Syntax { id: String, source: SyntaxError },
    #[error("paraphrase bank: {0}")]
    Bank(String),
    #[error("paraphrase bank too small: {0}")]
    BankTooSmall(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.to_path_buf(), source }
}

/// Hex sha256 of the order-independent formal text.
pub fn theory_hash(t: &Theory) -> String {
    let digest = Sha256::digest(canonical_text(t).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A generated theory with its questions and rendering.
#[derive(Debug, Clone)]
pub struct Item {
    pub class: Class,
    pub index: usize,
    pub theory: Theory,
    pub model: Model,
    pub questions: Vec<Question>,
    pub context: String,
    pub attempts: usize,
    pub discards: DiscardStats,
}

fn make_item(class: Class, index: usize, stream: u64, cfg: &PipelineConfig) -> Result<Item, GenerateError> {
    let mut rng = theory_rng(cfg.seed, (class.stream() << 32) | stream);
    let g = generate_theory(class.theory_type(), class.negation(), cfg.target_depth, cfg.max_attempts, &mut rng)?;
    let options = QuestionOptions { oversample_blind_spot: cfg.oversample_blind_spot };
    let questions = generate_questions(&g.theory, &g.model, cfg.target_depth, options, &mut rng);
    let context = render_theory(&g.theory, &mut rng).context;
    Ok(Item {
        class,
        index,
        theory: g.theory,
        model: g.model,
        questions,
        context,
        attempts: g.attempts,
        discards: g.discards,
    })
}

/// Proofs stored with a record: those of the statement for proven
/// questions, of the negated literal for negated-proven ones.
fn record_proofs(model: &Model, q: &Question) -> Vec<crate::engine::ProofTree> {
    let target: Literal = match q.provenance {
        Provenance::Proven => q.statement.clone(),
        Provenance::NegatedProven => q.statement.negated(),
        Provenance::CwaFalse | Provenance::FlippedTrue => return Vec::new(),
    };
    model.proofs(&target).iter().map(|p| p.to_tree()).collect()
}

/// Records for one theory. Ids are `<class>-<index>-q<n>`.
pub fn item_records(item: &Item, split: Split) -> Vec<Record> {
    let formal = emit_theory(&item.theory);
    item.questions
        .iter()
        .enumerate()
        .map(|(n, q)| Record {
            id: format!("{}-{}-q{}", item.class.tag(), item.index, n),
            theory_formal: formal.clone(),
            context: item.context.clone(),
            question: render_question(&q.statement),
            statement_formal: emit_literal(&q.statement),
            answer: q.answer,
            depth: q.depth,
            provenance: q.provenance,
            proofs: record_proofs(&item.model, q),
            split,
        })
        .collect()
}

/// Generates every theory to quota (in parallel), drops duplicate theories
/// in favour of fresh draws, and assigns theory-level splits.
pub fn generate_items(cfg: &PipelineConfig) -> Result<Vec<(Item, Split)>, PipelineError> {
    if cfg.quotas.total() != cfg.total {
        return Err(PipelineError::QuotaMismatch { quotas: cfg.quotas.total(), total: cfg.total });
    }
    let r = cfg.split;
    if r.train < 0.0 || r.dev < 0.0 || r.test < 0.0 || r.train + r.dev + r.test <= 0.0 {
        return Err(PipelineError::BadSplit);
    }
    let jobs: Vec<(Class, usize)> =
        cfg.quotas.classes().iter().flat_map(|&(c, n)| (0..n).map(move |i| (c, i))).collect();
    let results: Vec<Result<Item, (Class, usize, GenerateError)>> =
        jobs.par_iter().map(|&(c, i)| make_item(c, i, i as u64, cfg).map_err(|e| (c, i, e))).collect();

    let mut items = Vec::with_capacity(results.len());
    let mut seen = HashSet::new();
    let mut spare: BTreeMap<Class, u64> = BTreeMap::new();
    for res in results {
        let mut item =
            res.map_err(|(c, i, source)| PipelineError::Generate { class: c.tag(), index: i, completed: 0, source })?;
        // duplicates are replaced by draws from streams beyond the quota
        while !seen.insert(theory_hash(&item.theory)) {
            let quota = cfg.quotas.classes().iter().find(|(c, _)| *c == item.class).map_or(0, |x| x.1);
            let next = spare.entry(item.class).or_insert(quota as u64);
            let stream = *next;
            *next += 1;
            let discards = item.discards;
            item = make_item(item.class, item.index, stream, cfg).map_err(|source| PipelineError::Generate {
                class: item.class.tag(),
                index: item.index,
                completed: items.len(),
                source,
            })?;
            item.discards.add(&discards);
        }
        items.push(item);
    }

    let (n_train, n_dev, _) = cfg.split.counts(items.len());
    let mut positions: Vec<usize> = (0..items.len()).collect();
    positions.shuffle(&mut theory_rng(cfg.seed, u64::MAX));
    let mut splits = vec![Split::Test; items.len()];
    for (rank, &p) in positions.iter().enumerate() {
        splits[p] = if rank < n_train {
            Split::Train
        } else if rank < n_train + n_dev {
            Split::Dev
        } else {
            Split::Test
        };
    }
    Ok(items.into_iter().zip(splits).collect())
}

/// Corpus statistics shared by the manifest and the `stats` verb.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub theories: BTreeMap<Split, usize>,
    pub records: BTreeMap<Split, usize>,
    pub answers: BTreeMap<String, usize>,
    pub provenance: BTreeMap<Provenance, usize>,
    pub depth_histogram: BTreeMap<u32, usize>,
    pub mean_sentences: f64,
}

pub fn corpus_stats(records: &[Record]) -> CorpusStats {
    let mut s = CorpusStats::default();
    let mut theories: HashSet<(Split, &str)> = HashSet::new();
    let mut sentence_total = 0usize;
    for r in records {
        *s.records.entry(r.split).or_default() += 1;
        *s.answers.entry(r.answer.to_string()).or_default() += 1;
        *s.provenance.entry(r.provenance).or_default() += 1;
        *s.depth_histogram.entry(r.depth).or_default() += 1;
        if theories.insert((r.split, r.theory_formal.as_str())) {
            *s.theories.entry(r.split).or_default() += 1;
            sentence_total += r.theory_formal.lines().filter(|l| !l.trim().is_empty()).count();
        }
    }
    if !theories.is_empty() {
        s.mean_sentences = sentence_total as f64 / theories.len() as f64;
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: serde_json::Value,
    pub stats: CorpusStats,
    pub generated_theories: BTreeMap<Class, usize>,
    pub attempts: u64,
    pub discards: DiscardStats,
    pub discards_by_class: BTreeMap<Class, DiscardStats>,
    pub question_depths_by_class: BTreeMap<Class, BTreeMap<u32, usize>>,
}

impl Manifest {
    /// Manifest for records that were transformed or assembled rather than
    /// generated, so it carries no generation counts.
    pub fn for_records(config: serde_json::Value, records: &[Record]) -> Manifest {
        Manifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: TOOL_VERSION.into(),
            config,
            stats: corpus_stats(records),
            generated_theories: BTreeMap::new(),
            attempts: 0,
            discards: DiscardStats::default(),
            discards_by_class: BTreeMap::new(),
            question_depths_by_class: BTreeMap::new(),
        }
    }
}

fn config_echo(cfg: &PipelineConfig) -> serde_json::Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    if let Some(o) = v.as_object_mut() {
        // the output location does not affect content
        o.remove("output");
    }
    v
}

pub fn write_dataset(dir: &Path, records: &[Record], manifest: &Manifest) -> Result<(), PipelineError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for split in Split::ALL {
        let path = dir.join(format!("{split}.jsonl"));
        let part: Vec<Record> = records.iter().filter(|r| r.split == split).cloned().collect();
        let f = File::create(&path).map_err(io_err(&path))?;
        write_records(BufWriter::new(f), &part).map_err(io_err(&path))?;
    }
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))
}

/// Builds a synthetic dataset and writes it to `cfg.output`.
pub fn build_dataset(cfg: &PipelineConfig) -> Result<Manifest, PipelineError> {
    let items = generate_items(cfg)?;
    let mut records = Vec::new();
    let mut generated: BTreeMap<Class, usize> = BTreeMap::new();
    let mut discards = DiscardStats::default();
    let mut by_class: BTreeMap<Class, DiscardStats> = BTreeMap::new();
    let mut depths: BTreeMap<Class, BTreeMap<u32, usize>> = BTreeMap::new();
    let mut attempts = 0u64;
    for (item, split) in &items {
        records.extend(item_records(item, *split));
        *generated.entry(item.class).or_default() += 1;
        discards.add(&item.discards);
        by_class.entry(item.class).or_default().add(&item.discards);
        attempts += item.attempts as u64;
        for q in &item.questions {
            *depths.entry(item.class).or_default().entry(q.depth).or_default() += 1;
        }
    }
    if cfg.scramble {
        records = scramble_records(&records, cfg.seed);
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: TOOL_VERSION.into(),
        config: config_echo(cfg),
        stats: corpus_stats(&records),
        generated_theories: generated,
        attempts,
        discards,
        discards_by_class: by_class,
        question_depths_by_class: depths,
    };
    write_dataset(&cfg.output, &records, &manifest)?;
    Ok(manifest)
}

/// Reads `train.jsonl`, `dev.jsonl` and `test.jsonl` from a dataset directory.
pub fn read_dataset(dir: &Path) -> Result<Vec<Record>, PipelineError> {
    let mut out = Vec::new();
    for split in Split::ALL {
        let path = dir.join(format!("{split}.jsonl"));
        let f = File::open(&path).map_err(io_err(&path))?;
        let mut part =
            read_records(BufReader::new(f)).map_err(|source| PipelineError::Schema { path: path.clone(), source })?;
        out.append(&mut part);
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub records: usize,
    pub theories: usize,
    pub mismatches: Vec<String>,
    /// Theories appearing in more than one split.
    pub split_overlap: usize,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty() && self.split_overlap == 0
    }
}

/// Re-derives every record's answer and depth with the engine and checks
/// split disjointness.
pub fn verify_records(records: &[Record]) -> Result<VerifyReport, PipelineError> {
    let mut by_theory: BTreeMap<&str, Vec<&Record>> = BTreeMap::new();
    for r in records {
        by_theory.entry(r.theory_formal.as_str()).or_default().push(r);
    }
    let mut splits_of: BTreeMap<String, HashSet<Split>> = BTreeMap::new();
    let checked: Vec<Result<(String, Vec<String>), PipelineError>> = by_theory
        .par_iter()
        .map(|(formal, recs)| {
            let theory =
                parse_theory(formal).map_err(|source| PipelineError::Syntax { id: recs[0].id.clone(), source })?;
            let model = forward_chain(&theory);
            let mut bad = Vec::new();
            for r in recs {
                let statement = parse_literal(&r.statement_formal)
                    .map_err(|source| PipelineError::Syntax { id: r.id.clone(), source })?;
                if let Some(problem) = check_record(&model, &statement, r) {
                    bad.push(format!("{}: {problem}", r.id));
                }
            }
            Ok((theory_hash(&theory), bad))
        })
        .collect();
    let mut report = VerifyReport { records: records.len(), theories: by_theory.len(), ..Default::default() };
    for (res, (_, recs)) in checked.into_iter().zip(&by_theory) {
        let (hash, mut bad) = res?;
        report.mismatches.append(&mut bad);
        splits_of.entry(hash).or_default().extend(recs.iter().map(|r| r.split));
    }
    report.split_overlap = splits_of.values().filter(|s| s.len() > 1).count();
    Ok(report)
}

fn check_record(model: &Model, statement: &Literal, r: &Record) -> Option<String> {
    match model.answer(statement) {
        Ok(a) if a == r.answer => {}
        Ok(a) => return Some(format!("answer {} but engine says {a}", r.answer)),
        Err(e) => return Some(e.to_string()),
    }
    if r.answer != r.provenance.answer() {
        return Some(format!("answer {} contradicts provenance {:?}", r.answer, r.provenance));
    }
    let depth = match r.provenance {
        Provenance::Proven => model.depth(statement),
        Provenance::NegatedProven => model.depth(&statement.negated()),
        Provenance::CwaFalse | Provenance::FlippedTrue => model.failure_depth(&statement.atom).ok(),
    };
    match depth {
        Some(d) if d == r.depth => None,
        Some(d) => Some(format!("depth {} but engine says {d}", r.depth)),
        None => Some(format!("no depth for {:?} statement", r.provenance)),
    }
}

pub fn verify_dataset(dir: &Path) -> Result<VerifyReport, PipelineError> {
    verify_records(&read_dataset(dir)?)
}
