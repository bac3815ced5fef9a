use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use rulebase::analysis::{
    build_probes, engine_explanations, engine_predictions, explanation_pairs, score_explanations, score_predictions,
    ExplanationPrediction, Prediction, Probe,
};
use rulebase::corpora::{generate_scenarios, list_corpora, load_corpus};
use rulebase::engine::forward_chain;
use rulebase::explain::explain;
use rulebase::generator::theory_rng;
use rulebase::pipeline::{
    assemble_paraphrased, build_dataset, corpus_stats, read_dataset, scramble_records, verify_dataset, write_dataset,
    Manifest, ParaphraseBank, ParaphraseConfig, PipelineConfig, Quotas,
};
use rulebase::service::{serve, ServiceConfig, SizeCap};
use rulebase::syntax::{emit_theory, parse_literal, parse_theory};

#[derive(Parser)]
#[command(name = "rulebase", version, about = "Rule theories, stratified reasoning and synthetic QA datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset from a TOML config and flag overrides.
    Generate(GenerateArgs),
    /// Replace every English word systematically across a dataset.
    Scramble {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, env = "RULEBASE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Build a dataset from paraphrased fact-group templates and rules.
    AssemblePara(AssembleArgs),
    /// Re-check every answer and depth in a dataset.
    Verify { dataset: PathBuf },
    /// Print corpus statistics for a dataset.
    Stats { dataset: PathBuf },
    /// Write one sentence-removal probe per (record, sentence) pair.
    Probe {
        dataset: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Also write the engine's own answers to the probes.
        #[arg(long)]
        engine_predictions: Option<PathBuf>,
    },
    /// Score probe predictions as a flip table.
    ScoreFlips {
        #[arg(long)]
        probes: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
    },
    /// Score predicted critical-sentence sets against proofs.
    ScoreExplanations {
        dataset: PathBuf,
        /// JSON Lines of `{"id": ..., "critical": [...]}`; the engine's own
        /// sets are used when omitted.
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Answer one statement against a theory file.
    Prove { theory: PathBuf, statement: String },
    /// List bundled corpora, or print one with optional scenarios.
    Corpus {
        name: Option<String>,
        #[arg(long, default_value_t = 0)]
        scenarios: usize,
        #[arg(long, env = "RULEBASE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    depth: Option<u32>,
    /// Number of theories, split evenly across the four classes.
    #[arg(long)]
    total: Option<usize>,
    #[arg(long, env = "RULEBASE_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    scramble: bool,
    #[arg(long)]
    max_attempts: Option<usize>,
    #[arg(long)]
    oversample_blind_spot: bool,
}

#[derive(Args)]
struct AssembleArgs {
    #[arg(long)]
    output: PathBuf,
    /// Bank JSON; the bundled sample bank when omitted.
    #[arg(long)]
    bank: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    theories: usize,
    #[arg(long, env = "RULEBASE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    min_depth: u32,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Largest theory accepted, in sentences.
    #[arg(long, default_value_t = 200)]
    size_cap: usize,
    #[arg(long, default_value_t = 12)]
    entity_cap: usize,
    /// Directory served under `/`.
    #[arg(long)]
    static_dir: Option<PathBuf>,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?);
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn pipeline_config(args: GenerateArgs) -> Result<PipelineConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => PipelineConfig::default(),
    };
    if let Some(v) = args.name {
        cfg.name = v;
    }
    if let Some(v) = args.depth {
        cfg.target_depth = v;
    }
    if let Some(v) = args.total {
        cfg.total = v;
        cfg.quotas = Quotas::even(v);
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.output {
        cfg.output = v;
    }
    if let Some(v) = args.max_attempts {
        cfg.max_attempts = v;
    }
    cfg.scramble |= args.scramble;
    cfg.oversample_blind_spot |= args.oversample_blind_spot;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate(args) => {
            let cfg = pipeline_config(args)?;
            let manifest = build_dataset(&cfg)?;
            eprintln!("wrote {}", cfg.output.display());
            print_json(&manifest.stats)?;
        }
        Command::Scramble { input, output, seed } => {
            let records = scramble_records(&read_dataset(&input)?, seed);
            let echo = serde_json::json!({ "scramble_of": input, "seed": seed });
            write_dataset(&output, &records, &Manifest::for_records(echo, &records))?;
            eprintln!("wrote {}", output.display());
        }
        Command::AssemblePara(args) => {
            let bank = match &args.bank {
                Some(p) => ParaphraseBank::from_json(&fs::read_to_string(p)?)?,
                None => ParaphraseBank::sample(),
            };
            let cfg = ParaphraseConfig {
                theories: args.theories,
                seed: args.seed,
                min_depth: args.min_depth,
                ..ParaphraseConfig::default()
            };
            let records = assemble_paraphrased(&bank, &cfg)?;
            let echo = serde_json::to_value(&cfg)?;
            write_dataset(&args.output, &records, &Manifest::for_records(echo, &records))?;
            eprintln!("wrote {}", args.output.display());
        }
        Command::Verify { dataset } => {
            let report = verify_dataset(&dataset)?;
            print_json(&report)?;
            if !report.ok() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Stats { dataset } => print_json(&corpus_stats(&read_dataset(&dataset)?))?,
        Command::Probe { dataset, output, engine_predictions: preds } => {
            let records = read_dataset(&dataset)?;
            let probes = build_probes(&records)?;
            write_jsonl(&output, &probes)?;
            if let Some(path) = preds {
                write_jsonl(&path, &engine_predictions(&probes, &records)?)?;
            }
            eprintln!("{} probes", probes.len());
        }
        Command::ScoreFlips { probes, predictions } => {
            let probes: Vec<Probe> = read_jsonl(&probes)?;
            let predictions: Vec<Prediction> = read_jsonl(&predictions)?;
            print_json(&score_predictions(&probes, &predictions)?)?;
        }
        Command::ScoreExplanations { dataset, predictions } => {
            let records = read_dataset(&dataset)?;
            let predicted: Vec<ExplanationPrediction> = match predictions {
                Some(p) => read_jsonl(&p)?,
                None => engine_explanations(&records)?,
            };
            let mut score = score_explanations(&explanation_pairs(&records, &predicted)?);
            score.per_question.clear();
            print_json(&score)?;
        }
        Command::Prove { theory, statement } => {
            let text = fs::read_to_string(&theory).with_context(|| format!("reading {}", theory.display()))?;
            let t = parse_theory(&text)?;
            let s = parse_literal(&statement)?;
            print_json(&explain(&forward_chain(&t), &s)?)?;
        }
        Command::Corpus { name: None, .. } => print_json(&list_corpora())?,
        Command::Corpus { name: Some(name), scenarios, seed } => {
            let corpus = load_corpus(&name)?;
            if scenarios == 0 {
                print_json(&corpus)?;
            } else {
                if corpus.scenario.is_none() {
                    bail!("corpus `{name}` has no scenario sidecar");
                }
                for t in generate_scenarios(&corpus, scenarios, &mut theory_rng(seed, 0)) {
                    println!("{}", emit_theory(&t));
                }
            }
        }
        Command::Serve(args) => {
            let addr: SocketAddr = format!("{}:{}", args.host, args.port).parse()?;
            let config = ServiceConfig {
                size_cap: SizeCap { sentences: args.size_cap, entities: args.entity_cap },
                static_dir: args.static_dir,
            };
            let rt = tokio::runtime::Runtime::new()?;
            eprintln!("listening on http://{addr}");
            rt.block_on(serve(addr, config))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            // library errors already embed their sources in the message
            let mut message = e.to_string();
            for cause in e.chain().skip(1) {
                let text = cause.to_string();
                if !message.contains(&text) {
                    message = format!("{message}: {text}");
                }
            }
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
