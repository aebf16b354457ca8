//! Command-line surface: run configuration, the four commands and their
//! output files.
//!
//! A run is configured by an optional JSON file (`--config`) whose fields are
//! then overridden by command-line flags. Commands validate everything and
//! finish all computation before writing, and each output is written
//! atomically.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzSpec;
use crate::error::{Error, Result};
use crate::evaluation::{evaluate, EvalReport, Protocol};
use crate::io::{
    config_hash, ingest_triples, read_named_triples, write_atomic, Checkpoint, Provenance,
};
use crate::noise::{scheme_bias_sweep, NoiseModel, SweepConfig, SweepRow, ThetaPolicy};
use crate::resources::{estimate_resources, ResourceReport};
use crate::scoring::{derive_seed, scheme_equivalence, EquivalenceRow, ScoreMode, ScoreScheme};
use crate::training::{
    score_triple, train, GradientMethod, KnowledgeGraph, OptimizerKind, TrainConfig, TrainMode,
    Triple,
};

pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const LOSS_FILE: &str = "loss.csv";
pub const RUN_METADATA_FILE: &str = "run_metadata.json";
pub const EVAL_JSON_FILE: &str = "eval.json";
pub const EVAL_CSV_FILE: &str = "eval.csv";
pub const EQUIVALENCE_FILE: &str = "equivalence.csv";
pub const RESOURCES_FILE: &str = "resources.csv";
pub const NOISE_FILE: &str = "noise.csv";
pub const NOISE_RANDOM_FILE: &str = "noise_random.csv";
pub const COMPARE_METADATA_FILE: &str = "compare_metadata.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub n_values: Vec<usize>,
    pub equivalence_samples: usize,
    pub noise_samples: usize,
    pub readout_fidelities: Vec<f64>,
    pub two_qubit_errors: Vec<f64>,
    /// `None` scores noisy distributions exactly.
    pub shots: Option<u64>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            n_values: (1..=6).collect(),
            equivalence_samples: 200,
            noise_samples: 50,
            readout_fidelities: vec![0.95, 0.99],
            two_qubit_errors: vec![0.0, 0.005, 0.01],
            shots: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Training triples; also used as the filter set during evaluation.
    pub dataset: Option<PathBuf>,
    pub test: Option<PathBuf>,
    /// Checkpoint read by `evaluate` and `score`; written by `train`
    /// (default `<output_dir>/checkpoint.json`).
    pub checkpoint: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub train: TrainConfig,
    pub protocol: Protocol,
    /// Sampled scoring for `evaluate` and `score`; exact when absent.
    pub shots: Option<u64>,
    pub compare: CompareConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: None,
            test: None,
            checkpoint: None,
            output_dir: PathBuf::from("out"),
            train: TrainConfig::default(),
            protocol: Protocol::Filtered,
            shots: None,
            compare: CompareConfig::default(),
        }
    }
}

fn require<'a>(path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    let p = path
        .as_deref()
        .ok_or_else(|| Error::InvalidConfig(format!("{what} path is required")))?;
    if !p.is_file() {
        return Err(Error::InvalidConfig(format!(
            "{what} {} does not exist",
            p.display()
        )));
    }
    Ok(p)
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.display()))
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    fn checkpoint_out(&self) -> PathBuf {
        self.checkpoint
            .clone()
            .unwrap_or_else(|| self.output_dir.join(CHECKPOINT_FILE))
    }

    fn score_mode(&self) -> Result<ScoreMode> {
        match self.shots {
            None => Ok(ScoreMode::Exact),
            Some(0) => Err(Error::ZeroShots),
            Some(shots) => Ok(ScoreMode::Sampled {
                shots,
                seed: derive_seed(self.train.seed, 0, 0),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config: RunConfig,
    pub config_hash: String,
    pub n_entities: usize,
    pub n_relations: usize,
    pub n_triples: usize,
    pub duplicates_skipped: usize,
    pub n_examples: usize,
    pub final_loss: f64,
    pub wall_time_seconds: f64,
}

/// Trains on `dataset` and writes the checkpoint, `loss.csv` and
/// `run_metadata.json`.
pub fn command_train(config: &RunConfig) -> Result<RunMetadata> {
    let dataset = require(&config.dataset, "dataset")?;
    config.train.validate()?;
    let start = Instant::now();
    let ingested = ingest_triples(dataset)?;
    if ingested.duplicates > 0 {
        eprintln!(
            "warning: skipped {} duplicate triple(s)",
            ingested.duplicates
        );
    }
    let kg = &ingested.kg;
    let outcome = train(kg, &config.train)?;
    let provenance = Provenance {
        config_hash: config_hash(&config.train),
        scheme: config.train.scheme,
        epochs: config.train.epochs,
        final_loss: outcome.final_loss(),
    };
    let checkpoint = Checkpoint::new(kg, &outcome.params, provenance.clone())?;
    let mut loss_csv = String::from("epoch,loss\n");
    for (i, l) in outcome.loss_history.iter().enumerate() {
        loss_csv.push_str(&format!("{},{}\n", i + 1, l));
    }
    let meta = RunMetadata {
        config: config.clone(),
        config_hash: provenance.config_hash,
        n_entities: kg.n_entities(),
        n_relations: kg.n_relations(),
        n_triples: kg.triples().len(),
        duplicates_skipped: ingested.duplicates,
        n_examples: outcome.dataset.len(),
        final_loss: provenance.final_loss,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let meta_json = serde_json::to_string_pretty(&meta)? + "\n";

    checkpoint.save(&config.checkpoint_out())?;
    write_atomic(&config.output_dir.join(LOSS_FILE), loss_csv.as_bytes())?;
    write_atomic(
        &config.output_dir.join(RUN_METADATA_FILE),
        meta_json.as_bytes(),
    )?;
    Ok(meta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutput {
    pub report: EvalReport,
    pub scheme: ScoreScheme,
    pub shots: Option<u64>,
    /// Test rows naming an entity or relation missing from the checkpoint.
    pub skipped: usize,
    pub skipped_lines: Vec<usize>,
}

fn resolve(dict: &KnowledgeGraph, h: &str, r: &str, t: &str) -> Option<Triple> {
    Some(Triple::new(
        dict.entity_index(h)?,
        dict.relation_index(r)?,
        dict.entity_index(t)?,
    ))
}

/// Ranks the test triples against a checkpoint and writes `eval.json` and
/// `eval.csv`.
pub fn command_evaluate(config: &RunConfig) -> Result<EvalOutput> {
    let ckpt_path = require(&config.checkpoint, "checkpoint")?;
    let test_path = require(&config.test, "test set")?;
    let filter_path = match &config.dataset {
        Some(_) => Some(require(&config.dataset, "dataset")?),
        None => None,
    };
    let mode = config.score_mode()?;
    let scheme = config.train.scheme;
    let ckpt = Checkpoint::load(ckpt_path)?;
    let params = ckpt.params()?;
    let mut kg = ckpt.dictionary();

    let mut test = Vec::new();
    let mut skipped_lines = Vec::new();
    for row in read_named_triples(test_path)? {
        match resolve(&kg, &row.head, &row.relation, &row.tail) {
            Some(t) => test.push(t),
            None => skipped_lines.push(row.line),
        }
    }
    if !skipped_lines.is_empty() {
        eprintln!(
            "warning: skipped {} test triple(s) with unknown names (lines {:?})",
            skipped_lines.len(),
            skipped_lines
        );
    }
    if test.is_empty() {
        return Err(Error::InvalidConfig(
            "no test triple could be resolved against the checkpoint".into(),
        ));
    }
    if let Some(p) = filter_path {
        for row in read_named_triples(p)? {
            if let Some(t) = resolve(&kg, &row.head, &row.relation, &row.tail) {
                kg.add_triple(t)?;
            }
        }
    }
    for &t in &test {
        kg.add_triple(t)?;
    }
    let report = evaluate(&params, &test, &kg, config.protocol, scheme, mode)?;
    let out = EvalOutput {
        report,
        scheme,
        shots: config.shots,
        skipped: skipped_lines.len(),
        skipped_lines,
    };
    let json = serde_json::to_string_pretty(&out)? + "\n";
    let csv = format!("{}\n{}\n", EvalReport::CSV_HEADER, out.report.csv_row());
    write_atomic(&config.output_dir.join(EVAL_JSON_FILE), json.as_bytes())?;
    write_atomic(&config.output_dir.join(EVAL_CSV_FILE), csv.as_bytes())?;
    Ok(out)
}

/// Score of one named triple under the configured scheme and mode.
pub fn command_score(config: &RunConfig, head: &str, relation: &str, tail: &str) -> Result<f64> {
    let ckpt = Checkpoint::load(require(&config.checkpoint, "checkpoint")?)?;
    let mode = config.score_mode()?;
    let dict = ckpt.dictionary();
    let triple = Triple::new(
        dict.entity_index(head)
            .ok_or_else(|| unknown("entity", head))?,
        dict.relation_index(relation)
            .ok_or_else(|| unknown("relation", relation))?,
        dict.entity_index(tail)
            .ok_or_else(|| unknown("entity", tail))?,
    );
    score_triple(&ckpt.params()?, &triple, config.train.scheme, mode)
}

fn unknown(kind: &'static str, name: &str) -> Error {
    Error::UnknownName {
        kind,
        name: name.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOutput {
    pub equivalence: Vec<EquivalenceRow>,
    pub resources: Vec<ResourceReport>,
    pub noise_perfect_overlap: Vec<SweepRow>,
    pub noise_random: Vec<SweepRow>,
}

fn sweep_grid(
    c: &CompareConfig,
    layers: usize,
    seed: u64,
    policy: ThetaPolicy,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &f in &c.readout_fidelities {
        for &p2 in &c.two_qubit_errors {
            rows.extend(scheme_bias_sweep(&SweepConfig {
                n_values: c.n_values.clone(),
                n_layers: layers,
                samples: c.noise_samples,
                policy,
                model: NoiseModel::new(f, p2)?,
                shots: c.shots,
                seed,
            })?);
        }
    }
    Ok(rows)
}

fn csv<T>(header: &str, rows: &[T], row: impl Fn(&T) -> String) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&row(r));
        s.push('\n');
    }
    s
}

/// Scheme equivalence, resource counts and noise bias sweeps, one CSV each.
/// `noise.csv` uses perfect-overlap parameters (exact score 1), so its
/// compute-uncompute rows follow the `F^n` readout law; `noise_random.csv`
/// repeats the sweep with independent random parameters.
pub fn command_compare_schemes(config: &RunConfig) -> Result<CompareOutput> {
    let c = &config.compare;
    let layers = config.train.n_layers;
    let seed = config.train.seed;
    if c.n_values.is_empty() || c.equivalence_samples == 0 || c.noise_samples == 0 {
        return Err(Error::InvalidConfig(
            "compare needs register sizes and samples".into(),
        ));
    }
    if c.readout_fidelities.is_empty() || c.two_qubit_errors.is_empty() {
        return Err(Error::InvalidConfig("compare needs a noise grid".into()));
    }
    let equivalence = c
        .n_values
        .iter()
        .map(|&n| scheme_equivalence(&AnsatzSpec::new(n, layers)?, c.equivalence_samples, seed))
        .collect::<Result<Vec<_>>>()?;
    let spec = config.train.spec()?;
    let resources: Vec<ResourceReport> = ScoreScheme::ALL
        .iter()
        .map(|&s| estimate_resources(s, &spec))
        .collect();
    let out = CompareOutput {
        equivalence,
        resources,
        noise_perfect_overlap: sweep_grid(c, layers, seed, ThetaPolicy::PerfectOverlap)?,
        noise_random: sweep_grid(c, layers, seed, ThetaPolicy::Random)?,
    };
    let dir = &config.output_dir;
    let files = [
        (
            EQUIVALENCE_FILE,
            csv(
                EquivalenceRow::CSV_HEADER,
                &out.equivalence,
                EquivalenceRow::csv_row,
            ),
        ),
        (
            RESOURCES_FILE,
            csv(
                ResourceReport::CSV_HEADER,
                &out.resources,
                ResourceReport::csv_row,
            ),
        ),
        (
            NOISE_FILE,
            csv(
                SweepRow::CSV_HEADER,
                &out.noise_perfect_overlap,
                SweepRow::csv_row,
            ),
        ),
        (
            NOISE_RANDOM_FILE,
            csv(SweepRow::CSV_HEADER, &out.noise_random, SweepRow::csv_row),
        ),
    ];
    let meta = serde_json::json!({
        "config": config,
        "noise_policies": { NOISE_FILE: "perfect-overlap", NOISE_RANDOM_FILE: "random" },
        "shots_column": "0 means the noisy distribution was scored exactly",
    });
    for (name, body) in &files {
        write_atomic(&dir.join(name), body.as_bytes())?;
    }
    write_atomic(
        &dir.join(COMPARE_METADATA_FILE),
        (serde_json::to_string_pretty(&meta)? + "\n").as_bytes(),
    )?;
    Ok(out)
}

#[derive(Debug, Parser)]
#[command(
    name = "vqkge",
    version,
    about = "Variational quantum knowledge-graph embeddings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train embeddings on a triples file.
    Train,
    /// Rank test triples against a checkpoint.
    Evaluate,
    /// Print the score of one triple.
    Score {
        head: String,
        relation: String,
        tail: String,
    },
    /// Compare the three scoring schemes: equivalence, resources, noise.
    CompareSchemes,
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub dataset: Option<PathBuf>,
    #[arg(long, global = true)]
    pub test: Option<PathBuf>,
    #[arg(long, global = true)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long = "out", global = true)]
    pub output_dir: Option<PathBuf>,
    /// switch, swap or compute-uncompute.
    #[arg(long, global = true)]
    pub scheme: Option<ScoreScheme>,
    #[arg(long, global = true)]
    pub qubits: Option<usize>,
    #[arg(long, global = true)]
    pub layers: Option<usize>,
    #[arg(long, global = true)]
    pub epochs: Option<usize>,
    #[arg(long, global = true)]
    pub lr: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub batch_size: Option<usize>,
    #[arg(long, global = true)]
    pub negatives: Option<usize>,
    /// Shots per score; exact simulation when absent.
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    /// raw or filtered.
    #[arg(long, global = true, value_parser = parse_protocol)]
    pub protocol: Option<Protocol>,
    /// sgd or adam.
    #[arg(long, global = true, value_parser = parse_optimizer)]
    pub optimizer: Option<OptimizerKind>,
    /// Use SPSA gradients with this perturbation.
    #[arg(long, global = true)]
    pub spsa: Option<f64>,
}

fn parse_protocol(s: &str) -> std::result::Result<Protocol, String> {
    match s {
        "raw" => Ok(Protocol::Raw),
        "filtered" => Ok(Protocol::Filtered),
        _ => Err(format!("unknown protocol {s:?} (expected raw or filtered)")),
    }
}

fn parse_optimizer(s: &str) -> std::result::Result<OptimizerKind, String> {
    match s {
        "sgd" => Ok(OptimizerKind::Sgd),
        "adam" => Ok(OptimizerKind::default()),
        _ => Err(format!("unknown optimizer {s:?} (expected sgd or adam)")),
    }
}

impl Overrides {
    /// Loads `--config` (or defaults) and applies every given flag.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_json_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.dataset {
            c.dataset = Some(v.clone());
        }
        if let Some(v) = &self.test {
            c.test = Some(v.clone());
        }
        if let Some(v) = &self.checkpoint {
            c.checkpoint = Some(v.clone());
        }
        if let Some(v) = &self.output_dir {
            c.output_dir = v.clone();
        }
        let t = &mut c.train;
        if let Some(v) = self.scheme {
            t.scheme = v;
        }
        if let Some(v) = self.qubits {
            t.n_qubits = v;
        }
        if let Some(v) = self.layers {
            t.n_layers = v;
        }
        if let Some(v) = self.epochs {
            t.epochs = v;
        }
        if let Some(v) = self.lr {
            t.learning_rate = v;
        }
        if let Some(v) = self.seed {
            t.seed = v;
        }
        if let Some(v) = self.batch_size {
            t.batch_size = Some(v);
        }
        if let Some(v) = self.negatives {
            t.negatives_per_positive = v;
        }
        if let Some(v) = self.optimizer {
            t.optimizer = v;
        }
        if let Some(v) = self.spsa {
            t.gradient = GradientMethod::Spsa { perturbation: v };
        }
        if let Some(v) = self.shots {
            t.mode = TrainMode::Sampled { shots: v };
            c.shots = Some(v);
        }
        if let Some(v) = self.protocol {
            c.protocol = v;
        }
        Ok(c)
    }
}

/// Exit code for a command result: 0 on success, 1 for invalid input, 2 for
/// failures while running.
pub fn exit_code<T>(result: &Result<T>) -> i32 {
    match result {
        Ok(_) => 0,
        Err(e) if e.is_validation() => 1,
        Err(_) => 2,
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let config = cli.overrides.resolve()?;
    match &cli.command {
        Command::Train => {
            let meta = command_train(&config)?;
            println!("final loss {}", meta.final_loss);
            println!("checkpoint {}", config.checkpoint_out().display());
        }
        Command::Evaluate => {
            let out = command_evaluate(&config)?;
            println!("{}", EvalReport::CSV_HEADER);
            println!("{}", out.report.csv_row());
        }
        Command::Score {
            head,
            relation,
            tail,
        } => {
            println!("{}", command_score(&config, head, relation, tail)?);
        }
        Command::CompareSchemes => {
            command_compare_schemes(&config)?;
            println!("wrote {}", config.output_dir.display());
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Errors are reported on standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = dispatch(&cli);
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    exit_code(&result)
}
