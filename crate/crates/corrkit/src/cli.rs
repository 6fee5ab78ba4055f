//! The `corrkit` command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime};

use clap::{Args, Parser, Subcommand};
use corrkit_core::datagen::{DatasetRecord, GenerateError, GenerationConfig, Generator, Partition};
use corrkit_core::eval::{format_report, score_record, EvalOutcome};
use corrkit_core::tagger::{repair_labels, train, TaggerModel, TrainConfig, TrainError};
use corrkit_core::{merge, tokenize, LabelTag, TaggedPair};
use serde_json::json;

use crate::adapter::{adapter_check, ExternalTagger};
use crate::data::{default_lexicon, default_templates, load_lexicon_dir, load_template_dir};
use crate::dataset::{read_jsonl, to_json_line, DatasetError};
use crate::manifest::RunManifest;
use crate::mock::{serve, MockMode};
use crate::model_file::{load_model, save_model, ModelFileError};
use crate::report::ReportJson;

#[derive(Debug, Parser)]
#[command(
    name = "corrkit",
    version,
    about = "Resolve corrections of user requests by token labeling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize train/val/test datasets from templates and lexicons.
    Generate(GenerateArgs),
    /// Train the baseline tagger.
    Train(TrainArgs),
    /// Correct one request and print the result as JSON.
    Correct(CorrectArgs),
    /// Score a labeler on a dataset.
    Eval(EvalArgs),
    /// Check that an external adapter speaks tagger/1.
    AdapterCheck(AdapterCheckArgs),
    #[command(hide = true)]
    MockAdapter(MockArgs),
}

fn parse_sizes(s: &str) -> Result<[usize; 4], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let sizes: Vec<usize> = parts
        .iter()
        .map(|p| p.parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    sizes
        .try_into()
        .map_err(|v: Vec<usize>| format!("expected 4 comma-separated sizes, got {}", v.len()))
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Directory with train.toml, unknown.toml and ood.toml [default: shipped set]
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// Directory of lexicon *.toml files [default: shipped set]
    #[arg(long)]
    pub lexicons: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, env = "CORRKIT_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = GenerationConfig::DEFAULT_TRAIN_SIZE)]
    pub train_size: usize,
    /// Unknown entities, unknown templates, both, out-of-domain
    #[arg(long, value_parser = parse_sizes, default_value = "100,100,100,100")]
    pub val_sizes: [usize; 4],
    #[arg(long, value_parser = parse_sizes, default_value = "205,606,584,332")]
    pub test_sizes: [usize; 4],
    #[arg(long)]
    pub no_dedup: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub epochs: u32,
    #[arg(long, env = "CORRKIT_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub no_shuffle: bool,
    /// Chance of hiding an entity word type of a training record
    #[arg(long, default_value_t = 0.25)]
    pub entity_dropout: f64,
    /// Chance of hiding any other word type
    #[arg(long, default_value_t = 0.05)]
    pub word_dropout: f64,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct TaggerChoice {
    /// Baseline model file
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Adapter command, run through `sh -c`
    #[arg(long)]
    pub external: Option<String>,
}

#[derive(Debug, Args)]
pub struct CorrectArgs {
    #[command(flatten)]
    pub tagger: TaggerChoice,
    #[arg(long)]
    pub request: String,
    #[arg(long, default_value = "")]
    pub correction: String,
    #[arg(long, default_value_t = 30)]
    pub timeout_secs: u64,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct LabelChoice {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub external: Option<String>,
    /// Use the dataset's own labels
    #[arg(long)]
    pub gold: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub source: LabelChoice,
    /// Also score with invalid predictions repaired
    #[arg(long)]
    pub lenient: bool,
    /// Directory for report.txt, report.json and manifest.json
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    pub timeout_secs: u64,
}

#[derive(Debug, Args)]
pub struct AdapterCheckArgs {
    #[arg(long)]
    pub external: String,
    #[arg(long, default_value_t = 30)]
    pub timeout_secs: u64,
}

#[derive(Debug, Args)]
pub struct MockArgs {
    #[arg(long, value_enum, default_value = "copy")]
    pub mode: MockMode,
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
    /// Exit quietly with this code.
    #[error("exit {0}")]
    Exit(i32),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
            CliError::Exit(code) => *code,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl ToString) -> CliError {
    CliError::Runtime(e.to_string())
}

fn dataset_err(e: DatasetError) -> CliError {
    // unreadable or malformed inputs are configuration errors
    usage(e)
}

fn model_err(e: ModelFileError) -> CliError {
    usage(e)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Train(a) => cmd_train(a),
        Command::Correct(a) => cmd_correct(a),
        Command::Eval(a) => cmd_eval(a),
        Command::AdapterCheck(a) => cmd_adapter_check(a),
        Command::MockAdapter(a) => cmd_mock(a),
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<(), CliError> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let templates = match &a.templates {
        Some(dir) => load_template_dir(dir).map_err(usage)?,
        None => default_templates(),
    };
    let lexicon = match &a.lexicons {
        Some(dir) => load_lexicon_dir(dir).map_err(usage)?,
        None => default_lexicon(),
    };
    let config = GenerationConfig {
        seed: a.seed,
        train_size: a.train_size,
        val_sizes: a.val_sizes,
        test_sizes: a.test_sizes,
        dedup: !a.no_dedup,
        allow_identity: false,
    };
    fs::create_dir_all(&a.out).map_err(|e| usage(format!("{}: {e}", a.out.display())))?;
    let paths = [
        a.out.join("train.jsonl"),
        a.out.join("val.jsonl"),
        a.out.join("test.jsonl"),
    ];
    let mut writers = Vec::new();
    for p in &paths {
        let f = File::create(p).map_err(|e| runtime(format!("{}: {e}", p.display())))?;
        writers.push(BufWriter::new(f));
    }
    let mut counts = [0usize; 3];
    for rec in Generator::new(&templates, &lexicon, config.clone()) {
        let rec = rec.map_err(|e| match e {
            GenerateError::InsufficientCombinations { .. } => usage(e),
            other => runtime(other),
        })?;
        let slot = match rec.split.partition() {
            Partition::Train => 0,
            Partition::Validation => 1,
            Partition::Test => 2,
        };
        counts[slot] += 1;
        writeln!(writers[slot], "{}", to_json_line(&rec)).map_err(runtime)?;
    }
    for w in &mut writers {
        w.flush().map_err(runtime)?;
    }
    println!(
        "wrote {} train, {} validation, {} test records to {}",
        counts[0],
        counts[1],
        counts[2],
        a.out.display()
    );
    let mut manifest = RunManifest::new(
        "generate",
        json!({
            "templates": a.templates.as_ref().map(|p| p.display().to_string()),
            "lexicons": a.lexicons.as_ref().map(|p| p.display().to_string()),
            "train_size": config.train_size,
            "val_sizes": config.val_sizes,
            "test_sizes": config.test_sizes,
            "dedup": config.dedup,
        }),
        started,
        clock.elapsed(),
    )
    .seed("seed", a.seed);
    for dir in [&a.templates, &a.lexicons].into_iter().flatten() {
        manifest = manifest.input(dir);
    }
    for p in &paths {
        manifest = manifest.output(p);
    }
    manifest
        .write(&a.out.join("manifest.json"))
        .map_err(runtime)
}

fn read_data(path: &Path) -> Result<Vec<DatasetRecord>, CliError> {
    read_jsonl(path).map_err(dataset_err)
}

fn cmd_train(a: TrainArgs) -> Result<(), CliError> {
    let started = SystemTime::now();
    let clock = Instant::now();
    if a.epochs == 0 {
        return Err(usage("--epochs must be at least 1"));
    }
    for (flag, rate) in [
        ("--entity-dropout", a.entity_dropout),
        ("--word-dropout", a.word_dropout),
    ] {
        if !(0.0..=1.0).contains(&rate) {
            return Err(usage(format!("{flag} must lie in [0, 1]")));
        }
    }
    let records = read_data(&a.train)?;
    let config = TrainConfig {
        epochs: a.epochs,
        seed: a.seed,
        shuffle: !a.no_shuffle,
        entity_dropout: a.entity_dropout,
        word_dropout: a.word_dropout,
    };
    let model = train(records.iter().map(|r| &r.tagged), &config).map_err(|e| match e {
        TrainError::ZeroEpochs => usage(e),
        other => runtime(other),
    })?;
    save_model(&model, &a.out).map_err(runtime)?;

    let (mut right, mut total) = (0usize, 0usize);
    for r in &records {
        let predicted = model.predict(&r.tagged.words(), r.tagged.boundary());
        right += predicted
            .iter()
            .zip(r.tagged.labels())
            .filter(|(p, g)| p == g)
            .count();
        total += predicted.len();
    }
    println!(
        "trained on {} records ({} features); training label accuracy {:.2} % over {} tokens",
        records.len(),
        model.feature_count(),
        100.0 * right as f64 / total.max(1) as f64,
        total
    );
    let manifest_path = PathBuf::from(format!("{}.manifest.json", a.out.display()));
    RunManifest::new(
        "train",
        json!({
            "epochs": a.epochs,
            "shuffle": config.shuffle,
            "entity_dropout": config.entity_dropout,
            "word_dropout": config.word_dropout,
        }),
        started,
        clock.elapsed(),
    )
    .seed("seed", a.seed)
    .input(&a.train)
    .output(&a.out)
    .write(&manifest_path)
    .map_err(runtime)
}

fn timeout(secs: u64) -> Duration {
    Duration::from_secs(secs.max(1))
}

fn cmd_correct(a: CorrectArgs) -> Result<(), CliError> {
    let request = tokenize(&a.request, true);
    let correction = tokenize(&a.correction, true);
    if request.is_empty() {
        return Err(usage("--request has no words"));
    }
    let words: Vec<&str> = request
        .iter()
        .chain(&correction)
        .map(|t| t.as_str())
        .collect();
    let boundary = request.len();
    let predicted = match (&a.tagger.model, &a.tagger.external) {
        (Some(path), _) => load_model(path)
            .map_err(model_err)?
            .predict(&words, boundary),
        (None, Some(cmd)) => {
            let mut tagger =
                ExternalTagger::spawn(cmd, timeout(a.timeout_secs)).map_err(runtime)?;
            tagger.predict(&words, boundary).map_err(runtime)?
        }
        (None, None) => return Err(usage("one of --model or --external is required")),
    };
    let labels = repair_labels(&predicted, boundary);
    let req_words: Vec<&str> = request.iter().map(|t| t.as_str()).collect();
    let corr_words: Vec<&str> = correction.iter().map(|t| t.as_str()).collect();
    let pair = TaggedPair::new(&req_words, &corr_words, labels.clone()).map_err(runtime)?;
    let result = merge(&pair).map_err(runtime)?;
    let pairs: Vec<_> = result
        .pairs
        .iter()
        .map(|p| {
            json!({
                "slot": p.slot.get(),
                "reparandum": corrkit_core::join(&p.reparandum),
                "repair": corrkit_core::join(&p.repair),
            })
        })
        .collect();
    let out = json!({
        "corrected": result.corrected_text(),
        "pairs": pairs,
        "labels": labels.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
    });
    println!("{out}");
    Ok(())
}

fn predictions(
    records: &[DatasetRecord],
    source: &LabelChoice,
    timeout_secs: u64,
) -> Result<Vec<Vec<LabelTag>>, CliError> {
    if source.gold {
        return Ok(records.iter().map(|r| r.tagged.labels().to_vec()).collect());
    }
    if let Some(path) = &source.model {
        let model: TaggerModel = load_model(path).map_err(model_err)?;
        return Ok(records
            .iter()
            .map(|r| model.predict(&r.tagged.words(), r.tagged.boundary()))
            .collect());
    }
    let cmd = source
        .external
        .as_deref()
        .ok_or_else(|| usage("one of --model, --external or --gold is required"))?;
    let mut tagger = ExternalTagger::spawn(cmd, timeout(timeout_secs)).map_err(runtime)?;
    let mut out = Vec::with_capacity(records.len());
    for chunk in records.chunks(64) {
        let words: Vec<Vec<&str>> = chunk.iter().map(|r| r.tagged.words()).collect();
        let batch: Vec<(&[&str], usize)> = words
            .iter()
            .zip(chunk)
            .map(|(w, r)| (w.as_slice(), r.tagged.boundary()))
            .collect();
        out.extend(tagger.predict_batch(&batch).map_err(runtime)?);
    }
    Ok(out)
}

fn score_all(records: &[DatasetRecord], predicted: &[Vec<LabelTag>], lenient: bool) -> EvalOutcome {
    let outcomes = records
        .iter()
        .zip(predicted)
        .map(|(r, p)| score_record(r, p, lenient))
        .collect();
    EvalOutcome::from_records(outcomes, lenient)
}

fn cmd_eval(a: EvalArgs) -> Result<(), CliError> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let records = read_data(&a.data)?;
    let predicted = predictions(&records, &a.source, a.timeout_secs)?;
    let strict = score_all(&records, &predicted, false);
    let lenient = a.lenient.then(|| score_all(&records, &predicted, true));

    let mut text = format_report(&strict);
    if let Some(l) = &lenient {
        text.push('\n');
        text.push_str(&format_report(l));
    }
    print!("{text}");

    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
        let write = |name: &str, body: String| {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| runtime(format!("{}: {e}", p.display())))?;
            Ok::<PathBuf, CliError>(p)
        };
        let json_of = |o: &EvalOutcome| {
            serde_json::to_string_pretty(&ReportJson::from(o)).expect("report serializes") + "\n"
        };
        let mut outputs = vec![
            write("report.txt", text.clone())?,
            write("report.json", json_of(&strict))?,
        ];
        if let Some(l) = &lenient {
            outputs.push(write("report_lenient.json", json_of(l))?);
        }
        let source = if a.source.gold {
            "gold".to_string()
        } else if let Some(m) = &a.source.model {
            format!("model {}", m.display())
        } else {
            format!("external {}", a.source.external.clone().unwrap_or_default())
        };
        let mut manifest = RunManifest::new(
            "eval",
            json!({ "source": source, "lenient": a.lenient }),
            started,
            clock.elapsed(),
        )
        .input(&a.data);
        for p in &outputs {
            manifest = manifest.output(p);
        }
        manifest
            .write(&dir.join("manifest.json"))
            .map_err(runtime)?;
    }
    Ok(())
}

fn cmd_adapter_check(a: AdapterCheckArgs) -> Result<(), CliError> {
    let report = adapter_check(&a.external, timeout(a.timeout_secs));
    if let Some(name) = &report.adapter_name {
        println!("adapter: {name}");
    }
    for item in &report.items {
        let mark = if item.ok { "ok  " } else { "FAIL" };
        println!("[{mark}] {}: {}", item.name, item.detail);
    }
    if report.ok() {
        println!("conformance: pass");
        Ok(())
    } else {
        println!("conformance: fail");
        Err(CliError::Exit(1))
    }
}

fn cmd_mock(a: MockArgs) -> Result<(), CliError> {
    let gold = match &a.data {
        Some(p) => read_data(p)?,
        None => Vec::new(),
    };
    let stdin = io::stdin();
    let code = serve(a.mode, &gold, stdin.lock(), io::stdout().lock()).map_err(runtime)?;
    if code == 0 {
        Ok(())
    } else {
        Err(CliError::Exit(code))
    }
}
