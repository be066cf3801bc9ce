use std::io::Write;
use std::path::{Path, PathBuf};

use plauscheck_core::dataset::{
    attach_examples, augment_checks, build_instruction_records, document_property_records, emit_records,
    segment_corpus, Chunk, DatasetError, TokenCounter,
};
use plauscheck_core::harness::{
    aggregate, load_suite_file, render_report, run_suite, EvalConfig, HarnessError, ReportFormat, TaskResult,
};
use plauscheck_core::lang::{format_outcome, interpret, CheckSource, ExecMode};
use plauscheck_core::store::{
    evaluate_against_spec, inject_change, load_store_file, Collection, Store, StoreError,
};
use plauscheck_llm::{build_backend, health_check, Backend, BackendConfig, HttpConfig, LlmError, API_KEY_ENV};
use serde::{Deserialize, Serialize};

use crate::config::{load_config, BackendKind, RunConfig};
use crate::{exit, Cli, CliError, Command};

type Result<T> = std::result::Result<T, CliError>;

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_error(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("standard output: {e}"))),
    }
}

fn write_jsonl<T: Serialize>(records: &[T], out: Option<&Path>) -> Result<usize> {
    if let Some(path) = out {
        return emit_records(records, path).map_err(dataset_error);
    }
    let mut text = String::new();
    for r in records {
        text.push_str(&serde_json::to_string(r).map_err(|e| CliError::Io(e.to_string()))?);
        text.push('\n');
    }
    write_output(None, &text)?;
    Ok(records.len())
}

fn store_error(e: StoreError) -> CliError {
    match e {
        StoreError::Io { .. } => CliError::Io(e.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

fn dataset_error(e: DatasetError) -> CliError {
    match e {
        DatasetError::Io { .. } => CliError::Io(e.to_string()),
        DatasetError::Backend { .. } => CliError::Backend(e.to_string()),
        DatasetError::UnknownCounter(_) | DatasetError::Counter(_) => CliError::Usage(e.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

fn harness_error(e: HarnessError) -> CliError {
    match e {
        HarnessError::Io { .. } => CliError::Io(e.to_string()),
        HarnessError::UnknownFormat(_) => CliError::Usage(e.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

fn backend_error(e: LlmError) -> CliError {
    match e {
        LlmError::Config(_) | LlmError::InvalidRequest(_) => CliError::Usage(e.to_string()),
        other => CliError::Backend(other.to_string()),
    }
}

fn required<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    value
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("--{flag} is required for this command")))
}

fn open_store(config: &RunConfig) -> Result<Store> {
    load_store_file(required(&config.store, "store")?).map_err(store_error)
}

fn counter(config: &RunConfig) -> Result<TokenCounter> {
    config.counter.parse().map_err(dataset_error)
}

fn backend_config(config: &RunConfig, env: &dyn Fn(&str) -> Option<String>) -> Result<BackendConfig> {
    match config.backend {
        BackendKind::Mock => Ok(BackendConfig::Mock {
            fixtures: config.fixtures.clone(),
        }),
        BackendKind::Http => {
            let base_url = config
                .base_url
                .clone()
                .ok_or_else(|| CliError::Usage("the http backend needs --base-url".into()))?;
            let model = config
                .model
                .clone()
                .ok_or_else(|| CliError::Usage("the http backend needs --model".into()))?;
            let mut http = HttpConfig::new(base_url, model).with_api_key(env(API_KEY_ENV));
            http.max_in_flight = config.parallel;
            Ok(BackendConfig::Http(http))
        }
    }
}

fn backend(config: &RunConfig, env: &dyn Fn(&str) -> Option<String>) -> Result<Box<dyn Backend>> {
    build_backend(&backend_config(config, env)?).map_err(backend_error)
}

fn report_format(config: &RunConfig) -> Result<ReportFormat> {
    let name = match (&config.format, &config.out) {
        (Some(f), _) => f.clone(),
        (None, Some(out)) => match out.extension().and_then(|e| e.to_str()) {
            Some("md") => "markdown".into(),
            Some("jsonl") => "json-lines".into(),
            _ => "csv".into(),
        },
        (None, None) => "csv".into(),
    };
    name.parse().map_err(harness_error)
}

/// Runs the parsed command. `env` looks up environment variables.
pub fn dispatch(cli: &Cli, env: impl Fn(&str) -> Option<String>) -> Result<i32> {
    let config = load_config(cli.global.config.as_deref(), &env, &cli.global.layer())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    match &cli.command {
        Command::Ingest { properties } => ingest(&config, properties.as_deref()),
        Command::Forge { changes } => forge(&config, changes),
        Command::Chunk { files } => chunk(&config, files),
        Command::Instruct { files } => instruct(&config, files, &env),
        Command::Augment { seeds, n } => augment(&config, seeds, *n, &env),
        Command::Examples { check, n } => examples(&config, check, *n),
        Command::CheckRun {
            check,
            document,
            relaxed,
        } => check_run(&config, check, *document, *relaxed),
        Command::Generate => generate(&config, &env),
        Command::Evaluate => evaluate(&config, &env),
        Command::Report { results } => report(&config, results),
        Command::Health => health(&config, &env),
    }
}

fn ingest(config: &RunConfig, properties: Option<&Path>) -> Result<i32> {
    let store = open_store(config)?;
    let mut text = String::new();
    for c in Collection::ALL {
        text.push_str(&format!("{}\t{}\n", c.name(), store.len(c)));
    }
    text.push_str(&format!("sha256\t{}\n", store.content_hash()));
    write_output(config.out.as_deref(), &text)?;
    if let Some(path) = properties {
        let n = emit_records(&document_property_records(&store), path).map_err(dataset_error)?;
        log::info!("wrote {n} property records to {}", path.display());
    }
    Ok(exit::OK)
}

#[derive(Debug, Deserialize)]
struct Change {
    document_id: u64,
    element: String,
    part: String,
    new_category: String,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Changes {
    One(Change),
    Many(Vec<Change>),
}

/// Applies the changes, writes the altered store to `--out` and prints each
/// touched document's diff against its specification.
fn forge(config: &RunConfig, changes: &Path) -> Result<i32> {
    let out = required(&config.out, "out")?;
    let mut store = open_store(config)?;
    let changes = match serde_json::from_str(&read(changes)?) {
        Ok(Changes::One(c)) => vec![c],
        Ok(Changes::Many(cs)) => cs,
        Err(e) => return Err(CliError::Validation(format!("{}: {e}", changes.display()))),
    };
    let mut touched = Vec::new();
    for c in &changes {
        store = inject_change(&store, c.document_id, &c.element, &c.part, &c.new_category)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        if !touched.contains(&c.document_id) {
            touched.push(c.document_id);
        }
    }
    std::fs::write(out, store.to_json()).map_err(|e| io_error(out, e))?;
    let mut text = String::new();
    for id in touched {
        let doc = store.document(id).expect("injection found the document");
        let Some(spec) = store.specification_for(doc) else {
            log::warn!("document {id} has no specification to compare against");
            continue;
        };
        let report = evaluate_against_spec(&store, id, spec).map_err(|e| CliError::Validation(e.to_string()))?;
        for p in &report.parts {
            text.push_str(&format!("{id}\t{}\t{}\t{}\t{}\n", p.part, p.expected, p.observed, p.verdict.label()));
        }
        text.push_str(&format!("{id}\tissue window\t\t\t{}\n", report.window.label()));
    }
    write_output(None, &text)?;
    Ok(exit::OK)
}

fn chunks(config: &RunConfig, files: &[PathBuf]) -> Result<Vec<Chunk>> {
    segment_corpus(files, config.max_tokens, &counter(config)?).map_err(dataset_error)
}

fn chunk(config: &RunConfig, files: &[PathBuf]) -> Result<i32> {
    let manifest: Vec<_> = chunks(config, files)?.iter().map(Chunk::manifest_entry).collect();
    write_jsonl(&manifest, config.out.as_deref())?;
    Ok(exit::OK)
}

fn instruct(config: &RunConfig, files: &[PathBuf], env: &dyn Fn(&str) -> Option<String>) -> Result<i32> {
    let chunks = chunks(config, files)?;
    let backend = backend(config, env)?;
    let records = build_instruction_records(&chunks, backend.as_ref(), config.parallel).map_err(dataset_error)?;
    write_jsonl(&records, config.out.as_deref())?;
    Ok(exit::OK)
}

#[derive(Serialize)]
struct GeneratedCheck<'a> {
    name: &'a str,
    text: &'a str,
}

fn parse_check_file(path: &Path) -> Result<CheckSource> {
    let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let source = CheckSource::new(name, read(path)?);
    source
        .parse()
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(source)
}

fn augment(config: &RunConfig, seeds: &[PathBuf], n: usize, env: &dyn Fn(&str) -> Option<String>) -> Result<i32> {
    let seeds = seeds.iter().map(|p| parse_check_file(p)).collect::<Result<Vec<_>>>()?;
    let backend = backend(config, env)?;
    let report = augment_checks(&seeds, n, backend.as_ref(), &plauscheck_core::store::Schema)
        .map_err(dataset_error)?;
    let rows: Vec<_> = report
        .checks
        .iter()
        .map(|c| GeneratedCheck {
            name: &c.name,
            text: &c.text,
        })
        .collect();
    write_jsonl(&rows, config.out.as_deref())?;
    eprintln!(
        "{} checks generated, {} invalid outputs rejected, {} slots skipped",
        report.checks.len(),
        report.rejected,
        report.skipped.len()
    );
    Ok(if report.skipped.is_empty() { exit::OK } else { exit::FAILURES })
}

fn examples(config: &RunConfig, check: &Path, n: usize) -> Result<i32> {
    let store = open_store(config)?;
    let check = parse_check_file(check)?;
    let examples = attach_examples(&check, &store, n).map_err(dataset_error)?;
    write_jsonl(&examples, config.out.as_deref())?;
    Ok(exit::OK)
}

fn check_run(config: &RunConfig, check: &Path, document: u64, relaxed: bool) -> Result<i32> {
    let store = open_store(config)?;
    let source = parse_check_file(check)?;
    let ast = source.parse().expect("parsed above");
    let doc = store
        .document(document)
        .ok_or_else(|| CliError::Validation(format!("document {document} is not in the store")))?;
    let mode = if relaxed { ExecMode::Relaxed } else { ExecMode::Exact };
    let outcome = interpret(&ast, doc, &store, mode);
    write_output(config.out.as_deref(), &format!("{}\n", format_outcome(&outcome)))?;
    Ok(exit::OK)
}

fn eval_config(config: &RunConfig) -> EvalConfig {
    EvalConfig {
        samples_per_task: config.k,
        modes: config.mode,
        temperature: config.temperature,
        max_tokens: config.completion_tokens,
        normalize_ws: config.normalize_ws,
        parallel: config.parallel,
        seed: config.seed,
    }
}

fn sample(config: &RunConfig, env: &dyn Fn(&str) -> Option<String>) -> Result<Vec<TaskResult>> {
    let store = open_store(config)?;
    let tasks = load_suite_file(required(&config.suite, "suite")?, &store).map_err(harness_error)?;
    let backend = backend(config, env)?;
    let results = run_suite(&tasks, &store, backend.as_ref(), &eval_config(config));
    for r in results.iter().filter(|r| r.error.is_some()) {
        eprintln!("task {} failed: {}", r.task_id, r.error.as_deref().unwrap_or_default());
    }
    Ok(results)
}

fn status(results: &[TaskResult]) -> i32 {
    if results.iter().any(|r| r.error.is_some()) {
        exit::FAILURES
    } else {
        exit::OK
    }
}

fn generate(config: &RunConfig, env: &dyn Fn(&str) -> Option<String>) -> Result<i32> {
    let results = sample(config, env)?;
    write_jsonl(&results, config.out.as_deref())?;
    Ok(status(&results))
}

fn render(config: &RunConfig, results: &[TaskResult]) -> Result<()> {
    let format = report_format(config)?;
    let table = aggregate(results, config.k).map_err(harness_error)?;
    write_output(config.out.as_deref(), &render_report(&table, format))
}

fn evaluate(config: &RunConfig, env: &dyn Fn(&str) -> Option<String>) -> Result<i32> {
    report_format(config)?;
    let results = sample(config, env)?;
    render(config, &results)?;
    Ok(status(&results))
}

fn report(config: &RunConfig, path: &Path) -> Result<i32> {
    let text = read(path)?;
    let mut results = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let r: TaskResult = serde_json::from_str(line)
            .map_err(|e| CliError::Validation(format!("{} line {}: {e}", path.display(), i + 1)))?;
        results.push(r);
    }
    render(config, &results)?;
    Ok(status(&results))
}

fn health(config: &RunConfig, env: &dyn Fn(&str) -> Option<String>) -> Result<i32> {
    let report = health_check(&backend_config(config, env)?).map_err(backend_error)?;
    write_output(
        None,
        &format!(
            "backend={} model={} latency_ms={}\n",
            report.backend,
            report.model_id,
            report.latency.as_millis()
        ),
    )?;
    Ok(exit::OK)
}
