use std::fmt;
use std::str::FromStr;

use plauscheck_llm::{Backend, GenerationRequest};
use serde::{Deserialize, Serialize};

use super::{build_prompt, reference_outputs, EvalTask};
use crate::completion::extract_code;
use crate::lang::{format_outcome, interpret, relax_guards, CheckAst, CheckOutcome, CheckSource, ExecMode};
use crate::metrics::{mean_similarity, normalize_ws, pass_at_k_observed, rate};
use crate::parallel_map;
use crate::store::Store;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EvalMode {
    Exact,
    Regex,
}

impl EvalMode {
    pub fn label(self) -> &'static str {
        match self {
            EvalMode::Exact => "Exact",
            EvalMode::Regex => "Regex",
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EvalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(EvalMode::Exact),
            "regex" => Ok(EvalMode::Regex),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSelection {
    Exact,
    Regex,
    #[default]
    Both,
}

impl ModeSelection {
    pub fn modes(self) -> &'static [EvalMode] {
        match self {
            ModeSelection::Exact => &[EvalMode::Exact],
            ModeSelection::Regex => &[EvalMode::Regex],
            ModeSelection::Both => &[EvalMode::Exact, EvalMode::Regex],
        }
    }
}

impl FromStr for ModeSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(ModeSelection::Exact),
            "regex" => Ok(ModeSelection::Regex),
            "both" => Ok(ModeSelection::Both),
            _ => Err(format!("unknown mode {s:?}, expected exact, regex or both")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub samples_per_task: u32,
    pub modes: ModeSelection,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Collapse whitespace before computing code match.
    pub normalize_ws: bool,
    /// Tasks in flight at once.
    pub parallel: usize,
    pub seed: Option<u64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            samples_per_task: 5,
            modes: ModeSelection::Both,
            temperature: 0.7,
            max_tokens: 1024,
            normalize_ws: false,
            parallel: 4,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionEval {
    pub outputs: Vec<String>,
    pub correct: bool,
}

fn outcomes(ast: &CheckAst, documents: &[u64], store: &Store, mode: ExecMode) -> Vec<CheckOutcome> {
    documents
        .iter()
        .map(|&id| match store.document(id) {
            Some(doc) => interpret(ast, doc, store, mode),
            None => CheckOutcome::runtime_error(format!("unknown document {id}")),
        })
        .collect()
}

/// Runs `code` on every test document of `task` and compares the canonical
/// outputs with the references.
///
/// In Regex mode the guards of both the completion and the reference are
/// relaxed. A document whose exact output already matches keeps it; otherwise
/// the relaxed runs are compared with their guard logs removed, and a match
/// there counts as the reference output.
pub fn evaluate_completion(code: &str, task: &EvalTask, store: &Store, mode: EvalMode) -> CompletionEval {
    let docs = &task.test_documents;
    let exact = reference_outputs(code, docs, store, ExecMode::Exact);
    let outputs = match mode {
        EvalMode::Exact => exact,
        EvalMode::Regex => match CheckSource::new("", relax_guards(code)).parse() {
            Err(_) => exact,
            Ok(ast) => {
                let relaxed = outcomes(&ast, docs, store, ExecMode::Relaxed);
                let reference = CheckSource::new("", relax_guards(&task.reference_code))
                    .parse()
                    .map(|r| outcomes(&r, docs, store, ExecMode::Relaxed))
                    .unwrap_or_default();
                exact
                    .into_iter()
                    .enumerate()
                    .map(|(i, out)| {
                        let expected = &task.reference_outputs[i];
                        if out == *expected
                            || reference
                                .get(i)
                                .is_some_and(|r| r.without_guards() == relaxed[i].without_guards())
                        {
                            expected.clone()
                        } else {
                            format_outcome(&relaxed[i])
                        }
                    })
                    .collect()
            }
        },
    };
    let correct = outputs == task.reference_outputs;
    CompletionEval { outputs, correct }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeResult {
    pub mode: EvalMode,
    /// Canonical outputs per sample, one per test document.
    pub outputs: Vec<Vec<String>>,
    pub flags: Vec<bool>,
    pub sr: u32,
    pub om: u32,
    pub cm: u32,
    pub pass_at_k: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub task_id: String,
    pub level: String,
    pub model: String,
    pub codes: Vec<String>,
    pub modes: Vec<ModeResult>,
    /// Set when the backend failed; every metric of the task is then zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TaskResult {
    pub fn mode(&self, mode: EvalMode) -> Option<&ModeResult> {
        self.modes.iter().find(|m| m.mode == mode)
    }

    fn failed(task: &EvalTask, model: &str, config: &EvalConfig, error: String) -> Self {
        let modes = config
            .modes
            .modes()
            .iter()
            .map(|&mode| ModeResult {
                mode,
                outputs: Vec::new(),
                flags: Vec::new(),
                sr: 0,
                om: 0,
                cm: 0,
                pass_at_k: 0,
            })
            .collect();
        TaskResult {
            task_id: task.id.clone(),
            level: task.level.clone(),
            model: model.to_string(),
            codes: Vec::new(),
            modes,
            error: Some(error),
        }
    }
}

fn score(codes: &[String], task: &EvalTask, store: &Store, mode: EvalMode, config: &EvalConfig) -> ModeResult {
    let evals: Vec<CompletionEval> = codes
        .iter()
        .map(|code| evaluate_completion(code, task, store, mode))
        .collect();
    let flags: Vec<bool> = evals.iter().map(|e| e.correct).collect();
    let hits = flags.iter().filter(|&&f| f).count();
    let joined_reference = task.reference_outputs.join("\n");
    let output_pairs: Vec<(String, &str)> = evals
        .iter()
        .map(|e| (e.outputs.join("\n"), joined_reference.as_str()))
        .collect();
    let prep = |s: &str| if config.normalize_ws { normalize_ws(s) } else { s.to_string() };
    let reference_code = prep(&task.reference_code);
    let code_pairs: Vec<(String, &str)> = codes.iter().map(|c| (prep(c), reference_code.as_str())).collect();
    let n = codes.len();
    ModeResult {
        mode,
        sr: rate(hits, n).unwrap_or(0),
        om: mean_similarity(&output_pairs).unwrap_or(0),
        cm: mean_similarity(&code_pairs).unwrap_or(0),
        pass_at_k: pass_at_k_observed(&flags, n).unwrap_or(0),
        outputs: evals.into_iter().map(|e| e.outputs).collect(),
        flags,
    }
}

/// Samples `samples_per_task` completions in one request and scores them in
/// every selected mode. Backend failures become a failed task, not an error.
pub fn run_task(
    task: &EvalTask,
    correlation_id: u64,
    store: &Store,
    backend: &dyn Backend,
    config: &EvalConfig,
) -> TaskResult {
    let model = backend.id().to_string();
    let (system, user) = build_prompt(task);
    let mut request = GenerationRequest::new(system, user)
        .with_samples(config.samples_per_task)
        .with_temperature(config.temperature)
        .with_max_tokens(config.max_tokens)
        .with_correlation_id(correlation_id);
    request.seed = config.seed;
    let response = match backend.generate(&request) {
        Ok(r) => r,
        Err(e) => {
            log::warn!("task {}: backend failed: {e}", task.id);
            return TaskResult::failed(task, &model, config, e.to_string());
        }
    };
    if response.completions.len() != config.samples_per_task as usize {
        let msg = format!(
            "backend returned {} of {} completions",
            response.completions.len(),
            config.samples_per_task
        );
        log::warn!("task {}: {msg}", task.id);
        return TaskResult::failed(task, &model, config, msg);
    }
    let codes: Vec<String> = response.completions.iter().map(|c| extract_code(c)).collect();
    let modes = config
        .modes
        .modes()
        .iter()
        .map(|&mode| score(&codes, task, store, mode, config))
        .collect();
    TaskResult {
        task_id: task.id.clone(),
        level: task.level.clone(),
        model,
        codes,
        modes,
        error: None,
    }
}

/// Runs every task, up to `config.parallel` at once. Results keep suite order.
pub fn run_suite(tasks: &[EvalTask], store: &Store, backend: &dyn Backend, config: &EvalConfig) -> Vec<TaskResult> {
    parallel_map(tasks, config.parallel, |i, task| run_task(task, i as u64, store, backend, config))
}
