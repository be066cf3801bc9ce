//! Evaluation harness: sample completions for check-writing tasks, execute
//! them against a store and score them in Exact and Regex modes.

mod eval;
mod prompt;
mod report;
mod task;

pub use eval::{
    evaluate_completion, run_suite, run_task, CompletionEval, EvalConfig, EvalMode, ModeResult,
    ModeSelection, TaskResult,
};
pub use prompt::{build_prompt, language_card, PROMPT_INTRO};
pub use report::{
    aggregate, parse_csv_report, parse_jsonl_report, render_report, ReportFormat, ReportRow,
    ReportTable,
};
pub use task::{load_suite, load_suite_file, reference_outputs, EvalTask, TaskExample};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
    #[error("suite line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("task {task}: {message}")]
    InvalidTask { task: String, message: String },
    #[error("duplicate task id {0}")]
    DuplicateTask(String),
    #[error("task {task}: reference output for document {document} is {actual}, expected {expected}")]
    SelfConsistency {
        task: String,
        document: u64,
        expected: String,
        actual: String,
    },
    #[error("aggregate over an empty result set")]
    EmptyInput,
    #[error("unknown report format {0:?}")]
    UnknownFormat(String),
    #[error("malformed report: {0}")]
    MalformedReport(String),
}
