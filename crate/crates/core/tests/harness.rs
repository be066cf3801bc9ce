use std::path::PathBuf;

use plauscheck_core::harness::{
    aggregate, build_prompt, evaluate_completion, load_suite, parse_csv_report, parse_jsonl_report,
    reference_outputs, render_report, run_suite, run_task, EvalConfig, EvalMode, EvalTask, HarnessError,
    ModeSelection, ReportFormat, TaskExample,
};
use plauscheck_core::lang::ExecMode;
use plauscheck_core::store::{load_store_file, Store};
use plauscheck_llm::{Backend, GenerationRequest, GenerationResponse, LlmError, MockBackend};

const DOCS: [u64; 6] = [1, 2, 3, 4, 6, 9];

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn store() -> Store {
    load_store_file(&fixture("golden_store.json")).unwrap()
}

fn golden() -> String {
    std::fs::read_to_string(fixture("golden_check.pcl")).unwrap()
}

fn task(id: &str, level: &str, code: &str, store: &Store) -> EvalTask {
    EvalTask {
        id: id.into(),
        level: level.into(),
        description: "For German driving licenses issued between March 2000 and March 2010, the material must be plastic.".into(),
        reference_code: code.into(),
        test_documents: DOCS.to_vec(),
        reference_outputs: reference_outputs(code, &DOCS, store, ExecMode::Exact),
        examples: vec![TaskExample {
            input: store.document_summary(1).unwrap(),
            output: "triggered=false details={}".into(),
        }],
    }
}

fn wrong_guard() -> String {
    golden().replace("code == \"DE\"", "code == \"FR\"")
}

fn mock_for(task: &EvalTask, completions: Vec<String>) -> MockBackend {
    let mut mock = MockBackend::empty();
    let (system, user) = build_prompt(task);
    mock.insert(&system, &user, completions);
    mock
}

fn fenced(code: &str) -> String {
    format!("Here is the check:\n```pcl\n{code}\n```\n")
}

#[test]
fn suite_loading_enforces_self_consistency() {
    let store = store();
    let good = task("t1", "Low", &golden(), &store);
    let line = |t: &EvalTask| serde_json::to_string(t).unwrap();
    let loaded = load_suite(&format!("{}\n\n", line(&good)), &store).unwrap();
    assert_eq!(loaded, vec![good.clone()]);

    let mut tampered = good.clone();
    tampered.id = "broken".into();
    tampered.reference_outputs[1] = "triggered=false details={}".into();
    match load_suite(&line(&tampered), &store) {
        Err(HarnessError::SelfConsistency { task, document, .. }) => {
            assert_eq!(task, "broken");
            assert_eq!(document, 2);
        }
        other => panic!("expected self-consistency failure, got {other:?}"),
    }

    let mut short = good.clone();
    short.reference_outputs.pop();
    assert!(matches!(load_suite(&line(&short), &store), Err(HarnessError::InvalidTask { .. })));
    let dup = format!("{}\n{}", line(&good), line(&good));
    assert!(matches!(load_suite(&dup, &store), Err(HarnessError::DuplicateTask(id)) if id == "t1"));
    assert!(matches!(load_suite("{not json", &store), Err(HarnessError::Parse { line: 1, .. })));
}

#[test]
fn completion_scoring_by_mode() {
    let store = store();
    let t = task("t1", "Low", &golden(), &store);
    for mode in [EvalMode::Exact, EvalMode::Regex] {
        let eval = evaluate_completion(&golden(), &t, &store, mode);
        assert!(eval.correct);
        assert_eq!(eval.outputs, t.reference_outputs);
        let garbage = evaluate_completion("this is not a check", &t, &store, mode);
        assert!(!garbage.correct);
        assert!(garbage.outputs.iter().all(|o| o == r#"error="parse""#));
    }
    assert!(!evaluate_completion(&wrong_guard(), &t, &store, EvalMode::Exact).correct);
    assert!(evaluate_completion(&wrong_guard(), &t, &store, EvalMode::Regex).correct);

    let wrong_body = golden().replace("\"Kunststoff\"", "\"Papier\"");
    assert!(!evaluate_completion(&wrong_body, &t, &store, EvalMode::Exact).correct);
    assert!(!evaluate_completion(&wrong_body, &t, &store, EvalMode::Regex).correct);
}

#[test]
fn run_task_metrics() {
    let store = store();
    let t = task("t1", "Low", &golden(), &store);
    let config = EvalConfig { parallel: 1, ..EvalConfig::default() };

    let all_right = mock_for(&t, vec![fenced(&golden()); 5]);
    let r = run_task(&t, 0, &store, &all_right, &config);
    assert_eq!(r.codes.len(), 5);
    for mode in [EvalMode::Exact, EvalMode::Regex] {
        let m = r.mode(mode).unwrap();
        assert_eq!((m.sr, m.om, m.cm, m.pass_at_k), (100, 100, 100, 1));
    }

    let garbage = mock_for(&t, vec!["nope".into(); 5]);
    let r = run_task(&t, 0, &store, &garbage, &config);
    let m = r.mode(EvalMode::Exact).unwrap();
    assert_eq!((m.sr, m.pass_at_k), (0, 0));
    assert_eq!(m.flags, vec![false; 5]);

    let wrong_body = golden().replace("\"Kunststoff\"", "\"Papier\"");
    let mixed = mock_for(
        &t,
        vec![golden(), wrong_body.clone(), golden(), wrong_body.clone(), wrong_body],
    );
    let r = run_task(&t, 0, &store, &mixed, &config);
    let m = r.mode(EvalMode::Exact).unwrap();
    assert_eq!(m.flags, vec![true, false, true, false, false]);
    assert_eq!((m.sr, m.pass_at_k), (40, 1));

    let guards = mock_for(&t, vec![wrong_guard(); 5]);
    let r = run_task(&t, 0, &store, &guards, &config);
    assert_eq!(r.mode(EvalMode::Exact).unwrap().sr, 0);
    assert_eq!(r.mode(EvalMode::Regex).unwrap().sr, 100);
}

struct Down;

impl Backend for Down {
    fn id(&self) -> &str {
        "down"
    }

    fn generate(&self, _: &GenerationRequest) -> Result<GenerationResponse, LlmError> {
        Err(LlmError::Config("endpoint unreachable".into()))
    }
}

#[test]
fn backend_failure_is_a_task_failure() {
    let store = store();
    let tasks = vec![task("t1", "Low", &golden(), &store), task("t2", "Low", &golden(), &store)];
    let config = EvalConfig { modes: ModeSelection::Exact, ..EvalConfig::default() };
    let results = run_suite(&tasks, &store, &Down, &config);
    assert_eq!(results.len(), 2);
    for r in &results {
        assert!(r.error.as_deref().unwrap().contains("endpoint unreachable"));
        assert_eq!(r.mode(EvalMode::Exact).unwrap().sr, 0);
        assert!(r.mode(EvalMode::Regex).is_none());
    }
}

#[test]
fn aggregation_and_rendering() {
    let store = store();
    let good = task("t1", "Low", &golden(), &store);
    let bad = task("t2", "Low", &golden(), &store);
    let mid = task("t10", "Mid", &golden(), &store);
    let mut mock = mock_for(&good, vec![golden(); 5]);
    let (s, u) = build_prompt(&mid);
    mock.insert(&s, &u, vec![golden(); 5]);
    // Same prompt as `good`, so give `bad` a distinct description.
    let mut bad = bad;
    bad.description.push_str(" Report every material.");
    let (s, u) = build_prompt(&bad);
    mock.insert(&s, &u, vec!["garbage".into(); 5]);

    let config = EvalConfig { parallel: 3, ..EvalConfig::default() };
    let suite = vec![mid, bad, good];
    let results = run_suite(&suite, &store, &mock, &config);
    let table = aggregate(&results, 5).unwrap();
    let shape: Vec<_> = table
        .rows
        .iter()
        .map(|r| (r.level.as_str(), r.mode, r.sr, r.grid.clone()))
        .collect();
    assert_eq!(
        shape,
        vec![
            ("Low", EvalMode::Exact, 50, vec![1, 0]),
            ("Low", EvalMode::Regex, 50, vec![1, 0]),
            ("Mid", EvalMode::Exact, 100, vec![1]),
            ("Mid", EvalMode::Regex, 100, vec![1]),
        ]
    );
    assert_eq!(table.rows[0].pass_at_k, 0.5);
    assert_eq!(table.rows[0].model, "mock");

    let csv = render_report(&table, ReportFormat::Csv);
    assert!(csv.starts_with("model,level,mode,SR,OM,CM,pass@5,T1,T2\n"));
    assert!(csv.contains("\nmock,Mid,Exact,100,100,100,1,1,\n"));
    assert_eq!(parse_csv_report(&csv).unwrap(), table);
    let jsonl = render_report(&table, ReportFormat::JsonLines);
    assert_eq!(parse_jsonl_report(&jsonl, 0).unwrap(), table);
    let md = render_report(&table, ReportFormat::Markdown);
    assert_eq!(md.lines().count(), 2 + table.rows.len());
    assert!(md.contains("| mock | Low | Exact |"));
    assert!(md.contains("|  |  | Regex |"));

    let again = aggregate(&run_suite(&suite, &store, &mock, &config), 5).unwrap();
    assert_eq!(render_report(&again, ReportFormat::Csv), csv);
    assert!(matches!(aggregate(&[], 5), Err(HarnessError::EmptyInput)));
}

#[test]
fn single_task_row_echoes_task() {
    let store = store();
    let t = task("only", "High", &golden(), &store);
    let mock = mock_for(&t, vec![golden(), "x".into(), "y".into(), "z".into(), golden()]);
    let config = EvalConfig { modes: ModeSelection::Regex, ..EvalConfig::default() };
    let results = run_suite(std::slice::from_ref(&t), &store, &mock, &config);
    let m = results[0].mode(EvalMode::Regex).unwrap();
    let table = aggregate(&results, 5).unwrap();
    assert_eq!(table.rows.len(), 1);
    let row = &table.rows[0];
    assert_eq!((row.sr, row.om, row.cm, row.grid.clone()), (m.sr, m.om, m.cm, vec![m.pass_at_k]));
    assert_eq!(row.sr, 40);
}
