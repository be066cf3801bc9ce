#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plauscheck_core::harness::{build_prompt, reference_outputs, EvalTask, TaskExample};
use plauscheck_core::lang::ExecMode;
use plauscheck_core::store::{load_store_file, Store};
use plauscheck_llm::prompt_hash;

pub const NOT_RELEVANT: &str = "Gegebenes Dokument ist nicht für die Regel relevant.";
pub const ALL_DOCS: [u64; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 8713426];

pub fn store_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/golden_store.json")
}

pub fn store() -> Store {
    load_store_file(&store_path()).unwrap()
}

pub fn golden_check() -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/golden_check.pcl");
    std::fs::read_to_string(path).unwrap()
}

/// A suite task: reference source plus a wrong-guard and a wrong-body variant.
pub struct Spec {
    pub id: &'static str,
    pub level: &'static str,
    pub description: &'static str,
    pub code: String,
    /// Same body, relevance guard rewritten; `None` for guard-free tasks.
    pub wrong_guard: Option<String>,
    pub wrong_body: String,
}

fn spec(
    id: &'static str,
    level: &'static str,
    description: &'static str,
    code: &str,
    guard: Option<(&str, &str)>,
    body: (&str, &str),
) -> Spec {
    assert!(code.contains(body.0), "{id}: body pattern missing");
    let wrong_guard = guard.map(|(from, to)| {
        assert!(code.contains(from), "{id}: guard pattern missing");
        code.replacen(from, to, 1)
    });
    Spec {
        id,
        level,
        description,
        code: code.to_string(),
        wrong_guard,
        wrong_body: code.replacen(body.0, body.1, 1),
    }
}

pub fn specs() -> Vec<Spec> {
    vec![
        spec(
            "t1",
            "Low",
            "For German driving licenses issued between March 2000 and March 2010, the material must be plastic.",
            &golden_check(),
            Some(("code == \"DE\"", "code == \"FR\"")),
            ("\"Material {}\"", "\"Material Nr. {}\""),
        ),
        spec(
            "t2",
            "Low",
            "Retrieve and print all barcodes.",
            r#"check "all_barcodes" {
    let result = map();
    for i, b in Barcodes.all() {
        result[format("Barcode {}", i)] = b.payload;
    }
    return (false, result);
}"#,
            None,
            ("b.payload", "b.document.document_number"),
        ),
        spec(
            "t3",
            "Low",
            "List the ids of all element fields of type example.DateField.",
            r#"check "date_fields" {
    let result = map();
    for i, f in ElementFields.filter(field_type == "example.DateField") {
        result[format("Feld {}", i)] = f.id;
    }
    return (false, result);
}"#,
            None,
            ("example.DateField", "example.CharField"),
        ),
        spec(
            "t4",
            "Low",
            "Documents must not be issued after 1 January 2025.",
            r#"check "issuing_date_not_in_future" {
    require document.issuing_date != null else not_applicable("Kein Ausstellungsdatum vorhanden.");
    let result = map();
    for i, d in [document.issuing_date] {
        result["Ausstellungsdatum"] = format("{}", d);
    }
    return (document.issuing_date > date(2025, 1, 1), result);
}"#,
            Some((
                "document.issuing_date != null",
                "document.issuing_date != null and document.issuing_country.code == \"DE\"",
            )),
            ("result[\"Ausstellungsdatum\"]", "result[\"Datum\"]"),
        ),
        spec(
            "t5",
            "Low",
            "Print the countries of entry whose visa requirement refers to information 1.",
            r#"check "visa_countries" {
    let result = map();
    for i, r in VisaRequirements.filter(information.identifier == 1) {
        result[format("Land {}", i)] = r.country_of_entry.name;
    }
    return (false, result);
}"#,
            None,
            ("identifier == 1", "identifier == 2"),
        ),
        spec(
            "t6",
            "Mid",
            "Every material observation of a passport must be paper.",
            r#"check "passport_material_paper" {
    require document.doc_type.category.name == "Reisepass" else not_applicable("Kein Reisepass.");
    let pages = ElementEvaluations.filter(document == document, element.name == "Material");
    let result = map();
    for i, e in pages {
        result[e.part] = e.category;
    }
    return (pages.exclude(category iexact "Papier").count() > 0, result);
}"#,
            Some(("== \"Reisepass\"", "== \"Personalausweis\"")),
            ("result[e.part]", "result[format(\"{}\", i)]"),
        ),
        spec(
            "t7",
            "Mid",
            "German national driving licences assessed as forgeries must be flagged with their number.",
            r#"check "german_licence_assessment" {
    require document.issuing_country.code == "DE" else not_applicable("Nicht in Deutschland ausgestellt.");
    require document.doc_type.category.name == "Führerschein, national" else not_applicable("Kein Führerschein.");
    let result = map();
    for i, d in [document] {
        result["Bewertung"] = d.assessment;
        result["Nummer"] = number(d.document_number);
    }
    return (document.assessment == "Fälschung", result);
}"#,
            Some(("code == \"DE\"", "code == \"AT\"")),
            ("== \"Fälschung\", result", "!= \"Echt\", result"),
        ),
        spec(
            "t8",
            "Mid",
            "National driving licences must carry at least one printing technique observation.",
            r#"check "licence_print_recorded" {
    require document.doc_type.category.name == "Führerschein, national" else not_applicable("Kein Führerschein.");
    let prints = ElementEvaluations.filter(document == document, element.name == "Druck");
    let result = map();
    for i, p in prints {
        result[format("Druck {}", i)] = p.category;
    }
    return (prints.count() == 0, result);
}"#,
            Some(("\"Führerschein, national\"", "\"Reisepass\"")),
            ("prints.count() == 0", "prints.count() > 1"),
        ),
        spec(
            "t9",
            "Mid",
            "German passports may only be issued between 2008 and 2012.",
            r#"check "passport_issue_window" {
    require document.doc_type.name == "Reisepass" else not_applicable("Kein deutscher Reisepass.");
    require document.issuing_date != null else not_applicable("Kein Ausstellungsdatum vorhanden.");
    let result = map();
    for i, y in [year(document.issuing_date)] {
        result["Jahr"] = y;
    }
    return (year(document.issuing_date) < 2008 or year(document.issuing_date) > 2012, result);
}"#,
            Some(("== \"Reisepass\"", "== \"Passeport\"")),
            ("result[\"Jahr\"]", "result[\"Year\"]"),
        ),
        spec(
            "t10",
            "Mid",
            "Document numbers of a document type must grow with the issuing year.",
            r#"check "number_follows_date" {
    require document.issuing_date != null else not_applicable("Kein Ausstellungsdatum vorhanden.");
    require Documents.filter(doc_type == document.doc_type, issuing_date isnull false).count() >= 3
        else not_applicable("Zu wenige Vergleichsdokumente.");
    let points = [];
    for i, p in Documents.filter(doc_type == document.doc_type, issuing_date isnull false) {
        points[i] = [year(p.issuing_date), number(p.document_number)];
    }
    let fit = linear_fit(points);
    let result = map();
    for i, s in [fit.slope] {
        result["Steigung"] = s;
    }
    return (fit.slope <= 0, result);
}"#,
            Some(("count() >= 3", "count() >= 30")),
            ("fit.slope <= 0", "fit.slope > 0"),
        ),
    ]
}

pub fn task(spec: &Spec, store: &Store) -> EvalTask {
    EvalTask {
        id: spec.id.into(),
        level: spec.level.into(),
        description: spec.description.into(),
        reference_code: spec.code.clone(),
        test_documents: ALL_DOCS.to_vec(),
        reference_outputs: reference_outputs(&spec.code, &ALL_DOCS, store, ExecMode::Exact),
        examples: vec![1, 3]
            .into_iter()
            .map(|id| TaskExample {
                input: store.document_summary(id).unwrap(),
                output: reference_outputs(&spec.code, &[id], store, ExecMode::Exact).remove(0),
            })
            .collect(),
    }
}

pub fn fenced(code: &str) -> String {
    format!("```pcl\n{code}\n```")
}

/// Writes `tasks` as a JSON-lines suite.
pub fn write_suite(path: &Path, tasks: &[EvalTask]) {
    let text: String = tasks
        .iter()
        .map(|t| serde_json::to_string(t).unwrap() + "\n")
        .collect();
    std::fs::write(path, text).unwrap();
}

/// Writes a mock fixture table answering each task's prompt with `completions`.
pub fn write_fixtures(path: &Path, entries: &[(&EvalTask, Vec<String>)]) {
    let table: BTreeMap<String, Vec<String>> = entries
        .iter()
        .map(|(task, completions)| {
            let (system, user) = build_prompt(task);
            (prompt_hash(&system, &user), completions.clone())
        })
        .collect();
    std::fs::write(path, serde_json::to_string_pretty(&table).unwrap()).unwrap();
}

pub fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_plauscheck")
}
