use std::path::PathBuf;

use chrono::NaiveDate;
use plauscheck_core::store::{
    evaluate_against_spec, inject_change, load_store, load_store_file, query_count, query_exclude, query_filter,
    query_get, Collection, PredOp, Predicate, QueryError, Store, StoreError, Verdict,
};
use plauscheck_core::value::Value;
use proptest::prelude::*;

fn store() -> Store {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden_store.json");
    load_store_file(&path).unwrap()
}

fn categories(s: &Store, rows: &plauscheck_core::value::RowSet) -> Vec<String> {
    rows.iter()
        .map(|r| match s.field(r, "category") {
            Some(Value::Str(c)) => c,
            other => panic!("category {other:?}"),
        })
        .collect()
}

#[test]
fn loading() {
    let s = store();
    assert_eq!(s.len(Collection::Documents), 10);
    assert!(load_store("{}").unwrap().is_empty());
    let dangling = r#"{"countries":[{"code":"DE","name":"D"}],"elements":[{"name":"Material"}],
        "element_evaluations":[{"document":99,"element":"Material","part":"Cover","category":"Papier"}]}"#;
    match load_store(dangling) {
        Err(StoreError::DanglingReference { path, target, .. }) => {
            assert_eq!(path, "document");
            assert_eq!(target, "Documents `99`");
        }
        other => panic!("expected dangling reference, got {other:?}"),
    }
    assert!(matches!(load_store("[1,"), Err(StoreError::Parse(_))));
}

#[test]
fn filter_exclude_get_count() {
    let s = store();
    assert_eq!(query_filter(&s, "Barcodes", &[]).unwrap().len(), 2);
    let dates = query_filter(&s, "ElementFields", &[Predicate::eq("field_type", "example.DateField")]).unwrap();
    assert_eq!(dates.iter().map(|r| s.row_key(r)).collect::<Vec<_>>(), [Value::Int(1), Value::Int(3)]);
    let material = [Predicate::eq("document", 1), Predicate::eq("element.name", "Material")];
    assert_eq!(categories(&s, &query_filter(&s, "ElementEvaluations", &material).unwrap()), ["Kunststoff"]);

    let kunststoff = |v: &str| Predicate::new("category", PredOp::IExact, v.into()).unwrap();
    let doc1 = query_filter(&s, "ElementEvaluations", &[Predicate::eq("document", 1)]).unwrap();
    assert!(s.select(&doc1, &[kunststoff("kunststoff")], false).unwrap().is_empty());
    let doc7 = query_filter(&s, "ElementEvaluations", &[Predicate::eq("document", 7)]).unwrap();
    assert_eq!(categories(&s, &s.select(&doc7, &[kunststoff("Kunststoff")], false).unwrap()), ["Papier"]);
    assert!(query_exclude(&s, "Barcodes", &[]).unwrap().is_empty());

    let info = query_get(&s, "VisaRequirementInformation", &[Predicate::eq("identifier", 1)]).unwrap();
    assert_eq!(s.row_key(info), Value::Int(1));
    assert!(matches!(
        query_get(&s, "ElementFields", &[Predicate::eq("field_type", "example.DateField")]),
        Err(QueryError::MultipleRows { count: 2, .. })
    ));
    let empty = load_store("{}").unwrap();
    assert!(matches!(query_get(&empty, "Documents", &[]), Err(QueryError::NotFound { .. })));

    assert_eq!(query_count(&s, "Documents", &[]).unwrap(), 10);
    let table4 = [Predicate::eq("document", 8713426), kunststoff("Kunststoff")];
    assert_eq!(query_count(&s, "ElementEvaluations", &table4).unwrap(), 0);
    let forged = inject_change(&s, 8713426, "Material", "Cover", "Kunststoff").unwrap();
    assert_eq!(query_count(&forged, "ElementEvaluations", &table4).unwrap(), 1);
    assert!(matches!(query_count(&s, "Passports", &[]), Err(QueryError::UnknownCollection(_))));
    assert!(matches!(
        query_count(&s, "Documents", &[Predicate::eq("colour", "red")]),
        Err(QueryError::UnknownField { .. })
    ));
}

#[test]
fn injection_and_spec_diff() {
    let s = store();
    let before = s.content_hash();
    let spec = s.specifications()[0].clone();
    let clean = evaluate_against_spec(&s, 8713426, &spec).unwrap();
    assert!(clean.parts.iter().all(|p| p.verdict == Verdict::Matches));
    assert_eq!(clean.window, Verdict::Deviating);

    let forged = inject_change(&s, 8713426, "Material", "Cover", "Kunststoff").unwrap();
    assert_eq!(s.content_hash(), before);
    let report = evaluate_against_spec(&forged, 8713426, &spec).unwrap();
    let deviating: Vec<_> = report.deviating_parts().map(|p| (p.part.as_str(), p.observed.as_str())).collect();
    assert_eq!(deviating, [("Cover", "Kunststoff")]);
    assert_eq!(report.parts.iter().filter(|p| p.verdict == Verdict::Matches).count(), 5);

    let same = inject_change(&s, 8713426, "Material", "Cover", "Papier").unwrap();
    assert_eq!(same.content_hash(), before);
    assert!(matches!(
        inject_change(&s, 8713426, "Material", "Page 99", "Papier"),
        Err(QueryError::NotFound { .. })
    ));
    assert!(evaluate_against_spec(&s, 12345, &spec).is_err());

    // Document 7 has no Page 3 observation.
    let partial = evaluate_against_spec(&s, 7, &spec).unwrap();
    let page3 = partial.parts.iter().find(|p| p.part == "Page 3").unwrap();
    assert_eq!((page3.observed.as_str(), page3.verdict), ("", Verdict::Deviating));
}

fn pred_strategy() -> impl Strategy<Value = (String, PredOp, Value)> {
    let paths = prop::sample::select(vec![
        "category",
        "part",
        "document",
        "element.name",
        "document.issuing_date",
        "document.issuing_country.code",
    ]);
    let ops = prop::sample::select(PredOp::ALL.to_vec());
    let values = prop_oneof![
        prop::sample::select(vec!["Papier", "kunststoff", "Kunststoff", "Cover", "Material", "DE", "Page 1"])
            .prop_map(Value::from),
        (0i64..10).prop_map(Value::Int),
        Just(Value::Int(8713426)),
        any::<bool>().prop_map(Value::Bool),
        (2000i32..2022).prop_map(|y| Value::Date(NaiveDate::from_ymd_opt(y, 1, 1).unwrap())),
        prop::collection::vec(prop::sample::select(vec!["Papier", "Offset", "DE"]).prop_map(Value::from), 0..3)
            .prop_map(Value::List),
    ];
    (paths.prop_map(String::from), ops, values)
}

proptest! {
    #[test]
    fn filter_and_exclude_partition(raw in prop::collection::vec(pred_strategy(), 0..3)) {
        let s = store();
        let preds: Vec<Predicate> = raw
            .into_iter()
            .filter_map(|(path, op, value)| Predicate::new(&path, op, value).ok())
            .collect();
        let kept = query_filter(&s, "ElementEvaluations", &preds);
        let dropped = query_exclude(&s, "ElementEvaluations", &preds);
        if let (Ok(kept), Ok(dropped)) = (&kept, &dropped) {
            let mut all: Vec<usize> = kept.iter().chain(dropped.iter()).map(|r| r.index).collect();
            all.sort();
            prop_assert_eq!(all, (0..s.len(Collection::ElementEvaluations)).collect::<Vec<_>>());
            prop_assert_eq!(query_count(&s, "ElementEvaluations", &preds).unwrap(), kept.len());
            prop_assert_eq!(query_filter(&s, "ElementEvaluations", &preds).unwrap().iter().collect::<Vec<_>>(),
                            kept.iter().collect::<Vec<_>>());
        } else {
            prop_assert_eq!(kept.is_err(), dropped.is_err());
        }
    }
}
