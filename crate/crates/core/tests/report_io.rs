use cubic_census::census::CensusOptions;
use cubic_census::report::{
    compare_theorem1, compare_theorem2, emit, read_csv, read_json, reducible_scan, Format, Table, XRule, CSV_HEADER,
};

fn sample_rows() -> Vec<cubic_census::report::ComparisonRow> {
    let opts = CensusOptions::default();
    let rule = XRule::Fractions(vec![0.0, 0.3, 1.0, 10.0]);
    let mut rows = compare_theorem1(&[7, 11], &rule, &opts).unwrap();
    rows.extend(compare_theorem2(&[6], &rule, &opts).unwrap());
    rows.extend(reducible_scan(&[5], &opts).unwrap());
    rows
}

#[test]
fn csv_file_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let rows = sample_rows();
    emit(&Table::new(rows.clone()), Format::Csv, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert!(!text.contains('\r'));
    let back = read_csv(&text).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!((a.q, a.x, &a.method), (b.q, b.x, &b.method));
        assert_eq!(a.observed.to_bits(), b.observed.to_bits());
        assert_eq!(a.main_term.to_bits(), b.main_term.to_bits());
        assert_eq!(a.ratio.map(f64::to_bits), b.ratio.map(f64::to_bits));
        assert_eq!(a.error_budget.to_bits(), b.error_budget.to_bits());
        assert_eq!(a.wall_s.to_bits(), b.wall_s.to_bits());
    }
}

#[test]
fn json_file_round_trips_with_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.json");
    let table = Table::new(sample_rows())
        .with_meta("gamma3", 44.0)
        .with_meta("note", "desk run");
    emit(&table, Format::Json, &path).unwrap();
    let back = read_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, table);
}

#[test]
fn missing_ratio_is_an_empty_csv_field() {
    let rows = compare_theorem1(&[4], &XRule::Explicit(vec![0, 9]), &CensusOptions::default()).unwrap();
    assert_eq!(rows[0].ratio, None);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    emit(&Table::new(rows.clone()), Format::Csv, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let first = text.lines().nth(1).unwrap();
    assert_eq!(first.split(',').nth(4), Some(""));
    assert_eq!(read_csv(&text).unwrap()[0].ratio, None);
}

#[test]
fn emit_into_missing_directory_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nope").join("x.csv");
    let err = emit(&Table::new(sample_rows()), Format::Csv, &path).unwrap_err();
    assert!(err.to_string().contains("x.csv"), "{err}");
}
