//! Writes a comparison table as CSV and JSON and reads both back.

use cubic_census::census::CensusOptions;
use cubic_census::report::{compare_theorem1, emit, read_csv, read_json, Format, Table, XRule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = compare_theorem1(&[10, 20], &XRule::parse("frac=0.1,1")?, &CensusOptions::default())?;
    let table = Table::new(rows).with_meta("rule", "frac=0.1,1");
    let dir = std::env::temp_dir();
    let csv_path = dir.join("cubic_census_report.csv");
    let json_path = dir.join("cubic_census_report.json");
    emit(&table, Format::Csv, &csv_path)?;
    emit(&table, Format::Json, &json_path)?;

    let csv_text = std::fs::read_to_string(&csv_path)?;
    print!("{csv_text}");
    assert_eq!(read_csv(&csv_text)?, table.rows);
    assert_eq!(read_json(&std::fs::read_to_string(&json_path)?)?, table);
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}
