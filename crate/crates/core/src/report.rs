//! Comparisons of census counts against main terms, and their serialization.
//!
//! Every row carries the observed quantity, the main term, their ratio and
//! the size of the remainder with all implied constants set to one. Rows that
//! fall outside the range a main term is claimed for are flagged, not dropped.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::census::{count_fast, irreducible_stats, reducible_count, CensusOptions, CensusQuery, Mode};
use crate::constants::kappa_value;
use crate::error::{Error, Result};
use crate::measure::v3_direct;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    #[serde(rename = "Q")]
    pub q: u32,
    #[serde(rename = "X")]
    pub x: u64,
    pub observed: f64,
    pub main_term: f64,
    /// `observed / main_term`; absent when the main term vanishes.
    pub ratio: Option<f64>,
    pub error_budget: f64,
    pub method: String,
    pub wall_s: f64,
    /// `X` lies outside the range the main term is stated for.
    #[serde(default)]
    pub out_of_range: bool,
    /// The remainder is at least as large as the main term.
    #[serde(default)]
    pub error_dominated: bool,
    /// `X < Q^{14/5}`, below the range where the irreducible sum asymptotic is proven.
    #[serde(default)]
    pub below_proven_range: bool,
}

impl ComparisonRow {
    fn new(q: u32, x: u64, observed: f64, main_term: f64, error_budget: f64, method: &str, wall_s: f64) -> Self {
        let ratio = (main_term > 0.0).then(|| observed / main_term);
        Self {
            q,
            x,
            observed,
            main_term,
            ratio,
            error_budget,
            method: method.to_string(),
            wall_s,
            out_of_range: false,
            error_dominated: main_term.partial_cmp(&error_budget) != Some(std::cmp::Ordering::Greater),
            below_proven_range: false,
        }
    }
}

/// `floor(Q^4 / 27)`, exactly.
pub fn q4_over_27(q: u32) -> u64 {
    (q as u64).pow(4) / 27
}

/// How the thresholds `X` are chosen for each `Q`.
#[derive(Debug, Clone, PartialEq)]
pub enum XRule {
    /// `X = floor(f Q^4 / 27)` for each fraction `f`; `f = 1` is exact.
    Fractions(Vec<f64>),
    Explicit(Vec<u64>),
}

impl XRule {
    pub fn q4_over_27() -> Self {
        XRule::Fractions(vec![1.0])
    }

    /// Parses `q4/27`, `frac=F[,F...]` or a comma list of integers.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q4/27") {
            return Ok(Self::q4_over_27());
        }
        if let Some(rest) = s.strip_prefix("frac=") {
            let fs = parse_list::<f64>(rest)?;
            if fs.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
                return Err(Error::InvalidQuery(format!("fractions must be non-negative: {rest}")));
            }
            return Ok(XRule::Fractions(fs));
        }
        Ok(XRule::Explicit(parse_list::<u64>(s)?))
    }

    /// Sorted, de-duplicated thresholds for height `q`.
    pub fn thresholds(&self, q: u32) -> Vec<u64> {
        let mut xs: Vec<u64> = match self {
            XRule::Fractions(fs) => fs
                .iter()
                .map(|&f| {
                    if f == 1.0 {
                        q4_over_27(q)
                    } else {
                        (f * (q as f64).powi(4) / 27.0).floor() as u64
                    }
                })
                .collect(),
            XRule::Explicit(v) => v.clone(),
        };
        xs.sort_unstable();
        xs.dedup();
        xs
    }
}

/// Comma-separated values.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    let out: std::result::Result<Vec<T>, _> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect();
    match out {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(Error::InvalidQuery(format!("cannot parse list '{s}'"))),
    }
}

fn ln_ratio(q: u32, x: u64) -> f64 {
    if x == 0 {
        0.0
    } else {
        ((q as f64).powi(4) / x as f64).ln().abs()
    }
}

/// `N(Q, X)` against `kappa Q^{2/3} X^{5/6}`, with remainder `X |ln(Q^4/X)| + X + Q^3`.
pub fn compare_theorem1(qs: &[u32], rule: &XRule, opts: &CensusOptions) -> Result<Vec<ComparisonRow>> {
    let kappa = kappa_value();
    let mut rows = Vec::new();
    for &q in qs {
        let xs = rule.thresholds(q);
        let res = count_fast(&CensusQuery::new(q, xs.clone(), Mode::All)?, opts)?;
        let qf = q as f64;
        for (&x, &n) in xs.iter().zip(&res.counts) {
            let xf = x as f64;
            let main = kappa * qf.powf(2.0 / 3.0) * xf.powf(5.0 / 6.0);
            let budget = xf * ln_ratio(q, x) + xf + qf.powi(3);
            let mut row = ComparisonRow::new(q, x, n as f64, main, budget, "fast", res.wall_s);
            row.out_of_range = x > q4_over_27(q);
            rows.push(row);
        }
    }
    Ok(rows)
}

/// `s(Q, X)` against `7/6 kappa Q^{2/3} X^{1/3}`, with remainder
/// `X^{1/2} |ln(Q^4/X)| + X^{1/2} + Q^{1.7}`.
pub fn compare_theorem2(qs: &[u32], rule: &XRule, opts: &CensusOptions) -> Result<Vec<ComparisonRow>> {
    let kappa = kappa_value();
    let mut rows = Vec::new();
    for &q in qs {
        let xs = rule.thresholds(q);
        let res = irreducible_stats(&CensusQuery::new(q, xs.clone(), Mode::IrreducibleOnly)?, opts)?;
        let qf = q as f64;
        for (&x, &s) in xs.iter().zip(&res.inv_sqrt_sums) {
            let xf = x as f64;
            let main = 7.0 / 6.0 * kappa * qf.powf(2.0 / 3.0) * xf.cbrt();
            let budget = xf.sqrt() * ln_ratio(q, x) + xf.sqrt() + qf.powf(1.7);
            let mut row = ComparisonRow::new(q, x, s, main, budget, "irreducible", res.wall_s);
            row.out_of_range = x > q4_over_27(q);
            row.below_proven_range = xf < qf.powf(2.8);
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Lattice count against `Q^4` times the volume of the unit band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    #[serde(rename = "Q")]
    pub q: u32,
    #[serde(rename = "X")]
    pub x: u64,
    pub count: u64,
    /// `X / Q^4`.
    pub delta: f64,
    pub volume: f64,
    pub volume_err: f64,
    /// `|N(Q, X) - Q^4 vol| / Q^3`.
    pub gap: f64,
    /// Uncertainty of `gap` from the volume quadrature.
    pub gap_err: f64,
    pub wall_s: f64,
}

impl GapReport {
    /// As a comparison row: the lattice count against `Q^4 vol`, remainder `Q^3`.
    pub fn to_row(&self) -> ComparisonRow {
        let qf = self.q as f64;
        let main = qf.powi(4) * self.volume;
        ComparisonRow::new(
            self.q,
            self.x,
            self.count as f64,
            main,
            qf.powi(3),
            "fast+volume",
            self.wall_s,
        )
    }
}

pub fn davenport_gap(q: u32, x: u64, tol: f64, opts: &CensusOptions) -> Result<GapReport> {
    let start = Instant::now();
    let res = count_fast(&CensusQuery::new(q, vec![x], Mode::All)?, opts)?;
    let q4 = (q as f64).powi(4);
    let delta = x as f64 / q4;
    let vol = v3_direct(delta, tol)?;
    let q3 = (q as f64).powi(3);
    let count = res.counts[0];
    Ok(GapReport {
        q,
        x,
        count,
        delta,
        volume: vol.value,
        volume_err: vol.error,
        gap: (count as f64 - q4 * vol.value).abs() / q3,
        gap_err: q4 * vol.error / q3,
        wall_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorollaryParam {
    /// `#{H <= Q, |D| <= gamma3 Q^{4 - 2v}}` against `Q^{4 - 5v/3}`, `v in [0, 3/5)`.
    V(f64),
    /// `sum |D|^{-1/2}` over irreducibles with `1 <= |D| <= gamma3 Q^{4 - eta}`
    /// against `Q^{2 - eta/3}`, `eta in [0, 9/10)`.
    Eta(f64),
}

impl CorollaryParam {
    /// Parses `v=0.3` or `eta=0.5`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidQuery(format!("expected v=<value> or eta=<value>, got '{s}'"));
        let (k, v) = s.split_once('=').ok_or_else(bad)?;
        let v: f64 = v.trim().parse().map_err(|_| bad())?;
        let p = match k.trim() {
            "v" => CorollaryParam::V(v),
            "eta" => CorollaryParam::Eta(v),
            _ => return Err(bad()),
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CorollaryParam::V(v) => (0.0..0.6).contains(&v),
            CorollaryParam::Eta(e) => (0.0..0.9).contains(&e),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidQuery(format!("{self:?} outside its admissible range")))
        }
    }
}

/// Scaling tables with `X` tied to `Q` through `gamma3`; the remainder column is 0
/// because only the order of growth is claimed.
pub fn corollary_scan(
    qs: &[u32],
    params: &[CorollaryParam],
    gamma3: f64,
    opts: &CensusOptions,
) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::new();
    for p in params {
        p.validate()?;
        for &q in qs {
            let qf = q as f64;
            let row = match *p {
                CorollaryParam::V(v) => {
                    let x = (gamma3 * qf.powf(4.0 - 2.0 * v)).floor() as u64;
                    let res = count_fast(&CensusQuery::new(q, vec![x], Mode::All)?, opts)?;
                    ComparisonRow::new(
                        q,
                        x,
                        res.counts[0] as f64,
                        qf.powf(4.0 - 5.0 * v / 3.0),
                        0.0,
                        "fast",
                        res.wall_s,
                    )
                }
                CorollaryParam::Eta(eta) => {
                    let x = (gamma3 * qf.powf(4.0 - eta)).floor() as u64;
                    let res = irreducible_stats(&CensusQuery::new(q, vec![x], Mode::IrreducibleOnly)?, opts)?;
                    ComparisonRow::new(
                        q,
                        x,
                        res.inv_sqrt_sums[0],
                        qf.powf(2.0 - eta / 3.0),
                        0.0,
                        "irreducible",
                        res.wall_s,
                    )
                }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Reducible counts against `Q^3`; `X` records the bound `54 Q^4` used.
pub fn reducible_scan(qs: &[u32], opts: &CensusOptions) -> Result<Vec<ComparisonRow>> {
    qs.iter()
        .map(|&q| {
            let start = Instant::now();
            let n = reducible_count(q, opts)?;
            let qf = q as f64;
            Ok(ComparisonRow::new(
                q,
                crate::census::disc_bound(q),
                n as f64,
                qf.powi(3),
                0.0,
                "reducible",
                start.elapsed().as_secs_f64(),
            ))
        })
        .collect()
}

/// `N*(Q, X)` against `Q X^{3/4}` and `s(Q, X)` against `Q X^{1/4}`; the
/// ratios must stay bounded. Methods are `irreducible-count` and `irreducible-sum`.
pub fn upper_bound_scan(qs: &[u32], rule: &XRule, opts: &CensusOptions) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::new();
    for &q in qs {
        let xs: Vec<u64> = rule.thresholds(q).into_iter().filter(|&x| x > 0).collect();
        if xs.is_empty() {
            continue;
        }
        let res = irreducible_stats(&CensusQuery::new(q, xs.clone(), Mode::IrreducibleOnly)?, opts)?;
        let qf = q as f64;
        for (i, &x) in xs.iter().enumerate() {
            let xf = x as f64;
            rows.push(ComparisonRow::new(
                q,
                x,
                res.counts[i] as f64,
                qf * xf.powf(0.75),
                0.0,
                "irreducible-count",
                res.wall_s,
            ));
            rows.push(ComparisonRow::new(
                q,
                x,
                res.inv_sqrt_sums[i],
                qf * xf.powf(0.25),
                0.0,
                "irreducible-sum",
                res.wall_s,
            ));
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidQuery(format!("unknown format '{s}'"))),
        }
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "Q",
    "X",
    "observed",
    "main_term",
    "ratio",
    "error_budget",
    "method",
    "wall_s",
];

/// Rows plus free-form metadata (for example the `gamma3` used). Metadata is
/// kept in JSON output only; CSV has exactly the eight row columns.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub meta: BTreeMap<String, serde_json::Value>,
    pub rows: Vec<ComparisonRow>,
}

impl Table {
    pub fn new(rows: Vec<ComparisonRow>) -> Self {
        Self {
            meta: BTreeMap::new(),
            rows,
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(rows: &[ComparisonRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.q.to_string(),
            r.x.to_string(),
            sci(r.observed),
            sci(r.main_term),
            r.ratio.map(sci).unwrap_or_default(),
            sci(r.error_budget),
            r.method.clone(),
            sci(r.wall_s),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn to_csv_string(rows: &[ComparisonRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Parses CSV written by [`write_csv`]; the flag columns are not stored and
/// read back as `false`.
pub fn read_csv(s: &str) -> Result<Vec<ComparisonRow>> {
    let mut r = csv::Reader::from_reader(s.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::InvalidQuery(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| Error::InvalidQuery(format!("bad number '{}' in column {}", &rec[i], CSV_HEADER[i])))
        };
        let int = |i: usize| -> Result<u64> {
            rec[i]
                .parse()
                .map_err(|_| Error::InvalidQuery(format!("bad integer '{}' in column {}", &rec[i], CSV_HEADER[i])))
        };
        rows.push(ComparisonRow {
            q: int(0)? as u32,
            x: int(1)?,
            observed: num(2)?,
            main_term: num(3)?,
            ratio: if rec[4].is_empty() { None } else { Some(num(4)?) },
            error_budget: num(5)?,
            method: rec[6].to_string(),
            wall_s: num(7)?,
            out_of_range: false,
            error_dominated: false,
            below_proven_range: false,
        });
    }
    Ok(rows)
}

pub fn to_json_string(table: &Table) -> Result<String> {
    let mut s = serde_json::to_string_pretty(table)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json(s: &str) -> Result<Table> {
    Ok(serde_json::from_str(s)?)
}

/// Writes `table` to `path` in `format`.
pub fn emit(table: &Table, format: Format, path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    match format {
        Format::Csv => write_csv(&table.rows, &mut w)?,
        Format::Json => w.write_all(to_json_string(table)?.as_bytes()).map_err(io)?,
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> CensusOptions {
        CensusOptions::default()
    }

    fn sample_row() -> ComparisonRow {
        ComparisonRow::new(7, 88, 1234.0, 1000.0 / 3.0, 0.1 + 0.2, "fast", 1e-3 / 7.0)
    }

    #[test]
    fn theorem1_zero_threshold_row() {
        let rows = compare_theorem1(&[1], &XRule::Explicit(vec![0]), &opts()).unwrap();
        let r = &rows[0];
        assert_eq!((r.q, r.x, r.observed, r.main_term), (1, 0, 10.0, 0.0));
        assert!(r.ratio.is_none() && r.error_dominated);
    }

    #[test]
    fn theorem1_ratio_tracks_five_sixths_scaling() {
        let q = 60;
        let x = q4_over_27(q);
        let rows = compare_theorem1(&[q], &XRule::Explicit(vec![x / 1024, x]), &opts()).unwrap();
        assert!(
            (rows[1].main_term / rows[0].main_term / (x as f64 / (x / 1024) as f64).powf(5.0 / 6.0) - 1.0).abs()
                < 1e-12
        );
        for r in &rows {
            let ratio = r.ratio.unwrap();
            assert!(ratio.is_finite() && ratio > 0.0);
            assert!(!r.out_of_range);
        }
    }

    #[test]
    fn out_of_range_rows_are_flagged() {
        let rows = compare_theorem1(&[3], &XRule::Fractions(vec![1.0, 2.0]), &opts()).unwrap();
        assert!(!rows[0].out_of_range && rows[1].out_of_range);
    }

    #[test]
    fn theorem2_flags() {
        let rows = compare_theorem2(&[1], &XRule::Explicit(vec![0, 3]), &opts()).unwrap();
        assert_eq!(rows[0].observed, 0.0);
        assert!(rows[0].error_dominated && rows[1].out_of_range);
        let rows = compare_theorem2(&[1], &XRule::q4_over_27(), &opts()).unwrap();
        assert!(rows[0].x == 0 && rows[0].error_dominated);
        let rows = compare_theorem2(&[20], &XRule::q4_over_27(), &opts()).unwrap();
        assert!(!rows[0].below_proven_range);
        let rows = compare_theorem2(&[20], &XRule::Explicit(vec![100]), &opts()).unwrap();
        assert!(rows[0].below_proven_range);
    }

    #[test]
    fn theorem2_main_term_doubles_q() {
        let k = kappa_value();
        let m = |q: f64, x: f64| 7.0 / 6.0 * k * q.powf(2.0 / 3.0) * x.cbrt();
        let (q, f) = (10.0, 0.5f64);
        let r = m(2.0 * q, f * (2.0 * q).powi(4)) / m(q, f * q.powi(4));
        assert!((r - 4.0).abs() < 1e-12);
    }

    #[test]
    fn x_rule_parsing() {
        assert_eq!(XRule::parse("q4/27").unwrap().thresholds(10), vec![370]);
        assert_eq!(XRule::parse("frac=0.5,1").unwrap().thresholds(3), vec![1, 3]);
        assert_eq!(XRule::parse("5, 1,5").unwrap().thresholds(3), vec![1, 5]);
        assert!(XRule::parse("frac=-1").is_err());
        assert!(XRule::parse("abc").is_err());
        assert_eq!(q4_over_27(400), 948_148_148);
    }

    #[test]
    fn gap_at_zero_is_the_singular_count() {
        let g = davenport_gap(6, 0, 1e-6, &opts()).unwrap();
        let n0 = count_fast(&CensusQuery::new(6, vec![0], Mode::All).unwrap(), &opts())
            .unwrap()
            .counts[0];
        assert_eq!(g.volume, 0.0);
        assert!((g.gap - n0 as f64 / 216.0).abs() < 1e-15);
    }

    #[test]
    fn corollary_v_zero_is_total_scaling() {
        // gamma3 Q^4 bounds every |D|, so the count is the full tuple count
        let rows = corollary_scan(&[4, 8], &[CorollaryParam::V(0.0)], 54.0, &opts()).unwrap();
        for r in rows {
            assert_eq!(r.observed as u64, crate::census::total_tuples(r.q));
            assert!((r.main_term - (r.q as f64).powi(4)).abs() < 1e-9);
        }
        assert!(CorollaryParam::parse("v=0.6").is_err());
        assert!(CorollaryParam::parse("eta=0.95").is_err());
        assert_eq!(CorollaryParam::parse("eta=0.5").unwrap(), CorollaryParam::Eta(0.5));
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            to_csv_string(&[]).unwrap(),
            "Q,X,observed,main_term,ratio,error_budget,method,wall_s\n"
        );
        let s = to_csv_string(&[sample_row()]).unwrap();
        assert_eq!(s.lines().count(), 2);
        let back = read_csv(&s).unwrap();
        let mut expect = sample_row();
        expect.error_dominated = false;
        assert_eq!(back, vec![expect]);
    }

    #[test]
    fn json_round_trip() {
        let mut rows = vec![sample_row()];
        rows.push(ComparisonRow::new(1, 0, 10.0, 0.0, 1.0, "fast", 0.0));
        let t = Table::new(rows).with_meta("gamma3", 44.0);
        let back = read_json(&to_json_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn emit_reports_path_on_failure() {
        let t = Table::new(vec![]);
        let err = emit(&t, Format::Csv, Path::new("/nonexistent-dir/out.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }
}
