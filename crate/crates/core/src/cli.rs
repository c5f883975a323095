//! Command-line driver.
//!
//! `cubic-census <command> [flags]`. A `--config` file of `key = value` lines
//! supplies defaults for any flag (keys are flag names without the dashes);
//! flags given on the command line win. Exit status is 0 on success, 1 on
//! usage or validation errors and 2 on numerical failures or a naive/fast
//! mismatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::census::{
    count_fast, count_naive, disc_bound, irreducible_stats, reducible_count, total_tuples, CensusOptions, CensusQuery,
    CensusResult, Mode,
};
use crate::constants::{constants_report, gamma3_estimate, GAMMA3_GRID, GAMMA3_POLISH};
use crate::error::{Error, Result};
use crate::measure::{measure_sample, MeasureSample, SigmaTable, CUBE_DISC_BOUND};
use crate::report::{
    compare_theorem1, compare_theorem2, corollary_scan, davenport_gap, emit, parse_list, to_csv_string, to_json_string,
    CorollaryParam, Format, GapReport, Table, XRule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// N(Q, X) by the naive scan, the fiber counter, or both
    Census,
    /// irreducible counts N*(Q, X) and the reducible count
    Irr,
    /// s(Q, X), the sum of |D|^{-1/2} over irreducible cubics
    Sum,
    /// face measures, sphere measure and both volumes for each delta
    Measure,
    /// I1, I2, c_z, c_y, c1, both kappa forms and gamma3
    Constants,
    /// N(Q, X) against kappa Q^{2/3} X^{5/6}
    Compare1,
    /// s(Q, X) against 7/6 kappa Q^{2/3} X^{1/3}
    Compare2,
    /// |N(Q, X) - Q^4 vol| / Q^3
    Gap,
    /// growth tables for v=... and eta=... parameters
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Naive,
    Fast,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "cubic-census",
    version,
    about = "Census of integer cubics by height and discriminant"
)]
#[command(args_override_self = true)]
pub struct Args {
    pub command: Command,
    /// height bound Q
    #[arg(long)]
    pub q: Option<u32>,
    /// comma list of heights
    #[arg(long = "q-list")]
    pub q_list: Option<String>,
    /// comma list of discriminant bounds X
    #[arg(long)]
    pub x: Option<String>,
    /// q4/27, frac=F[,F..], an integer list, or for scan v=..,eta=..
    #[arg(long = "x-rule")]
    pub x_rule: Option<String>,
    /// comma list of deltas
    #[arg(long)]
    pub delta: Option<String>,
    /// absolute quadrature tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// worker threads (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    /// output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// file of key = value defaults
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Failure classes with their exit codes.
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Error::from(e).into()
    }
}

const CONFIG_KEYS: [&str; 11] = [
    "q", "q-list", "x", "x-rule", "delta", "tol", "threads", "out", "format", "method", "config",
];

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidQuery(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        if !CONFIG_KEYS.contains(&k.as_str()) || k == "config" {
            return Err(Error::InvalidQuery(format!(
                "{}:{}: unknown key '{k}'",
                path.display(),
                i + 1
            )));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

/// Runs the driver on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let args = match parse(&argv) {
        Ok(a) => a,
        Err(code) => return code,
    };
    let mut stdout = std::io::stdout().lock();
    match execute(&args, &mut stdout) {
        Ok(summary) => {
            let _ = writeln!(stdout, "{summary}");
            0
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            2
        }
    }
}

fn parse(argv: &[OsString]) -> std::result::Result<Args, i32> {
    let first = Args::try_parse_from(argv).map_err(clap_exit)?;
    let Some(path) = first.config.clone() else {
        return Ok(first);
    };
    let entries = read_config(&path).map_err(|e| {
        eprintln!("error: {e}");
        1
    })?;
    let mut merged: Vec<OsString> = argv.iter().take(1).cloned().collect();
    for (k, v) in entries {
        merged.push(format!("--{k}").into());
        merged.push(v.into());
    }
    merged.extend(argv.iter().skip(1).cloned());
    Args::try_parse_from(merged).map_err(clap_exit)
}

fn clap_exit(e: clap::Error) -> i32 {
    let code = if e.use_stderr() { 1 } else { 0 };
    let _ = e.print();
    code
}

fn opts(args: &Args) -> Result<CensusOptions> {
    if args.threads == Some(0) {
        return Err(Error::InvalidQuery("--threads must be at least 1".into()));
    }
    Ok(CensusOptions {
        threads: args.threads,
        ..CensusOptions::default()
    })
}

fn heights(args: &Args) -> Result<Vec<u32>> {
    let qs = match (&args.q_list, args.q) {
        (Some(list), _) => parse_list::<u32>(list)?,
        (None, Some(q)) => vec![q],
        (None, None) => return Err(Error::InvalidQuery("--q or --q-list is required".into())),
    };
    if qs.contains(&0) {
        return Err(Error::InvalidQuery("Q must be at least 1".into()));
    }
    Ok(qs)
}

fn tol(args: &Args, default: f64) -> Result<f64> {
    let t = args.tol.unwrap_or(default);
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(Error::InvalidQuery(format!("--tol must be positive, got {t}")))
    }
}

/// `--x` if given, else `--x-rule`, else `default`.
fn x_rule(args: &Args, default: XRule) -> Result<XRule> {
    match (&args.x, &args.x_rule) {
        (Some(x), _) => Ok(XRule::Explicit(parse_list(x)?)),
        (None, Some(r)) => XRule::parse(r),
        (None, None) => Ok(default),
    }
}

fn format(args: &Args) -> Format {
    match args.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => match args.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Csv,
        },
    }
}

/// Writes records of any serializable row type.
fn write_records<R: Serialize>(
    args: &Args,
    rows: &[R],
    meta: Option<&serde_json::Value>,
    out: &mut dyn std::io::Write,
) -> Result<()> {
    let text = match format(args) {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            for r in rows {
                w.serialize(r)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::InvalidQuery(e.to_string()))?).expect("UTF-8")
        }
        Format::Json => {
            let v = match meta {
                Some(m) => serde_json::json!({ "meta": m, "rows": rows }),
                None => serde_json::json!({ "rows": rows }),
            };
            let mut s = serde_json::to_string_pretty(&v)?;
            s.push('\n');
            s
        }
    };
    write_text(args, &text, out)
}

fn write_table(args: &Args, table: &Table, out: &mut dyn std::io::Write) -> Result<()> {
    match &args.out {
        Some(path) => emit(table, format(args), path),
        None => {
            let text = match format(args) {
                Format::Csv => to_csv_string(&table.rows)?,
                Format::Json => to_json_string(table)?,
            };
            write_text(args, &text, out)
        }
    }
}

fn write_text(args: &Args, text: &str, out: &mut dyn std::io::Write) -> Result<()> {
    let (res, path) = match &args.out {
        Some(path) => (std::fs::write(path, text), path.clone()),
        None => (out.write_all(text.as_bytes()), PathBuf::from("<stdout>")),
    };
    res.map_err(|source| Error::Io { path, source })
}

#[derive(Debug, Serialize)]
struct CountRow {
    #[serde(rename = "Q")]
    q: u32,
    #[serde(rename = "X")]
    x: u64,
    count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    inv_sqrt_sum: Option<f64>,
    method: &'static str,
    wall_s: f64,
}

fn count_rows(res: &CensusResult, with_sums: bool) -> Vec<CountRow> {
    res.thresholds
        .iter()
        .enumerate()
        .map(|(i, &x)| CountRow {
            q: res.q,
            x,
            count: res.counts[i],
            inv_sqrt_sum: with_sums.then(|| res.inv_sqrt_sums[i]),
            method: if res.mode == Mode::IrreducibleOnly {
                "irreducible"
            } else {
                res.method.name()
            },
            wall_s: res.wall_s,
        })
        .collect()
}

fn default_census_x(q: u32) -> XRule {
    let mut xs = vec![0, 1, 2, 5, 10, 100, 1000, disc_bound(q)];
    xs.sort_unstable();
    xs.dedup();
    XRule::Explicit(xs)
}

fn execute(args: &Args, out: &mut dyn std::io::Write) -> std::result::Result<String, Failure> {
    let o = opts(args)?;
    match args.command {
        Command::Census => {
            let qs = heights(args)?;
            let method = args.method.unwrap_or(MethodArg::Fast);
            let mut rows = Vec::new();
            let mut mismatches = Vec::new();
            for &q in &qs {
                let xs = x_rule(args, default_census_x(q))?.thresholds(q);
                let query = CensusQuery::new(q, xs, Mode::All)?;
                let naive = matches!(method, MethodArg::Naive | MethodArg::Both)
                    .then(|| count_naive(&query, &o))
                    .transpose()?;
                let fast = matches!(method, MethodArg::Fast | MethodArg::Both)
                    .then(|| count_fast(&query, &o))
                    .transpose()?;
                if let (Some(n), Some(f)) = (&naive, &fast) {
                    if n.counts != f.counts {
                        mismatches.push(q);
                    }
                }
                for r in naive.iter().chain(fast.iter()) {
                    rows.extend(count_rows(r, false));
                }
            }
            write_records(args, &rows, None, out)?;
            if !mismatches.is_empty() {
                return Err(Failure::Numerical(format!(
                    "naive and fast counts differ at Q = {mismatches:?}"
                )));
            }
            let mut s = format!("census: {} rows", rows.len());
            if method == MethodArg::Both {
                s.push_str(", naive and fast agree");
            }
            let last = rows.last().expect("at least one row");
            let _ = write!(s, "; N({}, {}) = {}", last.q, last.x, last.count);
            Ok(s)
        }
        Command::Irr | Command::Sum => {
            let qs = heights(args)?;
            let mut rows = Vec::new();
            let mut reducible = Vec::new();
            for &q in &qs {
                let xs = x_rule(args, XRule::q4_over_27())?.thresholds(q);
                let res = irreducible_stats(&CensusQuery::new(q, xs, Mode::IrreducibleOnly)?, &o)?;
                rows.extend(count_rows(&res, args.command == Command::Sum));
                if args.command == Command::Irr {
                    reducible.push((q, reducible_count(q, &o)?));
                }
            }
            let meta = (!reducible.is_empty()).then(|| {
                serde_json::json!({
                    "reducible": reducible.iter().map(|(q, n)| serde_json::json!({"Q": q, "count": n, "total": total_tuples(*q)})).collect::<Vec<_>>()
                })
            });
            write_records(args, &rows, meta.as_ref(), out)?;
            let last = rows.last().expect("at least one row");
            Ok(match args.command {
                Command::Irr => {
                    let (q, n) = reducible.last().expect("at least one Q");
                    format!(
                        "irr: N*({}, {}) = {}; reducible at Q = {q}: {n}",
                        last.q, last.x, last.count
                    )
                }
                _ => format!(
                    "sum: s({}, {}) = {:.12}",
                    last.q,
                    last.x,
                    last.inv_sqrt_sum.unwrap_or(f64::NAN)
                ),
            })
        }
        Command::Measure => {
            let deltas: Vec<f64> = match &args.delta {
                Some(d) => parse_list(d)?,
                None => vec![1.0 / 27.0],
            };
            if deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
                return Err(Failure::Usage("deltas must be positive".into()));
            }
            let t = tol(args, 1e-6)?;
            let min = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
            // one shell table serves every delta that is one of its panel edges
            let shared = if min < CUBE_DISC_BOUND {
                Some(SigmaTable::build(min, t)?)
            } else {
                None
            };
            let mut rows: Vec<MeasureSample> = Vec::new();
            for &d in &deltas {
                let on_grid = shared
                    .as_ref()
                    .filter(|tb| tb.edges().iter().any(|&e| (e - d).abs() <= 1e-12 * d));
                rows.push(measure_sample(d, t, on_grid)?);
            }
            write_records(args, &rows, None, out)?;
            let first = rows.iter().find(|r| r.delta == min).expect("non-empty");
            Ok(format!(
                "measure: {} deltas; at delta = {:e}: sigma = {:.9}, v3 direct = {:.9}, shell = {:.9}",
                rows.len(),
                first.delta,
                first.sigma,
                first.v3_direct,
                first.v3_shell
            ))
        }
        Command::Constants => {
            let t = tol(args, 1e-9)?;
            let r = constants_report(t)?;
            let text = match format(args) {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&r)?;
                    s.push('\n');
                    s
                }
                Format::Csv => {
                    let mut w = csv::WriterBuilder::new()
                        .terminator(csv::Terminator::Any(b'\n'))
                        .from_writer(Vec::new());
                    w.serialize(r)?;
                    String::from_utf8(w.into_inner().map_err(|e| Error::InvalidQuery(e.to_string()))?).expect("UTF-8")
                }
            };
            write_text(args, &text, out)?;
            Ok(format!(
                "constants: kappa = {:.15} (direct) / {:.15} (3/2 c1), gamma3 >= {}",
                r.kappa_direct, r.kappa_from_c1, r.gamma3_lower
            ))
        }
        Command::Compare1 | Command::Compare2 => {
            let qs = heights(args)?;
            let rule = x_rule(args, XRule::q4_over_27())?;
            let rows = if args.command == Command::Compare1 {
                compare_theorem1(&qs, &rule, &o)?
            } else {
                compare_theorem2(&qs, &rule, &o)?
            };
            let ratios: Vec<String> = rows
                .iter()
                .map(|r| r.ratio.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()))
                .collect();
            write_table(args, &Table::new(rows), out)?;
            let name = if args.command == Command::Compare1 {
                "compare1"
            } else {
                "compare2"
            };
            Ok(format!("{name}: ratios {}", ratios.join(" ")))
        }
        Command::Gap => {
            let qs = heights(args)?;
            let t = tol(args, 1e-7)?;
            let rule = x_rule(args, XRule::q4_over_27())?;
            let mut reports: Vec<GapReport> = Vec::new();
            for &q in &qs {
                for x in rule.thresholds(q) {
                    reports.push(davenport_gap(q, x, t, &o)?);
                }
            }
            let gaps: Vec<String> = reports.iter().map(|g| format!("{:.4}", g.gap)).collect();
            write_records(args, &reports, None, out)?;
            Ok(format!("gap: {}", gaps.join(" ")))
        }
        Command::Scan => {
            let qs = heights(args)?;
            let spec = args.x_rule.as_deref().unwrap_or("v=0.3");
            let params = spec
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(CorollaryParam::parse)
                .collect::<Result<Vec<_>>>()?;
            let g = gamma3_estimate(GAMMA3_GRID, GAMMA3_POLISH);
            let rows = corollary_scan(&qs, &params, g.estimate, &o)?;
            let ratios: Vec<String> = rows
                .iter()
                .map(|r| r.ratio.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()))
                .collect();
            let table = Table::new(rows)
                .with_meta("gamma3", g.estimate)
                .with_meta("gamma3_lower", g.lower);
            write_table(args, &table, out)?;
            Ok(format!("scan: gamma3 = {}; ratios {}", g.estimate, ratios.join(" ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Args {
        let mut a = vec!["cubic-census"];
        a.extend_from_slice(v);
        Args::try_parse_from(a).unwrap()
    }

    fn exec(v: &[&str]) -> (std::result::Result<String, Failure>, String) {
        let mut buf = Vec::new();
        let r = execute(&args(v), &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn census_both_agrees() {
        let (r, text) = exec(&["census", "--q", "12", "--x", "0,1,100", "--method", "both"]);
        let summary = r.ok().unwrap();
        assert!(summary.contains("agree"), "{summary}");
        assert_eq!(text.lines().count(), 1 + 6);
    }

    #[test]
    fn invalid_q_is_usage_error() {
        assert!(matches!(exec(&["census", "--q", "0"]).0, Err(Failure::Usage(_))));
        assert!(matches!(exec(&["census"]).0, Err(Failure::Usage(_))));
        assert!(matches!(
            exec(&["census", "--q", "61", "--method", "naive"]).0,
            Err(Failure::Usage(_))
        ));
        assert!(matches!(exec(&["measure", "--tol", "0"]).0, Err(Failure::Usage(_))));
    }

    #[test]
    fn parse_failures_exit_one() {
        assert_eq!(parse(&["x".into(), "frobnicate".into()]).unwrap_err(), 1);
        assert_eq!(parse(&["x".into(), "census".into(), "--bogus".into()]).unwrap_err(), 1);
    }

    #[test]
    fn config_defaults_and_override() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.conf");
        std::fs::write(&cfg, "# defaults\nq = 5\nx = 0, 10\nmethod = naive\n").unwrap();
        let c = cfg.to_str().unwrap();
        let a = parse(&["p".into(), "census".into(), "--config".into(), c.into()]).unwrap();
        assert_eq!(
            (a.q, a.x.as_deref(), a.method),
            (Some(5), Some("0, 10"), Some(MethodArg::Naive))
        );
        let a = parse(&[
            "p".into(),
            "census".into(),
            "--config".into(),
            c.into(),
            "--q".into(),
            "7".into(),
        ])
        .unwrap();
        assert_eq!(a.q, Some(7));
        std::fs::write(&cfg, "colour = blue\n").unwrap();
        assert_eq!(
            parse(&["p".into(), "census".into(), "--config".into(), c.into()]).unwrap_err(),
            1
        );
    }

    #[test]
    fn irr_and_sum_outputs() {
        let (r, text) = exec(&["irr", "--q", "4", "--x", "0,44,100000", "--format", "json"]);
        assert!(r.ok().unwrap().contains("reducible"));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["rows"][0]["count"], 0);
        assert!(v["meta"]["reducible"][0]["count"].as_u64().unwrap() > 0);
        let (r, _) = exec(&["sum", "--q", "4"]);
        assert!(r.ok().unwrap().starts_with("sum: s(4, 9)"));
    }

    #[test]
    fn scan_rejects_bad_parameter() {
        assert!(matches!(
            exec(&["scan", "--q", "4", "--x-rule", "v=0.7"]).0,
            Err(Failure::Usage(_))
        ));
    }
}
