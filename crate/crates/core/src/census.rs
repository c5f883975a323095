//! Exact lattice census of cubics by height and discriminant.
//!
//! Two counters: a naive scan of every tuple (the oracle) and a fiber counter
//! that, for each `(x, y, z)` with `z > 0`, counts the integers `u` solving
//! `|A u^2 + B u + C| <= X` in closed form and doubles the result by the
//! negation symmetry. Work is split into a fixed number of shards over
//! `(z, x)` rows, independent of the thread count, and merged in shard order.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{
    discriminant_unchecked, fiber_coeffs_unchecked, is_irreducible, CubicPoly, FiberQuadratic, MAX_HEIGHT,
};
use crate::sum::NeumaierSum;

pub const NAIVE_MAX_Q: u32 = 60;
pub const FAST_MAX_Q: u32 = 400;
pub const IRREDUCIBLE_MAX_Q: u32 = 100;

/// `2Q (2Q + 1)^3`, the number of integer cubics of degree exactly 3 and height at most `Q`.
pub fn total_tuples(q: u32) -> u64 {
    let q = q as u64;
    2 * q * (2 * q + 1).pow(3)
}

/// `54 Q^4`, at least the largest `|D|` attainable at height `Q`.
pub fn disc_bound(q: u32) -> u64 {
    54 * (q as u64).pow(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    All,
    IrreducibleOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Naive,
    FiberFast,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::FiberFast => "fast",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusQuery {
    pub q: u32,
    /// Strictly ascending discriminant bounds `X`.
    pub thresholds: Vec<u64>,
    pub mode: Mode,
}

impl CensusQuery {
    pub fn new(q: u32, thresholds: Vec<u64>, mode: Mode) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidQuery("Q must be at least 1".into()));
        }
        if q as u64 > MAX_HEIGHT {
            return Err(Error::HeightOverflow {
                height: q as u64,
                max: MAX_HEIGHT,
            });
        }
        if thresholds.is_empty() {
            return Err(Error::InvalidQuery("at least one threshold X is required".into()));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidQuery("thresholds must be strictly ascending".into()));
        }
        Ok(Self { q, thresholds, mode })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    /// Worker threads; `None` uses every available core.
    pub threads: Option<usize>,
    /// Number of static work blocks. Integer results never depend on it.
    pub shards: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            threads: None,
            shards: 64,
        }
    }
}

impl CensusOptions {
    pub fn threads(threads: usize) -> Self {
        Self {
            threads: Some(threads),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusResult {
    pub q: u32,
    pub thresholds: Vec<u64>,
    pub mode: Mode,
    /// `counts[i]` is the number of tuples with `|D| <= thresholds[i]`.
    pub counts: Vec<u64>,
    /// `sum |D|^{-1/2}` over counted tuples with `|D| >= 1`; filled for
    /// [`Mode::IrreducibleOnly`] only.
    pub inv_sqrt_sums: Vec<f64>,
    /// Lattice tuples covered by the scan.
    pub scanned: u64,
    pub method: Method,
    pub wall_s: f64,
    pub shards: usize,
}

/// Smallest and largest integers `u` with `f(u) >= level`, or `None`.
#[inline]
fn ge_range(f: &FiberQuadratic, level: i128) -> Option<(i64, i64)> {
    let a = -f.a;
    let disc = f.b * f.b + 4 * a * (f.c - level);
    if disc < 0 {
        return None;
    }
    let t = isqrt(disc);
    // floor((B + sqrt(disc)) / 2a) = floor((B + t) / 2a), and likewise for the ceiling
    let den = (2 * a) as i64;
    let lo = ceil_div((f.b - t) as i64, den);
    let hi = (f.b + t) as i64;
    Some((lo, hi.div_euclid(den)))
}

#[inline]
fn isqrt(n: i128) -> i128 {
    let mut t = (n as f64).sqrt() as i128;
    while t * t > n {
        t -= 1;
    }
    while (t + 1) * (t + 1) <= n {
        t += 1;
    }
    t
}

#[inline]
fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

#[inline]
fn clamped_len(r: Option<(i64, i64)>, q: i64) -> u64 {
    match r {
        Some((lo, hi)) => {
            let (lo, hi) = (lo.max(-q), hi.min(q));
            if hi >= lo {
                (hi - lo + 1) as u64
            } else {
                0
            }
        }
        None => 0,
    }
}

/// `#{u in [-Q, Q] : |A u^2 + B u + C| <= X}` for a downward fiber (`A < 0`).
///
/// The count is `#{f >= -X} - #{f >= X + 1}`; both sets are integer intervals
/// whose ends come from an exact integer square root of the discriminant of
/// the quadratic.
pub fn fiber_count_u(f: &FiberQuadratic, x: u64, q: u32) -> u64 {
    debug_assert!(f.a < 0);
    let q = q as i64;
    let x = x as i128;
    clamped_len(ge_range(f, -x), q) - clamped_len(ge_range(f, x + 1), q)
}

/// Row `r` of the `(z, x)` grid with `z in zs`, `x in [-Q, Q]`.
#[inline]
fn row(r: usize, q: i64, z_lo: i64) -> (i64, i64) {
    let w = (2 * q + 1) as usize;
    (z_lo + (r / w) as i64, (r % w) as i64 - q)
}

fn shard_bounds(rows: usize, shards: usize) -> Vec<(usize, usize)> {
    let shards = shards.clamp(1, rows.max(1));
    (0..shards)
        .map(|s| (s * rows / shards, (s + 1) * rows / shards))
        .collect()
}

fn with_pool<T: Send>(opts: &CensusOptions, job: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        b = b.num_threads(n.max(1));
    }
    Ok(b.build()?.install(job))
}

#[derive(Clone)]
struct Partial {
    counts: Vec<u64>,
    sums: Vec<NeumaierSum>,
}

impl Partial {
    fn new(n: usize) -> Self {
        Self {
            counts: vec![0; n],
            sums: vec![NeumaierSum::new(); n],
        }
    }

    #[inline]
    fn bucket(&mut self, thresholds: &[u64], d: u64, weight: bool) {
        let i = thresholds.partition_point(|&t| t < d);
        if i < self.counts.len() {
            self.counts[i] += 1;
            if weight && d > 0 {
                self.sums[i].add(1.0 / (d as f64).sqrt());
            }
        }
    }

    /// Turns per-bucket tallies into cumulative values, scaled by `mult`.
    fn cumulative(self, mult: u64) -> (Vec<u64>, Vec<f64>) {
        let mut counts = Vec::with_capacity(self.counts.len());
        let mut sums = Vec::with_capacity(self.sums.len());
        let mut c = 0u64;
        let mut s = NeumaierSum::new();
        for (k, part) in self.counts.iter().zip(&self.sums) {
            c += k;
            s.merge(part);
            counts.push(c * mult);
            sums.push(s.value() * mult as f64);
        }
        (counts, sums)
    }
}

fn merge(parts: Vec<Partial>, n: usize) -> Partial {
    let mut acc = Partial::new(n);
    for p in parts {
        for i in 0..n {
            acc.counts[i] += p.counts[i];
            acc.sums[i].merge(&p.sums[i]);
        }
    }
    acc
}

/// Exhaustive scan of every `(u, x, y, z)` with `z != 0` and height at most `Q`.
pub fn count_naive(query: &CensusQuery, opts: &CensusOptions) -> Result<CensusResult> {
    guard("naive scan", query.q, NAIVE_MAX_Q, "; use the fast counter")?;
    let start = Instant::now();
    let q = query.q as i64;
    let irr = query.mode == Mode::IrreducibleOnly;
    let n = query.thresholds.len();
    let th = &query.thresholds;
    // z runs over [-Q, Q] without 0: index rows by z' in [0, 2Q) mapped to nonzero z
    let rows = (2 * q as usize) * (2 * q as usize + 1);
    let bounds = shard_bounds(rows, opts.shards);
    let parts = with_pool(opts, || {
        bounds
            .par_iter()
            .map(|&(r0, r1)| {
                let mut p = Partial::new(n);
                for r in r0..r1 {
                    let (zi, x) = row(r, q, 0);
                    let z = if zi < q { zi - q } else { zi - q + 1 };
                    for y in -q..=q {
                        for u in -q..=q {
                            let d = discriminant_unchecked(u, x, y, z).unsigned_abs() as u64;
                            if irr && (d == 0 || !is_irreducible(&CubicPoly { u, x, y, z })) {
                                continue;
                            }
                            p.bucket(th, d, irr);
                        }
                    }
                }
                p
            })
            .collect::<Vec<_>>()
    })?;
    let (counts, sums) = merge(parts, n).cumulative(1);
    Ok(CensusResult {
        q: query.q,
        thresholds: query.thresholds.clone(),
        mode: query.mode,
        counts,
        inv_sqrt_sums: if irr { sums } else { Vec::new() },
        scanned: total_tuples(query.q),
        method: Method::Naive,
        wall_s: start.elapsed().as_secs_f64(),
        shards: bounds.len(),
    })
}

/// `N(Q, X)` for every threshold by fiber counting over `z > 0`, doubled.
pub fn count_fast(query: &CensusQuery, opts: &CensusOptions) -> Result<CensusResult> {
    if query.mode != Mode::All {
        return Err(Error::InvalidQuery(
            "the fast counter counts all cubics; use irreducible_stats for the irreducible census".into(),
        ));
    }
    guard("fast count", query.q, FAST_MAX_Q, "")?;
    let start = Instant::now();
    let q = query.q as i64;
    let n = query.thresholds.len();
    let th = &query.thresholds;
    let full = (2 * q + 1) as u64;
    let rows = q as usize * (2 * q as usize + 1);
    let bounds = shard_bounds(rows, opts.shards);
    let parts = with_pool(opts, || {
        bounds
            .par_iter()
            .map(|&(r0, r1)| {
                let mut counts = vec![0u64; n];
                for r in r0..r1 {
                    let (z, x) = row(r, q, 1);
                    for y in -q..=q {
                        let f = fiber_coeffs_unchecked(x, y, z);
                        for (i, &t) in th.iter().enumerate() {
                            let c = fiber_count_u(&f, t, query.q);
                            counts[i] += c;
                            if c == full {
                                for rest in &mut counts[i + 1..] {
                                    *rest += full;
                                }
                                break;
                            }
                        }
                    }
                }
                counts
            })
            .collect::<Vec<_>>()
    })?;
    let mut counts = vec![0u64; n];
    for p in parts {
        for (acc, c) in counts.iter_mut().zip(p) {
            *acc += c;
        }
    }
    for c in &mut counts {
        *c *= 2;
    }
    Ok(CensusResult {
        q: query.q,
        thresholds: query.thresholds.clone(),
        mode: Mode::All,
        counts,
        inv_sqrt_sums: Vec::new(),
        scanned: total_tuples(query.q),
        method: Method::FiberFast,
        wall_s: start.elapsed().as_secs_f64(),
        shards: bounds.len(),
    })
}

/// `N*(Q, X)` and `s(Q, X) = sum |D|^{-1/2}` over irreducible cubics with
/// `1 <= |D| <= X`, for every threshold.
///
/// Only the `u` inside the solution set of the largest threshold are visited.
pub fn irreducible_stats(query: &CensusQuery, opts: &CensusOptions) -> Result<CensusResult> {
    if query.mode != Mode::IrreducibleOnly {
        return Err(Error::InvalidQuery(
            "irreducible_stats needs mode IrreducibleOnly".into(),
        ));
    }
    guard("irreducible census", query.q, IRREDUCIBLE_MAX_Q, "")?;
    let start = Instant::now();
    let q = query.q as i64;
    let n = query.thresholds.len();
    let th = &query.thresholds;
    let x_max = *th.last().expect("validated non-empty") as i128;
    let rows = q as usize * (2 * q as usize + 1);
    let bounds = shard_bounds(rows, opts.shards);
    let parts = with_pool(opts, || {
        bounds
            .par_iter()
            .map(|&(r0, r1)| {
                let mut p = Partial::new(n);
                let mut visited = 0u64;
                for r in r0..r1 {
                    let (z, x) = row(r, q, 1);
                    for y in -q..=q {
                        let f = fiber_coeffs_unchecked(x, y, z);
                        let Some((lo, hi)) = ge_range(&f, -x_max) else { continue };
                        let (lo, hi) = (lo.max(-q), hi.min(q));
                        // skip the hole where f > X_max
                        let (h0, h1) = ge_range(&f, x_max + 1).unwrap_or((1, 0));
                        let mut visit = |u: i64| {
                            let d = f.eval(u as i128).unsigned_abs() as u64;
                            if d != 0 && is_irreducible(&CubicPoly { u, x, y, z }) {
                                p.bucket(th, d, true);
                            }
                        };
                        if h0 > h1 {
                            (lo..=hi).for_each(&mut visit);
                            visited += (hi - lo + 1).max(0) as u64;
                        } else {
                            let left = lo..=hi.min(h0 - 1);
                            let right = lo.max(h1 + 1)..=hi;
                            visited += (left.end() - left.start() + 1).max(0) as u64;
                            visited += (right.end() - right.start() + 1).max(0) as u64;
                            left.for_each(&mut visit);
                            right.for_each(&mut visit);
                        }
                    }
                }
                (p, visited)
            })
            .collect::<Vec<_>>()
    })?;
    let scanned = 2 * parts.iter().map(|(_, v)| v).sum::<u64>();
    let (counts, sums) = merge(parts.into_iter().map(|(p, _)| p).collect(), n).cumulative(2);
    Ok(CensusResult {
        q: query.q,
        thresholds: query.thresholds.clone(),
        mode: Mode::IrreducibleOnly,
        counts,
        inv_sqrt_sums: sums,
        scanned,
        method: Method::FiberFast,
        wall_s: start.elapsed().as_secs_f64(),
        shards: bounds.len(),
    })
}

/// Number of reducible cubics of height at most `Q`: everything minus the
/// irreducible ones at `X = 54 Q^4`.
pub fn reducible_count(q: u32, opts: &CensusOptions) -> Result<u64> {
    let query = CensusQuery::new(q, vec![disc_bound(q)], Mode::IrreducibleOnly)?;
    let irr = irreducible_stats(&query, opts)?;
    Ok(total_tuples(q) - irr.counts[0])
}

/// `N(Q, b[k+1]) - N(Q, b[k])` for consecutive bucket bounds.
pub fn histogram(q: u32, bounds: &[u64], opts: &CensusOptions) -> Result<Vec<u64>> {
    let query = CensusQuery::new(q, bounds.to_vec(), Mode::All)?;
    let res = count_fast(&query, opts)?;
    Ok(res.counts.windows(2).map(|w| w[1] - w[0]).collect())
}

fn guard(what: &'static str, q: u32, max: u32, hint: &'static str) -> Result<()> {
    if q > max {
        Err(Error::ScanGuard { what, q, max, hint })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::fiber_coeffs;

    fn all(q: u32, th: &[u64]) -> CensusQuery {
        CensusQuery::new(q, th.to_vec(), Mode::All).unwrap()
    }

    fn irr(q: u32, th: &[u64]) -> CensusQuery {
        CensusQuery::new(q, th.to_vec(), Mode::IrreducibleOnly).unwrap()
    }

    fn fq(a: i128, b: i128, c: i128) -> FiberQuadratic {
        FiberQuadratic { a, b, c }
    }

    #[test]
    fn fiber_count_examples() {
        assert_eq!(fiber_count_u(&fq(-27, 14, -3), 27, 1), 2);
        assert_eq!(fiber_count_u(&fq(-27, 0, 0), 0, 5), 1);
        assert_eq!(fiber_count_u(&fq(-27, 0, 0), 27, 5), 3);
    }

    #[test]
    fn fiber_count_matches_scan() {
        for z in 1..=4i64 {
            for x in -4..=4 {
                for y in -4..=4 {
                    let f = fiber_coeffs(x, y, z).unwrap();
                    for xb in [0u64, 1, 3, 17, 100, 1000, 20000] {
                        let scan = (-4..=4i128).filter(|&u| f.eval(u).unsigned_abs() as u64 <= xb).count() as u64;
                        assert_eq!(fiber_count_u(&f, xb, 4), scan, "{x} {y} {z} {xb}");
                    }
                }
            }
        }
    }

    #[test]
    fn isqrt_is_exact() {
        for n in [
            0i128,
            1,
            2,
            3,
            4,
            15,
            16,
            17,
            (1 << 60) - 1,
            1 << 60,
            (1i128 << 104) + 12345,
        ] {
            let t = isqrt(n);
            assert!(t * t <= n && (t + 1) * (t + 1) > n, "{n}");
        }
    }

    #[test]
    fn base_cases() {
        let opts = CensusOptions::default();
        let r = count_naive(&all(1, &[0, 1_000_000]), &opts).unwrap();
        assert_eq!(r.counts, vec![10, 54]);
        let r = count_fast(&all(1, &[0, 1_000_000]), &opts).unwrap();
        assert_eq!(r.counts, vec![10, 54]);
        let r = count_naive(&irr(1, &[0]), &opts).unwrap();
        assert_eq!(r.counts, vec![0]);
        let r = irreducible_stats(&irr(1, &[0]), &opts).unwrap();
        assert_eq!((r.counts[0], r.inv_sqrt_sums[0]), (0, 0.0));
    }

    #[test]
    fn height_one_irreducibles() {
        // brute force with the rational-root candidates {+-1}
        let mut count = 0u64;
        let mut sum = 0.0;
        for z in [-1i64, 1] {
            for y in -1..=1i64 {
                for x in -1..=1i64 {
                    for u in -1..=1i64 {
                        let p = |t: i64| ((z * t + y) * t + x) * t + u;
                        if u != 0 && p(1) != 0 && p(-1) != 0 {
                            let d = discriminant_unchecked(u, x, y, z).unsigned_abs();
                            assert!(d <= 44);
                            count += 1;
                            sum += 1.0 / (d as f64).sqrt();
                        }
                    }
                }
            }
        }
        let r = irreducible_stats(&irr(1, &[44]), &CensusOptions::default()).unwrap();
        assert_eq!(r.counts[0], count);
        assert!((r.inv_sqrt_sums[0] - sum).abs() < 1e-13);
        let n = count_naive(&irr(1, &[44]), &CensusOptions::default()).unwrap();
        assert_eq!(n.counts[0], count);
    }

    #[test]
    fn fast_equals_naive_small() {
        let opts = CensusOptions::default();
        for q in 1..=6u32 {
            let th = vec![0, 1, 2, 5, 10, 100, 1000, disc_bound(q)];
            let th: Vec<u64> = {
                let mut t = th;
                t.sort();
                t.dedup();
                t
            };
            let a = count_naive(&all(q, &th), &opts).unwrap();
            let b = count_fast(&all(q, &th), &opts).unwrap();
            assert_eq!(a.counts, b.counts, "Q = {q}");
            assert_eq!(*a.counts.last().unwrap(), total_tuples(q));
        }
    }

    #[test]
    fn irreducible_equals_naive_filter() {
        let opts = CensusOptions::default();
        let q = 8;
        let th = vec![0, 10, 100, 1000, 10_000, disc_bound(q)];
        let a = count_naive(&irr(q, &th), &opts).unwrap();
        let b = irreducible_stats(&irr(q, &th), &opts).unwrap();
        assert_eq!(a.counts, b.counts);
        for (s, t) in a.inv_sqrt_sums.iter().zip(&b.inv_sqrt_sums) {
            assert!((s - t).abs() <= 1e-12 * s.max(1.0), "{s} {t}");
        }
    }

    #[test]
    fn symmetry_doubling_is_exact() {
        // the naive scan covers both signs of z; compare the z > 0 half directly
        let q = 5i64;
        let th = [0u64, 7, 300, 5000];
        let mut pos = [0u64; 4];
        let mut neg = [0u64; 4];
        for z in 1..=q {
            for x in -q..=q {
                for y in -q..=q {
                    for u in -q..=q {
                        for (sz, acc) in [(z, &mut pos), (-z, &mut neg)] {
                            let d = discriminant_unchecked(u, x, y, sz).unsigned_abs() as u64;
                            for (i, &t) in th.iter().enumerate() {
                                acc[i] += (d <= t) as u64;
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(pos, neg);
        let r = count_fast(&all(5, &th), &CensusOptions::default()).unwrap();
        assert_eq!(r.counts, pos.map(|c| 2 * c).to_vec());
    }

    #[test]
    fn shard_and_thread_independence() {
        let q = 10;
        let th = vec![0, 100, 10_000, disc_bound(q)];
        let base = count_fast(
            &all(q, &th),
            &CensusOptions {
                threads: Some(1),
                shards: 1,
            },
        )
        .unwrap();
        let base_irr = irreducible_stats(
            &irr(q, &th),
            &CensusOptions {
                threads: Some(1),
                shards: 1,
            },
        )
        .unwrap();
        for (threads, shards) in [(2, 2), (8, 8), (1, 64), (8, 64)] {
            let o = CensusOptions {
                threads: Some(threads),
                shards,
            };
            assert_eq!(count_fast(&all(q, &th), &o).unwrap().counts, base.counts);
            let r = irreducible_stats(&irr(q, &th), &o).unwrap();
            assert_eq!(r.counts, base_irr.counts);
            for (s, t) in r.inv_sqrt_sums.iter().zip(&base_irr.inv_sqrt_sums) {
                assert!((s - t).abs() <= 1e-12 * s, "{s} {t}");
            }
        }
    }

    #[test]
    fn histogram_examples() {
        let opts = CensusOptions::default();
        let h = histogram(1, &[0, 4, 44], &opts).unwrap();
        assert_eq!(h.iter().sum::<u64>(), 54 - 10);
        assert_eq!(histogram(1, &[43, 44], &opts).unwrap(), vec![8]);
        let q = 3;
        let n0 = count_fast(&all(q, &[0]), &opts).unwrap().counts[0];
        assert_eq!(
            histogram(q, &[0, disc_bound(q)], &opts).unwrap(),
            vec![total_tuples(q) - n0]
        );
    }

    #[test]
    fn reducible_counts_small() {
        let opts = CensusOptions::default();
        let irr1 = count_naive(&irr(1, &[1_000_000]), &opts).unwrap().counts[0];
        assert_eq!(reducible_count(1, &opts).unwrap(), 54 - irr1);
        let irr2 = count_naive(&irr(2, &[disc_bound(2)]), &opts).unwrap().counts[0];
        assert_eq!(reducible_count(2, &opts).unwrap(), total_tuples(2) - irr2);
    }

    #[test]
    fn query_validation() {
        assert!(CensusQuery::new(0, vec![1], Mode::All).is_err());
        assert!(CensusQuery::new(3, vec![], Mode::All).is_err());
        assert!(CensusQuery::new(3, vec![5, 5], Mode::All).is_err());
        assert!(CensusQuery::new(3, vec![5, 4], Mode::All).is_err());
        assert!(matches!(
            CensusQuery::new(1 << 14, vec![1], Mode::All),
            Err(Error::HeightOverflow { .. })
        ));
        let opts = CensusOptions::default();
        assert!(matches!(
            count_naive(&all(61, &[1]), &opts),
            Err(Error::ScanGuard { .. })
        ));
        assert!(matches!(
            count_fast(&all(401, &[1]), &opts),
            Err(Error::ScanGuard { .. })
        ));
        assert!(count_fast(&irr(3, &[1]), &opts).is_err());
        assert!(irreducible_stats(&all(3, &[1]), &opts).is_err());
    }

    #[test]
    fn monotone_in_q_and_x() {
        let opts = CensusOptions::default();
        let th = vec![0, 3, 50, 800, 20_000, 400_000];
        let mut prev: Option<Vec<u64>> = None;
        for q in 1..=7 {
            let r = count_fast(&all(q, &th), &opts).unwrap();
            assert!(r.counts.windows(2).all(|w| w[0] <= w[1]));
            if let Some(p) = &prev {
                assert!(p.iter().zip(&r.counts).all(|(a, b)| a <= b));
            }
            prev = Some(r.counts);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn fiber_count_agrees_with_scan(
                x in -40i64..=40, y in -40i64..=40, z in 1i64..=40, xb in 0u64..5_000_000, q in 1u32..=40,
            ) {
                let f = fiber_coeffs(x, y, z).unwrap();
                let q_i = q as i128;
                let scan = (-q_i..=q_i).filter(|&u| f.eval(u).unsigned_abs() as u64 <= xb).count() as u64;
                prop_assert_eq!(fiber_count_u(&f, xb, q), scan);
            }
        }
    }
}
