//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! The error of an interval is the raw `|K15 - G7|` difference, without the
//! QUADPACK rescaling, so declared errors are conservative. Known
//! non-smooth points are passed as breakpoints and never straddled.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights for the nodes `XGK[1]`, `XGK[3]`, `XGK[5]` and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn scale(self, k: f64) -> Self {
        Self {
            value: self.value * k,
            error: self.error * k.abs(),
        }
    }
}

/// The 15 abscissae of the rule on `[a, b]`, outermost-left first.
fn nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [c; 15];
    for j in 0..7 {
        out[j] = c - h * XGK[j];
        out[14 - j] = c + h * XGK[j];
    }
    out
}

fn combine(a: f64, b: f64, fv: &[f64; 15]) -> Estimate {
    let h = 0.5 * (b - a);
    let mut kron = WGK[7] * fv[7];
    let mut gauss = WG[3] * fv[7];
    for j in 0..7 {
        let pair = fv[j] + fv[14 - j];
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Estimate {
        value: kron * h,
        error: ((kron - gauss) * h).abs(),
    }
}

/// One application of the 15-point Kronrod rule.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let xs = nodes(a, b);
    let fv = xs.map(f);
    combine(a, b, &fv)
}

fn gk15_par<F: Fn(f64) -> f64 + Sync>(f: &F, a: f64, b: f64) -> Estimate {
    let xs = nodes(a, b);
    let vals: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect();
    let mut fv = [0.0; 15];
    fv.copy_from_slice(&vals);
    combine(a, b, &fv)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est
            .error
            .total_cmp(&other.est.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Budget and tolerance for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub tol: f64,
    pub max_cells: usize,
}

impl Adaptive {
    pub fn new(tol: f64) -> Self {
        Self { tol, max_cells: 4000 }
    }

    pub fn max_cells(mut self, n: usize) -> Self {
        self.max_cells = n;
        self
    }
}

/// Integrates `f` over `[a, b]` to absolute error `cfg.tol`, splitting first at
/// every breakpoint inside `(a, b)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], cfg: Adaptive) -> Result<Estimate> {
    run(
        |pairs| pairs.iter().map(|&(lo, hi)| gk15(&f, lo, hi)).collect(),
        a,
        b,
        breaks,
        cfg,
    )
}

/// As [`integrate`], with the rule's nodes and sibling cells evaluated on the
/// rayon pool. The refinement sequence is identical to the serial version.
pub fn integrate_par<F: Fn(f64) -> f64 + Sync>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: Adaptive,
) -> Result<Estimate> {
    run(
        |pairs| pairs.par_iter().map(|&(lo, hi)| gk15_par(&f, lo, hi)).collect(),
        a,
        b,
        breaks,
        cfg,
    )
}

fn run<M>(many: M, a: f64, b: f64, breaks: &[f64], cfg: Adaptive) -> Result<Estimate>
where
    M: Fn(&[(f64, f64)]) -> Vec<Estimate>,
{
    if a == b {
        return Ok(Estimate::exact(0.0));
    }
    if a > b {
        return run(many, b, a, breaks, cfg).map(|e| e.scale(-1.0));
    }
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&t| t > a && t < b && t.is_finite())
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(b);
    let spans: Vec<(f64, f64)> = edges
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|(lo, hi)| hi > lo)
        .collect();
    let first = many(&spans);

    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    let mut total_err = 0.0;
    for (&(lo, hi), est) in spans.iter().zip(first) {
        total_err += est.error;
        heap.push(Cell { a: lo, b: hi, est });
    }

    let mut iter = 0usize;
    while total_err > cfg.tol {
        if heap.len() + frozen.len() >= cfg.max_cells {
            let est = finish(heap.into_iter().chain(frozen));
            return Err(Error::Quadrature {
                estimate: est.value,
                error: est.error,
                tol: cfg.tol,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 1e-14 * worst.a.abs().max(worst.b.abs()) {
            frozen.push(worst);
            continue;
        }
        let halves = many(&[(worst.a, mid), (mid, worst.b)]);
        total_err += halves[0].error + halves[1].error - worst.est.error;
        heap.push(Cell {
            a: worst.a,
            b: mid,
            est: halves[0],
        });
        heap.push(Cell {
            a: mid,
            b: worst.b,
            est: halves[1],
        });
        iter += 1;
        if iter.is_multiple_of(64) {
            total_err = heap.iter().chain(frozen.iter()).map(|c| c.est.error).sum();
        }
    }
    let est = finish(heap.into_iter().chain(frozen));
    if est.error > cfg.tol {
        return Err(Error::Quadrature {
            estimate: est.value,
            error: est.error,
            tol: cfg.tol,
        });
    }
    Ok(est)
}

fn finish(cells: impl Iterator<Item = Cell>) -> Estimate {
    let mut cells: Vec<Cell> = cells.collect();
    cells.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: NeumaierSum = cells.iter().map(|c| c.est.value).collect();
    let error: NeumaierSum = cells.iter().map(|c| c.est.error).collect();
    Estimate {
        value: value.value(),
        error: error.value(),
    }
}

/// Root of a monotone `g` on `[lo, hi]` by bisection to width `tol`.
/// `g(lo)` and `g(hi)` must have opposite signs (or one is zero).
pub fn bisect<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut g_lo = g(lo);
    if g_lo == 0.0 {
        return lo;
    }
    if g(hi) == 0.0 {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
