//! Real measures of discriminant bands.
//!
//! Every integral here is taken over a closed-form one-dimensional fiber
//! measure: for fixed `(x, y, z)` the set `{u : |D(u, x, y, z)| <= delta}` is at
//! most two intervals bounded by the roots of the quadratic `D = +-delta`.
//! The remaining two or three dimensions are integrated by nested adaptive
//! Gauss-Kronrod with breakpoints on the curves `S = +-27 z^2 delta` (square-root
//! behaviour) and on the curves where a fiber endpoint crosses the clip `|u| = 1`
//! (kinks).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{bisect, integrate, integrate_par, Adaptive, Estimate};
use crate::sum::NeumaierSum;

/// Upper bound of `|D|` on the unit cube: the sum of the absolute monomial
/// coefficients, `1 + 4 + 27 + 4 + 18`. The band is the whole cube boundary
/// (3-measure 64) for any `delta` at or above it.
pub const CUBE_DISC_BOUND: f64 = 54.0;

/// 3-measure of the boundary of `[-1, 1]^4`.
pub const SPHERE_MEASURE: f64 = 64.0;

/// `4 (y^2 - 3 x z)^3`.
pub fn s_fun(x: f64, y: f64, z: f64) -> f64 {
    let t = y * y - 3.0 * x * z;
    4.0 * t * t * t
}

/// The two solutions `u1 <= u2` of `D(u, x, y, z) = delta`.
pub fn u_branches(x: f64, y: f64, z: f64, delta: f64) -> Result<(f64, f64)> {
    if z == 0.0 {
        return Err(Error::InvalidFiber);
    }
    let k = 27.0 * z * z;
    let gap = s_fun(x, y, z) - k * delta;
    if gap < 0.0 {
        return Err(Error::OutOfDomain { gap });
    }
    let (lo, hi) = stable_roots(x, y, z, delta, gap.sqrt());
    Ok((lo, hi))
}

/// Roots of `D(u) = level` given `sq = sqrt(S - 27 z^2 level)`, computed without
/// cancellation: the larger-magnitude root from the centre, the other from the
/// product of roots.
#[inline]
fn stable_roots(x: f64, y: f64, z: f64, level: f64, sq: f64) -> (f64, f64) {
    let k = 27.0 * z * z;
    let bh = 9.0 * x * y * z - 2.0 * y * y * y;
    let c = x * x * y * y - 4.0 * x * x * x * z - level;
    let q = if bh >= 0.0 { bh + sq } else { bh - sq };
    if q == 0.0 {
        return (0.0, 0.0);
    }
    let far = q / k;
    let near = -c / q;
    if far <= near {
        (far, near)
    } else {
        (near, far)
    }
}

/// Length of the unclipped fiber band, in the two-branch closed form.
///
/// Returns `0` where `S < -27 z^2 delta` (the fiber misses the band).
pub fn h_fun(x: f64, y: f64, z: f64, delta: f64) -> f64 {
    let k = 27.0 * z * z;
    let a = k * delta;
    let s = s_fun(x, y, z);
    if s > a {
        4.0 * delta / ((s + a).sqrt() + (s - a).sqrt())
    } else if s >= -a {
        2.0 * (s + a).sqrt() / k
    } else {
        0.0
    }
}

/// A closed interval of `u` values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clip {
    pub lo: f64,
    pub hi: f64,
}

impl Clip {
    pub const UNIT: Clip = Clip { lo: -1.0, hi: 1.0 };
    pub const ALL: Clip = Clip {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    #[inline]
    fn overlap(&self, lo: f64, hi: f64, width: f64) -> f64 {
        if lo >= self.lo && hi <= self.hi {
            width
        } else {
            (hi.min(self.hi) - lo.max(self.lo)).max(0.0)
        }
    }
}

/// Lebesgue measure of `{u in clip : |D(u, x, y, z)| <= delta}`.
///
/// On `z = 0` the discriminant is linear in `u` and the measure is taken of
/// that linear condition.
pub fn fiber_measure_u(x: f64, y: f64, z: f64, delta: f64, clip: Clip) -> f64 {
    if delta <= 0.0 || clip.hi <= clip.lo {
        return 0.0;
    }
    if z == 0.0 {
        let b = -4.0 * y * y * y;
        let c = x * x * y * y;
        if b == 0.0 {
            return if c.abs() <= delta { clip.hi - clip.lo } else { 0.0 };
        }
        let (p, q) = ((-delta - c) / b, (delta - c) / b);
        return clip.overlap(p.min(q), p.max(q), 2.0 * delta / b.abs());
    }
    let k = 27.0 * z * z;
    let a = k * delta;
    let s = s_fun(x, y, z);
    if s + a < 0.0 {
        return 0.0;
    }
    let sq_out = (s + a).sqrt();
    let (p1, p2) = stable_roots(x, y, z, -delta, sq_out);
    if s - a > 0.0 {
        let sq_in = (s - a).sqrt();
        let (q1, q2) = stable_roots(x, y, z, delta, sq_in);
        let width = 2.0 * delta / (sq_out + sq_in);
        clip.overlap(p1, q1, width) + clip.overlap(q2, p2, width)
    } else {
        clip.overlap(p1, p2, 2.0 * sq_out / k)
    }
}

/// Real roots in `[lo, hi]` of the cubic `c3 t^3 + c2 t^2 + c1 t + c0`.
fn cubic_roots_in(c3: f64, c2: f64, c1: f64, c0: f64, lo: f64, hi: f64) -> Vec<f64> {
    let p = |t: f64| ((c3 * t + c2) * t + c1) * t + c0;
    let mut cuts = vec![lo];
    // critical points of p
    let (a, b, c) = (3.0 * c3, 2.0 * c2, c1);
    if a != 0.0 {
        let disc = b * b - 4.0 * a * c;
        if disc > 0.0 {
            let sq = disc.sqrt();
            let q = if b >= 0.0 { -(b + sq) / 2.0 } else { -(b - sq) / 2.0 };
            for r in [q / a, if q != 0.0 { c / q } else { f64::NAN }] {
                if r > lo && r < hi {
                    cuts.push(r);
                }
            }
        }
    } else if b != 0.0 {
        let r = -c / b;
        if r > lo && r < hi {
            cuts.push(r);
        }
    }
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (l, h) = (w[0], w[1]);
        let (pl, ph) = (p(l), p(h));
        if pl == 0.0 {
            roots.push(l);
        } else if pl * ph < 0.0 {
            roots.push(bisect(p, l, h, 1e-15 * (1.0 + h.abs())));
        }
    }
    if p(hi) == 0.0 {
        roots.push(hi);
    }
    roots
}

/// Points in `x in (-1, 1)` where the fiber band of `(x, y, z)` changes form:
/// the curves `S = +-27 z^2 delta` and the clip crossings `D(+-1, x, y, z) = +-delta`.
fn x_breakpoints(y: f64, z: f64, delta: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(16);
    if z != 0.0 {
        let tau = (27.0 * z * z * delta / 4.0).cbrt();
        for t in [tau, -tau] {
            out.push((y * y - t) / (3.0 * z));
        }
    }
    // D(u, x, y, z) as a cubic in x: -4 z x^3 + y^2 x^2 + 18 u y z x - 4 u y^3 - 27 u^2 z^2
    for u in [-1.0, 1.0] {
        for level in [-delta, delta] {
            let c0 = -4.0 * u * y * y * y - 27.0 * u * u * z * z - level;
            out.extend(cubic_roots_in(-4.0 * z, y * y, 18.0 * u * y * z, c0, -1.0, 1.0));
        }
    }
    out.retain(|t| t.is_finite() && *t > -1.0 && *t < 1.0);
    out
}

/// `int_{-1}^{1} fiber_measure_u(x, y, z, delta, [-1, 1]) dx`.
fn x_integral(y: f64, z: f64, delta: f64, tol: f64) -> Result<Estimate> {
    let breaks = x_breakpoints(y, z, delta);
    integrate(
        |x| fiber_measure_u(x, y, z, delta, Clip::UNIT),
        -1.0,
        1.0,
        &breaks,
        Adaptive::new(tol).max_cells(6000),
    )
}

/// Values of an outer variable `v in (lo, hi)` at which some inner breakpoint
/// crosses `x = +-1`, located by scanning and bisection.
fn outer_breakpoints<P: Fn(f64) -> (f64, f64)>(yz: P, delta: f64, lo: f64, hi: f64) -> Vec<f64> {
    const SCAN: usize = 512;
    let edge = |v: f64, sign: f64, edge: f64| {
        let (y, z) = yz(v);
        if z == 0.0 {
            return f64::NAN;
        }
        let tau = (27.0 * z * z * delta / 4.0).cbrt();
        (y * y - sign * tau) / (3.0 * z) - edge
    };
    let mut out = Vec::new();
    for sign in [-1.0, 1.0] {
        for e in [-1.0, 1.0] {
            let g = |v: f64| edge(v, sign, e);
            let mut prev_v = lo + (hi - lo) * 0.5 / SCAN as f64;
            let mut prev_g = g(prev_v);
            for i in 1..SCAN {
                let v = lo + (hi - lo) * (i as f64 + 0.5) / SCAN as f64;
                let gv = g(v);
                if prev_g.is_finite() && gv.is_finite() && prev_g * gv < 0.0 {
                    out.push(bisect(g, prev_v, v, 1e-15));
                }
                prev_v = v;
                prev_g = gv;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Face {
    /// `z = 1`, integrated over `(x, y)`.
    Z,
    /// `y = 1`, integrated over `(x, z)`.
    Y,
}

/// 3-measure of the band `|D| <= delta` on one face of the sup-norm sphere.
///
/// Uses the reflection `(u, x, y, z) -> (-u, x, -y, z)` on face `Z` and
/// `(u, x, y, z) -> (u, -x, y, -z)` on face `Y` to integrate over half the
/// outer range.
pub fn sigma_face(face: Face, delta: f64, tol: f64) -> Result<Estimate> {
    check_tol(tol)?;
    if delta <= 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    let inner_tol = 0.05 * tol;
    let outer_tol = 0.4 * tol;
    let yz = move |v: f64| match face {
        Face::Z => (v, 1.0),
        Face::Y => (1.0, v),
    };
    let mut breaks = outer_breakpoints(yz, delta, 0.0, 1.0);
    if face == Face::Y {
        for level in [delta, -delta] {
            if let Some(z) = z_level_crossing(level) {
                breaks.push(z);
            }
        }
    }
    let est = integrate_par(
        |v| {
            let (y, z) = yz(v);
            match x_integral(y, z, delta, inner_tol) {
                Ok(e) => e.value,
                Err(Error::Quadrature { estimate, .. }) => estimate,
                Err(_) => f64::NAN,
            }
        },
        0.0,
        1.0,
        &breaks,
        Adaptive::new(outer_tol).max_cells(3000),
    )
    .map_err(|e| rescale_failure(e, 2.0))?;
    let out = Estimate {
        value: 2.0 * est.value,
        error: 2.0 * (est.error + inner_tol),
    };
    if !out.value.is_finite() {
        return Err(Error::Quadrature {
            estimate: out.value,
            error: f64::INFINITY,
            tol,
        });
    }
    Ok(out)
}

/// Solution in `(0, 1)` of `1/(3z) - cbrt(level / (4z)) = 1`, the point where the
/// curve `S(x, 1, z) = 27 z^2 level` leaves the face through `x = 1`.
fn z_level_crossing(level: f64) -> Option<f64> {
    // equivalent to level = (4 / z^2) (1/3 - z)^3
    let g = |z: f64| 4.0 * (1.0 / 3.0 - z).powi(3) / (z * z) - level;
    let (lo, hi) = (1e-9, 1.0);
    if g(lo) * g(hi) > 0.0 {
        return None;
    }
    Some(bisect(g, lo, hi, 1e-15))
}

/// Root of `delta = (4 / z^2) (1/3 - z)^3` in `[1/7, 1/3]`, by bisection.
pub fn z_delta(delta: f64, tol: f64) -> f64 {
    let g = |z: f64| 4.0 * (1.0 / 3.0 - z).powi(3) / (z * z) - delta;
    bisect(g, 1.0 / 7.0, 1.0 / 3.0, tol)
}

/// `sigma(delta) = 4 (sigma_z + sigma_y)`.
pub fn sigma(delta: f64, tol: f64) -> Result<Estimate> {
    let z = sigma_face(Face::Z, delta, tol)?;
    let y = sigma_face(Face::Y, delta, tol)?;
    Ok(Estimate {
        value: 4.0 * (z.value + y.value),
        error: 4.0 * (z.error + y.error),
    })
}

/// `mes_4 {p in [-1, 1]^4 : |D(p)| <= delta}` by direct integration over
/// `(x, y, z)` of the clipped fiber measure.
pub fn v3_direct(delta: f64, tol: f64) -> Result<Estimate> {
    check_tol(tol)?;
    if delta <= 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    // 4 * int_0^1 dz int_0^1 dy int_{-1}^1 dx, by the two reflections used in sigma_face
    let outer_tol = 0.15 * tol;
    let mid_tol = 0.05 * tol;
    let inner_tol = 0.02 * tol;
    let mid = |z: f64| -> f64 {
        let breaks = outer_breakpoints(|y| (y, z), delta, 0.0, 1.0);
        let r = integrate(
            |y| match x_integral(y, z, delta, inner_tol) {
                Ok(e) => e.value,
                Err(Error::Quadrature { estimate, .. }) => estimate,
                Err(_) => f64::NAN,
            },
            0.0,
            1.0,
            &breaks,
            Adaptive::new(mid_tol).max_cells(3000),
        );
        match r {
            Ok(e) => e.value,
            Err(Error::Quadrature { estimate, .. }) => estimate,
            Err(_) => f64::NAN,
        }
    };
    let est = integrate_par(mid, 0.0, 1.0, &[], Adaptive::new(outer_tol).max_cells(3000))
        .map_err(|e| rescale_failure(e, 4.0))?;
    Ok(Estimate {
        value: 4.0 * est.value,
        error: 4.0 * (est.error + mid_tol + inner_tol),
    })
}

/// Cached shell integrals `int sigma(s) / s^2 ds` over geometric panels.
///
/// Panel edges are `delta_min`, the points `4^j / 27` above it, and
/// [`CUBE_DISC_BOUND`]. Each panel is integrated in `ln s` with `sigma`
/// evaluated by quadrature at every node; the table is immutable once built.
#[derive(Debug, Clone)]
pub struct SigmaTable {
    edges: Vec<f64>,
    panels: Vec<Estimate>,
    sigma_err: f64,
}

impl SigmaTable {
    /// Builds panels covering `[delta_min, 54]` so that [`SigmaTable::shell_volume`]
    /// at any panel edge has error at most `tol`.
    pub fn build(delta_min: f64, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        if !(delta_min > 0.0 && delta_min < CUBE_DISC_BOUND) {
            return Err(Error::InvalidQuery(format!(
                "shell table needs 0 < delta < {CUBE_DISC_BOUND}, got {delta_min}"
            )));
        }
        let mut edges = vec![delta_min];
        let mut j = -40i32;
        loop {
            let e = 4f64.powi(j) / 27.0;
            if e >= CUBE_DISC_BOUND {
                break;
            }
            if e > delta_min * (1.0 + 1e-12) {
                edges.push(e);
            }
            j += 1;
        }
        edges.push(CUBE_DISC_BOUND);

        // V = (delta/4) [sum panels + 64/54]; sigma noise contributes at most
        // sigma_err / 4 after the delta/s^2 weighting.
        let face_tol = tol / 80.0;
        let sigma_err = 8.0 * face_tol;
        let n = (edges.len() - 1) as f64;
        let panel_tol = 1.2 * tol / (delta_min * n);
        let mut panels = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            let (lo, hi) = (w[0].ln(), w[1].ln());
            let est = integrate_par(
                |t| {
                    let s = t.exp();
                    let v = match sigma(s, face_tol) {
                        Ok(e) => e.value,
                        Err(Error::Quadrature { estimate, .. }) => estimate,
                        Err(_) => f64::NAN,
                    };
                    v / s
                },
                lo,
                hi,
                &[],
                Adaptive::new(panel_tol).max_cells(400),
            )?;
            panels.push(est);
        }
        Ok(Self {
            edges,
            panels,
            sigma_err,
        })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// `mes_4 V_3(delta) = (delta / 4) int_delta^inf sigma(s) / s^2 ds`, the
    /// homogeneity slicing with `r^3 dr` mapped to `s = delta / r^4`.
    pub fn shell_volume(&self, delta: f64) -> Result<Estimate> {
        let start = self
            .edges
            .iter()
            .position(|&e| (e - delta).abs() <= 1e-12 * delta)
            .ok_or_else(|| Error::InvalidQuery(format!("delta {delta} is not a panel edge of this table")))?;
        let mut value = NeumaierSum::new();
        let mut err = NeumaierSum::new();
        for p in &self.panels[start..] {
            value.add(p.value);
            err.add(p.error);
        }
        value.add(SPHERE_MEASURE / CUBE_DISC_BOUND);
        let q = delta / 4.0;
        Ok(Estimate {
            value: q * value.value(),
            error: q * err.value() + self.sigma_err / 4.0,
        })
    }
}

/// `mes_4 V_3(delta)` through the sphere measure: `int_0^1 r^3 sigma(delta / r^4) dr`.
pub fn v3_shell(delta: f64, tol: f64) -> Result<Estimate> {
    if delta <= 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    if delta >= CUBE_DISC_BOUND {
        return Ok(Estimate::exact(16.0));
    }
    SigmaTable::build(delta, tol)?.shell_volume(delta)
}

/// All measures at one `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSample {
    pub delta: f64,
    pub sigma_z: f64,
    pub sigma_y: f64,
    pub sigma: f64,
    pub v3_direct: f64,
    pub v3_shell: f64,
    /// Sum of the declared absolute errors of the entries above.
    pub err: f64,
}

/// Evaluates every measure at `delta`; `table` must have `delta` as a panel edge
/// when given, otherwise a fresh shell table is built.
pub fn measure_sample(delta: f64, tol: f64, table: Option<&SigmaTable>) -> Result<MeasureSample> {
    let sz = sigma_face(Face::Z, delta, tol)?;
    let sy = sigma_face(Face::Y, delta, tol)?;
    let direct = v3_direct(delta, tol)?;
    let shell = match table {
        Some(t) => t.shell_volume(delta)?,
        None => v3_shell(delta, tol)?,
    };
    let sigma_err = 4.0 * (sz.error + sy.error);
    Ok(MeasureSample {
        delta,
        sigma_z: sz.value,
        sigma_y: sy.value,
        sigma: 4.0 * (sz.value + sy.value),
        v3_direct: direct.value,
        v3_shell: shell.value,
        err: sz.error + sy.error + sigma_err + direct.error + shell.error,
    })
}

/// Smallest accepted absolute tolerance; the nested quadratures cannot resolve
/// below this in double precision and would only exhaust their cell budgets.
pub const MIN_TOL: f64 = 1e-12;

fn check_tol(tol: f64) -> Result<()> {
    if tol >= MIN_TOL && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidQuery(format!(
            "tolerance must be finite and at least {MIN_TOL:e}, got {tol}"
        )))
    }
}

fn rescale_failure(e: Error, k: f64) -> Error {
    match e {
        Error::Quadrature { estimate, error, tol } => Error::Quadrature {
            estimate: k * estimate,
            error: k * error,
            tol: k * tol,
        },
        other => other,
    }
}
