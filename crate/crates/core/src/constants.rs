//! Absolute constants of the main terms.
//!
//! `I1 = int_1^inf dt / (sqrt(t^3 + 1) + sqrt(t^3 - 1))` and
//! `I2 = int_{-1}^{1} sqrt(t^3 + 1) dt` feed every closed form:
//! `c_z = 4^{2/3} / sqrt(27) (2 I1 + I2)`, `c_y = 3 (cbrt 3 - 1) c_z`,
//! `c1 = 4 (c_z + c_y)`, and `kappa = (3^{4/3} - 2) 2^{7/3} / sqrt(3) (2 I1 + I2) = 3/2 c1`.
//!
//! The two `kappa` forms are fed by two independent quadratures of `I1` and
//! `I2`, so their agreement checks both the algebra and the numerics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::discriminant_unchecked;
use crate::quad::{integrate, Adaptive, Estimate};

/// Upper cut of the finite part of `I1`; the tail beyond it is summed in closed form.
const I1_CUT: f64 = 64.0;

#[inline]
fn i1_integrand(t: f64) -> f64 {
    let t3 = t * t * t;
    1.0 / ((t3 + 1.0).sqrt() + (t3 - 1.0).max(0.0).sqrt())
}

/// `int_T^inf` of the `I1` integrand: `T^{-1/2} + T^{-13/2} / 104 + O(T^{-25/2})`.
pub fn i1_tail(t: f64) -> f64 {
    t.powf(-0.5) + t.powf(-6.5) / 104.0
}

/// `I1` on `[1, T]` with `t = 1 + v^2` (removing the square-root endpoint),
/// plus the closed-form tail.
pub fn integral_i1(tol: f64) -> Result<Estimate> {
    check_tol(tol)?;
    let finite = integrate(
        |v| 2.0 * v * i1_integrand(1.0 + v * v),
        0.0,
        (I1_CUT - 1.0).sqrt(),
        &[],
        Adaptive::new(0.9 * tol),
    )?;
    Ok(Estimate {
        value: finite.value + i1_tail(I1_CUT),
        error: finite.error + I1_CUT.powf(-12.5),
    })
}

/// `I2` with `t = -1 + s^2`, giving the smooth integrand
/// `2 s^2 sqrt(s^4 - 3 s^2 + 3)` on `[0, sqrt 2]`.
pub fn integral_i2(tol: f64) -> Result<Estimate> {
    check_tol(tol)?;
    integrate(
        |s| {
            let s2 = s * s;
            2.0 * s2 * (s2 * s2 - 3.0 * s2 + 3.0).sqrt()
        },
        0.0,
        2f64.sqrt(),
        &[],
        Adaptive::new(tol),
    )
}

/// `I1` after `t = w^{-2}`, `w = 1 - r^2`: no tail, no cancellation.
fn integral_i1_compact(tol: f64) -> Result<Estimate> {
    integrate(
        |r| {
            let w = 1.0 - r * r;
            let w6 = w.powi(6);
            4.0 * r / ((1.0 + w6).sqrt() + (1.0 - w6).max(0.0).sqrt())
        },
        0.0,
        1.0,
        &[],
        Adaptive::new(tol),
    )
}

/// `I2` straight on `[-1, 1]`, leaving the endpoint to adaptivity.
fn integral_i2_plain(tol: f64) -> Result<Estimate> {
    integrate(
        |t| (t * t * t + 1.0).max(0.0).sqrt(),
        -1.0,
        1.0,
        &[],
        Adaptive::new(tol).max_cells(20000),
    )
}

fn face_scale() -> f64 {
    4f64.powf(2.0 / 3.0) / 27f64.sqrt()
}

/// `3 (cbrt 3 - 1)`.
pub fn face_ratio() -> f64 {
    3.0 * (3f64.cbrt() - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceConstants {
    pub c_z: f64,
    pub c_y: f64,
    pub c1: f64,
}

/// `c_z`, `c_y` and `c1 = 4 (c_z + c_y)`.
pub fn face_constants(tol: f64) -> Result<FaceConstants> {
    check_tol(tol)?;
    // |d c1 / d(2 I1 + I2)| ~ 4.5; keep the propagated error under tol
    let t = tol / 30.0;
    let j = 2.0 * integral_i1_compact(t)?.value + integral_i2_plain(t)?.value;
    let c_z = face_scale() * j;
    let c_y = face_ratio() * c_z;
    Ok(FaceConstants {
        c_z,
        c_y,
        c1: 4.0 * (c_z + c_y),
    })
}

fn kappa_scale() -> f64 {
    (3f64.powf(4.0 / 3.0) - 2.0) * 2f64.powf(7.0 / 3.0) / 3f64.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa {
    pub direct: f64,
    pub from_c1: f64,
}

/// Both forms of `kappa`; they must agree to `2 tol`.
pub fn kappa(tol: f64) -> Result<Kappa> {
    check_tol(tol)?;
    // |d kappa / d(2 I1 + I2)| ~ 6.8
    let t = tol / 30.0;
    let j = 2.0 * integral_i1(t)?.value + integral_i2(t)?.value;
    let direct = kappa_scale() * j;
    let from_c1 = 1.5 * face_constants(tol)?.c1;
    let allowed = 2.0 * tol;
    if (direct - from_c1).abs() > allowed {
        return Err(Error::KappaMismatch {
            direct,
            from_c1,
            allowed,
        });
    }
    Ok(Kappa { direct, from_c1 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma3 {
    /// Exact `|D|` at the best grid point, a proven lower bound for the sup.
    pub lower: f64,
    /// Best value after local polishing; never below `lower`.
    pub estimate: f64,
    /// Coefficients `(u, x, y, z)` of the best point on the unit sphere.
    pub argmax: [f64; 4],
}

/// Maximum of `|D|` on the boundary of `[-1, 1]^4`.
///
/// The negation and reversal symmetries carry every face onto `z = 1` or
/// `y = 1`, so only those two are searched: first on the rational grid
/// `k / grid` with exact integer evaluation, then by compass search from the
/// best points.
pub fn gamma3_estimate(grid: u32, polish_iters: u32) -> Gamma3 {
    let n = grid.max(1) as i64;
    let mut starts: Vec<(i128, [i64; 4])> = Vec::new();
    for face in 0..2 {
        for a in -n..=n {
            for b in -n..=n {
                for c in -n..=n {
                    let p = if face == 0 { [a, b, c, n] } else { [a, b, n, c] };
                    let d = discriminant_unchecked(p[0], p[1], p[2], p[3]).abs();
                    starts.push((d, p));
                }
            }
        }
    }
    starts.sort_by(|p, q| q.0.cmp(&p.0).then(p.1.cmp(&q.1)));
    starts.truncate(16);
    let scale = (n as f64).powi(4);
    let (best_d, best_p) = starts[0];
    let lower = best_d as f64 / scale;
    let mut estimate = lower;
    let mut argmax = best_p.map(|c| c as f64 / n as f64);
    for &(_, p) in &starts {
        let face_is_z = p[3] == n;
        let mut pt = p.map(|c| c as f64 / n as f64);
        let (v, q) = polish(&mut pt, face_is_z, 1.0 / n as f64, polish_iters);
        if v > estimate {
            estimate = v;
            argmax = q;
        }
    }
    Gamma3 {
        lower,
        estimate,
        argmax,
    }
}

fn abs_disc(p: &[f64; 4]) -> f64 {
    let [u, x, y, z] = *p;
    (x * x * y * y - 4.0 * u * y.powi(3) - 27.0 * u * u * z * z - 4.0 * x.powi(3) * z + 18.0 * u * x * y * z).abs()
}

fn polish(p: &mut [f64; 4], face_is_z: bool, step0: f64, iters: u32) -> (f64, [f64; 4]) {
    let free: [usize; 3] = if face_is_z { [0, 1, 2] } else { [0, 1, 3] };
    let mut best = abs_disc(p);
    let mut step = step0;
    for _ in 0..iters {
        let mut moved = false;
        for &i in &free {
            for dir in [-1.0, 1.0] {
                let mut q = *p;
                q[i] = (q[i] + dir * step).clamp(-1.0, 1.0);
                let v = abs_disc(&q);
                if v > best {
                    best = v;
                    *p = q;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    (best, *p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    pub c_z: f64,
    pub c_y: f64,
    pub c1: f64,
    pub kappa_direct: f64,
    pub kappa_from_c1: f64,
    pub gamma3_lower: f64,
    pub gamma3_estimate: f64,
    pub tol: f64,
}

pub const GAMMA3_GRID: u32 = 24;
pub const GAMMA3_POLISH: u32 = 400;

/// Every constant at tolerance `tol`.
pub fn constants_report(tol: f64) -> Result<ConstantsReport> {
    let i1 = integral_i1(tol)?;
    let i2 = integral_i2(tol)?;
    let faces = face_constants(tol)?;
    let k = kappa(tol)?;
    let g = gamma3_estimate(GAMMA3_GRID, GAMMA3_POLISH);
    Ok(ConstantsReport {
        i1: i1.value,
        i2: i2.value,
        c_z: faces.c_z,
        c_y: faces.c_y,
        c1: faces.c1,
        kappa_direct: k.direct,
        kappa_from_c1: k.from_c1,
        gamma3_lower: g.lower,
        gamma3_estimate: g.estimate,
        tol,
    })
}

/// `kappa` at a tolerance sufficient for every comparison in this crate.
pub fn kappa_value() -> f64 {
    use std::sync::OnceLock;
    static K: OnceLock<f64> = OnceLock::new();
    *K.get_or_init(|| kappa(1e-12).expect("kappa converges at 1e-12").direct)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidQuery(format!("tolerance must be positive, got {tol}")))
    }
}
