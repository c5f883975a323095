//! Exact integer arithmetic on cubic polynomials `z t^3 + y t^2 + x t + u`.
//!
//! Coefficients are stored as `i64`; discriminants and fiber coefficients are
//! evaluated in `i128`. With height at most [`MAX_HEIGHT`] every monomial of the
//! discriminant is bounded by `27 Q^4 < 2^57`, so all arithmetic here is exact.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest height accepted for exact evaluation.
pub const MAX_HEIGHT: u64 = 1 << 13;

/// Primes used by the modular fast path of [`is_irreducible`].
const SIEVE_PRIMES: [u32; 5] = [2, 3, 5, 7, 11];

/// An integer polynomial `z t^3 + y t^2 + x t + u`.
///
/// Values built through [`CubicPoly::new`] have `z != 0`. The fields are public
/// because [`apply_symmetry`] with [`SymmetryKind::Reverse`] may legitimately
/// produce `z == 0`; callers of the counting code must check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CubicPoly {
    pub u: i64,
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl CubicPoly {
    pub fn new(u: i64, x: i64, y: i64, z: i64) -> Result<Self> {
        if z == 0 {
            return Err(Error::InvalidFiber);
        }
        Ok(Self { u, x, y, z })
    }

    pub fn height(&self) -> u64 {
        [self.u, self.x, self.y, self.z]
            .iter()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Exact discriminant; rejects heights above [`MAX_HEIGHT`].
    pub fn discriminant(&self) -> Result<i128> {
        let height = self.height();
        if height > MAX_HEIGHT {
            return Err(Error::HeightOverflow {
                height,
                max: MAX_HEIGHT,
            });
        }
        Ok(discriminant_unchecked(self.u, self.x, self.y, self.z))
    }

    /// Coefficient-wise scaling by `t`.
    pub fn scale(&self, t: i64) -> Self {
        Self {
            u: self.u * t,
            x: self.x * t,
            y: self.y * t,
            z: self.z * t,
        }
    }
}

/// `x^2 y^2 - 4 u y^3 - 27 u^2 z^2 - 4 x^3 z + 18 u x y z` without a height check.
#[inline]
pub(crate) fn discriminant_unchecked(u: i64, x: i64, y: i64, z: i64) -> i128 {
    let (u, x, y, z) = (u as i128, x as i128, y as i128, z as i128);
    x * x * y * y - 4 * u * y * y * y - 27 * u * u * z * z - 4 * x * x * x * z + 18 * u * x * y * z
}

/// The discriminant restricted to a line `(x, y, z)` fixed, as a quadratic in `u`.
///
/// `a = -27 z^2`, `b = 18 x y z - 4 y^3`, `c = x^2 y^2 - 4 x^3 z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiberQuadratic {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl FiberQuadratic {
    #[inline]
    pub fn eval(&self, u: i128) -> i128 {
        (self.a * u + self.b) * u + self.c
    }
}

pub fn fiber_coeffs(x: i64, y: i64, z: i64) -> Result<FiberQuadratic> {
    if z == 0 {
        return Err(Error::InvalidFiber);
    }
    Ok(fiber_coeffs_unchecked(x, y, z))
}

#[inline]
pub(crate) fn fiber_coeffs_unchecked(x: i64, y: i64, z: i64) -> FiberQuadratic {
    let (x, y, z) = (x as i128, y as i128, z as i128);
    FiberQuadratic {
        a: -27 * z * z,
        b: 18 * x * y * z - 4 * y * y * y,
        c: x * x * y * y - 4 * x * x * x * z,
    }
}

/// Discriminant-preserving maps on coefficient tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryKind {
    /// `(u, x, y, z) -> (-u, -x, -y, -z)`
    Negate,
    /// `(u, x, y, z) -> (z, y, x, u)`, i.e. `t^3 P(1/t)`.
    Reverse,
}

/// Applies `s` to `p`. `Reverse` yields `z == 0` when `p.u == 0`.
pub fn apply_symmetry(p: CubicPoly, s: SymmetryKind) -> CubicPoly {
    match s {
        SymmetryKind::Negate => CubicPoly {
            u: -p.u,
            x: -p.x,
            y: -p.y,
            z: -p.z,
        },
        SymmetryKind::Reverse => CubicPoly {
            u: p.z,
            x: p.y,
            y: p.x,
            z: p.u,
        },
    }
}

struct RootTable {
    p: u32,
    has_root: Vec<bool>,
}

impl RootTable {
    fn build(p: u32) -> Self {
        let n = p as usize;
        let mut has_root = vec![false; n * n * n * n];
        for z in 0..p {
            for y in 0..p {
                for x in 0..p {
                    for u in 0..p {
                        let idx = (((z * p + y) * p + x) * p + u) as usize;
                        has_root[idx] = (0..p).any(|t| (((z * t + y) * t + x) * t + u) % p == 0);
                    }
                }
            }
        }
        Self { p, has_root }
    }

    #[inline]
    fn lookup(&self, p: &CubicPoly) -> bool {
        let m = self.p as i64;
        let r = |c: i64| c.rem_euclid(m) as usize;
        let n = self.p as usize;
        self.has_root[((r(p.z) * n + r(p.y)) * n + r(p.x)) * n + r(p.u)]
    }
}

fn root_tables() -> &'static [RootTable] {
    static TABLES: OnceLock<Vec<RootTable>> = OnceLock::new();
    TABLES.get_or_init(|| SIEVE_PRIMES.iter().map(|&p| RootTable::build(p)).collect())
}

/// Irreducibility over the rationals.
///
/// A cubic is reducible iff it has a rational root. A root `r/s` in lowest terms
/// has `s | z`, so for a prime `p` not dividing `z` it reduces to a root mod `p`;
/// no root mod such a `p` therefore certifies irreducibility. Otherwise the full
/// rational-root test decides. Returns `false` for `z == 0`.
pub fn is_irreducible(p: &CubicPoly) -> bool {
    if p.z == 0 || p.u == 0 {
        return false;
    }
    for table in root_tables() {
        if p.z % table.p as i64 != 0 && !table.lookup(p) {
            return true;
        }
    }
    !has_rational_root(p)
}

fn has_rational_root(p: &CubicPoly) -> bool {
    if p.u == 0 {
        return true;
    }
    let nums = divisors(p.u.unsigned_abs());
    let dens = divisors(p.z.unsigned_abs());
    let (u, x, y, z) = (p.u as i128, p.x as i128, p.y as i128, p.z as i128);
    for &q in &dens {
        let q = q as i128;
        for &n in &nums {
            for r in [n as i128, -(n as i128)] {
                // q^3 P(r/q)
                if ((z * r + y * q) * r + x * q * q) * r + u * q * q * q == 0 {
                    return true;
                }
            }
        }
    }
    false
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}
