//! Quadrature against stratified Monte Carlo on the faces and in the cube.

use cubic_census::constants::face_constants;
use cubic_census::measure::{sigma_face, v3_direct, v3_shell, Face};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = 10_000_000;
const STRATA: usize = 1000;

fn disc(u: f64, x: f64, y: f64, z: f64) -> f64 {
    x * x * y * y - 4.0 * u * y.powi(3) - 27.0 * u * u * z * z - 4.0 * x.powi(3) * z + 18.0 * u * x * y * z
}

/// Measure of `{|D| <= delta}` over `[-1, 1]^dim` with the first coordinate
/// stratified; `point` maps the sample to `(u, x, y, z)`. Returns value and
/// standard error.
fn stratified<const N: usize>(seed: u64, delta: f64, point: impl Fn([f64; N]) -> [f64; 4]) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per = SAMPLES / STRATA;
    let width = 2.0 / STRATA as f64;
    let cell = 2f64.powi(N as i32) / STRATA as f64;
    let (mut value, mut var) = (0.0, 0.0);
    for s in 0..STRATA {
        let mut hits = 0usize;
        for _ in 0..per {
            let mut p = [0.0; N];
            p[0] = -1.0 + width * (s as f64 + rng.gen::<f64>());
            for c in p.iter_mut().skip(1) {
                *c = rng.gen_range(-1.0..1.0);
            }
            let [u, x, y, z] = point(p);
            if disc(u, x, y, z).abs() <= delta {
                hits += 1;
            }
        }
        let f = hits as f64 / per as f64;
        value += cell * f;
        var += cell * cell * f * (1.0 - f) / per as f64;
    }
    (value, var.sqrt())
}

fn assert_close(name: &str, quad: f64, quad_err: f64, mc: (f64, f64)) {
    let diff = (quad - mc.0).abs();
    assert!(
        diff <= 3.0 * mc.1 + quad_err,
        "{name}: quadrature {quad} vs Monte Carlo {} +- {} (diff {diff})",
        mc.0,
        mc.1
    );
}

#[test]
fn face_z_matches_monte_carlo() {
    for (seed, delta) in [(1, 1.0 / 27.0), (2, 0.25)] {
        let q = sigma_face(Face::Z, delta, 1e-7).unwrap();
        let mc = stratified(seed, delta, |[u, x, y]| [u, x, y, 1.0]);
        assert_close("sigma_z", q.value, q.error, mc);
    }
}

#[test]
fn face_y_matches_monte_carlo() {
    for (seed, delta) in [(3, 1.0 / 27.0), (4, 0.25)] {
        let q = sigma_face(Face::Y, delta, 1e-7).unwrap();
        let mc = stratified(seed, delta, |[u, x, z]| [u, x, 1.0, z]);
        assert_close("sigma_y", q.value, q.error, mc);
    }
}

#[test]
fn reversed_faces_match_monte_carlo() {
    // u = 1 mirrors z = 1 and x = 1 mirrors y = 1 under reversal of the coefficients
    let delta = 1.0 / 27.0;
    let z = sigma_face(Face::Z, delta, 1e-7).unwrap();
    let y = sigma_face(Face::Y, delta, 1e-7).unwrap();
    assert_close(
        "u = 1",
        z.value,
        z.error,
        stratified(5, delta, |[x, y, z]| [1.0, x, y, z]),
    );
    assert_close(
        "x = 1",
        y.value,
        y.error,
        stratified(6, delta, |[u, y, z]| [u, 1.0, y, z]),
    );
}

#[test]
fn volume_matches_monte_carlo() {
    for (seed, delta) in [(7, 1.0 / 27.0), (8, 1.0 / 432.0)] {
        let q = v3_direct(delta, 1e-7).unwrap();
        let mc = stratified(seed, delta, |p: [f64; 4]| p);
        assert_close("v3_direct", q.value, q.error, mc);
        let s = v3_shell(delta, 1e-6).unwrap();
        assert_close("v3_shell", s.value, s.error, mc);
    }
}

#[test]
fn measures_grow_with_delta() {
    let deltas = [1e-4, 1e-3, 1.0 / 108.0, 1.0 / 27.0, 0.5, 4.0, 30.0];
    for face in [Face::Z, Face::Y] {
        let vals: Vec<f64> = deltas
            .iter()
            .map(|&d| sigma_face(face, d, 1e-7).unwrap().value)
            .collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]), "{face:?}: {vals:?}");
    }
    let vols: Vec<f64> = deltas[..4].iter().map(|&d| v3_direct(d, 1e-6).unwrap().value).collect();
    assert!(vols.windows(2).all(|w| w[0] < w[1]), "{vols:?}");
}

#[test]
fn face_z_approaches_its_constant() {
    let c_z = face_constants(1e-10).unwrap().c_z;
    let gaps: Vec<f64> = (0..6)
        .map(|k| {
            let d = 1.0 / 27.0 / 4f64.powi(k);
            let s = sigma_face(Face::Z, d, 1e-9).unwrap().value;
            (s / d.powf(5.0 / 6.0) - c_z).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[5] < 0.5 * gaps[0], "{gaps:?}");
}
