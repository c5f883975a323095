//! Measure of the band `|D| <= delta` on the two kinds of faces of the
//! sup-norm sphere, and how it scales with `delta`.

use cubic_census::constants::face_constants;
use cubic_census::measure::{fiber_measure_u, h_fun, sigma, sigma_face, Clip, Face};

fn main() -> Result<(), cubic_census::error::Error> {
    let (x, y, z, d) = (0.2, -0.4, 0.7, 0.05);
    println!(
        "fiber at ({x}, {y}, {z}): h = {:.6}, clipped to [-1, 1] = {:.6}",
        h_fun(x, y, z, d),
        fiber_measure_u(x, y, z, d, Clip::UNIT)
    );

    let c = face_constants(1e-10)?;
    println!("c_z = {:.12}  c_y = {:.12}  c1 = {:.12}", c.c_z, c.c_y, c.c1);
    println!(
        "{:>12} {:>14} {:>14} {:>14} {:>10}",
        "delta", "sigma_z", "sigma_y", "sigma", "sigma/c1d^(5/6)"
    );
    for k in 0..6 {
        let d = 1.0 / 27.0 / 4f64.powi(k);
        let sz = sigma_face(Face::Z, d, 1e-8)?;
        let sy = sigma_face(Face::Y, d, 1e-8)?;
        let s = sigma(d, 1e-8)?;
        println!(
            "{d:>12.4e} {:>14.10} {:>14.10} {:>14.10} {:>10.5}",
            sz.value,
            sy.value,
            s.value,
            s.value / (c.c1 * d.powf(5.0 / 6.0))
        );
    }
    Ok(())
}
