//! The constants of the main terms, computed two ways, and the maximum of
//! `|D|` on the sup-norm sphere.

use cubic_census::constants::{constants_report, face_ratio, gamma3_estimate, integral_i1, integral_i2, kappa};

fn main() -> Result<(), cubic_census::error::Error> {
    let tol = 1e-11;
    let i1 = integral_i1(tol)?;
    let i2 = integral_i2(tol)?;
    println!("I1 = {:.15} (+-{:.1e})", i1.value, i1.error);
    println!("I2 = {:.15} (+-{:.1e})", i2.value, i2.error);

    let k = kappa(tol)?;
    println!("kappa = {:.15} (direct), {:.15} (3/2 c1)", k.direct, k.from_c1);
    println!("c_y / c_z = {:.15}", face_ratio());

    let g = gamma3_estimate(16, 200);
    println!("max |D| on the sphere: {} at {:?}", g.estimate, g.argmax);

    let r = constants_report(1e-9)?;
    println!("{}", serde_json::to_string_pretty(&r).expect("serializable"));
    Ok(())
}
