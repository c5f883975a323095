//! Volume of `{|D| <= delta}` in the unit cube, once by direct integration and
//! once through the shell decomposition over the sphere.

use cubic_census::measure::{v3_direct, v3_shell, SigmaTable};

fn main() -> Result<(), cubic_census::error::Error> {
    let tol = 1e-6;
    for d in [1.0 / 27.0, 1.0 / 108.0, 1.0 / 432.0] {
        let a = v3_direct(d, tol)?;
        let b = v3_shell(d, tol)?;
        println!(
            "delta = 1/{:<4.0} direct {:.10} (+-{:.1e})  shell {:.10} (+-{:.1e})  diff {:.1e}",
            1.0 / d,
            a.value,
            a.error,
            b.value,
            b.error,
            (a.value - b.value).abs()
        );
    }

    // one table answers every delta on its grid
    let table = SigmaTable::build(1.0 / 1728.0, tol)?;
    for &d in table.edges().iter().take(4) {
        let v = table.shell_volume(d)?;
        println!("table: delta = {d:.6e}  volume {:.10}", v.value);
    }
    Ok(())
}
