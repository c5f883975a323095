//! Census counts at `X = Q^4/27` against `kappa Q^{2/3} X^{5/6}` and against the
//! volume limit `Q^4 vol(X/Q^4)`.

use cubic_census::census::CensusOptions;
use cubic_census::constants::kappa_value;
use cubic_census::measure::v3_direct;
use cubic_census::report::{compare_theorem1, compare_theorem2, XRule};

fn main() -> Result<(), cubic_census::error::Error> {
    let opts = CensusOptions::default();
    let d = 1.0 / 27.0;
    let limit = v3_direct(d, 1e-8)?.value / (kappa_value() * d.powf(5.0 / 6.0));
    println!("count ratio limit at X = Q^4/27: {limit:.4}");
    for row in compare_theorem1(&[25, 50, 100, 150], &XRule::q4_over_27(), &opts)? {
        println!(
            "Q = {:>3}  X = {:>9}  N = {:>12}  ratio {:.4}  ({:.2} s)",
            row.q,
            row.x,
            row.observed,
            row.ratio.unwrap_or(f64::NAN),
            row.wall_s
        );
    }
    for row in compare_theorem2(&[16, 24, 32], &XRule::q4_over_27(), &opts)? {
        println!(
            "Q = {:>3}  X = {:>9}  s = {:>12.4}  ratio {:.4}",
            row.q,
            row.x,
            row.observed,
            row.ratio.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
