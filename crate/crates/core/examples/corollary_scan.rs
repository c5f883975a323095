//! Growth of the counts when `X` shrinks with `Q` as `gamma3 Q^{4-2v}` or
//! `gamma3 Q^{4-eta}`, and the bounded upper-bound ratios.

use cubic_census::census::CensusOptions;
use cubic_census::constants::gamma3_estimate;
use cubic_census::report::{corollary_scan, upper_bound_scan, CorollaryParam, XRule};

fn main() -> Result<(), cubic_census::error::Error> {
    let opts = CensusOptions::default();
    let g = gamma3_estimate(12, 100).estimate;
    let params = [CorollaryParam::V(0.3), CorollaryParam::Eta(0.5)];
    for row in corollary_scan(&[8, 16, 32], &params, g, &opts)? {
        println!(
            "Q = {:>2}  X = {:>10}  {:<12} observed {:>12.3}  / scale {:.4}",
            row.q,
            row.x,
            row.method,
            row.observed,
            row.ratio.unwrap_or(f64::NAN)
        );
    }
    for row in upper_bound_scan(&[8, 16, 24], &XRule::q4_over_27(), &opts)? {
        println!(
            "Q = {:>2}  {:<18} ratio {:.4}",
            row.q,
            row.method,
            row.ratio.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
