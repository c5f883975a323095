//! Lattice count minus `Q^4` times the band volume, scaled by `Q^3`.

use cubic_census::census::CensusOptions;
use cubic_census::report::davenport_gap;

fn main() -> Result<(), cubic_census::error::Error> {
    let opts = CensusOptions::default();
    for q in [10u32, 20, 40] {
        let x = (q as u64).pow(4) / 27;
        let g = davenport_gap(q, x, 1e-8, &opts)?;
        println!(
            "Q = {:>2}  N = {:>9}  Q^4 vol = {:>14.3}  gap = {:.5} (+-{:.1e})  {:.2} s",
            g.q,
            g.count,
            (q as f64).powi(4) * g.volume,
            g.gap,
            g.gap_err,
            g.wall_s
        );
    }
    Ok(())
}
