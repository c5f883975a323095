//! Irreducible counts and the weighted sums of `|D|^{-1/2}`, plus the
//! reducible remainder.

use cubic_census::census::{irreducible_stats, reducible_count, total_tuples, CensusOptions, CensusQuery, Mode};

fn main() -> Result<(), cubic_census::error::Error> {
    let opts = CensusOptions::default();
    for q in [8u32, 16, 24] {
        let x = (q as u64).pow(4) / 27;
        let res = irreducible_stats(&CensusQuery::new(q, vec![x], Mode::IrreducibleOnly)?, &opts)?;
        let red = reducible_count(q, &opts)?;
        println!(
            "Q = {q:>2}  X = {x:>6}  N* = {:>8}  s = {:>10.4}  reducible = {red} of {}",
            res.counts[0],
            res.inv_sqrt_sums[0],
            total_tuples(q)
        );
    }
    Ok(())
}
