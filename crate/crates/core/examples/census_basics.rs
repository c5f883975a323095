//! Counts cubics of height at most `Q` by the size of their discriminant,
//! with the exhaustive scan and the fiber counter side by side.

use cubic_census::census::{count_fast, count_naive, disc_bound, total_tuples, CensusOptions, CensusQuery, Mode};
use cubic_census::poly::CubicPoly;

fn main() -> Result<(), cubic_census::error::Error> {
    let p = CubicPoly::new(1, 0, -2, 1)?;
    println!("D({p:?}) = {}", p.discriminant()?);

    let q = 10;
    let xs = vec![0, 1, 100, 10_000, disc_bound(q)];
    let query = CensusQuery::new(q, xs, Mode::All)?;
    let opts = CensusOptions::default();
    let naive = count_naive(&query, &opts)?;
    let fast = count_fast(&query, &opts)?;
    println!("Q = {q}, {} tuples in total", total_tuples(q));
    println!("{:>8} {:>10} {:>10}", "X", "naive", "fast");
    for (i, x) in query.thresholds.iter().enumerate() {
        println!("{x:>8} {:>10} {:>10}", naive.counts[i], fast.counts[i]);
    }
    println!("naive {:.3} s, fast {:.3} s", naive.wall_s, fast.wall_s);
    Ok(())
}
