//! The n = 6 plot of 010111010: lines, boundary flags and the corrected
//! correlation-sum identities.

use subrqa::recplot::{extract_lines, histogram, render_ascii, BoundaryPolicy};
use subrqa::rqa::{corsum_main_term, correlation_sum, measures_from_histogram_with, rqa_from_corsum};
use subrqa::BitSequence;

fn main() -> subrqa::Result<()> {
    let x = BitSequence::from_str01("010111010")?;
    let n = 6;
    print!("{}", render_ascii(&x, n, 1)?);
    for t in extract_lines(&x, n, 1)?.iter().filter(|t| t.i < t.j) {
        println!("line ({}, {}, {})  zero={} n={}", t.i, t.j, t.length, t.boundary.zero, t.boundary.n);
    }
    let hist = histogram(&x, n, 1, 1)?;
    for policy in [BoundaryPolicy::IncludeAll, BoundaryPolicy::ExcludeNBoundary] {
        let rr2 = measures_from_histogram_with(&hist, 2, policy)?.rr;
        let (c2, c3) = match policy {
            BoundaryPolicy::IncludeAll => (correlation_sum(&x, n, 2, 1)?, correlation_sum(&x, n, 3, 1)?),
            BoundaryPolicy::ExcludeNBoundary => (
                corsum_main_term(&hist, 2, policy),
                corsum_main_term(&hist, 3, policy),
            ),
        };
        let est = rqa_from_corsum(&c2, &c3, n, 2)?;
        println!("{policy:?}: RR_2 = {rr2}, C_2 = {c2}, C_3 = {c3}, RR_2 from C = {}", est.main);
    }
    Ok(())
}
