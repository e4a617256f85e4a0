//! Finite-n RQA of the Thue-Morse fixed point.

use subrqa::recplot::histogram;
use subrqa::rqa::measures_from_histogram;
use subrqa::Substitution;

fn main() -> subrqa::Result<()> {
    let tm = Substitution::parse("0->01,1->10")?;
    let x = tm.fixed_point_prefix(4096)?;
    let hist = histogram(&x, 4000, 1, 1)?;
    let report = measures_from_histogram(&hist, 2)?;
    println!("RR_2  = {}", report.rr);
    println!("DET_2 = {}", report.det.unwrap());
    println!("ENT_2 = {:.6}", report.ent.unwrap());
    Ok(())
}
