//! Classification and recognizability constants for a few substitutions.

use subrqa::recognizability::recognizability_constants;
use subrqa::{Substitution, SubstitutionKind};

fn main() -> subrqa::Result<()> {
    for spec in [
        "0->01,1->10",
        "0->01,1->00",
        "0->01110,1->01010",
        "0->010,1->111",
        "0->01,1->01",
        "0->11,1->01",
    ] {
        let s = Substitution::parse(spec)?;
        let cls = s.classify();
        print!("{spec:<20} {:?}", cls.kind);
        if cls.kind == SubstitutionKind::PrimitiveAperiodic {
            let c = recognizability_constants(&s.normalize().0)?;
            print!("  alpha={} beta={} K={} R={} R0={}", c.alpha, c.beta, c.k, c.r, c.r0);
        }
        println!();
    }
    Ok(())
}
