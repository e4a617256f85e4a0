//! Empirical RR_1 against its exact limit as the plot grows.

use subrqa::asymptotics::quantifiers_via_sums;
use subrqa::golden::{reference_table, Golden};
use subrqa::rational::to_f64;
use subrqa::recplot::BoundaryPolicy;
use subrqa::report::empirical_report;

fn main() -> subrqa::Result<()> {
    for g in Golden::ALL {
        let table = reference_table(g)?;
        let exact = quantifiers_via_sums(&table, 1, 1, 1)?;
        println!("{} (RR_1 = {})", g.name(), exact.rr);
        for e in 8..=14 {
            let r = empirical_report(&table.subst, 1 << e, 1, 1, 1, BoundaryPolicy::IncludeAll)?;
            let gap = (to_f64(&r.rr) - to_f64(&exact.rr)).abs();
            println!("  n = 2^{e:<2}  RR = {:.8}  gap = {gap:.2e}", to_f64(&r.rr));
        }
    }
    Ok(())
}
