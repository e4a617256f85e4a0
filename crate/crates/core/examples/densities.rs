//! Reconstruct the base densities of dens(K_l) and expand them along chains.

use subrqa::densities::{reconstruct_base_with, ReconstructionConfig};
use subrqa::rational::to_f64;
use subrqa::Substitution;

fn main() -> subrqa::Result<()> {
    let spec = std::env::args().nth(1).unwrap_or_else(|| "0->01,1->00".into());
    let s = Substitution::parse(&spec)?;
    // smaller scales than the default keep this quick
    let cfg = ReconstructionConfig {
        scales: (1 << 18, 1 << 19),
        ..Default::default()
    };
    let table = reconstruct_base_with(&s, &cfg)?;
    println!("{}: R = {}, R0 = {}", table.subst, table.constants.r, table.constants.r0);
    for e in &table.evidence {
        println!("  l0 = {}: estimates {:?}, pair count {}", e.l0, e.estimates, e.pair_delta);
    }
    for l in table.support_up_to(100) {
        let d = table.dens_k(l);
        println!("  dens(K_{l:<3}) = {d:<12} {:.3e}", to_f64(&d));
    }
    Ok(())
}
