//! The golden-value corpus on the published base densities.

use subrqa::golden::{reference_table, verify_all};

fn main() {
    let checks = verify_all(None, reference_table);
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| c.failed()).count();
    println!("{} checks, {failed} failed", checks.len());
    std::process::exit(i32::from(failed > 0));
}
