//! Exact DET_3 over thresholds 2^-h, with the 1/h envelope.

use subrqa::asymptotics::{det_envelope, determinism_limit_scan, SubshiftModel};
use subrqa::golden::{reference_table, Golden};
use subrqa::rational::to_f64;

fn main() -> subrqa::Result<()> {
    let l = 3;
    for g in [Golden::ThueMorse, Golden::LengthFive] {
        let table = reference_table(g)?;
        let q = table.q();
        let model = SubshiftModel::Primitive(Box::new(table));
        println!("{}", g.name());
        for (h, det) in determinism_limit_scan(&model, 1, l, 1..=24)? {
            let env = to_f64(&det_envelope(q, l, h));
            println!("  h = {h:>2}  DET = {det:<10} 1-DET = {:.4}  envelope {env:.3}", 1.0 - to_f64(&det));
        }
    }
    Ok(())
}
