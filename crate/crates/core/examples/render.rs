//! ASCII and PGM recurrence plots of the period-doubling fixed point.

use subrqa::recplot::{render_ascii, render_pgm};
use subrqa::Substitution;

fn main() -> subrqa::Result<()> {
    let s = Substitution::period_doubling();
    let x = s.fixed_point_prefix(512)?;
    print!("{}", render_ascii(&x, 32, 2)?);
    let path = std::env::temp_dir().join("period_doubling.pgm");
    std::fs::write(&path, render_pgm(&x, 256, 1)?)?;
    println!("wrote {}", path.display());
    Ok(())
}
