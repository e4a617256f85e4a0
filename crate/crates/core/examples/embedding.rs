//! Delay embedding of dimension m is the plot at threshold 2^-(h+m-1).

use subrqa::recplot::{embedded_h, quantize_eps, reduce_embedding, rp_entry};
use subrqa::Substitution;

fn main() -> subrqa::Result<()> {
    let x = Substitution::thue_morse().fixed_point_prefix(256)?;
    let (m, h) = (3, 2);
    let eps = reduce_embedding(m, 0.5f64.powi(h as i32))?;
    let h_red = quantize_eps(eps)?;
    assert_eq!(h_red, embedded_h(m, h));
    println!("m = {m}, eps = 2^-{h}  ->  eps' = {eps} (h' = {h_red})");

    // compare with the plot of the embedded sequence built by hand
    let blocks: Vec<u32> = (0..200)
        .map(|i| (0..m).fold(0, |a, k| 2 * a + x.get(i + k) as u32))
        .collect();
    let mut agree = 0;
    for i in 0..128 {
        for j in 0..128 {
            let embedded = blocks[i..i + h] == blocks[j..j + h];
            agree += usize::from(embedded == rp_entry(&x, i, j, h_red)?);
        }
    }
    println!("{agree} of {} cells agree", 128 * 128);
    Ok(())
}
