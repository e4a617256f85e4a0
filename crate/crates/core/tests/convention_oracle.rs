//! Which shifted length `l'` the asymptotic formulas need is decided by
//! experiment: finite plots of the embedded fixed point at `n = 2^14` are
//! compared with the exact values at `l' = l + m + h - 2` and at the
//! alternative `l' = l + m + h`.

use subrqa::asymptotics::quantifiers_via_sums;
use subrqa::golden::{reference_table, Golden};
use subrqa::rational::to_f64;
use subrqa::recplot::BoundaryPolicy;
use subrqa::report::empirical_report;

#[test]
fn shifted_length_is_l_plus_m_plus_h_minus_2() {
    let n = 1 << 14;
    // the two conventions coincide when no line length lies between them
    let mut discriminating = 0;
    for g in Golden::ALL {
        let t = reference_table(g).unwrap();
        let s = g.substitution();
        for m in 1..=2 {
            for h in 1..=2 {
                for l in 1..=3 {
                    let emp = to_f64(&empirical_report(&s, n, m, l, h, BoundaryPolicy::IncludeAll).unwrap().rr);
                    let ours = to_f64(&quantifiers_via_sums(&t, m, l, h).unwrap().rr);
                    // same l' with two more steps: l' = (l + 2) + m + h - 2
                    let alt = to_f64(&quantifiers_via_sums(&t, m, l + 2, h).unwrap().rr);
                    let label = format!("{} m={m} h={h} l={l}", g.name());
                    assert!((emp - ours).abs() <= 0.01, "{label}: empirical {emp}, exact {ours}");
                    assert!((emp - ours).abs() <= (emp - alt).abs(), "{label}: alternative {alt} is closer");
                    if (emp - alt).abs() > 0.01 {
                        discriminating += 1;
                    }
                }
            }
        }
    }
    assert!(discriminating >= 30, "only {discriminating} cases separate the conventions");
}
