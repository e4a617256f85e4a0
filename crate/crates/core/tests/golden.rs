mod common;

use std::sync::OnceLock;

use common::*;
use num_traits::Zero;
use subrqa::asymptotics::{closed_form, quantifiers_via_sums};
use subrqa::densities::{
    closed_form_indices, empirical_delta, frequency_estimate, reconstruct_base, DensityTable,
};
use subrqa::golden::{self, Golden, Outcome};
use subrqa::rational::to_f64;

fn tables() -> &'static [DensityTable] {
    static T: OnceLock<Vec<DensityTable>> = OnceLock::new();
    T.get_or_init(|| {
        Golden::ALL
            .iter()
            .map(|g| reconstruct_base(&g.substitution()).unwrap())
            .collect()
    })
}

fn table(g: Golden) -> &'static DensityTable {
    &tables()[Golden::ALL.iter().position(|&h| h == g).unwrap()]
}

#[test]
fn reconstructed_bases_are_exact() {
    assert_eq!(
        table(Golden::ThueMorse).base.values().cloned().collect::<Vec<_>>(),
        vec![frac(1, 9), frac(1, 18), frac(1, 36)]
    );
    assert_eq!(
        table(Golden::PeriodDoubling).base.values().cloned().collect::<Vec<_>>(),
        vec![frac(1, 9), frac(1, 18)]
    );
    assert_eq!(
        table(Golden::LengthFive).base.values().cloned().collect::<Vec<_>>(),
        vec![frac(7, 50), frac(3, 50), frac(1, 50), frac(13, 1250)]
    );
}

#[test]
fn constants_of_the_references() {
    for g in Golden::ALL {
        let c = &table(g).constants;
        assert_eq!((c.alpha, c.beta, c.r, c.r0), g.constants(), "{}", g.name());
    }
}

#[test]
fn base_densities_agree_with_a_direct_count() {
    // count K_l ∩ [1, n)² from its definition on a small plot
    let n = 1 << 9;
    for g in Golden::ALL {
        let s = g.substitution();
        let x = to_vec(&s.fixed_point_prefix(4 * n).unwrap());
        for (&l0, d) in &table(g).base {
            let count = naive_k(&x, l0, n).len() as f64;
            let est = count / (n * n) as f64;
            assert!(
                (est - to_f64(d)).abs() < 0.02,
                "{} l0={l0}: direct {est}, table {d}",
                g.name()
            );
        }
    }
}

#[test]
fn estimators_agree_on_nonzero_lengths() {
    for g in Golden::ALL {
        let t = table(g);
        let x = g.substitution().fixed_point_prefix((1 << 16) + 64).unwrap();
        for l in 1..=16 {
            let d = t.dens_k(l);
            if d.is_zero() {
                continue;
            }
            let pair = to_f64(&empirical_delta(&x, l, 1 << 12).unwrap());
            let freq = to_f64(&frequency_estimate(&x, l, 1 << 16).unwrap());
            assert!((pair - to_f64(&d)).abs() < 5e-3, "{} l={l}: pairs {pair}", g.name());
            assert!((freq - to_f64(&d)).abs() < 1e-3, "{} l={l}: frequencies {freq}", g.name());
        }
    }
}

#[test]
fn published_support_of_thue_morse() {
    let t = table(Golden::ThueMorse);
    let support: Vec<usize> = (1..=12).filter(|&l| !t.dens_k(l).is_zero()).collect();
    assert_eq!(support, vec![1, 2, 3, 4, 6, 8, 12]);
}

#[test]
fn closed_form_indices_of_the_references() {
    let c = |g| &table(g).constants;
    assert_eq!(closed_form_indices(c(Golden::ThueMorse), 4).unwrap(), (1, 2));
    assert_eq!(closed_form_indices(c(Golden::ThueMorse), 3).unwrap(), (0, 3));
    assert_eq!(closed_form_indices(c(Golden::PeriodDoubling), 1).unwrap(), (0, 1));
    assert_eq!(closed_form_indices(c(Golden::LengthFive), 9).unwrap(), (1, 1));
}

#[test]
fn first_order_quantifiers() {
    let tm = quantifiers_via_sums(table(Golden::ThueMorse), 1, 1, 1).unwrap();
    assert_eq!((tm.rr.clone(), tm.corsum.clone(), tm.line_dens.clone()), (frac(1, 2), frac(1, 2), frac(2, 9)));
    let two_ln2 = 2.0 * std::f64::consts::LN_2;
    assert!((tm.ent.unwrap() - two_ln2).abs() < 1e-12);
    let pd = quantifiers_via_sums(table(Golden::PeriodDoubling), 1, 1, 1).unwrap();
    assert_eq!(pd.rr, frac(5, 9));
    assert!((pd.ent.unwrap() - two_ln2).abs() < 1e-12);
    let q5 = quantifiers_via_sums(table(Golden::LengthFive), 1, 1, 1).unwrap();
    assert_eq!(q5.line_dens, frac(6, 25));
}

#[test]
fn entropy_matches_a_truncated_sum() {
    // -Σ (d/P) ln(d/P) over the support, truncated where the tail is tiny
    for g in Golden::ALL {
        let t = table(g);
        for l in [1usize, 2, 5] {
            let q = quantifiers_via_sums(t, 1, l, 1).unwrap();
            let p = to_f64(&q.line_dens);
            let ent: f64 = t
                .support_up_to(1 << 20)
                .into_iter()
                .filter(|&k| k >= l)
                .map(|k| to_f64(&t.dens_k(k)) / p)
                .map(|w| -w * w.ln())
                .sum();
            assert!((ent - q.ent.unwrap()).abs() < 1e-6, "{} l={l}: {ent} vs {:?}", g.name(), q.ent);
        }
    }
}

#[test]
fn closed_forms_reconcile_with_the_series() {
    for g in Golden::ALL {
        for l in 1..=12 {
            for m in 1..=3 {
                for h in 1..=8 {
                    let a = closed_form(table(g), m, l, h).unwrap();
                    let b = quantifiers_via_sums(table(g), m, l, h).unwrap();
                    assert_eq!((a.rr, a.line_dens, a.det), (b.rr, b.line_dens, b.det));
                }
            }
        }
    }
}

#[test]
fn verification_corpus_passes_on_reconstructed_tables() {
    let checks = golden::verify_all(None, |g| Ok(table(g).clone()));
    let failed: Vec<String> = checks.iter().filter(|c| c.failed()).map(|c| c.to_string()).collect();
    assert!(failed.is_empty(), "{failed:#?}");
    let deviations: Vec<(String, String)> = checks
        .iter()
        .filter_map(|c| match &c.outcome {
            Outcome::Deviation(d) => Some((c.group.clone(), d.clone())),
            _ => None,
        })
        .collect();
    assert!(deviations.iter().any(|(g, d)| g == "thue-morse" && d.contains("factor 2")));
    assert!(deviations.iter().any(|(g, d)| g == "q5" && d.contains("factor 3/4")));
    assert_eq!(deviations.len(), 4);
}

#[test]
fn tampered_table_fails_by_name() {
    let checks = golden::verify_all(Some("period-doubling"), |g| {
        Ok(table(g).tampered(1, frac(1, 8)))
    });
    assert!(checks.iter().any(|c| c.failed() && c.name == "dens(K_1)"));
}

#[test]
fn density_scaling_matches_the_families() {
    for g in Golden::ALL {
        for k in 0..=8 {
            for (l, d) in g.density_family(k) {
                assert_eq!(table(g).dens_k(l), d, "{} l={l}", g.name());
            }
        }
    }
    assert_eq!(table(Golden::LengthFive).dens_k(24), frac(13, 31250));
}
