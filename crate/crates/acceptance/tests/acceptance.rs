//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::time::Instant;

use common::*;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use subrqa::asymptotics::{
    closed_form, det_envelope, determinism_limit_scan, quantifiers_via_sums, SubshiftModel,
};
use subrqa::densities::{empirical_delta, reconstruct_base, DensityTable, ReconstructionConfig};
use subrqa::golden::{self, Golden, Outcome};
use subrqa::rational::{to_f64, uint, ExtRational};
use subrqa::recplot::{self, BoundaryPolicy};
use subrqa::report::empirical_report;
use subrqa::rqa::{self, ResidualBounds};
use subrqa::{Rational, Substitution};

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_sequence(rng: &mut StdRng, len: usize) -> Vec<u8> {
    match rng.gen_range(0..4) {
        0 => (0..len).map(|_| rng.gen_range(0..2)).collect(),
        1 => {
            let p = rng.gen_range(1..7);
            let base: Vec<u8> = (0..p).map(|_| rng.gen_range(0..2)).collect();
            (0..len)
                .map(|i| if rng.gen_bool(0.03) { 1 - base[i % p] } else { base[i % p] })
                .collect()
        }
        2 => fixed_point([&[0, 1], &[1, 0]], len),
        _ => fixed_point([&[0, 1, 1, 1, 0], &[0, 1, 0, 1, 0]], len),
    }
}

fn golden_densities(tables: &mut Vec<DensityTable>) -> Verdict {
    let start = Instant::now();
    for g in Golden::ALL {
        let t = reconstruct_base(&g.substitution()).map_err(|e| format!("{}: {e}", g.name()))?;
        tables.push(t);
    }
    let secs = start.elapsed().as_secs_f64();
    let want: [&[(i64, i64)]; 3] = [
        &[(1, 9), (1, 18), (1, 36)],
        &[(1, 9), (1, 18)],
        &[(7, 50), (3, 50), (1, 50), (13, 1250)],
    ];
    for (t, w) in tables.iter().zip(want) {
        let got: Vec<Rational> = t.base.values().cloned().collect();
        let w: Vec<Rational> = w.iter().map(|&(a, b)| frac(a, b)).collect();
        ensure(got == w, || format!("{}: got {got:?}", t.subst))?;
    }
    ensure(secs <= 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("all three bases exact in {secs:.1} s"))
}

fn scaling_law(tables: &[DensityTable]) -> Verdict {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for t in tables {
        let c = &t.constants;
        for l in c.r..=200 {
            let d = t.dens_k(l);
            if d.is_zero() {
                continue;
            }
            let child = t.q() * l + c.alpha_beta();
            ensure(t.dens_k(child) == &d * t.inv_q2(), || {
                format!("{}: dens(K_{child}) != dens(K_{l})/q²", t.subst)
            })?;
            checked += 1;
        }
        let x = t.subst.fixed_point_prefix((1 << 12) + 32).map_err(|e| e.to_string())?;
        for l in 1..=16 {
            let d = t.dens_k(l);
            if d.is_zero() {
                continue;
            }
            let e = to_f64(&empirical_delta(&x, l, 1 << 12).map_err(|e| e.to_string())?);
            let gap = (e - to_f64(&d)).abs();
            worst = worst.max(gap);
            ensure(gap <= 5e-3, || format!("{}: l = {l}, empirical {e}, exact {d}", t.subst))?;
        }
    }
    Ok(format!("{checked} chain steps exact, worst empirical gap {worst:.2e}"))
}

fn worked_example() -> Verdict {
    let x = parse_word("010111010");
    let xs = bits(&x);
    let n = 6;
    let lines = recplot::extract_lines(&xs, n, 1).map_err(|e| e.to_string())?;
    let has = |i, j, zero, far| {
        lines
            .iter()
            .any(|t| t.i == i && t.j == j && t.length == 2 && t.boundary.zero == zero && t.boundary.n == far)
    };
    ensure(has(0, 2, true, false), || "line (0,2,2) 0-boundary missing".into())?;
    ensure(has(3, 4, false, true), || "line (3,4,2) n-boundary missing".into())?;
    let hist = recplot::histogram(&xs, n, 1, 1).map_err(|e| e.to_string())?;
    ensure(hist.count(2, BoundaryPolicy::IncludeAll) == 4, || "N_2 != 4".into())?;
    let rr2 = rqa::measures_from_histogram(&hist, 2).map_err(|e| e.to_string())?.rr;
    let c2 = rqa::correlation_sum(&xs, n, 2, 1).map_err(|e| e.to_string())?;
    let c3 = rqa::correlation_sum(&xs, n, 3, 1).map_err(|e| e.to_string())?;
    ensure(rr2 == frac(8, 30), || format!("RR_2 = {rr2}"))?;
    ensure(c2 == frac(12, 36) && c3 == frac(8, 36), || format!("C_2 = {c2}, C_3 = {c3}"))?;
    // same quantities from the dense matrix
    ensure(naive_corsum(&x, n, 2, 1) == c2, || "C_2 differs from the pair count".into())?;

    let ex = BoundaryPolicy::ExcludeNBoundary;
    let rr2e = rqa::measures_from_histogram_with(&hist, 2, ex).map_err(|e| e.to_string())?;
    let c2e = rqa::corsum_main_term(&hist, 2, ex);
    let c3e = rqa::corsum_main_term(&hist, 3, ex);
    ensure(rr2e.rr == frac(4, 30), || format!("excluded RR_2 = {}", rr2e.rr))?;
    ensure(c2e == frac(8, 36) && c3e == frac(6, 36), || format!("excluded C_2 = {c2e}, C_3 = {c3e}"))?;
    // n² C_l = Σ_{k≥l} (k-l+1) N_k + n and RR_l from the two correlation sums
    let n2c2 = &c2e * uint(36);
    ensure(n2c2 == uint(hist.count(2, ex) as usize + n), || "C_2 identity fails".into())?;
    let est = rqa::rqa_from_corsum(&c2e, &c3e, n, 2).map_err(|e| e.to_string())?;
    ensure(est.main == rr2e.rr, || format!("RR identity gives {}", est.main))?;
    Ok("all listed values exact, both identities exact without n-boundary lines".into())
}

fn residual_bounds() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let trials = 1000;
    for t in 0..trials {
        let n = rng.gen_range(2..=512);
        let l = rng.gen_range(1..=6);
        let h = rng.gen_range(1..=3);
        let x = random_sequence(&mut rng, n + l + h + 2);
        let r = ResidualBounds::compute(&bits(&x), n, l, h).map_err(|e| e.to_string())?;
        let bad = r.violations();
        ensure(bad.is_empty(), || format!("trial {t}: n={n} l={l} h={h} violates {bad:?}"))?;
    }
    Ok(format!("{trials} instances, 0 violations"))
}

fn reductions() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let trials = 200;
    let mut cells = 0u64;
    for t in 0..trials {
        let n = rng.gen_range(2..=256);
        let m = rng.gen_range(1..=4);
        let h = rng.gen_range(1..=4);
        let x = random_sequence(&mut rng, n + m + h + 8);
        // embedded alphabet: symbol i is the m-block starting at i
        let sym: Vec<u32> = (0..n + h)
            .map(|i| x[i..i + m].iter().fold(0u32, |a, &b| 2 * a + b as u32))
            .collect();
        let eps = recplot::reduce_embedding(m, 0.5f64.powi(h as i32)).map_err(|e| e.to_string())?;
        let h_red = recplot::quantize_eps(eps).map_err(|e| e.to_string())?;
        let coarse = rp_matrix(&x, n, h_red);
        for i in 0..n {
            for j in 0..n {
                ensure((sym[i..i + h] == sym[j..j + h]) == coarse[i][j], || {
                    format!("trial {t}: n={n} m={m} h={h} differs at ({i},{j})")
                })?;
                cells += 1;
            }
        }
        // l-lines at 2^-h are the (l+h-1)-lines of the larger plot at 1/2
        let fine: Vec<NaiveLine> = naive_lines(&x, n, h)
            .into_iter()
            .map(|(i, j, len, z, f)| (i, j, recplot::reduce_eps(len, n, h).0, z, f))
            .collect();
        let big: Vec<NaiveLine> = naive_lines(&x, recplot::reduce_eps(1, n, h).1, 1)
            .into_iter()
            .filter(|l| l.2 >= h)
            .collect();
        ensure(fine == big, || format!("trial {t}: line bijection fails (n={n}, h={h})"))?;
    }
    Ok(format!("{trials} instances, {cells} plot cells, 0 violations"))
}

fn oracle_equivalence() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let trials = 500;
    for t in 0..trials {
        let n = rng.gen_range(2..=256);
        let h = rng.gen_range(1..=4);
        let x = random_sequence(&mut rng, n + h);
        let fast: Vec<NaiveLine> = recplot::extract_lines(&bits(&x), n, h)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|t| (t.i, t.j, t.length, t.boundary.zero, t.boundary.n))
            .collect();
        ensure(fast == naive_lines(&x, n, h), || format!("trial {t}: n={n} h={h}"))?;
    }
    Ok(format!("{trials} instances identical"))
}

fn asymptotic_ground_truth(tables: &[DensityTable]) -> Verdict {
    let two_ln2 = 2.0 * std::f64::consts::LN_2;
    let tm = quantifiers_via_sums(&tables[0], 1, 1, 1).map_err(|e| e.to_string())?;
    ensure(tm.rr == frac(1, 2) && tm.corsum == frac(1, 2), || format!("TM RR = {}, C = {}", tm.rr, tm.corsum))?;
    ensure(tm.line_dens == frac(2, 9), || format!("TM lineDens = {}", tm.line_dens))?;
    let e_tm = tm.ent.unwrap_or(f64::NAN);
    ensure((e_tm - two_ln2).abs() <= 1e-12, || format!("TM ENT = {e_tm}"))?;
    let pd = quantifiers_via_sums(&tables[1], 1, 1, 1).map_err(|e| e.to_string())?;
    let e_pd = pd.ent.unwrap_or(f64::NAN);
    ensure((e_pd - two_ln2).abs() <= 1e-12, || format!("PD ENT = {e_pd}"))?;
    Ok(format!(
        "TM RR = C = 1/2, lineDens = 2/9, |ENT - 2 ln 2| = {:.1e}; PD |ENT - 2 ln 2| = {:.1e}",
        (e_tm - two_ln2).abs(),
        (e_pd - two_ln2).abs()
    ))
}

fn convergence(tables: &[DensityTable]) -> Verdict {
    let start = Instant::now();
    let n = 1 << 14;
    let mut gaps = Vec::new();
    for t in tables {
        let emp = empirical_report(&t.subst, n, 1, 1, 1, BoundaryPolicy::IncludeAll).map_err(|e| e.to_string())?;
        let asy = quantifiers_via_sums(t, 1, 1, 1).map_err(|e| e.to_string())?;
        let gap = (to_f64(&emp.rr) - to_f64(&asy.rr)).abs();
        ensure(gap <= 0.01, || format!("{}: gap {gap}", t.subst))?;
        gaps.push(format!("{gap:.1e}"));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 120.0, || format!("took {secs:.1} s"))?;
    Ok(format!("gaps {} at n = 2^14 in {secs:.1} s", gaps.join(", ")))
}

fn nonprimitive() -> Verdict {
    let s = Substitution::parse("0->010,1->111").map_err(|e| e.to_string())?;
    let model = SubshiftModel::build(&s, &ReconstructionConfig::default()).map_err(|e| e.to_string())?;
    let q = model.quantifiers(1, 1, 1).map_err(|e| e.to_string())?;
    let one = Rational::one();
    ensure(q.corsum == one && q.rr == one && q.det == one, || format!("{q:?}"))?;
    ensure(q.lavg == ExtRational::Infinite, || format!("L_avg = {:?}", q.lavg))?;
    let mut dets = Vec::new();
    let mut rr = 0.0;
    for e in [10, 12, 14] {
        let r = empirical_report(&s, 1 << e, 1, 1, 3, BoundaryPolicy::IncludeAll).map_err(|e| e.to_string())?;
        dets.push(r.det.as_ref().map_or(0.0, to_f64));
        rr = to_f64(&r.rr);
    }
    ensure(dets[2] > 0.95, || format!("DET_1 at 2^14 = {}", dets[2]))?;
    ensure(dets.windows(2).all(|w| w[0] <= w[1]), || format!("DET_1 not monotone: {dets:?}"))?;
    Ok(format!("asymptotic C = RR = DET = 1, L_avg = inf; empirical DET_1 {dets:?}, RR_1 at 2^14 = {rr:.4}"))
}

fn det_to_one(tables: &[DensityTable]) -> Verdict {
    let (l, m) = (3, 1);
    let mut report = Vec::new();
    let mut failures = Vec::new();
    for t in [&tables[0], &tables[2]] {
        let q = t.q();
        let model = SubshiftModel::Primitive(Box::new(t.clone()));
        let rows = determinism_limit_scan(&model, m, l, 1..=24).map_err(|e| e.to_string())?;
        for (h, det) in &rows {
            if *h >= 8 && Rational::one() - det > det_envelope(q, l, *h) {
                failures.push(format!("{}: 1 - DET at h = {h} exceeds the envelope", t.subst));
            }
        }
        let last = &rows.last().unwrap().1;
        if to_f64(last) < 0.999 {
            failures.push(format!("{}: DET_3 at h = 24 is {last} = {:.6}", t.subst, to_f64(last)));
        }
        report.push(format!("{}: DET_3(h=24) = {last}", t.subst));
    }
    if failures.is_empty() {
        Ok(report.join("; "))
    } else {
        Err(format!("{}; envelope bound holds for h >= 8", failures.join("; ")))
    }
}

fn closed_forms(tables: &[DensityTable]) -> Verdict {
    let mut count = 0;
    for t in tables {
        for l in 1..=12 {
            for m in 1..=3 {
                for h in 1..=8 {
                    let a = closed_form(t, m, l, h).map_err(|e| e.to_string())?;
                    let b = quantifiers_via_sums(t, m, l, h).map_err(|e| e.to_string())?;
                    ensure(a.rr == b.rr && a.line_dens == b.line_dens && a.det == b.det && a.linedens == b.linedens, || {
                        format!("{}: m={m} l={l} h={h}", t.subst)
                    })?;
                    count += 1;
                }
            }
        }
    }
    let checks = golden::verify_all(None, |g| Ok(tables[Golden::ALL.iter().position(|&x| x == g).unwrap()].clone()));
    let failed: Vec<String> = checks.iter().filter(|c| c.failed()).map(|c| c.to_string()).collect();
    ensure(failed.is_empty(), || failed.join("; "))?;
    let deviations: Vec<String> = checks
        .iter()
        .filter(|c| matches!(c.outcome, Outcome::Deviation(_)))
        .map(|c| c.to_string())
        .collect();
    for d in &deviations {
        println!("    {d}");
    }
    Ok(format!("{count} grid points exact; {} table rows deviate (listed above)", deviations.len()))
}

fn main() {
    let mut tables = Vec::new();
    let mut results: Vec<(usize, &str, Verdict)> = Vec::new();
    results.push((1, "golden densities", golden_densities(&mut tables)));
    let have_tables = tables.len() == 3;
    let need = |f: &dyn Fn(&[DensityTable]) -> Verdict| {
        if have_tables {
            f(&tables)
        } else {
            Err("density tables unavailable".to_string())
        }
    };
    results.push((2, "scaling law", need(&scaling_law)));
    results.push((3, "worked example", worked_example()));
    results.push((4, "residual bounds", residual_bounds()));
    results.push((5, "reduction identities", reductions()));
    results.push((6, "oracle equivalence", oracle_equivalence()));
    results.push((7, "asymptotic ground truth", need(&asymptotic_ground_truth)));
    results.push((8, "finite-to-asymptotic convergence", need(&convergence)));
    results.push((9, "non-primitive trivialization", nonprimitive()));
    results.push((10, "DET -> 1", need(&det_to_one)));
    results.push((11, "closed-form reconciliation", need(&closed_forms)));

    let mut failed = 0;
    for (k, name, v) in &results {
        match v {
            Ok(d) => println!("PASS criterion {k:>2} ({name}): {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {k:>2} ({name}): {d}");
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
