//! Finite-`n` recurrence quantification: measures from line histograms,
//! correlation sums by window-class counting, and the conversions between
//! the two with their residual bounds.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitSequence;
use crate::error::{Error, Result};
use crate::rational::{self, uint, ExtRational, Rational};
use crate::recplot::{self, BoundaryPolicy, LineHistogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Empirical,
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RQAReport {
    /// Plot size; `None` for `n = ∞`.
    pub n: Option<usize>,
    pub m: usize,
    pub h: usize,
    pub l_min: usize,
    pub policy: BoundaryPolicy,
    /// `p_l` for every length with a nonzero value (asymptotic reports carry
    /// only the entry at `l_min`).
    #[serde(with = "rational::serde_rational_map")]
    pub linedens: BTreeMap<usize, Rational>,
    /// `P_l = Σ_{k≥l} p_k`.
    #[serde(with = "rational::serde_rational")]
    pub line_dens: Rational,
    #[serde(with = "rational::serde_rational")]
    pub rr: Rational,
    #[serde(with = "rational::serde_opt_rational")]
    pub det: Option<Rational>,
    pub lavg: Option<ExtRational>,
    /// Natural-log entropy of the line-length distribution.
    pub ent: Option<f64>,
    #[serde(with = "rational::serde_opt_rational")]
    pub corsum: Option<Rational>,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RQAReport {
    /// Relabel an empirical report computed at `h' = h+m-1` as the report of
    /// the `m`-embedded sequence at threshold `2^-h`.
    pub fn with_embedding(mut self, m: usize, h: usize) -> Self {
        self.m = m;
        self.h = h;
        self
    }
}

fn plot_pairs(n: usize) -> BigInt {
    let n = BigInt::from(n);
    &n * &n - &n
}

/// `RR`, `DET`, `L_avg`, `ENT` and the `p_l` from a line histogram.
pub fn measures_from_histogram(hist: &LineHistogram, l: usize) -> Result<RQAReport> {
    measures_from_histogram_with(hist, l, BoundaryPolicy::IncludeAll)
}

pub fn measures_from_histogram_with(
    hist: &LineHistogram,
    l: usize,
    policy: BoundaryPolicy,
) -> Result<RQAReport> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be >= 1".into()));
    }
    if hist.n < 2 {
        return Err(Error::InvalidArgument("n must be >= 2".into()));
    }
    let denom = plot_pairs(hist.n);
    let totals = hist.totals(policy);
    let linedens: BTreeMap<usize, Rational> = totals
        .iter()
        .map(|&(len, c)| (len, Rational::new(BigInt::from(c), denom.clone())))
        .collect();

    let mass = |from: usize| -> BigInt {
        totals
            .iter()
            .filter(|&&(len, _)| len >= from)
            .map(|&(len, c)| BigInt::from(len) * BigInt::from(c))
            .sum()
    };
    let rr = Rational::new(mass(l), denom.clone());
    let rr1 = Rational::new(mass(1), denom.clone());
    let tail: Vec<u64> = totals.iter().filter(|&&(len, _)| len >= l).map(|&(_, c)| c).collect();
    let tail_count: u128 = tail.iter().map(|&c| c as u128).sum();
    let line_dens = Rational::new(BigInt::from(tail_count), denom);

    let det = (!rr1.is_zero()).then(|| &rr / &rr1);
    let lavg = (!line_dens.is_zero()).then(|| ExtRational::Finite(&rr / &line_dens));
    let ent = (tail_count > 0).then(|| {
        let total = tail_count as f64;
        tail.iter()
            .map(|&c| {
                let p = c as f64 / total;
                -p * p.ln()
            })
            .sum::<f64>()
            .max(0.0)
    });

    Ok(RQAReport {
        n: Some(hist.n),
        m: 1,
        h: hist.h,
        l_min: l,
        policy,
        linedens,
        line_dens,
        rr,
        det,
        lavg,
        ent,
        corsum: None,
        provenance: Provenance::Empirical,
        notes: Vec::new(),
    })
}

fn check_corsum_args(x: &BitSequence, n: usize, l: usize, h: usize) -> Result<usize> {
    if n == 0 || l == 0 || h == 0 {
        return Err(Error::InvalidArgument("n, l and h must be >= 1".into()));
    }
    let w = l + h - 1;
    let needed = n + w - 1;
    if x.len() < needed {
        return Err(Error::InsufficientPrefix {
            needed,
            available: x.len(),
        });
    }
    Ok(w)
}

/// `Σ (class size)²` over classes of equal windows `x[i..i+w)`, `i ∈ [0, n)`.
fn squared_class_sizes(x: &BitSequence, n: usize, w: usize) -> u128 {
    let square_runs = |sorted: &[u128]| -> u128 {
        let mut total = 0u128;
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i + 1;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            total += ((j - i) as u128).pow(2);
            i = j;
        }
        total
    };
    if w <= 128 {
        let mut keys: Vec<u128> = (0..n).into_par_iter().map(|i| x.window128(i, w)).collect();
        keys.par_sort_unstable();
        square_runs(&keys)
    } else {
        let mut classes: HashMap<BitSequence, u128> = HashMap::new();
        for i in 0..n {
            *classes.entry(x.subsequence(i, w)).or_insert(0) += 1;
        }
        classes.values().map(|c| c * c).sum()
    }
}

/// `C_l(x, n, 2^-h)`, diagonal included.
pub fn correlation_sum(x: &BitSequence, n: usize, l: usize, h: usize) -> Result<Rational> {
    let w = check_corsum_args(x, n, l, h)?;
    let nn = BigInt::from(n);
    Ok(Rational::new(
        BigInt::from(squared_class_sizes(x, n, w)),
        &nn * &nn,
    ))
}

/// `(Σ_{k≥l} (k-l+1) N_k + n) / n²` under the given policy. With
/// `ExcludeNBoundary` this is exactly the correlation sum of the plot with
/// its n-boundary lines removed.
pub fn corsum_main_term(hist: &LineHistogram, l: usize, policy: BoundaryPolicy) -> Rational {
    let n = BigInt::from(hist.n);
    let weighted: BigInt = hist
        .totals(policy)
        .iter()
        .filter(|&&(len, _)| len >= l)
        .map(|&(len, c)| BigInt::from(len - l + 1) * BigInt::from(c))
        .sum();
    Rational::new(weighted + &n, &n * &n)
}

/// `(main term, Δ_l)` where `n² C_l = n² · main + Δ_l`.
pub fn corsum_from_histogram(
    x: &BitSequence,
    hist: &LineHistogram,
    l: usize,
) -> Result<(Rational, Rational)> {
    let main = corsum_main_term(hist, l, BoundaryPolicy::IncludeAll);
    let c = correlation_sum(x, hist.n, l, hist.h)?;
    let n2 = uint(hist.n * hist.n);
    let triangle = (c - &main) * n2;
    Ok((main, triangle))
}

/// Main term and admissible residual range `actual - main ∈ [lo, hi]`
/// (`hi` excluded when `upper_strict`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Estimate {
    #[serde(with = "rational::serde_rational")]
    pub main: Rational,
    #[serde(with = "rational::serde_rational")]
    pub lo: Rational,
    #[serde(with = "rational::serde_rational")]
    pub hi: Rational,
    pub upper_strict: bool,
}

impl Estimate {
    fn symmetric(main: Rational, bound: Rational) -> Self {
        Estimate {
            main,
            lo: -bound.clone(),
            hi: bound,
            upper_strict: false,
        }
    }

    pub fn residual(&self, actual: &Rational) -> Rational {
        actual - &self.main
    }

    pub fn admits(&self, actual: &Rational) -> bool {
        let r = self.residual(actual);
        r >= self.lo && if self.upper_strict { r < self.hi } else { r <= self.hi }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be >= 2".into()));
    }
    Ok(())
}

/// `RR_l ≈ n/(n-1) [l C_l - (l-1) C_{l+1}] - 1/(n-1)`, residual `≤ 2l(l-1)/n`.
pub fn rqa_from_corsum(c_l: &Rational, c_next: &Rational, n: usize, l: usize) -> Result<Estimate> {
    check_n(n)?;
    let (nr, lr) = (uint(n), uint(l));
    let one = Rational::one();
    let main = &nr / (&nr - &one) * (&lr * c_l - (&lr - &one) * c_next) - one.clone() / (&nr - &one);
    let bound = Rational::new(BigInt::from(2 * l * (l - 1)), BigInt::from(n));
    Ok(Estimate::symmetric(main, bound))
}

/// `P_l ≈ n/(n-1) (C_l - C_{l+1})`, residual `≤ 2l/n`.
pub fn linedens_from_corsum(
    c_l: &Rational,
    c_next: &Rational,
    n: usize,
    l: usize,
) -> Result<Estimate> {
    check_n(n)?;
    let nr = uint(n);
    let main = &nr / (&nr - Rational::one()) * (c_l - c_next);
    let bound = Rational::new(BigInt::from(2 * l), BigInt::from(n));
    Ok(Estimate::symmetric(main, bound))
}

/// Quotient of the two main terms, the corrected `L_avg` estimate.
pub fn lavg_from_corsum(c_l: &Rational, c_next: &Rational, n: usize, l: usize) -> Result<Option<Rational>> {
    let rr = rqa_from_corsum(c_l, c_next, n, l)?;
    let p = linedens_from_corsum(c_l, c_next, n, l)?;
    Ok((!p.main.is_zero()).then(|| rr.main / p.main))
}

/// `C_l ≈ (n-1)/n [RR_l - (l-1) P_l]`, residual in `[1/n, 2l/n)`.
pub fn corsum_from_rqa(rr_l: &Rational, p_l: &Rational, n: usize, l: usize) -> Result<Estimate> {
    check_n(n)?;
    let nr = uint(n);
    let main = (&nr - Rational::one()) / &nr * (rr_l - uint(l - 1) * p_l);
    Ok(Estimate {
        main,
        lo: Rational::new(BigInt::one(), BigInt::from(n)),
        hi: Rational::new(BigInt::from(2 * l), BigInt::from(n)),
        upper_strict: true,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorsumLimits {
    #[serde(with = "rational::serde_rational")]
    pub rr: Rational,
    #[serde(with = "rational::serde_opt_rational")]
    pub det: Option<Rational>,
    pub lavg: Option<ExtRational>,
    #[serde(with = "rational::serde_rational")]
    pub line_dens: Rational,
    #[serde(with = "rational::serde_rational")]
    pub corsum: Rational,
}

/// Asymptotic `RR_l = l C_l - (l-1) C_{l+1}`, `DET_l = RR_l / C_1` and
/// `L_avg = l + C_{l+1}/(C_l - C_{l+1})` (infinite when `C_l = C_{l+1} > 0`).
pub fn asymptotic_from_corsum(
    c_1: &Rational,
    c_l: &Rational,
    c_next: &Rational,
    l: usize,
) -> Result<CorsumLimits> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be >= 1".into()));
    }
    let lr = uint(l);
    let rr = &lr * c_l - (&lr - Rational::one()) * c_next;
    let det = (!c_1.is_zero()).then(|| &rr / c_1);
    let gap = c_l - c_next;
    if gap.is_negative() {
        return Err(Error::Inconsistent(format!(
            "correlation sums increase with l: C_l = {c_l}, C_l+1 = {c_next}"
        )));
    }
    let lavg = if !gap.is_zero() {
        Some(ExtRational::Finite(&lr + c_next / &gap))
    } else if !c_l.is_zero() {
        Some(ExtRational::Infinite)
    } else {
        None
    };
    Ok(CorsumLimits {
        rr,
        det,
        lavg,
        line_dens: gap,
        corsum: c_l.clone(),
    })
}

/// The actual residuals of the corrected identities at one `(x, n, l, h)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualBounds {
    pub n: usize,
    pub l: usize,
    pub h: usize,
    #[serde(with = "rational::serde_rational")]
    pub triangle: Rational,
    #[serde(with = "rational::serde_rational")]
    pub delta_rr: Rational,
    #[serde(with = "rational::serde_rational")]
    pub delta_n: Rational,
    #[serde(with = "rational::serde_rational")]
    pub delta_c: Rational,
}

impl ResidualBounds {
    pub fn compute(x: &BitSequence, n: usize, l: usize, h: usize) -> Result<ResidualBounds> {
        check_n(n)?;
        let hist = recplot::histogram(x, n, h, 1)?;
        let report = measures_from_histogram(&hist, l)?;
        let c_l = correlation_sum(x, n, l, h)?;
        let c_next = correlation_sum(x, n, l + 1, h)?;
        let (_, triangle) = corsum_from_histogram(x, &hist, l)?;
        let delta_rr = rqa_from_corsum(&c_l, &c_next, n, l)?.residual(&report.rr);
        let delta_n = linedens_from_corsum(&c_l, &c_next, n, l)?.residual(&report.line_dens);
        let delta_c = corsum_from_rqa(&report.rr, &report.line_dens, n, l)?.residual(&c_l);
        Ok(ResidualBounds {
            n,
            l,
            h,
            triangle,
            delta_rr,
            delta_n,
            delta_c,
        })
    }

    /// Names of the bounds that fail (empty when all hold).
    pub fn violations(&self) -> Vec<&'static str> {
        let (n, l) = (self.n, self.l);
        let r = |num: usize| Rational::new(BigInt::from(num), BigInt::from(n));
        let mut bad = Vec::new();
        if self.triangle.is_negative() || self.triangle > uint(2 * (l - 1) * (n - 1)) {
            bad.push("triangle");
        }
        if self.delta_rr.abs() > r(2 * l * (l - 1)) {
            bad.push("delta_rr");
        }
        if self.delta_n.abs() > r(2 * l) {
            bad.push("delta_n");
        }
        if self.delta_c < r(1) || self.delta_c >= r(2 * l) {
            bad.push("delta_c");
        }
        bad
    }
}
