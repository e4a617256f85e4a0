//! Densities `dens(K_l)` of the start sets of inner `l`-lines.
//!
//! Base lengths `l0 < R` are estimated from a long fixed-point prefix and
//! snapped to exact rationals; every longer length follows from the scaling
//! law `dens(K_l) = q^{-2k} dens(K_{l0})` along the chains
//! `l0 → q l0 + α + β → …`.
//!
//! The estimator uses unique ergodicity: the pairs `(i, j)` starting an inner
//! `l`-line are exactly those where `x[i-1..i+l+1) = a u b` and
//! `x[j-1..j+l+1) = ā u b̄`, so
//! `dens(K_l) = Σ_{a u b} f(a u b) f(ā u b̄)` with `f` the word frequencies.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitSequence;
use crate::error::{Error, Result};
use crate::rational::{self, pow, to_f64, uint, Rational};
use crate::recognizability::{self, RecogConstants, MAX_WINDOW};
use crate::recplot;
use crate::substitution::{Substitution, SubstitutionKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionConfig {
    /// The two prefix lengths used by the frequency estimator.
    pub scales: (usize, usize),
    /// Plot size of the pair-count cross-check.
    pub pair_n: usize,
    /// Plot size of the emptiness scan.
    pub scan_n: usize,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        ReconstructionConfig {
            scales: (1 << 22, 1 << 23),
            pair_n: 1 << 12,
            scan_n: 1 << 13,
        }
    }
}

impl ReconstructionConfig {
    /// Snap tolerance of the frequency estimator at prefix length `n`.
    pub fn snap_tolerance(n: usize) -> f64 {
        2.0 / n as f64
    }

    /// Tolerance of the pair-count cross-check at plot size `n`.
    pub fn pair_tolerance(n: usize) -> f64 {
        16.0 / n as f64
    }

    pub fn denominator_cap(q: usize) -> BigInt {
        BigInt::from(4) * pow(q, 6)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub l0: usize,
    pub scales: Vec<usize>,
    pub estimates: Vec<f64>,
    pub tolerance: Vec<f64>,
    /// Pair-count density at `pair_n`.
    #[serde(with = "rational::serde_rational")]
    pub pair_delta: Rational,
    pub pair_n: usize,
    /// Inner-line starts of length `l0` found within `scan_n`.
    pub scan_count: u64,
    pub scan_n: usize,
    /// `(child length, estimate, predicted)` for the scaling check.
    pub scaling_check: Option<(usize, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub subst: Substitution,
    pub constants: RecogConstants,
    #[serde(with = "rational::serde_rational_map")]
    pub base: BTreeMap<usize, Rational>,
    pub evidence: Vec<Evidence>,
    pub config: ReconstructionConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub l: usize,
    pub k: usize,
    pub l0: usize,
    pub valid: bool,
}

/// `card(K_l ∩ [1, n)²) / (n² − n)`.
pub fn empirical_delta(x: &BitSequence, l: usize, n: usize) -> Result<Rational> {
    let count = recplot::inner_line_length_counts(x, n, l)?[l];
    Ok(Rational::new(
        BigInt::from(count),
        BigInt::from(n) * BigInt::from(n - 1),
    ))
}

/// Counts of every `len`-window starting in `[0, n)`.
fn window_counts(x: &BitSequence, n: usize, len: usize) -> HashMap<u128, u64> {
    const CHUNK: usize = 1 << 16;
    (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .fold(HashMap::new, |mut acc: HashMap<u128, u64>, c| {
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                *acc.entry(x.window128(i, len)).or_insert(0) += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        })
}

/// `Σ_w c(w) c(w̃) / n²` with `w̃` the word `w` with both end letters flipped.
pub fn frequency_estimate(x: &BitSequence, l: usize, n: usize) -> Result<Rational> {
    let len = l + 2;
    if len > MAX_WINDOW {
        return Err(Error::InvalidArgument(format!(
            "length {l} too long for the frequency estimator"
        )));
    }
    if x.len() < n + len - 1 {
        return Err(Error::InsufficientPrefix {
            needed: n + len - 1,
            available: x.len(),
        });
    }
    let counts = window_counts(x, n, len);
    let flip = 1u128 | (1u128 << (len - 1));
    let total: u128 = counts
        .iter()
        .map(|(&w, &c)| c as u128 * counts.get(&(w ^ flip)).copied().unwrap_or(0) as u128)
        .sum();
    let nn = BigInt::from(n);
    Ok(Rational::new(BigInt::from(total), &nn * &nn))
}

fn require_primitive_aperiodic(s: &Substitution) -> Result<Substitution> {
    let cls = s.classify();
    if cls.kind != SubstitutionKind::PrimitiveAperiodic {
        return Err(Error::NotPrimitiveAperiodic(format!("{s} is {:?}", cls.kind)));
    }
    Ok(s.normalize().0)
}

/// Build the base table with the default scales.
pub fn reconstruct_base(s: &Substitution) -> Result<DensityTable> {
    reconstruct_base_with(s, &ReconstructionConfig::default())
}

pub fn reconstruct_base_with(s: &Substitution, cfg: &ReconstructionConfig) -> Result<DensityTable> {
    let s = require_primitive_aperiodic(s)?;
    let constants = recognizability::recognizability_constants(&s)?;
    let q = s.q();
    let ab = constants.alpha_beta();
    let (n1, n2) = cfg.scales;
    if n1 == 0 || n2 < n1 {
        return Err(Error::InvalidArgument("scales must satisfy 0 < n1 <= n2".into()));
    }
    let r = constants.r;
    let longest = (q * (r - 1) + ab + 2).max(r + 2);
    let prefix_len = n2.max(cfg.scan_n).max(cfg.pair_n) + longest + 2;
    let x = s.fixed_point_prefix(prefix_len)?;
    let cap = ReconstructionConfig::denominator_cap(q);
    let scan = recplot::inner_line_length_counts(&x, cfg.scan_n, r)?;
    let pairs = recplot::inner_line_length_counts(&x, cfg.pair_n, r)?;
    let pair_denom = BigInt::from(cfg.pair_n) * BigInt::from(cfg.pair_n - 1);

    let entries: Vec<(Rational, Evidence)> = (1..r)
        .into_par_iter()
        .map(|l0| -> Result<(Rational, Evidence)> {
            let fail = |reason: String| Error::Reconstruction { length: l0, reason };
            let est1 = to_f64(&frequency_estimate(&x, l0, n1)?);
            let est2 = to_f64(&frequency_estimate(&x, l0, n2)?);
            let (t1, t2) = (
                ReconstructionConfig::snap_tolerance(n1),
                ReconstructionConfig::snap_tolerance(n2),
            );
            let pair_delta = Rational::new(BigInt::from(pairs[l0]), pair_denom.clone());
            let mut evidence = Evidence {
                l0,
                scales: vec![n1, n2],
                estimates: vec![est1, est2],
                tolerance: vec![t1, t2],
                pair_delta: pair_delta.clone(),
                pair_n: cfg.pair_n,
                scan_count: scan[l0],
                scan_n: cfg.scan_n,
                scaling_check: None,
            };
            if scan[l0] == 0 {
                if est2 > t2 {
                    return Err(fail(format!(
                        "no inner line within n = {} but frequency estimate {est2:e}",
                        cfg.scan_n
                    )));
                }
                return Ok((Rational::zero(), evidence));
            }
            let snap1 = rational::snap(est1, t1, &cap)
                .ok_or_else(|| fail(format!("no rational with denominator <= {cap} near {est1}")))?;
            let snap2 = rational::snap(est2, t2, &cap)
                .ok_or_else(|| fail(format!("no rational with denominator <= {cap} near {est2}")))?;
            if snap1 != snap2 {
                return Err(fail(format!("scales disagree: {snap1} vs {snap2}")));
            }
            if snap1.is_zero() {
                return Err(fail("inner lines exist but the estimate snapped to 0".into()));
            }
            let pair_gap = (to_f64(&pair_delta) - to_f64(&snap1)).abs();
            let pair_tol = ReconstructionConfig::pair_tolerance(cfg.pair_n);
            if pair_gap > pair_tol {
                return Err(fail(format!(
                    "pair count {} differs from {snap1} by {pair_gap:e} > {pair_tol:e}",
                    to_f64(&pair_delta)
                )));
            }
            if l0 >= constants.r0 {
                let child = q * l0 + ab;
                let predicted = to_f64(&snap1) / (q * q) as f64;
                let child_est = to_f64(&frequency_estimate(&x, child, n1)?);
                evidence.scaling_check = Some((child, child_est, predicted));
                if (child_est - predicted).abs() > t1 {
                    return Err(fail(format!(
                        "scaling check at l = {child}: estimate {child_est:e}, predicted {predicted:e}"
                    )));
                }
            }
            Ok((snap1, evidence))
        })
        .collect::<Result<_>>()?;

    let mut base = BTreeMap::new();
    let mut evidence = Vec::new();
    for (l0, (d, ev)) in (1..r).zip(entries) {
        base.insert(l0, d);
        evidence.push(ev);
    }
    Ok(DensityTable {
        subst: s,
        constants,
        base,
        evidence,
        config: cfg.clone(),
    })
}

/// Invert `l ↦ q l + α + β` down to a base length below `R`. For `l < R`
/// the result is the trivial decomposition `k = 0`, `l0 = l`.
pub fn decompose(constants: &RecogConstants, l: usize) -> Decomposition {
    let (q, ab, r) = (constants.q, constants.alpha_beta(), constants.r);
    let mut cur = l;
    let mut k = 0;
    while cur >= r {
        if cur < ab + q || (cur - ab) % q != 0 {
            return Decomposition {
                l,
                k,
                l0: cur,
                valid: false,
            };
        }
        cur = (cur - ab) / q;
        k += 1;
    }
    let valid = cur >= 1 && (k == 0 || r <= q * cur + ab);
    Decomposition {
        l,
        k,
        l0: cur,
        valid,
    }
}

/// `l0 q^k + c (q^k − 1)`, computed as `q^k l0 + (α+β)(1 + q + … + q^{k-1})`.
pub fn chain_length(constants: &RecogConstants, l0: usize, k: usize) -> BigInt {
    let q = BigInt::from(constants.q);
    let ab = BigInt::from(constants.alpha_beta());
    let mut l = BigInt::from(l0);
    for _ in 0..k {
        l = &l * &q + &ab;
    }
    l
}

/// `(j, l0)`: `j` minimal with `(R−1)q^j + c(q^j−1) ≥ l'`, then `l0` minimal
/// in `[R0, R)` with `l0 q^j + c(q^j−1) ≥ l'`. Requires `l' ≥ R0`.
pub fn closed_form_indices(constants: &RecogConstants, l_prime: usize) -> Result<(usize, usize)> {
    if l_prime < constants.r0 {
        return Err(Error::InvalidArgument(format!(
            "l' = {l_prime} is below R0 = {}",
            constants.r0
        )));
    }
    let target = BigInt::from(l_prime);
    let j = (0..)
        .find(|&j| chain_length(constants, constants.r - 1, j) >= target)
        .expect("chain lengths grow without bound");
    let l0 = (constants.r0..constants.r)
        .find(|&l0| chain_length(constants, l0, j) >= target)
        .expect("l0 = R-1 always qualifies");
    Ok((j, l0))
}

impl DensityTable {
    pub fn q(&self) -> usize {
        self.constants.q
    }

    pub fn base_density(&self, l0: usize) -> Rational {
        self.base.get(&l0).cloned().unwrap_or_else(Rational::zero)
    }

    /// `dens(K_l)` for any `l ≥ 1`.
    pub fn dens_k(&self, l: usize) -> Rational {
        self.dens_k_both(l).0
    }

    /// Both closed forms `q^{-2k} d0` and `((l0+c)/(l+c))² d0`.
    pub fn dens_k_both(&self, l: usize) -> (Rational, Rational) {
        if l == 0 {
            return (Rational::zero(), Rational::zero());
        }
        if l < self.constants.r {
            let d = self.base_density(l);
            return (d.clone(), d);
        }
        let dec = decompose(&self.constants, l);
        if !dec.valid {
            return (Rational::zero(), Rational::zero());
        }
        let d0 = self.base_density(dec.l0);
        let scaled = &d0 / Rational::from_integer(pow(self.q(), 2 * dec.k));
        let c = &self.constants.c;
        let ratio = (uint(dec.l0) + c) / (uint(l) + c);
        let other = &ratio * &ratio * d0;
        (scaled, other)
    }

    /// Base lengths with a nonzero density.
    pub fn support_bases(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.base.iter().filter(|(_, d)| !d.is_zero()).map(|(&l, d)| (l, d))
    }

    /// Every `l ≤ max_len` with `dens(K_l) > 0`, ascending.
    pub fn support_up_to(&self, max_len: usize) -> Vec<usize> {
        let bound = BigInt::from(max_len);
        let mut out = Vec::new();
        for (l0, _) in self.support_bases() {
            if l0 <= max_len {
                out.push(l0);
            }
            if l0 >= self.constants.r0 {
                let mut k = 1;
                loop {
                    let l = chain_length(&self.constants, l0, k);
                    if l > bound {
                        break;
                    }
                    out.push(usize::try_from(l).unwrap());
                    k += 1;
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Replace one base density (used by negative controls).
    pub fn tampered(&self, l0: usize, value: Rational) -> DensityTable {
        let mut t = self.clone();
        t.base.insert(l0, value);
        t
    }

    /// `Σ_{l ≥ from} dens(K_l)` truncated at `max_len`, a numeric oracle for
    /// the exact tail sums.
    pub fn truncated_tail(&self, from: usize, max_len: usize) -> Rational {
        self.support_up_to(max_len)
            .into_iter()
            .filter(|&l| l >= from)
            .map(|l| self.dens_k(l))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// `q^{-2}` as a rational.
    pub fn inv_q2(&self) -> Rational {
        Rational::new(BigInt::one(), pow(self.q(), 2))
    }
}
