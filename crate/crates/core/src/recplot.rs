//! Implicit symbolic recurrence plots and their diagonal lines.
//!
//! `RP(x, n, 2^-h)` has a 1 at `(i, j)` iff `x[i..i+h) == x[j..j+h)`. The plot
//! is never materialised: each diagonal offset `d` is scanned as the bit mask
//! `x_i == x_{i+d}` and its runs of ones are read off with trailing-zero
//! counts. A run of length `L >= h` in that mask is exactly a line of length
//! `L - h + 1` in the plot at threshold `2^-h`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitSequence;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Boundary {
    pub zero: bool,
    pub n: bool,
}

impl Boundary {
    pub fn is_inner(self) -> bool {
        !self.zero && !self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LineTriple {
    pub i: usize,
    pub j: usize,
    pub length: usize,
    pub boundary: Boundary,
}

impl LineTriple {
    pub fn transpose(self) -> LineTriple {
        LineTriple {
            i: self.j,
            j: self.i,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCounts {
    pub inner: u64,
    pub zero_boundary: u64,
    /// Lines touching the far edge, including those that also touch the
    /// near edge.
    pub n_boundary: u64,
}

impl LineCounts {
    pub fn total(&self) -> u64 {
        self.inner + self.zero_boundary + self.n_boundary
    }

    fn add(&mut self, other: &LineCounts) {
        self.inner += other.inner;
        self.zero_boundary += other.zero_boundary;
        self.n_boundary += other.n_boundary;
    }

    fn bump(&mut self, b: Boundary, by: u64) {
        if b.n {
            self.n_boundary += by;
        } else if b.zero {
            self.zero_boundary += by;
        } else {
            self.inner += by;
        }
    }
}

/// Which lines enter the derived counts `N_l`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryPolicy {
    /// Every line, boundary or not.
    #[default]
    IncludeAll,
    /// Drop lines touching the far edge of the plot.
    ExcludeNBoundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineHistogram {
    pub n: usize,
    pub h: usize,
    pub counts: BTreeMap<usize, LineCounts>,
}

impl LineHistogram {
    /// `N_l` under the given policy.
    pub fn count(&self, len: usize, policy: BoundaryPolicy) -> u64 {
        self.counts.get(&len).map_or(0, |c| match policy {
            BoundaryPolicy::IncludeAll => c.total(),
            BoundaryPolicy::ExcludeNBoundary => c.inner + c.zero_boundary,
        })
    }

    /// `(l, N_l)` for all lengths with a nonzero count.
    pub fn totals(&self, policy: BoundaryPolicy) -> Vec<(usize, u64)> {
        self.counts
            .keys()
            .map(|&l| (l, self.count(l, policy)))
            .filter(|&(_, c)| c > 0)
            .collect()
    }

    /// `Σ l N_l`: the number of off-diagonal recurrences covered.
    pub fn mass(&self, policy: BoundaryPolicy) -> u128 {
        self.totals(policy)
            .iter()
            .map(|&(l, c)| l as u128 * c as u128)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.values().all(|c| c.total() == 0)
    }
}

fn check_prefix(x: &BitSequence, needed: usize) -> Result<()> {
    if x.len() < needed {
        return Err(Error::InsufficientPrefix {
            needed,
            available: x.len(),
        });
    }
    Ok(())
}

fn check_nh(n: usize, h: usize) -> Result<()> {
    if h == 0 {
        return Err(Error::InvalidArgument("h must be >= 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    Ok(())
}

/// `RP(x, ·, 2^-h)` at `(i, j)`.
pub fn rp_entry(x: &BitSequence, i: usize, j: usize, h: usize) -> Result<bool> {
    check_prefix(x, i.max(j) + h)?;
    Ok(x.window_eq(i, j, h))
}

/// Call `f(start, len)` for every maximal run of ones in the mask
/// `e_i = [x_i == x_{i+d}]`, `i ∈ [0, limit)`. Requires `limit + d <= |x|`.
#[inline]
pub fn for_each_match_run(x: &BitSequence, d: usize, limit: usize, mut f: impl FnMut(usize, usize)) {
    let mut run_start: Option<usize> = None;
    let mut base = 0;
    while base < limit {
        let width = (limit - base).min(64);
        let mut e = !(x.word_at(base) ^ x.word_at(base + d));
        if width < 64 {
            e &= (1u64 << width) - 1;
        }
        let mut pos = 0;
        while pos < width {
            let rest = e >> pos;
            match run_start {
                Some(s) => {
                    let ones = ((!rest).trailing_zeros() as usize).min(width - pos);
                    pos += ones;
                    if pos < width {
                        f(s, base + pos - s);
                        run_start = None;
                    }
                }
                None => {
                    let zeros = (rest.trailing_zeros() as usize).min(width - pos);
                    pos += zeros;
                    if pos < width {
                        run_start = Some(base + pos);
                    }
                }
            }
        }
        base += width;
    }
    if let Some(s) = run_start {
        f(s, limit - s);
    }
}

/// Lines with `j = i + d` (upper triangle) on diagonal `d`.
fn diagonal_lines(x: &BitSequence, n: usize, h: usize, d: usize, mut f: impl FnMut(LineTriple)) {
    let limit = n - d + h - 1;
    for_each_match_run(x, d, limit, |s, run| {
        if run >= h {
            let length = run - h + 1;
            f(LineTriple {
                i: s,
                j: s + d,
                length,
                boundary: Boundary {
                    zero: s == 0,
                    n: s + d + length == n,
                },
            });
        }
    });
}

/// Every diagonal line of `RP(x, n, 2^-h)` off the main diagonal, both
/// orientations, sorted.
pub fn extract_lines(x: &BitSequence, n: usize, h: usize) -> Result<Vec<LineTriple>> {
    check_nh(n, h)?;
    check_prefix(x, n + h - 1)?;
    let mut lines: Vec<LineTriple> = (1..n)
        .into_par_iter()
        .flat_map_iter(|d| {
            let mut out = Vec::new();
            diagonal_lines(x, n, h, d, |t| {
                out.push(t);
                out.push(t.transpose());
            });
            out
        })
        .collect();
    lines.sort_unstable();
    Ok(lines)
}

/// Line-length histogram of `RP(x, n, 2^-h)`. All lengths are recorded;
/// `l_min` is kept only as metadata for consumers.
pub fn histogram(x: &BitSequence, n: usize, h: usize, l_min: usize) -> Result<LineHistogram> {
    check_nh(n, h)?;
    if l_min == 0 {
        return Err(Error::InvalidArgument("l_min must be >= 1".into()));
    }
    check_prefix(x, n + h - 1)?;
    // line lengths are at most n - 1, so a dense table indexed by length
    let merged = (1..n)
        .into_par_iter()
        .fold(
            || vec![LineCounts::default(); n],
            |mut acc, d| {
                diagonal_lines(x, n, h, d, |t| acc[t.length].bump(t.boundary, 2));
                acc
            },
        )
        .reduce(
            || vec![LineCounts::default(); n],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(p, q)| p.add(q));
                a
            },
        );
    Ok(LineHistogram {
        n,
        h,
        counts: merged
            .into_iter()
            .enumerate()
            .filter(|(_, c)| c.total() > 0)
            .collect(),
    })
}

/// Number of off-diagonal ones in `RP(x, n, 2^-h)`.
pub fn recurrence_count(x: &BitSequence, n: usize, h: usize) -> Result<u128> {
    check_nh(n, h)?;
    check_prefix(x, n + h - 1)?;
    Ok((1..n)
        .into_par_iter()
        .map(|d| {
            let mut total = 0u128;
            diagonal_lines(x, n, h, d, |t| total += t.length as u128);
            2 * total
        })
        .sum())
}

/// `(l + h - 1, n + h - 1)`: an `l`-line at threshold `2^-h` is an
/// `(l+h-1)`-line of the plot of size `n+h-1` at threshold `1/2`.
pub fn reduce_eps(l: usize, n: usize, h: usize) -> (usize, usize) {
    (l + h - 1, n + h - 1)
}

/// `θ_{nh} = ((n+h-1)² - (n+h-1)) / (n² - n)`.
pub fn theta(n: usize, h: usize) -> Result<Rational> {
    if n < 2 || h == 0 {
        return Err(Error::InvalidArgument("theta needs n >= 2 and h >= 1".into()));
    }
    let big = BigInt::from(n + h - 1);
    let small = BigInt::from(n);
    Ok(Rational::new(
        &big * &big - &big,
        &small * &small - &small,
    ))
}

/// `ε' = 2^{-m+1} ε`.
pub fn reduce_embedding(m: usize, eps: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("embedding dimension m must be >= 1".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("ε = {eps} must lie in (0, 1)")));
    }
    Ok(eps * 0.5f64.powi(m as i32 - 1))
}

/// `h' = h + m - 1`, the dyadic form of [`reduce_embedding`].
pub fn embedded_h(m: usize, h: usize) -> usize {
    h + m - 1
}

/// `h = ⌈-log₂ ε⌉`, so that `ρ ≤ ε` iff `ρ ≤ 2^-h`.
pub fn quantize_eps(eps: f64) -> Result<usize> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidArgument(format!("ε = {eps} must be positive")));
    }
    if eps >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "ε = {eps} >= 1 makes every pair recurrent; choose ε < 1"
        )));
    }
    let h = (-eps.log2()).ceil();
    Ok((h as usize).max(1))
}

fn check_inner(x: &BitSequence, l: usize, n: usize) -> Result<()> {
    if l == 0 || n < 2 {
        return Err(Error::InvalidArgument("need l >= 1 and n >= 2".into()));
    }
    check_prefix(x, n + l)
}

/// `K_l ∩ [1, n)²`: starts `(i, j)` of inner `l`-lines of `RP(x, ∞, 1/2)`.
pub fn inner_line_starts(x: &BitSequence, l: usize, n: usize) -> Result<Vec<(usize, usize)>> {
    check_inner(x, l, n)?;
    let mut out: Vec<(usize, usize)> = (1..n - 1)
        .into_par_iter()
        .flat_map_iter(|d| {
            let mut v = Vec::new();
            for_each_match_run(x, d, n - d + l, |s, run| {
                if run == l && s >= 1 && s < n - d {
                    v.push((s, s + d));
                    v.push((s + d, s));
                }
            });
            v
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// `card(K_l ∩ [1, n)²)` for every `l ∈ [1, max_len]` in one scan; index 0
/// of the result is unused.
pub fn inner_line_length_counts(x: &BitSequence, n: usize, max_len: usize) -> Result<Vec<u64>> {
    check_inner(x, max_len.max(1), n)?;
    Ok((1..n - 1)
        .into_par_iter()
        .fold(
            || vec![0u64; max_len + 1],
            |mut acc, d| {
                for_each_match_run(x, d, n - d + max_len, |s, run| {
                    if run <= max_len && s >= 1 && s < n - d {
                        acc[run] += 2;
                    }
                });
                acc
            },
        )
        .reduce(
            || vec![0u64; max_len + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(p, q)| *p += q);
                a
            },
        ))
}

/// ASCII rendering, `#` for a recurrence, row 0 first.
pub fn render_ascii(x: &BitSequence, n: usize, h: usize) -> Result<String> {
    check_nh(n, h)?;
    check_prefix(x, n + h - 1)?;
    let mut out = String::with_capacity(n * (n + 1));
    for i in 0..n {
        for j in 0..n {
            out.push(if x.window_eq(i, j, h) { '#' } else { '.' });
        }
        out.push('\n');
    }
    Ok(out)
}

/// Binary PGM (P5), recurrences white (255).
pub fn render_pgm(x: &BitSequence, n: usize, h: usize) -> Result<Vec<u8>> {
    check_nh(n, h)?;
    check_prefix(x, n + h - 1)?;
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    out.reserve(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(if x.window_eq(i, j, h) { 255 } else { 0 });
        }
    }
    Ok(out)
}
