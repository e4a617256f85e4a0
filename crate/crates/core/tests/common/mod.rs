//! Naive reference implementations shared by the integration tests. Nothing
//! here calls into the scanning code of the library; sequences are plain
//! `Vec<u8>` and plots are dense matrices.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use subrqa::{BitSequence, Rational};

pub fn bits(x: &[u8]) -> BitSequence {
    BitSequence::from_bits(x.iter().map(|&b| b == 1))
}

pub fn to_vec(x: &BitSequence) -> Vec<u8> {
    x.iter().map(u8::from).collect()
}

pub fn frac(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

/// Iterate `images` on the letter 0 until at least `n` letters exist.
/// Requires `images[0][0] == 0`.
pub fn fixed_point(images: [&[u8]; 2], n: usize) -> Vec<u8> {
    assert_eq!(images[0][0], 0);
    let mut x = vec![0u8];
    while x.len() < n {
        x = x.iter().flat_map(|&a| images[a as usize].iter().copied()).collect();
    }
    x.truncate(n);
    x
}

pub fn parse_word(s: &str) -> Vec<u8> {
    s.bytes().map(|b| b - b'0').collect()
}

/// Dense `RP(x, n, 2^-h)`.
pub fn rp_matrix(x: &[u8], n: usize, h: usize) -> Vec<Vec<bool>> {
    (0..n)
        .map(|i| (0..n).map(|j| x[i..i + h] == x[j..j + h]).collect())
        .collect()
}

/// `(i, j, length, zero_boundary, n_boundary)` for every off-diagonal line,
/// found by walking each diagonal of the dense matrix.
pub type NaiveLine = (usize, usize, usize, bool, bool);

pub fn lines_of_matrix(rp: &[Vec<bool>]) -> Vec<NaiveLine> {
    let n = rp.len();
    let mut out = Vec::new();
    for i0 in 0..n {
        for j0 in 0..n {
            // start of a diagonal
            if i0 != 0 && j0 != 0 {
                continue;
            }
            if i0 == j0 {
                continue;
            }
            let mut k = 0;
            while i0 + k < n && j0 + k < n {
                if rp[i0 + k][j0 + k] {
                    let start = k;
                    while i0 + k < n && j0 + k < n && rp[i0 + k][j0 + k] {
                        k += 1;
                    }
                    let (i, j, len) = (i0 + start, j0 + start, k - start);
                    let zero = i == 0 || j == 0;
                    let far = i + len == n || j + len == n;
                    out.push((i, j, len, zero, far));
                } else {
                    k += 1;
                }
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn naive_lines(x: &[u8], n: usize, h: usize) -> Vec<NaiveLine> {
    lines_of_matrix(&rp_matrix(x, n, h))
}

/// `N_l` over all lines (boundary lines included).
pub fn naive_histogram(lines: &[NaiveLine]) -> BTreeMap<usize, u64> {
    let mut h = BTreeMap::new();
    for &(_, _, len, _, _) in lines {
        *h.entry(len).or_insert(0) += 1;
    }
    h
}

pub fn off_diagonal_ones(rp: &[Vec<bool>]) -> u64 {
    let mut c = 0;
    for (i, row) in rp.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if i != j && v {
                c += 1;
            }
        }
    }
    c
}

/// `RR_l` and `P_l` from a histogram over the `n² - n` off-diagonal cells.
pub fn naive_rr_p(hist: &BTreeMap<usize, u64>, n: usize, l: usize) -> (Rational, Rational) {
    let denom = BigInt::from(n * n - n);
    let mass: u64 = hist.iter().filter(|(&k, _)| k >= l).map(|(&k, &c)| k as u64 * c).sum();
    let count: u64 = hist.iter().filter(|(&k, _)| k >= l).map(|(_, &c)| c).sum();
    (
        Rational::new(BigInt::from(mass), denom.clone()),
        Rational::new(BigInt::from(count), denom),
    )
}

/// `C_l(x, n, 2^-h)` as a direct pair count with the Bowen metric.
pub fn naive_corsum(x: &[u8], n: usize, l: usize, h: usize) -> Rational {
    let rp = rp_matrix(x, n + l - 1, h);
    let mut c = 0u64;
    for i in 0..n {
        for j in 0..n {
            if (0..l).all(|k| rp[i + k][j + k]) {
                c += 1;
            }
        }
    }
    Rational::new(BigInt::from(c), BigInt::from(n * n))
}

/// Longest common prefix and suffix of the two images.
pub fn naive_alpha_beta(a: &[u8], b: &[u8]) -> (usize, usize) {
    let alpha = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let beta = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    (alpha, beta)
}

/// Residues mod `q` of the occurrences of each `len`-word in `x`.
pub fn occurrence_residues(x: &[u8], len: usize, q: usize) -> BTreeMap<Vec<u8>, BTreeSet<usize>> {
    let mut m: BTreeMap<Vec<u8>, BTreeSet<usize>> = BTreeMap::new();
    for i in 0..x.len() - len {
        m.entry(x[i..i + len].to_vec()).or_default().insert(i % q);
    }
    m
}

/// Smallest `L > alpha + beta` at which every allowed `L`-word has a single
/// residue in `x`, searched up to `max_len`.
pub fn naive_r(x: &[u8], q: usize, ab: usize, max_len: usize) -> Option<usize> {
    (ab + 1..=max_len).find(|&len| occurrence_residues(x, len, q).values().all(|r| r.len() == 1))
}

pub fn words_of(x: &[u8], len: usize) -> BTreeSet<Vec<u8>> {
    (0..=x.len() - len).map(|i| x[i..i + len].to_vec()).collect()
}

/// `K_l ∩ [1, n)²` straight from the definition on the infinite plot at
/// threshold 1/2: a maximal run of exactly `l` agreements, started after a
/// disagreement.
pub fn naive_k(x: &[u8], l: usize, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 1..n {
        for j in 1..n {
            if i == j || x[i - 1] == x[j - 1] {
                continue;
            }
            let run = (0..).take_while(|&k| j + k < x.len() && i + k < x.len() && x[i + k] == x[j + k]).count();
            if run == l {
                out.push((i, j));
            }
        }
    }
    out
}
