//! Allowed words, recognizable words and the constants `α`, `β`, `c`, `K`,
//! `R`, `R0` of a primitive aperiodic substitution.
//!
//! Word sets are collected from fixed-point prefixes of length `n, 2n, 4n, …`
//! until two consecutive rounds agree.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::bits::BitSequence;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::substitution::{Substitution, SubstitutionKind, Word};

/// Default largest prefix used by the saturation protocol.
pub const DEFAULT_SATURATION_CAP: usize = 1 << 24;

/// Longest window handled by the packed-key scans.
pub const MAX_WINDOW: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecogConstants {
    pub q: usize,
    pub alpha: usize,
    pub beta: usize,
    #[serde(with = "rational::serde_rational")]
    pub c: Rational,
    /// Recognizability index.
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "R")]
    pub r: usize,
    #[serde(rename = "R0")]
    pub r0: usize,
}

impl RecogConstants {
    pub fn alpha_beta(&self) -> usize {
        self.alpha + self.beta
    }

    /// `(α+β)/(q−1)` as an integer, when it is one.
    pub fn c_integer(&self) -> Option<usize> {
        rational::exact_div(self.alpha_beta(), self.q - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSlice {
    pub length: usize,
    pub words: BTreeSet<Word>,
    pub saturated: bool,
    /// Prefix length at which the word set was confirmed.
    pub prefix_len: usize,
}

impl LanguageSlice {
    pub fn contains(&self, w: &Word) -> bool {
        self.words.contains(w)
    }
}

fn start_len(len: usize, q: usize) -> usize {
    (64 * len * q).max(1024)
}

fn require_primitive_aperiodic_normalized(s: &Substitution) -> Result<()> {
    let kind = s.classify().kind;
    if kind != SubstitutionKind::PrimitiveAperiodic {
        return Err(Error::NotPrimitiveAperiodic(format!("{s} is {kind:?}")));
    }
    if s.image(crate::Letter::Zero).get(0) {
        return Err(Error::InvalidArgument(format!(
            "{s} is not normalized: ζ(0) must start with 0"
        )));
    }
    Ok(())
}

fn check_window(len: usize) -> Result<()> {
    if len == 0 || len > MAX_WINDOW {
        return Err(Error::InvalidArgument(format!(
            "word length {len} outside the supported range [1, {MAX_WINDOW}]"
        )));
    }
    Ok(())
}

/// Residue mask (bit `p` set iff the word occurs at some `i ≡ p mod q`) of
/// every `len`-window of `x[0..n)`.
fn residue_masks(x: &BitSequence, n: usize, len: usize, q: usize) -> HashMap<u128, u128> {
    let mut map: HashMap<u128, u128> = HashMap::new();
    if n < len {
        return map;
    }
    for i in 0..=n - len {
        *map.entry(x.window128(i, len)).or_insert(0) |= 1u128 << (i % q);
    }
    map
}

/// Doubling protocol: returns the residue masks once two consecutive prefix
/// lengths give identical maps.
fn saturated_masks(
    s: &Substitution,
    len: usize,
    cap: usize,
) -> Result<(HashMap<u128, u128>, usize)> {
    check_window(len)?;
    let q = s.q();
    if q > 128 {
        return Err(Error::InvalidArgument(format!(
            "q = {q} exceeds the supported maximum of 128"
        )));
    }
    let mut n = start_len(len, q).min(cap);
    let mut prev = residue_masks(&s.fixed_point_prefix_with_cap(n, cap)?, n, len, q);
    while 2 * n <= cap {
        let x = s.fixed_point_prefix_with_cap(2 * n, cap)?;
        let next = residue_masks(&x, 2 * n, len, q);
        if next == prev {
            return Ok((next, 2 * n));
        }
        prev = next;
        n *= 2;
    }
    Err(Error::Saturation { length: len, cap })
}

fn key_to_word(key: u128, len: usize) -> Word {
    BitSequence::from_bits((0..len).map(|k| (key >> k) & 1 == 1))
}

/// All allowed words of length `len`.
pub fn language_slice(s: &Substitution, len: usize) -> Result<LanguageSlice> {
    language_slice_with_cap(s, len, DEFAULT_SATURATION_CAP)
}

pub fn language_slice_with_cap(s: &Substitution, len: usize, cap: usize) -> Result<LanguageSlice> {
    require_primitive_aperiodic_normalized(s)?;
    let (masks, prefix_len) = saturated_masks(s, len, cap)?;
    Ok(LanguageSlice {
        length: len,
        words: masks.keys().map(|&k| key_to_word(k, len)).collect(),
        saturated: true,
        prefix_len,
    })
}

/// `(α, β, c)`: longest common prefix and suffix of the two images.
pub fn alpha_beta(s: &Substitution) -> Result<(usize, usize, Rational)> {
    use crate::Letter::{One, Zero};
    let (z0, z1) = (s.image(Zero), s.image(One));
    if z0 == z1 {
        return Err(Error::InvalidArgument(format!(
            "{s}: ζ(0) == ζ(1), α and β are undefined"
        )));
    }
    let q = s.q();
    let alpha = (0..q).take_while(|&i| z0.get(i) == z1.get(i)).count();
    let beta = (0..q)
        .take_while(|&i| z0.get(q - 1 - i) == z1.get(q - 1 - i))
        .count();
    let c = Rational::new((alpha + beta).into(), (q - 1).into());
    Ok((alpha, beta, c))
}

fn occurs_at(x: &BitSequence, i: usize, w: &Word) -> bool {
    let mut off = 0;
    while off < w.len() {
        let take = (w.len() - off).min(64);
        if x.window(i + off, take) != w.window(off, take) {
            return false;
        }
        off += take;
    }
    true
}

fn occurrence_residues(x: &BitSequence, n: usize, w: &Word, q: usize) -> BTreeSet<usize> {
    if n < w.len() {
        return BTreeSet::new();
    }
    (0..=n - w.len())
        .filter(|&i| occurs_at(x, i, w))
        .map(|i| i % q)
        .collect()
}

/// The residue `p_w` shared by all occurrences of `w`, or `None` when `w`
/// occurs at two different residues mod `q`.
pub fn is_recognizable_word(s: &Substitution, w: &Word) -> Result<Option<usize>> {
    is_recognizable_word_with_cap(s, w, DEFAULT_SATURATION_CAP)
}

pub fn is_recognizable_word_with_cap(
    s: &Substitution,
    w: &Word,
    cap: usize,
) -> Result<Option<usize>> {
    require_primitive_aperiodic_normalized(s)?;
    if w.is_empty() {
        return Err(Error::InvalidArgument("the empty word has no residue".into()));
    }
    let q = s.q();
    let mut n = start_len(w.len(), q).min(cap);
    let mut prev = occurrence_residues(&s.fixed_point_prefix_with_cap(n, cap)?, n, w, q);
    loop {
        if 2 * n > cap {
            return Err(if prev.is_empty() {
                Error::WordNotFound {
                    word: w.to_string(),
                    cap,
                }
            } else {
                Error::Saturation {
                    length: w.len(),
                    cap,
                }
            });
        }
        let x = s.fixed_point_prefix_with_cap(2 * n, cap)?;
        let next = occurrence_residues(&x, 2 * n, w, q);
        n *= 2;
        if !next.is_empty() && next == prev {
            return Ok((next.len() == 1).then(|| *next.iter().next().unwrap()));
        }
        if next.len() > 1 {
            return Ok(None);
        }
        prev = next;
    }
}

fn all_recognizable(masks: &HashMap<u128, u128>) -> bool {
    masks.values().all(|m| m.count_ones() == 1)
}

/// Compute `α`, `β`, `c`, `K`, `R` and `R0`.
pub fn recognizability_constants(s: &Substitution) -> Result<RecogConstants> {
    recognizability_constants_with_cap(s, DEFAULT_SATURATION_CAP)
}

pub fn recognizability_constants_with_cap(s: &Substitution, cap: usize) -> Result<RecogConstants> {
    require_primitive_aperiodic_normalized(s)?;
    let q = s.q();
    let (alpha, beta, c) = alpha_beta(s)?;

    let mut r = alpha + beta + 1;
    loop {
        let (masks, _) = saturated_masks(s, r, cap)?;
        if all_recognizable(&masks) {
            break;
        }
        r += 1;
        if r > MAX_WINDOW {
            return Err(Error::Saturation { length: r, cap });
        }
    }

    // K: windows of length K+1 read at cut points occur only at cut points
    let mut k = 1;
    loop {
        let (masks, _) = saturated_masks(s, k + 1, cap)?;
        if masks.values().all(|&m| m & 1 == 0 || m == 1) {
            break;
        }
        k += 1;
        if k + 1 > MAX_WINDOW {
            return Err(Error::Saturation { length: k + 1, cap });
        }
    }

    let r0 = (1..)
        .find(|&r0| r0 * q + alpha + beta >= r)
        .expect("unbounded search");

    if !(k + 1 <= r && r <= k + q) {
        return Err(Error::Inconsistent(format!(
            "{s}: K = {k}, R = {r} violate K+1 <= R <= K+q"
        )));
    }
    Ok(RecogConstants {
        q,
        alpha,
        beta,
        c,
        k,
        r,
        r0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn words(v: &[&str]) -> BTreeSet<Word> {
        v.iter().map(|s| BitSequence::from_str01(s).unwrap()).collect()
    }

    fn q5() -> Substitution {
        Substitution::parse("0->01110,1->01010").unwrap()
    }

    #[test]
    fn language_slices() {
        let tm = Substitution::thue_morse();
        let pd = Substitution::period_doubling();
        assert_eq!(language_slice(&tm, 1).unwrap().words, words(&["0", "1"]));
        assert_eq!(
            language_slice(&tm, 2).unwrap().words,
            words(&["00", "01", "10", "11"])
        );
        let pd2 = language_slice(&pd, 2).unwrap();
        assert!(pd2.saturated);
        assert_eq!(pd2.words, words(&["00", "01", "10"]));
        // TM has 6 factors of length 3 (no 000, 111)
        assert_eq!(language_slice(&tm, 3).unwrap().words.len(), 6);
    }

    #[test]
    fn alpha_beta_examples() {
        assert_eq!(alpha_beta(&Substitution::thue_morse()).unwrap(), (0, 0, ratio(0, 1)));
        assert_eq!(
            alpha_beta(&Substitution::period_doubling()).unwrap(),
            (1, 0, ratio(1, 1))
        );
        assert_eq!(alpha_beta(&q5()).unwrap(), (2, 2, ratio(1, 1)));
    }

    #[test]
    fn recognizable_words() {
        let tm = Substitution::thue_morse();
        let w = |s: &str| BitSequence::from_str01(s).unwrap();
        assert!(is_recognizable_word(&tm, &w("0110")).unwrap().is_some());
        assert_eq!(is_recognizable_word(&tm, &w("01")).unwrap(), None);
        assert!(matches!(
            is_recognizable_word_with_cap(&tm, &w("000"), 1 << 14),
            Err(Error::WordNotFound { .. })
        ));
        let pd = Substitution::period_doubling();
        for word in language_slice(&pd, 3).unwrap().words {
            assert!(is_recognizable_word(&pd, &word).unwrap().is_some(), "{word}");
        }
    }

    #[test]
    fn golden_constants() {
        let tm = recognizability_constants(&Substitution::thue_morse()).unwrap();
        assert_eq!((tm.r, tm.r0), (4, 2));
        let pd = recognizability_constants(&Substitution::period_doubling()).unwrap();
        assert_eq!((pd.r, pd.r0), (3, 1));
        let c5 = recognizability_constants(&q5()).unwrap();
        assert_eq!((c5.r, c5.r0, c5.alpha, c5.beta), (5, 1, 2, 2));
        for c in [&tm, &pd, &c5] {
            assert!(c.k + 1 <= c.r && c.r <= c.k + c.q);
        }
    }

    #[test]
    fn rejects_non_aperiodic_inputs() {
        let periodic = Substitution::parse("0->010,1->101").unwrap();
        assert!(matches!(
            recognizability_constants(&periodic),
            Err(Error::NotPrimitiveAperiodic(_))
        ));
        let unnormalized = Substitution::parse("0->10,1->01").unwrap();
        assert!(recognizability_constants(&unnormalized).is_err());
    }
}
