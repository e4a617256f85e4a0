//! Bit-packed binary sequences.
//!
//! Letter `i` is stored in bit `i % 64` of word `i / 64`. Bits at positions
//! `>= len` are always zero, which keeps derived equality, ordering and
//! hashing consistent with the logical content.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSequence {
    len: usize,
    words: Vec<u64>,
}

impl BitSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitSequence {
            len: 0,
            words: Vec::with_capacity(bits.div_ceil(64)),
        }
    }

    pub fn zeros(len: usize) -> Self {
        BitSequence {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Parse a string of `0`/`1` characters.
    pub fn from_str01(s: &str) -> Result<Self> {
        let mut seq = BitSequence::with_capacity(s.len());
        for (pos, c) in s.chars().enumerate() {
            match c {
                '0' => seq.push(false),
                '1' => seq.push(true),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "non-binary symbol {c:?} at position {pos} in {s:?}"
                    )))
                }
            }
        }
        Ok(seq)
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut seq = BitSequence::new();
        seq.extend(bits);
        seq
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let (w, b) = (self.len / 64, self.len % 64);
        if w == self.words.len() {
            self.words.push(0);
        }
        if bit {
            self.words[w] |= 1 << b;
        }
        self.len += 1;
    }

    /// Append `other` in full.
    pub fn append(&mut self, other: &BitSequence) {
        let shift = self.len % 64;
        if shift == 0 {
            self.words.truncate(self.len / 64);
            self.words.extend_from_slice(&other.words);
        } else {
            for &w in &other.words {
                *self.words.last_mut().unwrap() |= w << shift;
                self.words.push(w >> (64 - shift));
            }
        }
        self.len += other.len;
        self.words.truncate(self.len.div_ceil(64));
        self.clear_tail();
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn try_get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.get(i))
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// The 64 letters starting at `i`, letter `i` in bit 0. Positions past the
    /// end read as zero.
    #[inline]
    pub fn word_at(&self, i: usize) -> u64 {
        let (w, s) = (i / 64, i % 64);
        let lo = self.words.get(w).copied().unwrap_or(0);
        if s == 0 {
            return lo;
        }
        let hi = self.words.get(w + 1).copied().unwrap_or(0);
        (lo >> s) | (hi << (64 - s))
    }

    /// Letters `[i, i + len)` packed into a `u64`; `len <= 64`.
    #[inline]
    pub fn window(&self, i: usize, len: usize) -> u64 {
        debug_assert!(len <= 64);
        let w = self.word_at(i);
        if len == 64 {
            w
        } else {
            w & ((1u64 << len) - 1)
        }
    }

    /// Letters `[i, i + len)` packed into a `u128`; `len <= 128`.
    #[inline]
    pub fn window128(&self, i: usize, len: usize) -> u128 {
        debug_assert!(len <= 128);
        if len <= 64 {
            return self.window(i, len) as u128;
        }
        let lo = self.word_at(i) as u128;
        let hi = self.window(i + 64, len - 64) as u128;
        lo | (hi << 64)
    }

    /// `x[i..i+len) == x[j..j+len)` using word-at-a-time XOR.
    pub fn window_eq(&self, i: usize, j: usize, len: usize) -> bool {
        let mut off = 0;
        while off + 64 <= len {
            if self.word_at(i + off) != self.word_at(j + off) {
                return false;
            }
            off += 64;
        }
        let rest = len - off;
        rest == 0 || self.window(i + off, rest) == self.window(j + off, rest)
    }

    /// Copy of letters `[start, start + len)`.
    pub fn subsequence(&self, start: usize, len: usize) -> BitSequence {
        assert!(
            start + len <= self.len,
            "subsequence [{start}, {}) out of range for length {}",
            start + len,
            self.len
        );
        let mut words: Vec<u64> = (0..len.div_ceil(64))
            .map(|k| self.word_at(start + 64 * k))
            .collect();
        let r = len % 64;
        if r != 0 {
            *words.last_mut().unwrap() &= (1u64 << r) - 1;
        }
        BitSequence { len, words }
    }

    pub fn prefix(&self, len: usize) -> BitSequence {
        self.subsequence(0, len)
    }

    pub fn truncate(&mut self, len: usize) {
        if len < self.len {
            self.len = len;
            self.words.truncate(len.div_ceil(64));
            self.clear_tail();
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn is_prefix_of(&self, other: &BitSequence) -> bool {
        self.len <= other.len && other.window_eq_with(self, 0)
    }

    /// `other[start..start+self.len) == self`.
    fn window_eq_with(&self, pattern: &BitSequence, start: usize) -> bool {
        let mut off = 0;
        while off < pattern.len {
            let take = (pattern.len - off).min(64);
            if self.window(start + off, take) != pattern.window(off, take) {
                return false;
            }
            off += take;
        }
        true
    }

    /// Letter-swapped copy (every 0 becomes 1 and vice versa).
    pub fn complement(&self) -> BitSequence {
        let mut out = BitSequence {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    pub fn is_constant(&self) -> bool {
        let ones = self.count_ones();
        ones == 0 || ones == self.len
    }
}

impl Extend<bool> for BitSequence {
    fn extend<I: IntoIterator<Item = bool>>(&mut self, iter: I) {
        for b in iter {
            self.push(b);
        }
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitSequence({self})")
        } else {
            write!(f, "BitSequence(len={}, {}…)", self.len, self.prefix(64))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_window(bits: &[bool], i: usize, len: usize) -> u64 {
        (0..len).fold(0, |acc, k| acc | ((bits[i + k] as u64) << k))
    }

    #[test]
    fn push_get_and_display() {
        let s = BitSequence::from_str01("0110100110010110").unwrap();
        assert_eq!(s.len(), 16);
        assert!(!s.get(0) && s.get(1) && s.get(2) && !s.get(3));
        assert_eq!(s.to_string(), "0110100110010110");
        assert!(BitSequence::from_str01("01a").is_err());
    }

    #[test]
    fn windows_cross_word_boundaries() {
        let bits: Vec<bool> = (0..300).map(|i| (i * 7 + i / 3) % 5 < 2).collect();
        let s = BitSequence::from_bits(bits.iter().copied());
        for i in [0, 1, 31, 63, 64, 65, 100, 200] {
            for len in [1, 5, 33, 63, 64] {
                assert_eq!(s.window(i, len), naive_window(&bits, i, len), "i={i} len={len}");
            }
        }
        assert!(s.window_eq(3, 3, 200));
        let naive = |i: usize, j: usize, len: usize| (0..len).all(|k| bits[i + k] == bits[j + k]);
        for (i, j, len) in [(0, 5, 10), (2, 7, 70), (10, 15, 130), (0, 5, 0)] {
            assert_eq!(s.window_eq(i, j, len), naive(i, j, len));
        }
    }

    #[test]
    fn append_and_subsequence() {
        let a = BitSequence::from_str01(&"10".repeat(37)).unwrap();
        let b = BitSequence::from_str01(&"110".repeat(29)).unwrap();
        let mut c = a.clone();
        c.append(&b);
        assert_eq!(c.to_string(), format!("{a}{b}"));
        assert_eq!(c.subsequence(70, 20).to_string(), c.to_string()[70..90]);
        assert!(a.prefix(10).is_prefix_of(&c));
        assert_eq!(c.complement().complement(), c);
    }

    #[test]
    fn tail_bits_stay_clear() {
        let mut s = BitSequence::from_str01(&"1".repeat(70)).unwrap();
        s.truncate(65);
        assert_eq!(s.count_ones(), 65);
        assert_eq!(s, BitSequence::from_str01(&"1".repeat(65)).unwrap());
    }
}
