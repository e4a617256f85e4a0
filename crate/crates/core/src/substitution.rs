//! Binary substitutions of constant length: words, iterates, fixed points
//! and classification.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitSequence;
use crate::error::{Error, Result};

/// Default cap on the number of letters produced by `iterate` and
/// `fixed_point_prefix`.
pub const DEFAULT_SIZE_CAP: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
}

impl Letter {
    pub fn from_bit(bit: bool) -> Letter {
        if bit {
            Letter::One
        } else {
            Letter::Zero
        }
    }

    pub fn bit(self) -> bool {
        self == Letter::One
    }

    pub fn flip(self) -> Letter {
        Letter::from_bit(!self.bit())
    }

    pub fn index(self) -> usize {
        self.bit() as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.bit() { "1" } else { "0" })
    }
}

/// Finite words are stored bit-packed, exactly like sequence prefixes.
pub type Word = BitSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubstitutionKind {
    PrimitiveAperiodic,
    PrimitivePeriodic,
    NonPrimitiveProximal,
    NonPrimitiveTrivial,
}

impl SubstitutionKind {
    pub fn is_primitive(self) -> bool {
        matches!(
            self,
            SubstitutionKind::PrimitiveAperiodic | SubstitutionKind::PrimitivePeriodic
        )
    }
}

/// How a primitive substitution was brought into the form `ζ(0) = 0…`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Identity,
    LetterSwap,
    Square,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: SubstitutionKind,
    pub normalization: Normalization,
    /// For the proximal case, the letter `a` with `ζ(a) = a^q`.
    pub absorbing_letter: Option<Letter>,
}

/// A substitution `ζ` on `{0, 1}` with `|ζ(0)| = |ζ(1)| = q ≥ 2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Substitution {
    images: [Word; 2],
}

impl Substitution {
    pub fn new(image0: Word, image1: Word) -> Result<Self> {
        if image0.len() != image1.len() {
            return Err(Error::InvalidArgument(format!(
                "images have different lengths {} and {}",
                image0.len(),
                image1.len()
            )));
        }
        if image0.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "image length q = {} but q >= 2 is required",
                image0.len()
            )));
        }
        Ok(Substitution {
            images: [image0, image1],
        })
    }

    pub fn from_images(image0: &str, image1: &str) -> Result<Self> {
        Substitution::new(BitSequence::from_str01(image0)?, BitSequence::from_str01(image1)?)
    }

    /// Parse the text form `0->01,1->10` (whitespace is ignored; the two
    /// rules may appear in either order).
    pub fn parse(input: &str) -> Result<Self> {
        let err = |position: usize, reason: &str| Error::Parse {
            input: input.to_string(),
            position,
            reason: reason.to_string(),
        };
        let mut images: [Option<Word>; 2] = [None, None];
        let mut offset = 0;
        for rule in input.split(',') {
            let rule_start = offset;
            offset += rule.len() + 1;
            let compact: String = rule.chars().filter(|c| !c.is_whitespace()).collect();
            let Some((lhs, rhs)) = compact.split_once("->") else {
                return Err(err(rule_start, "expected a rule of the form `a->word`"));
            };
            let letter = match lhs {
                "0" => 0,
                "1" => 1,
                _ => return Err(err(rule_start, "left-hand side must be `0` or `1`")),
            };
            if images[letter].is_some() {
                return Err(err(rule_start, "letter defined twice"));
            }
            if rhs.is_empty() {
                return Err(err(rule_start, "empty image"));
            }
            if rhs.contains(|c| c != '0' && c != '1') {
                let arrow = rule.find("->").map_or(0, |p| p + 2);
                let bad = rule[arrow..]
                    .char_indices()
                    .find(|&(_, c)| !c.is_whitespace() && c != '0' && c != '1')
                    .map_or(0, |(i, _)| i);
                return Err(err(rule_start + arrow + bad, "image must be over {0, 1}"));
            }
            images[letter] = Some(BitSequence::from_str01(rhs)?);
        }
        let [Some(image0), Some(image1)] = images else {
            return Err(err(input.len(), "both `0->…` and `1->…` are required"));
        };
        if image0.len() != image1.len() {
            return Err(err(input.len(), "images must have equal length"));
        }
        if image0.len() < 2 {
            return Err(err(input.len(), "image length must be at least 2"));
        }
        Substitution::new(image0, image1)
    }

    pub fn thue_morse() -> Self {
        Substitution::from_images("01", "10").unwrap()
    }

    pub fn period_doubling() -> Self {
        Substitution::from_images("01", "00").unwrap()
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.images[0].len()
    }

    #[inline]
    pub fn image(&self, a: Letter) -> &Word {
        &self.images[a.index()]
    }

    /// `ζ(w) = ζ(w_0) ζ(w_1) … ζ(w_{l-1})`.
    pub fn apply(&self, w: &Word) -> Word {
        let mut out = BitSequence::with_capacity(w.len() * self.q());
        for bit in w.iter() {
            out.append(&self.images[bit as usize]);
        }
        out
    }

    /// `ζ^k(a)` with the default size cap.
    pub fn iterate(&self, a: Letter, k: u32) -> Result<Word> {
        self.iterate_with_cap(a, k, DEFAULT_SIZE_CAP)
    }

    pub fn iterate_with_cap(&self, a: Letter, k: u32, cap: usize) -> Result<Word> {
        let size = (self.q() as u128).checked_pow(k).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::SizeCap {
                requested: usize::try_from(size).unwrap_or(usize::MAX),
                cap,
            });
        }
        let mut w = BitSequence::from_bits([a.bit()]);
        for _ in 0..k {
            w = self.apply(&w);
        }
        Ok(w)
    }

    /// `ζ ∘ ζ`.
    pub fn square(&self) -> Substitution {
        Substitution {
            images: [
                self.apply(&self.images[0]),
                self.apply(&self.images[1]),
            ],
        }
    }

    /// Relabel `0 ↔ 1`: `ζ'(a) = swap(ζ(swap(a)))`.
    pub fn swap_letters(&self) -> Substitution {
        Substitution {
            images: [self.images[1].complement(), self.images[0].complement()],
        }
    }

    fn starts_with(w: &Word, a: Letter) -> bool {
        w.get(0) == a.bit()
    }

    /// Both `ζ²(0)` and `ζ²(1)` contain both letters (the primitivity index of
    /// a 2×2 non-negative matrix is at most 2).
    pub fn is_primitive(&self) -> bool {
        let sq = self.square();
        sq.images.iter().all(|w| !w.is_constant())
    }

    /// Bring a primitive substitution into the form `ζ(0) = 0…`.
    pub fn normalize(&self) -> (Substitution, Normalization) {
        if Self::starts_with(&self.images[0], Letter::Zero) {
            (self.clone(), Normalization::Identity)
        } else if Self::starts_with(&self.images[1], Letter::One) {
            (self.swap_letters(), Normalization::LetterSwap)
        } else {
            (self.square(), Normalization::Square)
        }
    }

    pub fn fixed_point_prefix(&self, n: usize) -> Result<BitSequence> {
        self.fixed_point_prefix_with_cap(n, DEFAULT_SIZE_CAP)
    }

    /// First `n` letters of `x = ζ^∞(0)`. Requires `ζ(0)` to start with `0`.
    pub fn fixed_point_prefix_with_cap(&self, n: usize, cap: usize) -> Result<BitSequence> {
        if !Self::starts_with(&self.images[0], Letter::Zero) {
            return Err(Error::InvalidArgument(format!(
                "ζ(0) = {} does not start with 0; normalize first",
                self.images[0]
            )));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("prefix length must be >= 1".into()));
        }
        if n > cap {
            return Err(Error::SizeCap { requested: n, cap });
        }
        let q = self.q();
        let mut x = BitSequence::with_capacity(n + q);
        x.append(&self.images[0]);
        // x = ζ(x): block p of the fixed point is the image of letter p
        let mut p = 1;
        while x.len() < n {
            let letter = x.get(p);
            x.append(&self.images[letter as usize]);
            p += 1;
        }
        x.truncate(n);
        Ok(x)
    }

    /// Aperiodicity test for a normalized primitive substitution.
    fn passes_aperiodicity_conditions(&self) -> bool {
        let [z0, z1] = &self.images;
        let q = self.q();
        let starts_ok = Self::starts_with(z0, Letter::Zero) && z0.count_ones() > 0;
        let distinct = z0 != z1 && z1.count_ones() < q;
        let excluded = q % 2 == 1 && {
            let alt0 = BitSequence::from_bits((0..q).map(|i| i % 2 == 1));
            let alt1 = BitSequence::from_bits((0..q).map(|i| i % 2 == 0));
            *z0 == alt0 && *z1 == alt1
        };
        starts_ok && distinct && !excluded
    }

    pub fn classify(&self) -> Classification {
        if self.is_primitive() {
            let (norm, tag) = self.normalize();
            let kind = if norm.passes_aperiodicity_conditions() {
                SubstitutionKind::PrimitiveAperiodic
            } else {
                SubstitutionKind::PrimitivePeriodic
            };
            return Classification {
                kind,
                normalization: tag,
                absorbing_letter: None,
            };
        }
        if self.images.iter().all(|w| w.is_constant()) {
            return Classification {
                kind: SubstitutionKind::NonPrimitiveTrivial,
                normalization: Normalization::Identity,
                absorbing_letter: None,
            };
        }
        // non-primitive with a non-constant image: some ζ(a) = a^q
        let absorbing = [Letter::Zero, Letter::One]
            .into_iter()
            .find(|&a| {
                let w = self.image(a);
                w.is_constant() && w.get(0) == a.bit()
            })
            .expect("a non-primitive substitution with a non-constant image fixes a constant word");
        Classification {
            kind: SubstitutionKind::NonPrimitiveProximal,
            normalization: Normalization::Identity,
            absorbing_letter: Some(absorbing),
        }
    }

    /// Smallest period of the fixed point of a normalized periodic
    /// substitution, found by scanning a prefix of length `scan`.
    pub fn fixed_point_period(&self, scan: usize) -> Result<usize> {
        let x = self.fixed_point_prefix(scan)?;
        (1..=scan / 2)
            .find(|&p| x.window_eq(0, p, scan - p))
            .ok_or_else(|| {
                Error::InvalidArgument(format!("no period found within a prefix of {scan} letters"))
            })
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0->{},1->{}", self.images[0], self.images[1])
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Substitution({self})")
    }
}

impl Serialize for Substitution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Substitution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Substitution::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for Substitution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Substitution::parse(s)
    }
}
