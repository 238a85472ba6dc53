//! Letters and reduced words of the free product `Z_2 * ... * Z_2 * Z * ... * Z`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A generator or inverse generator.
///
/// The derived ordering is the canonical letter order
/// `a1 < ... < as < b1 < b1' < ... < bt < bt'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    /// `a<i>`, an order-two generator; its own inverse.
    Involution(u32),
    /// `b<j>` or `b<j>'`, an infinite-order generator or its inverse.
    Free { index: u32, inverse: bool },
}

impl Letter {
    pub fn a(i: u32) -> Self {
        Letter::Involution(i)
    }

    pub fn b(j: u32) -> Self {
        Letter::Free {
            index: j,
            inverse: false,
        }
    }

    pub fn b_inv(j: u32) -> Self {
        Letter::Free {
            index: j,
            inverse: true,
        }
    }

    pub fn inverse(self) -> Self {
        match self {
            Letter::Involution(_) => self,
            Letter::Free { index, inverse } => Letter::Free {
                index,
                inverse: !inverse,
            },
        }
    }

    pub fn is_involution(self) -> bool {
        matches!(self, Letter::Involution(_))
    }

    /// True when `self` followed by `next` cancels.
    #[inline]
    pub fn cancels(self, next: Letter) -> bool {
        self.inverse() == next
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Involution(i) => write!(f, "a{i}"),
            Letter::Free {
                index,
                inverse: false,
            } => write!(f, "b{index}"),
            Letter::Free {
                index,
                inverse: true,
            } => write!(f, "b{index}'"),
        }
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (body, primed) = match s.strip_suffix('\'') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let mut chars = body.chars();
        let kind = chars
            .next()
            .ok_or_else(|| Error::parse(s, "empty letter"))?;
        let index: u32 = chars
            .as_str()
            .parse()
            .map_err(|_| Error::parse(s, "expected a<i>, b<j> or b<j>'"))?;
        if index == 0 {
            return Err(Error::parse(s, "generator indices start at 1"));
        }
        match kind {
            // a_i^{-1} = a_i
            'a' => Ok(Letter::Involution(index)),
            'b' => Ok(Letter::Free {
                index,
                inverse: primed,
            }),
            _ => Err(Error::parse(s, "expected a<i>, b<j> or b<j>'")),
        }
    }
}

/// A reduced word; the empty word is the identity `e`.
///
/// Values are immutable once built and compare structurally, with the derived
/// ordering being lexicographic in the canonical letter order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Free reduction of an arbitrary letter sequence.
    ///
    /// Stack-based: each incoming letter either cancels the current top or is
    /// pushed. The free-product normal form is unique, so the result does not
    /// depend on the order in which cancellations are performed.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            match out.last() {
                Some(&top) if top.cancels(l) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word(out)
    }

    /// Accepts `letters` only if they already form a reduced word.
    pub fn from_reduced(letters: Vec<Letter>) -> Result<Self> {
        if letters.windows(2).any(|w| w[0].cancels(w[1])) {
            return Err(Error::NotReduced(Word(letters).to_string()));
        }
        Ok(Word(letters))
    }

    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| !w[0].cancels(w[1])));
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Product `self * other` in normal form.
    pub fn mul(&self, other: &Word) -> Self {
        let k = self.cancellation(other);
        let mut out = Vec::with_capacity(self.len() + other.len() - 2 * k);
        out.extend_from_slice(&self.0[..self.len() - k]);
        out.extend_from_slice(&other.0[k..]);
        Word(out)
    }

    /// Number of letters cancelled when forming `self * other`.
    pub fn cancellation(&self, other: &Word) -> usize {
        self.0
            .iter()
            .rev()
            .zip(other.0.iter())
            .take_while(|(a, b)| a.cancels(**b))
            .count()
    }

    /// Appends `l`, reducing if it cancels the last letter.
    pub fn push(&self, l: Letter) -> Self {
        let mut out = self.0.clone();
        match out.last() {
            Some(&top) if top.cancels(l) => {
                out.pop();
            }
            _ => out.push(l),
        }
        Word(out)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len.min(self.len())].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word(self.0[start.min(self.len())..].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// Concatenation `self * other`; `None` if the junction cancels.
    pub fn concat(&self, other: &Word) -> Option<Word> {
        match (self.last(), other.first()) {
            (Some(a), Some(b)) if a.cancels(b) => None,
            _ => {
                let mut v = self.0.clone();
                v.extend_from_slice(&other.0);
                Some(Word(v))
            }
        }
    }

    /// Splits `self = u * c * u^{-1}` with `c` cyclically reduced, returning
    /// `(u, c)`.
    pub fn cyclic_core(&self) -> (Word, Word) {
        let l = &self.0;
        let mut i = 0;
        while l.len() >= 2 * i + 2 && l[i].cancels(l[l.len() - 1 - i]) {
            i += 1;
        }
        (Word(l[..i].to_vec()), Word(l[i..l.len() - i].to_vec()))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Letter> {
        self.0.iter()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses the space-separated token form and reduces it.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Word::identity());
        }
        let letters = s
            .split_whitespace()
            .map(|tok| tok.parse::<Letter>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Word::reduce(letters))
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Letter;
    type IntoIter = std::slice::Iter<'a, Letter>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
