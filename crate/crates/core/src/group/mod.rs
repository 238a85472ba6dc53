//! The group `Γ = Z_2 * ... * Z_2 * Z * ... * Z` and its Cayley tree.

mod sphere;
mod word;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sphere::SphereIter;
pub use word::{Letter, Word};

/// Default bound on the number of words a single enumeration may produce.
pub const DEFAULT_MAX_CELLS: u64 = 10_000_000;

/// `s` involutive generators and `t` free generators, with `s + 2t = n + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPresentation")]
pub struct Presentation {
    s: u32,
    t: u32,
}

#[derive(Deserialize)]
struct RawPresentation {
    s: u32,
    t: u32,
}

impl TryFrom<RawPresentation> for Presentation {
    type Error = Error;

    fn try_from(raw: RawPresentation) -> Result<Self> {
        Presentation::new(raw.s, raw.t)
    }
}

impl Presentation {
    pub fn new(s: u32, t: u32) -> Result<Self> {
        if (s as u64) + 2 * (t as u64) < 3 {
            return Err(Error::InvalidPresentation { s, t });
        }
        Ok(Presentation { s, t })
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// Branching number `n = s + 2t - 1`.
    pub fn n(&self) -> u64 {
        self.s as u64 + 2 * self.t as u64 - 1
    }

    /// Tree degree `n + 1`.
    pub fn degree(&self) -> u64 {
        self.n() + 1
    }

    /// All `n + 1` letters in canonical order.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out: Vec<Letter> = (1..=self.s).map(Letter::a).collect();
        for j in 1..=self.t {
            out.push(Letter::b(j));
            out.push(Letter::b_inv(j));
        }
        out
    }

    /// The generators `a_1, ..., a_{s+t}` (no inverses).
    pub fn generators(&self) -> Vec<Letter> {
        (1..=self.s)
            .map(Letter::a)
            .chain((1..=self.t).map(Letter::b))
            .collect()
    }

    /// Letter for generator `a_i`, `i in [1, s + t]`, raised to `±1`.
    pub fn generator_letter(&self, i: u32, inverse: bool) -> Result<Letter> {
        if i >= 1 && i <= self.s {
            Ok(Letter::a(i))
        } else if i > self.s && i <= self.s + self.t {
            Ok(Letter::Free {
                index: i - self.s,
                inverse,
            })
        } else {
            Err(Error::InvalidGenerator(format!("a{i}")))
        }
    }

    pub fn check_letter(&self, l: Letter) -> Result<()> {
        let ok = match l {
            Letter::Involution(i) => i >= 1 && i <= self.s,
            Letter::Free { index, .. } => index >= 1 && index <= self.t,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidGenerator(l.to_string()))
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        w.iter().try_for_each(|&l| self.check_letter(l))
    }

    /// Validates and freely reduces a letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(&self, letters: I) -> Result<Word> {
        let letters: Vec<Letter> = letters.into_iter().collect();
        letters.iter().try_for_each(|&l| self.check_letter(l))?;
        Ok(Word::reduce(letters))
    }

    /// Parses a word and checks it against this presentation.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let w: Word = s.parse()?;
        // reduction may hide an invalid letter, so validate the raw tokens
        for tok in s.split_whitespace().filter(|t| *t != "e") {
            self.check_letter(tok.parse()?)?;
        }
        Ok(w)
    }

    /// Letters that may follow `last` in a reduced word, in canonical order.
    pub fn successors(&self, last: Option<Letter>) -> impl Iterator<Item = Letter> + '_ {
        let forbidden = last.map(Letter::inverse);
        self.letters()
            .into_iter()
            .filter(move |&l| Some(l) != forbidden)
    }

    /// `N_m = |V^m|`: `1` for `m = 0`, else `(n + 1) n^(m - 1)`.
    pub fn sphere_size(&self, m: usize) -> BigUint {
        if m == 0 {
            return BigUint::from(1u32);
        }
        BigUint::from(self.degree()) * num_traits::pow(BigUint::from(self.n()), m - 1)
    }

    /// `N_m` as a `u64` if it fits under `max_cells`.
    pub fn guarded_sphere_size(&self, m: usize, max_cells: u64) -> Result<u64> {
        let size = self.sphere_size(m);
        match u64::try_from(&size) {
            Ok(v) if v <= max_cells => Ok(v),
            _ => Err(Error::ResourceLimit(format!(
                "sphere of radius {m} has {size} words (bound {max_cells})"
            ))),
        }
    }

    /// Lazy lexicographic enumeration of `V^m`.
    pub fn sphere_iter(&self, m: usize) -> SphereIter {
        SphereIter::new(self, m)
    }

    /// All reduced words of length `m`, lexicographic in the canonical order.
    pub fn sphere(&self, m: usize) -> Result<Vec<Word>> {
        self.sphere_with_limit(m, DEFAULT_MAX_CELLS)
    }

    pub fn sphere_with_limit(&self, m: usize, max_cells: u64) -> Result<Vec<Word>> {
        let size = self.guarded_sphere_size(m, max_cells)?;
        let mut out = Vec::with_capacity(size as usize);
        out.extend(self.sphere_iter(m));
        Ok(out)
    }

    /// Transition matrix of the reduced-word subshift: rows and columns are the
    /// letters in canonical order, `A[u][v] = 1` iff `v != u^{-1}`.
    pub fn cuntz_krieger_matrix(&self) -> Vec<Vec<u8>> {
        let letters = self.letters();
        letters
            .iter()
            .map(|u| letters.iter().map(|v| u8::from(!u.cancels(*v))).collect())
            .collect()
    }
}
