use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Letter, Word};

use super::Cylinder;

/// An eventually periodic boundary point `prefix · cycle · cycle · ...`.
///
/// Always stored normalized: the cycle is primitive and the prefix is as
/// short as possible, so structural equality is equality of infinite words.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryPoint {
    prefix: Word,
    cycle: Word,
}

impl BoundaryPoint {
    pub fn new(prefix: Word, cycle: Word) -> Result<Self> {
        let (Some(first), Some(last)) = (cycle.first(), cycle.last()) else {
            return Err(Error::parse("()", "cycle must be nonempty"));
        };
        if last.cancels(first) {
            return Err(Error::NotReduced(format!("({cycle}) repeated")));
        }
        if prefix.last().is_some_and(|l| l.cancels(first)) {
            return Err(Error::NotReduced(format!("{prefix} ({cycle})")));
        }
        Ok(Self::normalized(
            prefix.letters().to_vec(),
            cycle.letters().to_vec(),
        ))
    }

    /// The periodic point `cycle^∞`.
    pub fn periodic(cycle: Word) -> Result<Self> {
        Self::new(Word::identity(), cycle)
    }

    fn normalized(mut prefix: Vec<Letter>, cycle: Vec<Letter>) -> Self {
        let len = cycle.len();
        let period = (1..=len)
            .find(|&d| len.is_multiple_of(d) && (d..len).all(|i| cycle[i] == cycle[i - d]))
            .unwrap_or(len);
        let mut cycle: Vec<Letter> = cycle[..period].to_vec();
        while let (Some(&p), Some(&c)) = (prefix.last(), cycle.last()) {
            if p != c {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        BoundaryPoint {
            prefix: Word::from_reduced_unchecked(prefix),
            cycle: Word::from_reduced_unchecked(cycle),
        }
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn cycle(&self) -> &Word {
        &self.cycle
    }

    /// Letter at position `i` (0-based) of the infinite word.
    pub fn letter_at(&self, i: usize) -> Letter {
        let pl = self.prefix.len();
        if i < pl {
            self.prefix.letters()[i]
        } else {
            self.cycle.letters()[(i - pl) % self.cycle.len()]
        }
    }

    /// The first `m` letters.
    pub fn truncate(&self, m: usize) -> Word {
        Word::from_reduced_unchecked((0..m).map(|i| self.letter_at(i)).collect())
    }

    /// The unique depth-`m` cylinder containing this point.
    pub fn locate(&self, m: usize) -> Cylinder {
        Cylinder::new(self.truncate(m))
    }

    /// An equivalent (unnormalized) prefix of length at least `min_len`,
    /// obtained by unrolling whole cycles.
    pub(crate) fn unrolled_prefix(&self, min_len: usize) -> Vec<Letter> {
        let mut v = self.prefix.letters().to_vec();
        while v.len() < min_len {
            v.extend_from_slice(self.cycle.letters());
        }
        v
    }

    pub(crate) fn from_parts_unchecked(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Self {
        Self::normalized(prefix, cycle)
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_identity() {
            write!(f, "{} ", self.prefix)?;
        }
        write!(f, "({})", self.cycle)
    }
}

/// Parses `prefix (cycle)`, e.g. `a3 (a1 a2)` or `(b1)`.
impl FromStr for BoundaryPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::parse(s, "expected `prefix (cycle)`"))?;
        let inner = s[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| Error::parse(s, "missing closing parenthesis"))?;
        let head = s[..open].trim();
        let prefix_tokens: Vec<Letter> = head
            .split_whitespace()
            .filter(|t| *t != "e")
            .map(str::parse)
            .collect::<Result<_>>()?;
        let cycle_tokens: Vec<Letter> = inner
            .split_whitespace()
            .filter(|t| *t != "e")
            .map(str::parse)
            .collect::<Result<_>>()?;
        let prefix = Word::from_reduced(prefix_tokens)?;
        let cycle = Word::from_reduced(cycle_tokens)?;
        BoundaryPoint::new(prefix, cycle)
    }
}

impl Serialize for BoundaryPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BoundaryPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> BoundaryPoint {
        s.parse().unwrap()
    }

    #[test]
    fn locate_reads_periodic_word() {
        assert_eq!(pt("(a1 a2)").locate(3).to_string(), "a1 a2 a1");
        assert_eq!(pt("a3 (a1 a2)").locate(1).to_string(), "a3");
        let w = pt("b1 (b2 a1)");
        for m in 0..10 {
            assert!(w.locate(m).contains(&w.locate(m + 1)));
        }
    }

    #[test]
    fn normalization() {
        // a1 a2 a1 a2 ... with a redundant prefix and doubled cycle
        assert_eq!(pt("a1 a2 (a1 a2 a1 a2)"), pt("(a1 a2)"));
        assert_eq!(pt("a2 (a1 a2)"), pt("(a2 a1)"));
        assert_eq!(pt("a3 (a1 a2)").prefix().to_string(), "a3");
        assert_eq!(pt("(b1 b1)").cycle().to_string(), "b1");
        assert_eq!(pt("b1 (b1)"), pt("(b1)"));
    }

    #[test]
    fn rejects_unreduced_points() {
        assert!("(a1)".parse::<BoundaryPoint>().is_err());
        assert!("(b1 b1')".parse::<BoundaryPoint>().is_err());
        assert!("a1 (a1 a2)".parse::<BoundaryPoint>().is_err());
        assert!("b1' (b1)".parse::<BoundaryPoint>().is_err());
        assert!("()".parse::<BoundaryPoint>().is_err());
        assert!("a1 a2".parse::<BoundaryPoint>().is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["(a1 a2)", "a3 (a1 a2)", "b1' a1 (b2)"] {
            assert_eq!(pt(s).to_string(), s);
        }
    }
}
