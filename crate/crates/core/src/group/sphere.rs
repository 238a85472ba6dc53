use super::{Letter, Presentation, Word};

/// Depth-first, lexicographic enumeration of the reduced words of one length.
///
/// Keeps an odometer of letter positions so each word costs `O(m)` amortised
/// and nothing beyond the current word is held in memory.
pub struct SphereIter {
    letters: Vec<Letter>,
    // index of the forbidden successor of each letter
    forbid: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl SphereIter {
    pub(super) fn new(p: &Presentation, m: usize) -> Self {
        let letters = p.letters();
        let forbid = letters
            .iter()
            .map(|l| letters.iter().position(|x| *x == l.inverse()).unwrap())
            .collect();
        let mut it = SphereIter {
            letters,
            forbid,
            digits: vec![0; m],
            done: false,
        };
        // first valid word: smallest allowed letter at each position
        for i in 1..m {
            it.digits[i] = it.smallest_after(it.digits[i - 1], 0).unwrap();
        }
        it
    }

    fn smallest_after(&self, prev: usize, from: usize) -> Option<usize> {
        (from..self.letters.len()).find(|&d| d != self.forbid[prev])
    }

    fn advance(&mut self) {
        let m = self.digits.len();
        let mut pos = m;
        loop {
            if pos == 0 {
                self.done = true;
                return;
            }
            pos -= 1;
            let next = if pos == 0 {
                let d = self.digits[0] + 1;
                (d < self.letters.len()).then_some(d)
            } else {
                self.smallest_after(self.digits[pos - 1], self.digits[pos] + 1)
            };
            if let Some(d) = next {
                self.digits[pos] = d;
                for i in pos + 1..m {
                    self.digits[i] = self.smallest_after(self.digits[i - 1], 0).unwrap();
                }
                return;
            }
        }
    }
}

impl Iterator for SphereIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let w =
            Word::from_reduced_unchecked(self.digits.iter().map(|&d| self.letters[d]).collect());
        self.advance();
        Some(w)
    }
}
