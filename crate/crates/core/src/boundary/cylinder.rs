use std::fmt;

use serde::{Deserialize, Serialize};

use crate::group::{Presentation, Word};
use crate::scalar::Scalar;

use super::BoundaryPoint;

/// The basic open set `Ω^x` of boundary words starting with `x`.
/// `Ω^e` is the whole boundary.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cylinder {
    base: Word,
}

impl Cylinder {
    pub fn new(base: Word) -> Self {
        Cylinder { base }
    }

    pub fn whole() -> Self {
        Cylinder::default()
    }

    pub fn base(&self) -> &Word {
        &self.base
    }

    pub fn into_base(self) -> Word {
        self.base
    }

    pub fn depth(&self) -> usize {
        self.base.len()
    }

    /// `ν(Ω^x) = 1/(n+1) · (1/n)^(|x|-1)`, and `ν(Ω) = 1`.
    pub fn measure<T: Scalar>(&self, p: &Presentation) -> T {
        cylinder_measure(p, self.depth())
    }

    pub fn contains(&self, other: &Cylinder) -> bool {
        self.base.is_prefix_of(&other.base)
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        self.base.is_prefix_of(w)
    }

    pub fn contains_point(&self, w: &BoundaryPoint) -> bool {
        w.truncate(self.depth()) == self.base
    }

    pub fn is_disjoint(&self, other: &Cylinder) -> bool {
        !self.contains(other) && !other.contains(self)
    }

    /// The cylinders one level down: `n + 1` under the root, `n` elsewhere.
    pub fn children(&self, p: &Presentation) -> Vec<Cylinder> {
        p.successors(self.base.last())
            .map(|l| {
                let mut v = self.base.letters().to_vec();
                v.push(l);
                Cylinder::new(Word::from_reduced_unchecked(v))
            })
            .collect()
    }

    /// All sub-cylinders at `depth` (or `self` if already that deep).
    pub fn refine(&self, p: &Presentation, depth: usize) -> Vec<Cylinder> {
        let mut level = vec![self.clone()];
        for _ in self.depth()..depth {
            level = level.iter().flat_map(|c| c.children(p)).collect();
        }
        level
    }
}

/// Measure of any cylinder of the given depth.
pub(crate) fn cylinder_measure<T: Scalar>(p: &Presentation, depth: usize) -> T {
    if depth == 0 {
        return T::one();
    }
    T::one() / (T::from_count(p.degree()) * T::powi(p.n(), depth as i64 - 1))
}

impl From<Word> for Cylinder {
    fn from(base: Word) -> Self {
        Cylinder::new(base)
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.base.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    use super::*;

    fn p30() -> Presentation {
        Presentation::new(3, 0).unwrap()
    }

    fn cyl(s: &str) -> Cylinder {
        Cylinder::new(s.parse().unwrap())
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn measure_formula() {
        let p = p30();
        assert_eq!(cyl("a1").measure::<BigRational>(&p), q(1, 3));
        assert_eq!(cyl("a1 a2").measure::<BigRational>(&p), q(1, 6));
        assert_eq!(
            Cylinder::whole().measure::<BigRational>(&p),
            BigRational::one()
        );
        let approx: f64 = cyl("a1 a2").measure(&p);
        assert!((approx - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn children_of_a1() {
        let p = p30();
        assert_eq!(cyl("a1").children(&p), vec![cyl("a1 a2"), cyl("a1 a3")]);
        let sum = cyl("a1")
            .children(&p)
            .iter()
            .fold(BigRational::zero(), |acc, c| {
                acc + c.measure::<BigRational>(&p)
            });
        assert_eq!(sum, q(1, 3));
    }

    #[test]
    fn children_of_root() {
        for (s, t) in [(3, 0), (0, 2), (1, 1)] {
            let p = Presentation::new(s, t).unwrap();
            assert_eq!(Cylinder::whole().children(&p).len() as u64, p.degree());
        }
    }

    #[test]
    fn free_children_skip_inverse() {
        let p = Presentation::new(0, 2).unwrap();
        let kids: Vec<String> = cyl("b1")
            .children(&p)
            .iter()
            .map(|c| c.to_string())
            .collect();
        assert_eq!(kids, vec!["b1 b1", "b1 b2", "b1 b2'"]);
    }

    #[test]
    fn refine_counts() {
        let p = p30();
        assert_eq!(Cylinder::whole().refine(&p, 3).len(), 12);
        assert_eq!(cyl("a1 a2").refine(&p, 1), vec![cyl("a1 a2")]);
    }
}
