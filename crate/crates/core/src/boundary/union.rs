use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Presentation, Word};
use crate::scalar::Scalar;

use super::{BoundaryPoint, Cylinder};

/// A finite union of cylinders in canonical form.
///
/// Canonical form is the set of maximal cylinders contained in the union: no
/// base is a prefix of another, and no complete family of siblings appears
/// (it is merged into the parent). Two unions denote the same set iff they
/// are structurally equal. Cylinders are kept sorted by depth, then
/// lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CylinderUnion {
    cylinders: Vec<Cylinder>,
}

impl CylinderUnion {
    pub fn empty() -> Self {
        CylinderUnion::default()
    }

    pub fn whole() -> Self {
        CylinderUnion {
            cylinders: vec![Cylinder::whole()],
        }
    }

    pub fn single(c: Cylinder) -> Self {
        CylinderUnion { cylinders: vec![c] }
    }

    pub fn new<I: IntoIterator<Item = Cylinder>>(cylinders: I, p: &Presentation) -> Self {
        let bases: BTreeSet<Word> = cylinders.into_iter().map(Cylinder::into_base).collect();
        Self::normalize(bases, p)
    }

    /// Parses a JSON array of word strings, e.g. `["a1 a2", "a3"]`.
    pub fn from_json(json: &str, p: &Presentation) -> Result<Self> {
        let raw: Vec<String> =
            serde_json::from_str(json).map_err(|e| Error::parse(json, e.to_string()))?;
        let words = raw
            .iter()
            .map(|s| p.parse_word(s).map(Cylinder::new))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(words, p))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("string array")
    }

    fn normalize(bases: BTreeSet<Word>, p: &Presentation) -> Self {
        // drop cylinders contained in another; lexicographic order puts every
        // extension of a kept base directly after it
        let mut kept: BTreeSet<Word> = BTreeSet::new();
        let mut last: Option<Word> = None;
        for b in bases {
            if last.as_ref().is_some_and(|l| l.is_prefix_of(&b)) {
                continue;
            }
            last = Some(b.clone());
            kept.insert(b);
        }

        // merge complete sibling families, deepest first
        loop {
            let mut families: BTreeMap<Word, usize> = BTreeMap::new();
            for b in kept.iter().filter(|b| !b.is_identity()) {
                *families.entry(b.prefix(b.len() - 1)).or_default() += 1;
            }
            let full: Vec<Word> = families
                .into_iter()
                .filter(|(parent, count)| {
                    let need = if parent.is_identity() {
                        p.degree()
                    } else {
                        p.n()
                    };
                    *count as u64 == need
                })
                .map(|(parent, _)| parent)
                .collect();
            if full.is_empty() {
                break;
            }
            for parent in full {
                for child in Cylinder::new(parent.clone()).children(p) {
                    kept.remove(child.base());
                }
                kept.insert(parent);
            }
        }

        let mut cylinders: Vec<Cylinder> = kept.into_iter().map(Cylinder::new).collect();
        cylinders.sort_by(|a, b| a.depth().cmp(&b.depth()).then_with(|| a.cmp(b)));
        CylinderUnion { cylinders }
    }

    /// Cylinders ordered by depth, then lexicographically.
    pub fn cylinders(&self) -> &[Cylinder] {
        &self.cylinders
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cylinders.len()
    }

    pub fn max_depth(&self) -> usize {
        self.cylinders
            .iter()
            .map(Cylinder::depth)
            .max()
            .unwrap_or(0)
    }

    /// Sum of the measures of the disjoint pieces.
    pub fn measure<T: Scalar>(&self, p: &Presentation) -> T {
        self.cylinders
            .iter()
            .fold(T::zero(), |acc, c| acc + c.measure::<T>(p))
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        self.cylinders.iter().any(|c| c.contains_word(w))
    }

    pub fn contains_point(&self, w: &BoundaryPoint) -> bool {
        self.cylinders.iter().any(|c| c.contains_point(w))
    }

    pub fn union(&self, other: &CylinderUnion, p: &Presentation) -> Self {
        Self::new(self.cylinders.iter().chain(&other.cylinders).cloned(), p)
    }

    pub fn intersection(&self, other: &CylinderUnion, p: &Presentation) -> Self {
        let mut out = Vec::new();
        for a in &self.cylinders {
            for b in &other.cylinders {
                if a.contains(b) {
                    out.push(b.clone());
                } else if b.contains(a) {
                    out.push(a.clone());
                }
            }
        }
        Self::new(out, p)
    }

    /// `self \ other`, splitting cylinders along the path to each removed one.
    pub fn difference(&self, other: &CylinderUnion, p: &Presentation) -> Self {
        let mut pieces: Vec<Cylinder> = self.cylinders.clone();
        for hole in &other.cylinders {
            pieces = pieces
                .into_iter()
                .flat_map(|piece| subtract(&piece, hole, p))
                .collect();
        }
        Self::new(pieces, p)
    }

    pub fn complement(&self, p: &Presentation) -> Self {
        CylinderUnion::whole().difference(self, p)
    }

    pub fn is_subset(&self, other: &CylinderUnion, p: &Presentation) -> bool {
        self.difference(other, p).is_empty()
    }

    pub fn is_disjoint(&self, other: &CylinderUnion, p: &Presentation) -> bool {
        self.intersection(other, p).is_empty()
    }
}

/// `piece \ hole` as disjoint cylinders.
fn subtract(piece: &Cylinder, hole: &Cylinder, p: &Presentation) -> Vec<Cylinder> {
    if hole.contains(piece) {
        return Vec::new();
    }
    if !piece.contains(hole) {
        return vec![piece.clone()];
    }
    let target = hole.base();
    let mut out = Vec::new();
    for k in piece.depth()..target.len() {
        let step = target.letters()[k];
        let node = Cylinder::new(target.prefix(k));
        out.extend(
            node.children(p)
                .into_iter()
                .filter(|c| c.base().last() != Some(step)),
        );
    }
    out
}

impl Serialize for CylinderUnion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.cylinders.iter().map(|c| c.base().to_string()))
    }
}

impl fmt::Display for CylinderUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;
    use num_traits::One;

    use super::*;

    fn p30() -> Presentation {
        Presentation::new(3, 0).unwrap()
    }

    fn u(p: &Presentation, json: &str) -> CylinderUnion {
        CylinderUnion::from_json(json, p).unwrap()
    }

    #[test]
    fn normalization_drops_nested_and_merges_siblings() {
        let p = p30();
        assert_eq!(u(&p, r#"["a1", "a1 a2", "a1 a3 a1"]"#), u(&p, r#"["a1"]"#));
        assert_eq!(u(&p, r#"["a1 a2", "a1 a3"]"#), u(&p, r#"["a1"]"#));
        assert_eq!(
            u(&p, r#"["a1", "a2", "a3 a1", "a3 a2"]"#),
            CylinderUnion::whole()
        );
        assert_eq!(u(&p, r#"["e"]"#), CylinderUnion::whole());
    }

    #[test]
    fn ordering_is_depth_then_lex() {
        let p = p30();
        let v = u(&p, r#"["a3 a1", "a2", "a1 a3 a2"]"#);
        let names: Vec<String> = v.cylinders().iter().map(|c| c.to_string()).collect();
        assert_eq!(names, vec!["a2", "a3 a1", "a1 a3 a2"]);
    }

    #[test]
    fn set_operations() {
        let p = p30();
        let a1 = u(&p, r#"["a1"]"#);
        let a12 = u(&p, r#"["a1 a2"]"#);
        assert_eq!(a1.difference(&a12, &p), u(&p, r#"["a1 a3"]"#));
        assert_eq!(a1.intersection(&a12, &p), a12);
        assert!(a12.is_subset(&a1, &p));
        assert!(!a1.is_subset(&a12, &p));
        assert_eq!(a1.complement(&p), u(&p, r#"["a2", "a3"]"#));
        let deep = u(&p, r#"["a1 a2 a3 a1"]"#);
        let rest = a1.difference(&deep, &p);
        assert_eq!(rest.len(), 3);
        assert_eq!(
            rest.measure::<BigRational>(&p) + deep.measure::<BigRational>(&p),
            a1.measure::<BigRational>(&p)
        );
        assert_eq!(
            a1.union(&a1.complement(&p), &p).measure::<BigRational>(&p),
            BigRational::one()
        );
    }

    #[test]
    fn json_round_trip_and_errors() {
        let p = p30();
        let v = u(&p, r#"["a1 a2", "a3"]"#);
        assert_eq!(v.to_json(), r#"["a3","a1 a2"]"#);
        assert!(CylinderUnion::from_json(r#"["a4"]"#, &p).is_err());
        assert!(CylinderUnion::from_json("not json", &p).is_err());
    }
}
