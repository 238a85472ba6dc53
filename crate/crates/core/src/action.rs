//! Left action of `Γ` on the boundary and its Radon–Nikodym cocycle.
//!
//! Convention: for a group element `g` and a cylinder `Ω^y` on which it is
//! constant, the derivative `d(ν∘g)/dν` is `ν(gΩ^y) / ν(Ω^y)`, using
//! `(ν∘g)(E) = ν(gE)`. With `|y| > |g|` this equals `n^(|y| - |gy|)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::boundary::{BoundaryPoint, Cylinder, CylinderUnion};
use crate::error::{Error, Result};
use crate::group::{Presentation, Word, DEFAULT_MAX_CELLS};
use crate::scalar::Scalar;

/// `g · ω`.
///
/// The prefix of `ω` is unrolled past `|g|` so that cancellation never
/// reaches the repeating part.
pub fn act_point(g: &Word, w: &BoundaryPoint) -> BoundaryPoint {
    if g.is_identity() {
        return w.clone();
    }
    let unrolled = Word::from_reduced_unchecked(w.unrolled_prefix(g.len() + 1));
    let prefix = g.mul(&unrolled);
    BoundaryPoint::from_parts_unchecked(prefix.letters().to_vec(), w.cycle().letters().to_vec())
}

/// `g · Ω^x` as a canonical cylinder union.
///
/// A cylinder whose base survives cancellation against `g` maps onto a single
/// cylinder; otherwise it is split into children and each is mapped, which
/// terminates once the depth exceeds `|g|`.
pub fn act_cylinder(g: &Word, c: &Cylinder, p: &Presentation) -> CylinderUnion {
    let mut out = Vec::new();
    let mut stack = vec![c.clone()];
    while let Some(c) = stack.pop() {
        match translate_cylinder(g, &c) {
            Some(image) => out.push(image),
            None => stack.extend(c.children(p)),
        }
    }
    CylinderUnion::new(out, p)
}

/// `g · U` for a cylinder union.
pub fn act_union(g: &Word, u: &CylinderUnion, p: &Presentation) -> CylinderUnion {
    let mut out = Vec::new();
    for c in u.cylinders() {
        out.extend(act_cylinder(g, c, p).cylinders().iter().cloned());
    }
    CylinderUnion::new(out, p)
}

/// `Some(Ω^{gx})` when `g` maps `Ω^x` onto a single cylinder, i.e. when the
/// cancellation between `g` and `x` stops short of consuming all of `x`.
pub fn translate_cylinder(g: &Word, c: &Cylinder) -> Option<Cylinder> {
    let x = c.base();
    let k = g.cancellation(x);
    (k < x.len() || g.is_identity()).then(|| Cylinder::new(g.mul(x)))
}

/// Exponent `k` with `d(ν∘g)/dν ≡ n^k` on `c`, if the derivative is constant
/// there via a single-cylinder image.
pub fn rn_exponent(g: &Word, c: &Cylinder) -> Option<i64> {
    translate_cylinder(g, c).map(|img| c.depth() as i64 - img.depth() as i64)
}

/// The derivative of `g` on `c` as a scalar, when constant there.
pub fn rn_value<T: Scalar>(g: &Word, c: &Cylinder, p: &Presentation) -> Option<T> {
    rn_exponent(g, c).map(|k| T::powi(p.n(), k))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RnCell<T> {
    pub cell: Cylinder,
    pub exponent: i64,
    #[serde(skip)]
    pub value: T,
}

/// Piecewise-constant Radon–Nikodym derivative of one group element over
/// the depth-`m` partition of `Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct RnTable<T> {
    pub element: Word,
    pub depth: usize,
    pub n: u64,
    pub cells: Vec<RnCell<T>>,
}

impl<T: Scalar> RnTable<T> {
    /// Needs `depth > |g|`; cells appear in sphere order.
    pub fn build(g: &Word, depth: usize, p: &Presentation) -> Result<Self> {
        Self::build_with_limit(g, depth, p, DEFAULT_MAX_CELLS)
    }

    pub fn build_with_limit(
        g: &Word,
        depth: usize,
        p: &Presentation,
        max_cells: u64,
    ) -> Result<Self> {
        p.check_word(g)?;
        if depth <= g.len() {
            return Err(Error::DepthTooSmall {
                depth,
                required: g.len(),
            });
        }
        p.guarded_sphere_size(depth, max_cells)?;
        let cells = p
            .sphere_iter(depth)
            .map(|y| {
                let cell = Cylinder::new(y);
                let exponent = rn_exponent(g, &cell).expect("depth exceeds |g|");
                RnCell {
                    value: T::powi(p.n(), exponent),
                    exponent,
                    cell,
                }
            })
            .collect();
        Ok(RnTable {
            element: g.clone(),
            depth,
            n: p.n(),
            cells,
        })
    }

    /// Value on the cell containing the word `w` (`|w| >= depth`).
    pub fn value_at(&self, w: &Word) -> Option<&T> {
        let key = w.prefix(self.depth);
        self.cells
            .binary_search_by(|c| c.cell.base().cmp(&key))
            .ok()
            .map(|i| &self.cells[i].value)
    }

    pub fn exponents(&self) -> BTreeSet<i64> {
        self.cells.iter().map(|c| c.exponent).collect()
    }

    /// The cells grouped by exponent: `{k: set where the derivative is n^k}`.
    pub fn level_sets(&self, p: &Presentation) -> BTreeMap<i64, CylinderUnion> {
        let mut groups: BTreeMap<i64, Vec<Cylinder>> = BTreeMap::new();
        for c in &self.cells {
            groups.entry(c.exponent).or_default().push(c.cell.clone());
        }
        groups
            .into_iter()
            .map(|(k, cells)| (k, CylinderUnion::new(cells, p)))
            .collect()
    }

    /// Cells lying inside `c`.
    pub fn restricted_to<'a>(&'a self, c: &'a Cylinder) -> impl Iterator<Item = &'a RnCell<T>> {
        self.cells.iter().filter(move |cell| c.contains(&cell.cell))
    }
}

impl RnTable<crate::Exact> {
    /// `[{cell, value: "p/q", exponent}]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.cells
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "cell": c.cell.base().to_string(),
                        "value": crate::scalar::fraction_string(&c.value),
                        "exponent": c.exponent,
                    })
                })
                .collect(),
        )
    }
}

/// Boundary fixed points of `g ≠ e` among eventually periodic points.
///
/// Writing `g = u c u⁻¹` with `c` cyclically reduced, the fixed points are
/// `u c c c ...` and `u c⁻¹ c⁻¹ ...`. When `c` is a single involutive letter,
/// `g` is an edge inversion of the tree and has no boundary fixed points.
pub fn fixed_points(g: &Word) -> Result<BTreeSet<BoundaryPoint>> {
    if g.is_identity() {
        return Err(Error::IdentityElement);
    }
    let (u, core) = g.cyclic_core();
    let mut out = BTreeSet::new();
    if core.len() == 1 && core.first().is_some_and(|l| l.is_involution()) {
        return Ok(out);
    }
    out.insert(BoundaryPoint::new(u.clone(), core.clone())?);
    out.insert(BoundaryPoint::new(u, core.inverse())?);
    Ok(out)
}

/// Upper bound `Σ ν(locate(p, depth))` on the measure of a finite point set.
/// It decays like `n^-depth`, so the set is null.
pub fn point_set_measure_bound<T: Scalar>(
    points: &BTreeSet<BoundaryPoint>,
    depth: usize,
    p: &Presentation,
) -> T {
    points
        .iter()
        .fold(T::zero(), |acc, w| acc + w.locate(depth).measure::<T>(p))
}
