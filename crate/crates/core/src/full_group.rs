//! Measure-preserving involutions `k_{x,y}` of the boundary, built as
//! piecewise left translations, and the transitivity test that certifies the
//! group they generate acts ergodically.
//!
//! For `|x| = |y| = m` with last letters `a = x_m`, `b = y_m`, `a ≠ b`, step
//! `j` translates the cylinders `Ω^{x w_{j-1} z}` onto `Ω^{y v_{j-1} z}` by the
//! element `y v_{j-1} w_{j-1}⁻¹ x⁻¹`, where
//!
//! ```text
//! w = b⁻¹ a b⁻¹ a ...      (residual path on the x side)
//! v = a⁻¹ b a⁻¹ b ...      (residual path on the y side)
//! ```
//!
//! and `z` ranges over the successors outside `{a⁻¹, b⁻¹}` at odd steps and
//! outside `{a, b}` at even steps. After step `j` the uncovered part of `Ω^x`
//! is the single cylinder `Ω^{x w_j}`, shrinking by `1/n` per step; the
//! leftover point `x (b⁻¹ a)^∞` is sent to `y (a⁻¹ b)^∞`. When `a = b` the
//! first step already covers `Ω^x`. On `Ω^y` the map is the inverse, so
//! `k_{x,y}` is an involution.

use num_traits::Zero;
use serde::Serialize;

use crate::action::{act_cylinder, act_point, translate_cylinder};
use crate::boundary::{cylinder_measure, BoundaryPoint, Cylinder, CylinderUnion};
use crate::error::{Error, Result};
use crate::group::{Letter, Presentation, Word};
use crate::scalar::fraction_string;
use crate::Exact;

/// Steps materialized when none are requested.
pub const DEFAULT_MAX_STEP: usize = 32;

/// One translation piece: `element · domain = image`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub domain: Cylinder,
    pub element: Word,
    pub image: Cylinder,
    #[serde(skip)]
    pub step: usize,
}

impl Piece {
    pub fn inverse(&self) -> Piece {
        Piece {
            domain: self.image.clone(),
            element: self.element.inverse(),
            image: self.domain.clone(),
            step: self.step,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    /// `x = y`.
    Identity,
    /// `x_m = y_m`: one step covers everything.
    Closed,
    /// `x_m ≠ y_m`: infinitely many steps and an exceptional point.
    Alternating,
}

/// A boundary automorphism given by translation pieces on `Ω^x` (forward),
/// their inverses on `Ω^y`, the identity elsewhere, and finitely many
/// exceptional point assignments.
#[derive(Clone, Debug)]
pub struct PiecewiseTranslation {
    presentation: Presentation,
    x: Word,
    y: Word,
    shape: Shape,
    steps: usize,
    pieces: Vec<Piece>,
    exceptional: Vec<(BoundaryPoint, BoundaryPoint)>,
}

impl PiecewiseTranslation {
    /// Builds `k_{x,y}` with the first `max_step` steps materialized.
    pub fn build_k(x: &Word, y: &Word, max_step: usize, p: &Presentation) -> Result<Self> {
        p.check_word(x)?;
        p.check_word(y)?;
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                x: x.to_string(),
                y: y.to_string(),
            });
        }
        if max_step < 1 {
            return Err(Error::ZeroSteps);
        }
        let shape = if x == y {
            Shape::Identity
        } else if x.last() == y.last() {
            Shape::Closed
        } else {
            Shape::Alternating
        };
        let mut k = PiecewiseTranslation {
            presentation: *p,
            x: x.clone(),
            y: y.clone(),
            shape,
            steps: 0,
            pieces: Vec::new(),
            exceptional: Vec::new(),
        };
        if shape == Shape::Alternating {
            let (p_pt, q_pt) = k.exceptional_pair();
            k.exceptional = vec![(p_pt.clone(), q_pt.clone()), (q_pt, p_pt)];
        }
        k.extend_to(max_step);
        Ok(k)
    }

    /// Materializes pieces through step `steps`.
    pub fn extend_to(&mut self, steps: usize) {
        let target = match self.shape {
            Shape::Identity => 0,
            Shape::Closed => steps.min(1),
            Shape::Alternating => steps,
        };
        while self.steps < target {
            let j = self.steps + 1;
            let new = self.step_pieces(j);
            self.pieces.extend(new);
            self.steps = j;
        }
    }

    pub fn x(&self) -> &Word {
        &self.x
    }

    pub fn y(&self) -> &Word {
        &self.y
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    /// Number of steps materialized.
    pub fn step_count(&self) -> usize {
        self.steps
    }

    pub fn is_identity(&self) -> bool {
        self.shape == Shape::Identity
    }

    /// Whether the pieces cover `Ω^x` with no residual.
    pub fn is_closed(&self) -> bool {
        self.shape != Shape::Alternating
    }

    /// Forward pieces (on `Ω^x`), in step order.
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Pieces on `Ω^y`: the inverses of the forward pieces.
    pub fn backward_pieces(&self) -> Vec<Piece> {
        self.pieces.iter().map(Piece::inverse).collect()
    }

    pub fn exceptional(&self) -> &[(BoundaryPoint, BoundaryPoint)] {
        &self.exceptional
    }

    fn last_letters(&self) -> (Letter, Letter) {
        (
            self.x.last().expect("m >= 1"),
            self.y.last().expect("m >= 1"),
        )
    }

    /// `i`-th letter (0-based) of the residual path `b⁻¹ a b⁻¹ a ...`.
    fn x_path(&self, i: usize) -> Letter {
        let (a, b) = self.last_letters();
        if i.is_multiple_of(2) {
            b.inverse()
        } else {
            a
        }
    }

    /// `i`-th letter of `a⁻¹ b a⁻¹ b ...`.
    fn y_path(&self, i: usize) -> Letter {
        let (a, b) = self.last_letters();
        if i.is_multiple_of(2) {
            a.inverse()
        } else {
            b
        }
    }

    fn x_node(&self, len: usize) -> Word {
        let mut v = self.x.letters().to_vec();
        v.extend((0..len).map(|i| self.x_path(i)));
        Word::from_reduced_unchecked(v)
    }

    fn y_node(&self, len: usize) -> Word {
        let mut v = self.y.letters().to_vec();
        v.extend((0..len).map(|i| self.y_path(i)));
        Word::from_reduced_unchecked(v)
    }

    /// Letters excluded from the domain at step `j`.
    fn excluded(&self, j: usize) -> [Letter; 2] {
        let (a, b) = self.last_letters();
        if j % 2 == 1 {
            [a.inverse(), b.inverse()]
        } else {
            [a, b]
        }
    }

    /// Group element used at step `j >= 1`: `y v_{j-1} w_{j-1}⁻¹ x⁻¹`.
    pub fn step_element(&self, j: usize) -> Word {
        assert!(j >= 1, "steps are numbered from 1");
        let v = self.y_node(j - 1);
        let w = self.x_node(j - 1);
        v.mul(&w.inverse())
    }

    fn step_pieces(&self, j: usize) -> Vec<Piece> {
        let p = &self.presentation;
        let element = self.step_element(j);
        let dom_node = self.x_node(j - 1);
        let img_node = self.y_node(j - 1);
        let excluded = self.excluded(j);
        p.successors(dom_node.last())
            .filter(|z| !excluded.contains(z))
            .map(|z| Piece {
                domain: Cylinder::new(dom_node.push(z)),
                element: element.clone(),
                image: Cylinder::new(img_node.push(z)),
                step: j,
            })
            .collect()
    }

    /// `(x (b⁻¹ a)^∞, y (a⁻¹ b)^∞)`.
    fn exceptional_pair(&self) -> (BoundaryPoint, BoundaryPoint) {
        let p_pt = BoundaryPoint::new(
            self.x.clone(),
            Word::from_reduced_unchecked(vec![self.x_path(0), self.x_path(1)]),
        )
        .expect("alternating path is reduced");
        let q_pt = BoundaryPoint::new(
            self.y.clone(),
            Word::from_reduced_unchecked(vec![self.y_path(0), self.y_path(1)]),
        )
        .expect("alternating path is reduced");
        (p_pt, q_pt)
    }

    /// Uncovered part of `Ω^x` after the materialized steps.
    pub fn residual(&self) -> Option<Cylinder> {
        (self.shape == Shape::Alternating).then(|| Cylinder::new(self.x_node(self.steps)))
    }

    /// Uncovered part of `Ω^y` after the materialized steps.
    pub fn residual_image(&self) -> Option<Cylinder> {
        (self.shape == Shape::Alternating).then(|| Cylinder::new(self.y_node(self.steps)))
    }

    pub fn residual_measure(&self) -> Exact {
        self.residual()
            .map(|c| c.measure::<Exact>(&self.presentation))
            .unwrap_or_else(Exact::zero)
    }

    /// Step whose piece contains a point or word that agrees with the
    /// residual path for `matched` letters past position `m`.
    fn step_for_mismatch(&self, matched: usize) -> usize {
        match self.shape {
            Shape::Alternating => matched + 1,
            _ => 1,
        }
    }

    /// Number of leading letters after position `m` that follow `path`,
    /// scanning at most `limit` letters.
    fn match_len(
        &self,
        letter_at: impl Fn(usize) -> Letter,
        path: impl Fn(usize) -> Letter,
        limit: usize,
    ) -> usize {
        if self.shape != Shape::Alternating {
            return 0;
        }
        let m = self.m();
        (0..limit)
            .find(|&i| letter_at(m + i) != path(i))
            .unwrap_or(limit)
    }

    /// Evaluates the map at an eventually periodic point. Pieces beyond the
    /// materialized steps are generated on the fly.
    pub fn apply(&self, w: &BoundaryPoint) -> BoundaryPoint {
        if self.shape == Shape::Identity {
            return w.clone();
        }
        if let Some((_, q)) = self.exceptional.iter().find(|(p, _)| p == w) {
            return q.clone();
        }
        let m = self.m();
        // a point other than the exceptional one leaves the residual path
        // within its preperiod plus two periods
        let limit = w.prefix().len() + 2 * w.cycle().len() + 2;
        let at = |i: usize| w.letter_at(i);
        if w.truncate(m) == self.x {
            let i = self.match_len(at, |i| self.x_path(i), limit);
            act_point(&self.step_element(self.step_for_mismatch(i)), w)
        } else if w.truncate(m) == self.y {
            let i = self.match_len(at, |i| self.y_path(i), limit);
            act_point(&self.step_element(self.step_for_mismatch(i)).inverse(), w)
        } else {
            w.clone()
        }
    }

    /// Image of the depth-`|c|` cylinder `c` when `|c| >= m`; cylinders on
    /// the residual path map onto the matching cylinder on the other side
    /// (up to the null exceptional point).
    fn image_deep(&self, c: &Cylinder) -> Cylinder {
        let m = self.m();
        let base = c.base();
        let extra = base.len() - m;
        let at = |i: usize| base.letters()[i];
        if self.x.is_prefix_of(base) {
            let i = self.match_len(at, |i| self.x_path(i), extra);
            if i == extra && self.shape == Shape::Alternating {
                return Cylinder::new(self.y_node(extra));
            }
            if extra == 0 {
                return Cylinder::new(self.y.clone());
            }
            let g = self.step_element(self.step_for_mismatch(i));
            translate_cylinder(&g, c).expect("pieces translate cylinders")
        } else if self.y.is_prefix_of(base) {
            let i = self.match_len(at, |i| self.y_path(i), extra);
            if i == extra && self.shape == Shape::Alternating {
                return Cylinder::new(self.x_node(extra));
            }
            if extra == 0 {
                return Cylinder::new(self.x.clone());
            }
            let g = self.step_element(self.step_for_mismatch(i)).inverse();
            translate_cylinder(&g, c).expect("pieces translate cylinders")
        } else {
            c.clone()
        }
    }

    /// Image of a cylinder union, exact up to null sets.
    pub fn push_forward(&self, set: &CylinderUnion) -> CylinderUnion {
        let p = &self.presentation;
        if self.shape == Shape::Identity {
            return set.clone();
        }
        let m = self.m();
        let mut out: Vec<Cylinder> = Vec::new();
        for c in set.cylinders() {
            if c.depth() >= m {
                out.push(self.image_deep(c));
                continue;
            }
            let cx = Cylinder::new(self.x.clone());
            let cy = Cylinder::new(self.y.clone());
            let swapped = CylinderUnion::new([cx.clone(), cy.clone()], p);
            out.extend(
                CylinderUnion::single(c.clone())
                    .difference(&swapped, p)
                    .cylinders()
                    .iter()
                    .cloned(),
            );
            if c.contains(&cx) {
                out.push(cy.clone());
            }
            if c.contains(&cy) {
                out.push(cx);
            }
        }
        CylinderUnion::new(out, p)
    }

    /// Image of a finite word prefix of length at least `m` (or one outside
    /// `Ω^x ∪ Ω^y`); the result has the same length.
    pub fn apply_to_word(&self, w: &Word) -> Option<Word> {
        let m = self.m();
        if w.len() < m {
            let c = Cylinder::new(w.clone());
            let touches = c.contains_word(&self.x) || c.contains_word(&self.y);
            return (!touches || self.is_identity()).then(|| w.clone());
        }
        Some(self.image_deep(&Cylinder::new(w.clone())).into_base())
    }

    /// Runs every structural check.
    pub fn verify(&self) -> VerificationReport {
        verify(self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "x": self.x.to_string(),
            "y": self.y.to_string(),
            "step_count": self.steps,
            "pieces": self.pieces.iter().map(|pc| serde_json::json!({
                "domain": pc.domain.base().to_string(),
                "element": pc.element.to_string(),
                "image": pc.image.base().to_string(),
            })).collect::<Vec<_>>(),
            "exceptional": self.exceptional.iter()
                .map(|(p, q)| [p.to_string(), q.to_string()])
                .collect::<Vec<_>>(),
            "residual": self.residual().map(|c| c.base().to_string()),
            "residual_measure": fraction_string(&self.residual_measure()),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// Outcome of [`PiecewiseTranslation::verify`]; failures are recorded, never
/// raised.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    fn record(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: if passed { String::new() } else { detail.into() },
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn pairwise_disjoint<'a>(cs: impl Iterator<Item = &'a Cylinder>) -> Option<(Cylinder, Cylinder)> {
    let cs: Vec<&Cylinder> = cs.collect();
    for (i, a) in cs.iter().enumerate() {
        for b in &cs[i + 1..] {
            if !a.is_disjoint(b) {
                return Some(((*a).clone(), (*b).clone()));
            }
        }
    }
    None
}

fn verify(k: &PiecewiseTranslation) -> VerificationReport {
    let p = &k.presentation;
    let mut r = VerificationReport::default();
    let omega_x = Cylinder::new(k.x.clone());
    let omega_y = Cylinder::new(k.y.clone());

    // (a) disjointness, and everything stays inside Ω^x / Ω^y
    let overlap = pairwise_disjoint(k.pieces.iter().map(|pc| &pc.domain));
    r.record(
        "domains pairwise disjoint",
        overlap.is_none(),
        format!("{overlap:?}"),
    );
    let overlap = pairwise_disjoint(k.pieces.iter().map(|pc| &pc.image));
    r.record(
        "images pairwise disjoint",
        overlap.is_none(),
        format!("{overlap:?}"),
    );
    let stray = k
        .pieces
        .iter()
        .find(|pc| !omega_x.contains(&pc.domain) || !omega_y.contains(&pc.image));
    r.record(
        "pieces map into Ω^x → Ω^y",
        stray.is_none(),
        format!("{stray:?}"),
    );

    // (b) exact measure preservation per piece
    let bad = k
        .pieces
        .iter()
        .find(|pc| pc.domain.measure::<Exact>(p) != pc.image.measure::<Exact>(p));
    r.record("each piece preserves ν", bad.is_none(), format!("{bad:?}"));

    // (c) domains + residual = Ω^x, images + residual image = Ω^y
    let mut dom: Vec<Cylinder> = k.pieces.iter().map(|pc| pc.domain.clone()).collect();
    let mut img: Vec<Cylinder> = k.pieces.iter().map(|pc| pc.image.clone()).collect();
    dom.extend(k.residual());
    img.extend(k.residual_image());
    if !k.is_identity() {
        let covered_x = CylinderUnion::new(dom, p);
        let covered_y = CylinderUnion::new(img, p);
        let total: Exact = k
            .pieces
            .iter()
            .map(|pc| pc.domain.measure::<Exact>(p))
            .fold(k.residual_measure(), |a, b| a + b);
        r.record(
            "domains and residual exhaust Ω^x",
            covered_x == CylinderUnion::single(omega_x.clone())
                && total == omega_x.measure::<Exact>(p),
            format!("covered {covered_x}, total {}", fraction_string(&total)),
        );
        r.record(
            "images and residual image exhaust Ω^y",
            covered_y == CylinderUnion::single(omega_y.clone()),
            format!("covered {covered_y}"),
        );
    }

    // (d) residual after step j has measure 1/(n+1) (1/n)^(m+j-1)
    let expected = if k.shape == Shape::Alternating {
        cylinder_measure::<Exact>(p, k.m() + k.steps)
    } else {
        Exact::zero()
    };
    r.record(
        "residual measure follows the geometric law",
        k.residual_measure() == expected,
        format!(
            "got {}, expected {}",
            fraction_string(&k.residual_measure()),
            fraction_string(&expected)
        ),
    );

    // (e) each piece acts by one fixed group element, the step formula
    let bad = k.pieces.iter().find(|pc| {
        pc.element != k.step_element(pc.step)
            || act_cylinder(&pc.element, &pc.domain, p) != CylinderUnion::single(pc.image.clone())
    });
    r.record(
        "each piece is a left translation by its step element",
        bad.is_none(),
        format!("{bad:?}"),
    );

    // exceptional pair sits in every residual
    if k.shape == Shape::Alternating {
        let ok = k.exceptional.len() == 2
            && (0..=k.steps).all(|j| {
                let (pp, qq) = &k.exceptional[0];
                Cylinder::new(k.x_node(j)).contains_point(pp)
                    && Cylinder::new(k.y_node(j)).contains_point(qq)
            });
        r.record(
            "exceptional pair lies on the residual paths",
            ok,
            format!("{:?}", k.exceptional),
        );
    }
    r
}

/// Whether the maps `k_{x,y}`, `x, y ∈ V^m`, move every depth-`m` cylinder
/// onto every other one; checked pair by pair by exact measure bookkeeping.
pub fn transitivity_check(m: usize, p: &Presentation) -> Result<bool> {
    transitivity_check_with(m, p, 4, crate::group::DEFAULT_MAX_CELLS)
}

pub fn transitivity_check_with(
    m: usize,
    p: &Presentation,
    steps: usize,
    max_cells: u64,
) -> Result<bool> {
    let size = p.guarded_sphere_size(m, max_cells)?;
    if size.saturating_mul(size) > max_cells {
        return Err(Error::ResourceLimit(format!(
            "{size}² pairs at radius {m} (bound {max_cells})"
        )));
    }
    let level = p.sphere(m)?;
    for x in &level {
        for y in &level {
            let k = PiecewiseTranslation::build_k(x, y, steps, p)?;
            let from = CylinderUnion::single(Cylinder::new(x.clone()));
            let to = CylinderUnion::single(Cylinder::new(y.clone()));
            let measures_match = from.measure::<Exact>(p) == to.measure::<Exact>(p);
            let report = k.verify();
            if !measures_match || !report.all_passed() || k.push_forward(&from) != to {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;

    fn p30() -> Presentation {
        Presentation::new(3, 0).unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn pt(s: &str) -> BoundaryPoint {
        s.parse().unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn first_step_translates_by_y_x_inverse() {
        let p = p30();
        let k = PiecewiseTranslation::build_k(&w("a1"), &w("a2"), 1, &p).unwrap();
        assert_eq!(k.pieces().len(), 1);
        let pc = &k.pieces()[0];
        assert_eq!(pc.domain.to_string(), "a1 a3");
        assert_eq!(pc.element.to_string(), "a2 a1");
        assert_eq!(pc.image.to_string(), "a2 a3");
        assert_eq!(pc.domain.measure::<Exact>(&p), q(1, 6));
        assert_eq!(pc.image.measure::<Exact>(&p), q(1, 6));
    }

    #[test]
    fn second_step() {
        let p = p30();
        let k = PiecewiseTranslation::build_k(&w("a1"), &w("a2"), 2, &p).unwrap();
        let pc = &k.pieces()[1];
        assert_eq!(pc.domain.to_string(), "a1 a2 a3");
        assert_eq!(pc.element.to_string(), "a2 a1 a2 a1");
        assert_eq!(pc.image.to_string(), "a2 a1 a3");
        assert_eq!(pc.domain.measure::<Exact>(&p), q(1, 12));
    }

    #[test]
    fn exceptional_pair() {
        let p = p30();
        let k = PiecewiseTranslation::build_k(&w("a1"), &w("a2"), 3, &p).unwrap();
        assert_eq!(k.exceptional()[0], (pt("(a1 a2)"), pt("(a2 a1)")));
        assert_eq!(k.apply(&pt("(a1 a2)")), pt("(a2 a1)"));
        assert_eq!(k.apply(&pt("(a2 a1)")), pt("(a1 a2)"));
    }

    #[test]
    fn step_elements_match_literal_construction() {
        // y x⁻¹, y x_m⁻¹ y_m x⁻¹, y x_m⁻¹ y_m x_m⁻¹ y_m x⁻¹ written out and reduced
        let p = Presentation::new(1, 2).unwrap();
        for (xs, ys) in [
            ("a1 b1", "b2 b2"),
            ("b1 b2", "a1 b1'"),
            ("b2' a1", "b1 b1"),
            ("b1 b1", "b2 b1'"),
            ("a1 b2", "b1 b2"),
        ] {
            let (x, y) = (w(xs), w(ys));
            let k = PiecewiseTranslation::build_k(&x, &y, 3, &p).unwrap();
            let xm = Word::letter(x.last().unwrap());
            let ym = Word::letter(y.last().unwrap());
            let lit =
                |parts: &[&Word]| Word::reduce(parts.iter().flat_map(|p| p.letters().to_vec()));
            assert_eq!(k.step_element(1), lit(&[&y, &x.inverse()]));
            if k.is_closed() {
                continue;
            }
            assert_eq!(
                k.step_element(2),
                lit(&[&y, &xm.inverse(), &ym, &x.inverse()])
            );
            assert_eq!(
                k.step_element(3),
                lit(&[&y, &xm.inverse(), &ym, &xm.inverse(), &ym, &x.inverse()])
            );
        }
    }

    #[test]
    fn residual_decays_geometrically() {
        let p = p30();
        let k = PiecewiseTranslation::build_k(&w("a1"), &w("a2"), 1, &p).unwrap();
        assert_eq!(k.residual().unwrap().to_string(), "a1 a2");
        assert_eq!(k.residual_measure(), q(1, 6));
        let k = PiecewiseTranslation::build_k(&w("a1"), &w("a2"), 4, &p).unwrap();
        assert_eq!(k.residual_measure(), q(1, 48));
        assert!(k.verify().all_passed(), "{:?}", k.verify());
    }

    #[test]
    fn equal_words_give_identity() {
        let p = p30();
        let k = PiecewiseTranslation::build_k(&w("a1 a2"), &w("a1 a2"), 5, &p).unwrap();
        assert!(k.is_identity());
        assert!(k.pieces().is_empty());
        let x = pt("a1 a2 (a3 a1)");
        assert_eq!(k.apply(&x), x);
        assert!(k.verify().all_passed());
    }

    #[test]
    fn same_last_letter_closes_after_one_step() {
        let p = p30();
        let k = PiecewiseTranslation::build_k(&w("a1 a3"), &w("a2 a3"), 6, &p).unwrap();
        assert!(k.is_closed());
        assert_eq!(k.pieces().len(), 2);
        assert!(k.residual().is_none());
        assert!(k.exceptional().is_empty());
        assert!(k.verify().all_passed(), "{:?}", k.verify());
    }

    #[test]
    fn apply_examples() {
        let p = p30();
        let k = PiecewiseTranslation::build_k(&w("a1"), &w("a2"), 32, &p).unwrap();
        let outside = pt("a3 (a1 a2)");
        assert_eq!(k.apply(&outside), outside);
        assert_eq!(k.apply(&pt("a1 a3 (a2 a3)")), pt("a2 a3 (a2 a3)"));
        // deep point beyond the materialized steps
        let k1 = PiecewiseTranslation::build_k(&w("a1"), &w("a2"), 1, &p).unwrap();
        let deep = pt("a1 a2 a1 a2 a1 a3 (a1 a2)");
        assert_eq!(k1.apply(&deep), k.apply(&deep));
        assert_eq!(k.apply(&k.apply(&deep)), deep);
    }

    #[test]
    fn build_errors() {
        let p = p30();
        assert!(matches!(
            PiecewiseTranslation::build_k(&w("a1"), &w("a2 a1"), 3, &p),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            PiecewiseTranslation::build_k(&w("a1"), &w("a2"), 0, &p),
            Err(Error::ZeroSteps)
        ));
        assert!(PiecewiseTranslation::build_k(&w("a1"), &w("a4"), 3, &p).is_err());
    }

    #[test]
    fn push_forward_of_swapped_cylinders() {
        let p = p30();
        let k = PiecewiseTranslation::build_k(&w("a1"), &w("a2"), 3, &p).unwrap();
        let ox = CylinderUnion::single(Cylinder::new(w("a1")));
        let oy = CylinderUnion::single(Cylinder::new(w("a2")));
        assert_eq!(k.push_forward(&ox), oy);
        assert_eq!(
            k.push_forward(&CylinderUnion::whole()),
            CylinderUnion::whole()
        );
        let deep = CylinderUnion::single(Cylinder::new(w("a1 a2 a1 a2 a3")));
        let img = k.push_forward(&deep);
        assert_eq!(img.measure::<Exact>(&p), deep.measure::<Exact>(&p));
    }

    #[test]
    fn json_shape() {
        let p = p30();
        let k = PiecewiseTranslation::build_k(&w("a1"), &w("a2"), 2, &p).unwrap();
        let j = k.to_json();
        assert_eq!(j["x"], "a1");
        assert_eq!(j["step_count"], 2);
        assert_eq!(j["pieces"][0]["element"], "a2 a1");
        assert_eq!(j["exceptional"][0][0], "(a1 a2)");
        assert_eq!(j["residual"], "a1 a2 a1");
        assert_eq!(j["residual_measure"], "1/12");
    }

    #[test]
    fn transitivity_small() {
        let p = p30();
        assert!(transitivity_check(0, &p).unwrap());
        assert!(transitivity_check(1, &p).unwrap());
        assert!(transitivity_check(2, &Presentation::new(1, 1).unwrap()).unwrap());
    }
}
