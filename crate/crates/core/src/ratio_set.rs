//! Realized Radon–Nikodym values and constructive ratio-set witnesses.
//!
//! A witness for `λ = n` on a set `E` is built as `t = k₂ g⁻¹ k₁`: pick the
//! first cylinder `Ω^c ⊆ E`, a generator `g` with `g c` reduced, and
//! `k₁ = k_{c', g c}` for the first child `c'` of `c`. Then `t` maps
//! `F ⊆ Ω^{c'}` into `g⁻¹ Ω^{g c} = Ω^c ⊆ E` (so `k₂` is the identity) and,
//! since `k₁` preserves `ν`, its derivative on `F` equals that of `g⁻¹` on
//! `Ω^g`, which is `n`. Witnesses for `n^k` chain `|k|` such steps; negative
//! exponents invert.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::action::{
    act_cylinder, fixed_points, point_set_measure_bound, rn_exponent, translate_cylinder,
};
use crate::boundary::{Cylinder, CylinderUnion};
use crate::error::{Error, Result};
use crate::full_group::{transitivity_check, PiecewiseTranslation, DEFAULT_MAX_STEP};
use crate::group::{Presentation, Word, DEFAULT_MAX_CELLS};
use crate::scalar::{exact_log, fraction_string, Scalar};
use crate::Exact;

/// Exponents `k` such that `n^k` is a derivative value of some `g` with
/// `|g| <= max_len` on some depth-`depth` cell.
pub fn realized_exponents(p: &Presentation, max_len: usize, depth: usize) -> Result<BTreeSet<i64>> {
    realized_exponents_with_limit(p, max_len, depth, DEFAULT_MAX_CELLS)
}

pub fn realized_exponents_with_limit(
    p: &Presentation,
    max_len: usize,
    depth: usize,
    max_cells: u64,
) -> Result<BTreeSet<i64>> {
    if depth <= max_len {
        return Err(Error::DepthTooSmall {
            depth,
            required: max_len,
        });
    }
    let cells = p.guarded_sphere_size(depth, max_cells)?;
    let mut ball = 0u64;
    for l in 0..=max_len {
        ball = ball.saturating_add(p.guarded_sphere_size(l, max_cells)?);
    }
    if ball.saturating_mul(cells) > max_cells.saturating_mul(10) {
        return Err(Error::ResourceLimit(format!(
            "{ball} elements × {cells} cells exceeds the work bound"
        )));
    }
    let cells: Vec<Cylinder> = p.sphere_iter(depth).map(Cylinder::new).collect();
    let mut out = BTreeSet::new();
    for l in 0..=max_len {
        for g in p.sphere_iter(l) {
            for c in &cells {
                out.insert(rn_exponent(&g, c).expect("depth exceeds |g|"));
            }
        }
    }
    Ok(out)
}

/// The realized values `n^k`, ascending.
pub fn realized_rn_values<T: Scalar>(
    p: &Presentation,
    max_len: usize,
    depth: usize,
) -> Result<Vec<T>> {
    Ok(realized_exponents(p, max_len, depth)?
        .into_iter()
        .map(|k| T::powi(p.n(), k))
        .collect())
}

/// A `k_{x,y}` reference, or the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KRef {
    Identity,
    Swap { x: Word, y: Word },
}

impl KRef {
    fn to_json(&self) -> serde_json::Value {
        match self {
            KRef::Identity => serde_json::Value::String("id".into()),
            KRef::Swap { x, y } => serde_json::json!({"x": x.to_string(), "y": y.to_string()}),
        }
    }
}

/// One factor `k₂ g⁻¹ k₁` of a witness translation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub k1: KRef,
    pub g: Word,
    pub k2: KRef,
}

impl Stage {
    fn inverse(&self) -> Stage {
        // (k₂ g⁻¹ k₁)⁻¹ = k₁ g k₂, each k being an involution
        Stage {
            k1: self.k2.clone(),
            g: self.g.inverse(),
            k2: self.k1.clone(),
        }
    }
}

/// A cell of `F` on which the witness translation acts by one group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessCell {
    pub cell: Cylinder,
    pub element: Word,
    pub exponent: i64,
}

/// Evidence that `λ = n^k` belongs to the ratio set on `E`: a set `F ⊆ E` of
/// positive measure and a full-group translation `t` with `tF ⊆ E` and
/// `d(ν∘t)/dν ≡ λ` on `F`. Since the derivative equals `λ` exactly, the
/// `ε`-condition holds for every `ε > 0`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub exponent: i64,
    pub n: u64,
    pub e: CylinderUnion,
    pub f: CylinderUnion,
    pub tf: CylinderUnion,
    /// `t` is the composition of the stages, first stage applied first.
    pub stages: Vec<Stage>,
    pub cells: Vec<WitnessCell>,
    pub max_step: usize,
}

impl Witness {
    pub fn lambda<T: Scalar>(&self) -> T {
        T::powi(self.n, self.exponent)
    }

    /// Re-derives every claim from scratch.
    pub fn check(&self, p: &Presentation) -> WitnessCheck {
        let lambda: Exact = self.lambda();
        let positive = self.f.measure::<Exact>(p) > Exact::zero();
        let f_in_e = self.f.is_subset(&self.e, p);
        let tf_in_e = self.tf.is_subset(&self.e, p);

        let f_cells = CylinderUnion::new(self.cells.iter().map(|c| c.cell.clone()), p);
        let mut images = Vec::new();
        let mut rn_exact = true;
        for c in &self.cells {
            match translate_cylinder(&c.element, &c.cell) {
                Some(img) => {
                    let ratio = img.measure::<Exact>(p) / c.cell.measure::<Exact>(p);
                    rn_exact &= ratio == lambda;
                    images.push(img);
                }
                None => rn_exact = false,
            }
        }
        let cells_disjoint = disjoint(self.cells.iter().map(|c| &c.cell));
        let images_disjoint = disjoint(images.iter());
        let tf_cells = CylinderUnion::new(images, p);
        let sets_consistent = f_cells == self.f && tf_cells == self.tf;

        // the composition record must reproduce every cell's image
        let stages_consistent = self.cells.iter().all(|c| {
            match self.apply_stages(&CylinderUnion::single(c.cell.clone()), p) {
                Ok(img) => translate_cylinder(&c.element, &c.cell)
                    .is_some_and(|t| img == CylinderUnion::single(t)),
                Err(_) => false,
            }
        });

        WitnessCheck {
            positive_measure: positive,
            f_in_e,
            tf_in_e,
            rn_constant: rn_exact,
            injective: cells_disjoint && images_disjoint,
            sets_consistent,
            stages_consistent,
        }
    }

    /// Pushes a set through the recorded stages.
    pub fn apply_stages(&self, set: &CylinderUnion, p: &Presentation) -> Result<CylinderUnion> {
        let mut cur = set.clone();
        for st in &self.stages {
            cur = push_k(&st.k1, &cur, self.max_step, p)?;
            cur = crate::action::act_union(&st.g.inverse(), &cur, p);
            cur = push_k(&st.k2, &cur, self.max_step, p)?;
        }
        Ok(cur)
    }

    /// `{lambda, E, F, g, k1, k2, rn_checks, stages}`; `g`, `k1`, `k2`
    /// describe the first stage.
    /// Largest `|ν(tC)/ν(C) - λ|` over the cells `C` of `F`; zero for a
    /// valid witness, so the ratio-set condition holds for every `ε > 0`.
    pub fn epsilon(&self, p: &Presentation) -> Exact {
        let lambda = self.lambda::<Exact>();
        self.cells
            .iter()
            .map(|c| {
                let img = act_cylinder(&c.element, &c.cell, p);
                let v = img.measure::<Exact>(p) / c.cell.measure::<Exact>(p);
                (v - &lambda).abs()
            })
            .max()
            .unwrap_or_default()
    }

    pub fn to_json(&self, p: &Presentation) -> serde_json::Value {
        let first = &self.stages[0];
        let stage_json = |s: &Stage| serde_json::json!({"k1": s.k1.to_json(), "g": s.g.to_string(), "k2": s.k2.to_json()});
        serde_json::json!({
            "lambda": fraction_string(&self.lambda::<Exact>()),
            "E": &self.e,
            "F": &self.f,
            "tF": &self.tf,
            "g": first.g.to_string(),
            "k1": first.k1.to_json(),
            "k2": first.k2.to_json(),
            "stages": self.stages.iter().map(stage_json).collect::<Vec<_>>(),
            "rn_checks": self.cells.iter().map(|c| {
                let img = translate_cylinder(&c.element, &c.cell).expect("checked cell");
                let v = img.measure::<Exact>(p) / c.cell.measure::<Exact>(p);
                serde_json::json!({"cell": c.cell.base().to_string(), "value": fraction_string(&v)})
            }).collect::<Vec<_>>(),
            "F_measure": fraction_string(&self.f.measure::<Exact>(p)),
            "epsilon": fraction_string(&self.epsilon(p)),
        })
    }
}

fn disjoint<'a>(cs: impl Iterator<Item = &'a Cylinder>) -> bool {
    let cs: Vec<&Cylinder> = cs.collect();
    cs.iter()
        .enumerate()
        .all(|(i, a)| cs[i + 1..].iter().all(|b| a.is_disjoint(b)))
}

fn push_k(k: &KRef, set: &CylinderUnion, steps: usize, p: &Presentation) -> Result<CylinderUnion> {
    match k {
        KRef::Identity => Ok(set.clone()),
        KRef::Swap { x, y } => Ok(PiecewiseTranslation::build_k(x, y, steps, p)?.push_forward(set)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    pub positive_measure: bool,
    pub f_in_e: bool,
    pub tf_in_e: bool,
    pub rn_constant: bool,
    pub injective: bool,
    pub sets_consistent: bool,
    pub stages_consistent: bool,
}

impl WitnessCheck {
    pub fn passed(&self) -> bool {
        self.positive_measure
            && self.f_in_e
            && self.tf_in_e
            && self.rn_constant
            && self.injective
            && self.sets_consistent
            && self.stages_consistent
    }
}

/// Builds a witness for `λ = n^k`, `k ≠ 0`, inside `E`.
pub fn find_witness(lambda: &Exact, e: &CylinderUnion, p: &Presentation) -> Result<Witness> {
    find_witness_with(lambda, e, p, DEFAULT_MAX_STEP)
}

pub fn find_witness_with(
    lambda: &Exact,
    e: &CylinderUnion,
    p: &Presentation,
    max_step: usize,
) -> Result<Witness> {
    let k = match exact_log(lambda, p.n()) {
        Some(k) if k != 0 => k,
        _ => return Err(Error::InvalidLambda(fraction_string(lambda))),
    };
    if max_step < 1 {
        return Err(Error::ZeroSteps);
    }
    if e.is_empty() || e.measure::<Exact>(p).is_zero() {
        return Err(Error::NullSet);
    }
    let mut w = witness_for_n(e, p, max_step)?;
    for _ in 1..k.unsigned_abs() {
        let next = witness_for_n(&w.tf, p, max_step)?;
        w = chain(&w, &next, e, p);
    }
    if k < 0 {
        w = invert(&w);
    }
    Ok(w)
}

fn witness_for_n(e: &CylinderUnion, p: &Presentation, max_step: usize) -> Result<Witness> {
    let first = e.cylinders().first().ok_or(Error::NullSet)?;
    let c = if first.depth() == 0 {
        first.children(p).remove(0)
    } else {
        first.clone()
    };
    let lead = c.base().first().expect("depth >= 1");
    let g = p
        .letters()
        .into_iter()
        .find(|l| !l.cancels(lead))
        .expect("n >= 2 leaves a generator");
    let g_inv = Word::letter(g.inverse());
    let target = Word::letter(g)
        .concat(c.base())
        .expect("g chosen not to cancel");
    let source = c.children(p).remove(0).into_base();

    let (cells, k1) = if source == target {
        let cell = Cylinder::new(source);
        (vec![(cell, g_inv.clone())], KRef::Identity)
    } else {
        let k = PiecewiseTranslation::build_k(&source, &target, max_step, p)?;
        let cells = k
            .pieces()
            .iter()
            .map(|pc| (pc.domain.clone(), g_inv.mul(&pc.element)))
            .collect();
        (
            cells,
            KRef::Swap {
                x: source,
                y: target,
            },
        )
    };
    let cells: Vec<WitnessCell> = cells
        .into_iter()
        .map(|(cell, element)| {
            let exponent = rn_exponent(&element, &cell).expect("translation of a deep cell");
            WitnessCell {
                cell,
                element,
                exponent,
            }
        })
        .collect();
    Ok(assemble(
        1,
        p,
        e.clone(),
        vec![Stage {
            k1,
            g: Word::letter(g),
            k2: KRef::Identity,
        }],
        cells,
        max_step,
    ))
}

fn assemble(
    exponent: i64,
    p: &Presentation,
    e: CylinderUnion,
    stages: Vec<Stage>,
    cells: Vec<WitnessCell>,
    max_step: usize,
) -> Witness {
    let f = CylinderUnion::new(cells.iter().map(|c| c.cell.clone()), p);
    let tf = CylinderUnion::new(
        cells
            .iter()
            .map(|c| translate_cylinder(&c.element, &c.cell).expect("translation of a deep cell")),
        p,
    );
    Witness {
        exponent,
        n: p.n(),
        e,
        f,
        tf,
        stages,
        cells,
        max_step,
    }
}

/// `second ∘ first` on `{ω ∈ F₁ : t₁ω ∈ F₂}`, where `F₂ ⊆ t₁F₁`.
fn chain(first: &Witness, second: &Witness, e: &CylinderUnion, p: &Presentation) -> Witness {
    let mut cells = Vec::new();
    for c1 in &first.cells {
        let img = translate_cylinder(&c1.element, &c1.cell).expect("checked cell");
        let back = c1.element.inverse();
        for c2 in &second.cells {
            let (cell, element) = if c2.cell.contains(&img) {
                (c1.cell.clone(), c2.element.mul(&c1.element))
            } else if img.contains(&c2.cell) {
                let pre = translate_cylinder(&back, &c2.cell).expect("inside a translated cell");
                (pre, c2.element.mul(&c1.element))
            } else {
                continue;
            };
            let exponent = rn_exponent(&element, &cell).expect("composition of translations");
            cells.push(WitnessCell {
                cell,
                element,
                exponent,
            });
        }
    }
    let mut stages = first.stages.clone();
    stages.extend(second.stages.iter().cloned());
    assemble(
        first.exponent + second.exponent,
        p,
        e.clone(),
        stages,
        cells,
        first.max_step,
    )
}

fn invert(w: &Witness) -> Witness {
    let cells = w
        .cells
        .iter()
        .map(|c| WitnessCell {
            cell: translate_cylinder(&c.element, &c.cell).expect("checked cell"),
            element: c.element.inverse(),
            exponent: -c.exponent,
        })
        .collect();
    Witness {
        exponent: -w.exponent,
        n: w.n,
        e: w.e.clone(),
        f: w.tf.clone(),
        tf: w.f.clone(),
        stages: w.stages.iter().rev().map(Stage::inverse).collect(),
        cells,
        max_step: w.max_step,
    }
}

/// Outcome of one evidence item in a [`Classification`].
#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// The factor-type label `III_{1/n}` with the checks backing it.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    #[serde(rename = "type")]
    pub label: String,
    pub s: u32,
    pub t: u32,
    pub n: u64,
    pub ratio_set: String,
    pub evidence: Vec<Evidence>,
    pub passed: bool,
    pub not_checked: Vec<String>,
}

/// Classifies the crossed product of `L^∞(Ω, ν)` by `Γ` and collects the
/// evidence: freeness, transitivity at radii `0..=2`, witnesses for `n` and
/// `1/n`.
pub fn classify(p: &Presentation) -> Result<Classification> {
    let n = p.n();
    let mut evidence = Vec::new();

    // freeness: generators and all length-2 elements
    let mut sample: Vec<Word> = p.letters().into_iter().map(Word::letter).collect();
    sample.extend(p.sphere(2)?);
    let mut free_ok = true;
    let mut max_fixed = 0;
    for g in &sample {
        let fixed = fixed_points(g)?;
        max_fixed = max_fixed.max(fixed.len());
        let fixed_ok = fixed.iter().all(|x| &crate::action::act_point(g, x) == x);
        let b32: Exact = point_set_measure_bound(&fixed, 32, p);
        let b33: Exact = point_set_measure_bound(&fixed, 33, p);
        let null = fixed.is_empty() || b33 * Exact::from_count(n) == b32;
        free_ok &= fixed.len() <= 2 && fixed_ok && null;
    }
    evidence.push(Evidence {
        name: "free action".into(),
        passed: free_ok,
        detail: format!(
            "{} elements, at most {max_fixed} fixed boundary points each, all null",
            sample.len()
        ),
    });

    for m in 0..=2 {
        let ok = transitivity_check(m, p)?;
        evidence.push(Evidence {
            name: format!("k_(x,y) transitive on radius-{m} cylinders"),
            passed: ok,
            detail: format!("{} ordered pairs", p.sphere_size(m).pow(2)),
        });
    }

    let first = Cylinder::new(Word::letter(p.letters()[0]));
    for e in [CylinderUnion::whole(), CylinderUnion::single(first)] {
        for k in [1i64, -1] {
            let lambda = Exact::powi(n, k);
            let w = find_witness(&lambda, &e, p)?;
            let chk = w.check(p);
            evidence.push(Evidence {
                name: format!(
                    "ratio-set witness λ={} on E={}",
                    fraction_string(&lambda),
                    e
                ),
                passed: chk.passed(),
                detail: format!("ν(F) = {}", fraction_string(&w.f.measure::<Exact>(p))),
            });
        }
    }

    let passed = evidence.iter().all(|e| e.passed);
    Ok(Classification {
        label: format!("III_{{1/{n}}}"),
        s: p.s(),
        t: p.t(),
        n,
        ratio_set: format!("{{{n}^k : k ∈ Z}} ∪ {{0}}"),
        evidence,
        passed,
        not_checked: vec![
            "hyperfiniteness (amenability of the boundary action)".into(),
            "0 in the ratio set (follows from the structure of the ratio set; not witnessed)"
                .into(),
        ],
    })
}
