//! Monte Carlo sampling of depth-`d` truncations of `ν`-random boundary points.
//!
//! The first letter is uniform over the `n + 1` letters and every further
//! letter is uniform over the `n` letters that keep the word reduced, which
//! gives each depth-`d` cylinder exactly its `ν`-mass.
//!
//! Randomness: ChaCha8 seeded from the user seed, one stream per chunk of
//! [`CHUNK`] draws. Chunks run in parallel and are concatenated in order, so
//! a batch depends only on `(presentation, depth, count, seed)`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::action::{act_union, rn_value, RnTable};
use crate::boundary::{Cylinder, CylinderUnion};
use crate::error::{Error, Result};
use crate::full_group::PiecewiseTranslation;
use crate::group::{Presentation, Word, DEFAULT_MAX_CELLS};
use crate::scalar::{fraction_string, Scalar};
use crate::Exact;

pub const CHUNK: usize = 1 << 16;

/// Bound on `depth × count` letters drawn in one batch.
pub const DEFAULT_MAX_LETTERS: u64 = 500_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleBatch {
    pub presentation: Presentation,
    pub depth: usize,
    pub seed: u64,
    pub words: Vec<Word>,
}

pub fn sample(p: &Presentation, depth: usize, count: usize, seed: u64) -> Result<SampleBatch> {
    sample_with_limit(p, depth, count, seed, DEFAULT_MAX_LETTERS)
}

pub fn sample_with_limit(
    p: &Presentation,
    depth: usize,
    count: usize,
    seed: u64,
    max_letters: u64,
) -> Result<SampleBatch> {
    if depth == 0 || count == 0 {
        return Err(Error::DepthTooSmall {
            depth: depth.min(count),
            required: 0,
        });
    }
    if (depth as u64).saturating_mul(count as u64) > max_letters {
        return Err(Error::ResourceLimit(format!(
            "{count} samples of depth {depth} (bound {max_letters} letters)"
        )));
    }
    let letters = p.letters();
    let forbid: Vec<usize> = letters
        .iter()
        .map(|l| letters.iter().position(|x| *x == l.inverse()).unwrap())
        .collect();
    let n = p.n() as usize;
    let chunks = count.div_ceil(CHUNK);
    let words: Vec<Word> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let len = CHUNK.min(count - chunk * CHUNK);
            let (letters, forbid) = (&letters, &forbid);
            (0..len)
                .map(move |_| {
                    let mut idx = rng.gen_range(0..=n);
                    let mut v = Vec::with_capacity(depth);
                    v.push(letters[idx]);
                    for _ in 1..depth {
                        let r = rng.gen_range(0..n);
                        idx = if r < forbid[idx] { r } else { r + 1 };
                        v.push(letters[idx]);
                    }
                    Word::from_reduced_unchecked(v)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(SampleBatch {
        presentation: *p,
        depth,
        seed,
        words,
    })
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn count_in(&self, set: &CylinderUnion) -> Result<u64> {
        if set.max_depth() > self.depth {
            return Err(Error::DepthTooSmall {
                depth: self.depth,
                required: set.max_depth() - 1,
            });
        }
        Ok(self
            .words
            .par_iter()
            .filter(|w| set.contains_word(w))
            .count() as u64)
    }

    pub fn frequency(&self, c: &Cylinder) -> Result<f64> {
        Ok(self.count_in(&CylinderUnion::single(c.clone()))? as f64 / self.len() as f64)
    }

    /// Counts per depth-`depth` prefix.
    pub fn cell_counts(&self, depth: usize) -> BTreeMap<Word, u64> {
        let mut out = BTreeMap::new();
        for w in &self.words {
            *out.entry(w.prefix(depth)).or_insert(0) += 1;
        }
        out
    }

    /// Pearson statistic of the depth-`depth` cell counts against `ν`, and
    /// its degrees of freedom.
    pub fn chi_square(&self, depth: usize) -> Result<(f64, usize)> {
        let p = &self.presentation;
        let counts = self.cell_counts(depth.min(self.depth));
        let cells = p.sphere(depth.min(self.depth))?;
        let total = self.len() as f64;
        let stat = cells
            .iter()
            .map(|w| {
                let expected = total * Cylinder::new(w.clone()).measure::<f64>(p);
                let observed = *counts.get(w).unwrap_or(&0) as f64;
                (observed - expected).powi(2) / expected
            })
            .sum();
        Ok((stat, cells.len() - 1))
    }

    /// Image of every sample under `k`; samples must be at least `m` deep.
    pub fn push_forward(&self, k: &PiecewiseTranslation) -> Result<SampleBatch> {
        let words = self
            .words
            .par_iter()
            .map(|w| {
                k.apply_to_word(w).ok_or(Error::DepthTooSmall {
                    depth: w.len(),
                    required: k.m() - 1,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SampleBatch {
            words,
            ..self.clone()
        })
    }

    /// One word per line.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.len() * (self.depth * 3 + 1));
        for w in &self.words {
            s.push_str(&w.to_string());
            s.push('\n');
        }
        s
    }

    /// `{s, t, depth, count, seed, frequencies: {cell: {count, frequency, exact}}}`
    /// over the cells at `cell_depth`.
    pub fn summary_json(&self, cell_depth: usize) -> serde_json::Value {
        let p = &self.presentation;
        let d = cell_depth.min(self.depth);
        let mut counts = self.cell_counts(d);
        // Unobserved cells are listed too when the level is small enough.
        if p.guarded_sphere_size(d, DEFAULT_MAX_CELLS).is_ok() {
            for w in p.sphere_iter(d) {
                counts.entry(w).or_insert(0);
            }
        }
        let freq: serde_json::Map<String, serde_json::Value> = counts
            .iter()
            .map(|(w, &c)| {
                (
                    w.to_string(),
                    serde_json::json!({
                        "count": c,
                        "frequency": c as f64 / self.len() as f64,
                        "exact": fraction_string(&Cylinder::new(w.clone()).measure::<Exact>(p)),
                    }),
                )
            })
            .collect();
        serde_json::json!({
            "s": p.s(),
            "t": p.t(),
            "depth": self.depth,
            "count": self.len(),
            "seed": self.seed,
            "cell_depth": d,
            "frequencies": freq,
        })
    }
}

/// Empirical estimate of `ν(g·E) / ν(E)` for a set `E`.
#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalRatio {
    pub set: CylinderUnion,
    pub count_set: u64,
    pub count_image: u64,
    /// `NaN` when the set received no samples.
    pub estimate: f64,
    /// Exact `ν(g·E) / ν(E)`.
    #[serde(serialize_with = "ser_fraction")]
    pub exact: Exact,
    /// Delta-method standard deviation of the estimate.
    pub sigma: f64,
}

impl EmpiricalRatio {
    pub fn is_empty(&self) -> bool {
        self.count_set == 0
    }

    /// `|estimate - exact| <= k σ`.
    pub fn within(&self, k: f64) -> bool {
        !self.is_empty() && (self.estimate - Scalar::to_f64(&self.exact)).abs() <= k * self.sigma
    }

    /// Signed deviation in units of `σ`.
    pub fn z_score(&self) -> f64 {
        (self.estimate - Scalar::to_f64(&self.exact)) / self.sigma
    }
}

/// Empirical estimate of `ν(g·C) / ν(C)` for one cell.
#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalRn {
    pub cell: Cylinder,
    /// Exact derivative when constant on the cell.
    #[serde(serialize_with = "ser_opt_fraction")]
    pub constant: Option<Exact>,
    #[serde(flatten)]
    pub ratio: EmpiricalRatio,
}

fn ser_fraction<S: serde::Serializer>(v: &Exact, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fraction_string(v))
}

fn ser_opt_fraction<S: serde::Serializer>(
    v: &Option<Exact>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&fraction_string(v)),
        None => s.serialize_none(),
    }
}

/// Ratio of empirical masses `#(g·E) / #E`, with its exact value. The batch
/// must be deep enough to decide membership in `E`, `g·E` and their overlap.
pub fn empirical_ratio(
    g: &Word,
    batch: &SampleBatch,
    set: &CylinderUnion,
) -> Result<EmpiricalRatio> {
    let p = &batch.presentation;
    p.check_word(g)?;
    let total = batch.len() as f64;
    let image = act_union(g, set, p);
    let count_set = batch.count_in(set)?;
    let count_image = batch.count_in(&image)?;
    let p_set: Exact = set.measure(p);
    if p_set.is_zero() {
        return Err(Error::NullSet);
    }
    let p_image: Exact = image.measure(p);
    let p_both: Exact = image.intersection(set, p).measure(p);
    let exact = p_image.clone() / p_set.clone();
    let (ps, pi, pb) = (
        Scalar::to_f64(&p_set),
        Scalar::to_f64(&p_image),
        Scalar::to_f64(&p_both),
    );
    let r = pi / ps;
    let rel_var = ((1.0 - pi) / pi + (1.0 - ps) / ps - 2.0 * (pb - pi * ps) / (pi * ps)) / total;
    let estimate = if count_set == 0 {
        f64::NAN
    } else {
        count_image as f64 / count_set as f64
    };
    Ok(EmpiricalRatio {
        set: set.clone(),
        count_set,
        count_image,
        estimate,
        exact,
        sigma: r * rel_var.max(0.0).sqrt(),
    })
}

/// [`empirical_ratio`] over each depth-`cell_depth` cell.
pub fn empirical_rn(g: &Word, batch: &SampleBatch, cell_depth: usize) -> Result<Vec<EmpiricalRn>> {
    let p = &batch.presentation;
    p.check_word(g)?;
    if batch.depth <= g.len() + cell_depth {
        return Err(Error::DepthTooSmall {
            depth: batch.depth,
            required: g.len() + cell_depth,
        });
    }
    p.sphere(cell_depth)?
        .into_iter()
        .map(|y| {
            let cell = Cylinder::new(y);
            let ratio = empirical_ratio(g, batch, &CylinderUnion::single(cell.clone()))?;
            Ok(EmpiricalRn {
                constant: rn_value::<Exact>(g, &cell, p),
                cell,
                ratio,
            })
        })
        .collect()
}

/// [`empirical_ratio`] over the level sets of the derivative of `g`, keyed by
/// the exponent `k` of the value `n^k`.
pub fn empirical_rn_levels(g: &Word, batch: &SampleBatch) -> Result<BTreeMap<i64, EmpiricalRatio>> {
    let p = &batch.presentation;
    let table = RnTable::<Exact>::build(g, g.len() + 1, p)?;
    table
        .level_sets(p)
        .into_iter()
        .map(|(k, set)| Ok((k, empirical_ratio(g, batch, &set)?)))
        .collect()
}
