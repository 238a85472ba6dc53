use std::collections::BTreeSet;

use num_traits::{One, Zero};
use proptest::prelude::*;
use treeboundary::action::{act_cylinder, act_point, fixed_points, rn_value, translate_cylinder};
use treeboundary::boundary::{BoundaryPoint, Cylinder, CylinderUnion};
use treeboundary::full_group::PiecewiseTranslation;
use treeboundary::{Exact, Letter, Presentation, Word};

const PRESENTATIONS: [(u32, u32); 4] = [(3, 0), (1, 1), (0, 2), (4, 0)];

fn pres(i: usize) -> Presentation {
    let (s, t) = PRESENTATIONS[i % PRESENTATIONS.len()];
    Presentation::new(s, t).unwrap()
}

/// A reduced word continuing `start`, one choice index per extra letter.
fn extend(p: &Presentation, start: &Word, choices: &[usize]) -> Word {
    let mut letters = start.letters().to_vec();
    for &c in choices {
        let options: Vec<Letter> = p.successors(letters.last().copied()).collect();
        letters.push(options[c % options.len()]);
    }
    Word::from_reduced(letters).unwrap()
}

fn word(p: &Presentation, choices: &[usize]) -> Word {
    extend(p, &Word::identity(), choices)
}

fn choices(max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..64, 0..=max)
}

/// Point whose expansion begins with `start`: the tail of a reduced word is
/// used as the cycle when it repeats without cancellation.
fn point(
    p: &Presentation,
    start: &Word,
    body: &[usize],
    cycle_len: usize,
) -> Option<BoundaryPoint> {
    let w = extend(p, start, body);
    let cycle_len = cycle_len.clamp(1, body.len().max(1));
    if w.len() < start.len() + cycle_len || w.len() <= start.len() {
        return None;
    }
    let split = w.len() - cycle_len;
    BoundaryPoint::new(w.prefix(split), w.suffix_from(split)).ok()
}

fn all_words(p: &Presentation, m: usize) -> Vec<Vec<Letter>> {
    let letters = p.letters();
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|w| {
                letters.iter().map(move |l| {
                    let mut w = w.clone();
                    w.push(*l);
                    w
                })
            })
            .collect();
    }
    out
}

#[test]
fn sphere_matches_brute_force() {
    for i in 0..PRESENTATIONS.len() {
        let p = pres(i);
        for m in 0..=8 {
            let mut expect: Vec<Word> = all_words(&p, m)
                .into_iter()
                .filter(|w| w.windows(2).all(|pair| !pair[0].cancels(pair[1])))
                .map(|w| Word::from_reduced(w).unwrap())
                .collect();
            expect.sort();
            let got = p.sphere(m).unwrap();
            assert_eq!(got, expect, "{p:?} m={m}");
            assert_eq!(p.sphere_size(m), (got.len() as u64).into());
        }
    }
}

/// Cancels adjacent inverse pairs in the order given by `picks` until none
/// remain.
fn reduce_in_order(mut letters: Vec<Letter>, picks: &[usize]) -> Vec<Letter> {
    let mut k = 0;
    loop {
        let spots: Vec<usize> = (0..letters.len().saturating_sub(1))
            .filter(|&i| letters[i].cancels(letters[i + 1]))
            .collect();
        if spots.is_empty() {
            return letters;
        }
        let i = spots[picks.get(k).copied().unwrap_or(0) % spots.len()];
        k += 1;
        letters.drain(i..i + 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reduction_is_confluent(pi in 0usize..4, raw in prop::collection::vec(0usize..64, 0..24), picks in choices(24)) {
        let p = pres(pi);
        let letters = p.letters();
        let seq: Vec<Letter> = raw.iter().map(|&i| letters[i % letters.len()]).collect();
        let reduced = Word::reduce(seq.clone());
        let oracle = reduce_in_order(seq.clone(), &picks);
        prop_assert_eq!(reduced.letters(), &oracle[..]);
        prop_assert!(reduced.len() <= seq.len());
        prop_assert_eq!((seq.len() - reduced.len()) % 2, 0);
        prop_assert_eq!(Word::reduce(reduced.letters().to_vec()), reduced);
    }

    #[test]
    fn group_laws(pi in 0usize..4, a in choices(6), b in choices(6), c in choices(6)) {
        let p = pres(pi);
        let (g, h, k) = (word(&p, &a), word(&p, &b), word(&p, &c));
        prop_assert_eq!(g.mul(&h).mul(&k), g.mul(&h.mul(&k)));
        prop_assert!(g.mul(&g.inverse()).is_identity());
        prop_assert_eq!(g.mul(&h).inverse(), h.inverse().mul(&g.inverse()));
        let text = g.to_string();
        prop_assert_eq!(p.parse_word(&text).unwrap(), g);
    }

    #[test]
    fn union_matches_brute_force(pi in 0usize..4, cyls in prop::collection::vec(choices(3), 0..6), other in prop::collection::vec(choices(3), 0..4)) {
        let p = pres(pi);
        let to_union = |list: &Vec<Vec<usize>>| {
            CylinderUnion::new(list.iter().map(|c| Cylinder::new(word(&p, c))), &p)
        };
        let (u, v) = (to_union(&cyls), to_union(&other));
        let raw: Vec<Cylinder> = cyls.iter().map(|c| Cylinder::new(word(&p, c))).collect();
        let level = p.sphere(4).unwrap();
        let member = |w: &Word| raw.iter().any(|c| c.contains_word(w));
        let inside = level.iter().filter(|w| member(w)).count();
        // Same set, measured by counting depth-4 cells.
        for w in &level {
            prop_assert_eq!(u.contains_word(w), member(w));
        }
        let cell: Exact = Cylinder::new(level[0].clone()).measure(&p);
        prop_assert_eq!(u.measure::<Exact>(&p), cell.clone() * Exact::from_integer(inside.into()));
        // Canonical: no nesting, no complete sibling family, idempotent.
        let cs = u.cylinders();
        for (i, a) in cs.iter().enumerate() {
            for b in &cs[i + 1..] {
                prop_assert!(a.is_disjoint(b));
            }
        }
        for a in cs {
            if a.depth() > 0 {
                let parent = Cylinder::new(a.base().prefix(a.depth() - 1));
                let siblings = parent.children(&p);
                prop_assert!(!siblings.iter().all(|s| cs.contains(s)));
            }
        }
        prop_assert_eq!(&CylinderUnion::new(cs.to_vec(), &p), &u);
        // Boolean operations agree with the cell-level oracle.
        let (i, d, un, comp) = (u.intersection(&v, &p), u.difference(&v, &p), u.union(&v, &p), u.complement(&p));
        for w in &level {
            let (a, b) = (u.contains_word(w), v.contains_word(w));
            prop_assert_eq!(i.contains_word(w), a && b);
            prop_assert_eq!(d.contains_word(w), a && !b);
            prop_assert_eq!(un.contains_word(w), a || b);
            prop_assert_eq!(comp.contains_word(w), !a);
        }
        prop_assert_eq!(u.is_subset(&un, &p), true);
        prop_assert_eq!(d.is_disjoint(&v, &p), true);
        prop_assert_eq!(u.measure::<Exact>(&p) + comp.measure::<Exact>(&p), Exact::one());
    }

    #[test]
    fn cocycle_chain_rule(pi in 0usize..4, a in choices(4), b in choices(4), c in choices(10), extra in 0usize..2) {
        let p = pres(pi);
        let (g, h) = (word(&p, &a), word(&p, &b));
        let depth = g.len() + h.len() + 1 + extra;
        let mut cc = c.clone();
        cc.resize(depth, 0);
        let cell = Cylinder::new(word(&p, &cc));
        let hc = translate_cylinder(&h, &cell).unwrap();
        let lhs: Exact = rn_value(&g.mul(&h), &cell, &p).unwrap();
        let rhs = rn_value::<Exact>(&g, &hc, &p).unwrap() * rn_value::<Exact>(&h, &cell, &p).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        let measured = act_cylinder(&g.mul(&h), &cell, &p).measure::<Exact>(&p) / cell.measure::<Exact>(&p);
        prop_assert_eq!(lhs, measured);
    }

    #[test]
    fn act_cylinder_matches_naive_refinement(pi in 0usize..4, a in choices(5), c in choices(5)) {
        let p = pres(pi);
        let (g, cell) = (word(&p, &a), Cylinder::new(word(&p, &c)));
        let depth = cell.depth().max(g.len() + 1);
        let naive = CylinderUnion::new(
            cell.refine(&p, depth).iter().map(|d| Cylinder::new(g.mul(d.base()))),
            &p,
        );
        let fast = act_cylinder(&g, &cell, &p);
        prop_assert_eq!(&fast, &naive);
        prop_assert_eq!(act_cylinder(&g.inverse(), &cell, &p).measure::<Exact>(&p) > Exact::zero(), true);
    }

    #[test]
    fn point_action_is_compatible(pi in 0usize..4, a in choices(5), b in choices(5), body in choices(10), cl in 1usize..5, depth in 0usize..6) {
        let p = pres(pi);
        let (g, h) = (word(&p, &a), word(&p, &b));
        let Some(w) = point(&p, &Word::identity(), &body, cl) else { return Ok(()) };
        prop_assert_eq!(act_point(&g, &act_point(&h, &w)), act_point(&g.mul(&h), &w));
        let cell = w.locate(depth);
        prop_assert!(act_cylinder(&g, &cell, &p).contains_point(&act_point(&g, &w)));
        let text = w.to_string();
        prop_assert_eq!(text.parse::<BoundaryPoint>().unwrap(), w);
    }

    #[test]
    fn fixed_points_are_fixed(pi in 0usize..4, a in choices(8)) {
        let p = pres(pi);
        let g = word(&p, &a);
        prop_assume!(!g.is_identity());
        let fixed = fixed_points(&g).unwrap();
        prop_assert!(fixed.len() <= 2);
        for x in &fixed {
            prop_assert_eq!(&act_point(&g, x), x);
            prop_assert_eq!(&act_point(&g.inverse(), x), x);
        }
        // g^2 has the same fixed points unless g is an involution.
        if g.mul(&g).is_identity() {
            prop_assert!(fixed.is_empty());
        } else {
            prop_assert_eq!(fixed_points(&g.mul(&g)).unwrap(), fixed);
        }
    }

    #[test]
    fn k_is_an_involution(pi in 0usize..4, m in 1usize..4, xa in choices(3), ya in choices(3), pts in prop::collection::vec((choices(12), 1usize..5, any::<bool>()), 8)) {
        let p = pres(pi);
        let mut xa = xa; xa.resize(m, 0);
        let mut ya = ya; ya.resize(m, 1);
        let (x, y) = (word(&p, &xa), word(&p, &ya));
        let k = PiecewiseTranslation::build_k(&x, &y, 4, &p).unwrap();
        for (body, cl, side) in pts {
            let start = if side { &x } else { &y };
            let Some(w) = point(&p, start, &body, cl) else { continue };
            let image = k.apply(&w);
            let target = if side { &y } else { &x };
            prop_assert!(Cylinder::new(target.clone()).contains_point(&image), "{} -> {}", w, image);
            prop_assert_eq!(k.apply(&image), w);
        }
        let outside = point(&p, &Word::identity(), &[5, 7, 2, 9], 2).unwrap();
        if !Cylinder::new(x.clone()).contains_point(&outside) && !Cylinder::new(y.clone()).contains_point(&outside) {
            prop_assert_eq!(k.apply(&outside), outside);
        }
    }

    #[test]
    fn push_forward_preserves_measure(pi in 0usize..4, m in 1usize..3, xa in choices(2), ya in choices(2), sets in prop::collection::vec(choices(3), 1..4)) {
        let p = pres(pi);
        let mut xa = xa; xa.resize(m, 0);
        let mut ya = ya; ya.resize(m, 1);
        let (x, y) = (word(&p, &xa), word(&p, &ya));
        let k = PiecewiseTranslation::build_k(&x, &y, 4, &p).unwrap();
        let e = CylinderUnion::new(sets.iter().map(|c| Cylinder::new(extend(&p, &x, c))), &p);
        let image = k.push_forward(&e);
        prop_assert_eq!(image.measure::<Exact>(&p), e.measure::<Exact>(&p));
        prop_assert!(image.is_subset(&CylinderUnion::single(Cylinder::new(y.clone())), &p));
        prop_assert_eq!(k.push_forward(&image), e.clone());
        for c in e.cylinders() {
            let w = point(&p, c.base(), &[3, 1, 4, 1, 5], 2);
            if let Some(w) = w {
                prop_assert!(image.contains_point(&k.apply(&w)));
            }
        }
    }
}

#[test]
fn k_involution_on_a_thousand_points() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1000);
    let mut seen = BTreeSet::new();
    let mut checked = 0;
    while checked < 1000 {
        let p = pres(rng.gen_range(0..4));
        let m = rng.gen_range(1..=3);
        let xs: Vec<usize> = (0..m).map(|_| rng.gen_range(0..64)).collect();
        let ys: Vec<usize> = (0..m).map(|_| rng.gen_range(0..64)).collect();
        let (x, y) = (word(&p, &xs), word(&p, &ys));
        let k = PiecewiseTranslation::build_k(&x, &y, 3, &p).unwrap();
        let body: Vec<usize> = (0..rng.gen_range(1..14))
            .map(|_| rng.gen_range(0..64))
            .collect();
        let start = if rng.gen_bool(0.5) { &x } else { &y };
        let Some(w) = point(&p, start, &body, rng.gen_range(1..5)) else {
            continue;
        };
        assert_eq!(k.apply(&k.apply(&w)), w, "k({x}, {y}) at {w}");
        seen.insert(w);
        checked += 1;
    }
    assert!(seen.len() > 500);
}
