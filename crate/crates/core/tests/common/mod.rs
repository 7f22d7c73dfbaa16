//! Strategies and property bodies shared by the property suite and the
//! acceptance runner.

#![allow(dead_code)]

use ifs_hide::deform::omega_budget;
use ifs_hide::periodic::{PeriodicRegion, Tail};
use ifs_hide::plmap::PLMap;
use ifs_hide::region::{Ivl, Region};
use ifs_hide::transform::{mirror_map, rescale};
use ifs_hide::{int, rat, Rat, RatMap, RatRegion};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CASES: u32 = 1000;

/// Increasing map on [lo, lo + len] with the given slopes on equal-width
/// pieces weighted by `widths`.
pub fn map_from(lo: &Rat, len: &Rat, widths: &[u32], slopes: &[Rat], y0: &Rat) -> RatMap {
    let total: u32 = widths.iter().sum();
    let mut nodes = vec![(lo.clone(), y0.clone())];
    let (mut x, mut y) = (lo.clone(), y0.clone());
    for (w, s) in widths.iter().zip(slopes) {
        let dx = len * rat(*w as i64, total as i64);
        x += &dx;
        y += s * &dx;
        nodes.push((x.clone(), y.clone()));
    }
    PLMap::compact(nodes).expect("positive slopes give an increasing map")
}

/// Compact PL map on [0, 1] with slopes k/8, k ∈ 1..40.
pub fn any_map() -> impl Strategy<Value = RatMap> {
    (1usize..7)
        .prop_flat_map(|n| (prop::collection::vec(1u32..50, n), prop::collection::vec(1i64..40, n), -8i64..8))
        .prop_map(|(w, s, y0)| {
            let slopes: Vec<Rat> = s.iter().map(|k| rat(*k, 8)).collect();
            map_from(&int(0), &int(1), &w, &slopes, &rat(y0, 8))
        })
}

/// PL map on [lo, lo + len] with every slope strictly within `dev` of 1.
pub fn near_identity(lo: Rat, len: Rat, dev: Rat) -> impl Strategy<Value = RatMap> {
    (1usize..7)
        .prop_flat_map(|n| (prop::collection::vec(1u32..50, n), prop::collection::vec(-99i64..100, n)))
        .prop_map(move |(w, s)| {
            let slopes: Vec<Rat> = s.iter().map(|k| int(1) + &dev * rat(*k, 100)).collect();
            map_from(&lo, &len, &w, &slopes, &lo)
        })
}

/// Canonical region inside [0, 1] on the grid of 1/97.
pub fn region() -> impl Strategy<Value = RatRegion> {
    prop::collection::btree_set(0i64..=97, 2..12).prop_map(|s| {
        let v: Vec<i64> = s.into_iter().collect();
        let comps: Vec<Ivl<Rat>> = v.chunks_exact(2).map(|c| Ivl::of(rat(c[0], 97), rat(c[1], 97))).collect();
        Region::from_canonical(comps).expect("strictly increasing endpoints")
    })
}

/// Possibly overlapping, unsorted raw intervals.
pub fn raw_intervals() -> impl Strategy<Value = Vec<Ivl<Rat>>> {
    prop::collection::vec((-40i64..40, 1i64..30, 1i64..13), 1..10)
        .prop_map(|v| v.into_iter().map(|(a, l, d)| Ivl::of(rat(a, d), rat(a, d) + rat(l, d))).collect())
}

fn ok(b: bool, what: &str) -> Result<(), TestCaseError> {
    if b {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

fn core<T>(r: ifs_hide::Result<T>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

/// μ(f∘g) ≤ μ(f) + μ(g) + μ(f)μ(g).
pub fn mu_composition(f: &RatMap, g: &RatMap) -> Result<(), TestCaseError> {
    // put g's image inside f's domain
    let lo = g.image_lo().unwrap();
    let hi = g.image_hi().unwrap();
    let outer = rescale(f, &Ivl::of(int(0), int(1)), &Ivl::of(lo, hi));
    let h = core(outer.compose(g))?;
    let (a, b) = (outer.mu(), g.mu());
    ok(h.mu() <= &a + &b + &a * &b, "composition bound")
}

pub fn image_preimage(f: &RatMap, r: &RatRegion) -> Result<(), TestCaseError> {
    let img = core(f.image_region(r))?;
    ok(core(f.preimage_region(&img))? == *r, "preimage of image")?;
    // and the other way round for a region inside the image
    let lo = f.image_lo().unwrap();
    let hi = f.image_hi().unwrap();
    let inside = ifs_hide::transform::rescale_region(r, &Ivl::of(int(0), int(1)), &Ivl::of(lo, hi));
    let pre = core(f.preimage_region(&inside))?;
    ok(core(f.image_region(&pre))? == inside, "image of preimage")
}

pub fn normalize_idempotent(raw: Vec<Ivl<Rat>>) -> Result<(), TestCaseError> {
    let once = core(Region::normalize(raw.clone()))?;
    let twice = core(Region::normalize(once.components().to_vec()))?;
    ok(once == twice, "normalize twice")?;
    ok(core(Region::from_canonical(once.components().to_vec()))? == once, "canonical form accepted")?;
    // the union covers exactly the raw intervals
    let covered = raw.iter().all(|c| once.components().iter().any(|k| k.contains_ivl(c)));
    ok(covered, "normalize keeps every interval")
}

pub fn mirror_involution(f: &RatMap, r: &RatRegion) -> Result<(), TestCaseError> {
    ok(mirror_map(&mirror_map(f)) == *f, "map mirror")?;
    ok(r.mirror().mirror() == *r, "region mirror")?;
    // tail shapes must sit strictly inside one period
    let shape = ifs_hide::transform::rescale_region(r, &Ivl::of(int(0), int(1)), &Ivl::of(rat(1, 8), rat(7, 8)));
    let p = core(PeriodicRegion::new(
        Some(r.clone()),
        (int(0), int(1)),
        Some(core(Tail::new(shape, int(1)))?),
        None,
    ))?;
    ok(p.mirror().mirror() == p, "periodic mirror")?;
    // x in r  iff  -x in mirror(r)
    let x = r.components()[0].mid();
    ok(r.mirror().contains_point(&-x), "mirrored point")
}

pub fn rescale_keeps_mu(f: &RatMap, a: i64, len: i64) -> Result<(), TestCaseError> {
    let dst = Ivl::of(rat(a, 7), rat(a, 7) + rat(len, 5));
    let g = rescale(f, &Ivl::of(int(0), int(1)), &dst);
    ok(g.mu() == f.mu(), "mu after rescale")?;
    let back = rescale(&g, &dst, &Ivl::of(int(0), int(1)));
    ok(back == *f, "rescale round trip")
}

/// Two maps with μ < Ω compose to μ < 1/ω.
pub fn omega_budget_holds(omega: u64, f: &RatMap, g: &RatMap) -> Result<(), TestCaseError> {
    let w = omega_budget(omega);
    ok(f.mu() < w && g.mu() < w, "inputs inside the budget")?;
    let h = core(f.compose(g))?;
    ok(h.mu() < rat(1, omega as i64), "composite below 1/omega")?;
    let one = int(1);
    ok((&one + &w) * (&one + &w) - &one <= rat(1, omega as i64), "budget identity")
}

/// Strategy for the budget property: ω, then f on [0, 2] and g on [0, 1].
pub fn budget_case() -> impl Strategy<Value = (u64, RatMap, RatMap)> {
    (3u64..=10).prop_flat_map(|w| {
        let dev = omega_budget(w);
        (Just(w), near_identity(int(0), int(2), dev.clone()), near_identity(int(0), int(1), dev))
    })
}
