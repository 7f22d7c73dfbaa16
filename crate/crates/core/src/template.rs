//! Interval configurations hidden at once under x ↦ (1−1/n)x and x ↦ x−1.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::region::{Ivl, Region};
use crate::scalar::{int, max_s, min_s, rat, Rat};
use crate::Interval;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub n: u64,
    /// the p_i, ascending
    pub points: Vec<Rat>,
    /// (p_k, p_{k+1}) as endpoint pairs of the open intervals
    pub open_intervals: Vec<(Rat, Rat)>,
    /// the shrunk closed intervals T_k
    pub closed_intervals: Vec<Interval>,
}

/// Per-interval cover witnesses (index of an f-cover and of a g-cover).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateCheck {
    pub ok: bool,
    pub witnesses: Vec<(usize, usize)>,
    pub failures: Vec<String>,
}

pub fn contraction_factor(n: u64) -> Rat {
    int(1) - rat(1, n as i64)
}

fn contract(n: u64, x: &Rat) -> Rat {
    contraction_factor(n) * x
}

fn contract_inv(n: u64, x: &Rat) -> Rat {
    x / contraction_factor(n)
}

/// The raw point set P of the construction.
pub fn template_points(n: u64) -> Vec<Rat> {
    assert!(n >= 3, "templates need n >= 3");
    // Every point is some N / n^a with a at most l, the number of
    // contractions that take n below 1. Work with integers over n^l; a
    // point reached by a < l contractions keeps N divisible by n.
    let nb = BigInt::from(n);
    let top = int(n as i64);
    let mut floor = top.clone();
    let mut l = 0u32;
    while floor >= int(1) {
        floor = contract(n, &floor);
        l += 1;
    }
    let scale = nb.pow(l);
    let lo = (floor.numer() * &scale) / floor.denom();
    let one = scale.clone();
    let hi = &nb * &scale;
    let shrink = |x: &BigInt| -> BigInt { x / &nb * (&nb - 1) };
    let mut all: BTreeSet<BigInt> = BTreeSet::from([hi.clone()]);
    // The union of the E_k is the closure of {n} under C and T applied to
    // points in [1, n]; a worklist expands every point once.
    let mut todo: Vec<BigInt> = vec![hi.clone()];
    while let Some(x) = todo.pop() {
        if x < one || x > hi {
            continue;
        }
        let mut y = shrink(&x);
        while y >= lo {
            if all.insert(y.clone()) {
                todo.push(y.clone());
            }
            if &y % &nb != BigInt::from(0) {
                break;
            }
            y = shrink(&y);
        }
        let mut y = &x - &one;
        while y >= lo {
            if all.insert(y.clone()) {
                todo.push(y.clone());
            }
            y -= &one;
        }
    }
    let all: Vec<Rat> = all.into_iter().map(|x| Rat::new(x, scale.clone())).collect();
    let p0 = all.iter().filter(|x| **x > int(0) && **x < int(1)).max().cloned().expect("a point below 1");
    let mut pts: Vec<Rat> = vec![p0];
    pts.extend(all.into_iter().filter(|x| *x >= int(1)));
    pts
}

/// The two generators: x ↦ (1−1/n)x and x ↦ x−1.
#[derive(Clone, Copy)]
enum Gen {
    Contract(u64),
    Shift,
}

/// Order of gen(x) against y, by cross-multiplying (denominators are
/// positive). Much cheaper than building gen(x) and comparing rationals.
fn cmp_image(gen: Gen, x: &Rat, y: &Rat) -> Ordering {
    match gen {
        Gen::Contract(n) => (x.numer() * (n - 1) * y.denom()).cmp(&(y.numer() * n * x.denom())),
        Gen::Shift => ((x.numer() - x.denom()) * y.denom()).cmp(&(y.numer() * x.denom())),
    }
}

/// Indices i of the open intervals (p_i, p_{i+1}) inside (gen(a), gen(b)).
/// The intervals partition [p_0, p_last], so this is a range.
fn covered_range(points: &[Rat], gen: Gen, a: &Rat, b: &Rat) -> std::ops::Range<usize> {
    let first = points.partition_point(|p| cmp_image(gen, a, p) == Ordering::Greater);
    let end = points.partition_point(|p| cmp_image(gen, b, p) != Ordering::Less).saturating_sub(1);
    first..end.max(first)
}

pub fn build_template(n: u64) -> Template {
    let points = template_points(n);
    let open: Vec<(Rat, Rat)> = points.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    let mut closed: Vec<Interval> = Vec::with_capacity(open.len());
    for (a, b) in open.iter() {
        let mut slack: Option<Rat> = None;
        let mut note = |s: Rat| {
            slack = Some(match slack.take() {
                Some(old) => min_s(&old, &s),
                None => s,
            });
        };
        // Both covers lie to the left, so every covered interval is already
        // shrunk. Left slack grows and right slack shrinks with the index, so
        // the extremes sit at the two ends of the covered range.
        let fr = covered_range(&points, Gen::Contract(n), a, b);
        if !fr.is_empty() {
            note(contract_inv(n, closed[fr.start].lo()) - a);
            note(b - contract_inv(n, closed[fr.end - 1].hi()));
        }
        let gr = covered_range(&points, Gen::Shift, a, b);
        if !gr.is_empty() {
            note(closed[gr.start].lo() + int(1) - a);
            note(b - (closed[gr.end - 1].hi() + int(1)));
        }
        // intervals that cover nothing keep three quarters of their length
        let s = slack.unwrap_or_else(|| (b - a) / int(2));
        let cut = s / int(4);
        closed.push(Ivl::of(a + cut.clone(), b - cut));
    }
    Template { n, points, open_intervals: open, closed_intervals: closed }
}

impl Template {
    pub fn last_index(&self) -> usize {
        self.closed_intervals.len() - 1
    }

    pub fn region(&self) -> Region<Rat> {
        Region::normalize(self.closed_intervals.clone()).expect("template region")
    }

    /// 𝒯 ∩ [i, i+1]
    pub fn slice(&self, i: u64) -> Option<Region<Rat>> {
        let lo = int(i as i64);
        let hi = int(i as i64 + 1);
        let comps: Vec<Interval> = self
            .closed_intervals
            .iter()
            .filter(|c| c.hi() > &lo && c.lo() < &hi)
            .map(|c| Ivl::of(max_s(c.lo(), &lo), min_s(c.hi(), &hi)))
            .collect();
        if comps.is_empty() {
            None
        } else {
            Some(Region::normalize(comps).unwrap())
        }
    }

    /// π(𝒯_i) = 𝒯_i − i ⊂ (0, 1)
    pub fn projected_slice(&self, i: u64) -> Option<Region<Rat>> {
        self.slice(i).map(|r| r.translate(&-int(i as i64)))
    }

    pub fn top(&self) -> &Interval {
        &self.closed_intervals[self.last_index()]
    }

    pub fn bottom(&self) -> &Interval {
        &self.closed_intervals[0]
    }
}

pub fn verify_template(t: &Template) -> TemplateCheck {
    let n = t.n;
    let nn = int(n as i64);
    let mut failures = Vec::new();
    let ts = &t.closed_intervals;
    if ts.is_empty() {
        return TemplateCheck { ok: false, witnesses: vec![], failures: vec!["no intervals".into()] };
    }
    for w in ts.windows(2) {
        if w[0].hi() >= w[1].lo() {
            failures.push(format!("intervals {} and {} not disjoint and ordered", w[0], w[1]));
        }
    }
    if ts[0].lo() <= &int(0) || ts[ts.len() - 1].hi() >= &nn {
        failures.push("template leaves (0, n)".into());
    }
    let inside = |c: &Interval, lo: &Rat, hi: &Rat| c.lo() > lo && c.hi() < hi;
    let top_count = ts.iter().filter(|c| inside(c, &(nn.clone() - int(1)), &nn)).count();
    if top_count != 1 || !inside(&ts[ts.len() - 1], &(nn.clone() - int(1)), &nn) {
        failures.push(format!("expected exactly the last interval in (n-1, n), found {}", top_count));
    }
    let bottom_count = ts.iter().filter(|c| inside(c, &int(0), &int(1))).count();
    if bottom_count != 1 || !inside(&ts[0], &int(0), &int(1)) {
        failures.push(format!("expected exactly the first interval in (0, 1), found {}", bottom_count));
    }
    // with the intervals disjoint and ordered, the only candidate cover is
    // the last one whose image starts at or before T_i
    let find = |gen: Gen, ti: &Interval| {
        let j = ts.partition_point(|c| cmp_image(gen, c.lo(), ti.lo()) != Ordering::Greater).checked_sub(1)?;
        (cmp_image(gen, ts[j].hi(), ti.hi()) != Ordering::Less).then_some(j)
    };
    let mut witnesses = Vec::new();
    for (i, ti) in ts.iter().enumerate().take(ts.len() - 1) {
        match (find(Gen::Contract(n), ti), find(Gen::Shift, ti)) {
            (Some(a), Some(b)) => witnesses.push((a, b)),
            (a, b) => {
                if a.is_none() {
                    failures.push(format!("T_{} = {} has no contraction cover", i, ti));
                }
                if b.is_none() {
                    failures.push(format!("T_{} = {} has no translation cover", i, ti));
                }
            }
        }
    }
    TemplateCheck { ok: failures.is_empty(), witnesses, failures }
}
