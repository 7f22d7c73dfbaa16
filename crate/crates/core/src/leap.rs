//! Quantum leaps: full-line pieces whose g translates by r1 on the left and
//! by r2 < r1 on the right, built from hiding pairs on an orbit circle.
//!
//! The orbit circle of circumference c is cut into τ slots of length R.
//! Every circle map used here moves whole slots (by −1, 0 or +1 slot) and
//! acts inside each slot by a homeomorphism of [0, 1]; every region is a
//! union of unit shapes placed in the slots. [`SlotMap`] and [`SlotRegion`]
//! hold that data; the exact checks run on the lifts.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::deform::{build_geometry_eater, omega_budget, GeometryEater};
use crate::error::{Error, Result};
use crate::farey::parts;
use crate::local_models::{cell, tile};
use crate::periodic::{PeriodicRegion, Tail};
use crate::plmap::{DomainKind, PLMap};
use crate::region::{ClosedSet, Ivl, Region};
use crate::scalar::{int, rat, Rat, Scalar};
use crate::template::{build_template, Template};
use crate::verifier::{check_hiding_piece, HidingReport, IFSPiece, PieceDomain};
use crate::{Interval, RatMap, RatRegion, RatSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// q1 ≤ q2: ramp on [0, ωR], orbit circle of circumference 1/q1
    Standard,
    /// q1 > q2: ramp on [−ωR, 0], orbit circle of circumference 1/q2
    Mirrored,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeapPlan {
    pub omega: u64,
    pub xi: usize,
    pub big_omega: Rat,
    pub lambda: Rat,
    /// r1 − r2
    pub step: Rat,
    pub r1: Rat,
    pub r2: Rat,
    pub p1: i64,
    pub q1: i64,
    pub p2: i64,
    pub q2: i64,
    /// slots per orbit circle
    pub tau: usize,
    pub orientation: Orientation,
}

impl LeapPlan {
    /// Circumference of the orbit circle.
    pub fn circle(&self) -> Rat {
        rat(1, self.q1.min(self.q2))
    }

    /// Period of the tail on the slow side (the one carrying the R-periodic shape).
    pub fn fine_period(&self) -> Rat {
        rat(1, self.q1.max(self.q2))
    }
}

pub fn leap_constants(omega: u64, r1: &Rat, r2: &Rat, xi: usize) -> Result<LeapPlan> {
    if omega < 3 {
        return Err(Error::Precondition(format!("leaps need omega >= 3, got {}", omega)));
    }
    if r1 == r2 {
        return Err(Error::Precondition(format!("r1 = r2 = {} is a connector, not a leap", r1)));
    }
    if r1 < r2 || r2 < &int(1) {
        return Err(Error::Precondition(format!("need r1 > r2 >= 1, got {} and {}", r1, r2)));
    }
    let (p1, q1) = parts(r1);
    let (p2, q2) = parts(r2);
    let step = r1 - r2;
    let orientation = if q1 <= q2 { Orientation::Standard } else { Orientation::Mirrored };
    let qmin = q1.min(q2);
    let qmax = q1.max(q2);
    let tau = int(1) / (&step * int(qmin));
    let fine = int(1) / (&step * int(qmax));
    let need = omega as usize + xi + 2;
    if !tau.is_integer() || !fine.is_integer() {
        return Err(Error::Inadmissible(format!("tau = {} (slot count must be an integer, and 1/q = {} slots)", tau, fine)));
    }
    let tau_n = tau.to_integer().to_string().parse::<usize>().map_err(|_| Error::Inadmissible(format!("tau = {}", tau)))?;
    if tau_n < need {
        return Err(Error::Inadmissible(format!("tau = {} < omega + xi + 2 = {}", tau_n, need)));
    }
    Ok(LeapPlan {
        omega,
        xi,
        big_omega: omega_budget(omega),
        lambda: rat(1, (omega as usize + xi + 1) as i64),
        step,
        r1: r1.clone(),
        r2: r2.clone(),
        p1,
        q1,
        p2,
        q2,
        tau: tau_n,
        orientation,
    })
}

// ---------------------------------------------------------------------------
// slot data

fn unit_mirror_map(f: &RatMap) -> RatMap {
    crate::transform::mirror_map(f).shifted(&int(1), &int(1))
}

fn unit_mirror_region(r: &RatRegion) -> RatRegion {
    r.mirror().translate(&int(1))
}

fn is_unit_identity(f: &RatMap) -> bool {
    f.simplified() == PLMap::identity(int(0), int(1))
}

/// Circle map moving slot s to slot s + shift, acting by `shapes[s]`
/// (identity when absent) inside the slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotMap {
    pub slots: usize,
    pub shift: i64,
    pub shapes: BTreeMap<usize, RatMap>,
}

impl SlotMap {
    pub fn rotation(slots: usize, shift: i64) -> Self {
        SlotMap { slots, shift, shapes: BTreeMap::new() }
    }

    pub fn with(mut self, slot: usize, shape: RatMap) -> Self {
        if is_unit_identity(&shape) {
            self.shapes.remove(&slot);
        } else {
            self.shapes.insert(slot, shape);
        }
        self
    }

    pub fn shape(&self, slot: usize) -> RatMap {
        self.shapes.get(&slot).cloned().unwrap_or_else(|| PLMap::identity(int(0), int(1)))
    }

    fn target(&self, s: usize) -> usize {
        (s as i64 + self.shift).rem_euclid(self.slots as i64) as usize
    }

    /// self ∘ inner
    pub fn compose(&self, inner: &SlotMap) -> Result<SlotMap> {
        let mut out = SlotMap::rotation(self.slots, self.shift + inner.shift);
        for s in 0..self.slots {
            let a = inner.shapes.get(&s);
            let b = self.shapes.get(&inner.target(s));
            let shape = match (a, b) {
                (None, None) => continue,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (Some(a), Some(b)) => b.compose(a)?.simplified(),
            };
            out = out.with(s, shape);
        }
        Ok(out)
    }

    pub fn inverse(&self) -> SlotMap {
        let mut out = SlotMap::rotation(self.slots, -self.shift);
        for (s, f) in &self.shapes {
            out = out.with(self.target(*s), f.invert());
        }
        out
    }

    /// Conjugate by y ↦ −y on the circle.
    pub fn mirror(&self) -> SlotMap {
        let mut out = SlotMap::rotation(self.slots, -self.shift);
        for (s, f) in &self.shapes {
            out = out.with(self.slots - 1 - s, unit_mirror_map(f));
        }
        out
    }

    /// Slots [0, keep) from `self`, the rest from `other` (same shift).
    pub fn spliced(&self, other: &SlotMap, keep: std::ops::Range<usize>) -> SlotMap {
        let mut out = SlotMap::rotation(self.slots, self.shift);
        for s in 0..self.slots {
            let src = if keep.contains(&s) { self } else { other };
            if let Some(f) = src.shapes.get(&s) {
                out = out.with(s, f.clone());
            }
        }
        out
    }

    pub fn mu(&self) -> Rat {
        self.shapes.values().fold(int(0), |m, f| crate::scalar::max_s(&m, &f.mu()))
    }

    /// Lift on [0, c] with slot length c/slots.
    pub fn lift(&self, c: &Rat) -> RatMap {
        let len = c / int(self.slots as i64);
        let off = &len * int(self.shift);
        let mut nodes: Vec<(Rat, Rat)> = Vec::new();
        for s in 0..self.slots {
            let x0 = &len * int(s as i64);
            let y0 = &x0 + &off;
            let f = self.shape(s);
            for (x, y) in f.nodes() {
                let n = (&x0 + &len * x, &y0 + &len * y);
                if nodes.last().map_or(true, |l| l.0 < n.0) {
                    nodes.push(n);
                }
            }
        }
        PLMap::compact(nodes).expect("slot maps are increasing")
    }
}

/// Region on the orbit circle: one unit shape per slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotRegion {
    pub shapes: Vec<RatRegion>,
}

impl SlotRegion {
    pub fn uniform(slots: usize, shape: &RatRegion) -> Self {
        SlotRegion { shapes: vec![shape.clone(); slots] }
    }

    pub fn mirror(&self) -> SlotRegion {
        SlotRegion { shapes: self.shapes.iter().rev().map(unit_mirror_region).collect() }
    }

    pub fn on_circle(&self, c: &Rat) -> RatRegion {
        let len = c / int(self.shapes.len() as i64);
        tile(&int(0), &len, &self.shapes).expect("slot shapes sit inside their slots")
    }

    /// Slot-wise inclusion self ⊆ f(other), where f carries slot s of
    /// `other` to slot s + shift.
    pub fn covered_by(&self, f: &SlotMap, other: &SlotRegion) -> bool {
        (0..self.shapes.len()).all(|s| {
            let img = f.shape(s).image_region(&other.shapes[s]);
            img.map_or(false, |i| i.contains(&self.shapes[f.target(s)]))
        })
    }
}

// ---------------------------------------------------------------------------
// hiding pairs on a circle

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HidingPair {
    /// lift on [0, c]
    pub u: RatMap,
    pub m: RatRegion,
    pub alpha: Rat,
    pub circumference: Rat,
}

impl HidingPair {
    pub fn from_slots(u: &SlotMap, m: &SlotRegion, c: &Rat) -> Self {
        let alpha = -(c / int(u.slots as i64)) * int(u.shift);
        HidingPair { u: u.lift(c), m: m.on_circle(c), alpha, circumference: c.clone() }
    }

    pub fn translation(alpha: Rat, m: RatRegion, c: Rat) -> Result<Self> {
        let u = PLMap::compact(vec![(int(0), -alpha.clone()), (c.clone(), &c - &alpha)])?;
        Ok(HidingPair { u, m, alpha, circumference: c })
    }
}

/// Image of a region of [0, c] under a lift, folded back into [0, c].
pub fn circle_image(u: &RatMap, m: &RatRegion, c: &Rat) -> Result<RatSet> {
    let mut parts = Vec::new();
    for comp in m.components() {
        let a = u.eval(comp.lo())?;
        let b = u.eval(comp.hi())?;
        let k = a.floor_div(c);
        let (a, b) = (&a - c * &k, &b - c * &k);
        if &b <= c {
            parts.push((a, b));
        } else {
            parts.push((a, c.clone()));
            parts.push((int(0), b - c));
        }
    }
    Ok(ClosedSet::from_parts(parts))
}

fn circle_lift_ok(u: &RatMap, c: &Rat) -> bool {
    u.kind() == DomainKind::Compact
        && u.first().0.is_zero()
        && &u.last().0 == c
        && &u.last().1 - &u.first().1 == *c
}

fn circle_contains(m: &RatRegion, x: &Rat, c: &Rat) -> bool {
    let x = x - c * x.floor_div(c);
    m.contains_point(&x) || (x.is_zero() && m.contains_point(c))
}

/// u(0) = −α and M ⊆ u(M); with `pasting` also u(α) = 0 and 0, α ∉ M.
pub fn check_hiding_pair(p: &HidingPair, pasting: bool) -> bool {
    let c = &p.circumference;
    if !circle_lift_ok(&p.u, c) || p.u.first().1 != -p.alpha.clone() {
        return false;
    }
    let h = p.m.hull();
    if h.lo().is_negative() || h.hi() > c {
        return false;
    }
    let Ok(img) = circle_image(&p.u, &p.m, c) else { return false };
    if !p.m.to_set().is_subset_of(&img) {
        return false;
    }
    if pasting {
        if !p.u.in_domain(&p.alpha) || p.u.eval(&p.alpha).map_or(true, |y| !y.is_zero()) {
            return false;
        }
        if circle_contains(&p.m, &int(0), c) || circle_contains(&p.m, &p.alpha, c) {
            return false;
        }
    }
    true
}

/// Clauses linking two hiding pairs: U(0) = −α, M1 ⊆ U(M0), U(α) = 0,
/// V(0) = 0, M0 ⊆ V(M1), and μ of both maps below `eps`. Returns the first
/// violated clause.
pub fn check_connection(p0: &HidingPair, p1: &HidingPair, up: &RatMap, down: &RatMap, eps: &Rat) -> std::result::Result<(), String> {
    let c = &p0.circumference;
    if !circle_lift_ok(up, c) || !circle_lift_ok(down, c) {
        return Err("connecting maps are not circle lifts".into());
    }
    if up.first().1 != -p0.alpha.clone() {
        return Err("U(0) != -alpha".into());
    }
    if up.eval(&p0.alpha).map_or(true, |y| !y.is_zero()) {
        return Err("U(alpha) != 0".into());
    }
    if !down.first().1.is_zero() {
        return Err("V(0) != 0".into());
    }
    let fwd = circle_image(up, &p0.m, c).map_err(|e| e.to_string())?;
    if !p1.m.to_set().is_subset_of(&fwd) {
        return Err("M1 not inside U(M0)".into());
    }
    let back = circle_image(down, &p1.m, c).map_err(|e| e.to_string())?;
    if !p0.m.to_set().is_subset_of(&back) {
        return Err("M0 not inside V(M1)".into());
    }
    if &up.mu() >= eps || &down.mu() >= eps {
        return Err(format!("mu(U) = {}, mu(V) = {} not below {}", up.mu(), down.mu(), eps));
    }
    Ok(())
}

/// U* = u on [0, α] and U on [α, c].
pub fn paste_star(u: &RatMap, big_u: &RatMap, alpha: &Rat) -> Result<RatMap> {
    for (name, m) in [("u", u), ("U", big_u)] {
        let ok = m.in_domain(&int(0))
            && m.in_domain(alpha)
            && m.eval(&int(0)).map_or(false, |y| y == -alpha.clone())
            && m.eval(alpha).map_or(false, |y| y.is_zero());
        if !ok {
            return Err(Error::Precondition(format!("{} lacks the pasting property at {}", name, alpha)));
        }
    }
    let head = u.restrict(&int(0), alpha)?;
    let tail = big_u.restrict(alpha, &big_u.last().0)?;
    let mut nodes = head.nodes().to_vec();
    nodes.extend(tail.nodes().iter().skip(1).cloned());
    PLMap::new(nodes, DomainKind::Compact)
}

// ---------------------------------------------------------------------------
// initial pair and the killing sequence (standard orientation, slot level)

/// Unit-shape data shared by the initial pair and the killing sequence.
struct Slices {
    omega: usize,
    xi: usize,
    tau: usize,
    /// h^j(π𝒯_i) for i ≤ ω−2, j ≤ ξ
    eaten: Vec<Vec<RatRegion>>,
    top: RatRegion,
}

impl Slices {
    fn new(plan: &LeapPlan, t: &Template, e: &GeometryEater) -> Result<Self> {
        let omega = plan.omega as usize;
        let slices = crate::deform::template_slices(t);
        let mut eaten = Vec::with_capacity(omega - 1);
        for s in &slices[..omega - 1] {
            let mut row = vec![s.clone()];
            for _ in 0..plan.xi {
                let next = e.h.image_region(row.last().unwrap())?;
                row.push(next);
            }
            eaten.push(row);
        }
        Ok(Slices { omega, xi: plan.xi, tau: plan.tau, eaten, top: slices[omega - 1].clone() })
    }

    fn j(&self, i: usize) -> usize {
        self.tau - 1 - i
    }

    /// Region of the j-th pair of the killing sequence (j = ξ+1 is the
    /// translation pair).
    fn region(&self, step: usize) -> SlotRegion {
        let mut r = SlotRegion::uniform(self.tau, &self.top);
        if step > self.xi {
            return r;
        }
        for i in 0..self.omega - 1 {
            r.shapes[i] = self.eaten[i][step].clone();
        }
        for i in 0..=self.xi - step {
            r.shapes[self.j(i)] = self.eaten[0][step + i].clone();
        }
        r
    }

    fn pair_map(&self, step: usize, e: &GeometryEater) -> SlotMap {
        let mut u = SlotMap::rotation(self.tau, -1);
        if step > self.xi {
            return u;
        }
        for i in 0..self.xi - step {
            u = u.with(self.j(i), e.h.clone());
        }
        u.with(self.j(self.xi - step), e.alphas[0].clone())
    }

    /// (U, V, Q): the offset connecting map, the backward map and the
    /// slot-wise forward map from pair `step` to pair `step + 1`.
    fn connection(&self, step: usize, e: &GeometryEater) -> Result<(SlotMap, SlotMap, SlotMap)> {
        let h = &e.h;
        let hinv = h.invert();
        let mut up = SlotMap::rotation(self.tau, -1);
        let mut down = SlotMap::rotation(self.tau, 0);
        let mut onward = SlotMap::rotation(self.tau, 0);
        if step < self.xi {
            let h2 = h.compose(h)?.simplified();
            let ah = e.alphas[0].compose(h)?.simplified();
            for i in 0..self.omega - 1 {
                up = up.with(i, h.clone());
                down = down.with(i, hinv.clone());
                onward = onward.with(i, h.clone());
            }
            let last = self.xi - step;
            for i in 0..last {
                down = down.with(self.j(i), hinv.clone());
                onward = onward.with(self.j(i), h.clone());
            }
            for i in 0..last.saturating_sub(1) {
                up = up.with(self.j(i), h2.clone());
            }
            up = up.with(self.j(last - 1), ah).with(self.j(last), e.alphas[0].clone());
            down = down.with(self.j(last), e.betas[0].clone());
            onward = onward.with(self.j(last), e.alphas[0].clone());
        } else {
            for i in 0..self.omega - 1 {
                up = up.with(i, e.alphas[i].clone());
                down = down.with(i, e.betas[i].clone());
                onward = onward.with(i, e.alphas[i].clone());
            }
            up = up.with(self.j(0), e.alphas[0].clone());
            down = down.with(self.j(0), e.betas[0].clone());
            onward = onward.with(self.j(0), e.alphas[0].clone());
        }
        Ok((up, down, onward))
    }
}

#[derive(Clone, Debug)]
pub struct InitialPair {
    pub pair: HidingPair,
    /// the ramp gadget on [0, c]: (1−1/ω)x on [0, ωR], the pair's map after
    pub nu: RatMap,
    pub m_t: RatRegion,
    pub m_prime: RatRegion,
    pub m_s: RatRegion,
    pub slot_map: SlotMap,
    pub slot_region: SlotRegion,
}

fn ramp_lift(u: &SlotMap, plan: &LeapPlan) -> Result<RatMap> {
    let c = plan.circle();
    let r = &plan.step;
    let w = int(plan.omega as i64);
    let start = r * &w;
    let lift = u.lift(&c);
    let mut nodes = vec![(int(0), int(0))];
    nodes.extend(lift.nodes().iter().filter(|n| n.0 >= start).cloned());
    let nu = PLMap::compact(nodes)?;
    if nu.eval(&start)? != &start - r {
        return Err(Error::Verification { stage: "initial pair".into(), detail: "ramp does not meet the rotation".into() });
    }
    Ok(nu)
}

pub fn build_initial_pair(plan: &LeapPlan, t: &Template, e: &GeometryEater) -> Result<InitialPair> {
    if plan.tau < plan.omega as usize + plan.xi + 2 {
        return Err(Error::Inadmissible(format!("tau = {} leaves no room for the eater", plan.tau)));
    }
    if t.n != plan.omega || e.omega != plan.omega || e.xi != plan.xi {
        return Err(Error::Precondition("template, eater and plan disagree on omega or xi".into()));
    }
    let sl = Slices::new(plan, t, e)?;
    Ok(initial_from(&sl, plan, t, e)?)
}

fn initial_from(sl: &Slices, plan: &LeapPlan, t: &Template, e: &GeometryEater) -> Result<InitialPair> {
    let c = plan.circle();
    let r = &plan.step;
    let omega = plan.omega as usize;
    let u = sl.pair_map(0, e);
    let m = sl.region(0);
    let pair = HidingPair::from_slots(&u, &m, &c);
    let nu = ramp_lift(&u, plan)?;
    let pick = |range: &mut dyn Iterator<Item = usize>| -> Result<RatRegion> {
        let idx: Vec<usize> = range.collect();
        let comps: Vec<Interval> = idx
            .iter()
            .flat_map(|&s| m.shapes[s].components().iter().map(move |k| (s, k.clone())))
            .map(|(s, k)| Ivl::of(r * (int(s as i64) + k.lo()), r * (int(s as i64) + k.hi())))
            .collect();
        Region::normalize(comps)
    };
    let m_t = pick(&mut (0..omega))?;
    let m_prime = pick(&mut (sl.tau - 1 - plan.xi..sl.tau))?;
    let m_s = pick(&mut (omega..sl.tau - 1 - plan.xi))?;
    let ip = InitialPair { pair, nu, m_t, m_prime, m_s, slot_map: u, slot_region: m };
    verify_initial_pair(&ip, plan, t, e)?;
    Ok(ip)
}

fn fail(stage: &str, detail: impl Into<String>) -> Error {
    Error::Verification { stage: stage.into(), detail: detail.into() }
}

pub fn verify_initial_pair(ip: &InitialPair, plan: &LeapPlan, t: &Template, e: &GeometryEater) -> Result<()> {
    let c = plan.circle();
    let r = &plan.step;
    let stage = "initial pair";
    if !check_hiding_pair(&ip.pair, true) {
        return Err(fail(stage, "hiding pair clauses"));
    }
    if ip.pair.u.mu() >= rat(1, plan.omega as i64) {
        return Err(fail(stage, "mu(u_I) too large"));
    }
    let ramp_end = r * int(plan.omega as i64);
    let head = ip.pair.u.restrict(&int(0), &ramp_end)?.simplified();
    if head != PLMap::compact(vec![(int(0), -r.clone()), (ramp_end.clone(), &ramp_end - r)])? {
        return Err(fail(stage, "u_I is not the rotation on [0, omega R]"));
    }
    let inner = ip.pair.m.to_set().clip(&int(0), &(&c - r));
    if !inner.is_subset_of(&ip.nu.image_set(&ip.pair.m.to_set())?) {
        return Err(fail(stage, "ramp condition"));
    }
    let union = ip.m_t.union(&ip.m_prime).union(&ip.m_s);
    if union != ip.pair.m {
        return Err(fail(stage, "M_I differs from M' + M_t + M_s"));
    }
    // the bottom slice travels around the circle picking up h once per slot
    let bottom = t.projected_slice(0).ok_or(Error::EmptyRegion)?;
    let mut cur = ip.pair.m.to_set().clip(&int(0), r).to_region()?;
    let mut expect = bottom.clone();
    for i in 1..=plan.xi + 1 {
        cur = circle_image(&ip.pair.u, &cur, &c)?.to_region()?;
        let slot = Ivl::of(&c - r * int(i as i64), &c - r * int(i as i64 - 1));
        let seen = cur.affine(&(int(1) / r), slot.lo(), &int(0));
        if seen != expect {
            return Err(fail(stage, format!("trace differs after {} turns", i)));
        }
        expect = e.h.image_region(&expect)?;
    }
    Ok(())
}

impl InitialPair {
    /// Whether u_I(M_I) ⊆ M_I. Together with the hiding inclusion this would
    /// force u_I(M_I) = M_I, which the slot layout does not give: u_I moves
    /// each template slot onto the next smaller one. Nothing downstream
    /// relies on it, so it is reported rather than enforced.
    pub fn forward_invariant(&self) -> Result<bool> {
        let img = circle_image(&self.pair.u, &self.pair.m, &self.pair.circumference)?;
        Ok(img.is_subset_of(&self.pair.m.to_set()))
    }
}

#[derive(Clone, Debug)]
pub struct KillingSequence {
    /// pairs 0..=ξ+1; the last one is the translation pair
    pub pairs: Vec<HidingPair>,
    /// U_j with the pasting property
    pub ups: Vec<RatMap>,
    pub downs: Vec<RatMap>,
    pub slot_maps: Vec<SlotMap>,
    pub slot_regions: Vec<SlotRegion>,
    pub slot_ups: Vec<SlotMap>,
    pub slot_downs: Vec<SlotMap>,
    /// offset-free forward maps M_j → M_{j+1} (used by the mirrored leap)
    pub slot_onward: Vec<SlotMap>,
}

impl KillingSequence {
    pub fn steps(&self) -> usize {
        self.ups.len()
    }
}

pub fn build_killing_sequence(ip: &InitialPair, plan: &LeapPlan, t: &Template, e: &GeometryEater) -> Result<KillingSequence> {
    let sl = Slices::new(plan, t, e)?;
    let c = plan.circle();
    let n = plan.xi + 2;
    let mut slot_maps: Vec<SlotMap> = (0..n).map(|k| sl.pair_map(k, e)).collect();
    let mut slot_regions: Vec<SlotRegion> = (0..n).map(|k| sl.region(k)).collect();
    if slot_maps[0] != ip.slot_map || slot_regions[0] != ip.slot_region {
        return Err(fail("killing sequence", "does not start at the initial pair"));
    }
    slot_maps[0] = ip.slot_map.clone();
    slot_regions[0] = ip.slot_region.clone();
    let links = (0..n - 1).map(|k| sl.connection(k, e)).collect::<Result<Vec<_>>>()?;
    let (slot_ups, rest): (Vec<SlotMap>, Vec<(SlotMap, SlotMap)>) = links.into_iter().map(|(a, b, q)| (a, (b, q))).unzip();
    let (slot_downs, slot_onward): (Vec<SlotMap>, Vec<SlotMap>) = rest.into_iter().unzip();
    let pairs: Vec<HidingPair> = (0..n).map(|k| HidingPair::from_slots(&slot_maps[k], &slot_regions[k], &c)).collect();
    let ups: Vec<RatMap> = slot_ups.iter().map(|m| m.lift(&c)).collect();
    let downs: Vec<RatMap> = slot_downs.iter().map(|m| m.lift(&c)).collect();
    let eps = rat(1, plan.omega as i64);
    let bad = (0..n).into_par_iter().find_first(|&k| !check_hiding_pair(&pairs[k], true));
    if let Some(k) = bad {
        return Err(fail("killing sequence", format!("pair {} is not a hiding pair", k)));
    }
    let bad = (0..n - 1).into_par_iter().find_map_first(|k| {
        let mut r = check_connection(&pairs[k], &pairs[k + 1], &ups[k], &downs[k], &eps);
        if r.is_ok() && !slot_regions[k + 1].covered_by(&slot_onward[k], &slot_regions[k]) {
            r = Err("M_{j+1} not inside the slot-wise forward image".into());
        }
        if r.is_ok() && slot_onward[k].mu() >= eps {
            r = Err("slot-wise forward map too steep".into());
        }
        r.err().map(|msg| (k, msg))
    });
    if let Some((k, msg)) = bad {
        return Err(fail("killing sequence", format!("step {}: {}", k, msg)));
    }
    let last = &pairs[n - 1];
    let translation = HidingPair::translation(plan.step.clone(), last.m.clone(), c.clone())?;
    if last.u.simplified() != translation.u {
        return Err(fail("killing sequence", "final pair is not a translation pair"));
    }
    Ok(KillingSequence { pairs, ups, downs, slot_maps, slot_regions, slot_ups, slot_downs, slot_onward })
}

// ---------------------------------------------------------------------------
// realization

#[derive(Clone, Debug)]
pub struct LeapPiece {
    pub piece: IFSPiece,
    pub plan: LeapPlan,
    /// sequence length (transitions between pairs)
    pub i0: usize,
    /// left tail (shape, period), right tail (shape, period)
    pub left: (RatRegion, Rat),
    pub right: (RatRegion, Rat),
    pub report: HidingReport,
}

/// Everything needed to realize leaps for one ω.
#[derive(Clone, Debug)]
pub struct LeapKit {
    pub template: Template,
    pub eater: GeometryEater,
}

impl LeapKit {
    pub fn new(omega: u64) -> Result<Self> {
        let template = build_template(omega);
        let eater = build_geometry_eater(&template, omega, &omega_budget(omega))?;
        Ok(LeapKit { template, eater })
    }

    pub fn plan(&self, r1: &Rat, r2: &Rat) -> Result<LeapPlan> {
        leap_constants(self.template.n, r1, r2, self.eater.xi)
    }
}

/// Slot patches of one slot map placed on the interval starting at `start`.
fn slot_patches<'a>(m: &'a SlotMap, start: &Rat, slot_len: &Rat, out: &mut Vec<(Interval, &'a RatMap)>, skip: &[usize]) {
    for (s, f) in &m.shapes {
        if !skip.contains(s) {
            out.push((cell(start, slot_len, *s as i64), f));
        }
    }
}

fn finish(piece: IFSPiece, plan: LeapPlan, i0: usize, left: (RatRegion, Rat), right: (RatRegion, Rat)) -> Result<LeapPiece> {
    let report = check_hiding_piece(&piece, false)?;
    if !report.passed {
        return Err(fail("quantum leap", report.render()));
    }
    let bound = rat(1, plan.omega as i64);
    let (mf, mg) = piece.mu();
    if mf > bound || mg > bound {
        return Err(fail("quantum leap", format!("mu(F) = {}, mu(G) = {}", mf, mg)));
    }
    Ok(LeapPiece { piece, plan, i0, left, right, report })
}

pub fn realize_leap(omega: u64, r1: &Rat, r2: &Rat) -> Result<LeapPiece> {
    realize_leap_with(&LeapKit::new(omega)?, r1, r2)
}

pub fn realize_leap_with(kit: &LeapKit, r1: &Rat, r2: &Rat) -> Result<LeapPiece> {
    let plan = kit.plan(r1, r2)?;
    if plan.orientation != Orientation::Standard {
        return Err(Error::Precondition(format!("q1 = {} > q2 = {}: use the mirrored leap", plan.q1, plan.q2)));
    }
    let ip = build_initial_pair(&plan, &kit.template, &kit.eater)?;
    let ks = build_killing_sequence(&ip, &plan, &kit.template, &kit.eater)?;
    let c = plan.circle();
    let rr = &plan.step;
    let w = int(plan.omega as i64);
    let (p1, q1) = (plan.p1, plan.q1);
    let grp = crate::local_models::Grouping { p: p1, q: q1 };
    let i0 = ks.steps() as i64;
    let g1 = PLMap::new(vec![(int(0), r1.clone()), (rr * &w, rr * &w + r2)], DomainKind::FullLine)?;
    let f1 = PLMap::translation(int(-1));
    let stars: Vec<SlotMap> = (0..i0 as usize).map(|k| ks.slot_maps[k].spliced(&ks.slot_ups[k], 0..1)).collect();
    let end = (i0 + 1) * (p1 + q1);
    let mut g_patches = Vec::new();
    let mut f_patches = Vec::new();
    let ramp_slots: Vec<usize> = (0..plan.omega as usize).collect();
    for i in 0..end {
        let start = &c * int(i);
        let k = grp.group(i);
        if k == 0 {
            let skip: &[usize] = if i == 0 { &ramp_slots } else { &[] };
            slot_patches(&ks.slot_maps[0], &start, rr, &mut g_patches, skip);
            continue;
        }
        let k = (k - 1) as usize;
        if grp.in_left(i) {
            let m = if i == grp.h(k as i64 + 1).start { &stars[k] } else { &ks.slot_ups[k] };
            slot_patches(m, &start, rr, &mut g_patches, &[]);
        } else {
            slot_patches(&ks.slot_maps[k + 1], &start, rr, &mut g_patches, &[]);
            slot_patches(&ks.slot_downs[k], &start, rr, &mut f_patches, &[]);
        }
    }
    let g = g1.fill_unit_shapes(&g_patches)?;
    let f = f1.fill_unit_shapes(&f_patches)?;
    let shape_of = |i: i64| -> &SlotRegion {
        let k = grp.group(i);
        let idx = if i < p1 + q1 {
            0
        } else if i >= end {
            i0
        } else if grp.in_left(i) {
            k - 1
        } else {
            k
        };
        &ks.slot_regions[idx as usize]
    };
    let lo_i = -(p1 + q1);
    let hi = (&c * int(end + p1 + q1)).ceil();
    let hi_i = (&hi / &c).to_integer().to_string().parse::<i64>().expect("window index");
    let core = tile(&(&c * int(lo_i)), rr, (lo_i..hi_i).flat_map(|i| shape_of(i).shapes.iter()))?;
    let left_shape = ks.slot_regions[0].on_circle(&c);
    let fine = plan.fine_period();
    let fine_slots = (&fine / rr).to_integer().to_string().parse::<usize>().expect("slot count");
    let right_shape = SlotRegion::uniform(fine_slots, &ks.slot_regions[i0 as usize].shapes[0]).on_circle(&fine);
    let k = PeriodicRegion::new(
        Some(core),
        (&c * int(lo_i), hi),
        Some(Tail::new(left_shape.clone(), c.clone())?),
        Some(Tail::new(right_shape.clone(), fine.clone())?),
    )?;
    let piece = IFSPiece::new(f, g, Some(k), PieceDomain::FullLine);
    log::debug!("leap {} -> {}: {} G nodes, {} K components", r1, r2, piece.g.nodes().len(), piece.k.as_ref().unwrap().core().map_or(0, |c| c.len()));
    finish(piece, plan, i0 as usize, (left_shape, c), (right_shape, fine))
}

/// Mirrored gadgets: the standard pairs reflected by y ↦ −y, linked by
/// (P_k, Q_k) where P_k = mirror(u_k ∘ V_k) carries an offset of +R and
/// Q_k = mirror of the slot-wise forward map.
pub struct MirroredGadgets {
    pub maps: Vec<SlotMap>,
    pub regions: Vec<SlotRegion>,
    pub toward: Vec<SlotMap>,
    pub away: Vec<SlotMap>,
}

pub fn mirrored_gadgets(ks: &KillingSequence) -> Result<MirroredGadgets> {
    let maps = ks.slot_maps.iter().map(SlotMap::mirror).collect();
    let regions = ks.slot_regions.iter().map(SlotRegion::mirror).collect();
    let toward = (0..ks.steps())
        .map(|k| Ok(ks.slot_maps[k].compose(&ks.slot_downs[k])?.mirror()))
        .collect::<Result<Vec<_>>>()?;
    let away = ks.slot_onward.iter().map(SlotMap::mirror).collect();
    Ok(MirroredGadgets { maps, regions, toward, away })
}

pub fn realize_leap_mirrored(omega: u64, r1: &Rat, r2: &Rat) -> Result<LeapPiece> {
    realize_leap_mirrored_with(&LeapKit::new(omega)?, r1, r2)
}

pub fn realize_leap_mirrored_with(kit: &LeapKit, r1: &Rat, r2: &Rat) -> Result<LeapPiece> {
    let plan = kit.plan(r1, r2)?;
    if plan.orientation != Orientation::Mirrored {
        return Err(Error::Precondition(format!("q1 = {} <= q2 = {}: use the standard leap", plan.q1, plan.q2)));
    }
    let ip = build_initial_pair(&plan, &kit.template, &kit.eater)?;
    let ks = build_killing_sequence(&ip, &plan, &kit.template, &kit.eater)?;
    let mg = mirrored_gadgets(&ks)?;
    let c = plan.circle();
    let rr = &plan.step;
    let w = int(plan.omega as i64);
    let tau = plan.tau;
    let (p2, q2) = (plan.p2, plan.q2);
    let zone_len = p2 + q2;
    let i0 = ks.steps() as i64;
    // j counts intervals leftwards from the ramp interval I(−1)
    let zone = |j: i64| -> i64 { if j < 0 { 0 } else { (j / zone_len).min(i0) } };
    let g1 = PLMap::new(vec![(-(rr * &w), -(rr * &w) + r1), (int(0), r2.clone())], DomainKind::FullLine)?;
    let f1 = PLMap::translation(int(-1));
    let far = (i0 + 2) * zone_len;
    let ramp_slots: Vec<usize> = (tau - plan.omega as usize..tau).collect();
    // sliding intervals: all but the last slot stay in the zone, the last
    // slot lands in the previous one
    let mut pasted: BTreeMap<usize, SlotMap> = BTreeMap::new();
    for j in 0..far {
        let (z, zm, zl) = (zone(j), zone(j - p2), zone(j - p2 - 1));
        if z > 0 && zm == z && zl == z - 1 {
            let zi = z as usize;
            pasted.entry(zi).or_insert_with(|| mg.maps[zi].spliced(&mg.toward[zi - 1], 0..tau - 1));
        }
    }
    let mut g_patches = Vec::new();
    let mut f_patches = Vec::new();
    for j in 0..far {
        let start = &c * int(-1 - j);
        let (z, zm, zl) = (zone(j), zone(j - p2), zone(j - p2 - 1));
        let gmap = if zm == z && zl == z {
            &mg.maps[z as usize]
        } else if zm == z - 1 {
            &mg.toward[(z - 1) as usize]
        } else {
            &pasted[&(z as usize)]
        };
        let skip: &[usize] = if j == 0 { &ramp_slots } else { &[] };
        slot_patches(gmap, &start, rr, &mut g_patches, skip);
        if zone(j + q2) == z + 1 {
            slot_patches(&mg.away[z as usize], &start, rr, &mut f_patches, &[]);
        }
    }
    let g = g1.fill_unit_shapes(&g_patches)?;
    let f = f1.fill_unit_shapes(&f_patches)?;
    let lo = -(&c * int(far + zone_len)).ceil();
    let lo_i = (&lo / &c).to_integer().to_string().parse::<i64>().expect("window index");
    let hi_i = zone_len;
    let shape_of = |i: i64| &mg.regions[zone(-1 - i) as usize];
    let core = tile(&(&c * int(lo_i)), rr, (lo_i..hi_i).flat_map(|i| shape_of(i).shapes.iter()))?;
    let right_shape = mg.regions[0].on_circle(&c);
    let fine = plan.fine_period();
    let fine_slots = (&fine / rr).to_integer().to_string().parse::<usize>().expect("slot count");
    let left_shape = SlotRegion::uniform(fine_slots, &mg.regions[i0 as usize].shapes[0]).on_circle(&fine);
    let k = PeriodicRegion::new(
        Some(core),
        (lo, &c * int(hi_i)),
        Some(Tail::new(left_shape.clone(), fine.clone())?),
        Some(Tail::new(right_shape.clone(), c.clone())?),
    )?;
    let piece = IFSPiece::new(f, g, Some(k), PieceDomain::FullLine);
    finish(piece, plan, i0 as usize, (left_shape, fine), (right_shape, c))
}

/// Standard or mirrored, whichever the denominators call for.
pub fn realize_any_leap(kit: &LeapKit, r1: &Rat, r2: &Rat) -> Result<LeapPiece> {
    match kit.plan(r1, r2)?.orientation {
        Orientation::Standard => realize_leap_with(kit, r1, r2),
        Orientation::Mirrored => realize_leap_mirrored_with(kit, r1, r2),
    }
}

/// Rough size of a realized leap: (orbit circles laid out, slots).
pub fn leap_size(plan: &LeapPlan) -> (u128, u128) {
    let (p, q) = match plan.orientation {
        Orientation::Standard => (plan.p1, plan.q1),
        Orientation::Mirrored => (plan.p2, plan.q2),
    };
    let cells = ((plan.xi as u128 + 4) * (p + q) as u128) + 2 * (p + q) as u128;
    (cells, cells * plan.tau as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg(p: &[(i64, i64, i64, i64)]) -> RatRegion {
        Region::from_pairs(&p.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn constants() {
        let p = leap_constants(3, &int(2), &rat(211, 106), 101).unwrap();
        assert_eq!(p.tau, 106);
        assert_eq!(p.step, rat(1, 106));
        assert_eq!(p.lambda, rat(1, 105));
        assert_eq!(p.orientation, Orientation::Standard);
        let m = leap_constants(3, &rat(107, 106), &int(1), 101).unwrap();
        assert_eq!(m.orientation, Orientation::Mirrored);
        assert_eq!(m.tau, 106);
        assert!(matches!(leap_constants(3, &rat(7, 5), &rat(4, 3), 101), Err(Error::Inadmissible(_))));
        assert!(matches!(leap_constants(3, &int(2), &int(2), 1), Err(Error::Precondition(_))));
        // τ must be an integer
        assert!(matches!(leap_constants(3, &int(1), &rat(3, 5), 0), Err(Error::Precondition(_))));
        assert!(matches!(leap_constants(3, &int(2), &rat(7, 5), 0), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn translation_pairs() {
        let m = reg(&[(1, 8, 1, 4), (5, 8, 3, 4)]);
        let p = HidingPair::translation(rat(1, 2), m, int(1)).unwrap();
        assert!(check_hiding_pair(&p, true));
        let bad = HidingPair::translation(rat(1, 2), reg(&[(0, 1, 1, 4), (1, 2, 3, 4)]), int(1)).unwrap();
        assert!(check_hiding_pair(&bad, false));
        assert!(!check_hiding_pair(&bad, true));
        let lost = HidingPair::translation(rat(1, 2), reg(&[(1, 8, 1, 4)]), int(1)).unwrap();
        assert!(!check_hiding_pair(&lost, false));
    }

    #[test]
    fn pasting() {
        let a = rat(1, 4);
        let u = PLMap::compact(vec![(int(0), -a.clone()), (int(1), rat(3, 4))]).unwrap();
        assert_eq!(paste_star(&u, &u, &a).unwrap().simplified(), u);
        let big = PLMap::compact(vec![(int(0), -a.clone()), (a.clone(), int(0)), (rat(1, 2), rat(1, 8)), (int(1), rat(3, 4))])
            .unwrap();
        let small = PLMap::compact(vec![(int(0), -a.clone()), (rat(1, 8), rat(-1, 16)), (a.clone(), int(0)), (int(1), rat(3, 4))])
            .unwrap();
        let star = paste_star(&small, &big, &a).unwrap();
        assert_eq!(star.eval(&rat(1, 8)).unwrap(), rat(-1, 16));
        assert_eq!(star.eval(&rat(1, 2)).unwrap(), rat(1, 8));
        let shifted = PLMap::compact(vec![(int(0), -a.clone()), (int(1), rat(3, 4))]).unwrap().shifted(&int(0), &rat(1, 16));
        assert!(paste_star(&u, &shifted, &a).is_err());
    }

    #[test]
    fn slot_algebra() {
        let bump = PLMap::compact(vec![(int(0), int(0)), (rat(1, 2), rat(1, 3)), (int(1), int(1))]).unwrap();
        let u = SlotMap::rotation(5, -1).with(2, bump.clone());
        let inv = u.inverse();
        let id = u.compose(&inv).unwrap();
        assert_eq!(id, SlotMap::rotation(5, 0));
        assert_eq!(u.mirror().mirror(), u);
        assert_eq!(u.mirror().shift, 1);
        assert!(u.mirror().shapes.contains_key(&2));
        let lift = u.lift(&int(1));
        assert_eq!(lift.eval(&int(0)).unwrap(), rat(-1, 5));
        assert_eq!(lift.eval(&rat(1, 2)).unwrap(), rat(1, 5) + rat(1, 15));
    }
}
