//! Exact hiding-region checks, boundary exclusions and orbit audits.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::periodic::PeriodicRegion;
use crate::plmap::{DomainKind, PLMap};
use crate::region::{ClosedSet, Ivl, Region};
use crate::scalar::{int, max_s, min_s, Rat, Scalar};
use crate::{Interval, RatMap, RatPeriodic, RatRegion, RatSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PieceDomain {
    Compact(Interval),
    /// [lo, ∞)
    HalfLine(Rat),
    FullLine,
}

impl PieceDomain {
    pub fn lo(&self) -> Option<&Rat> {
        match self {
            PieceDomain::Compact(i) => Some(i.lo()),
            PieceDomain::HalfLine(lo) => Some(lo),
            PieceDomain::FullLine => None,
        }
    }

    pub fn hi(&self) -> Option<&Rat> {
        match self {
            PieceDomain::Compact(i) => Some(i.hi()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PieceDomain::Compact(_) => "unit_interval",
            PieceDomain::HalfLine(_) => "half_line",
            PieceDomain::FullLine => "full_line",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassTag {
    C,
    DAnalogue,
    P,
}

impl ClassTag {
    pub fn name(self) -> &'static str {
        match self {
            ClassTag::C => "C-class",
            ClassTag::DAnalogue => "D-class-analogue",
            ClassTag::P => "P-class",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "C-class" => ClassTag::C,
            "D-class-analogue" => ClassTag::DAnalogue,
            "P-class" => ClassTag::P,
            _ => return None,
        })
    }
}

/// Pair of maps plus a candidate hiding region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IFSPiece {
    pub f: RatMap,
    pub g: RatMap,
    pub k: Option<RatPeriodic>,
    pub domain: PieceDomain,
    pub tags: BTreeSet<ClassTag>,
}

/// Translation amounts of the unbounded ends.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TailShifts {
    pub f_left: Option<Rat>,
    pub f_right: Option<Rat>,
    pub g_left: Option<Rat>,
    pub g_right: Option<Rat>,
}

impl IFSPiece {
    pub fn new(f: RatMap, g: RatMap, k: Option<RatPeriodic>, domain: PieceDomain) -> Self {
        IFSPiece { f, g, k, domain, tags: BTreeSet::new() }
    }

    pub fn with_tag(mut self, t: ClassTag) -> Self {
        self.tags.insert(t);
        self
    }

    pub fn tail_shifts(&self) -> TailShifts {
        let left = !matches!(self.domain, PieceDomain::FullLine);
        let right = matches!(self.domain, PieceDomain::Compact(_));
        TailShifts {
            f_left: (!left).then(|| self.f.left_shift()),
            f_right: (!right).then(|| self.f.right_shift()),
            g_left: (!left).then(|| self.g.left_shift()),
            g_right: (!right).then(|| self.g.right_shift()),
        }
    }

    pub fn mu(&self) -> (Rat, Rat) {
        (self.f.mu(), self.g.mu())
    }

    pub fn region(&self) -> Result<&RatPeriodic> {
        self.k.as_ref().ok_or_else(|| Error::Precondition("piece carries no region".into()))
    }
}

/// f(0) = 0, g(1) = 1, f below and g above the diagonal inside (0, 1).
pub fn is_p_class(f: &RatMap, g: &RatMap) -> bool {
    let unit = |m: &RatMap| {
        m.kind() == DomainKind::Compact && m.first().0 == int(0) && m.last().0 == int(1)
    };
    if !unit(f) || !unit(g) {
        return false;
    }
    if f.first().1 != int(0) || g.last().1 != int(1) {
        return false;
    }
    let f_ok = f.nodes().iter().filter(|(x, _)| x.is_positive()).all(|(x, y)| y < x);
    let g_ok = g.nodes().iter().filter(|(x, _)| x < &int(1)).all(|(x, y)| y > x);
    f_ok && g_ok && g.first().1.is_positive() && f.last().1 < int(1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub map_tag: String,
    pub component: Interval,
    pub uncovered: (Rat, Rat),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HidingReport {
    pub passed: bool,
    pub strong: bool,
    pub violations: Vec<Violation>,
    pub window_used: Interval,
    pub notes: Vec<String>,
}

impl HidingReport {
    /// Stable text rendering (field order fixed).
    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "passed: {}", self.passed).unwrap();
        writeln!(s, "strong: {}", self.strong).unwrap();
        writeln!(s, "window: {}", self.window_used).unwrap();
        writeln!(s, "violations: {}", self.violations.len()).unwrap();
        for v in &self.violations {
            writeln!(s, "  {} component {} uncovered [{}, {}]", v.map_tag, v.component, v.uncovered.0, v.uncovered.1)
                .unwrap();
        }
        for n in &self.notes {
            writeln!(s, "note: {}", n).unwrap();
        }
        s
    }
}

/// Component of `k` containing the point (a part of k).
fn owning_component(k: &RatSet, x: &Rat) -> Interval {
    for (a, b) in k.parts() {
        if a <= x && x <= b {
            if a < b {
                return Ivl::of(a.clone(), b.clone());
            }
            return Ivl::of(a.clone(), a.clone() + int(1));
        }
    }
    Ivl::of(x.clone(), x.clone() + int(1))
}

fn collect_violations(
    tag: &str,
    k_part: &RatSet,
    covered: &RatSet,
    strong: bool,
    out: &mut Vec<Violation>,
) {
    let mut seen: Vec<Interval> = Vec::new();
    for piece in k_part.uncovered(covered, strong) {
        let comp = owning_component(k_part, &piece.0);
        if seen.contains(&comp) {
            continue;
        }
        seen.push(comp.clone());
        out.push(Violation { map_tag: tag.to_string(), component: comp, uncovered: piece });
    }
}

/// Hiding check on a compact interval X.
pub fn check_hiding(f: &RatMap, g: &RatMap, k: &RatRegion, x: &Interval, strong: bool) -> Result<HidingReport> {
    let mut violations = Vec::new();
    let mut notes = Vec::new();
    let kset = k.to_set();
    if Region::single(x.lo().clone(), x.hi().clone())?.to_set().is_subset_of(&kset) {
        notes.push("K equals X".to_string());
    }
    for (tag, m) in [("f", f), ("g", g)] {
        let mx = m.image_ivl(x)?;
        let part = kset.clip(mx.lo(), mx.hi());
        let covered = m.image_set(&kset)?;
        collect_violations(tag, &part, &covered, strong, &mut violations);
    }
    let passed = violations.is_empty() && notes.is_empty();
    Ok(HidingReport { passed, strong, violations, window_used: x.clone(), notes })
}

fn shift_ok(shift: &Option<Rat>, period: Option<&Rat>) -> Result<()> {
    if let (Some(t), Some(p)) = (shift, period) {
        if !t.is_multiple_of(p) {
            return Err(Error::TailsNotCommensurate(format!("translation {} vs period {}", t, p)));
        }
    }
    Ok(())
}

/// Hiding check for a piece on a compact, half-line or full-line domain.
/// Unbounded ends are reduced to a finite window plus a one-period
/// translation certificate.
pub fn check_hiding_piece(p: &IFSPiece, strong: bool) -> Result<HidingReport> {
    let k = p.region()?;
    if let PieceDomain::Compact(x) = &p.domain {
        let core = k.region_on(x.lo(), x.hi()).ok_or(Error::EmptyRegion)?;
        if !k.is_compact() {
            return Err(Error::Precondition("compact piece with periodic region".into()));
        }
        return check_hiding(&p.f, &p.g, &core, x, strong);
    }
    let sh = p.tail_shifts();
    let lp = k.left().map(|t| &t.period);
    let rp = k.right().map(|t| &t.period);
    shift_ok(&sh.f_left, lp)?;
    shift_ok(&sh.g_left, lp)?;
    shift_ok(&sh.f_right, rp)?;
    shift_ok(&sh.g_right, rp)?;
    let mut tmax = int(0);
    for t in [&sh.f_left, &sh.f_right, &sh.g_left, &sh.g_right].into_iter().flatten() {
        tmax = max_s(&tmax, &t.abs());
    }
    let pmax = max_s(&lp.cloned().unwrap_or_else(|| int(0)), &rp.cloned().unwrap_or_else(|| int(0)));
    let w = int(2) * (tmax.clone() + pmax);
    let (ka, kb) = k.window();
    let fs = p.f.node_span();
    let gs = p.g.node_span();
    let mut lo = min_s(&min_s(ka, fs.lo()), gs.lo());
    let mut hi = max_s(&max_s(kb, fs.hi()), gs.hi());
    // images of the node spans also have to sit inside
    for m in [&p.f, &p.g] {
        let s = m.node_span();
        lo = min_s(&lo, &m.eval(s.lo())?);
        hi = max_s(&hi, &m.eval(s.hi())?);
    }
    lo = lo - w.clone();
    hi = hi + w.clone();
    if let Some(t) = k.left() {
        lo = lo.floor_div(&t.period) * t.period.clone();
    }
    if let Some(t) = k.right() {
        let m = hi.floor_div(&t.period);
        let b = m * t.period.clone();
        hi = if b < hi { b + t.period.clone() } else { b };
    }
    if let Some(d) = p.domain.lo() {
        lo = max_s(&lo, d);
    }
    let window = Ivl::of(lo.clone(), hi.clone());
    let mut violations = Vec::new();
    let mut notes = Vec::new();
    let kw = k.materialize(&lo, &hi);
    if Region::single(lo.clone(), hi.clone())?.to_set().is_subset_of(&kw) {
        notes.push("K equals X on the window".into());
    }
    for (tag, m) in [("f", &p.f), ("g", &p.g)] {
        // part of m(X) inside the window
        let img_lo = match p.domain.lo() {
            Some(d) => max_s(&m.eval(d)?, &lo),
            None => lo.clone(),
        };
        if img_lo > hi {
            continue;
        }
        let part = kw.clip(&img_lo, &hi);
        let src_lo = m.eval_inv(&img_lo)?;
        let src_hi = m.eval_inv(&hi)?;
        let src = k.materialize(&src_lo, &src_hi);
        let covered = m.image_set(&src)?;
        collect_violations(tag, &part, &covered, strong, &mut violations);
    }
    // translation certificate: beyond the window both sides are periodic
    let mut cert = true;
    for (tail, at_right) in [(k.left(), false), (k.right(), true)] {
        let Some(t) = tail else { continue };
        let slice = if at_right {
            Ivl::of(hi.clone() - t.period.clone(), hi.clone())
        } else {
            Ivl::of(lo.clone(), lo.clone() + t.period.clone())
        };
        let (wa, wb) = k.window();
        let outside_core = if at_right { slice.lo() >= wb } else { slice.hi() <= wa };
        for m in [&p.f, &p.g] {
            let s = m.node_span();
            let pre_lo = m.eval_inv(slice.lo())?;
            let pre_hi = m.eval_inv(slice.hi())?;
            let translated = if at_right { &pre_lo >= s.hi() } else { &pre_hi <= s.lo() };
            let src_outside = if at_right { &pre_lo >= wb } else { &pre_hi <= wa };
            if !(translated && outside_core && src_outside) {
                cert = false;
            }
        }
    }
    if !cert {
        notes.push("translation certificate failed".into());
    }
    let passed = violations.is_empty() && notes.is_empty();
    Ok(HidingReport { passed, strong, violations, window_used: window, notes })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryCheck {
    pub ok: bool,
    pub clause: Option<String>,
}

/// 0, 1 ∉ K; f(1), g(0) ∉ K; every component inside or outside f(I), g(I).
pub fn boundary_exclusions(p: &IFSPiece) -> Result<BoundaryCheck> {
    let k = p.region()?;
    let fail = |c: &str| Ok(BoundaryCheck { ok: false, clause: Some(c.to_string()) });
    let (zero, one) = (int(0), int(1));
    if k.contains_point(&zero) {
        return fail("0 not in K");
    }
    if k.contains_point(&one) {
        return fail("1 not in K");
    }
    let f1 = p.f.eval(&one)?;
    let g0 = p.g.eval(&zero)?;
    if k.contains_point(&f1) {
        return fail("f(1) not in K");
    }
    if k.contains_point(&g0) {
        return fail("g(0) not in K");
    }
    let comps = k.materialize(&zero, &one);
    for (a, b) in comps.parts() {
        let in_f = b <= &f1;
        let out_f = a > &f1;
        if !(in_f || out_f) {
            return fail("component inside or outside f(I)");
        }
        let in_g = a >= &g0;
        let out_g = b < &g0;
        if !(in_g || out_g) {
            return fail("component inside or outside g(I)");
        }
    }
    Ok(BoundaryCheck { ok: true, clause: None })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport {
    pub visited_count: usize,
    /// distance from the visited points to K (None when K is absent or far)
    pub min_distance_to_k_interior: Option<Rat>,
    pub all_outside: bool,
}

fn distance_to_set(s: &RatSet, x: &Rat) -> Option<Rat> {
    s.parts()
        .iter()
        .map(|(a, b)| {
            if x < a {
                a.clone() - x.clone()
            } else if x > b {
                x.clone() - b.clone()
            } else {
                Rat::zero()
            }
        })
        .min()
}

/// Breadth-first enumeration of all words of length ≤ depth applied to `seed`.
pub fn orbit_points(p: &IFSPiece, seed: &Rat, depth: usize, prune: Option<&Interval>) -> Result<Vec<Rat>> {
    let mut visited: HashSet<Rat> = HashSet::new();
    visited.insert(seed.clone());
    let mut frontier = vec![seed.clone()];
    for _ in 0..depth {
        let next: Vec<Rat> = frontier
            .par_iter()
            .flat_map_iter(|x| {
                let a = p.f.eval(x).ok();
                let b = p.g.eval(x).ok();
                a.into_iter().chain(b)
            })
            .collect();
        let mut fresh = Vec::new();
        for y in next {
            if let Some(w) = prune {
                if !w.contains(&y) {
                    continue;
                }
            }
            if visited.insert(y.clone()) {
                fresh.push(y);
            }
        }
        fresh.sort();
        frontier = fresh;
    }
    let mut pts: Vec<Rat> = visited.into_iter().collect();
    pts.sort();
    Ok(pts)
}

pub fn orbit_audit(p: &IFSPiece, seed: &Rat, depth: usize) -> Result<OrbitReport> {
    let k = p.region()?;
    let prune = match &p.domain {
        PieceDomain::Compact(_) => None,
        _ => {
            let (a, b) = k.window();
            Some(Ivl::of(a.clone() - int(16), b.clone() + int(16)))
        }
    };
    let pts = orbit_points(p, seed, depth, prune.as_ref())?;
    let lo = pts.first().cloned().unwrap_or_else(|| seed.clone()) - int(1);
    let hi = pts.last().cloned().unwrap_or_else(|| seed.clone()) + int(1);
    let kset = k.materialize(&lo, &hi);
    let mut all_outside = true;
    let mut best: Option<Rat> = None;
    for x in &pts {
        if kset.parts().iter().any(|(a, b)| a < x && x < b) {
            all_outside = false;
        }
        if let Some(d) = distance_to_set(&kset, x) {
            best = Some(match best {
                Some(b) => min_s(&b, &d),
                None => d,
            });
        }
    }
    Ok(OrbitReport { visited_count: pts.len(), min_distance_to_k_interior: best, all_outside })
}

/// Union of the resolution-cells of [0,1] hit by the depth-bounded orbit of `seed`.
pub fn approx_minimal_set_from(p: &IFSPiece, seed: &Rat, depth: usize, resolution: &Rat) -> Result<RatRegion> {
    let pts = orbit_points(p, seed, depth, None)?;
    let ncell = (int(1) / resolution.clone()).ceil();
    let mut cells = Vec::new();
    for x in pts {
        let mut c = x.floor_div(resolution);
        if c >= ncell {
            c = ncell.clone() - int(1);
        }
        if c.is_negative() {
            c = int(0);
        }
        let lo = c * resolution.clone();
        cells.push((lo.clone(), lo + resolution.clone()));
    }
    ClosedSet::from_parts(cells).to_region()
}

pub fn approx_minimal_set(p: &IFSPiece, depth: usize, resolution: &Rat) -> Result<RatRegion> {
    approx_minimal_set_from(p, &int(0), depth, resolution)
}

/// Resolution cells of [0,1] lying inside int(K).
pub fn cells_inside_interior(k: &RatPeriodic, resolution: &Rat) -> Vec<Interval> {
    let kset = k.materialize(&int(0), &int(1));
    let mut out = Vec::new();
    let mut lo = int(0);
    while lo < int(1) {
        let hi = lo.clone() + resolution.clone();
        if kset.parts().iter().any(|(a, b)| a < &lo && &hi < b) {
            out.push(Ivl::of(lo.clone(), hi.clone()));
        }
        lo = hi;
    }
    out
}

pub fn periodic_of(r: RatRegion) -> PeriodicRegion<Rat> {
    PeriodicRegion::compact(r)
}

pub fn unit() -> Interval {
    Ivl::of(int(0), int(1))
}

pub fn map_of(nodes: Vec<(Rat, Rat)>) -> Result<PLMap<Rat>> {
    PLMap::compact(nodes)
}
