//! PL to C¹: moving corners off a finite set, rounding corners with
//! quadratic pieces, and the C⁰ / C¹ distances to the identity.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::plmap::{DomainKind, PLMap};
use crate::region::{ClosedSet, Ivl};
use crate::scalar::{int, max_s, min_s, rat, Rat};
use crate::verifier::{check_hiding, is_p_class, HidingReport, IFSPiece, PieceDomain};
use crate::{Interval, RatMap, RatRegion};

/// y = c0 + c1·(x − lo) + c2·(x − lo)² on [lo, hi].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quad {
    pub span: Interval,
    pub coeffs: [Rat; 3],
}

impl Quad {
    pub fn eval(&self, x: &Rat) -> Rat {
        let t = x - self.span.lo();
        &self.coeffs[0] + &self.coeffs[1] * &t + &self.coeffs[2] * &t * &t
    }

    pub fn deriv(&self, x: &Rat) -> Rat {
        let t = x - self.span.lo();
        &self.coeffs[1] + int(2) * &self.coeffs[2] * t
    }

    /// Point where the derivative equals `s`, if it lies strictly inside.
    fn where_deriv_is(&self, s: &Rat) -> Option<Rat> {
        if self.coeffs[2].is_zero() {
            return None;
        }
        let x = self.span.lo() + (s - &self.coeffs[1]) / (int(2) * &self.coeffs[2]);
        (self.span.lo() < &x && &x < self.span.hi()).then_some(x)
    }
}

/// Piecewise polynomial (degree ≤ 2) homeomorphism of a compact interval,
/// C¹ across junctions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PwPolyMap {
    pieces: Vec<Quad>,
}

impl PwPolyMap {
    pub fn new(pieces: Vec<Quad>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Precondition("piecewise map needs a piece".into()));
        }
        for w in pieces.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.span.hi() != b.span.lo() {
                return Err(Error::Precondition(format!("gap between {} and {}", a.span, b.span)));
            }
            let x = b.span.lo();
            if a.eval(x) != b.eval(x) {
                return Err(Error::NotMonotone(format!("value jump at {}", x)));
            }
            if a.deriv(x) != b.deriv(x) {
                return Err(Error::Precondition(format!("derivative jump at {}", x)));
            }
        }
        // the derivative is affine on each piece, so endpoint signs decide
        for q in &pieces {
            if !q.deriv(q.span.lo()).is_positive() || !q.deriv(q.span.hi()).is_positive() {
                return Err(Error::NotMonotone(format!("derivative not positive on {}", q.span)));
            }
        }
        Ok(PwPolyMap { pieces })
    }

    pub fn from_pl(f: &RatMap) -> Result<Self> {
        if f.kind() != DomainKind::Compact || f.nodes().len() < 2 {
            return Err(Error::Precondition("only compact PL maps convert".into()));
        }
        let pieces = linear_pieces(f.nodes());
        // PL maps are not C¹ at corners; skip the derivative check here
        Ok(PwPolyMap { pieces })
    }

    pub fn pieces(&self) -> &[Quad] {
        &self.pieces
    }

    pub fn domain(&self) -> Interval {
        Ivl::of(self.pieces[0].span.lo().clone(), self.pieces.last().unwrap().span.hi().clone())
    }

    fn piece_at(&self, x: &Rat) -> Result<&Quad> {
        let i = self.pieces.partition_point(|q| q.span.hi() < x);
        self.pieces
            .get(i)
            .filter(|q| q.span.contains(x))
            .ok_or_else(|| Error::Domain { x: x.to_string(), domain: self.domain().to_string() })
    }

    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        Ok(self.piece_at(x)?.eval(x))
    }

    pub fn deriv(&self, x: &Rat) -> Result<Rat> {
        Ok(self.piece_at(x)?.deriv(x))
    }

    pub fn image_set(&self, s: &ClosedSet<Rat>) -> Result<ClosedSet<Rat>> {
        let mut out = Vec::new();
        for (a, b) in s.parts() {
            out.push((self.eval(a)?, self.eval(b)?));
        }
        Ok(ClosedSet::from_parts(out))
    }

    /// Points where the derivative jumps (empty for a genuine C¹ map).
    pub fn derivative_jumps(&self) -> Vec<Rat> {
        self.pieces
            .windows(2)
            .filter(|w| w[0].deriv(w[0].span.hi()) != w[1].deriv(w[1].span.lo()))
            .map(|w| w[1].span.lo().clone())
            .collect()
    }
}

fn linear_pieces(nodes: &[(Rat, Rat)]) -> Vec<Quad> {
    nodes
        .windows(2)
        .map(|w| {
            let s = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
            Quad { span: Ivl::of(w[0].0.clone(), w[1].0.clone()), coeffs: [w[0].1.clone(), s, Rat::zero()] }
        })
        .collect()
}

/// Either representation, for the distance calculus.
pub enum AnyMap<'a> {
    Pl(&'a RatMap),
    Poly(&'a PwPolyMap),
}

/// (sup |f(x) − x|, sup |f′(x) − 1|) over the compact domain.
pub fn c1_distances(f: AnyMap<'_>) -> Result<(Rat, Rat)> {
    let poly;
    let p = match f {
        AnyMap::Pl(m) => {
            poly = PwPolyMap::from_pl(m)?;
            &poly
        }
        AnyMap::Poly(p) => p,
    };
    let mut d0 = Rat::zero();
    let mut d1 = Rat::zero();
    for q in &p.pieces {
        let mut pts = vec![q.span.lo().clone(), q.span.hi().clone()];
        // f(x) − x is extremal where f′ = 1
        pts.extend(q.where_deriv_is(&int(1)));
        for x in &pts {
            d0 = max_s(&d0, &(q.eval(x) - x).abs());
        }
        for x in [q.span.lo(), q.span.hi()] {
            d1 = max_s(&d1, &(q.deriv(x) - int(1)).abs());
        }
    }
    Ok((d0, d1))
}

// ---------------------------------------------------------------------------
// corner moving

fn open_component<'a>(u: &'a RatRegion, x: &Rat) -> Option<&'a Interval> {
    u.components().iter().find(|c| c.lo() < x && x < c.hi())
}

/// Slide every corner of `f` lying in `x_set` to a nearby point of its
/// U-component, keeping μ, the values on `x_set`, and f outside U.
pub fn move_corners(f: &RatMap, x_set: &[Rat], u: &RatRegion) -> Result<RatMap> {
    let mu = f.mu();
    let mut xs: Vec<Rat> = x_set.to_vec();
    xs.sort();
    xs.dedup();
    let mut g = f.clone();
    for x1 in &xs {
        if !g.breakpoints().contains(x1) {
            continue;
        }
        let comp = open_component(u, x1)
            .ok_or_else(|| Error::Precondition(format!("corner {} has no neighborhood in U", x1)))?
            .clone();
        g = slide_corner(&g, x1, &comp, &xs, &mu)?;
    }
    check_moved(f, &g, &xs, u)?;
    Ok(g)
}

fn slide_corner(g: &RatMap, x1: &Rat, comp: &Interval, xs: &[Rat], mu: &Rat) -> Result<RatMap> {
    let nodes = g.nodes();
    let i = nodes.iter().position(|(x, _)| x == x1).expect("corner is a node");
    let y1 = nodes[i].1.clone();
    let (prev, next) = (&nodes[i - 1], &nodes[i + 1]);
    let sl = (&y1 - &prev.1) / (x1 - &prev.0);
    let sr = (&next.1 - &y1) / (&next.0 - x1);
    // right end of the editable stretch: next node, U boundary, halfway to the next X point
    let mut right = min_s(&next.0, comp.hi());
    if let Some(nx) = xs.iter().find(|x| *x > x1 && *x <= &right) {
        right = (x1 + nx) / int(2);
    }
    let mut left = max_s(&prev.0, comp.lo());
    if let Some(px) = xs.iter().rev().find(|x| *x < x1 && *x >= &left) {
        left = (x1 + px) / int(2);
    }
    let rebuild = |extra: Vec<(Rat, Rat)>, lo: &Rat, hi: &Rat| -> Result<RatMap> {
        let mut out: Vec<(Rat, Rat)> = nodes.iter().filter(|(x, _)| x < lo).cloned().collect();
        out.push((lo.clone(), g.eval(lo)?));
        out.extend(extra);
        out.push((hi.clone(), g.eval(hi)?));
        out.extend(nodes.iter().filter(|(x, _)| x > hi).cloned());
        PLMap::new(out, g.kind())
    };
    // Right slide: keep sl up to x1 + θ(right − x1), then the catch-up slope
    // sr + (sr − sl)·θ/(1 − θ). Left slide mirrors this. θ is the largest
    // value ≤ 1/2 that keeps the new slope within mu.
    let theta = |near: &Rat, far: &Rat| -> Option<Rat> {
        // slopes must stay positive even when 1 − mu ≤ 0
        let floor = max_s(&(int(1) - mu), &(near / int(2)));
        let room = if near > far { int(1) + mu - near } else { near - &floor };
        let rho = room / (near - far).abs();
        rho.is_positive().then(|| min_s(&rat(1, 2), &(&rho / (int(1) + &rho))))
    };
    if let Some(th) = theta(&sr, &sl) {
        let mid = x1 + &th * (&right - x1);
        let ym = &y1 + &sl * (&mid - x1);
        let g2 = rebuild(vec![(mid, ym)], x1, &right)?;
        if &g2.mu() == mu {
            return Ok(g2);
        }
    }
    if let Some(th) = theta(&sl, &sr) {
        let mid = x1 - &th * (x1 - &left);
        let ym = &y1 - &sr * (x1 - &mid);
        let g2 = rebuild(vec![(mid, ym)], &left, x1)?;
        if &g2.mu() == mu {
            return Ok(g2);
        }
    }
    Err(Error::Precondition(format!(
        "corner at {} (slopes {} and {}) cannot move inside {} without raising mu above {}",
        x1, sl, sr, comp, mu
    )))
}

fn check_moved(f: &RatMap, g: &RatMap, xs: &[Rat], u: &RatRegion) -> Result<()> {
    let bad = |c: &str| Err(Error::Verification { stage: "move corners".into(), detail: c.into() });
    if f.mu() != g.mu() {
        return bad("mu changed");
    }
    for x in xs {
        if f.in_domain(x) && f.eval(x)? != g.eval(x)? {
            return bad("value moved at a pinned point");
        }
    }
    let outside = |x: &Rat| open_component(u, x).is_none();
    for (x, _) in f.nodes().iter().chain(g.nodes()) {
        if outside(x) && f.eval(x)? != g.eval(x)? {
            return bad("map changed outside U");
        }
    }
    let corners = g.breakpoints();
    if xs.iter().any(|x| corners.contains(x)) {
        return bad("corner left on a pinned point");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// corner rounding

/// Replace each corner of `f` by two quadratic pieces inside the U-component
/// around it. The derivative runs linearly from the left slope to a knot
/// value at the corner and on to the right slope; the knot value is the one
/// that keeps f's values at both window ends.
pub fn smooth_corners(f: &RatMap, u: &RatRegion) -> Result<PwPolyMap> {
    if f.kind() != DomainKind::Compact {
        return Err(Error::Precondition("smoothing works on compact maps".into()));
    }
    let dom = f.node_span();
    for c in u.components() {
        if c.lo() <= dom.lo() || c.hi() >= dom.hi() {
            return Err(Error::Precondition(format!("neighborhood {} touches the domain ends", c)));
        }
    }
    let corners = f.breakpoints();
    let mut windows: Vec<(Rat, Rat, Rat)> = Vec::new();
    for x in &corners {
        let comp = open_component(u, x).ok_or_else(|| Error::Precondition(format!("corner {} is outside U", x)))?;
        if corners.iter().filter(|y| comp.lo() < *y && *y < comp.hi()).count() > 1 {
            return Err(Error::Precondition(format!("component {} holds more than one corner", comp)));
        }
        let delta = min_s(&(x - comp.lo()), &(comp.hi() - x));
        windows.push((x - &delta, x.clone(), x + &delta));
    }
    let simple = f.simplified();
    let mut pieces: Vec<Quad> = Vec::new();
    let mut cursor = dom.lo().clone();
    for (lo, x, hi) in &windows {
        push_linear(&simple, &cursor, lo, &mut pieces)?;
        let sl = slope_left_of(&simple, x)?;
        let sr = slope_right_of(&simple, x)?;
        let (dl, dr) = (x - lo, hi - x);
        let knot = (&sl * &dl + &sr * &dr) / (&dl + &dr);
        let y_lo = simple.eval(lo)?;
        let left = Quad { span: Ivl::of(lo.clone(), x.clone()), coeffs: [y_lo.clone(), sl.clone(), (&knot - &sl) / (int(2) * &dl)] };
        let y_x = left.eval(x);
        let right = Quad { span: Ivl::of(x.clone(), hi.clone()), coeffs: [y_x, knot.clone(), (&sr - &knot) / (int(2) * &dr)] };
        if right.eval(hi) != simple.eval(hi)? {
            return Err(Error::Verification { stage: "smooth corners".into(), detail: format!("value mismatch at {}", hi) });
        }
        pieces.push(left);
        pieces.push(right);
        cursor = hi.clone();
    }
    push_linear(&simple, &cursor, dom.hi(), &mut pieces)?;
    PwPolyMap::new(pieces)
}

fn push_linear(f: &RatMap, lo: &Rat, hi: &Rat, out: &mut Vec<Quad>) -> Result<()> {
    if lo >= hi {
        return Ok(());
    }
    let r = f.restrict(lo, hi)?.simplified();
    out.extend(linear_pieces(r.nodes()));
    Ok(())
}

fn slope_left_of(f: &RatMap, x: &Rat) -> Result<Rat> {
    let n = f.nodes();
    let i = n.iter().position(|(a, _)| a == x).ok_or_else(|| Error::Domain { x: x.to_string(), domain: "nodes".into() })?;
    Ok((&n[i].1 - &n[i - 1].1) / (&n[i].0 - &n[i - 1].0))
}

fn slope_right_of(f: &RatMap, x: &Rat) -> Result<Rat> {
    let n = f.nodes();
    let i = n.iter().position(|(a, _)| a == x).ok_or_else(|| Error::Domain { x: x.to_string(), domain: "nodes".into() })?;
    Ok((&n[i + 1].1 - &n[i].1) / (&n[i + 1].0 - &n[i].0))
}

// ---------------------------------------------------------------------------
// the reduction

#[derive(Clone, Debug)]
pub struct C1Pair {
    pub f: PwPolyMap,
    pub g: PwPolyMap,
    pub k: RatRegion,
    pub report: C1Report,
}

#[derive(Clone, Debug)]
pub struct C1Report {
    pub hiding: HidingReport,
    /// (d_C0, d'_C1) of f and g
    pub f_distances: (Rat, Rat),
    pub g_distances: (Rat, Rat),
    pub mu_pl: (Rat, Rat),
    pub corners_moved: (usize, usize),
}

/// Hiding check for a piecewise-quadratic pair on [0, 1]; images of K
/// components are exact because both maps are increasing.
pub fn check_hiding_poly(f: &PwPolyMap, g: &PwPolyMap, k: &RatRegion, strong: bool) -> Result<HidingReport> {
    let dom = f.domain();
    let kset = k.to_set();
    let mut violations = Vec::new();
    for (tag, m) in [("f", f), ("g", g)] {
        let lo = m.eval(dom.lo())?;
        let hi = m.eval(dom.hi())?;
        let part = kset.clip(&lo, &hi);
        let covered = m.image_set(&kset)?;
        for piece in part.uncovered(&covered, strong) {
            let comp = k
                .components()
                .iter()
                .find(|c| c.contains(&piece.0))
                .cloned()
                .unwrap_or_else(|| Ivl::of(piece.0.clone(), piece.1.clone()));
            violations.push(crate::verifier::Violation { map_tag: tag.into(), component: comp, uncovered: piece });
        }
    }
    let mut notes = Vec::new();
    if k.components().len() == 1 && k.components()[0] == dom {
        notes.push("K equals X".to_string());
    }
    let passed = violations.is_empty() && notes.is_empty();
    Ok(HidingReport { passed, strong, violations, window_used: dom, notes })
}

/// Neighborhoods of radius a quarter of the smallest gap around each point.
fn pin_neighborhood(xs: &[Rat], ends: (&Rat, &Rat)) -> Result<RatRegion> {
    let mut all: Vec<Rat> = xs.to_vec();
    all.push(ends.0.clone());
    all.push(ends.1.clone());
    all.sort();
    all.dedup();
    let gap = all.windows(2).map(|w| &w[1] - &w[0]).min().unwrap_or_else(|| int(1));
    let r = gap / int(4);
    crate::region::Region::normalize(xs.iter().map(|x| Ivl::of(x - &r, x + &r)).collect())
}

/// Rounding windows: around each corner, 3/4 of the distance to ∂K and the
/// ends, and a third of the distance to the next corner.
fn rounding_neighborhood(corners: &[Rat], pins: &[Rat], ends: (&Rat, &Rat)) -> Result<Option<RatRegion>> {
    if corners.is_empty() {
        return Ok(None);
    }
    let mut comps = Vec::new();
    for (i, c) in corners.iter().enumerate() {
        let mut gap_k = min_s(&(c - ends.0), &(ends.1 - c));
        for p in pins {
            if p != c {
                gap_k = min_s(&gap_k, &(p - c).abs());
            }
        }
        let mut r = gap_k * rat(3, 4);
        for (j, d) in corners.iter().enumerate() {
            if i != j {
                r = min_s(&r, &((d - c).abs() / int(3)));
            }
        }
        comps.push(Ivl::of(c - &r, c + &r));
    }
    Ok(Some(crate::region::Region::normalize(comps)?))
}

fn smooth_one(f: &RatMap, pins: &[Rat]) -> Result<(PwPolyMap, usize)> {
    let dom = f.node_span();
    let ends = (dom.lo(), dom.hi());
    let on_pins = f.breakpoints().iter().filter(|c| pins.contains(c)).count();
    let moved = if on_pins > 0 { move_corners(f, pins, &pin_neighborhood(pins, ends)?)? } else { f.clone() };
    let corners = moved.breakpoints();
    match rounding_neighborhood(&corners, pins, ends)? {
        None => Ok((PwPolyMap::from_pl(&moved)?, on_pins)),
        Some(u) => Ok((smooth_corners(&moved, &u)?, on_pins)),
    }
}

/// Move corners off ∂K, round them, and re-verify everything exactly.
pub fn reduce_to_c1(p: &IFSPiece) -> Result<C1Pair> {
    let bad = |c: String| Error::Verification { stage: "C1 reduction".into(), detail: c };
    if !matches!(p.domain, PieceDomain::Compact(_)) || !is_p_class(&p.f, &p.g) {
        return Err(Error::Precondition("reduction needs a P-class piece on [0, 1]".into()));
    }
    let kp = p.region()?;
    let k = kp.core().ok_or(Error::EmptyRegion)?.clone();
    let unit = Ivl::of(int(0), int(1));
    let pl_report = check_hiding(&p.f, &p.g, &k, &unit, false)?;
    if !pl_report.passed {
        return Err(bad(format!("PL input is not hiding:\n{}", pl_report.render())));
    }
    let pins: Vec<Rat> = k.components().iter().flat_map(|c| [c.lo().clone(), c.hi().clone()]).collect();
    let (sf, nf) = smooth_one(&p.f, &pins)?;
    let (sg, ng) = smooth_one(&p.g, &pins)?;
    if !sf.derivative_jumps().is_empty() || !sg.derivative_jumps().is_empty() {
        return Err(bad("derivative jumps remain".into()));
    }
    if sf.eval(&int(0))? != int(0) || sg.eval(&int(1))? != int(1) {
        return Err(bad("fixed ends moved".into()));
    }
    for x in &pins {
        if sf.eval(x)? != p.f.eval(x)? || sg.eval(x)? != p.g.eval(x)? {
            return Err(bad(format!("K endpoint image changed at {}", x)));
        }
    }
    let hiding = check_hiding_poly(&sf, &sg, &k, false)?;
    if !hiding.passed {
        return Err(bad(hiding.render()));
    }
    let fd = c1_distances(AnyMap::Poly(&sf))?;
    let gd = c1_distances(AnyMap::Poly(&sg))?;
    let mu_pl = p.mu();
    if fd.1 != mu_pl.0 || gd.1 != mu_pl.1 {
        return Err(bad(format!("d'_C1 = ({}, {}) but mu = ({}, {})", fd.1, gd.1, mu_pl.0, mu_pl.1)));
    }
    if fd.0 > fd.1 {
        return Err(bad("d_C0(f) exceeds d'_C1(f)".into()));
    }
    let report = C1Report { hiding, f_distances: fd, g_distances: gd, mu_pl, corners_moved: (nf, ng) };
    Ok(C1Pair { f: sf, g: sg, k, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Region;
    use crate::scalar::rat;

    fn bump() -> RatMap {
        PLMap::compact(vec![(int(0), int(0)), (rat(1, 2), rat(1, 3)), (int(1), int(1))]).unwrap()
    }

    #[test]
    fn distances() {
        assert_eq!(c1_distances(AnyMap::Pl(&bump())).unwrap(), (rat(1, 6), rat(1, 3)));
        let id = PLMap::identity(int(0), int(1));
        assert_eq!(c1_distances(AnyMap::Pl(&id)).unwrap(), (int(0), int(0)));
    }

    #[test]
    fn rounding_one_corner() {
        let u = Region::single(rat(1, 4), rat(3, 4)).unwrap();
        let s = smooth_corners(&bump(), &u).unwrap();
        assert!(s.derivative_jumps().is_empty());
        // symmetric window: a single ramp from 2/3 to 4/3
        assert_eq!(s.deriv(&rat(1, 2)).unwrap(), int(1));
        assert_eq!(s.deriv(&rat(3, 8)).unwrap(), rat(5, 6));
        assert_eq!(s.eval(&rat(1, 4)).unwrap(), rat(1, 6));
        assert_eq!(s.eval(&rat(3, 4)).unwrap(), rat(2, 3));
        assert_eq!(c1_distances(AnyMap::Poly(&s)).unwrap().1, rat(1, 3));
        // asymmetric component
        let u2 = Region::single(rat(2, 5), rat(7, 8)).unwrap();
        let s2 = smooth_corners(&bump(), &u2).unwrap();
        assert_eq!(s2.eval(&rat(3, 10)).unwrap(), rat(1, 5));
        assert_eq!(s2.eval(&rat(7, 10)).unwrap(), rat(3, 5));
        assert_eq!(s2.deriv(&rat(1, 2)).unwrap(), int(1));
    }

    #[test]
    fn rounding_rejects_crowded_components() {
        let two = PLMap::compact(vec![(int(0), int(0)), (rat(1, 3), rat(1, 4)), (rat(2, 3), rat(7, 12)), (int(1), int(1))])
            .unwrap();
        let u = Region::single(rat(1, 4), rat(3, 4)).unwrap();
        assert!(smooth_corners(&two, &u).is_err());
        let flat = PLMap::compact(vec![(int(0), int(0)), (rat(1, 2), rat(1, 2)), (int(1), int(1))]).unwrap();
        let s = smooth_corners(&flat, &u).unwrap();
        assert_eq!(s.pieces().len(), 1);
    }

    #[test]
    fn moving_corners() {
        let f = PLMap::compact(vec![(int(0), int(0)), (rat(1, 4), rat(1, 6)), (rat(1, 2), rat(5, 12)), (int(1), int(1))])
            .unwrap();
        // no corner on the pinned point
        let g = move_corners(&f, &[rat(3, 4)], &Region::single(rat(5, 8), rat(7, 8)).unwrap()).unwrap();
        assert_eq!(g, f);
        // slopes 2/3 then 1: the corner slides right to 5/16 with catch-up slope 4/3
        let u = Region::single(rat(1, 8), rat(3, 8)).unwrap();
        let g = move_corners(&f, &[rat(1, 4)], &u).unwrap();
        assert!(!g.breakpoints().contains(&rat(1, 4)));
        assert!(g.breakpoints().contains(&rat(5, 16)));
        assert_eq!(g.eval(&rat(1, 4)).unwrap(), rat(1, 6));
        assert_eq!(g.eval(&rat(3, 8)).unwrap(), rat(7, 24));
        assert_eq!(g.mu(), f.mu());
        // two corners in one component, both pinned
        let u2 = Region::single(rat(1, 8), rat(3, 4)).unwrap();
        let g2 = move_corners(&f, &[rat(1, 4), rat(1, 2)], &u2).unwrap();
        assert!(!g2.breakpoints().contains(&rat(1, 4)) && !g2.breakpoints().contains(&rat(1, 2)));
        assert_eq!(g2.eval(&rat(1, 2)).unwrap(), rat(5, 12));
        // slopes 2/3 and 4/3 are both extremes of mu = 1/3: no room either way
        let e = move_corners(&bump(), &[rat(1, 2)], &Region::single(rat(1, 4), rat(3, 4)).unwrap());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn reduction_on_example2() {
        let ex = crate::assembly::gallery_examples(&crate::assembly::GalleryExample::Example2(rat(1, 10))).unwrap();
        let c1 = reduce_to_c1(&ex.piece).unwrap();
        assert!(c1.report.hiding.passed);
        assert_eq!(c1.report.f_distances.1, ex.piece.f.mu());
        assert!(c1.report.f_distances.0 <= c1.report.f_distances.1);
    }
}
