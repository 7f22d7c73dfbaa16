//! Gluing local models along their translation areas, the symmetric
//! closing step, the end-to-end counterexample driver and the two gallery
//! presets.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::farey::{descending_chain, farey_series, n_for_lambda, parts};
use crate::leap::{realize_any_leap, LeapKit};
use crate::local_models::{build_connector, build_runway};
use crate::periodic::{PeriodicRegion, Tail};
use crate::plmap::{DomainKind, PLMap};
use crate::region::{ClosedSet, Ivl, Region};
use crate::scalar::{int, max_s, min_s, rat, Rat};
use crate::transform::{mirror_map, Affine};
use crate::verifier::{boundary_exclusions, check_hiding_piece, is_p_class, ClassTag, HidingReport, IFSPiece, PieceDomain};
use crate::{Interval, RatMap, RatRegion};

fn fail(stage: &str, detail: impl Into<String>) -> Error {
    Error::Verification { stage: stage.into(), detail: detail.into() }
}

fn verified(piece: &IFSPiece, stage: &str) -> Result<HidingReport> {
    let report = check_hiding_piece(piece, false)?;
    if !report.passed {
        return Err(fail(stage, report.render()));
    }
    Ok(report)
}

/// Right end of the non-translation part: maps are translations and K is
/// periodic to the right of this point.
pub fn right_edge(p: &IFSPiece) -> Result<Rat> {
    let k = p.region()?;
    Ok(max_s(&max_s(p.f.node_span().hi(), p.g.node_span().hi()), k.window().1))
}

pub fn left_edge(p: &IFSPiece) -> Result<Rat> {
    let k = p.region()?;
    Ok(min_s(&min_s(p.f.node_span().lo(), p.g.node_span().lo()), k.window().0))
}

/// Tail shape rescaled to the unit circle.
pub fn unit_shape(t: &Tail<Rat>) -> RatRegion {
    t.shape.affine(&(int(1) / &t.period), &int(0), &int(0))
}

/// Two pieces and the blocks P (in the left piece's right translation area)
/// and P' (in the right piece's left one) that get identified.
#[derive(Clone, Debug)]
pub struct GluePlan {
    pub left: IFSPiece,
    pub right: IFSPiece,
    pub p: Interval,
    pub p_prime: Interval,
    pub d: Rat,
}

/// Deterministic glue plan: P is the leftmost integer-aligned block whose
/// f and g images stay inside the translation area.
pub fn plan_glue(left: &IFSPiece, right: &IFSPiece) -> Result<GluePlan> {
    let lk = left.region()?;
    let rk = right.region()?;
    let lt = lk.right().ok_or_else(|| Error::Precondition("left piece has no right tail".into()))?;
    let rt = rk.left().ok_or_else(|| Error::Precondition("right piece has no left tail".into()))?;
    if matches!(right.domain, PieceDomain::Compact(_) | PieceDomain::HalfLine(_))
        || matches!(left.domain, PieceDomain::Compact(_))
    {
        return Err(Error::Precondition("glue needs an unbounded right end on the left piece and a full-line right piece".into()));
    }
    let ls = left.tail_shifts();
    let rs = right.tail_shifts();
    if ls.f_right != rs.f_left || ls.g_right != rs.g_left {
        return Err(Error::Precondition(format!(
            "tail translations differ: left (f {:?}, g {:?}), right (f {:?}, g {:?})",
            ls.f_right.map(|x| x.to_string()),
            ls.g_right.map(|x| x.to_string()),
            rs.f_left.map(|x| x.to_string()),
            rs.g_left.map(|x| x.to_string())
        )));
    }
    if lt.period != rt.period {
        return Err(Error::Precondition(format!("tail periods differ: {} vs {}", lt.period, rt.period)));
    }
    if lt.shape != rt.shape {
        return Err(Error::Precondition(format!(
            "tail shapes differ on the slice [0, {}]: {} vs {}",
            lt.period, lt.shape, rt.shape
        )));
    }
    let shift = max_s(&ls.f_right.clone().unwrap_or_default().abs(), &ls.g_right.clone().unwrap_or_default().abs());
    let margin = (shift + &lt.period).ceil() + int(1);
    let d = int(2) * &margin;
    let p_lo = right_edge(left)?.ceil() + &margin;
    let pp_hi = left_edge(right)?.floor() - &margin;
    let p = Ivl::of(p_lo.clone(), &p_lo + &d);
    let p_prime = Ivl::of(&pp_hi - &d, pp_hi);
    Ok(GluePlan { left: left.clone(), right: right.clone(), p, p_prime, d })
}

/// Nodes of `a` left of `m`, the seam node, nodes of `b` right of `m`.
fn splice(a: &RatMap, b: &RatMap, m: &Rat, kind: DomainKind) -> Result<RatMap> {
    let ya = a.eval(m)?;
    let yb = b.eval(m)?;
    if ya != yb {
        return Err(fail("glue", format!("seam values differ at {}: {} vs {}", m, ya, yb)));
    }
    let mut nodes: Vec<(Rat, Rat)> = a.nodes().iter().filter(|(x, _)| x < m).cloned().collect();
    nodes.push((m.clone(), ya));
    nodes.extend(b.nodes().iter().filter(|(x, _)| x > m).cloned());
    Ok(PLMap::new(nodes, kind)?.simplified())
}

fn kind_of(left_open: bool, right_open: bool) -> DomainKind {
    match (left_open, right_open) {
        (true, true) => DomainKind::FullLine,
        (false, true) => DomainKind::HalfLineRight,
        (true, false) => DomainKind::HalfLineLeft,
        (false, false) => DomainKind::Compact,
    }
}

/// Quotient of the two pieces identifying P with P'. The result is
/// re-verified and must keep μ at the larger of the two inputs.
pub fn glue(plan: &GluePlan) -> Result<IFSPiece> {
    let (l, r) = (&plan.left, &plan.right);
    let t = plan.p.lo() - plan.p_prime.lo();
    let m = plan.p.mid();
    let half = &plan.d / int(2);
    if plan.p.lo() - &half < right_edge(l)? {
        return Err(fail("glue", format!("images of P = {} leave the left piece's translation area", plan.p)));
    }
    if plan.p_prime.hi() + &half > left_edge(r)? {
        return Err(fail("glue", format!("images of P' = {} leave the right piece's translation area", plan.p_prime)));
    }
    let kind = kind_of(l.f.kind().unbounded_left(), true);
    let f = splice(&l.f, &r.f.shifted(&t, &t), &m, kind)?;
    let g = splice(&l.g, &r.g.shifted(&t, &t), &m, kind)?;
    let lk = l.region()?;
    let rk = r.region()?.translate(&t)?;
    let lo = lk.window().0.clone();
    let hi = rk.window().1.clone();
    let core = lk.materialize(&lo, &m).union(&rk.materialize(&m, &hi));
    let core = if core.is_empty() { None } else { Some(core.to_region()?) };
    let k = PeriodicRegion::new(core, (lo, hi), lk.left().cloned(), rk.right().cloned())?;
    let piece = IFSPiece::new(f, g, Some(k), l.domain.clone());
    verified(&piece, "glue")?;
    let (lf, lg) = l.mu();
    let (rf, rg) = r.mu();
    let (mf, mg) = piece.mu();
    if mf != max_s(&lf, &rf) || mg != max_s(&lg, &rg) {
        return Err(fail("glue", format!("mu changed: f {} g {}", mf, mg)));
    }
    Ok(piece)
}

/// Reflection x ↦ −x with the two maps exchanging roles, so that the
/// reflected f still moves points left.
pub fn mirror_piece(p: &IFSPiece) -> Result<IFSPiece> {
    if p.domain != PieceDomain::FullLine {
        return Err(Error::Precondition("only full-line pieces reflect to a piece".into()));
    }
    let k = p.region()?.mirror();
    Ok(IFSPiece::new(mirror_map(&p.g), mirror_map(&p.f), Some(k), PieceDomain::FullLine))
}

/// Shape of the final connector, symmetric about 1/2 on the unit circle.
pub fn symmetric_shape() -> RatRegion {
    Region::single(rat(3, 8), rat(5, 8)).expect("fixed shape")
}

#[derive(Clone, Debug)]
pub struct SymmetricClosure {
    /// compact piece on [0, 2m] before rescaling
    pub unscaled: IFSPiece,
    pub cut: Rat,
    /// final piece on [0, 1]
    pub piece: IFSPiece,
    pub report: HidingReport,
}

/// Close a half-line piece on [0, ∞) whose far tail is f = x − 1, g = x + 1
/// with a shape symmetric about 1/2: reflect about an integer cut m, glue
/// the halves there and rescale [0, 2m] to [0, 1].
pub fn close_symmetric(half: &IFSPiece) -> Result<SymmetricClosure> {
    if half.domain != PieceDomain::HalfLine(int(0)) {
        return Err(Error::Precondition("closing needs a piece on [0, inf)".into()));
    }
    let sh = half.tail_shifts();
    if sh.f_right != Some(int(-1)) || sh.g_right != Some(int(1)) {
        return Err(Error::Precondition("far tail must be f = x - 1, g = x + 1".into()));
    }
    let k = half.region()?;
    let tail = k.right().ok_or_else(|| Error::Precondition("no right tail".into()))?;
    if !(int(1) / &tail.period).is_integer() {
        return Err(Error::Precondition(format!("tail period {} does not divide 1", tail.period)));
    }
    let shape = shape_on_unit_period(tail)?;
    if shape.mirror().translate(&int(1)) != shape {
        return Err(Error::Precondition(format!("tail shape {} is not symmetric about 1/2", shape)));
    }
    let m = right_edge(half)?.ceil() + int(3);
    let len = int(2) * &m;
    let reflect = |f: &RatMap| mirror_map(f).shifted(&len, &len);
    let f = splice(&half.f, &reflect(&half.g), &m, DomainKind::Compact)?.restrict(&int(0), &len)?;
    let g = splice(&half.g, &reflect(&half.f), &m, DomainKind::Compact)?.restrict(&int(0), &len)?;
    let left_half = k.materialize(&int(0), &m);
    let right_half = ClosedSet::from_parts(left_half.parts().iter().map(|(a, b)| (&len - b, &len - a)).collect());
    let kk = left_half.union(&right_half).to_region()?;
    if kk.mirror().translate(&len) != kk {
        return Err(fail("symmetric closing", "K is not symmetric about the cut"));
    }
    let span = Ivl::of(int(0), len.clone());
    let unscaled = IFSPiece::new(f, g, Some(PeriodicRegion::compact(kk.clone())), PieceDomain::Compact(span.clone()));
    verified(&unscaled, "symmetric closing")?;
    // f on the right half is the reflected g
    let fr = unscaled.f.restrict(&m, &len)?;
    let gl = unscaled.g.restrict(&int(0), &m)?;
    if fr.simplified() != reflect(&gl).simplified() {
        return Err(fail("symmetric closing", "reflected halves disagree"));
    }
    let unit = Ivl::of(int(0), int(1));
    let a = Affine::between(&span, &unit);
    let piece = IFSPiece::new(
        a.conjugate(&unscaled.f),
        a.conjugate(&unscaled.g),
        Some(PeriodicRegion::compact(a.region(&kk))),
        PieceDomain::Compact(unit),
    );
    if !is_p_class(&piece.f, &piece.g) {
        return Err(fail("symmetric closing", "result is not in the P class"));
    }
    let report = verified(&piece, "rescaled piece")?;
    let b = boundary_exclusions(&piece)?;
    if !b.ok {
        return Err(fail("boundary exclusions", b.clause.unwrap_or_default()));
    }
    if piece.mu() != unscaled.mu() {
        return Err(fail("rescale", "mu changed"));
    }
    Ok(SymmetricClosure { unscaled, cut: m, piece: piece.with_tag(ClassTag::P), report })
}

/// The tail shape repeated up to period 1.
fn shape_on_unit_period(t: &Tail<Rat>) -> Result<RatRegion> {
    let k = (int(1) / &t.period).to_integer().to_usize().ok_or(Error::EmptyRegion)?;
    Ok(t.with_period_multiple(k).shape)
}

// ---------------------------------------------------------------------------
// the whole chain

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum N0 {
    Auto,
    Fixed(u64),
}

#[derive(Clone, Debug)]
pub struct Limits {
    /// cap on the total number of orbit-circle slots laid out by all leaps
    pub slot_budget: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { slot_budget: 20_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostEstimate {
    pub omega: u64,
    pub xi: usize,
    pub runway_d: u64,
    pub n0: u64,
    pub leaps: usize,
    pub slots: u128,
    /// largest single leap (r1, r2, slots)
    pub largest: (Rat, Rat, u128),
}

impl CostEstimate {
    pub fn render(&self) -> String {
        format!(
            "omega {} xi {} d {} n0 {}: {} leaps, about {} slots (largest {} -> {} with {} slots)",
            self.omega, self.xi, self.runway_d, self.n0, self.leaps, self.slots, self.largest.0, self.largest.1, self.largest.2
        )
    }
}

/// Smallest n for which every adjacent pair of 𝔉_n has max denominator ≥ `need`.
pub fn demo_n0(need: u64) -> Result<u64> {
    let mut n = need.max(1);
    loop {
        let f = farey_series(n)?;
        let ok = f.windows(2).all(|w| {
            let (_, a) = parts(&w[0]);
            let (_, b) = parts(&w[1]);
            a.max(b) as u64 >= need
        });
        if ok {
            return Ok(n);
        }
        n += 1;
    }
}

/// Slot count of a leap between adjacent r1 > r2, without building it.
fn leap_slots(r1: &Rat, r2: &Rat, xi: usize) -> u128 {
    let (p1, q1) = parts(r1);
    let (p2, q2) = parts(r2);
    let (p, q) = if q1 <= q2 { (p1, q1) } else { (p2, q2) };
    let tau = q1.max(q2) as u128;
    let cells = (xi as u128 + 6) * (p + q) as u128;
    cells * tau
}

fn resolve_n0(n0: N0, demo: bool, omega: u64, xi: usize) -> Result<u64> {
    let need = omega + xi as u64 + 2;
    match n0 {
        N0::Fixed(n) => Ok(n),
        N0::Auto if demo => demo_n0(need),
        N0::Auto => n_for_lambda(&rat(1, (omega + xi as u64 + 1) as i64)),
    }
}

/// Chain and cost of the full pipeline for ω.
pub fn estimate_counterexample(kit: &LeapKit, runway_d: u64, n0: N0, demo: bool) -> Result<(Vec<Rat>, CostEstimate)> {
    let omega = kit.template.n;
    let xi = kit.eater.xi;
    let n = resolve_n0(n0, demo, omega, xi)?;
    let chain = descending_chain(n, runway_d)?;
    let mut slots: u128 = 0;
    let mut largest = (int(0), int(0), 0u128);
    for w in chain.windows(2) {
        let s = leap_slots(&w[0], &w[1], xi);
        slots += s;
        if s > largest.2 {
            largest = (w[0].clone(), w[1].clone(), s);
        }
    }
    let est = CostEstimate { omega, xi, runway_d, n0: n, leaps: chain.len() - 1, slots, largest };
    Ok((chain, est))
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub piece: IFSPiece,
    pub closure: SymmetricClosure,
    pub estimate: CostEstimate,
    /// (stage, μ(f), μ(g)) in pipeline order
    pub stages: Vec<(String, Rat, Rat)>,
}

pub fn build_counterexample(omega: u64, n0: N0, demo: bool) -> Result<Counterexample> {
    build_counterexample_with(omega, n0, demo, &Limits::default())
}

/// runway → connector → leap → connector → … → connector to the symmetric
/// shape → reflect and close → rescale. Every stage is verified before the
/// next one starts.
pub fn build_counterexample_with(omega: u64, n0: N0, demo: bool, limits: &Limits) -> Result<Counterexample> {
    if omega < 3 {
        return Err(Error::Precondition(format!("omega must be at least 3, got {}", omega)));
    }
    let kit = LeapKit::new(omega)?;
    let runway = build_runway(omega)?;
    let (chain, estimate) = estimate_counterexample(&kit, runway.d, n0, demo)?;
    log::info!("counterexample plan: {}", estimate.render());
    // every pair must pass the slot gate before any work is done
    for w in chain.windows(2) {
        kit.plan(&w[0], &w[1]).map_err(|e| match e {
            Error::Inadmissible(s) => Error::Inadmissible(format!("chain pair {} -> {}: {}", w[0], w[1], s)),
            other => other,
        })?;
    }
    if estimate.slots > limits.slot_budget {
        return Err(Error::Budget(format!("{}; budget {} slots", estimate.render(), limits.slot_budget)));
    }
    let mut stages = vec![("runway".to_string(), runway.piece.f.mu(), runway.piece.g.mu())];
    let mut acc = runway.piece.clone();
    let mut shape = runway.right_shape.clone();
    for w in chain.windows(2) {
        let leap = realize_any_leap(&kit, &w[0], &w[1])?;
        let left_unit = unit_shape(&Tail { shape: leap.left.0.clone(), period: leap.left.1.clone() });
        let conn = build_connector(omega, &w[0], &shape, &left_unit)?;
        stages.push((format!("connector at {}", w[0]), conn.piece.f.mu(), conn.piece.g.mu()));
        acc = glue(&plan_glue(&acc, &conn.piece)?)?;
        stages.push((format!("leap {} -> {}", w[0], w[1]), leap.piece.f.mu(), leap.piece.g.mu()));
        acc = glue(&plan_glue(&acc, &leap.piece)?)?;
        shape = unit_shape(&Tail { shape: leap.right.0.clone(), period: leap.right.1.clone() });
    }
    let last = build_connector(omega, &int(1), &shape, &symmetric_shape())?;
    stages.push(("final connector".to_string(), last.piece.f.mu(), last.piece.g.mu()));
    acc = glue(&plan_glue(&acc, &last.piece)?)?;
    let closure = close_symmetric(&acc)?;
    let bound = rat(1, omega as i64);
    let (mf, mg) = closure.piece.mu();
    if mf > bound || mg > bound {
        return Err(fail("counterexample", format!("mu(f) = {}, mu(g) = {}", mf, mg)));
    }
    let top_f = stages.iter().map(|s| s.1.clone()).max().unwrap_or_else(Rat::zero);
    let top_g = stages.iter().map(|s| s.2.clone()).max().unwrap_or_else(Rat::zero);
    if max_s(&top_f, &top_g) != max_s(&mf, &mg) {
        return Err(fail("counterexample", "final mu differs from the stage maximum"));
    }
    Ok(Counterexample { piece: closure.piece.clone(), closure, estimate, stages })
}

// ---------------------------------------------------------------------------
// gallery

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GalleryExample {
    /// uniform contractions f = Cx, g = Cx + 1 − C
    Example1(Rat),
    /// bump-modified affine pair at c = 1/2 + ε
    Example2(Rat),
}

#[derive(Clone, Debug)]
pub struct GalleryPiece {
    pub piece: IFSPiece,
    /// fixed point of g∘f and its f-image (Example 2 only)
    pub p: Option<Rat>,
    pub q: Option<Rat>,
    pub report: Option<HidingReport>,
}

pub fn gallery_examples(which: &GalleryExample) -> Result<GalleryPiece> {
    match which {
        GalleryExample::Example1(c) => {
            if !c.is_positive() || c >= &int(1) {
                return Err(Error::Precondition(format!("contraction {} must lie in (0, 1)", c)));
            }
            let f = PLMap::compact(vec![(int(0), int(0)), (int(1), c.clone())])?;
            let g = PLMap::compact(vec![(int(0), int(1) - c), (int(1), int(1))])?;
            let piece = IFSPiece::new(f, g, None, PieceDomain::Compact(Ivl::of(int(0), int(1)))).with_tag(ClassTag::P);
            Ok(GalleryPiece { piece, p: None, q: None, report: None })
        }
        GalleryExample::Example2(eps) => example2(eps),
    }
}

fn example2(eps: &Rat) -> Result<GalleryPiece> {
    let c = rat(1, 2) + eps;
    if eps.is_negative() || &c * &c + &c >= int(1) {
        return Err(Error::Precondition(format!("eps = {} too large: need c^2 + c < 1 for c = 1/2 + eps", eps)));
    }
    let p = int(1) / (int(1) + &c);
    let q = &c * &p;
    // the bump lives in (c, 1), away from the image of f
    let a = (&p - &c) / int(2);
    let b = &c * &a / int(4);
    let two = int(2);
    let f = PLMap::compact(vec![
        (int(0), int(0)),
        (&p - &a, &q - &c * &a),
        (&p - &b, &q - &two * &b),
        (&p + &b, &q + &two * &b),
        (&p + &a, &q + &c * &a),
        (int(1), c.clone()),
    ])?;
    let g = mirror_map(&f).shifted(&int(1), &int(1));
    let jp = Ivl::of(&p - &b, &p + &b);
    let jq = Ivl::of(&q - &b, &q + &b);
    let k = Region::normalize(vec![jq, jp])?;
    let piece = IFSPiece::new(f, g, Some(PeriodicRegion::compact(k)), PieceDomain::Compact(Ivl::of(int(0), int(1))))
        .with_tag(ClassTag::P);
    let report = verified(&piece, "example 2")?;
    Ok(GalleryPiece { piece, p: Some(p), q: Some(q), report: Some(report) })
}

/// Half-line toy with the closing tail, used to exercise the symmetric
/// closing on its own: f contracts on [0, 11/8] and K repeats [3/8, 5/8].
pub fn toy_half_line() -> Result<IFSPiece> {
    let f = PLMap::new(vec![(int(0), int(0)), (rat(11, 8), rat(3, 8))], DomainKind::HalfLineRight)?;
    let g = PLMap::new(vec![(int(0), int(1))], DomainKind::HalfLineRight)?;
    let k = PeriodicRegion::new(
        Some(symmetric_shape()),
        (int(0), int(1)),
        None,
        Some(Tail::new(symmetric_shape(), int(1))?),
    )?;
    let piece = IFSPiece::new(f, g, Some(k), PieceDomain::HalfLine(int(0)));
    verified(&piece, "toy half-line")?;
    Ok(piece)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_models::build_connector;
    use crate::verifier::orbit_audit;

    #[test]
    fn example2_values() {
        let e0 = gallery_examples(&GalleryExample::Example2(int(0))).unwrap();
        assert_eq!(e0.p, Some(rat(2, 3)));
        assert_eq!(e0.q, Some(rat(1, 3)));
        // p is the fixed point of g∘f, checked by evaluation
        let p = e0.p.clone().unwrap();
        let gf = e0.piece.g.compose(&e0.piece.f).unwrap();
        assert_eq!(gf.eval(&p).unwrap(), p);
        for e in [rat(1, 20), rat(1, 10)] {
            let ex = gallery_examples(&GalleryExample::Example2(e)).unwrap();
            assert!(ex.report.unwrap().passed);
            assert!(is_p_class(&ex.piece.f, &ex.piece.g));
        }
        assert!(gallery_examples(&GalleryExample::Example2(rat(1, 5))).is_err());
        assert!(gallery_examples(&GalleryExample::Example1(int(1))).is_err());
    }

    #[test]
    fn example2_orbit_stays_out() {
        let ex = gallery_examples(&GalleryExample::Example2(rat(1, 10))).unwrap();
        let a = orbit_audit(&ex.piece, &int(0), 10).unwrap();
        assert!(a.all_outside);
    }

    #[test]
    fn mismatched_periods_refuse_to_glue() {
        let s = Region::single(rat(1, 4), rat(1, 2)).unwrap();
        let a = build_connector(3, &int(1), &s, &s).unwrap();
        let b = build_connector(3, &rat(3, 2), &s, &s).unwrap();
        assert!(plan_glue(&a.piece, &b.piece).is_err());
        let other = Region::single(rat(1, 8), rat(1, 2)).unwrap();
        let c = build_connector(3, &int(1), &other, &other).unwrap();
        let e = plan_glue(&a.piece, &c.piece).unwrap_err();
        assert!(e.to_string().contains("shapes differ"));
    }

    #[test]
    fn glue_two_connectors() {
        let s = Region::single(rat(1, 4), rat(1, 2)).unwrap();
        let split = Region::from_pairs(&[(rat(1, 8), rat(1, 4)), (rat(5, 8), rat(7, 8))]).unwrap();
        let a = build_connector(3, &int(2), &s, &split).unwrap();
        let b = build_connector(3, &int(2), &split, &s).unwrap();
        let plan = plan_glue(&a.piece, &b.piece).unwrap();
        assert!(plan.p.lo().is_integer() && plan.p_prime.lo().is_integer());
        let glued = glue(&plan).unwrap();
        assert_eq!(glued.mu(), (max_s(&a.piece.f.mu(), &b.piece.f.mu()), max_s(&a.piece.g.mu(), &b.piece.g.mu())));
        let k = glued.region().unwrap();
        assert_eq!(k.left().unwrap().shape, a.left_shape);
        assert_eq!(k.right().unwrap().shape, b.right_shape);
    }

    #[test]
    fn mirror_swaps_roles() {
        let s = Region::single(rat(1, 4), rat(1, 2)).unwrap();
        let split = Region::from_pairs(&[(rat(1, 8), rat(1, 4)), (rat(5, 8), rat(7, 8))]).unwrap();
        let a = build_connector(3, &int(1), &s, &split).unwrap();
        let m = mirror_piece(&a.piece).unwrap();
        assert_eq!(m.f.left_shift(), int(-1));
        assert_eq!(m.g.right_shift(), int(1));
        assert!(check_hiding_piece(&m, false).unwrap().passed);
        assert_eq!(mirror_piece(&m).unwrap(), a.piece);
    }

    #[test]
    fn toy_closing() {
        let toy = toy_half_line().unwrap();
        let c = close_symmetric(&toy).unwrap();
        assert!(is_p_class(&c.piece.f, &c.piece.g));
        assert!(c.report.passed);
        let k = c.piece.region().unwrap().core().unwrap().clone();
        assert_eq!(k.mirror().translate(&int(1)), k);
        assert!(orbit_audit(&c.piece, &int(0), 10).unwrap().all_outside);
        assert!(orbit_audit(&c.piece, &int(1), 10).unwrap().all_outside);
    }

    #[test]
    fn demo_order() {
        assert_eq!(demo_n0(1).unwrap(), 1);
        assert_eq!(demo_n0(3).unwrap(), 3);
        // (1/4, 1/3) stays adjacent through 𝔉_6; 2/7 splits it in 𝔉_7
        assert_eq!(demo_n0(5).unwrap(), 7);
    }
}
