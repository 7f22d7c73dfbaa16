//! Runway and connector pieces: the two local models with periodic tails
//! that the assembly strings together.

use num_traits::{Signed, Zero};

use crate::deform::{build_equiv_sequence, EquivSequence};
use crate::error::{Error, Result};
use crate::periodic::{PeriodicRegion, Tail};
use crate::plmap::{DomainKind, PLMap};
use crate::region::{Ivl, Region};
use crate::scalar::{int, rat, Rat};
use crate::template::{build_template, Template};
use crate::verifier::{check_hiding_piece, HidingReport, IFSPiece, PieceDomain};
use crate::{Interval, RatMap, RatRegion};

/// Place unit shapes on consecutive cells [start + k·len, start + (k+1)·len].
pub(crate) fn tile<'a>(start: &Rat, len: &Rat, shapes: impl IntoIterator<Item = &'a RatRegion>) -> Result<RatRegion> {
    let mut comps = Vec::new();
    let mut base = start.clone();
    for s in shapes {
        for c in s.components() {
            comps.push(Ivl::of(&base + len * c.lo(), &base + len * c.hi()));
        }
        base += len;
    }
    Region::from_canonical(comps)
}

/// Cell [start + k·len, start + (k+1)·len].
pub(crate) fn cell(start: &Rat, len: &Rat, k: i64) -> Interval {
    let lo = start + len * int(k);
    Ivl::of(lo.clone(), lo + len)
}

fn unit_shape_ok(s: &RatRegion) -> bool {
    let h = s.hull();
    h.lo().is_positive() && h.hi() < &int(1)
}

fn verified(piece: IFSPiece, stage: &str) -> Result<(IFSPiece, HidingReport)> {
    let report = check_hiding_piece(&piece, false)?;
    if !report.passed {
        return Err(Error::Verification { stage: stage.into(), detail: report.render() });
    }
    Ok((piece, report))
}

#[derive(Clone, Debug)]
pub struct RunwayPiece {
    pub piece: IFSPiece,
    pub omega: u64,
    /// translation of g
    pub d: u64,
    pub i0: usize,
    /// right tail shape on the unit period (the bottom template slice)
    pub right_shape: RatRegion,
    pub template: Template,
    pub sequence: EquivSequence,
    pub report: HidingReport,
}

/// Half-line model: f contracts near 0 and translates by −1 far out, g
/// translates by d; the hiding region runs from the template to a 1-periodic
/// tail through a nested sequence of slices.
pub fn build_runway(omega: u64) -> Result<RunwayPiece> {
    if omega < 3 {
        return Err(Error::Precondition(format!("runway needs omega >= 3, got {}", omega)));
    }
    let t = build_template(omega);
    let w = omega as i64;
    let bottom = t.projected_slice(0).ok_or(Error::EmptyRegion)?;
    let top = t.projected_slice(omega - 1).ok_or(Error::EmptyRegion)?;
    let seq = build_equiv_sequence(&bottom, &top, &rat(1, w), true)?;
    let i0 = seq.len();
    let d = omega + i0 as u64;
    let f1 = PLMap::new(vec![(int(0), int(0)), (int(w), int(w - 1))], DomainKind::HalfLineRight)?;
    let covers: Vec<RatMap> = (0..i0).map(|i| seq.forward_cover(i)).collect();
    // slice M_i sits on I(ω−1+i0−i); F there carries M_i over M_{i+1}
    let patches: Vec<(Interval, &RatMap)> =
        (0..i0).map(|i| (cell(&int(0), &int(1), w - 1 + (i0 - i) as i64), &covers[i])).collect();
    let f = f1.fill_unit_shapes(&patches)?;
    let g = PLMap::new(vec![(int(0), int(d as i64))], DomainKind::HalfLineRight)?;
    let mut comps: Vec<Interval> = t.region().components().to_vec();
    let zone = tile(&int(w), &int(1), seq.regions[..i0].iter().rev())?;
    comps.extend(zone.components().iter().cloned());
    let core = Region::from_canonical(comps)?;
    let k = PeriodicRegion::new(Some(core), (int(0), int(d as i64)), None, Some(Tail::new(bottom.clone(), int(1))?))?;
    let piece = IFSPiece::new(f, g, Some(k), PieceDomain::HalfLine(int(0)));
    let (piece, report) = verified(piece, "runway")?;
    let (mf, mg) = piece.mu();
    if mf > rat(1, w) || !mg.is_zero() {
        return Err(Error::Verification { stage: "runway".into(), detail: format!("mu(F) = {}, mu(G) = {}", mf, mg) });
    }
    log::debug!("runway omega {}: i0 = {}, d = {}, {} F nodes", omega, i0, d, piece.f.nodes().len());
    Ok(RunwayPiece { piece, omega, d, i0, right_shape: bottom, template: t, sequence: seq, report })
}

/// Index groups of a p/q connector: H{k} = [k(p+q), (k+1)(p+q)), split into
/// the first p indices (left part) and the last q (right part).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grouping {
    pub p: i64,
    pub q: i64,
}

impl Grouping {
    pub fn group(&self, i: i64) -> i64 {
        i.div_euclid(self.p + self.q)
    }

    pub fn in_left(&self, i: i64) -> bool {
        i.rem_euclid(self.p + self.q) < self.p
    }

    pub fn h(&self, k: i64) -> std::ops::Range<i64> {
        k * (self.p + self.q)..(k + 1) * (self.p + self.q)
    }

    pub fn h_left(&self, k: i64) -> std::ops::Range<i64> {
        k * (self.p + self.q)..k * (self.p + self.q) + self.p
    }

    pub fn h_right(&self, k: i64) -> std::ops::Range<i64> {
        k * (self.p + self.q) + self.p..(k + 1) * (self.p + self.q)
    }

    /// The four transport rules between groups, checked for |i| ≤ reach.
    /// Needs p ≥ q.
    pub fn identities_hold(&self, reach: i64) -> bool {
        (-reach..=reach).all(|i| {
            let k = self.group(i);
            let fwd = self.group(i + self.p);
            let back = self.group(i - self.q);
            if self.in_left(i) {
                // left part moves forward into the right part or the next left part
                let a = (fwd == k && !self.in_left(i + self.p)) || (fwd == k + 1 && self.in_left(i + self.p));
                // and back into itself or the previous right part
                let b = (back == k && self.in_left(i - self.q)) || (back == k - 1 && !self.in_left(i - self.q));
                a && b
            } else {
                let a = (fwd == k && !self.in_left(i + self.p)) || (fwd == k + 1 && self.in_left(i + self.p));
                let b = back == k && self.in_left(i - self.q);
                a && b
            }
        })
    }
}

#[derive(Clone, Debug)]
pub struct ConnectorPiece {
    pub piece: IFSPiece,
    pub omega: u64,
    pub r: Rat,
    pub grouping: Grouping,
    pub i0: usize,
    /// tail shapes on the circle of circumference 1/q
    pub left_shape: RatRegion,
    pub right_shape: RatRegion,
    pub report: HidingReport,
}

impl ConnectorPiece {
    pub fn period(&self) -> Rat {
        rat(1, self.grouping.q)
    }
}

/// Full-line model with f = x − 1 and g = x + r away from a window, whose
/// hiding region has the unit shape `k1` on the left and `k2` on the right
/// (both rescaled to the period 1/q).
pub fn build_connector(omega: u64, r: &Rat, k1: &RatRegion, k2: &RatRegion) -> Result<ConnectorPiece> {
    if omega < 3 {
        return Err(Error::Precondition(format!("connector needs omega >= 3, got {}", omega)));
    }
    if r < &int(1) {
        return Err(Error::Precondition(format!("connector translation {} is below 1", r)));
    }
    if !unit_shape_ok(k1) || !unit_shape_ok(k2) {
        return Err(Error::Precondition("connector shapes must avoid 0 on the circle".into()));
    }
    let (p, q) = crate::farey::parts(r);
    let grouping = Grouping { p, q };
    let c = rat(1, q);
    let left_shape = Tail::new(k1.affine(&c, &int(0), &int(0)), c.clone())?.shape;
    let right_shape = Tail::new(k2.affine(&c, &int(0), &int(0)), c.clone())?.shape;
    let f1 = PLMap::translation(int(-1));
    let g1 = PLMap::translation(r.clone());
    if k1 == k2 {
        let k = PeriodicRegion::fully_periodic(left_shape.clone(), c)?;
        let (piece, report) = verified(IFSPiece::new(f1, g1, Some(k), PieceDomain::FullLine), "connector")?;
        return Ok(ConnectorPiece { piece, omega, r: r.clone(), grouping, i0: 0, left_shape, right_shape, report });
    }
    let seq = build_equiv_sequence(k1, k2, &rat(1, omega as i64), false)?;
    let i0 = seq.len() as i64;
    let ups: Vec<RatMap> = (0..seq.len()).map(|k| seq.forward_cover(k)).collect();
    let downs: Vec<RatMap> = (0..seq.len()).map(|k| seq.backward_cover(k)).collect();
    let mut f_patches = Vec::new();
    let mut g_patches = Vec::new();
    for k in 0..i0 {
        for i in grouping.h_left(k) {
            g_patches.push((cell(&int(0), &c, i), &ups[k as usize]));
        }
        for i in grouping.h_right(k) {
            f_patches.push((cell(&int(0), &c, i), &downs[k as usize]));
        }
    }
    let f = f1.fill_unit_shapes(&f_patches)?;
    let g = g1.fill_unit_shapes(&g_patches)?;
    let lo_i = -(p + q);
    let hi_i = (i0 + 2) * (p + q);
    let slot = |i: i64| -> &RatRegion {
        let k = grouping.group(i);
        let m = if i < 0 {
            0
        } else if grouping.in_left(i) {
            k
        } else {
            k + 1
        };
        &seq.regions[m.clamp(0, i0) as usize]
    };
    let core = tile(&(&c * int(lo_i)), &c, (lo_i..hi_i).map(slot))?;
    let k = PeriodicRegion::new(
        Some(core),
        (&c * int(lo_i), &c * int(hi_i)),
        Some(Tail::new(left_shape.clone(), c.clone())?),
        Some(Tail::new(right_shape.clone(), c.clone())?),
    )?;
    let piece = IFSPiece::new(f, g, Some(k), PieceDomain::FullLine);
    let (piece, report) = verified(piece, "connector")?;
    let bound = rat(1, omega as i64);
    let (mf, mg) = piece.mu();
    if mf >= bound || mg >= bound {
        return Err(Error::Verification { stage: "connector".into(), detail: format!("mu(F) = {}, mu(G) = {}", mf, mg) });
    }
    Ok(ConnectorPiece { piece, omega, r: r.clone(), grouping, i0: i0 as usize, left_shape, right_shape, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::project_region;

    fn reg(p: &[(i64, i64, i64, i64)]) -> RatRegion {
        Region::from_pairs(&p.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn runway_three() {
        let rw = build_runway(3).unwrap();
        assert_eq!(rw.piece.mu(), (rat(1, 3), int(0)));
        assert_eq!(rw.d, 3 + rw.i0 as u64);
        let k = rw.piece.k.as_ref().unwrap();
        // far slices repeat the bottom template slice
        let far = int(rw.d as i64);
        let seen = k.materialize(&far, &(&far + int(4)));
        let proj = project_region(&seen.to_region().unwrap(), &int(1), &Ivl::of(far.clone(), &far + int(4))).unwrap();
        assert_eq!(proj.unwrap(), rw.right_shape);
        // F is a unit translation from I(ω) on
        for i in 3..(rw.d as i64 + 3) {
            assert_eq!(rw.piece.f.eval(&int(i)).unwrap(), int(i - 1));
        }
        assert_eq!(rw.piece.f.eval(&rat(3, 2)).unwrap(), int(1));
    }

    #[test]
    fn grouping_for_three_halves() {
        let g = Grouping { p: 3, q: 2 };
        assert_eq!(g.h(0), 0..5);
        assert_eq!(g.h_left(0), 0..3);
        assert_eq!(g.h_right(0), 3..5);
        assert!(g.identities_hold(40));
        assert!(!Grouping { p: 1, q: 2 }.identities_hold(10));
    }

    #[test]
    fn identity_connector() {
        let s = reg(&[(1, 4, 1, 2)]);
        let c = build_connector(3, &int(1), &s, &s).unwrap();
        assert_eq!(c.i0, 0);
        assert_eq!(c.piece.f, PLMap::translation(int(-1)));
        assert_eq!(c.piece.g, PLMap::translation(int(1)));
    }

    #[test]
    fn splitting_connector() {
        let one = reg(&[(1, 4, 1, 2)]);
        let two = reg(&[(1, 8, 1, 4), (5, 8, 7, 8)]);
        let c = build_connector(3, &int(2), &one, &two).unwrap();
        assert!(c.i0 > 0);
        assert!(c.report.passed);
        let (mf, mg) = c.piece.mu();
        assert!(mf < rat(1, 3) && mg < rat(1, 3));
        let half = build_connector(3, &rat(3, 2), &two, &one).unwrap();
        assert_eq!(half.right_shape, reg(&[(1, 8, 1, 4)]));
    }

    #[test]
    fn unperturbed_maps_lose_the_region() {
        let one = reg(&[(1, 4, 1, 2)]);
        let two = reg(&[(1, 8, 1, 4), (5, 8, 7, 8)]);
        let c = build_connector(3, &int(2), &one, &two).unwrap();
        let mut bare = c.piece.clone();
        bare.g = PLMap::translation(int(2));
        assert!(!check_hiding_piece(&bare, false).unwrap().passed);
        let mut bare = c.piece.clone();
        bare.f = PLMap::translation(int(-1));
        assert!(!check_hiding_piece(&bare, false).unwrap().passed);
        let rw = build_runway(3).unwrap();
        let mut bare = rw.piece.clone();
        bare.f = PLMap::new(vec![(int(0), int(0)), (int(3), int(2))], DomainKind::HalfLineRight).unwrap();
        assert!(!check_hiding_piece(&bare, false).unwrap().passed);
    }

    #[test]
    fn connector_rejects_shapes_at_zero() {
        let bad = reg(&[(0, 1, 1, 2)]);
        let ok = reg(&[(1, 4, 1, 2)]);
        assert!(matches!(build_connector(3, &int(1), &bad, &ok), Err(Error::Precondition(_))));
    }
}
