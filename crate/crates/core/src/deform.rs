//! Gradual deformation of regions: ε-equivalence witnesses, sequences of
//! equivalent regions, the composition budget Ω and geometry eaters.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::plmap::PLMap;
use crate::region::{Ivl, Region};
use crate::scalar::{int, max_s, min_s, rat, Rat};
use crate::template::Template;
use crate::{Interval, RatMap, RatRegion};

/// φ, ψ with φ(K) ⊂ L, ψ(L) ⊂ K and μ(φ), μ(ψ) < eps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivWitness {
    pub phi: RatMap,
    pub psi: RatMap,
    pub eps: Rat,
}

impl EquivWitness {
    pub fn swapped(&self) -> Self {
        EquivWitness { phi: self.psi.clone(), psi: self.phi.clone(), eps: self.eps.clone() }
    }
}

fn is_self_homeo(m: &RatMap) -> bool {
    m.kind() == crate::plmap::DomainKind::Compact && m.first().0 == m.first().1 && m.last().0 == m.last().1
}

fn image_within(m: &RatMap, src: &RatRegion, dst: &RatRegion) -> bool {
    match m.image_region(src) {
        Ok(img) => dst.contains(&img),
        Err(_) => false,
    }
}

pub fn check_equivalence(k: &RatRegion, l: &RatRegion, w: &EquivWitness) -> bool {
    if !is_self_homeo(&w.phi) || !is_self_homeo(&w.psi) {
        return false;
    }
    if w.phi.mu() >= w.eps || w.psi.mu() >= w.eps {
        return false;
    }
    image_within(&w.phi, k, l) && image_within(&w.psi, l, k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivSequence {
    pub ambient: Interval,
    pub regions: Vec<RatRegion>,
    pub witnesses: Vec<EquivWitness>,
}

impl EquivSequence {
    /// i₀
    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// A map U with M_{i+1} ⊂ U(M_i).
    pub fn forward_cover(&self, i: usize) -> RatMap {
        self.witnesses[i].psi.invert()
    }

    /// A map V with M_i ⊂ V(M_{i+1}).
    pub fn backward_cover(&self, i: usize) -> RatMap {
        self.witnesses[i].phi.invert()
    }

    pub fn reversed(&self) -> Self {
        let mut regions = self.regions.clone();
        regions.reverse();
        let witnesses = self.witnesses.iter().rev().map(EquivWitness::swapped).collect();
        EquivSequence { ambient: self.ambient.clone(), regions, witnesses }
    }

    /// Every step passes `check_equivalence` in both orders, and the
    /// covering maps stay under the same bound.
    pub fn verify(&self) -> bool {
        if self.regions.len() != self.witnesses.len() + 1 {
            return false;
        }
        (0..self.len()).into_par_iter().all(|i| {
            let (a, b, w) = (&self.regions[i], &self.regions[i + 1], &self.witnesses[i]);
            check_equivalence(a, b, w)
                && check_equivalence(b, a, &w.swapped())
                && self.forward_cover(i).mu() < w.eps
                && self.backward_cover(i).mu() < w.eps
        })
    }

    pub fn is_nested(&self) -> bool {
        self.regions.windows(2).all(|w| w[1].contains(&w[0]))
    }
}

/// Largest per-step slope deviation. Keeping slopes in [1−s, 1+s] keeps
/// both a step map and its inverse under eps.
fn step_budget(eps: &Rat) -> Rat {
    min_s(eps, &rat(1, 2)) / int(2)
}

/// Round down to a multiple of 2^-k where 2^-k ≤ x/8 (x > 0).
fn round_down(x: &Rat) -> Rat {
    let mut unit = Rat::one();
    while unit > x / int(8) {
        unit /= int(2);
    }
    (x / &unit).floor() * unit
}

fn endpoints(r: &RatRegion) -> Vec<Rat> {
    r.components().iter().flat_map(|c| [c.lo().clone(), c.hi().clone()]).collect()
}

fn from_endpoints(xs: &[Rat]) -> Result<RatRegion> {
    let comps = xs.chunks(2).map(|c| Ivl::new(c[0].clone(), c[1].clone())).collect::<Result<Vec<_>>>()?;
    Region::from_canonical(comps)
}

fn node_map(xs: &[Rat], ys: &[Rat]) -> Result<RatMap> {
    PLMap::compact(xs.iter().cloned().zip(ys.iter().cloned()).collect())
}

/// Same component count: move all endpoints along straight lines, with
/// steps sized so that each segment changes length by at most the budget.
fn deform_steps(amb: &Interval, k: &RatRegion, l: &RatRegion, eps: &Rat, out: &mut EquivSequence) -> Result<()> {
    let s = step_budget(eps);
    let wrap = |r: &RatRegion| {
        let mut v = vec![amb.lo().clone()];
        v.extend(endpoints(r));
        v.push(amb.hi().clone());
        v
    };
    let x0 = wrap(k);
    let x1 = wrap(l);
    let at = |t: &Rat| -> Vec<Rat> { x0.iter().zip(&x1).map(|(a, b)| a + (b - a) * t).collect() };
    let mut t = Rat::zero();
    let mut cur = x0.clone();
    while t < Rat::one() {
        let mut dt: Option<Rat> = None;
        for j in 0..cur.len() - 1 {
            let from = &x0[j + 1] - &x0[j];
            let to = &x1[j + 1] - &x1[j];
            if from == to {
                continue;
            }
            let len = &cur[j + 1] - &cur[j];
            let d = &s * len / (to - from).abs();
            dt = Some(match dt {
                Some(o) => min_s(&o, &d),
                None => d,
            });
        }
        let next_t = match dt {
            None => Rat::one(),
            Some(d) if d >= Rat::one() - &t => Rat::one(),
            Some(d) => &t + round_down(&d),
        };
        let next = at(&next_t);
        let phi = node_map(&cur, &next)?;
        let psi = phi.invert();
        out.regions.push(from_endpoints(&next[1..next.len() - 1])?);
        out.witnesses.push(EquivWitness { phi, psi, eps: eps.clone() });
        cur = next;
        t = next_t;
    }
    Ok(())
}

/// One step adding a tiny interval to the right of the longest component.
fn add_tiny(amb: &Interval, m: &RatRegion, eps: &Rat) -> Result<(RatRegion, EquivWitness)> {
    let s = step_budget(eps);
    let comps = m.components();
    let (idx, c) = comps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .expect("non-empty region");
    let right = comps.get(idx + 1).map(|n| n.lo().clone()).unwrap_or_else(|| amb.hi().clone());
    let (a, b) = (c.lo().clone(), c.hi().clone());
    // ψ squeezes [a, b+δ] onto [a, b] and stretches [b+δ, right] onto [b, right]
    let delta = &s * min_s(&(&b - &a), &(&right - &b)) / int(2);
    let mid = &b + &delta / int(2);
    let half = &delta / int(16);
    let tiny = Ivl::new(&mid - &half, &mid + &half)?;
    let mut raw: Vec<Interval> = comps.to_vec();
    raw.push(tiny);
    let next = Region::normalize(raw)?;
    let mut nodes = vec![(amb.lo().clone(), amb.lo().clone())];
    if a > *amb.lo() {
        nodes.push((a.clone(), a.clone()));
    }
    nodes.push((&b + &delta, b.clone()));
    if right < *amb.hi() {
        nodes.push((right.clone(), right.clone()));
    }
    nodes.push((amb.hi().clone(), amb.hi().clone()));
    let psi = PLMap::compact(nodes)?;
    let phi = PLMap::identity(amb.lo().clone(), amb.hi().clone());
    Ok((next, EquivWitness { phi, psi, eps: eps.clone() }))
}

fn inside_open(amb: &Interval, r: &RatRegion) -> bool {
    let h = r.hull();
    h.lo() > amb.lo() && h.hi() < amb.hi()
}

/// Sequence K = M_0, …, M_{i0} = L of eps-equivalent regions inside `amb`.
pub fn build_equiv_sequence_in(
    amb: &Interval,
    k: &RatRegion,
    l: &RatRegion,
    eps: &Rat,
    monotone: bool,
) -> Result<EquivSequence> {
    if !eps.is_positive() {
        return Err(Error::Precondition(format!("eps must be positive, got {}", eps)));
    }
    if !inside_open(amb, k) || !inside_open(amb, l) {
        return Err(Error::Precondition(format!("regions must lie inside the open interval {}", amb)));
    }
    if monotone && (k.len() != 1 || l.len() != 1 || !l.contains(k)) {
        return Err(Error::Precondition("monotone sequences need single intervals K ⊂ L".into()));
    }
    if k.len() > l.len() {
        return Ok(build_equiv_sequence_in(amb, l, k, eps, false)?.reversed());
    }
    let mut seq = EquivSequence { ambient: amb.clone(), regions: vec![k.clone()], witnesses: vec![] };
    let mut cur = k.clone();
    while cur.len() < l.len() {
        let (next, w) = add_tiny(amb, &cur, eps)?;
        seq.regions.push(next.clone());
        seq.witnesses.push(w);
        cur = next;
    }
    if cur != *l {
        deform_steps(amb, &cur, l, eps, &mut seq)?;
    }
    Ok(seq)
}

pub fn build_equiv_sequence(k: &RatRegion, l: &RatRegion, eps: &Rat, monotone: bool) -> Result<EquivSequence> {
    build_equiv_sequence_in(&Ivl::of(int(0), int(1)), k, l, eps, monotone)
}

/// Ω = 1/(3ω): two maps with μ < Ω compose to μ < 1/ω.
pub fn omega_budget(omega: u64) -> Rat {
    rat(1, 3 * omega as i64)
}

/// Where the attracting fixed points of the eater sit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttractorPlacement {
    /// exactly at the endpoints of the top interval, so h keeps it invariant
    AtEndpoints,
    /// at `frac` of the distance from each endpoint to the circle base point
    Outside(Rat),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometryEater {
    pub omega: u64,
    pub h: RatMap,
    pub xi: usize,
    pub alphas: Vec<RatMap>,
    pub betas: Vec<RatMap>,
    pub omega_budget: Rat,
    pub repeller: Rat,
    pub attractors: (Rat, Rat),
}

/// Projected slices π(𝒯_0), …, π(𝒯_{ω−1}) on the unit circle.
pub fn template_slices(t: &Template) -> Vec<RatRegion> {
    (0..t.n).map(|i| t.projected_slice(i).expect("every unit slice of a template is occupied")).collect()
}

/// Tent-shaped displacement between consecutive fixed points; `toward`
/// says whether points in that gap move right.
fn tent_map(fixed: &[Rat], toward_right: &[bool], kappa: &Rat) -> Result<RatMap> {
    let mut nodes = vec![(fixed[0].clone(), fixed[0].clone())];
    for (w, right) in fixed.windows(2).zip(toward_right) {
        let m = (&w[0] + &w[1]) / int(2);
        let d = kappa * (&w[1] - &w[0]) / int(2);
        let y = if *right { &m + d } else { &m - d };
        nodes.push((m, y));
        nodes.push((w[1].clone(), w[1].clone()));
    }
    PLMap::compact(nodes)
}

fn iterate(h: &RatMap, r: &RatRegion, times: usize) -> Result<RatRegion> {
    let mut cur = r.clone();
    for _ in 0..times {
        cur = h.image_region(&cur)?;
    }
    Ok(cur)
}

/// Stretch the component of `img` through `p` over `top` (α), or
/// stretch `top` over the hull of `img` (β). Nodes that would not move are
/// dropped so the result stays a valid map.
fn unit_map(pairs: Vec<(Rat, Rat)>) -> Result<RatMap> {
    let mut nodes = vec![(int(0), int(0))];
    nodes.extend(pairs);
    nodes.push((int(1), int(1)));
    PLMap::compact(nodes).map(|m| m.simplified())
}

fn alpha_for(img: &RatRegion, p: &Rat, top: &Interval) -> Result<RatMap> {
    let big = img
        .components()
        .iter()
        .find(|c| c.contains(p))
        .ok_or_else(|| Error::Precondition("slice image lost the repelling point".into()))?;
    unit_map(vec![
        (big.lo().clone(), min_s(big.lo(), top.lo())),
        (big.hi().clone(), max_s(big.hi(), top.hi())),
    ])
}

fn beta_for(img: &RatRegion, top: &Interval) -> Result<RatMap> {
    let h = img.hull();
    unit_map(vec![
        (top.lo().clone(), min_s(top.lo(), h.lo())),
        (top.hi().clone(), max_s(top.hi(), h.hi())),
    ])
}

pub const EATER_ITERATION_CAP: usize = 10_000;

pub fn build_geometry_eater(t: &Template, omega: u64, budget: &Rat) -> Result<GeometryEater> {
    build_geometry_eater_with(t, omega, budget, &AttractorPlacement::AtEndpoints)
}

pub fn build_geometry_eater_with(
    t: &Template,
    omega: u64,
    budget: &Rat,
    placement: &AttractorPlacement,
) -> Result<GeometryEater> {
    if t.n != omega || omega < 3 {
        return Err(Error::Precondition(format!("template order {} does not match omega {}", t.n, omega)));
    }
    if !budget.is_positive() {
        return Err(Error::Precondition("omega budget must be positive".into()));
    }
    let slices = template_slices(t);
    let top = slices[omega as usize - 1].hull();
    let p = slices[0].hull().mid();
    let (q1, q2) = match placement {
        AttractorPlacement::AtEndpoints => (top.lo().clone(), top.hi().clone()),
        AttractorPlacement::Outside(frac) => (
            top.lo() - top.lo() * frac,
            top.hi() + (int(1) - top.hi()) * frac,
        ),
    };
    let kappa = budget * rat(15, 16);
    let h = tent_map(
        &[int(0), q1.clone(), p.clone(), q2.clone(), int(1)],
        &[true, false, true, false],
        &kappa,
    )?;
    let work: Vec<RatRegion> = slices[..omega as usize - 1].to_vec();
    let mut imgs = work.clone();
    for xi in 1..=EATER_ITERATION_CAP {
        imgs = imgs.par_iter().map(|r| h.image_region(r)).collect::<Result<Vec<_>>>()?;
        let wit: Vec<Option<(RatMap, RatMap)>> = imgs
            .par_iter()
            .map(|img| {
                let a = alpha_for(img, &p, &top).ok()?;
                let b = beta_for(img, &top).ok()?;
                (a.mu() < *budget && b.mu() < *budget).then_some((a, b))
            })
            .collect();
        if wit.iter().all(Option::is_some) {
            let (alphas, betas) = wit.into_iter().map(Option::unwrap).unzip();
            let e = GeometryEater {
                omega,
                h,
                xi,
                alphas,
                betas,
                omega_budget: budget.clone(),
                repeller: p,
                attractors: (q1, q2),
            };
            log::debug!("geometry eater for omega {} reached xi = {}", omega, xi);
            return Ok(e);
        }
    }
    let stuck = (0..imgs.len())
        .find(|&i| {
            let ok = alpha_for(&imgs[i], &p, &top)
                .and_then(|a| beta_for(&imgs[i], &top).map(|b| a.mu() < *budget && b.mu() < *budget));
            !matches!(ok, Ok(true))
        })
        .unwrap_or(0);
    Err(Error::Verification {
        stage: "geometry eater".into(),
        detail: format!("iteration cap {} reached; slice {} has no witnesses", EATER_ITERATION_CAP, stuck),
    })
}

/// Re-check an eater from its stored data only.
pub fn verify_geometry_eater(e: &GeometryEater, t: &Template) -> bool {
    let budget = &e.omega_budget;
    if t.n != e.omega || e.alphas.len() + 1 != e.omega as usize || e.betas.len() != e.alphas.len() {
        return false;
    }
    let unit_homeo =
        |m: &RatMap| is_self_homeo(m) && m.first().0.is_zero() && m.last().0 == int(1) && m.mu() < *budget;
    if !unit_homeo(&e.h) || !e.alphas.iter().chain(&e.betas).all(unit_homeo) {
        return false;
    }
    let slices = template_slices(t);
    let top = slices[e.omega as usize - 1].clone();
    (0..e.alphas.len()).into_par_iter().all(|i| {
        let Ok(img) = iterate(&e.h, &slices[i], e.xi) else { return false };
        e.alphas[i].image_region(&img).map_or(false, |a| a.contains(&top))
            && e.betas[i].image_region(&top).map_or(false, |b| b.contains(&img))
    })
}

/// h^j(π(𝒯_i)) for the eater of a template.
pub fn eaten_slice(e: &GeometryEater, t: &Template, i: u64, j: usize) -> Result<RatRegion> {
    let s = t.projected_slice(i).ok_or_else(|| Error::Precondition(format!("no slice {}", i)))?;
    iterate(&e.h, &s, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::build_template;

    fn reg(p: &[(i64, i64, i64, i64)]) -> RatRegion {
        Region::from_pairs(&p.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_witness() {
        let k = reg(&[(1, 4, 1, 2)]);
        let id = PLMap::identity(int(0), int(1));
        let w = EquivWitness { phi: id.clone(), psi: id, eps: rat(1, 100) };
        assert!(check_equivalence(&k, &k, &w));
    }

    #[test]
    fn split_witness() {
        let k = reg(&[(1, 4, 1, 2)]);
        let l = reg(&[(1, 4, 3, 8), (7, 16, 1, 2)]);
        // φ squeezes K into the left part of L; ψ = id since L ⊂ K
        let phi = PLMap::compact(vec![(int(0), int(0)), (rat(1, 4), rat(1, 4)), (rat(1, 2), rat(3, 8)), (int(1), int(1))])
            .unwrap();
        let w = EquivWitness { phi: phi.clone(), psi: PLMap::identity(int(0), int(1)), eps: rat(3, 4) };
        assert!(check_equivalence(&k, &l, &w));
        let tight = EquivWitness { phi, psi: PLMap::identity(int(0), int(1)), eps: rat(1, 2) };
        assert!(!check_equivalence(&k, &l, &tight));
    }

    #[test]
    fn trivial_sequence() {
        let k = reg(&[(1, 4, 1, 2)]);
        let s = build_equiv_sequence(&k, &k, &rat(1, 3), false).unwrap();
        assert_eq!(s.len(), 0);
        assert!(build_equiv_sequence(&k, &k, &int(0), false).is_err());
    }

    #[test]
    fn monotone_sequence() {
        let k = reg(&[(1, 4, 3, 8)]);
        let l = reg(&[(1, 8, 1, 2)]);
        let s = build_equiv_sequence(&k, &l, &rat(1, 4), true).unwrap();
        assert!(s.verify());
        assert!(s.is_nested());
        assert_eq!(s.regions.first(), Some(&k));
        assert_eq!(s.regions.last(), Some(&l));
        for w in &s.witnesses {
            for sl in w.phi.slopes() {
                assert!(sl > rat(3, 4) && sl < rat(5, 4));
            }
        }
    }

    #[test]
    fn split_then_deform_and_back() {
        let k = reg(&[(1, 4, 1, 2)]);
        let l = reg(&[(1, 8, 1, 4), (5, 8, 7, 8)]);
        let s = build_equiv_sequence(&k, &l, &rat(1, 3), false).unwrap();
        assert!(s.verify());
        assert_eq!(s.regions[1].len(), 2);
        let back = build_equiv_sequence(&l, &k, &rat(1, 3), false).unwrap();
        assert!(back.verify());
        assert_eq!(back.regions.last(), Some(&k));
    }

    #[test]
    fn budgets() {
        assert_eq!(omega_budget(3), rat(1, 9));
        let o = omega_budget(3);
        assert_eq!((int(1) + &o) * (int(1) + &o) - int(1), rat(19, 81));
        let o4 = omega_budget(4);
        assert_eq!(int(2) * &o4 + &o4 * &o4, rat(25, 144));
    }

    #[test]
    fn eater_for_three() {
        let t = build_template(3);
        let e = build_geometry_eater(&t, 3, &omega_budget(3)).unwrap();
        assert!(verify_geometry_eater(&e, &t));
        assert_eq!(e.alphas.len(), 2);
        assert_eq!(e.h.eval(&e.repeller).unwrap(), e.repeller);
        let sl = e.h.slopes();
        assert!(sl.iter().all(|s| (s - int(1)).abs() < rat(1, 9)));
        let mut worse = e.clone();
        worse.xi -= 1;
        assert!(!verify_geometry_eater(&worse, &t));
    }
}
