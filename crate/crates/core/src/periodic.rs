//! Regions on unbounded domains: a core window plus periodic tails.

use std::fmt;

use crate::error::{Error, Result};
use crate::plmap::PLMap;
use crate::region::{ClosedSet, Ivl, Region};
use crate::scalar::{max_s, min_s, Scalar};

/// One periodic end: the region repeats `shape ⊂ (0, period)` on every slice
/// [mρ, (m+1)ρ] beyond the core window.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tail<S> {
    pub shape: Region<S>,
    pub period: S,
}

impl<S: Scalar> Tail<S> {
    pub fn new(shape: Region<S>, period: S) -> Result<Self> {
        let h = shape.hull();
        if !period.is_positive() || !h.lo().is_positive() || h.hi() >= &period {
            return Err(Error::Precondition(format!("tail shape {} must lie in (0, {})", shape, period)));
        }
        Ok(Tail { shape, period })
    }

    /// Slice copies intersecting [lo, hi].
    fn fill(&self, lo: &S, hi: &S, out: &mut Vec<(S, S)>) {
        if lo > hi {
            return;
        }
        let mut m = lo.floor_div(&self.period);
        loop {
            let base = m.clone() * self.period.clone();
            if &base > hi {
                break;
            }
            for c in self.shape.components() {
                let a = max_s(&(c.lo().clone() + base.clone()), lo);
                let b = min_s(&(c.hi().clone() + base.clone()), hi);
                if a <= b {
                    out.push((a, b));
                }
            }
            m = m + S::one();
        }
    }

    pub fn mirror(&self) -> Self {
        let shape = self.shape.mirror().translate(&self.period);
        Tail { shape, period: self.period.clone() }
    }

    /// Same set, described with period k·ρ.
    pub fn with_period_multiple(&self, k: usize) -> Self {
        let mut comps = Vec::new();
        for j in 0..k {
            let t = self.period.clone() * S::from_int(j as i64);
            comps.extend(self.shape.translate(&t).components().iter().cloned());
        }
        Tail { shape: Region::normalize(comps).unwrap(), period: self.period.clone() * S::from_int(k as i64) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicRegion<S> {
    core: Option<Region<S>>,
    window: (S, S),
    left: Option<Tail<S>>,
    right: Option<Tail<S>>,
}

impl<S: Scalar> PeriodicRegion<S> {
    pub fn new(core: Option<Region<S>>, window: (S, S), left: Option<Tail<S>>, right: Option<Tail<S>>) -> Result<Self> {
        let (a, b) = &window;
        if a > b {
            return Err(Error::Precondition(format!("window [{}, {}] reversed", a, b)));
        }
        if let Some(c) = &core {
            let h = c.hull();
            if h.lo() < a || h.hi() > b {
                return Err(Error::Precondition(format!("core {} leaves window [{}, {}]", c, a, b)));
            }
        }
        if let Some(t) = &left {
            if !a.is_multiple_of(&t.period) {
                return Err(Error::Precondition(format!("window start {} not a multiple of {}", a, t.period)));
            }
        }
        if let Some(t) = &right {
            if !b.is_multiple_of(&t.period) {
                return Err(Error::Precondition(format!("window end {} not a multiple of {}", b, t.period)));
            }
        }
        if core.is_none() && left.is_none() && right.is_none() {
            return Err(Error::EmptyRegion);
        }
        Ok(PeriodicRegion { core, window, left, right })
    }

    pub fn compact(r: Region<S>) -> Self {
        let h = r.hull();
        PeriodicRegion { window: (h.lo().clone(), h.hi().clone()), core: Some(r), left: None, right: None }
    }

    /// Region periodic on the whole line.
    pub fn fully_periodic(shape: Region<S>, period: S) -> Result<Self> {
        let t = Tail::new(shape, period)?;
        Self::new(None, (S::zero(), S::zero()), Some(t.clone()), Some(t))
    }

    pub fn core(&self) -> Option<&Region<S>> {
        self.core.as_ref()
    }

    pub fn window(&self) -> (&S, &S) {
        (&self.window.0, &self.window.1)
    }

    pub fn left(&self) -> Option<&Tail<S>> {
        self.left.as_ref()
    }

    pub fn right(&self) -> Option<&Tail<S>> {
        self.right.as_ref()
    }

    /// K ∩ [lo, hi].
    pub fn materialize(&self, lo: &S, hi: &S) -> ClosedSet<S> {
        let mut parts = Vec::new();
        let (a, b) = &self.window;
        if let Some(t) = &self.left {
            t.fill(lo, &min_s(hi, a), &mut parts);
        }
        if let Some(c) = &self.core {
            for comp in c.components() {
                let x = max_s(comp.lo(), lo);
                let y = min_s(comp.hi(), hi);
                if x <= y {
                    parts.push((x, y));
                }
            }
        }
        if let Some(t) = &self.right {
            t.fill(&max_s(lo, b), hi, &mut parts);
        }
        ClosedSet::from_parts(parts)
    }

    pub fn contains_point(&self, x: &S) -> bool {
        self.materialize(x, x).contains_point(x)
    }

    pub fn interior_contains_point(&self, x: &S) -> bool {
        let eps_window = self.materialize(&(x.clone() - S::one()), &(x.clone() + S::one()));
        eps_window.parts().iter().any(|(a, b)| a < x && x < b)
    }

    /// Region restricted to [lo, hi], as a plain region (None when empty).
    pub fn region_on(&self, lo: &S, hi: &S) -> Option<Region<S>> {
        self.materialize(lo, hi).regular_part()
    }

    pub fn is_compact(&self) -> bool {
        self.left.is_none() && self.right.is_none()
    }

    fn periods_divide(&self, t: &S) -> bool {
        self.left.as_ref().map_or(true, |l| t.is_multiple_of(&l.period))
            && self.right.as_ref().map_or(true, |r| t.is_multiple_of(&r.period))
    }

    pub fn translate(&self, t: &S) -> Result<Self> {
        if !self.periods_divide(t) {
            return Err(Error::TailsNotCommensurate(format!("shift {} against tail periods", t)));
        }
        Ok(PeriodicRegion {
            core: self.core.as_ref().map(|c| c.translate(t)),
            window: (self.window.0.clone() + t.clone(), self.window.1.clone() + t.clone()),
            left: self.left.clone(),
            right: self.right.clone(),
        })
    }

    pub fn mirror(&self) -> Self {
        PeriodicRegion {
            core: self.core.as_ref().map(|c| c.mirror()),
            window: (-self.window.1.clone(), -self.window.0.clone()),
            left: self.right.as_ref().map(|t| t.mirror()),
            right: self.left.as_ref().map(|t| t.mirror()),
        }
    }

    /// Aligned window that contains the core window and `span`.
    fn aligned_cover(&self, span: &Ivl<S>) -> (S, S) {
        let mut lo = min_s(&self.window.0, span.lo());
        let mut hi = max_s(&self.window.1, span.hi());
        if let Some(t) = &self.left {
            lo = lo.floor_div(&t.period) * t.period.clone();
        }
        if let Some(t) = &self.right {
            let m = hi.floor_div(&t.period);
            let mut b = m * t.period.clone();
            if b < hi {
                b = b + t.period.clone();
            }
            hi = b;
        }
        (lo, hi)
    }

    /// Same set with the core window widened to contain `span` (tail slices
    /// inside the new window are absorbed into the core).
    pub fn widened(&self, span: &Ivl<S>) -> Self {
        let (lo, hi) = self.aligned_cover(span);
        let core = self.materialize(&lo, &hi).regular_part();
        PeriodicRegion { core, window: (lo, hi), left: self.left.clone(), right: self.right.clone() }
    }

    fn transport(&self, f: &PLMap<S>, forward: bool) -> Result<Self> {
        let (tl, tr) = if forward {
            (f.left_shift(), f.right_shift())
        } else {
            (-f.left_shift(), -f.right_shift())
        };
        if self.left.is_some() && !f.kind().unbounded_left() {
            return Err(Error::Precondition("left tail beyond a bounded map domain".into()));
        }
        if self.right.is_some() && !f.kind().unbounded_right() {
            return Err(Error::Precondition("right tail beyond a bounded map domain".into()));
        }
        if let Some(t) = &self.left {
            if !tl.is_multiple_of(&t.period) {
                return Err(Error::TailsNotCommensurate(format!("left shift {} vs period {}", tl, t.period)));
            }
        }
        if let Some(t) = &self.right {
            if !tr.is_multiple_of(&t.period) {
                return Err(Error::TailsNotCommensurate(format!("right shift {} vs period {}", tr, t.period)));
            }
        }
        // window in source coordinates covering the map's nodes
        let span = if forward {
            f.node_span()
        } else {
            let s = f.node_span();
            Ivl::of(f.eval(s.lo())?, f.eval(s.hi())?)
        };
        let w = self.widened(&span);
        let (a, b) = (w.window.0.clone(), w.window.1.clone());
        let mv = |x: &S| if forward { f.eval(x) } else { f.eval_inv(x) };
        let core = match &w.core {
            None => None,
            Some(c) => {
                let mut comps = Vec::with_capacity(c.len());
                for comp in c.components() {
                    comps.push(Ivl::of(mv(comp.lo())?, mv(comp.hi())?));
                }
                Some(Region::from_canonical(comps)?)
            }
        };
        let na = if self.left.is_some() { a.clone() + tl } else { core.as_ref().map(|c| c.hull().lo().clone()).unwrap_or(mv(&a)?) };
        let nb = if self.right.is_some() { b.clone() + tr } else { core.as_ref().map(|c| c.hull().hi().clone()).unwrap_or(mv(&b)?) };
        PeriodicRegion::new(core, (na, nb), self.left.clone(), self.right.clone())
    }

    /// f(K); tails are carried along when f is a translation by a period multiple there.
    pub fn image(&self, f: &PLMap<S>) -> Result<Self> {
        self.transport(f, true)
    }

    /// f⁻¹(K); K must lie inside the image of f.
    pub fn preimage(&self, f: &PLMap<S>) -> Result<Self> {
        if let Some(c) = &self.core {
            for comp in c.components() {
                if !f.in_image(comp.lo()) || !f.in_image(comp.hi()) {
                    return Err(Error::Preimage { component: comp.to_string(), image: format!("{}", f) });
                }
            }
        }
        self.transport(f, false)
    }

    /// Copy with tail slice [mρ, (m+1)ρ] on the given side replaced by `shape + mρ`.
    pub fn with_slice(&self, right_side: bool, m: i64, shape: &Region<S>) -> Result<Self> {
        let t = if right_side { self.right.as_ref() } else { self.left.as_ref() }
            .ok_or_else(|| Error::Precondition("no tail on that side".into()))?;
        let base = t.period.clone() * S::from_int(m);
        let slice = Ivl::of(base.clone(), base.clone() + t.period.clone());
        let w = self.widened(&slice);
        let mut parts: Vec<(S, S)> = w
            .materialize(&w.window.0, &w.window.1)
            .parts()
            .iter()
            .filter(|(a, b)| b < slice.lo() || a > slice.hi())
            .cloned()
            .collect();
        parts.extend(shape.translate(&base).components().iter().map(|c| (c.lo().clone(), c.hi().clone())));
        let core = ClosedSet::from_parts(parts).to_region()?;
        PeriodicRegion::new(Some(core), w.window.clone(), w.left.clone(), w.right.clone())
    }
}

impl<S: Scalar> fmt::Display for PeriodicRegion<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(t) = &self.left {
            write!(f, "left({} mod {}) ", t.shape, t.period)?;
        }
        match &self.core {
            Some(c) => write!(f, "core[{}, {}]{}", self.window.0, self.window.1, c)?,
            None => write!(f, "core[{}, {}]{{}}", self.window.0, self.window.1)?,
        }
        if let Some(t) = &self.right {
            write!(f, " right({} mod {})", t.shape, t.period)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rat};

    fn shape() -> Region<Rat> {
        Region::single(rat(1, 4), rat(1, 2)).unwrap()
    }

    #[test]
    fn translation_keeps_periodic_region() {
        let k = PeriodicRegion::fully_periodic(shape(), int(1)).unwrap();
        let img = k.image(&PLMap::translation(int(-1))).unwrap();
        let (lo, hi) = (int(-5), int(5));
        assert_eq!(img.materialize(&lo, &hi), k.materialize(&lo, &hi));
        assert!(k.image(&PLMap::translation(rat(1, 2))).is_err());
    }

    #[test]
    fn materialize_slices() {
        let k = PeriodicRegion::fully_periodic(shape(), int(1)).unwrap();
        let s = k.materialize(&rat(-1, 1), &rat(3, 8));
        assert_eq!(s.parts(), &[(rat(-3, 4), rat(-1, 2)), (rat(1, 4), rat(3, 8))]);
        assert!(k.contains_point(&rat(9, 4)));
        assert!(!k.contains_point(&rat(-1, 8)));
    }

    #[test]
    fn mirror_is_involution() {
        let core = Region::single(rat(1, 8), rat(3, 4)).unwrap();
        let k = PeriodicRegion::new(
            Some(core),
            (int(0), int(2)),
            Some(Tail::new(Region::single(rat(1, 8), rat(1, 4)).unwrap(), rat(1, 2)).unwrap()),
            Some(Tail::new(shape(), int(1)).unwrap()),
        )
        .unwrap();
        assert_eq!(k.mirror().mirror(), k);
        assert!(k.mirror().contains_point(&rat(-1, 2)));
    }

    #[test]
    fn replacing_one_slice() {
        let k = PeriodicRegion::fully_periodic(shape(), int(1)).unwrap();
        let bent = k.with_slice(true, 3, &shape().translate(&rat(1, 16))).unwrap();
        assert!(bent.contains_point(&rat(3 * 16 + 4 + 1, 16)));
        assert!(!bent.contains_point(&rat(3 * 16 + 4, 16)));
        assert!(bent.contains_point(&rat(2 * 16 + 4, 16)));
    }
}
