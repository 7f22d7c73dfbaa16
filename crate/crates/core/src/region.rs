//! Closed intervals, finite unions of them, and their set algebra.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{max_s, min_s, Scalar};

/// Closed interval with non-empty interior.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ivl<S> {
    lo: S,
    hi: S,
}

impl<S: Scalar> Ivl<S> {
    pub fn new(lo: S, hi: S) -> Result<Self> {
        if lo < hi {
            Ok(Ivl { lo, hi })
        } else {
            Err(Error::BadInterval { lo: lo.to_string(), hi: hi.to_string() })
        }
    }

    /// Panicking constructor for literals known to be valid.
    pub fn of(lo: S, hi: S) -> Self {
        Self::new(lo, hi).expect("interval literal")
    }

    pub fn lo(&self) -> &S {
        &self.lo
    }

    pub fn hi(&self) -> &S {
        &self.hi
    }

    pub fn len(&self) -> S {
        self.hi.clone() - self.lo.clone()
    }

    pub fn mid(&self) -> S {
        (self.lo.clone() + self.hi.clone()).half()
    }

    pub fn contains(&self, x: &S) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_ivl(&self, o: &Ivl<S>) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn translate(&self, t: &S) -> Self {
        Ivl { lo: self.lo.clone() + t.clone(), hi: self.hi.clone() + t.clone() }
    }
}

impl<S: Scalar> fmt::Display for Ivl<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Normalized finite union of closed intervals where single points are
/// allowed. Intersections of regions land here.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ClosedSet<S> {
    parts: Vec<(S, S)>,
}

impl<S: Scalar> ClosedSet<S> {
    pub fn empty() -> Self {
        ClosedSet { parts: Vec::new() }
    }

    pub fn from_parts(mut raw: Vec<(S, S)>) -> Self {
        raw.retain(|(a, b)| a <= b);
        raw.sort();
        let mut parts: Vec<(S, S)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match parts.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => parts.push((a, b)),
            }
        }
        ClosedSet { parts }
    }

    pub fn point(x: S) -> Self {
        ClosedSet { parts: vec![(x.clone(), x)] }
    }

    pub fn parts(&self) -> &[(S, S)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains_point(&self, x: &S) -> bool {
        let i = self.parts.partition_point(|(_, b)| b < x);
        i < self.parts.len() && &self.parts[i].0 <= x
    }

    pub fn union(&self, o: &Self) -> Self {
        let mut raw = self.parts.clone();
        raw.extend(o.parts.iter().cloned());
        Self::from_parts(raw)
    }

    pub fn intersect(&self, o: &Self) -> Self {
        let (a, b) = (&self.parts, &o.parts);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = max_s(&a[i].0, &b[j].0);
            let hi = min_s(&a[i].1, &b[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        ClosedSet { parts: out }
    }

    pub fn clip(&self, lo: &S, hi: &S) -> Self {
        self.intersect(&ClosedSet { parts: vec![(lo.clone(), hi.clone())] })
    }

    /// Pieces of `self` not covered by `cover` (or by its interior when
    /// `strict`). Pieces are reported as closures.
    pub fn uncovered(&self, cover: &ClosedSet<S>, strict: bool) -> Vec<(S, S)> {
        let mut out = Vec::new();
        for (l, h) in &self.parts {
            let start = cover.parts.partition_point(|(_, ah)| ah < l);
            if l == h {
                let hit = cover.parts[start..].iter().take_while(|(al, _)| al <= l).any(|(al, ah)| {
                    if strict {
                        al < l && l < ah
                    } else {
                        al <= l && l <= ah
                    }
                });
                if !hit {
                    out.push((l.clone(), h.clone()));
                }
                continue;
            }
            let mut cursor = l.clone();
            let mut done = false;
            for (al, ah) in &cover.parts[start..] {
                if al > h {
                    break;
                }
                if strict {
                    if ah <= l {
                        continue;
                    }
                    if al >= &cursor {
                        out.push((cursor.clone(), al.clone()));
                    }
                    cursor = max_s(&cursor, ah);
                } else {
                    if al > &cursor {
                        out.push((cursor.clone(), al.clone()));
                    }
                    cursor = max_s(&cursor, ah);
                    if &cursor >= h {
                        done = true;
                        break;
                    }
                }
            }
            if strict {
                if &cursor <= h {
                    out.push((cursor, h.clone()));
                }
            } else if !done && &cursor < h {
                out.push((cursor, h.clone()));
            }
        }
        out
    }

    pub fn is_subset_of(&self, cover: &ClosedSet<S>) -> bool {
        self.uncovered(cover, false).is_empty()
    }

    pub fn translate(&self, t: &S) -> Self {
        ClosedSet {
            parts: self.parts.iter().map(|(a, b)| (a.clone() + t.clone(), b.clone() + t.clone())).collect(),
        }
    }

    /// Drop isolated points; None if nothing with interior remains.
    pub fn regular_part(&self) -> Option<Region<S>> {
        let comps: Vec<Ivl<S>> = self
            .parts
            .iter()
            .filter(|(a, b)| a < b)
            .map(|(a, b)| Ivl { lo: a.clone(), hi: b.clone() })
            .collect();
        if comps.is_empty() {
            None
        } else {
            Some(Region { comps })
        }
    }

    /// Exact conversion; fails on empty sets or isolated points.
    pub fn to_region(&self) -> Result<Region<S>> {
        if let Some((a, b)) = self.parts.iter().find(|(a, b)| a == b) {
            return Err(Error::BadInterval { lo: a.to_string(), hi: b.to_string() });
        }
        self.regular_part().ok_or(Error::EmptyRegion)
    }
}

impl<S: Scalar> fmt::Display for ClosedSet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (a, b)) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            if a == b {
                write!(f, "{{{}}}", a)?;
            } else {
                write!(f, "[{}, {}]", a, b)?;
            }
        }
        write!(f, "}}")
    }
}

/// Result of intersecting two regions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Meet<S> {
    Empty,
    Set(ClosedSet<S>),
}

impl<S: Scalar> Meet<S> {
    pub fn is_empty(&self) -> bool {
        matches!(self, Meet::Empty)
    }

    pub fn into_set(self) -> ClosedSet<S> {
        match self {
            Meet::Empty => ClosedSet::empty(),
            Meet::Set(s) => s,
        }
    }

    pub fn region(&self) -> Option<Region<S>> {
        match self {
            Meet::Empty => None,
            Meet::Set(s) => s.regular_part(),
        }
    }
}

/// Non-empty finite union of pairwise separated closed intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region<S> {
    comps: Vec<Ivl<S>>,
}

impl<S: Scalar> Region<S> {
    pub fn normalize(raw: Vec<Ivl<S>>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let set = ClosedSet::from_parts(raw.into_iter().map(|i| (i.lo, i.hi)).collect());
        set.to_region()
    }

    pub fn single(lo: S, hi: S) -> Result<Self> {
        Ok(Region { comps: vec![Ivl::new(lo, hi)?] })
    }

    pub fn from_pairs(pairs: &[(S, S)]) -> Result<Self> {
        let mut raw = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            raw.push(Ivl::new(a.clone(), b.clone())?);
        }
        Self::normalize(raw)
    }

    /// Accepts already-normalized components only (used when loading files).
    pub fn from_canonical(comps: Vec<Ivl<S>>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::EmptyRegion);
        }
        for w in comps.windows(2) {
            if w[0].hi >= w[1].lo {
                return Err(Error::Precondition(format!(
                    "components {} and {} overlap, touch or are unsorted",
                    w[0], w[1]
                )));
            }
        }
        Ok(Region { comps })
    }

    pub fn components(&self) -> &[Ivl<S>] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn hull(&self) -> Ivl<S> {
        Ivl {
            lo: self.comps[0].lo.clone(),
            hi: self.comps[self.comps.len() - 1].hi.clone(),
        }
    }

    pub fn measure(&self) -> S {
        self.comps.iter().fold(S::zero(), |acc, c| acc + c.len())
    }

    pub fn to_set(&self) -> ClosedSet<S> {
        ClosedSet { parts: self.comps.iter().map(|c| (c.lo.clone(), c.hi.clone())).collect() }
    }

    pub fn contains_point(&self, x: &S) -> bool {
        self.to_set().contains_point(x)
    }

    pub fn interior_contains_point(&self, x: &S) -> bool {
        let i = self.comps.partition_point(|c| &c.hi <= x);
        i < self.comps.len() && &self.comps[i].lo < x
    }

    pub fn union(&self, o: &Self) -> Self {
        self.to_set().union(&o.to_set()).to_region().expect("union of regions")
    }

    pub fn intersect(&self, o: &Self) -> Meet<S> {
        let s = self.to_set().intersect(&o.to_set());
        if s.is_empty() {
            Meet::Empty
        } else {
            Meet::Set(s)
        }
    }

    /// self ⊇ o
    pub fn contains(&self, o: &Self) -> bool {
        o.to_set().is_subset_of(&self.to_set())
    }

    /// int(self) ⊇ o
    pub fn interior_contains(&self, o: &Self) -> bool {
        o.to_set().uncovered(&self.to_set(), true).is_empty()
    }

    pub fn translate(&self, t: &S) -> Self {
        Region { comps: self.comps.iter().map(|c| c.translate(t)).collect() }
    }

    /// Affine image x ↦ a + k·(x − b) with k > 0.
    pub fn affine(&self, k: &S, from: &S, to: &S) -> Self {
        let map = |x: &S| to.clone() + k.clone() * (x.clone() - from.clone());
        Region { comps: self.comps.iter().map(|c| Ivl { lo: map(&c.lo), hi: map(&c.hi) }).collect() }
    }

    pub fn mirror(&self) -> Self {
        let mut comps: Vec<Ivl<S>> =
            self.comps.iter().map(|c| Ivl { lo: -c.hi.clone(), hi: -c.lo.clone() }).collect();
        comps.reverse();
        Region { comps }
    }
}

impl<S: Scalar> fmt::Display for Region<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, c) in self.comps.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat};

    fn reg(p: &[(i64, i64, i64, i64)]) -> Region<Rat> {
        Region::from_pairs(&p.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn normalize_merges_and_sorts() {
        assert_eq!(reg(&[(0, 1, 1, 4), (1, 4, 1, 2)]), reg(&[(0, 1, 1, 2)]));
        let r = reg(&[(1, 3, 2, 3), (0, 1, 1, 4)]);
        assert_eq!(r.components()[0], Ivl::of(rat(0, 1), rat(1, 4)));
        assert_eq!(r.len(), 2);
        assert_eq!(reg(&[(0, 1, 1, 2), (1, 4, 3, 4)]), reg(&[(0, 1, 3, 4)]));
        assert_eq!(Region::<Rat>::normalize(vec![]), Err(Error::EmptyRegion));
        assert!(Ivl::new(rat(1, 2), rat(1, 2)).is_err());
    }

    #[test]
    fn algebra_examples() {
        let a = reg(&[(0, 1, 1, 2)]);
        assert_eq!(a.intersect(&reg(&[(1, 3, 2, 3)])).region(), Some(reg(&[(1, 3, 1, 2)])));
        assert!(a.contains(&reg(&[(1, 8, 3, 8)])));
        assert!(!a.interior_contains(&reg(&[(1, 4, 1, 2)])));
        assert!(a.interior_contains(&reg(&[(1, 8, 3, 8)])));
        assert!(a.intersect(&reg(&[(2, 3, 1, 1)])).is_empty());
    }

    #[test]
    fn touching_intersection_is_a_point() {
        let m = reg(&[(0, 1, 1, 1)]).intersect(&reg(&[(1, 1, 2, 1)]));
        assert_eq!(m, Meet::Set(ClosedSet::point(rat(1, 1))));
        assert_eq!(m.region(), None);
    }

    #[test]
    fn uncovered_reports_closures() {
        let b = ClosedSet::from_parts(vec![(rat(0, 1), rat(1, 1))]);
        let a = ClosedSet::from_parts(vec![(rat(0, 1), rat(1, 2))]);
        assert_eq!(b.uncovered(&a, false), vec![(rat(1, 2), rat(1, 1))]);
        assert_eq!(b.uncovered(&a, true), vec![(rat(0, 1), rat(0, 1)), (rat(1, 2), rat(1, 1))]);
        let full = ClosedSet::from_parts(vec![(rat(-1, 1), rat(2, 1))]);
        assert!(b.uncovered(&full, true).is_empty());
        let two = ClosedSet::from_parts(vec![(rat(-1, 1), rat(1, 3)), (rat(1, 2), rat(2, 1))]);
        assert_eq!(b.uncovered(&two, false), vec![(rat(1, 3), rat(1, 2))]);
    }
}
