//! Reflection, affine conjugation and projection to a period circle.

use crate::error::{Error, Result};
use crate::periodic::PeriodicRegion;
use crate::plmap::PLMap;
use crate::region::{ClosedSet, Ivl, Region};
use crate::scalar::Scalar;

/// x ↦ −F(−x).
pub fn mirror_map<S: Scalar>(f: &PLMap<S>) -> PLMap<S> {
    let mut nodes: Vec<(S, S)> = f.nodes().iter().map(|(x, y)| (-x.clone(), -y.clone())).collect();
    nodes.reverse();
    PLMap::new(nodes, f.kind().mirrored()).expect("mirror keeps monotonicity")
}

pub fn mirror_region<S: Scalar>(r: &Region<S>) -> Region<S> {
    r.mirror()
}

pub fn mirror_periodic<S: Scalar>(r: &PeriodicRegion<S>) -> PeriodicRegion<S> {
    r.mirror()
}

/// The orientation-preserving affine bijection src → dst.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine<S> {
    pub scale: S,
    pub src_lo: S,
    pub dst_lo: S,
}

impl<S: Scalar> Affine<S> {
    pub fn between(src: &Ivl<S>, dst: &Ivl<S>) -> Self {
        Affine { scale: dst.len() / src.len(), src_lo: src.lo().clone(), dst_lo: dst.lo().clone() }
    }

    /// Affine map with the given scale fixing nothing in particular:
    /// x ↦ dst_lo + scale·(x − src_lo).
    pub fn apply(&self, x: &S) -> S {
        self.dst_lo.clone() + self.scale.clone() * (x.clone() - self.src_lo.clone())
    }

    pub fn inverse(&self) -> Self {
        Affine {
            scale: S::one() / self.scale.clone(),
            src_lo: self.dst_lo.clone(),
            dst_lo: self.src_lo.clone(),
        }
    }

    pub fn region(&self, r: &Region<S>) -> Region<S> {
        r.affine(&self.scale, &self.src_lo, &self.dst_lo)
    }

    pub fn set(&self, s: &ClosedSet<S>) -> ClosedSet<S> {
        ClosedSet::from_parts(s.parts().iter().map(|(a, b)| (self.apply(a), self.apply(b))).collect())
    }

    /// a ∘ F ∘ a⁻¹
    pub fn conjugate(&self, f: &PLMap<S>) -> PLMap<S> {
        let nodes = f.nodes().iter().map(|(x, y)| (self.apply(x), self.apply(y))).collect();
        PLMap::new(nodes, f.kind()).expect("conjugation keeps monotonicity")
    }
}

/// Conjugate a map of the interval `src` to one of `dst`.
pub fn rescale<S: Scalar>(f: &PLMap<S>, src: &Ivl<S>, dst: &Ivl<S>) -> PLMap<S> {
    Affine::between(src, dst).conjugate(f)
}

pub fn rescale_region<S: Scalar>(r: &Region<S>, src: &Ivl<S>, dst: &Ivl<S>) -> Region<S> {
    Affine::between(src, dst).region(r)
}

/// Conjugate a circle map (given by its lift on [0, c_src]) to the circle of
/// circumference c_dst. Same formula as `rescale` with both circles based at 0.
pub fn renormalize<S: Scalar>(f: &PLMap<S>, c_src: &S, c_dst: &S) -> PLMap<S> {
    rescale(f, &Ivl::of(S::zero(), c_src.clone()), &Ivl::of(S::zero(), c_dst.clone()))
}

pub fn renormalize_region<S: Scalar>(r: &Region<S>, c_src: &S, c_dst: &S) -> Region<S> {
    rescale_region(r, &Ivl::of(S::zero(), c_src.clone()), &Ivl::of(S::zero(), c_dst.clone()))
}

/// Union over slices [mρ, (m+1)ρ] ⊂ window of (K ∩ slice) − mρ, as a subset of [0, ρ].
pub fn project<S: Scalar>(k: &ClosedSet<S>, period: &S, window: &Ivl<S>) -> Result<ClosedSet<S>> {
    let slices = window.len() / period.clone();
    if !window.len().is_multiple_of(period) {
        return Err(Error::ProjectWindow { window: window.len().to_string(), period: period.to_string() });
    }
    let mut parts = Vec::new();
    let mut base = window.lo().clone();
    let mut m = S::zero();
    while m < slices {
        let cut = k.clip(&base, &(base.clone() + period.clone()));
        for (a, b) in cut.parts() {
            parts.push((a.clone() - base.clone(), b.clone() - base.clone()));
        }
        base = base + period.clone();
        m = m + S::one();
    }
    Ok(ClosedSet::from_parts(parts))
}

/// `project` restricted to the parts with interior, returned as a region.
pub fn project_region<S: Scalar>(k: &Region<S>, period: &S, window: &Ivl<S>) -> Result<Option<Region<S>>> {
    Ok(project(&k.to_set(), period, window)?.regular_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rat};

    #[test]
    fn mirror_translation() {
        let f = PLMap::<Rat>::translation(int(-1));
        let m = mirror_map(&f);
        assert_eq!(m.eval(&int(3)).unwrap(), int(4));
        assert_eq!(mirror_map(&m), f);
    }

    #[test]
    fn project_example() {
        let k = Region::from_pairs(&[(rat(1, 8), rat(1, 4)), (rat(9, 8), rat(5, 4))]).unwrap();
        let p = project_region(&k, &int(1), &Ivl::of(int(0), int(2))).unwrap().unwrap();
        assert_eq!(p, Region::single(rat(1, 8), rat(1, 4)).unwrap());
        assert!(project_region(&k, &int(1), &Ivl::of(int(0), rat(3, 2))).is_err());
    }

    #[test]
    fn rescale_keeps_mu() {
        let f = PLMap::compact(vec![(int(0), int(0)), (rat(1, 2), rat(1, 3)), (int(1), int(1))]).unwrap();
        let g = rescale(&f, &Ivl::of(int(0), int(1)), &Ivl::of(int(0), int(2)));
        assert_eq!(g.mu(), rat(1, 3));
        assert_eq!(g.eval(&int(1)).unwrap(), rat(2, 3));
    }
}
