//! Orientation-preserving piecewise-linear homeomorphisms onto their image.

use std::fmt;

use crate::error::{Error, Result};
use crate::region::{ClosedSet, Ivl, Region};
use crate::scalar::{max_s, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainKind {
    /// [x_first, x_last]
    Compact,
    /// [x_first, ∞)
    HalfLineRight,
    /// (−∞, x_last]
    HalfLineLeft,
    FullLine,
}

impl DomainKind {
    pub fn unbounded_left(self) -> bool {
        matches!(self, DomainKind::HalfLineLeft | DomainKind::FullLine)
    }

    pub fn unbounded_right(self) -> bool {
        matches!(self, DomainKind::HalfLineRight | DomainKind::FullLine)
    }

    pub fn mirrored(self) -> Self {
        match self {
            DomainKind::HalfLineRight => DomainKind::HalfLineLeft,
            DomainKind::HalfLineLeft => DomainKind::HalfLineRight,
            k => k,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DomainKind::Compact => "compact",
            DomainKind::HalfLineRight => "half_line_right",
            DomainKind::HalfLineLeft => "half_line_left",
            DomainKind::FullLine => "full_line",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "compact" => DomainKind::Compact,
            "half_line_right" => DomainKind::HalfLineRight,
            "half_line_left" => DomainKind::HalfLineLeft,
            "full_line" => DomainKind::FullLine,
            _ => return None,
        })
    }
}

/// How `modify_over` pins the new shape vertically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModifyMode<S> {
    /// keep G(x0) = g(x0)
    Anchor(S),
    /// keep G(J) = g(J); lengths must agree exactly
    Fill,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PLMap<S> {
    nodes: Vec<(S, S)>,
    kind: DomainKind,
}

impl<S: Scalar> PLMap<S> {
    pub fn new(nodes: Vec<(S, S)>, kind: DomainKind) -> Result<Self> {
        let need = if kind == DomainKind::Compact { 2 } else { 1 };
        if nodes.len() < need {
            return Err(Error::NotMonotone(format!("{} map needs at least {} nodes", kind.name(), need)));
        }
        for w in nodes.windows(2) {
            if w[0].0 >= w[1].0 || w[0].1 >= w[1].1 {
                return Err(Error::NotMonotone(format!(
                    "nodes ({}, {}) and ({}, {})",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(PLMap { nodes, kind })
    }

    pub fn translation(t: S) -> Self {
        PLMap { nodes: vec![(S::zero(), t)], kind: DomainKind::FullLine }
    }

    pub fn identity(lo: S, hi: S) -> Self {
        PLMap { nodes: vec![(lo.clone(), lo), (hi.clone(), hi)], kind: DomainKind::Compact }
    }

    /// Linear interpolation through the given points on a compact domain.
    pub fn compact(nodes: Vec<(S, S)>) -> Result<Self> {
        Self::new(nodes, DomainKind::Compact)
    }

    pub fn nodes(&self) -> &[(S, S)] {
        &self.nodes
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn first(&self) -> &(S, S) {
        &self.nodes[0]
    }

    pub fn last(&self) -> &(S, S) {
        &self.nodes[self.nodes.len() - 1]
    }

    pub fn domain_lo(&self) -> Option<S> {
        (!self.kind.unbounded_left()).then(|| self.first().0.clone())
    }

    pub fn domain_hi(&self) -> Option<S> {
        (!self.kind.unbounded_right()).then(|| self.last().0.clone())
    }

    pub fn image_lo(&self) -> Option<S> {
        (!self.kind.unbounded_left()).then(|| self.first().1.clone())
    }

    pub fn image_hi(&self) -> Option<S> {
        (!self.kind.unbounded_right()).then(|| self.last().1.clone())
    }

    fn domain_string(&self) -> String {
        let lo = self.domain_lo().map(|x| x.to_string()).unwrap_or_else(|| "-inf".into());
        let hi = self.domain_hi().map(|x| x.to_string()).unwrap_or_else(|| "inf".into());
        format!("[{}, {}]", lo, hi)
    }

    fn image_string(&self) -> String {
        let lo = self.image_lo().map(|x| x.to_string()).unwrap_or_else(|| "-inf".into());
        let hi = self.image_hi().map(|x| x.to_string()).unwrap_or_else(|| "inf".into());
        format!("[{}, {}]", lo, hi)
    }

    pub fn in_domain(&self, x: &S) -> bool {
        self.domain_lo().map_or(true, |lo| &lo <= x) && self.domain_hi().map_or(true, |hi| x <= &hi)
    }

    pub fn in_image(&self, y: &S) -> bool {
        self.image_lo().map_or(true, |lo| &lo <= y) && self.image_hi().map_or(true, |hi| y <= &hi)
    }

    /// Translation amount of the left tail (x ↦ x + t below the first node).
    pub fn left_shift(&self) -> S {
        self.first().1.clone() - self.first().0.clone()
    }

    pub fn right_shift(&self) -> S {
        self.last().1.clone() - self.last().0.clone()
    }

    fn interp(a: &(S, S), b: &(S, S), x: &S) -> S {
        a.1.clone() + (b.1.clone() - a.1.clone()) * (x.clone() - a.0.clone()) / (b.0.clone() - a.0.clone())
    }

    pub fn eval(&self, x: &S) -> Result<S> {
        if !self.in_domain(x) {
            return Err(Error::Domain { x: x.to_string(), domain: self.domain_string() });
        }
        let n = self.nodes.len();
        if x <= &self.first().0 {
            return Ok(x.clone() + self.left_shift());
        }
        if x >= &self.last().0 {
            return Ok(x.clone() + self.right_shift());
        }
        let i = self.nodes.partition_point(|(nx, _)| nx <= x);
        debug_assert!(i > 0 && i < n);
        if &self.nodes[i - 1].0 == x {
            return Ok(self.nodes[i - 1].1.clone());
        }
        Ok(Self::interp(&self.nodes[i - 1], &self.nodes[i], x))
    }

    /// Exact inverse value at y.
    pub fn eval_inv(&self, y: &S) -> Result<S> {
        if !self.in_image(y) {
            return Err(Error::Domain { x: y.to_string(), domain: self.image_string() });
        }
        if y <= &self.first().1 {
            return Ok(y.clone() - self.left_shift());
        }
        if y >= &self.last().1 {
            return Ok(y.clone() - self.right_shift());
        }
        let i = self.nodes.partition_point(|(_, ny)| ny <= y);
        if &self.nodes[i - 1].1 == y {
            return Ok(self.nodes[i - 1].0.clone());
        }
        let (a, b) = (&self.nodes[i - 1], &self.nodes[i]);
        Ok(a.0.clone() + (b.0.clone() - a.0.clone()) * (y.clone() - a.1.clone()) / (b.1.clone() - a.1.clone()))
    }

    /// Slopes of the finite segments, left to right.
    pub fn slopes(&self) -> Vec<S> {
        self.nodes
            .windows(2)
            .map(|w| (w[1].1.clone() - w[0].1.clone()) / (w[1].0.clone() - w[0].0.clone()))
            .collect()
    }

    /// max |slope − 1|; slope-1 tails contribute 0.
    pub fn mu(&self) -> S {
        self.slopes().into_iter().fold(S::zero(), |m, s| max_s(&m, &(s - S::one()).abs()))
    }

    /// Interior nodes where the slope actually changes (tails count as slope 1).
    pub fn breakpoints(&self) -> Vec<S> {
        let sl = self.slopes();
        let n = self.nodes.len();
        let mut out = Vec::new();
        for i in 0..n {
            let left = if i == 0 {
                if self.kind.unbounded_left() {
                    Some(S::one())
                } else {
                    None
                }
            } else {
                Some(sl[i - 1].clone())
            };
            let right = if i + 1 == n {
                if self.kind.unbounded_right() {
                    Some(S::one())
                } else {
                    None
                }
            } else {
                Some(sl[i].clone())
            };
            if let (Some(l), Some(r)) = (left, right) {
                if l != r {
                    out.push(self.nodes[i].0.clone());
                }
            }
        }
        out
    }

    /// Drop nodes that are not breakpoints (domain endpoints of bounded sides stay).
    pub fn simplified(&self) -> Self {
        let keep = self.breakpoints();
        let mut nodes = Vec::new();
        let n = self.nodes.len();
        for (i, nd) in self.nodes.iter().enumerate() {
            let endpoint = (i == 0 && !self.kind.unbounded_left()) || (i + 1 == n && !self.kind.unbounded_right());
            if endpoint || keep.binary_search(&nd.0).is_ok() {
                nodes.push(nd.clone());
            }
        }
        if nodes.is_empty() {
            nodes.push(self.nodes[0].clone());
        }
        PLMap { nodes, kind: self.kind }
    }

    /// f ∘ inner
    pub fn compose(&self, inner: &PLMap<S>) -> Result<Self> {
        // image of inner must sit inside domain of self
        let ilo = inner.image_lo();
        let ihi = inner.image_hi();
        if let Some(dlo) = self.domain_lo() {
            match &ilo {
                None => return Err(Error::Compose { gap: format!("(-inf, {})", dlo) }),
                Some(l) if l < &dlo => return Err(Error::Compose { gap: format!("[{}, {})", l, dlo) }),
                _ => {}
            }
        }
        if let Some(dhi) = self.domain_hi() {
            match &ihi {
                None => return Err(Error::Compose { gap: format!("({}, inf)", dhi) }),
                Some(h) if h > &dhi => return Err(Error::Compose { gap: format!("({}, {}]", dhi, h) }),
                _ => {}
            }
        }
        let mut xs: Vec<S> = inner.nodes.iter().map(|n| n.0.clone()).collect();
        for (fx, _) in &self.nodes {
            if inner.in_image(fx) {
                xs.push(inner.eval_inv(fx)?);
            }
        }
        xs.sort();
        xs.dedup();
        let nodes = xs
            .into_iter()
            .map(|x| {
                let y = self.eval(&inner.eval(&x)?)?;
                Ok((x, y))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PLMap { nodes, kind: inner.kind })
    }

    pub fn invert(&self) -> Self {
        PLMap { nodes: self.nodes.iter().map(|(x, y)| (y.clone(), x.clone())).collect(), kind: self.kind }
    }

    pub fn image_ivl(&self, c: &Ivl<S>) -> Result<Ivl<S>> {
        Ok(Ivl::of(self.eval(c.lo())?, self.eval(c.hi())?))
    }

    pub fn image_region(&self, r: &Region<S>) -> Result<Region<S>> {
        let comps = r.components().iter().map(|c| self.image_ivl(c)).collect::<Result<Vec<_>>>()?;
        Region::from_canonical(comps)
    }

    pub fn preimage_region(&self, r: &Region<S>) -> Result<Region<S>> {
        let mut comps = Vec::with_capacity(r.len());
        for c in r.components() {
            if !self.in_image(c.lo()) || !self.in_image(c.hi()) {
                return Err(Error::Preimage { component: c.to_string(), image: self.image_string() });
            }
            comps.push(Ivl::of(self.eval_inv(c.lo())?, self.eval_inv(c.hi())?));
        }
        Region::from_canonical(comps)
    }

    pub fn image_set(&self, s: &ClosedSet<S>) -> Result<ClosedSet<S>> {
        let parts = s
            .parts()
            .iter()
            .map(|(a, b)| Ok((self.eval(a)?, self.eval(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ClosedSet::from_parts(parts))
    }

    /// Preimage of the part of `s` lying in the image (clipped, never errors
    /// for parts outside).
    pub fn preimage_set_clipped(&self, s: &ClosedSet<S>) -> ClosedSet<S> {
        let mut parts = Vec::new();
        for (a, b) in s.parts() {
            let a2 = match self.image_lo() {
                Some(l) if &l > a => l,
                _ => a.clone(),
            };
            let b2 = match self.image_hi() {
                Some(h) if &h < b => h,
                _ => b.clone(),
            };
            if a2 <= b2 {
                parts.push((self.eval_inv(&a2).unwrap(), self.eval_inv(&b2).unwrap()));
            }
        }
        ClosedSet::from_parts(parts)
    }

    /// Restriction to [lo, hi] (must be inside the domain).
    pub fn restrict(&self, lo: &S, hi: &S) -> Result<Self> {
        let ylo = self.eval(lo)?;
        let yhi = self.eval(hi)?;
        let mut nodes = vec![(lo.clone(), ylo)];
        for n in &self.nodes {
            if &n.0 > lo && &n.0 < hi {
                nodes.push(n.clone());
            }
        }
        nodes.push((hi.clone(), yhi));
        PLMap::new(nodes, DomainKind::Compact)
    }

    /// Same map with its domain extended by slope-1 tails on the unbounded sides
    /// of `kind` (nodes unchanged).
    pub fn with_kind(&self, kind: DomainKind) -> Self {
        PLMap { nodes: self.nodes.clone(), kind }
    }

    /// Vertical and horizontal shift: x ↦ f(x − a) + b.
    pub fn shifted(&self, a: &S, b: &S) -> Self {
        PLMap {
            nodes: self.nodes.iter().map(|(x, y)| (x.clone() + a.clone(), y.clone() + b.clone())).collect(),
            kind: self.kind,
        }
    }

    /// Replace the map over J by the slope shape of `h` (see [`ModifyMode`]).
    pub fn modify_over(&self, j: &Ivl<S>, h: &PLMap<S>, mode: ModifyMode<S>) -> Result<Self> {
        if !self.in_domain(j.lo()) || !self.in_domain(j.hi()) {
            return Err(Error::Domain { x: j.to_string(), domain: self.domain_string() });
        }
        let (hx0, hy0) = h.first().clone();
        let (hxn, hyn) = h.last().clone();
        if h.kind != DomainKind::Compact || hxn.clone() - hx0.clone() != j.len() {
            return Err(Error::Precondition(format!(
                "shape domain length {} differs from interval length {}",
                hxn - hx0,
                j.len()
            )));
        }
        let base = match &mode {
            ModifyMode::Fill => {
                let glo = self.eval(j.lo())?;
                let ghi = self.eval(j.hi())?;
                if ghi.clone() - glo.clone() != hyn.clone() - hy0.clone() {
                    return Err(Error::FillLength {
                        target: (ghi - glo).to_string(),
                        shape: (hyn - hy0).to_string(),
                    });
                }
                glo
            }
            ModifyMode::Anchor(x0) => {
                if !j.contains(x0) {
                    return Err(Error::Domain { x: x0.to_string(), domain: j.to_string() });
                }
                let hv = h.eval(&(x0.clone() - j.lo().clone() + hx0.clone()))?;
                self.eval(x0)? - (hv - hy0.clone())
            }
        };
        let mut nodes: Vec<(S, S)> = self.nodes.iter().filter(|n| &n.0 < j.lo()).cloned().collect();
        let inner: Vec<(S, S)> = h
            .nodes
            .iter()
            .map(|(x, y)| (x.clone() - hx0.clone() + j.lo().clone(), y.clone() - hy0.clone() + base.clone()))
            .collect();
        if let ModifyMode::Anchor(_) = mode {
            let left_ok = !self.in_domain_strict_left(j.lo()) || self.eval(j.lo())? == inner[0].1;
            let right_ok = !self.in_domain_strict_right(j.hi()) || self.eval(j.hi())? == inner[inner.len() - 1].1;
            if !left_ok || !right_ok {
                return Err(Error::NotMonotone(format!("anchored modification over {} breaks continuity", j)));
            }
        }
        nodes.extend(inner);
        nodes.extend(self.nodes.iter().filter(|n| &n.0 > j.hi()).cloned());
        PLMap::new(nodes, self.kind)
    }

    /// Many `Fill` modifications at once. Each patch is an interval J with a
    /// homeomorphism of [0, 1] that is scaled onto J; the map must carry J
    /// onto an interval of the same length. Patches must be disjoint.
    pub fn fill_unit_shapes(&self, patches: &[(Ivl<S>, &PLMap<S>)]) -> Result<Self> {
        let mut order: Vec<usize> = (0..patches.len()).collect();
        order.sort_by(|&a, &b| patches[a].0.lo().cmp(patches[b].0.lo()));
        let mut nodes: Vec<(S, S)> = Vec::with_capacity(self.nodes.len() + patches.len() * 4);
        let mut base = self.nodes.iter().peekable();
        let mut prev_hi: Option<S> = None;
        let push = |nodes: &mut Vec<(S, S)>, n: (S, S)| {
            if nodes.last().map_or(true, |l| l.0 < n.0) {
                nodes.push(n);
            }
        };
        for &ix in &order {
            let (j, h) = &patches[ix];
            if let Some(p) = &prev_hi {
                if j.lo() < p {
                    return Err(Error::Precondition(format!("overlapping patches near {}", j)));
                }
            }
            let unit = h.kind == DomainKind::Compact
                && h.first() == &(S::zero(), S::zero())
                && h.last() == &(S::one(), S::one());
            if !unit {
                return Err(Error::Precondition("patch shape is not a homeomorphism of [0, 1]".into()));
            }
            let ylo = self.eval(j.lo())?;
            let yhi = self.eval(j.hi())?;
            let len = j.len();
            if yhi.clone() - ylo.clone() != len {
                return Err(Error::FillLength { target: (yhi - ylo).to_string(), shape: len.to_string() });
            }
            while let Some(n) = base.peek() {
                if &n.0 < j.lo() {
                    push(&mut nodes, (*n).clone());
                    base.next();
                } else {
                    break;
                }
            }
            while base.peek().map_or(false, |n| &n.0 <= j.hi()) {
                base.next();
            }
            for (x, y) in &h.nodes {
                push(&mut nodes, (j.lo().clone() + len.clone() * x.clone(), ylo.clone() + len.clone() * y.clone()));
            }
            prev_hi = Some(j.hi().clone());
        }
        for n in base {
            push(&mut nodes, n.clone());
        }
        PLMap::new(nodes, self.kind)
    }

    fn in_domain_strict_left(&self, x: &S) -> bool {
        self.domain_lo().map_or(true, |lo| &lo < x)
    }

    fn in_domain_strict_right(&self, x: &S) -> bool {
        self.domain_hi().map_or(true, |hi| x < &hi)
    }

    pub fn fixed_points_in(&self, lo: &S, hi: &S) -> Vec<S> {
        // zeros of f(x) − x on [lo, hi] at nodes or inside segments; slope-1
        // stretches of zero are reported by their endpoints
        let mut xs: Vec<S> = vec![lo.clone(), hi.clone()];
        xs.extend(self.nodes.iter().map(|n| n.0.clone()).filter(|x| x > lo && x < hi));
        xs.sort();
        xs.dedup();
        let mut out = Vec::new();
        for w in xs.windows(2) {
            let da = self.eval(&w[0]).unwrap() - w[0].clone();
            let db = self.eval(&w[1]).unwrap() - w[1].clone();
            if da.is_zero() {
                out.push(w[0].clone());
            }
            if (da.is_positive() && db.is_negative()) || (da.is_negative() && db.is_positive()) {
                out.push(w[0].clone() + (w[1].clone() - w[0].clone()) * da.clone() / (da - db));
            }
        }
        if let Some(w) = xs.last() {
            if (self.eval(w).unwrap() - w.clone()).is_zero() {
                out.push(w.clone());
            }
        }
        out.dedup();
        out
    }

    pub fn node_span(&self) -> Ivl<S> {
        if self.nodes.len() == 1 {
            let x = self.first().0.clone();
            Ivl::of(x.clone(), x + S::one())
        } else {
            Ivl::of(self.first().0.clone(), self.last().0.clone())
        }
    }
}

impl<S: Scalar> fmt::Display for PLMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PL[{}](", self.kind.name())?;
        for (k, (x, y)) in self.nodes.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", x, y)?;
        }
        write!(f, ")")
    }
}
