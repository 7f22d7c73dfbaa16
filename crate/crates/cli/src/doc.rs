//! The "ifs-hide/1" document format: JSON with sorted keys and rationals as
//! reduced "p/q" strings.

use std::collections::BTreeSet;

use ifs_hide::deform::GeometryEater;
use ifs_hide::periodic::{PeriodicRegion, Tail};
use ifs_hide::plmap::{DomainKind, PLMap};
use ifs_hide::region::{Ivl, Region};
use ifs_hide::scalar::{fmt_rat, parse_rat};
use ifs_hide::smoothing::{PwPolyMap, Quad};
use ifs_hide::template::Template;
use ifs_hide::verifier::{ClassTag, HidingReport, IFSPiece, PieceDomain};
use ifs_hide::{Interval, Rat, RatMap, RatPeriodic, RatRegion};
use serde_json::{json, Map, Value};

pub const FORMAT: &str = "ifs-hide/1";

#[derive(Debug)]
pub struct ParseError {
    pub at: String,
    pub msg: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.at, self.msg)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = std::result::Result<T, ParseError>;

fn err<T>(at: &str, msg: impl Into<String>) -> PResult<T> {
    Err(ParseError { at: at.to_string(), msg: msg.into() })
}

fn core<T>(at: &str, r: ifs_hide::Result<T>) -> PResult<T> {
    r.map_err(|e| ParseError { at: at.to_string(), msg: e.to_string() })
}

/// A loaded document.
#[derive(Clone, Debug)]
pub enum Doc {
    PlMap(RatMap),
    PwPoly(PwPolyMap),
    Region(RatRegion),
    Periodic(RatPeriodic),
    Piece(IFSPiece),
    /// C¹ pair with a compact hiding region
    PolyPiece { f: PwPolyMap, g: PwPolyMap, k: RatRegion },
    Template(Template),
    Eater(GeometryEater),
    Report(Value),
}

impl Doc {
    pub fn kind(&self) -> &'static str {
        match self {
            Doc::PlMap(_) => "plmap",
            Doc::PwPoly(_) => "pwpoly",
            Doc::Region(_) => "region",
            Doc::Periodic(_) => "periodic_region",
            Doc::Piece(_) | Doc::PolyPiece { .. } => "piece",
            Doc::Template(_) => "template",
            Doc::Eater(_) => "eater",
            Doc::Report(_) => "report",
        }
    }
}

// ---------------------------------------------------------------------------
// emit

pub fn r(x: &Rat) -> Value {
    Value::String(fmt_rat(x))
}

fn ivl(i: &Interval) -> Value {
    json!([r(i.lo()), r(i.hi())])
}

pub fn region_v(k: &RatRegion) -> Value {
    Value::Array(k.components().iter().map(ivl).collect())
}

pub fn plmap_v(f: &RatMap) -> Value {
    json!({
        "domain": f.kind().name(),
        "nodes": f.nodes().iter().map(|(x, y)| json!([r(x), r(y)])).collect::<Vec<_>>(),
    })
}

pub fn pwpoly_v(f: &PwPolyMap) -> Value {
    json!({
        "pieces": f.pieces().iter().map(|q| json!({
            "span": ivl(&q.span),
            "coeffs": q.coeffs.iter().map(r).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn tail_v(t: Option<&Tail<Rat>>) -> Value {
    match t {
        None => Value::Null,
        Some(t) => json!({"shape": region_v(&t.shape), "period": r(&t.period)}),
    }
}

pub fn periodic_v(k: &RatPeriodic) -> Value {
    let (a, b) = k.window();
    json!({
        "core": k.core().map(region_v).unwrap_or(Value::Null),
        "window": [r(a), r(b)],
        "left": tail_v(k.left()),
        "right": tail_v(k.right()),
    })
}

fn domain_v(d: &PieceDomain) -> Value {
    match d {
        PieceDomain::Compact(i) => json!({"kind": "compact", "lo": r(i.lo()), "hi": r(i.hi())}),
        PieceDomain::HalfLine(lo) => json!({"kind": "half_line", "lo": r(lo)}),
        PieceDomain::FullLine => json!({"kind": "full_line"}),
    }
}

pub fn piece_v(p: &IFSPiece) -> Value {
    json!({
        "domain": domain_v(&p.domain),
        "f": plmap_v(&p.f),
        "g": plmap_v(&p.g),
        "k": p.k.as_ref().map(periodic_v).unwrap_or(Value::Null),
        "tags": p.tags.iter().map(|t| t.name()).collect::<Vec<_>>(),
    })
}

pub fn poly_piece_v(f: &PwPolyMap, g: &PwPolyMap, k: &RatRegion) -> Value {
    let d = f.domain();
    json!({
        "domain": {"kind": "compact", "lo": r(d.lo()), "hi": r(d.hi())},
        "f": pwpoly_v(f),
        "g": pwpoly_v(g),
        "k": {"core": region_v(k), "window": [r(d.lo()), r(d.hi())], "left": null, "right": null},
        "tags": ["P-class"],
    })
}

pub fn template_v(t: &Template) -> Value {
    json!({
        "n": t.n,
        "points": t.points.iter().map(r).collect::<Vec<_>>(),
        "open_intervals": t.open_intervals.iter().map(|(a, b)| json!([r(a), r(b)])).collect::<Vec<_>>(),
        "closed_intervals": t.closed_intervals.iter().map(ivl).collect::<Vec<_>>(),
    })
}

pub fn eater_v(e: &GeometryEater) -> Value {
    json!({
        "omega": e.omega,
        "xi": e.xi,
        "h": plmap_v(&e.h),
        "alphas": e.alphas.iter().map(plmap_v).collect::<Vec<_>>(),
        "betas": e.betas.iter().map(plmap_v).collect::<Vec<_>>(),
        "omega_budget": r(&e.omega_budget),
        "repeller": r(&e.repeller),
        "attractors": [r(&e.attractors.0), r(&e.attractors.1)],
    })
}

pub fn hiding_v(h: &HidingReport) -> Value {
    json!({
        "passed": h.passed,
        "strong": h.strong,
        "window": ivl(&h.window_used),
        "violations": h.violations.iter().map(|v| json!({
            "map": v.map_tag,
            "component": ivl(&v.component),
            "uncovered": [r(&v.uncovered.0), r(&v.uncovered.1)],
        })).collect::<Vec<_>>(),
        "notes": h.notes,
    })
}

pub fn payload_of(d: &Doc) -> Value {
    match d {
        Doc::PlMap(f) => plmap_v(f),
        Doc::PwPoly(f) => pwpoly_v(f),
        Doc::Region(k) => json!({"components": region_v(k)}),
        Doc::Periodic(k) => periodic_v(k),
        Doc::Piece(p) => piece_v(p),
        Doc::PolyPiece { f, g, k } => poly_piece_v(f, g, k),
        Doc::Template(t) => template_v(t),
        Doc::Eater(e) => eater_v(e),
        Doc::Report(v) => v.clone(),
    }
}

/// Tool identity and parameters, embedded in every written document.
pub fn meta(command: &str, params: &[(&str, String)]) -> Value {
    let mut p = Map::new();
    for (k, v) in params {
        p.insert(k.to_string(), Value::String(v.clone()));
    }
    json!({"tool": format!("ifs-hide {}", env!("CARGO_PKG_VERSION")), "command": command, "params": p})
}

pub fn emit(d: &Doc, meta: &Value) -> String {
    let v = json!({"format": FORMAT, "kind": d.kind(), "meta": meta, "payload": payload_of(d)});
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// parse

fn field<'a>(v: &'a Value, key: &str, at: &str) -> PResult<&'a Value> {
    v.get(key).ok_or(ParseError { at: at.to_string(), msg: format!("missing field '{}'", key) })
}

fn rat_v(v: &Value, at: &str) -> PResult<Rat> {
    let s = match v {
        Value::String(s) => s,
        _ => return err(at, "rational must be a \"p/q\" string"),
    };
    let x = parse_rat(s).ok_or(ParseError { at: at.to_string(), msg: format!("bad rational '{}'", s) })?;
    if &fmt_rat(&x) != s {
        return err(at, format!("'{}' is not in reduced form (expected '{}')", s, fmt_rat(&x)));
    }
    Ok(x)
}

fn arr<'a>(v: &'a Value, at: &str) -> PResult<&'a Vec<Value>> {
    v.as_array().ok_or(ParseError { at: at.to_string(), msg: "expected an array".into() })
}

fn pair(v: &Value, at: &str) -> PResult<(Rat, Rat)> {
    let a = arr(v, at)?;
    if a.len() != 2 {
        return err(at, "expected a pair");
    }
    Ok((rat_v(&a[0], at)?, rat_v(&a[1], at)?))
}

fn ivl_p(v: &Value, at: &str) -> PResult<Interval> {
    let (a, b) = pair(v, at)?;
    core(at, Ivl::new(a, b))
}

fn region_p(v: &Value, at: &str) -> PResult<RatRegion> {
    let comps = arr(v, at)?
        .iter()
        .enumerate()
        .map(|(i, c)| ivl_p(c, &format!("{}[{}]", at, i)))
        .collect::<PResult<Vec<_>>>()?;
    core(at, Region::from_canonical(comps))
}

fn plmap_p(v: &Value, at: &str) -> PResult<RatMap> {
    let kind = field(v, "domain", at)?
        .as_str()
        .and_then(DomainKind::from_name)
        .ok_or(ParseError { at: format!("{}.domain", at), msg: "unknown domain kind".into() })?;
    let nodes = arr(field(v, "nodes", at)?, at)?
        .iter()
        .enumerate()
        .map(|(i, n)| pair(n, &format!("{}.nodes[{}]", at, i)))
        .collect::<PResult<Vec<_>>>()?;
    core(at, PLMap::new(nodes, kind))
}

fn pwpoly_p(v: &Value, at: &str) -> PResult<PwPolyMap> {
    let mut pieces = Vec::new();
    for (i, q) in arr(field(v, "pieces", at)?, at)?.iter().enumerate() {
        let here = format!("{}.pieces[{}]", at, i);
        let span = ivl_p(field(q, "span", &here)?, &here)?;
        let c = arr(field(q, "coeffs", &here)?, &here)?;
        if c.len() != 3 {
            return err(&here, "need three coefficients");
        }
        let coeffs = [rat_v(&c[0], &here)?, rat_v(&c[1], &here)?, rat_v(&c[2], &here)?];
        pieces.push(Quad { span, coeffs });
    }
    core(at, PwPolyMap::new(pieces))
}

fn tail_p(v: &Value, at: &str) -> PResult<Option<Tail<Rat>>> {
    if v.is_null() {
        return Ok(None);
    }
    let shape = region_p(field(v, "shape", at)?, &format!("{}.shape", at))?;
    let period = rat_v(field(v, "period", at)?, &format!("{}.period", at))?;
    Ok(Some(core(at, Tail::new(shape, period))?))
}

fn periodic_p(v: &Value, at: &str) -> PResult<RatPeriodic> {
    let c = field(v, "core", at)?;
    let core_r = if c.is_null() { None } else { Some(region_p(c, &format!("{}.core", at))?) };
    let window = pair(field(v, "window", at)?, &format!("{}.window", at))?;
    let left = tail_p(field(v, "left", at)?, &format!("{}.left", at))?;
    let right = tail_p(field(v, "right", at)?, &format!("{}.right", at))?;
    core(at, PeriodicRegion::new(core_r, window, left, right))
}

fn domain_p(v: &Value, at: &str) -> PResult<PieceDomain> {
    match field(v, "kind", at)?.as_str() {
        Some("compact") => {
            let lo = rat_v(field(v, "lo", at)?, at)?;
            let hi = rat_v(field(v, "hi", at)?, at)?;
            Ok(PieceDomain::Compact(core(at, Ivl::new(lo, hi))?))
        }
        Some("half_line") => Ok(PieceDomain::HalfLine(rat_v(field(v, "lo", at)?, at)?)),
        Some("full_line") => Ok(PieceDomain::FullLine),
        _ => err(at, "unknown piece domain"),
    }
}

fn piece_p(v: &Value, at: &str) -> PResult<Doc> {
    let domain = domain_p(field(v, "domain", at)?, &format!("{}.domain", at))?;
    let fv = field(v, "f", at)?;
    let gv = field(v, "g", at)?;
    let kv = field(v, "k", at)?;
    let mut tags = BTreeSet::new();
    for t in arr(field(v, "tags", at)?, at)? {
        let tag = t.as_str().and_then(ClassTag::from_name).ok_or(ParseError { at: format!("{}.tags", at), msg: "unknown tag".into() })?;
        tags.insert(tag);
    }
    if fv.get("pieces").is_some() {
        let f = pwpoly_p(fv, &format!("{}.f", at))?;
        let g = pwpoly_p(gv, &format!("{}.g", at))?;
        let k = periodic_p(kv, &format!("{}.k", at))?;
        let k = k.core().cloned().ok_or(ParseError { at: format!("{}.k", at), msg: "C1 piece needs a compact region".into() })?;
        if !matches!(domain, PieceDomain::Compact(_)) {
            return err(at, "C1 pieces live on a compact interval");
        }
        return Ok(Doc::PolyPiece { f, g, k });
    }
    let f = plmap_p(fv, &format!("{}.f", at))?;
    let g = plmap_p(gv, &format!("{}.g", at))?;
    let k = if kv.is_null() { None } else { Some(periodic_p(kv, &format!("{}.k", at))?) };
    let mut p = IFSPiece::new(f, g, k, domain);
    p.tags = tags;
    Ok(Doc::Piece(p))
}

fn template_p(v: &Value, at: &str) -> PResult<Template> {
    let n = field(v, "n", at)?.as_u64().ok_or(ParseError { at: format!("{}.n", at), msg: "expected an integer".into() })?;
    let points = arr(field(v, "points", at)?, at)?.iter().map(|x| rat_v(x, at)).collect::<PResult<Vec<_>>>()?;
    let open_intervals = arr(field(v, "open_intervals", at)?, at)?.iter().map(|x| pair(x, at)).collect::<PResult<Vec<_>>>()?;
    let closed_intervals = arr(field(v, "closed_intervals", at)?, at)?.iter().map(|x| ivl_p(x, at)).collect::<PResult<Vec<_>>>()?;
    Ok(Template { n, points, open_intervals, closed_intervals })
}

fn eater_p(v: &Value, at: &str) -> PResult<GeometryEater> {
    let int_of = |k: &str| -> PResult<u64> {
        field(v, k, at)?.as_u64().ok_or(ParseError { at: format!("{}.{}", at, k), msg: "expected an integer".into() })
    };
    let maps = |k: &str| -> PResult<Vec<RatMap>> {
        arr(field(v, k, at)?, at)?.iter().enumerate().map(|(i, m)| plmap_p(m, &format!("{}.{}[{}]", at, k, i))).collect()
    };
    Ok(GeometryEater {
        omega: int_of("omega")?,
        xi: int_of("xi")? as usize,
        h: plmap_p(field(v, "h", at)?, &format!("{}.h", at))?,
        alphas: maps("alphas")?,
        betas: maps("betas")?,
        omega_budget: rat_v(field(v, "omega_budget", at)?, at)?,
        repeller: rat_v(field(v, "repeller", at)?, at)?,
        attractors: pair(field(v, "attractors", at)?, at)?,
    })
}

/// Parse and re-validate a document. Returns the value and its metadata.
pub fn parse(text: &str) -> PResult<(Doc, Value)> {
    let v: Value = serde_json::from_str(text).map_err(|e| ParseError { at: format!("line {}", e.line()), msg: e.to_string() })?;
    match field(&v, "format", "document")?.as_str() {
        Some(FORMAT) => {}
        other => return err("format", format!("unsupported format {:?}", other)),
    }
    let kind = field(&v, "kind", "document")?.as_str().unwrap_or_default().to_string();
    let p = field(&v, "payload", "document")?;
    let meta = v.get("meta").cloned().unwrap_or(Value::Null);
    let doc = match kind.as_str() {
        "plmap" => Doc::PlMap(plmap_p(p, "payload")?),
        "pwpoly" => Doc::PwPoly(pwpoly_p(p, "payload")?),
        "region" => Doc::Region(region_p(field(p, "components", "payload")?, "payload.components")?),
        "periodic_region" => Doc::Periodic(periodic_p(p, "payload")?),
        "piece" => piece_p(p, "payload")?,
        "template" => Doc::Template(template_p(p, "payload")?),
        "eater" => Doc::Eater(eater_p(p, "payload")?),
        "report" => Doc::Report(p.clone()),
        other => return err("kind", format!("unknown kind '{}'", other)),
    };
    Ok((doc, meta))
}
