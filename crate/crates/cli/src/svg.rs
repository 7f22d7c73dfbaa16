//! Static SVG plots. Coordinates are rounded to 6 significant digits for
//! display only; identical input gives identical bytes.

use std::fmt::Write;

use ifs_hide::smoothing::PwPolyMap;
use ifs_hide::template::Template;
use ifs_hide::verifier::IFSPiece;
use ifs_hide::{int, rat, Rat, RatMap, RatSet, Scalar};

use crate::doc::Doc;

const SIZE: i64 = 640;
const PAD: i64 = 40;

/// Round to 6 significant digits and print the shortest form.
pub fn num(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let rounded: f64 = format!("{:.5e}", v).parse().unwrap_or(v);
    let s = format!("{}", rounded);
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Square data window mapped onto the drawing area, y pointing up.
struct Frame {
    lo: Rat,
    hi: Rat,
}

impl Frame {
    fn new(lo: Rat, hi: Rat) -> Self {
        let (lo, hi) = if lo < hi { (lo, hi) } else { (lo.clone(), lo + int(1)) };
        Frame { lo, hi }
    }

    fn scale(&self, v: &Rat) -> Rat {
        (v - &self.lo) / (&self.hi - &self.lo) * int(SIZE - 2 * PAD)
    }

    fn px(&self, x: &Rat) -> String {
        num((self.scale(x) + int(PAD)).to_f64_lossy())
    }

    fn py(&self, y: &Rat) -> String {
        num((int(SIZE - PAD) - self.scale(y)).to_f64_lossy())
    }

    fn widen(&self) -> Frame {
        let m = (&self.hi - &self.lo) / int(20);
        Frame { lo: &self.lo - &m, hi: &self.hi + &m }
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">",
        s = SIZE
    );
    let _ = writeln!(out, "<title>{}</title>", title);
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{s}\" height=\"{s}\" fill=\"white\"/>", s = SIZE);
}

fn frame_box(out: &mut String, fr: &Frame) {
    let (a, b) = (fr.px(&fr.lo), fr.px(&fr.hi));
    let (c, d) = (fr.py(&fr.hi), fr.py(&fr.lo));
    let _ = writeln!(
        out,
        "<rect x=\"{a}\" y=\"{c}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"#999\"/>",
        w = num(b.parse::<f64>().unwrap() - a.parse::<f64>().unwrap()),
        h = num(d.parse::<f64>().unwrap() - c.parse::<f64>().unwrap()),
    );
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>", PAD, SIZE - PAD / 3, num(fr.lo.to_f64_lossy()));
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>",
        SIZE - PAD,
        SIZE - PAD / 3,
        num(fr.hi.to_f64_lossy())
    );
}

fn diagonal(out: &mut String, fr: &Frame) {
    let _ = writeln!(
        out,
        "<line class=\"diagonal\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>",
        fr.px(&fr.lo),
        fr.py(&fr.lo),
        fr.px(&fr.hi),
        fr.py(&fr.hi)
    );
}

fn polyline(out: &mut String, fr: &Frame, pts: &[(Rat, Rat)], class: &str, color: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", fr.px(x), fr.py(y))).collect();
    let _ = writeln!(
        out,
        "<polyline class=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
        class,
        coords.join(" "),
        color
    );
}

fn band(out: &mut String, fr: &Frame, a: &Rat, b: &Rat, class: &str) {
    let (x0, x1) = (fr.px(a), fr.px(b));
    let w = num(x1.parse::<f64>().unwrap() - x0.parse::<f64>().unwrap());
    let _ = writeln!(
        out,
        "<rect class=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#4a90d9\" fill-opacity=\"0.2\"/>",
        class,
        x0,
        PAD,
        w,
        SIZE - 2 * PAD
    );
}

fn mark(out: &mut String, fr: &Frame, x: &Rat) {
    let _ = writeln!(
        out,
        "<line class=\"mark\" x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"black\"/>",
        SIZE - PAD,
        SIZE - PAD + 8,
        x = fr.px(x)
    );
}

/// Graph of a PL map clipped to the frame.
fn pl_points(f: &RatMap, fr: &Frame) -> Vec<(Rat, Rat)> {
    let mut xs: Vec<Rat> = vec![fr.lo.clone(), fr.hi.clone()];
    xs.extend(f.nodes().iter().map(|(x, _)| x.clone()));
    xs.retain(|x| x >= &fr.lo && x <= &fr.hi && f.in_domain(x));
    xs.sort();
    xs.dedup();
    xs.into_iter().filter_map(|x| f.eval(&x).ok().map(|y| (x, y))).collect()
}

fn poly_points(f: &PwPolyMap) -> Vec<(Rat, Rat)> {
    let mut pts = Vec::new();
    for q in f.pieces() {
        for i in 0..16 {
            let x = q.span.lo() + q.span.len() * rat(i, 16);
            pts.push((x.clone(), q.eval(&x)));
        }
    }
    let d = f.domain();
    let hi = d.hi().clone();
    if let Ok(y) = f.eval(&hi) {
        pts.push((hi, y));
    }
    pts
}

fn set_bands(out: &mut String, fr: &Frame, s: &RatSet) {
    for (a, b) in s.parts() {
        band(out, fr, a, b, "region");
    }
}

fn piece_frame(p: &IFSPiece) -> Frame {
    let span = p.f.node_span();
    let gspan = p.g.node_span();
    let lo = span.lo().clone().min(gspan.lo().clone());
    let hi = span.hi().clone().max(gspan.hi().clone());
    match (p.domain.lo(), p.domain.hi()) {
        (Some(a), Some(b)) => Frame::new(a.clone(), b.clone()),
        (Some(a), None) => Frame::new(a.clone(), hi),
        _ => Frame::new(lo, hi),
    }
}

fn plot_template(out: &mut String, t: &Template) {
    let lo = t.points.first().cloned().unwrap_or_else(|| int(0));
    let hi = t.points.last().cloned().unwrap_or_else(|| int(1));
    let fr = Frame::new(lo, hi).widen();
    frame_box(out, &fr);
    for c in &t.closed_intervals {
        band(out, &fr, c.lo(), c.hi(), "band");
    }
    for p in &t.points {
        mark(out, &fr, p);
    }
}

/// Render a document. Only maps, pieces and templates can be drawn.
pub fn plot(doc: &Doc) -> Result<String, String> {
    let mut out = String::new();
    header(&mut out, doc.kind());
    match doc {
        Doc::PlMap(f) => {
            let s = f.node_span();
            let fr = Frame::new(s.lo().clone(), s.hi().clone());
            frame_box(&mut out, &fr);
            diagonal(&mut out, &fr);
            polyline(&mut out, &fr, &pl_points(f, &fr), "graph-f", "#c0392b");
        }
        Doc::PwPoly(f) => {
            let d = f.domain();
            let fr = Frame::new(d.lo().clone(), d.hi().clone());
            frame_box(&mut out, &fr);
            diagonal(&mut out, &fr);
            polyline(&mut out, &fr, &poly_points(f), "graph-f", "#c0392b");
        }
        Doc::Piece(p) => {
            let fr = piece_frame(p);
            frame_box(&mut out, &fr);
            if let Some(k) = &p.k {
                set_bands(&mut out, &fr, &k.materialize(&fr.lo, &fr.hi));
            }
            diagonal(&mut out, &fr);
            polyline(&mut out, &fr, &pl_points(&p.f, &fr), "graph-f", "#c0392b");
            polyline(&mut out, &fr, &pl_points(&p.g, &fr), "graph-g", "#27ae60");
        }
        Doc::PolyPiece { f, g, k } => {
            let d = f.domain();
            let fr = Frame::new(d.lo().clone(), d.hi().clone());
            frame_box(&mut out, &fr);
            set_bands(&mut out, &fr, &k.to_set());
            diagonal(&mut out, &fr);
            polyline(&mut out, &fr, &poly_points(f), "graph-f", "#c0392b");
            polyline(&mut out, &fr, &poly_points(g), "graph-g", "#27ae60");
        }
        Doc::Template(t) => plot_template(&mut out, t),
        other => return Err(format!("cannot plot a document of kind '{}'", other.kind())),
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ifs_hide::plmap::PLMap;
    use ifs_hide::template::build_template;

    #[test]
    fn rounding() {
        assert_eq!(num(1.0 / 3.0), "0.333333");
        assert_eq!(num(640.0), "640");
        assert_eq!(num(123456789.0), "123457000");
        assert_eq!(num(-0.0), "0");
    }

    #[test]
    fn template_bands() {
        let t = build_template(3);
        let svg = plot(&Doc::Template(t)).unwrap();
        assert_eq!(svg.matches("class=\"band\"").count(), 4);
        assert_eq!(svg.matches("class=\"mark\"").count(), 5);
        assert_eq!(svg, plot(&Doc::Template(build_template(3))).unwrap());
    }

    #[test]
    fn identity_is_diagonal() {
        let f = PLMap::identity(int(0), int(1));
        let svg = plot(&Doc::PlMap(f)).unwrap();
        let line = svg.lines().find(|l| l.contains("diagonal")).unwrap();
        let graph = svg.lines().find(|l| l.contains("graph-f")).unwrap();
        // diagonal runs (40,600) -> (600,40); the graph has the same endpoints
        assert!(line.contains("x1=\"40\" y1=\"600\" x2=\"600\" y2=\"40\""), "{}", line);
        assert!(graph.contains("points=\"40,600 600,40\""), "{}", graph);
    }

    #[test]
    fn unsupported_kind() {
        let r = ifs_hide::region::Region::single(int(0), int(1)).unwrap();
        assert!(plot(&Doc::Region(r)).is_err());
    }
}
