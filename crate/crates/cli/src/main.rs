mod doc;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ifs_hide::assembly::{
    build_counterexample_with, gallery_examples, symmetric_shape, GalleryExample, Limits, N0,
};
use ifs_hide::deform::{build_geometry_eater, omega_budget, verify_geometry_eater};
use ifs_hide::farey::adjacency_invariants;
use ifs_hide::leap::{realize_any_leap, LeapKit};
use ifs_hide::local_models::{build_connector, build_runway};
use ifs_hide::region::Region;
use ifs_hide::scalar::{fmt_rat, parse_rat};
use ifs_hide::smoothing::{check_hiding_poly, reduce_to_c1};
use ifs_hide::template::{build_template, verify_template};
use ifs_hide::verifier::{boundary_exclusions, check_hiding_piece, is_p_class, orbit_audit, PieceDomain};
use ifs_hide::{Error, Rat, RatRegion};
use serde_json::{json, Value};

use doc::{Doc, ParseError};

#[derive(Parser, Debug)]
#[command(name = "ifs-hide", version, about = "Build and exactly verify hiding regions for interval IFS pairs")]
struct Cli {
    /// Print errors as one JSON object on stderr
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Write the result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Input {
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Interval template for the contraction 1 - 1/n
    Template {
        #[arg(long, default_value_t = 3)]
        n: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Geometry eater over the template for omega
    Eater {
        #[arg(long, default_value_t = 3)]
        omega: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Half-line runway piece
    Runway {
        #[arg(long, default_value_t = 3)]
        omega: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Connector with rotation number r between two unit shapes
    Connector {
        #[arg(long, default_value_t = 3)]
        omega: u64,
        #[arg(long, value_parser = rat_arg)]
        r: Rat,
        /// left unit shape, e.g. "1/4:1/2" or "0:1/8,1/2:5/8"
        #[arg(long, value_parser = region_arg)]
        from: Option<RatRegion>,
        /// right unit shape (defaults to the symmetric closing shape)
        #[arg(long, value_parser = region_arg)]
        to: Option<RatRegion>,
        #[command(flatten)]
        out: Output,
    },
    /// Quantum leap between Farey neighbours r > r2
    Leap {
        #[arg(long, default_value_t = 3)]
        omega: u64,
        #[arg(long, value_parser = rat_arg)]
        r: Rat,
        #[arg(long, value_parser = rat_arg)]
        r2: Rat,
        #[command(flatten)]
        out: Output,
    },
    /// Full counterexample on [0, 1]
    Assemble {
        #[arg(long, default_value_t = 3)]
        omega: u64,
        /// "auto" or a Farey order
        #[arg(long, default_value = "auto", value_parser = n0_arg)]
        n0: N0,
        /// Use the smallest Farey order whose neighbours all admit leaps
        #[arg(long)]
        demo: bool,
        /// Refuse chains whose leaps lay out more slots than this
        #[arg(long, default_value_t = Limits::default().slot_budget)]
        budget: u128,
        #[command(flatten)]
        out: Output,
    },
    /// C1 reduction of a piecewise-linear piece on [0, 1]
    Smooth {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Re-verify a document from file
    Verify {
        #[command(flatten)]
        input: Input,
        /// Require strict interior covers
        #[arg(long)]
        strong: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Exhaustive orbit of a seed under all words up to a depth
    Orbit {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = rat_arg, default_value = "0")]
        seed: Rat,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Small worked examples
    Gallery {
        which: Which,
        /// contraction for example1
        #[arg(long, value_parser = rat_arg, default_value = "1/2")]
        c: Rat,
        /// perturbation for example2
        #[arg(long, value_parser = rat_arg, default_value = "0")]
        eps: Rat,
        #[command(flatten)]
        out: Output,
    },
    /// SVG plot of a map, piece or template
    Plot {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Which {
    Example1,
    Example2,
}

fn rat_arg(s: &str) -> Result<Rat, String> {
    parse_rat(s).ok_or_else(|| format!("'{}' is not a rational", s))
}

fn region_arg(s: &str) -> Result<RatRegion, String> {
    let mut pairs = Vec::new();
    for part in s.split(',') {
        let (a, b) = part.split_once(':').ok_or_else(|| format!("'{}' should look like a:b", part))?;
        pairs.push((rat_arg(a.trim())?, rat_arg(b.trim())?));
    }
    Region::from_pairs(&pairs).map_err(|e| e.to_string())
}

fn n0_arg(s: &str) -> Result<N0, String> {
    if s == "auto" {
        return Ok(N0::Auto);
    }
    s.parse::<u64>().map(N0::Fixed).map_err(|_| format!("--n0 takes 'auto' or an integer, got '{}'", s))
}

/// Everything that ends a command early.
#[derive(Debug)]
enum Fail {
    Core(Error, Value),
    Parse(ParseError),
    Io(String),
    Args(String),
    /// A check ran and did not pass; the report has been written.
    Unverified(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Core(Error::Verification { .. } | Error::Budget(_), _) | Fail::Unverified(_) => 1,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Fail::Core(e, _) => match e {
                Error::Inadmissible(_) => "inadmissible",
                Error::Precondition(_) => "precondition",
                Error::Verification { .. } => "verification",
                Error::Budget(_) => "budget",
                _ => "invariant",
            },
            Fail::Parse(_) => "parse",
            Fail::Io(_) => "io",
            Fail::Args(_) => "arguments",
            Fail::Unverified(_) => "verification",
        }
    }

    fn message(&self) -> String {
        match self {
            Fail::Core(e, _) => e.to_string(),
            Fail::Parse(e) => e.to_string(),
            Fail::Io(s) | Fail::Args(s) | Fail::Unverified(s) => s.clone(),
        }
    }

    fn details(&self) -> Value {
        match self {
            Fail::Core(_, v) => v.clone(),
            Fail::Parse(e) => json!({"location": e.at}),
            _ => Value::Null,
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e, Value::Null)
    }
}

impl From<ParseError> for Fail {
    fn from(e: ParseError) -> Self {
        Fail::Parse(e)
    }
}

type Outcome = Result<(), Fail>;

fn write_out(out: &Output, text: &str) -> Outcome {
    match &out.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Fail::Io(format!("{}: {}", p.display(), e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn load(input: &Input) -> Result<Doc, Fail> {
    let text = std::fs::read_to_string(&input.input).map_err(|e| Fail::Io(format!("{}: {}", input.input.display(), e)))?;
    Ok(doc::parse(&text)?.0)
}

fn emit(out: &Output, d: &Doc, command: &str, params: &[(&str, String)]) -> Outcome {
    write_out(out, &doc::emit(d, &doc::meta(command, params)))
}

fn check_omega(omega: u64) -> Outcome {
    if omega < 3 {
        return Err(Fail::Args(format!("--omega must be at least 3, got {}", omega)));
    }
    Ok(())
}

/// Write a report document and turn `passed = false` into exit code 1.
fn report(out: &Output, command: &str, params: &[(&str, String)], body: Value) -> Outcome {
    let passed = body.get("passed").and_then(Value::as_bool).unwrap_or(false);
    emit(out, &Doc::Report(body), command, params)?;
    if passed {
        Ok(())
    } else {
        Err(Fail::Unverified(format!("{} did not pass", command)))
    }
}

fn leap_diagnostics(r1: &Rat, r2: &Rat, omega: u64, xi: usize) -> Value {
    match adjacency_invariants(r1, r2) {
        Ok((step, tau)) => json!({
            "r1": fmt_rat(r1), "r2": fmt_rat(r2), "step": fmt_rat(&step), "tau": tau,
            "needed": omega as usize + xi + 2,
        }),
        Err(e) => json!({"r1": fmt_rat(r1), "r2": fmt_rat(r2), "adjacency": e.to_string()}),
    }
}

fn verify_doc(d: &Doc, strong: bool) -> Result<Value, Fail> {
    Ok(match d {
        Doc::Template(t) => {
            let c = verify_template(t);
            json!({"passed": c.ok, "n": t.n, "witnesses": c.witnesses, "failures": c.failures})
        }
        Doc::Eater(e) => {
            if e.omega < 3 {
                return Err(Fail::Args("eater omega below 3".into()));
            }
            let ok = verify_geometry_eater(e, &build_template(e.omega));
            json!({"passed": ok, "omega": e.omega, "xi": e.xi})
        }
        Doc::Piece(p) => {
            let mut body = serde_json::Map::new();
            let mut passed = true;
            if p.k.is_some() {
                let h = check_hiding_piece(p, strong)?;
                passed &= h.passed;
                body.insert("hiding".into(), doc::hiding_v(&h));
            } else {
                body.insert("hiding".into(), Value::Null);
            }
            let (mf, mg) = p.mu();
            body.insert("mu".into(), json!([doc::r(&mf), doc::r(&mg)]));
            if let PieceDomain::Compact(_) = p.domain {
                let pc = is_p_class(&p.f, &p.g);
                body.insert("p_class".into(), json!(pc));
                if p.tags.contains(&ifs_hide::verifier::ClassTag::P) {
                    passed &= pc;
                }
                if pc && p.k.is_some() {
                    let b = boundary_exclusions(p)?;
                    passed &= b.ok;
                    body.insert("boundary".into(), json!({"ok": b.ok, "clause": b.clause}));
                }
            }
            body.insert("passed".into(), json!(passed));
            Value::Object(body)
        }
        Doc::PolyPiece { f, g, k } => {
            let h = check_hiding_poly(f, g, k, strong)?;
            json!({"passed": h.passed, "hiding": doc::hiding_v(&h)})
        }
        Doc::Report(v) => json!({"passed": v.get("passed").and_then(Value::as_bool).unwrap_or(false)}),
        // loading already re-checked every invariant of these
        Doc::PlMap(_) | Doc::PwPoly(_) | Doc::Region(_) | Doc::Periodic(_) => json!({"passed": true, "kind": d.kind()}),
    })
}

fn run(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Template { n, out } => {
            if n < 3 {
                return Err(Fail::Args(format!("--n must be at least 3, got {}", n)));
            }
            emit(&out, &Doc::Template(build_template(n)), "template", &[("n", n.to_string())])
        }
        Cmd::Eater { omega, out } => {
            check_omega(omega)?;
            let e = build_geometry_eater(&build_template(omega), omega, &omega_budget(omega))?;
            emit(&out, &Doc::Eater(e), "eater", &[("omega", omega.to_string())])
        }
        Cmd::Runway { omega, out } => {
            check_omega(omega)?;
            let rw = build_runway(omega)?;
            log::info!("runway: i0 = {}, d = {}", rw.i0, rw.d);
            emit(&out, &Doc::Piece(rw.piece), "runway", &[("omega", omega.to_string())])
        }
        Cmd::Connector { omega, r, from, to, out } => {
            check_omega(omega)?;
            let from = from.unwrap_or_else(|| Region::single(ifs_hide::rat(1, 4), ifs_hide::rat(1, 2)).expect("valid"));
            let to = to.unwrap_or_else(symmetric_shape);
            let c = build_connector(omega, &r, &from, &to)?;
            let params = [("omega", omega.to_string()), ("r", fmt_rat(&r)), ("from", from.to_string()), ("to", to.to_string())];
            emit(&out, &Doc::Piece(c.piece), "connector", &params)
        }
        Cmd::Leap { omega, r, r2, out } => {
            check_omega(omega)?;
            let kit = LeapKit::new(omega)?;
            let leap = realize_any_leap(&kit, &r, &r2).map_err(|e| {
                let diag = leap_diagnostics(&r, &r2, omega, kit.eater.xi);
                Fail::Core(e, diag)
            })?;
            log::info!("leap: tau = {}, {} F nodes", leap.plan.tau, leap.piece.f.nodes().len());
            let params = [("omega", omega.to_string()), ("r", fmt_rat(&r)), ("r2", fmt_rat(&r2))];
            emit(&out, &Doc::Piece(leap.piece), "leap", &params)
        }
        Cmd::Assemble { omega, n0, demo, budget, out } => {
            check_omega(omega)?;
            let n0_s = match n0 {
                N0::Auto => "auto".to_string(),
                N0::Fixed(n) => n.to_string(),
            };
            let cx = build_counterexample_with(omega, n0, demo, &Limits { slot_budget: budget })?;
            let params = [
                ("omega", omega.to_string()),
                ("n0", n0_s),
                ("demo", demo.to_string()),
                ("budget", budget.to_string()),
            ];
            emit(&out, &Doc::Piece(cx.piece), "assemble", &params)
        }
        Cmd::Smooth { input, out } => {
            let p = match load(&input)? {
                Doc::Piece(p) => p,
                other => return Err(Fail::Args(format!("smooth needs a piece, got {}", other.kind()))),
            };
            let c1 = reduce_to_c1(&p)?;
            let params = [("in", input.input.display().to_string())];
            emit(&out, &Doc::PolyPiece { f: c1.f, g: c1.g, k: c1.k }, "smooth", &params)
        }
        Cmd::Verify { input, strong, out } => {
            let d = load(&input)?;
            let body = verify_doc(&d, strong)?;
            let params = [("in", input.input.display().to_string()), ("strong", strong.to_string())];
            report(&out, "verify", &params, body)
        }
        Cmd::Orbit { input, seed, depth, out } => {
            let p = match load(&input)? {
                Doc::Piece(p) => p,
                other => return Err(Fail::Args(format!("orbit needs a piecewise-linear piece, got {}", other.kind()))),
            };
            let o = orbit_audit(&p, &seed, depth)?;
            let body = json!({
                "passed": o.all_outside,
                "all_outside": o.all_outside,
                "visited": o.visited_count,
                "min_distance_to_k_interior": o.min_distance_to_k_interior.as_ref().map(doc::r),
            });
            let params = [("in", input.input.display().to_string()), ("seed", fmt_rat(&seed)), ("depth", depth.to_string())];
            report(&out, "orbit", &params, body)
        }
        Cmd::Gallery { which, c, eps, out } => {
            let (ex, params) = match which {
                Which::Example1 => (GalleryExample::Example1(c.clone()), [("example", "example1".to_string()), ("c", fmt_rat(&c))]),
                Which::Example2 => (GalleryExample::Example2(eps.clone()), [("example", "example2".to_string()), ("eps", fmt_rat(&eps))]),
            };
            let g = gallery_examples(&ex)?;
            emit(&out, &Doc::Piece(g.piece), "gallery", &params)
        }
        Cmd::Plot { input, out } => {
            let d = load(&input)?;
            let text = svg::plot(&d).map_err(Fail::Args)?;
            write_out(&out, &text)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("IFSHIDE_LOG", "error")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if cli.json_errors {
                let v = json!({"error": f.kind(), "message": f.message(), "details": f.details(), "exit": f.code()});
                eprintln!("{}", v);
            } else {
                eprintln!("ifs-hide: {}: {}", f.kind(), f.message());
                if !f.details().is_null() {
                    eprintln!("{}", f.details());
                }
            }
            ExitCode::from(f.code())
        }
    }
}
