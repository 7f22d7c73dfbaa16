//! Acceptance runner: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ifs_hide::assembly::{build_counterexample, gallery_examples, Counterexample, GalleryExample, N0};
use ifs_hide::farey::{adjacency_invariants, farey_series};
use ifs_hide::leap::{leap_size, realize_leap_mirrored_with, realize_leap_with, LeapKit, Orientation};
use ifs_hide::local_models::{build_connector, build_runway};
use ifs_hide::region::Region;
use ifs_hide::smoothing::reduce_to_c1;
use ifs_hide::template::{build_template, verify_template};
use ifs_hide::verifier::{
    approx_minimal_set, boundary_exclusions, cells_inside_interior, check_hiding, check_hiding_piece, is_p_class,
    orbit_audit, unit,
};
use ifs_hide::{int, rat, Error, Rat, RatRegion};
use num_integer::Integer;
use proptest::test_runner::{Config, TestRunner};

type Check = Result<String, String>;

fn ensure(b: bool, what: impl Into<String>) -> Result<(), String> {
    if b {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn e2s(e: Error) -> String {
    e.to_string()
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, format!("took {:?}, limit {:?}", t.elapsed(), limit))
}

// 1 -------------------------------------------------------------------------

fn brute_farey(n: i64) -> Vec<Rat> {
    let mut s = BTreeSet::new();
    for q in 1..=n {
        for p in 0..=q {
            if p.gcd(&q) == 1 {
                s.insert(rat(p, q));
            }
        }
    }
    s.into_iter().collect()
}

fn farey() -> Check {
    let t = Instant::now();
    let mut pairs = 0;
    for n in 1..=50u64 {
        let f = farey_series(n).map_err(e2s)?;
        ensure(f == brute_farey(n as i64), format!("order {} differs from enumeration", n))?;
        for w in f.windows(2) {
            let (h, k) = (w[0].numer().clone(), w[0].denom().clone());
            let (h2, k2) = (w[1].numer().clone(), w[1].denom().clone());
            ensure(&h2 * &k - &h * &k2 == 1.into(), format!("cross product at {} {}", w[0], w[1]))?;
            ensure(&k + &k2 >= (n + 1).into(), format!("k + k' at {} {}", w[0], w[1]))?;
            let (_, tau) = adjacency_invariants(&w[1], &w[0]).map_err(e2s)?;
            ensure(num_bigint::BigInt::from(tau) == k.clone().max(k2.clone()), format!("tau at {} {}", w[0], w[1]))?;
            pairs += 1;
        }
    }
    within(t, Duration::from_secs(5))?;
    Ok(format!("orders 1..=50, {} adjacent pairs", pairs))
}

// 2 -------------------------------------------------------------------------

/// Closure of {n} under x -> (1 - 1/n)x and x -> x - 1 on [floor, n], where
/// floor is the first contraction iterate of n below 1.
fn template_oracle(n: i64) -> Vec<Rat> {
    let c = int(1) - rat(1, n);
    let top = int(n);
    let mut floor = top.clone();
    while floor >= int(1) {
        floor = &floor * &c;
    }
    let mut seen: BTreeSet<Rat> = BTreeSet::new();
    let mut todo = vec![top];
    while let Some(x) = todo.pop() {
        if x < floor || !seen.insert(x.clone()) || x < int(1) {
            continue;
        }
        todo.push(&x * &c);
        todo.push(&x - int(1));
    }
    seen.into_iter().collect()
}

fn templates() -> Check {
    let t = Instant::now();
    for n in 3..=12u64 {
        let tpl = build_template(n);
        let chk = verify_template(&tpl);
        ensure(chk.ok, format!("n = {}: {:?}", n, chk.failures))?;
    }
    let t3 = build_template(3);
    let want = vec![rat(8, 9), int(1), rat(4, 3), int(2), int(3)];
    ensure(template_oracle(3) == want, "oracle disagrees with the hand values")?;
    ensure(t3.points == want, format!("n = 3 points {:?}", t3.points))?;
    within(t, Duration::from_secs(5))?;
    Ok("n = 3..=12 verified; n = 3 points 8/9, 1, 4/3, 2, 3".into())
}

// 3 -------------------------------------------------------------------------

fn example2() -> Check {
    let t = Instant::now();
    for eps in [int(0), rat(1, 20), rat(1, 10)] {
        let ex = gallery_examples(&GalleryExample::Example2(eps.clone())).map_err(e2s)?;
        let (p, q) = (ex.p.clone().unwrap(), ex.q.clone().unwrap());
        let piece = &ex.piece;
        // p is the fixed point of g∘f and q = f(p)
        ensure(piece.g.eval(&piece.f.eval(&p).map_err(e2s)?).map_err(e2s)? == p, "g(f(p)) = p")?;
        ensure(piece.f.eval(&p).map_err(e2s)? == q, "f(p) = q")?;
        let k: RatRegion = piece.k.as_ref().unwrap().core().unwrap().clone();
        ensure(k.len() == 2, "K has two components")?;
        ensure(k.components()[0].contains(&q) && k.components()[1].contains(&p), "J_q and J_p")?;
        let h = check_hiding(&piece.f, &piece.g, &k, &unit(), false).map_err(e2s)?;
        ensure(h.passed, format!("eps = {}: {}", eps, h.render()))?;
        let o = orbit_audit(piece, &int(0), 12).map_err(e2s)?;
        ensure(o.all_outside, format!("eps = {}: orbit of 0 enters K", eps))?;
        if eps == int(0) {
            ensure(p == rat(2, 3), format!("p0 = {}", p))?;
        }
    }
    within(t, Duration::from_secs(30))?;
    Ok("eps = 0, 1/20, 1/10 hide; p0 = 2/3".into())
}

// 4 -------------------------------------------------------------------------

fn runways() -> Check {
    let mut out = Vec::new();
    for w in 3..=5u64 {
        let t = Instant::now();
        let rw = build_runway(w).map_err(e2s)?;
        let h = check_hiding_piece(&rw.piece, false).map_err(e2s)?;
        ensure(h.passed, format!("omega {}: {}", w, h.render()))?;
        ensure(rw.piece.mu() == (rat(1, w as i64), int(0)), format!("omega {}: mu {:?}", w, rw.piece.mu()))?;
        within(t, Duration::from_secs(30))?;
        out.push(format!("omega {} d {}", w, rw.d));
    }
    Ok(out.join(", "))
}

// 5 -------------------------------------------------------------------------

fn connectors() -> Check {
    let one = Region::from_pairs(&[(rat(1, 4), rat(1, 2))]).unwrap();
    let two = Region::from_pairs(&[(rat(1, 8), rat(1, 4)), (rat(5, 8), rat(7, 8))]).unwrap();
    let cases = [(3u64, int(1), &one, &two), (3, rat(3, 2), &one, &two), (4, int(2), &two, &one)];
    let mut out = Vec::new();
    for (w, r, a, b) in cases {
        let t = Instant::now();
        let c = build_connector(w, &r, a, b).map_err(e2s)?;
        let h = check_hiding_piece(&c.piece, false).map_err(e2s)?;
        ensure(h.passed, format!("({}, {}): {}", w, r, h.render()))?;
        let (mf, mg) = c.piece.mu();
        let bound = rat(1, w as i64);
        ensure(mf < bound && mg < bound, format!("({}, {}): mu {} {}", w, r, mf, mg))?;
        within(t, Duration::from_secs(60))?;
        out.push(format!("({}, {}) {} -> {} components", w, r, a.len(), b.len()));
    }
    Ok(out.join("; "))
}

// 6 -------------------------------------------------------------------------

/// First Farey order with adjacent pairs whose τ reaches ω + ξ + 2, in both
/// orientations; pairs are translated into [1, 2] and the smallest leap of
/// each orientation is taken.
fn admissible_pairs(kit: &LeapKit) -> Result<(u64, (Rat, Rat), (Rat, Rat)), String> {
    let need = kit.template.n as usize + kit.eater.xi + 2;
    for n in 1..10_000u64 {
        let f: Vec<Rat> = farey_series(n).map_err(e2s)?.into_iter().map(|x| x + int(1)).collect();
        let mut best: [Option<(u128, Rat, Rat)>; 2] = [None, None];
        for w in f.windows(2) {
            if let Ok(plan) = kit.plan(&w[1], &w[0]) {
                if plan.tau >= need {
                    let slot = (plan.orientation == Orientation::Mirrored) as usize;
                    let cost = leap_size(&plan).1;
                    if best[slot].as_ref().is_none_or(|b| cost < b.0) {
                        best[slot] = Some((cost, w[1].clone(), w[0].clone()));
                    }
                }
            }
        }
        if let [Some(s), Some(m)] = best {
            return Ok((n, (s.1, s.2), (m.1, m.2)));
        }
    }
    Err("no admissible order found".into())
}

fn leaps() -> Check {
    let t = Instant::now();
    let kit = LeapKit::new(3).map_err(e2s)?;
    let (n, (a1, a2), (b1, b2)) = admissible_pairs(&kit)?;
    let leap = realize_leap_with(&kit, &a1, &a2).map_err(e2s)?;
    let k = leap.piece.k.as_ref().unwrap();
    ensure(check_hiding_piece(&leap.piece, false).map_err(e2s)?.passed, "standard leap does not hide")?;
    let q = |r: &Rat| rat(1, r.denom().to_string().parse().unwrap());
    ensure(k.left().map(|t| t.period.clone()) == Some(q(&a1)), "left period is not 1/q1")?;
    ensure(k.right().map(|t| t.period.clone()) == Some(q(&a2)), "right period is not 1/q2")?;
    let mir = realize_leap_mirrored_with(&kit, &b1, &b2).map_err(e2s)?;
    let km = mir.piece.k.as_ref().unwrap();
    ensure(check_hiding_piece(&mir.piece, false).map_err(e2s)?.passed, "mirrored leap does not hide")?;
    ensure(km.left().map(|t| t.period.clone()) == Some(q(&b1)), "mirrored left period is not 1/q1")?;
    ensure(km.right().map(|t| t.period.clone()) == Some(q(&b2)), "mirrored right period is not 1/q2")?;
    within(t, Duration::from_secs(600))?;
    Ok(format!(
        "order {} (xi {}): standard {} -> {} (tau {}), mirrored {} -> {} (tau {}), {:?}",
        n,
        kit.eater.xi,
        a1,
        a2,
        leap.plan.tau,
        b1,
        b2,
        mir.plan.tau,
        t.elapsed()
    ))
}

// 7, 8, 10 ------------------------------------------------------------------

fn pipeline(cx: &Result<Counterexample, String>) -> Check {
    let cx = cx.as_ref().map_err(|e| e.clone())?;
    let p = &cx.piece;
    ensure(is_p_class(&p.f, &p.g), "not P-class")?;
    let (mf, mg) = p.mu();
    ensure(mf <= rat(1, 3) && mg <= rat(1, 3), format!("mu {} {}", mf, mg))?;
    let h = check_hiding_piece(p, false).map_err(e2s)?;
    ensure(h.passed, h.render())?;
    let k = p.k.as_ref().unwrap();
    ensure(k.materialize(&int(0), &int(1)).parts() != [(int(0), int(1))], "K = [0, 1]")?;
    ensure(boundary_exclusions(p).map_err(e2s)?.ok, "boundary exclusions")?;
    for seed in [int(0), int(1)] {
        ensure(orbit_audit(p, &seed, 10).map_err(e2s)?.all_outside, format!("orbit of {} enters K", seed))?;
    }
    Ok(format!("n0 {}, {} leaps", cx.estimate.n0, cx.estimate.leaps))
}

fn c1(cx: &Result<Counterexample, String>) -> Check {
    let cx = cx.as_ref().map_err(|e| format!("needs the counterexample: {}", e))?;
    let t = Instant::now();
    let pair = reduce_to_c1(&cx.piece).map_err(e2s)?;
    let (mf, mg) = cx.piece.mu();
    ensure(pair.report.f_distances.1 == mf && pair.report.g_distances.1 == mg, "d'_C1 differs from mu")?;
    ensure(pair.f.derivative_jumps().is_empty() && pair.g.derivative_jumps().is_empty(), "derivative jumps")?;
    ensure(pair.report.hiding.passed, "hiding after smoothing")?;
    ensure(pair.report.f_distances.0 <= pair.report.f_distances.1, "d_C0 > d'_C1 for f")?;
    ensure(pair.report.g_distances.0 <= pair.report.g_distances.1, "d_C0 > d'_C1 for g")?;
    within(t, Duration::from_secs(300))?;
    Ok(format!("d'_C1 = ({}, {})", mf, mg))
}

fn minimality(cx: &Result<Counterexample, String>) -> Check {
    let t = Instant::now();
    let res = rat(1, 64);
    let ex1 = gallery_examples(&GalleryExample::Example1(rat(1, 2))).map_err(e2s)?;
    let m = approx_minimal_set(&ex1.piece, 12, &res).map_err(e2s)?;
    ensure(m == Region::single(int(0), int(1)).unwrap(), format!("example 1 covers only {}", m))?;
    let cx = cx.as_ref().map_err(|e| format!("example 1 covers all 64 cells; counterexample half: {}", e))?;
    let m = approx_minimal_set(&cx.piece, 12, &res).map_err(e2s)?;
    let inside = cells_inside_interior(cx.piece.k.as_ref().unwrap(), &res);
    ensure(!inside.is_empty(), "no cell inside int(K)")?;
    for c in &inside {
        ensure(!m.contains(&Region::single(c.lo().clone(), c.hi().clone()).unwrap()), format!("cell {} reached", c))?;
    }
    within(t, Duration::from_secs(60))?;
    Ok(format!("example 1 covers 64 cells; {} cells inside int(K) stay empty", inside.len()))
}

// 9 -------------------------------------------------------------------------

fn properties() -> Check {
    use common::*;
    let t = Instant::now();
    let runner = || TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    let fail = |name: &str, e: String| format!("{}: {}", name, e);
    runner()
        .run(&(any_map(), any_map()), |(f, g)| mu_composition(&f, &g))
        .map_err(|e| fail("mu composition", e.to_string()))?;
    runner()
        .run(&(any_map(), region()), |(f, r)| image_preimage(&f, &r))
        .map_err(|e| fail("image/preimage", e.to_string()))?;
    runner().run(&raw_intervals(), normalize_idempotent).map_err(|e| fail("normalize", e.to_string()))?;
    runner()
        .run(&(any_map(), region()), |(f, r)| mirror_involution(&f, &r))
        .map_err(|e| fail("mirror", e.to_string()))?;
    runner()
        .run(&(any_map(), -20i64..20, 1i64..30), |(f, a, l)| rescale_keeps_mu(&f, a, l))
        .map_err(|e| fail("rescale", e.to_string()))?;
    runner()
        .run(&budget_case(), |(w, f, g)| omega_budget_holds(w, &f, &g))
        .map_err(|e| fail("omega budget", e.to_string()))?;
    within(t, Duration::from_secs(60))?;
    Ok(format!("6 suites x {} cases", CASES))
}

// ---------------------------------------------------------------------------

fn guarded(f: impl FnOnce() -> Check) -> Check {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(p) => Err(format!(
            "panicked: {}",
            p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
        )),
    }
}

fn main() {
    let t = Instant::now();
    let cx: Result<Counterexample, String> = catch_unwind(|| build_counterexample(3, N0::Auto, true))
        .map_err(|_| "counterexample builder panicked".to_string())
        .and_then(|r| r.map_err(e2s));
    let results: Vec<(usize, Check)> = vec![
        (1, guarded(farey)),
        (2, guarded(templates)),
        (3, guarded(example2)),
        (4, guarded(runways)),
        (5, guarded(connectors)),
        (6, guarded(leaps)),
        (7, guarded(|| pipeline(&cx))),
        (8, guarded(|| c1(&cx))),
        (9, guarded(properties)),
        (10, guarded(|| minimality(&cx))),
    ];
    let mut failed = 0;
    for (n, r) in &results {
        match r {
            Ok(d) => println!("criterion {}: PASS ({})", n, d),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL ({})", n, e)
            }
        }
    }
    println!("{} of {} criteria passed in {:?}", results.len() - failed, results.len(), t.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
