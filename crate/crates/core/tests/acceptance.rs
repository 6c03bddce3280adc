//! One PASS/FAIL line per acceptance criterion. Runs the desk-scale configurations.
//! By default the process exits 0 so the rest of the suite still runs under `cargo test`;
//! set ACCEPTANCE_STRICT=1 to get a nonzero exit when any line is FAIL.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use grflop::cone::{self, PointTheory, TruncAlgebra, ZSer};
use grflop::exact::{rat, ratq, Rat};
use grflop::hyper::{ode_oracle, run_continuation, ContinuationReport, NumericConfig};
use grflop::pipeline::{self, RunConfig, Status};

const TOL: f64 = 1e-8;

struct Line {
    id: u32,
    ok: bool,
    detail: String,
}

fn exact_cfg(k: usize, n: usize) -> RunConfig {
    RunConfig { k, n, dq: 4, logy: 3, x: 2, ..RunConfig::default() }
}

struct Exact {
    n: usize,
    runs: Result<Vec<pipeline::ExactRun>, String>,
    seconds: f64,
}

fn exact(n: usize) -> Exact {
    let t = Instant::now();
    let runs = pipeline::exact_runs(&exact_cfg(2, n)).map_err(|e| e.to_string());
    Exact { n, runs, seconds: t.elapsed().as_secs_f64() }
}

fn criterion1(ex: &[Exact]) -> Line {
    let mut ok = true;
    let mut parts = vec![];
    for e in ex {
        match &e.runs {
            Ok(runs) => {
                let (same, _) = pipeline::stage_abelianize(runs);
                let coeffs: usize = runs.iter().map(|r| r.a.ig.terms.len()).sum();
                ok &= same && e.seconds < 300.0;
                parts.push(format!("(2,{}) identical={} coeffs={} time={:.1}s", e.n, same, coeffs, e.seconds));
            }
            Err(m) => {
                ok = false;
                parts.push(format!("(2,{}) error: {m}", e.n));
            }
        }
    }
    Line { id: 1, ok, detail: parts.join("; ") }
}

fn criterion2(ex: &[Exact]) -> Line {
    let mut ok = true;
    let mut parts = vec![];
    for e in ex {
        match &e.runs {
            Ok(runs) => match pipeline::stage_anti(&exact_cfg(2, e.n), runs) {
                Ok((good, d)) => {
                    ok &= good;
                    let counts: Vec<String> = d["sides"]
                        .as_array()
                        .map(|a| a.iter().map(|s| format!("{}:{}/{}", s["side"], s["divisible"], s["coefficients"])).collect())
                        .unwrap_or_default();
                    parts.push(format!("(2,{}) anti-invariant, divisible {}", e.n, counts.join(" ")));
                }
                Err(m) => {
                    ok = false;
                    parts.push(format!("(2,{}) {m}", e.n));
                }
            },
            Err(m) => {
                ok = false;
                parts.push(format!("(2,{}) {m}", e.n));
            }
        }
    }
    Line { id: 2, ok, detail: parts.join("; ") }
}

fn criterion3() -> Line {
    let mut ok = true;
    let mut parts = vec![];
    for n in [3, 4] {
        match pipeline::stage_pairing(&exact_cfg(2, n)) {
            Ok((good, d)) => {
                ok &= good;
                let c: Vec<String> = d["sides"]
                    .as_array()
                    .map(|a| a.iter().map(|s| format!("{} agree={} c={}", s["side"], s["agree"], s["constant"])).collect())
                    .unwrap_or_default();
                parts.push(format!("(2,{n}) {}", c.join(", ")));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("(2,{n}) {e}"));
            }
        }
    }
    Line { id: 3, ok, detail: parts.join("; ") }
}

fn criterion4(ex: &[Exact]) -> Line {
    let mut ok = true;
    let mut parts = vec![];
    for e in ex {
        let Ok(runs) = &e.runs else {
            ok = false;
            continue;
        };
        for r in runs {
            match grflop::ifactory::bigness_check(&r.module, &r.a.ig) {
                Ok(rep) => {
                    ok &= rep.basis_flag;
                    parts.push(format!("(2,{}) {} rank {}/{}", e.n, r.side.label(), rep.rank, rep.expected_rank));
                }
                Err(m) => {
                    ok = false;
                    parts.push(format!("(2,{}) {m}", e.n));
                }
            }
        }
    }
    // N + 1 = 3 for (2,3)
    if let Some(Ok(runs)) = ex.first().map(|e| &e.runs) {
        ok &= runs.iter().all(|r| r.module.rank() == 3);
    }
    Line { id: 4, ok, detail: parts.join("; ") }
}

fn cont(n: usize) -> (usize, Result<ContinuationReport, String>) {
    (n, run_continuation(2, n, &NumericConfig::default()).map_err(|e| e.to_string()))
}

fn criterion5(reps: &[(usize, Result<ContinuationReport, String>)]) -> Line {
    let mut ok = true;
    let mut parts = vec![];
    for (n, r) in reps {
        match r {
            Ok(rep) => {
                let g = rep.samples.iter().map(|s| s.gamma_max()).fold(0.0, f64::max);
                let d = rep.samples.iter().map(|s| s.delta_max()).fold(0.0, f64::max);
                let tw = rep.samples.iter().map(|s| s.delta_twisted_max()).fold(0.0, f64::max);
                let time_ok = *n != 3 || rep.seconds < 120.0;
                ok &= rep.gamma_ok() && rep.delta_ok() && time_ok;
                parts.push(format!(
                    "(2,{n}) gamma {:.1e}, delta same U {:.1e}, delta with exp(i pi (k-1) sum H/z) twist {:.1e}, {:.0}s at {} bits",
                    g, d, tw, rep.seconds, rep.precision
                ));
            }
            Err(m) => {
                ok = false;
                parts.push(format!("(2,{n}) {m}"));
            }
        }
    }
    Line { id: 5, ok, detail: parts.join("; ") }
}

fn criterion6(reps: &[(usize, Result<ContinuationReport, String>)]) -> Line {
    let mut ok = true;
    let mut parts = vec![];
    for (n, r) in reps {
        match r {
            Ok(rep) => {
                ok &= rep.properties_ok();
                for s in &rep.samples {
                    let sym = s.symplectic_t.max(s.symplectic_g);
                    let deg = s.degree_t.max(s.degree_g);
                    ok &= s.weyl < TOL && sym < TOL && deg < TOL;
                    parts.push(format!("(2,{n}) z={} weyl {:.1e} sympl {:.1e} degree {:.1e}", s.z, s.weyl, sym, deg));
                }
            }
            Err(m) => {
                ok = false;
                parts.push(format!("(2,{n}) {m}"));
            }
        }
    }
    Line { id: 6, ok, detail: parts.join("; ") }
}

fn criterion7(reps: &[(usize, Result<ContinuationReport, String>)]) -> Line {
    let mut ok = true;
    let mut parts = vec![];
    for (n, r) in reps {
        match r {
            Ok(rep) => {
                let w = rep.samples.iter().map(|s| s.walls_vs_diagonal).fold(0.0, f64::max);
                let e = rep.samples.iter().map(|s| s.eps_independence).fold(0.0, f64::max);
                ok &= w < TOL && e < TOL;
                parts.push(format!("(2,{n}) walls vs diagonal {:.1e}, eps 0.05 vs 0.1 {:.1e}", w, e));
            }
            Err(m) => {
                ok = false;
                parts.push(format!("(2,{n}) {m}"));
            }
        }
    }
    Line { id: 7, ok, detail: parts.join("; ") }
}

fn criterion8() -> Line {
    match ode_oracle(100, 7, 128) {
        Ok(r) => Line {
            id: 8,
            ok: r.closed_form < 1e-10 && r.series_vs_ode < 1e-10 && r.draws == 100,
            detail: format!("(1+y)^beta {:.1e}; ODE vs series over {} draws {:.1e}", r.closed_form, r.draws, r.series_vs_ode),
        },
        Err(e) => Line { id: 8, ok: false, detail: e.to_string() },
    }
}

fn criterion9() -> Line {
    let cfg = RunConfig { k: 1, n: 2, ..RunConfig::default() };
    match pipeline::verify_all(&cfg) {
        Ok(rep) => {
            let failed: Vec<&str> =
                rep.stages.iter().filter(|s| s.status != Status::Pass).map(|s| s.name.as_str()).collect();
            let uvut = rep
                .stage("u_properties")
                .and_then(|s| s.detail["samples"].as_array().cloned())
                .map(|a| a.iter().filter_map(|x| x["u_vs_ut"].as_f64()).fold(0.0, f64::max));
            let ok = failed.is_empty() && uvut.is_some_and(|v| v < TOL);
            Line {
                id: 9,
                ok,
                detail: format!(
                    "(1,2) {} stages, failing {:?}, |U - U_T| {:.1e}",
                    rep.stages.len(),
                    failed,
                    uvut.unwrap_or(f64::NAN)
                ),
            }
        }
        Err(e) => Line { id: 9, ok: false, detail: e.to_string() },
    }
}

fn random_round_trips(count: usize, seed: u64) -> grflop::Result<usize> {
    let j = cone::j_function(&PointTheory, 6)?;
    let alg = TruncAlgebra::new(&["a", "b"], 5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut good = 0;
    let gens = [alg.gen(0), alg.gen(1)];
    let rand_nil = |rng: &mut ChaCha8Rng| {
        let mut p = alg.zero();
        for _ in 0..3 {
            let g = &gens[rng.gen_range(0..2)];
            let e = rng.gen_range(1..4);
            let c = ratq(rng.gen_range(-5..6), rng.gen_range(1..4));
            p = p.add(&alg.pow(g, e).scale(&c));
        }
        p
    };
    for _ in 0..count {
        let t = vec![rand_nil(&mut rng)];
        let mut w = ZSer::new();
        for kz in 0..3 {
            let v = rand_nil(&mut rng);
            if !v.is_zero() {
                w.insert(kz, v);
            }
        }
        let w = alg.z_add(&w, &alg.z_const(-Rat::from(rat(1)), 0));
        let k = cone::cone_point(&j, &alg, &t, &vec![w.clone()])?;
        let r = cone::reconstruct(&k, &j)?;
        if r.t == t && r.w == vec![w] && r.on_cone() && cone::tau_of(&PointTheory, &k)? == t {
            good += 1;
        }
    }
    Ok(good)
}

fn criterion10() -> Line {
    let ax = cone::axioms_check(&PointTheory, 6, 2);
    let demo = cone::demo_point(6);
    let trips = random_round_trips(25, 11);
    match (ax, demo, trips) {
        (Ok(ax), Ok((tr, _)), Ok(good)) => {
            let ok = ax.passed()
                && tr.round_trip_ok
                && tr.tau_identity_ok
                && tr.reconstruction_on_cone
                && tr.off_cone_detected
                && tr.off_cone_first_degree == Some(1)
                && good == 25;
            Line {
                id: 10,
                ok,
                detail: format!(
                    "order 6: DE {} SE {} TRR {} ({} instances); round trips {good}/25; tau_J identity {}; off-cone defect at degree {:?}",
                    ax.de, ax.se, ax.trr, ax.trr_instances, tr.tau_identity_ok, tr.off_cone_first_degree
                ),
            }
        }
        (a, b, c) => Line {
            id: 10,
            ok: false,
            detail: format!(
                "error: {:?} {:?} {:?}",
                a.err().map(|e| e.to_string()),
                b.err().map(|e| e.to_string()),
                c.err().map(|e| e.to_string())
            ),
        },
    }
}

fn main() {
    // cargo passes harness flags like --nocapture or a filter; a filter that is not ours means skip
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with("--")).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let t0 = Instant::now();
    let mut lines = vec![];
    let ex = vec![exact(3), exact(4)];
    lines.push(criterion1(&ex));
    lines.push(criterion2(&ex));
    lines.push(criterion3());
    lines.push(criterion4(&ex));
    drop(ex);
    let reps = vec![cont(3), cont(4)];
    lines.push(criterion5(&reps));
    lines.push(criterion6(&reps));
    lines.push(criterion7(&reps));
    lines.push(criterion8());
    lines.push(criterion9());
    lines.push(criterion10());
    lines.sort_by_key(|l| l.id);
    for l in &lines {
        println!("criterion {:>2}: {}  {}", l.id, if l.ok { "PASS" } else { "FAIL" }, l.detail);
    }
    let failed: Vec<u32> = lines.iter().filter(|l| !l.ok).map(|l| l.id).collect();
    println!(
        "acceptance: {}/{} PASS{} ({:.0}s)",
        lines.len() - failed.len(),
        lines.len(),
        if failed.is_empty() { String::new() } else { format!(", FAIL {:?}", failed) },
        t0.elapsed().as_secs_f64()
    );
    if !failed.is_empty() && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
