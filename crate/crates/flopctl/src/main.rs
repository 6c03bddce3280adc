use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use grflop::chow::Side;
use grflop::cone::{axioms_check, demo_point, di_matrix, j_function, TableTheory};
use grflop::ifactory::{formula_a, formula_b};
use grflop::pipeline::{self, Cache, Format, RunConfig, Selector};
use grflop::{FlopError, Result};

#[derive(Parser)]
#[command(name = "flopctl", about = "Exact and numeric checks for the Grassmannian flop wall-crossing")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// flat JSON config; flags given here override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dq: Option<u32>,
    #[arg(long)]
    logy: Option<u32>,
    #[arg(long)]
    x: Option<u32>,
    #[arg(long)]
    eps: Option<String>,
    /// comma-separated z samples, e.g. "1,2+1i"
    #[arg(long)]
    z: Option<String>,
    #[arg(long)]
    precision: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "param-seed")]
    param_seed: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// write the JSON result here as well as to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Plus,
    Minus,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Gamma,
    Delta,
    Walls,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulaArg {
    A,
    B,
}

#[derive(Subcommand)]
enum Cmd {
    /// Ring-level consistency and the two routes to the Gram matrix
    Chow {
        #[arg(long, value_enum, default_value = "both")]
        side: SideArg,
        #[command(flatten)]
        common: Common,
    },
    /// Build the nonabelian series by one formula and summarize it
    Ifun {
        #[arg(long, value_enum, default_value = "minus")]
        side: SideArg,
        #[arg(long, value_enum, default_value = "a")]
        formula: FormulaArg,
        #[command(flatten)]
        common: Common,
    },
    /// Both formulas, exact comparison, divisibility and bigness
    Abelianize {
        #[arg(long, value_enum, default_value = "both")]
        side: SideArg,
        #[command(flatten)]
        common: Common,
    },
    /// Numeric continuation: U, residual tables, property checks
    Continue {
        #[arg(long, value_enum, default_value = "all")]
        path: PathArg,
        #[command(flatten)]
        common: Common,
    },
    /// Lagrangian-cone lab
    Cone {
        #[command(subcommand)]
        cmd: ConeCmd,
    },
    /// Every stage in order; nonzero exit if any fails
    VerifyAll {
        #[command(flatten)]
        common: Common,
    },
    /// Write a series or matrix in a stable format
    Emit {
        /// ifun-plus, ifun-minus or U
        selector: String,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
        /// fail instead of recomputing when the cache has no entry
        #[arg(long)]
        cached_only: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum ConeCmd {
    /// J, DI and a reconstruction transcript for the point
    DemoPoint {
        #[arg(long, default_value_t = 6)]
        order: u32,
        #[arg(long)]
        json: bool,
    },
    /// Axioms and J for a user-supplied correlator table (unverified input)
    Table {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        order: u32,
        #[arg(long, default_value_t = 1)]
        kmax: u32,
    },
}

fn config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::from_json_str(&std::fs::read_to_string(p)?)?,
        None => RunConfig::default(),
    };
    macro_rules! over {
        ($f:ident) => {
            if let Some(v) = c.$f.clone() {
                cfg.$f = v;
            }
        };
    }
    over!(k);
    over!(n);
    over!(dq);
    over!(logy);
    over!(x);
    over!(eps);
    over!(precision);
    over!(param_seed);
    over!(seed);
    over!(workers);
    if let Some(t) = c.tol {
        cfg.tol_rel = t;
    }
    if let Some(z) = &c.z {
        cfg.z_samples = z.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    }
    if c.out.is_some() {
        cfg.out = c.out.clone();
    }
    if cfg.max_precision < cfg.precision {
        cfg.max_precision = cfg.precision;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sides(s: SideArg) -> Vec<String> {
    match s {
        SideArg::Plus => vec!["plus".into()],
        SideArg::Minus => vec!["minus".into()],
        SideArg::Both => vec!["plus".into(), "minus".into()],
    }
}

fn finish(v: &Value, out: &Option<PathBuf>) -> Result<()> {
    let s = serde_json::to_string_pretty(v).unwrap_or_default();
    println!("{s}");
    if let Some(p) = out {
        std::fs::write(p, s + "\n")?;
    }
    Ok(())
}

fn status(ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(FlopError::Consistency("check failed; see report".into()))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Chow { side, common } => {
            let mut cfg = config(&common)?;
            cfg.sides = sides(side);
            let (a, da) = pipeline::stage_chow(&cfg)?;
            let (b, db) = pipeline::stage_pairing(&cfg)?;
            finish(&json!({ "param_stamp": cfg.param_stamp(), "chow": da, "pairing": db }), &cfg.out)?;
            status(a && b)
        }
        Cmd::Ifun { side, formula, common } => {
            let mut cfg = config(&common)?;
            cfg.sides = sides(side);
            let mut rows = vec![];
            for s in cfg.side_list()? {
                let m = grflop::chow::NonabelianModule::new(s, grflop::chow::Equiv::generic(cfg.k, cfg.n, cfg.param_seed))?;
                let t = std::time::Instant::now();
                let ab = match formula {
                    FormulaArg::A => formula_a(&m, cfg.trunc())?,
                    FormulaArg::B => formula_b(&m, cfg.trunc())?,
                };
                rows.push(json!({
                    "side": s.label(),
                    "coefficients": ab.ig.terms.len(),
                    "anti_invariant_coefficients": ab.anti.terms.len(),
                    "points": m.fixed.points.len(),
                    "seconds": t.elapsed().as_secs_f64(),
                }));
            }
            finish(&json!({ "param_stamp": cfg.param_stamp(), "sides": rows }), &cfg.out)
        }
        Cmd::Abelianize { side, common } => {
            let mut cfg = config(&common)?;
            cfg.sides = sides(side);
            let runs = pipeline::exact_runs(&cfg)?;
            let (a, da) = pipeline::stage_abelianize(&runs);
            let (b, db) = pipeline::stage_anti(&cfg, &runs)?;
            let (c, dc) = pipeline::stage_bigness(&runs)?;
            finish(
                &json!({ "param_stamp": cfg.param_stamp(), "formulas": da, "divisibility": db, "bigness": dc }),
                &cfg.out,
            )?;
            status(a && b && c)
        }
        Cmd::Continue { path, common } => {
            let cfg = config(&common)?;
            let cache = Cache::from_env();
            let rep = pipeline::continuation_cached(&cfg, cache.as_ref(), false)?;
            let samples: Vec<Value> = rep
                .samples
                .iter()
                .map(|s| {
                    let mut v = json!({
                        "z": s.z,
                        "condition": s.condition,
                        "properties_max": s.properties_max(),
                        "U": s.u,
                    });
                    if matches!(path, PathArg::Gamma | PathArg::All) {
                        v["gamma"] = json!({ "max_rel": s.gamma_max(), "rows": s.gamma });
                    }
                    if matches!(path, PathArg::Delta | PathArg::All) {
                        v["delta"] = json!({
                            "max_rel_same_u": s.delta_max(),
                            "max_rel_twisted": s.delta_twisted_max(),
                            "rows_same_u": s.delta_same_u,
                            "rows_twisted": s.delta_twisted,
                        });
                    }
                    if matches!(path, PathArg::Walls | PathArg::All) {
                        v["walls"] = json!({
                            "walls_vs_diagonal": s.walls_vs_diagonal,
                            "eps_independence": s.eps_independence,
                            "homotopy": s.homotopy,
                        });
                    }
                    v
                })
                .collect();
            let v = json!({
                "param_stamp": cfg.param_stamp(),
                "precision": rep.precision,
                "gamma_ok": rep.gamma_ok(),
                "delta_ok": rep.delta_ok(),
                "properties_ok": rep.properties_ok(),
                "samples": samples,
            });
            finish(&v, &cfg.out)?;
            let ok = rep.properties_ok()
                && match path {
                    PathArg::Gamma => rep.gamma_ok(),
                    PathArg::Delta => rep.delta_ok(),
                    PathArg::Walls => true,
                    PathArg::All => rep.gamma_ok() && rep.delta_ok(),
                };
            status(ok)
        }
        Cmd::Cone { cmd } => match cmd {
            ConeCmd::DemoPoint { order, json } => {
                let (tr, js) = demo_point(order)?;
                if json {
                    println!("{}", serde_json::to_string_pretty(&js).unwrap_or_default());
                } else {
                    println!("order {}", tr.order);
                    println!("J = {}", tr.j);
                    println!("J equals -z exp(-tau/z): {}", tr.j_matches_exponential);
                    println!("DI = {}", tr.di);
                    println!("K = -z exp(-s/z): t = {}, w = {}, on cone: {}", tr.reconstruction_t, tr.reconstruction_w, tr.reconstruction_on_cone);
                    println!("round trip (t, w) -> K -> (t, w): {}", tr.round_trip_ok);
                    println!("tau_K equals t: {}", tr.tau_identity_ok);
                    println!(
                        "off-cone bump detected: {} (lowest defect degree {:?})",
                        tr.off_cone_detected, tr.off_cone_first_degree
                    );
                    println!("V factor unipotent, no negative z powers: {}", tr.v_factor_ok);
                    println!("DE/SE/TRR: {}", tr.axioms_ok);
                }
                status(tr.axioms_ok && tr.round_trip_ok && tr.tau_identity_ok && tr.off_cone_detected)
            }
            ConeCmd::Table { file, order, kmax } => {
                let v: Value = serde_json::from_str(&std::fs::read_to_string(&file)?)
                    .map_err(|e| FlopError::Contract(format!("{}: {e}", file.display())))?;
                let th = TableTheory::from_json(&v)?;
                let ax = axioms_check(&th, order, kmax)?;
                let j = j_function(&th, order)?;
                let big = di_matrix(&j).is_ok();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "note": "user-supplied correlators; not checked against any geometry",
                        "theory": ax.theory,
                        "axioms": ax,
                        "J": j.to_json(),
                        "big": big,
                    }))
                    .unwrap_or_default()
                );
                status(ax.passed() && big)
            }
        },
        Cmd::VerifyAll { common } => {
            let cfg = config(&common)?;
            let rep = pipeline::verify_all(&cfg)?;
            let v = serde_json::to_value(&rep).unwrap_or(Value::Null);
            if let Some(p) = &cfg.out {
                std::fs::write(p, serde_json::to_string_pretty(&v).unwrap_or_default() + "\n")?;
            }
            for s in &rep.stages {
                eprintln!("{:<20} {:?} ({:.1}s)", s.name, s.status, s.seconds);
            }
            println!("{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            match rep.exit_code() {
                0 => Ok(()),
                2 => Err(FlopError::Contract("verify-all: a stage hit a contract error".into())),
                4 => Err(FlopError::Numeric("verify-all: a stage ran out of precision".into())),
                _ => Err(FlopError::Consistency("verify-all: at least one stage failed".into())),
            }
        }
        Cmd::Emit { selector, json: _, csv, cached_only, common } => {
            let cfg = config(&common)?;
            let sel: Selector = selector.parse()?;
            let fmt = if csv { Format::Csv } else { Format::Json };
            let text = match sel {
                Selector::IfunPlus => pipeline::emit_ifun(&cfg, Side::Plus, fmt)?,
                Selector::IfunMinus => pipeline::emit_ifun(&cfg, Side::Minus, fmt)?,
                Selector::U => {
                    let cache = Cache::from_env();
                    if cached_only && cache.is_none() {
                        return Err(FlopError::Contract(format!("--cached-only needs {} to be set", Cache::ENV)));
                    }
                    let rep = pipeline::continuation_cached(&cfg, cache.as_ref(), cached_only)?;
                    pipeline::emit_u(&cfg, &rep, fmt)?
                }
            };
            match &cfg.out {
                Some(p) => std::fs::write(p, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("flopctl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
