//! End-to-end runs: rings, exact series, continuation, cone lab. Each stage reports
//! pass/fail with details and timings; a failing stage does not stop the others.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chow::{Equiv, NonabelianModule, Side};
use crate::exact::rat::{parse_rat, rat_to_string};
use crate::exact::{ratq, Rat};
use crate::hyper::{run_continuation, ContinuationReport, NumericConfig};
use crate::ifactory::abelianize::divisibility_check;
use crate::ifactory::{bigness_check, compare_series, formula_a, formula_b, Abelianized, Trunc};
use crate::{FlopError, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct RunConfig {
    pub k: usize,
    pub n: usize,
    /// "plus", "minus" or both
    pub sides: Vec<String>,
    pub dq: u32,
    pub logy: u32,
    pub x: u32,
    pub eps: String,
    pub precision: usize,
    pub max_precision: usize,
    pub tol_rel: f64,
    pub z_samples: Vec<String>,
    /// z values at which exact divisibility by the Vandermonde is re-derived
    pub divisibility_z: Vec<String>,
    /// seed for the generic equivariant parameters, shared by the exact and numeric sides
    pub param_seed: u64,
    /// seed for everything else random (oracle draws, witnesses)
    pub seed: u64,
    pub oracle_draws: usize,
    pub cone_order: u32,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let nc = NumericConfig::default();
        RunConfig {
            k: 2,
            n: 3,
            sides: vec!["plus".into(), "minus".into()],
            dq: 4,
            logy: 3,
            x: 2,
            eps: nc.eps,
            precision: nc.precision,
            max_precision: nc.max_precision,
            tol_rel: nc.tol_rel,
            z_samples: nc.z_samples,
            divisibility_z: vec!["3".into(), "-7/2".into()],
            param_seed: nc.param_seed,
            seed: 7,
            oracle_draws: 100,
            cone_order: 6,
            workers: 1,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| FlopError::Contract(format!("config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k >= self.n {
            return Err(FlopError::Contract(format!("need 0 < k < n, got k={} n={}", self.k, self.n)));
        }
        if self.dq == 0 || self.logy == 0 || self.x == 0 {
            return Err(FlopError::Contract("truncations must be at least 1".into()));
        }
        if self.sides.is_empty() {
            return Err(FlopError::Contract("no sides selected".into()));
        }
        self.side_list()?;
        if self.workers == 0 {
            return Err(FlopError::Contract("workers must be positive".into()));
        }
        crate::hyper::report::parse_eps(&self.eps)?;
        for z in &self.z_samples {
            crate::hyper::parse_complex(z)?;
        }
        self.divisibility_points()?;
        Ok(())
    }

    pub fn side_list(&self) -> Result<Vec<Side>> {
        self.sides
            .iter()
            .map(|s| match s.as_str() {
                "plus" | "+" => Ok(Side::Plus),
                "minus" | "-" => Ok(Side::Minus),
                o => Err(FlopError::Contract(format!("unknown side {o:?}"))),
            })
            .collect()
    }

    pub fn trunc(&self) -> Trunc {
        Trunc { dq: self.dq, logy: self.logy, x: self.x }
    }

    pub fn numeric(&self) -> NumericConfig {
        NumericConfig {
            precision: self.precision,
            max_precision: self.max_precision,
            tol_rel: self.tol_rel,
            eps: self.eps.clone(),
            z_samples: self.z_samples.clone(),
            param_seed: self.param_seed,
            logy: self.logy,
            x: self.x,
        }
    }

    fn divisibility_points(&self) -> Result<Vec<Rat>> {
        self.divisibility_z
            .iter()
            .map(|s| parse_rat(s).ok_or_else(|| FlopError::Contract(format!("bad z value {s:?}"))))
            .collect()
    }

    /// Everything that determines the numbers in a report. Worker count and output paths are excluded.
    pub fn param_stamp(&self) -> Value {
        let (lam, sig) = crate::chow::params::generic_values(self.n, self.param_seed);
        json!({
            "version": env!("CARGO_PKG_VERSION"),
            "k": self.k,
            "n": self.n,
            "sides": self.sides,
            "dq": self.dq,
            "logy": self.logy,
            "x": self.x,
            "eps": self.eps,
            "precision": self.precision,
            "max_precision": self.max_precision,
            "tol_rel": self.tol_rel,
            "z_samples": self.z_samples,
            "divisibility_z": self.divisibility_z,
            "param_seed": self.param_seed,
            "lambda": lam.iter().map(rat_to_string).collect::<Vec<_>>(),
            "sigma": sig.iter().map(rat_to_string).collect::<Vec<_>>(),
            "seed": self.seed,
            "oracle_draws": self.oracle_draws,
            "cone_order": self.cone_order,
        })
    }

    /// Short stable key for cache file names.
    pub fn stamp_key(&self) -> String {
        // FNV-1a over the canonical (sorted-key) JSON
        let s = self.param_stamp().to_string();
        let mut h: u64 = 0xcbf29ce484222325;
        for b in s.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageResult {
    pub name: String,
    pub status: Status,
    pub detail: Value,
    pub seconds: f64,
    /// exit code of the error when status is error
    pub error_code: Option<i32>,
}

impl StageResult {
    fn from(name: &str, seconds: f64, r: Result<(bool, Value)>) -> Self {
        match r {
            Ok((ok, detail)) => StageResult {
                name: name.into(),
                status: if ok { Status::Pass } else { Status::Fail },
                detail,
                seconds,
                error_code: None,
            },
            Err(e) => StageResult {
                name: name.into(),
                status: Status::Error,
                detail: json!({ "error": e.to_string() }),
                seconds,
                error_code: Some(e.exit_code()),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub param_stamp: Value,
    pub stages: Vec<StageResult>,
    pub seconds: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.status == Status::Pass)
    }

    pub fn stage(&self, name: &str) -> Option<&StageResult> {
        self.stages.iter().find(|s| s.name == name)
    }

    /// 0 on success; otherwise the first error's code, or 3 for a failed identity.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            return 0;
        }
        self.stages
            .iter()
            .find_map(|s| s.error_code)
            .unwrap_or_else(|| FlopError::Consistency(String::new()).exit_code())
    }
}

/// Ring-level consistency per side: module construction, interpolation and p_a round trips.
pub fn stage_chow(cfg: &RunConfig) -> Result<(bool, Value)> {
    let eq = Equiv::generic(cfg.k, cfg.n, cfg.param_seed);
    let mut ok = true;
    let mut rows = vec![];
    for side in cfg.side_list()? {
        let m = NonabelianModule::new(side, eq.clone())?;
        let mut side_ok = true;
        // every basis class survives p_a^{-1} then p_a, and its localization interpolates back
        for b in 0..m.rank() {
            let c = m.basis_class(b);
            let lifted = m.p_a_inv(&c)?;
            let back = m.p_a(&lifted)?;
            side_ok &= back.eq_exact(&c);
            let cls = m.ring.from_localization(&lifted.to_localization());
            side_ok &= cls.eq_exact(&lifted);
        }
        let expected = binomial(cfg.n, cfg.k);
        side_ok &= m.fixed.points.len() == expected;
        ok &= side_ok;
        rows.push(json!({
            "side": side.label(),
            "abelian_rank": m.ring.rank(),
            "grassmannian_points": m.fixed.points.len(),
            "module_rank": m.rank(),
            "ok": side_ok,
        }));
    }
    Ok((ok, json!({ "sides": rows })))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// The exact series for each side, both formulas.
pub struct ExactRun {
    pub side: Side,
    pub module: crate::chow::nonabelian::ModuleRef,
    pub a: Abelianized,
    pub b: Abelianized,
    pub seconds_a: f64,
    pub seconds_b: f64,
}

pub fn exact_runs(cfg: &RunConfig) -> Result<Vec<ExactRun>> {
    let eq = Equiv::generic(cfg.k, cfg.n, cfg.param_seed);
    cfg.side_list()?
        .into_iter()
        .map(|side| {
            let module = NonabelianModule::new(side, eq.clone())?;
            let t = Instant::now();
            let a = formula_a(&module, cfg.trunc())?;
            let seconds_a = t.elapsed().as_secs_f64();
            let t = Instant::now();
            let b = formula_b(&module, cfg.trunc())?;
            let seconds_b = t.elapsed().as_secs_f64();
            Ok(ExactRun { side, module, a, b, seconds_a, seconds_b })
        })
        .collect()
}

pub fn stage_abelianize(runs: &[ExactRun]) -> (bool, Value) {
    let mut ok = true;
    let rows: Vec<Value> = runs
        .iter()
        .map(|r| {
            let cmp = compare_series(&r.a.ig, &r.b.ig);
            ok &= cmp.is_ok();
            json!({
                "side": r.side.label(),
                "identical": cmp.is_ok(),
                "coefficients": cmp.as_ref().ok(),
                "first_mismatch": cmp.err(),
                "seconds_a": r.seconds_a,
                "seconds_b": r.seconds_b,
            })
        })
        .collect();
    (ok, json!({ "sides": rows }))
}

/// Anti-invariance is enforced while descending; here divisibility is re-derived at rational z.
pub fn stage_anti(cfg: &RunConfig, runs: &[ExactRun]) -> Result<(bool, Value)> {
    let zs = cfg.divisibility_points()?;
    let mut ok = true;
    let mut rows = vec![];
    for r in runs {
        let total = r.a.anti.terms.len();
        let checked = divisibility_check(&r.module, &r.a, &zs)?;
        ok &= checked == total;
        rows.push(json!({ "side": r.side.label(), "coefficients": total, "divisible": checked }));
    }
    Ok((ok, json!({ "z": cfg.divisibility_z, "sides": rows })))
}

pub fn stage_bigness(runs: &[ExactRun]) -> Result<(bool, Value)> {
    let mut ok = true;
    let mut rows = vec![];
    for r in runs {
        let rep = bigness_check(&r.module, &r.a.ig)?;
        ok &= rep.basis_flag;
        rows.push(json!({ "side": r.side.label(), "report": rep }));
    }
    Ok((ok, json!({ "sides": rows })))
}

/// Gram matrices by Grassmannian localization and through the abelian pairing.
pub fn stage_pairing(cfg: &RunConfig) -> Result<(bool, Value)> {
    let eq = Equiv::generic(cfg.k, cfg.n, cfg.param_seed);
    let mut ok = true;
    let mut rows = vec![];
    for side in cfg.side_list()? {
        let m = NonabelianModule::new(side, eq.clone())?;
        let g1 = m.gram_loc();
        let g2 = m.gram_via_abelian()?;
        let same = g1.iter().zip(&g2).all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.eq_exact(y)));
        let nroots = cfg.k * (cfg.k - 1) / 2;
        let order: i64 = (1..=cfg.k as i64).product();
        let expect = ratq(if nroots % 2 == 0 { 1 } else { -1 }, order);
        let c = m.pairing_constant();
        ok &= same && c == expect;
        rows.push(json!({ "side": side.label(), "agree": same, "constant": rat_to_string(&c) }));
    }
    Ok((ok, json!({ "sides": rows })))
}

fn continuation_stages(rep: &Result<ContinuationReport>) -> Vec<(String, Result<(bool, Value)>)> {
    let rep = match rep {
        Ok(r) => r,
        Err(e) => {
            let msg = e.to_string();
            let code = e.exit_code();
            let mk = |_: ()| -> Result<(bool, Value)> {
                Err(match code {
                    2 => FlopError::Contract(msg.clone()),
                    4 => FlopError::Numeric(msg.clone()),
                    _ => FlopError::Consistency(msg.clone()),
                })
            };
            return ["continuation_gamma", "continuation_delta", "u_properties", "route_independence"]
                .iter()
                .map(|n| (n.to_string(), mk(())))
                .collect();
        }
    };
    let tol = rep.tol_rel;
    let per = |f: &dyn Fn(&crate::hyper::ZReport) -> Value| -> Vec<Value> { rep.samples.iter().map(f).collect() };
    let routes_ok = rep
        .samples
        .iter()
        .all(|s| s.walls_vs_diagonal < tol && s.eps_independence < tol && s.homotopy < tol);
    vec![
        (
            "continuation_gamma".into(),
            Ok((rep.gamma_ok(), json!({ "precision": rep.precision, "samples": per(&|s| json!({"z": s.z, "max_rel": s.gamma_max(), "condition": s.condition, "rows": s.gamma})) }))),
        ),
        (
            "continuation_delta".into(),
            Ok((
                rep.delta_ok(),
                json!({ "samples": per(&|s| json!({
                    "z": s.z,
                    "max_rel_same_u": s.delta_max(),
                    "max_rel_twisted": s.delta_twisted_max(),
                    "rows_same_u": s.delta_same_u,
                    "rows_twisted": s.delta_twisted,
                })) }),
            )),
        ),
        (
            "u_properties".into(),
            Ok((
                rep.properties_ok(),
                json!({ "samples": per(&|s| json!({
                    "z": s.z, "weyl": s.weyl, "symplectic_t": s.symplectic_t, "symplectic_g": s.symplectic_g,
                    "degree_t": s.degree_t, "degree_g": s.degree_g, "anti_subspace": s.anti_subspace,
                    "basepoint": s.basepoint, "u_vs_ut": s.u_vs_ut,
                })) }),
            )),
        ),
        (
            "route_independence".into(),
            Ok((
                routes_ok,
                json!({ "samples": per(&|s| json!({
                    "z": s.z, "walls_vs_diagonal": s.walls_vs_diagonal,
                    "eps_independence": s.eps_independence, "homotopy": s.homotopy,
                })) }),
            )),
        ),
    ]
}

pub fn stage_cone(cfg: &RunConfig) -> Result<(bool, Value)> {
    let (tr, js) = crate::cone::demo_point(cfg.cone_order)?;
    let ok = tr.axioms_ok
        && tr.j_matches_exponential
        && tr.reconstruction_on_cone
        && tr.round_trip_ok
        && tr.tau_identity_ok
        && tr.off_cone_detected
        && tr.off_cone_first_degree == Some(1)
        && tr.v_factor_ok;
    Ok((ok, json!({ "transcript": tr, "order": cfg.cone_order, "axioms": js["axioms"] })))
}

pub fn stage_oracle(cfg: &RunConfig) -> Result<(bool, Value)> {
    let rep = crate::hyper::ode_oracle(cfg.oracle_draws, cfg.seed, cfg.precision)?;
    let ok = rep.closed_form < 1e-10 && rep.series_vs_ode < 1e-10;
    Ok((ok, serde_json::to_value(&rep).unwrap_or(Value::Null)))
}

type StageOut = Vec<(String, f64, Result<(bool, Value)>)>;

fn timed(name: &str, f: impl FnOnce() -> Result<(bool, Value)>) -> (String, f64, Result<(bool, Value)>) {
    let t = Instant::now();
    let r = f();
    (name.into(), t.elapsed().as_secs_f64(), r)
}

fn exact_group(cfg: &RunConfig) -> StageOut {
    let mut out: StageOut = vec![timed("chow", || stage_chow(cfg))];
    let t = Instant::now();
    match exact_runs(cfg) {
        Ok(runs) => {
            let secs = t.elapsed().as_secs_f64();
            out.push(("abelianize".into(), secs, Ok(stage_abelianize(&runs))));
            out.push(timed("anti_invariance", || stage_anti(cfg, &runs)));
            out.push(timed("bigness", || stage_bigness(&runs)));
        }
        Err(e) => {
            // anti-invariance failures surface here, from the descent step
            let msg = e.to_string();
            out.push(("abelianize".into(), t.elapsed().as_secs_f64(), Err(e)));
            for n in ["anti_invariance", "bigness"] {
                out.push((n.into(), 0.0, Err(FlopError::Consistency(format!("skipped: {msg}")))));
            }
        }
    }
    out.push(timed("pairing", || stage_pairing(cfg)));
    out
}

fn numeric_group(cfg: &RunConfig) -> StageOut {
    let t = Instant::now();
    let rep = run_continuation(cfg.k, cfg.n, &cfg.numeric());
    let secs = t.elapsed().as_secs_f64();
    let mut out: StageOut = continuation_stages(&rep).into_iter().map(|(n, r)| (n, secs, r)).collect();
    out.push(timed("ode_oracle", || stage_oracle(cfg)));
    out
}

fn cone_group(cfg: &RunConfig) -> StageOut {
    vec![timed("cone", || stage_cone(cfg))]
}

/// Runs every stage. With workers > 1 the three independent groups run on scoped threads;
/// the report order is fixed either way.
pub fn verify_all(cfg: &RunConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let t0 = Instant::now();
    let groups: Vec<fn(&RunConfig) -> StageOut> = vec![exact_group, numeric_group, cone_group];
    let results: Vec<StageOut> = if cfg.workers > 1 {
        std::thread::scope(|s| {
            let handles: Vec<_> = groups.iter().map(|g| s.spawn(move || g(cfg))).collect();
            handles.into_iter().map(|h| h.join().expect("stage thread panicked")).collect()
        })
    } else {
        groups.iter().map(|g| g(cfg)).collect()
    };
    let stages = results
        .into_iter()
        .flatten()
        .map(|(n, t, r)| StageResult::from(&n, t, r))
        .collect();
    Ok(VerifyReport { param_stamp: cfg.param_stamp(), stages, seconds: t0.elapsed().as_secs_f64() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// What `emit` can write.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    IfunPlus,
    IfunMinus,
    U,
}

impl std::str::FromStr for Selector {
    type Err = FlopError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ifun-plus" => Ok(Selector::IfunPlus),
            "ifun-minus" => Ok(Selector::IfunMinus),
            "U" | "u" => Ok(Selector::U),
            o => Err(FlopError::Contract(format!("unknown selector {o:?}; expected ifun-plus, ifun-minus or U"))),
        }
    }
}

/// Coefficient table of the nonabelian series: one row per (degree, x exponents, log y power, fixed point).
/// Values are exact rational functions of z.
pub fn emit_ifun(cfg: &RunConfig, side: Side, fmt: Format) -> Result<String> {
    cfg.validate()?;
    let eq = Equiv::generic(cfg.k, cfg.n, cfg.param_seed);
    let m = NonabelianModule::new(side, eq.clone())?;
    let ab = formula_a(&m, cfg.trunc())?;
    let names = eq.layout.names();
    let nm = |i: usize| names[i].clone();
    let labels: Vec<String> = m
        .fixed
        .points
        .iter()
        .map(|p| p.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(""))
        .collect();
    let nx = ab.ig.spec.vars.len() - 2;
    match fmt {
        Format::Csv => {
            let mut s = String::from("d,");
            for j in 0..nx {
                s.push_str(&format!("x{},", j + 1));
            }
            s.push_str("logy,point,numerator,denominator\n");
            for (key, c) in &ab.ig.terms {
                for (j, v) in c.0.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    let v = v.normalized();
                    s.push_str(&format!("{},", key[0]));
                    for e in &key[2..] {
                        s.push_str(&format!("{e},"));
                    }
                    s.push_str(&format!(
                        "{},{},\"{}\",\"{}\"\n",
                        key[1],
                        labels[j],
                        v.numer().fmt_with(&nm),
                        v.denom().fmt_with(&nm)
                    ));
                }
            }
            Ok(s)
        }
        Format::Json => {
            let terms: Vec<Value> = ab
                .ig
                .terms
                .iter()
                .map(|(key, c)| {
                    let vals: Vec<Value> = c.0.iter().map(|v| crate::exact::ratfn_json(v, &names)).collect();
                    json!({ "key": key, "values": vals })
                })
                .collect();
            let v = json!({
                "param_stamp": cfg.param_stamp(),
                "side": side.label(),
                "vars": ab.ig.spec.vars.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
                "points": labels,
                "terms": terms,
            });
            Ok(serde_json::to_string_pretty(&v).unwrap_or_default())
        }
    }
}

/// U at each z sample with the stamp; no timings, so output is byte-stable.
pub fn emit_u(cfg: &RunConfig, rep: &ContinuationReport, fmt: Format) -> Result<String> {
    match fmt {
        Format::Json => {
            let v = json!({
                "param_stamp": cfg.param_stamp(),
                "precision": rep.precision,
                "samples": rep.samples.iter().map(|s| json!({
                    "z": s.z,
                    "condition": s.condition,
                    "U": s.u.iter().map(|r| r.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            });
            Ok(serde_json::to_string_pretty(&v).unwrap_or_default())
        }
        Format::Csv => {
            let mut s = String::from("z,row,col,re,im\n");
            for smp in &rep.samples {
                for (i, r) in smp.u.iter().enumerate() {
                    for (j, (a, b)) in r.iter().enumerate() {
                        s.push_str(&format!("\"{}\",{},{},{:e},{:e}\n", smp.z, i, j, a, b));
                    }
                }
            }
            Ok(s)
        }
    }
}

/// Cache of continuation reports keyed by the param stamp.
pub struct Cache {
    pub dir: PathBuf,
}

impl Cache {
    pub const ENV: &'static str = "FLOPCTL_CACHE";

    pub fn from_env() -> Option<Cache> {
        std::env::var_os(Self::ENV).map(|d| Cache { dir: PathBuf::from(d) })
    }

    fn path(&self, cfg: &RunConfig) -> PathBuf {
        self.dir.join(format!("continuation-{}-{}-{}.json", cfg.k, cfg.n, cfg.stamp_key()))
    }

    pub fn load(&self, cfg: &RunConfig) -> Option<ContinuationReport> {
        let s = std::fs::read_to_string(self.path(cfg)).ok()?;
        serde_json::from_str(&s).ok()
    }

    pub fn store(&self, cfg: &RunConfig, rep: &ContinuationReport) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let s = serde_json::to_string(rep).map_err(|e| FlopError::Consistency(e.to_string()))?;
        std::fs::write(self.path(cfg), s)?;
        Ok(())
    }
}

/// Continuation report from the cache if present, else computed (and cached when a cache is set).
/// With `cached_only`, a missing entry is an error that says how to produce it.
pub fn continuation_cached(cfg: &RunConfig, cache: Option<&Cache>, cached_only: bool) -> Result<ContinuationReport> {
    if let Some(c) = cache {
        if let Some(r) = c.load(cfg) {
            return Ok(r);
        }
    }
    if cached_only {
        return Err(FlopError::Contract(format!(
            "no cached continuation for k={} n={} (stamp {}); run `flopctl continue` with {} set first",
            cfg.k,
            cfg.n,
            cfg.stamp_key(),
            Cache::ENV
        )));
    }
    let r = run_continuation(cfg.k, cfg.n, &cfg.numeric())?;
    if let Some(c) = cache {
        c.store(cfg, &r)?;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_validation() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let bad = RunConfig { k: 3, n: 3, ..RunConfig::default() };
        assert_eq!(bad.validate().unwrap_err().exit_code(), 2);
        let parsed = RunConfig::from_json_str(r#"{"k":1,"n":2,"dq":2}"#).unwrap();
        assert_eq!((parsed.k, parsed.n, parsed.dq, parsed.logy), (1, 2, 2, 3));
        assert!(RunConfig::from_json_str(r#"{"k":"x"}"#).is_err());
        assert_eq!(c.stamp_key(), RunConfig::default().stamp_key());
        let w = RunConfig { workers: 4, ..RunConfig::default() };
        assert_eq!(w.stamp_key(), c.stamp_key());
    }

    #[test]
    fn exact_stages_k1() {
        let cfg = RunConfig { k: 1, n: 2, dq: 2, logy: 2, x: 1, ..RunConfig::default() };
        assert!(stage_chow(&cfg).unwrap().0);
        let runs = exact_runs(&cfg).unwrap();
        assert!(stage_abelianize(&runs).0);
        assert!(stage_anti(&cfg, &runs).unwrap().0);
        assert!(stage_bigness(&runs).unwrap().0);
        assert!(stage_pairing(&cfg).unwrap().0);
    }

    #[test]
    fn emit_is_deterministic() {
        let cfg = RunConfig { k: 1, n: 2, dq: 1, logy: 1, x: 1, ..RunConfig::default() };
        let a = emit_ifun(&cfg, Side::Minus, Format::Csv).unwrap();
        let b = emit_ifun(&cfg, Side::Minus, Format::Csv).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("d,x1,logy,point,numerator,denominator\n"));
        let j = emit_ifun(&cfg, Side::Plus, Format::Json).unwrap();
        assert!(j.contains("param_stamp"));
    }
}
