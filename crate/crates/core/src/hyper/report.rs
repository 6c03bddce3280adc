//! One-call continuation runs: connection matrices at each z sample, the property
//! checks, residual tables, and the scalar ODE oracles.

use super::cmat::{self, CMat};
use super::connection::{degree_defect, symplectic_defect, weyl_defect, Engine, ResidualRow};
use super::jfun::HyperParams;
use super::real::{with_precision, Cx, Mp, Real};
use crate::chow::params::generic_values;
use crate::chow::Side;
use crate::error::{FlopError, Result};
use crate::exact::rat::{parse_rat, rat_to_f64, rat_to_string};
use crate::exact::{rat, ratq, Rat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NumericConfig {
    pub precision: usize,
    pub max_precision: usize,
    pub tol_rel: f64,
    /// eps as a decimal or fraction string
    pub eps: String,
    /// z samples as "a+bi" strings with rational parts
    pub z_samples: Vec<String>,
    pub param_seed: u64,
    pub logy: u32,
    pub x: u32,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            precision: 128,
            max_precision: 512,
            tol_rel: 1e-8,
            eps: "1/10".into(),
            z_samples: vec!["1".into(), "1+2i".into()],
            param_seed: 7,
            logy: 3,
            x: 2,
        }
    }
}

/// Parse "a", "a+bi", "a-bi", "bi" with rational or decimal parts.
pub fn parse_complex(s: &str) -> Result<(Rat, Rat)> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || FlopError::Contract(format!("cannot parse complex number '{s}'"));
    let num = |x: &str| -> Result<Rat> {
        if x.is_empty() || x == "+" {
            Ok(rat(1))
        } else if x == "-" {
            Ok(rat(-1))
        } else {
            parse_rat(x).ok_or_else(bad)
        }
    };
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not leading
        let cut = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').map(|(i, _)| i).last();
        match cut {
            Some(i) => Ok((num(&body[..i])?, num(&body[i..])?)),
            None => Ok((rat(0), num(body)?)),
        }
    } else {
        Ok((num(&t)?, rat(0)))
    }
}

pub fn parse_eps(s: &str) -> Result<Rat> {
    let e = parse_rat(s).ok_or_else(|| FlopError::Contract(format!("cannot parse eps '{s}'")))?;
    if e <= rat(0) || e >= rat(1) {
        return Err(FlopError::Contract("eps must lie in (0, 1)".into()));
    }
    Ok(e)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZReport {
    pub z: String,
    pub condition: f64,
    pub weyl: f64,
    pub symplectic_t: f64,
    pub symplectic_g: f64,
    pub degree_t: f64,
    pub degree_g: f64,
    pub anti_subspace: f64,
    pub walls_vs_diagonal: f64,
    pub basepoint: f64,
    pub eps_independence: f64,
    pub homotopy: f64,
    /// |U - U_T| when k = 1, else None
    pub u_vs_ut: Option<f64>,
    pub gamma: Vec<ResidualRow>,
    pub delta_same_u: Vec<ResidualRow>,
    pub delta_twisted: Vec<ResidualRow>,
    pub u: Vec<Vec<(f64, f64)>>,
}

fn worst(rows: &[ResidualRow]) -> f64 {
    rows.iter().map(|r| r.rel).fold(0.0, f64::max)
}

impl ZReport {
    pub fn properties_max(&self) -> f64 {
        let mut v = [
            self.weyl,
            self.symplectic_t,
            self.symplectic_g,
            self.degree_t,
            self.degree_g,
            self.anti_subspace,
            self.walls_vs_diagonal,
            self.basepoint,
            self.eps_independence,
            self.homotopy,
        ]
        .iter()
        .fold(0.0f64, |a, &b| a.max(b));
        if let Some(x) = self.u_vs_ut {
            v = v.max(x);
        }
        v
    }
    pub fn gamma_max(&self) -> f64 {
        worst(&self.gamma)
    }
    pub fn delta_max(&self) -> f64 {
        worst(&self.delta_same_u)
    }
    pub fn delta_twisted_max(&self) -> f64 {
        worst(&self.delta_twisted)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContinuationReport {
    pub k: usize,
    pub n: usize,
    pub precision: usize,
    pub lam: Vec<String>,
    pub sig: Vec<String>,
    pub eps: String,
    pub tol_rel: f64,
    pub samples: Vec<ZReport>,
    pub seconds: f64,
}

impl ContinuationReport {
    pub fn gamma_ok(&self) -> bool {
        self.samples.iter().all(|s| s.gamma_max() < self.tol_rel)
    }
    pub fn delta_ok(&self) -> bool {
        self.samples.iter().all(|s| s.delta_max() < self.tol_rel)
    }
    pub fn properties_ok(&self) -> bool {
        self.samples.iter().all(|s| s.properties_max() < self.tol_rel)
    }
}

fn neg(z: &(Rat, Rat)) -> (Rat, Rat) {
    (-z.0.clone(), -z.1.clone())
}

fn sample<R: Real>(k: usize, n: usize, lam: &[Rat], sig: &[Rat], z: (Rat, Rat), eps: &Rat, cfg: &NumericConfig) -> Result<ZReport> {
    let e: Engine<R> = Engine::new(k, n, lam.to_vec(), sig.to_vec(), z.clone(), eps.clone());
    let (ut, condition) = e.u_t()?;
    let en = e.with_z(neg(&z));
    let (ut_n, _) = en.u_t()?;
    let e2 = e.scaled(&rat(2));
    let (ut_2, _) = e2.u_t()?;
    let (ug, anti) = e.assemble_u(&ut);
    let (ug_n, _) = en.assemble_u(&ut_n);
    let (ug_2, _) = e2.assemble_u(&ut_2);
    let symplectic_t = symplectic_defect(&ut, &ut_n, &e.abelian_euler(0)?, &e.abelian_euler(k)?);
    let symplectic_g = symplectic_defect(&ug, &ug_n, &e.grass_euler(Side::Plus)?, &e.grass_euler(Side::Minus)?);
    // t = 2 is exact in binary arithmetic, so t = 3 is checked as well
    let e3 = e.scaled(&rat(3));
    let (ut_3, _) = e3.u_t()?;
    let (ug_3, _) = e3.assemble_u(&ut_3);
    let mono = e.to_monomial(&ut)?;
    let degree_t = degree_defect(k, n, &mono, &e2.to_monomial(&ut_2)?, &rat(2))
        .max(degree_defect(k, n, &mono, &e3.to_monomial(&ut_3)?, &rat(3)));
    let degree_g = grass_degree_defect(&e, &ug, &e2, &ug_2, 2)?.max(grass_degree_defect(&e, &ug, &e3, &ug_3, 3)?);
    let walls = e.u_t_walls()?;
    let tau = ratq(1, 4);
    let (ub, _) = e.u_t_at(&e.place_gamma_ext(&tau), &e.place_minus_shift(&tau))?;
    let other_eps = if *eps == ratq(1, 20) { ratq(1, 10) } else { ratq(1, 20) };
    let (ue, _) = e.with_eps(other_eps).u_t()?;
    let (uh1, _) = e.u_t_at(&e.place_gamma(&ratq(1, 16)), &e.place_minus_start())?;
    let (uh2, _) = e.u_t_at(&e.place_gamma(&ratq(-1, 16)), &e.place_minus_start())?;
    let homotopy = cmat::rel_diff(&uh1, &ut).max(cmat::rel_diff(&uh2, &ut));
    let gamma = e.residuals(&ug, &e.place_gamma(&rat(0)), &e.place_minus_start(), cfg.logy, cfg.x)?;
    let delta_same_u = e.residuals(&ug, &e.place_delta(), &e.place_minus_delta(), cfg.logy, cfg.x)?;
    let delta_twisted = e.residuals(&e.delta_twist(&ug), &e.place_delta(), &e.place_minus_delta(), cfg.logy, cfg.x)?;
    Ok(ZReport {
        z: format!("{}+{}i", rat_to_string(&z.0), rat_to_string(&z.1)),
        condition,
        weyl: weyl_defect(&e, &ut),
        symplectic_t,
        symplectic_g,
        degree_t,
        degree_g,
        anti_subspace: anti,
        walls_vs_diagonal: cmat::rel_diff(&walls, &ut),
        basepoint: cmat::rel_diff(&ub, &ut),
        eps_independence: cmat::rel_diff(&ue, &ut),
        homotopy,
        u_vs_ut: if k == 1 { Some(cmat::rel_diff(&ug, &ut)) } else { None },
        gamma,
        delta_same_u,
        delta_twisted,
        u: cmat::to_f64(&ug),
    })
}

/// Degree check for U in the nonabelian basis {sum (+-H_i), P_j}.
fn grass_degree_defect<R: Real>(e: &Engine<R>, ug: &CMat<R>, e2: &Engine<R>, ug2: &CMat<R>, t: i64) -> Result<f64> {
    let to_basis = |eng: &Engine<R>, u: &CMat<R>| -> Result<CMat<R>> {
        let mp = basis_matrix(eng, Side::Plus)?;
        let mm = basis_matrix(eng, Side::Minus)?;
        let (mi, _) = cmat::inverse(&mm)?;
        Ok(cmat::mul(&cmat::mul(&mi, u), &mp))
    };
    let a = to_basis(e, ug)?;
    let b = to_basis(e2, ug2)?;
    let m = crate::chow::NonabelianModule::new(Side::Plus, e.equiv())?;
    let deg: Vec<i32> = m.degrees.iter().map(|&d| d as i32).collect();
    let mut expect = a.clone();
    for r in 0..a.len() {
        for c in 0..a.len() {
            let p = deg[c] - deg[r];
            let f = if p >= 0 { R::from_i64(t.pow(p as u32)) } else { R::one() / R::from_i64(t.pow((-p) as u32)) };
            expect[r][c] = a[r][c].scale(&f);
        }
    }
    Ok(cmat::rel_diff(&b, &expect))
}

fn basis_matrix<R: Real>(e: &Engine<R>, side: Side) -> Result<CMat<R>> {
    let m = crate::chow::NonabelianModule::new(side, e.equiv())?;
    m.eval_matrix()
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    x.as_constant()
                        .map(|c| Cx::from_rat(&c))
                        .ok_or_else(|| FlopError::Numeric("basis value is not a number".into()))
                })
                .collect()
        })
        .collect()
}

/// Run at the configured precision, doubling on property or gamma-residual failure.
/// The delta residual with the same U is reported but does not trigger escalation.
pub fn run_continuation(k: usize, n: usize, cfg: &NumericConfig) -> Result<ContinuationReport> {
    if k == 0 || k >= n {
        return Err(FlopError::Contract(format!("need 0 < k < n, got k={k} n={n}")));
    }
    if cfg.precision < 64 {
        return Err(FlopError::Contract("precision must be at least 64 bits".into()));
    }
    let eps = parse_eps(&cfg.eps)?;
    let zs: Vec<(Rat, Rat)> = cfg.z_samples.iter().map(|s| parse_complex(s)).collect::<Result<_>>()?;
    let (lam, sig) = generic_values(n, cfg.param_seed);
    let mut prec = cfg.precision;
    loop {
        let t0 = Instant::now();
        let samples: Result<Vec<ZReport>> = with_precision(prec, || {
            zs.iter().map(|z| sample::<Mp>(k, n, &lam, &sig, z.clone(), &eps, cfg)).collect()
        });
        let rep = ContinuationReport {
            k,
            n,
            precision: prec,
            lam: lam.iter().map(rat_to_string).collect(),
            sig: sig.iter().map(rat_to_string).collect(),
            eps: rat_to_string(&eps),
            tol_rel: cfg.tol_rel,
            samples: samples?,
            seconds: t0.elapsed().as_secs_f64(),
        };
        if (rep.gamma_ok() && rep.properties_ok()) || prec * 2 > cfg.max_precision {
            return Ok(rep);
        }
        prec *= 2;
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleReport {
    /// worst relative error of (1+y)^beta after continuation, n = 1
    pub closed_form: f64,
    /// worst relative error between ODE continuation and direct series inside the disk
    pub series_vs_ode: f64,
    pub draws: usize,
}

/// n = 1, alpha = 0: J = (1+y)^beta. Continue from y = 1/10 to y = 10 and compare.
/// Then random parameters: continue inside the disk and compare with the series.
pub fn ode_oracle(draws: usize, seed: u64, precision: usize) -> Result<OracleReport> {
    with_precision(precision, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut closed = 0f64;
        for t in 0..8 {
            let beta = if t == 0 {
                Cx::<Mp>::from_rat(&ratq(1, 2))
            } else {
                Cx::from_f64(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0))
            };
            let p = HyperParams::new(vec![Cx::zero()], vec![beta.clone()]);
            let u0 = Cx::real(Mp::from_rat(&ratq(1, 10)).ln());
            let end = Cx::real(Mp::from_i64(10).ln());
            let j0 = p.series_jet(&u0, 1)?;
            let j1 = p.continue_along(&j0, &[end])?;
            let want = beta.mul(&Cx::real(Mp::from_i64(11).ln())).exp();
            closed = closed.max(j1.d[0].sub(&want).abs_f64() / want.abs_f64());
        }
        let mut worst = 0f64;
        for _ in 0..draws {
            let n = rng.gen_range(1..=4usize);
            let mut c = |zero: bool| -> Cx<Mp> {
                if zero {
                    Cx::zero()
                } else {
                    let im: f64 = rng.gen_range(0.1..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    Cx::from_f64(rng.gen_range(-3.0..3.0), im)
                }
            };
            let alpha: Vec<Cx<Mp>> = (0..n).map(|j| c(j == 0)).collect();
            let beta: Vec<Cx<Mp>> = (0..n).map(|_| c(false)).collect();
            let p = HyperParams::new(alpha, beta);
            let th0: f64 = rng.gen_range(-3.0..3.0);
            let th1: f64 = rng.gen_range(-3.0..3.0);
            let u0 = Cx::new(Mp::from_f64(0.1f64.ln()), Mp::from_f64(th0));
            let u1 = Cx::new(Mp::from_f64(0.5f64.ln()), Mp::from_f64(th1));
            let j0 = p.series_jet(&u0, n)?;
            let j1 = p.continue_along(&j0, &[u1.clone()])?;
            let js = p.series_jet(&u1, n)?;
            let scale = js.d.iter().map(|x| x.abs_f64()).fold(1e-300, f64::max);
            for r in 0..=n {
                worst = worst.max(j1.d[r].sub(&js.d[r]).abs_f64() / scale);
            }
        }
        Ok(OracleReport { closed_form: closed, series_vs_ode: worst, draws })
    })
}

pub fn eps_value(cfg: &NumericConfig) -> Result<f64> {
    Ok(rat_to_f64(&parse_eps(&cfg.eps)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1+2i").unwrap(), (rat(1), rat(2)));
        assert_eq!(parse_complex("-1/2-i").unwrap(), (ratq(-1, 2), rat(-1)));
        assert_eq!(parse_complex("3i").unwrap(), (rat(0), rat(3)));
        assert_eq!(parse_complex("0.5").unwrap(), (ratq(1, 2), rat(0)));
        assert!(parse_complex("x").is_err());
        assert!(parse_eps("1.5").is_err());
    }

    #[test]
    fn oracle_small() {
        let r = ode_oracle(10, 3, 128).unwrap();
        assert!(r.closed_form < 1e-10 && r.series_vs_ode < 1e-10, "{r:?}");
    }

    #[test]
    fn k1_degenerate_run() {
        let cfg = NumericConfig { logy: 2, x: 1, ..Default::default() };
        let rep = run_continuation(1, 2, &cfg).unwrap();
        for s in &rep.samples {
            assert!(s.u_vs_ut.unwrap() < 1e-20);
            assert!(s.properties_max() < 1e-8, "{s:?}");
            assert!(s.gamma_max() < 1e-8 && s.delta_max() < 1e-8);
        }
    }
}
