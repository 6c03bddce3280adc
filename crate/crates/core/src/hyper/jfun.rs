//! The scalar hypergeometric factor J(y) = sum_d a_d y^d and its continuation.
//!
//! Coordinates: u = log y, theta = d/du. J solves
//!   theta prod_j (alpha_j + theta) J = y (1 + theta) prod_j (beta_j - theta) J,
//! whose leading coefficient 1 - (-1)^n y vanishes at u = i pi (n + 2m).

use super::real::{Cx, Real};
use crate::error::{FlopError, Result};

#[derive(Clone, Debug)]
pub struct HyperParams<R> {
    pub alpha: Vec<Cx<R>>,
    pub beta: Vec<Cx<R>>,
}

/// Value and u-derivatives theta^r J for r = 0..d.len()-1 at the point u.
#[derive(Clone, Debug)]
pub struct Jet<R> {
    pub u: Cx<R>,
    pub d: Vec<Cx<R>>,
}

/// Largest |y| at which the power series is used directly.
pub const SERIES_RADIUS: f64 = 0.6;
/// Step length as a fraction of the distance to the nearest singular point.
const STEP_FRACTION: f64 = 0.4;
const MAX_TERMS: usize = 20000;

impl<R: Real> HyperParams<R> {
    pub fn new(alpha: Vec<Cx<R>>, beta: Vec<Cx<R>>) -> Self {
        assert_eq!(alpha.len(), beta.len());
        HyperParams { alpha, beta }
    }
    pub fn n(&self) -> usize {
        self.alpha.len()
    }
    /// The factor on the other side of the wall: alpha and beta exchanged.
    pub fn swapped(&self) -> Self {
        HyperParams { alpha: self.beta.clone(), beta: self.alpha.clone() }
    }

    /// Coefficients in theta of the two sides of the equation.
    pub fn ode_polys(&self) -> (Vec<Cx<R>>, Vec<Cx<R>>) {
        let mut p = vec![Cx::zero(), Cx::one()];
        for a in &self.alpha {
            p = poly_mul_linear(&p, a, &Cx::one());
        }
        let mut q = vec![Cx::one(), Cx::one()];
        for b in &self.beta {
            q = poly_mul_linear(&q, b, &Cx::from_i64(-1));
        }
        (p, q)
    }

    /// Series coefficient a_d by the ratio recursion.
    pub fn coeffs(&self, upto: usize) -> Vec<Cx<R>> {
        let mut a = vec![Cx::one()];
        for d in 1..=upto {
            a.push(a[d - 1].mul(&self.ratio(d)));
        }
        a
    }

    fn ratio(&self, d: usize) -> Cx<R> {
        let mut num = Cx::one();
        let mut den = Cx::one();
        let dm1 = Cx::from_i64(d as i64 - 1);
        let dd = Cx::from_i64(d as i64);
        for (a, b) in self.alpha.iter().zip(&self.beta) {
            num = num.mul(&b.sub(&dm1));
            den = den.mul(&a.add(&dd));
        }
        num.div(&den)
    }

    /// Direct summation with derivatives up to `order`, for |e^u| <= SERIES_RADIUS.
    pub fn series_jet(&self, u: &Cx<R>, order: usize) -> Result<Jet<R>> {
        let y = u.exp();
        let ya = y.abs_f64();
        if ya > SERIES_RADIUS {
            return Err(FlopError::Numeric(format!("|y| = {ya} too close to the unit circle for the series")));
        }
        let tol = R::epsilon() * 1e-3;
        let mut sums = vec![Cx::zero(); order + 1];
        let mut term = Cx::one(); // a_d y^d
        sums[0] = Cx::one();
        let mut small = 0;
        for d in 1..MAX_TERMS {
            term = term.mul(&self.ratio(d)).mul(&y);
            let dr = R::from_i64(d as i64);
            let mut w = term.clone();
            let mut mag = 0f64;
            for s in sums.iter_mut() {
                *s = s.add(&w);
                mag = mag.max(w.abs_f64());
                w = w.scale(&dr);
            }
            let scale = sums[0].abs_f64().max(1.0);
            // geometric tail once the ratio settles below |y|-ish
            if mag * (d as f64 + 1.0).powi(order as i32) / (1.0 - ya.max(0.05)) < tol * scale && d > 2 * self.n() {
                small += 1;
                if small >= 3 {
                    return Ok(Jet { u: u.clone(), d: sums });
                }
            } else {
                small = 0;
            }
            if term.is_zero() && d > 2 * self.n() {
                return Ok(Jet { u: u.clone(), d: sums });
            }
        }
        Err(FlopError::Numeric("series did not converge".into()))
    }

    /// Taylor coefficients c_m of J(u0 + t) from a jet of order >= n at u0.
    fn taylor(&self, jet: &Jet<R>, p: &[Cx<R>], q: &[Cx<R>], mut need: impl FnMut(usize, &[Cx<R>]) -> bool) -> Result<Vec<Cx<R>>> {
        let n = self.n();
        let y0 = jet.u.exp();
        let pivot = p[n + 1].sub(&y0.mul(&q[n + 1]));
        if pivot.abs_f64() < 1e-30 {
            return Err(FlopError::Numeric("continuation hit the singular point".into()));
        }
        let mut invf: Vec<R> = vec![R::one()];
        let mut c: Vec<Cx<R>> = Vec::new();
        for r in 0..=n {
            if r > 0 {
                let next = invf[r - 1].clone() / R::from_i64(r as i64);
                invf.push(next);
            }
            c.push(jet.d[r].scale(&invf[r]));
        }
        let ff = |m: usize, r: usize| -> R {
            let mut x = R::one();
            for t in 1..=r {
                x = x * R::from_i64((m + t) as i64);
            }
            x
        };
        let mut g: Vec<Cx<R>> = Vec::new();
        let mut m = 0;
        loop {
            if !need(m, &c) {
                break;
            }
            if c.len() > MAX_TERMS {
                return Err(FlopError::Numeric("Taylor recursion did not settle".into()));
            }
            while invf.len() <= m + n + 2 {
                let l = invf.len();
                let next = invf[l - 1].clone() / R::from_i64(l as i64);
                invf.push(next);
            }
            let mut conv = Cx::zero();
            for j in 0..m {
                conv = conv.add(&g[j].scale(&invf[m - j]));
            }
            let mut gp = Cx::zero();
            let mut lhs = Cx::zero();
            for r in 0..=n {
                let f = ff(m, r);
                let cv = c[m + r].scale(&f);
                gp = gp.add(&q[r].mul(&cv));
                lhs = lhs.add(&p[r].mul(&cv));
            }
            let ftop = ff(m, n + 1);
            let rhs = y0.mul(&conv.add(&gp)).sub(&lhs);
            let cn = rhs.div(&pivot.scale(&ftop));
            g.push(gp.add(&q[n + 1].mul(&cn).scale(&ftop)));
            c.push(cn);
            m += 1;
        }
        Ok(c)
    }

    /// Extend a jet (order >= n) to derivatives up to `order` at the same point.
    pub fn extend_jet(&self, jet: &Jet<R>, order: usize) -> Result<Jet<R>> {
        let n = self.n();
        if order <= n {
            return Ok(Jet { u: jet.u.clone(), d: jet.d[..=order].to_vec() });
        }
        let (p, q) = self.ode_polys();
        let c = self.taylor(jet, &p, &q, |_, c| c.len() <= order)?;
        let mut f = R::one();
        let mut d = Vec::new();
        for (r, cr) in c.iter().take(order + 1).enumerate() {
            if r > 0 {
                f = f * R::from_i64(r as i64);
            }
            d.push(cr.scale(&f));
        }
        Ok(Jet { u: jet.u.clone(), d })
    }

    /// One Taylor step from `jet` by the complex increment h.
    fn step(&self, jet: &Jet<R>, h: &Cx<R>, p: &[Cx<R>], q: &[Cx<R>]) -> Result<Jet<R>> {
        let n = self.n();
        let ha = h.abs_f64();
        let tol = R::epsilon() * 1e-3;
        let scale = jet.d.iter().map(|x| x.abs_f64()).fold(1e-300, f64::max);
        let mut small = 0;
        let c = self.taylor(jet, p, q, |m, c| {
            if m == 0 {
                return true;
            }
            let last = c[c.len() - 1].abs_f64() * ha.powi((c.len() - 1) as i32) * (c.len() as f64).powi(n as i32);
            if last < tol * scale {
                small += 1;
            } else {
                small = 0;
            }
            small < 4
        })?;
        // evaluate derivatives 0..n at t = h by Horner on each derivative series
        let mut d = Vec::with_capacity(n + 1);
        for r in 0..=n {
            let mut acc = Cx::zero();
            for m in (r..c.len()).rev() {
                // coefficient of t^{m-r} in J^{(r)} is c_m m!/(m-r)!
                let mut f = R::one();
                for t in (m - r + 1)..=m {
                    f = f * R::from_i64(t as i64);
                }
                acc = acc.mul(h).add(&c[m].scale(&f));
            }
            d.push(acc);
        }
        Ok(Jet { u: jet.u.add(h), d })
    }

    /// Continue a jet of order n along straight segments through the given vertices.
    pub fn continue_along(&self, start: &Jet<R>, vertices: &[Cx<R>]) -> Result<Jet<R>> {
        let n = self.n();
        let (p, q) = self.ode_polys();
        let mut jet = Jet { u: start.u.clone(), d: start.d[..=n].to_vec() };
        for target in vertices {
            let mut guard = 0;
            loop {
                let diff = target.sub(&jet.u);
                let len = diff.abs_f64();
                if len == 0.0 {
                    break;
                }
                let dist = singular_distance(&jet.u, n);
                if dist < 1e-10 {
                    let (a, b) = jet.u.to_c64();
                    return Err(FlopError::Numeric(format!("path runs into a singular point near {a}+{b}i")));
                }
                let hmax = STEP_FRACTION * dist;
                let last = len <= hmax;
                let h = if last { diff } else { diff.scale(&R::from_f64(hmax / len)) };
                jet = self.step(&jet, &h, &p, &q)?;
                if last {
                    jet.u = target.clone();
                    break;
                }
                guard += 1;
                if guard > 100000 {
                    return Err(FlopError::Numeric("step size underflow".into()));
                }
            }
        }
        Ok(jet)
    }
}

/// Distance in the u-plane to the nearest point i pi (n + 2m).
pub fn singular_distance<R: Real>(u: &Cx<R>, n: usize) -> f64 {
    let (re, im) = u.to_c64();
    let pi = std::f64::consts::PI;
    let t = (im / pi - n as f64) / 2.0;
    let nearest = n as f64 + 2.0 * t.round();
    re.hypot(im - pi * nearest)
}

/// (c0 + c1 theta) * poly, with c0 = a.
fn poly_mul_linear<R: Real>(p: &[Cx<R>], a: &Cx<R>, c1: &Cx<R>) -> Vec<Cx<R>> {
    let mut out = vec![Cx::zero(); p.len() + 1];
    for (i, x) in p.iter().enumerate() {
        out[i] = out[i].add(&x.mul(a));
        out[i + 1] = out[i + 1].add(&x.mul(c1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratq};
    use crate::hyper::real::{with_precision, Mp};

    fn sqrt_params<R: Real>() -> HyperParams<R> {
        HyperParams::new(vec![Cx::zero()], vec![Cx::from_rat(&ratq(1, 2))])
    }

    #[test]
    fn series_closed_form() {
        let p = sqrt_params::<f64>();
        let u = Cx::from_f64(0.21f64.ln(), 0.0);
        let j = p.series_jet(&u, 2).unwrap();
        assert!((j.d[0].re - 1.1).abs() < 1e-14);
        // theta J = y/2 (1+y)^{-1/2}
        assert!((j.d[1].re - 0.105 / 1.1).abs() < 1e-14);
        let far = Cx::from_f64(0.0, 0.0);
        assert!(p.series_jet(&far, 1).is_err());
    }

    #[test]
    fn continuation_matches_closed_form_mp() {
        with_precision(128, || {
            let p = sqrt_params::<Mp>();
            let u0 = Cx::<Mp>::real(Mp::from_rat(&ratq(1, 10)).ln());
            let j0 = p.series_jet(&u0, 1).unwrap();
            // out to y = 10 along the real axis: (1+y)^{1/2} = sqrt(11)
            let end = Cx::real(Mp::from_i64(10).ln());
            let j1 = p.continue_along(&j0, &[end]).unwrap();
            let want = Mp::from_i64(11).sqrt();
            assert!((j1.d[0].re.clone() - want).abs().to_f64() < 1e-30);
            assert!(j1.d[0].im.abs().to_f64() < 1e-30);
        });
    }

    #[test]
    fn monodromy_around_minus_one() {
        let p = sqrt_params::<f64>();
        let u0 = Cx::from_f64(-0.7, 0.0);
        let j0 = p.series_jet(&u0, 1).unwrap();
        let pi = std::f64::consts::PI;
        let loop_ = [Cx::from_f64(0.7, 0.0), Cx::from_f64(0.7, 2.0 * pi - 0.5), Cx::from_f64(-0.7, 2.0 * pi - 0.5), u0.clone()];
        let j1 = p.continue_along(&j0, &loop_).unwrap();
        assert!((j1.d[0].re + j0.d[0].re).abs() < 1e-10, "{:?} vs {:?}", j1.d[0], j0.d[0]);
        assert!(j1.d[0].im.abs() < 1e-10);
    }

    #[test]
    fn extend_matches_series() {
        let p: HyperParams<f64> = HyperParams::new(
            vec![Cx::zero(), Cx::from_f64(0.3, -0.2), Cx::from_f64(-1.7, 0.4)],
            vec![Cx::from_f64(0.9, 0.1), Cx::from_f64(2.2, 0.0), Cx::from_f64(-0.35, 1.0)],
        );
        let u = Cx::from_f64(-1.5, 0.8);
        let lo = p.series_jet(&u, 3).unwrap();
        let hi = p.series_jet(&u, 7).unwrap();
        let ext = p.extend_jet(&lo, 7).unwrap();
        for r in 0..=7 {
            let e = ext.d[r].sub(&hi.d[r]).abs_f64() / hi.d[r].abs_f64().max(1.0);
            assert!(e < 1e-11, "r={r} err={e}");
        }
        let _ = rat(0);
    }
}
