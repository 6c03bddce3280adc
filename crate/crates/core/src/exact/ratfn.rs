use super::poly::Poly;
use super::rat::{rat_to_string, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Rational function kept as coeff * prod f^e with monic (leading coefficient 1) factors.
/// Negative exponents are denominator factors. Factors are not guaranteed irreducible,
/// so the representation is not canonical; equality goes through subtraction.
#[derive(Clone, Debug)]
pub struct RatFn {
    pub nvars: usize,
    pub coeff: Rat,
    pub factors: BTreeMap<Poly, i32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivByZero;

impl RatFn {
    pub fn zero(nvars: usize) -> RatFn {
        RatFn { nvars, coeff: Rat::zero(), factors: BTreeMap::new() }
    }
    pub fn one(nvars: usize) -> RatFn {
        RatFn::constant(nvars, Rat::one())
    }
    pub fn constant(nvars: usize, c: Rat) -> RatFn {
        RatFn { nvars, coeff: c, factors: BTreeMap::new() }
    }
    pub fn from_poly(p: &Poly) -> RatFn {
        if let Some(c) = p.as_constant() {
            return RatFn::constant(p.nvars, c);
        }
        let (lc, m) = p.make_monic();
        let mut factors = BTreeMap::new();
        factors.insert(m, 1);
        RatFn { nvars: p.nvars, coeff: lc, factors }
    }
    pub fn from_factor_pow(p: &Poly, e: i32) -> Result<RatFn, DivByZero> {
        let f = RatFn::from_poly(p);
        f.powi(e)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }
    pub fn as_constant(&self) -> Option<Rat> {
        if self.coeff.is_zero() || self.factors.is_empty() {
            return Some(self.coeff.clone());
        }
        if !self.mixed() {
            return None;
        }
        let r = self.normalized();
        if r.factors.is_empty() {
            Some(r.coeff)
        } else {
            None
        }
    }
    pub fn is_polynomial(&self) -> bool {
        self.factors.values().all(|&e| e > 0) || (self.mixed() && self.normalized().factors.values().all(|&e| e > 0))
    }
    fn mixed(&self) -> bool {
        self.factors.values().any(|&e| e > 0) && self.factors.values().any(|&e| e < 0)
    }
    /// Cancel numerator factors against denominator factors. Sums are left unreduced.
    pub fn normalized(&self) -> RatFn {
        self.clone().reduce()
    }

    pub fn numer(&self) -> Poly {
        let mut p = Poly::constant(self.nvars, self.coeff.clone());
        for (f, &e) in &self.factors {
            if e > 0 {
                p = p.mul(&f.pow(e as u32));
            }
        }
        p
    }
    pub fn denom(&self) -> Poly {
        let mut p = Poly::one(self.nvars);
        for (f, &e) in &self.factors {
            if e < 0 {
                p = p.mul(&f.pow((-e) as u32));
            }
        }
        p
    }

    fn insert_factor(factors: &mut BTreeMap<Poly, i32>, f: Poly, e: i32) {
        if e == 0 {
            return;
        }
        let ent = factors.entry(f.clone()).or_insert(0);
        *ent += e;
        if *ent == 0 {
            factors.remove(&f);
        }
    }

    /// Cancel factors of opposite sign when one divides the other.
    fn reduce(mut self) -> RatFn {
        if self.coeff.is_zero() {
            self.factors.clear();
            return self;
        }
        loop {
            let mut action: Option<(Poly, Poly, Poly)> = None;
            'outer: for (f, &ef) in &self.factors {
                for (g, &eg) in &self.factors {
                    if (ef > 0) == (eg > 0) {
                        continue;
                    }
                    if g.total_degree() >= f.total_degree() {
                        continue;
                    }
                    if !may_divide(f, g) {
                        continue;
                    }
                    if let Some(q) = f.div_exact(g) {
                        action = Some((f.clone(), g.clone(), q));
                        break 'outer;
                    }
                }
            }
            match action {
                None => break,
                Some((f, g, q)) => {
                    let ef = self.factors[&f];
                    let eg = self.factors[&g];
                    let s = if ef > 0 { 1 } else { -1 };
                    Self::insert_factor(&mut self.factors, f, -s);
                    Self::insert_factor(&mut self.factors, g, s);
                    let _ = eg;
                    let qf = RatFn::from_poly(&q);
                    let qf = if s > 0 { qf } else { qf.inv_unchecked() };
                    self.coeff *= &qf.coeff;
                    for (h, e) in qf.factors {
                        Self::insert_factor(&mut self.factors, h, e);
                    }
                }
            }
        }
        self
    }

    fn inv_unchecked(&self) -> RatFn {
        RatFn {
            nvars: self.nvars,
            coeff: Rat::one() / &self.coeff,
            factors: self.factors.iter().map(|(f, e)| (f.clone(), -e)).collect(),
        }
    }

    pub fn inv(&self) -> Result<RatFn, DivByZero> {
        if self.is_zero() {
            return Err(DivByZero);
        }
        Ok(self.inv_unchecked())
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        if self.is_zero() || o.is_zero() {
            return RatFn::zero(self.nvars);
        }
        let mut r = self.clone();
        r.coeff *= &o.coeff;
        for (f, &e) in &o.factors {
            Self::insert_factor(&mut r.factors, f.clone(), e);
        }
        r
    }

    pub fn div(&self, o: &RatFn) -> Result<RatFn, DivByZero> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn scale(&self, c: &Rat) -> RatFn {
        if c.is_zero() {
            return RatFn::zero(self.nvars);
        }
        let mut r = self.clone();
        r.coeff *= c;
        r
    }

    pub fn neg(&self) -> RatFn {
        let mut r = self.clone();
        r.coeff = -r.coeff;
        r
    }

    pub fn powi(&self, e: i32) -> Result<RatFn, DivByZero> {
        if e < 0 {
            return self.inv()?.powi(-e);
        }
        if self.is_zero() {
            return Ok(if e == 0 { RatFn::one(self.nvars) } else { RatFn::zero(self.nvars) });
        }
        Ok(RatFn {
            nvars: self.nvars,
            coeff: num_traits::pow::pow(self.coeff.clone(), e as usize),
            factors: if e == 0 {
                BTreeMap::new()
            } else {
                self.factors.iter().map(|(f, x)| (f.clone(), x * e)).collect()
            },
        })
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.factors == o.factors {
            let c = &self.coeff + &o.coeff;
            if c.is_zero() {
                return RatFn::zero(self.nvars);
            }
            let mut r = self.clone();
            r.coeff = c;
            return r;
        }
        // common part: min exponent per factor (absent = 0)
        let mut common: BTreeMap<Poly, i32> = BTreeMap::new();
        let keys: std::collections::BTreeSet<&Poly> = self.factors.keys().chain(o.factors.keys()).collect();
        for f in &keys {
            let a = *self.factors.get(*f).unwrap_or(&0);
            let b = *o.factors.get(*f).unwrap_or(&0);
            let m = a.min(b);
            if m != 0 {
                common.insert((*f).clone(), m);
            }
        }
        let rest = |x: &RatFn| -> Poly {
            let mut p = Poly::constant(x.nvars, x.coeff.clone());
            for f in &keys {
                let a = *x.factors.get(*f).unwrap_or(&0);
                let m = *common.get(*f).unwrap_or(&0);
                let e = a - m;
                if e > 0 {
                    p = p.mul(&f.pow(e as u32));
                }
            }
            p
        };
        let s = rest(self).add(&rest(o));
        if s.is_zero() {
            return RatFn::zero(self.nvars);
        }
        let sf = RatFn::from_poly(&s);
        let mut r = RatFn { nvars: self.nvars, coeff: sf.coeff, factors: common };
        for (f, e) in sf.factors {
            Self::insert_factor(&mut r.factors, f, e);
        }
        r
    }

    /// Sum over a common denominator, expanding each numerator once instead of pairwise.
    pub fn sum(nvars: usize, items: &[RatFn]) -> RatFn {
        let items: Vec<&RatFn> = items.iter().filter(|x| !x.is_zero()).collect();
        match items.len() {
            0 => return RatFn::zero(nvars),
            1 => return items[0].clone(),
            2 => return items[0].add(items[1]),
            _ => {}
        }
        let mut common: BTreeMap<Poly, i32> = BTreeMap::new();
        let keys: std::collections::BTreeSet<&Poly> = items.iter().flat_map(|x| x.factors.keys()).collect();
        for f in &keys {
            let m = items.iter().map(|x| *x.factors.get(*f).unwrap_or(&0)).min().unwrap_or(0);
            if m != 0 {
                common.insert((*f).clone(), m);
            }
        }
        let mut s = Poly::zero(nvars);
        for x in &items {
            let mut p = Poly::constant(nvars, x.coeff.clone());
            for f in &keys {
                let e = *x.factors.get(*f).unwrap_or(&0) - *common.get(*f).unwrap_or(&0);
                if e > 0 {
                    p = p.mul(&f.pow(e as u32));
                }
            }
            s = s.add(&p);
        }
        if s.is_zero() {
            return RatFn::zero(nvars);
        }
        let sf = RatFn::from_poly(&s);
        let mut r = RatFn { nvars, coeff: sf.coeff, factors: common };
        for (f, e) in sf.factors {
            Self::insert_factor(&mut r.factors, f, e);
        }
        r
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        self.add(&o.neg())
    }

    pub fn eq_exact(&self, o: &RatFn) -> bool {
        if self.coeff == o.coeff && self.factors == o.factors {
            return true;
        }
        if self.is_zero() != o.is_zero() && (self.is_zero() || o.is_zero()) {
            return false;
        }
        self.sub(o).is_zero()
    }

    /// Substitute constants for some variables.
    pub fn eval_partial(&self, vals: &[(usize, Rat)]) -> Result<RatFn, DivByZero> {
        let mut r = RatFn::constant(self.nvars, self.coeff.clone());
        if r.is_zero() {
            return Ok(r);
        }
        for (f, &e) in &self.factors {
            let g = f.eval_partial(vals);
            if g.is_zero() {
                if e < 0 {
                    return Err(DivByZero);
                }
                return Ok(RatFn::zero(self.nvars));
            }
            r = r.mul(&RatFn::from_poly(&g).powi(e)?);
        }
        Ok(r)
    }

    /// Replace variable v by a polynomial q.
    pub fn subst(&self, v: usize, q: &Poly) -> Result<RatFn, DivByZero> {
        let mut r = RatFn::constant(self.nvars, self.coeff.clone());
        if r.is_zero() {
            return Ok(r);
        }
        for (f, &e) in &self.factors {
            let g = if f.uses_var(v) { f.subst(v, q) } else { f.clone() };
            if g.is_zero() {
                if e < 0 {
                    return Err(DivByZero);
                }
                return Ok(RatFn::zero(self.nvars));
            }
            r = r.mul(&RatFn::from_poly(&g).powi(e)?);
        }
        Ok(r)
    }

    pub fn eval(&self, vals: &[Rat]) -> Result<Rat, DivByZero> {
        let mut r = self.coeff.clone();
        if r.is_zero() {
            return Ok(r);
        }
        for (f, &e) in &self.factors {
            let x = f.eval(vals);
            if x.is_zero() {
                if e < 0 {
                    return Err(DivByZero);
                }
                return Ok(Rat::zero());
            }
            r *= num_traits::pow::pow(if e > 0 { x } else { Rat::one() / x }, e.unsigned_abs() as usize);
        }
        Ok(r)
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.factors.keys().any(|f| f.uses_var(v))
    }

    pub fn fmt_with(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (f, &e) in &self.factors {
            let s = format!("({})", f.fmt_with(names));
            let s = if e.abs() > 1 { format!("{}^{}", s, e.abs()) } else { s };
            if e > 0 {
                num.push(s)
            } else {
                den.push(s)
            }
        }
        let mut out = rat_to_string(&self.coeff);
        if !num.is_empty() {
            out = format!("{}*{}", out, num.join("*"));
        }
        if !den.is_empty() {
            out = format!("{}/({})", out, den.join("*"));
        }
        out
    }
}

impl PartialEq for RatFn {
    fn eq(&self, o: &RatFn) -> bool {
        self.eq_exact(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat;

    fn x() -> Poly {
        Poly::var(2, 0)
    }
    fn y() -> Poly {
        Poly::var(2, 1)
    }

    #[test]
    fn cancels_through_sum() {
        // 1/(x+1) - 1/(x+2) = 1/((x+1)(x+2))
        let one = Poly::one(2);
        let a = RatFn::from_poly(&x().add(&one)).inv().unwrap();
        let b = RatFn::from_poly(&x().add(&one.scale(&rat(2)))).inv().unwrap();
        let d = a.sub(&b);
        let expect = RatFn::from_poly(&x().add(&one).mul(&x().add(&one.scale(&rat(2))))).inv().unwrap();
        assert!(d.eq_exact(&expect));
    }

    #[test]
    fn composite_cancellation() {
        let p = x().mul(&x()).sub(&y().mul(&y()));
        let a = RatFn::from_poly(&p).mul(&RatFn::from_poly(&x().sub(&y())).inv().unwrap());
        assert_eq!(a.normalized().factors.len(), 1);
        assert!(a.eq_exact(&RatFn::from_poly(&x().add(&y()))));
    }

    #[test]
    fn sum_matches_pairwise() {
        let one = Poly::one(2);
        let items: Vec<RatFn> = (1..5)
            .map(|i| RatFn::from_poly(&x().add(&one.scale(&rat(i)))).inv().unwrap().mul(&RatFn::from_poly(&y())))
            .collect();
        let pair = items.iter().fold(RatFn::zero(2), |a, b| a.add(b));
        assert!(RatFn::sum(2, &items).eq_exact(&pair));
        assert!(RatFn::sum(2, &[]).is_zero());
    }

    #[test]
    fn eval_matches() {
        let a = RatFn::from_poly(&x().add(&y())).div(&RatFn::from_poly(&x())).unwrap();
        assert_eq!(a.eval(&[rat(2), rat(3)]).unwrap(), crate::exact::rat::ratq(5, 2));
        assert!(a.eval(&[rat(0), rat(3)]).is_err());
    }
}

/// Cheap necessary condition for g | f when g is monic linear: f vanishes on g = 0.
fn may_divide(f: &Poly, g: &Poly) -> bool {
    if g.total_degree() != 1 {
        return true;
    }
    let Some((lead, _)) = g.leading() else { return true };
    let Some(v) = lead.0.iter().position(|&e| e > 0) else { return true };
    // g = v + rest, rest free of v
    let rest = g.sub(&Poly::var(g.nvars, v));
    if rest.uses_var(v) {
        return true;
    }
    let root = rest.neg();
    if let Some(c) = root.as_constant() {
        f.eval_partial(&[(v, c)]).is_zero()
    } else {
        f.subst(v, &root).is_zero()
    }
}
