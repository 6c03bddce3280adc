use super::rat::{factorial, Rat};
use super::ratfn::RatFn;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Minimal algebra interface for series coefficients.
pub trait Coeff: Clone + std::fmt::Debug {
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, r: &Rat) -> Self;
    fn neg(&self) -> Self {
        self.scale(&-Rat::from_integer(1.into()))
    }
    fn zero_like(&self) -> Self {
        self.scale(&Rat::zero())
    }
}

impl Coeff for Rat {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, r: &Rat) -> Self {
        self * r
    }
}

impl Coeff for RatFn {
    fn is_zero(&self) -> bool {
        RatFn::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        RatFn::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFn::mul(self, o)
    }
    fn scale(&self, r: &Rat) -> Self {
        RatFn::scale(self, r)
    }
}

/// Finite Laurent polynomial in z with coefficients c[0] z^min_pow + ...
#[derive(Clone, Debug)]
pub struct ZLaurent<T> {
    pub min_pow: i32,
    pub coeffs: Vec<T>,
}

impl<T: Coeff> ZLaurent<T> {
    pub fn zero() -> Self {
        ZLaurent { min_pow: 0, coeffs: vec![] }
    }
    pub fn mono(pow: i32, c: T) -> Self {
        ZLaurent { min_pow: pow, coeffs: vec![c] }.trimmed()
    }
    pub fn max_pow(&self) -> i32 {
        self.min_pow + self.coeffs.len() as i32 - 1
    }
    pub fn get(&self, p: i32) -> Option<&T> {
        let i = p - self.min_pow;
        if i < 0 {
            None
        } else {
            self.coeffs.get(i as usize)
        }
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    pub fn trimmed(mut self) -> Self {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            return ZLaurent { min_pow: 0, coeffs: vec![] };
        }
        self.coeffs.drain(..lead);
        self.min_pow += lead as i32;
        self
    }
    pub fn add(&self, o: &Self) -> Self {
        if self.coeffs.is_empty() {
            return o.clone();
        }
        if o.coeffs.is_empty() {
            return self.clone();
        }
        let lo = self.min_pow.min(o.min_pow);
        let hi = self.max_pow().max(o.max_pow());
        let z = self.coeffs[0].zero_like();
        let mut out = Vec::with_capacity((hi - lo + 1) as usize);
        for p in lo..=hi {
            let v = match (self.get(p), o.get(p)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => z.clone(),
            };
            out.push(v);
        }
        ZLaurent { min_pow: lo, coeffs: out }.trimmed()
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return ZLaurent::zero();
        }
        let z = self.coeffs[0].zero_like();
        let mut out = vec![z; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        ZLaurent { min_pow: self.min_pow + o.min_pow, coeffs: out }.trimmed()
    }
    pub fn scale(&self, r: &Rat) -> Self {
        ZLaurent { min_pow: self.min_pow, coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect() }.trimmed()
    }
}

impl<T: Coeff> Coeff for ZLaurent<T> {
    fn is_zero(&self) -> bool {
        ZLaurent::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        ZLaurent::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        ZLaurent::mul(self, o)
    }
    fn scale(&self, r: &Rat) -> Self {
        ZLaurent::scale(self, r)
    }
    fn zero_like(&self) -> Self {
        ZLaurent::zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Role {
    Novikov,
    LogY,
    X,
    Nil,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    SpecMismatch,
    UnknownVariable(String),
    NonLinear,
}

impl std::error::Error for SeriesError {}

impl std::fmt::Display for SeriesError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeriesError::SpecMismatch => write!(f, "series specs differ"),
            SeriesError::UnknownVariable(v) => write!(f, "unknown series variable {v}"),
            SeriesError::NonLinear => write!(f, "exponent is not z^-1 times a linear form"),
        }
    }
}

/// Named formal variables with roles and per-role total-degree bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSpec {
    pub vars: Vec<(String, Role)>,
    pub trunc: BTreeMap<Role, u32>,
}

impl SeriesSpec {
    pub fn new(vars: Vec<(String, Role)>, trunc: &[(Role, u32)]) -> Arc<SeriesSpec> {
        Arc::new(SeriesSpec { vars, trunc: trunc.iter().cloned().collect() })
    }
    pub fn index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|(n, _)| n == name)
    }
    pub fn bound(&self, r: Role) -> u32 {
        *self.trunc.get(&r).unwrap_or(&0)
    }
    pub fn within(&self, e: &[u32]) -> bool {
        let mut used: BTreeMap<Role, u32> = BTreeMap::new();
        for (i, (_, r)) in self.vars.iter().enumerate() {
            *used.entry(*r).or_insert(0) += e[i];
        }
        used.iter().all(|(r, d)| *d <= self.bound(*r))
    }
    /// All exponent vectors supported on `vars` (indices) within truncation.
    pub fn exponents_on(&self, vars: &[usize]) -> Vec<Vec<u32>> {
        let mut out = vec![vec![0u32; self.vars.len()]];
        for &v in vars {
            let mut next = Vec::new();
            for e in &out {
                let mut e2 = e.clone();
                loop {
                    if !self.within(&e2) {
                        break;
                    }
                    next.push(e2.clone());
                    e2[v] += 1;
                }
            }
            out = next;
        }
        out
    }
    pub fn with_bound(&self, r: Role, b: u32) -> Arc<SeriesSpec> {
        let mut s = self.clone();
        s.trunc.insert(r, b);
        Arc::new(s)
    }
}

/// Truncated multivariate series with arbitrary algebra coefficients.
#[derive(Clone, Debug)]
pub struct MultiSeries<V> {
    pub spec: Arc<SeriesSpec>,
    pub terms: BTreeMap<Vec<u32>, V>,
}

impl<V: Coeff> MultiSeries<V> {
    pub fn zero(spec: Arc<SeriesSpec>) -> Self {
        MultiSeries { spec, terms: BTreeMap::new() }
    }
    pub fn constant(spec: Arc<SeriesSpec>, c: V) -> Self {
        let mut s = MultiSeries::zero(spec.clone());
        s.add_term(vec![0; spec.vars.len()], c);
        s
    }
    pub fn add_term(&mut self, e: Vec<u32>, c: V) {
        if c.is_zero() || !self.spec.within(&e) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }
    pub fn coeff(&self, e: &[u32]) -> Option<&V> {
        self.terms.get(e)
    }
    fn check(&self, o: &Self) -> Result<(), SeriesError> {
        if self.spec != o.spec {
            Err(SeriesError::SpecMismatch)
        } else {
            Ok(())
        }
    }
    pub fn add(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check(o)?;
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        Ok(r)
    }
    pub fn mul(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check(o)?;
        let mut r = MultiSeries::zero(self.spec.clone());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                if self.spec.within(&e) {
                    r.add_term(e, c1.mul(c2));
                }
            }
        }
        Ok(r)
    }
    pub fn scale(&self, c: &V) -> Self {
        let mut r = MultiSeries::zero(self.spec.clone());
        for (e, x) in &self.terms {
            r.add_term(e.clone(), x.mul(c));
        }
        r
    }
    pub fn scale_rat(&self, c: &Rat) -> Self {
        let mut r = MultiSeries::zero(self.spec.clone());
        for (e, x) in &self.terms {
            r.add_term(e.clone(), x.scale(c));
        }
        r
    }
    pub fn map<W: Coeff>(&self, f: impl Fn(&V) -> W) -> MultiSeries<W> {
        let mut r = MultiSeries::zero(self.spec.clone());
        for (e, x) in &self.terms {
            r.add_term(e.clone(), f(x));
        }
        r
    }
    /// Formal derivative; the truncation bound of the variable's role drops by one.
    pub fn derivative(&self, name: &str) -> Result<Self, SeriesError> {
        let v = self.spec.index(name).ok_or_else(|| SeriesError::UnknownVariable(name.into()))?;
        let role = self.spec.vars[v].1;
        let b = self.spec.bound(role);
        let spec = self.spec.with_bound(role, b.saturating_sub(1));
        let mut r = MultiSeries::zero(spec);
        for (e, c) in &self.terms {
            if e[v] > 0 {
                let mut e2 = e.clone();
                e2[v] -= 1;
                r.add_term(e2, c.scale(&Rat::from_integer(e[v].into())));
            }
        }
        Ok(r)
    }
    /// Restrict to a (smaller) spec, dropping out-of-range terms.
    pub fn truncate_to(&self, spec: Arc<SeriesSpec>) -> Self {
        let mut r = MultiSeries::zero(spec);
        for (e, c) in &self.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }
    /// Set variables to zero.
    pub fn slice_zero(&self, vars: &[usize]) -> Self {
        let mut r = MultiSeries::zero(self.spec.clone());
        for (e, c) in &self.terms {
            if vars.iter().all(|&v| e[v] == 0) {
                r.add_term(e.clone(), c.clone());
            }
        }
        r
    }
    pub fn eq_with(&self, o: &Self, eq: impl Fn(&V, &V) -> bool) -> bool {
        if self.spec != o.spec {
            return false;
        }
        let keys: std::collections::BTreeSet<&Vec<u32>> = self.terms.keys().chain(o.terms.keys()).collect();
        keys.into_iter().all(|k| match (self.terms.get(k), o.terms.get(k)) {
            (Some(a), Some(b)) => eq(a, b),
            (Some(a), None) | (None, Some(a)) => a.is_zero(),
            _ => true,
        })
    }
}

/// exp(sum_v L_v * var_v) truncated, with L_v already containing any 1/z.
/// The coefficient of t^a is prod_v L_v^{a_v} / a_v!.
pub fn exp_linear<V: Coeff>(spec: Arc<SeriesSpec>, linear: &[(usize, V)], one: V) -> MultiSeries<V> {
    let vars: Vec<usize> = linear.iter().map(|(v, _)| *v).collect();
    let mut r = MultiSeries::zero(spec.clone());
    for e in spec.exponents_on(&vars) {
        let mut c = one.clone();
        let mut denom = Rat::from_integer(1.into());
        for (v, l) in linear {
            for _ in 0..e[*v] {
                c = c.mul(l);
            }
            denom *= factorial(e[*v]);
        }
        r.add_term(e, c.scale(&(Rat::from_integer(1.into()) / denom)));
    }
    r
}

/// exp_linear for Laurent-valued exponents: every L_v must be supported on z^{-1}.
pub fn exp_linear_z<T: Coeff>(
    spec: Arc<SeriesSpec>,
    linear: &[(usize, ZLaurent<T>)],
    one: T,
) -> Result<MultiSeries<ZLaurent<T>>, SeriesError> {
    for (v, l) in linear {
        if *v >= spec.vars.len() {
            return Err(SeriesError::UnknownVariable(format!("#{v}")));
        }
        if !l.is_zero() && (l.min_pow != -1 || l.coeffs.len() != 1) {
            return Err(SeriesError::NonLinear);
        }
    }
    Ok(exp_linear(spec, linear, ZLaurent::mono(0, one)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat;

    fn qspec(d: u32) -> Arc<SeriesSpec> {
        SeriesSpec::new(vec![("q".into(), Role::Novikov)], &[(Role::Novikov, d)])
    }

    #[test]
    fn difference_of_squares() {
        let s = qspec(2);
        let mut a = MultiSeries::constant(s.clone(), rat(1));
        a.add_term(vec![1], rat(1));
        let mut b = MultiSeries::constant(s.clone(), rat(1));
        b.add_term(vec![1], rat(-1));
        let p = a.mul(&b).unwrap();
        assert_eq!(p.terms.len(), 2);
        assert_eq!(p.coeff(&[2]), Some(&rat(-1)));
        let z = MultiSeries::zero(s);
        assert!(a.mul(&z).unwrap().terms.is_empty());
    }

    #[test]
    fn exp_inverse() {
        let s = SeriesSpec::new(vec![("l".into(), Role::LogY)], &[(Role::LogY, 4)]);
        let a = exp_linear(s.clone(), &[(0, rat(3))], rat(1));
        let b = exp_linear(s.clone(), &[(0, rat(-3))], rat(1));
        let p = a.mul(&b).unwrap();
        assert_eq!(p.terms.len(), 1);
        assert_eq!(p.coeff(&[0]), Some(&rat(1)));
    }

    #[test]
    fn exp_z_rejects_nonlinear() {
        let s = SeriesSpec::new(vec![("l".into(), Role::LogY)], &[(Role::LogY, 2)]);
        let bad = ZLaurent::mono(0, rat(1));
        assert_eq!(exp_linear_z(s, &[(0, bad)], rat(1)).unwrap_err(), SeriesError::NonLinear);
    }

    #[test]
    fn derivative_of_square() {
        let s = SeriesSpec::new(vec![("l".into(), Role::LogY)], &[(Role::LogY, 3)]);
        let mut a = MultiSeries::zero(s);
        a.add_term(vec![2], rat(1));
        let d = a.derivative("l").unwrap();
        assert_eq!(d.coeff(&[1]), Some(&rat(2)));
        assert!(a.derivative("m").is_err());
    }
}
