use crate::exact::Rat;
use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use std::cell::{Cell, RefCell};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar field used by the numeric layer: f64 or the multiprecision wrapper.
pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn from_i64(x: i64) -> Self;
    fn from_rat(r: &Rat) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn pi() -> Self;
    /// Relative size of one unit in the last place.
    fn epsilon() -> f64;
    fn zero() -> Self {
        Self::from_i64(0)
    }
    fn one() -> Self {
        Self::from_i64(1)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_i64(x: i64) -> Self {
        x as f64
    }
    fn from_rat(r: &Rat) -> Self {
        crate::exact::rat::rat_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn epsilon() -> f64 {
        f64::EPSILON
    }
}

thread_local! {
    static PREC: Cell<usize> = const { Cell::new(128) };
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

const RM: RoundingMode = RoundingMode::ToEven;

/// Current working precision in bits for [`Mp`] on this thread.
pub fn precision() -> usize {
    PREC.with(|p| p.get())
}

/// Run `f` with the given mantissa precision, restoring the old one afterwards.
pub fn with_precision<T>(bits: usize, f: impl FnOnce() -> T) -> T {
    struct Guard(usize);
    impl Drop for Guard {
        fn drop(&mut self) {
            PREC.with(|p| p.set(self.0));
        }
    }
    let _g = Guard(PREC.with(|p| p.replace(bits)));
    f()
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Multiprecision real backed by astro-float, precision taken from the thread setting.
#[derive(Clone, Debug)]
pub struct Mp(pub BigFloat);

impl Mp {
    fn parse_int(s: &str) -> BigFloat {
        let p = precision();
        with_cc(|cc| BigFloat::parse(s, Radix::Dec, p, RM, cc))
    }
}

impl PartialEq for Mp {
    fn eq(&self, o: &Self) -> bool {
        self.0.cmp(&o.0) == Some(0)
    }
}

impl PartialOrd for Mp {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        self.0.cmp(&o.0).map(|c| c.cmp(&0))
    }
}

impl Add for Mp {
    type Output = Mp;
    fn add(self, o: Mp) -> Mp {
        Mp(self.0.add(&o.0, precision(), RM))
    }
}
impl Sub for Mp {
    type Output = Mp;
    fn sub(self, o: Mp) -> Mp {
        Mp(self.0.sub(&o.0, precision(), RM))
    }
}
impl Mul for Mp {
    type Output = Mp;
    fn mul(self, o: Mp) -> Mp {
        Mp(self.0.mul(&o.0, precision(), RM))
    }
}
impl Div for Mp {
    type Output = Mp;
    fn div(self, o: Mp) -> Mp {
        Mp(self.0.div(&o.0, precision(), RM))
    }
}
impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(self.0.neg())
    }
}

impl Real for Mp {
    fn from_f64(x: f64) -> Self {
        Mp(BigFloat::from_f64(x, precision()))
    }
    fn from_i64(x: i64) -> Self {
        Mp(BigFloat::from_i64(x, precision()))
    }
    fn from_rat(r: &Rat) -> Self {
        let n = Self::parse_int(&r.numer().to_string());
        let d = Self::parse_int(&r.denom().to_string());
        Mp(n.div(&d, precision(), RM))
    }
    fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        let s = format!("{}", self.0);
        s.parse::<f64>().unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Mp(self.0.abs())
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.sqrt(precision(), RM))
    }
    fn exp(&self) -> Self {
        let p = precision();
        Mp(with_cc(|cc| self.0.exp(p, RM, cc)))
    }
    fn ln(&self) -> Self {
        let p = precision();
        Mp(with_cc(|cc| self.0.ln(p, RM, cc)))
    }
    fn sin(&self) -> Self {
        let p = precision();
        Mp(with_cc(|cc| self.0.sin(p, RM, cc)))
    }
    fn cos(&self) -> Self {
        let p = precision();
        Mp(with_cc(|cc| self.0.cos(p, RM, cc)))
    }
    fn pi() -> Self {
        let p = precision();
        Mp(with_cc(|cc| cc.pi(p, RM)))
    }
    fn epsilon() -> f64 {
        2f64.powi(-(precision() as i32))
    }
}

/// Complex number over a [`Real`].
#[derive(Clone, Debug, PartialEq)]
pub struct Cx<R> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Cx<R> {
    pub fn new(re: R, im: R) -> Self {
        Cx { re, im }
    }
    pub fn real(re: R) -> Self {
        Cx { re, im: R::zero() }
    }
    pub fn zero() -> Self {
        Self::real(R::zero())
    }
    pub fn one() -> Self {
        Self::real(R::one())
    }
    pub fn i() -> Self {
        Cx { re: R::zero(), im: R::one() }
    }
    pub fn from_f64(re: f64, im: f64) -> Self {
        Cx { re: R::from_f64(re), im: R::from_f64(im) }
    }
    pub fn from_rat(r: &Rat) -> Self {
        Self::real(R::from_rat(r))
    }
    pub fn from_i64(x: i64) -> Self {
        Self::real(R::from_i64(x))
    }
    /// i * pi * t
    pub fn i_pi(t: &Rat) -> Self {
        Cx { re: R::zero(), im: R::pi() * R::from_rat(t) }
    }
    pub fn add(&self, o: &Self) -> Self {
        Cx { re: self.re.clone() + o.re.clone(), im: self.im.clone() + o.im.clone() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        Cx { re: self.re.clone() - o.re.clone(), im: self.im.clone() - o.im.clone() }
    }
    pub fn mul(&self, o: &Self) -> Self {
        Cx {
            re: self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            im: self.re.clone() * o.im.clone() + self.im.clone() * o.re.clone(),
        }
    }
    pub fn scale(&self, r: &R) -> Self {
        Cx { re: self.re.clone() * r.clone(), im: self.im.clone() * r.clone() }
    }
    pub fn neg(&self) -> Self {
        Cx { re: -self.re.clone(), im: -self.im.clone() }
    }
    pub fn conj(&self) -> Self {
        Cx { re: self.re.clone(), im: -self.im.clone() }
    }
    pub fn norm_sqr(&self) -> R {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }
    pub fn abs(&self) -> R {
        self.norm_sqr().sqrt()
    }
    pub fn abs_f64(&self) -> f64 {
        let a = self.re.to_f64();
        let b = self.im.to_f64();
        a.hypot(b)
    }
    pub fn inv(&self) -> Self {
        let d = self.norm_sqr();
        Cx { re: self.re.clone() / d.clone(), im: -self.im.clone() / d }
    }
    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Cx { re: m.clone() * self.im.cos(), im: m * self.im.sin() }
    }
    pub fn powi(&self, e: u32) -> Self {
        let mut r = Self::one();
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        r
    }
    pub fn is_zero(&self) -> bool {
        self.re == R::zero() && self.im == R::zero()
    }
    pub fn to_c64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn mp_basics() {
        with_precision(128, || {
            let two = Mp::from_i64(2);
            let r = two.sqrt();
            let back = r.clone() * r;
            assert!((back - Mp::from_i64(2)).abs().to_f64() < 1e-35);
            let third = Mp::from_rat(&(rat(1) / rat(3)));
            assert!((third.to_f64() - 1.0 / 3.0).abs() < 1e-15);
            let e = Cx::<Mp>::i_pi(&rat(1)).exp();
            assert!((e.re.to_f64() + 1.0).abs() < 1e-30 && e.im.to_f64().abs() < 1e-30);
        });
        assert_eq!(precision(), 128);
        with_precision(256, || assert!(Mp::epsilon() < 1e-70));
    }

    #[test]
    fn complex_ops() {
        let a = Cx::<f64>::from_f64(1.0, 2.0);
        let b = a.inv().mul(&a);
        assert!((b.re - 1.0).abs() < 1e-15 && b.im.abs() < 1e-15);
        assert!((a.powi(3).re - (-11.0)).abs() < 1e-12);
    }
}
