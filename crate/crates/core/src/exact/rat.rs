use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratq(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else if let Some((a, b)) = s.split_once('.') {
        // decimal: sign, integer part, fraction digits
        if b.is_empty() || !b.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = a.starts_with('-');
        let int: BigInt = match a.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            t => t.parse().ok()?,
        };
        let frac: BigInt = b.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), b.len());
        let v = Rat::new(int * &den + frac, den);
        Some(if neg { -v } else { v })
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn factorial(m: u32) -> Rat {
    let mut f = BigInt::one();
    for i in 2..=m {
        f *= BigInt::from(i);
    }
    Rat::from_integer(f)
}

pub fn binom(n: u32, k: u32) -> Rat {
    if k > n {
        return Rat::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// sign of a rational as -1, 0, 1
pub fn sgn(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Exact scalars of Q(i), only used for phases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }
    pub fn one() -> Self {
        GaussRat { re: Rat::one(), im: Rat::zero() }
    }
    pub fn mul(&self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    /// e^{i pi m/2}-type phases: exp(i*pi*t) for t with 2t integer.
    pub fn exp_i_pi(t: &Rat) -> Option<GaussRat> {
        let two_t = t * rat(2);
        if !two_t.is_integer() {
            return None;
        }
        use num_integer::Integer;
        let m = two_t.to_integer().mod_floor(&BigInt::from(4));
        let m: i64 = m.try_into().ok()?;
        Some(match m {
            0 => GaussRat::new(rat(1), rat(0)),
            1 => GaussRat::new(rat(0), rat(1)),
            2 => GaussRat::new(rat(-1), rat(0)),
            _ => GaussRat::new(rat(0), rat(-1)),
        })
    }
    pub fn as_real(&self) -> Option<Rat> {
        if self.im.is_zero() {
            Some(self.re.clone())
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        let r = ratq(-6, 4);
        assert_eq!(rat_to_string(&r), "-3/2");
        assert_eq!(parse_rat("-3/2").unwrap(), r);
        assert!(parse_rat("1/0").is_none());
    }

    #[test]
    fn phases() {
        assert_eq!(GaussRat::exp_i_pi(&rat(3)).unwrap().as_real(), Some(rat(-1)));
        assert_eq!(GaussRat::exp_i_pi(&ratq(1, 2)).unwrap(), GaussRat::new(rat(0), rat(1)));
        assert!(GaussRat::exp_i_pi(&ratq(1, 3)).is_none());
        assert_eq!(binom(5, 2), rat(10));
    }
}
