use super::rat::{rat, Rat};
use super::ratfn::{DivByZero, RatFn};
use super::series::ZLaurent;

fn series_mul(a: &[RatFn], b: &[RatFn], n: usize, nvars: usize) -> Vec<RatFn> {
    let mut out = vec![RatFn::zero(nvars); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j >= n {
                break;
            }
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Expansion of r in powers of 1/zvar: the top `nterms` coefficients, highest power first
/// in the sense that the returned Laurent object covers [top - nterms + 1, top].
/// Coefficients are free of zvar.
pub fn expand_in_inverse(r: &RatFn, zvar: usize, nterms: usize) -> Result<ZLaurent<RatFn>, DivByZero> {
    let nv = r.nvars;
    if r.is_zero() || nterms == 0 {
        return Ok(ZLaurent::zero());
    }
    let mut lead = RatFn::constant(nv, r.coeff.clone());
    let mut top: i32 = 0;
    // series in w = 1/z
    let mut s: Vec<RatFn> = vec![RatFn::zero(nv); nterms];
    s[0] = RatFn::one(nv);
    for (f, &e) in &r.factors {
        let cs = f.coeffs_in(zvar);
        let d = cs.len() - 1;
        if d == 0 {
            lead = lead.mul(&RatFn::from_poly(f).powi(e)?);
            continue;
        }
        let cd = RatFn::from_poly(&cs[d]);
        lead = lead.mul(&cd.powi(e)?);
        top += d as i32 * e;
        let mut u = vec![RatFn::zero(nv); nterms];
        for j in 1..=d {
            if j < nterms {
                u[j] = RatFn::from_poly(&cs[d - j]).div(&cd)?;
            }
        }
        // (1+u)^e = sum_r binom(e, r) u^r
        let mut acc = vec![RatFn::zero(nv); nterms];
        acc[0] = RatFn::one(nv);
        let mut upow = acc.clone();
        let mut b = Rat::from_integer(1.into());
        for rr in 1..nterms {
            upow = series_mul(&upow, &u, nterms, nv);
            b = b * (rat(e as i64) - rat(rr as i64 - 1)) / rat(rr as i64);
            for i in 0..nterms {
                if !upow[i].is_zero() {
                    acc[i] = acc[i].add(&upow[i].scale(&b));
                }
            }
        }
        s = series_mul(&s, &acc, nterms, nv);
    }
    let coeffs: Vec<RatFn> = s.iter().rev().map(|c| c.mul(&lead)).collect();
    Ok(ZLaurent { min_pow: top - nterms as i32 + 1, coeffs }.trimmed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::Poly;
    use crate::exact::rat::rat;

    #[test]
    fn geometric() {
        // 1/(z - a) = z^-1 + a z^-2 + a^2 z^-3
        let z = Poly::var(2, 1);
        let a = Poly::var(2, 0);
        let f = RatFn::from_poly(&z.sub(&a)).inv().unwrap();
        let l = expand_in_inverse(&f, 1, 3).unwrap();
        assert_eq!(l.min_pow, -3);
        assert!(l.get(-1).unwrap().eq_exact(&RatFn::one(2)));
        assert!(l.get(-2).unwrap().eq_exact(&RatFn::from_poly(&a)));
        assert!(l.get(-3).unwrap().eq_exact(&RatFn::from_poly(&a.mul(&a))));
        let g = RatFn::from_poly(&z.scale(&rat(2)));
        let l = expand_in_inverse(&g, 1, 2).unwrap();
        assert_eq!(l.max_pow(), 1);
    }
}
