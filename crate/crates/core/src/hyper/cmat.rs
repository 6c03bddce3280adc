//! Dense complex matrices over a [`Real`].

use super::real::{Cx, Real};
use crate::error::{FlopError, Result};

pub type CMat<R> = Vec<Vec<Cx<R>>>;

pub fn identity<R: Real>(n: usize) -> CMat<R> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Cx::one() } else { Cx::zero() }).collect()).collect()
}

pub fn mul<R: Real>(a: &CMat<R>, b: &CMat<R>) -> CMat<R> {
    let m = b[0].len();
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| row.iter().zip(b.iter()).fold(Cx::zero(), |acc, (x, brow)| acc.add(&x.mul(&brow[j]))))
                .collect()
        })
        .collect()
}

pub fn transpose<R: Real>(a: &CMat<R>) -> CMat<R> {
    let m = a[0].len();
    (0..m).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mul_vec<R: Real>(a: &CMat<R>, v: &[Cx<R>]) -> Vec<Cx<R>> {
    a.iter().map(|row| row.iter().zip(v).fold(Cx::zero(), |acc, (x, y)| acc.add(&x.mul(y)))).collect()
}

/// Inverse by Gauss-Jordan with partial pivoting; also returns a crude condition estimate
/// (max-norm of A times max-norm of A^{-1}).
pub fn inverse<R: Real>(a: &CMat<R>) -> Result<(CMat<R>, f64)> {
    let n = a.len();
    let mut m: CMat<R> = a.clone();
    let mut inv = identity::<R>(n);
    let scale = max_abs(a);
    for col in 0..n {
        let (piv, best) = (col..n)
            .map(|r| (r, m[r][col].abs_f64()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= scale * 1e-300 || best == 0.0 {
            return Err(FlopError::Numeric("singular matrix in connection solve".into()));
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].inv();
        for j in 0..n {
            m[col][j] = m[col][j].mul(&p);
            inv[col][j] = inv[col][j].mul(&p);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r][col].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..n {
                let t = m[col][j].mul(&f);
                m[r][j] = m[r][j].sub(&t);
                let t = inv[col][j].mul(&f);
                inv[r][j] = inv[r][j].sub(&t);
            }
        }
    }
    let cond = scale * max_abs(&inv);
    Ok((inv, cond))
}

pub fn max_abs<R: Real>(a: &CMat<R>) -> f64 {
    a.iter().flatten().map(|x| x.abs_f64()).fold(0.0, f64::max)
}

/// max |a - b| / max |b|
pub fn rel_diff<R: Real>(a: &CMat<R>, b: &CMat<R>) -> f64 {
    let mut d = 0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            d = d.max(x.sub(y).abs_f64());
        }
    }
    d / max_abs(b).max(1e-300)
}

pub fn vec_rel_diff<R: Real>(a: &[Cx<R>], b: &[Cx<R>]) -> f64 {
    let d = a.iter().zip(b).map(|(x, y)| x.sub(y).abs_f64()).fold(0.0, f64::max);
    let s = b.iter().map(|x| x.abs_f64()).fold(0.0, f64::max);
    d / s.max(1e-300)
}

pub fn to_f64<R: Real>(a: &CMat<R>) -> Vec<Vec<(f64, f64)>> {
    a.iter().map(|r| r.iter().map(|x| x.to_c64()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let a: CMat<f64> = vec![
            vec![Cx::from_f64(1.0, 1.0), Cx::from_f64(2.0, 0.0)],
            vec![Cx::from_f64(0.0, -1.0), Cx::from_f64(3.0, 0.5)],
        ];
        let (inv, cond) = inverse(&a).unwrap();
        assert!(rel_diff(&mul(&a, &inv), &identity(2)) < 1e-14);
        assert!(cond >= 1.0);
        let sing: CMat<f64> = vec![vec![Cx::one(), Cx::one()], vec![Cx::one(), Cx::one()]];
        assert!(inverse(&sing).is_err());
    }
}
