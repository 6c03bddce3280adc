//! Polynomials in nilpotent generators, cut off above a fixed total degree.
//! Laurent series in z with such coefficients are plain maps from z-power to element.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::exact::{Mono, Poly, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncAlgebra {
    pub names: Vec<String>,
    pub order: u32,
}

/// Element of a truncated algebra. Always stored already truncated.
pub type Elt = Poly;

/// Laurent polynomial in z with truncated-algebra coefficients.
pub type ZSer = BTreeMap<i32, Elt>;

impl TruncAlgebra {
    pub fn new(names: &[&str], order: u32) -> Self {
        TruncAlgebra { names: names.iter().map(|s| s.to_string()).collect(), order }
    }

    pub fn with_order(&self, order: u32) -> Self {
        TruncAlgebra { names: self.names.clone(), order }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn zero(&self) -> Elt {
        Poly::zero(self.nvars())
    }

    pub fn one(&self) -> Elt {
        Poly::one(self.nvars())
    }

    pub fn constant(&self, c: Rat) -> Elt {
        Poly::constant(self.nvars(), c)
    }

    pub fn gen(&self, i: usize) -> Elt {
        self.trunc(&Poly::var(self.nvars(), i))
    }

    pub fn trunc(&self, p: &Poly) -> Elt {
        let mut out = self.zero();
        for (m, c) in &p.terms {
            if m.degree() <= self.order {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    pub fn mul(&self, a: &Elt, b: &Elt) -> Elt {
        let mut out = self.zero();
        for (ma, ca) in &a.terms {
            let da = ma.degree();
            if da > self.order {
                continue;
            }
            for (mb, cb) in &b.terms {
                if da + mb.degree() <= self.order {
                    out.add_term(ma.mul(mb), ca * cb);
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &Elt, e: u32) -> Elt {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Lowest total degree present; None for zero.
    pub fn valuation(p: &Elt) -> Option<u32> {
        p.terms.keys().map(|m| m.degree()).min()
    }

    pub fn is_nilpotent(p: &Elt) -> bool {
        Self::constant_term(p).is_zero()
    }

    pub fn constant_term(p: &Elt) -> Rat {
        p.terms.get(&Mono::one(p.nvars)).cloned().unwrap_or_else(Rat::zero)
    }

    /// Substitute generator i of the source ring by images[i]; images live here.
    pub fn compose(&self, p: &Poly, images: &[Elt]) -> Elt {
        assert_eq!(p.nvars, images.len(), "compose arity");
        let mut powers: Vec<Vec<Elt>> = images.iter().map(|x| vec![self.one(), x.clone()]).collect();
        let mut out = self.zero();
        for (m, c) in &p.terms {
            let mut term = self.constant(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = self.mul(powers[i].last().unwrap(), &images[i]);
                    powers[i].push(next);
                }
                term = self.mul(&term, &powers[i][e as usize]);
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn derivative(&self, p: &Elt, i: usize) -> Elt {
        p.derivative(i)
    }

    // z-series helpers

    pub fn z_add(&self, a: &ZSer, b: &ZSer) -> ZSer {
        let mut out = a.clone();
        for (k, v) in b {
            let e = out.entry(*k).or_insert_with(|| self.zero());
            *e = e.add(v);
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn z_sub(&self, a: &ZSer, b: &ZSer) -> ZSer {
        self.z_add(a, &self.z_scale(b, &-Rat::one()))
    }

    pub fn z_scale(&self, a: &ZSer, c: &Rat) -> ZSer {
        a.iter()
            .map(|(k, v)| (*k, v.scale(c)))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    pub fn z_mul(&self, a: &ZSer, b: &ZSer) -> ZSer {
        let mut out = ZSer::new();
        for (ka, va) in a {
            for (kb, vb) in b {
                let p = self.mul(va, vb);
                if p.is_zero() {
                    continue;
                }
                let e = out.entry(ka + kb).or_insert_with(|| self.zero());
                *e = e.add(&p);
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn z_shift(a: &ZSer, by: i32) -> ZSer {
        a.iter().map(|(k, v)| (k + by, v.clone())).collect()
    }

    pub fn z_trunc(&self, a: &ZSer) -> ZSer {
        a.iter()
            .map(|(k, v)| (*k, self.trunc(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    pub fn z_compose(&self, a: &ZSer, images: &[Elt]) -> ZSer {
        a.iter()
            .map(|(k, v)| (*k, self.compose(v, images)))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    pub fn z_const(&self, c: Rat, power: i32) -> ZSer {
        let mut s = ZSer::new();
        if !c.is_zero() {
            s.insert(power, self.constant(c));
        }
        s
    }
}

pub type ZVec = Vec<ZSer>;
pub type ZMat = Vec<Vec<ZSer>>;

pub fn zvec_is_zero(v: &ZVec) -> bool {
    v.iter().all(|s| s.is_empty())
}

/// Smallest nilpotent degree appearing anywhere in v.
pub fn zvec_valuation(v: &ZVec) -> Option<u32> {
    v.iter()
        .flat_map(|s| s.values())
        .filter_map(TruncAlgebra::valuation)
        .min()
}

impl TruncAlgebra {
    pub fn mat_vec(&self, m: &ZMat, v: &ZVec) -> ZVec {
        m.iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(ZSer::new(), |acc, (a, b)| self.z_add(&acc, &self.z_mul(a, b)))
            })
            .collect()
    }

    pub fn mat_mul(&self, a: &ZMat, b: &ZMat) -> ZMat {
        let n = b.first().map_or(0, |r| r.len());
        a.iter()
            .map(|row| {
                (0..n)
                    .map(|j| {
                        row.iter()
                            .enumerate()
                            .fold(ZSer::new(), |acc, (l, x)| self.z_add(&acc, &self.z_mul(x, &b[l][j])))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn mat_identity(&self, n: usize) -> ZMat {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { self.z_const(Rat::one(), 0) } else { ZSer::new() }).collect())
            .collect()
    }

    /// True when m is the identity modulo nilpotents.
    pub fn mat_is_unipotent(m: &ZMat) -> bool {
        m.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, s)| {
                s.iter().all(|(k, v)| {
                    let c = Self::constant_term(v);
                    if i == j && *k == 0 {
                        c.is_one()
                    } else {
                        c.is_zero()
                    }
                })
            })
        })
    }

    /// Inverse of a unipotent matrix by the finite Neumann series.
    pub fn mat_inverse_unipotent(&self, m: &ZMat) -> Option<ZMat> {
        if !Self::mat_is_unipotent(m) {
            return None;
        }
        let n = m.len();
        let id = self.mat_identity(n);
        let e: ZMat = (0..n).map(|i| (0..n).map(|j| self.z_sub(&id[i][j], &m[i][j])).collect()).collect();
        // (Id - e)^{-1} = sum e^j
        let mut acc = id.clone();
        let mut pw = id;
        for _ in 0..self.order {
            pw = self.mat_mul(&pw, &e);
            if pw.iter().all(|r| r.iter().all(|s| s.is_empty())) {
                break;
            }
            acc = (0..n).map(|i| (0..n).map(|j| self.z_add(&acc[i][j], &pw[i][j])).collect()).collect();
        }
        Some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn truncation_kills_high_degree() {
        let a = TruncAlgebra::new(&["s", "e"], 3);
        let s = a.gen(0);
        assert!(a.pow(&s, 4).is_zero());
        assert_eq!(a.pow(&s, 3).total_degree(), 3);
        let e = a.gen(1);
        assert!(a.mul(&a.pow(&s, 2), &a.pow(&e, 2)).is_zero());
    }

    #[test]
    fn compose_substitutes() {
        let src = TruncAlgebra::new(&["t"], 5);
        let dst = TruncAlgebra::new(&["s"], 3);
        let t = src.gen(0);
        let p = src.pow(&t, 2).add(&t);
        let s = dst.gen(0);
        // t -> s + s^2 in (t + t^2) gives s + 2 s^2 + 2 s^3 + ...
        let img = s.add(&dst.pow(&s, 2));
        let got = dst.compose(&p, &[img]);
        let want = s
            .add(&dst.pow(&s, 2).scale(&rat(2)))
            .add(&dst.pow(&s, 3).scale(&rat(2)));
        assert_eq!(got, want);
    }

    #[test]
    fn unipotent_inverse() {
        let a = TruncAlgebra::new(&["s"], 4);
        let s = a.gen(0);
        let mut x = a.z_const(rat(1), 0);
        x.insert(-1, s.clone());
        x.insert(2, a.pow(&s, 2));
        let m = vec![vec![x]];
        let inv = a.mat_inverse_unipotent(&m).unwrap();
        let prod = a.mat_mul(&m, &inv);
        assert_eq!(prod, a.mat_identity(1));
        assert!(a.mat_inverse_unipotent(&vec![vec![a.z_const(rat(2), 0)]]).is_none());
    }
}
