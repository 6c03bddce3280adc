use crate::exact::{ratq, Poly, Rat, RatFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Variable layout: lambda_1..lambda_n, sigma_1..sigma_n, H_1..H_k, z (0-based internally).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub k: usize,
    pub n: usize,
}

impl Layout {
    pub fn nvars(&self) -> usize {
        2 * self.n + self.k + 1
    }
    pub fn lam(&self, j: usize) -> usize {
        j
    }
    pub fn sig(&self, j: usize) -> usize {
        self.n + j
    }
    pub fn h(&self, i: usize) -> usize {
        2 * self.n + i
    }
    pub fn z(&self) -> usize {
        2 * self.n + self.k
    }
    pub fn name(&self, v: usize) -> String {
        if v < self.n {
            format!("l{}", v + 1)
        } else if v < 2 * self.n {
            format!("s{}", v - self.n + 1)
        } else if v < 2 * self.n + self.k {
            format!("H{}", v - 2 * self.n + 1)
        } else {
            "z".into()
        }
    }
    pub fn names(&self) -> Vec<String> {
        (0..self.nvars()).map(|v| self.name(v)).collect()
    }
}

/// Equivariant parameters: either formal symbols or a fixed rational point.
#[derive(Clone, Debug, PartialEq)]
pub enum Params {
    Symbolic,
    Point { lam: Vec<Rat>, sig: Vec<Rat> },
}

#[derive(Clone, Debug)]
pub struct Equiv {
    pub layout: Layout,
    pub params: Params,
}

pub type EquivRef = Arc<Equiv>;

impl Equiv {
    pub fn symbolic(k: usize, n: usize) -> EquivRef {
        Arc::new(Equiv { layout: Layout { k, n }, params: Params::Symbolic })
    }
    pub fn point(k: usize, n: usize, lam: Vec<Rat>, sig: Vec<Rat>) -> EquivRef {
        assert_eq!(lam.len(), n);
        assert_eq!(sig.len(), n);
        Arc::new(Equiv { layout: Layout { k, n }, params: Params::Point { lam, sig } })
    }
    /// A seeded generic rational point: small-height fractions, pairwise distinct,
    /// with no integer differences among all 2n values.
    pub fn generic(k: usize, n: usize, seed: u64) -> EquivRef {
        let (lam, sig) = generic_values(n, seed);
        Equiv::point(k, n, lam, sig)
    }
    pub fn nvars(&self) -> usize {
        self.layout.nvars()
    }
    pub fn is_symbolic(&self) -> bool {
        matches!(self.params, Params::Symbolic)
    }
    pub fn lam(&self, j: usize) -> Poly {
        match &self.params {
            Params::Symbolic => Poly::var(self.nvars(), self.layout.lam(j)),
            Params::Point { lam, .. } => Poly::constant(self.nvars(), lam[j].clone()),
        }
    }
    pub fn sig(&self, j: usize) -> Poly {
        match &self.params {
            Params::Symbolic => Poly::var(self.nvars(), self.layout.sig(j)),
            Params::Point { sig, .. } => Poly::constant(self.nvars(), sig[j].clone()),
        }
    }
    pub fn h(&self, i: usize) -> Poly {
        Poly::var(self.nvars(), self.layout.h(i))
    }
    pub fn z(&self) -> Poly {
        Poly::var(self.nvars(), self.layout.z())
    }
    pub fn zero(&self) -> RatFn {
        RatFn::zero(self.nvars())
    }
    pub fn one(&self) -> RatFn {
        RatFn::one(self.nvars())
    }
    pub fn cst(&self, c: Rat) -> RatFn {
        RatFn::constant(self.nvars(), c)
    }
    pub fn pcst(&self, c: Rat) -> Poly {
        Poly::constant(self.nvars(), c)
    }
    /// Numeric values of lambda and sigma, if specialized.
    pub fn values(&self) -> Option<(&[Rat], &[Rat])> {
        match &self.params {
            Params::Point { lam, sig } => Some((lam, sig)),
            _ => None,
        }
    }
    /// A rational point at which to test nonvanishing of symbolic expressions.
    pub fn witness_point(&self, seed: u64) -> Vec<Rat> {
        let (l, s) = generic_values(self.layout.n, seed);
        let mut v = Vec::with_capacity(self.nvars());
        v.extend(l);
        v.extend(s);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
        for _ in 0..self.layout.k {
            v.push(ratq(rng.gen_range(-40..40), rng.gen_range(7..23)));
        }
        v.push(ratq(rng.gen_range(11..37), rng.gen_range(5..13)));
        v
    }
}

pub fn generic_values(n: usize, seed: u64) -> (Vec<Rat>, Vec<Rat>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let vals: Vec<Rat> = (0..2 * n)
            .map(|_| {
                let d = rng.gen_range(3..14i64);
                let mut num = rng.gen_range(-3 * d..3 * d);
                if num % d == 0 {
                    num += 1;
                }
                ratq(num, d)
            })
            .collect();
        let ok = (0..2 * n).all(|a| (0..a).all(|b| !(&vals[a] - &vals[b]).is_integer()));
        if ok {
            return (vals[..n].to_vec(), vals[n..].to_vec());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_points_are_reproducible() {
        let a = generic_values(4, 7);
        let b = generic_values(4, 7);
        assert_eq!(a, b);
        let l = Layout { k: 2, n: 3 };
        assert_eq!(l.name(l.z()), "z");
        assert_eq!(l.name(l.h(1)), "H2");
        assert_eq!(l.name(l.sig(0)), "s1");
    }
}
