use super::params::Equiv;
use crate::exact::Poly;

/// Permutation of 0..k as the image vector: w(i) = p[i].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(k: usize) -> Perm {
        Perm((0..k).collect())
    }
    pub fn transposition(k: usize, a: usize, b: usize) -> Perm {
        let mut p = Perm::identity(k);
        p.0.swap(a, b);
        p
    }
    pub fn sign(&self) -> i32 {
        let mut s = 1;
        let p = &self.0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    s = -s;
                }
            }
        }
        s
    }
    /// (self o other)(i) = self(other(i))
    pub fn compose(&self, o: &Perm) -> Perm {
        Perm(o.0.iter().map(|&i| self.0[i]).collect())
    }
    pub fn inverse(&self) -> Perm {
        let mut q = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            q[j] = i;
        }
        Perm(q)
    }
    pub fn all(k: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        fn rec(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Perm>) {
            if cur.len() == k {
                out.push(Perm(cur.clone()));
                return;
            }
            for x in 0..k {
                if !cur.contains(&x) {
                    cur.push(x);
                    rec(k, cur, out);
                    cur.pop();
                }
            }
        }
        rec(k, &mut cur, &mut out);
        out
    }
}

/// Positive roots e_a - e_b stored as (a, b); the standard choice has a < b.
#[derive(Clone, Debug)]
pub struct RootData {
    pub k: usize,
    pub roots: Vec<(usize, usize)>,
}

impl RootData {
    pub fn standard(k: usize) -> RootData {
        let mut roots = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                roots.push((a, b));
            }
        }
        RootData { k, roots }
    }
    /// Standard set with the first root negated (used for the independence check).
    pub fn flipped_first(k: usize) -> RootData {
        let mut r = RootData::standard(k);
        if let Some(x) = r.roots.first_mut() {
            *x = (x.1, x.0);
        }
        r
    }
    pub fn count(&self) -> usize {
        self.roots.len()
    }
    /// Root as an integer vector.
    pub fn root_vec(&self, idx: usize) -> Vec<i64> {
        let (a, b) = self.roots[idx];
        let mut v = vec![0; self.k];
        v[a] += 1;
        v[b] -= 1;
        v
    }
    /// zeta = sum of positive roots.
    pub fn zeta(&self) -> Vec<i64> {
        let mut z = vec![0; self.k];
        for i in 0..self.count() {
            for (x, y) in z.iter_mut().zip(self.root_vec(i)) {
                *x += y;
            }
        }
        z
    }
    /// Coordinates of a weight in the chamber basis pr_i = eps * e_i.
    pub fn chamber_coords(v: &[i64], eps: i64) -> Vec<i64> {
        v.iter().map(|x| x * eps).collect()
    }
    /// (-1)^{a_i} = (-1)^{k-1} for the coordinates of zeta in the chamber basis.
    pub fn sign_identity_holds(&self, eps: i64) -> bool {
        let a = Self::chamber_coords(&self.zeta(), eps);
        a.iter().all(|x| (x - (self.k as i64 - 1)).rem_euclid(2) == 0)
    }
    /// Delta = prod over positive roots of c_1(L_rho) = H_a - H_b.
    pub fn delta(&self, eq: &Equiv) -> Poly {
        let mut d = Poly::one(eq.nvars());
        for &(a, b) in &self.roots {
            d = d.mul(&eq.h(a).sub(&eq.h(b)));
        }
        d
    }
    /// Sign relating this Delta to the standard Vandermonde prod_{a<b}(H_a - H_b).
    pub fn sign_vs_standard(&self) -> i32 {
        self.roots.iter().map(|&(a, b)| if a < b { 1 } else { -1 }).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perms() {
        assert_eq!(Perm::all(3).len(), 6);
        assert_eq!(Perm::transposition(3, 0, 2).sign(), -1);
        let p = Perm(vec![1, 2, 0]);
        assert_eq!(p.compose(&p.inverse()), Perm::identity(3));
    }

    #[test]
    fn sign_identity() {
        for k in 1..5 {
            let r = RootData::standard(k);
            assert_eq!(r.count(), k * (k - 1) / 2);
            assert!(r.sign_identity_holds(1));
            assert!(r.sign_identity_holds(-1));
        }
        assert_eq!(RootData::standard(3).zeta(), vec![2, 0, -2]);
    }
}
