use super::rat::{rat, rat_to_string, Rat};
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector. Ordered graded-lex, with the highest variable index most significant
/// (so with the layout lambda < sigma < H < z, z dominates).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn one(nvars: usize) -> Mono {
        Mono(vec![0; nvars])
    }
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }
    pub fn mul(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
    pub fn divides(&self, o: &Mono) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }
    pub fn div(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for i in (0..self.0.len()).rev() {
            match self.0[i].cmp(&other.0[i]) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }
}

/// Sparse multivariate polynomial over Q.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly { nvars, terms: BTreeMap::new() }
    }
    pub fn constant(nvars: usize, c: Rat) -> Poly {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Mono::one(nvars), c);
        }
        p
    }
    pub fn one(nvars: usize) -> Poly {
        Poly::constant(nvars, Rat::one())
    }
    pub fn var(nvars: usize, i: usize) -> Poly {
        let mut m = Mono::one(nvars);
        m.0[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(m, Rat::one());
        p
    }
    pub fn monomial(nvars: usize, exps: &[u16], c: Rat) -> Poly {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Mono(exps.to_vec()), c);
        }
        p
    }
    /// sum_i c_i x_i + c0
    pub fn linear(nvars: usize, coeffs: &[(usize, Rat)], c0: Rat) -> Poly {
        let mut p = Poly::constant(nvars, c0);
        for (i, c) in coeffs {
            p.add_term(
                {
                    let mut m = Mono::one(nvars);
                    m.0[*i] += 1;
                    m
                },
                c.clone(),
            );
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().degree() == 0)
    }
    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            Some(Rat::zero())
        } else if self.is_constant() {
            Some(self.terms.values().next().unwrap().clone())
        } else {
            None
        }
    }
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }
    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v] as u32).max().unwrap_or(0)
    }
    pub fn leading(&self) -> Option<(&Mono, &Rat)> {
        self.terms.iter().next_back()
    }
    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.0[v] > 0)
    }

    pub fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= o.terms.len() { (self, o) } else { (o, self) };
        let mut r = big.clone();
        for (m, c) in &small.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }
    pub fn neg(&self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
    pub fn sub(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), -c);
        }
        r
    }
    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }
    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero(self.nvars);
        if self.is_zero() || o.is_zero() {
            return r;
        }
        if let Some(c) = o.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return o.scale(&c);
        }
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }
    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::one(self.nvars);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    pub fn derivative(&self, v: usize) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e > 0 {
                let mut m2 = m.clone();
                m2.0[v] -= 1;
                r.add_term(m2, c * rat(e as i64));
            }
        }
        r
    }

    /// Replace variable v by q.
    pub fn subst(&self, v: usize, q: &Poly) -> Poly {
        let maxe = self.degree_in(v);
        let mut pows = vec![Poly::one(self.nvars)];
        for i in 1..=maxe as usize {
            let next = pows[i - 1].mul(q);
            pows.push(next);
        }
        let mut r = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[v] as usize;
            let mut m2 = m.clone();
            m2.0[v] = 0;
            let base = Poly::monomial(self.nvars, &m2.0, c.clone());
            r = r.add(&base.mul(&pows[e]));
        }
        r
    }

    /// Substitute several variables by constants.
    pub fn eval_partial(&self, vals: &[(usize, Rat)]) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let mut c2 = c.clone();
            for (v, x) in vals {
                let e = m2.0[*v];
                if e > 0 {
                    c2 *= num_traits::pow::pow(x.clone(), e as usize);
                    m2.0[*v] = 0;
                }
            }
            r.add_term(m2, c2);
        }
        r
    }

    pub fn eval(&self, vals: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow::pow(vals[i].clone(), e as usize);
                }
            }
            s += t;
        }
        s
    }

    /// Divide by leading coefficient. Returns (lc, monic).
    pub fn make_monic(&self) -> (Rat, Poly) {
        let lc = self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rat::one);
        let inv = Rat::one() / &lc;
        (lc, self.scale(&inv))
    }

    /// Exact division; None if the remainder is nonzero.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&(Rat::one() / c)));
        }
        let (lm, lc) = {
            let (m, c) = d.leading().unwrap();
            (m.clone(), c.clone())
        };
        let mut rem = self.clone();
        let mut q = Poly::zero(self.nvars);
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let qm = m.div(&lm);
            let qc = c / &lc;
            let t = Poly::monomial(self.nvars, &qm.0, qc.clone());
            rem = rem.sub(&t.mul(d));
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Coefficients as a polynomial in variable v: result[e] = coefficient of v^e.
    pub fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(self.nvars); d + 1];
        for (m, c) in &self.terms {
            let e = m.0[v] as usize;
            let mut m2 = m.clone();
            m2.0[v] = 0;
            out[e].add_term(m2, c.clone());
        }
        out
    }

    pub fn fmt_with(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let mut mono = String::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !mono.is_empty() {
                    mono.push('*');
                }
                mono.push_str(&names(i));
                if e > 1 {
                    mono.push_str(&format!("^{}", e));
                }
            }
            let neg = c < &Rat::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if mono.is_empty() {
                s.push_str(&rat_to_string(&a));
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{}*{}", rat_to_string(&a), mono));
            }
        }
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&|i| format!("v{}", i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_prefers_last_variable() {
        let a = Mono(vec![1, 0]);
        let b = Mono(vec![0, 1]);
        assert!(b > a);
        assert!(Mono(vec![2, 0]) > b);
    }

    #[test]
    fn division_roundtrip() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let a = x.add(&y).mul(&x.sub(&y.scale(&rat(3))));
        let q = a.div_exact(&x.add(&y)).unwrap();
        assert_eq!(q, x.sub(&y.scale(&rat(3))));
        assert!(a.add(&Poly::one(2)).div_exact(&x.add(&y)).is_none());
    }

    #[test]
    fn subst_and_derivative() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.pow(3).add(&x.mul(&y));
        assert_eq!(p.derivative(0), x.pow(2).scale(&rat(3)).add(&y));
        let s = p.subst(0, &y);
        assert_eq!(s, y.pow(3).add(&y.pow(2)));
    }
}
