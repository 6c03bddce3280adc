use super::abelian::{hpoly_from_poly, hpoly_mul, AbelianRing, ChamberSpec, ChowClass, FixedPointTable, RingRef};
use super::params::{Equiv, EquivRef};
use super::weyl::{Perm, RootData};
use crate::error::{FlopError, Result};
use crate::exact::linalg::solve_ratfn;
use crate::exact::{rat, Poly, Rat, RatFn};
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn eps(&self) -> i64 {
        match self {
            Side::Plus => 1,
            Side::Minus => -1,
        }
    }
    pub fn chamber(&self, k: usize, n: usize) -> Result<ChamberSpec> {
        ChamberSpec::new(k, n, if *self == Side::Plus { 0 } else { k })
    }
    pub fn label(&self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

/// The monomials u^b with 0 <= b_i <= n-k and |b| != 1, and their Weyl orbits.
#[derive(Clone, Debug)]
pub struct MonomialCatalog {
    pub k: usize,
    pub n: usize,
    pub mu: Vec<Vec<u32>>,
    /// orbit index of each monomial
    pub orbit: Vec<usize>,
    /// representatives (lexicographically least member) in order of first appearance
    pub reps: Vec<Vec<u32>>,
}

impl MonomialCatalog {
    pub fn new(k: usize, n: usize) -> MonomialCatalog {
        let mut mu = Vec::new();
        let m = (n - k) as u32;
        let mut cur = vec![vec![]];
        for _ in 0..k {
            let mut next = Vec::new();
            for c in &cur {
                for b in 0..=m {
                    let mut c2: Vec<u32> = c.clone();
                    c2.push(b);
                    next.push(c2);
                }
            }
            cur = next;
        }
        for b in cur {
            if b.iter().sum::<u32>() != 1 {
                mu.push(b);
            }
        }
        let mut reps: Vec<Vec<u32>> = Vec::new();
        let mut idx: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut orbit = Vec::new();
        for b in &mu {
            // lexicographically least permutation is the ascending arrangement
            let mut rep = b.clone();
            rep.sort();
            let o = *idx.entry(rep.clone()).or_insert_with(|| {
                reps.push(rep.clone());
                reps.len() - 1
            });
            orbit.push(o);
        }
        MonomialCatalog { k, n, mu, orbit, reps }
    }
    pub fn num_orbits(&self) -> usize {
        self.reps.len()
    }
    pub fn mu_poly(&self, i: usize, eq: &Equiv) -> Poly {
        let mut p = eq.pcst(rat(1));
        for (a, &e) in self.mu[i].iter().enumerate() {
            p = p.mul(&eq.h(a).pow(e));
        }
        p
    }
    /// P_j = sum of the monomials in orbit j
    pub fn orbit_poly(&self, j: usize, eq: &Equiv) -> Poly {
        let mut p = Poly::zero(eq.nvars());
        for i in 0..self.mu.len() {
            if self.orbit[i] == j {
                p = p.add(&self.mu_poly(i, eq));
            }
        }
        p
    }
    pub fn orbit_degree(&self, j: usize) -> u32 {
        self.reps[j].iter().sum()
    }
}

pub fn subsets(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, k, n, cur, out);
            cur.pop();
        }
    }
    rec(0, k, n, &mut cur, &mut out);
    out
}

/// Substitute polynomial values for H_1..H_k.
pub fn eval_h(p: &Poly, eq: &Equiv, vals: &[Poly]) -> Poly {
    let mut r = p.clone();
    for (i, v) in vals.iter().enumerate() {
        if r.uses_var(eq.layout.h(i)) {
            r = r.subst(eq.layout.h(i), v);
        }
    }
    r
}

#[derive(Debug)]
pub struct NonabelianModule {
    pub side: Side,
    pub eq: EquivRef,
    pub k: usize,
    pub n: usize,
    pub catalog: MonomialCatalog,
    pub roots: RootData,
    pub fixed: FixedPointTable,
    /// eps * sum H_i, then P_1..P_N
    pub basis: Vec<Poly>,
    pub degrees: Vec<u32>,
    pub ring: RingRef,
}

pub type ModuleRef = Arc<NonabelianModule>;

impl NonabelianModule {
    pub fn new(side: Side, eq: EquivRef) -> Result<ModuleRef> {
        Self::with_roots(side, eq.clone(), RootData::standard(eq.layout.k))
    }

    pub fn with_roots(side: Side, eq: EquivRef, roots: RootData) -> Result<ModuleRef> {
        let (k, n) = (eq.layout.k, eq.layout.n);
        let ring = AbelianRing::new(side.chamber(k, n)?, eq.clone())?;
        let catalog = MonomialCatalog::new(k, n);
        let w = |j: usize| if side == Side::Plus { eq.lam(j) } else { eq.sig(j) };
        let points = subsets(k, n);
        let mut values = Vec::new();
        let mut euler = Vec::new();
        for jset in &points {
            values.push(jset.iter().map(|&j| w(j)).collect::<Vec<_>>());
            let mut e = eq.one();
            for &a in jset {
                for b in 0..n {
                    if jset.contains(&b) {
                        continue;
                    }
                    let t = match side {
                        Side::Plus => eq.lam(a).sub(&eq.lam(b)),
                        Side::Minus => eq.sig(b).sub(&eq.sig(a)),
                    };
                    e = e.mul(&RatFn::from_poly(&t));
                }
                for j in 0..n {
                    let t = match side {
                        Side::Plus => eq.sig(j).sub(&eq.lam(a)),
                        Side::Minus => eq.sig(a).sub(&eq.lam(j)),
                    };
                    e = e.mul(&RatFn::from_poly(&t));
                }
            }
            euler.push(e);
        }
        let mut basis = Vec::new();
        let mut degrees = Vec::new();
        let mut s = Poly::zero(eq.nvars());
        for i in 0..k {
            s = s.add(&eq.h(i));
        }
        basis.push(s.scale(&rat(side.eps())));
        degrees.push(1);
        for j in 0..catalog.num_orbits() {
            basis.push(catalog.orbit_poly(j, &eq));
            degrees.push(catalog.orbit_degree(j));
        }
        Ok(Arc::new(NonabelianModule {
            side,
            eq,
            k,
            n,
            catalog,
            roots,
            fixed: FixedPointTable { points, values, euler },
            basis,
            degrees,
            ring,
        }))
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Index of the abelian fixed point F(J) (J in increasing order).
    pub fn abelian_index(&self, j: usize) -> usize {
        self.fixed.points[j].iter().fold(0, |acc, &x| acc * self.n + x)
    }

    pub fn from_poly(self: &Arc<Self>, p: &Poly) -> GrClass {
        let v = self.fixed.values.iter().map(|vals| RatFn::from_poly(&eval_h(p, &self.eq, vals))).collect();
        GrClass { module: self.clone(), v }
    }

    pub fn basis_class(self: &Arc<Self>, b: usize) -> GrClass {
        self.from_poly(&self.basis[b])
    }

    /// Evaluation matrix M[J][b] = basis_b(J).
    pub fn eval_matrix(&self) -> Vec<Vec<RatFn>> {
        self.fixed
            .values
            .iter()
            .map(|vals| self.basis.iter().map(|b| RatFn::from_poly(&eval_h(b, &self.eq, vals))).collect())
            .collect()
    }

    pub fn coords(&self, a: &GrClass) -> Result<Vec<RatFn>> {
        solve_ratfn(&self.eval_matrix(), &a.v).ok_or_else(|| FlopError::Consistency("nonabelian basis is degenerate".into()))
    }

    pub fn pairing_loc(&self, a: &GrClass, b: &GrClass) -> RatFn {
        let mut s = self.eq.zero();
        for j in 0..a.v.len() {
            s = s.add(&a.v[j].mul(&b.v[j]).div(&self.fixed.euler[j]).expect("euler class vanishes"));
        }
        s
    }

    /// (-1)^{|Phi+|} / |W|
    pub fn pairing_constant(&self) -> Rat {
        let w: i64 = (1..=self.k as i64).product();
        rat(if self.roots.count() % 2 == 0 { 1 } else { -1 }) / rat(w)
    }

    pub fn pairing_via_abelian(&self, a: &GrClass, b: &GrClass) -> Result<RatFn> {
        let x = self.p_a_inv(a)?;
        let y = self.p_a_inv(b)?;
        Ok(self.ring.pairing(&x, &y).scale(&self.pairing_constant()))
    }

    fn delta_poly(&self) -> Poly {
        self.roots.delta(&self.eq)
    }

    /// p^a on an anti-invariant abelian class.
    pub fn p_a(self: &Arc<Self>, alpha: &ChowClass) -> Result<GrClass> {
        let beta = alpha.divide_by_delta()?;
        let sign = self.roots.sign_vs_standard();
        let v = (0..self.fixed.points.len())
            .map(|j| beta.restrict(self.abelian_index(j)).scale(&rat(sign as i64)))
            .collect();
        Ok(GrClass { module: self.clone(), v })
    }

    /// p^a from fixed-point values on all abelian tuples; checks anti-invariance there.
    pub fn p_a_loc(self: &Arc<Self>, vals: &[RatFn]) -> Result<GrClass> {
        check_anti_invariant_loc(&self.ring, vals)?;
        let delta = self.delta_poly();
        let mut v = Vec::new();
        for j in 0..self.fixed.points.len() {
            let f = self.abelian_index(j);
            let d = RatFn::from_poly(&eval_h(&delta, &self.eq, &self.ring.fixed.values[f]));
            v.push(vals[f].div(&d)?);
        }
        Ok(GrClass { module: self.clone(), v })
    }

    /// Delta times a symmetric representative, as an abelian class.
    pub fn p_a_inv(&self, b: &GrClass) -> Result<ChowClass> {
        let c = self.coords(b)?;
        let mut sym = crate::chow::abelian::HPoly::new();
        for (coef, bp) in c.iter().zip(&self.basis) {
            for (e, x) in hpoly_from_poly(bp, &self.eq) {
                crate::chow::abelian::hpoly_add_term(&mut sym, e, x.mul(coef));
            }
        }
        let d = hpoly_from_poly(&self.delta_poly(), &self.eq);
        Ok(self.ring.normal_form_h(&hpoly_mul(&sym, &d)))
    }

    pub fn gram_loc(self: &Arc<Self>) -> Vec<Vec<RatFn>> {
        let cls: Vec<GrClass> = (0..self.rank()).map(|b| self.basis_class(b)).collect();
        cls.iter().map(|a| cls.iter().map(|b| self.pairing_loc(a, b)).collect()).collect()
    }

    pub fn gram_via_abelian(self: &Arc<Self>) -> Result<Vec<Vec<RatFn>>> {
        let cls: Vec<GrClass> = (0..self.rank()).map(|b| self.basis_class(b)).collect();
        let lifted: Vec<ChowClass> = cls.iter().map(|c| self.p_a_inv(c)).collect::<Result<_>>()?;
        let k = self.pairing_constant();
        Ok(lifted.iter().map(|a| lifted.iter().map(|b| self.ring.pairing(a, b).scale(&k)).collect()).collect())
    }
}

/// Zero on tuples with repeated indices and sign-alternating under every permutation.
pub fn check_anti_invariant_loc(ring: &AbelianRing, vals: &[RatFn]) -> Result<()> {
    let k = ring.chamber.k;
    let perms = Perm::all(k);
    for (f, p) in ring.fixed.points.iter().enumerate() {
        let distinct = (0..k).all(|a| (0..a).all(|b| p[a] != p[b]));
        if !distinct {
            if !vals[f].is_zero() {
                return Err(FlopError::Consistency(format!("nonzero value at repeated-index point {:?}", p)));
            }
            continue;
        }
        for w in &perms {
            let g = ring.permuted_point(f, w);
            if g <= f {
                continue;
            }
            let ok = if w.sign() > 0 { vals[g].eq_exact(&vals[f]) } else { vals[g].add(&vals[f]).is_zero() };
            if !ok {
                return Err(FlopError::Consistency(format!("anti-invariance fails at {:?} under {:?}", p, w.0)));
            }
        }
    }
    Ok(())
}

/// Class on the Grassmannian side, stored by fixed-point values.
#[derive(Clone, Debug)]
pub struct GrClass {
    pub module: ModuleRef,
    pub v: Vec<RatFn>,
}

impl GrClass {
    pub fn eq_exact(&self, o: &GrClass) -> bool {
        self.v.iter().zip(&o.v).all(|(a, b)| a.eq_exact(b))
    }
    pub fn scale(&self, r: &RatFn) -> GrClass {
        GrClass { module: self.module.clone(), v: self.v.iter().map(|x| x.mul(r)).collect() }
    }
}

/// The residue pairing Omega(f, g) = Res_z (f(-z), g(z)) for Laurent data given
/// as (power, coefficient-vector) lists in the fixed-point basis with Gram diag(1/e).
pub struct SymplecticGram {
    pub euler: Vec<RatFn>,
}

impl SymplecticGram {
    pub fn new(m: &NonabelianModule) -> Self {
        SymplecticGram { euler: m.fixed.euler.clone() }
    }
    pub fn pairing(&self, a: &[RatFn], b: &[RatFn]) -> RatFn {
        let mut s = RatFn::zero(self.euler[0].nvars);
        for j in 0..a.len() {
            s = s.add(&a[j].mul(&b[j]).div(&self.euler[j]).unwrap());
        }
        s
    }
    /// f, g as maps power -> vector; picks z^{-1} of (f(-z), g(z)).
    pub fn omega(&self, f: &[(i32, Vec<RatFn>)], g: &[(i32, Vec<RatFn>)]) -> RatFn {
        let mut s = RatFn::zero(self.euler[0].nvars);
        for (p, a) in f {
            for (q, b) in g {
                if p + q == -1 {
                    let t = self.pairing(a, b);
                    s = s.add(&if p % 2 == 0 { t } else { t.neg() });
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_23() {
        let c = MonomialCatalog::new(2, 3);
        assert_eq!(c.mu, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(c.num_orbits(), 2);
        let c = MonomialCatalog::new(2, 4);
        // b in [0,2]^2 minus |b|=1: 9 - 2 = 7 monomials
        assert_eq!(c.mu.len(), 7);
        assert_eq!(c.num_orbits(), 5);
    }

    #[test]
    fn pairing_routes_agree_23() {
        for side in [Side::Plus, Side::Minus] {
            let m = NonabelianModule::new(side, Equiv::symbolic(2, 3)).unwrap();
            let g1 = m.gram_loc();
            let g2 = m.gram_via_abelian().unwrap();
            for a in 0..m.rank() {
                for b in 0..m.rank() {
                    assert!(g1[a][b].eq_exact(&g2[a][b]), "{side:?} {a} {b}");
                }
            }
            assert_eq!(m.pairing_constant(), crate::exact::ratq(-1, 2));
        }
    }

    #[test]
    fn omega_sign() {
        let m = NonabelianModule::new(Side::Plus, Equiv::symbolic(1, 2)).unwrap();
        let g = SymplecticGram::new(&m);
        let one = vec![m.eq.one(); 2];
        let w = g.omega(&[(0, one.clone())], &[(-1, one.clone())]);
        let p = g.pairing(&one, &one);
        assert!(w.eq_exact(&p));
        let w2 = g.omega(&[(-1, one.clone())], &[(0, one)]);
        assert!(w2.eq_exact(&p.neg()));
    }
}
