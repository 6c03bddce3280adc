//! Derivative matrices of the toric I-functions at matched points, the connection
//! matrices U_c and U_T, the nonabelian U, and their property checks.
//!
//! Localization data: at an abelian fixed point F of chamber c the toric I-function is
//!   z exp(sum_i h_i s_i / z) prod_i J_i,
//! with s_i = log y_i^+, h_i = H_i|_F, and J_i the scalar factor in its own variable
//! (y_i^+ for i >= c, y_i^- = 1/y_i^+ for i < c). D_i = z d/ds_i acts on one factor as
//! T_b = sum_r C(b, r) h^{b-r} (e z)^r theta^r J with e = +-1 the factor type.

use super::cmat::{self, CMat};
use super::jfun::{HyperParams, Jet};
use super::real::{Cx, Real};
use crate::chow::abelian::tuples;
use crate::chow::nonabelian::subsets;
use crate::chow::{AbelianRing, ChamberSpec, Equiv, EquivRef, NonabelianModule, Perm, RootData, Side};
use crate::chow::nonabelian::MonomialCatalog;
use crate::error::{FlopError, Result};
use crate::exact::rat::{binom, factorial};
use crate::exact::{rat, Poly, Rat};
use std::cell::RefCell;
use std::collections::HashMap;

/// Where one factor is evaluated: J's own log-coordinate path and the value of s_i = log y_i^+
/// entering the exponential prefactor.
#[derive(Clone, Debug)]
pub struct Place<R> {
    pub label: String,
    pub start: Cx<R>,
    pub vertices: Vec<Cx<R>>,
    pub s_plus: Cx<R>,
}

/// A differential operator sum c_b D^b.
pub type DiffOp<R> = Vec<(Vec<u32>, Cx<R>)>;

pub struct Engine<R: Real> {
    pub k: usize,
    pub n: usize,
    pub lam: Vec<Rat>,
    pub sig: Vec<Rat>,
    pub z_exact: (Rat, Rat),
    pub z: Cx<R>,
    pub eps: Rat,
    log_eps: R,
    cache: RefCell<HashMap<String, Jet<R>>>,
}

impl<R: Real> Engine<R> {
    pub fn new(k: usize, n: usize, lam: Vec<Rat>, sig: Vec<Rat>, z: (Rat, Rat), eps: Rat) -> Engine<R> {
        let zc = Cx::new(R::from_rat(&z.0), R::from_rat(&z.1));
        let log_eps = R::from_rat(&eps).ln();
        Engine { k, n, lam, sig, z_exact: z, z: zc, eps, log_eps, cache: RefCell::new(HashMap::new()) }
    }

    /// Same parameters with (lambda, sigma, z) scaled by t.
    pub fn scaled(&self, t: &Rat) -> Engine<R> {
        let lam = self.lam.iter().map(|x| x * t).collect();
        let sig = self.sig.iter().map(|x| x * t).collect();
        Engine::new(self.k, self.n, lam, sig, (&self.z_exact.0 * t, &self.z_exact.1 * t), self.eps.clone())
    }
    pub fn with_z(&self, z: (Rat, Rat)) -> Engine<R> {
        Engine::new(self.k, self.n, self.lam.clone(), self.sig.clone(), z, self.eps.clone())
    }
    pub fn with_eps(&self, eps: Rat) -> Engine<R> {
        Engine::new(self.k, self.n, self.lam.clone(), self.sig.clone(), self.z_exact.clone(), eps)
    }
    pub fn equiv(&self) -> EquivRef {
        Equiv::point(self.k, self.n, self.lam.clone(), self.sig.clone())
    }

    pub fn hval(&self, c: usize, i: usize, j: usize) -> &Rat {
        if i < c {
            &self.sig[j]
        } else {
            &self.lam[j]
        }
    }

    pub fn params(&self, plus: bool, j: usize) -> HyperParams<R> {
        let h = if plus { &self.lam[j] } else { &self.sig[j] };
        let alpha = self.lam.iter().map(|l| Cx::from_rat(&(h - l)).div(&self.z)).collect();
        let beta = self.sig.iter().map(|s| Cx::from_rat(&(s - h)).div(&self.z)).collect();
        let p = HyperParams::new(alpha, beta);
        if plus {
            p
        } else {
            p.swapped()
        }
    }

    pub fn jet(&self, plus: bool, j: usize, place: &Place<R>, order: usize) -> Result<Jet<R>> {
        let key = format!("{}{}:{}", if plus { '+' } else { '-' }, j, place.label);
        if let Some(jt) = self.cache.borrow().get(&key) {
            if jt.d.len() > order {
                return Ok(Jet { u: jt.u.clone(), d: jt.d[..=order].to_vec() });
            }
        }
        let p = self.params(plus, j);
        let n = self.n;
        let base = {
            let s = p.series_jet(&place.start, n)?;
            if place.vertices.is_empty() {
                s
            } else {
                p.continue_along(&s, &place.vertices)?
            }
        };
        let full = p.extend_jet(&base, order.max(n))?;
        self.cache.borrow_mut().insert(key, full.clone());
        Ok(Jet { u: full.u, d: full.d[..=order].to_vec() })
    }

    fn le(&self) -> Cx<R> {
        Cx::real(self.log_eps.clone())
    }
    fn ipi(&self, t: &Rat) -> Cx<R> {
        Cx::i_pi(t)
    }

    pub fn place_plus_start(&self) -> Place<R> {
        Place { label: "p0".into(), start: self.le(), vertices: vec![], s_plus: self.le() }
    }
    pub fn place_minus_start(&self) -> Place<R> {
        Place { label: "m0".into(), start: self.le(), vertices: vec![], s_plus: self.le().neg() }
    }
    /// log eps -> log eps + i pi h -> -log eps + i pi h -> -log eps, with h = n - 1 + offset.
    pub fn place_gamma(&self, offset: &Rat) -> Place<R> {
        let h = self.ipi(&(rat(self.n as i64 - 1) + offset));
        let le = self.le();
        Place {
            label: format!("g{offset}"),
            start: le.clone(),
            vertices: vec![le.add(&h), le.neg().add(&h), le.neg()],
            s_plus: le.neg(),
        }
    }
    /// gamma followed by a real move to -log eps + tau.
    pub fn place_gamma_ext(&self, tau: &Rat) -> Place<R> {
        let mut p = self.place_gamma(&rat(0));
        let end = self.le().neg().add(&Cx::from_rat(tau));
        p.vertices.push(end.clone());
        p.label = format!("gx{tau}");
        p.s_plus = end;
        p
    }
    pub fn place_minus_shift(&self, tau: &Rat) -> Place<R> {
        let t = Cx::from_rat(tau);
        Place { label: format!("mx{tau}"), start: self.le().sub(&t), vertices: vec![], s_plus: self.le().neg().add(&t) }
    }
    /// The delta path read in J's argument q y with q = (-1)^{k-1}: start over log eps + i pi (k-1),
    /// drop to log eps, follow gamma, rise to -log eps + i pi (k-1).
    pub fn place_delta(&self) -> Place<R> {
        let sh = self.ipi(&rat(self.k as i64 - 1));
        let g = self.place_gamma(&rat(0));
        let le = self.le();
        let mut vertices = vec![le.clone()];
        vertices.extend(g.vertices);
        vertices.push(le.neg().add(&sh));
        Place { label: "d".into(), start: le.add(&sh), vertices, s_plus: le.neg() }
    }
    pub fn place_minus_delta(&self) -> Place<R> {
        let sh = self.ipi(&rat(self.k as i64 - 1));
        Place { label: "md".into(), start: self.le().add(&sh), vertices: vec![], s_plus: self.le().neg() }
    }

    /// Value of op applied to the I-function of chamber c at the fixed point f.
    pub fn value(&self, c: usize, f: &[usize], places: &[Place<R>], op: &DiffOp<R>) -> Result<Cx<R>> {
        let k = self.k;
        let mut maxb = vec![0u32; k];
        for (b, _) in op {
            for i in 0..k {
                maxb[i] = maxb[i].max(b[i]);
            }
        }
        let mut tabs: Vec<Vec<Cx<R>>> = Vec::with_capacity(k);
        let mut expo = Cx::zero();
        for i in 0..k {
            let plus = i >= c;
            let h = self.hval(c, i, f[i]).clone();
            let hc = Cx::<R>::from_rat(&h);
            let jet = self.jet(plus, f[i], &places[i], maxb[i] as usize)?;
            let ez = if plus { self.z.clone() } else { self.z.neg() };
            let mut tab = Vec::new();
            for b in 0..=maxb[i] {
                let mut t = Cx::zero();
                for r in 0..=b {
                    let coef = Cx::from_rat(&binom(b, r)).mul(&hc.powi(b - r)).mul(&ez.powi(r));
                    t = t.add(&coef.mul(&jet.d[r as usize]));
                }
                tab.push(t);
            }
            tabs.push(tab);
            expo = expo.add(&hc.mul(&places[i].s_plus));
        }
        let pre = self.z.mul(&expo.div(&self.z).exp());
        let mut s = Cx::zero();
        for (b, coef) in op {
            let mut t = coef.clone();
            for i in 0..k {
                t = t.mul(&tabs[i][b[i] as usize]);
            }
            s = s.add(&t);
        }
        Ok(pre.mul(&s))
    }

    pub fn tuple_index(&self, f: &[usize]) -> usize {
        f.iter().fold(0, |acc, &j| acc * self.n + j)
    }

    /// Rows: fixed points of chamber c; columns: D^b for 0 <= b_i <= n-1.
    pub fn chamber_matrix(&self, c: usize, places: &[Place<R>]) -> Result<CMat<R>> {
        let pts = tuples(self.k, self.n);
        let cols: Vec<Vec<u32>> = pts.iter().map(|t| t.iter().map(|&x| x as u32).collect()).collect();
        let mut m = Vec::new();
        for f in &pts {
            let mut row = Vec::new();
            for b in &cols {
                row.push(self.value(c, f, places, &vec![(b.clone(), Cx::one())])?);
            }
            m.push(row);
        }
        Ok(m)
    }

    /// U_T = B A^{-1} with A on the plus side at `plus` and B on the minus side at `minus`.
    pub fn u_t_at(&self, plus: &Place<R>, minus: &Place<R>) -> Result<(CMat<R>, f64)> {
        let a = self.chamber_matrix(0, &vec![plus.clone(); self.k])?;
        let b = self.chamber_matrix(self.k, &vec![minus.clone(); self.k])?;
        let (ai, cond) = cmat::inverse(&a)?;
        Ok((cmat::mul(&b, &ai), cond))
    }

    pub fn u_t(&self) -> Result<(CMat<R>, f64)> {
        self.u_t_at(&self.place_gamma(&rat(0)), &self.place_minus_start())
    }

    /// U_c across the c-th wall (1 <= c <= k): only factor c-1 moves.
    pub fn u_wall(&self, c: usize) -> Result<CMat<R>> {
        let k = self.k;
        let w = c - 1;
        let g = self.place_gamma(&rat(0));
        let pa: Vec<Place<R>> = (0..k)
            .map(|i| if i < w { self.place_minus_start() } else if i == w { g.clone() } else { self.place_plus_start() })
            .collect();
        let pb: Vec<Place<R>> =
            (0..k).map(|i| if i <= w { self.place_minus_start() } else { self.place_plus_start() }).collect();
        let a = self.chamber_matrix(c - 1, &pa)?;
        let b = self.chamber_matrix(c, &pb)?;
        let (ai, _) = cmat::inverse(&a)?;
        Ok(cmat::mul(&b, &ai))
    }

    /// U_k ... U_1
    pub fn u_t_walls(&self) -> Result<CMat<R>> {
        let mut u = cmat::identity(self.n.pow(self.k as u32));
        for c in 1..=self.k {
            u = cmat::mul(&self.u_wall(c)?, &u);
        }
        Ok(u)
    }

    fn delta_at(&self, c: usize, f: &[usize]) -> Rat {
        let mut d = rat(1);
        for a in 0..self.k {
            for b in a + 1..self.k {
                d *= self.hval(c, a, f[a]) - self.hval(c, b, f[b]);
            }
        }
        d
    }

    /// The nonabelian U from U_T, and the defect of the anti-invariant subspace under U_T.
    pub fn assemble_u(&self, ut: &CMat<R>) -> (CMat<R>, f64) {
        let k = self.k;
        let subs = subsets(k, self.n);
        let perms = Perm::all(k);
        let mut ug = vec![vec![Cx::zero(); subs.len()]; subs.len()];
        let mut defect = 0f64;
        for (jj, jset) in subs.iter().enumerate() {
            // anti-invariant lift of the point class at J
            let mut v = vec![Cx::<R>::zero(); ut.len()];
            for w in &perms {
                let f: Vec<usize> = w.0.iter().map(|&i| jset[i]).collect();
                v[self.tuple_index(&f)] = Cx::from_rat(&self.delta_at(0, &f));
            }
            let img = cmat::mul_vec(ut, &v);
            let scale = img.iter().map(|x| x.abs_f64()).fold(1e-300, f64::max);
            for (ii, iset) in subs.iter().enumerate() {
                let d0 = self.delta_at(k, iset);
                let base = img[self.tuple_index(iset)].div(&Cx::from_rat(&d0));
                ug[ii][jj] = base.clone();
                for w in &perms {
                    let f: Vec<usize> = w.0.iter().map(|&i| iset[i]).collect();
                    let other = img[self.tuple_index(&f)].div(&Cx::from_rat(&self.delta_at(k, &f)));
                    defect = defect.max(other.sub(&base).abs_f64() * crate::exact::rat::rat_to_f64(&self.delta_at(k, &f)).abs() / scale);
                }
            }
            for f in tuples(k, self.n) {
                let mut s = f.clone();
                s.sort();
                s.dedup();
                if s.len() < k {
                    defect = defect.max(img[self.tuple_index(&f)].abs_f64() / scale);
                }
            }
        }
        (ug, defect)
    }

    /// E_-^{-1} U E_+ with E = exp(i pi (k-1) sum_i H_i / z) on Grassmannian fixed points.
    pub fn delta_twist(&self, ug: &CMat<R>) -> CMat<R> {
        let subs = subsets(self.k, self.n);
        let tw = |c: usize, j: &[usize]| {
            let mut h = rat(0);
            for i in 0..self.k {
                h += self.hval(c, i, j[i]);
            }
            Cx::<R>::i_pi(&(h * rat(self.k as i64 - 1))).div(&self.z).exp()
        };
        let ep: Vec<Cx<R>> = subs.iter().map(|j| tw(0, j)).collect();
        let em: Vec<Cx<R>> = subs.iter().map(|j| tw(self.k, j)).collect();
        ug.iter()
            .enumerate()
            .map(|(a, row)| row.iter().enumerate().map(|(b, x)| x.mul(&ep[b]).div(&em[a])).collect())
            .collect()
    }

    pub fn abelian_euler(&self, c: usize) -> Result<Vec<Rat>> {
        let ring = AbelianRing::new(ChamberSpec::new(self.k, self.n, c)?, self.equiv())?;
        ring.fixed
            .euler
            .iter()
            .map(|e| e.as_constant().ok_or_else(|| FlopError::Numeric("Euler class is not a number".into())))
            .collect()
    }

    pub fn grass_euler(&self, side: Side) -> Result<Vec<Rat>> {
        let m = NonabelianModule::new(side, self.equiv())?;
        m.fixed
            .euler
            .iter()
            .map(|e| e.as_constant().ok_or_else(|| FlopError::Numeric("Euler class is not a number".into())))
            .collect()
    }

    /// Localization values of H^b on a chamber (rows points, columns b).
    pub fn monomial_matrix(&self, c: usize) -> CMat<R> {
        let pts = tuples(self.k, self.n);
        pts.iter()
            .map(|f| {
                pts.iter()
                    .map(|b| {
                        let mut v = rat(1);
                        for i in 0..self.k {
                            for _ in 0..b[i] {
                                v *= self.hval(c, i, f[i]);
                            }
                        }
                        Cx::from_rat(&v)
                    })
                    .collect()
            })
            .collect()
    }

    /// U_T in the monomial bases H^b on both sides.
    pub fn to_monomial(&self, ut: &CMat<R>) -> Result<CMat<R>> {
        let (mi, _) = cmat::inverse(&self.monomial_matrix(self.k))?;
        Ok(cmat::mul(&cmat::mul(&mi, ut), &self.monomial_matrix(0)))
    }

    /// The operator (sum D / z)^m / m! * Delta(D) * prod_j P_j(D)^{c_j} / (c_j! z^{c_j}).
    pub fn coefficient_op(&self, m: u32, c: &[u32]) -> DiffOp<R> {
        let eq = self.equiv();
        let cat = MonomialCatalog::new(self.k, self.n);
        let mut p = RootData::standard(self.k).delta(&eq);
        let mut sum = Poly::zero(eq.nvars());
        for i in 0..self.k {
            sum = sum.add(&eq.h(i));
        }
        p = p.mul(&sum.pow(m));
        let mut scale = factorial(m);
        let mut deg = m;
        for (j, &cj) in c.iter().enumerate() {
            p = p.mul(&cat.orbit_poly(j, &eq).pow(cj));
            scale *= factorial(cj);
            deg += cj;
        }
        let zf = self.z.powi(deg).inv().scale(&R::from_rat(&(rat(1) / scale)));
        let lay = eq.layout;
        p.terms
            .iter()
            .map(|(mono, coef)| {
                let b: Vec<u32> = (0..self.k).map(|i| mono.0[lay.h(i)] as u32).collect();
                (b, zf.scale(&R::from_rat(coef)))
            })
            .collect()
    }

    /// Nonabelian coefficient vector on the Grassmannian fixed points of a side.
    pub fn grass_vector(&self, side: Side, place: &Place<R>, op: &DiffOp<R>) -> Result<Vec<Cx<R>>> {
        let c = if side == Side::Plus { 0 } else { self.k };
        let places = vec![place.clone(); self.k];
        subsets(self.k, self.n)
            .iter()
            .map(|j| Ok(self.value(c, j, &places, op)?.div(&Cx::from_rat(&self.delta_at(c, j)))))
            .collect()
    }

    /// Relative residual |U g^+ - g^-| / |g^-| for every retained coefficient (m, c).
    pub fn residuals(
        &self,
        ug: &CMat<R>,
        plus: &Place<R>,
        minus: &Place<R>,
        logy: u32,
        x: u32,
    ) -> Result<Vec<ResidualRow>> {
        let norb = MonomialCatalog::new(self.k, self.n).num_orbits();
        let mut out = Vec::new();
        for m in 0..=logy {
            for c in compositions(norb, x) {
                let op = self.coefficient_op(m, &c);
                let gp = self.grass_vector(Side::Plus, plus, &op)?;
                let gm = self.grass_vector(Side::Minus, minus, &op)?;
                let rel = cmat::vec_rel_diff(&cmat::mul_vec(ug, &gp), &gm);
                out.push(ResidualRow { logy: m, x: c, rel });
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct ResidualRow {
    pub logy: u32,
    pub x: Vec<u32>,
    pub rel: f64,
}

/// All exponent vectors of length n with total at most t.
pub fn compositions(n: usize, t: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for v in &out {
            let used: u32 = v.iter().sum();
            for e in 0..=(t - used) {
                let mut w = v.clone();
                w.push(e);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// max over transpositions of |P_w U P_w^{-1} - U| / |U|.
pub fn weyl_defect<R: Real>(e: &Engine<R>, u: &CMat<R>) -> f64 {
    let pts = tuples(e.k, e.n);
    let mut worst = 0f64;
    let scale = cmat::max_abs(u);
    for a in 0..e.k {
        for b in a + 1..e.k {
            let w = Perm::transposition(e.k, a, b);
            for (r, f) in pts.iter().enumerate() {
                let wf: Vec<usize> = w.0.iter().map(|&i| f[i]).collect();
                let wr = e.tuple_index(&wf);
                for (c, g) in pts.iter().enumerate() {
                    let wg: Vec<usize> = w.0.iter().map(|&i| g[i]).collect();
                    let wc = e.tuple_index(&wg);
                    worst = worst.max(u[wr][wc].sub(&u[r][c]).abs_f64() / scale);
                }
            }
        }
    }
    worst
}

/// |U(-z)^T G^- U(z) - G^+| / |G^+| with G = diag(1/e).
pub fn symplectic_defect<R: Real>(u: &CMat<R>, u_neg: &CMat<R>, e_plus: &[Rat], e_minus: &[Rat]) -> f64 {
    let gm: CMat<R> = diag_inv(e_minus);
    let gp: CMat<R> = diag_inv(e_plus);
    let lhs = cmat::mul(&cmat::mul(&cmat::transpose(u_neg), &gm), u);
    cmat::rel_diff(&lhs, &gp)
}

fn diag_inv<R: Real>(e: &[Rat]) -> CMat<R> {
    let n = e.len();
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Cx::from_rat(&(rat(1) / &e[i])) } else { Cx::zero() }).collect())
        .collect()
}

/// Compare U_mono(t .) against t^{e(a,b)} U_mono(.) with e(a, b) = deg b - deg a
/// (row a is the output index).
pub fn degree_defect<R: Real>(k: usize, n: usize, mono: &CMat<R>, mono_t: &CMat<R>, t: &Rat) -> f64 {
    let pts = tuples(k, n);
    let deg: Vec<i32> = pts.iter().map(|b| b.iter().sum::<usize>() as i32).collect();
    let tr = R::from_rat(t);
    let mut expect = mono.clone();
    for a in 0..pts.len() {
        for b in 0..pts.len() {
            let e = deg[b] - deg[a];
            let mut f = R::one();
            for _ in 0..e.abs() {
                f = f * tr.clone();
            }
            if e < 0 {
                f = R::one() / f;
            }
            expect[a][b] = mono[a][b].scale(&f);
        }
    }
    cmat::rel_diff(mono_t, &expect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::params::generic_values;
    use crate::exact::ratq;
    use crate::hyper::real::{with_precision, Mp};

    fn engine<R: Real>(k: usize, n: usize, z: (Rat, Rat)) -> Engine<R> {
        let (l, s) = generic_values(n, 11);
        Engine::new(k, n, l, s, z, ratq(1, 10))
    }

    #[test]
    fn k1_n2_connection_properties() {
        with_precision(128, || {
            for z in [(rat(1), rat(0)), (rat(1), rat(2))] {
                let e: Engine<Mp> = engine(1, 2, z.clone());
                let (u, cond) = e.u_t().unwrap();
                assert!(cond < 1e12);
                let en = e.with_z((-z.0.clone(), -z.1.clone()));
                let (un, _) = en.u_t().unwrap();
                let sd = symplectic_defect(&u, &un, &e.abelian_euler(0).unwrap(), &e.abelian_euler(1).unwrap());
                assert!(sd < 1e-8, "symplectic {sd}");
                let e2 = e.scaled(&rat(2));
                let (u2, _) = e2.u_t().unwrap();
                let dd = degree_defect(1, 2, &e.to_monomial(&u).unwrap(), &e2.to_monomial(&u2).unwrap(), &rat(2));
                assert!(dd < 1e-8, "degree {dd}");
                let (ub, _) = e.u_t_at(&e.place_gamma_ext(&ratq(1, 4)), &e.place_minus_shift(&ratq(1, 4))).unwrap();
                assert!(cmat::rel_diff(&ub, &u) < 1e-8);
            }
        });
    }

    #[test]
    fn k2_n3_connection_properties() {
        with_precision(128, || {
            let z = (rat(1), rat(2));
            let e: Engine<Mp> = engine(2, 3, z.clone());
            let (u, _) = e.u_t().unwrap();
            let w = weyl_defect(&e, &u);
            let walls = e.u_t_walls().unwrap();
            let en = e.with_z((-z.0.clone(), -z.1.clone()));
            let (un, _) = en.u_t().unwrap();
            let sd = symplectic_defect(&u, &un, &e.abelian_euler(0).unwrap(), &e.abelian_euler(2).unwrap());
            let e2 = e.scaled(&rat(2));
            let (u2, _) = e2.u_t().unwrap();
            let dd = degree_defect(2, 3, &e.to_monomial(&u).unwrap(), &e2.to_monomial(&u2).unwrap(), &rat(2));
            let (ug, anti) = e.assemble_u(&u);
            let eg = e.residuals(&ug, &e.place_gamma(&rat(0)), &e.place_minus_start(), 1, 1).unwrap();
            let ed = e.residuals(&ug, &e.place_delta(), &e.place_minus_delta(), 1, 1).unwrap();
            eprintln!("weyl {w:e} walls {:e} sympl {sd:e} degree {dd:e} anti {anti:e}", cmat::rel_diff(&walls, &u));
            eprintln!("gamma {:?}", eg.iter().map(|r| r.rel).collect::<Vec<_>>());
            eprintln!("delta {:?}", ed.iter().map(|r| r.rel).collect::<Vec<_>>());
            let et = e.residuals(&e.delta_twist(&ug), &e.place_delta(), &e.place_minus_delta(), 1, 1).unwrap();
            eprintln!("delta twisted {:?}", et.iter().map(|r| r.rel).collect::<Vec<_>>());
            assert!(w < 1e-8 && sd < 1e-8 && dd < 1e-8 && anti < 1e-8);
            assert!(cmat::rel_diff(&walls, &u) < 1e-8);
            assert!(eg.iter().all(|r| r.rel < 1e-8));
        });
    }
}
