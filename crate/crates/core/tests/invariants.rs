//! Property tests for the exact layer and the cone machinery.

use proptest::prelude::*;

use grflop::cone::{self, point_psi_oracle, point_psi_string, PointTheory, TruncAlgebra, ZSer};
use grflop::exact::{rat, ratq, Poly, RatFn};

fn small_poly(c: &[(i64, i64, i64)]) -> Poly {
    // c0 + c1 x + c2 y over two variables
    let mut p = Poly::zero(2);
    for &(a, b, d) in c {
        p = p.add(&Poly::linear(2, &[(0, rat(a)), (1, rat(b))], rat(d)));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_closed_form_matches_string_reduction(ks in prop::collection::vec(0u32..4, 3..7)) {
        prop_assert_eq!(point_psi_oracle(&ks), point_psi_string(&ks));
    }

    #[test]
    fn poly_ring_laws(a in prop::collection::vec((-3i64..4, -3i64..4, -3i64..4), 1..3),
                      b in prop::collection::vec((-3i64..4, -3i64..4, -3i64..4), 1..3),
                      c in prop::collection::vec((-3i64..4, -3i64..4, -3i64..4), 1..3)) {
        let (a, b, c) = (small_poly(&a), small_poly(&b), small_poly(&c));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        if !b.is_zero() {
            prop_assert_eq!(a.mul(&b).div_exact(&b), Some(a.clone()));
        }
    }

    #[test]
    fn ratfn_sum_matches_pairwise(shifts in prop::collection::vec((1i64..6, -4i64..5), 0..6)) {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let items: Vec<RatFn> = shifts
            .iter()
            .map(|&(s, c)| {
                let den = RatFn::from_poly(&x.add(&Poly::constant(2, rat(s)))).inv().unwrap();
                den.mul(&RatFn::from_poly(&y.add(&Poly::constant(2, rat(c)))))
            })
            .collect();
        let pair = items.iter().fold(RatFn::zero(2), |a, b| a.add(b));
        prop_assert!(RatFn::sum(2, &items).eq_exact(&pair));
    }

    #[test]
    fn cone_round_trip(tc in prop::collection::vec((0usize..2, 1u32..4, -4i64..5, 1i64..4), 1..4),
                       wc in prop::collection::vec((0i32..3, 0usize..2, 1u32..4, -4i64..5), 0..4)) {
        let j = cone::j_function(&PointTheory, 6).unwrap();
        let alg = TruncAlgebra::new(&["a", "b"], 5);
        let mut t = alg.zero();
        for &(g, e, n, d) in &tc {
            t = t.add(&alg.pow(&alg.gen(g), e).scale(&ratq(n, d)));
        }
        let mut w = ZSer::new();
        for &(kz, g, e, n) in &wc {
            let v = alg.pow(&alg.gen(g), e).scale(&rat(n));
            let cur = w.remove(&kz).unwrap_or_else(|| alg.zero());
            let s = cur.add(&v);
            if !s.is_zero() {
                w.insert(kz, s);
            }
        }
        let w = alg.z_add(&w, &alg.z_const(rat(-1), 0));
        let k = cone::cone_point(&j, &alg, &[t.clone()], &vec![w.clone()]).unwrap();
        let r = cone::reconstruct(&k, &j).unwrap();
        prop_assert!(r.on_cone());
        prop_assert_eq!(&r.t, &vec![t.clone()]);
        prop_assert_eq!(&r.w, &vec![w]);
        prop_assert_eq!(cone::tau_of(&PointTheory, &k).unwrap(), vec![t]);
    }
}
