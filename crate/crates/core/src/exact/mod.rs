//! Exact arithmetic: rationals, sparse polynomials, factored rational functions,
//! truncated multi-graded series.

pub mod laurent;
pub mod linalg;
pub mod poly;
pub mod rat;
pub mod ratfn;
pub mod series;

pub use poly::{Mono, Poly};
pub use rat::{rat, ratq, GaussRat, Rat};
pub use ratfn::{DivByZero, RatFn};
pub use series::{exp_linear, exp_linear_z, Coeff, MultiSeries, Role, SeriesError, SeriesSpec, ZLaurent};

use serde_json::{json, Value};

/// Canonical JSON for a polynomial: terms sorted by exponent vector, rationals as strings.
pub fn poly_json(p: &Poly, names: &[String]) -> Value {
    let terms: Vec<Value> = p
        .terms
        .iter()
        .map(|(m, c)| json!([m.0, rat::rat_to_string(c)]))
        .collect();
    json!({ "vars": names, "terms": terms })
}

pub fn ratfn_json(r: &RatFn, names: &[String]) -> Value {
    let r = r.normalized();
    json!({ "num": poly_json(&r.numer(), names), "den": poly_json(&r.denom(), names) })
}

/// Canonical JSON for a series, given a coefficient encoder.
pub fn series_json<V: Coeff>(s: &MultiSeries<V>, enc: &dyn Fn(&V) -> Value) -> Value {
    let vars: Vec<Value> = s.spec.vars.iter().map(|(n, r)| json!([n, format!("{:?}", r)])).collect();
    let trunc: serde_json::Map<String, Value> =
        s.spec.trunc.iter().map(|(r, b)| (format!("{:?}", r), json!(b))).collect();
    let terms: Vec<Value> = s.terms.iter().map(|(e, c)| json!([e, enc(c)])).collect();
    json!({ "vars": vars, "trunc": trunc, "terms": terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_json_is_sorted() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = y.add(&x.scale(&ratq(1, 2)));
        let v = poly_json(&p, &["x".into(), "y".into()]);
        assert_eq!(v.to_string(), r#"{"terms":[[[1,0],"1/2"],[[0,1],"1"]],"vars":["x","y"]}"#);
    }
}
