//! Thin Python wrapper. Configs go in and reports come out as JSON strings,
//! so the Python side only needs `json`.

use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use grflop::exact::rat::rat_to_string;
use grflop::pipeline::{self, Format, RunConfig, Selector};
use grflop::FlopError;

fn err(e: FlopError) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        4 => PyArithmeticError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn cfg(config_json: Option<&str>) -> PyResult<RunConfig> {
    let c = match config_json {
        Some(s) => RunConfig::from_json_str(s).map_err(err)?,
        None => RunConfig::default(),
    };
    c.validate().map_err(err)?;
    Ok(c)
}

fn dump(v: &serde_json::Value) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

#[pyfunction]
pub fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Psi integral over the genus-zero moduli space, as a fraction string.
#[pyfunction]
pub fn point_psi(exponents: Vec<u32>) -> String {
    rat_to_string(&grflop::cone::point_psi_oracle(&exponents))
}

#[pyfunction]
#[pyo3(signature = (order=6))]
pub fn cone_demo(order: u32) -> PyResult<String> {
    let (_, js) = grflop::cone::demo_point(order).map_err(err)?;
    Ok(dump(&js))
}

#[pyfunction]
#[pyo3(signature = (config_json=None))]
pub fn chow_report(config_json: Option<&str>) -> PyResult<String> {
    let c = cfg(config_json)?;
    let (a, da) = pipeline::stage_chow(&c).map_err(err)?;
    let (b, db) = pipeline::stage_pairing(&c).map_err(err)?;
    Ok(dump(&serde_json::json!({ "ok": a && b, "chow": da, "pairing": db, "param_stamp": c.param_stamp() })))
}

#[pyfunction]
#[pyo3(signature = (config_json=None))]
pub fn abelianize_report(py: Python<'_>, config_json: Option<&str>) -> PyResult<String> {
    let c = cfg(config_json)?;
    py.allow_threads(|| {
        let runs = pipeline::exact_runs(&c)?;
        let (a, da) = pipeline::stage_abelianize(&runs);
        let (b, db) = pipeline::stage_anti(&c, &runs)?;
        let (d, dd) = pipeline::stage_bigness(&runs)?;
        Ok(dump(&serde_json::json!({
            "ok": a && b && d, "formulas": da, "divisibility": db, "bigness": dd, "param_stamp": c.param_stamp(),
        })))
    })
    .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (config_json=None))]
pub fn continuation_report(py: Python<'_>, config_json: Option<&str>) -> PyResult<String> {
    let c = cfg(config_json)?;
    let rep = py.allow_threads(|| grflop::hyper::run_continuation(c.k, c.n, &c.numeric())).map_err(err)?;
    let mut v = serde_json::to_value(&rep).unwrap_or_default();
    v["gamma_ok"] = rep.gamma_ok().into();
    v["delta_ok"] = rep.delta_ok().into();
    v["properties_ok"] = rep.properties_ok().into();
    v["param_stamp"] = c.param_stamp();
    Ok(dump(&v))
}

/// (closed-form error, series-vs-ODE error) for the hypergeometric engine.
#[pyfunction]
#[pyo3(signature = (draws=100, seed=7, precision=128))]
pub fn ode_oracle(py: Python<'_>, draws: usize, seed: u64, precision: usize) -> PyResult<(f64, f64)> {
    let r = py.allow_threads(|| grflop::hyper::ode_oracle(draws, seed, precision)).map_err(err)?;
    Ok((r.closed_form, r.series_vs_ode))
}

/// selector: "ifun-plus", "ifun-minus" or "U"; fmt: "json" or "csv".
#[pyfunction]
#[pyo3(signature = (selector, fmt="json", config_json=None))]
pub fn emit(py: Python<'_>, selector: &str, fmt: &str, config_json: Option<&str>) -> PyResult<String> {
    let c = cfg(config_json)?;
    let sel: Selector = selector.parse().map_err(err)?;
    let f = match fmt {
        "json" => Format::Json,
        "csv" => Format::Csv,
        o => return Err(PyValueError::new_err(format!("unknown format {o:?}"))),
    };
    py.allow_threads(|| match sel {
        Selector::IfunPlus => pipeline::emit_ifun(&c, grflop::chow::Side::Plus, f),
        Selector::IfunMinus => pipeline::emit_ifun(&c, grflop::chow::Side::Minus, f),
        Selector::U => {
            let rep = pipeline::continuation_cached(&c, pipeline::Cache::from_env().as_ref(), false)?;
            pipeline::emit_u(&c, &rep, f)
        }
    })
    .map_err(err)
}

#[pymodule]
pub fn pyflop(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(version, m)?)?;
    m.add_function(wrap_pyfunction!(point_psi, m)?)?;
    m.add_function(wrap_pyfunction!(cone_demo, m)?)?;
    m.add_function(wrap_pyfunction!(chow_report, m)?)?;
    m.add_function(wrap_pyfunction!(abelianize_report, m)?)?;
    m.add_function(wrap_pyfunction!(continuation_report, m)?)?;
    m.add_function(wrap_pyfunction!(ode_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(emit, m)?)?;
    Ok(())
}
