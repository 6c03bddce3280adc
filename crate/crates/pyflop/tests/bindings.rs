//! Calls the bindings through an embedded interpreter.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

#[test]
fn psi_and_version() {
    assert_eq!(pyflop::point_psi(vec![0, 0, 0]), "1");
    assert_eq!(pyflop::point_psi(vec![1, 0, 0, 0]), "1");
    assert_eq!(pyflop::point_psi(vec![2, 0, 0, 0]), "0");
    assert!(!pyflop::version().is_empty());
}

#[test]
fn module_imports_and_runs() {
    Python::with_gil(|py| {
        let m = pyo3::wrap_pymodule!(pyflop::pyflop)(py);
        let m = m.bind(py);
        let s: String = m.getattr("point_psi").unwrap().call1((vec![1u32, 1, 0, 0, 0],)).unwrap().extract().unwrap();
        assert_eq!(s, "2");
        let js: String = m.getattr("cone_demo").unwrap().call0().unwrap().extract().unwrap();
        let v: serde_json::Value = serde_json::from_str(&js).unwrap();
        assert_eq!(v["transcript"]["round_trip_ok"], serde_json::Value::Bool(true));
    });
}

#[test]
fn errors_map_to_python_types() {
    Python::with_gil(|py| {
        let e = pyflop::emit(py, "nonsense", "json", None).unwrap_err();
        assert!(e.is_instance_of::<PyValueError>(py));
        let e = pyflop::chow_report(Some(r#"{"k": 3, "n": 3}"#)).unwrap_err();
        assert!(e.is_instance_of::<PyValueError>(py));
    });
}

#[test]
fn chow_report_default() {
    let js = pyflop::chow_report(None).unwrap();
    let v: serde_json::Value = serde_json::from_str(&js).unwrap();
    assert_eq!(v["ok"], serde_json::Value::Bool(true));
}
