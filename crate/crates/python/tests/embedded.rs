use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(code: &str) -> PyResult<()> {
    Python::initialize();
    Python::attach(|py| {
        let m = pyo3::wrap_pymodule!(speclab_py::speclab_py)(py);
        let globals = PyDict::new(py);
        globals.set_item("sl", m)?;
        let code = std::ffi::CString::new(code).unwrap();
        py.run(&code, Some(&globals), None)
    })
}

#[test]
fn field_round_trip_and_energy() {
    with_module(
        r#"
u = sl.SpectralField.sine(12, 0.7)
v = sl.SpectralField.from_values(u.values())
assert max(abs(a - b) for a, b in zip(u.coeffs(), v.coeffs())) < 1e-15
assert abs(u.coeff(1) + 0.35j) < 1e-15
r = sl.burgers_rhs(u, "sv", 1)
assert r.degree == 12
assert abs(u.inner_product(sl.burgers_rhs(u))) < 1e-14
"#,
    )
    .unwrap();
}

#[test]
fn errors_map_to_python_exceptions() {
    with_module(
        r#"
for bad in (lambda: sl.SpectralField([1, 2]), lambda: sl.burgers_rhs(sl.SpectralField.sine(4, 1.0), "upwind"),
            lambda: sl.resolve_config("nope")):
    try:
        bad()
        raise AssertionError("no error")
    except ValueError:
        pass
"#,
    )
    .unwrap();
}

#[test]
fn experiment_tables_are_exposed() {
    with_module(
        r#"
r = sl.run_experiment("euler2d-taylor-green", overrides={"N": "8", "tend": "0.1"})
assert r.exit_code == 0
s = r.table("summary.csv")
assert s["variant"] == ["spectral", "two-thirds"]
assert max(s["l2_deviation"]) < 1e-6
assert r.csv("summary.csv").startswith("variant,N,dt,")
"#,
    )
    .unwrap();
}
