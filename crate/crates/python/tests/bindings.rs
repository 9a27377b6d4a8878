use pyo3::prelude::*;
use pyo3::types::PyModule;

const SCRIPT: &str = r#"
lab = pynbval.Lab(SCENARIO)
assert lab.lower_breaks == [1, 5], lab.lower_breaks
assert lab.upper_breaks == [(1, 1), (3, 1)]
assert lab.degree == 4 and lab.b_max == 5
assert lab.nb_test_monomial([1, 0])["verdict"]["status"] == "non_generator"
assert lab.nb_test_monomial([1, 1])["verdict"]["status"] == "generator"
assert lab.nbtest(5, trials=6, seed=2)["payload"]["sweep"]["report"]["generator"] == 6
try:
    lab.verify("nonsense")
    raise AssertionError("unknown suite accepted")
except pynbval.InvalidInputError:
    pass
"#;

#[test]
fn module_round_trip() {
    Python::initialize();
    Python::attach(|py| {
        let module = PyModule::new(py, "pynbval").unwrap();
        pynbval::init(&module).unwrap();
        let globals = pyo3::types::PyDict::new(py);
        globals.set_item("pynbval", module).unwrap();
        globals.set_item("SCENARIO", include_str!("../../../scenarios/as_breaks_1_5.toml")).unwrap();
        let code = std::ffi::CString::new(SCRIPT).unwrap();
        py.run(&code, Some(&globals), None).unwrap_or_else(|e| panic!("{e}"));
    });
}
