use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

#[test]
fn module_exposes_core_api() {
    Python::initialize();
    Python::attach(|py| {
        let m = pyo3::wrap_pymodule!(vfp::vfp)(py);
        let m = m.bind(py);
        for name in ["Problem", "validate", "lambda_c", "simulate", "__version__"] {
            assert!(m.hasattr(name).unwrap(), "{name}");
        }
        let problem = m.getattr("Problem").unwrap();
        let p = problem
            .call1((vec![0.0, 0.0, -0.5, 0.0, 0.25], 1.0, 0.1))
            .unwrap();
        let fps: Vec<(f64, String, f64)> =
            p.call_method0("fixed_points").unwrap().extract().unwrap();
        assert_eq!(fps.len(), 3);
        assert_eq!(fps[1].0, 0.0);
        assert_eq!(fps[0].0, -fps[2].0);
        let phi: f64 = p
            .call_method1("mean_field_map", (0.0,))
            .unwrap()
            .extract()
            .unwrap();
        assert_eq!(phi, 0.0);
        let err = problem
            .call1((vec![0.0, 1.0, 0.0, 1.0], 1.0, 0.1))
            .unwrap_err();
        assert!(err.is_instance_of::<PyValueError>(py));
    });
}

#[test]
fn lambda_c_ratio_is_reported() {
    Python::initialize();
    Python::attach(|py| {
        let m = pyo3::wrap_pymodule!(vfp::vfp)(py);
        let d = m
            .bind(py)
            .getattr("lambda_c")
            .unwrap()
            .call1((vec![0.0, 0.0, -0.5, 0.0, 0.25], 1.0))
            .unwrap();
        let ratio: f64 = d.get_item("ratio").unwrap().extract().unwrap();
        assert!((ratio - 2.0).abs() < 1e-3);
    });
}
