//! Python bindings: `import vfp`.

#[pyo3::pymodule]
pub mod vfp {
    use pyo3::exceptions::{PyRuntimeError, PyValueError};
    use pyo3::prelude::*;
    use pyo3::types::PyDict;
    use vfp_core::{
        find_fixed_points, lambda_c_report, map_derivative, mean_field_map, run,
        stationary_density, validate_assumptions, ConfiningPotential, InitialCondition,
        InteractionPotential, Mode, Observers, ParticleEnsemble, SelfConsistencyProblem, SimConfig,
        VfpError,
    };

    fn py_err(e: VfpError) -> PyErr {
        use VfpError::*;
        match e {
            InvalidSpec(_)
            | InvalidParameter(_)
            | GridTooCoarse { .. }
            | InvalidPotential(_)
            | NotInPotentialClass(_)
            | ConditionViolated(_)
            | UnboundedSup { .. }
            | NoTransition { .. } => PyValueError::new_err(e.to_string()),
            _ => PyRuntimeError::new_err(e.to_string()),
        }
    }

    /// Mean-field self-consistency problem with `ψ = (α/2)x²`.
    #[pyclass(frozen, name = "Problem")]
    struct Problem {
        inner: SelfConsistencyProblem,
    }

    #[pymethods]
    impl Problem {
        /// `potential[k]` multiplies `x^k`. `test_only` skips the structural assumptions.
        #[new]
        #[pyo3(signature = (potential, alpha, lambda_, test_only = false))]
        fn new(potential: Vec<f64>, alpha: f64, lambda_: f64, test_only: bool) -> PyResult<Self> {
            let v = ConfiningPotential::new(potential).map_err(py_err)?;
            let psi = InteractionPotential::quadratic(alpha);
            let inner = if test_only {
                SelfConsistencyProblem::test_only(v, psi, lambda_)
            } else {
                SelfConsistencyProblem::new(v, psi, lambda_)
            }
            .map_err(py_err)?;
            Ok(Self { inner })
        }

        #[getter]
        fn lambda_(&self) -> f64 {
            self.inner.lambda
        }

        fn mean_field_map(&self, m: f64) -> PyResult<f64> {
            mean_field_map(&self.inner, m).map_err(py_err)
        }

        fn map_derivative(&self, m: f64) -> PyResult<f64> {
            map_derivative(&self.inner, m).map_err(py_err)
        }

        /// `[(m, stability, residual)]`, ascending in `m`.
        fn fixed_points(&self, py: Python<'_>) -> PyResult<Vec<(f64, String, f64)>> {
            let set = py
                .detach(|| find_fixed_points(&self.inner))
                .map_err(py_err)?;
            Ok(set
                .points
                .iter()
                .map(|fp| (fp.m, fp.stability.as_str().to_owned(), fp.residual))
                .collect())
        }

        /// `(nodes, density)` of the Gibbs measure with trial mean `m`.
        fn stationary_density(&self, m: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
            let mu = stationary_density(&self.inner, m).map_err(py_err)?;
            Ok((mu.nodes, mu.density))
        }
    }

    /// `[(assumption, passed, detail)]` for `V` and `ψ = (α/2)x²`.
    #[pyfunction]
    fn validate(potential: Vec<f64>, alpha: f64) -> PyResult<Vec<(String, bool, String)>> {
        let v = ConfiningPotential::new(potential).map_err(py_err)?;
        let report = validate_assumptions(&v, &InteractionPotential::quadratic(alpha));
        Ok(report
            .checks
            .into_iter()
            .map(|c| (c.assumption.to_string(), c.passed, c.detail))
            .collect())
    }

    /// Critical temperature report: `z_implicit`, `lambda_oracle` and their ratio.
    #[pyfunction]
    fn lambda_c<'py>(
        py: Python<'py>,
        potential: Vec<f64>,
        alpha: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let v = ConfiningPotential::new(potential).map_err(py_err)?;
        let r = py.detach(|| lambda_c_report(&v, alpha)).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("alpha", r.alpha)?;
        d.set_item("z_implicit", r.z_implicit)?;
        d.set_item("lambda_oracle", r.lambda_oracle)?;
        d.set_item("ratio", r.ratio)?;
        Ok(d)
    }

    /// Particle run from a point start; returns the time-averaged statistics.
    #[pyfunction]
    #[pyo3(signature = (potential, alpha, lambda_, particles, steps, dt = 1e-3, kinetic = true, start = 0.0, seed = 0))]
    #[allow(clippy::too_many_arguments)]
    fn simulate<'py>(
        py: Python<'py>,
        potential: Vec<f64>,
        alpha: f64,
        lambda_: f64,
        particles: usize,
        steps: u64,
        dt: f64,
        kinetic: bool,
        start: f64,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let v = ConfiningPotential::new(potential).map_err(py_err)?;
        let psi = InteractionPotential::quadratic(alpha);
        let mode = if kinetic {
            Mode::Kinetic
        } else {
            Mode::Overdamped
        };
        let report = py
            .detach(|| {
                let mut ens = ParticleEnsemble::new(
                    particles,
                    1,
                    mode,
                    InitialCondition::Point(start),
                    lambda_,
                    seed,
                )?;
                let cfg = SimConfig::new(dt, steps, mode, lambda_, seed);
                run(&mut ens, &cfg, &v, &psi, &Observers::default())
            })
            .map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("mean", report.mean)?;
        d.set_item("variance", report.variance)?;
        d.set_item("momentum_variance", report.momentum_variance)?;
        d.set_item("standard_error", report.standard_error)?;
        d.set_item("samples", report.samples)?;
        d.set_item("warnings", report.warnings)?;
        Ok(d)
    }

    #[pymodule_init]
    fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
        m.add("__version__", env!("CARGO_PKG_VERSION"))
    }
}
