//! Python bindings for the `isotropy` core crate.

use ::isotropy::cli;
use ::isotropy::field::parse_ratfunc;
use ::isotropy::moduli::{cartan_check, identity_check, liouville_lambda, pullback_omega, symplectic_omega};
use ::isotropy::residue::{self, OneForm};
use ::isotropy::scenario::{parse_scenario, Scenario as CoreScenario};
use ::isotropy::solver::build_section_space;
use ::isotropy::Error;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(isotropy, IsotropyError, PyException);

fn py_err(e: Error) -> PyErr {
    IsotropyError::new_err(e.to_string())
}

fn form(text: &str) -> PyResult<OneForm> {
    Ok(OneForm::new(parse_ratfunc(text, "z").map_err(py_err)?))
}

/// Canonical form of a rational function in `var`.
#[pyfunction]
#[pyo3(signature = (text, var = "z"))]
fn normalize(text: &str, var: &str) -> PyResult<String> {
    Ok(parse_ratfunc(text, var).map_err(py_err)?.display_in(var))
}

/// Residues of `f(z) dz` at every pole, infinity included, as `(point, value)` strings.
#[pyfunction]
fn residues(f: &str) -> PyResult<Vec<(String, String)>> {
    let rs = residue::residues(&form(f)?).map_err(py_err)?;
    Ok(rs.into_iter().map(|(p, r)| (p.to_string(), r.to_string())).collect())
}

#[pyfunction]
fn residue_sum(f: &str) -> PyResult<String> {
    Ok(residue::residue_sum(&form(f)?).map_err(py_err)?.to_string())
}

/// Run the command-line tool in-process; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run(argv: Vec<String>) -> (i32, String, String) {
    let out = cli::run(std::iter::once("isotropy".to_string()).chain(argv));
    (out.code, out.stdout, out.stderr)
}

/// A parsed and validated scenario.
#[pyclass(frozen)]
struct Scenario {
    inner: CoreScenario,
}

#[pymethods]
impl Scenario {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Scenario { inner: parse_scenario(text).map_err(py_err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| IsotropyError::new_err(format!("{path}: {e}")))?;
        Self::from_json(&text)
    }

    /// One of the bundled fixtures: `f1`, `f2` or `f3`.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        Ok(Scenario { inner: CoreScenario::fixture(name).map_err(py_err)? })
    }

    #[getter]
    fn name(&self) -> Option<String> {
        self.inner.name.clone()
    }

    #[getter]
    fn algebra(&self) -> String {
        self.inner.rep.algebra().name().to_string()
    }

    #[getter]
    fn representation(&self) -> String {
        self.inner.rep.name().to_string()
    }

    #[getter]
    fn marked_points(&self) -> Vec<String> {
        self.inner.curve.points().iter().map(|p| p.to_string()).collect()
    }

    fn section_dimension(&self) -> PyResult<usize> {
        let bundle = self.inner.bundle.as_ref().ok_or_else(|| IsotropyError::new_err("scenario has no explicit bundle"))?;
        Ok(build_section_space(bundle, self.inner.bounds).map_err(py_err)?.dim())
    }

    fn liouville(&self) -> PyResult<String> {
        let (p, t1, _) = self.inner.higgs_instance().map_err(py_err)?;
        Ok(liouville_lambda(&p, &t1).map_err(py_err)?.to_string())
    }

    fn omega(&self) -> PyResult<String> {
        let (p, t1, t2) = self.inner.higgs_instance().map_err(py_err)?;
        Ok(symplectic_omega(&p, &t1, &t2).map_err(py_err)?.to_string())
    }

    fn pullback_omega(&self) -> PyResult<String> {
        let (p, t1, t2) = self.inner.y_instance().map_err(py_err)?;
        Ok(pullback_omega(&p, &t1, &t2).map_err(py_err)?.to_string())
    }

    /// Per-point residuals of the local identity, as a JSON string.
    fn check_identity(&self) -> PyResult<String> {
        let (p, t1, t2) = self.inner.y_instance().map_err(py_err)?;
        let r = identity_check(&p, &t1, &t2).map_err(py_err)?;
        Ok(serde_json::to_string(&r).expect("report serializes"))
    }

    /// The three Cartan terms, their alternating sum and Omega, as a JSON string.
    fn check_cartan(&self) -> PyResult<String> {
        let (p, t1, t2) = self.inner.higgs_instance().map_err(py_err)?;
        let r = cartan_check(&p, &t1, &t2).map_err(py_err)?;
        Ok(serde_json::to_string(&r).expect("report serializes"))
    }

    fn __repr__(&self) -> String {
        format!("Scenario({:?}, {})", self.inner.name.as_deref().unwrap_or(""), self.inner.rep.name())
    }
}

#[pymodule(name = "isotropy")]
fn isotropy_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("IsotropyError", m.py().get_type::<IsotropyError>())?;
    m.add_class::<Scenario>()?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(residues, m)?)?;
    m.add_function(wrap_pyfunction!(residue_sum, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
