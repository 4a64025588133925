//! Python bindings. Rationals cross the boundary as `"n/d"` strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dirac_lattice::dirac::{self, ClassifiedConstraints, ConstraintClass};
use dirac_lattice::lattice::LatticeSpec;
use dirac_lattice::linalg::{self, parse_rational, Rational, SparseMatrix};
use dirac_lattice::phase_space::LinearFunctional;
use dirac_lattice::report::{self, ratio};
use dirac_lattice::theory::{self, TheorySpec};

fn err(e: dirac_lattice::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse(s: &str) -> PyResult<Rational> {
    parse_rational(s).ok_or_else(|| PyValueError::new_err(format!("not a rational: {s:?}")))
}

fn show(r: &Rational) -> String {
    ratio::to_string(r)
}

fn matrix(rows: Vec<Vec<String>>) -> PyResult<SparseMatrix> {
    let dense =
        rows.iter().map(|r| r.iter().map(|s| parse(s)).collect::<PyResult<Vec<_>>>()).collect::<PyResult<Vec<_>>>()?;
    Ok(SparseMatrix::from_dense(&dense))
}

#[pyclass(name = "Theory", frozen, skip_from_py_object)]
struct PyTheory {
    spec: TheorySpec,
}

#[pymethods]
impl PyTheory {
    /// Built-in theory (`paper_g0`, `maxwell1`).
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        theory::builtin(name)
            .map(|spec| PyTheory { spec })
            .ok_or_else(|| PyValueError::new_err(format!("unknown theory {name:?}")))
    }

    #[staticmethod]
    fn parse(document: &str) -> PyResult<Self> {
        theory::load_theory(document).map(|spec| PyTheory { spec }).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.spec.name.clone()
    }

    fn components(&self) -> Vec<String> {
        self.spec.component_labels()
    }

    fn to_text(&self) -> String {
        theory::emit_theory(&self.spec)
    }
}

#[pyclass(name = "ConstraintSystem", frozen)]
struct PyConstraintSystem {
    sys: dirac::ConstraintSystem,
    cc: ClassifiedConstraints,
}

#[pymethods]
impl PyConstraintSystem {
    /// Runs the constraint algorithm and classification on an `n³` lattice.
    #[new]
    fn new(py: Python<'_>, theory: &PyTheory, n: usize) -> PyResult<Self> {
        let spec = theory.spec.clone();
        py.detach(move || {
            let sys = dirac::run_algorithm(&spec, &LatticeSpec::spatial(n))?;
            let cc = dirac::classify(&sys)?;
            Ok(PyConstraintSystem { sys, cc })
        })
        .map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.sys.omega.dim()
    }

    #[getter]
    fn passes(&self) -> usize {
        self.sys.passes
    }

    fn coordinate_label(&self, index: usize) -> PyResult<String> {
        if index >= self.dim() {
            return Err(PyValueError::new_err(format!("coordinate {index} out of range")));
        }
        Ok(self.sys.catalog().label(index))
    }

    /// `(label, generation, class)` for the classified set, first class first.
    fn constraints(&self) -> Vec<(String, String, String)> {
        self.cc
            .final_set()
            .iter()
            .map(|c| {
                let class = match c.class {
                    ConstraintClass::First => "first",
                    ConstraintClass::Second => "second",
                    ConstraintClass::Unresolved => "unresolved",
                };
                (c.label.to_string(), format!("{:?}", c.generation), class.to_string())
            })
            .collect()
    }

    #[getter]
    fn first_class(&self) -> usize {
        self.cc.first_class.len()
    }

    #[getter]
    fn second_class(&self) -> usize {
        self.cc.second_class.len()
    }

    #[getter]
    fn reducibility(&self) -> usize {
        self.cc.reducibility_basis.len()
    }

    fn dof(&self) -> PyResult<i64> {
        dirac::count_dof(&self.cc).map(|c| c.dof_exact).map_err(err)
    }

    fn dof_oracle(&self) -> PyResult<i64> {
        dirac::dof_oracle(&self.sys).map_err(err)
    }

    fn algebra_closed(&self) -> PyResult<bool> {
        dirac::algebra_closure(&self.cc).map(|t| t.closed).map_err(err)
    }

    /// Poisson and Dirac brackets of two linear functionals given as
    /// `{coordinate: "n/d"}` maps.
    fn brackets(&self, f: Vec<(usize, String)>, g: Vec<(usize, String)>) -> PyResult<(String, String)> {
        let dim = self.dim();
        let lift = |v: Vec<(usize, String)>| -> PyResult<LinearFunctional> {
            let mut entries = Vec::with_capacity(v.len());
            for (i, s) in v {
                if i >= dim {
                    return Err(PyValueError::new_err(format!("coordinate {i} out of range")));
                }
                entries.push((i, parse(&s)?));
            }
            Ok(LinearFunctional::new(dim, entries))
        };
        let (f, g) = (lift(f)?, lift(g)?);
        let pb = self.sys.omega.poisson(&f, &g).map_err(err)?;
        let db = dirac::dirac_bracket(&f, &g, &self.cc).map_err(err)?;
        Ok((show(&pb), show(&db)))
    }
}

#[pyfunction]
fn rank(rows: Vec<Vec<String>>) -> PyResult<usize> {
    Ok(linalg::rank(&matrix(rows)?))
}

/// Right null-space basis, one dense row of `"n/d"` strings per vector.
#[pyfunction]
fn nullspace(rows: Vec<Vec<String>>) -> PyResult<Vec<Vec<String>>> {
    let m = matrix(rows)?;
    Ok(linalg::nullspace(&m)
        .iter()
        .map(|v| linalg::dense_from_sparse(v, m.ncols()).iter().map(show).collect())
        .collect())
}

/// Full analysis as a JSON document.
#[pyfunction]
#[pyo3(signature = (theory, n, t = 2, seed = 0))]
fn analyze(py: Python<'_>, theory: &PyTheory, n: usize, t: usize, seed: u64) -> PyResult<String> {
    let spec = theory.spec.clone();
    py.detach(move || report::analyze(&spec, n, t, seed)).map(|r| report::to_json(&r)).map_err(err)
}

/// One property suite (`all`, `gauge`, `symplectic`, `dirac`) as a JSON document.
#[pyfunction]
#[pyo3(signature = (theory, suite, n, t = 2, seed = 0))]
fn verify(py: Python<'_>, theory: &PyTheory, suite: &str, n: usize, t: usize, seed: u64) -> PyResult<String> {
    let spec = theory.spec.clone();
    let suite = suite.parse().map_err(err)?;
    py.detach(move || report::verify(&spec, suite, n, t, seed)).map(|r| report::to_json(&r)).map_err(err)
}

#[pymodule]
fn dirac_lattice_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTheory>()?;
    m.add_class::<PyConstraintSystem>()?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(nullspace, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
