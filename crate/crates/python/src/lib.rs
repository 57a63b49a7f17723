//! Python bindings: groups, irrep tables, Fourier-algebra norms, induced
//! homomorphism norms, bijection scans, lemma checks and the reproduction
//! suite. Reports come back as plain dicts mirroring the CLI JSON.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use fdist_core::ascent::Effort;
use fdist_core::fourier::{self, AFunction, GroupAlgebraElement};
use fdist_core::group::{are_isomorphic, parse_group, FiniteGroup as CoreGroup, GroupBijection};
use fdist_core::homspace::{hom_norm_report, InducedHom};
use fdist_core::lemmas;
use fdist_core::linalg::C64;
use fdist_core::repr::{character_table, irreps_of, IrrepTable as CoreTable};
use fdist_core::reproduce::reproduce;
use fdist_core::search::{min_distortion, norm_gap_scan, SearchOptions};

fn err(e: fdist_core::Error) -> PyErr {
    match e {
        fdist_core::Error::NumericInput | fdist_core::Error::DegenerateSpectrum { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Converts a JSON document into nested Python dicts, lists and scalars.
pub fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any().unbind(),
            (None, Some(f)) => f.into_pyobject(py)?.into_any().unbind(),
            _ => py.None(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any().unbind()
        }
    })
}

fn report<T: serde::Serialize>(py: Python<'_>, x: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn effort(name: &str) -> PyResult<Effort> {
    Effort::from_name(name).ok_or_else(|| PyValueError::new_err(format!("unknown effort '{name}'")))
}

fn complex_values(values: Vec<(f64, f64)>) -> Vec<C64> {
    values.into_iter().map(|(re, im)| C64::new(re, im)).collect()
}

/// A finite group given by its multiplication table (identity at index 0).
#[pyclass(name = "Group", module = "fdist", frozen)]
pub struct Group {
    inner: CoreGroup,
}

#[pymethods]
impl Group {
    /// Parses a literal such as `"Z6"`, `"S3"`, `"D4"`, `"Q8"` or `"Z2xZ2"`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self { inner: parse_group(spec).map_err(err)? })
    }

    /// Builds a group from a table; rows and columns must be permutations.
    #[staticmethod]
    #[pyo3(signature = (table, label = "G"))]
    fn from_table(table: Vec<Vec<usize>>, label: &str) -> PyResult<Self> {
        Ok(Self { inner: CoreGroup::from_table(table, label).map_err(err)? })
    }

    /// Reads `{"order", "table", "label"}`.
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self { inner: CoreGroup::from_json(s).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    #[getter]
    fn table(&self) -> Vec<Vec<usize>> {
        self.inner.table().to_vec()
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.inner.mul(a, b)
    }

    fn inv(&self, a: usize) -> usize {
        self.inner.inv(a)
    }

    fn is_abelian(&self) -> bool {
        self.inner.is_abelian()
    }

    fn element_orders(&self) -> Vec<usize> {
        self.inner.element_orders()
    }

    fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        self.inner.conjugacy_classes()
    }

    /// An isomorphism `self → other` as an index map, or `None`.
    fn isomorphism_to(&self, other: &Group) -> PyResult<Option<Vec<usize>>> {
        are_isomorphic(&self.inner, &other.inner).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.order()
    }

    fn __repr__(&self) -> String {
        format!("Group('{}', order={})", self.inner.label(), self.inner.order())
    }
}

/// Unitary irreducible representations of a group, one per class.
#[pyclass(name = "IrrepTable", module = "fdist", frozen)]
pub struct IrrepTable {
    inner: CoreTable,
}

#[pymethods]
impl IrrepTable {
    #[new]
    #[pyo3(signature = (group, seed = 0))]
    fn new(group: &Group, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: irreps_of(&group.inner, seed).map_err(err)? })
    }

    /// Reads `{"dims", "matrices"}` for `group`.
    #[staticmethod]
    fn from_json(group: &Group, s: &str) -> PyResult<Self> {
        Ok(Self { inner: CoreTable::from_json(&group.inner, s).map_err(err)? })
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// `{"classes": [...], "values": [[[re, im], ...], ...]}`.
    fn character_table(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        report(py, &character_table(&self.inner))
    }

    /// Norm in `A(G)` of a function given by its values `[(re, im), ...]`.
    fn a_norm(&self, values: Vec<(f64, f64)>) -> PyResult<f64> {
        let f = AFunction::new(self.inner.group(), complex_values(values)).map_err(err)?;
        fourier::a_norm(&f, &self.inner).map_err(err)
    }

    /// Norm in `VN(G)` of `Σ c_g λ_g`.
    fn vn_norm(&self, coeffs: Vec<(f64, f64)>) -> PyResult<f64> {
        let x = GroupAlgebraElement::new(self.inner.group(), complex_values(coeffs)).map_err(err)?;
        fourier::vn_norm(&x, &self.inner).map_err(err)
    }

    /// Norm in `A(G)` of `f(k) = Σ_j a_j e^{2πijk/n}` (real `a_j`).
    fn a_norm_from_coeffs(&self, coeffs: Vec<f64>) -> PyResult<f64> {
        let c: Vec<C64> = coeffs.into_iter().map(|x| C64::new(x, 0.0)).collect();
        let f = AFunction::from_cyclic_expansion(self.inner.group(), &c).map_err(err)?;
        fourier::a_norm(&f, &self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("IrrepTable('{}', dims={:?})", self.inner.group().label(), self.inner.dims())
    }
}

/// Norms of `T f = f ∘ t` and `T⁻¹` for `t: target → source` given as
/// `bijection[h] = t(h)`.
#[pyfunction]
#[pyo3(signature = (source, target, bijection, levels = vec![1], effort = "default", seed = 0))]
fn hom_norm(
    py: Python<'_>,
    source: &Group,
    target: &Group,
    bijection: Vec<usize>,
    levels: Vec<usize>,
    effort: &str,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let e = self::effort(effort)?;
    let bij = GroupBijection::new(target.inner.clone(), source.inner.clone(), bijection).map_err(err)?;
    let rep = py
        .detach(|| InducedHom::from_bijection(bij, seed).and_then(|h| hom_norm_report(&h, &levels, &e, seed)))
        .map_err(err)?;
    report(py, &rep)
}

/// Every identity-fixing bijection between two groups of equal order.
#[pyfunction]
#[pyo3(signature = (source, target, level = 2, effort = "default", seed = 0))]
fn scan(py: Python<'_>, source: &Group, target: &Group, level: usize, effort: &str, seed: u64) -> PyResult<Py<PyAny>> {
    let opts = SearchOptions { effort: self::effort(effort)?, seed, ..Default::default() };
    let (g, h) = (source.inner.clone(), target.inner.clone());
    let res = py
        .detach(|| if level <= 1 { min_distortion(&g, &h, &opts) } else { norm_gap_scan(&g, &h, level, &opts) })
        .map_err(err)?;
    report(py, &res)
}

/// One of `invmult`, `unitmult` (random trials at `dim`) or `norm_gap`
/// (on `group`).
#[pyfunction]
#[pyo3(signature = (lemma, dim = 4, trials = 1000, seed = 0, group = None))]
fn verify_lemma(
    py: Python<'_>,
    lemma: &str,
    dim: usize,
    trials: usize,
    seed: u64,
    group: Option<&Group>,
) -> PyResult<Py<PyAny>> {
    let rep = match lemma {
        "invmult" => py.detach(|| lemmas::verify_invmult(dim, trials, seed)),
        "unitmult" => py.detach(|| lemmas::verify_unitmult(dim, trials, seed)),
        "norm_gap" => {
            let g = group.ok_or_else(|| PyValueError::new_err("norm_gap needs a group"))?.inner.clone();
            py.detach(|| irreps_of(&g, seed).and_then(|t| lemmas::verify_norm_gap(&t, trials, seed)))
        }
        other => return Err(PyValueError::new_err(format!("unknown lemma '{other}'"))),
    }
    .map_err(err)?;
    report(py, &rep)
}

/// Recomputes the reference examples; `all_pass` summarises the rows.
#[pyfunction]
#[pyo3(signature = (effort = "default", seed = 0))]
fn reproduce_paper(py: Python<'_>, effort: &str, seed: u64) -> PyResult<Py<PyAny>> {
    let e = self::effort(effort)?;
    let rep = py.detach(|| reproduce(&e, seed)).map_err(err)?;
    report(py, &rep)
}

#[pymodule]
#[pyo3(name = "fdist")]
fn fdist_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add_class::<IrrepTable>()?;
    m.add_function(wrap_pyfunction!(hom_norm, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lemma, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce_paper, m)?)?;
    m.add("SCHEMA", fdist_core::cli::SCHEMA)?;
    Ok(())
}
