//! Python bindings: signatures, terms in both representations,
//! substitution, folds, law suites, and the PCF translation pipeline.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use bindsig::laws::{run_law_suites, LawSuiteOptions};
use bindsig::models::fold;
use bindsig::scoped;
use bindsig::signature;
use bindsig::typed::pcf;
use bindsig::typed::{Context, TypedTerm};
use bindsig::unscoped;

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// An untyped binding signature: labels with per-argument binder counts.
#[pyclass(name = "Signature", frozen)]
struct PySignature {
    inner: signature::BindingSignature,
}

#[pymethods]
impl PySignature {
    /// Parses `(sig (<label> <n>...) ...)`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PySignature { inner: signature::parse_signature(text).map_err(value_err)? })
    }

    /// The lambda-calculus signature: app with two arguments, abs
    /// binding one variable.
    #[staticmethod]
    fn lc() -> Self {
        PySignature { inner: signature::lc_signature() }
    }

    /// Labels with their binder lists, in signature order.
    fn labels(&self) -> Vec<(String, Vec<usize>)> {
        self.inner
            .labels()
            .map(|(l, a)| (l.to_string(), a.binders().to_vec()))
            .collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Signature({})", self.inner)
    }
}

/// A well-scoped de Bruijn term.
#[pyclass(name = "ScopedTerm", frozen, from_py_object)]
#[derive(Clone)]
struct PyScopedTerm {
    inner: scoped::ScopedTerm,
}

#[pymethods]
impl PyScopedTerm {
    /// Parses and validates a term at the given scope.
    #[staticmethod]
    fn parse(sig: &PySignature, text: &str, scope: usize) -> PyResult<Self> {
        Ok(PyScopedTerm {
            inner: scoped::ScopedTerm::parse(&sig.inner, text, scope).map_err(value_err)?,
        })
    }

    #[getter]
    fn scope(&self) -> usize {
        self.inner.scope()
    }

    fn size(&self) -> usize {
        self.inner.size()
    }

    /// Simultaneous substitution: one entry per scope slot, all entries
    /// at `target_scope`.
    fn substitute(&self, entries: Vec<PyScopedTerm>, target_scope: usize) -> PyResult<Self> {
        let entries = entries.into_iter().map(|e| e.inner).collect();
        let subst = scoped::Subst::new(entries, target_scope).map_err(value_err)?;
        Ok(PyScopedTerm { inner: self.inner.substitute(&subst).map_err(value_err)? })
    }

    fn rename(&self, rho: Vec<usize>, target_scope: usize) -> PyResult<Self> {
        Ok(PyScopedTerm { inner: self.inner.rename(&rho, target_scope).map_err(value_err)? })
    }

    fn weaken(&self, k: usize) -> Self {
        PyScopedTerm { inner: self.inner.weaken(k) }
    }

    fn to_unscoped(&self) -> PyUnscopedTerm {
        PyUnscopedTerm { inner: self.inner.to_unscoped() }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }

    fn __eq__(&self, other: &PyScopedTerm) -> bool {
        self.inner == other.inner
    }
}

/// An unscoped de Bruijn term.
#[pyclass(name = "UnscopedTerm", frozen, from_py_object)]
#[derive(Clone)]
struct PyUnscopedTerm {
    inner: unscoped::UnscopedTerm,
}

#[pymethods]
impl PyUnscopedTerm {
    #[staticmethod]
    fn parse(sig: &PySignature, text: &str) -> PyResult<Self> {
        Ok(PyUnscopedTerm {
            inner: unscoped::UnscopedTerm::parse(&sig.inner, text).map_err(value_err)?,
        })
    }

    /// Least scope containing every free index.
    fn support(&self) -> usize {
        self.inner.support()
    }

    fn size(&self) -> usize {
        self.inner.size()
    }

    fn to_scoped(&self) -> PyScopedTerm {
        PyScopedTerm { inner: self.inner.to_scoped() }
    }

    fn to_scoped_at(&self, scope: usize) -> PyResult<PyScopedTerm> {
        Ok(PyScopedTerm { inner: self.inner.to_scoped_at(scope).map_err(value_err)? })
    }

    /// Applies the substitution `i -> prefix[i]`, variables shifted by
    /// `shift` beyond the prefix.
    fn subst(&self, prefix: Vec<PyUnscopedTerm>, shift: usize) -> Self {
        let prefix = prefix.into_iter().map(|e| e.inner).collect();
        PyUnscopedTerm { inner: self.inner.subst(&unscoped::UnscopedSubst::new(prefix, shift)) }
    }

    /// Normal-order reduction to β-normal form; raises ValueError when
    /// the fuel runs out.
    #[pyo3(signature = (fuel = pcf::DEFAULT_BETA_FUEL))]
    fn beta_normalize(&self, fuel: u32) -> PyResult<Self> {
        Ok(PyUnscopedTerm { inner: pcf::beta_normalize(&self.inner, fuel).map_err(value_err)? })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }

    fn __eq__(&self, other: &PyUnscopedTerm) -> bool {
        self.inner == other.inner
    }
}

/// All terms of at most `max_nodes` nodes at the scope, in enumeration
/// order.
#[pyfunction]
fn enumerate_terms(sig: &PySignature, scope: usize, max_nodes: usize) -> Vec<PyScopedTerm> {
    scoped::enumerate_terms(&sig.inner, scope, max_nodes)
        .into_iter()
        .map(|inner| PyScopedTerm { inner })
        .collect()
}

/// Runs the law suites; returns (law, passed, samples) triples.
#[pyfunction]
#[pyo3(signature = (sig, samples = 1000, seed = 42, max_nodes = 5))]
fn check_laws(
    sig: &PySignature,
    samples: usize,
    seed: u64,
    max_nodes: usize,
) -> Vec<(String, bool, usize)> {
    run_law_suites(&sig.inner, &LawSuiteOptions { samples, seed, max_nodes })
        .into_iter()
        .map(|r| (r.law.clone(), r.passed(), r.samples))
        .collect()
}

/// The rendered closed-terms-vs-equalizer report.
#[pyfunction]
fn intersectionality_report(sig: &PySignature, max_nodes: usize) -> String {
    unscoped::intersectionality_check(&sig.inner, max_nodes).to_string()
}

/// Folds a term into the argument-swapping model.
#[pyfunction]
fn fold_swap(sig: &PySignature, term: &PyScopedTerm) -> PyResult<PyScopedTerm> {
    let model = bindsig::models::swap_model(&sig.inner).map_err(value_err)?;
    Ok(PyScopedTerm { inner: fold(&model, &term.inner).map_err(value_err)? })
}

/// Translates a typed PCF term (s-expression text, context as a list of
/// type s-expressions) to an untyped λ-term.
#[pyfunction]
#[pyo3(signature = (term, ctx = Vec::new()))]
fn pcf_to_ulc(term: &str, ctx: Vec<String>) -> PyResult<PyUnscopedTerm> {
    let types = ctx
        .iter()
        .map(|t| signature::parse_type_str(t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(value_err)?;
    let context = Context::new(types);
    let typed =
        TypedTerm::parse(&signature::pcf_signature(), term, &context).map_err(value_err)?;
    Ok(PyUnscopedTerm { inner: pcf::pcf_to_ulc(&typed).map_err(value_err)? })
}

#[pyfunction]
fn church_true() -> PyUnscopedTerm {
    PyUnscopedTerm { inner: pcf::church_true() }
}

#[pyfunction]
fn church_false() -> PyUnscopedTerm {
    PyUnscopedTerm { inner: pcf::church_false() }
}

#[pyfunction]
fn church_nat(n: usize) -> PyUnscopedTerm {
    PyUnscopedTerm { inner: pcf::church_nat(n) }
}

#[pyfunction]
fn y_combinator() -> PyUnscopedTerm {
    PyUnscopedTerm { inner: pcf::y_combinator() }
}

#[pymodule]
fn bindsig_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySignature>()?;
    m.add_class::<PyScopedTerm>()?;
    m.add_class::<PyUnscopedTerm>()?;
    m.add_function(wrap_pyfunction!(enumerate_terms, m)?)?;
    m.add_function(wrap_pyfunction!(check_laws, m)?)?;
    m.add_function(wrap_pyfunction!(intersectionality_report, m)?)?;
    m.add_function(wrap_pyfunction!(fold_swap, m)?)?;
    m.add_function(wrap_pyfunction!(pcf_to_ulc, m)?)?;
    m.add_function(wrap_pyfunction!(church_true, m)?)?;
    m.add_function(wrap_pyfunction!(church_false, m)?)?;
    m.add_function(wrap_pyfunction!(church_nat, m)?)?;
    m.add_function(wrap_pyfunction!(y_combinator, m)?)?;
    Ok(())
}
