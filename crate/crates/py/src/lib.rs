//! Python bindings for the prime-gap analysis toolkit.
//!
//! Structured results (claim outcomes, bound reports, threshold analyses)
//! cross the boundary as plain dicts and lists mirroring the JSON schemas of
//! the command-line tool.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use andrica_lab::claims::ClaimId;
use andrica_lab::error::Error;
use andrica_lab::gaps::StatsAccumulator;
use andrica_lab::report::{run_verify_fresh, RunConfig};

fn to_py_err(err: Error) -> PyErr {
    match &err {
        Error::Domain(_)
        | Error::UnknownClaim(_)
        | Error::ArgumentOrder { .. }
        | Error::PlanMismatch { .. } => PyValueError::new_err(err.to_string()),
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    Ok(match value {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().unbind().into_any(),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.unbind().into_any()
            } else if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.unbind().into_any()
            } else {
                n.as_f64()
                    .unwrap_or(f64::NAN)
                    .into_pyobject(py)?
                    .unbind()
                    .into_any()
            }
        }
        Value::String(s) => s.into_pyobject(py)?.unbind().into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.unbind().into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.unbind().into_any()
        }
    })
}

fn serialize_to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let json = serde_json::to_value(value)
        .map_err(|e| PyRuntimeError::new_err(format!("serialization: {e}")))?;
    json_to_py(py, &json)
}

#[pyfunction]
fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// All primes up to and including `limit`.
#[pyfunction]
fn primes_up_to(limit: u64) -> PyResult<Vec<u64>> {
    let primes = andrica_lab::primes_up_to(limit).map_err(to_py_err)?;
    Ok(primes.into_iter().map(|e| e.value).collect())
}

/// The 1-based n-th prime.
#[pyfunction]
fn nth_prime(n: u64) -> PyResult<u64> {
    andrica_lab::nth_prime(n).map_err(to_py_err)
}

/// Exact count of primes <= x.
#[pyfunction]
fn prime_count(x: u64) -> PyResult<u64> {
    andrica_lab::prime_count(x).map_err(to_py_err)
}

/// The x / ln x approximation to the prime counting function.
#[pyfunction]
fn pi_approx(x: f64) -> PyResult<f64> {
    andrica_lab::pi_approx(x).map_err(to_py_err)
}

/// sqrt(q) - sqrt(p) for primes q > p >= 2, evaluated cancellation-free.
#[pyfunction]
fn h_value(p: u64, q: u64) -> PyResult<f64> {
    andrica_lab::h_value(p, q).map_err(to_py_err)
}

/// q^x - p^x for q > p >= 2 and 0 < x < 1.
#[pyfunction]
fn h_general(p: u64, q: u64, x: f64) -> PyResult<f64> {
    andrica_lab::h_general(p, q, x).map_err(to_py_err)
}

/// (n, p_n, p_next, g, h) for one gap record.
type GapTuple = (u64, u64, u64, u64, f64);

/// Gap records up to the limit as (n, p_n, p_next, g, h) tuples.
#[pyfunction]
fn gap_records(limit: u64) -> PyResult<Vec<GapTuple>> {
    let recs = andrica_lab::gap_records(limit).map_err(to_py_err)?;
    Ok(recs.map(|r| (r.n, r.p_n, r.p_next, r.g, r.h)).collect())
}

/// Final running statistics after folding every gap up to the limit.
#[pyfunction]
fn running_stats(py: Python<'_>, limit: u64) -> PyResult<Py<PyAny>> {
    let mut acc = StatsAccumulator::new(1e-12);
    let mut last = None;
    for rec in andrica_lab::gap_records(limit).map_err(to_py_err)? {
        last = Some(acc.update(&rec).map_err(to_py_err)?);
    }
    let row = last.ok_or_else(|| PyValueError::new_err("no records in range"))?;
    let dict = PyDict::new(py);
    dict.set_item("n", row.n)?;
    dict.set_item("sum_g", row.sum_g)?;
    dict.set_item("sum_h", row.sum_h.sum())?;
    dict.set_item("g_bar", row.g_bar)?;
    dict.set_item("h_bar", row.h_bar)?;
    Ok(dict.unbind().into_any())
}

/// Record gaps, record h values, and the below-one fraction up to the limit.
#[pyfunction]
fn track_records(py: Python<'_>, limit: u64) -> PyResult<Py<PyAny>> {
    let tracker =
        andrica_lab::records(andrica_lab::gap_records(limit).map_err(to_py_err)?)
            .map_err(to_py_err)?;
    let fraction = andrica_lab::fraction_below_one(&tracker).map_err(to_py_err)?;
    let mut value = serde_json::to_value(&tracker)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    value["fraction_below_one"] = serde_json::json!(fraction);
    json_to_py(py, &value)
}

/// Evaluate one ledger claim ("ANDRICA", "AVG_MONOTONE", ...) up to the limit.
#[pyfunction]
fn check_claim(py: Python<'_>, claim: &str, limit: u64) -> PyResult<Py<PyAny>> {
    let id: ClaimId = claim.parse().map_err(to_py_err)?;
    let outcome = andrica_lab::check_claim(id, limit).map_err(to_py_err)?;
    serialize_to_py(py, &outcome)
}

/// Evaluate the whole claim ledger in one pass up to the limit.
#[pyfunction]
fn verify_all(py: Python<'_>, limit: u64) -> PyResult<Py<PyAny>> {
    let outcomes = andrica_lab::verify_all(limit).map_err(to_py_err)?;
    serialize_to_py(py, &outcomes)
}

/// Run the ledger and return the full report (claims, fraction, exit policy).
#[pyfunction]
#[pyo3(signature = (limit, parallelism = 1))]
fn verify_report(py: Python<'_>, limit: u64, parallelism: usize) -> PyResult<Py<PyAny>> {
    let config = RunConfig { limit, parallelism, ..RunConfig::default() };
    let (report, _) = run_verify_fresh(&config).map_err(to_py_err)?;
    let mut value = serde_json::to_value(&report)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    value["exit_code"] = serde_json::json!(report.exit_code());
    json_to_py(py, &value)
}

/// The claim catalog as (name, inequality, expected-status) triples.
#[pyfunction]
fn claim_catalog() -> Vec<(String, String, String)> {
    andrica_lab::claim_catalog()
        .into_iter()
        .map(|(id, source, status)| {
            let status = serde_json::to_value(status)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default();
            (id.name().to_string(), source.to_string(), status)
        })
        .collect()
}

/// All bound expressions at one caller-certified pair (k, p_k).
#[pyfunction]
fn evaluate_bounds(py: Python<'_>, k: u64, p_k: u64) -> PyResult<Py<PyAny>> {
    let eval = andrica_lab::evaluate_bounds(k, p_k).map_err(to_py_err)?;
    serialize_to_py(py, &eval)
}

/// Sweep the k-th-prime bounds up to k_max; returns the violation list.
#[pyfunction]
fn check_bounds(py: Python<'_>, k_max: u64) -> PyResult<Py<PyAny>> {
    let report = andrica_lab::check_bounds(k_max).map_err(to_py_err)?;
    serialize_to_py(py, &report)
}

/// Threshold analysis for exponent x in (0, 1).
#[pyfunction]
fn threshold_n0(py: Python<'_>, x: f64) -> PyResult<Py<PyAny>> {
    let analysis = andrica_lab::threshold_n0(x).map_err(to_py_err)?;
    serialize_to_py(py, &analysis)
}

/// Check the power-x inequality over every gap up to the limit.
#[pyfunction]
fn check_generalized(py: Python<'_>, x: f64, limit: u64) -> PyResult<Py<PyAny>> {
    let outcome = andrica_lab::check_generalized(x, limit).map_err(to_py_err)?;
    serialize_to_py(py, &outcome)
}

#[pymodule]
fn andrica_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(version, m)?)?;
    m.add_function(wrap_pyfunction!(primes_up_to, m)?)?;
    m.add_function(wrap_pyfunction!(nth_prime, m)?)?;
    m.add_function(wrap_pyfunction!(prime_count, m)?)?;
    m.add_function(wrap_pyfunction!(pi_approx, m)?)?;
    m.add_function(wrap_pyfunction!(h_value, m)?)?;
    m.add_function(wrap_pyfunction!(h_general, m)?)?;
    m.add_function(wrap_pyfunction!(gap_records, m)?)?;
    m.add_function(wrap_pyfunction!(running_stats, m)?)?;
    m.add_function(wrap_pyfunction!(track_records, m)?)?;
    m.add_function(wrap_pyfunction!(check_claim, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    m.add_function(wrap_pyfunction!(verify_report, m)?)?;
    m.add_function(wrap_pyfunction!(claim_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(check_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_n0, m)?)?;
    m.add_function(wrap_pyfunction!(check_generalized, m)?)?;
    Ok(())
}
