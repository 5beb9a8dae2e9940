//! Python bindings. Structured inputs (models, families, colorings) are
//! passed as JSON text in the same formats the command line reads.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use sqrank::builder::DEFAULT_BUDGET;
use sqrank::coloring::{embeds_patterns, PairColoring};
use sqrank::encode::SquareWitness;
use sqrank::rank::RankParams;
use sqrank::search::{ChainMode, FiniteFunction};
use sqrank::structure::{ClosureThreshold, FiniteModel, ModelLimits};
use sqrank::tree::TreeFamily;
use sqrank::treedeg::{DegValue, PfapEntry};
use sqrank::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Input(_) | Error::Validation(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse(text: &str) -> PyResult<serde_json::Value> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn params(variant: u8, closure: usize) -> PyResult<RankParams> {
    RankParams::new(variant, ClosureThreshold::new(closure).map_err(py_err)?).map_err(py_err)
}

fn model(text: &str, max_arity: usize) -> PyResult<FiniteModel> {
    FiniteModel::from_json(parse(text)?, ModelLimits { max_arity }).map_err(py_err)
}

fn family(text: &str) -> PyResult<TreeFamily> {
    TreeFamily::from_json(parse(text)?).map_err(py_err)
}

fn degree(d: DegValue) -> Option<i64> {
    match d {
        DegValue::Fin(v) => Some(v),
        DegValue::Bottom => None,
    }
}

/// Rank of the whole model.
#[pyfunction]
#[pyo3(signature = (model_json, variant=0, closure=2, max_arity=4))]
fn model_rank(model_json: &str, variant: u8, closure: usize, max_arity: usize) -> PyResult<i32> {
    sqrank::rank::model_rank(&model(model_json, max_arity)?, &params(variant, closure)?).map_err(py_err)
}

/// `(set, rank)` for every nonempty set, sets as sorted element lists.
#[pyfunction]
#[pyo3(signature = (model_json, variant=0, closure=2, max_arity=4))]
fn rank_table(model_json: &str, variant: u8, closure: usize, max_arity: usize) -> PyResult<Vec<(Vec<usize>, i32)>> {
    let t = sqrank::rank::rank_table(&model(model_json, max_arity)?, &params(variant, closure)?).map_err(py_err)?;
    Ok(t.entries().collect())
}

/// Square degree of a family, or of one entry; `None` stands for bottom.
#[pyfunction]
#[pyo3(signature = (family_json, entry_json=None))]
fn degsq(family_json: &str, entry_json: Option<&str>) -> PyResult<Option<i64>> {
    let fam = family(family_json)?;
    let d = match entry_json {
        Some(e) => {
            let entry = PfapEntry::from_json(parse(e)?).map_err(py_err)?;
            sqrank::treedeg::degsq_pair(&fam, &entry).map_err(py_err)?
        }
        None => sqrank::treedeg::degsq_family(&fam),
    };
    Ok(degree(d))
}

/// Family of square degree `alpha`, as JSON.
#[pyfunction]
#[pyo3(signature = (alpha, budget=DEFAULT_BUDGET))]
fn build_family(alpha: usize, budget: usize) -> PyResult<String> {
    let report = sqrank::builder::build_family(alpha, budget).map_err(py_err)?;
    Ok(report.family.to_json().to_string())
}

/// Points of the lexicographically least largest square.
#[pyfunction]
#[pyo3(signature = (family_json, cap=None))]
fn find_max_square(family_json: &str, cap: Option<usize>) -> PyResult<Vec<String>> {
    let s = sqrank::search::find_max_square(&family(family_json)?, cap).map_err(py_err)?;
    Ok(s.witness.map(|w| w.points().iter().map(|p| p.to_string()).collect()).unwrap_or_default())
}

/// Extraction outcome as JSON, tagged by `"outcome"`. Without a witness the
/// largest square is used.
#[pyfunction]
#[pyo3(signature = (family_json, depth, quota=1, witness_json=None))]
fn extract_square(family_json: &str, depth: usize, quota: usize, witness_json: Option<&str>) -> PyResult<String> {
    let fam = family(family_json)?;
    let w = match witness_json {
        Some(w) => SquareWitness::from_json(&fam, parse(w)?).map_err(py_err)?,
        None => sqrank::search::find_max_square(&fam, None)
            .map_err(py_err)?
            .witness
            .ok_or_else(|| PyValueError::new_err("the family has no square"))?,
    };
    let out = sqrank::search::extract_square_chain(&fam, &w, depth, quota, ChainMode::Witness).map_err(py_err)?;
    Ok(serde_json::to_string(&out).expect("outcome serializes"))
}

/// Least free set of size `target`; functions as `(arity, table)` pairs.
#[pyfunction]
fn find_free_set(universe: usize, functions: Vec<(usize, Vec<usize>)>, target: usize) -> PyResult<Option<Vec<usize>>> {
    let fs = functions
        .into_iter()
        .map(|(a, t)| FiniteFunction::new(universe, a, t))
        .collect::<sqrank::Result<Vec<_>>>()
        .map_err(py_err)?;
    sqrank::search::find_free_set(universe, &fs, target).map_err(py_err)
}

/// Whether every source pattern of at most `max_pattern` points occurs in the
/// target.
#[pyfunction]
#[pyo3(signature = (target_json, source_json, max_pattern=None))]
fn embeds(target_json: &str, source_json: &str, max_pattern: Option<usize>) -> PyResult<bool> {
    let t = PairColoring::from_json_str(target_json).map_err(py_err)?;
    let s = PairColoring::from_json_str(source_json).map_err(py_err)?;
    Ok(embeds_patterns(&t, &s, max_pattern.unwrap_or(s.size())).embeds)
}

#[pymodule]
fn sqrank_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(model_rank, m)?)?;
    m.add_function(wrap_pyfunction!(rank_table, m)?)?;
    m.add_function(wrap_pyfunction!(degsq, m)?)?;
    m.add_function(wrap_pyfunction!(build_family, m)?)?;
    m.add_function(wrap_pyfunction!(find_max_square, m)?)?;
    m.add_function(wrap_pyfunction!(extract_square, m)?)?;
    m.add_function(wrap_pyfunction!(find_free_set, m)?)?;
    m.add_function(wrap_pyfunction!(embeds, m)?)?;
    Ok(())
}
