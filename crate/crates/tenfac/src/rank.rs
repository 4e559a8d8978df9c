//! Selection of the per-mode factor numbers by penalized eigenvalue ratios.
//!
//! For each mode the selector maximizes `lambda_j / (lambda_{j+1} + c * delta)`
//! over `j = 1..r_max`, where `delta = 1/sqrt(T p_-k) + 1/p_k` keeps the ratio
//! from blowing up on the near-zero tail of the spectrum. The constant `c`
//! defaults to the average eigenvalue (trace / p_k) of the raw mode-k
//! covariance, which puts the penalty on the scale of a typical eigenvalue
//! and makes the selection invariant to rescaling the data.
//!
//! [`ie_er`] scans the raw mode-wise covariance. [`pe_er`] runs the iterative
//! projected variant: start every mode at `r_max`, project the data through
//! the current loadings, re-select each rank from the projected spectrum, and
//! refresh the loadings from the raw covariance at the new ranks, until the
//! ranks stabilize.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{mode_covariance, projected_covariance};
use crate::spectral::top_r_eigs;
use crate::tensor::{kron_excluding, Matrix, TensorSeries};

/// Selected ranks plus the ratio traces that produced them.
#[derive(Debug, Clone, Serialize)]
pub struct RankEstimate {
    /// Selected rank per mode.
    pub ranks: Vec<usize>,
    /// Penalized ratios evaluated at j = 1..r_max, per mode (final sweep).
    pub ratio_traces: Vec<Vec<f64>>,
    /// Projection sweeps performed (0 for the non-iterative selector).
    pub iterations: usize,
    /// Whether the iterative selector stabilized before the sweep limit.
    pub converged: bool,
}

/// Penalty `delta = 1/sqrt(T p_-k) + 1/p_k` for mode `k` (0-based).
pub fn penalty_delta(t_len: usize, dims: &[usize], k: usize) -> f64 {
    assert!(k < dims.len(), "mode {k} out of range");
    let p: usize = dims.iter().product();
    let p_k = dims[k];
    let p_minus = p / p_k;
    1.0 / ((t_len as f64) * (p_minus as f64)).sqrt() + 1.0 / (p_k as f64)
}

/// Default penalty constant: the trace of the covariance (equals the sum of
/// all its eigenvalues).
pub fn trace_constant(m: &Matrix) -> f64 {
    m.trace()
}

fn validate(x: &TensorSeries, r_max: usize) -> Result<()> {
    let dims = x.shape();
    if dims.len() < 2 {
        return Err(Error::domain("rank selection requires order K >= 2"));
    }
    if !x.all_finite() {
        return Err(Error::domain("series contains non-finite entries"));
    }
    if r_max < 1 {
        return Err(Error::domain("r_max must be at least 1"));
    }
    let p_min = *dims.iter().min().unwrap();
    if r_max >= p_min.min(x.len()) {
        return Err(Error::domain(format!(
            "r_max = {} must satisfy r_max < min(min_k p_k, T) = {}",
            r_max,
            p_min.min(x.len())
        )));
    }
    Ok(())
}

/// Penalized ratios at j = 1..r_max given eigenvalues `1..=r_max+1` and the
/// scaled penalty, and the arg-max with ties broken toward the smallest j.
fn select_from_spectrum(values: &[f64], penalty: f64, r_max: usize) -> (usize, Vec<f64>) {
    let mut trace = Vec::with_capacity(r_max);
    let mut best = 0usize;
    for j in 0..r_max {
        let ratio = values[j] / (values[j + 1] + penalty);
        trace.push(ratio);
        if ratio > trace[best] {
            best = j;
        }
    }
    (best + 1, trace)
}

/// Automatic penalty constant: the average eigenvalue of the covariance
/// being scanned.
fn auto_constant(cov: &Matrix) -> f64 {
    trace_constant(cov) / cov.nrows() as f64
}

/// Eigenvalue-ratio selector on the raw mode-wise covariance.
///
/// `c_override` replaces the automatic constant when given.
pub fn ie_er(x: &TensorSeries, r_max: usize, c_override: Option<f64>) -> Result<RankEstimate> {
    validate(x, r_max)?;
    let dims = x.shape().to_vec();
    let mut ranks = Vec::with_capacity(dims.len());
    let mut traces = Vec::with_capacity(dims.len());
    for k in 0..dims.len() {
        let cov = mode_covariance(x, k)?;
        if cov.trace() <= 0.0 {
            return Err(Error::domain(format!(
                "mode-{} covariance has zero trace",
                k + 1
            )));
        }
        let eig = top_r_eigs(&cov, r_max + 1)?;
        let c = c_override.unwrap_or_else(|| auto_constant(&cov));
        let penalty = c * penalty_delta(x.len(), &dims, k);
        let (r, trace) = select_from_spectrum(&eig.values, penalty, r_max);
        ranks.push(r);
        traces.push(trace);
    }
    Ok(RankEstimate {
        ranks,
        ratio_traces: traces,
        iterations: 0,
        converged: true,
    })
}

/// Iterative projected eigenvalue-ratio selector.
pub fn pe_er(
    x: &TensorSeries,
    r_max: usize,
    max_sweeps: usize,
    c_override: Option<f64>,
) -> Result<RankEstimate> {
    pe_er_opts(x, r_max, max_sweeps, c_override, false)
}

/// Like [`pe_er`]; when `update_from_projected` is set, the per-sweep loading
/// refresh uses the projected covariance instead of the raw one.
pub fn pe_er_opts(
    x: &TensorSeries,
    r_max: usize,
    max_sweeps: usize,
    c_override: Option<f64>,
    update_from_projected: bool,
) -> Result<RankEstimate> {
    validate(x, r_max)?;
    if max_sweeps < 1 {
        return Err(Error::domain("max_sweeps must be at least 1"));
    }
    let dims = x.shape().to_vec();
    let n_modes = dims.len();

    // Leading r_max eigenvectors of each raw covariance; sweeps refresh
    // loadings by taking prefixes of these. The penalty constant is also
    // pinned to the raw spectrum scale, once per mode.
    let mut raw_vectors = Vec::with_capacity(n_modes);
    let mut constants = Vec::with_capacity(n_modes);
    for (k, &dim) in dims.iter().enumerate() {
        let cov = mode_covariance(x, k)?;
        if cov.trace() <= 0.0 {
            return Err(Error::domain(format!(
                "mode-{} covariance has zero trace",
                k + 1
            )));
        }
        let eig = top_r_eigs(&cov, r_max)?;
        raw_vectors.push((dim as f64).sqrt() * eig.vectors);
        constants.push(c_override.unwrap_or_else(|| auto_constant(&cov)));
    }

    let mut current: Vec<usize> = vec![r_max; n_modes];
    let mut loadings: Vec<Matrix> = raw_vectors.clone();
    let mut traces: Vec<Vec<f64>> = vec![Vec::new(); n_modes];
    let mut sweeps = 0;
    let mut converged = false;

    while sweeps < max_sweeps {
        sweeps += 1;
        let mut next = Vec::with_capacity(n_modes);
        let mut next_loadings = Vec::with_capacity(n_modes);
        for k in 0..n_modes {
            let b = kron_excluding(&loadings, k)?;
            let cov = projected_covariance(x, k, &b)?;
            let eig = top_r_eigs(&cov, r_max + 1)?;
            let penalty = constants[k] * penalty_delta(x.len(), &dims, k);
            let (r, trace) = select_from_spectrum(&eig.values, penalty, r_max);
            traces[k] = trace;
            next.push(r);
            if update_from_projected {
                next_loadings.push((dims[k] as f64).sqrt() * eig.leading_vectors(r));
            } else {
                next_loadings.push(raw_vectors[k].columns(0, r).into_owned());
            }
        }
        let stable = next == current;
        current = next;
        loadings = next_loadings;
        if stable {
            converged = true;
            break;
        }
    }

    Ok(RankEstimate {
        ranks: current,
        ratio_traces: traces,
        iterations: sweeps,
        converged,
    })
}
