//! Loading-space and factor estimation for Tucker tensor factor models.
//!
//! The observed series is modeled as `X_t = F_t x_1 A_1 ... x_K A_K + E_t`
//! with per-mode loading matrices `A_k` (p_k x r_k) and a latent core tensor
//! `F_t`. Loadings are identified up to rotation by `A_k^T A_k / p_k = I`.
//!
//! Four estimators are provided, all reducing to eigendecompositions of
//! covariance-like matrices:
//!
//! * [`initial_loadings`] — PCA on the scaled mode-wise sample covariance
//!   `(1/(Tp)) sum_t X_{k,t} X_{k,t}^T`.
//! * [`projected_loadings`] — one-step projection: the data are compressed
//!   through the other modes' initial loadings before the mode-wise PCA,
//!   which raises the signal-to-noise ratio.
//! * [`projected_loadings_star`] — same projection step, but the compression
//!   matrix is estimated directly from the co-mode covariance
//!   `(1/(Tp)) sum_t X_{k,t}^T X_{k,t}` instead of being assembled from the
//!   other modes' loadings.
//! * [`iterative_loadings`] — repeats the projection step, feeding each
//!   step's loadings into the next, with early stopping on the subspace
//!   distance between consecutive steps.
//!
//! Factors are recovered by linear projection, `F_t = (1/p) X_t x_k A_k^T`,
//! and the common component by `S_t = F_t x_k A_k`.

use crate::error::{Error, Result};
use crate::eval::loading_distance;
use crate::spectral::top_r_eigs;
use crate::tensor::{kron_excluding, DenseTensor, Matrix, TensorSeries};

/// Default size cap on the co-mode covariance materialized by
/// [`projected_loadings_star`].
pub const DEFAULT_STAR_CAP: usize = 4096;

/// Default early-stopping tolerance for [`iterative_loadings`], measured as
/// the largest per-mode subspace distance between consecutive steps.
pub const DEFAULT_ITERATE_TOL: f64 = 1e-6;

/// Per-mode loading matrices `A_1..A_K` with their ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingSet {
    mats: Vec<Matrix>,
}

impl LoadingSet {
    pub fn new(mats: Vec<Matrix>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::domain("loading set must cover at least one mode"));
        }
        if mats.iter().any(|m| m.nrows() == 0 || m.ncols() == 0) {
            return Err(Error::domain("loading matrices must be non-empty"));
        }
        Ok(Self { mats })
    }

    pub fn order(&self) -> usize {
        self.mats.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.mats.iter().map(Matrix::nrows).collect()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.mats.iter().map(Matrix::ncols).collect()
    }

    pub fn mats(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn mat(&self, k: usize) -> &Matrix {
        &self.mats[k]
    }

    /// The compression matrix `B_k`: Kronecker product of the other modes'
    /// loadings in descending mode order.
    pub fn kron_excluding(&self, k: usize) -> Result<Matrix> {
        kron_excluding(&self.mats, k)
    }

    /// Product of the ranks over all modes but `k`.
    pub fn rank_excluding(&self, k: usize) -> usize {
        self.ranks()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &r)| r)
            .product()
    }
}

/// Estimator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Mode-wise PCA on the raw covariance ("ie").
    Initial,
    /// One-step projected estimator ("pe").
    Projected,
    /// Projected estimator with the eigenvector-based compression ("pe-star").
    ProjectedStar,
    /// Multi-step projection with early stopping ("iterate:S").
    Iterative { max_steps: usize },
}

impl Method {
    pub fn tag(&self) -> String {
        match self {
            Method::Initial => "ie".into(),
            Method::Projected => "pe".into(),
            Method::ProjectedStar => "pe-star".into(),
            Method::Iterative { max_steps } => format!("iterate:{max_steps}"),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.tag())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ie" => Ok(Method::Initial),
            "pe" => Ok(Method::Projected),
            "pe-star" => Ok(Method::ProjectedStar),
            _ => {
                if let Some(steps) = s.strip_prefix("iterate:") {
                    let max_steps: usize = steps.parse().map_err(|_| {
                        Error::domain(format!("invalid iteration count in estimator '{s}'"))
                    })?;
                    if max_steps == 0 {
                        return Err(Error::domain("iterate:S requires S >= 1"));
                    }
                    Ok(Method::Iterative { max_steps })
                } else {
                    Err(Error::domain(format!(
                        "unknown estimator '{s}' (expected ie, pe, pe-star or iterate:S)"
                    )))
                }
            }
        }
    }
}

/// Options shared by the fitting entry point.
#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Subtract the per-entry time mean before fitting.
    pub center: bool,
    /// Divide each entry by its per-entry standard deviation over time.
    pub scale: bool,
    /// Early-stopping tolerance for the iterative estimator.
    pub iterate_tol: f64,
    /// Size cap for the co-mode covariance of the star estimator.
    pub star_cap: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            center: false,
            scale: false,
            iterate_tol: DEFAULT_ITERATE_TOL,
            star_cap: DEFAULT_STAR_CAP,
        }
    }
}

/// A fitted tensor factor model.
#[derive(Debug, Clone)]
pub struct TfmFit {
    pub loadings: LoadingSet,
    /// Estimated factor series, shape `r_1 x ... x r_K`.
    pub factors: TensorSeries,
    /// Per-mode leading eigenvalues of the covariance that defined the
    /// loadings (diagnostics).
    pub eigenvalues: Vec<Vec<f64>>,
    pub method: Method,
    /// Projection sweeps performed (0 for the initial estimator).
    pub iterations_used: usize,
}

impl TfmFit {
    /// Reconstructs the common component `S_t = F_t x_k A_k`.
    pub fn common_components(&self) -> Result<TensorSeries> {
        reconstruct_common(&self.loadings, &self.factors)
    }
}

/// Result of the multi-step estimator: the loadings after every step
/// (index 0 is the initial estimator) and the number of sweeps performed.
#[derive(Debug, Clone)]
pub struct IterativeFit {
    pub history: Vec<LoadingSet>,
    pub steps_used: usize,
}

impl IterativeFit {
    pub fn loadings(&self) -> &LoadingSet {
        self.history.last().expect("history is never empty")
    }
}

fn validate_series(x: &TensorSeries, ranks: &[usize]) -> Result<()> {
    let dims = x.shape();
    if dims.len() < 2 {
        return Err(Error::domain("estimators require tensors of order K >= 2"));
    }
    if x.len() < 2 {
        return Err(Error::domain("estimators require T >= 2 time slices"));
    }
    if ranks.len() != dims.len() {
        return Err(Error::domain(format!(
            "{} ranks given for an order-{} tensor",
            ranks.len(),
            dims.len()
        )));
    }
    let t_len = x.len();
    for (k, (&r, &p)) in ranks.iter().zip(dims).enumerate() {
        let p_minus: usize = dims.iter().product::<usize>() / p;
        let cap = p.min(t_len * p_minus);
        if r < 1 || r > cap {
            return Err(Error::domain(format!(
                "rank {} for mode {} violates 1 <= r_k <= min(p_k, T * p_-k) = {}",
                r,
                k + 1,
                cap
            )));
        }
    }
    if !x.all_finite() {
        return Err(Error::domain("series contains non-finite entries"));
    }
    Ok(())
}

/// Scaled mode-wise sample covariance `(1/(Tp)) sum_t X_{k,t} X_{k,t}^T`.
pub(crate) fn mode_covariance(x: &TensorSeries, k: usize) -> Result<Matrix> {
    let pk = x.shape()[k];
    let mut acc = Matrix::zeros(pk, pk);
    for t in 0..x.len() {
        let u = x.slice(t).unfold(k)?;
        acc.gemm(1.0, &u, &u.transpose(), 1.0);
    }
    let denom = (x.len() * x.slice_len()) as f64;
    Ok(acc / denom)
}

/// Co-mode covariance `(1/(Tp)) sum_t X_{k,t}^T X_{k,t}` (p_-k x p_-k).
fn comode_covariance(x: &TensorSeries, k: usize) -> Result<Matrix> {
    let p_minus = x.slice_len() / x.shape()[k];
    let mut acc = Matrix::zeros(p_minus, p_minus);
    for t in 0..x.len() {
        let u = x.slice(t).unfold(k)?;
        acc.gemm(1.0, &u.transpose(), &u, 1.0);
    }
    let denom = (x.len() * x.slice_len()) as f64;
    Ok(acc / denom)
}

/// Covariance of the projected data: with `Y_{k,t} = (1/p_-k) X_{k,t} B`,
/// returns `(1/(T p_k)) sum_t Y_{k,t} Y_{k,t}^T`.
pub(crate) fn projected_covariance(x: &TensorSeries, k: usize, b: &Matrix) -> Result<Matrix> {
    let pk = x.shape()[k];
    let p_minus = x.slice_len() / pk;
    if b.nrows() != p_minus {
        return Err(Error::domain(format!(
            "projection matrix has {} rows, expected p_-k = {}",
            b.nrows(),
            p_minus
        )));
    }
    let mut acc = Matrix::zeros(pk, pk);
    for t in 0..x.len() {
        let y = x.slice(t).unfold(k)? * b;
        acc.gemm(1.0, &y, &y.transpose(), 1.0);
    }
    let denom = x.len() as f64 * pk as f64 * (p_minus as f64) * (p_minus as f64);
    Ok(acc / denom)
}

fn loadings_from_cov(cov: &Matrix, r: usize, k: usize) -> Result<(Matrix, Vec<f64>)> {
    if cov.trace() <= 0.0 {
        return Err(Error::domain(format!(
            "mode-{} covariance has zero trace; the data carry no signal to decompose",
            k + 1
        )));
    }
    let eig = top_r_eigs(cov, r)?;
    let scale = (cov.nrows() as f64).sqrt();
    Ok((scale * eig.leading_vectors(r), eig.values))
}

pub(crate) fn initial_with_diagnostics(
    x: &TensorSeries,
    ranks: &[usize],
) -> Result<(LoadingSet, Vec<Vec<f64>>)> {
    validate_series(x, ranks)?;
    let mut mats = Vec::with_capacity(ranks.len());
    let mut eigs = Vec::with_capacity(ranks.len());
    for (k, &r) in ranks.iter().enumerate() {
        let cov = mode_covariance(x, k)?;
        let (a, values) = loadings_from_cov(&cov, r, k)?;
        mats.push(a);
        eigs.push(values);
    }
    Ok((LoadingSet::new(mats)?, eigs))
}

/// Mode-wise PCA estimator: `A_k = sqrt(p_k) U_k` with `U_k` the leading
/// eigenvectors of the scaled mode-wise sample covariance.
pub fn initial_loadings(x: &TensorSeries, ranks: &[usize]) -> Result<LoadingSet> {
    initial_with_diagnostics(x, ranks).map(|(l, _)| l)
}

pub(crate) fn project_all(
    x: &TensorSeries,
    ranks: &[usize],
    init: &LoadingSet,
) -> Result<(LoadingSet, Vec<Vec<f64>>)> {
    validate_series(x, ranks)?;
    if init.dims() != x.shape() {
        return Err(Error::domain(
            "initial loadings do not match the series shape",
        ));
    }
    if init.ranks() != ranks {
        return Err(Error::domain(
            "initial loadings do not match the requested ranks",
        ));
    }
    let t_len = x.len();
    let mut mats = Vec::with_capacity(ranks.len());
    let mut eigs = Vec::with_capacity(ranks.len());
    for (k, &r) in ranks.iter().enumerate() {
        let r_minus = init.rank_excluding(k);
        if t_len * r_minus < r {
            return Err(Error::domain(format!(
                "projected covariance for mode {} is rank-deficient: T * r_-k = {} < r_k = {}",
                k + 1,
                t_len * r_minus,
                r
            )));
        }
        let b = init.kron_excluding(k)?;
        let cov = projected_covariance(x, k, &b)?;
        let (a, values) = loadings_from_cov(&cov, r, k)?;
        mats.push(a);
        eigs.push(values);
    }
    Ok((LoadingSet::new(mats)?, eigs))
}

/// One-step projected estimator. Every mode is projected through the same
/// `init` loadings (no sequential plug-in within the step).
pub fn projected_loadings(
    x: &TensorSeries,
    ranks: &[usize],
    init: &LoadingSet,
) -> Result<LoadingSet> {
    project_all(x, ranks, init).map(|(l, _)| l)
}

pub(crate) fn project_all_star(
    x: &TensorSeries,
    ranks: &[usize],
    cap: usize,
) -> Result<(LoadingSet, Vec<Vec<f64>>)> {
    validate_series(x, ranks)?;
    let dims = x.shape().to_vec();
    let p: usize = dims.iter().product();
    let t_len = x.len();
    let mut mats = Vec::with_capacity(ranks.len());
    let mut eigs = Vec::with_capacity(ranks.len());
    for (k, &r) in ranks.iter().enumerate() {
        let p_minus = p / dims[k];
        if p_minus > cap {
            return Err(Error::Resource(format!(
                "mode-{} co-mode covariance would be {p_minus}x{p_minus}, above the cap of {cap}; \
                 use the standard projected estimator (pe) instead",
                k + 1
            )));
        }
        let r_minus: usize = ranks
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &rj)| rj)
            .product();
        if r_minus > p_minus {
            return Err(Error::domain(format!(
                "mode-{} compression rank r_-k = {} exceeds p_-k = {}",
                k + 1,
                r_minus,
                p_minus
            )));
        }
        if t_len * r_minus < r {
            return Err(Error::domain(format!(
                "projected covariance for mode {} is rank-deficient: T * r_-k = {} < r_k = {}",
                k + 1,
                t_len * r_minus,
                r
            )));
        }
        let comode = comode_covariance(x, k)?;
        if comode.trace() <= 0.0 {
            return Err(Error::domain(format!(
                "mode-{} co-mode covariance has zero trace",
                k + 1
            )));
        }
        let eig = top_r_eigs(&comode, r_minus)?;
        let b_star = (p_minus as f64).sqrt() * eig.leading_vectors(r_minus);
        let cov = projected_covariance(x, k, &b_star)?;
        let (a, values) = loadings_from_cov(&cov, r, k)?;
        mats.push(a);
        eigs.push(values);
    }
    Ok((LoadingSet::new(mats)?, eigs))
}

/// Projected estimator with the compression matrix taken as
/// `sqrt(p_-k)` times the leading eigenvectors of the co-mode covariance.
///
/// The co-mode covariance is `p_-k x p_-k`; it is only materialized while
/// `p_-k` stays under [`DEFAULT_STAR_CAP`]. Use
/// [`projected_loadings_star_with_cap`] to override.
pub fn projected_loadings_star(x: &TensorSeries, ranks: &[usize]) -> Result<LoadingSet> {
    projected_loadings_star_with_cap(x, ranks, DEFAULT_STAR_CAP)
}

pub fn projected_loadings_star_with_cap(
    x: &TensorSeries,
    ranks: &[usize],
    cap: usize,
) -> Result<LoadingSet> {
    project_all_star(x, ranks, cap).map(|(l, _)| l)
}

/// Multi-step projection: step 0 is the initial estimator, each later step
/// re-projects every mode through the previous step's loadings. Stops early
/// once the largest per-mode subspace distance between consecutive steps
/// falls below `tol`, or after `max_steps` sweeps.
pub fn iterative_loadings(
    x: &TensorSeries,
    ranks: &[usize],
    max_steps: usize,
    tol: f64,
) -> Result<IterativeFit> {
    if max_steps < 1 {
        return Err(Error::domain(
            "iterative estimation requires max_steps >= 1",
        ));
    }
    let (step0, _) = initial_with_diagnostics(x, ranks)?;
    let mut history = vec![step0];
    let mut steps_used = 0;
    for s in 1..=max_steps {
        let prev = history.last().unwrap();
        let (next, _) = project_all(x, ranks, prev)?;
        // A fixed point is only observable between two projection sweeps, so
        // the stopping rule starts at the second one.
        let converged = if s >= 2 {
            let mut delta: f64 = 0.0;
            for k in 0..ranks.len() {
                delta = delta.max(loading_distance(next.mat(k), prev.mat(k))?);
            }
            delta < tol
        } else {
            false
        };
        history.push(next);
        steps_used = s;
        if converged {
            break;
        }
    }
    Ok(IterativeFit {
        history,
        steps_used,
    })
}

/// Factor estimate by linear projection: `F_t = (1/p) X_t x_1 A_1^T ... x_K A_K^T`.
pub fn estimate_factors(x: &TensorSeries, loadings: &LoadingSet) -> Result<TensorSeries> {
    if loadings.dims() != x.shape() {
        return Err(Error::domain(format!(
            "loading dims {:?} do not match series shape {:?}",
            loadings.dims(),
            x.shape()
        )));
    }
    let p = x.slice_len() as f64;
    let transposed: Vec<Matrix> = loadings.mats().iter().map(Matrix::transpose).collect();
    x.map_slices(|slice| {
        let mut f = slice.clone();
        for (k, at) in transposed.iter().enumerate() {
            f = f.mode_product(at, k)?;
        }
        f.scale(1.0 / p);
        Ok(f)
    })
}

/// Common-component reconstruction `S_t = F_t x_1 A_1 ... x_K A_K`.
pub fn reconstruct_common(loadings: &LoadingSet, factors: &TensorSeries) -> Result<TensorSeries> {
    if loadings.ranks() != factors.shape() {
        return Err(Error::domain(format!(
            "loading ranks {:?} do not match factor shape {:?}",
            loadings.ranks(),
            factors.shape()
        )));
    }
    factors.map_slices(|f| {
        let mut s = f.clone();
        for (k, a) in loadings.mats().iter().enumerate() {
            s = s.mode_product(a, k)?;
        }
        Ok(s)
    })
}

/// Projects one slice onto the loading space and reconstructs it:
/// `X_hat = ((1/p) X x_k A_k^T) x_k A_k`. Used by rolling validation.
pub fn project_reconstruct(slice: &DenseTensor, loadings: &LoadingSet) -> Result<DenseTensor> {
    if loadings.dims() != slice.shape() {
        return Err(Error::domain("loading dims do not match slice shape"));
    }
    let p = slice.len() as f64;
    let mut f = slice.clone();
    for (k, a) in loadings.mats().iter().enumerate() {
        f = f.mode_product(&a.transpose(), k)?;
    }
    f.scale(1.0 / p);
    let mut s = f;
    for (k, a) in loadings.mats().iter().enumerate() {
        s = s.mode_product(a, k)?;
    }
    Ok(s)
}

/// Per-entry standardization over time: optionally subtract the time mean
/// and/or divide by the per-entry standard deviation (computed about the
/// mean, denominator T). Entries with zero variance are left unscaled.
pub fn standardize(x: &TensorSeries, center: bool, scale: bool) -> Result<TensorSeries> {
    if !center && !scale {
        return Ok(x.clone());
    }
    let n = x.slice_len();
    let t_len = x.len() as f64;
    let mut mean = vec![0.0; n];
    for t in 0..x.len() {
        for (m, v) in mean.iter_mut().zip(x.slice(t).data()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= t_len;
    }
    let mut sd = vec![1.0; n];
    if scale {
        let mut var = vec![0.0; n];
        for t in 0..x.len() {
            for ((v, d), m) in var.iter_mut().zip(x.slice(t).data()).zip(&mean) {
                let c = d - m;
                *v += c * c;
            }
        }
        for (s, v) in sd.iter_mut().zip(&var) {
            let d = (v / t_len).sqrt();
            if d > 0.0 {
                *s = d;
            }
        }
    }
    x.map_slices(|slice| {
        let data: Vec<f64> = slice
            .data()
            .iter()
            .zip(&mean)
            .zip(&sd)
            .map(|((v, m), s)| {
                let c = if center { v - m } else { *v };
                if scale {
                    c / s
                } else {
                    c
                }
            })
            .collect();
        DenseTensor::new(slice.shape().to_vec(), data)
    })
}

/// Fits the model with the chosen estimator and recovers the factor series.
pub fn fit(x: &TensorSeries, ranks: &[usize], method: Method, opts: &FitOptions) -> Result<TfmFit> {
    let prepared;
    let input = if opts.center || opts.scale {
        prepared = standardize(x, opts.center, opts.scale)?;
        &prepared
    } else {
        x
    };

    let (loadings, eigenvalues, iterations_used) = match method {
        Method::Initial => {
            let (l, e) = initial_with_diagnostics(input, ranks)?;
            (l, e, 0)
        }
        Method::Projected => {
            let (init, _) = initial_with_diagnostics(input, ranks)?;
            let (l, e) = project_all(input, ranks, &init)?;
            (l, e, 1)
        }
        Method::ProjectedStar => {
            let (l, e) = project_all_star(input, ranks, opts.star_cap)?;
            (l, e, 1)
        }
        Method::Iterative { max_steps } => {
            let fit = iterative_loadings(input, ranks, max_steps, opts.iterate_tol)?;
            let loadings = fit.loadings().clone();
            // Diagnostics for the final step's defining covariance.
            let eigs = final_step_eigenvalues(input, ranks, &fit)?;
            (loadings, eigs, fit.steps_used)
        }
    };

    let factors = estimate_factors(input, &loadings)?;
    Ok(TfmFit {
        loadings,
        factors,
        eigenvalues,
        method,
        iterations_used,
    })
}

fn final_step_eigenvalues(
    x: &TensorSeries,
    ranks: &[usize],
    fit: &IterativeFit,
) -> Result<Vec<Vec<f64>>> {
    let n = fit.history.len();
    if n < 2 {
        // Only the initial step exists.
        let mut eigs = Vec::new();
        for (k, &r) in ranks.iter().enumerate() {
            let cov = mode_covariance(x, k)?;
            eigs.push(top_r_eigs(&cov, r)?.values);
        }
        return Ok(eigs);
    }
    let prev = &fit.history[n - 2];
    let mut eigs = Vec::new();
    for (k, &r) in ranks.iter().enumerate() {
        let b = prev.kron_excluding(k)?;
        let cov = projected_covariance(x, k, &b)?;
        eigs.push(top_r_eigs(&cov, r)?.values);
    }
    Ok(eigs)
}

/// Orthonormalizes the columns of a loading matrix (helper for diagnostics).
pub(crate) fn orthonormal_basis(a: &Matrix) -> Result<Matrix> {
    let svd = a.clone().svd(true, false);
    let u = svd
        .u
        .as_ref()
        .ok_or_else(|| Error::domain("SVD failed to produce a basis"))?;
    let max_sv = svd.singular_values.max();
    let min_sv = svd.singular_values.min();
    if max_sv <= 0.0 || min_sv <= 1e-12 * max_sv {
        return Err(Error::domain("matrix is rank-deficient"));
    }
    Ok(u.clone_owned())
}
