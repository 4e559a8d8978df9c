//! Metrics and experiment harnesses: loading-space distance, common-component
//! MSE, a seeded Monte Carlo benchmark runner and rolling validation.
//!
//! Benchmarks run replications in parallel on independent RNG streams and
//! aggregate in replication order, so a report depends only on the base seed,
//! never on the thread count.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimate::{
    self, estimate_factors, initial_with_diagnostics, orthonormal_basis, project_all,
    project_all_star, project_reconstruct, reconstruct_common, LoadingSet, Method,
    DEFAULT_ITERATE_TOL, DEFAULT_STAR_CAP,
};
use crate::rank::{ie_er, pe_er};
use crate::sim::{generate, DgpConfig};
use crate::tensor::{Matrix, TensorSeries};

/// Rotation-invariant distance in `[0, 1]` between the column spans of two
/// loading matrices: `sqrt(1 - Tr(Qh Qh^T Q Q^T) / r)` with `Q`, `Qh`
/// orthonormal bases of the spans. 0 means identical spans, 1 orthogonal.
pub fn loading_distance(a_hat: &Matrix, a: &Matrix) -> Result<f64> {
    if a_hat.nrows() != a.nrows() || a_hat.ncols() != a.ncols() {
        return Err(Error::domain(format!(
            "loading matrices must share dimensions, got {}x{} vs {}x{}",
            a_hat.nrows(),
            a_hat.ncols(),
            a.nrows(),
            a.ncols()
        )));
    }
    let q_hat = orthonormal_basis(a_hat)?;
    let q = orthonormal_basis(a)?;
    let r = a.ncols() as f64;
    // Tr(Qh Qh^T Q Q^T) = ||Qh^T Q||_F^2
    let overlap = (q_hat.transpose() * q).norm_squared();
    let mut v = 1.0 - overlap / r;
    // Snap rounding residue at the boundaries (window 1e-12).
    if v < 1e-12 {
        v = 0.0;
    }
    if v > 1.0 {
        v = 1.0;
    }
    Ok(v.sqrt())
}

/// Mean squared error `(1/(Tp)) sum_t ||S_hat_t - S_t||_F^2`.
pub fn common_mse(s_hat: &TensorSeries, s: &TensorSeries) -> Result<f64> {
    if s_hat.shape() != s.shape() || s_hat.len() != s.len() {
        return Err(Error::domain("series must share shape and length"));
    }
    let mut acc = 0.0;
    for t in 0..s.len() {
        for (u, v) in s_hat.slice(t).data().iter().zip(s.slice(t).data()) {
            let d = u - v;
            acc += d * d;
        }
    }
    Ok(acc / (s.len() * s.slice_len()) as f64)
}

/// Configuration of a Monte Carlo benchmark over one `(setting, T)` cell.
#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    /// Label carried into the report (usually the preset name).
    pub label: String,
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub t_len: usize,
    pub phi: f64,
    pub psi: f64,
    pub estimators: Vec<Method>,
    pub replications: usize,
    pub base_seed: u64,
    /// Worker threads; 0 uses the default pool size.
    pub threads: usize,
    /// When set, also run the matching rank selectors (`r_max`) per
    /// replication and report exact-recovery rates.
    pub rank_r_max: Option<usize>,
    pub rank_max_sweeps: usize,
    /// Replace the observations by the pure common component.
    pub noiseless: bool,
    pub iterate_tol: f64,
    pub star_cap: usize,
}

impl BenchmarkConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        dims: Vec<usize>,
        ranks: Vec<usize>,
        t_len: usize,
        phi: f64,
        psi: f64,
        estimators: Vec<Method>,
        replications: usize,
        base_seed: u64,
    ) -> Self {
        Self {
            label: label.into(),
            dims,
            ranks,
            t_len,
            phi,
            psi,
            estimators,
            replications,
            base_seed,
            threads: 0,
            rank_r_max: None,
            rank_max_sweeps: 10,
            noiseless: false,
            iterate_tol: DEFAULT_ITERATE_TOL,
            star_cap: DEFAULT_STAR_CAP,
        }
    }
}

/// One `(estimator, mode)` cell of a benchmark report.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub setting: String,
    pub estimator: String,
    /// 1-based mode index.
    pub mode: usize,
    pub t_len: usize,
    pub dims: Vec<usize>,
    pub mean_d: f64,
    pub se_d: f64,
    pub mean_mse: f64,
    /// Exact rank-recovery rate, when rank selection was requested.
    pub rank_hit_rate: Option<f64>,
    pub replications: usize,
}

/// Aggregated benchmark results.
#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
    pub replications: usize,
    pub failures: usize,
    /// Wall-clock metadata; not part of the deterministic payload.
    pub wall_clock_secs: f64,
}

impl BenchmarkReport {
    /// CSV with one row per (estimator, mode) cell.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("setting,estimator,mode,T,dims,mean_D,se_D,mean_MSE,rank_hit_rate,reps\n");
        for r in &self.rows {
            let dims = r
                .dims
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("x");
            let hit = r.rank_hit_rate.map(|h| h.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.setting,
                r.estimator,
                r.mode,
                r.t_len,
                dims,
                r.mean_d,
                r.se_d,
                r.mean_mse,
                hit,
                r.replications
            ));
        }
        out
    }

    /// Fixed-width text table.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<12} {:<10} {:>4} {:>6} {:>12} {:>12} {:>12} {:>12} {:>8}\n",
            "setting", "estimator", "mode", "T", "mean_D", "se_D", "mean_MSE", "rank_hit", "reps"
        );
        for r in &self.rows {
            let hit = r
                .rank_hit_rate
                .map(|h| format!("{h:.4}"))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<12} {:<10} {:>4} {:>6} {:>12.6} {:>12.6} {:>12.6} {:>12} {:>8}\n",
                r.setting,
                r.estimator,
                r.mode,
                r.t_len,
                r.mean_d,
                r.se_d,
                r.mean_mse,
                hit,
                r.replications
            ));
        }
        out
    }
}

struct EstimatorOutcome {
    d_per_mode: Vec<f64>,
    mse: f64,
    rank_hit: Option<bool>,
}

struct RepOutcome {
    per_estimator: Vec<EstimatorOutcome>,
}

fn fit_loadings_for(
    method: Method,
    x: &TensorSeries,
    ranks: &[usize],
    init: &LoadingSet,
    cfg: &BenchmarkConfig,
) -> Result<LoadingSet> {
    match method {
        Method::Initial => Ok(init.clone()),
        Method::Projected => Ok(project_all(x, ranks, init)?.0),
        Method::ProjectedStar => Ok(project_all_star(x, ranks, cfg.star_cap)?.0),
        Method::Iterative { max_steps } => {
            Ok(
                estimate::iterative_loadings(x, ranks, max_steps, cfg.iterate_tol)?
                    .loadings()
                    .clone(),
            )
        }
    }
}

fn run_replication(cfg: &BenchmarkConfig, rep: u64) -> Result<RepOutcome> {
    let dgp = DgpConfig {
        dims: cfg.dims.clone(),
        ranks: cfg.ranks.clone(),
        t_len: cfg.t_len,
        phi: cfg.phi,
        psi: cfg.psi,
        seed: cfg.base_seed,
        replication_id: rep,
    };
    let ds = generate(&dgp)?;
    let x = if cfg.noiseless { &ds.common } else { &ds.x };

    let (init, _) = initial_with_diagnostics(x, &cfg.ranks)?;

    // Rank selectors are shared across the estimators that map to them.
    let needs_ie_rank = cfg.estimators.iter().any(|m| matches!(m, Method::Initial));
    let needs_pe_rank = cfg.estimators.iter().any(|m| !matches!(m, Method::Initial));
    let (ie_hit, pe_hit) = match cfg.rank_r_max {
        Some(r_max) => {
            let ie = if needs_ie_rank {
                Some(ie_er(x, r_max, None)?.ranks == cfg.ranks)
            } else {
                None
            };
            let pe = if needs_pe_rank {
                Some(pe_er(x, r_max, cfg.rank_max_sweeps, None)?.ranks == cfg.ranks)
            } else {
                None
            };
            (ie, pe)
        }
        None => (None, None),
    };

    let mut per_estimator = Vec::with_capacity(cfg.estimators.len());
    for &method in &cfg.estimators {
        let loadings = fit_loadings_for(method, x, &cfg.ranks, &init, cfg)?;
        let mut d_per_mode = Vec::with_capacity(cfg.dims.len());
        for k in 0..cfg.dims.len() {
            d_per_mode.push(loading_distance(loadings.mat(k), ds.loadings.mat(k))?);
        }
        let factors = estimate_factors(x, &loadings)?;
        let s_hat = reconstruct_common(&loadings, &factors)?;
        let mse = common_mse(&s_hat, &ds.common)?;
        let rank_hit = match method {
            Method::Initial => ie_hit,
            _ => pe_hit,
        };
        per_estimator.push(EstimatorOutcome {
            d_per_mode,
            mse,
            rank_hit,
        });
    }
    Ok(RepOutcome { per_estimator })
}

/// Runs the benchmark: per replication, generate a dataset, fit each
/// estimator, record the loading distances, the common-component MSE and
/// (optionally) the rank-recovery indicator; aggregate means and standard
/// errors in replication order.
///
/// A report is identical across thread counts for a fixed `base_seed`.
/// Replications failing with an error are tolerated up to 1% of the total.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkReport> {
    if cfg.replications < 1 {
        return Err(Error::domain("replications must be at least 1"));
    }
    if cfg.estimators.is_empty() {
        return Err(Error::domain("at least one estimator is required"));
    }
    let start = Instant::now();

    let run_all = || -> Vec<(u64, Result<RepOutcome>)> {
        (0..cfg.replications as u64)
            .into_par_iter()
            .map(|rep| (rep, run_replication(cfg, rep)))
            .collect()
    };
    let outcomes: Vec<(u64, Result<RepOutcome>)> = if cfg.threads == 0 {
        run_all()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
        pool.install(run_all)
    };

    // outcomes is ordered by replication id already (indexed collect), so the
    // aggregation below is order-stable.
    let mut successes: Vec<RepOutcome> = Vec::with_capacity(cfg.replications);
    let mut failures = 0usize;
    let mut first_error: Option<Error> = None;
    for (_, o) in outcomes {
        match o {
            Ok(r) => successes.push(r),
            Err(e) => {
                failures += 1;
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    if failures as f64 > 0.01 * cfg.replications as f64 {
        let detail = first_error
            .map(|e| e.to_string())
            .unwrap_or_else(|| "unknown".into());
        return Err(Error::domain(format!(
            "{failures} of {} replications failed (first error: {detail})",
            cfg.replications
        )));
    }
    let n = successes.len();
    let n_modes = cfg.dims.len();

    let mut rows = Vec::new();
    for (e_idx, method) in cfg.estimators.iter().enumerate() {
        let mses: Vec<f64> = successes
            .iter()
            .map(|r| r.per_estimator[e_idx].mse)
            .collect();
        let mean_mse = mean(&mses);
        let hits: Vec<bool> = successes
            .iter()
            .filter_map(|r| r.per_estimator[e_idx].rank_hit)
            .collect();
        let rank_hit_rate = if hits.is_empty() {
            None
        } else {
            Some(hits.iter().filter(|&&h| h).count() as f64 / hits.len() as f64)
        };
        for k in 0..n_modes {
            let ds: Vec<f64> = successes
                .iter()
                .map(|r| r.per_estimator[e_idx].d_per_mode[k])
                .collect();
            rows.push(BenchmarkRow {
                setting: cfg.label.clone(),
                estimator: method.tag(),
                mode: k + 1,
                t_len: cfg.t_len,
                dims: cfg.dims.clone(),
                mean_d: mean(&ds),
                se_d: standard_error(&ds),
                mean_mse,
                rank_hit_rate,
                replications: n,
            });
        }
    }

    Ok(BenchmarkReport {
        rows,
        replications: n,
        failures,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn standard_error(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    (var / xs.len() as f64).sqrt()
}

/// One point of a convergence-rate study: `x = log sqrt(T * p_-k)` for the
/// studied mode, `y = log mean_D`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePoint {
    pub t_len: usize,
    pub log_sqrt_tp2: f64,
    pub log_mean_d: f64,
}

/// Runs the benchmark across several sample sizes and returns log-log points
/// for the given estimator and (0-based) mode.
pub fn rate_study(
    base: &BenchmarkConfig,
    t_values: &[usize],
    method: Method,
    mode: usize,
) -> Result<Vec<RatePoint>> {
    if mode >= base.dims.len() {
        return Err(Error::domain("mode out of range"));
    }
    let tag = method.tag();
    let mut points = Vec::with_capacity(t_values.len());
    for &t_len in t_values {
        let mut cfg = base.clone();
        cfg.t_len = t_len;
        if !cfg.estimators.contains(&method) {
            cfg.estimators.push(method);
        }
        let report = run_benchmark(&cfg)?;
        let row = report
            .rows
            .iter()
            .find(|r| r.estimator == tag && r.mode == mode + 1)
            .ok_or_else(|| Error::domain("estimator row missing from report"))?;
        let p_minus: f64 = cfg
            .dims
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != mode)
            .map(|(_, &p)| p as f64)
            .product();
        points.push(RatePoint {
            t_len,
            log_sqrt_tp2: 0.5 * ((t_len as f64) * p_minus).ln(),
            log_mean_d: row.mean_d.ln(),
        });
    }
    Ok(points)
}

/// CSV for rate-study points.
pub fn rate_csv(points: &[RatePoint]) -> String {
    let mut out = String::from("T,log_sqrt_Tp2,log_mean_D\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            p.t_len, p.log_sqrt_tp2, p.log_mean_d
        ));
    }
    out
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// One rolling-validation fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub train_start: usize,
    pub train_end: usize,
    pub test_start: usize,
    pub test_end: usize,
    pub mse: f64,
}

/// Rolling validation: for each fold, fit loadings on the trailing window of
/// `window * period` slices, then score each of the next `period` slices by
/// projecting it onto the fitted loading space and reconstructing.
///
/// Returns one MSE per fold, averaged over the fold's slices and entries.
pub fn rolling_validate(
    x: &TensorSeries,
    ranks: &[usize],
    window: usize,
    period: usize,
    method: Method,
) -> Result<Vec<FoldResult>> {
    if window < 1 || period < 1 {
        return Err(Error::domain("window and period must be at least 1"));
    }
    let train_len = window * period;
    if x.len() < train_len + period {
        return Err(Error::domain(format!(
            "series of length {} is too short for window {} x period {} plus one fold",
            x.len(),
            window,
            period
        )));
    }
    let n_folds = (x.len() - train_len) / period;
    let mut results = Vec::with_capacity(n_folds);
    for fold in 0..n_folds {
        let test_start = train_len + fold * period;
        let train_start = test_start - train_len;
        let train = x.window(train_start, test_start)?;
        let loadings = match method {
            Method::Initial => estimate::initial_loadings(&train, ranks)?,
            Method::Projected => {
                let init = estimate::initial_loadings(&train, ranks)?;
                estimate::projected_loadings(&train, ranks, &init)?
            }
            Method::ProjectedStar => estimate::projected_loadings_star(&train, ranks)?,
            Method::Iterative { max_steps } => {
                estimate::iterative_loadings(&train, ranks, max_steps, DEFAULT_ITERATE_TOL)?
                    .loadings()
                    .clone()
            }
        };
        let mut acc = 0.0;
        for t in test_start..test_start + period {
            let rebuilt = project_reconstruct(x.slice(t), &loadings)?;
            for (u, v) in rebuilt.data().iter().zip(x.slice(t).data()) {
                let d = u - v;
                acc += d * d;
            }
        }
        results.push(FoldResult {
            fold,
            train_start,
            train_end: test_start,
            test_start,
            test_end: test_start + period,
            mse: acc / (period * x.slice_len()) as f64,
        });
    }
    Ok(results)
}

/// CSV for rolling-validation folds.
pub fn rolling_csv(folds: &[FoldResult]) -> String {
    let mut out = String::from("fold,train_start,train_end,test_start,test_end,mse\n");
    for f in folds {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            f.fold, f.train_start, f.train_end, f.test_start, f.test_end, f.mse
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::DenseTensor;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(r: usize, c: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn distance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        let a = random_matrix(6, 2, &mut rng);
        assert!(loading_distance(&a, &a).unwrap() < 1e-12);

        let e1 = Matrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let e2 = Matrix::from_column_slice(2, 1, &[0.0, 1.0]);
        assert!((loading_distance(&e1, &e2).unwrap() - 1.0).abs() < 1e-12);

        // Rotation leaves the span unchanged.
        let o = random_matrix(2, 2, &mut rng).qr().q().into_owned();
        let rotated = &a * o;
        assert!(loading_distance(&rotated, &a).unwrap() < 1e-10);
    }

    #[test]
    fn distance_is_span_symmetric_and_gl_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let a = random_matrix(7, 3, &mut rng);
        let b = random_matrix(7, 3, &mut rng);
        let d1 = loading_distance(&a, &b).unwrap();
        let d2 = loading_distance(&b, &a).unwrap();
        assert!((d1 - d2).abs() < 1e-12);

        // Any invertible right factor preserves the span.
        let g = random_matrix(3, 3, &mut rng) + 3.0 * Matrix::identity(3, 3);
        let d3 = loading_distance(&(&a * g), &b).unwrap();
        assert!((d1 - d3).abs() < 1e-10);
    }

    #[test]
    fn distance_input_checks() {
        let a = Matrix::zeros(4, 2);
        let b = Matrix::identity(4, 2);
        assert!(loading_distance(&a, &b).is_err(), "rank-deficient input");
        let c = Matrix::identity(5, 2);
        assert!(loading_distance(&c, &b).is_err(), "row mismatch");
    }

    #[test]
    fn mse_examples() {
        let s = TensorSeries::new(vec![
            DenseTensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0])
                .unwrap();
            3
        ])
        .unwrap();
        assert_eq!(common_mse(&s, &s).unwrap(), 0.0);
        let shifted = s
            .map_slices(|t| {
                let data = t.data().iter().map(|v| v + 1.0).collect();
                DenseTensor::new(t.shape().to_vec(), data)
            })
            .unwrap();
        assert_eq!(common_mse(&shifted, &s).unwrap(), 1.0);
    }

    #[test]
    fn noiseless_benchmark_has_zero_distance() {
        let mut cfg = BenchmarkConfig::new(
            "noiseless",
            vec![8, 7, 6],
            vec![2, 2, 2],
            10,
            0.1,
            0.1,
            vec![Method::Initial, Method::Projected],
            1,
            5,
        );
        cfg.noiseless = true;
        let report = run_benchmark(&cfg).unwrap();
        for row in &report.rows {
            assert!(
                row.mean_d < 1e-8,
                "{} mode {}: {}",
                row.estimator,
                row.mode,
                row.mean_d
            );
            assert!(row.mean_mse < 1e-16);
        }
    }

    #[test]
    fn benchmark_is_deterministic_across_thread_counts() {
        let mut cfg = BenchmarkConfig::new(
            "det",
            vec![6, 5, 4],
            vec![2, 2, 1],
            8,
            0.1,
            0.1,
            vec![Method::Initial, Method::Projected],
            6,
            17,
        );
        cfg.rank_r_max = Some(3);
        cfg.threads = 1;
        let a = run_benchmark(&cfg).unwrap();
        cfg.threads = 4;
        let b = run_benchmark(&cfg).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn benchmark_fails_when_replications_fail() {
        // Rank exceeding the feasible bound makes every replication error.
        let cfg = BenchmarkConfig::new(
            "bad",
            vec![4, 3],
            vec![4, 1],
            3,
            0.1,
            0.1,
            vec![Method::Projected],
            4,
            1,
        );
        assert!(run_benchmark(&cfg).is_err());
    }

    #[test]
    fn ols_slope_recovers_a_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        assert!((ols_slope(&pts) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn rolling_counts_folds_and_is_exact_at_full_rank() {
        let cfg = DgpConfig {
            dims: vec![4, 3],
            ranks: vec![2, 2],
            t_len: 60,
            phi: 0.1,
            psi: 0.1,
            seed: 33,
            replication_id: 0,
        };
        let ds = generate(&cfg).unwrap();
        // window 2 "years" of 12 slices -> folds at 24, 36, 48.
        let folds = rolling_validate(&ds.x, &[2, 2], 2, 12, Method::Projected).unwrap();
        assert_eq!(folds.len(), 3);

        // Full-rank loadings reproduce every slice exactly.
        let folds = rolling_validate(&ds.x, &[4, 3], 2, 12, Method::Initial).unwrap();
        for f in &folds {
            assert!(f.mse < 1e-10, "fold {}: {}", f.fold, f.mse);
        }
    }

    #[test]
    fn rolling_is_exact_on_noiseless_low_rank_series() {
        let cfg = DgpConfig {
            dims: vec![6, 5],
            ranks: vec![2, 1],
            t_len: 48,
            phi: 0.1,
            psi: 0.1,
            seed: 44,
            replication_id: 0,
        };
        let ds = generate(&cfg).unwrap();
        let folds = rolling_validate(&ds.common, &[2, 1], 1, 12, Method::Projected).unwrap();
        assert_eq!(folds.len(), 3);
        for f in &folds {
            assert!(f.mse < 1e-10, "fold {}: {}", f.fold, f.mse);
        }
    }

    #[test]
    fn rolling_length_check() {
        let cfg = DgpConfig {
            dims: vec![4, 3],
            ranks: vec![1, 1],
            t_len: 20,
            phi: 0.0,
            psi: 0.0,
            seed: 3,
            replication_id: 0,
        };
        let ds = generate(&cfg).unwrap();
        assert!(rolling_validate(&ds.x, &[1, 1], 2, 12, Method::Initial).is_err());
    }
}
