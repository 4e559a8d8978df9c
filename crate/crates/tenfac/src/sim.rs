//! Seeded data-generating process for benchmark experiments.
//!
//! Observations follow `X_t = F_t x_1 A_1 ... x_K A_K + E_t` with
//!
//! * loading entries i.i.d. Uniform(-1, 1),
//! * `Vec(F_t) = phi Vec(F_{t-1}) + sqrt(1 - phi^2) eps_t`, `eps_t ~ N(0, I)`,
//!   started at the stationary law `F_1 ~ N(0, I)`,
//! * `Vec(E_t) = psi Vec(E_{t-1}) + sqrt(1 - psi^2) Vec(U_t)`, `E_1 = U_1`,
//!   where `U_t` is tensor-normal with per-mode covariances having 1 on the
//!   diagonal and `1/p_k` off it.
//!
//! Everything is driven by a ChaCha8 stream derived from
//! `(seed, replication_id)`, so replications are independent and each one is
//! reproducible bit-for-bit. Tensor-normal draws use per-mode Cholesky
//! factors applied as mode products, which is distributionally identical to
//! sampling from the Kronecker-structured covariance without materializing
//! it.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::estimate::LoadingSet;
use crate::tensor::{DenseTensor, Matrix, TensorSeries};

/// Configuration of one simulated dataset.
#[derive(Debug, Clone)]
pub struct DgpConfig {
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub t_len: usize,
    /// Factor AR(1) coefficient, |phi| < 1.
    pub phi: f64,
    /// Noise AR(1) coefficient, |psi| < 1.
    pub psi: f64,
    pub seed: u64,
    pub replication_id: u64,
}

impl DgpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::domain("dims must be positive"));
        }
        if self.ranks.len() != self.dims.len() {
            return Err(Error::domain("ranks and dims must have the same length"));
        }
        if self
            .ranks
            .iter()
            .zip(&self.dims)
            .any(|(&r, &p)| r == 0 || r > p)
        {
            return Err(Error::domain("ranks must satisfy 1 <= r_k <= p_k"));
        }
        if self.t_len == 0 {
            return Err(Error::domain("T must be positive"));
        }
        // NaN must fail these checks too.
        if self.phi.is_nan() || self.phi.abs() >= 1.0 {
            return Err(Error::domain(format!(
                "factor AR coefficient must satisfy |phi| < 1, got {}",
                self.phi
            )));
        }
        if self.psi.is_nan() || self.psi.abs() >= 1.0 {
            return Err(Error::domain(format!(
                "noise AR coefficient must satisfy |psi| < 1, got {}",
                self.psi
            )));
        }
        Ok(())
    }
}

/// One simulated dataset together with its ground truth.
#[derive(Debug, Clone)]
pub struct SimulatedDataset {
    pub x: TensorSeries,
    pub loadings: LoadingSet,
    pub factors: TensorSeries,
    pub common: TensorSeries,
    pub noise: TensorSeries,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent ChaCha8 stream for a replication: seeded by
/// `seed XOR splitmix64(replication_id)`.
pub fn replication_stream(seed: u64, replication_id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ splitmix64(replication_id))
}

/// Equicorrelated per-mode covariance: 1 on the diagonal, `1/p` off it.
pub fn equicorrelated_sigma(p: usize) -> Matrix {
    let off = 1.0 / p as f64;
    Matrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { off })
}

/// Draws one tensor-normal sample `Z x_1 L_1 ... x_K L_K` with
/// `L_k L_k^T = Sigma_k` and `Z` i.i.d. standard normal.
pub fn tensor_normal_sample<R: Rng + ?Sized>(
    shape: &[usize],
    sigmas: &[Matrix],
    rng: &mut R,
) -> Result<DenseTensor> {
    if sigmas.len() != shape.len() {
        return Err(Error::domain("one covariance per mode is required"));
    }
    let factors = sigmas
        .iter()
        .enumerate()
        .map(|(k, s)| {
            if s.nrows() != shape[k] || s.ncols() != shape[k] {
                return Err(Error::domain(format!(
                    "covariance for mode {} must be {}x{}",
                    k + 1,
                    shape[k],
                    shape[k]
                )));
            }
            cholesky_factor(s)
        })
        .collect::<Result<Vec<_>>>()?;
    sample_with_factors(shape, &factors, rng)
}

fn cholesky_factor(sigma: &Matrix) -> Result<Matrix> {
    nalgebra::Cholesky::new(sigma.clone())
        .map(|c| c.l())
        .ok_or_else(|| Error::domain("covariance is not positive definite"))
}

fn sample_with_factors<R: Rng + ?Sized>(
    shape: &[usize],
    chol: &[Matrix],
    rng: &mut R,
) -> Result<DenseTensor> {
    let n: usize = shape.iter().product();
    let data: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut z = DenseTensor::new(shape.to_vec(), data)?;
    for (k, l) in chol.iter().enumerate() {
        z = z.mode_product(l, k)?;
    }
    Ok(z)
}

/// Generates one dataset. The draw order is fixed (loadings by mode, then the
/// factor path, then the noise path) so a `(seed, replication_id)` pair pins
/// the output bit-for-bit.
pub fn generate(cfg: &DgpConfig) -> Result<SimulatedDataset> {
    cfg.validate()?;
    let mut rng = replication_stream(cfg.seed, cfg.replication_id);

    let uniform = rand::distributions::Uniform::new_inclusive(-1.0f64, 1.0);
    let mats: Vec<Matrix> = cfg
        .dims
        .iter()
        .zip(&cfg.ranks)
        .map(|(&p, &r)| Matrix::from_fn(p, r, |_, _| rng.sample(uniform)))
        .collect();
    let loadings = LoadingSet::new(mats)?;

    // Factor path: stationary AR(1) on the vectorized core.
    let r_total: usize = cfg.ranks.iter().product();
    let innov_scale = (1.0 - cfg.phi * cfg.phi).sqrt();
    let mut factor_slices = Vec::with_capacity(cfg.t_len);
    let mut prev: Vec<f64> = (0..r_total)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    factor_slices.push(DenseTensor::new(cfg.ranks.clone(), prev.clone())?);
    for _ in 1..cfg.t_len {
        let next: Vec<f64> = prev
            .iter()
            .map(|&f| cfg.phi * f + innov_scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        factor_slices.push(DenseTensor::new(cfg.ranks.clone(), next.clone())?);
        prev = next;
    }
    let factors = TensorSeries::new(factor_slices)?;

    // Noise path: AR(1) on tensor-normal innovations, started at E_1 = U_1.
    let chol: Vec<Matrix> = cfg
        .dims
        .iter()
        .map(|&p| cholesky_factor(&equicorrelated_sigma(p)))
        .collect::<Result<Vec<_>>>()?;
    let noise_scale = (1.0 - cfg.psi * cfg.psi).sqrt();
    let mut noise_slices = Vec::with_capacity(cfg.t_len);
    let mut prev_noise = sample_with_factors(&cfg.dims, &chol, &mut rng)?;
    noise_slices.push(prev_noise.clone());
    for _ in 1..cfg.t_len {
        let u = sample_with_factors(&cfg.dims, &chol, &mut rng)?;
        let data: Vec<f64> = prev_noise
            .data()
            .iter()
            .zip(u.data())
            .map(|(&e, &v)| cfg.psi * e + noise_scale * v)
            .collect();
        prev_noise = DenseTensor::new(cfg.dims.clone(), data)?;
        noise_slices.push(prev_noise.clone());
    }
    let noise = TensorSeries::new(noise_slices)?;

    // Assemble the observations.
    let mut common_slices = Vec::with_capacity(cfg.t_len);
    let mut x_slices = Vec::with_capacity(cfg.t_len);
    for t in 0..cfg.t_len {
        let mut s = factors.slice(t).clone();
        for (k, a) in loadings.mats().iter().enumerate() {
            s = s.mode_product(a, k)?;
        }
        let data: Vec<f64> = s
            .data()
            .iter()
            .zip(noise.slice(t).data())
            .map(|(a, b)| a + b)
            .collect();
        x_slices.push(DenseTensor::new(cfg.dims.clone(), data)?);
        common_slices.push(s);
    }

    Ok(SimulatedDataset {
        x: TensorSeries::new(x_slices)?,
        loadings,
        factors,
        common: TensorSeries::new(common_slices)?,
        noise,
    })
}

/// A named experimental preset: dimensions, ranks, AR coefficients and the
/// sample sizes it is usually run at.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub phi: f64,
    pub psi: f64,
    pub t_values: Vec<usize>,
}

impl Preset {
    /// DGP configuration for one replication at sample size `t_len`.
    pub fn dgp(&self, t_len: usize, seed: u64, replication_id: u64) -> DgpConfig {
        DgpConfig {
            dims: self.dims.clone(),
            ranks: self.ranks.clone(),
            t_len,
            phi: self.phi,
            psi: self.psi,
            seed,
            replication_id,
        }
    }
}

/// Looks up a preset by name (`setting-a` through `setting-f`).
pub fn preset(name: &str) -> Option<Preset> {
    let (dims, t_values): (Vec<usize>, Vec<usize>) = match name {
        "setting-a" => (vec![10, 10, 10], vec![20, 50, 100, 200]),
        "setting-b" => (vec![100, 10, 10], vec![20, 50, 100, 200]),
        "setting-c" => (vec![15, 15, 15], vec![20, 50, 100, 200]),
        "setting-d" => (vec![20, 20, 20], vec![20, 50, 100, 200]),
        "setting-e" => (vec![30, 30, 30], vec![20, 50, 100, 200]),
        "setting-f" => (vec![40, 10, 10], vec![16, 32, 64, 128, 256, 512, 1024]),
        _ => return None,
    };
    Some(Preset {
        name: match name {
            "setting-a" => "setting-a",
            "setting-b" => "setting-b",
            "setting-c" => "setting-c",
            "setting-d" => "setting-d",
            "setting-e" => "setting-e",
            _ => "setting-f",
        },
        dims,
        ranks: vec![3, 3, 3],
        phi: 0.1,
        psi: 0.1,
        t_values,
    })
}

/// All preset names, in order.
pub fn preset_names() -> [&'static str; 6] {
    [
        "setting-a",
        "setting-b",
        "setting-c",
        "setting-d",
        "setting-e",
        "setting-f",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> DgpConfig {
        DgpConfig {
            dims: vec![10, 10, 10],
            ranks: vec![3, 3, 3],
            t_len: 200,
            phi: 0.1,
            psi: 0.1,
            seed: 7,
            replication_id: 0,
        }
    }

    #[test]
    fn determinism_per_replication() {
        let cfg = small_config();
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.factors, b.factors);
        let mut cfg2 = cfg.clone();
        cfg2.replication_id = 1;
        let c = generate(&cfg2).unwrap();
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn assembly_is_exact() {
        let ds = generate(&small_config()).unwrap();
        for t in 0..ds.x.len() {
            for ((x, s), e) in
                ds.x.slice(t)
                    .data()
                    .iter()
                    .zip(ds.common.slice(t).data())
                    .zip(ds.noise.slice(t).data())
            {
                assert_eq!(*x, s + e);
            }
        }
    }

    #[test]
    fn white_case_has_no_autocorrelation() {
        let cfg = DgpConfig {
            phi: 0.0,
            psi: 0.0,
            t_len: 400,
            ..small_config()
        };
        let ds = generate(&cfg).unwrap();
        let t_len = ds.factors.len();
        let n = ds.factors.slice_len();
        // Pooled lag-1 autocorrelation of the vectorized factors.
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let series: Vec<f64> = (0..t_len).map(|t| ds.factors.slice(t).data()[i]).collect();
            let mean = series.iter().sum::<f64>() / t_len as f64;
            for t in 1..t_len {
                num += (series[t] - mean) * (series[t - 1] - mean);
            }
            for v in &series {
                den += (v - mean) * (v - mean);
            }
        }
        let rho = num / den;
        assert!(rho.abs() < 3.0 / (t_len as f64).sqrt(), "rho = {rho}");
    }

    #[test]
    fn factor_variance_is_near_one() {
        let ds = generate(&small_config()).unwrap();
        let t_len = ds.factors.len() as f64;
        for i in 0..ds.factors.slice_len() {
            let series: Vec<f64> = (0..ds.factors.len())
                .map(|t| ds.factors.slice(t).data()[i])
                .collect();
            let mean = series.iter().sum::<f64>() / t_len;
            let var = series.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / t_len;
            assert!((0.7..=1.3).contains(&var), "variance {var} out of band");
        }
    }

    #[test]
    fn stationarity_no_burn_in_drift() {
        let cfg = DgpConfig {
            t_len: 400,
            ..small_config()
        };
        let ds = generate(&cfg).unwrap();
        for series in [&ds.factors, &ds.noise] {
            let quarter = series.len() / 4;
            let var_of = |range: std::ops::Range<usize>| {
                let mut acc = 0.0;
                let mut count = 0usize;
                for t in range {
                    for v in series.slice(t).data() {
                        acc += v * v;
                        count += 1;
                    }
                }
                acc / count as f64
            };
            let first = var_of(0..quarter);
            let last = var_of(series.len() - quarter..series.len());
            let ratio = first / last;
            assert!((0.8..=1.25).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn identity_covariance_gives_unit_variance() {
        let mut rng = replication_stream(3, 0);
        let sigmas = vec![Matrix::identity(10, 10), Matrix::identity(10, 10)];
        let mut acc = 0.0;
        let mut n = 0usize;
        for _ in 0..1000 {
            let u = tensor_normal_sample(&[10, 10], &sigmas, &mut rng).unwrap();
            for v in u.data() {
                acc += v * v;
                n += 1;
            }
        }
        let var = acc / n as f64;
        assert!((0.9..=1.1).contains(&var), "variance {var}");
    }

    #[test]
    fn scalar_covariance_scales_variance() {
        let mut rng = replication_stream(4, 0);
        let sigmas = vec![Matrix::from_element(1, 1, 4.0)];
        let mut acc = 0.0;
        let n = 100_000;
        for _ in 0..n {
            let u = tensor_normal_sample(&[1], &sigmas, &mut rng).unwrap();
            acc += u.data()[0] * u.data()[0];
        }
        let var = acc / n as f64;
        assert!((3.6..=4.4).contains(&var), "variance {var}");
    }

    #[test]
    fn equicorrelated_covariance_induces_correlation() {
        let mut rng = replication_stream(5, 0);
        let sigmas = vec![equicorrelated_sigma(10), equicorrelated_sigma(10)];
        let mut sum_xy = 0.0;
        let mut sum_xx = 0.0;
        let mut sum_yy = 0.0;
        for _ in 0..10_000 {
            let u = tensor_normal_sample(&[10, 10], &sigmas, &mut rng).unwrap();
            // Entries (1, j) and (2, j) differ only in the first mode index.
            let a = u.get(&[0, 3]);
            let b = u.get(&[1, 3]);
            sum_xy += a * b;
            sum_xx += a * a;
            sum_yy += b * b;
        }
        let corr = sum_xy / (sum_xx.sqrt() * sum_yy.sqrt());
        assert!((corr - 0.1).abs() < 0.03, "corr {corr}");
    }

    #[test]
    fn kronecker_covariance_matches_empirically() {
        let mut rng = replication_stream(6, 0);
        let s1 = equicorrelated_sigma(2);
        let s2 = equicorrelated_sigma(2);
        let expected = crate::tensor::kron(&s2, &s1);
        let n = 100_000;
        let mut acc = Matrix::zeros(4, 4);
        for _ in 0..n {
            let u = tensor_normal_sample(&[2, 2], &[s1.clone(), s2.clone()], &mut rng).unwrap();
            let v = Matrix::from_column_slice(4, 1, u.data());
            acc.gemm(1.0 / n as f64, &v, &v.transpose(), 1.0);
        }
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (acc[(i, j)] - expected[(i, j)]).abs() < 0.02,
                    "entry ({i},{j}): {} vs {}",
                    acc[(i, j)],
                    expected[(i, j)]
                );
            }
        }
    }

    #[test]
    fn loading_pervasiveness() {
        let mut acc = 0.0;
        for rep in 0..100 {
            let cfg = DgpConfig {
                replication_id: rep,
                t_len: 2,
                ..small_config()
            };
            let ds = generate(&cfg).unwrap();
            let a = ds.loadings.mat(0);
            acc += a.norm_squared() / a.nrows() as f64;
        }
        let mean = acc / 100.0;
        // E ||A_k||_F^2 / p_k = r_k / 3 = 1 for r_k = 3.
        assert!((0.9..=1.1).contains(&mean), "mean {mean}");
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = small_config();
        cfg.phi = 1.5;
        assert!(matches!(generate(&cfg), Err(Error::Domain(_))));
        let mut cfg = small_config();
        cfg.psi = -1.0;
        assert!(generate(&cfg).is_err());
        let mut cfg = small_config();
        cfg.ranks = vec![11, 3, 3];
        assert!(generate(&cfg).is_err());
    }

    #[test]
    fn non_positive_definite_sigma_is_rejected() {
        let mut rng = replication_stream(8, 0);
        let bad = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(tensor_normal_sample(&[2], &[bad], &mut rng).is_err());
    }

    #[test]
    fn presets_resolve() {
        for name in preset_names() {
            let p = preset(name).unwrap();
            assert_eq!(p.ranks, vec![3, 3, 3]);
            assert_eq!(p.phi, 0.1);
        }
        assert!(preset("setting-z").is_none());
        let f = preset("setting-f").unwrap();
        assert_eq!(f.dims, vec![40, 10, 10]);
    }
}
