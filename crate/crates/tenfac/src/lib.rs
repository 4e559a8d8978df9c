//! Projected principal component estimation for Tucker tensor factor models.
//!
//! The observed tensor-valued time series is modeled as
//! `X_t = F_t x_1 A_1 ... x_K A_K + E_t`: a low-dimensional latent core
//! tensor `F_t` loaded onto each mode by a matrix `A_k`, plus weakly
//! correlated noise. The crate provides
//!
//! * [`tensor`] — dense column-major tensors and the multilinear primitives
//!   (mode-k unfolding/folding, mode-k products, Kronecker products);
//! * [`spectral`] — deterministic symmetric eigendecomposition with fixed
//!   ordering and sign conventions;
//! * [`estimate`] — the loading-space estimators (mode-wise PCA, one-step and
//!   multi-step projection), factor recovery and common-component
//!   reconstruction;
//! * [`rank`] — penalized eigenvalue-ratio selection of the per-mode factor
//!   numbers;
//! * [`sim`] — the seeded data-generating process used for benchmarking;
//! * [`eval`] — loading-space distance, common-component MSE, a Monte Carlo
//!   benchmark runner and rolling validation;
//! * [`io`] — the TSR1 binary container and CSV forms.
//!
//! All randomness flows from explicit 64-bit seeds through per-replication
//! ChaCha8 streams, so every experiment is reproducible bit-for-bit,
//! regardless of thread count.

pub mod error;
pub mod estimate;
pub mod eval;
pub mod io;
pub mod rank;
pub mod sim;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use estimate::{
    estimate_factors, fit, initial_loadings, iterative_loadings, projected_loadings,
    projected_loadings_star, reconstruct_common, standardize, FitOptions, LoadingSet, Method,
    TfmFit,
};
pub use eval::{
    common_mse, loading_distance, rolling_validate, run_benchmark, BenchmarkConfig, BenchmarkReport,
};
pub use rank::{ie_er, pe_er, RankEstimate};
pub use sim::{generate, preset, DgpConfig, Preset, SimulatedDataset};
pub use spectral::{top_r_eigs, EigenResult};
pub use tensor::{kron, kron_excluding, linear_index, DenseTensor, Matrix, TensorSeries};
