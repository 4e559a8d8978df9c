//! Deterministic symmetric eigendecomposition with fixed ordering and sign
//! conventions.
//!
//! Every estimator in this crate reduces to "take the leading eigenvectors of
//! a symmetric covariance-like matrix", so the conventions are centralized
//! here: eigenvalues descending, ties broken by original position, and in
//! each eigenvector the entry of largest absolute value is made positive
//! (ties toward the lowest index). The decomposition itself is delegated to
//! `nalgebra`'s symmetric eigensolver; only the ordering and sign policy is
//! ours.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// Leading eigenpairs of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Columns are the corresponding orthonormal eigenvectors.
    pub vectors: Matrix,
}

impl EigenResult {
    /// Number of returned pairs.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The first `r` eigenvectors as an owned matrix.
    pub fn leading_vectors(&self, r: usize) -> Matrix {
        self.vectors.columns(0, r).into_owned()
    }
}

/// The `r` leading eigenpairs of a symmetric matrix, in descending eigenvalue
/// order with the sign convention applied. The input is symmetrized as
/// `(M + M^T) / 2` before decomposing.
pub fn top_r_eigs(m: &Matrix, r: usize) -> Result<EigenResult> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::domain(format!(
            "eigendecomposition requires a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if r < 1 || r > n {
        return Err(Error::domain(format!(
            "requested {r} eigenpairs from a {n}x{n} matrix"
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("matrix contains non-finite entries"));
    }

    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);

    // Descending by value; ties keep the solver's original column order so
    // repeated calls stay bit-identical.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut values = Vec::with_capacity(r);
    let mut vectors = Matrix::zeros(n, r);
    for (out, &src) in order.iter().take(r).enumerate() {
        values.push(eig.eigenvalues[src]);
        let mut col = eig.eigenvectors.column(src).into_owned();
        fix_sign(col.as_mut_slice());
        vectors.set_column(out, &col);
    }
    Ok(EigenResult { values, vectors })
}

/// Makes the entry of largest absolute value positive; ties go to the lowest
/// index.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn residual(m: &Matrix, eig: &EigenResult) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &lambda) in eig.values.iter().enumerate() {
            let v = eig.vectors.column(j);
            let r = (m * v) - lambda * v;
            worst = worst.max(r.norm());
        }
        worst
    }

    fn orthonormality_defect(vectors: &Matrix) -> f64 {
        let g = vectors.transpose() * vectors;
        let n = g.nrows();
        (g - Matrix::identity(n, n)).norm()
    }

    #[test]
    fn diagonal_case() {
        let m = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0]));
        let eig = top_r_eigs(&m, 2).unwrap();
        assert_eq!(eig.values, vec![3.0, 1.0]);
        assert_eq!(eig.vectors, Matrix::identity(2, 2));
    }

    #[test]
    fn degenerate_spectrum_checks_residual_only() {
        let m = Matrix::identity(4, 4);
        let eig = top_r_eigs(&m, 1).unwrap();
        assert_relative_eq!(eig.values[0], 1.0, epsilon = 1e-12);
        assert!(residual(&m, &eig) <= 1e-8);
        assert!(orthonormality_defect(&eig.vectors) <= 1e-10);
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = Matrix::from_row_slice(2, 2, &[2., 1., 1., 2.]);
        let eig = top_r_eigs(&m, 2).unwrap();
        assert_relative_eq!(eig.values[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(eig.values[1], 1.0, epsilon = 1e-12);
        let s = 1.0 / 2.0_f64.sqrt();
        // Sign rule: equal-magnitude entries break toward the lowest index.
        assert_relative_eq!(eig.vectors[(0, 0)], s, epsilon = 1e-12);
        assert_relative_eq!(eig.vectors[(1, 0)], s, epsilon = 1e-12);
        assert_relative_eq!(eig.vectors[(0, 1)], s, epsilon = 1e-12);
        assert_relative_eq!(eig.vectors[(1, 1)], -s, epsilon = 1e-12);
    }

    #[test]
    fn reconstruction_and_scale_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = Matrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0));
        let m = &a * a.transpose();

        let eig = top_r_eigs(&m, 6).unwrap();
        let rebuilt = &eig.vectors
            * Matrix::from_diagonal(&nalgebra::DVector::from_vec(eig.values.clone()))
            * eig.vectors.transpose();
        assert!((rebuilt - &m).norm() <= 1e-8 * m.norm());

        let scaled = top_r_eigs(&(2.5 * &m), 6).unwrap();
        for (u, v) in scaled.values.iter().zip(&eig.values) {
            assert_relative_eq!(*u, 2.5 * v, max_relative = 1e-10);
        }
        assert!((scaled.vectors - &eig.vectors).norm() <= 1e-10);
    }

    #[test]
    fn deterministic_repeat() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = Matrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
        let m = &a * a.transpose();
        let e1 = top_r_eigs(&m, 3).unwrap();
        let e2 = top_r_eigs(&m, 3).unwrap();
        assert_eq!(e1.values, e2.values);
        assert_eq!(e1.vectors, e2.vectors);
    }

    #[test]
    fn input_validation() {
        let m = Matrix::zeros(3, 2);
        assert!(top_r_eigs(&m, 1).is_err());
        let m = Matrix::identity(3, 3);
        assert!(top_r_eigs(&m, 0).is_err());
        assert!(top_r_eigs(&m, 4).is_err());
        let mut bad = Matrix::identity(2, 2);
        bad[(0, 1)] = f64::NAN;
        assert!(top_r_eigs(&bad, 1).is_err());
    }
}
