//! The SVD-based trace-maximization step shared by every algorithm here.
//!
//! `polar_project` maps an `m x k` matrix `M` (with `m >= k`) to the
//! orthonormal matrix `W = U V^T` from the compact SVD `M = U S V^T`, the
//! closed-form maximizer of `Tr(W^T M)` over the Stiefel manifold. At the
//! maximum, `Tr(W^T M)` equals the sum of the singular values of `M`.

use nalgebra::linalg::SVD;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, StiefelMatrix};

/// Relative threshold on `sigma_k / sigma_1` below which the maximizer is no
/// longer unique (the objective value still is).
pub const RANK_DEFICIENCY_RTOL: f64 = 1e-12;

/// Result of [`polar_project`].
#[derive(Debug, Clone)]
pub struct PolarProjection {
    /// The maximizer `U V^T`.
    pub w: StiefelMatrix,
    /// `sum_i sigma_i(M)`, which equals the attained `Tr(W^T M)`.
    pub singular_value_sum: f64,
    /// Set when `sigma_k(M) <= RANK_DEFICIENCY_RTOL * sigma_1(M)`: the
    /// returned `W` is still optimal in value but the argmax is not unique.
    pub non_unique: bool,
}

/// Maximizes `Tr(W^T M)` over matrices with orthonormal columns.
///
/// The output is deterministically sign-fixed: each left singular vector is
/// flipped so that its largest-magnitude entry is positive (ties resolved to
/// the first index), with the matching right singular vector flipped too, so
/// repeated runs produce bit-identical results.
pub fn polar_project(m: &DenseMatrix) -> Result<PolarProjection> {
    if m.rows() < m.cols() {
        return Err(Error::dims(
            "polar projection requires rows >= cols",
            (m.cols(), m.cols()),
            (m.rows(), m.cols()),
        ));
    }
    let k = m.cols();

    // Compact SVD; nalgebra sorts singular values in descending order.
    let svd = SVD::new(m.as_matrix().clone(), true, true);
    let mut u = svd.u.expect("SVD with compute_u");
    let mut v_t = svd.v_t.expect("SVD with compute_v");
    let sigma = svd.singular_values;

    for i in 0..k {
        let col = u.column(i);
        let mut pivot = 0;
        let mut pivot_abs = col[0].abs();
        for (row, &value) in col.iter().enumerate().skip(1) {
            if value.abs() > pivot_abs {
                pivot = row;
                pivot_abs = value.abs();
            }
        }
        if u[(pivot, i)] < 0.0 {
            u.column_mut(i).neg_mut();
            v_t.row_mut(i).neg_mut();
        }
    }

    let w = &u * &v_t;
    let non_unique = sigma[k - 1] <= RANK_DEFICIENCY_RTOL * sigma[0];
    Ok(PolarProjection {
        w: StiefelMatrix::new_unchecked(w),
        singular_value_sum: sigma.sum(),
        non_unique,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn trace_product(w: &StiefelMatrix, m: &DenseMatrix) -> f64 {
        w.as_matrix().dot(m.as_matrix())
    }

    #[test]
    fn identity_block_is_fixed_point() {
        // M = [I_2; 0] is already optimal with Tr = k.
        let m = DenseMatrix::from_rows(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let proj = polar_project(&m).unwrap();
        assert!((proj.w.as_matrix() - m.as_matrix()).norm() < 1e-12);
        assert!((trace_product(&proj.w, &m) - 2.0).abs() < 1e-12);
        assert!(!proj.non_unique);
    }

    #[test]
    fn orthonormal_input_is_returned_unchanged() {
        let s = (0.5f64).sqrt();
        let m = DenseMatrix::from_rows(3, 2, &[s, 0.0, s, 0.0, 0.0, 1.0]).unwrap();
        let proj = polar_project(&m).unwrap();
        assert!((proj.w.as_matrix() - m.as_matrix()).norm() < 1e-12);
    }

    #[test]
    fn orthogonal_columns_normalize_with_signs() {
        // Columns of M are orthogonal, so the optimum normalizes each column
        // and Tr(W^T M) = sigma_1 + sigma_2 = 2 + 3.
        let m = DenseMatrix::from_rows(3, 2, &[2.0, 0.0, 0.0, -3.0, 0.0, 0.0]).unwrap();
        let proj = polar_project(&m).unwrap();
        let expected =
            DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, -1.0, 0.0, 0.0]);
        assert!((proj.w.as_matrix() - expected).norm() < 1e-12);
        assert!((trace_product(&proj.w, &m) - 5.0).abs() < 1e-12);
        assert!((proj.singular_value_sum - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_input_is_flagged() {
        let m = DenseMatrix::from_rows(3, 2, &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0]).unwrap();
        let proj = polar_project(&m).unwrap();
        assert!(proj.non_unique);
        // The value contract still holds.
        assert!(
            (trace_product(&proj.w, &m) - proj.singular_value_sum).abs() < 1e-10
        );
        assert!(proj.w.orthogonality_error() < 1e-10);
    }

    #[test]
    fn wide_input_is_rejected() {
        let m = DenseMatrix::from_rows(1, 2, &[1.0, 2.0]).unwrap();
        assert!(polar_project(&m).is_err());
    }

    #[test]
    fn sign_fix_is_reproducible() {
        let m = DenseMatrix::from_rows(3, 2, &[0.3, -1.2, 2.0, 0.7, -0.5, 0.4]).unwrap();
        let a = polar_project(&m).unwrap();
        let b = polar_project(&m).unwrap();
        assert_eq!(a.w.as_matrix(), b.w.as_matrix());
    }

    // The derivation scaffolding behind the closed form: at the optimum,
    // Z = V^T W^T U (compact factors) is the k x k identity for full-rank M.
    #[test]
    fn compact_alignment_matrix_is_identity_at_optimum() {
        let m = DenseMatrix::from_rows(3, 2, &[1.5, 0.3, -0.2, 0.9, 0.4, -1.1]).unwrap();
        let svd = SVD::new(m.as_matrix().clone(), true, true);
        let u = svd.u.unwrap();
        let v_t = svd.v_t.unwrap();
        let w = polar_project(&m).unwrap().w;
        let z = &v_t * w.as_matrix().transpose() * &u;
        assert!((z - DMatrix::identity(2, 2)).norm() < 1e-10);
    }
}
