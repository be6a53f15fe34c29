//! Numerical nullspaces via a full singular value decomposition.

use nalgebra::DMatrix;

/// Orthonormal nullspace basis of a dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Nullspace {
    pub basis: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub sigma_max: f64,
    /// Absolute cutoff `rel_tol · σ_max` used to decide the rank.
    pub cutoff: f64,
}

impl Nullspace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Right singular vectors whose singular value is at most `rel_tol · σ_max`.
/// Matrices with fewer rows than columns are padded with zero rows so that
/// the full right factor is available.
pub fn nullspace(matrix: &DMatrix<f64>, rel_tol: f64) -> Nullspace {
    let (m, n) = matrix.shape();
    if n == 0 {
        return Nullspace { basis: Vec::new(), singular_values: Vec::new(), rank: 0, sigma_max: 0.0, cutoff: 0.0 };
    }
    let sigma_guess = matrix.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m == 0 || sigma_guess == 0.0 {
        let basis = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        return Nullspace { basis, singular_values: vec![0.0; n], rank: 0, sigma_max: 0.0, cutoff: 0.0 };
    }
    let padded = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(matrix);
        p
    } else {
        matrix.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let sigma_max = sigma.iter().fold(0.0f64, |a, &s| a.max(s));
    let cutoff = rel_tol * sigma_max;
    let mut basis = Vec::new();
    for (i, &s) in sigma.iter().enumerate() {
        if s <= cutoff {
            basis.push(v_t.row(i).iter().copied().collect());
        }
    }
    let rank = n - basis.len();
    Nullspace { basis, singular_values: sigma, rank, sigma_max, cutoff }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_deficient_square() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 1.0, 0.0, 1.0]);
        let ns = nullspace(&a, 1e-10);
        assert_eq!(ns.rank, 2);
        assert_eq!(ns.dimension(), 1);
        let v = &ns.basis[0];
        let av = &a * DMatrix::from_column_slice(3, 1, v);
        assert!(av.norm() < 1e-12);
    }

    #[test]
    fn wide_matrix_is_padded() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let ns = nullspace(&a, 1e-10);
        assert_eq!(ns.dimension(), 2);
        for v in &ns.basis {
            assert!((v.iter().sum::<f64>()).abs() < 1e-12);
            assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_and_zero_matrices() {
        assert_eq!(nullspace(&DMatrix::zeros(0, 4), 1e-10).dimension(), 4);
        assert_eq!(nullspace(&DMatrix::zeros(2, 3), 1e-10).dimension(), 3);
        assert_eq!(nullspace(&DMatrix::zeros(2, 0), 1e-10).dimension(), 0);
    }
}
