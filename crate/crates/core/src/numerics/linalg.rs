use nalgebra::{DMatrix, SymmetricEigen};

/// Smallest eigenvalue of a symmetric matrix (full symmetric eigendecomposition).
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let s = symmetrize(m);
    SymmetricEigen::new(s).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest `a` such that `x + a*d` stays positive semidefinite (`inf` if unbounded).
pub(crate) fn max_psd_step(x: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    match x.clone().cholesky() {
        Some(ch) => {
            let l = ch.l();
            let linv = match l.clone().try_inverse() {
                Some(v) => v,
                None => return 0.0,
            };
            let s = symmetrize(&(&linv * d * linv.transpose()));
            let lmin = SymmetricEigen::new(s).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            if lmin >= 0.0 {
                f64::INFINITY
            } else {
                -1.0 / lmin
            }
        }
        None => 0.0,
    }
}

pub(crate) fn frob_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_examples() {
        assert!((min_eigenvalue(&DMatrix::identity(4, 4)) - 1.0).abs() < 1e-14);
        let d = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -2.0]);
        assert!((min_eigenvalue(&d) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn step_to_boundary() {
        let x = DMatrix::identity(2, 2);
        let d = DMatrix::from_row_slice(2, 2, &[-2.0, 0.0, 0.0, 1.0]);
        assert!((max_psd_step(&x, &d) - 0.5).abs() < 1e-14);
    }
}
