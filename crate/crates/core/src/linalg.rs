//! Complex dense linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Vector2};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type Point = Vector2<f64>;

/// Least-squares solution together with the diagnostics the solvers report.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub solution: CVector,
    pub condition: f64,
    pub residual: CVector,
    pub singular_values: Vec<f64>,
}

/// Singular values in decreasing order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// `σ_max / σ_min`; infinite for rank-deficient or wide systems.
pub fn condition_number(singular: &[f64], cols: usize) -> f64 {
    if singular.len() < cols || singular.is_empty() {
        return f64::INFINITY;
    }
    let max = singular[0];
    let min = singular[singular.len() - 1];
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves `min ‖a x − b‖` through the SVD of `a`.
pub fn least_squares(a: &CMatrix, b: &CVector) -> LeastSquares {
    let svd = a.clone().svd(true, true);
    let mut singular: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular.sort_by(|x, y| y.total_cmp(x));
    let condition = condition_number(&singular, a.ncols());
    let eps = singular.first().copied().unwrap_or(0.0) * 1e-15;
    let solution = svd
        .solve(b, eps)
        .unwrap_or_else(|_| CVector::zeros(a.ncols()));
    let residual = a * &solution - b;
    LeastSquares {
        solution,
        condition,
        residual,
        singular_values: singular,
    }
}

/// Largest singular value of a small matrix.
pub fn operator_norm(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Smallest singular value, counting the rank defect of a wide matrix as zero.
pub fn smallest_singular_value(a: &CMatrix) -> f64 {
    if a.nrows() < a.ncols() {
        return 0.0;
    }
    singular_values(a).last().copied().unwrap_or(0.0)
}

pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, entries.iter().map(|&r| C64::new(r, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_overdetermined_solution() {
        let a = real_matrix(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let x = CVector::from_vec(vec![C64::new(0.5, -1.0), C64::new(2.0, 0.25)]);
        let b = &a * &x;
        let sol = least_squares(&a, &b);
        assert!((sol.solution - x).norm() < 1e-13);
        assert!(sol.condition.is_finite());
        assert!(sol.residual.norm() < 1e-13);
    }

    #[test]
    fn rank_deficient_matrix_has_infinite_or_huge_condition() {
        let a = real_matrix(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        let s = singular_values(&a);
        assert!(condition_number(&s, 2) > 1e12);
        assert_eq!(
            smallest_singular_value(&real_matrix(1, 2, &[1.0, 1.0])),
            0.0
        );
    }

    #[test]
    fn empty_matrix_has_empty_spectrum() {
        assert!(singular_values(&CMatrix::zeros(0, 0)).is_empty());
        assert!(singular_values(&CMatrix::zeros(3, 0)).is_empty());
    }
}
