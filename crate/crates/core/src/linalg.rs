//! Small dense symmetric-matrix routines.

use crate::scalar::Scalar;

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching unit eigenvectors.
/// Only the upper triangle of `a` is trusted; the matrices handled here are
/// `d x d` with `d` the dimension of the support.
pub fn symmetric_eigen<T: Scalar>(a: &[Vec<T>]) -> (Vec<T>, Vec<Vec<T>>) {
    let n = a.len();
    let mut m: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i <= j { a[i][j] } else { a[j][i] }).collect())
        .collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let two = T::lit(2.0);
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off <= T::epsilon() * T::epsilon() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == T::zero() {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (two * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].partial_cmp(&m[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    (values, vectors)
}

pub fn min_eigenvalue<T: Scalar>(a: &[Vec<T>]) -> T {
    symmetric_eigen(a).0.first().copied().unwrap_or_else(T::zero)
}

/// Largest singular value of a (rows x cols) matrix.
pub fn spectral_norm<T: Scalar>(a: &[Vec<T>]) -> T {
    if a.is_empty() {
        return T::zero();
    }
    let cols = a[0].len();
    let gram: Vec<Vec<T>> = (0..cols)
        .map(|i| (0..cols).map(|j| a.iter().map(|r| r[i] * r[j]).sum()).collect())
        .collect();
    symmetric_eigen(&gram)
        .0
        .last()
        .copied()
        .unwrap_or_else(T::zero)
        .max(T::zero())
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_rotated() {
        let (vals, _) = symmetric_eigen(&[vec![3.0, 0.0], vec![0.0, -1.0]]);
        assert_eq!(vals, vec![-1.0, 3.0]);
        let (vals, vecs) = symmetric_eigen(&[vec![2.0f64, 1.0], vec![1.0, 2.0]]);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let v = &vecs[0];
        assert!((v[0] + v[1]).abs() < 1e-12);
    }

    #[test]
    fn reconstructs_random_matrix() {
        let a = vec![vec![4.0f64, 1.0, -2.0], vec![1.0, 2.0, 0.5], vec![-2.0, 0.5, 3.0]];
        let (vals, vecs) = symmetric_eigen(&a);
        for i in 0..3 {
            for j in 0..3 {
                let r: f64 = (0..3).map(|k| vals[k] * vecs[k][i] * vecs[k][j]).sum();
                assert!((r - a[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_norm_of_rectangular() {
        let a = vec![vec![1.0f64, 0.0], vec![0.0, 2.0], vec![0.0, 0.0]];
        assert!((spectral_norm(&a) - 2.0).abs() < 1e-14);
    }
}
