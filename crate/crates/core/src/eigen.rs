//! Cyclic Jacobi eigenvalues for small dense symmetric matrices.
//!
//! Jacobi is slow for large inputs but attains high relative accuracy on the
//! eigenvalues, which is what sign counting needs. Inputs that are already
//! diagonal (Hessians at critical points) finish without a single rotation.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a symmetric matrix in ascending order. Only the upper
/// triangle's partner entries are assumed equal; asymmetric input gives
/// meaningless results.
pub fn symmetric_eigenvalues<T: Real>(m: &Matrix<T>) -> Result<Vec<T>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.clone();
    let scale = a.frobenius_norm();
    let two = T::one() + T::one();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum::<T>()
            .sqrt();
        if off <= T::epsilon() * scale || off == T::zero() {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = if theta.abs() > T::lit(1e150) {
                    T::one() / (two * theta)
                } else {
                    let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                a[(p, p)] = a[(p, p)] - t * apq;
                a[(q, q)] = a[(q, q)] + t * apq;
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    a[(r, p)] = new_rp;
                    a[(p, r)] = new_rp;
                    a[(r, q)] = new_rq;
                    a[(q, r)] = new_rq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenNoConvergence);
    }
    let mut values = a.diagonal();
    values.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        let (a, b, d) = (2.0f64, -0.7, 5.0);
        let m = Matrix::from_rows(vec![vec![a, b], vec![b, d]]).unwrap();
        let mean = (a + d) / 2.0;
        let rad = (((a - d) / 2.0).powi(2) + b * b).sqrt();
        let ev = symmetric_eigenvalues(&m).unwrap();
        assert!((ev[0] - (mean - rad)).abs() < 1e-14);
        assert!((ev[1] - (mean + rad)).abs() < 1e-14);
    }

    #[test]
    fn second_difference_matrix() {
        // tridiag(-1, 2, -1) has eigenvalues 2 - 2 cos(k pi / (n + 1))
        let n = 12;
        let m = Matrix::from_fn(n, n, |r, c| match r.abs_diff(c) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let ev = symmetric_eigenvalues(&m).unwrap();
        for (k, &v) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12, "{k}: {v} vs {exact}");
        }
    }

    #[test]
    fn diagonal_input_is_returned_sorted() {
        let m = Matrix::from_diagonal(&[3.0, -1.0, 0.5]);
        assert_eq!(symmetric_eigenvalues(&m).unwrap(), vec![-1.0, 0.5, 3.0]);
    }

    #[test]
    fn trace_and_frobenius_are_preserved() {
        let m = Matrix::from_fn(7, 7, |r, c| {
            ((r * 7 + c) as f64).sin() + ((c * 7 + r) as f64).sin()
        });
        let ev = symmetric_eigenvalues(&m).unwrap();
        let trace: f64 = m.diagonal().iter().sum();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-12);
        let fro2: f64 = ev.iter().map(|x| x * x).sum();
        assert!((fro2 - m.frobenius_norm().powi(2)).abs() < 1e-11);
    }
}
