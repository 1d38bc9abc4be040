//! Objective, gradient and Hessian of `f_C` in the right Givens-curve basis,
//! plus finite-difference oracles and the eigenvalue index.
//!
//! `f_C` is linear in the matrix entries, so every derivative along
//! `A B_p(s) B_q(t)` is `f_C` applied to `A E_p` or `A E_p E_q`, where `E_p`
//! is the skew generator. Both generators have two nonzero entries, which
//! keeps these evaluations O(1) per component.

use serde::Serialize;

use crate::eigen::symmetric_eigenvalues;
use crate::error::{Error, Result};
use crate::lie::{givens_curve, CostVector, PairIndex, PairVector, RotationMatrix};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// Zero band for Hessian eigenvalues; anything inside is reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Central first-difference step.
pub const FD_STEP_FIRST: f64 = 1e-5;
/// Central mixed second-difference step.
pub const FD_STEP_SECOND: f64 = 1e-4;

/// Gradient components `d/dt f_C(A B_ij(t))` at `t = 0`.
pub type GradientVector<T> = PairVector<T>;

/// Mixed second derivatives `d^2/ds dt f_C(A B_p(s) B_q(t))` at `0`, indexed
/// by pairs `(p, q)` in lexicographic order.
///
/// Symmetric at critical points. Elsewhere the antisymmetric part equals
/// `f_C(A [E_p, E_q])`, a first-order term; [`numeric_index`] uses the
/// symmetric part.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Clone + Serialize"))]
pub struct TangentHessian<T> {
    n: usize,
    entries: Matrix<T>,
}

impl<T: Real> TangentHessian<T> {
    pub fn from_matrix(n: usize, entries: Matrix<T>) -> Result<Self> {
        let k = PairIndex::count(n);
        if entries.rows() != k || entries.cols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: entries.rows(),
            });
        }
        Ok(Self { n, entries })
    }

    /// Diagonal matrix with the given pair-indexed entries.
    pub fn from_diagonal(diag: &PairVector<T>) -> Self {
        Self {
            n: diag.dim(),
            entries: Matrix::from_diagonal(diag.as_slice()),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.entries
    }

    pub fn get(&self, p: PairIndex, q: PairIndex) -> T {
        self.entries[(p.position(self.n), q.position(self.n))]
    }

    pub fn diagonal(&self) -> PairVector<T> {
        PairVector::from_values(self.n, self.entries.diagonal()).expect("square by construction")
    }

    pub fn symmetric_part(&self) -> Matrix<T> {
        let half = T::lit(0.5);
        self.entries.add(&self.entries.transpose()).scale(half)
    }

    /// Largest `|H - H^t|` entry.
    pub fn asymmetry(&self) -> T {
        self.entries.sub(&self.entries.transpose()).max_abs()
    }

    /// Largest off-diagonal magnitude.
    pub fn off_diagonal_max(&self) -> T {
        let k = self.entries.rows();
        (0..k)
            .flat_map(|r| (0..k).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|rc| self.entries[rc].abs())
            .fold(T::zero(), T::max)
    }
}

fn check_costs<T: Real>(a: &RotationMatrix<T>, c: &CostVector<T>) -> Result<()> {
    c.check_dim(a.dim())
}

/// Sparse generator `E_p` as `(row, col, sign)` triples, zero-based.
fn generator_entries(p: PairIndex) -> [(usize, usize, i8); 2] {
    let (i, j) = p.zero_based();
    [(i, j, -1), (j, i, 1)]
}

/// `f_C(A M)` for a sparse `M` given as `(row, col, value)` triples:
/// `sum_i c_i (A M)_ii = sum over (k, i, v) of c_i A_ik v`.
fn weighted_trace_of_product<T: Real>(
    a: &Matrix<T>,
    c: &[T],
    sparse: impl IntoIterator<Item = (usize, usize, i8)>,
) -> T {
    sparse.into_iter().fold(T::zero(), |acc, (k, i, v)| {
        let term = c[i] * a[(i, k)];
        if v > 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

/// `sum_i c_i x_ii` for any square matrix of matching size.
pub fn weighted_trace<T: Real>(m: &Matrix<T>, c: &CostVector<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    c.check_dim(m.rows())?;
    Ok(c.as_slice()
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (k, &ck)| acc + ck * m[(k, k)]))
}

/// `f_C(A) = sum_i c_i x_ii`.
pub fn objective<T: Real>(a: &RotationMatrix<T>, c: &CostVector<T>) -> Result<T> {
    weighted_trace(a.matrix(), c)
}

/// Gradient in the right-curve basis: component `(i, j)` is `c_i x_ij - c_j x_ji`.
pub fn riemannian_gradient<T: Real>(
    a: &RotationMatrix<T>,
    c: &CostVector<T>,
) -> Result<GradientVector<T>> {
    check_costs(a, c)?;
    let m = a.matrix();
    let w = c.as_slice();
    Ok(PairVector::from_fn(a.dim(), |p| {
        weighted_trace_of_product(m, w, generator_entries(p))
    }))
}

/// Hessian entries `f_C(A E_p E_q)` for all pairs `(p, q)`.
pub fn tangent_hessian<T: Real>(
    a: &RotationMatrix<T>,
    c: &CostVector<T>,
) -> Result<TangentHessian<T>> {
    check_costs(a, c)?;
    let n = a.dim();
    let m = a.matrix();
    let w = c.as_slice();
    let pairs: Vec<PairIndex> = PairIndex::all(n).collect();
    let k = pairs.len();
    let mut h = Matrix::zeros(k, k);
    for (r, &p) in pairs.iter().enumerate() {
        let ep = generator_entries(p);
        for (s, &q) in pairs.iter().enumerate() {
            let eq = generator_entries(q);
            // (E_p E_q)[r1, c2] += v1 v2 whenever c1 == r2
            let product = ep.iter().flat_map(|&(r1, c1, v1)| {
                eq.iter()
                    .filter(move |&&(r2, _, _)| r2 == c1)
                    .map(move |&(_, c2, v2)| (r1, c2, v1 * v2))
            });
            h[(r, s)] = weighted_trace_of_product(m, w, product);
        }
    }
    Ok(TangentHessian { n, entries: h })
}

/// Number of negative eigenvalues of the symmetric part of `h`.
///
/// Any eigenvalue within [`DEGENERACY_TOL`] of zero aborts with
/// [`Error::Degenerate`] instead of guessing its sign.
pub fn numeric_index<T: Real>(h: &TangentHessian<T>) -> Result<usize> {
    let eigenvalues = symmetric_eigenvalues(&h.symmetric_part())?;
    let tol = T::lit(DEGENERACY_TOL);
    if let Some(&bad) = eigenvalues.iter().find(|v| v.abs() <= tol) {
        return Err(Error::Degenerate {
            eigenvalue: bad.to_f64_lossy(),
            tolerance: DEGENERACY_TOL,
        });
    }
    Ok(eigenvalues.iter().filter(|&&v| v < T::zero()).count())
}

/// Dense evaluation of `f_C(A B_p(s) B_q(t))`.
pub fn objective_along_curves<T: Real>(
    a: &RotationMatrix<T>,
    c: &CostVector<T>,
    p: PairIndex,
    s: T,
    q: PairIndex,
    t: T,
) -> Result<T> {
    let n = a.dim();
    let moved = a
        .compose(&givens_curve(p, s, n)?)
        .compose(&givens_curve(q, t, n)?);
    objective(&moved, c)
}

/// Central first differences of `f_C(A B_p(h))` for every pair.
pub fn fd_gradient<T: Real>(
    a: &RotationMatrix<T>,
    c: &CostVector<T>,
    h: T,
) -> Result<GradientVector<T>> {
    check_costs(a, c)?;
    let n = a.dim();
    let two = T::one() + T::one();
    let values = PairIndex::all(n)
        .map(|p| {
            let plus = objective(&a.compose(&givens_curve(p, h, n)?), c)?;
            let minus = objective(&a.compose(&givens_curve(p, -h, n)?), c)?;
            Ok((plus - minus) / (two * h))
        })
        .collect::<Result<Vec<_>>>()?;
    PairVector::from_values(n, values)
}

/// Central mixed second differences of `f_C(A B_p(s) B_q(t))`.
pub fn fd_hessian<T: Real>(
    a: &RotationMatrix<T>,
    c: &CostVector<T>,
    h: T,
) -> Result<TangentHessian<T>> {
    check_costs(a, c)?;
    let n = a.dim();
    let pairs: Vec<PairIndex> = PairIndex::all(n).collect();
    let k = pairs.len();
    let four_h2 = T::lit(4.0) * h * h;
    let mut out = Matrix::zeros(k, k);
    for (r, &p) in pairs.iter().enumerate() {
        for (s, &q) in pairs.iter().enumerate() {
            let f = |x: T, y: T| objective_along_curves(a, c, p, x, q, y);
            out[(r, s)] = (f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / four_h2;
        }
    }
    TangentHessian::from_matrix(n, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{curve_velocity, Side};
    use crate::morse::{hessian_diagonal, index_by_formula, SignPattern};
    use std::f64::consts::FRAC_PI_2;

    fn costs(v: &[f64]) -> CostVector<f64> {
        CostVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn objective_examples() {
        let c = costs(&[1.0, 2.0, 3.0]);
        assert_eq!(objective(&RotationMatrix::identity(3), &c).unwrap(), 6.0);
        let a = SignPattern::new(vec![1, -1, -1]).unwrap().embed::<f64>();
        assert_eq!(objective(&a, &c).unwrap(), -4.0);
        let p = PairIndex::new(1, 2, 2).unwrap();
        let q = givens_curve(p, FRAC_PI_2, 2).unwrap();
        assert!(objective(&q, &costs(&[1.0, 2.0])).unwrap().abs() < 1e-15);
        assert!(matches!(
            objective(&q, &c),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn gradient_vanishes_on_patterns() {
        let c = costs(&[0.5, 1.0, 2.0, 3.5]);
        for p in SignPattern::all(4) {
            let g = riemannian_gradient(&p.embed(), &c).unwrap();
            assert!(g.as_slice().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn gradient_at_quarter_turn() {
        let a = RotationMatrix::new(
            Matrix::from_rows(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap(),
            1e-12,
        )
        .unwrap();
        let g = riemannian_gradient(&a, &costs(&[1.0, 2.0])).unwrap();
        assert_eq!(g.as_slice(), &[-3.0]);
    }

    #[test]
    fn gradient_agrees_with_velocity_route() {
        let mut rng = crate::lie::sample_rng(5, 0);
        let a: RotationMatrix<f64> = crate::lie::haar_sample(5, &mut rng).unwrap();
        let c = costs(&[0.1, 0.2, 1.0, 4.0, 9.0]);
        let g = riemannian_gradient(&a, &c).unwrap();
        for (p, &gp) in g.iter() {
            let v = curve_velocity(&a, p, Side::Right).unwrap();
            assert!((weighted_trace(&v, &c).unwrap() - gp).abs() < 1e-14);
        }
    }

    #[test]
    fn hessian_at_pattern_matches_exact_diagonal() {
        let c = costs(&[1.0, 2.0, 3.0]);
        let p = SignPattern::new(vec![-1, 1, -1]).unwrap();
        let h = tangent_hessian(&p.embed(), &c).unwrap();
        assert_eq!(h.diagonal().as_slice(), &[-1.0, 4.0, 1.0]);
        assert_eq!(h.off_diagonal_max(), 0.0);
        assert_eq!(h.diagonal(), hessian_diagonal(&p, &c).unwrap());
        assert_eq!(numeric_index(&h).unwrap(), 1);
    }

    #[test]
    fn hessian_at_identity_two_dimensional() {
        let h = tangent_hessian(&RotationMatrix::identity(2), &costs(&[1.0, 2.0])).unwrap();
        assert_eq!(h.matrix().as_slice(), &[-3.0]);
    }

    #[test]
    fn numeric_index_examples() {
        let diag = PairVector::from_values(3, vec![-1.0, 4.0, 1.0]).unwrap();
        assert_eq!(
            numeric_index(&TangentHessian::from_diagonal(&diag)).unwrap(),
            1
        );
        let top = SignPattern::new(vec![1, 1, 1]).unwrap();
        let h = tangent_hessian(&top.embed(), &costs(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(numeric_index(&h).unwrap(), 3);
        for n in 1..=6 {
            let c = CostVector::default_for(n).unwrap();
            for p in SignPattern::all(n) {
                let h = tangent_hessian(&p.embed::<f64>(), &c).unwrap();
                assert_eq!(numeric_index(&h).unwrap(), index_by_formula(&p));
            }
        }
    }

    #[test]
    fn degenerate_hessian_is_rejected() {
        let diag = PairVector::from_values(3, vec![-1.0, 1e-12, 1.0]).unwrap();
        assert!(matches!(
            numeric_index(&TangentHessian::from_diagonal(&diag)),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn hessian_matches_dense_product() {
        let mut rng = crate::lie::sample_rng(11, 0);
        let a: RotationMatrix<f64> = crate::lie::haar_sample(4, &mut rng).unwrap();
        let c = costs(&[0.0, 1.0, 2.5, 3.0]);
        let h = tangent_hessian(&a, &c).unwrap();
        for p in PairIndex::all(4) {
            for q in PairIndex::all(4) {
                let ep = crate::lie::generator::<f64>(p, 4).unwrap();
                let eq = crate::lie::generator::<f64>(q, 4).unwrap();
                let dense = weighted_trace(&a.matrix().matmul(&ep).matmul(&eq), &c).unwrap();
                assert!((dense - h.get(p, q)).abs() < 1e-14);
            }
        }
    }
}
