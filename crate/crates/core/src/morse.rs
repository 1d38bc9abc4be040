//! Exact critical-point data of `f_C(A) = sum_i c_i x_ii` on SO(n).
//!
//! The critical points are the diagonal sign matrices `diag(eps)` with
//! `prod eps_i = +1`. Everything here is combinatorial: indices are integers
//! and values are computed in whatever scalar the cost vector carries, so an
//! exact rational `C` yields exact critical values.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{CostVector, PairIndex, PairVector, RotationMatrix};
use crate::matrix::Matrix;
use crate::poly::IntPolynomial;
use crate::scalar::{Real, Weight};

/// Diagonal signs `(eps_1, ..., eps_n)` of a critical point; product is `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SignPattern {
    eps: Vec<i8>,
}

impl SignPattern {
    pub fn new(eps: Vec<i8>) -> Result<Self> {
        if eps.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if eps.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::InvalidSign);
        }
        if sign_product(&eps) != 1 {
            return Err(Error::OddSignPattern);
        }
        Ok(Self { eps })
    }

    pub fn dim(&self) -> usize {
        self.eps.len()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.eps
    }

    /// One-based sign `eps_i`.
    pub fn sign(&self, i: usize) -> i8 {
        self.eps[i - 1]
    }

    /// One-based positions carrying `+1`, ascending.
    pub fn plus_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.eps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e == 1)
            .map(|(k, _)| k + 1)
    }

    /// The index-0 point: all `-1` for even `n`, `(+1, -1, ..., -1)` for odd `n`.
    pub fn bottom(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut eps = vec![-1; n];
        if n % 2 == 1 {
            eps[0] = 1;
        }
        Ok(Self { eps })
    }

    /// The identity, the unique point of index `n(n-1)/2`.
    pub fn top(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// The diagonal matrix `diag(eps)`.
    pub fn embed<T: Real>(&self) -> RotationMatrix<T> {
        let diag: Vec<T> = self
            .eps
            .iter()
            .map(|&e| if e == 1 { T::one() } else { -T::one() })
            .collect();
        RotationMatrix::new_unchecked(Matrix::from_diagonal(&diag))
    }

    /// All admissible patterns of length `n`, in binary order with `+1 < -1`
    /// and the first coordinate most significant.
    pub fn all(n: usize) -> impl Iterator<Item = SignPattern> {
        sign_vectors(n)
            .filter(|v| sign_product(v) == 1)
            .map(|eps| SignPattern { eps })
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self
            .eps
            .iter()
            .map(|&e| if e == 1 { "+" } else { "-" })
            .collect();
        write!(f, "({})", s.join(","))
    }
}

fn sign_product(eps: &[i8]) -> i8 {
    eps.iter().product()
}

/// Every vector in `{+1, -1}^n` in binary order (`+1` as bit 0).
pub(crate) fn sign_vectors(n: usize) -> impl Iterator<Item = Vec<i8>> {
    assert!(n < 64, "dimension too large to enumerate");
    (0u64..1 << n).map(move |mask| {
        (0..n)
            .map(|k| if mask >> (n - 1 - k) & 1 == 1 { -1 } else { 1 })
            .collect()
    })
}

/// `sum (i_k - 1)` over the one-based positions with `eps = +1`.
///
/// Defined for any sign vector, including those of determinant `-1`.
pub(crate) fn formula_index(eps: &[i8]) -> usize {
    eps.iter()
        .enumerate()
        .filter(|(_, &e)| e == 1)
        .map(|(k, _)| k)
        .sum()
}

/// Morse index from the closed formula.
///
/// For even `n` the index-0 point is all `-1`; for odd `n` that vector has
/// determinant `-1`, and the index-0 point is `(+1, -1, ..., -1)`. The
/// formula handles both without a special case.
pub fn index_by_formula(pattern: &SignPattern) -> usize {
    formula_index(&pattern.eps)
}

fn signed<T: Weight>(c: &T, e: i8) -> T {
    if e == 1 {
        c.clone()
    } else {
        -c.clone()
    }
}

fn check_dims<T: Weight>(pattern: &SignPattern, c: &CostVector<T>) -> Result<()> {
    c.check_dim(pattern.dim())
}

/// Diagonal of the Hessian in the pair basis: `-c_a eps_a - c_b eps_b` at `(a, b)`.
///
/// Never zero: for `a < b` the sum `c_a eps_a + c_b eps_b` vanishes only if
/// `c_a = c_b`, which a strictly increasing `C` forbids (also when `c_1 = 0`).
pub fn hessian_diagonal<T: Weight>(
    pattern: &SignPattern,
    c: &CostVector<T>,
) -> Result<PairVector<T>> {
    check_dims(pattern, c)?;
    Ok(PairVector::from_fn(pattern.dim(), |p| {
        -signed(c.weight(p.i()), pattern.sign(p.i())) - signed(c.weight(p.j()), pattern.sign(p.j()))
    }))
}

/// Morse index as the number of negative Hessian diagonal entries.
pub fn index_by_hessian<T: Weight>(pattern: &SignPattern, c: &CostVector<T>) -> Result<usize> {
    let zero = T::zero();
    Ok(hessian_diagonal(pattern, c)?
        .as_slice()
        .iter()
        .filter(|h| **h < zero)
        .count())
}

/// Critical value `sum c_i eps_i`, accumulated in index order.
pub fn critical_value<T: Weight>(pattern: &SignPattern, c: &CostVector<T>) -> Result<T> {
    check_dims(pattern, c)?;
    Ok(c.as_slice()
        .iter()
        .zip(&pattern.eps)
        .fold(T::zero(), |acc, (ci, &e)| acc + signed(ci, e)))
}

/// Critical value as `2 * (sum of c over +1 positions) - sum of all c`.
pub fn critical_value_from_plus_sum<T: Weight>(
    pattern: &SignPattern,
    c: &CostVector<T>,
) -> Result<T> {
    check_dims(pattern, c)?;
    let plus = pattern
        .plus_positions()
        .fold(T::zero(), |acc, i| acc + c.weight(i).clone());
    let total = c
        .as_slice()
        .iter()
        .fold(T::zero(), |acc, ci| acc + ci.clone());
    Ok(plus.clone() + plus - total)
}

/// One critical point with its index, value and Hessian diagonal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPointRecord<T> {
    #[serde(rename = "eps")]
    pub pattern: SignPattern,
    pub index: usize,
    pub value: T,
    pub hessian_diagonal: PairVector<T>,
}

/// All `2^(n-1)` critical points in [`SignPattern::all`] order.
pub fn enumerate_critical_points<T: Weight>(
    n: usize,
    c: &CostVector<T>,
) -> Result<Vec<CriticalPointRecord<T>>> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    c.check_dim(n)?;
    SignPattern::all(n)
        .map(|pattern| {
            Ok(CriticalPointRecord {
                index: index_by_formula(&pattern),
                value: critical_value(&pattern, c)?,
                hessian_diagonal: hessian_diagonal(&pattern, c)?,
                pattern,
            })
        })
        .collect()
}

/// Morse polynomial `sum mu_k t^k`, counting enumerated points by index.
pub fn morse_polynomial<T: Weight>(n: usize, c: &CostVector<T>) -> Result<IntPolynomial> {
    let records = enumerate_critical_points(n, c)?;
    IntPolynomial::from_index_counts(records.iter().map(|r| r.index))
}

/// `d/dt f_C(A B_ij(t))` at 0, i.e. `c_i x_ij - c_j x_ji`.
pub fn right_curve_derivative<T: Weight>(
    x: impl Fn(usize, usize) -> T,
    c: &CostVector<T>,
    p: PairIndex,
) -> T {
    let (i, j) = (p.i(), p.j());
    c.weight(i).clone() * x(i, j) - c.weight(j).clone() * x(j, i)
}

/// `d/dt f_C(B_ij(t) A)` at 0, i.e. `-c_i x_ji + c_j x_ij`.
pub fn left_curve_derivative<T: Weight>(
    x: impl Fn(usize, usize) -> T,
    c: &CostVector<T>,
    p: PairIndex,
) -> T {
    let (i, j) = (p.i(), p.j());
    -(c.weight(i).clone() * x(j, i)) + c.weight(j).clone() * x(i, j)
}

/// Evaluates both curve-derivative families at `diag(eps)` for every pair.
/// Returns true iff all of them are exactly zero.
pub fn criticality_certificate<T: Weight>(
    pattern: &SignPattern,
    c: &CostVector<T>,
) -> Result<bool> {
    check_dims(pattern, c)?;
    let x = |i: usize, j: usize| {
        if i == j {
            signed(&T::one(), pattern.sign(i))
        } else {
            T::zero()
        }
    };
    Ok(PairIndex::all(pattern.dim()).all(|p| {
        right_curve_derivative(x, c, p) == T::zero() && left_curve_derivative(x, c, p) == T::zero()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn pat(v: &[i8]) -> SignPattern {
        SignPattern::new(v.to_vec()).unwrap()
    }

    fn costs(v: &[f64]) -> CostVector<f64> {
        CostVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn pattern_validation() {
        assert_eq!(
            SignPattern::new(vec![1, -1]).unwrap_err(),
            Error::OddSignPattern
        );
        assert_eq!(
            SignPattern::new(vec![1, 0]).unwrap_err(),
            Error::InvalidSign
        );
        assert_eq!(SignPattern::new(vec![]).unwrap_err(), Error::ZeroDimension);
        assert_eq!(pat(&[-1, 1, -1]).to_string(), "(-,+,-)");
    }

    #[test]
    fn enumeration_order_is_binary() {
        let all: Vec<_> = SignPattern::all(3).map(|p| p.as_slice().to_vec()).collect();
        assert_eq!(
            all,
            vec![
                vec![1, 1, 1],
                vec![1, -1, -1],
                vec![-1, 1, -1],
                vec![-1, -1, 1]
            ]
        );
    }

    #[test]
    fn two_dimensional_records() {
        let recs = enumerate_critical_points(2, &costs(&[1.0, 2.0])).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(
            (recs[0].pattern.as_slice(), recs[0].index, recs[0].value),
            (&[1, 1][..], 1, 3.0)
        );
        assert_eq!(
            (recs[1].pattern.as_slice(), recs[1].index, recs[1].value),
            (&[-1, -1][..], 0, -3.0)
        );
    }

    #[test]
    fn three_dimensional_records() {
        let recs = enumerate_critical_points(3, &costs(&[1.0, 2.0, 3.0])).unwrap();
        let got: Vec<_> = recs
            .iter()
            .map(|r| (r.pattern.as_slice().to_vec(), r.index, r.value))
            .collect();
        assert_eq!(
            got,
            vec![
                (vec![1, 1, 1], 3, 6.0),
                (vec![1, -1, -1], 0, -4.0),
                (vec![-1, 1, -1], 1, -2.0),
                (vec![-1, -1, 1], 2, 0.0),
            ]
        );
    }

    #[test]
    fn one_dimensional_record() {
        let recs = enumerate_critical_points(1, &costs(&[0.5])).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].pattern.as_slice(), &[1]);
        assert_eq!(recs[0].index, 0);
        assert_eq!(recs[0].value, 0.5);
        assert!(recs[0].hessian_diagonal.is_empty());
    }

    #[test]
    fn formula_index_examples() {
        assert_eq!(index_by_formula(&pat(&[-1, -1, -1, -1])), 0);
        assert_eq!(index_by_formula(&pat(&[1, 1, 1])), 3);
        assert_eq!(index_by_formula(&pat(&[-1, 1, -1])), 1);
    }

    #[test]
    fn hessian_diagonal_worked_example() {
        let h = hessian_diagonal(&pat(&[-1, 1, -1]), &costs(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(h.as_slice(), &[-1.0, 4.0, 1.0]);
        assert_eq!(
            index_by_hessian(&pat(&[-1, 1, -1]), &costs(&[1.0, 2.0, 3.0])).unwrap(),
            1
        );
    }

    #[test]
    fn extreme_patterns() {
        let c = costs(&[0.3, 1.0, 2.5, 4.0]);
        let bottom = hessian_diagonal(&pat(&[-1, -1, -1, -1]), &c).unwrap();
        assert!(bottom.as_slice().iter().all(|&h| h > 0.0));
        let top = pat(&[1, 1, 1, 1]);
        assert!(hessian_diagonal(&top, &c)
            .unwrap()
            .as_slice()
            .iter()
            .all(|&h| h < 0.0));
        assert_eq!(index_by_hessian(&top, &c).unwrap(), 6);
    }

    #[test]
    fn zero_first_weight_keeps_hessian_nondegenerate() {
        let c = costs(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        for p in SignPattern::all(5) {
            let h = hessian_diagonal(&p, &c).unwrap();
            assert!(h.as_slice().iter().all(|&x| x != 0.0), "{p}");
            assert_eq!(index_by_hessian(&p, &c).unwrap(), index_by_formula(&p));
        }
    }

    #[test]
    fn critical_value_examples() {
        let c = costs(&[1.0, 2.0, 3.0]);
        assert_eq!(critical_value(&pat(&[1, 1, 1]), &c).unwrap(), 6.0);
        assert_eq!(critical_value(&pat(&[1, -1, -1]), &c).unwrap(), -4.0);
        assert_eq!(
            critical_value_from_plus_sum(&pat(&[1, -1, -1]), &c).unwrap(),
            -4.0
        );
    }

    #[test]
    fn exact_rational_values() {
        let c = CostVector::new(vec![
            Rational64::new(0, 1),
            Rational64::new(1, 3),
            Rational64::new(1, 2),
        ])
        .unwrap();
        for p in SignPattern::all(3) {
            assert_eq!(
                critical_value(&p, &c).unwrap(),
                critical_value_from_plus_sum(&p, &c).unwrap()
            );
            assert_eq!(index_by_hessian(&p, &c).unwrap(), index_by_formula(&p));
        }
        let top = critical_value(&pat(&[1, 1, 1]), &c).unwrap();
        assert_eq!(top, Rational64::new(5, 6));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = hessian_diagonal(&pat(&[1, 1]), &costs(&[1.0, 2.0, 3.0])).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
        assert!(enumerate_critical_points(2, &costs(&[1.0])).is_err());
    }

    #[test]
    fn morse_polynomial_small_cases() {
        let p1 = morse_polynomial(1, &CostVector::<f64>::default_for(1).unwrap()).unwrap();
        assert_eq!(p1.coeffs(), &[1]);
        let p2 = morse_polynomial(2, &CostVector::<f64>::default_for(2).unwrap()).unwrap();
        assert_eq!(p2.coeffs(), &[1, 1]);
        let p4 = morse_polynomial(4, &CostVector::<f64>::default_for(4).unwrap()).unwrap();
        assert_eq!(p4.coeffs(), &[1, 1, 1, 2, 1, 1, 1]);
    }

    #[test]
    fn certificate_holds_on_patterns() {
        let c = costs(&[0.0, 1.5, 2.0, 7.0]);
        for p in SignPattern::all(4) {
            assert!(criticality_certificate(&p, &c).unwrap());
        }
    }

    #[test]
    fn record_json_shape() {
        let recs = enumerate_critical_points(2, &costs(&[1.0, 2.0])).unwrap();
        let json = serde_json::to_string(&recs[1]).unwrap();
        assert_eq!(
            json,
            r#"{"eps":[-1,-1],"index":0,"value":-3.0,"hessian_diagonal":{"(1,2)":3.0}}"#
        );
    }
}
