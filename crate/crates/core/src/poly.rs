//! Exact integer polynomials, the exterior-algebra model of `H_*(SO(n); Z_2)`
//! and the Morse-inequality check.
//!
//! No floating point appears in this module.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lie::CostVector;
use crate::morse::{formula_index, index_by_hessian, morse_polynomial, sign_vectors, SignPattern};
use crate::scalar::Weight;

/// Polynomial with nonnegative integer coefficients, ascending degree,
/// trailing zeros trimmed (the zero polynomial has no coefficients).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<u64>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Builds from signed input, rejecting negative coefficients.
    pub fn from_signed(coeffs: &[i64]) -> Result<Self> {
        coeffs
            .iter()
            .map(|&c| u64::try_from(c).map_err(|_| Error::NegativeCoefficient(c)))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::new(vec![1])
    }

    pub fn monomial(degree: usize) -> Self {
        let mut c = vec![0; degree + 1];
        c[degree] = 1;
        Self { coeffs: c }
    }

    /// `1 + t^k`.
    pub fn one_plus_t_pow(k: usize) -> Self {
        if k == 0 {
            return Self::new(vec![2]);
        }
        let mut c = vec![0; k + 1];
        c[0] = 1;
        c[k] = 1;
        Self { coeffs: c }
    }

    /// Histogram of indices: coefficient `k` counts occurrences of `k`.
    pub fn from_index_counts(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut c: Vec<u64> = Vec::new();
        for k in indices {
            if c.len() <= k {
                c.resize(k + 1, 0);
            }
            c[k] = c[k].checked_add(1).ok_or(Error::Overflow)?;
        }
        Ok(Self::new(c))
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Value at `t = 1`, the sum of the coefficients.
    pub fn eval_at_one(&self) -> Result<u64> {
        self.coeffs
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or(Error::Overflow)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        (0..len)
            .map(|k| {
                self.coeff(k)
                    .checked_add(rhs.coeff(k))
                    .ok_or(Error::Overflow)
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::zero());
        }
        let mut c = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                let prod = a.checked_mul(b).ok_or(Error::Overflow)?;
                c[i + j] = c[i + j].checked_add(prod).ok_or(Error::Overflow)?;
            }
        }
        Ok(Self::new(c))
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![0; k];
        c.extend_from_slice(&self.coeffs);
        Self { coeffs: c }
    }

    /// `b_k = b_{d-k}` where `d` is the degree.
    pub fn is_palindromic(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| match (k, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}t"),
                (k, 1) => format!("t^{k}"),
                (k, c) => format!("{c}t^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Expanded `(1 + t)(1 + t^2) ... (1 + t^(n-1))`.
pub fn poincare_product(n: usize) -> Result<IntPolynomial> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    (1..n).try_fold(IntPolynomial::one(), |acc, k| {
        acc.checked_mul(&IntPolynomial::one_plus_t_pow(k))
    })
}

/// A wedge `e_{i_1} ^ ... ^ e_{i_k}` of the exterior algebra on
/// `e_1, ..., e_{n-1}` with `|e_i| = i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExteriorBasisElement {
    generators: Vec<usize>,
    degree: usize,
}

impl ExteriorBasisElement {
    /// The unit `1` (empty wedge).
    pub fn unit() -> Self {
        Self {
            generators: Vec::new(),
            degree: 0,
        }
    }

    /// Wedges on a generator larger than every generator already present.
    fn wedge_top(&self, generator: usize) -> Self {
        debug_assert!(self.generators.last().is_none_or(|&g| g < generator));
        let mut generators = self.generators.clone();
        generators.push(generator);
        Self {
            generators,
            degree: self.degree + generator,
        }
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

impl fmt::Display for ExteriorBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generators.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<String> = self.generators.iter().map(|g| format!("e{g}")).collect();
        write!(f, "{}", s.join("^"))
    }
}

/// Basis of the exterior algebra on `e_1..e_{n-1}`, built by the recursion
/// `B(n + 1) = B(n) followed by B(n) ^ e_n`, starting from `B(1) = {1}`.
pub fn enumerate_basis(n: usize) -> Result<Vec<ExteriorBasisElement>> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut basis = vec![ExteriorBasisElement::unit()];
    for k in 1..n {
        let wedged: Vec<_> = basis.iter().map(|b| b.wedge_top(k)).collect();
        basis.extend(wedged);
    }
    Ok(basis)
}

/// Same basis as [`enumerate_basis`] from bitmasks: bit `k - 1` selects `e_k`.
pub fn enumerate_basis_by_subsets(n: usize) -> Result<Vec<ExteriorBasisElement>> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let gens = n - 1;
    assert!(gens < 64, "dimension too large to enumerate");
    Ok((0u64..1 << gens)
        .map(|mask| {
            let generators: Vec<usize> = (1..=gens).filter(|k| mask >> (k - 1) & 1 == 1).collect();
            let degree = generators.iter().sum();
            ExteriorBasisElement { generators, degree }
        })
        .collect())
}

/// Poincare polynomial of SO(n) over `Z_2`: the graded dimension of the
/// exterior algebra basis.
pub fn poincare_from_basis(n: usize) -> Result<IntPolynomial> {
    IntPolynomial::from_index_counts(enumerate_basis(n)?.iter().map(ExteriorBasisElement::degree))
}

/// Why a pair of polynomials cannot satisfy the Morse inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Infeasibility {
    /// `P_f - P_M` evaluated at `t = -1` is nonzero.
    NotDivisible { remainder: i128 },
    /// The quotient exists but has a negative coefficient.
    NegativeQuotient { degree: usize, coefficient: i128 },
}

/// Outcome of solving `P_f = P_M + (1 + t) R` for `R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MorseRemainder {
    Quotient(IntPolynomial),
    Infeasible(Infeasibility),
}

impl MorseRemainder {
    pub fn quotient(&self) -> Option<&IntPolynomial> {
        match self {
            MorseRemainder::Quotient(r) => Some(r),
            MorseRemainder::Infeasible(_) => None,
        }
    }
}

impl fmt::Display for MorseRemainder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorseRemainder::Quotient(r) => write!(f, "{r}"),
            MorseRemainder::Infeasible(Infeasibility::NotDivisible { remainder }) => {
                write!(f, "infeasible (remainder {remainder} at t = -1)")
            }
            MorseRemainder::Infeasible(Infeasibility::NegativeQuotient {
                degree,
                coefficient,
            }) => {
                write!(
                    f,
                    "infeasible (quotient coefficient {coefficient} at t^{degree})"
                )
            }
        }
    }
}

/// Synthetic division of `P_f - P_M` by `1 + t` (root `-1`).
pub fn morse_remainder(morse: &IntPolynomial, manifold: &IntPolynomial) -> MorseRemainder {
    let len = morse.coeffs().len().max(manifold.coeffs().len());
    let diff: Vec<i128> = (0..len)
        .map(|k| i128::from(morse.coeff(k)) - i128::from(manifold.coeff(k)))
        .collect();
    let Some(top) = diff.iter().rposition(|&d| d != 0) else {
        return MorseRemainder::Quotient(IntPolynomial::zero());
    };
    if top == 0 {
        return MorseRemainder::Infeasible(Infeasibility::NotDivisible { remainder: diff[0] });
    }
    // q_{top-1} = a_top, q_{k-1} = a_k - q_k, remainder a_0 - q_0
    let mut quotient = vec![0i128; top];
    quotient[top - 1] = diff[top];
    for k in (1..top).rev() {
        quotient[k - 1] = diff[k] - quotient[k];
    }
    let remainder = diff[0] - quotient[0];
    if remainder != 0 {
        return MorseRemainder::Infeasible(Infeasibility::NotDivisible { remainder });
    }
    if let Some((degree, &coefficient)) = quotient.iter().enumerate().find(|(_, &q)| q < 0) {
        return MorseRemainder::Infeasible(Infeasibility::NegativeQuotient {
            degree,
            coefficient,
        });
    }
    MorseRemainder::Quotient(IntPolynomial::new(
        quotient.into_iter().map(|q| q as u64).collect(),
    ))
}

/// Morse polynomial, both Poincare computations, and the remainder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerfectnessReport {
    pub n: usize,
    pub morse: IntPolynomial,
    pub poincare_basis: IntPolynomial,
    pub poincare_product: IntPolynomial,
    pub remainder: MorseRemainder,
    pub perfect: bool,
}

pub fn is_perfect<T: Weight>(n: usize, c: &CostVector<T>) -> Result<PerfectnessReport> {
    let morse = morse_polynomial(n, c)?;
    let poincare_basis = poincare_from_basis(n)?;
    let poincare_product = poincare_product(n)?;
    let remainder = morse_remainder(&morse, &poincare_basis);
    let perfect = morse == poincare_basis
        && poincare_basis == poincare_product
        && remainder.quotient().is_some_and(IntPolynomial::is_zero);
    Ok(PerfectnessReport {
        n,
        morse,
        poincare_basis,
        poincare_product,
        remainder,
        perfect,
    })
}

/// Passage from SO(n) to SO(n + 1) by splitting on the last diagonal sign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InductionStep {
    pub n: usize,
    /// Morse polynomial on SO(n).
    pub lower: IntPolynomial,
    /// Morse polynomial on SO(n + 1).
    pub upper: IntPolynomial,
    /// Index generating function of points with last sign `+1`.
    pub plus: IntPolynomial,
    /// Index generating function of points with last sign `-1`.
    pub minus: IntPolynomial,
    /// Every `+1` point has index `ind(truncation) + n`, every `-1` point
    /// has index `ind(truncation)`.
    pub pointwise_shift_ok: bool,
}

impl InductionStep {
    /// `plus = t^n lower`, `minus = lower`, `upper = plus + minus = lower (1 + t^n)`.
    pub fn holds(&self) -> bool {
        let Ok(sum) = self.plus.checked_add(&self.minus) else {
            return false;
        };
        let Ok(product) = self
            .lower
            .checked_mul(&IntPolynomial::one_plus_t_pow(self.n))
        else {
            return false;
        };
        self.pointwise_shift_ok
            && self.plus == self.lower.shift(self.n)
            && self.minus == self.lower
            && self.upper == sum
            && self.upper == product
    }
}

/// Builds the step from SO(n) to SO(n + 1). `c` has length `n + 1`; its first
/// `n` weights define the function on SO(n).
///
/// Points with last sign `-1` truncate to sign vectors of determinant `-1`
/// (elements of O(n) outside SO(n)); their index is taken from the same
/// closed formula.
pub fn induction_step<T: Weight>(n: usize, c: &CostVector<T>) -> Result<InductionStep> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    c.check_dim(n + 1)?;
    let lower_costs = CostVector::new(c.as_slice()[..n].to_vec())?;
    let lower = morse_polynomial(n, &lower_costs)?;
    let upper = morse_polynomial(n + 1, c)?;

    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut pointwise_shift_ok = true;
    for eps in sign_vectors(n + 1).filter(|v| v.iter().product::<i8>() == 1) {
        let truncated = &eps[..n];
        let index = index_by_hessian(&SignPattern::new(eps.clone())?, c)?;
        let base = formula_index(truncated);
        let truncated_det: i8 = truncated.iter().product();
        if eps[n] == 1 {
            pointwise_shift_ok &= index == base + n && truncated_det == 1;
            plus.push(index);
        } else {
            pointwise_shift_ok &= index == base && truncated_det == -1;
            minus.push(index);
        }
    }
    Ok(InductionStep {
        n,
        lower,
        upper,
        plus: IntPolynomial::from_index_counts(plus)?,
        minus: IntPolynomial::from_index_counts(minus)?,
        pointwise_shift_ok,
    })
}
