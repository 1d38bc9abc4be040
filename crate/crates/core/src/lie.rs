//! Rotation matrices, the Givens-curve tangent basis, Haar sampling and the
//! exponential retraction.
//!
//! Tangent directions at `A` are the velocities of the curves `A * B_ij(t)`
//! where `B_ij` rotates the `(i, j)` coordinate plane. Components are taken
//! in the raw generator basis `E_ij` (`-1` at `(i, j)`, `+1` at `(j, i)`)
//! with no Frobenius rescaling.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{expm, Matrix};
use crate::scalar::{Real, Weight};

/// Default tolerance for membership checks on SO(n).
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// An ordered pair `(i, j)` with `1 <= i < j`, labelling one coordinate plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairIndex {
    i: usize,
    j: usize,
}

impl PairIndex {
    /// One-based pair, validated against dimension `n`.
    pub fn new(i: usize, j: usize, n: usize) -> Result<Self> {
        if i == 0 || i >= j || j > n {
            return Err(Error::InvalidPair { i, j, n });
        }
        Ok(Self { i, j })
    }

    pub fn i(self) -> usize {
        self.i
    }

    pub fn j(self) -> usize {
        self.j
    }

    /// Zero-based `(row, col)` of the `-1` entry of the generator.
    pub fn zero_based(self) -> (usize, usize) {
        (self.i - 1, self.j - 1)
    }

    /// Number of pairs in dimension `n`, i.e. `dim SO(n)`.
    pub fn count(n: usize) -> usize {
        n * n.saturating_sub(1) / 2
    }

    /// All pairs for dimension `n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = PairIndex> + Clone {
        (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| PairIndex { i, j }))
    }

    /// Position of this pair in the lexicographic order for dimension `n`.
    pub fn position(self, n: usize) -> usize {
        let a = self.i - 1;
        a * n - a * (a + 1) / 2 + (self.j - self.i - 1)
    }

    fn check(self, n: usize) -> Result<()> {
        if self.j > n {
            Err(Error::InvalidPair {
                i: self.i,
                j: self.j,
                n,
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for PairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// A vector indexed by all [`PairIndex`] values of one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PairVector<T> {
    n: usize,
    values: Vec<T>,
}

impl<T> PairVector<T> {
    pub fn from_fn(n: usize, f: impl FnMut(PairIndex) -> T) -> Self {
        Self {
            n,
            values: PairIndex::all(n).map(f).collect(),
        }
    }

    /// Wraps values listed in lexicographic pair order.
    pub fn from_values(n: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != PairIndex::count(n) {
            return Err(Error::DimensionMismatch {
                expected: PairIndex::count(n),
                found: values.len(),
            });
        }
        Ok(Self { n, values })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, p: PairIndex) -> &T {
        &self.values[p.position(self.n)]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (PairIndex, &T)> {
        PairIndex::all(self.n).zip(self.values.iter())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> PairVector<U> {
        PairVector {
            n: self.n,
            values: self.values.iter().map(f).collect(),
        }
    }
}

impl<T: Real> PairVector<T> {
    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_| T::zero())
    }

    pub fn norm(&self) -> T {
        self.values.iter().map(|&x| x * x).sum::<T>().sqrt()
    }
}

impl<T: Serialize> Serialize for PairVector<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.values.len()))?;
        for (p, v) in self.iter() {
            map.serialize_entry(&p.to_string(), v)?;
        }
        map.end()
    }
}

/// Strictly increasing nonnegative weights `c_1 < ... < c_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CostVector<T> {
    c: Vec<T>,
}

impl<T: Weight> CostVector<T> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(c: Vec<T>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::ZeroDimension);
        }
        // Written as !(0 <= c_1) so that NaN is rejected too.
        if !(T::zero() <= c[0]) {
            return Err(Error::CostNegative);
        }
        if c.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::CostNotIncreasing);
        }
        Ok(Self { c })
    }

    /// The default weights `c_i = i`.
    pub fn default_for(n: usize) -> Result<Self> {
        let c = (1..=n)
            .map(|i| T::from_usize(i).expect("small integers are representable"))
            .collect();
        Self::new(c)
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.c
    }

    /// One-based access.
    pub fn weight(&self, i: usize) -> &T {
        &self.c[i - 1]
    }

    pub fn largest(&self) -> &T {
        self.c.last().expect("nonempty by construction")
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.c.len() != n {
            Err(Error::DimensionMismatch {
                expected: n,
                found: self.c.len(),
            })
        } else {
            Ok(())
        }
    }
}

impl<T: Real> CostVector<T> {
    /// Uniform draws on `[0, 10)`, sorted and redrawn until strictly increasing.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let mut c: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
            c.sort_by(f64::total_cmp);
            if let Ok(v) = Self::new(c.into_iter().map(T::lit).collect()) {
                return v;
            }
        }
    }
}

/// Which side the Givens curve multiplies on: `A * B(t)` or `B(t) * A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// An element of SO(n).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
#[serde(bound(serialize = "T: Clone + Serialize"))]
pub struct RotationMatrix<T> {
    m: Matrix<T>,
}

impl<T: Real> RotationMatrix<T> {
    /// Validates membership within `tol`.
    pub fn new(m: Matrix<T>, tol: T) -> Result<Self> {
        let (orth, det) = membership_residuals(&m)?;
        if orth <= tol && det <= tol {
            Ok(Self { m })
        } else {
            Err(Error::OffManifold {
                orthogonality: orth.to_f64_lossy(),
                determinant: det.to_f64_lossy(),
            })
        }
    }

    pub(crate) fn new_unchecked(m: Matrix<T>) -> Self {
        debug_assert!(m.is_square());
        Self { m }
    }

    pub fn identity(n: usize) -> Self {
        Self::new_unchecked(Matrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.m
    }

    /// Entry `x_ij`, one-based.
    pub fn x(&self, i: usize, j: usize) -> T {
        self.m[(i - 1, j - 1)]
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self::new_unchecked(self.m.matmul(&rhs.m))
    }

    /// `(max |AA^t - I|, |det A - 1|)`.
    pub fn residuals(&self) -> (T, T) {
        membership_residuals(&self.m).expect("square by construction")
    }
}

fn membership_residuals<T: Real>(m: &Matrix<T>) -> Result<(T, T)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let gram = m.matmul(&m.transpose());
    let orth = gram.sub(&Matrix::identity(m.rows())).max_abs();
    let det = (m.determinant()? - T::one()).abs();
    Ok((orth, det))
}

/// True iff `max |AA^t - I| <= tol` and `|det A - 1| <= tol`.
pub fn is_rotation<T: Real>(m: &Matrix<T>, tol: T) -> Result<bool> {
    let (orth, det) = membership_residuals(m)?;
    Ok(orth <= tol && det <= tol)
}

/// The skew generator `E_ij`: `-1` at `(i, j)`, `+1` at `(j, i)`.
pub fn generator<T: Real>(pair: PairIndex, n: usize) -> Result<Matrix<T>> {
    pair.check(n)?;
    let (a, b) = pair.zero_based();
    let mut e = Matrix::zeros(n, n);
    e[(a, b)] = -T::one();
    e[(b, a)] = T::one();
    Ok(e)
}

/// The Givens rotation `B_ij(theta)`.
pub fn givens_curve<T: Real>(pair: PairIndex, theta: T, n: usize) -> Result<RotationMatrix<T>> {
    pair.check(n)?;
    let (a, b) = pair.zero_based();
    let (s, c) = theta.sin_cos();
    let mut m = Matrix::identity(n);
    m[(a, a)] = c;
    m[(a, b)] = -s;
    m[(b, a)] = s;
    m[(b, b)] = c;
    Ok(RotationMatrix::new_unchecked(m))
}

/// Velocity at `t = 0` of `A * B_ij(t)` (right) or `B_ij(t) * A` (left).
pub fn curve_velocity<T: Real>(
    a: &RotationMatrix<T>,
    pair: PairIndex,
    side: Side,
) -> Result<Matrix<T>> {
    let n = a.dim();
    pair.check(n)?;
    let (i, j) = pair.zero_based();
    let m = a.matrix();
    let mut v = Matrix::zeros(n, n);
    match side {
        // (A E)[r, j] = -A[r, i], (A E)[r, i] = A[r, j]
        Side::Right => {
            for r in 0..n {
                v[(r, j)] = -m[(r, i)];
                v[(r, i)] = m[(r, j)];
            }
        }
        // (E A)[i, c] = -A[j, c], (E A)[j, c] = A[i, c]
        Side::Left => {
            for c in 0..n {
                v[(i, c)] = -m[(j, c)];
                v[(j, c)] = m[(i, c)];
            }
        }
    }
    Ok(v)
}

/// Skew-symmetric matrix `sum_p coeffs[p] * E_p`.
pub fn skew_from_coeffs<T: Real>(coeffs: &PairVector<T>) -> Matrix<T> {
    let n = coeffs.dim();
    let mut k = Matrix::zeros(n, n);
    for (p, &v) in coeffs.iter() {
        let (a, b) = p.zero_based();
        k[(a, b)] = -v;
        k[(b, a)] = v;
    }
    k
}

/// `A * exp(step * K)` with `K` the skew matrix built from `coeffs`.
pub fn retract<T: Real>(
    a: &RotationMatrix<T>,
    coeffs: &PairVector<T>,
    step: T,
) -> Result<RotationMatrix<T>> {
    if coeffs.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: coeffs.dim(),
        });
    }
    if coeffs.as_slice().iter().all(|&v| v == T::zero()) || step == T::zero() {
        return Ok(a.clone());
    }
    let k = skew_from_coeffs(coeffs).scale(step);
    Ok(RotationMatrix::new_unchecked(a.matrix().matmul(&expm(&k))))
}

/// Haar-distributed element of SO(n).
///
/// QR of a Gaussian matrix, with the columns of `Q` rescaled so that `R`
/// has a positive diagonal, then the first column negated if `det Q = -1`.
pub fn haar_sample<T, R>(n: usize, rng: &mut R) -> Result<RotationMatrix<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
    R: Rng + ?Sized,
{
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let g = Matrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let (mut q, r) = g.qr()?;
    for c in 0..n {
        if r[(c, c)] < T::zero() {
            for row in 0..n {
                q[(row, c)] = -q[(row, c)];
            }
        }
    }
    if q.determinant()? < T::zero() {
        for row in 0..n {
            q[(row, 0)] = -q[(row, 0)];
        }
    }
    Ok(RotationMatrix::new_unchecked(q))
}

/// Deterministic generator for sample `stream` of a run seeded with `seed`.
///
/// Streams are independent, so batches can be evaluated in any order.
pub fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl<'de, T> Deserialize<'de> for RotationMatrix<T>
where
    T: Real + Deserialize<'de>,
{
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = Matrix::<T>::deserialize(d)?;
        RotationMatrix::new(m, T::lit(MEMBERSHIP_TOL)).map_err(serde::de::Error::custom)
    }
}
