//! Row-stochastic matrix algebra.
//!
//! Validated row-stochastic matrices, the max-min Lyapunov function, the
//! mean/perpendicular decomposition of states, the block-triangularizing
//! change of basis, left products of matrix sequences, and sampled
//! ergodicity diagnostics.

use nalgebra::{DMatrix, DVector, RowDVector};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fit::log_linear_fit;
use crate::num::{real, Scalar};
use crate::sequence::MatrixSequenceSpec;

/// Validated n-by-n matrix with nonnegative entries and unit row sums.
///
/// Construction clamps tiny negative entries, rejects anything worse, and
/// renormalizes each row so that the row-sum identity holds exactly in
/// floating point (multiplying the all-ones vector reproduces it bitwise).
#[derive(Debug, Clone, PartialEq)]
pub struct RowStochasticMatrix<T: Scalar> {
    inner: DMatrix<T>,
}

impl<T: Scalar> RowStochasticMatrix<T> {
    /// Validates and renormalizes a raw square matrix.
    pub fn validate(raw: DMatrix<T>) -> Result<Self> {
        if raw.nrows() != raw.ncols() {
            return Err(Error::NonSquare {
                rows: raw.nrows(),
                cols: raw.ncols(),
            });
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        let mut m = raw;
        let n = m.nrows();
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if v < T::zero() {
                    if v < -T::NEG_ENTRY_TOL {
                        return Err(Error::NegativeEntry {
                            row: i,
                            col: j,
                            value: v.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                    m[(i, j)] = T::zero();
                }
            }
        }
        for i in 0..n {
            let sum = row_sum(&m, i);
            if (sum - T::one()).abs() > T::ROW_SUM_TOL {
                return Err(Error::RowSumDeviation {
                    row: i,
                    sum: sum.to_f64().unwrap_or(f64::NAN),
                });
            }
            renormalize_row(&mut m, i);
        }
        Ok(Self { inner: m })
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(n: usize, entries: &[T]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: entries.len(),
            });
        }
        Self::validate(DMatrix::from_row_slice(n, n, entries))
    }

    /// The identity matrix.
    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    /// The uniform averaging matrix with every entry `1/n`.
    pub fn uniform_averaging(n: usize) -> Self {
        let mut m = DMatrix::from_element(n, n, T::one() / T::from_usize(n).unwrap());
        for i in 0..n {
            renormalize_row(&mut m, i);
        }
        Self { inner: m }
    }

    pub fn n(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.inner
    }

    /// Applies the matrix to a state vector.
    pub fn apply(&self, x: &DVector<T>) -> DVector<T> {
        &self.inner * x
    }

    /// Left-multiplies onto an accumulated product: `self * product`.
    pub fn compose(&self, product: &DMatrix<T>) -> DMatrix<T> {
        &self.inner * product
    }

    /// True when every pair of rows shares a column with positive entries.
    ///
    /// Scrambling matrices contract the max-min function in a single step.
    pub fn is_scrambling(&self) -> bool {
        let n = self.n();
        for i in 0..n {
            for j in (i + 1)..n {
                let shares = (0..n)
                    .any(|l| self.inner[(i, l)] > T::zero() && self.inner[(j, l)] > T::zero());
                if !shares {
                    return false;
                }
            }
        }
        true
    }
}

/// Canonical left-to-right row sum; renormalization targets this exact order.
fn row_sum<T: Scalar>(m: &DMatrix<T>, row: usize) -> T {
    let mut s = T::zero();
    for j in 0..m.ncols() {
        s += m[(row, j)];
    }
    s
}

/// Scales a row to unit sum, then nudges its largest entry until the
/// canonical row sum equals one exactly.
fn renormalize_row<T: Scalar>(m: &mut DMatrix<T>, row: usize) {
    let n = m.ncols();
    let sum = row_sum(m, row);
    if sum != T::one() {
        for j in 0..n {
            m[(row, j)] /= sum;
        }
    }
    for _ in 0..32 {
        let err = row_sum(m, row) - T::one();
        if err == T::zero() {
            return;
        }
        let mut jmax = 0;
        for j in 1..n {
            if m[(row, j)] > m[(row, jmax)] {
                jmax = j;
            }
        }
        m[(row, jmax)] -= err;
    }
    debug_assert!(
        row_sum(m, row) == T::one(),
        "row renormalization did not reach an exact unit sum"
    );
}

/// Max-min Lyapunov function `V(x) = max(x) - min(x)`.
///
/// Nonincreasing under row-stochastic multiplication and invariant under
/// shifts along the consensus direction; zero exactly on consensus vectors.
pub fn lyapunov_v<T: Scalar>(x: &DVector<T>) -> T {
    assert!(!x.is_empty(), "lyapunov_v needs at least one component");
    let mut lo = x[0];
    let mut hi = x[0];
    for &v in x.iter().skip(1) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

/// A state split into its consensus mean and the orthogonal remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusDecomposition<T: Scalar> {
    /// Mean of the components, i.e. the coordinate along the consensus line.
    pub mean: T,
    /// Remainder orthogonal to the all-ones direction.
    pub perp: DVector<T>,
}

impl<T: Scalar> ConsensusDecomposition<T> {
    /// Euclidean distance of the original state to the consensus set.
    pub fn dist_consensus(&self) -> T {
        self.perp.norm()
    }

    /// Rebuilds the original state `mean * e + perp`.
    pub fn reconstruct(&self) -> DVector<T> {
        DVector::from_fn(self.perp.len(), |i, _| self.mean + self.perp[i])
    }
}

/// Splits `x` into mean and orthogonal components.
pub fn decompose<T: Scalar>(x: &DVector<T>) -> ConsensusDecomposition<T> {
    assert!(!x.is_empty(), "decompose needs at least one component");
    let n = T::from_usize(x.len()).unwrap();
    let mean = x.iter().fold(T::zero(), |a, &b| a + b) / n;
    let perp = DVector::from_fn(x.len(), |i, _| x[i] - mean);
    ConsensusDecomposition { mean, perp }
}

/// Basis of the orthogonal complement of the consensus direction used for
/// the block triangularization.
#[derive(Debug, Clone)]
pub enum BasisChoice<T: Scalar> {
    /// `v_j = e_1 - e_j` for `j = 2..n`: integer-valued and trivially
    /// independent.
    Default,
    /// Caller-supplied vectors; each must sum to zero and the set must be
    /// linearly independent.
    Custom(Vec<DVector<T>>),
}

/// Result of conjugating a row-stochastic matrix into block-triangular form.
///
/// `t^{-1} P t = [[1, c], [0, q]]` where the first column of `t` is the
/// all-ones vector and the remaining columns span its orthogonal complement.
#[derive(Debug, Clone)]
pub struct TriangularForm<T: Scalar> {
    /// Change-of-basis matrix, first column all ones.
    pub t: DMatrix<T>,
    /// Coupling row vector of length n-1.
    pub c: RowDVector<T>,
    /// (n-1)-square block governing the dynamics orthogonal to consensus.
    pub q: DMatrix<T>,
    /// Largest residual observed when verifying the block structure.
    pub residual: T,
}

/// Conjugates `p` by `[e, v_2, ..., v_n]` and extracts the triangular blocks.
pub fn triangularize<T: Scalar>(
    p: &RowStochasticMatrix<T>,
    basis: &BasisChoice<T>,
) -> Result<TriangularForm<T>> {
    let n = p.n();
    let t = basis_matrix(n, basis)?;
    let t_inv = t.clone().try_inverse().ok_or(Error::SingularBasis)?;
    let transformed = &t_inv * p.as_matrix() * &t;

    let mut residual = (transformed[(0, 0)] - T::one()).abs();
    for i in 1..n {
        residual = residual.max(transformed[(i, 0)].abs());
    }
    if residual > T::BLOCK_TOL {
        // An invertible basis can only produce this through severe
        // ill-conditioning, which we treat as numerically singular.
        return Err(Error::SingularBasis);
    }

    let c = RowDVector::from_fn(n - 1, |_, j| transformed[(0, j + 1)]);
    let q = DMatrix::from_fn(n - 1, n - 1, |i, j| transformed[(i + 1, j + 1)]);
    Ok(TriangularForm { t, c, q, residual })
}

fn basis_matrix<T: Scalar>(n: usize, basis: &BasisChoice<T>) -> Result<DMatrix<T>> {
    let mut t = DMatrix::zeros(n, n);
    for i in 0..n {
        t[(i, 0)] = T::one();
    }
    match basis {
        BasisChoice::Default => {
            for j in 1..n {
                t[(0, j)] = T::one();
                t[(j, j)] = -T::one();
            }
        }
        BasisChoice::Custom(vectors) => {
            if vectors.len() != n - 1 {
                return Err(Error::DimensionMismatch {
                    expected: n - 1,
                    actual: vectors.len(),
                });
            }
            for (idx, v) in vectors.iter().enumerate() {
                if v.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        actual: v.len(),
                    });
                }
                let total = v.iter().fold(T::zero(), |a, &b| a + b);
                let scale = v.iter().fold(T::zero(), |a, &b| a + b.abs());
                if total.abs() > T::BLOCK_TOL * (T::one() + scale) {
                    return Err(Error::BasisOutsidePerp { index: idx });
                }
                for i in 0..n {
                    t[(i, idx + 1)] = v[i];
                }
            }
        }
    }
    Ok(t)
}

/// Accumulated left product of a matrix sequence over `[k0, k)`.
#[derive(Debug, Clone)]
pub struct LeftProduct<T: Scalar> {
    /// Final step index (exclusive): the product contains `k - k0` factors.
    pub k: usize,
    /// Starting step index.
    pub k0: usize,
    /// The product, itself row stochastic.
    pub value: RowStochasticMatrix<T>,
}

/// Computes the left product `P(k-1) * ... * P(k0)`; the empty product is
/// the identity.
pub fn left_product<T: Scalar>(
    seq: &MatrixSequenceSpec<T>,
    k: usize,
    k0: usize,
) -> LeftProduct<T> {
    assert!(k >= k0, "left_product requires k >= k0");
    let n = seq.dimension();
    let mut acc = DMatrix::<T>::identity(n, n);
    for step in k0..k {
        acc = seq.generate(step).compose(&acc);
    }
    let value = RowStochasticMatrix::validate(acc)
        .expect("product of row-stochastic matrices must validate");
    LeftProduct { k, k0, value }
}

/// Largest entrywise difference between any pair of rows.
pub fn max_row_difference<T: Scalar>(m: &DMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            for l in 0..m.ncols() {
                worst = worst.max((m[(i, l)] - m[(j, l)]).abs());
            }
        }
    }
    worst
}

/// Dobrushin contraction coefficient: the largest total-variation distance
/// between any two rows, in `[0, 1]`.
pub fn dobrushin_coefficient<T: Scalar>(p: &RowStochasticMatrix<T>) -> T {
    let m = p.as_matrix();
    let n = m.nrows();
    let half = real::<T>(0.5);
    let mut worst = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut tv = T::zero();
            for l in 0..n {
                tv += (m[(i, l)] - m[(j, l)]).abs();
            }
            worst = worst.max(half * tv);
        }
    }
    worst
}

/// Induced infinity norm (maximum absolute row sum).
pub fn induced_inf_norm<T: Scalar>(m: &DMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        let mut s = T::zero();
        for j in 0..m.ncols() {
            s += m[(i, j)].abs();
        }
        worst = worst.max(s);
    }
    worst
}

/// Verdict of the sampled ergodicity diagnostic.
///
/// Sampling a finite horizon can suggest but never prove the limit property,
/// hence the hedged naming.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErgodicityVerdict {
    ApparentlyErgodic,
    ApparentlyNonErgodic,
    Inconclusive,
}

/// Diagnostics for one tail `{P(k)}_{k >= tail_start}`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Serialize")]
pub struct TailReport<T: Scalar> {
    pub tail_start: usize,
    /// Max row difference of the running product, indexed `tail_start..=horizon`.
    pub row_diff_series: Vec<T>,
    /// Dobrushin coefficient of each factor `P(tail_start..horizon)`.
    pub dobrushin_per_factor: Vec<T>,
    /// Least-squares amplitude of `||product(k) - product(horizon)|| ~ M r^(k-k0)`.
    #[serde(rename = "fitted_M")]
    pub fitted_m: T,
    /// Least-squares ratio of the same fit; zero when contraction is immediate.
    pub fitted_r: T,
    pub verdict: ErgodicityVerdict,
}

/// Ergodicity diagnostics over a finite horizon for several tail starts.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Serialize")]
pub struct ErgodicityReport<T: Scalar> {
    pub horizon: usize,
    /// Matrix norm used for the rate fit.
    pub norm: &'static str,
    pub tails: Vec<TailReport<T>>,
}

/// Samples the mixing behaviour of a sequence's left products.
///
/// For each tail start `k0` the report contains the row-difference decay of
/// the running product, per-factor Dobrushin coefficients, a log-linear
/// `(M, r)` fit of the distance to the final product, and a verdict based on
/// the row-difference norm at the horizon.
pub fn ergodicity_report<T: Scalar>(
    seq: &MatrixSequenceSpec<T>,
    horizon: usize,
    tail_starts: &[usize],
) -> ErgodicityReport<T> {
    assert!(horizon >= 1, "ergodicity_report requires horizon >= 1");
    let n = seq.dimension();
    let mut tails = Vec::with_capacity(tail_starts.len());
    for &k0 in tail_starts {
        assert!(k0 <= horizon, "tail start beyond horizon");

        // Pass 1: row differences, per-factor coefficients, final product.
        let mut acc = DMatrix::<T>::identity(n, n);
        let mut row_diff_series = Vec::with_capacity(horizon - k0 + 1);
        let mut dobrushin_per_factor = Vec::with_capacity(horizon - k0);
        row_diff_series.push(max_row_difference(&acc));
        for step in k0..horizon {
            let p = seq.generate(step);
            dobrushin_per_factor.push(dobrushin_coefficient(&p));
            acc = p.compose(&acc);
            row_diff_series.push(max_row_difference(&acc));
        }
        let finalp = acc;

        // Pass 2: distance of the running product to the final one.
        let mut acc = DMatrix::<T>::identity(n, n);
        let mut distances = Vec::with_capacity(horizon - k0);
        distances.push((T::zero(), induced_inf_norm(&(&acc - &finalp))));
        for step in k0..horizon.saturating_sub(1) {
            acc = seq.generate(step).compose(&acc);
            let offset = T::from_usize(step + 1 - k0).unwrap();
            distances.push((offset, induced_inf_norm(&(&acc - &finalp))));
        }

        let (fitted_m, fitted_r) = fit_tail_rate::<T>(&distances);
        let verdict = classify(&row_diff_series);
        tails.push(TailReport {
            tail_start: k0,
            row_diff_series,
            dobrushin_per_factor,
            fitted_m,
            fitted_r,
            verdict,
        });
    }
    ErgodicityReport {
        horizon,
        norm: "induced_infinity",
        tails,
    }
}

/// Fits `(M, r)` on the second half of the usable decay curve. Points at the
/// floating-point noise floor are excluded; if contraction is immediate the
/// fit degenerates and `r` is reported as zero.
fn fit_tail_rate<T: Scalar>(distances: &[(T, T)]) -> (T, T) {
    let usable: Vec<(T, T)> = distances
        .iter()
        .copied()
        .filter(|&(_, d)| d > T::FIT_FLOOR)
        .collect();
    let half_start = distances.len() / 2;
    let late: Vec<(T, T)> = distances[half_start..]
        .iter()
        .copied()
        .filter(|&(_, d)| d > T::FIT_FLOOR)
        .collect();
    let points = if late.len() >= 2 { late } else { usable };
    match log_linear_fit(&points) {
        Some((m, r)) => (m, r),
        None => {
            let m = points.first().map(|&(_, d)| d).unwrap_or_else(T::zero);
            (m, T::zero())
        }
    }
}

fn classify<T: Scalar>(row_diff_series: &[T]) -> ErgodicityVerdict {
    let last = *row_diff_series.last().unwrap();
    if last < T::ERGODIC_TOL {
        return ErgodicityVerdict::ApparentlyErgodic;
    }
    let mid = row_diff_series[row_diff_series.len() / 2];
    if last >= mid * real::<T>(0.99) {
        // No meaningful decay over the second half of the horizon.
        ErgodicityVerdict::ApparentlyNonErgodic
    } else {
        ErgodicityVerdict::Inconclusive
    }
}

impl<T: Scalar + Serialize> Serialize for RowStochasticMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<T>> = (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.inner[(i, j)]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for RowStochasticMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<T>> = Vec::deserialize(deserializer)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(D::Error::custom("matrix rows must be square"));
        }
        let flat: Vec<T> = rows.into_iter().flatten().collect();
        RowStochasticMatrix::from_rows(n, &flat).map_err(D::Error::custom)
    }
}
