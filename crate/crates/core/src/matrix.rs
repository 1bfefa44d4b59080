//! Dense complex matrices, traced multi-matrix algebras and their GNS spaces.
//!
//! A multi-matrix algebra `M = M_{d_1} ⊕ … ⊕ M_{d_k}` is stored as
//! block-diagonal `N × N` matrices with `N = Σ d_k`. Its trace is the weighted
//! sum of normalized block traces. The GNS space `L²(M)` has dimension
//! `Σ d_k²`; its basis consists of the block matrix units `E_ab`, scaled so
//! that they are orthonormal for `⟨x, y⟩ = tr(y* x)`. Coordinates inside a
//! block are ordered row-major (`a` slow, `b` fast).

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{c, cabs, tol, Real};

/// Dense complex matrix, square for everything the algebra code touches.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    data: DMatrix<Complex<T>>,
}

impl<T: Real> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}x{}", self.rows(), self.cols())?;
        f.debug_list()
            .entries((0..self.rows()).map(|i| {
                (0..self.cols())
                    .map(|j| {
                        let z = self.data[(i, j)];
                        (z.re.as_f64(), z.im.as_f64())
                    })
                    .collect::<Vec<_>>()
            }))
            .finish()
    }
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        Self {
            data: DMatrix::from_fn(rows, cols, f),
        }
    }

    pub fn from_inner(data: DMatrix<Complex<T>>) -> Self {
        Self { data }
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(Error::ShapeMismatch("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(Self::from_fn(n, m, |i, j| rows[i][j]))
    }

    /// Real-valued matrix from `f64` rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| c(T::from_f64_lossy(rows[i][j]), T::zero()))
    }

    /// Matrix unit `E_ij` in `M_n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.data[(i, j)] = Complex::one();
        m
    }

    pub fn diagonal(entries: &[Complex<T>]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { Complex::zero() })
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex<T>) {
        self.data[(i, j)] = z;
    }

    pub fn inner(&self) -> &DMatrix<Complex<T>> {
        &self.data
    }

    pub fn into_inner(self) -> DMatrix<Complex<T>> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            data: self.data.transpose(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            data: self.data.map(|z| z.conj()),
        }
    }

    /// Kronecker product; the first factor carries the slow index.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            data: self.data.kronecker(&other.data),
        }
    }

    /// `x₁ ⊗ x₂ ⊗ … ⊗ x_k`; the empty product is the 1×1 identity.
    pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a Self>) -> Self
    where
        T: 'a,
    {
        factors
            .into_iter()
            .fold(Self::identity(1), |acc, x| acc.tensor(x))
    }

    pub fn scale(&self, z: Complex<T>) -> Self {
        Self {
            data: self.data.map(|w| w * z),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(c(s, T::zero()))
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(self.rows()), |acc, _| &acc * self)
    }

    /// Unnormalized trace `Σ x_ii`.
    pub fn trace(&self) -> Complex<T> {
        self.data.trace()
    }

    /// Trace of `M_n` normalized so that `tr(1) = 1`.
    pub fn normalized_trace(&self) -> Complex<T> {
        self.trace() / c(T::from_usize(self.rows()).unwrap(), T::zero())
    }

    /// Hilbert–Schmidt inner product `Tr(other* self)`.
    pub fn hs_inner(&self, other: &Self) -> Complex<T> {
        self.data.dotc(&other.data).conj()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(
            (self.rows(), self.cols()),
            (other.rows(), other.cols()),
            "max_abs_diff on different shapes"
        );
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(T::zero(), |acc, (a, b)| acc.max(cabs(*a - *b)))
    }

    pub fn approx_eq(&self, other: &Self, eps: T) -> bool {
        self.rows() == other.rows()
            && self.cols() == other.cols()
            && self.max_abs_diff(other) <= eps
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `max(‖p − p*‖, ‖p² − p‖)` entrywise.
    pub fn projection_residual(&self) -> T {
        let sa = self.max_abs_diff(&self.adjoint());
        let idem = (self * self).max_abs_diff(self);
        sa.max(idem)
    }

    /// `‖u*u − 1‖` entrywise.
    pub fn unitary_residual(&self) -> T {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.cols()))
    }

    /// Column-major flattening, the coordinate vector used by span and
    /// commutant computations.
    pub fn to_vector(&self) -> DVector<Complex<T>> {
        DVector::from_column_slice(self.data.as_slice())
    }

    pub fn from_vector(v: &DVector<Complex<T>>, rows: usize, cols: usize) -> Self {
        assert_eq!(v.len(), rows * cols);
        Self {
            data: DMatrix::from_column_slice(rows, cols, v.as_slice()),
        }
    }

    /// `[[[re, im], …], …]` row-major, the config-file representation.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows())
            .map(|i| {
                (0..self.cols())
                    .map(|j| {
                        let z = self.data[(i, j)];
                        [z.re.as_f64(), z.im.as_f64()]
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let converted: Vec<Vec<Complex<T>>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|[re, im]| c(T::from_f64_lossy(*re), T::from_f64_lossy(*im)))
                    .collect()
            })
            .collect();
        Self::from_rows(&converted)
    }
}

impl<T: Real> serde::Serialize for ComplexMatrix<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&self.to_pairs(), s)
    }
}

impl<'de, T: Real> serde::Deserialize<'de> for ComplexMatrix<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<Vec<[f64; 2]>> = serde::Deserialize::deserialize(d)?;
        Self::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        ComplexMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        ComplexMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        ComplexMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

/// Kronecker product with the first factor as the slow index.
pub fn tensor<T: Real>(x: &ComplexMatrix<T>, y: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    x.tensor(y)
}

/// Block sizes and trace weights of a multi-matrix algebra `⊕_k M_{d_k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracedAlgebraShape {
    blocks: Vec<usize>,
    weights: Vec<Ratio<u64>>,
}

impl TracedAlgebraShape {
    pub fn new(blocks: Vec<usize>, weights: Vec<Ratio<u64>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidShape("no blocks".into()));
        }
        if blocks.len() != weights.len() {
            return Err(Error::InvalidShape(format!(
                "{} blocks but {} weights",
                blocks.len(),
                weights.len()
            )));
        }
        if blocks.contains(&0) {
            return Err(Error::InvalidShape("block size 0".into()));
        }
        if weights.iter().any(|w| w.is_zero()) {
            return Err(Error::InvalidShape("zero trace weight".into()));
        }
        let total = weights.iter().fold(Ratio::zero(), |acc, w| acc + w);
        if total != Ratio::one() {
            return Err(Error::InvalidShape(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { blocks, weights })
    }

    /// The factor `M_n` with its unique normalized trace.
    pub fn full(n: usize) -> Self {
        Self {
            blocks: vec![n],
            weights: vec![Ratio::one()],
        }
    }

    /// Weights proportional to block size (the restriction of the normalized
    /// trace of `M_{Σd}`).
    pub fn standard(blocks: Vec<usize>) -> Result<Self> {
        let total: usize = blocks.iter().sum();
        let weights = blocks
            .iter()
            .map(|&d| Ratio::new(d as u64, total.max(1) as u64))
            .collect();
        Self::new(blocks, weights)
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn weights(&self) -> &[Ratio<u64>] {
        &self.weights
    }

    /// Size `N` of the block-diagonal matrices representing the algebra.
    pub fn size(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Dimension `Σ d_k²` of the algebra, which is also `dim L²(M)`.
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|d| d * d).sum()
    }

    /// Row offset of each block.
    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect()
    }

    fn weight<T: Real>(&self, k: usize) -> T {
        let w = self.weights[k];
        T::from_f64_lossy(*w.numer() as f64 / *w.denom() as f64)
    }

    /// Central projections onto the blocks.
    pub fn block_projections<T: Real>(&self) -> Vec<ComplexMatrix<T>> {
        let n = self.size();
        self.offsets()
            .into_iter()
            .zip(&self.blocks)
            .map(|(o, &d)| {
                ComplexMatrix::from_fn(n, n, |i, j| {
                    if i == j && i >= o && i < o + d {
                        Complex::one()
                    } else {
                        Complex::zero()
                    }
                })
            })
            .collect()
    }

    /// Largest entry of `x` lying outside the diagonal blocks.
    pub fn off_block_residual<T: Real>(&self, x: &ComplexMatrix<T>) -> T {
        let offs = self.offsets();
        let block_of = |i: usize| offs.iter().rposition(|&o| o <= i).unwrap();
        let mut worst = T::zero();
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                if block_of(i) != block_of(j) {
                    worst = worst.max(cabs(x.get(i, j)));
                }
            }
        }
        worst
    }

    pub fn check_element<T: Real>(&self, x: &ComplexMatrix<T>) -> Result<()> {
        let n = self.size();
        if x.rows() != n || x.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected {n}x{n} block-diagonal matrix, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        let off = self.off_block_residual(x);
        if off > T::tol(tol::ENTRY) {
            return Err(Error::ShapeMismatch(format!(
                "entry {:.3e} outside the diagonal blocks",
                off.as_f64()
            )));
        }
        Ok(())
    }

    /// Weighted sum of normalized block traces; `tr(1) = 1`.
    pub fn normalized_trace<T: Real>(&self, x: &ComplexMatrix<T>) -> Result<Complex<T>> {
        self.check_element(x)?;
        let mut acc = Complex::zero();
        for (k, (o, &d)) in self.offsets().into_iter().zip(&self.blocks).enumerate() {
            let block_trace = (o..o + d).fold(Complex::zero(), |s, i| s + x.get(i, i));
            let scale = self.weight::<T>(k) / T::from_usize(d).unwrap();
            acc += block_trace * scale;
        }
        Ok(acc)
    }
}

/// Normalized trace of `x` as an element of the algebra described by `shape`.
pub fn normalized_trace<T: Real>(
    x: &ComplexMatrix<T>,
    shape: &TracedAlgebraShape,
) -> Result<Complex<T>> {
    shape.normalized_trace(x)
}

/// The GNS space `L²(M)` of a traced multi-matrix algebra.
#[derive(Debug, Clone)]
pub struct GnsSpace<T: Real> {
    shape: TracedAlgebraShape,
    offsets: Vec<usize>,
    /// Start of each block's coordinates in `L²(M)`.
    coord_offsets: Vec<usize>,
    /// `√(d_k / w_k)`: scale making `E_ab` a unit vector.
    scales: Vec<T>,
}

impl<T: Real> GnsSpace<T> {
    pub fn new(shape: TracedAlgebraShape) -> Self {
        let offsets = shape.offsets();
        let coord_offsets = shape
            .blocks()
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d * d;
                Some(o)
            })
            .collect();
        let scales = (0..shape.blocks().len())
            .map(|k| (T::from_usize(shape.blocks()[k]).unwrap() / shape.weight::<T>(k)).sqrt())
            .collect();
        Self {
            shape,
            offsets,
            coord_offsets,
            scales,
        }
    }

    pub fn shape(&self) -> &TracedAlgebraShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.algebra_dim()
    }

    /// `(block, a, b)` of a GNS coordinate.
    fn locate(&self, alpha: usize) -> (usize, usize, usize) {
        let k = self.coord_offsets.iter().rposition(|&o| o <= alpha).unwrap();
        let d = self.shape.blocks()[k];
        let local = alpha - self.coord_offsets[k];
        (k, local / d, local % d)
    }

    /// The orthonormal basis vector `α` as an element of `M`.
    pub fn basis_element(&self, alpha: usize) -> ComplexMatrix<T> {
        let (k, a, b) = self.locate(alpha);
        let n = self.shape.size();
        let o = self.offsets[k];
        let mut m = ComplexMatrix::zeros(n, n);
        m.set(o + a, o + b, c(self.scales[k], T::zero()));
        m
    }

    pub fn basis(&self) -> Vec<ComplexMatrix<T>> {
        (0..self.dim()).map(|a| self.basis_element(a)).collect()
    }

    /// Coordinates of `x ∈ M` in the orthonormal basis.
    pub fn to_vector(&self, x: &ComplexMatrix<T>) -> Result<DVector<Complex<T>>> {
        self.shape.check_element(x)?;
        Ok(DVector::from_fn(self.dim(), |alpha, _| {
            let (k, a, b) = self.locate(alpha);
            let o = self.offsets[k];
            x.get(o + a, o + b) / c(self.scales[k], T::zero())
        }))
    }

    pub fn from_vector(&self, v: &DVector<Complex<T>>) -> ComplexMatrix<T> {
        let n = self.shape.size();
        let mut m = ComplexMatrix::zeros(n, n);
        for alpha in 0..self.dim() {
            let (k, a, b) = self.locate(alpha);
            let o = self.offsets[k];
            m.set(o + a, o + b, v[alpha] * c(self.scales[k], T::zero()));
        }
        m
    }

    /// `⟨x, y⟩ = tr(y* x)`.
    pub fn inner(&self, x: &ComplexMatrix<T>, y: &ComplexMatrix<T>) -> Result<Complex<T>> {
        self.shape.normalized_trace(&(&y.adjoint() * x))
    }

    pub fn norm2(&self, x: &ComplexMatrix<T>) -> Result<T> {
        Ok(self.inner(x, x)?.re.max(T::zero()).sqrt())
    }

    fn check(&self, a: &ComplexMatrix<T>) -> Result<()> {
        self.shape.check_element(a)
    }

    /// `L(a): x ↦ a x`. On block `k` this is `a_k ⊗ 1`.
    pub fn left(&self, a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        self.check(a)?;
        Ok(self.blockwise(a, |ak, d| ak.tensor(&ComplexMatrix::identity(d))))
    }

    /// `R(b): x ↦ x b`. On block `k` this is `1 ⊗ b_kᵀ`.
    pub fn right(&self, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        self.check(b)?;
        Ok(self.blockwise(b, |bk, d| ComplexMatrix::identity(d).tensor(&bk.transpose())))
    }

    fn blockwise(
        &self,
        x: &ComplexMatrix<T>,
        op: impl Fn(&ComplexMatrix<T>, usize) -> ComplexMatrix<T>,
    ) -> ComplexMatrix<T> {
        let dim = self.dim();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (k, &d) in self.shape.blocks().iter().enumerate() {
            let o = self.offsets[k];
            let xk = ComplexMatrix::from_fn(d, d, |i, j| x.get(o + i, o + j));
            let local = op(&xk, d);
            let co = self.coord_offsets[k];
            for i in 0..d * d {
                for j in 0..d * d {
                    out.set(co + i, co + j, local.get(i, j));
                }
            }
        }
        out
    }

    /// The modular conjugation `J x = x*`.
    pub fn conjugation(&self) -> Conjugation {
        let perm = (0..self.dim())
            .map(|alpha| {
                let (k, a, b) = self.locate(alpha);
                self.coord_offsets[k] + b * self.shape.blocks()[k] + a
            })
            .collect();
        Conjugation { perm }
    }

    /// `(L(a), R(b), J)` acting on this space.
    pub fn gns_operators(
        &self,
        a: &ComplexMatrix<T>,
        b: &ComplexMatrix<T>,
    ) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>, Conjugation)> {
        Ok((self.left(a)?, self.right(b)?, self.conjugation()))
    }
}

/// The conjugate-linear involution `J` on `L²(M)`, stored as a coordinate
/// permutation followed by complex conjugation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjugation {
    perm: Vec<usize>,
}

impl Conjugation {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn apply<T: Real>(&self, x: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        DVector::from_fn(self.dim(), |i, _| x[self.perm[i]].conj())
    }

    /// `J T J`, which is complex-linear.
    pub fn conjugate<T: Real>(&self, t: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        ComplexMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            t.get(self.perm[i], self.perm[j]).conj()
        })
    }

    /// `J` as a real-linear map on `(Re x, Im x) ∈ ℝ^{2D}`.
    pub fn as_real_matrix<T: Real>(&self) -> DMatrix<T> {
        let d = self.dim();
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            m[(i, self.perm[i])] = T::one();
            m[(d + i, d + self.perm[i])] = -T::one();
        }
        m
    }
}

pub fn random_gaussian<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(T::from_f64_lossy(re), T::from_f64_lossy(im))
    })
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = random_gaussian::<T, R>(n, n, rng).into_inner();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix column phases so the distribution is Haar.
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            let nrm = cabs(d);
            if nrm > T::zero() {
                d / c(nrm, T::zero())
            } else {
                Complex::one()
            }
        } else {
            Complex::zero()
        }
    });
    ComplexMatrix::from_inner(q * phases)
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = random_gaussian::<T, R>(n, n, rng);
    (&g + &g.adjoint()).scale_real(T::from_f64_lossy(0.5))
}
