//! Generated *-algebras, commutants, and multiplicity spectra of abelian
//! algebras acting on `ℂ^D`.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;
use crate::matrix::{ComplexMatrix, GnsSpace, TracedAlgebraShape};
use crate::nset::{NSet, NValue};
use crate::scalar::{tol, Real};

/// Fresh samples tried after the first one in [`minimal_projections`].
pub const MAX_RETRIES: usize = 8;

/// Largest `D` for which [`commutant`] will build its `D² × D²` system.
pub const MAX_COMMUTANT_DIM: usize = 40;

/// An algebra on `ℂ^D` given by a Hilbert–Schmidt orthonormal basis.
#[derive(Debug, Clone)]
pub struct AlgebraBasis<T: Real> {
    ambient_dim: usize,
    basis: Vec<ComplexMatrix<T>>,
    unital: bool,
    /// Column-major flattenings of the basis, `D² × dim`.
    frame: DMatrix<Complex<T>>,
}

impl<T: Real> AlgebraBasis<T> {
    fn from_frame(ambient_dim: usize, frame: DMatrix<Complex<T>>, unital: bool) -> Self {
        let basis = frame
            .column_iter()
            .map(|col| ComplexMatrix::from_vector(&col.into_owned(), ambient_dim, ambient_dim))
            .collect();
        Self {
            ambient_dim,
            basis,
            unital,
            frame,
        }
    }

    /// `ℂ·1`.
    pub fn scalars(d: usize) -> Self {
        generate_algebra_in(d, &[], true)
    }

    /// All of `M_D`.
    pub fn full(d: usize) -> Self {
        let units: Vec<_> = (0..d * d)
            .map(|k| ComplexMatrix::unit(d, k / d, k % d))
            .collect();
        generate_algebra_in(d, &units, true)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix<T>] {
        &self.basis
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    /// Orthogonal projection of `x` onto the span.
    pub fn project(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let v = x.to_vector();
        let coeffs = self.frame.adjoint() * &v;
        ComplexMatrix::from_vector(&(&self.frame * coeffs), self.ambient_dim, self.ambient_dim)
    }

    /// `‖x − Πx‖₂ / ‖x‖₂`, or 0 for `x = 0`.
    pub fn residual(&self, x: &ComplexMatrix<T>) -> T {
        let nx = x.frobenius_norm();
        if nx == T::zero() {
            return T::zero();
        }
        (x - &self.project(x)).frobenius_norm() / nx
    }

    pub fn contains(&self, x: &ComplexMatrix<T>) -> bool {
        self.residual(x) <= T::tol(tol::PROJECTION)
    }

    /// `max |⟨bᵢ, bⱼ⟩ − δᵢⱼ|`.
    pub fn gram_defect(&self) -> T {
        let g = self.frame.adjoint() * &self.frame;
        let id = DMatrix::<Complex<T>>::identity(g.nrows(), g.ncols());
        (g - id).iter().fold(T::zero(), |w, z| w.max(z.norm_sqr().sqrt()))
    }

    /// Worst membership residual of a basis adjoint.
    pub fn adjoint_residual(&self) -> T {
        self.basis
            .iter()
            .fold(T::zero(), |w, b| w.max(self.residual(&b.adjoint())))
    }

    /// `max ‖[bᵢ, bⱼ]‖₂` over all basis pairs. Quadratic in `dim`.
    pub fn max_commutator(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                worst = worst.max(a.commutator(b).frobenius_norm());
            }
        }
        worst
    }

    /// Whether `other` has the same span.
    pub fn same_span(&self, other: &AlgebraBasis<T>) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.dim() == other.dim()
            && other.basis.iter().all(|b| self.contains(b))
    }
}

/// Incrementally grown orthonormal frame in `ℂ^{D²}`.
struct SpanBuilder<T: Real> {
    d: usize,
    frame: DMatrix<Complex<T>>,
}

impl<T: Real> SpanBuilder<T> {
    fn new(d: usize) -> Self {
        Self {
            d,
            frame: DMatrix::zeros(d * d, 0),
        }
    }

    /// Adds the part of `candidates` outside the current span; returns the
    /// new orthonormal directions as matrices.
    ///
    /// Each candidate is normalized and projected off the frame twice; it is
    /// kept when the residual is above the rank tolerance.
    fn absorb(&mut self, candidates: &[ComplexMatrix<T>]) -> Vec<ComplexMatrix<T>> {
        let floor = T::tol(tol::RANK);
        let mut added = Vec::new();
        for x in candidates {
            let mut v = x.to_vector();
            let nrm = v.norm();
            if nrm <= floor {
                continue;
            }
            v.unscale_mut(nrm);
            for _ in 0..2 {
                if self.frame.ncols() > 0 {
                    let coeffs = self.frame.adjoint() * &v;
                    v -= &self.frame * coeffs;
                }
            }
            let rest = v.norm();
            if rest <= floor {
                continue;
            }
            v.unscale_mut(rest);
            let k0 = self.frame.ncols();
            self.frame = std::mem::replace(&mut self.frame, DMatrix::zeros(0, 0))
                .insert_column(k0, Complex::new(T::zero(), T::zero()));
            self.frame.set_column(k0, &v);
            added.push(ComplexMatrix::from_vector(&v, self.d, self.d));
        }
        added
    }
}

/// The *-algebra generated by `generators` (and `1` when `unital`).
pub fn generate_algebra<T: Real>(
    generators: &[ComplexMatrix<T>],
    unital: bool,
) -> Result<AlgebraBasis<T>> {
    let first = generators
        .first()
        .ok_or(Error::EmptyInput("generator list (use generate_algebra_in)"))?;
    let d = first.rows();
    for g in generators {
        if g.rows() != d || g.cols() != d {
            return Err(Error::ShapeMismatch(format!(
                "generator is {}×{}, expected {d}×{d}",
                g.rows(),
                g.cols()
            )));
        }
    }
    Ok(generate_algebra_in(d, generators, unital))
}

/// [`generate_algebra`] with an explicit ambient dimension, so that an empty
/// generator list is allowed.
///
/// # Panics
/// If a generator is not `d × d`.
pub fn generate_algebra_in<T: Real>(
    d: usize,
    generators: &[ComplexMatrix<T>],
    unital: bool,
) -> AlgebraBasis<T> {
    let floor = T::tol(tol::RANK);
    let mut mults: Vec<ComplexMatrix<T>> = Vec::new();
    for g in generators {
        assert!(g.rows() == d && g.cols() == d, "generator shape");
        let n = g.frobenius_norm();
        if n <= floor {
            continue;
        }
        let g = g.scale_real(T::one() / n);
        let ga = g.adjoint();
        let self_adjoint = g.max_abs_diff(&ga) <= T::tol(tol::ENTRY);
        mults.push(g);
        if !self_adjoint {
            mults.push(ga);
        }
    }
    if let Some(frame) = abelian_frame(d, &mults, unital) {
        let tmp = AlgebraBasis::from_frame(d, frame, unital);
        let has_one = unital || tmp.contains(&ComplexMatrix::identity(d));
        return AlgebraBasis { unital: has_one, ..tmp };
    }
    let mut builder = SpanBuilder::new(d);
    let mut seed = mults.clone();
    if unital {
        seed.push(ComplexMatrix::identity(d));
    }
    let mut queue: VecDeque<_> = builder.absorb(&seed).into();
    while let Some(x) = queue.pop_front() {
        let products: Vec<_> = mults.iter().map(|g| g * &x).collect();
        queue.extend(builder.absorb(&products));
    }
    let frame = builder.frame;
    let has_one = unital || {
        let tmp = AlgebraBasis::from_frame(d, frame.clone(), false);
        tmp.contains(&ComplexMatrix::identity(d))
    };
    AlgebraBasis::from_frame(d, frame, has_one)
}

/// Basis of minimal projections for normal, pairwise commuting generators
/// (normalized, closed under adjoint). `None` when the generators are not of
/// that kind or no sample separates their joint spectrum.
fn abelian_frame<T: Real>(
    d: usize,
    gens: &[ComplexMatrix<T>],
    unital: bool,
) -> Option<DMatrix<Complex<T>>> {
    if gens.is_empty() {
        return None;
    }
    let eps = T::tol(tol::ABELIAN);
    for (k, a) in gens.iter().enumerate() {
        if gens[k + 1..].iter().any(|b| a.commutator(b).frobenius_norm() > eps) {
            return None;
        }
    }
    let membership = T::tol(tol::PROJECTION);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6162_656c);
    for _ in 0..=MAX_RETRIES {
        // The adjoints are among the generators, so this is self-adjoint and
        // its spectral projections lie in the generated algebra.
        let h = gens.iter().fold(ComplexMatrix::zeros(d, d), |acc, g| {
            let x: f64 = rng.random_range(-1.0..1.0);
            &acc + &(g + &g.adjoint()).scale_real(T::from_f64_lossy(x))
        });
        let clusters: Vec<_> = spectral_clusters(&h)
            .into_iter()
            .map(|(p, _)| p)
            .filter(|p| unital || gens.iter().any(|g| (g * p).frobenius_norm() > membership))
            .collect();
        let reproduces = gens.iter().all(|g| {
            let approx = clusters.iter().fold(ComplexMatrix::zeros(d, d), |acc, p| {
                let rank = p.trace().re;
                &acc + &p.scale((g * p).trace().unscale(rank))
            });
            (&approx - g).frobenius_norm() <= membership
        });
        if reproduces {
            let cols: Vec<_> = clusters
                .iter()
                .map(|p| {
                    let v = p.to_vector();
                    let n = v.norm();
                    v.unscale(n)
                })
                .collect();
            return Some(DMatrix::from_columns(&cols));
        }
    }
    None
}

/// `{T : Tb = bT for every basis element b}`.
///
/// Solved as the null space of `Σ_b K_b* K_b` with `K_b = 1⊗b − bᵀ⊗1`, the
/// matrix of `T ↦ bT − Tb` on column-major `vec(T)`.
pub fn commutant<T: Real>(a: &AlgebraBasis<T>) -> Result<AlgebraBasis<T>> {
    let d = a.ambient_dim();
    if d > MAX_COMMUTANT_DIM {
        return Err(Error::ResourceLimit {
            required: d * d,
            cap: MAX_COMMUTANT_DIM * MAX_COMMUTANT_DIM,
        });
    }
    let id = ComplexMatrix::<T>::identity(d);
    let mut p = ComplexMatrix::zeros(d, d);
    let mut q = ComplexMatrix::zeros(d, d);
    let mut cross = DMatrix::<Complex<T>>::zeros(d * d, d * d);
    for b in a.basis() {
        let bs = b.adjoint();
        p = &p + &(&bs * b);
        q = &q + &(b * &bs);
        cross += b.transpose().tensor(&bs).into_inner();
        cross += b.conj().tensor(b).into_inner();
    }
    let g = id.tensor(&p).into_inner() + q.transpose().tensor(&id).into_inner() - cross;
    let eig = hermitian_eigen(g);
    let top = eig.eigenvalues.iter().fold(T::zero(), |w, &x| w.max(x.abs()));
    let scale = top.max(T::one() / T::from_usize(d).unwrap());
    let cut = scale * T::tol(tol::NULLSPACE);
    let cols: Vec<_> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &x)| x <= cut)
        .map(|(k, _)| eig.eigenvectors.column(k).into_owned())
        .collect();
    let frame = if cols.is_empty() {
        DMatrix::zeros(d * d, 0)
    } else {
        DMatrix::from_columns(&cols)
    };
    Ok(AlgebraBasis::from_frame(d, frame, true))
}

/// Minimal projections of an abelian algebra and the ranks of their ranges.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport<T: Real> {
    pub multiplicities: Vec<usize>,
    pub as_set: NSet,
    #[serde(skip)]
    pub block_projections: Vec<ComplexMatrix<T>>,
}

impl<T: Real> SpectrumReport<T> {
    pub fn empty() -> Self {
        Self {
            multiplicities: Vec::new(),
            as_set: NSet::empty(),
            block_projections: Vec::new(),
        }
    }

    fn from_projections(block_projections: Vec<ComplexMatrix<T>>, ranks: Vec<usize>) -> Self {
        let as_set = ranks.iter().map(|&r| NValue::Fin(r as u64)).collect();
        Self {
            multiplicities: ranks,
            as_set,
            block_projections,
        }
    }

    pub fn total(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn block_count(&self) -> usize {
        self.multiplicities.len()
    }
}

/// Relative size of `[b, h]` for a random `h` in the span, maximized over the
/// basis. Zero for abelian algebras up to rounding.
fn abelian_residual<T: Real>(a: &AlgebraBasis<T>, rng: &mut ChaCha8Rng) -> T {
    let h = random_element(a, rng);
    let nh = h.frobenius_norm();
    if nh == T::zero() {
        return T::zero();
    }
    a.basis()
        .iter()
        .fold(T::zero(), |w, b| w.max(b.commutator(&h).frobenius_norm() / nh))
}

fn random_element<T: Real>(a: &AlgebraBasis<T>, rng: &mut ChaCha8Rng) -> ComplexMatrix<T> {
    let d = a.ambient_dim();
    a.basis().iter().fold(ComplexMatrix::zeros(d, d), |acc, b| {
        let x: f64 = rng.random_range(-1.0..1.0);
        &acc + &b.scale_real(T::from_f64_lossy(x))
    })
}

/// Self-adjoint random element `Σ xₖ (bₖ + bₖ*)/2`.
fn random_self_adjoint<T: Real>(a: &AlgebraBasis<T>, rng: &mut ChaCha8Rng) -> ComplexMatrix<T> {
    let x = random_element(a, rng);
    (&x + &x.adjoint()).scale_real(T::from_f64_lossy(0.5))
}

/// Splits the spectrum of a self-adjoint `h` into clusters and returns the
/// spectral projections with their ranks, in increasing eigenvalue order.
fn spectral_clusters<T: Real>(h: &ComplexMatrix<T>) -> Vec<(ComplexMatrix<T>, usize)> {
    let d = h.rows();
    let eig = hermitian_eigen(h.inner().clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("finite eigenvalues")
    });
    let spread = eig.eigenvalues.iter().fold(T::zero(), |w, &x| w.max(x.abs()));
    let gap = spread * T::tol(tol::EIGEN_GAP);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (pos, &k) in order.iter().enumerate() {
        let split = pos == 0 || eig.eigenvalues[k] - eig.eigenvalues[order[pos - 1]] > gap;
        if split {
            groups.push(vec![k]);
        } else {
            groups.last_mut().unwrap().push(k);
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let cols: Vec<_> = g.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
            let v = DMatrix::from_columns(&cols);
            (ComplexMatrix::from_inner(&v * v.adjoint()), g.len())
        })
        .collect()
}

/// Minimal projections of an abelian algebra, found as spectral projections
/// of a seeded random self-adjoint element.
///
/// A non-unital input is handled in its unitization; the extra projection
/// onto the complement of its unit is dropped from the report.
pub fn minimal_projections<T: Real>(a: &AlgebraBasis<T>, seed: u64) -> Result<SpectrumReport<T>> {
    let d = a.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let residual = abelian_residual(a, &mut rng);
    if residual > T::tol(tol::ABELIAN) {
        return Err(Error::NotAbelian {
            residual: residual.as_f64(),
        });
    }
    let unitized;
    let work = if a.is_unital() {
        a
    } else {
        let mut gens = a.basis().to_vec();
        gens.push(ComplexMatrix::identity(d));
        unitized = generate_algebra_in(d, &gens, true);
        &unitized
    };
    let membership = T::tol(tol::PROJECTION);
    for _ in 0..=MAX_RETRIES {
        let h = random_self_adjoint(work, &mut rng);
        let clusters = spectral_clusters(&h);
        if clusters.len() != work.dim() {
            continue;
        }
        if clusters.iter().any(|(p, _)| work.residual(p) > membership) {
            continue;
        }
        let (projs, ranks): (Vec<_>, Vec<_>) = clusters
            .into_iter()
            .filter(|(p, _)| std::ptr::eq(work, a) || a.residual(p) <= membership)
            .unzip();
        return Ok(SpectrumReport::from_projections(projs, ranks));
    }
    Err(Error::DegenerateSample {
        retries: MAX_RETRIES,
    })
}

/// Multiplicities of the minimal projections of `c` lying under `p`.
pub fn cutdown_spectrum<T: Real>(
    c: &AlgebraBasis<T>,
    p: &ComplexMatrix<T>,
    seed: u64,
) -> Result<SpectrumReport<T>> {
    let d = c.ambient_dim();
    if p.rows() != d || p.cols() != d {
        return Err(Error::ShapeMismatch(format!(
            "cutdown projection is {}×{}, algebra acts on ℂ^{d}",
            p.rows(),
            p.cols()
        )));
    }
    let eps = T::tol(tol::PROJECTION);
    if p.frobenius_norm() <= eps {
        return Ok(SpectrumReport::empty());
    }
    let pr = p.projection_residual();
    if pr > eps {
        return Err(Error::NotProjection {
            residual: pr.as_f64(),
        });
    }
    let res = c.residual(p);
    if res > eps {
        return Err(Error::NotInAlgebra {
            residual: res.as_f64(),
        });
    }
    let full = minimal_projections(c, seed)?;
    let mut projs = Vec::new();
    let mut ranks = Vec::new();
    for (q, &rank) in full.block_projections.iter().zip(&full.multiplicities) {
        let pq = p * q;
        let scale = q.frobenius_norm().max(T::one());
        if (&pq - q).frobenius_norm() <= eps * scale {
            projs.push(q.clone());
            ranks.push(rank);
        } else if pq.frobenius_norm() > eps * scale {
            // p splits a minimal projection, so it is not in the algebra.
            return Err(Error::NotInAlgebra {
                residual: (&pq - q).frobenius_norm().as_f64(),
            });
        }
    }
    Ok(SpectrumReport::from_projections(projs, ranks))
}

fn check_abelian_generators<T: Real>(gens: &[ComplexMatrix<T>]) -> Result<()> {
    let mut worst = T::zero();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            let scale = (a.frobenius_norm() * b.frobenius_norm()).max(T::from_f64_lossy(f64::MIN_POSITIVE));
            worst = worst.max(a.commutator(b).frobenius_norm() / scale);
        }
    }
    if worst > T::tol(tol::ABELIAN) {
        return Err(Error::NotAbelian {
            residual: worst.as_f64(),
        });
    }
    Ok(())
}

fn check_elements<T: Real>(gens: &[ComplexMatrix<T>], shape: &TracedAlgebraShape) -> Result<()> {
    gens.iter().try_for_each(|g| shape.check_element(g))
}

/// The algebra `C = alg(L(A) ∪ R(B*))` on `L²(M)` for abelian generator
/// sets `A`, `B` in `M`, where `R(b*) = J L(b) J`.
pub fn mixed_algebra<T: Real>(
    a_gens: &[ComplexMatrix<T>],
    b_gens: &[ComplexMatrix<T>],
    space: &GnsSpace<T>,
) -> Result<AlgebraBasis<T>> {
    check_elements(a_gens, space.shape())?;
    check_elements(b_gens, space.shape())?;
    check_abelian_generators(a_gens)?;
    check_abelian_generators(b_gens)?;
    let mut ops = Vec::with_capacity(a_gens.len() + b_gens.len());
    for a in a_gens {
        ops.push(space.left(a)?);
    }
    for b in b_gens {
        ops.push(space.right(&b.adjoint())?);
    }
    Ok(generate_algebra_in(space.dim(), &ops, true))
}

/// Multiplicities of `alg(L(A) ∪ J L(B) J)` on `L²(M)`.
pub fn mixed_spectrum<T: Real>(
    a_gens: &[ComplexMatrix<T>],
    b_gens: &[ComplexMatrix<T>],
    shape: &TracedAlgebraShape,
    seed: u64,
) -> Result<SpectrumReport<T>> {
    let space = GnsSpace::new(shape.clone());
    let c = mixed_algebra(a_gens, b_gens, &space)?;
    minimal_projections(&c, seed)
}

/// Projection of `L²(M)` onto the span of the algebra `a ⊂ M`.
pub fn jones_projection<T: Real>(a: &AlgebraBasis<T>, space: &GnsSpace<T>) -> Result<ComplexMatrix<T>> {
    let cols = a
        .basis()
        .iter()
        .map(|b| space.to_vector(b))
        .collect::<Result<Vec<_>>>()?;
    let dim = space.dim();
    if cols.is_empty() {
        return Ok(ComplexMatrix::zeros(dim, dim));
    }
    let q = DMatrix::from_columns(&cols).qr().q();
    Ok(ComplexMatrix::from_inner(&q * q.adjoint()))
}

/// Multiplicities of `alg(L(A) ∪ R(A))` on `(1 − e_A) L²(M)` for a masa `A`.
pub fn finite_puk_spectrum<T: Real>(
    a_gens: &[ComplexMatrix<T>],
    shape: &TracedAlgebraShape,
    seed: u64,
) -> Result<SpectrumReport<T>> {
    check_elements(a_gens, shape)?;
    check_abelian_generators(a_gens)?;
    let n = shape.size();
    let alg_a = generate_algebra_in(n, a_gens, true);
    let mut with_center = alg_a.basis().to_vec();
    with_center.extend(shape.block_projections::<T>());
    let relative = commutant(&generate_algebra_in(n, &with_center, true))?;
    if relative.dim() != alg_a.dim() {
        return Err(Error::NotMasa {
            algebra_dim: alg_a.dim(),
            commutant_dim: relative.dim(),
        });
    }
    let space = GnsSpace::new(shape.clone());
    let e_a = jones_projection(&alg_a, &space)?;
    let c = mixed_algebra(a_gens, &adjoints(a_gens), &space)?;
    let p = &ComplexMatrix::identity(space.dim()) - &e_a;
    cutdown_spectrum(&c, &p, seed)
}

fn adjoints<T: Real>(xs: &[ComplexMatrix<T>]) -> Vec<ComplexMatrix<T>> {
    xs.iter().map(|x| x.adjoint()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::random_hermitian;

    type M = ComplexMatrix<f64>;

    fn diag_units(n: usize) -> Vec<M> {
        (0..n).map(|i| M::unit(n, i, i)).collect()
    }

    #[test]
    fn generate_examples() {
        assert_eq!(generate_algebra(&[M::identity(2)], true).unwrap().dim(), 1);
        assert_eq!(generate_algebra(&diag_units(4), true).unwrap().dim(), 4);
        let x = M::unit(3, 0, 1);
        let a = generate_algebra(&[x], false).unwrap();
        // x, x*, xx*, x*x span M₂ in the corner.
        assert_eq!(a.dim(), 4);
        assert!(!a.is_unital());
        assert!(a.gram_defect() < 1e-10);
        assert!(a.adjoint_residual() < 1e-9);
        assert!(generate_algebra::<f64>(&[], true).is_err());
    }

    #[test]
    fn corner_block_plus_scalar_stays_block_diagonal() {
        // Rank-deficient batches with zero rows once let a spurious
        // off-block direction into the span.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let mut x = M::zeros(3, 3);
            for i in 0..2 {
                for j in 0..2 {
                    x.set(i, j, Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
                }
            }
            let mut y = M::zeros(3, 3);
            y.set(2, 2, Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            assert_eq!(generate_algebra(&[x, y], true).unwrap().dim(), 5);
        }
    }

    #[test]
    fn generation_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h: M = random_hermitian(4, &mut rng);
        let a = generate_algebra(&[h, M::unit(4, 0, 0)], true).unwrap();
        let again = generate_algebra(a.basis(), true).unwrap();
        assert!(a.same_span(&again));
    }

    #[test]
    fn mixed_d0_d0_in_m2_is_four_products() {
        let shape = TracedAlgebraShape::full(2);
        let h = GnsSpace::<f64>::new(shape);
        let d0 = diag_units(2);
        let c = mixed_algebra(&d0, &d0, &h).unwrap();
        assert_eq!(c.dim(), 4);
        let j = h.conjugation();
        for ei in &d0 {
            for ej in &d0 {
                let p = &h.left(ei).unwrap() * &j.conjugate(&h.left(ej).unwrap());
                assert!(c.contains(&p));
            }
        }
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(commutant(&AlgebraBasis::<f64>::full(3)).unwrap().dim(), 1);
        assert_eq!(commutant(&AlgebraBasis::<f64>::scalars(3)).unwrap().dim(), 9);
        let h = GnsSpace::<f64>::new(TracedAlgebraShape::full(2));
        let lefts: Vec<_> = (0..4).map(|k| h.left(&M::unit(2, k / 2, k % 2)).unwrap()).collect();
        let comm = commutant(&generate_algebra(&lefts, true).unwrap()).unwrap();
        assert_eq!(comm.dim(), 4);
        for k in 0..4 {
            assert!(comm.contains(&h.right(&M::unit(2, k / 2, k % 2)).unwrap()));
        }
    }

    #[test]
    fn minimal_projection_examples() {
        let r = minimal_projections(&AlgebraBasis::<f64>::scalars(4), 1).unwrap();
        assert_eq!(r.multiplicities, vec![4]);
        let r = minimal_projections(&generate_algebra(&diag_units(3), true).unwrap(), 1).unwrap();
        assert_eq!(r.multiplicities, vec![1, 1, 1]);
        let full = AlgebraBasis::<f64>::full(2);
        assert!(matches!(minimal_projections(&full, 1), Err(Error::NotAbelian { .. })));
    }

    #[test]
    fn non_unital_input_reports_its_own_unit() {
        let p = M::diagonal(&[1.0, 1.0, 0.0].map(|x| crate::scalar::c(x, 0.0)));
        let a = generate_algebra(&[p], false).unwrap();
        let r = minimal_projections(&a, 5).unwrap();
        assert_eq!(r.multiplicities, vec![2]);
    }

    #[test]
    fn mixed_spectrum_examples() {
        let shape = TracedAlgebraShape::full(2);
        let r = mixed_spectrum(&diag_units(2), &diag_units(2), &shape, 0).unwrap();
        assert_eq!(r.multiplicities, vec![1; 4]);
        let one = [M::identity(2)];
        let r = mixed_spectrum(&one, &one, &shape, 0).unwrap();
        assert_eq!(r.as_set, "4".parse().unwrap());
        let bad = [M::unit(2, 0, 1), M::unit(2, 1, 0)];
        assert!(matches!(
            mixed_spectrum(&bad, &one, &shape, 0),
            Err(Error::NotAbelian { .. })
        ));
    }

    #[test]
    fn finite_puk_examples() {
        for n in [2, 3] {
            let r = finite_puk_spectrum(&diag_units(n), &TracedAlgebraShape::full(n), 7).unwrap();
            assert_eq!(r.multiplicities, vec![1; n * n - n]);
        }
        let h = GnsSpace::<f64>::new(TracedAlgebraShape::full(3));
        let a = generate_algebra(&diag_units(3), true).unwrap();
        let e = jones_projection(&a, &h).unwrap();
        assert!((e.trace().re - 3.0).abs() < 1e-10);
        let err = finite_puk_spectrum(&[M::identity(2)], &TracedAlgebraShape::full(2), 0);
        assert_eq!(err.unwrap_err(), Error::NotMasa { algebra_dim: 1, commutant_dim: 4 });
    }

    #[test]
    fn cutdown_examples() {
        let shape = TracedAlgebraShape::full(2);
        let h = GnsSpace::<f64>::new(shape);
        let d0 = diag_units(2);
        let c = mixed_algebra(&d0, &d0, &h).unwrap();
        let full = minimal_projections(&c, 2).unwrap();
        let all = cutdown_spectrum(&c, &M::identity(4), 2).unwrap();
        assert_eq!(all.multiplicities, full.multiplicities);
        let j = h.conjugation();
        let p = &h.left(&d0[0]).unwrap() * &j.conjugate(&h.left(&d0[1]).unwrap());
        assert_eq!(cutdown_spectrum(&c, &p, 2).unwrap().multiplicities, vec![1]);
        assert_eq!(cutdown_spectrum(&c, &M::zeros(4, 4), 2).unwrap().block_count(), 0);
        let outside = M::from_fn(4, 4, |_, _| crate::scalar::c(0.25, 0.0));
        assert!(matches!(cutdown_spectrum(&c, &outside, 2), Err(Error::NotInAlgebra { .. })));
    }
}
