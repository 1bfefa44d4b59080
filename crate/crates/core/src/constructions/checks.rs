//! Numerical certificates for the inner-product identities of the gadget
//! construction, on finite tensor powers `M_n^{⊗k}`.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::Serialize;

use super::{build_gadget, AutomorphismKind, ResourceGuard, ShiftGadget, TruncatedAutomorphism};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;
use crate::matrix::ComplexMatrix;
use crate::scalar::{cabs, tol, Real};

/// All words of length `len` over `0..n`, lexicographic.
pub(crate) fn words(n: usize, len: usize) -> Vec<Vec<usize>> {
    (0..n.pow(len as u32))
        .map(|mut k| {
            let mut w = vec![0; len];
            for slot in (0..len).rev() {
                w[slot] = k % n;
                k /= n;
            }
            w
        })
        .collect()
}

fn expected_norm(n: usize, m: usize) -> f64 {
    (n as f64).powi(-(2 * m as i32 + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyclaimReport {
    pub n: usize,
    pub m: usize,
    /// Number of `(I, J, r, s)` tuples evaluated.
    pub tuples: usize,
    /// Largest `|⟨e_I ξ_r θ(e_J), ξ_s⟩ − δ_{rs} n^{−(2m+1)}|`.
    pub max_deviation: f64,
}

/// `⟨e_I ξ_r θ(e_J), ξ_s⟩` in `L²(M_n^{⊗(m+1)})`, where `ξ_r` is `f_r` in the
/// first slot and `θ` is conjugation by `u₁⋯u_m`.
pub fn keyclaim_value<T: Real>(
    n: usize,
    i: &[usize],
    j: &[usize],
    r: usize,
    s: usize,
    guard: ResourceGuard,
) -> Result<Complex<T>> {
    let m = i.len();
    if j.len() != m || r >= n || s >= n || i.iter().chain(j).any(|&x| x >= n) {
        return Err(Error::InvalidInput("index tuple out of range".into()));
    }
    guard.check_tensor(n, m + 1)?;
    let g = build_gadget::<T>(n)?;
    let th = TruncatedAutomorphism::new(&g, AutomorphismKind::Theta, m);
    let x = &(&g.e_word(i, m + 1) * &g.embed(&g.f[r], 0, m + 1)) * &th.apply(&g.e_word(j, m + 1));
    Ok((&g.embed(&g.f[s], 0, m + 1).adjoint() * &x).normalized_trace())
}

/// Sweeps every `(I, J, r, s)` and reports the worst deviation from
/// `δ_{rs} n^{−(2m+1)}`.
pub fn keyclaim_check<T: Real>(n: usize, m: usize, guard: ResourceGuard) -> Result<KeyclaimReport> {
    let slots = m + 1;
    let dim = guard.check_tensor(n, slots)?;
    let g = build_gadget::<T>(n)?;
    let th = TruncatedAutomorphism::new(&g, AutomorphismKind::Theta, m);
    let fs: Vec<_> = (0..n).map(|r| g.embed(&g.f[r], 0, slots)).collect();
    let target = expected_norm(n, m);
    let scale = T::one() / T::from_usize(dim).unwrap();
    let mut worst = 0.0f64;
    let mut tuples = 0;
    for jw in words(n, m) {
        let theta_j = th.apply(&g.e_word(&jw, slots));
        for r in 0..n {
            let x = &fs[r] * &theta_j;
            for s in 0..n {
                // diag(F_r θ(e_J) F_s), summed over the support of each e_I.
                // e_I fixes slots 1..m, so its support is the set of basis
                // indices with a given quotient by n.
                let mut by_word = vec![Complex::new(T::zero(), T::zero()); dim / n];
                for b in 0..dim {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for a in 0..dim {
                        acc += x.get(b, a) * fs[s].get(a, b);
                    }
                    by_word[b / n] += acc;
                }
                let expected = if r == s { target } else { 0.0 };
                for v in by_word {
                    let v = v * Complex::new(scale, T::zero());
                    worst = worst.max(cabs(v - Complex::new(T::from_f64_lossy(expected), T::zero())).as_f64());
                    tuples += 1;
                }
            }
        }
    }
    Ok(KeyclaimReport {
        n,
        m,
        tuples,
        max_deviation: worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanReport {
    pub n: usize,
    pub m: usize,
    pub count: usize,
    pub min_gram_diagonal: f64,
    pub max_offdiagonal: f64,
    pub rank: usize,
}

impl SpanReport {
    /// `n^{2m}` non-zero, pairwise orthogonal elements spanning `M_n^{⊗m}`.
    pub fn passed(&self) -> bool {
        let full = self.n.pow(2 * self.m as u32);
        self.count == full
            && self.rank == full
            && self.min_gram_diagonal > tol::GRAM
            && self.max_offdiagonal < tol::GRAM
    }
}

/// Gram matrix under the normalized trace.
fn gram<T: Real>(family: &[ComplexMatrix<T>]) -> DMatrix<Complex<T>> {
    let dim = family[0].rows();
    let scale = Complex::new(T::one() / T::from_usize(dim).unwrap(), T::zero());
    let k = family.len();
    let mut g = DMatrix::from_element(k, k, Complex::new(T::zero(), T::zero()));
    for a in 0..k {
        for b in a..k {
            let v = family[a].hs_inner(&family[b]) * scale;
            g[(a, b)] = v;
            g[(b, a)] = v.conj();
        }
    }
    g
}

fn offdiag_and_diag<T: Real>(g: &DMatrix<Complex<T>>) -> (f64, Vec<f64>) {
    let k = g.nrows();
    let mut off = 0.0f64;
    let mut diag = Vec::with_capacity(k);
    for a in 0..k {
        for b in 0..k {
            if a == b {
                diag.push(g[(a, a)].re.as_f64());
            } else {
                off = off.max(cabs(g[(a, b)]).as_f64());
            }
        }
    }
    (off, diag)
}

/// The elements `e_I f_r θ(e_{J'} ⊗ 1)` of `M_n^{⊗m}`, `|I| = m`, `|J'| = m−1`.
pub fn family_span_check<T: Real>(n: usize, m: usize, guard: ResourceGuard) -> Result<SpanReport> {
    if m == 0 {
        return Err(Error::InvalidInput("family span check needs m ≥ 1".into()));
    }
    guard.check_tensor(n, m)?;
    let g = build_gadget::<T>(n)?;
    let th = TruncatedAutomorphism::new(&g, AutomorphismKind::Theta, m - 1);
    let thetas: Vec<_> = words(n, m - 1)
        .iter()
        .map(|jw| th.apply(&g.e_word(jw, m)))
        .collect();
    let fs: Vec<_> = (0..n).map(|r| g.embed(&g.f[r], 0, m)).collect();
    let mut family = Vec::new();
    for iw in words(n, m) {
        let ei = g.e_word(&iw, m);
        for f in &fs {
            let left = &ei * f;
            for t in &thetas {
                family.push(&left * t);
            }
        }
    }
    let gm = gram(&family);
    let (off, diag) = offdiag_and_diag(&gm);
    let eig = hermitian_eigen(gm);
    let top = eig.eigenvalues.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
    let cut = top * T::tol(tol::RANK);
    let rank = eig.eigenvalues.iter().filter(|&&x| x > cut).count();
    Ok(SpanReport {
        n,
        m,
        count: family.len(),
        min_gram_diagonal: diag.iter().copied().fold(f64::INFINITY, f64::min),
        max_offdiagonal: off,
        rank,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntertwinerReport {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub s: usize,
    /// `max |G_r − G_s|` over the two Gram matrices.
    pub defect: f64,
    /// Largest off-diagonal Gram entry of either family.
    pub max_offdiagonal: f64,
    /// Largest `|G_aa − n^{−(2m+1)}|` over either family.
    pub max_diagonal_deviation: f64,
}

impl IntertwinerReport {
    pub fn passed(&self) -> bool {
        self.defect < tol::GRAM
            && self.max_offdiagonal < tol::GRAM
            && self.max_diagonal_deviation < tol::GRAM
    }
}

fn source_family<T: Real>(
    g: &ShiftGadget<T>,
    th: &TruncatedAutomorphism<T>,
    m: usize,
    r: usize,
) -> Vec<ComplexMatrix<T>> {
    let slots = m + 1;
    let f = g.embed(&g.f[r], 0, slots);
    let thetas: Vec<_> = words(g.n, m)
        .iter()
        .map(|jw| th.apply(&g.e_word(jw, slots)))
        .collect();
    let mut out = Vec::new();
    for iw in words(g.n, m) {
        let left = &g.e_word(&iw, slots) * &f;
        for t in &thetas {
            out.push(&left * t);
        }
    }
    out
}

/// Compares the Gram matrices of `{e_I f_r θ(e_J)}` and `{e_I f_s θ(e_J)}`:
/// equality means `ξ_r ↦ ξ_s` extends to a partial isometry.
pub fn intertwiner_check<T: Real>(
    n: usize,
    m: usize,
    r: usize,
    s: usize,
    guard: ResourceGuard,
) -> Result<IntertwinerReport> {
    if r == s || r >= n || s >= n {
        return Err(Error::InvalidInput(format!(
            "need distinct r, s < {n}, got ({r}, {s})"
        )));
    }
    guard.check_tensor(n, m + 1)?;
    let g = build_gadget::<T>(n)?;
    let th = TruncatedAutomorphism::new(&g, AutomorphismKind::Theta, m);
    let gr = gram(&source_family(&g, &th, m, r));
    let gs = gram(&source_family(&g, &th, m, s));
    let defect = gr
        .iter()
        .zip(gs.iter())
        .fold(0.0f64, |w, (a, b)| w.max(cabs(*a - *b).as_f64()));
    let target = expected_norm(n, m);
    let (off_r, diag_r) = offdiag_and_diag(&gr);
    let (off_s, diag_s) = offdiag_and_diag(&gs);
    let diag_dev = diag_r
        .iter()
        .chain(&diag_s)
        .fold(0.0f64, |w, d| w.max((d - target).abs()));
    Ok(IntertwinerReport {
        n,
        m,
        r,
        s,
        defect,
        max_offdiagonal: off_r.max(off_s),
        max_diagonal_deviation: diag_dev,
    })
}

/// Generators of `D₀^{⊗k}` and of its image under the depth-`(k−1)`
/// truncation of `θ` or `φ`, in `M_n^{⊗k}`.
#[allow(clippy::type_complexity)]
pub fn truncated_masa_pair<T: Real>(
    n: usize,
    k: usize,
    kind: AutomorphismKind,
    guard: ResourceGuard,
) -> Result<(Vec<ComplexMatrix<T>>, Vec<ComplexMatrix<T>>)> {
    if k == 0 {
        return Err(Error::InvalidInput("truncation level k must be ≥ 1".into()));
    }
    guard.check_tensor(n, k)?;
    let g = build_gadget::<T>(n)?;
    let aut = TruncatedAutomorphism::new(&g, kind, k - 1);
    let a: Vec<_> = words(n, k).iter().map(|w| g.e_word(w, k)).collect();
    let b = a.iter().map(|x| aut.apply(x)).collect();
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyclaim_examples() {
        let guard = ResourceGuard::default();
        let v = keyclaim_value::<f64>(2, &[], &[], 0, 0, guard).unwrap();
        assert!((v.re - 0.5).abs() < 1e-12 && v.im.abs() < 1e-12);
        let v = keyclaim_value::<f64>(2, &[1], &[0], 0, 1, guard).unwrap();
        assert!(v.norm() < 1e-12);
        let v = keyclaim_value::<f64>(3, &[0, 2], &[1, 1], 2, 2, guard).unwrap();
        assert!((v.re - 1.0 / 243.0).abs() < 1e-12 && v.im.abs() < 1e-12);
    }

    #[test]
    fn keyclaim_sweep_small() {
        let rep = keyclaim_check::<f64>(2, 2, ResourceGuard::default()).unwrap();
        assert_eq!(rep.tuples, 2usize.pow(4) * 4);
        assert!(rep.max_deviation < 1e-10);
    }

    #[test]
    fn span_small() {
        let rep = family_span_check::<f64>(2, 1, ResourceGuard::default()).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.rank, 4);
    }

    #[test]
    fn intertwiner_small() {
        let rep = intertwiner_check::<f64>(2, 1, 0, 1, ResourceGuard::default()).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(intertwiner_check::<f64>(2, 1, 1, 1, ResourceGuard::default()).is_err());
    }

    #[test]
    fn words_are_lexicographic() {
        assert_eq!(words(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(words(3, 0), vec![Vec::<usize>::new()]);
    }
}
