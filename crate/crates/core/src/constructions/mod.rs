//! The shift gadget on `M_n`, its tensor-power unitaries, and the truncated
//! automorphisms built from them.

pub mod checks;
pub mod family;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{c, Real};

pub use checks::{
    family_span_check, intertwiner_check, keyclaim_check, truncated_masa_pair, IntertwinerReport,
    KeyclaimReport, SpanReport,
};
pub use family::{countable_family_plan, FamilyPlan, Gadget, LambdaMatrix, Role};

/// Caps the GNS dimension `D²` of the ambient `M_D` a check may build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceGuard {
    pub cap: usize,
}

impl ResourceGuard {
    pub const DEFAULT_CAP: usize = 4096;

    pub fn new(cap: usize) -> Self {
        Self { cap }
    }

    /// Errors if `M_n^{⊗slots}` has GNS dimension above the cap.
    pub fn check_tensor(&self, n: usize, slots: usize) -> Result<usize> {
        let required = u32::try_from(2 * slots)
            .ok()
            .and_then(|e| n.checked_pow(e))
            .unwrap_or(usize::MAX);
        if required > self.cap {
            return Err(Error::ResourceLimit {
                required,
                cap: self.cap,
            });
        }
        Ok(n.pow(slots as u32))
    }
}

impl Default for ResourceGuard {
    fn default() -> Self {
        Self::new(Self::DEFAULT_CAP)
    }
}

/// `D₀`, the shift `w`, `D₁ = alg(w)` and `v = Σ wⁱ ⊗ fᵢ` in `M_n`.
#[derive(Debug, Clone)]
pub struct ShiftGadget<T: Real> {
    pub n: usize,
    pub w: ComplexMatrix<T>,
    /// Diagonal matrix units.
    pub e: Vec<ComplexMatrix<T>>,
    /// Spectral projections of `w`; `w fᵢ = ωⁱ fᵢ` with `ω = e^{2πi/n}`.
    pub f: Vec<ComplexMatrix<T>>,
    pub v: ComplexMatrix<T>,
}

pub fn build_gadget<T: Real>(n: usize) -> Result<ShiftGadget<T>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("gadget needs n ≥ 2, got {n}")));
    }
    let w = ComplexMatrix::from_fn(n, n, |i, j| {
        if j == (i + 1) % n {
            c(T::one(), T::zero())
        } else {
            c(T::zero(), T::zero())
        }
    });
    let e = (0..n).map(|i| ComplexMatrix::unit(n, i, i)).collect();
    let powers: Vec<_> = (0..n).map(|k| w.pow(k)).collect();
    let inv_n = T::one() / T::from_usize(n).unwrap();
    let f: Vec<ComplexMatrix<T>> = (0..n)
        .map(|i| {
            powers.iter().enumerate().fold(ComplexMatrix::zeros(n, n), |acc, (k, wk)| {
                &acc + &wk.scale(omega::<T>(n, -((i * k % n) as i64)).scale(inv_n))
            })
        })
        .collect();
    let v = (0..n).fold(ComplexMatrix::zeros(n * n, n * n), |acc, i| {
        &acc + &powers[i].tensor(&f[i])
    });
    Ok(ShiftGadget { n, w, e, f, v })
}

/// `ω^k` with `ω = e^{2πi/n}`.
fn omega<T: Real>(n: usize, k: i64) -> num_complex::Complex<T> {
    let theta = 2.0 * std::f64::consts::PI * (k.rem_euclid(n as i64) as f64) / n as f64;
    c(T::from_f64_lossy(theta.cos()), T::from_f64_lossy(theta.sin()))
}

impl<T: Real> ShiftGadget<T> {
    /// `u_r = 1^{⊗(r−1)} ⊗ v` inside `M_n^{⊗slots}`, for `1 ≤ r < slots`.
    pub fn u(&self, r: usize, slots: usize) -> ComplexMatrix<T> {
        assert!(r >= 1 && r < slots, "u_{r} does not fit in {slots} slots");
        let left = ComplexMatrix::identity(self.n.pow(r as u32 - 1));
        let right = ComplexMatrix::identity(self.n.pow((slots - r - 1) as u32));
        left.tensor(&self.v).tensor(&right)
    }

    /// `x` placed in slot `slot` (0-based) of `M_n^{⊗slots}`.
    pub fn embed(&self, x: &ComplexMatrix<T>, slot: usize, slots: usize) -> ComplexMatrix<T> {
        let left = ComplexMatrix::identity(self.n.pow(slot as u32));
        let right = ComplexMatrix::identity(self.n.pow((slots - slot - 1) as u32));
        left.tensor(x).tensor(&right)
    }

    /// `e_{i₁} ⊗ … ⊗ e_{i_k}` padded with identities to `slots` factors.
    pub fn e_word(&self, word: &[usize], slots: usize) -> ComplexMatrix<T> {
        let id = ComplexMatrix::identity(self.n);
        let factors: Vec<_> = (0..slots)
            .map(|t| word.get(t).map_or(&id, |&i| &self.e[i]))
            .collect();
        ComplexMatrix::tensor_all(factors)
    }
}

/// Which of the two automorphisms a truncation approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutomorphismKind {
    /// Product over all `r ≤ depth`.
    Theta,
    /// Product over odd `r ≤ depth`.
    Phi,
}

/// `Ad(U)` with `U = Π u_r` acting on `M_n^{⊗(depth+1)}`.
#[derive(Debug, Clone)]
pub struct TruncatedAutomorphism<T: Real> {
    pub kind: AutomorphismKind,
    pub depth: usize,
    pub n: usize,
    pub unitary: ComplexMatrix<T>,
}

impl<T: Real> TruncatedAutomorphism<T> {
    pub fn new(gadget: &ShiftGadget<T>, kind: AutomorphismKind, depth: usize) -> Self {
        let slots = depth + 1;
        let dim = gadget.n.pow(slots as u32);
        let unitary = (1..=depth)
            .filter(|r| kind == AutomorphismKind::Theta || r % 2 == 1)
            .fold(ComplexMatrix::identity(dim), |acc, r| &acc * &gadget.u(r, slots));
        Self {
            kind,
            depth,
            n: gadget.n,
            unitary,
        }
    }

    pub fn slots(&self) -> usize {
        self.depth + 1
    }

    /// `U x U*` for `x ∈ M_n^{⊗(depth+1)}`.
    pub fn apply(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        &(&self.unitary * x) * &self.unitary.adjoint()
    }
}
