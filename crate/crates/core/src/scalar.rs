//! Scalar abstraction for the numeric modules.
//!
//! Everything numeric is generic over a real field `T` (in practice `f32` or
//! `f64`); matrices hold `Complex<T>`. Tolerances are written once, in `f64`,
//! and mapped into the working precision through [`Real::tol`].

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Tolerance constants. Values are the `f64` figures; `f32` callers get them
/// floored at [`Real::TOLERANCE_FLOOR`].
pub mod tol {
    /// Entrywise equality of matrices.
    pub const ENTRY: f64 = 1e-12;
    /// Orthonormality of the GNS basis.
    pub const GNS_BASIS: f64 = 1e-12;
    /// Relative singular-value cut for span closure.
    pub const RANK: f64 = 1e-9;
    /// Relative eigenvalue cut for commutant null spaces.
    pub const NULLSPACE: f64 = 1e-9;
    /// Commutator size below which two elements are treated as commuting.
    pub const ABELIAN: f64 = 1e-9;
    /// Relative eigenvalue gap separating spectral clusters.
    pub const EIGEN_GAP: f64 = 1e-7;
    /// Projection and membership residuals.
    pub const PROJECTION: f64 = 1e-8;
    /// Gram-matrix comparisons in the identity checks.
    pub const GRAM: f64 = 1e-10;
}

/// Real scalar usable by the numeric core.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Lower bound applied to every tolerance in this precision.
    const TOLERANCE_FLOOR: f64;

    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 is representable")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("real scalar converts to f64")
    }

    /// A tolerance from [`tol`] in this precision.
    fn tol(base: f64) -> Self {
        Self::from_f64_lossy(base.max(Self::TOLERANCE_FLOOR))
    }
}

impl Real for f64 {
    const TOLERANCE_FLOOR: f64 = 0.0;
}

impl Real for f32 {
    const TOLERANCE_FLOOR: f64 = 1e-5;
}

/// Shorthand for the complex entry type.
pub type C<T> = Complex<T>;

pub(crate) fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Modulus of a complex scalar.
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}
