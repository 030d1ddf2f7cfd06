//! Scalar abstraction for the core math.
//!
//! Everything numeric in this crate is generic over [`Real`], which is any
//! real field nalgebra can do linear algebra over (`f32`, `f64`). Concrete
//! `f64` aliases for the common types live at the crate root.

use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the crate.
pub trait Real: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy + Default {
    /// Lift an `f64` constant (tolerances, literals) into the scalar type.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("constant not representable in scalar type")
    }

    /// Lower to `f64` for logging, timing and I/O.
    #[inline]
    fn lossy(self) -> f64 {
        self.to_f64().expect("scalar not convertible to f64")
    }

    #[inline]
    fn infinity() -> Self {
        Self::c(f64::INFINITY)
    }

    #[inline]
    fn is_finite_scalar(self) -> bool {
        self.lossy().is_finite()
    }
}

impl<T> Real for T where T: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy + Default {}
