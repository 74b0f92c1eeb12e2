//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! Configuration values stay in `f64`; the signal-model math is generic over
//! [`Real`] and converts constants with [`Real::lit`].

use nalgebra::{Complex, DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type the link models are evaluated in (`f32` or `f64`).
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::lit(n as f64)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Cplx<T> = Complex<T>;
pub type CVector<T> = DVector<Complex<T>>;
pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// dBm to milliwatts (the project-wide linear power unit).
pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}
