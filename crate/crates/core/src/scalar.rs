//! Scalar abstraction for the planner core.
//!
//! All geometry and kinematics are generic over a floating-point scalar so the
//! same code runs in `f32` or `f64`. The file formats and the CLI pin `f64`
//! (see the aliases at the crate root).

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, NumCast};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + NumCast + Debug + Display + Default + Send + Sync + 'static
{
    /// Cast from an `f64` constant. Lossy for `f32`.
    fn of(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("finite f64 constant")
    }

    /// Widen to `f64`.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    fn of_usize(v: usize) -> Self {
        <Self as NumCast>::from(v).expect("usize fits scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle<S: Real>(a: S) -> S {
    let pi = S::PI();
    let two_pi = pi + pi;
    let mut r = (a + pi) % two_pi;
    if r < S::zero() {
        r = r + two_pi;
    }
    // Guards against rounding landing exactly on the seam.
    if r >= two_pi {
        r = r - two_pi;
    }
    let mut w = r - pi;
    if w >= pi {
        w = w - two_pi;
    }
    w
}
