//! Floating-point scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the detector can run over (`f32` or `f64`).
///
/// `Display` must print the shortest representation that parses back to the
/// same value; both primitive float types satisfy this.
pub trait Scalar:
    Float + NumAssign + FromPrimitive + ToPrimitive + Sum + FromStr + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion used for constants and counts.
    fn of_f64(value: f64) -> Self {
        Self::from_f64(value).expect("finite constant fits the scalar type")
    }

    fn of_usize(value: usize) -> Self {
        Self::from_usize(value).expect("count fits the scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
