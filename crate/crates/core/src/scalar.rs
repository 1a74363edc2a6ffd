use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type used for QUBO coefficients, energies and the
/// weighting parameter.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    fn of_f64(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite value")
    }

    fn of_u64(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("representable integer")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
