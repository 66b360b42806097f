//! Scalar types the inductive dimension can be evaluated in.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num};

/// A field-like number type: exact rationals for reporting, floats for quick estimates.
pub trait DimensionScalar: Num + Clone + Debug {
    fn from_count(k: usize) -> Self;
}

impl<T> DimensionScalar for T
where
    T: Num + Clone + Debug + FromPrimitive,
{
    fn from_count(k: usize) -> Self {
        T::from_usize(k).expect("vertex count representable in scalar type")
    }
}
