//! Exact arithmetic in the cyclic gain group.
//!
//! Group elements are the m-th roots of unity `exp(2πe/m · i)`, stored as the
//! integer exponent `e ∈ [0, m)` together with the group order `m ≥ 2`. All
//! group operations are integer arithmetic mod `m`; [`GainExponent::to_complex`]
//! is the only bridge into floating point.

use core::fmt;

use num_complex::Complex64;
// Needed for f64 math in no_std builds; the std test build has inherent methods.
#[allow(unused_imports)]
use num_traits::Float;

/// Order `m ≥ 2` of the cyclic gain group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupOrder(u32);

impl GroupOrder {
    pub fn new(m: u32) -> Result<Self, GroupError> {
        if m < 2 {
            return Err(GroupError::OrderTooSmall { m });
        }
        Ok(GroupOrder(m))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// The element with exponent `e mod m`.
    pub fn element(self, e: u32) -> GainExponent {
        GainExponent {
            e: e % self.0,
            order: self,
        }
    }

    /// The identity element (exponent 0).
    pub fn identity(self) -> GainExponent {
        self.element(0)
    }

    /// All `m` elements in exponent order.
    pub fn elements(self) -> impl Iterator<Item = GainExponent> {
        (0..self.0).map(move |e| self.element(e))
    }
}

impl fmt::Display for GroupOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of the cyclic gain group: the root of unity `exp(2πe/m · i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GainExponent {
    e: u32,
    order: GroupOrder,
}

impl GainExponent {
    pub fn exponent(self) -> u32 {
        self.e
    }

    pub fn order(self) -> GroupOrder {
        self.order
    }

    pub fn is_identity(self) -> bool {
        self.e == 0
    }

    /// Group multiplication; exponents add mod `m`.
    ///
    /// Fails when the two elements live in groups of different order.
    pub fn try_mul(self, rhs: Self) -> Result<Self, GroupError> {
        if self.order != rhs.order {
            return Err(GroupError::MismatchedOrders {
                left: self.order.get(),
                right: rhs.order.get(),
            });
        }
        Ok(self.order.element((self.e + rhs.e) % self.order.0))
    }

    /// Group inverse; exponent negates mod `m`.
    pub fn inv(self) -> Self {
        self.order.element((self.order.0 - self.e) % self.order.0)
    }

    /// The unit-modulus complex number this element stands for.
    pub fn to_complex(self) -> Complex64 {
        let angle = 2.0 * core::f64::consts::PI * f64::from(self.e) / f64::from(self.order.0);
        Complex64::new(angle.cos(), angle.sin())
    }
}

impl fmt::Display for GainExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupError {
    /// The cyclic group needs order at least two.
    OrderTooSmall { m: u32 },
    /// Two elements from groups of different order were combined.
    MismatchedOrders { left: u32, right: u32 },
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::OrderTooSmall { m } => {
                write!(f, "group order must be at least 2, got {m}")
            }
            GroupError::MismatchedOrders { left, right } => {
                write!(f, "mismatched group orders {left} and {right}")
            }
        }
    }
}

impl core::error::Error for GroupError {}
