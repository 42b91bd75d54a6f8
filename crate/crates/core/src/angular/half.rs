use core::fmt;
use core::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A half-integer stored as twice its value, so that `Half(3)` is 3/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Half(pub i32);

impl Half {
    pub const ZERO: Half = Half(0);
    pub const HALF: Half = Half(1);

    pub const fn from_int(n: i32) -> Self {
        Half(2 * n)
    }

    pub const fn from_doubled(twice: i32) -> Self {
        Half(twice)
    }

    /// Rejects anything that is not a multiple of 1/2.
    pub fn from_f64(x: f64) -> Result<Self> {
        let twice = x * 2.0;
        let r = num_traits::Float::round(twice);
        if (twice - r).abs() > 1e-9 || !r.is_finite() {
            return Err(Error::Domain(alloc::format!("{x} is not a half-integer")));
        }
        Ok(Half(r as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) * 0.5
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub const fn abs(self) -> Half {
        Half(self.0.abs())
    }

    /// Projections j, j-1, ..., -j in descending order (empty for negative j).
    pub fn projections(self) -> impl DoubleEndedIterator<Item = Half> + Clone {
        let j = self.0;
        (0..=(if j >= 0 { j } else { -1 })).map(move |k| Half(j - 2 * k))
    }

    /// (-1)^self for integer-valued self.
    pub(crate) fn parity_sign(self) -> f64 {
        debug_assert!(self.is_integer());
        if (self.0 / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl From<i32> for Half {
    fn from(n: i32) -> Self {
        Half::from_int(n)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for Half {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Half {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        Half::from_f64(x).map_err(serde::de::Error::custom)
    }
}
