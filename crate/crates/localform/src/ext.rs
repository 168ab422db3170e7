//! Doubled extended integers: `2·x` for x in ½ℤ, plus a single `∞`.

use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// A value of ½ℤ ∪ {∞}, stored as twice the value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Dx(i64);

const INF: i64 = i64::MAX;

impl Dx {
    pub const INF: Dx = Dx(INF);
    pub const ZERO: Dx = Dx(0);

    /// The integer `n`.
    pub const fn int(n: i64) -> Dx {
        Dx(2 * n)
    }
    /// The half-integer `n/2`.
    pub const fn half(n: i64) -> Dx {
        Dx(n)
    }
    pub fn doubled(self) -> i64 {
        self.0
    }
    pub fn is_inf(self) -> bool {
        self.0 == INF
    }
    pub fn is_integer(self) -> bool {
        !self.is_inf() && self.0 % 2 == 0
    }
    /// Integer value, if integral.
    pub fn as_int(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.0 / 2)
        } else {
            None
        }
    }
    /// Smallest integer ≥ self (∞ stays ∞).
    pub fn ceil(self) -> Dx {
        if self.is_inf() {
            self
        } else {
            Dx(2 * self.0.div_euclid(2) + 2 * (self.0.rem_euclid(2)))
        }
    }
    pub fn min(self, o: Dx) -> Dx {
        if self.0 <= o.0 {
            self
        } else {
            o
        }
    }
    pub fn max(self, o: Dx) -> Dx {
        if self.0 >= o.0 {
            self
        } else {
            o
        }
    }
    /// k·self for k ≥ 0 (∞ stays ∞).
    pub fn times(self, k: i64) -> Dx {
        if self.is_inf() {
            self
        } else {
            Dx(self.0 * k)
        }
    }
    pub fn neg_finite(self) -> Dx {
        assert!(!self.is_inf());
        Dx(-self.0)
    }
}

impl std::ops::Add for Dx {
    type Output = Dx;
    fn add(self, o: Dx) -> Dx {
        if self.is_inf() || o.is_inf() {
            Dx::INF
        } else {
            Dx(self.0 + o.0)
        }
    }
}

impl std::ops::Sub for Dx {
    type Output = Dx;
    /// Subtracting ∞ is a caller bug.
    fn sub(self, o: Dx) -> Dx {
        assert!(!o.is_inf(), "cannot subtract infinity");
        if self.is_inf() {
            Dx::INF
        } else {
            Dx(self.0 - o.0)
        }
    }
}

impl PartialOrd for Dx {
    fn partial_cmp(&self, o: &Dx) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Dx {
    fn cmp(&self, o: &Dx) -> Ordering {
        self.0.cmp(&o.0)
    }
}

impl fmt::Display for Dx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "inf")
        } else if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for Dx {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_order() {
        assert_eq!(Dx::int(3) + Dx::half(1), Dx::half(7));
        assert_eq!(Dx::INF + Dx::int(-5), Dx::INF);
        assert!(Dx::int(100) < Dx::INF);
        assert_eq!(Dx::half(5).ceil(), Dx::int(3));
        assert_eq!(Dx::half(-5).ceil(), Dx::int(-2));
        assert_eq!(Dx::int(4).ceil(), Dx::int(4));
        assert_eq!(Dx::half(3).to_string(), "3/2");
        assert_eq!(Dx::int(-2).to_string(), "-2");
    }
}
