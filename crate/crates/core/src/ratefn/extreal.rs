use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

/// A real number or `+∞`. Rate functions jump to `+∞` past the essential
/// supremum of the walk increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            Self::PosInf
        } else {
            Self::Finite(x)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    /// Value as `f64`, with `+∞` mapped to `f64::INFINITY`.
    pub fn value(&self) -> f64 {
        match self {
            Self::Finite(x) => *x,
            Self::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Self::Finite(x) => Some(*x),
            Self::PosInf => None,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Self::PosInf, Self::PosInf) => Some(Ordering::Equal),
            (Self::PosInf, Self::Finite(_)) => Some(Ordering::Greater),
            (Self::Finite(_), Self::PosInf) => Some(Ordering::Less),
            (Self::Finite(a), Self::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl Add for ExtReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Self::Finite(a), Self::Finite(b)) => Self::from_f64(a + b),
            _ => Self::PosInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        self + Self::Finite(rhs)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(x) => fmt::Display::fmt(x, f),
            Self::PosInf => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_and_dominates() {
        let inf = ExtReal::PosInf;
        let one = ExtReal::Finite(1.0);
        assert_eq!(inf + one, inf);
        assert_eq!(one + 2.0, ExtReal::Finite(3.0));
        assert!(inf > one);
        assert_eq!(inf.min(one), one);
        assert_eq!(ExtReal::from(f64::INFINITY), inf);
        assert_eq!(inf.to_string(), "inf");
        assert_eq!(inf.value(), f64::INFINITY);
    }
}
