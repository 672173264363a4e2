//! Extended real line ℝ ∪ {±∞} with the convention 0·(±∞) = 0.

use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn finite(v: f64) -> Self {
        debug_assert!(v.is_finite());
        ExtReal::Finite(v)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            _ => None,
        }
    }

    /// Multiplication by a finite scalar, with 0·(±∞) = 0.
    pub fn scale(&self, s: f64) -> ExtReal {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(s * v),
            _ if s == 0.0 => ExtReal::Finite(0.0),
            ExtReal::PosInf => {
                if s > 0.0 {
                    ExtReal::PosInf
                } else {
                    ExtReal::NegInf
                }
            }
            ExtReal::NegInf => {
                if s > 0.0 {
                    ExtReal::NegInf
                } else {
                    ExtReal::PosInf
                }
            }
        }
    }

    /// Addition; None for the indeterminate ∞ − ∞.
    pub fn checked_add(&self, other: &ExtReal) -> Option<ExtReal> {
        use ExtReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => None,
            (PosInf, _) | (_, PosInf) => Some(PosInf),
            (NegInf, _) | (_, NegInf) => Some(NegInf),
        }
    }

    pub fn min(a: ExtReal, b: ExtReal) -> ExtReal {
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn max(a: ExtReal, b: ExtReal) -> ExtReal {
        if a >= b {
            a
        } else {
            b
        }
    }

    pub fn abs(&self) -> ExtReal {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v.abs()),
            _ => ExtReal::PosInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtReal::*;
        Some(match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) => Ordering::Less,
            (_, NegInf) => Ordering::Greater,
            (PosInf, _) => Ordering::Greater,
            (_, PosInf) => Ordering::Less,
            (Finite(a), Finite(b)) => a.partial_cmp(b)?,
        })
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(ExtReal::PosInf.scale(0.0), ExtReal::Finite(0.0));
        assert_eq!(ExtReal::NegInf.scale(0.0), ExtReal::Finite(0.0));
    }

    #[test]
    fn ordering() {
        assert!(ExtReal::NegInf < ExtReal::Finite(-1e300));
        assert!(ExtReal::Finite(1e300) < ExtReal::PosInf);
    }
}
