use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// The exponent α: an exact rational, or an irrational number known only to
/// lie in an open rational interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AlphaSpec {
    Exact(Rational),
    Irrational { lo: Rational, hi: Rational },
}

impl AlphaSpec {
    /// Exact α with `0 < α <= 1`.
    pub fn exact(value: Rational) -> Result<Self> {
        if value <= Rational::zero() || value > Rational::one() {
            return Err(Error::InvalidAlpha(format!(
                "exact alpha must lie in (0, 1], got {}",
                rational::format(&value)
            )));
        }
        Ok(AlphaSpec::Exact(value))
    }

    /// Irrational α somewhere in `(lo, hi)`, `0 < lo < hi < 1`.
    pub fn irrational(lo: Rational, hi: Rational) -> Result<Self> {
        if lo <= Rational::zero() || hi >= Rational::one() || lo >= hi {
            return Err(Error::InvalidAlpha(format!(
                "irrational alpha needs 0 < lo < hi < 1, got ({}, {})",
                rational::format(&lo),
                rational::format(&hi)
            )));
        }
        Ok(AlphaSpec::Irrational { lo, hi })
    }

    pub fn parse_exact(s: &str) -> Result<Self> {
        AlphaSpec::exact(rational::parse(s)?)
    }

    pub fn exact_value(&self) -> Option<Rational> {
        match self {
            AlphaSpec::Exact(r) => Some(*r),
            AlphaSpec::Irrational { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AlphaSpec::Exact(_))
    }

    /// A rational representative: the value itself, or the interval midpoint.
    pub fn representative(&self) -> Rational {
        match self {
            AlphaSpec::Exact(r) => *r,
            AlphaSpec::Irrational { lo, hi } => (lo + hi) / rational::int(2),
        }
    }

    fn imprecise(&self, threshold: &Rational) -> Error {
        match self {
            AlphaSpec::Irrational { lo, hi } => Error::InsufficientPrecision {
                lo: rational::format(lo),
                hi: rational::format(hi),
                threshold: rational::format(threshold),
            },
            AlphaSpec::Exact(_) => unreachable!("exact alpha is always decided"),
        }
    }

    /// Sign of `p - q·α`.
    pub fn sign_of(&self, p: &Rational, q: &Rational) -> Result<Ordering> {
        match self {
            AlphaSpec::Exact(a) => Ok((p - q * a).cmp(&Rational::zero())),
            AlphaSpec::Irrational { lo, hi } => {
                if q.is_zero() {
                    return Ok(p.cmp(&Rational::zero()));
                }
                // zero exactly at α = t
                let t = p / q;
                let below_t = if &t >= hi {
                    true
                } else if &t <= lo {
                    false
                } else {
                    return Err(self.imprecise(&t));
                };
                // q > 0: value positive iff α < t
                Ok(match (q.is_positive(), below_t) {
                    (true, true) | (false, false) => Ordering::Greater,
                    _ => Ordering::Less,
                })
            }
        }
    }

    /// Compares α with a rational.
    pub fn cmp_rational(&self, r: &Rational) -> Result<Ordering> {
        // α - r = -(r - 1·α)
        self.sign_of(r, &Rational::one()).map(Ordering::reverse)
    }

    /// True iff `lo < α < hi` (open interval), deciding for the whole spec.
    pub fn in_open(&self, lo: &Rational, hi: &Rational) -> Result<bool> {
        Ok(self.cmp_rational(lo)? == Ordering::Greater && self.cmp_rational(hi)? == Ordering::Less)
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Exact(r) => write!(f, "{}", rational::format(r)),
            AlphaSpec::Irrational { lo, hi } => {
                write!(f, "irrational in ({}, {})", rational::format(lo), rational::format(hi))
            }
        }
    }
}

/// The affine value `p - q·α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DimValue {
    #[serde(with = "rational::serde_str")]
    pub p: Rational,
    #[serde(with = "rational::serde_str")]
    pub q: Rational,
}

impl DimValue {
    pub fn new(p: Rational, q: Rational) -> Self {
        DimValue { p, q }
    }

    pub fn zero() -> Self {
        DimValue::new(Rational::zero(), Rational::zero())
    }

    pub fn constant(p: Rational) -> Self {
        DimValue::new(p, Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn eval(&self, alpha: &Rational) -> Rational {
        self.p - self.q * alpha
    }

    /// Exact value when α is exact.
    pub fn value(&self, alpha: &AlphaSpec) -> Option<Rational> {
        alpha.exact_value().map(|a| self.eval(&a))
    }

    pub fn approx(&self, alpha: &AlphaSpec) -> f64 {
        rational::to_f64(&self.eval(&alpha.representative()))
    }
}

impl fmt::Display for DimValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            return write!(f, "{}", rational::format(&self.p));
        }
        let (sign, mag) = if self.q.is_negative() {
            ("+", -self.q)
        } else {
            ("-", self.q)
        };
        let coeff = if mag.is_one() {
            String::new()
        } else {
            rational::format(&mag)
        };
        write!(f, "{} {} {}α", rational::format(&self.p), sign, coeff)
    }
}

impl Add for DimValue {
    type Output = DimValue;
    fn add(self, o: DimValue) -> DimValue {
        DimValue::new(self.p + o.p, self.q + o.q)
    }
}

impl Sub for DimValue {
    type Output = DimValue;
    fn sub(self, o: DimValue) -> DimValue {
        DimValue::new(self.p - o.p, self.q - o.q)
    }
}

impl Neg for DimValue {
    type Output = DimValue;
    fn neg(self) -> DimValue {
        DimValue::new(-self.p, -self.q)
    }
}

impl Mul<Rational> for DimValue {
    type Output = DimValue;
    fn mul(self, k: Rational) -> DimValue {
        DimValue::new(self.p * k, self.q * k)
    }
}

/// Compares `x` and `y` as functions of α.
pub fn cmp(x: &DimValue, y: &DimValue, alpha: &AlphaSpec) -> Result<Ordering> {
    let d = *x - *y;
    alpha.sign_of(&d.p, &d.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn dv(p: i128, q: i128) -> DimValue {
        DimValue::new(int(p), int(q))
    }

    #[test]
    fn exact_comparison() {
        let a = AlphaSpec::exact(ratio(1, 2)).unwrap();
        assert_eq!(cmp(&dv(3, 4), &dv(1, 0), &a), Ok(Ordering::Equal));
        assert_eq!(cmp(&dv(3, 4), &dv(0, 0), &a), Ok(Ordering::Greater));
    }

    #[test]
    fn irrational_comparison() {
        let a = AlphaSpec::irrational(ratio(70, 100), ratio(71, 100)).unwrap();
        // threshold 3/4 lies above the interval, so 3 - 4α > 0 throughout
        assert_eq!(cmp(&dv(3, 4), &DimValue::zero(), &a), Ok(Ordering::Greater));
        assert_eq!(cmp(&dv(2, 4), &DimValue::zero(), &a), Ok(Ordering::Less));
        assert!(matches!(
            cmp(&dv(141, 200), &DimValue::zero(), &a),
            Err(Error::InsufficientPrecision { .. })
        ));
        // same α-coefficient: decided by p alone
        assert_eq!(cmp(&dv(2, 5), &dv(1, 5), &a), Ok(Ordering::Greater));
        // negative q side
        assert_eq!(cmp(&dv(0, -1), &DimValue::zero(), &a), Ok(Ordering::Greater));
    }

    #[test]
    fn alpha_validation() {
        assert!(AlphaSpec::exact(int(1)).is_ok());
        assert!(AlphaSpec::exact(int(0)).is_err());
        assert!(AlphaSpec::exact(ratio(3, 2)).is_err());
        assert!(AlphaSpec::irrational(ratio(1, 2), int(1)).is_err());
        assert!(AlphaSpec::irrational(ratio(1, 2), ratio(1, 3)).is_err());
        assert!(AlphaSpec::irrational(int(0), ratio(1, 3)).is_err());
    }

    #[test]
    fn display_affine() {
        assert_eq!(dv(3, 4).to_string(), "3 - 4α");
        assert_eq!(dv(1, 1).to_string(), "1 - α");
        assert_eq!(dv(2, -1).to_string(), "2 + α");
        assert_eq!(dv(5, 0).to_string(), "5");
    }

    #[test]
    fn interval_membership() {
        let a = AlphaSpec::irrational(ratio(7070, 10000), ratio(7072, 10000)).unwrap();
        assert_eq!(a.in_open(&ratio(2, 3), &ratio(4, 5)), Ok(true));
        assert_eq!(a.in_open(&ratio(3, 4), &int(1)), Ok(false));
        assert!(a.in_open(&ratio(7071, 10000), &int(1)).is_err());
    }
}
