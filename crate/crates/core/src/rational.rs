//! Exact rationals with an inline `i64` representation and a `BigRational`
//! fallback on overflow.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A rational number. Values representable as `i64/i64` are always stored
/// inline, so equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rat {
    /// Reduced, with positive denominator.
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn from_i128(n: i128, d: i128) -> Rat {
    debug_assert!(d != 0);
    let g = n.gcd(&d);
    let (mut n, mut d) = (n / g, d / g);
    if d < 0 {
        n = -n;
        d = -d;
    }
    match (i64::try_from(n), i64::try_from(d)) {
        (Ok(n), Ok(d)) => Rat::Small(n, d),
        _ => Rat::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
    }
}

fn from_big(q: BigRational) -> Rat {
    match (q.numer().to_i64(), q.denom().to_i64()) {
        (Some(n), Some(d)) => Rat::Small(n, d),
        _ => Rat::Big(Box::new(q)),
    }
}

impl Rat {
    pub fn new(n: i64, d: i64) -> Rat {
        assert!(d != 0, "zero denominator");
        from_i128(n as i128, d as i128)
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(b) => (**b).clone(),
        }
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n < 0,
            Rat::Big(b) => b.is_negative(),
        }
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Rat {
        Rat::Small(v, 1)
    }
}

impl From<BigRational> for Rat {
    fn from(q: BigRational) -> Rat {
        from_big(q)
    }
}

impl Zero for Rat {
    fn zero() -> Rat {
        Rat::Small(0, 1)
    }
    fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }
}

impl One for Rat {
    fn one() -> Rat {
        Rat::Small(1, 1)
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        match (&self, &rhs) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    return from_i128(*a as i128 + *c as i128, 1);
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                from_i128(a * d + c * b, b * d)
            }
            _ => from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::Small(n, d) if n != i64::MIN => Rat::Small(-n, d),
            other => from_big(-other.to_big()),
        }
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        self + (-rhs)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        match (&self, &rhs) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    return from_i128(*a as i128 * *c as i128, 1);
                }
                from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        match (&self, &rhs) {
            (Rat::Small(a, b), Rat::Small(c, d)) => from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128),
            _ => from_big(self.to_big() / rhs.to_big()),
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{}", n),
            Rat::Small(n, d) => write!(f, "{}/{}", n, d),
            Rat::Big(b) => write!(f, "{}", b),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = num_rational::ParseRatioError;
    fn from_str(s: &str) -> Result<Rat, Self::Err> {
        BigRational::from_str(s).map(from_big)
    }
}
