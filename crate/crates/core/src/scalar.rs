//! Exact scalar fields.
//!
//! Everything in the engine is generic over [`Field`]. The default
//! instantiation is [`Q`] (exact rationals with a machine-word fast path); [`Cyclotomic`]
//! covers diagonal actions whose eigenvalues are not `±1`.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::linalg::Matrix;
pub use crate::rational::Rat;

/// Exact field arithmetic. No floating point anywhere.
pub trait Field:
    Clone
    + Debug
    + Display
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// `ζ_order^k`, if the field contains it.
    fn root_of_unity(order: u32, k: u32) -> Option<Self>;

    /// Parses the canonical text form produced by `Display`.
    fn parse_canonical(s: &str) -> Option<Self>;

    fn is_negative_hint(&self) -> bool {
        false
    }
}

pub type Q = Rat;

impl Field for Rat {
    fn from_i64(v: i64) -> Self {
        Rat::from(v)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rat::new(num, den)
    }

    fn root_of_unity(order: u32, k: u32) -> Option<Self> {
        BigRational::root_of_unity(order, k).map(Rat::from)
    }

    fn parse_canonical(s: &str) -> Option<Self> {
        Rat::from_str(s.trim()).ok()
    }

    fn is_negative_hint(&self) -> bool {
        self.is_negative()
    }
}

impl Field for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn root_of_unity(order: u32, k: u32) -> Option<Self> {
        let order = order.max(1);
        let k = k % order;
        if k == 0 {
            Some(Self::one())
        } else if 2 * k == order {
            Some(-Self::one())
        } else {
            None
        }
    }

    fn parse_canonical(s: &str) -> Option<Self> {
        BigRational::from_str(s.trim()).ok()
    }

    fn is_negative_hint(&self) -> bool {
        self.is_negative()
    }
}

/// Element of `ℚ(ζ_N)`, stored as coefficients of `1, ζ, …, ζ^{φ(N)-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic<const N: usize> {
    coeffs: Vec<Q>,
}

fn poly_divrem(num: &[Q], den: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let mut rem = num.to_vec();
    let dl = den.len();
    if rem.len() < dl {
        return (vec![], rem);
    }
    let lead = den[dl - 1].clone();
    let mut quot = vec![Q::zero(); rem.len() - dl + 1];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dl - 1].clone() / lead.clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] = rem[i + j].clone() - c.clone() * dj.clone();
        }
        quot[i] = c;
    }
    rem.truncate(dl - 1);
    (quot, rem)
}

/// Coefficients of the `n`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(n: usize) -> Vec<Q> {
    assert!(n >= 1);
    let mut num = vec![Q::zero(); n + 1];
    num[0] = -Q::one();
    num[n] = Q::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let (q, _) = poly_divrem(&num, &cyclotomic_polynomial(d));
            num = q;
        }
    }
    num
}

impl<const N: usize> Cyclotomic<N> {
    pub fn degree() -> usize {
        cyclotomic_polynomial(N).len() - 1
    }

    fn reduce(mut coeffs: Vec<Q>) -> Self {
        let phi = cyclotomic_polynomial(N);
        if coeffs.len() >= phi.len() {
            coeffs = poly_divrem(&coeffs, &phi).1;
        }
        coeffs.resize(phi.len() - 1, Q::zero());
        Cyclotomic { coeffs }
    }

    pub fn from_rational(q: Q) -> Self {
        Self::reduce(vec![q])
    }

    /// `ζ_N^k`
    pub fn zeta_pow(k: usize) -> Self {
        let mut c = vec![Q::zero(); k % N + 1];
        c[k % N] = Q::one();
        Self::reduce(c)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    fn mul_matrix(&self) -> Matrix<Q> {
        let d = Self::degree();
        let mut m = Matrix::zeros(d, d);
        for j in 0..d {
            let col = self.clone() * Self::zeta_pow(j);
            for i in 0..d {
                m[(i, j)] = col.coeffs[i].clone();
            }
        }
        m
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = Self::degree();
        let mut rhs = vec![Q::zero(); d];
        rhs[0] = Q::one();
        self.mul_matrix().solve(&rhs).map(Self::reduce)
    }
}

impl<const N: usize> Debug for Cyclotomic<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}

impl<const N: usize> Display for Cyclotomic<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl<const N: usize> Zero for Cyclotomic<N> {
    fn zero() -> Self {
        Self::reduce(vec![])
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl<const N: usize> One for Cyclotomic<N> {
    fn one() -> Self {
        Self::reduce(vec![Q::one()])
    }
}

impl<const N: usize> Add for Cyclotomic<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let coeffs = self
            .coeffs
            .into_iter()
            .zip(rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Cyclotomic { coeffs }
    }
}

impl<const N: usize> Sub for Cyclotomic<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const N: usize> Neg for Cyclotomic<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Cyclotomic {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<const N: usize> Mul for Cyclotomic<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut prod = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                prod[i + j] = prod[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::reduce(prod)
    }
}

impl<const N: usize> Div for Cyclotomic<N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inverse().expect("division by zero in Q(zeta)")
    }
}

impl<const N: usize> Field for Cyclotomic<N> {
    fn from_i64(v: i64) -> Self {
        Self::from_rational(Q::from_i64(v))
    }

    fn root_of_unity(order: u32, k: u32) -> Option<Self> {
        let order = order.max(1) as usize;
        if !N.is_multiple_of(order) {
            return None;
        }
        Some(Self::zeta_pow((k as usize % order) * (N / order)))
    }

    fn parse_canonical(s: &str) -> Option<Self> {
        let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
        let coeffs: Option<Vec<Q>> = inner.split(',').map(Q::parse_canonical).collect();
        Some(Self::reduce(coeffs?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        let p4 = cyclotomic_polynomial(4);
        assert_eq!(p4, vec![Q::one(), Q::zero(), Q::one()]);
        assert_eq!(cyclotomic_polynomial(6).len(), 3);
        assert_eq!(Cyclotomic::<12>::degree(), 4);
    }

    #[test]
    fn zeta_has_order_n() {
        type K = Cyclotomic<6>;
        let z = K::zeta_pow(1);
        let mut acc = K::one();
        for _ in 0..6 {
            acc = acc * z.clone();
        }
        assert_eq!(acc, K::one());
        assert_ne!(z.clone() * z.clone() * z.clone(), K::one());
    }

    #[test]
    fn inverse_roundtrip() {
        type K = Cyclotomic<5>;
        let a = K::zeta_pow(1) + K::from_i64(3);
        let b = a.inverse().unwrap();
        assert_eq!(a * b, K::one());
    }

    #[test]
    fn rational_roots_of_unity() {
        assert_eq!(Q::root_of_unity(2, 1), Some(-Q::one()));
        assert_eq!(Q::root_of_unity(4, 2), Some(-Q::one()));
        assert_eq!(Q::root_of_unity(3, 1), None);
        assert_eq!(Cyclotomic::<3>::root_of_unity(3, 3), Some(Cyclotomic::one()));
    }

    #[test]
    fn parse_display() {
        let q = Q::from_ratio(-3, 4);
        assert_eq!(Q::parse_canonical(&q.to_string()), Some(q));
        let c = Cyclotomic::<3>::zeta_pow(2);
        assert_eq!(Cyclotomic::<3>::parse_canonical(&c.to_string()), Some(c));
    }
}
