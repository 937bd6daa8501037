//! Truncated deformation ring `F[[p₀..p_{m-1}]]/(order > K)` tensored with a
//! Laurent window in `u`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Field;

pub const MAX_PARAMS: usize = 8;

/// Monomial `p^e · u^k` in the deformation parameters and `u`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DefMono {
    pub params: [u8; MAX_PARAMS],
    pub u: i16,
}

impl DefMono {
    pub const ONE: DefMono = DefMono { params: [0; MAX_PARAMS], u: 0 };

    pub fn param(j: usize) -> Self {
        let mut m = Self::ONE;
        m.params[j] = 1;
        m
    }

    pub fn u_pow(k: i16) -> Self {
        DefMono { u: k, ..Self::ONE }
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    /// Total degree in the parameters (ignores `u`).
    pub fn degree(&self) -> u32 {
        self.params.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &DefMono) -> DefMono {
        let mut params = self.params;
        for (a, b) in params.iter_mut().zip(other.params) {
            *a += b;
        }
        DefMono { params, u: self.u + other.u }
    }

    /// `∂/∂p_j`: the exponent that comes down and the lowered monomial.
    pub fn derivative(&self, j: usize) -> Option<(u8, DefMono)> {
        let e = self.params[j];
        if e == 0 {
            return None;
        }
        let mut m = *self;
        m.params[j] -= 1;
        Some((e, m))
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (j, &e) in self.params.iter().enumerate() {
            let name = names.get(j).cloned().unwrap_or_else(|| format!("p{}", j));
            match e {
                0 => {}
                1 => parts.push(name),
                e => parts.push(format!("{}^{}", name, e)),
            }
        }
        match self.u {
            0 => {}
            1 => parts.push("u".to_string()),
            k => parts.push(format!("u^{}", k)),
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    pub fn parse_with(s: &str, names: &[String]) -> Option<DefMono> {
        let s = s.trim();
        let mut m = DefMono::ONE;
        if s == "1" {
            return Some(m);
        }
        for factor in s.split('*') {
            let (name, pow) = match factor.split_once('^') {
                Some((n, p)) => (n.trim(), p.trim().parse::<i16>().ok()?),
                None => (factor.trim(), 1),
            };
            if name == "u" {
                m.u += pow;
            } else {
                let j = names.iter().position(|n| n == name)?;
                m.params[j] += u8::try_from(pow).ok()?;
            }
        }
        Some(m)
    }
}

/// Truncation data shared by all values of one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DefRing {
    pub n_params: usize,
    pub k_max: u32,
    pub u_max: i32,
}

impl DefRing {
    pub fn new(n_params: usize, k_max: u32, u_max: i32) -> Self {
        assert!(n_params <= MAX_PARAMS, "at most {} deformation parameters", MAX_PARAMS);
        DefRing { n_params, k_max, u_max }
    }

    /// Product of monomials: `None` if truncated, error if `u` leaves the window.
    pub fn mul_mono(&self, a: &DefMono, b: &DefMono) -> Result<Option<DefMono>> {
        let m = a.mul(b);
        if m.degree() > self.k_max {
            return Ok(None);
        }
        self.check_u(&m)?;
        Ok(Some(m))
    }

    pub fn check_u(&self, m: &DefMono) -> Result<()> {
        if (m.u as i32).abs() > self.u_max {
            return Err(Error::UWindowOverflow { exp: m.u as i32, max: self.u_max });
        }
        Ok(())
    }
}

/// Element of the truncated deformation ring.
#[derive(Clone, PartialEq)]
pub struct DefScalar<F> {
    ring: DefRing,
    terms: BTreeMap<DefMono, F>,
}

impl<F: Field> DefScalar<F> {
    pub fn zero(ring: DefRing) -> Self {
        DefScalar { ring, terms: BTreeMap::new() }
    }

    pub fn constant(ring: DefRing, c: F) -> Self {
        Self::monomial(ring, DefMono::ONE, c).expect("constant lies in every window")
    }

    pub fn monomial(ring: DefRing, m: DefMono, c: F) -> Result<Self> {
        let mut s = Self::zero(ring);
        s.add_term(m, c)?;
        Ok(s)
    }

    pub fn ring(&self) -> DefRing {
        self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DefMono, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &DefMono) -> F {
        self.terms.get(m).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·m`; terms above the truncation order are dropped.
    pub fn add_term(&mut self, m: DefMono, c: F) -> Result<()> {
        if c.is_zero() || m.degree() > self.ring.k_max {
            return Ok(());
        }
        self.ring.check_u(&m)?;
        let e = self.terms.entry(m).or_insert_with(F::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
        Ok(())
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::TruncationMismatch(format!("{:?} vs {:?}", self.ring, other.ring)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone())?;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = Self::zero(self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some(m) = self.ring.mul_mono(m1, m2)? {
                    out.add_term(m, c1.clone() * c2.clone())?;
                }
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-F::one())
    }

    pub fn scale(&self, c: &F) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (*m, a.clone() * c.clone()))
            .filter(|(_, a)| !a.is_zero())
            .collect();
        DefScalar { ring: self.ring, terms }
    }

    /// `∂/∂p_j`.
    pub fn derivative(&self, j: usize) -> Self {
        let mut out = Self::zero(self.ring);
        for (m, c) in &self.terms {
            if let Some((e, lower)) = m.derivative(j) {
                out.add_term(lower, c.clone() * F::from_i64(e as i64))
                    .expect("lowering a monomial stays in the window");
            }
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&DefMono) -> bool) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (*m, c.clone())).collect();
        DefScalar { ring: self.ring, terms }
    }

    /// Drops every term of parameter degree above `k`.
    pub fn truncate(&self, k: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() <= k)
            .map(|(m, c)| (*m, c.clone()))
            .collect();
        DefScalar { ring: self.ring, terms }
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    c.to_string()
                } else if c.is_one() {
                    m.fmt_with(names)
                } else {
                    format!("{}*{}", c, m.fmt_with(names))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl<F: Field> fmt::Debug for DefScalar<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&[]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn ring() -> DefRing {
        DefRing::new(3, 2, 2)
    }

    fn mono(ring: DefRing, m: DefMono, c: i64) -> DefScalar<Q> {
        DefScalar::monomial(ring, m, Q::from_i64(c)).unwrap()
    }

    #[test]
    fn truncated_product_vanishes() {
        let r = ring();
        let t0 = mono(r, DefMono::param(0), 1);
        let s = mono(r, DefMono::param(2), 1);
        let a = t0.try_add(&s).unwrap();
        let b = t0.try_mul(&s).unwrap();
        assert!(a.try_mul(&b).unwrap().is_zero());
    }

    #[test]
    fn u_inverse() {
        let r = ring();
        let a = mono(r, DefMono::u_pow(-1), 1);
        let b = mono(r, DefMono::u_pow(1), 1);
        assert_eq!(a.try_mul(&b).unwrap(), DefScalar::constant(r, Q::from_i64(1)));
    }

    #[test]
    fn square_of_one_plus_t1() {
        let r = ring();
        let one = DefScalar::constant(r, Q::from_i64(1));
        let t1 = mono(r, DefMono::param(1), 1);
        let a = one.try_add(&t1).unwrap();
        let mut sq = one.try_add(&t1.scale(&Q::from_i64(2))).unwrap();
        sq.add_term(DefMono::param(1).mul(&DefMono::param(1)), Q::from_i64(1)).unwrap();
        assert_eq!(a.try_mul(&a).unwrap(), sq);
    }

    #[test]
    fn window_overflow_is_an_error() {
        let r = ring();
        let a = mono(r, DefMono::u_pow(2), 1);
        assert!(matches!(a.try_mul(&a), Err(Error::UWindowOverflow { .. })));
    }

    #[test]
    fn ring_mismatch() {
        let a = DefScalar::constant(ring(), Q::from_i64(1));
        let b = DefScalar::constant(DefRing::new(3, 3, 2), Q::from_i64(1));
        assert!(matches!(a.try_mul(&b), Err(Error::TruncationMismatch(_))));
    }

    #[test]
    fn display_roundtrip_of_monomials() {
        let names: Vec<String> = ["t0", "t1", "s"].iter().map(|s| s.to_string()).collect();
        let m = DefMono::param(0).mul(&DefMono::param(2)).mul(&DefMono::u_pow(-1));
        let text = m.fmt_with(&names);
        assert_eq!(text, "t0*s*u^-1");
        assert_eq!(DefMono::parse_with(&text, &names), Some(m));
    }
}
