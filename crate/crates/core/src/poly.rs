//! Sparse polynomials in two variables with diagonal weights.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::Error;
use crate::scalar::Field;

/// Exponent pair `(γ₁, γ₂)` of a monomial `x₁^γ₁ x₂^γ₂`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono(pub [u16; 2]);

impl Mono {
    pub const ONE: Mono = Mono([0, 0]);

    pub fn new(a: u16, b: u16) -> Self {
        Mono([a, b])
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0, 0];
        e[i] = 1;
        Mono(e)
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0, 0]
    }

    pub fn degree(&self) -> u32 {
        self.0[0] as u32 + self.0[1] as u32
    }

    pub fn mul(self, other: Mono) -> Mono {
        Mono([self.0[0] + other.0[0], self.0[1] + other.0[1]])
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(self, other: Mono) -> Option<Mono> {
        Some(Mono([
            self.0[0].checked_sub(other.0[0])?,
            self.0[1].checked_sub(other.0[1])?,
        ]))
    }

    pub fn pow(self, k: u16) -> Mono {
        Mono([self.0[0] * k, self.0[1] * k])
    }

    pub fn fmt_with(&self, vars: &[String; 2]) -> String {
        let mut parts = Vec::new();
        for i in 0..2 {
            match self.0[i] {
                0 => {}
                1 => parts.push(vars[i].clone()),
                e => parts.push(format!("{}^{}", vars[i], e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Parses `1`, `x`, `x^3*y`, … against the given variable names.
    pub fn parse_with(s: &str, vars: &[String; 2]) -> Option<Mono> {
        let s = s.trim();
        if s == "1" {
            return Some(Mono::ONE);
        }
        let mut e = [0u16; 2];
        for factor in s.split('*') {
            let (name, pow) = match factor.split_once('^') {
                Some((n, p)) => (n.trim(), p.trim().parse().ok()?),
                None => (factor.trim(), 1),
            };
            let i = vars.iter().position(|v| v == name)?;
            e[i] += pow;
        }
        Some(Mono(e))
    }
}

pub fn default_vars(a: &str, b: &str) -> [String; 2] {
    [a.to_string(), b.to_string()]
}

/// Rational weights for the two variables, the deformation parameters and `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightScheme {
    pub vars: [Rational64; 2],
    pub params: Vec<Rational64>,
    pub u: Rational64,
}

impl WeightScheme {
    pub fn mono(&self, m: Mono) -> Rational64 {
        self.vars[0] * Rational64::from(m.0[0] as i64) + self.vars[1] * Rational64::from(m.0[1] as i64)
    }
}

/// Sparse polynomial in two named variables.
#[derive(Clone, PartialEq)]
pub struct Poly<F> {
    vars: [String; 2],
    terms: BTreeMap<Mono, F>,
}

impl<F: Field> Poly<F> {
    pub fn zero(vars: [String; 2]) -> Self {
        Poly { vars, terms: BTreeMap::new() }
    }

    pub fn monomial(vars: [String; 2], m: Mono, c: F) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(vars: [String; 2], terms: impl IntoIterator<Item = (Mono, F)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &[String; 2] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Mono) -> F {
        self.terms.get(&m).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Mono, c: F) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(F::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn check_vars(&self, other: &Self) -> Result<(), Error> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch(
                self.vars.join(","),
                other.vars.join(","),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, Error> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, Error> {
        self.try_add(&other.scale(&-F::one()))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, Error> {
        self.check_vars(other)?;
        let mut out = Self::zero(self.vars.clone());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(*m2), c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::from_terms(
            self.vars.clone(),
            self.terms.iter().map(|(m, a)| (*m, a.clone() * c.clone())),
        )
    }

    pub fn derivative(&self, var: usize) -> Self {
        Self::from_terms(
            self.vars.clone(),
            self.terms.iter().filter(|(m, _)| m.0[var] > 0).map(|(m, c)| {
                let mut e = m.0;
                e[var] -= 1;
                (Mono(e), c.clone() * F::from_i64(m.0[var] as i64))
            }),
        )
    }

    /// Restriction to the coordinate subspace where the variables with
    /// `kill[i] = true` vanish.
    pub fn restrict(&self, kill: [bool; 2]) -> Self {
        Self::from_terms(
            self.vars.clone(),
            self.terms
                .iter()
                .filter(|(m, _)| (0..2).all(|i| !kill[i] || m.0[i] == 0))
                .map(|(m, c)| (*m, c.clone())),
        )
    }

    /// Common weight of all terms, or `None` if not weight-homogeneous.
    pub fn homogeneous_weight(&self, scheme: &WeightScheme) -> Option<Rational64> {
        let mut it = self.terms.keys().map(|m| scheme.mono(*m));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if c.is_one() {
                    m.fmt_with(&self.vars)
                } else {
                    format!("{}*{}", c, m.fmt_with(&self.vars))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<F: fmt::Debug> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

/// Weight of a monomial of the algebra together with a deformation monomial.
pub fn weight_of(m: Mono, param_exps: &[u8], u_exp: i32, scheme: &WeightScheme) -> Rational64 {
    let mut w = scheme.mono(m);
    for (e, pw) in param_exps.iter().zip(&scheme.params) {
        w += *pw * Rational64::from(*e as i64);
    }
    w + scheme.u * Rational64::from(u_exp as i64)
}

pub(crate) fn monomials_up_to(scheme: &WeightScheme, active: [bool; 2], max_weight: Rational64) -> Vec<Mono> {
    let mut out = Vec::new();
    let bound = |i: usize| -> u16 {
        if !active[i] {
            return 0;
        }
        let w = scheme.vars[i];
        assert!(w > Rational64::zero(), "weights must be positive");
        (max_weight / w).floor().to_integer().max(0) as u16
    };
    for a in 0..=bound(0) {
        for b in 0..=bound(1) {
            let m = Mono::new(a, b);
            if scheme.mono(m) <= max_weight {
                out.push(m);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::scalar::Q;

    fn xy() -> [String; 2] {
        default_vars("x", "y")
    }

    fn p(terms: &[(u16, u16, i64)]) -> Poly<Q> {
        Poly::from_terms(xy(), terms.iter().map(|&(a, b, c)| (Mono::new(a, b), Q::from_i64(c))))
    }

    #[test]
    fn difference_of_squares() {
        let a = p(&[(1, 0, 1), (0, 1, 1)]);
        let b = p(&[(1, 0, 1), (0, 1, -1)]);
        assert_eq!(a.try_mul(&b).unwrap(), p(&[(2, 0, 1), (0, 2, -1)]));
    }

    #[test]
    fn identity_and_exponents() {
        let q = p(&[(3, 1, 2), (0, 0, 5)]);
        assert_eq!(p(&[(0, 0, 1)]).try_mul(&q).unwrap(), q);
        assert_eq!(p(&[(2, 0, 1)]).try_mul(&p(&[(3, 1, 1)])).unwrap(), p(&[(5, 1, 1)]));
    }

    #[test]
    fn variable_mismatch() {
        let a = p(&[(1, 0, 1)]);
        let b = Poly::<Q>::monomial(default_vars("z", "w"), Mono::new(1, 0), Q::one());
        assert!(matches!(a.try_mul(&b), Err(Error::VariableMismatch(..))));
    }

    #[test]
    fn weights_of_the_a_model() {
        for n in 2..=5i64 {
            let scheme = WeightScheme {
                vars: [Rational64::from(1), Rational64::from(n)],
                params: (0..n).map(|j| Rational64::from(2 * n - 2 * j)).collect(),
                u: Rational64::from(2 * n),
            };
            let w = p(&[(2 * n as u16, 0, 1), (0, 2, 1)]);
            assert_eq!(w.homogeneous_weight(&scheme), Some(Rational64::from(2 * n)));
            assert_eq!(scheme.mono(Mono::new(1, 1)), Rational64::from(1 + n));
            for j in 0..n as usize {
                let mut e = vec![0u8; n as usize];
                e[j] = 1;
                assert_eq!(
                    weight_of(Mono::new(2 * j as u16, 0), &e, 0, &scheme),
                    Rational64::from(2 * n)
                );
            }
        }
    }

    #[test]
    fn display_parse() {
        let m = Mono::new(3, 1);
        assert_eq!(m.fmt_with(&xy()), "x^3*y");
        assert_eq!(Mono::parse_with("x^3*y", &xy()), Some(m));
        assert_eq!(Mono::parse_with("1", &xy()), Some(Mono::ONE));
    }
}
