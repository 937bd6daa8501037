//! Jacobian (Milnor) rings of quasi-homogeneous polynomials, reduced degreewise.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rref};
use crate::poly::{monomials_up_to, Mono, Poly, WeightScheme};
use crate::scalar::Field;

/// Order used inside a weight piece: the last variable is most significant.
pub fn mono_order_key(m: &Mono) -> (u16, u16) {
    (m.0[1], m.0[0])
}

#[derive(Clone)]
struct Piece<F> {
    monos: Vec<Mono>,
    reduced: Rref<F>,
}

/// `Jac(W) = F[x_active] / (∂W)` with a deterministic monomial basis.
#[derive(Clone)]
pub struct JacobianRing<F> {
    w: Poly<F>,
    scheme: WeightScheme,
    active: [bool; 2],
    pieces: BTreeMap<Rational64, Piece<F>>,
    basis: Vec<Mono>,
    top_weight: Rational64,
}

impl<F: Field> JacobianRing<F> {
    /// Builds the ring for `W` restricted to the variables flagged `active`.
    pub fn new(w: &Poly<F>, scheme: &WeightScheme, active: [bool; 2]) -> Result<Self> {
        let w = w.restrict([!active[0], !active[1]]);
        let n_active = active.iter().filter(|a| **a).count();
        let d = if n_active == 0 {
            Rational64::zero()
        } else {
            let d = w
                .homogeneous_weight(scheme)
                .ok_or_else(|| Error::NonIsolated(format!("{} is zero or not quasi-homogeneous", w)))?;
            d
        };
        let socle: Rational64 = (0..2)
            .filter(|&i| active[i])
            .map(|i| d - scheme.vars[i] * Rational64::from(2))
            .fold(Rational64::zero(), |a, b| a + b);
        let max_var = scheme.vars.iter().copied().max().unwrap_or_else(Rational64::zero);
        let cap = socle.max(Rational64::zero()) + d + max_var;
        let partials: Vec<Poly<F>> = (0..2).filter(|&i| active[i]).map(|i| w.derivative(i)).collect();

        let all = monomials_up_to(scheme, active, cap);
        let mut by_weight: BTreeMap<Rational64, Vec<Mono>> = BTreeMap::new();
        for m in all {
            by_weight.entry(scheme.mono(m)).or_default().push(m);
        }
        let mut pieces = BTreeMap::new();
        let mut basis = Vec::new();
        for (&wt, monos) in &by_weight {
            let mut monos = monos.clone();
            monos.sort_by_key(|m| std::cmp::Reverse(mono_order_key(m)));
            let index: BTreeMap<Mono, usize> = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
            let mut rows = Vec::new();
            for p in &partials {
                let Some(pw) = p.homogeneous_weight(scheme) else { continue };
                let shift = wt - pw;
                if shift < Rational64::zero() {
                    continue;
                }
                for m in by_weight.get(&shift).into_iter().flatten() {
                    let mut row = vec![F::zero(); monos.len()];
                    for (pm, c) in p.terms() {
                        row[index[&pm.mul(*m)]] = c.clone();
                    }
                    rows.push(row);
                }
            }
            let mat = if rows.is_empty() {
                Matrix::zeros(0, monos.len())
            } else {
                Matrix::from_rows(rows)
            };
            let reduced = mat.rref();
            let survivors: Vec<Mono> = (0..monos.len())
                .filter(|c| !reduced.pivots.contains(c))
                .map(|c| monos[c])
                .collect();
            if !survivors.is_empty() && wt > socle {
                return Err(Error::NonIsolated(format!(
                    "{} has a nonzero quotient in weight {} above the socle weight {}",
                    w, wt, socle
                )));
            }
            basis.extend(survivors);
            pieces.insert(wt, Piece { monos, reduced });
        }
        basis.sort_by_key(|m| (scheme.mono(*m), mono_order_key(m)));
        Ok(JacobianRing {
            w,
            scheme: scheme.clone(),
            active,
            pieces,
            basis,
            top_weight: cap,
        })
    }

    pub fn basis(&self) -> &[Mono] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn w(&self) -> &Poly<F> {
        &self.w
    }

    pub fn active(&self) -> [bool; 2] {
        self.active
    }

    /// Reduces a single monomial; returns `(basis monomial, coefficient)` pairs.
    pub fn reduce_mono(&self, m: Mono) -> Vec<(Mono, F)> {
        if (0..2).any(|i| !self.active[i] && m.0[i] > 0) {
            return Vec::new();
        }
        let wt = self.scheme.mono(m);
        if wt > self.top_weight {
            return Vec::new();
        }
        let piece = &self.pieces[&wt];
        let col = piece.monos.iter().position(|x| *x == m).expect("monomial enumerated");
        let mut v = vec![F::zero(); piece.monos.len()];
        v[col] = F::one();
        for (r, &pc) in piece.reduced.pivots.iter().enumerate() {
            if v[pc].is_zero() {
                continue;
            }
            let f = v[pc].clone();
            for j in 0..v.len() {
                let a = &piece.reduced.matrix[(r, j)];
                if !a.is_zero() {
                    v[j] = v[j].clone() - f.clone() * a.clone();
                }
            }
        }
        v.into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (piece.monos[j], c))
            .collect()
    }

    /// Coordinates of `p mod (∂W)` in [`basis`](Self::basis).
    pub fn normal_form(&self, p: &Poly<F>) -> Vec<F> {
        let mut out = vec![F::zero(); self.basis.len()];
        for (m, c) in p.terms() {
            for (b, f) in self.reduce_mono(*m) {
                let i = self.basis.iter().position(|x| *x == b).expect("survivor is a basis element");
                out[i] = out[i].clone() + c.clone() * f;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::default_vars;
    use crate::scalar::Q;

    fn scheme(a: i64, b: i64) -> WeightScheme {
        WeightScheme {
            vars: [Rational64::from(a), Rational64::from(b)],
            params: vec![],
            u: Rational64::from(0),
        }
    }

    fn poly(vars: [String; 2], terms: &[(u16, u16, i64)]) -> Poly<Q> {
        Poly::from_terms(vars, terms.iter().map(|&(a, b, c)| (Mono::new(a, b), Q::from_i64(c))))
    }

    #[test]
    fn a3_basis_and_reduction() {
        let w = poly(default_vars("x", "y"), &[(4, 0, 1), (0, 2, 1)]);
        let j = JacobianRing::new(&w, &scheme(1, 2), [true, true]).unwrap();
        assert_eq!(j.basis(), &[Mono::new(0, 0), Mono::new(1, 0), Mono::new(2, 0)]);
        let x3 = poly(default_vars("x", "y"), &[(3, 0, 1)]);
        assert!(j.normal_form(&x3).iter().all(Zero::is_zero));
        let one = poly(default_vars("x", "y"), &[(0, 0, 1)]);
        assert_eq!(j.normal_form(&one), vec![Q::from_i64(1), Q::zero(), Q::zero()]);
    }

    #[test]
    fn d3_basis() {
        let w = poly(default_vars("z", "w"), &[(2, 0, 1), (1, 2, 1)]);
        let j = JacobianRing::new(&w, &scheme(2, 1), [true, true]).unwrap();
        let mut b = j.basis().to_vec();
        b.sort();
        assert_eq!(b, vec![Mono::new(0, 0), Mono::new(0, 1), Mono::new(1, 0)]);
    }

    #[test]
    fn w_squared_reduces_to_z_power() {
        for n in 2..=5u16 {
            let w = poly(default_vars("z", "w"), &[(n, 0, 1), (1, 2, 1)]);
            let j = JacobianRing::new(&w, &scheme(2, n as i64 - 1), [true, true]).unwrap();
            let w2 = j.reduce_mono(Mono::new(0, 2));
            assert_eq!(w2, vec![(Mono::new(n - 1, 0), Q::from_i64(-(n as i64)))]);
        }
    }

    #[test]
    fn non_isolated_is_detected() {
        let w = poly(default_vars("x", "y"), &[(2, 0, 1)]);
        assert!(matches!(
            JacobianRing::new(&w, &scheme(1, 1), [true, true]),
            Err(Error::NonIsolated(_))
        ));
    }

    #[test]
    fn point_sector() {
        let w = poly(default_vars("x", "y"), &[(4, 0, 1), (0, 2, 1)]);
        let j = JacobianRing::new(&w, &scheme(1, 2), [false, false]).unwrap();
        assert_eq!(j.basis(), &[Mono::ONE]);
    }
}
