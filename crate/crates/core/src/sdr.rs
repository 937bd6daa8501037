//! Special deformation retracts, their composition, and the homological
//! perturbation lemma.
//!
//! Convention: `id − ι∘ρ = d∘h + h∘d`. For a perturbation `δ` of the big
//! differential,
//!
//! ```text
//! ι' = Σ (−hδ)ⁿ ι      ρ' = ρ Σ (−δh)ⁿ      h' = Σ (−hδ)ⁿ h      d' = d + ρ δ ι'
//! ```
//!
//! Every series runs until its term vanishes; local nilpotency comes from
//! explicit truncations (tensor degree, deformation order, `u`-window).

use std::sync::Arc;

use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::koszul::KChain;
use crate::scalar::Field;

/// The vector-space operations the SDR machinery needs.
pub trait Linear: Clone + PartialEq + std::fmt::Debug + Send + Sync + 'static {
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn is_null(&self) -> bool;
    fn null_like(&self) -> Self;
}

impl<F: Field> Linear for Chain<F> {
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn is_null(&self) -> bool {
        self.is_zero()
    }
    fn null_like(&self) -> Self {
        Chain::zero(self.k_max())
    }
}

impl<F: Field> Linear for KChain<F> {
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn is_null(&self) -> bool {
        self.is_zero()
    }
    fn null_like(&self) -> Self {
        KChain::zero(self.k_max())
    }
}

pub type Op<A, B> = Arc<dyn Fn(&A) -> B + Send + Sync>;

pub fn op<A, B>(f: impl Fn(&A) -> B + Send + Sync + 'static) -> Op<A, B> {
    Arc::new(f)
}

/// The zero map into a space whose zero is built from the input.
pub fn zero_op<A: Linear>() -> Op<A, A> {
    op(|a: &A| a.null_like())
}

/// `(ι, ρ, h)` between `(B, d_big)` and `(S, d_small)`.
#[derive(Clone)]
pub struct Sdr<B, S> {
    pub iota: Op<S, B>,
    pub rho: Op<B, S>,
    pub h: Op<B, B>,
    pub d_big: Op<B, B>,
    pub d_small: Op<S, S>,
}

/// Truncations that make a perturbation series terminate.
#[derive(Clone)]
pub struct Truncation<B> {
    /// Applied to every term of the `ι` and `h` series.
    pub full: Op<B, B>,
    /// Applied to every term of the `ρ` series: only what `ρ` can read.
    pub rho: Op<B, B>,
    /// Hard bound on the number of series terms.
    pub max_terms: usize,
}

fn series<B: Linear>(start: B, step: &dyn Fn(&B) -> B, trunc: &Op<B, B>, max_terms: usize) -> B {
    let mut term = trunc(&start);
    let mut acc = term.clone();
    for _ in 0..max_terms {
        term = trunc(&step(&term));
        if term.is_null() {
            return acc;
        }
        acc = acc.plus(&term);
    }
    panic!("{}", Error::SeriesDiverged(max_terms));
}

impl<B: Linear, S: Linear> Sdr<B, S> {
    /// `(ι∘ι₂, ρ₂∘ρ, h + ι∘h₂∘ρ)` for `next` retracting the small side.
    pub fn compose<T: Linear>(&self, next: &Sdr<S, T>) -> Sdr<B, T> {
        let (i1, i2) = (self.iota.clone(), next.iota.clone());
        let (r1, r2) = (self.rho.clone(), next.rho.clone());
        let (h1, h2) = (self.h.clone(), next.h.clone());
        let (i1b, r1b) = (self.iota.clone(), self.rho.clone());
        Sdr {
            iota: op(move |t: &T| i1(&i2(t))),
            rho: op(move |b: &B| r2(&r1(b))),
            h: op(move |b: &B| h1(b).plus(&i1b(&h2(&r1b(b))))),
            d_big: self.d_big.clone(),
            d_small: next.d_small.clone(),
        }
    }

    /// The perturbed retraction for `d_big + δ`.
    pub fn perturb(&self, delta: Op<B, B>, trunc: Truncation<B>) -> Sdr<B, S> {
        let Sdr { iota, rho, h, d_big, d_small } = self.clone();
        let max = trunc.max_terms;
        let hd = {
            let (h, delta) = (h.clone(), delta.clone());
            op(move |b: &B| {
                let x = h(&delta(b));
                x.null_like().minus(&x)
            })
        };
        let dh = {
            let (h, delta) = (h.clone(), delta.clone());
            op(move |b: &B| {
                let x = delta(&h(b));
                x.null_like().minus(&x)
            })
        };
        let new_iota = {
            let (iota, hd, full) = (iota.clone(), hd.clone(), trunc.full.clone());
            op(move |s: &S| series(iota(s), &*hd, &full, max))
        };
        let new_rho = {
            let (rho, dh, rt) = (rho.clone(), dh.clone(), trunc.rho.clone());
            op(move |b: &B| rho(&series(b.clone(), &*dh, &rt, max)))
        };
        let new_h = {
            let (h, hd, full) = (h.clone(), hd.clone(), trunc.full.clone());
            op(move |b: &B| series(h(b), &*hd, &full, max))
        };
        let new_d_small = {
            let (rho, delta, ni) = (rho.clone(), delta.clone(), new_iota.clone());
            op(move |s: &S| d_small(s).plus(&rho(&delta(&ni(s)))))
        };
        let new_d_big = {
            let delta = delta.clone();
            op(move |b: &B| d_big(b).plus(&delta(b)))
        };
        Sdr { iota: new_iota, rho: new_rho, h: new_h, d_big: new_d_big, d_small: new_d_small }
    }

    /// Asserts the five side conditions and both chain-map equations on
    /// the given samples. `view` restricts big-side comparisons to the
    /// range where truncation is exact.
    pub fn check(&self, piece: &str, big: &[B], small: &[S], view: &dyn Fn(&B) -> B) -> Result<()> {
        let fail = |condition: &str| Error::SideCondition { condition: condition.into(), piece: piece.into() };
        for s in small {
            let i = (self.iota)(s);
            if (self.rho)(&i) != *s {
                return Err(fail("ρ∘ι = id"));
            }
            if !view(&(self.h)(&i)).is_null() {
                return Err(fail("h∘ι = 0"));
            }
            if view(&(self.d_big)(&i)) != view(&(self.iota)(&(self.d_small)(s))) {
                return Err(fail("d∘ι = ι∘d"));
            }
        }
        for b in big {
            let hb = (self.h)(b);
            let lhs = (self.d_big)(&hb).plus(&(self.h)(&(self.d_big)(b)));
            let rhs = b.minus(&(self.iota)(&(self.rho)(b)));
            if view(&lhs) != view(&rhs) {
                return Err(fail("id − ι∘ρ = [d, h]"));
            }
            if !view(&(self.h)(&hb)).is_null() {
                return Err(fail("h∘h = 0"));
            }
            if !(self.rho)(&hb).is_null() {
                return Err(fail("ρ∘h = 0"));
            }
            if (self.rho)(&(self.d_big)(b)) != (self.d_small)(&(self.rho)(b)) {
                return Err(fail("ρ∘d = d∘ρ"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koszul::KBasis;
    use crate::poly::Mono;
    use crate::scalar::Q;

    /// Big: span{a, b} with d(a) = b; small: 0. Perturbation δ = 0.
    fn toy() -> Sdr<KChain<Q>, KChain<Q>> {
        let a = KBasis::new(Mono::ONE, 0, 0);
        let b = KBasis::new(Mono::ONE, 0, 1);
        let d = op(move |c: &KChain<Q>| c.apply(|x| if *x == a { vec![(b, Q::from_i64(1))] } else { vec![] }));
        let h = op(move |c: &KChain<Q>| c.apply(|x| if *x == b { vec![(a, Q::from_i64(1))] } else { vec![] }));
        Sdr { iota: op(|c: &KChain<Q>| KChain::zero(c.k_max())), rho: op(|c: &KChain<Q>| KChain::zero(c.k_max())), h, d_big: d, d_small: zero_op() }
    }

    #[test]
    fn toy_retraction_and_zero_perturbation() {
        let s = toy();
        let big = [KBasis::new(Mono::ONE, 0, 0), KBasis::new(Mono::ONE, 0, 1)].map(|b| KChain::from_basis(0, b, Q::from_i64(1)));
        s.check("toy", &big, &[], &|x| x.clone()).unwrap();
        let t = Truncation { full: op(|x: &KChain<Q>| x.clone()), rho: op(|x: &KChain<Q>| x.clone()), max_terms: 4 };
        let p = s.perturb(zero_op(), t);
        p.check("toy", &big, &[], &|x| x.clone()).unwrap();
        let bad = Sdr { h: zero_op(), ..s };
        assert!(matches!(bad.check("toy", &big, &[], &|x| x.clone()), Err(Error::SideCondition { .. })));
    }
}
