//! Twisted (coinvariant) Hochschild complex of `A ⋊ G`.
//!
//! Coinvariants are represented by invariant words: `π` drops words on which
//! some group element acts nontrivially. Operators are transported from
//! `A[G]` along `Γ_*` (inclusion of twisted words) and `Ψ_*` (moving group
//! elements into the coefficient).

use std::sync::Arc;

use crate::bar::{bar_differential, getzler_b, getzler_bb, lift};
use crate::chain::{Chain, Letter, Word};
use crate::cochain::{sign, Cochain};
use crate::defscalar::DefMono;
use crate::error::{Error, Result};
use crate::group::{DiagonalGroup, IDENTITY};
use crate::scalar::Field;

#[derive(Clone)]
pub struct Twisted<F> {
    group: Arc<DiagonalGroup<F>>,
}

impl<F: Field> Twisted<F> {
    pub fn new(group: Arc<DiagonalGroup<F>>) -> Self {
        Twisted { group }
    }

    pub fn group(&self) -> &Arc<DiagonalGroup<F>> {
        &self.group
    }

    /// A twisted word survives `π` iff its monomials are jointly invariant.
    pub fn is_invariant(&self, w: &Word) -> bool {
        self.group.is_invariant(w.total_mono())
    }

    pub fn pi(&self, c: &Chain<F>) -> Chain<F> {
        c.filter(|w, _| w.is_group_free() && self.is_invariant(w))
    }

    /// `Γ_*` on invariant twisted words is the identity embedding.
    pub fn gamma(&self, c: &Chain<F>) -> Chain<F> {
        debug_assert!(c.iter().all(|(w, _, _)| w.is_group_free()));
        self.pi(c)
    }

    /// `Ψ_*(a₀g₀[a₁g₁|…]) = π(ᵍ¹⋯ᵍᵖa₀ · g₁⋯g_p g₀ [a₁|ᵍ¹a₂|…])`.
    pub fn psi(&self, c: &Chain<F>) -> Chain<F> {
        let g = &self.group;
        let moved = c.apply(|w| {
            let mut acc = IDENTITY;
            let mut scalar = F::one();
            let mut slots = Vec::with_capacity(w.degree());
            for l in &w.slots {
                scalar = scalar * g.character(acc, l.mono);
                slots.push(Letter::plain(l.mono));
                acc = g.mul(acc, l.g);
            }
            scalar = scalar * g.character(acc, w.head.mono);
            let head = Letter::new(w.head.mono, g.mul(acc, w.head.g));
            std::iter::once((Word::new(head, slots), scalar))
        });
        self.pi(&moved)
    }

    pub fn differential(&self, b: &Cochain<F>, c: &Chain<F>) -> Chain<F> {
        self.psi(&bar_differential(b, &self.gamma(c)))
    }

    pub fn connes(&self, c: &Chain<F>) -> Chain<F> {
        self.psi(&getzler_bb(&[], &self.gamma(c)))
    }

    pub fn getzler_b(&self, b: &Cochain<F>, phis: &[Cochain<F>], c: &Chain<F>) -> Chain<F> {
        self.psi(&getzler_b(b, phis, &self.gamma(c)))
    }

    pub fn getzler_bb(&self, phis: &[Cochain<F>], c: &Chain<F>) -> Chain<F> {
        self.psi(&getzler_bb(phis, &self.gamma(c)))
    }

    /// `differential`, cross-checked against the closed formulas for the
    /// product-type and curvature parts of `b` given on `A`.
    pub fn checked_differential(
        &self,
        b: &Cochain<F>,
        product_on_a: &Cochain<F>,
        curvature: &Cochain<F>,
        c: &Chain<F>,
    ) -> Result<Chain<F>> {
        let composed = self.differential(b, c);
        let closed = closed::product(&self.group, product_on_a, c).add(&closed::curvature(curvature, c));
        let closed = self.pi(&closed);
        if composed != closed {
            let diff = composed.sub(&closed);
            let (w, _, _) = diff.iter().next().expect("nonzero difference");
            return Err(Error::ClosedFormMismatch {
                word: format!("{:?}", w),
                detail: format!("{} terms differ", diff.len()),
            });
        }
        Ok(composed)
    }

    pub fn checked_connes(&self, c: &Chain<F>) -> Result<Chain<F>> {
        let composed = self.connes(c);
        let closed = self.pi(&closed::connes(&self.group, c));
        if composed != closed {
            return Err(Error::ClosedFormMismatch {
                word: format!("{:?}", composed.sub(&closed).iter().next().map(|t| t.0.clone())),
                detail: "Connes operator".into(),
            });
        }
        Ok(composed)
    }
}

/// Direct formulas on twisted words, used to validate the composed operators.
pub mod closed {
    use super::*;

    /// Twisted differential of the 2-ary cochain `φ` on `A` (values in `A[G]`).
    pub fn product<F: Field>(g: &DiagonalGroup<F>, phi: &Cochain<F>, c: &Chain<F>) -> Chain<F> {
        lift(c, |w, budget| {
            let p = w.degree();
            let a = &w.slots;
            let (a0, g0) = (w.head.mono, w.head.g);
            let mut out: Vec<(DefMono, Word, F)> = Vec::new();
            for t in phi.terms().iter().filter(|t| t.arity == 2 && t.def.degree() <= budget) {
                if p >= 1 {
                    // φ[a_p|a₀]·g₀ [a₁…a_{p−1}]
                    let s: F = sign(p);
                    for (l, v) in (t.eval)(&[a[p - 1], Letter::plain(a0)]) {
                        let head = Letter::new(l.mono, g.mul(l.g, g0));
                        out.push((t.def, Word::new(head, a[..p - 1].iter().copied()), s.clone() * t.coeff.clone() * v));
                    }
                    // φ[a₀|ᵍ⁰a₁]·g₀ [a₂…a_p]
                    let chi = g.character(g0, a[0].mono);
                    for (l, v) in (t.eval)(&[Letter::plain(a0), a[0]]) {
                        let head = Letter::new(l.mono, g.mul(l.g, g0));
                        out.push((t.def, Word::new(head, a[1..].iter().copied()), chi.clone() * t.coeff.clone() * v));
                    }
                }
                // ʰa₀·hg₀[a₁…a_k|m|ʰa_{k+3}…]
                for k in 0..p.saturating_sub(1) {
                    let s: F = sign(k + 1);
                    for (l, v) in (t.eval)(&a[k..k + 2]) {
                        let h = l.g;
                        let mut scalar = g.character(h, a0);
                        for x in &a[k + 2..] {
                            scalar = scalar * g.character(h, x.mono);
                        }
                        let slots = a[..k]
                            .iter()
                            .copied()
                            .chain(std::iter::once(Letter::plain(l.mono)))
                            .chain(a[k + 2..].iter().copied());
                        let head = Letter::new(a0, g.mul(h, g0));
                        out.push((t.def, Word::new(head, slots), s.clone() * scalar * t.coeff.clone() * v));
                    }
                }
            }
            out
        })
    }

    /// Curvature insertions `Σ_{k=0}^{p} (−1)^{k+1} a₀g₀[a₁…a_k|b₀|…]`.
    pub fn curvature<F: Field>(b0: &Cochain<F>, c: &Chain<F>) -> Chain<F> {
        lift(c, |w, budget| {
            let p = w.degree();
            let mut out = Vec::new();
            for t in b0.terms().iter().filter(|t| t.arity == 0 && t.def.degree() <= budget) {
                for (l, v) in (t.eval)(&[]) {
                    for k in 0..=p {
                        let slots = w.slots[..k].iter().copied().chain(std::iter::once(l)).chain(w.slots[k..].iter().copied());
                        out.push((t.def, Word::new(w.head, slots), sign::<F>(k + 1) * t.coeff.clone() * v.clone()));
                    }
                }
            }
            out
        })
    }

    /// `B̃(a₀g₀[a₁…a_p]) = Σ_i (−1)^{(i+1)p} 1g₀[a_{i+1}…a_p|a₀|ᵍ⁰a₁…ᵍ⁰a_i]`.
    pub fn connes<F: Field>(g: &DiagonalGroup<F>, c: &Chain<F>) -> Chain<F> {
        c.apply(|w| {
            let p = w.degree();
            let (a0, g0) = (w.head.mono, w.head.g);
            (0..=p)
                .map(|i| {
                    let mut scalar: F = sign((i + 1) * p);
                    for x in &w.slots[..i] {
                        scalar = scalar * g.character(g0, x.mono);
                    }
                    let slots = w.slots[i..]
                        .iter()
                        .copied()
                        .chain(std::iter::once(Letter::plain(a0)))
                        .chain(w.slots[..i].iter().copied());
                    (Word::new(Letter::new(crate::poly::Mono::ONE, g0), slots), scalar)
                })
                .collect::<Vec<_>>()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{psi_upper_star, twisted_product};
    use crate::poly::Mono;
    use crate::scalar::Q;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn setup() -> (Twisted<Q>, Cochain<Q>) {
        let g = Arc::new(DiagonalGroup::generated(2, &[[1, 1]], &["sigma"]).unwrap());
        (Twisted::new(g.clone()), twisted_product(g))
    }

    fn plain_product() -> Cochain<Q> {
        Cochain::from_fn(2, |a: &[Letter]| vec![(Letter::plain(a[0].mono.mul(a[1].mono)), q(1))])
    }

    #[test]
    fn sigma_sector_product() {
        // ∂̃_{b₂}(xσ[y]) = −2xyσ
        let (t, b2) = setup();
        let c = Chain::from_word(0, Word::twisted(Mono::new(1, 0), 1, &[Mono::new(0, 1)]), q(1));
        let d = t.differential(&b2, &c);
        assert_eq!(d, Chain::from_word(0, Word::twisted(Mono::new(1, 1), 1, &[]), q(-2)));
    }

    #[test]
    fn pi_drops_odd_words() {
        let (t, _) = setup();
        let c = Chain::from_word(0, Word::twisted(Mono::new(1, 0), 0, &[]), q(1));
        assert!(t.pi(&c).is_zero());
        let c = Chain::from_word(0, Word::twisted(Mono::new(1, 0), 1, &[Mono::new(0, 1)]), q(1));
        assert_eq!(t.pi(&c), c);
    }

    #[test]
    fn closed_forms_agree() {
        let (t, b2) = setup();
        let phi = plain_product();
        assert_eq!(psi_upper_star(&phi, t.group().clone()).terms().len(), 1);
        let words = [
            Word::twisted(Mono::new(1, 1), 1, &[Mono::new(2, 0), Mono::new(0, 1), Mono::new(1, 0)]),
            Word::twisted(Mono::new(0, 1), 0, &[Mono::new(1, 0), Mono::new(1, 1), Mono::new(1, 1)]),
            Word::twisted(Mono::ONE, 1, &[Mono::new(1, 0), Mono::new(0, 1)]),
        ];
        let curv = Cochain::constant(vec![(Letter::plain(Mono::new(4, 0)), q(-1))]);
        let b = b2.add(&curv);
        for w in words {
            let c = Chain::from_word(0, w, q(1));
            t.checked_differential(&b, &phi, &curv, &c).unwrap();
            t.checked_connes(&c).unwrap();
        }
    }

    #[test]
    fn twisted_differential_squares_to_zero() {
        let (t, b2) = setup();
        let c = Chain::from_word(
            0,
            Word::twisted(Mono::new(1, 0), 1, &[Mono::new(1, 0), Mono::new(0, 1), Mono::new(2, 1)]),
            q(1),
        );
        let d = t.differential(&b2, &c);
        assert!(!d.is_zero());
        assert!(t.differential(&b2, &d).is_zero());
        let mixed = t.differential(&b2, &t.connes(&c)).add(&t.connes(&d));
        assert!(mixed.is_zero());
    }
}
