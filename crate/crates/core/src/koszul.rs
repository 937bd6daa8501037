//! Koszul chains `a·g·e_I`, the comparison maps with the twisted bar complex
//! and the retraction onto differential forms on the fixed loci.

use std::collections::BTreeMap;
use std::fmt;

use crate::chain::{Chain, Letter, Word};
use crate::defscalar::DefMono;
use crate::group::{DiagonalGroup, GroupElt};
use crate::poly::Mono;
use crate::scalar::Field;

/// `x^γ · g · e_I` with `I` encoded as a bit mask (`1 = e₁`, `2 = e₂`).
/// Also used for forms `x^γ dx_I` on `Fix(g)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KBasis {
    pub mono: Mono,
    pub g: GroupElt,
    pub mask: u8,
}

impl KBasis {
    pub fn new(mono: Mono, g: GroupElt, mask: u8) -> Self {
        KBasis { mono, g, mask }
    }

    pub fn degree(&self) -> usize {
        self.mask.count_ones() as usize
    }
}

/// Exterior product `e_i ∧ e_I`: the new mask and its sign, if nonzero.
pub fn wedge_index(i: usize, mask: u8) -> Option<(u8, bool)> {
    let bit = 1u8 << i;
    if mask & bit != 0 {
        return None;
    }
    // e₂ ∧ e₁ = −e₁e₂
    let negative = i == 1 && mask & 1 != 0;
    Some((mask | bit, negative))
}

/// Sparse combination of Koszul (or form) basis elements over the truncated
/// deformation ring.
#[derive(Clone, PartialEq)]
pub struct KChain<F> {
    k_max: u32,
    terms: BTreeMap<(KBasis, DefMono), F>,
}

impl<F: Field> KChain<F> {
    pub fn zero(k_max: u32) -> Self {
        KChain { k_max, terms: BTreeMap::new() }
    }

    pub fn from_basis(k_max: u32, b: KBasis, c: F) -> Self {
        let mut k = Self::zero(k_max);
        k.add_term(DefMono::ONE, b, c);
        k
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&KBasis, &DefMono, &F)> {
        self.terms.iter().map(|((b, d), c)| (b, d, c))
    }

    pub fn coeff(&self, b: &KBasis, d: &DefMono) -> F {
        self.terms.get(&(*b, *d)).cloned().unwrap_or_else(F::zero)
    }

    pub fn add_term(&mut self, def: DefMono, b: KBasis, c: F) {
        if c.is_zero() || def.degree() > self.k_max {
            return;
        }
        let key = (b, def);
        let e = self.terms.entry(key).or_insert_with(F::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_assign(&mut self, other: &KChain<F>) {
        for ((b, d), c) in &other.terms {
            self.add_term(*d, *b, c.clone());
        }
    }

    pub fn add(&self, other: &KChain<F>) -> KChain<F> {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &KChain<F>) -> KChain<F> {
        self.add(&other.scale(&-F::one()))
    }

    pub fn scale(&self, c: &F) -> KChain<F> {
        let mut out = Self::zero(self.k_max);
        for ((b, d), a) in &self.terms {
            out.add_term(*d, *b, a.clone() * c.clone());
        }
        out
    }

    pub fn apply<I>(&self, mut f: impl FnMut(&KBasis) -> I) -> KChain<F>
    where
        I: IntoIterator<Item = (KBasis, F)>,
    {
        let mut out = Self::zero(self.k_max);
        for ((b, d), c) in &self.terms {
            for (nb, a) in f(b) {
                out.add_term(*d, nb, c.clone() * a);
            }
        }
        out
    }

    /// Multiplies every coefficient by a deformation monomial.
    pub fn scale_mono(&self, m: &DefMono, c: &F) -> KChain<F> {
        let mut out = Self::zero(self.k_max);
        for ((b, d), a) in &self.terms {
            out.add_term(d.mul(m), *b, a.clone() * c.clone());
        }
        out
    }

    pub fn constant_part(&self) -> KChain<F> {
        let mut out = Self::zero(self.k_max);
        for ((b, d), a) in self.terms.iter().filter(|((_, d), _)| d.is_one()) {
            out.add_term(*d, *b, a.clone());
        }
        out
    }
}

impl<F: Field> fmt::Debug for KChain<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((b, d), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}*x^{:?}.g{}e{:02b}", c, d.fmt_with(&[]), b.mono.0, b.g, b.mask)?;
        }
        Ok(())
    }
}

/// `[m]_λ = 1 + λ + … + λ^{m−1}`.
fn q_integer<F: Field>(m: u16, lambda: &F) -> F {
    let mut acc = F::zero();
    let mut p = F::one();
    for _ in 0..m {
        acc = acc + p.clone();
        p = p * lambda.clone();
    }
    acc
}

fn pow<F: Field>(x: &F, k: u16) -> F {
    (0..k).fold(F::one(), |a, _| a * x.clone())
}

/// Koszul-side operators for one group action.
pub struct Koszul<'a, F> {
    pub group: &'a DiagonalGroup<F>,
}

impl<'a, F: Field> Koszul<'a, F> {
    pub fn new(group: &'a DiagonalGroup<F>) -> Self {
        Koszul { group }
    }

    fn moved(&self, g: GroupElt, i: usize) -> bool {
        !self.group.fixes_coordinate(g, i)
    }

    /// `∂_K(a g e_I) = Σ_k (−1)^{k−1}(ᵍx_{i_k} − x_{i_k}) a g e_{I∖i_k}`.
    pub fn differential(&self, c: &KChain<F>) -> KChain<F> {
        c.apply(|b| {
            let mut out = Vec::new();
            let mut k = 0;
            for i in 0..2 {
                if b.mask & (1 << i) == 0 {
                    continue;
                }
                let factor = self.group.eigenvalue(b.g, i) - F::one();
                if !factor.is_zero() {
                    let s = if k % 2 == 0 { F::one() } else { -F::one() };
                    out.push((KBasis::new(b.mono.mul(Mono::var(i)), b.g, b.mask & !(1 << i)), s * factor));
                }
                k += 1;
            }
            out
        })
    }

    /// `wt(x^γ g e_I) = Σ_{λ_k≠1} γ_k + #(I ∩ I_g)`.
    pub fn weight(&self, b: &KBasis) -> u32 {
        (0..2)
            .filter(|&i| self.moved(b.g, i))
            .map(|i| b.mono.0[i] as u32 + ((b.mask >> i) & 1) as u32)
            .sum()
    }

    /// `Π`: restriction to `Fix(g)`, zero when `I` meets `I_g`.
    pub fn pi(&self, c: &KChain<F>) -> KChain<F> {
        c.apply(|b| {
            let killed = (0..2).any(|i| self.moved(b.g, i) && (b.mono.0[i] > 0 || b.mask & (1 << i) != 0));
            if killed {
                None
            } else {
                Some((*b, F::one()))
            }
        })
    }

    /// `Θ`: forms sit inside Koszul chains.
    pub fn theta(&self, c: &KChain<F>) -> KChain<F> {
        c.clone()
    }

    /// `H_K(κ) = Σ_{i∈I_g∖I} (1/wt)(1/(λ_i−1)) ∂_i(a) g e_i∧e_I`.
    pub fn h_k(&self, c: &KChain<F>) -> KChain<F> {
        c.apply(|b| {
            let wt = self.weight(b);
            let mut out = Vec::new();
            if wt == 0 {
                return out;
            }
            for i in (0..2).filter(|&i| self.moved(b.g, i)) {
                let Some((mask, negative)) = wedge_index(i, b.mask) else { continue };
                let e = b.mono.0[i];
                if e == 0 {
                    continue;
                }
                let mut mono = b.mono;
                mono.0[i] -= 1;
                let lambda = self.group.eigenvalue(b.g, i);
                let mut c = F::from_i64(e as i64) / (F::from_i64(wt as i64) * (lambda - F::one()));
                if negative {
                    c = -c;
                }
                out.push((KBasis::new(mono, b.g, mask), c));
            }
            out
        })
    }

    /// `Φ`: antisymmetrization `e₁e₂ ↦ [x|y] − [y|x]`.
    pub fn phi(&self, c: &KChain<F>) -> Chain<F> {
        let mut out = Chain::zero(c.k_max());
        let x = Letter::plain(Mono::var(0));
        let y = Letter::plain(Mono::var(1));
        for (b, d, v) in c.iter() {
            let head = Letter::new(b.mono, b.g);
            match b.mask {
                0 => out.add_term(*d, Word::new(head, []), v.clone()),
                1 => out.add_term(*d, Word::new(head, [x]), v.clone()),
                2 => out.add_term(*d, Word::new(head, [y]), v.clone()),
                _ => {
                    out.add_term(*d, Word::new(head, [x, y]), v.clone());
                    out.add_term(*d, Word::new(head, [y, x]), -v.clone());
                }
            }
        }
        out
    }

    /// `Υ` via twisted divided differences; zero above tensor degree 2.
    ///
    /// `Υ₂(a₀g[x^{α₁}y^{β₁}|x^{α₂}y^{β₂}]) = −λ^{α₁}[α₂]_λ[β₁]_μ a₀x^{α₁+α₂−1}y^{β₁+β₂−1} g e₁e₂`.
    pub fn upsilon(&self, c: &Chain<F>) -> KChain<F> {
        let mut out = KChain::zero(c.k_max());
        for (w, d, v) in c.iter() {
            for (b, a) in self.upsilon_word(w) {
                out.add_term(*d, b, v.clone() * a);
            }
        }
        out
    }

    pub fn upsilon_word(&self, w: &Word) -> Vec<(KBasis, F)> {
        let (a0, g) = (w.head.mono, w.head.g);
        let lambda = self.group.eigenvalue(g, 0);
        let mu = self.group.eigenvalue(g, 1);
        let mut out = Vec::new();
        match w.slots.as_slice() {
            [] => out.push((KBasis::new(a0, g, 0), F::one())),
            [l] => {
                let [al, be] = l.mono.0;
                if al > 0 {
                    let c = q_integer(al, &lambda);
                    if !c.is_zero() {
                        out.push((KBasis::new(a0.mul(Mono::new(al - 1, be)), g, 1), c));
                    }
                }
                if be > 0 {
                    let c = pow(&lambda, al) * q_integer(be, &mu);
                    if !c.is_zero() {
                        out.push((KBasis::new(a0.mul(Mono::new(al, be - 1)), g, 2), c));
                    }
                }
            }
            [l1, l2] => {
                let ([a1, b1], [a2, b2]) = (l1.mono.0, l2.mono.0);
                if a2 > 0 && b1 > 0 {
                    let c = -(pow(&lambda, a1) * q_integer(a2, &lambda) * q_integer(b1, &mu));
                    if !c.is_zero() {
                        out.push((KBasis::new(a0.mul(Mono::new(a1 + a2 - 1, b1 + b2 - 1)), g, 3), c));
                    }
                }
            }
            _ => {}
        }
        out
    }

    /// Whether `x^γ g e_I` is fixed by the group (`e_i` transforms like `x_i`).
    pub fn is_invariant(&self, b: &KBasis) -> bool {
        let mut m = b.mono;
        for i in 0..2 {
            if b.mask & (1 << i) != 0 {
                m = m.mul(Mono::var(i));
            }
        }
        self.group.is_invariant(m)
    }
}
