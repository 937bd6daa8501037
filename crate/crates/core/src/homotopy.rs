//! Contracting homotopy `H_C` between the twisted bar complex and Koszul
//! chains, induced from the bar resolution of `A = F[x,y]`.
//!
//! On the resolution, `h_n = s(id − ΦΥ − h_{n−1}∂)` with `s(b₀[w]b₁) = [b₀|w]b₁`.
//! On generators `1[a₁…a_n]1` this collapses to
//!
//! ```text
//! R(a₁…a_n) = (−1)^{n−1}[a₁…a_{n−1}|R₁(a_n)] + (−1)^{n−2}[a₁…a_{n−2}|S₂(a_{n−1},a_n)]
//! ```
//!
//! where `R₁ = −sΦΥ₁` and `S₂ = −sΦΥ₂`. The raw homotopy is then normalized so
//! that all side conditions hold.

use std::sync::Arc;

use crate::bar::bar_differential;
use crate::chain::{Chain, Letter, Word};
use crate::cochain::Cochain;
use crate::group::DiagonalGroup;
use crate::koszul::Koszul;
use crate::poly::Mono;
use crate::scalar::Field;
use crate::twisted::Twisted;

/// `Σ coeff · [w] · c_r` on the resolution (left coefficient always `1`).
type ResTerms<F> = Vec<(Vec<Mono>, Mono, F)>;

/// `Υ₁(1[x^αy^β]1) = Σ_{i<α} x^i e₁ x^{α−1−i}y^β + Σ_{j<β} x^αy^j e₂ y^{β−1−j}`.
fn upsilon1(a: Mono) -> Vec<(Mono, usize, Mono)> {
    let [al, be] = a.0;
    let mut out = Vec::new();
    for i in 0..al {
        out.push((Mono::new(i, 0), 0, Mono::new(al - 1 - i, be)));
    }
    for j in 0..be {
        out.push((Mono::new(al, j), 1, Mono::new(0, be - 1 - j)));
    }
    out
}

/// `Υ₂(1[a₁|a₂]1) = −Σ_{i<α₂, j<β₁} x^{α₁+i}y^j e₁₂ x^{α₂−1−i}y^{β₁+β₂−1−j}`.
fn upsilon2(a1: Mono, a2: Mono) -> Vec<(Mono, Mono)> {
    let ([al1, be1], [al2, be2]) = (a1.0, a2.0);
    let mut out = Vec::new();
    for i in 0..al2 {
        for j in 0..be1 {
            out.push((Mono::new(al1 + i, j), Mono::new(al2 - 1 - i, be1 + be2 - 1 - j)));
        }
    }
    out
}

fn r1<F: Field>(a: Mono) -> ResTerms<F> {
    upsilon1(a)
        .into_iter()
        .filter(|(cl, _, _)| !cl.is_one())
        .map(|(cl, i, cr)| (vec![cl, Mono::var(i)], cr, -F::one()))
        .collect()
}

fn s2<F: Field>(a1: Mono, a2: Mono) -> ResTerms<F> {
    let mut out = Vec::new();
    for (cl, cr) in upsilon2(a1, a2) {
        if cl.is_one() {
            continue;
        }
        out.push((vec![cl, Mono::var(0), Mono::var(1)], cr, F::one()));
        out.push((vec![cl, Mono::var(1), Mono::var(0)], cr, -F::one()));
    }
    out
}

/// The resolution homotopy on `1[a₁…a_n]1`.
pub fn resolution_homotopy<F: Field>(a: &[Mono]) -> ResTerms<F> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let sign1 = if (n - 1).is_multiple_of(2) { F::one() } else { -F::one() };
    for (w, cr, c) in r1::<F>(a[n - 1]) {
        let mut word = a[..n - 1].to_vec();
        word.extend(w);
        out.push((word, cr, sign1.clone() * c));
    }
    if n >= 2 {
        let sign2 = if n.is_multiple_of(2) { F::one() } else { -F::one() };
        for (w, cr, c) in s2::<F>(a[n - 2], a[n - 1]) {
            let mut word = a[..n - 2].to_vec();
            word.extend(w);
            out.push((word, cr, sign2.clone() * c));
        }
    }
    out
}

/// `H_C` and the comparison data for one group action.
pub struct BarKoszul<F> {
    group: Arc<DiagonalGroup<F>>,
    twisted: Twisted<F>,
    product: Cochain<F>,
}

impl<F: Field> BarKoszul<F> {
    pub fn new(group: Arc<DiagonalGroup<F>>, product: Cochain<F>) -> Self {
        BarKoszul { twisted: Twisted::new(group.clone()), group, product }
    }

    pub fn koszul(&self) -> Koszul<'_, F> {
        Koszul::new(&self.group)
    }

    pub fn twisted(&self) -> &Twisted<F> {
        &self.twisted
    }

    /// `∂̃_{b₂}`.
    pub fn d(&self, c: &Chain<F>) -> Chain<F> {
        self.twisted.psi(&bar_differential(&self.product, &self.twisted.gamma(c)))
    }

    pub fn phi_upsilon(&self, c: &Chain<F>) -> Chain<F> {
        let k = self.koszul();
        k.phi(&k.upsilon(c))
    }

    /// `H(a₀g₀[w]) = Σ r·(c_r a₀) g₀ [w']` before normalization.
    pub fn raw(&self, c: &Chain<F>) -> Chain<F> {
        let out = c.apply(|w| {
            let monos: Vec<Mono> = w.slots.iter().map(|l| l.mono).collect();
            resolution_homotopy::<F>(&monos)
                .into_iter()
                .map(|(ws, cr, r)| {
                    let head = Letter::new(cr.mul(w.head.mono), w.head.g);
                    (Word::new(head, ws.into_iter().map(Letter::plain)), r)
                })
                .collect::<Vec<_>>()
        });
        self.twisted.pi(&out)
    }

    fn complement(&self, c: &Chain<F>) -> Chain<F> {
        c.sub(&self.phi_upsilon(c))
    }

    /// `H' = (1 − ΦΥ) H (1 − ΦΥ)`.
    pub fn h_prime(&self, c: &Chain<F>) -> Chain<F> {
        self.complement(&self.raw(&self.complement(c)))
    }

    /// `H_C = H'∂̃_{b₂}H'`: satisfies all five side conditions.
    pub fn h_c(&self, c: &Chain<F>) -> Chain<F> {
        self.h_prime(&self.d(&self.h_prime(c)))
    }
}
