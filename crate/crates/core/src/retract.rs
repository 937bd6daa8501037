//! The retraction of twisted chains onto `⊕_g Jac(W_g)_G`, built in stages:
//!
//! 1. `(C, ∂̃_{b₂}) ⇄ (Ω, 0)` with `ι = ΦΘ`, `ρ = ΠΥ`, `h = H_C + ΦH_KΥ`;
//! 2. perturbation by the curvature `∂̃_{b₀}`, which induces `dW_g∧` on forms;
//! 3. composition with `(Ω, dW∧) ⇄ (Jac, 0)`;
//! 4. perturbation by `δ = ∂̃_{b(τ,s)−b} + uB̃`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::chain::{Chain, Word};
use crate::defscalar::DefMono;
use crate::forms::{Forms, Strategy};
use crate::group::DiagonalGroup;
use crate::homotopy::BarKoszul;
use crate::koszul::{KBasis, KChain, Koszul};
use crate::model::{Caps, Label, Model};
use crate::scalar::Field;
use crate::sdr::{op, zero_op, Op, Sdr, Truncation};

/// Highest tensor degree read by `ΠΥ`.
pub const RHO_DEGREE: usize = 2;

pub type ChainSdr<F> = Sdr<Chain<F>, KChain<F>>;

pub struct Retraction<F: Field> {
    pub model: Arc<Model<F>>,
    pub caps: Caps,
    pub bar_koszul: Arc<BarKoszul<F>>,
    pub forms: Arc<Forms<F>>,
    /// `(C, ∂̃_{b₂}) ⇄ (Ω, 0)`.
    pub koszul_stage: ChainSdr<F>,
    /// `(C, ∂̃_b) ⇄ (Ω, dW∧)`.
    pub curved_stage: ChainSdr<F>,
    /// `(Ω, dW∧) ⇄ (Jac, 0)`.
    pub forms_stage: Sdr<KChain<F>, KChain<F>>,
    /// `(C, ∂̃_b) ⇄ (Jac, 0)`.
    pub base: ChainSdr<F>,
    /// `(C, ∂̃_{b(τ,s)} + uB̃) ⇄ (Jac[[τ,s]]((u)), 0)`.
    pub deformed: ChainSdr<F>,
}

impl<F: Field> Retraction<F> {
    pub fn new(model: Arc<Model<F>>) -> Self {
        Self::with_caps(model.clone(), model.spec.caps, Strategy::Auto)
    }

    pub fn with_caps(model: Arc<Model<F>>, caps: Caps, strategy: Strategy) -> Self {
        let group = model.group.clone();
        let bk = Arc::new(BarKoszul::new(group.clone(), model.base_product()));
        let w_weight = model.half_degree() * num_rational::Rational64::from(2);
        let forms = Arc::new(Forms::new(&model.sectors, &model.scheme, w_weight, strategy));

        let koszul_stage = {
            let (g1, g2, g3) = (group.clone(), group.clone(), group.clone());
            let (b1, b2) = (bk.clone(), bk.clone());
            Sdr {
                iota: op(move |k: &KChain<F>| Koszul::new(&g1).phi(k)),
                rho: op(move |c: &Chain<F>| {
                    let kz = Koszul::new(&g2);
                    kz.pi(&kz.upsilon(c))
                }),
                h: memo(op(move |c: &Chain<F>| {
                    let kz = Koszul::new(&g3);
                    b1.h_c(c).add(&kz.phi(&kz.h_k(&kz.upsilon(c))))
                })),
                d_big: memo(op(move |c: &Chain<F>| b2.d(c))),
                d_small: zero_op(),
            }
        };

        let full = chain_truncation(caps.tensor_cap, caps.u_max);
        let rho = chain_truncation(RHO_DEGREE, caps.u_max);
        let max_terms = caps.tensor_cap + 2 * (caps.k_max as usize + caps.u_max as usize) + 8;
        let trunc = Truncation { full: full.clone(), rho: rho.clone(), max_terms };

        let curvature = {
            let (m, b0) = (model.clone(), model.base_curvature());
            memo(op(move |c: &Chain<F>| m.twisted.differential(&b0, c)))
        };
        let curved_stage = memoized(koszul_stage.perturb(curvature, trunc.clone()));

        let forms_stage = {
            let (f1, f2, f3, f4) = (forms.clone(), forms.clone(), forms.clone(), forms.clone());
            Sdr {
                iota: op(move |k: &KChain<F>| f1.i(k)),
                rho: op(move |k: &KChain<F>| f2.p(k)),
                h: op(move |k: &KChain<F>| f3.h(k)),
                d_big: op(move |k: &KChain<F>| f4.dw(k)),
                d_small: zero_op(),
            }
        };
        let base = memoized(curved_stage.compose(&forms_stage));

        let delta = {
            let (m, def) = (model.clone(), model.deformation());
            let u = DefMono::u_pow(1);
            memo(op(move |c: &Chain<F>| {
                let d = m.twisted.differential(&def, c);
                d.add(&m.twisted.connes(c).scale_mono(&u, &F::one()))
            }))
        };
        let deformed = memoized(base.perturb(delta, trunc));

        Retraction {
            model,
            caps,
            bar_koszul: bk,
            forms,
            koszul_stage,
            curved_stage,
            forms_stage,
            base,
            deformed,
        }
    }

    /// The Jacobian class of a label as a small-side element.
    pub fn label_basis(&self, l: &Label) -> KBasis {
        KBasis::new(l.mono, l.g, self.forms.top_mask(l.g))
    }

    pub fn label_class(&self, l: &Label) -> KChain<F> {
        KChain::from_basis(self.caps.k_max, self.label_basis(l), F::one())
    }

    /// Coordinates of a small-side element along the labels.
    pub fn coordinates(&self, k: &KChain<F>) -> Vec<Vec<(DefMono, F)>> {
        self.model
            .labels
            .iter()
            .map(|l| {
                let b = self.label_basis(l);
                k.iter().filter(|(x, _, _)| **x == b).map(|(_, d, c)| (*d, c.clone())).collect()
            })
            .collect()
    }

    /// Truncation to the range where chain-level identities are exact.
    pub fn exact_view(&self) -> Op<Chain<F>, Chain<F>> {
        chain_truncation(self.caps.tensor_cap.saturating_sub(1), self.caps.u_max - 1)
    }
}

/// `(C, ∂̃_{b₂}) ⇄ (K, ∂_K)` with `ι = Φ`, `ρ = Υ`, `h = H_C`.
pub fn bar_koszul_sdr<F: Field>(bk: Arc<BarKoszul<F>>) -> ChainSdr<F> {
    let (b1, b2, b3, b4, b5) = (bk.clone(), bk.clone(), bk.clone(), bk.clone(), bk);
    Sdr {
        iota: op(move |k: &KChain<F>| b1.koszul().phi(k)),
        rho: op(move |c: &Chain<F>| b2.koszul().upsilon(c)),
        h: op(move |c: &Chain<F>| b3.h_c(c)),
        d_big: op(move |c: &Chain<F>| b4.d(c)),
        d_small: op(move |k: &KChain<F>| b5.koszul().differential(k)),
    }
}

/// `(K, ∂_K) ⇄ (Ω, 0)` with `ι = Θ`, `ρ = Π`, `h = H_K`.
pub fn koszul_forms_sdr<F: Field>(group: Arc<DiagonalGroup<F>>) -> Sdr<KChain<F>, KChain<F>> {
    let (g1, g2, g3, g4) = (group.clone(), group.clone(), group.clone(), group);
    Sdr {
        iota: op(move |k: &KChain<F>| Koszul::new(&g1).theta(k)),
        rho: op(move |k: &KChain<F>| Koszul::new(&g2).pi(k)),
        h: op(move |k: &KChain<F>| Koszul::new(&g3).h_k(k)),
        d_big: op(move |k: &KChain<F>| Koszul::new(&g4).differential(k)),
        d_small: zero_op(),
    }
}

type Cache<F> = Mutex<HashMap<(Word, i16, u32), Arc<Chain<F>>>>;

/// Caches a parameter-linear chain operator on single words with a fixed
/// `u`-exponent and truncation order; the remaining parameter monomial is
/// multiplied back in.
pub fn memo<F: Field>(f: Op<Chain<F>, Chain<F>>) -> Op<Chain<F>, Chain<F>> {
    let cache: Cache<F> = Mutex::new(HashMap::new());
    op(move |c: &Chain<F>| {
        let mut out = Chain::zero(c.k_max());
        for (w, d, a) in c.iter() {
            let key = (w.clone(), d.u, c.k_max());
            let hit = cache.lock().expect("cache").get(&key).cloned();
            let img = match hit {
                Some(img) => img,
                None => {
                    let unit = Chain::from_word(c.k_max(), w.clone(), F::one()).scale_mono(&DefMono::u_pow(d.u), &F::one());
                    let img = Arc::new(f(&unit));
                    cache.lock().expect("cache").insert(key, img.clone());
                    img
                }
            };
            out.add_assign(&img.scale_mono(&DefMono { u: 0, ..*d }, a));
        }
        out
    })
}

fn memoized<F: Field, S>(s: Sdr<Chain<F>, S>) -> Sdr<Chain<F>, S> {
    Sdr { rho: s.rho, h: memo(s.h), ..s }
}

pub fn chain_truncation<F: Field>(degree: usize, u_max: i32) -> Op<Chain<F>, Chain<F>> {
    op(move |c: &Chain<F>| c.filter(|w, d| w.degree() <= degree && (d.u as i32).abs() <= u_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Word;
    use crate::model::{ModelKind, ModelSpec};
    use crate::poly::Mono;
    use crate::scalar::Q;

    fn retraction(kind: ModelKind, n: u16) -> Retraction<Q> {
        let mut spec = ModelSpec::new(kind, n);
        spec.caps = Caps { k_max: 1, u_max: 1, tensor_cap: 5, weight_cap: 8 };
        Retraction::new(Arc::new(Model::build(spec).unwrap()))
    }

    fn word(m0: (u16, u16), g: u8, slots: &[(u16, u16)]) -> Chain<Q> {
        let s: Vec<Mono> = slots.iter().map(|&(a, b)| Mono::new(a, b)).collect();
        Chain::from_word(1, Word::twisted(Mono::new(m0.0, m0.1), g, &s), Q::from_i64(1))
    }

    #[test]
    fn lemma_a1_induced_differential() {
        let r = retraction(ModelKind::Aorb, 2);
        for (a, b, mask) in [(1, 0, 1), (0, 0, 0), (1, 0, 2), (1, 1, 0), (0, 1, 1), (3, 0, 1), (0, 0, 3)] {
            let f = KChain::from_basis(1, KBasis::new(Mono::new(a, b), 0, mask), Q::from_i64(1));
            assert_eq!((r.curved_stage.d_small)(&f), r.forms.dw(&f), "{:?}", (a, b, mask));
        }
        let dx = KChain::from_basis(1, KBasis::new(Mono::new(1, 0), 0, 1), Q::from_i64(1));
        let expected = KChain::from_basis(1, KBasis::new(Mono::new(1, 1), 0, 3), Q::from_i64(-2));
        assert_eq!((r.curved_stage.d_small)(&dx), expected);
    }

    #[test]
    fn base_side_conditions() {
        for kind in [ModelKind::Aorb, ModelKind::D] {
            let r = retraction(kind, 2);
            let big = vec![
                word((0, 0), 0, &[(1, 0), (0, 1)]),
                word((2, 0), 0, &[(0, 1), (1, 0)]),
                word((0, 1), 0, &[(0, 1), (1, 1), (1, 0)]),
                word((1, 0), 0, &[(1, 0)]),
                word((0, 0), 1, &[(1, 0), (0, 1)]),
                word((1, 1), 1, &[(1, 0), (0, 1), (2, 0)]),
            ];
            let order = r.model.group.order() as u8;
            let big: Vec<_> = big
                .into_iter()
                .filter(|c| c.iter().all(|(w, _, _)| w.head.g < order))
                .map(|c| r.model.twisted.pi(&c))
                .filter(|c| !c.is_zero())
                .collect();
            let small: Vec<_> = r.model.labels.iter().map(|l| r.label_class(l)).collect();
            let view = r.exact_view();
            r.koszul_stage.check("koszul", &big, &[], &*view).unwrap();
            r.base.check("base", &big, &small, &*view).unwrap();
        }
    }

    #[test]
    fn memo_respects_truncation_order() {
        let f = memo(op(|c: &Chain<Q>| c.scale_mono(&DefMono::param(0), &Q::from_i64(1))));
        let w = Word::twisted(Mono::new(1, 0), 0, &[Mono::new(0, 1)]);
        assert!(f(&Chain::from_word(0, w.clone(), Q::from_i64(1))).is_zero());
        let c = Chain::from_word(1, w, Q::from_i64(1));
        assert_eq!(f(&c), c.scale_mono(&DefMono::param(0), &Q::from_i64(1)));
    }

    #[test]
    fn deformed_projection_of_inclusion() {
        let r = retraction(ModelKind::Aorb, 2);
        for l in &r.model.labels {
            let c = r.label_class(l);
            let i = (r.deformed.iota)(&c);
            assert_eq!((r.deformed.rho)(&i), c, "{}", l);
            assert!((r.deformed.d_small)(&c).is_zero());
        }
    }
}
