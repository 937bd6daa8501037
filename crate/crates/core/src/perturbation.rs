//! Basis representatives of the deformed periodic cyclic homology and their
//! comparison with the closed-form low-degree terms.

use num_rational::Rational64;
use serde::Serialize;

use crate::chain::{Chain, Word};
use crate::defscalar::DefMono;
use crate::model::{Label, Model, ModelKind};
use crate::poly::Mono;
use crate::retract::Retraction;
use crate::scalar::Field;

#[derive(Clone, Debug)]
pub struct Representative<F: Field> {
    pub label: Label,
    pub chain: Chain<F>,
    /// Lowest tensor-degree part of `chain`.
    pub leading: Chain<F>,
    /// Common energy of all terms, if homogeneous.
    pub energy: Option<Rational64>,
}

/// Outcome of comparing a computed chain with a closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equal,
    /// Equal up to `∂̃_{b₂}` of the witness.
    ModBoundary,
    Mismatch,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Equal => "equal",
            Verdict::ModBoundary => "mod-boundary",
            Verdict::Mismatch => "mismatch",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Comparison<F: Field> {
    pub verdict: Verdict,
    /// `computed − expected`.
    pub difference: Chain<F>,
    /// `w` with `∂̃_{b₂}(w) = difference` when the verdict is `ModBoundary`.
    pub witness: Option<Chain<F>>,
}

pub fn representatives<F: Field>(r: &Retraction<F>) -> Vec<Representative<F>> {
    r.model
        .labels
        .iter()
        .map(|l| {
            let chain = (r.deformed.iota)(&r.label_class(l));
            let leading = chain.max_degree().map_or_else(
                || Chain::zero(chain.k_max()),
                |_| {
                    let low = chain.iter().map(|(w, _, _)| w.degree()).min().unwrap_or(0);
                    chain.degree_part(low)
                },
            );
            let energy = homogeneous_energy(&r.model, &chain);
            Representative { label: l.clone(), chain, leading, energy }
        })
        .collect()
}

/// The common energy of all terms, or `None` if they differ.
pub fn homogeneous_energy<F: Field>(model: &Model<F>, c: &Chain<F>) -> Option<Rational64> {
    let mut it = c.iter().map(|(w, d, _)| model.energy(w, d));
    let first = it.next()?;
    it.all(|e| e == first).then_some(first)
}

/// `(∂̃_{b(τ,s)} + uB̃)(c)` restricted to where truncation is exact.
pub fn cycle_residual<F: Field>(r: &Retraction<F>, c: &Chain<F>) -> Chain<F> {
    let m = &r.model;
    let d = m.twisted.differential(&m.full_structure(), c);
    let b = m.twisted.connes(c).scale_mono(&DefMono::u_pow(1), &F::one());
    (r.exact_view())(&d.add(&b))
}

/// Compares `computed` with `expected`; a nonzero difference is tested for
/// being a `∂̃_{b₂}`-boundary with witness given by the Koszul-stage homotopy.
pub fn compare<F: Field>(r: &Retraction<F>, computed: &Chain<F>, expected: &Chain<F>) -> Comparison<F> {
    let difference = computed.sub(expected);
    if difference.is_zero() {
        return Comparison { verdict: Verdict::Equal, difference, witness: None };
    }
    let witness = (r.koszul_stage.h)(&difference);
    if (r.koszul_stage.d_big)(&witness) == difference {
        Comparison { verdict: Verdict::ModBoundary, difference, witness: Some(witness) }
    } else {
        Comparison { verdict: Verdict::Mismatch, difference, witness: None }
    }
}

/// Builds closed-form chains in the model's variables.
pub struct Closed<'a, F: Field> {
    model: &'a Model<F>,
    k_max: u32,
}

fn x(a: u16) -> Mono {
    Mono::new(a, 0)
}

const Y: Mono = Mono([0, 1]);

impl<'a, F: Field> Closed<'a, F> {
    pub fn new(model: &'a Model<F>) -> Self {
        Closed { model, k_max: model.k_max() }
    }

    fn word(&self, head: Mono, g: u8, slots: &[Mono], def: DefMono, c: i64) -> Chain<F> {
        Chain::from_word(self.k_max, Word::twisted(head, g, slots), F::from_i64(c)).scale_mono(&def, &F::one())
    }

    /// `head[pre|a∧b|post]`, expanding `a∧b = a|b − b|a`.
    fn wedge(&self, head: Mono, g: u8, pre: &[Mono], a: Mono, b: Mono, post: &[Mono], def: DefMono, c: i64) -> Chain<F> {
        let mk = |p: Mono, q: Mono| {
            let s: Vec<Mono> = pre.iter().copied().chain([p, q]).chain(post.iter().copied()).collect();
            s
        };
        self.word(head, g, &mk(a, b), def, c).sub(&self.word(head, g, &mk(b, a), def, c))
    }

    /// `τ_j` with the convention `τ_n = 1`.
    fn tau(&self, j: usize) -> DefMono {
        if j == self.model.spec.n as usize {
            DefMono::ONE
        } else {
            DefMono::param(j)
        }
    }

    fn sigma(&self) -> u8 {
        self.model.group.by_name("sigma").unwrap_or(0)
    }

    /// Lowest-degree term of the representative of `label`.
    pub fn leading(&self, label: &Label) -> Chain<F> {
        let (a, b) = match self.model.spec.kind {
            ModelKind::Aorb if label.g != 0 => return self.word(label.mono, label.g, &[], DefMono::ONE, 1),
            _ => (Mono::new(1, 0), Mono::new(0, 1)),
        };
        self.wedge(label.mono, 0, &[], a, b, &[], DefMono::ONE, 1)
    }

    /// `Σ_{j=1}^{n} Σ_{i=0}^{2j−2} τ_j x^iσ[x^{2j−i−1}|x] + 1σ[y|y]`.
    pub fn beta2(&self) -> Chain<F> {
        let (n, s) = (self.model.spec.n as usize, self.sigma());
        let mut out = self.word(Mono::ONE, s, &[Y, Y], DefMono::ONE, 1);
        for j in 1..=n {
            for i in 0..=(2 * j - 2) as u16 {
                out.add_assign(&self.word(x(i), s, &[x(2 * j as u16 - i - 1), x(1)], self.tau(j), 1));
            }
        }
        out
    }

    /// The closed degree-4 part of `α_{2k}`.
    pub fn alpha4(&self, k: u16) -> Chain<F> {
        let n = self.model.spec.n as usize;
        let (xx, h) = (x(1), x(2 * k));
        let one = DefMono::ONE;
        let mut out = self.wedge(h, 0, &[], xx, Y, &[Y, Y], one, 1);
        out.add_assign(&self.wedge(h, 0, &[Y, Y], xx, Y, &[], one, 1));
        for j in 1..=n {
            for i in 0..=(2 * j - 2) as u16 {
                let m = x(2 * j as u16 - i - 1);
                let t = self.tau(j);
                out.add_assign(&self.wedge(x(i + 2 * k), 0, &[xx, m], xx, Y, &[], t, 1));
                out.add_assign(&self.wedge(x(i + 2 * k), 0, &[], xx, Y, &[m, xx], t, 1));
            }
        }
        if k >= 1 {
            let u = DefMono::u_pow(1);
            for i in 0..=(2 * k - 2) {
                let m = x(2 * k - i - 1);
                out.add_assign(&self.wedge(x(i), 0, &[], xx, Y, &[m, xx], u, 1));
                out.add_assign(&self.wedge(x(i), 0, &[xx, m], xx, Y, &[], u, 1));
            }
        }
        out
    }

    /// The closed degree-4 part of `β`, with `H_C` supplied by `r`.
    pub fn beta4(&self, r: &Retraction<F>) -> Chain<F> {
        let (n, s) = (self.model.spec.n as usize, self.sigma());
        let one = DefMono::ONE;
        let ub = self.model.twisted.connes(&self.beta2()).scale_mono(&DefMono::u_pow(1), &F::one());
        let mut out = r.bar_koszul.h_c(&ub).neg();
        out.add_assign(&self.word(Mono::ONE, s, &[Y, Y, Y, Y], one, 1));
        let pairs: Vec<(usize, u16)> = (1..=n).flat_map(|j| (0..=(2 * j - 2) as u16).map(move |i| (j, i))).collect();
        for &(j, i) in &pairs {
            let m = x(2 * j as u16 - i - 1);
            let t = self.tau(j);
            for &(j2, i2) in &pairs {
                let m2 = x(2 * j2 as u16 - i2 - 1);
                let t2 = t.mul(&self.tau(j2));
                out.add_assign(&self.word(x(i + i2), s, &[m, x(1), m2, x(1)], t2, 1));
            }
            out.add_assign(&self.word(x(i), s, &[m, x(1), Y, Y], t, 1));
            out.add_assign(&self.wedge(x(i), s, &[m, Y], x(1), Y, &[], t, -1));
            out.add_assign(&self.wedge(x(i), s, &[Y, m], x(1), Y, &[], t, 1));
            out.add_assign(&self.word(x(i), s, &[Y, Y, m, x(1)], t, 1));
        }
        out
    }
}

/// Restriction of a chain to deformation order `≤ k` and `|u| ≤ u`.
pub fn window<F: Field>(c: &Chain<F>, k: u32, u: i32) -> Chain<F> {
    c.filter(|_, d| d.degree() <= k && (d.u as i32).abs() <= u)
}
