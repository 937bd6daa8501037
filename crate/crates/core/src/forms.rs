//! Differential forms on the fixed loci, the Koszul differential `dW_g∧`,
//! and the retraction of `(Ω•(Fix g), dW_g∧)` onto `Jac(W_g)·vol`.
//!
//! Forms reuse [`KBasis`]: `x^γ dx_I` in the sector of `g` is stored as
//! `x^γ g e_I`, with only fixed coordinates allowed in `γ` and `I`.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_rational::Rational64;
use num_traits::Zero;

use crate::group::{GroupElt, SectorJacobian};
use crate::koszul::{wedge_index, KBasis, KChain};
use crate::linalg::Matrix;
use crate::poly::{monomials_up_to, Mono, WeightScheme};
use crate::scalar::Field;

/// How `H_Ω` is produced on a sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Closed formula for `W_g = x^N + y^M`, otherwise linear algebra.
    Auto,
    /// Always solve per weight piece.
    Algorithmic,
}

type Table<F> = BTreeMap<KBasis, Vec<(KBasis, F)>>;

struct Sector<F> {
    jac: SectorJacobian<F>,
    active: Vec<usize>,
    top_mask: u8,
    partials: [Vec<(Mono, F)>; 2],
    fermat: Option<[u16; 2]>,
}

/// The forms-side retraction for every sector of a model.
pub struct Forms<F> {
    sectors: Vec<Sector<F>>,
    scheme: WeightScheme,
    d: Rational64,
    strategy: Strategy,
    cache: Mutex<BTreeMap<(GroupElt, Rational64), Arc<Table<F>>>>,
}

impl<F: Field> Forms<F> {
    pub fn new(sectors: &[SectorJacobian<F>], scheme: &WeightScheme, w_weight: Rational64, strategy: Strategy) -> Self {
        let sectors = sectors
            .iter()
            .map(|s| {
                let active: Vec<usize> = (0..2).filter(|&i| !s.sector.moved[i]).collect();
                let top_mask = active.iter().fold(0u8, |m, &i| m | (1 << i));
                let wg = &s.sector.w_g;
                let partials = [0, 1].map(|i| {
                    if s.sector.moved[i] {
                        Vec::new()
                    } else {
                        wg.derivative(i).terms().map(|(m, c)| (*m, c.clone())).collect()
                    }
                });
                Sector { fermat: fermat_exponents(s), jac: s.clone(), active, top_mask, partials }
            })
            .collect();
        Forms { sectors, scheme: scheme.clone(), d: w_weight, strategy, cache: Mutex::new(BTreeMap::new()) }
    }

    fn sector(&self, g: GroupElt) -> &Sector<F> {
        &self.sectors[g as usize]
    }

    pub fn top_mask(&self, g: GroupElt) -> u8 {
        self.sector(g).top_mask
    }

    /// Whether `b` is a form on `Fix(g)`.
    pub fn is_form(&self, b: &KBasis) -> bool {
        let s = self.sector(b.g);
        b.mask & !s.top_mask == 0 && (0..2).all(|i| s.active.contains(&i) || b.mono.0[i] == 0)
    }

    /// `dW_g ∧ (a dx_I) = Σ_i ∂_iW_g · a · dx_i ∧ dx_I`.
    pub fn dw(&self, c: &KChain<F>) -> KChain<F> {
        c.apply(|b| self.dw_basis(b))
    }

    fn dw_basis(&self, b: &KBasis) -> Vec<(KBasis, F)> {
        let s = self.sector(b.g);
        let mut out = Vec::new();
        for &i in &s.active {
            let Some((mask, negative)) = wedge_index(i, b.mask) else { continue };
            for (m, c) in &s.partials[i] {
                let c = if negative { -c.clone() } else { c.clone() };
                out.push((KBasis::new(b.mono.mul(*m), b.g, mask), c));
            }
        }
        out
    }

    /// `p`: the class of a top form in `Jac(W_g)`; zero on lower forms.
    pub fn p(&self, c: &KChain<F>) -> KChain<F> {
        c.apply(|b| {
            let s = self.sector(b.g);
            if b.mask != s.top_mask {
                return Vec::new();
            }
            s.jac
                .ring
                .reduce_mono(b.mono)
                .into_iter()
                .map(|(m, f)| (KBasis::new(m, b.g, b.mask), f))
                .collect()
        })
    }

    /// `i`: Jacobian classes are top forms with basis monomials.
    pub fn i(&self, c: &KChain<F>) -> KChain<F> {
        c.clone()
    }

    /// `H_Ω`, with `[dW∧, H_Ω] = id − i∘p`; zero on twisted sectors.
    pub fn h(&self, c: &KChain<F>) -> KChain<F> {
        c.apply(|b| self.h_basis(b))
    }

    fn h_basis(&self, b: &KBasis) -> Vec<(KBasis, F)> {
        let s = self.sector(b.g);
        if s.active.is_empty() || b.mask == 0 {
            return Vec::new();
        }
        if let (Some(e), Strategy::Auto) = (s.fermat, self.strategy) {
            return fermat_h(e, b);
        }
        let t = self.grading(b);
        let table = self.table(b.g, t);
        table.get(b).cloned().unwrap_or_default()
    }

    /// Weight of `x^γ dx_I` minus `|I|·wt(W)`; preserved by `dW∧`.
    pub fn grading(&self, b: &KBasis) -> Rational64 {
        let mut t = self.scheme.mono(b.mono);
        for i in 0..2 {
            if b.mask & (1 << i) != 0 {
                t += self.scheme.vars[i] - self.d;
            }
        }
        t
    }

    fn table(&self, g: GroupElt, t: Rational64) -> Arc<Table<F>> {
        if let Some(tab) = self.cache.lock().expect("cache").get(&(g, t)) {
            return tab.clone();
        }
        let tab = Arc::new(self.build_table(g, t));
        self.cache.lock().expect("cache").insert((g, t), tab.clone());
        tab
    }

    /// Basis of the forms of degree `q` in the piece `t`.
    pub fn piece_basis(&self, g: GroupElt, t: Rational64, q: usize) -> Vec<KBasis> {
        let s = self.sector(g);
        let mut out = Vec::new();
        let active = [s.active.contains(&0), s.active.contains(&1)];
        for mask in 0..4u8 {
            if mask & !s.top_mask != 0 || mask.count_ones() as usize != q {
                continue;
            }
            let mut target = t;
            for i in 0..2 {
                if mask & (1 << i) != 0 {
                    target += self.d - self.scheme.vars[i];
                }
            }
            if target < Rational64::zero() {
                continue;
            }
            for m in monomials_up_to(&self.scheme, active, target) {
                if self.scheme.mono(m) == target {
                    out.push(KBasis::new(m, g, mask));
                }
            }
        }
        out.sort();
        out
    }

    pub fn dw_matrix(&self, from: &[KBasis], to: &[KBasis]) -> Matrix<F> {
        let index: BTreeMap<KBasis, usize> = to.iter().enumerate().map(|(i, b)| (*b, i)).collect();
        let mut m = Matrix::<F>::zeros(to.len(), from.len());
        for (j, b) in from.iter().enumerate() {
            for (nb, c) in self.dw_basis(b) {
                let i = index[&nb];
                m[(i, j)] = m[(i, j)].clone() + c;
            }
        }
        m
    }

    /// Solves the piece from the top degree down:
    /// `H_top = d⁻¹(1 − ip)`, then `H_q = d⁻¹(1 − H_{q+1} d)`.
    fn build_table(&self, g: GroupElt, t: Rational64) -> Table<F> {
        let top = self.sector(g).active.len();
        let bases: Vec<Vec<KBasis>> = (0..=top).map(|q| self.piece_basis(g, t, q)).collect();
        let mut table: Table<F> = BTreeMap::new();
        for q in (1..=top).rev() {
            let d = self.dw_matrix(&bases[q - 1], &bases[q]);
            let index: BTreeMap<KBasis, usize> = bases[q].iter().enumerate().map(|(i, b)| (*b, i)).collect();
            for b in &bases[q] {
                let single = KChain::from_basis(0, *b, F::one());
                let rhs = if q == top {
                    single.sub(&self.p(&single))
                } else {
                    let back = self.dw(&single).apply(|x| table.get(x).cloned().unwrap_or_default());
                    single.sub(&back)
                };
                let mut v = vec![F::zero(); bases[q].len()];
                for (x, _, c) in rhs.iter() {
                    v[index[x]] = c.clone();
                }
                let sol = d.solve(&v).expect("forms complex is exact below the top degree");
                let image: Vec<(KBasis, F)> = sol
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(j, c)| (bases[q - 1][j], c))
                    .collect();
                table.insert(*b, image);
            }
        }
        table
    }
}

/// `Some([N, M])` when `W_g = x^N + y^M` on a two-dimensional fixed locus.
fn fermat_exponents<F: Field>(s: &SectorJacobian<F>) -> Option<[u16; 2]> {
    if s.sector.moved != [false, false] {
        return None;
    }
    let terms: Vec<_> = s.sector.w_g.terms().collect();
    if terms.len() != 2 || terms.iter().any(|(_, c)| !c.is_one()) {
        return None;
    }
    let mut e = [0u16; 2];
    for (m, _) in terms {
        match m.0 {
            [a, 0] if a > 1 => e[0] = a,
            [0, b] if b > 1 => e[1] = b,
            _ => return None,
        }
    }
    (e[0] > 0 && e[1] > 0).then_some(e)
}

/// The closed formula for `W = x^N + y^M`.
fn fermat_h<F: Field>([n, m]: [u16; 2], b: &KBasis) -> Vec<(KBasis, F)> {
    let [a, c] = b.mono.0;
    let inv = |k: u16| F::one() / F::from_i64(k as i64);
    match b.mask {
        3 if a + 1 >= n => vec![(KBasis::new(Mono::new(a + 1 - n, c), b.g, 2), inv(n))],
        3 if c + 1 >= m => vec![(KBasis::new(Mono::new(a, c + 1 - m), b.g, 1), -inv(m))],
        1 if a + 1 >= n => vec![(KBasis::new(Mono::new(a + 1 - n, c), b.g, 0), inv(n))],
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Model, ModelKind, ModelSpec};
    use crate::scalar::Q;

    fn forms(kind: ModelKind, n: u16, strategy: Strategy) -> (Model<Q>, Forms<Q>) {
        let m = Model::<Q>::build(ModelSpec::new(kind, n)).unwrap();
        let f = Forms::new(&m.sectors, &m.scheme, Rational64::from(2 * n as i64), strategy);
        (m, f)
    }

    fn k(a: u16, b: u16, g: u8, mask: u8) -> KChain<Q> {
        KChain::from_basis(0, KBasis::new(Mono::new(a, b), g, mask), Q::from_i64(1))
    }

    #[test]
    fn explicit_values() {
        let (_, f) = forms(ModelKind::Aorb, 2, Strategy::Auto);
        assert_eq!(f.h(&k(3, 0, 0, 1)), k(0, 0, 0, 0).scale(&Q::from_ratio(1, 4)));
        for a in 0..3 {
            assert_eq!(f.h(&k(a, 1, 0, 3)), k(a, 0, 0, 1).scale(&Q::from_ratio(-1, 2)));
        }
        assert!(f.h(&k(2, 3, 0, 2)).is_zero());
        assert_eq!(f.dw(&k(0, 0, 0, 1)), k(0, 1, 0, 3).scale(&Q::from_i64(-2)));
        assert!(f.h(&k(0, 0, 1, 0)).is_zero());
    }

    fn check_side_conditions(m: &Model<Q>, f: &Forms<Q>) {
        let d = m.spec.n * 2;
        for g in m.group.elements() {
            for a in 0..=d + 2 {
                for b in 0..=d + 2 {
                    for mask in 0..4u8 {
                        let basis = KBasis::new(Mono::new(a, b), g, mask);
                        if !f.is_form(&basis) {
                            continue;
                        }
                        let x = KChain::from_basis(0, basis, Q::from_i64(1));
                        let lhs = f.dw(&f.h(&x)).add(&f.h(&f.dw(&x)));
                        assert_eq!(lhs, x.sub(&f.i(&f.p(&x))), "{:?}", basis);
                        assert!(f.h(&f.h(&x)).is_zero());
                        assert!(f.p(&f.h(&x)).is_zero());
                        assert!(f.h(&f.i(&f.p(&x))).is_zero());
                        assert_eq!(f.p(&f.i(&f.p(&x))), f.p(&x));
                    }
                }
            }
        }
    }

    #[test]
    fn side_conditions_both_strategies() {
        for n in 2..=3 {
            for strategy in [Strategy::Auto, Strategy::Algorithmic] {
                let (m, f) = forms(ModelKind::Aorb, n, strategy);
                check_side_conditions(&m, &f);
                let (m, f) = forms(ModelKind::D, n, strategy);
                check_side_conditions(&m, &f);
            }
        }
    }
}
