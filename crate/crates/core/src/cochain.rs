//! Hochschild cochains as finite sums of multilinear closures on letters,
//! with braces and the Gerstenhaber bracket.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::chain::Letter;
use crate::defscalar::DefMono;
use crate::group::{DiagonalGroup, IDENTITY};
use crate::poly::{Mono, Poly};
use crate::scalar::Field;

pub type Eval<F> = Arc<dyn Fn(&[Letter]) -> Vec<(Letter, F)> + Send + Sync>;

/// `coeff · def · eval` on inputs of length `arity`.
#[derive(Clone)]
pub struct CochainTerm<F> {
    pub arity: usize,
    pub def: DefMono,
    pub coeff: F,
    pub eval: Eval<F>,
}

#[derive(Clone)]
pub struct Cochain<F> {
    terms: Vec<CochainTerm<F>>,
}

/// Sign of a Koszul exponent.
pub(crate) fn sign<F: Field>(exp: usize) -> F {
    if exp.is_multiple_of(2) {
        F::one()
    } else {
        -F::one()
    }
}

impl<F: Field> Cochain<F> {
    pub fn zero() -> Self {
        Cochain { terms: Vec::new() }
    }

    pub fn from_fn(arity: usize, f: impl Fn(&[Letter]) -> Vec<(Letter, F)> + Send + Sync + 'static) -> Self {
        Cochain {
            terms: vec![CochainTerm { arity, def: DefMono::ONE, coeff: F::one(), eval: Arc::new(f) }],
        }
    }

    /// The 0-cochain with value `Σ c·l`.
    pub fn constant(value: Vec<(Letter, F)>) -> Self {
        Self::from_fn(0, move |_| value.clone())
    }

    /// The 0-cochain `p·g`.
    pub fn from_poly(p: &Poly<F>, g: crate::group::GroupElt) -> Self {
        Self::constant(p.terms().map(|(m, c)| (Letter::new(*m, g), c.clone())).collect())
    }

    pub fn terms(&self) -> &[CochainTerm<F>] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn arities(&self) -> Vec<usize> {
        let mut a: Vec<usize> = self.terms.iter().map(|t| t.arity).collect();
        a.sort_unstable();
        a.dedup();
        a
    }

    pub fn scale(&self, c: &F) -> Self {
        Cochain {
            terms: self
                .terms
                .iter()
                .map(|t| CochainTerm { coeff: t.coeff.clone() * c.clone(), ..t.clone() })
                .collect(),
        }
    }

    pub fn scale_mono(&self, m: &DefMono) -> Self {
        Cochain {
            terms: self.terms.iter().map(|t| CochainTerm { def: t.def.mul(m), ..t.clone() }).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Cochain { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-F::one()))
    }

    /// Only the terms of the given arity.
    pub fn component(&self, arity: usize) -> Self {
        Cochain { terms: self.terms.iter().filter(|t| t.arity == arity).cloned().collect() }
    }

    /// Only the terms whose deformation monomial is `1`.
    pub fn base_part(&self) -> Self {
        Cochain { terms: self.terms.iter().filter(|t| t.def.is_one()).cloned().collect() }
    }

    /// Value on `args`, merged, with parameter orders above `k_max` dropped.
    pub fn eval(&self, args: &[Letter], k_max: u32) -> BTreeMap<(DefMono, Letter), F> {
        let mut out = BTreeMap::new();
        for t in self.terms.iter().filter(|t| t.arity == args.len() && t.def.degree() <= k_max) {
            for (l, c) in (t.eval)(args) {
                let e = out.entry((t.def, l)).or_insert_with(F::zero);
                *e = e.clone() + t.coeff.clone() * c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// `self{args₁,…,args_n}` with sign `(−1)^{Σ i_k(p_k+1)}`.
    pub fn brace(&self, args: &[Cochain<F>]) -> Cochain<F> {
        if args.is_empty() {
            return self.clone();
        }
        let mut terms = Vec::new();
        let mut choice = vec![0usize; args.len()];
        loop {
            let chosen: Vec<CochainTerm<F>> = choice.iter().zip(args).map(|(&i, a)| a.terms[i].clone()).collect();
            for outer in &self.terms {
                let n = chosen.len();
                let total: usize = chosen.iter().map(|t| t.arity).sum();
                if outer.arity < n {
                    continue;
                }
                let arity = outer.arity + total - n;
                let def = chosen.iter().fold(outer.def, |d, t| d.mul(&t.def));
                let coeff = chosen.iter().fold(outer.coeff.clone(), |c, t| c * t.coeff.clone());
                let outer_eval = outer.eval.clone();
                let inner: Vec<(usize, Eval<F>)> = chosen.iter().map(|t| (t.arity, t.eval.clone())).collect();
                let eval: Eval<F> = Arc::new(move |a: &[Letter]| brace_eval(&outer_eval, &inner, a));
                terms.push(CochainTerm { arity, def, coeff, eval });
            }
            if args.iter().any(|a| a.terms.is_empty()) || !advance(&mut choice, args) {
                break;
            }
        }
        if args.iter().any(|a| a.terms.is_empty()) {
            return Cochain::zero();
        }
        Cochain { terms }
    }

    /// Gerstenhaber bracket `{φ,ψ} = φ{ψ} − (−1)^{(|φ|+1)(|ψ|+1)} ψ{φ}`.
    pub fn bracket(&self, other: &Cochain<F>) -> Cochain<F> {
        let mut out = Cochain::zero();
        for a in &self.terms {
            for b in &other.terms {
                let fa = Cochain { terms: vec![a.clone()] };
                let fb = Cochain { terms: vec![b.clone()] };
                let s: F = sign((a.arity + 1) * (b.arity + 1));
                out = out.add(&fa.brace(std::slice::from_ref(&fb))).add(&fb.brace(&[fa]).scale(&-s));
            }
        }
        out
    }

    /// Largest deviation from zero over the supplied inputs, if any.
    pub fn find_nonzero<'a>(
        &self,
        inputs: impl IntoIterator<Item = &'a Vec<Letter>>,
        k_max: u32,
    ) -> Option<(Vec<Letter>, BTreeMap<(DefMono, Letter), F>)> {
        for args in inputs {
            let v = self.eval(args, k_max);
            if !v.is_empty() {
                return Some((args.clone(), v));
            }
        }
        None
    }
}

fn advance<F>(choice: &mut [usize], args: &[Cochain<F>]) -> bool {
    for i in (0..choice.len()).rev() {
        choice[i] += 1;
        if choice[i] < args[i].terms.len() {
            return true;
        }
        choice[i] = 0;
    }
    false
}

fn brace_eval<F: Field>(outer: &Eval<F>, inner: &[(usize, Eval<F>)], a: &[Letter]) -> Vec<(Letter, F)> {
    let mut acc: BTreeMap<Letter, F> = BTreeMap::new();
    let mut positions = Vec::with_capacity(inner.len());
    place(outer, inner, a, 0, 0, &mut positions, &mut acc);
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn place<F: Field>(
    outer: &Eval<F>,
    inner: &[(usize, Eval<F>)],
    a: &[Letter],
    k: usize,
    from: usize,
    positions: &mut Vec<usize>,
    acc: &mut BTreeMap<Letter, F>,
) {
    if k == inner.len() {
        let exp: usize = positions.iter().zip(inner).map(|(&i, (p, _))| i * (p + 1)).sum();
        let s: F = sign(exp);
        // expand the inner values, then feed the outer cochain
        let mut partial: Vec<(Vec<Letter>, F)> = vec![(Vec::new(), s)];
        let mut cursor = 0;
        for (&i, (p, ev)) in positions.iter().zip(inner) {
            for x in &mut partial {
                x.0.extend_from_slice(&a[cursor..i]);
            }
            let vals = ev(&a[i..i + p]);
            let mut next = Vec::with_capacity(partial.len() * vals.len());
            for (ws, c) in &partial {
                for (l, v) in &vals {
                    let mut w = ws.clone();
                    w.push(*l);
                    next.push((w, c.clone() * v.clone()));
                }
            }
            partial = next;
            cursor = i + p;
        }
        for (mut ws, c) in partial {
            ws.extend_from_slice(&a[cursor..]);
            for (l, v) in outer(&ws) {
                let e = acc.entry(l).or_insert_with(F::zero);
                *e = e.clone() + c.clone() * v;
            }
        }
        return;
    }
    let p = inner[k].0;
    let rest: usize = inner[k + 1..].iter().map(|(q, _)| q).sum();
    if a.len() < from + p + rest {
        return;
    }
    for i in from..=a.len() - p - rest {
        positions.push(i);
        place(outer, inner, a, k + 1, i + p, positions, acc);
        positions.pop();
    }
}

/// `δ_b φ = {b, φ}`.
pub fn delta<F: Field>(b: &Cochain<F>, phi: &Cochain<F>) -> Cochain<F> {
    b.bracket(phi)
}

/// `δ_b φ + ½{φ, φ}`.
pub fn mc_residual<F: Field>(b: &Cochain<F>, phi: &Cochain<F>) -> Cochain<F> {
    delta(b, phi).add(&phi.bracket(phi).scale(&F::from_ratio(1, 2)))
}

/// The product `b₂[a₁g₁|a₂g₂] = a₁·ᵍ¹a₂·g₁g₂` of `A[G]`.
pub fn twisted_product<F: Field>(group: Arc<DiagonalGroup<F>>) -> Cochain<F> {
    Cochain::from_fn(2, move |a: &[Letter]| {
        let (l1, l2) = (a[0], a[1]);
        vec![(
            Letter::new(l1.mono.mul(l2.mono), group.mul(l1.g, l2.g)),
            group.character(l1.g, l2.mono),
        )]
    })
}

/// `Ψ^*(φ)[a₁g₁|…|a_pg_p] = φ[a₁|ᵍ¹a₂|…|ᵍ¹⋯ᵍᵖ⁻¹a_p]·g₁⋯g_p` for a cochain on
/// `A` with values in `A[G]`.
pub fn psi_upper_star<F: Field>(phi: &Cochain<F>, group: Arc<DiagonalGroup<F>>) -> Cochain<F> {
    let terms = phi
        .terms
        .iter()
        .map(|t| {
            let inner = t.eval.clone();
            let group = group.clone();
            let eval: Eval<F> = Arc::new(move |a: &[Letter]| {
                let mut scalar = F::one();
                let mut acc = IDENTITY;
                let mut plain = Vec::with_capacity(a.len());
                for l in a {
                    scalar = scalar * group.character(acc, l.mono);
                    plain.push(Letter::plain(l.mono));
                    acc = group.mul(acc, l.g);
                }
                inner(&plain)
                    .into_iter()
                    .map(|(l, c)| (Letter::new(l.mono, group.mul(l.g, acc)), c * scalar.clone()))
                    .collect()
            });
            CochainTerm { eval, ..t.clone() }
        })
        .collect();
    Cochain { terms }
}

/// Checks invariance of a cochain on `A` on the given group-free inputs.
pub fn is_invariant_on<F: Field>(
    phi: &Cochain<F>,
    group: &DiagonalGroup<F>,
    inputs: &[Vec<Letter>],
    k_max: u32,
) -> bool {
    for args in inputs {
        let base = phi.eval(args, k_max);
        for h in group.elements() {
            let mut scalar = F::one();
            let moved: Vec<Letter> = args
                .iter()
                .map(|l| {
                    scalar = scalar.clone() * group.character(h, l.mono);
                    *l
                })
                .collect();
            let lhs = phi.eval(&moved, k_max);
            // h·φ(a) must equal φ(h·a)
            let mut rhs: BTreeMap<(DefMono, Letter), F> = BTreeMap::new();
            for ((d, l), c) in &base {
                let v = c.clone() * group.character(h, l.mono);
                rhs.insert((*d, *l), v);
            }
            let lhs: BTreeMap<_, F> = lhs.into_iter().map(|(k, c)| (k, c * scalar.clone())).collect();
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// All words of the given arity whose letters are drawn from `letters`.
pub fn input_tuples(letters: &[Letter], arity: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * letters.len());
        for w in &out {
            for l in letters {
                let mut v = w.clone();
                v.push(*l);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Non-unit monomials `x^a y^b` with `a + b ≤ deg`.
pub fn small_monos(deg: u16) -> Vec<Mono> {
    let mut out = Vec::new();
    for a in 0..=deg {
        for b in 0..=deg - a {
            if a + b > 0 {
                out.push(Mono::new(a, b));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn z2() -> Arc<DiagonalGroup<Q>> {
        Arc::new(DiagonalGroup::generated(2, &[[1, 1]], &["sigma"]).unwrap())
    }

    fn plain_letters(deg: u16) -> Vec<Letter> {
        small_monos(deg).into_iter().map(Letter::plain).collect()
    }

    #[test]
    fn associator_vanishes() {
        let b2 = twisted_product(z2());
        let assoc = b2.brace(std::slice::from_ref(&b2));
        let inputs = input_tuples(&plain_letters(2), 3);
        assert!(assoc.find_nonzero(&inputs, 0).is_none());
        assert!(b2.bracket(&b2).find_nonzero(&inputs, 0).is_none());
    }

    #[test]
    fn empty_brace_is_identity() {
        let b2 = twisted_product(z2());
        let same = b2.brace(&[]);
        let inputs = input_tuples(&plain_letters(2), 2);
        assert!(same.sub(&b2).find_nonzero(&inputs, 0).is_none());
    }

    #[test]
    fn brace_with_central_constant() {
        // b₂{x}[a] = b₂[x|a] − b₂[a|x] = 0 for commutative A
        let b2 = twisted_product(z2());
        let x = Cochain::constant(vec![(Letter::plain(Mono::new(1, 0)), Q::from_i64(1))]);
        let d = b2.brace(&[x]);
        let inputs = input_tuples(&plain_letters(3), 1);
        assert!(d.find_nonzero(&inputs, 0).is_none());
    }

    #[test]
    fn delta_of_group_element() {
        // δ_{b₂}(1σ)[a] = ±(ˢa − a)σ
        let g = z2();
        let b2 = twisted_product(g.clone());
        let one_sigma = Cochain::constant(vec![(Letter::new(Mono::ONE, 1), Q::from_i64(1))]);
        let d = delta(&b2, &one_sigma);
        let x = Letter::plain(Mono::new(1, 0));
        let v = d.eval(&[x], 0);
        assert_eq!(v.len(), 1);
        let ((_, l), c) = v.into_iter().next().unwrap();
        assert_eq!(l, Letter::new(Mono::new(1, 0), 1));
        assert_eq!(c.abs(), Q::from_i64(2));
        let xx = Letter::plain(Mono::new(2, 0));
        assert!(d.eval(&[xx], 0).is_empty());
    }

    #[test]
    fn psi_star_moves_group_elements() {
        let g = z2();
        let phi = Cochain::from_fn(2, |a: &[Letter]| vec![(Letter::new(a[0].mono.mul(a[1].mono), 1), Q::from_i64(1))]);
        let lifted = psi_upper_star(&phi, g);
        let x = Letter::new(Mono::new(1, 0), 1);
        let y = Letter::plain(Mono::new(0, 1));
        let v = lifted.eval(&[x, y], 0);
        assert_eq!(v.into_iter().collect::<Vec<_>>(), vec![((DefMono::ONE, Letter::new(Mono::new(1, 1), 0)), Q::from_i64(-1))]);
    }

}
