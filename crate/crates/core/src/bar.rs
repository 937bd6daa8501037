//! Bar complex of a curved algebra with coefficients in itself: the master
//! differential, Connes' operator and the Getzler operations `b{…}`, `B{…}`.
//!
//! All letters are even, so the Koszul parity of `a₀,…,a_k` is `k + 1`.

use crate::chain::{Chain, Letter, Word};
use crate::cochain::{sign, Cochain, CochainTerm};
use crate::defscalar::DefMono;
use crate::scalar::Field;

type Out<F> = Vec<(DefMono, Word, F)>;

/// `∂_b` for a curved structure `b = Σ b_l` on a single word.
pub fn bar_differential_word<F: Field>(b: &Cochain<F>, w: &Word, budget: u32) -> Out<F> {
    let p = w.degree();
    let a = &w.slots;
    let mut out = Vec::new();
    for t in b.terms().iter().filter(|t| t.def.degree() <= budget) {
        let l = t.arity;
        // wrap-around: b_l[a_{k+1}|…|a_p|a₀|a₁…a_r][a_{r+1}|…|a_k]
        if l >= 1 && l <= p + 1 {
            for k in (p + 1 - l)..=p {
                let r = k + l - p - 1;
                let mut inputs: Vec<Letter> = a[k..].to_vec();
                inputs.push(w.head);
                inputs.extend_from_slice(&a[..r]);
                let s: F = sign((k + 1) * (p - k));
                for (head, c) in (t.eval)(&inputs) {
                    out.push((t.def, Word::new(head, a[r..k].iter().copied()), s.clone() * t.coeff.clone() * c));
                }
            }
        }
        // inner: a₀[a₁…a_k|b_l[a_{k+1}…a_{k+l}]|…]
        if l <= p {
            for k in 0..=(p - l) {
                let s: F = sign(k + 1);
                for (mid, c) in (t.eval)(&a[k..k + l]) {
                    let slots = a[..k].iter().copied().chain(std::iter::once(mid)).chain(a[k + l..].iter().copied());
                    out.push((t.def, Word::new(w.head, slots), s.clone() * t.coeff.clone() * c));
                }
            }
        }
    }
    out
}

pub fn bar_differential<F: Field>(b: &Cochain<F>, c: &Chain<F>) -> Chain<F> {
    lift(c, |w, budget| bar_differential_word(b, w, budget))
}

/// Connes' operator `B(a₀[a₁…a_p]) = Σ_i (−1)^{(i+1)p} 1[a_{i+1}…a_p|a₀|a₁…a_i]`.
pub fn connes_b<F: Field>(c: &Chain<F>) -> Chain<F> {
    getzler_bb(&[], c)
}

/// `b{φ₁,…,φ_n}`; for `n = 0` this is `∂_b`.
pub fn getzler_b<F: Field>(b: &Cochain<F>, phis: &[Cochain<F>], c: &Chain<F>) -> Chain<F> {
    if phis.is_empty() {
        return bar_differential(b, c);
    }
    lift(c, |w, budget| {
        let mut out = Vec::new();
        for_each_choice(phis, budget, |chosen, def, coeff| {
            for t in b.terms().iter().filter(|t| t.arity >= 1 && def.mul(&t.def).degree() <= budget) {
                getzler_b_word(t, chosen, w, def.mul(&t.def), coeff.clone() * t.coeff.clone(), &mut out);
            }
        });
        out
    })
}

/// `B{φ₁,…,φ_n}`; for `n = 0` this is Connes' `B`.
pub fn getzler_bb<F: Field>(phis: &[Cochain<F>], c: &Chain<F>) -> Chain<F> {
    lift(c, |w, budget| {
        let mut out = Vec::new();
        for_each_choice(phis, budget, |chosen, def, coeff| {
            let m = w.degree();
            for j0 in 0..=m {
                for js in placements(chosen, j0, m) {
                    let s: F = sign(eta(j0, m, chosen, &js));
                    let mut head_part: Vec<(Vec<Letter>, F)> = expand(&w.slots, chosen, &js, j0, m);
                    for (slots, c) in head_part.drain(..) {
                        let word = Word::new(
                            Letter::UNIT,
                            slots.into_iter().chain(std::iter::once(w.head)).chain(w.slots[..j0].iter().copied()),
                        );
                        out.push((def, word, s.clone() * coeff.clone() * c));
                    }
                }
            }
        });
        out
    })
}

fn getzler_b_word<F: Field>(
    t: &CochainTerm<F>,
    chosen: &[&CochainTerm<F>],
    w: &Word,
    def: DefMono,
    coeff: F,
    out: &mut Out<F>,
) {
    let m = w.degree() as isize;
    let n = chosen.len() as isize;
    let total: isize = chosen.iter().map(|c| c.arity as isize).sum();
    let l = t.arity as isize;
    for j0 in 0..=m {
        let r = l - 1 - m + j0 + total - n;
        if r < 0 || r > j0 {
            continue;
        }
        let (j0, r) = (j0 as usize, r as usize);
        for js in placements(chosen, j0, m as usize) {
            let s: F = sign(eta(j0, m as usize, chosen, &js));
            for (mut inputs, c) in expand(&w.slots, chosen, &js, j0, m as usize) {
                inputs.push(w.head);
                inputs.extend_from_slice(&w.slots[..r]);
                for (head, v) in (t.eval)(&inputs) {
                    out.push((def, Word::new(head, w.slots[r..j0].iter().copied()), s.clone() * coeff.clone() * c.clone() * v));
                }
            }
        }
    }
}

/// `η = (j₀+1)m + Σ (p_k+1)(j_k − j₀)`.
fn eta<F>(j0: usize, m: usize, chosen: &[&CochainTerm<F>], js: &[usize]) -> usize {
    (j0 + 1) * m + chosen.iter().zip(js).map(|(t, &j)| (t.arity + 1) * (j - j0)).sum::<usize>()
}

/// Start positions `j₀ ≤ j₁`, `j_k + p_k ≤ j_{k+1}`, `j_n + p_n ≤ m`.
fn placements<F>(chosen: &[&CochainTerm<F>], j0: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(chosen.len());
    fn rec<F>(chosen: &[&CochainTerm<F>], from: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let k = cur.len();
        if k == chosen.len() {
            out.push(cur.clone());
            return;
        }
        let rest: usize = chosen[k..].iter().map(|t| t.arity).sum();
        if from + rest > m {
            return;
        }
        for j in from..=m - rest {
            cur.push(j);
            rec(chosen, j + chosen[k].arity, m, cur, out);
            cur.pop();
        }
    }
    rec(chosen, j0, m, &mut cur, &mut out);
    out
}

/// `a_{from+1}…a_to` with `φ_k` applied at the given positions.
fn expand<F: Field>(
    slots: &[Letter],
    chosen: &[&CochainTerm<F>],
    js: &[usize],
    from: usize,
    to: usize,
) -> Vec<(Vec<Letter>, F)> {
    let mut partial: Vec<(Vec<Letter>, F)> = vec![(Vec::new(), F::one())];
    let mut cursor = from;
    for (t, &j) in chosen.iter().zip(js) {
        for x in &mut partial {
            x.0.extend_from_slice(&slots[cursor..j]);
        }
        let vals = (t.eval)(&slots[j..j + t.arity]);
        let mut next = Vec::with_capacity(partial.len() * vals.len());
        for (ws, c) in &partial {
            for (l, v) in &vals {
                let mut w = ws.clone();
                w.push(*l);
                next.push((w, c.clone() * v.clone()));
            }
        }
        partial = next;
        cursor = j + t.arity;
    }
    for x in &mut partial {
        x.0.extend_from_slice(&slots[cursor..to]);
    }
    partial
}

/// Runs `f` on every choice of one term per cochain within the budget.
fn for_each_choice<F: Field>(
    phis: &[Cochain<F>],
    budget: u32,
    mut f: impl FnMut(&[&CochainTerm<F>], DefMono, F),
) {
    if phis.iter().any(|p| p.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; phis.len()];
    loop {
        let chosen: Vec<&CochainTerm<F>> = idx.iter().zip(phis).map(|(&i, p)| &p.terms()[i]).collect();
        let def = chosen.iter().fold(DefMono::ONE, |d, t| d.mul(&t.def));
        if def.degree() <= budget {
            let coeff = chosen.iter().fold(F::one(), |c, t| c * t.coeff.clone());
            f(&chosen, def, coeff);
        }
        let mut k = phis.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < phis[k].terms().len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Extends a word-level operator, multiplying deformation monomials.
pub(crate) fn lift<F: Field>(c: &Chain<F>, mut f: impl FnMut(&Word, u32) -> Out<F>) -> Chain<F> {
    let k_max = c.k_max();
    c.apply_with_def(|w, d| {
        let budget = k_max.saturating_sub(d.degree());
        f(w, budget).into_iter().map(move |(m, w, v)| (d.mul(&m), w, v)).collect::<Vec<_>>()
    })
}
