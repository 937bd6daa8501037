//! Reduced bar chains `m₀g₀[m₁|…|m_p]` with coefficients in the truncated
//! deformation ring, stored flat as `(word, deformation monomial) ↦ scalar`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::defscalar::{DefMono, DefRing, DefScalar};
use crate::error::{Error, Result};
use crate::group::{GroupElt, IDENTITY};
use crate::poly::Mono;
use crate::scalar::Field;

/// Basis element `x^γ · g` of `A[G]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub mono: Mono,
    pub g: GroupElt,
}

impl Letter {
    pub const UNIT: Letter = Letter { mono: Mono::ONE, g: IDENTITY };

    pub fn new(mono: Mono, g: GroupElt) -> Self {
        Letter { mono, g }
    }

    pub fn plain(mono: Mono) -> Self {
        Letter { mono, g: IDENTITY }
    }

    pub fn is_unit(&self) -> bool {
        *self == Self::UNIT
    }
}

pub type Slots = SmallVec<[Letter; 6]>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub head: Letter,
    pub slots: Slots,
}

impl Word {
    pub fn new(head: Letter, slots: impl IntoIterator<Item = Letter>) -> Self {
        Word { head, slots: slots.into_iter().collect() }
    }

    /// A twisted word: group element only on the coefficient.
    pub fn twisted(m0: Mono, g0: GroupElt, slots: &[Mono]) -> Self {
        Word::new(Letter::new(m0, g0), slots.iter().map(|m| Letter::plain(*m)))
    }

    pub fn degree(&self) -> usize {
        self.slots.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.slots.iter().any(Letter::is_unit)
    }

    pub fn is_group_free(&self) -> bool {
        self.slots.iter().all(|l| l.g == IDENTITY)
    }

    /// Product of all monomials in the word.
    pub fn total_mono(&self) -> Mono {
        self.slots.iter().fold(self.head.mono, |acc, l| acc.mul(l.mono))
    }
}

/// Sort key: tensor degree first, then word, then deformation monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub word: Word,
    pub def: DefMono,
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.word
            .degree()
            .cmp(&other.word.degree())
            .then_with(|| self.word.cmp(&other.word))
            .then_with(|| self.def.cmp(&other.def))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Finite linear combination of reduced words.
#[derive(Clone, PartialEq)]
pub struct Chain<F> {
    k_max: u32,
    terms: BTreeMap<Term, F>,
}

impl<F: Field> Chain<F> {
    pub fn zero(k_max: u32) -> Self {
        Chain { k_max, terms: BTreeMap::new() }
    }

    pub fn from_word(k_max: u32, word: Word, c: F) -> Self {
        let mut ch = Self::zero(k_max);
        ch.add_term(DefMono::ONE, word, c);
        ch
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &DefMono, &F)> {
        self.terms.iter().map(|(t, c)| (&t.word, &t.def, c))
    }

    pub fn coeff(&self, word: &Word, def: &DefMono) -> F {
        let key = Term { word: word.clone(), def: *def };
        self.terms.get(&key).cloned().unwrap_or_else(F::zero)
    }

    /// Adds `c · def · word`. Degenerate words and parameter orders above
    /// `k_max` are dropped.
    pub fn add_term(&mut self, def: DefMono, word: Word, c: F) {
        if c.is_zero() || word.is_degenerate() || def.degree() > self.k_max {
            return;
        }
        let key = Term { word, def };
        match self.terms.get_mut(&key) {
            Some(e) => {
                *e = e.clone() + c;
                if e.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add_assign(&mut self, other: &Chain<F>) {
        for (t, c) in &other.terms {
            self.add_term(t.def, t.word.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Chain<F>) -> Chain<F> {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Chain<F>) -> Chain<F> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Chain<F> {
        self.scale(&-F::one())
    }

    pub fn scale(&self, c: &F) -> Chain<F> {
        if c.is_zero() {
            return Chain::zero(self.k_max);
        }
        Chain {
            k_max: self.k_max,
            terms: self.terms.iter().map(|(t, a)| (t.clone(), a.clone() * c.clone())).collect(),
        }
    }

    /// Multiplies by `c · m`, truncating parameter orders above `k_max`.
    pub fn scale_mono(&self, m: &DefMono, c: &F) -> Chain<F> {
        let mut out = Chain::zero(self.k_max);
        for (t, a) in &self.terms {
            out.add_term(t.def.mul(m), t.word.clone(), a.clone() * c.clone());
        }
        out
    }

    /// Multiplies by a deformation scalar.
    pub fn scale_def(&self, s: &DefScalar<F>) -> Chain<F> {
        let mut out = Chain::zero(self.k_max);
        for (m, c) in s.terms() {
            out.add_assign(&self.scale_mono(m, c));
        }
        out
    }

    /// Extends a word-level linear map.
    pub fn apply<I>(&self, mut f: impl FnMut(&Word) -> I) -> Chain<F>
    where
        I: IntoIterator<Item = (Word, F)>,
    {
        let mut out = Chain::zero(self.k_max);
        for (t, c) in &self.terms {
            for (w, a) in f(&t.word) {
                out.add_term(t.def, w, c.clone() * a);
            }
        }
        out
    }

    /// Extends a map that may also change the deformation monomial.
    pub fn apply_with_def<I>(&self, mut f: impl FnMut(&Word, &DefMono) -> I) -> Chain<F>
    where
        I: IntoIterator<Item = (DefMono, Word, F)>,
    {
        let mut out = Chain::zero(self.k_max);
        for (t, c) in &self.terms {
            for (d, w, a) in f(&t.word, &t.def) {
                out.add_term(d, w, c.clone() * a);
            }
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&Word, &DefMono) -> bool) -> Chain<F> {
        Chain {
            k_max: self.k_max,
            terms: self
                .terms
                .iter()
                .filter(|(t, _)| keep(&t.word, &t.def))
                .map(|(t, c)| (t.clone(), c.clone()))
                .collect(),
        }
    }

    /// Components of tensor degree `≤ d`.
    pub fn truncate_degree(&self, d: usize) -> Chain<F> {
        self.filter(|w, _| w.degree() <= d)
    }

    /// Components with `u`-exponent in `[-u_max, u_max]`.
    pub fn truncate_u(&self, u_max: i32) -> Chain<F> {
        self.filter(|_, m| (m.u as i32).abs() <= u_max)
    }

    pub fn degree_part(&self, d: usize) -> Chain<F> {
        self.filter(|w, _| w.degree() == d)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|t| t.word.degree()).max()
    }

    /// `∂/∂p_j` applied to the coefficients.
    pub fn derivative(&self, j: usize) -> Chain<F> {
        let mut out = Chain::zero(self.k_max);
        for (t, c) in &self.terms {
            if let Some((e, m)) = t.def.derivative(j) {
                out.add_term(m, t.word.clone(), c.clone() * F::from_i64(e as i64));
            }
        }
        out
    }

    /// Collects the coefficient of every word as a deformation scalar.
    pub fn by_word(&self, ring: DefRing) -> Result<BTreeMap<Word, DefScalar<F>>> {
        let mut out: BTreeMap<Word, DefScalar<F>> = BTreeMap::new();
        for (t, c) in &self.terms {
            out.entry(t.word.clone())
                .or_insert_with(|| DefScalar::zero(ring))
                .add_term(t.def, c.clone())?;
        }
        Ok(out)
    }

    /// The base-point part (deformation monomial `1`).
    pub fn constant_part(&self) -> Chain<F> {
        self.filter(|_, m| m.is_one())
    }

    pub fn with_k_max(&self, k_max: u32) -> Chain<F> {
        let mut out = Chain::zero(k_max);
        out.add_assign(self);
        out
    }
}

impl<F: Field> fmt::Debug for Chain<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Notation::generic(8, 0);
        write!(f, "{}", names.chain(self))
    }
}

/// Names used by the canonical text form `coeff * m0.g0[m1|m2|...]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Notation {
    pub vars: [String; 2],
    pub groups: Vec<String>,
    pub params: Vec<String>,
}

impl Notation {
    fn generic(n_groups: usize, n_params: usize) -> Self {
        Notation {
            vars: ["x".into(), "y".into()],
            groups: (0..n_groups).map(|i| if i == 0 { "e".into() } else { format!("g{}", i) }).collect(),
            params: (0..n_params).map(|j| format!("p{}", j)).collect(),
        }
    }

    pub fn letter(&self, l: &Letter) -> String {
        format!("{}.{}", l.mono.fmt_with(&self.vars), self.groups[l.g as usize])
    }

    fn slot(&self, l: &Letter) -> String {
        if l.g == IDENTITY {
            l.mono.fmt_with(&self.vars)
        } else {
            self.letter(l)
        }
    }

    pub fn word(&self, w: &Word) -> String {
        let slots: Vec<String> = w.slots.iter().map(|l| self.slot(l)).collect();
        format!("{}[{}]", self.letter(&w.head), slots.join("|"))
    }

    pub fn term<F: Field>(&self, w: &Word, def: &DefMono, c: &F) -> String {
        if def.is_one() {
            format!("{} * {}", c, self.word(w))
        } else {
            format!("{}*{} * {}", c, def.fmt_with(&self.params), self.word(w))
        }
    }

    /// One term per line, canonical order.
    pub fn chain<F: Field>(&self, ch: &Chain<F>) -> String {
        if ch.is_zero() {
            return "0".to_string();
        }
        ch.iter().map(|(w, d, c)| self.term(w, d, c)).collect::<Vec<_>>().join("\n")
    }

    fn parse_letter(&self, s: &str, default_group: bool) -> Result<Letter> {
        let bad = || Error::Parse(format!("bad letter `{}`", s));
        let (m, g) = match s.rsplit_once('.') {
            Some((m, g)) => (m, Some(g)),
            None if default_group => (s, None),
            None => return Err(bad()),
        };
        let mono = Mono::parse_with(m, &self.vars).ok_or_else(bad)?;
        let g = match g {
            Some(g) => self.groups.iter().position(|n| n == g.trim()).ok_or_else(bad)? as GroupElt,
            None => IDENTITY,
        };
        Ok(Letter { mono, g })
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let bad = || Error::Parse(format!("bad word `{}`", s));
        let s = s.trim();
        let (head, rest) = s.split_once('[').ok_or_else(bad)?;
        let inner = rest.strip_suffix(']').ok_or_else(bad)?;
        let head = self.parse_letter(head.trim(), false)?;
        let slots = if inner.trim().is_empty() {
            Slots::new()
        } else {
            inner.split('|').map(|x| self.parse_letter(x.trim(), true)).collect::<Result<_>>()?
        };
        Ok(Word { head, slots })
    }

    pub fn parse_chain<F: Field>(&self, text: &str, k_max: u32) -> Result<Chain<F>> {
        let mut ch = Chain::zero(k_max);
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && *l != "0") {
            let (coeff, word) = line
                .rsplit_once(" * ")
                .ok_or_else(|| Error::Parse(format!("bad term `{}`", line)))?;
            let (scalar, def) = match coeff.split_once('*') {
                Some((s, d)) => (s, DefMono::parse_with(d, &self.params)),
                None => (coeff, Some(DefMono::ONE)),
            };
            let c = F::parse_canonical(scalar).ok_or_else(|| Error::Parse(format!("bad scalar `{}`", scalar)))?;
            let def = def.ok_or_else(|| Error::Parse(format!("bad monomial in `{}`", coeff)))?;
            ch.add_term(def, self.parse_word(word)?, c);
        }
        Ok(ch)
    }
}
