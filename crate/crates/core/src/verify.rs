//! The verification pipeline: property checks, cohomology ranks, the
//! Kodaira–Spencer check, connection matrices, and report emission.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bar::{bar_differential, connes_b};
use crate::chain::{Chain, Letter, Word};
use crate::cochain::{input_tuples, mc_residual, small_monos, Cochain};
use crate::connection::{lambda_compare, Connection, ConnectionMatrix, Entry, LambdaVerdict, Window};
use crate::defscalar::{DefMono, DefScalar};
use crate::error::{Error, Result};
use crate::group::IDENTITY;
use crate::koszul::{KBasis, KChain, Koszul};
use crate::linalg::{homology_rank, Matrix};
use crate::model::{Caps, Model, ModelKind, ModelSpec};
use crate::perturbation::{compare, window, Closed, Verdict};
use crate::poly::{monomials_up_to, Mono};
use crate::retract::Retraction;
use crate::scalar::Field;

pub const ENGINE: &str = concat!("ggm-core ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ModBoundary,
    /// The caps are too small to decide.
    Undecided,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::ModBoundary => "mod-boundary",
            Status::Undecided => "undecided",
        }
    }

    fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub mandatory: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, status: Status, detail: impl Into<String>) -> Check {
        Check { name: name.into(), status, mandatory: true, detail: detail.into() }
    }

    fn informational(mut self) -> Check {
        self.mandatory = false;
        self
    }
}

/// What was run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSpec {
    pub command: String,
    pub models: Vec<ModelKind>,
    pub n: u16,
    pub caps: Caps,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub engine: String,
    pub spec: RunSpec,
    pub checks: Vec<Check>,
    /// Row and column labels of the matrices, per model.
    pub labels: BTreeMap<String, Vec<String>>,
    pub matrices: BTreeMap<String, Vec<Vec<String>>>,
    pub representatives: BTreeMap<String, String>,
    /// Milliseconds per stage; empty unless requested.
    pub timings: BTreeMap<String, u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Markdown),
            other => Err(Error::Parse(format!("unknown format `{}`", other))),
        }
    }
}

impl Report {
    fn new(spec: RunSpec) -> Report {
        Report {
            engine: ENGINE.into(),
            spec,
            checks: Vec::new(),
            labels: BTreeMap::new(),
            matrices: BTreeMap::new(),
            representatives: BTreeMap::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// 0 if every mandatory check passes, 2 on a failed check, 3 if the
    /// caps were insufficient.
    pub fn exit_code(&self) -> i32 {
        let mandatory = || self.checks.iter().filter(|c| c.mandatory);
        if mandatory().any(|c| c.status == Status::Fail) {
            2
        } else if mandatory().any(|c| c.status == Status::Undecided) {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let s = &self.spec;
        let models: Vec<&str> = s.models.iter().map(|m| m.name()).collect();
        let _ = writeln!(out, "# {} report\n", s.command);
        let _ = writeln!(out, "- engine: {}", self.engine);
        let _ = writeln!(out, "- models: {}", models.join(", "));
        let _ = writeln!(out, "- n: {}", s.n);
        let _ = writeln!(
            out,
            "- caps: order {}, u-window {}, tensor cap {}, weight cap {}",
            s.caps.k_max, s.caps.u_max, s.caps.tensor_cap, s.caps.weight_cap
        );
        let _ = writeln!(out, "- seed: {}\n", s.seed);
        let _ = writeln!(out, "## Checks\n");
        let _ = writeln!(out, "| check | status | mandatory | detail |");
        let _ = writeln!(out, "|---|---|---|---|");
        for c in &self.checks {
            let _ = writeln!(out, "| {} | {} | {} | {} |", c.name, c.status.name(), c.mandatory, c.detail.replace('|', "\\|"));
        }
        if !self.matrices.is_empty() {
            let _ = writeln!(out, "\n## Connection matrices");
        }
        for (key, rows) in &self.matrices {
            let model = key.split(':').next().unwrap_or_default();
            let labels = self.labels.get(model).cloned().unwrap_or_default();
            let _ = writeln!(out, "\n### {}\n", key);
            let _ = writeln!(out, "| | {} |", labels.join(" | "));
            let _ = writeln!(out, "|---|{}", "---|".repeat(labels.len()));
            for (label, row) in labels.iter().zip(rows) {
                let _ = writeln!(out, "| {} | {} |", label, row.join(" | "));
            }
        }
        if !self.representatives.is_empty() {
            let _ = writeln!(out, "\n## Representatives");
        }
        for (label, text) in &self.representatives {
            let _ = writeln!(out, "\n### {}\n\n```\n{}\n```", label, text);
        }
        if !self.timings.is_empty() {
            let _ = writeln!(out, "\n## Timings (ms)\n");
            for (stage, ms) in &self.timings {
                let _ = writeln!(out, "- {}: {}", stage, ms);
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Markdown => self.to_markdown(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Random chains for the mixed-complex identities.
    pub mixed_samples: usize,
    /// Random chains for the `Ψ_*`, `Γ_*` compatibilities.
    pub compat_samples: usize,
    /// Random chains for the retraction side conditions.
    pub sdr_samples: usize,
    /// Rerun with a larger `u`-window and tensor cap and compare.
    pub stabilize: bool,
    pub timings: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { mixed_samples: 200, compat_samples: 100, sdr_samples: 24, stabilize: true, timings: false }
    }
}

struct Clock {
    enabled: bool,
    laps: BTreeMap<String, u64>,
}

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.laps.insert(stage.into(), start.elapsed().as_millis() as u64);
        }
        out
    }
}

// ---------------------------------------------------------------- samples

fn coefficient<F: Field>(rng: &mut ChaCha8Rng) -> F {
    let v = rng.gen_range(1..=3i64);
    F::from_i64(if rng.gen_bool(0.5) { v } else { -v })
}

fn def_mono(rng: &mut ChaCha8Rng, n_params: usize, order: u32) -> DefMono {
    let mut m = DefMono::ONE;
    for _ in 0..rng.gen_range(0..=order.min(2)) {
        m = m.mul(&DefMono::param(rng.gen_range(0..n_params)));
    }
    m
}

/// Random reduced, invariant twisted chains with up to three terms of
/// tensor degree `≤ max_degree` and parameter order `≤ order`.
pub fn random_twisted_chains<F: Field>(
    model: &Model<F>,
    count: usize,
    max_degree: usize,
    order: u32,
    rng: &mut ChaCha8Rng,
) -> Vec<Chain<F>> {
    let monos = small_monos(2);
    let sectors: Vec<u8> = model.group.elements().collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut c = Chain::zero(order);
        for _ in 0..rng.gen_range(1..=3) {
            let head = Mono::new(rng.gen_range(0..=3), rng.gen_range(0..=2));
            let g = sectors[rng.gen_range(0..sectors.len())];
            let slots: Vec<Mono> = (0..rng.gen_range(0..=max_degree)).map(|_| monos[rng.gen_range(0..monos.len())]).collect();
            let d = def_mono(rng, model.n_params(), order);
            c.add_term(d, Word::twisted(head, g, &slots), coefficient(rng));
        }
        let c = model.twisted.pi(&c);
        if !c.is_zero() {
            out.push(c);
        }
    }
    out
}

/// Random reduced chains of `A[G]` (letters carry group elements).
pub fn random_smash_chains<F: Field>(
    model: &Model<F>,
    count: usize,
    max_degree: usize,
    order: u32,
    rng: &mut ChaCha8Rng,
) -> Vec<Chain<F>> {
    let monos = small_monos(2);
    let sectors: Vec<u8> = model.group.elements().collect();
    let letter = |rng: &mut ChaCha8Rng| {
        let g = sectors[rng.gen_range(0..sectors.len())];
        let m = if g != IDENTITY && rng.gen_bool(0.3) { Mono::ONE } else { monos[rng.gen_range(0..monos.len())] };
        Letter::new(m, g)
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut c = Chain::zero(order);
        for _ in 0..rng.gen_range(1..=3) {
            let head = Letter::new(
                Mono::new(rng.gen_range(0..=2), rng.gen_range(0..=2)),
                sectors[rng.gen_range(0..sectors.len())],
            );
            let slots: Vec<Letter> = (0..rng.gen_range(0..=max_degree)).map(|_| letter(rng)).collect();
            let d = def_mono(rng, model.n_params(), order);
            c.add_term(d, Word::new(head, slots), coefficient(rng));
        }
        if !c.is_zero() {
            out.push(c);
        }
    }
    out
}

/// Invariant forms `x^γ dx_I` on every fixed locus with `wt(x^γ) ≤ max_weight`.
pub fn invariant_forms<F: Field>(r: &Retraction<F>, max_weight: u32) -> Vec<KBasis> {
    let kz = Koszul::new(&r.model.group);
    let mut out = Vec::new();
    for g in r.model.group.elements() {
        let top = r.forms.top_mask(g);
        let active = [top & 1 != 0, top & 2 != 0];
        for m in monomials_up_to(&r.model.scheme, active, Rational64::from(max_weight as i64)) {
            for mask in 0..4u8 {
                let b = KBasis::new(m, g, mask);
                if mask & !top == 0 && r.forms.is_form(&b) && kz.is_invariant(&b) {
                    out.push(b);
                }
            }
        }
    }
    out.sort();
    out
}

/// Every invariant reduced twisted word with `wt ≤ max_weight` and tensor
/// degree `≤ max_degree`.
pub fn twisted_words<F: Field>(model: &Model<F>, max_weight: u32, max_degree: usize) -> Vec<Word> {
    let scheme = &model.scheme;
    let cap = Rational64::from(max_weight as i64);
    let monos = monomials_up_to(scheme, [true, true], cap);
    let slots: Vec<Mono> = monos.iter().copied().filter(|m| *m != Mono::ONE).collect();
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<Mono>, Rational64)> = vec![(Vec::new(), Rational64::from(0))];
    while let Some((prefix, w)) = stack.pop() {
        for g in model.group.elements() {
            for &h in monos.iter().filter(|h| w + scheme.mono(**h) <= cap) {
                let word = Word::twisted(h, g, &prefix);
                if model.twisted.is_invariant(&word) {
                    out.push(word);
                }
            }
        }
        if prefix.len() < max_degree {
            for &m in slots.iter().filter(|m| w + scheme.mono(**m) <= cap) {
                let mut next = prefix.clone();
                next.push(m);
                stack.push((next, w + scheme.mono(m)));
            }
        }
    }
    out.sort();
    out
}

/// Every invariant Koszul basis element `x^γ g e_I` with `wt(x^γ) ≤ max_weight`.
pub fn koszul_basis<F: Field>(model: &Model<F>, max_weight: u32) -> Vec<KBasis> {
    let kz = Koszul::new(&model.group);
    let mut out = Vec::new();
    for m in monomials_up_to(&model.scheme, [true, true], Rational64::from(max_weight as i64)) {
        for g in model.group.elements() {
            for mask in 0..4u8 {
                let b = KBasis::new(m, g, mask);
                if kz.is_invariant(&b) {
                    out.push(b);
                }
            }
        }
    }
    out
}

/// The side conditions of `(C, ∂̃_{b₂}) ⇄ (K, ∂_K)`, `(K, ∂_K) ⇄ (Ω, 0)`,
/// their composite, and `(Ω, dW∧) ⇄ (Jac, 0)` on every basis element of
/// every graded piece within the bounds.
pub fn exhaustive_sdr_check<F: Field>(r: &Retraction<F>, max_weight: u32, max_degree: usize) -> Check {
    let model = &r.model;
    let one = |w: &Word| Chain::from_word(0, w.clone(), F::one());
    let words: Vec<Chain<F>> = twisted_words(model, max_weight, max_degree).iter().map(one).collect();
    let kbasis: Vec<KChain<F>> = koszul_basis(model, max_weight).into_iter().map(|b| KChain::from_basis(0, b, F::one())).collect();
    let forms: Vec<KChain<F>> = invariant_forms(r, max_weight).into_iter().map(|b| KChain::from_basis(0, b, F::one())).collect();
    let classes: Vec<KChain<F>> = model.labels.iter().map(|l| r.label_class(l).constant_part()).collect();
    let kchains: Vec<KChain<F>> = kbasis.clone();
    let id_c = |c: &Chain<F>| c.clone();
    let id_k = |k: &KChain<F>| k.clone();
    let results = [
        crate::retract::bar_koszul_sdr(r.bar_koszul.clone()).check("bar-koszul", &words, &kchains, &id_c),
        crate::retract::koszul_forms_sdr(model.group.clone()).check("koszul-forms", &kbasis, &forms, &id_k),
        r.koszul_stage.check("composed", &words, &forms, &id_c),
        r.forms_stage.check("forms-jacobian", &forms, &classes, &id_k),
    ];
    for res in results {
        if let Err(e) = res {
            return Check::new("sdr-exhaustive", Status::Fail, e.to_string());
        }
    }
    Check::new(
        "sdr-exhaustive",
        Status::Pass,
        format!("{} words, {} Koszul chains, {} forms (weight ≤ {}, degree ≤ {})", words.len(), kbasis.len(), forms.len(), max_weight, max_degree),
    )
}

// ----------------------------------------------------------------- checks

/// `∂̃² = 0`, `∂̃B̃ + B̃∂̃ = 0`, `B̃² = 0` for the deformed structure.
pub fn mixed_complex_check<F: Field>(model: &Model<F>, chains: &[Chain<F>]) -> Check {
    mixed_complex_with(model, &model.full_structure(), chains)
}

pub fn mixed_complex_with<F: Field>(model: &Model<F>, b: &Cochain<F>, chains: &[Chain<F>]) -> Check {
    let d = |c: &Chain<F>| model.twisted.differential(b, c);
    let bb = |c: &Chain<F>| model.twisted.connes(c);
    for (i, c) in chains.iter().enumerate() {
        let (dc, bc) = (d(c), bb(c));
        let failures = [
            ("∂̃²", d(&dc)),
            ("∂̃B̃ + B̃∂̃", d(&bc).add(&bb(&dc))),
            ("B̃²", bb(&bc)),
        ];
        for (name, v) in failures {
            if !v.is_zero() {
                return Check::new("mixed-complex", Status::Fail, format!("{} ≠ 0 on sample {}", name, i));
            }
        }
    }
    Check::new("mixed-complex", Status::Pass, format!("{} random chains, order {}", chains.len(), model.k_max()))
}

/// `Ψ_*∘Γ_* = id`, `∂̃∘Ψ_* = Ψ_*∘∂` and `B̃∘Ψ_* = Ψ_*∘B`.
pub fn compatibility_check<F: Field>(model: &Model<F>, twisted: &[Chain<F>], smash: &[Chain<F>]) -> Check {
    let t = &model.twisted;
    let b = model.full_structure();
    let fail = |what: &str, i: usize| Check::new("psi-gamma", Status::Fail, format!("{} fails on sample {}", what, i));
    for (i, c) in twisted.iter().enumerate() {
        if t.psi(&t.gamma(c)) != *c {
            return fail("Ψ_*∘Γ_* = id", i);
        }
    }
    for (i, c) in smash.iter().enumerate() {
        let pc = t.psi(c);
        if t.differential(&b, &pc) != t.psi(&bar_differential(&b, c)) {
            return fail("∂̃∘Ψ_* = Ψ_*∘∂", i);
        }
        if t.connes(&pc) != t.psi(&connes_b(c)) {
            return fail("B̃∘Ψ_* = Ψ_*∘B", i);
        }
    }
    Check::new(
        "psi-gamma",
        Status::Pass,
        format!("{} twisted and {} smash-product chains", twisted.len(), smash.len()),
    )
}

/// `δ_b(b(τ,s) − b) + ½{b(τ,s) − b, b(τ,s) − b} = 0` on all inputs of arity
/// `≤ 3` built from monomials of degree `≤ 3`.
pub fn maurer_cartan_check<F: Field>(model: &Model<F>) -> Check {
    let r = mc_residual(&model.base_structure(), &model.deformation());
    let letters: Vec<Letter> = small_monos(3)
        .into_iter()
        .flat_map(|m| model.group.elements().map(move |g| Letter::new(m, g)))
        .collect();
    for arity in 0..=3 {
        let inputs = input_tuples(&letters, arity);
        if let Some((args, v)) = r.find_nonzero(&inputs, model.k_max()) {
            let args: Vec<String> = args.iter().map(|l| model.notation.letter(l)).collect();
            return Check::new(
                "maurer-cartan",
                Status::Fail,
                format!("residual on [{}] has {} terms", args.join("|"), v.len()),
            );
        }
    }
    Check::new("maurer-cartan", Status::Pass, format!("arity ≤ 3, order {}", model.k_max()))
}

/// The side conditions of the Koszul stage, the forms stage, the composed
/// retraction and the deformed retraction.
pub fn sdr_check<F: Field>(r: &Retraction<F>, big: &[Chain<F>], forms: &[KBasis]) -> Check {
    let view = r.exact_view();
    let k = r.caps.k_max;
    let base_big: Vec<Chain<F>> = big.iter().map(|c| c.constant_part()).filter(|c| !c.is_zero()).collect();
    let small: Vec<KChain<F>> = r.model.labels.iter().map(|l| r.label_class(l)).collect();
    let form_chains: Vec<KChain<F>> = forms.iter().map(|b| KChain::from_basis(k, *b, F::one())).collect();
    let results = [
        r.koszul_stage.check("bar-koszul", &base_big, &[], &*view),
        r.forms_stage.check("koszul-forms", &form_chains, &small, &|x: &KChain<F>| x.clone()),
        r.base.check("composed", &base_big, &small, &*view),
        r.deformed.check("deformed", big, &small, &*view),
    ];
    for res in results {
        if let Err(e) = res {
            return Check::new("sdr-side-conditions", Status::Fail, e.to_string());
        }
    }
    Check::new(
        "sdr-side-conditions",
        Status::Pass,
        format!("{} chains, {} forms, {} classes", big.len(), forms.len(), small.len()),
    )
}

/// The differential induced by the curvature perturbation is exactly `dW_g∧`.
pub fn induced_differential_check<F: Field>(r: &Retraction<F>, forms: &[KBasis]) -> Check {
    for b in forms {
        let f = KChain::from_basis(0, *b, F::one());
        if (r.curved_stage.d_small)(&f) != r.forms.dw(&f) {
            return Check::new("induced-differential", Status::Fail, format!("differs on {:?}", b));
        }
    }
    Check::new("induced-differential", Status::Pass, format!("{} invariant forms", forms.len()))
}

/// Homology of `(Ω^G, dW∧)` in one graded piece of one sector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PieceRank {
    pub sector: String,
    pub grading: String,
    pub even: usize,
    pub odd: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankTable {
    /// Pieces with nonzero homology.
    pub pieces: Vec<PieceRank>,
    pub even: usize,
    pub odd: usize,
    /// `(even, odd)` per sector.
    pub sectors: BTreeMap<String, (usize, usize)>,
    /// Jacobian classes whose piece lies beyond the weight cap.
    pub beyond_cap: Vec<String>,
}

/// Ranks per `ℤ₂`-degree and weight piece of the invariant forms complex,
/// which the retraction identifies with the Hochschild homology.
pub fn cohomology_ranks<F: Field>(r: &Retraction<F>) -> RankTable {
    let model = &r.model;
    let kz = Koszul::new(&model.group);
    let cap = Rational64::from(model.spec.caps.weight_cap as i64);
    let d = model.half_degree() * Rational64::from(2);
    let mut table = RankTable { pieces: Vec::new(), even: 0, odd: 0, sectors: BTreeMap::new(), beyond_cap: Vec::new() };
    for g in model.group.elements() {
        let name = model.group.name(g).to_string();
        let top = r.forms.top_mask(g);
        let top_deg = top.count_ones() as usize;
        let lift = (0..2).filter(|i| top & (1 << i) != 0).fold(Rational64::from(0), |acc, i| acc + d - model.scheme.vars[i]);
        let gradings: BTreeSet<Rational64> = invariant_forms(r, model.spec.caps.weight_cap)
            .iter()
            .filter(|b| b.g == g)
            .map(|b| r.forms.grading(b))
            .filter(|t| *t + lift <= cap)
            .collect();
        let shift = model.sector(g).shift() as usize;
        let entry = table.sectors.entry(name.clone()).or_insert((0, 0));
        for t in gradings {
            let bases: Vec<Vec<KBasis>> = (0..=top_deg)
                .map(|q| r.forms.piece_basis(g, t, q).into_iter().filter(|b| kz.is_invariant(b)).collect())
                .collect();
            let maps: Vec<Matrix<F>> = (0..top_deg).map(|q| r.forms.dw_matrix(&bases[q], &bases[q + 1])).collect();
            let (mut even, mut odd) = (0, 0);
            for q in 0..=top_deg {
                let incoming = if q > 0 { maps.get(q - 1) } else { None };
                let rank = homology_rank(bases[q].len(), incoming, maps.get(q));
                if (q + shift).is_multiple_of(2) {
                    even += rank;
                } else {
                    odd += rank;
                }
            }
            if even + odd > 0 {
                table.pieces.push(PieceRank { sector: name.clone(), grading: t.to_string(), even, odd });
                entry.0 += even;
                entry.1 += odd;
                table.even += even;
                table.odd += odd;
            }
        }
        let sj = model.sector(g);
        for m in &sj.invariant_basis {
            if model.scheme.mono(*m) > cap {
                table.beyond_cap.push(format!("{}·{}", m.fmt_with(&model.notation.vars), name));
            }
        }
    }
    table
}

/// Odd ranks vanish and every sector matches its invariant Jacobian.
pub fn cohomology_parity_check<F: Field>(r: &Retraction<F>) -> (Check, RankTable) {
    let table = cohomology_ranks(r);
    let model = &r.model;
    let expected = model.labels.len();
    let mut ok = table.odd == 0 && table.even == expected;
    for g in model.group.elements() {
        let want = model.sector(g).invariant_basis.len();
        let got = table.sectors.get(model.group.name(g)).map_or(0, |s| s.0);
        ok &= got == want;
    }
    let untwisted = table.sectors.get(model.group.name(IDENTITY)).map_or(0, |s| s.0);
    let detail = format!("even {}, odd {}, untwisted {}, expected total {}", table.even, table.odd, untwisted, expected);
    let status = if !table.beyond_cap.is_empty() {
        Status::Undecided
    } else {
        Status::from_bool(ok)
    };
    let detail = if table.beyond_cap.is_empty() {
        detail
    } else {
        format!("{}; beyond weight cap: {}", detail, table.beyond_cap.join(", "))
    };
    (Check::new("cohomology-parity", status, detail), table)
}

fn unit_label<F: Field>(model: &Model<F>) -> usize {
    model.labels.iter().position(|l| l.g == IDENTITY && l.mono == Mono::ONE).expect("unit class")
}

/// Kodaira–Spencer images `v ↦ [v(b)]` in the label basis, read off from
/// the `u⁻¹` part of `∇_v` on the unit class at the base point.
pub fn kodaira_spencer<F: Field>(model: &Model<F>, mats: &[ConnectionMatrix<F>]) -> Vec<Vec<F>> {
    let c0 = unit_label(model);
    let key = DefMono::u_pow(-1);
    mats.iter().map(|m| (0..m.size()).map(|r| -m.entry(r, c0).coeff(&key)).collect()).collect()
}

pub fn kodaira_spencer_check<F: Field>(model: &Model<F>, mats: &[ConnectionMatrix<F>]) -> Check {
    let images = kodaira_spencer(model, mats);
    let n = model.n_params();
    let rank = Matrix::from_rows(images.clone()).rank();
    let mut rows = BTreeSet::new();
    let mut distinct = true;
    for v in &images {
        let support: Vec<usize> = (0..v.len()).filter(|&r| !v[r].is_zero()).collect();
        distinct &= support.len() == 1 && rows.insert(support[0]);
    }
    let zero = Matrix::from_rows(images.clone()).transpose().apply(&vec![F::zero(); n]);
    let zero_ok = zero.iter().all(|c| c.is_zero());
    let labels = model.plain_label_names();
    let shown: Vec<String> = images
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let terms: Vec<String> =
                v.iter().zip(&labels).filter(|(c, _)| !c.is_zero()).map(|(c, l)| format!("{}·{}", c, l)).collect();
            format!("{} ↦ {}", model.params[j], if terms.is_empty() { "0".into() } else { terms.join(" + ") })
        })
        .collect();
    Check::new(
        "kodaira-spencer",
        Status::from_bool(rank == n && distinct && zero_ok && rank == model.labels.len()),
        format!("rank {}; {}", rank, shown.join(", ")),
    )
}

/// The closed form of `M_{∂/∂s}`: column `β` is `(1/u)Σ_j jτ_j` at rows
/// `α_{2j−2}` (`τ_n = 1`), column `α₀` is `−1/u` at `β`, and column
/// `α_{2k}` is `−s/(2u)` at `α_{2k−2}`.
pub fn expected_s_matrix<F: Field>(conn: &Connection<F>) -> Result<Vec<Vec<Entry<F>>>> {
    let model = &conn.retraction.model;
    let n = model.spec.n as usize;
    let s = model.param_index("s")?;
    let names = model.plain_label_names();
    let idx = |name: &str| names.iter().position(|l| l == name).ok_or_else(|| Error::InvalidSpec(format!("no label {}", name)));
    let ring = conn.ring();
    let mut m = vec![vec![DefScalar::zero(ring); names.len()]; names.len()];
    let inv_u = DefMono::u_pow(-1);
    let beta = idx("beta")?;
    for j in 1..=n {
        let tau = if j == n { DefMono::ONE } else { DefMono::param(j) };
        m[idx(&format!("alpha_{}", 2 * j - 2))?][beta].add_term(tau.mul(&inv_u), F::from_i64(j as i64))?;
    }
    m[beta][idx("alpha_0")?].add_term(inv_u, -F::one())?;
    for k in 1..n {
        let (r, c) = (idx(&format!("alpha_{}", 2 * k - 2))?, idx(&format!("alpha_{}", 2 * k))?);
        m[r][c].add_term(DefMono::param(s).mul(&inv_u), F::from_ratio(-1, 2))?;
    }
    Ok(m)
}

pub fn closed_matrix_check<F: Field>(conn: &Connection<F>, mats: &[ConnectionMatrix<F>]) -> Check {
    let model = &conn.retraction.model;
    let expected = match expected_s_matrix(conn) {
        Ok(e) => e,
        Err(e) => return Check::new("connection-closed-form", Status::Fail, e.to_string()),
    };
    let s = model.param_index("s").expect("s");
    let w = conn.window();
    let w = Window { order: w.order.min(2), u: w.u };
    let got = mats[s].restrict(w);
    let names = model.plain_label_names();
    for r in 0..got.size() {
        for c in 0..got.size() {
            let want = expected[r][c].filter(|m| w.contains(m));
            if *got.entry(r, c) != want {
                let vars = &model.params;
                return Check::new(
                    "connection-closed-form",
                    Status::Fail,
                    format!("d/ds at ({}, {}): {} vs {}", names[r], names[c], got.entry(r, c).fmt_with(vars), want.fmt_with(vars)),
                );
            }
        }
    }
    Check::new("connection-closed-form", Status::Pass, format!("d/ds through order {} and u ≤ {}", w.order, w.u))
}

pub fn weights_check<F: Field>(conn: &Connection<F>, mats: &[ConnectionMatrix<F>]) -> Check {
    let bad: Vec<String> =
        mats.iter().enumerate().filter(|(j, m)| !conn.weight_consistent(*j, m)).map(|(_, m)| m.direction.clone()).collect();
    if bad.is_empty() {
        Check::new("weights", Status::Pass, "every entry has the predicted weight")
    } else {
        Check::new("weights", Status::Fail, format!("inhomogeneous: {}", bad.join(", ")))
    }
}

pub fn flatness_check<F: Field>(conn: &Connection<F>, mats: &[ConnectionMatrix<F>]) -> Check {
    match conn.flatness(mats) {
        Ok(entries) => {
            let bad: Vec<String> =
                entries.iter().filter(|e| !e.flat).map(|e| format!("[{}, {}]", e.directions.0, e.directions.1)).collect();
            let w = conn.window().shrink();
            if bad.is_empty() {
                Check::new(
                    "flatness",
                    Status::Pass,
                    format!("{} pairs through order {} and u ≤ {}", entries.len(), w.order, w.u),
                )
            } else {
                Check::new("flatness", Status::Fail, format!("curvature on {}", bad.join(", ")))
            }
        }
        Err(e) => Check::new("flatness", Status::Fail, e.to_string()),
    }
}

/// Leading terms (mandatory) and the low-degree closed forms (informational).
pub fn representative_checks<F: Field>(conn: &Connection<F>) -> Vec<Check> {
    let r = &conn.retraction;
    let closed = Closed::new(&r.model);
    let (k, u) = (r.caps.k_max, r.caps.u_max);
    let mut bad = Vec::new();
    for rep in &conn.representatives {
        if rep.leading != closed.leading(&rep.label) {
            bad.push(rep.label.name.clone());
        }
    }
    let mut out = vec![if bad.is_empty() {
        Check::new("leading-terms", Status::Pass, format!("{} labels", conn.representatives.len()))
    } else {
        Check::new("leading-terms", Status::Fail, format!("differ: {}", bad.join(", ")))
    }];
    if r.model.spec.kind != ModelKind::Aorb {
        return out;
    }
    let status = |v: &Verdict| match v {
        Verdict::Equal => Status::Pass,
        Verdict::ModBoundary => Status::ModBoundary,
        Verdict::Mismatch => Status::Fail,
    };
    for rep in &conn.representatives {
        let part = |d: usize| window(&rep.chain.degree_part(d), k, u);
        if rep.label.g != IDENTITY {
            let b2 = compare(r, &part(2), &closed.beta2());
            out.push(Check::new("closed-form beta(2)", status(&b2.verdict), b2.verdict.name()));
            let b4 = compare(r, &part(4), &window(&closed.beta4(r), k, u));
            out.push(Check::new("closed-form beta(4)", status(&b4.verdict), b4.verdict.name()).informational());
        } else {
            let a4 = compare(r, &part(4), &window(&closed.alpha4(rep.label.mono.0[0] / 2), k, u));
            let name = format!("closed-form {}(4)", rep.label.name);
            out.push(Check::new(&name, status(&a4.verdict), a4.verdict.name()).informational());
        }
    }
    out
}

/// Matrices and representatives are unchanged under a larger `u`-window and
/// tensor cap.
pub fn stabilization_check<F: Field>(conn: &Connection<F>, mats: &[ConnectionMatrix<F>]) -> Result<Check> {
    let caps = conn.caps();
    let wider = Caps { u_max: caps.u_max + 1, tensor_cap: caps.tensor_cap + 2, ..caps };
    let spec = ModelSpec { caps: wider, ..conn.retraction.model.spec };
    let big = Connection::new(Retraction::new(Arc::new(Model::build(spec)?)))?;
    let big_mats = big.matrices()?;
    let w = conn.window();
    let mut moved = Vec::new();
    for (a, b) in mats.iter().zip(&big_mats) {
        let b = b.restrict(w);
        let same = a.entries.iter().flatten().zip(b.entries.iter().flatten()).all(|(x, y)| x.terms().eq(y.terms()));
        if !same {
            moved.push(a.direction.clone());
        }
    }
    for (a, b) in conn.representatives.iter().zip(&big.representatives) {
        let b = window(&b.chain.truncate_degree(caps.tensor_cap), caps.k_max, caps.u_max);
        if b != a.chain {
            moved.push(a.label.name.clone());
        }
    }
    let detail = format!("u-window {} → {}, tensor cap {} → {}", caps.u_max, wider.u_max, caps.tensor_cap, wider.tensor_cap);
    Ok(if moved.is_empty() {
        Check::new("stabilization", Status::Pass, detail)
    } else {
        Check::new("stabilization", Status::Undecided, format!("{}; changed: {}", detail, moved.join(", ")))
    })
}

pub fn lambda_check<F: Field>(
    a: &Connection<F>,
    ma: &[ConnectionMatrix<F>],
    d: &Connection<F>,
    md: &[ConnectionMatrix<F>],
) -> Check {
    match lambda_compare(a, ma, d, md) {
        Ok(rep) => {
            let mut detail = format!("verdict {}", rep.verdict.name());
            if !rep.differing.is_empty() {
                detail += &format!("; differing: {}", rep.differing.join(", "));
            }
            if let Some(t) = &rep.transformation {
                let names = &a.retraction.model.params;
                let rows: Vec<String> =
                    t.iter().map(|row| format!("[{}]", row.iter().map(|e| e.fmt_with(names)).collect::<Vec<_>>().join(", "))).collect();
                detail += &format!("; T = [{}]", rows.join(", "));
            }
            Check::new("lambda", Status::from_bool(rep.verdict != LambdaVerdict::Inequivalent), detail)
        }
        Err(e @ Error::CapMismatch(_)) => Check::new("lambda", Status::Undecided, e.to_string()),
        Err(e) => Check::new("lambda", Status::Fail, e.to_string()),
    }
}

// --------------------------------------------------------------- pipeline

fn record_connection<F: Field>(report: &mut Report, conn: &Connection<F>, mats: &[ConnectionMatrix<F>]) {
    let model = &conn.retraction.model;
    let key = model.spec.kind.name();
    report.labels.insert(key.into(), conn.labels());
    for m in mats {
        report.matrices.insert(format!("{}:{}", key, m.direction), m.to_strings(&model.params));
    }
    for rep in &conn.representatives {
        report.representatives.insert(format!("{}:{}", key, rep.label.name), model.notation.chain(&rep.chain));
    }
}

/// Everything up to the connection matrices for one model.
fn verify_model<F: Field>(
    spec: ModelSpec,
    opts: &Options,
    report: &mut Report,
    clock: &mut Clock,
) -> Result<(Connection<F>, Vec<ConnectionMatrix<F>>)> {
    let model = Arc::new(Model::<F>::build(spec)?);
    let kind = spec.kind.name();
    let lap = |s: &str| format!("{}:{}", kind, s);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k = spec.caps.k_max;
    let push = |report: &mut Report, c: Check| {
        report.checks.push(Check { name: format!("{}:{}", kind, c.name), ..c });
    };

    let mixed = random_twisted_chains(&model, opts.mixed_samples, 3, k, &mut rng);
    let c = clock.time(&lap("mixed-complex"), || mixed_complex_check(&model, &mixed));
    push(report, c);
    let twisted = random_twisted_chains(&model, opts.compat_samples, 3, k, &mut rng);
    let smash = random_smash_chains(&model, opts.compat_samples, 3, k, &mut rng);
    let c = clock.time(&lap("psi-gamma"), || compatibility_check(&model, &twisted, &smash));
    push(report, c);
    let c = clock.time(&lap("maurer-cartan"), || maurer_cartan_check(&model));
    push(report, c);

    let r = clock.time(&lap("retraction"), || Retraction::new(model.clone()));
    let forms_bound = (2 * spec.n as u32).min(spec.caps.weight_cap);
    let forms = invariant_forms(&r, forms_bound);
    let samples = random_twisted_chains(&model, opts.sdr_samples, 3, k, &mut rng);
    let c = clock.time(&lap("sdr"), || sdr_check(&r, &samples, &forms));
    push(report, c);
    let c = clock.time(&lap("induced-differential"), || induced_differential_check(&r, &forms));
    push(report, c);
    let (c, _) = clock.time(&lap("cohomology-parity"), || cohomology_parity_check(&r));
    push(report, c);

    let conn = clock.time(&lap("representatives"), || Connection::new(r))?;
    let mats = clock.time(&lap("matrices"), || conn.matrices())?;
    for c in representative_checks(&conn) {
        push(report, c);
    }
    push(report, kodaira_spencer_check(&model, &mats));
    push(report, closed_matrix_check(&conn, &mats));
    push(report, weights_check(&conn, &mats));
    let c = clock.time(&lap("flatness"), || flatness_check(&conn, &mats));
    push(report, c);
    if opts.stabilize {
        let c = clock.time(&lap("stabilization"), || stabilization_check(&conn, &mats))?;
        push(report, c);
    }
    record_connection(report, &conn, &mats);
    Ok((conn, mats))
}

/// The full pipeline for one model.
pub fn run_all<F: Field>(spec: ModelSpec, opts: &Options) -> Result<Report> {
    spec.validate()?;
    let mut report = Report::new(RunSpec {
        command: "verify".into(),
        models: vec![spec.kind],
        n: spec.n,
        caps: spec.caps,
        seed: spec.seed,
    });
    let mut clock = Clock { enabled: opts.timings, laps: BTreeMap::new() };
    verify_model::<F>(spec, opts, &mut report, &mut clock)?;
    report.timings = clock.laps;
    Ok(report)
}

/// Both models at identical caps, followed by the label comparison.
pub fn compare_models<F: Field>(n: u16, caps: Caps, seed: u64, opts: &Options) -> Result<Report> {
    let spec = |kind| ModelSpec { kind, n, caps, seed };
    spec(ModelKind::Aorb).validate()?;
    let mut report = Report::new(RunSpec {
        command: "compare".into(),
        models: vec![ModelKind::Aorb, ModelKind::D],
        n,
        caps,
        seed,
    });
    let mut clock = Clock { enabled: opts.timings, laps: BTreeMap::new() };
    let (a, ma) = verify_model::<F>(spec(ModelKind::Aorb), opts, &mut report, &mut clock)?;
    let (d, md) = verify_model::<F>(spec(ModelKind::D), opts, &mut report, &mut clock)?;
    let c = clock.time("lambda", || lambda_check(&a, &ma, &d, &md));
    report.checks.push(c);
    report.timings = clock.laps;
    Ok(report)
}

/// The basis representatives as canonical chain text, one block per label.
pub fn dump_chains<F: Field>(spec: ModelSpec) -> Result<String> {
    spec.validate()?;
    let model = Arc::new(Model::<F>::build(spec)?);
    let r = Retraction::new(model.clone());
    let mut out = String::new();
    for rep in crate::perturbation::representatives(&r) {
        let _ = writeln!(out, "# {}\n{}\n", rep.label.name, model.notation.chain(&rep.chain));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn small_caps() -> Caps {
        Caps { k_max: 2, u_max: 1, tensor_cap: 5, weight_cap: 12 }
    }

    #[test]
    fn ranks_match_jacobians() {
        for kind in [ModelKind::Aorb, ModelKind::D] {
            for n in 2..=3 {
                let spec = ModelSpec { caps: small_caps(), ..ModelSpec::new(kind, n) };
                let r = Retraction::new(Arc::new(Model::<Q>::build(spec).unwrap()));
                let (c, t) = cohomology_parity_check(&r);
                assert_eq!(c.status, Status::Pass, "{}", c.detail);
                assert_eq!((t.even, t.odd), (n as usize + 1, 0));
                let untwisted = t.sectors[r.model.group.name(IDENTITY)].0;
                assert_eq!(untwisted, if kind == ModelKind::Aorb { n as usize } else { n as usize + 1 });
            }
        }
    }

    #[test]
    fn small_weight_cap_is_undecided() {
        let caps = Caps { weight_cap: 1, ..small_caps() };
        let spec = ModelSpec { caps, ..ModelSpec::new(ModelKind::Aorb, 3) };
        let r = Retraction::new(Arc::new(Model::<Q>::build(spec).unwrap()));
        let (c, _) = cohomology_parity_check(&r);
        assert_eq!(c.status, Status::Undecided);
    }

    #[test]
    fn property_checks_pass() {
        for kind in [ModelKind::Aorb, ModelKind::D] {
            let spec = ModelSpec { caps: small_caps(), ..ModelSpec::new(kind, 2) };
            let model = Model::<Q>::build(spec).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let chains = random_twisted_chains(&model, 20, 3, 2, &mut rng);
            assert!(chains.iter().all(|c| model.twisted.pi(c) == *c));
            assert_eq!(mixed_complex_check(&model, &chains).status, Status::Pass);
            let smash = random_smash_chains(&model, 20, 3, 2, &mut rng);
            assert_eq!(compatibility_check(&model, &chains, &smash).status, Status::Pass);
            assert_eq!(maurer_cartan_check(&model).status, Status::Pass);
        }
    }

    #[test]
    fn non_maurer_cartan_structure_is_detected() {
        let spec = ModelSpec { caps: small_caps(), ..ModelSpec::new(ModelKind::Aorb, 2) };
        let model = Model::<Q>::build(spec).unwrap();
        let y2 = Mono::new(0, 2);
        let phi = Cochain::from_fn(1, move |a: &[Letter]| vec![(Letter::new(a[0].mono.mul(y2), a[0].g), Q::from_i64(1))]);
        let b = model.base_structure().add(&phi);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let chains = random_twisted_chains(&model, 20, 3, 2, &mut rng);
        assert_eq!(mixed_complex_with(&model, &b, &chains).status, Status::Fail);
        assert_eq!(mixed_complex_with(&model, &model.full_structure(), &chains).status, Status::Pass);
    }

    #[test]
    fn kodaira_spencer_is_an_isomorphism() {
        for kind in [ModelKind::Aorb, ModelKind::D] {
            let spec = ModelSpec { caps: Caps::with_order(1, 1), ..ModelSpec::new(kind, 2) };
            let conn = Connection::new(Retraction::new(Arc::new(Model::<Q>::build(spec).unwrap()))).unwrap();
            let mats = conn.matrices().unwrap();
            let c = kodaira_spencer_check(&conn.retraction.model, &mats);
            assert_eq!(c.status, Status::Pass, "{}", c.detail);
            let images = kodaira_spencer(&conn.retraction.model, &mats);
            // d/dt1 ↦ [−x²] = −α₂
            assert_eq!(images[1][1], Q::from_i64(-1));
        }
    }

    #[test]
    fn report_is_deterministic() {
        let spec = ModelSpec { caps: Caps::with_order(2, 1), seed: 3, ..ModelSpec::new(ModelKind::D, 2) };
        let opts = Options { mixed_samples: 10, compat_samples: 10, sdr_samples: 4, stabilize: false, timings: false };
        let a = run_all::<Q>(spec, &opts).unwrap();
        let b = run_all::<Q>(spec, &opts).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.exit_code(), 0, "{}", a.to_markdown());
        assert!(a.to_markdown().contains("| d:flatness | pass |"));
        let v: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
        for key in ["spec", "checks", "matrices", "representatives", "timings"] {
            assert!(v.get(key).is_some(), "{}", key);
        }
    }

    #[test]
    fn exhaustive_side_conditions_small() {
        for kind in [ModelKind::Aorb, ModelKind::D] {
            let spec = ModelSpec { caps: small_caps(), ..ModelSpec::new(kind, 2) };
            let r = Retraction::new(Arc::new(Model::<Q>::build(spec).unwrap()));
            let words = twisted_words(&r.model, 4, 3);
            assert!(words.iter().all(|w| r.model.twisted.is_invariant(w) && w.degree() <= 3));
            let c = exhaustive_sdr_check(&r, 4, 3);
            assert_eq!(c.status, Status::Pass, "{}", c.detail);
        }
    }

    #[test]
    fn exit_codes() {
        let mut r = Report::new(RunSpec { command: "verify".into(), models: vec![], n: 2, caps: Caps::default(), seed: 0 });
        assert_eq!(r.exit_code(), 0);
        r.checks.push(Check::new("x", Status::Undecided, ""));
        assert_eq!(r.exit_code(), 3);
        r.checks.push(Check::new("y", Status::Fail, "").informational());
        assert_eq!(r.exit_code(), 3);
        r.checks.push(Check::new("z", Status::Fail, ""));
        assert_eq!(r.exit_code(), 2);
    }
}
