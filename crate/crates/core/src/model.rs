//! The two deformed models: the `ℤ₂`-orbifold of `x^{2n} + y²` with its
//! quantum product deformation, and the `D_{n+1}` singularity `zⁿ + zw²`.

use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::chain::{Letter, Notation};
use crate::cochain::{psi_upper_star, Cochain};
use crate::defscalar::{DefMono, DefRing, MAX_PARAMS};
use crate::error::{Error, Result};
use crate::group::{orbifold_jacobian, DiagonalGroup, GroupElt, SectorJacobian, IDENTITY};
use crate::poly::{default_vars, Mono, Poly, WeightScheme};
use crate::scalar::Field;
use crate::twisted::Twisted;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// `W = x^{2n} + y²` with `σ = diag(−1, −1)`.
    Aorb,
    /// `W = zⁿ + zw²` with trivial group.
    D,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Aorb => "aorb",
            ModelKind::D => "d",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aorb" | "a-orbifold" => Ok(ModelKind::Aorb),
            "d" | "d-singularity" => Ok(ModelKind::D),
            other => Err(Error::InvalidSpec(format!("unknown model `{}`", other))),
        }
    }
}

/// Tensor degree 4 reaches the connection matrices; two more degrees keep
/// the chain-level checks exact.
pub const DEFAULT_TENSOR_CAP: usize = 6;

/// Truncation caps shared by every stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Order in the deformation parameters.
    pub k_max: u32,
    /// `u`-exponents lie in `[−u_max, u_max]`.
    pub u_max: i32,
    /// Largest tensor degree kept in intermediate chains.
    pub tensor_cap: usize,
    /// Largest polynomial weight used by the enumerative checks.
    pub weight_cap: u32,
}

impl Caps {
    pub fn with_order(k_max: u32, u_max: i32) -> Self {
        Caps { k_max, u_max, tensor_cap: DEFAULT_TENSOR_CAP, weight_cap: 12 }
    }

    pub fn ring(&self, n_params: usize) -> DefRing {
        DefRing::new(n_params, self.k_max, self.u_max)
    }
}

impl Default for Caps {
    fn default() -> Self {
        Caps::with_order(3, 2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n: u16,
    pub caps: Caps,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, n: u16) -> Self {
        ModelSpec { kind, n, caps: Caps::default(), seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSpec(format!("n must be at least 2, got {}", self.n)));
        }
        if self.n as usize + 1 > MAX_PARAMS {
            return Err(Error::InvalidSpec(format!("n = {} needs more than {} parameters", self.n, MAX_PARAMS)));
        }
        if self.caps.u_max < 1 || self.caps.tensor_cap < 2 || self.caps.weight_cap == 0 {
            return Err(Error::InvalidSpec("caps must be positive (u-window ≥ 1, tensor cap ≥ 2)".into()));
        }
        Ok(())
    }
}

/// How a deformation parameter enters the structure `b(τ,s)`.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamRole<F> {
    /// Adds `coeff · mono · 𝖾` to the curvature.
    Curvature { mono: Mono, coeff: F },
    /// Adds the twisted 2-cochain to the product.
    Product2,
}

/// A homology basis element: monomial `mono` in the sector of `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    pub name: String,
    pub g: GroupElt,
    pub mono: Mono,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

pub struct Model<F> {
    pub spec: ModelSpec,
    pub group: Arc<DiagonalGroup<F>>,
    pub w: Poly<F>,
    pub scheme: WeightScheme,
    pub params: Vec<String>,
    pub roles: Vec<ParamRole<F>>,
    pub sectors: Vec<SectorJacobian<F>>,
    pub labels: Vec<Label>,
    pub twisted: Twisted<F>,
    pub notation: Notation,
    b_sigma: Option<Cochain<F>>,
}

/// `b_σ[x^{a₁}y^{b₁}|x^{a₂}y^{b₂}] = (−1)^{a₂} x^{a₁+a₂−1}y^{b₁+b₂−1}σ` when
/// `a₁` and `b₂` are odd, else `0`.
pub fn b_sigma<F: Field>(sigma: GroupElt) -> Cochain<F> {
    Cochain::from_fn(2, move |a: &[Letter]| {
        let ([a1, b1], [a2, b2]) = (a[0].mono.0, a[1].mono.0);
        if a1 % 2 == 1 && b2 % 2 == 1 {
            let c = if a2 % 2 == 0 { F::one() } else { -F::one() };
            vec![(Letter::new(Mono::new(a1 + a2 - 1, b1 + b2 - 1), sigma), c)]
        } else {
            Vec::new()
        }
    })
}

/// The commutative product of `A`, valued in `A·𝖾`.
pub fn plain_product<F: Field>() -> Cochain<F> {
    Cochain::from_fn(2, |a: &[Letter]| vec![(Letter::plain(a[0].mono.mul(a[1].mono)), F::one())])
}

impl<F: Field> Model<F> {
    pub fn build(spec: ModelSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n;
        let ni = n as i64;
        let rn = Rational64::from(ni);
        let mut params: Vec<String> = (0..n).map(|j| format!("t{}", j)).collect();
        params.push("s".into());
        let mut param_weights: Vec<Rational64> = (0..ni).map(|j| Rational64::from(2 * ni - 2 * j)).collect();
        param_weights.push(rn + 1);
        let u = Rational64::from(2 * ni);
        let (group, vars, scheme, w, roles) = match spec.kind {
            ModelKind::Aorb => {
                let group = DiagonalGroup::generated(2, &[[1, 1]], &["sigma"])?;
                let vars = default_vars("x", "y");
                let scheme = WeightScheme { vars: [Rational64::from(1), rn], params: param_weights, u };
                let w = Poly::from_terms(vars.clone(), [(Mono::new(2 * n, 0), F::one()), (Mono::new(0, 2), F::one())]);
                let mut roles: Vec<ParamRole<F>> =
                    (0..n).map(|j| ParamRole::Curvature { mono: Mono::new(2 * j, 0), coeff: -F::one() }).collect();
                roles.push(ParamRole::Product2);
                (group, vars, scheme, w, roles)
            }
            ModelKind::D => {
                let group = DiagonalGroup::trivial();
                let vars = default_vars("z", "w");
                let scheme = WeightScheme { vars: [Rational64::from(2), rn - 1], params: param_weights, u };
                let w = Poly::from_terms(vars.clone(), [(Mono::new(n, 0), F::one()), (Mono::new(1, 2), F::one())]);
                let mut roles: Vec<ParamRole<F>> =
                    (0..n).map(|j| ParamRole::Curvature { mono: Mono::new(j, 0), coeff: -F::one() }).collect();
                roles.push(ParamRole::Curvature { mono: Mono::new(0, 1), coeff: F::one() });
                (group, vars, scheme, w, roles)
            }
        };
        let sectors = orbifold_jacobian(&w, &group, &scheme)?;
        let labels = make_labels(spec.kind, &sectors);
        let group = Arc::new(group);
        let notation = Notation {
            vars,
            groups: group.elements().map(|g| group.name(g).to_string()).collect(),
            params: params.clone(),
        };
        let b_sigma = match spec.kind {
            ModelKind::Aorb => Some(b_sigma(group.by_name("sigma").expect("sigma"))),
            ModelKind::D => None,
        };
        Ok(Model {
            spec,
            twisted: Twisted::new(group.clone()),
            group,
            w,
            scheme,
            params,
            roles,
            sectors,
            labels,
            notation,
            b_sigma,
        })
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn ring(&self) -> DefRing {
        self.spec.caps.ring(self.n_params())
    }

    pub fn k_max(&self) -> u32 {
        self.spec.caps.k_max
    }

    pub fn param_index(&self, name: &str) -> Result<usize> {
        self.params.iter().position(|p| p == name).ok_or_else(|| Error::UnknownDirection(name.to_string()))
    }

    /// `b₀ = −W·𝖾`.
    pub fn base_curvature(&self) -> Cochain<F> {
        Cochain::from_poly(&self.w.scale(&-F::one()), IDENTITY)
    }

    /// `b₂` of `A[G]`.
    pub fn base_product(&self) -> Cochain<F> {
        psi_upper_star(&plain_product(), self.group.clone())
    }

    pub fn base_structure(&self) -> Cochain<F> {
        self.base_product().add(&self.base_curvature())
    }

    /// `∂b(τ,s)/∂p_j` as a cochain on `A[G]`.
    pub fn direction(&self, j: usize) -> Cochain<F> {
        match &self.roles[j] {
            ParamRole::Curvature { mono, coeff } => Cochain::constant(vec![(Letter::plain(*mono), coeff.clone())]),
            ParamRole::Product2 => psi_upper_star(self.b_sigma.as_ref().expect("product role needs b_σ"), self.group.clone()),
        }
    }

    /// `∂b/∂p_j` before lifting to `A[G]` (a cochain on `A`).
    pub fn direction_on_a(&self, j: usize) -> Cochain<F> {
        match &self.roles[j] {
            ParamRole::Curvature { mono, coeff } => Cochain::constant(vec![(Letter::plain(*mono), coeff.clone())]),
            ParamRole::Product2 => self.b_sigma.clone().expect("product role needs b_σ"),
        }
    }

    /// `b(τ,s) − b`.
    pub fn deformation(&self) -> Cochain<F> {
        (0..self.n_params()).fold(Cochain::zero(), |acc, j| acc.add(&self.direction(j).scale_mono(&DefMono::param(j))))
    }

    /// Curvature part of `b(τ,s) − b`.
    pub fn curvature_deformation(&self) -> Cochain<F> {
        self.deformation().component(0)
    }

    /// Product part of `b(τ,s) − b` on `A[G]`.
    pub fn product_deformation(&self) -> Cochain<F> {
        self.deformation().component(2)
    }

    pub fn full_structure(&self) -> Cochain<F> {
        self.base_structure().add(&self.deformation())
    }

    /// The full product `b₂(τ,s)` as a cochain on `A`, for the closed formulas.
    pub fn full_product_on_a(&self) -> Cochain<F> {
        let mut out = plain_product();
        for j in 0..self.n_params() {
            if self.roles[j] == ParamRole::Product2 {
                out = out.add(&self.direction_on_a(j).scale_mono(&DefMono::param(j)));
            }
        }
        out
    }

    pub fn full_curvature(&self) -> Cochain<F> {
        self.base_curvature().add(&self.curvature_deformation())
    }

    pub fn label(&self, name: &str) -> Option<&Label> {
        self.labels.iter().find(|l| l.name == name)
    }

    /// Label names with the `hat` marker removed, in matrix order.
    pub fn plain_label_names(&self) -> Vec<String> {
        self.labels.iter().map(|l| l.name.replace("hat_", "").replace("_hat", "")).collect()
    }

    pub fn sector(&self, g: GroupElt) -> &SectorJacobian<F> {
        &self.sectors[g as usize]
    }

    /// Weight of a twisted word (without parameter or `u` contributions).
    pub fn word_weight(&self, w: &crate::chain::Word) -> Rational64 {
        self.scheme.mono(w.total_mono())
    }

    /// `d/2`: the shift in weight per tensor degree.
    pub fn half_degree(&self) -> Rational64 {
        Rational64::from(self.spec.n as i64)
    }

    /// `E = wt − (d/2)·p`, including parameter and `u` weights.
    pub fn energy(&self, w: &crate::chain::Word, def: &DefMono) -> Rational64 {
        let mut e = self.word_weight(w) - self.half_degree() * Rational64::from(w.degree() as i64);
        for (j, &k) in def.params.iter().enumerate().take(self.n_params()) {
            e += self.scheme.params[j] * Rational64::from(k as i64);
        }
        e + self.scheme.u * Rational64::from(def.u as i64)
    }
}

fn make_labels<F: Field>(kind: ModelKind, sectors: &[SectorJacobian<F>]) -> Vec<Label> {
    let mut out = Vec::new();
    let hat = if kind == ModelKind::D { "hat_" } else { "" };
    for s in sectors {
        for m in &s.invariant_basis {
            let name = if s.sector.g != IDENTITY {
                format!("beta{}", if hat.is_empty() { String::new() } else { "_hat".into() })
            } else if m.0[1] > 0 {
                "beta_hat".to_string()
            } else {
                let k = match kind {
                    ModelKind::Aorb => m.0[0],
                    ModelKind::D => 2 * m.0[0],
                };
                format!("alpha_{}{}", hat, k)
            };
            out.push(Label { name, g: s.sector.g, mono: *m });
        }
    }
    // alphas by index, then beta
    out.sort_by_key(|l| (l.name.starts_with("beta"), l.mono.0[0], l.mono.0[1]));
    out
}
