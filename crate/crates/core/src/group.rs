//! Finite diagonal group actions on the plane and their sectors.

use crate::error::{Error, Result};
use crate::jacobian::JacobianRing;
use crate::poly::{Mono, Poly, WeightScheme};
use crate::scalar::Field;

/// Index of a group element; `0` is always the identity.
pub type GroupElt = u8;
pub const IDENTITY: GroupElt = 0;

/// Abelian group of diagonal matrices `diag(ζ_N^{k₁}, ζ_N^{k₂})`.
#[derive(Clone, Debug)]
pub struct DiagonalGroup<F> {
    modulus: u32,
    elements: Vec<[u32; 2]>,
    names: Vec<String>,
    roots: Vec<F>,
}

impl<F: Field> DiagonalGroup<F> {
    pub fn trivial() -> Self {
        Self::generated(1, &[], &[]).expect("trivial group")
    }

    /// Closure of the given generators. `names` labels elements in discovery
    /// order after the identity; missing names default to `g1, g2, …`.
    pub fn generated(modulus: u32, generators: &[[u32; 2]], names: &[&str]) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidSpec("group modulus must be positive".into()));
        }
        let mut elements = vec![[0u32, 0u32]];
        let mut frontier = 0;
        while frontier < elements.len() {
            let cur = elements[frontier];
            for g in generators {
                let next = [(cur[0] + g[0]) % modulus, (cur[1] + g[1]) % modulus];
                if !elements.contains(&next) {
                    elements.push(next);
                }
            }
            frontier += 1;
        }
        if elements.len() > GroupElt::MAX as usize {
            return Err(Error::InvalidSpec("group too large".into()));
        }
        let mut roots = Vec::with_capacity(modulus as usize);
        for k in 0..modulus {
            roots.push(F::root_of_unity(modulus, k).ok_or(Error::MissingRootOfUnity(modulus))?);
        }
        let names = (0..elements.len())
            .map(|i| match i {
                0 => "e".to_string(),
                i => names.get(i - 1).map(|s| s.to_string()).unwrap_or_else(|| format!("g{}", i)),
            })
            .collect();
        Ok(DiagonalGroup { modulus, elements, names, roots })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElt> {
        0..self.elements.len() as GroupElt
    }

    pub fn exponents(&self, g: GroupElt) -> [u32; 2] {
        self.elements[g as usize]
    }

    pub fn name(&self, g: GroupElt) -> &str {
        &self.names[g as usize]
    }

    pub fn by_name(&self, name: &str) -> Option<GroupElt> {
        self.names.iter().position(|n| n == name).map(|i| i as GroupElt)
    }

    pub fn mul(&self, a: GroupElt, b: GroupElt) -> GroupElt {
        let (x, y) = (self.elements[a as usize], self.elements[b as usize]);
        let p = [(x[0] + y[0]) % self.modulus, (x[1] + y[1]) % self.modulus];
        self.index_of(p)
    }

    pub fn inv(&self, a: GroupElt) -> GroupElt {
        let x = self.elements[a as usize];
        self.index_of([(self.modulus - x[0]) % self.modulus, (self.modulus - x[1]) % self.modulus])
    }

    fn index_of(&self, e: [u32; 2]) -> GroupElt {
        self.elements.iter().position(|x| *x == e).expect("group is closed") as GroupElt
    }

    /// Exponent `k` with `g · m = ζ_N^k m`.
    pub fn char_exp(&self, g: GroupElt, m: Mono) -> u32 {
        let e = self.elements[g as usize];
        ((e[0] as u64 * m.0[0] as u64 + e[1] as u64 * m.0[1] as u64) % self.modulus as u64) as u32
    }

    pub fn root(&self, k: u32) -> F {
        self.roots[(k % self.modulus) as usize].clone()
    }

    /// Eigenvalue of `g` acting on `m`.
    pub fn character(&self, g: GroupElt, m: Mono) -> F {
        self.root(self.char_exp(g, m))
    }

    /// Eigenvalue `λ_i` of `g` on the `i`-th coordinate.
    pub fn eigenvalue(&self, g: GroupElt, i: usize) -> F {
        self.root(self.elements[g as usize][i])
    }

    pub fn fixes_coordinate(&self, g: GroupElt, i: usize) -> bool {
        self.elements[g as usize][i] == 0
    }

    pub fn is_calabi_yau(&self) -> bool {
        self.elements.iter().all(|e| (e[0] + e[1]) % self.modulus == 0)
    }

    /// Whether `m` is fixed by the whole group.
    pub fn is_invariant(&self, m: Mono) -> bool {
        self.elements().all(|g| self.char_exp(g, m) == 0)
    }

    pub fn act(&self, g: GroupElt, p: &Poly<F>) -> Poly<F> {
        Poly::from_terms(
            p.vars().clone(),
            p.terms().map(|(m, c)| (*m, c.clone() * self.character(g, *m))),
        )
    }
}

/// Geometric data of the sector of `g`.
#[derive(Clone, Debug)]
pub struct SectorData<F> {
    pub g: GroupElt,
    pub eigen_exponents: [u32; 2],
    /// `I_g`: coordinates moved by `g`.
    pub moved: [bool; 2],
    pub l_g: u8,
    pub w_g: Poly<F>,
}

impl<F: Field> SectorData<F> {
    pub fn fix_dim(&self) -> usize {
        self.moved.iter().filter(|m| !**m).count()
    }
}

pub fn sector_data<F: Field>(group: &DiagonalGroup<F>, g: GroupElt, w: &Poly<F>) -> Result<SectorData<F>> {
    for h in group.elements() {
        if group.act(h, w) != *w {
            return Err(Error::NotInvariant(group.name(h).to_string()));
        }
    }
    let moved = [!group.fixes_coordinate(g, 0), !group.fixes_coordinate(g, 1)];
    Ok(SectorData {
        g,
        eigen_exponents: group.exponents(g),
        moved,
        l_g: if g == IDENTITY { 0 } else { 2 },
        w_g: w.restrict(moved),
    })
}

/// One summand `Jac(W_g)^G[-l_g]`.
#[derive(Clone)]
pub struct SectorJacobian<F> {
    pub sector: SectorData<F>,
    pub ring: JacobianRing<F>,
    pub invariant_basis: Vec<Mono>,
}

impl<F: Field> SectorJacobian<F> {
    pub fn shift(&self) -> u8 {
        self.sector.l_g
    }
}

/// Whether the top form `m · dx_{Fix(g)}` is invariant under the group.
pub fn is_invariant_form<F: Field>(group: &DiagonalGroup<F>, sector: &SectorData<F>, m: Mono) -> bool {
    group.elements().all(|h| {
        let mut k = group.char_exp(h, m);
        for i in 0..2 {
            if !sector.moved[i] {
                k += group.exponents(h)[i];
            }
        }
        k.is_multiple_of(group.modulus())
    })
}

pub fn orbifold_jacobian<F: Field>(
    w: &Poly<F>,
    group: &DiagonalGroup<F>,
    scheme: &WeightScheme,
) -> Result<Vec<SectorJacobian<F>>> {
    if !group.is_calabi_yau() {
        return Err(Error::InvalidSpec("group is not contained in SL(2)".into()));
    }
    let mut out = Vec::new();
    for g in group.elements() {
        let sector = sector_data(group, g, w)?;
        let active = [!sector.moved[0], !sector.moved[1]];
        let ring = JacobianRing::new(w, scheme, active)
            .map_err(|e| Error::DegenerateSector(format!("{}: {}", group.name(g), e)))?;
        let invariant_basis = ring
            .basis()
            .iter()
            .copied()
            .filter(|m| is_invariant_form(group, &sector, *m))
            .collect();
        out.push(SectorJacobian { sector, ring, invariant_basis });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::default_vars;
    use crate::scalar::Q;
    use num_rational::Rational64;
    use num_traits::One;

    fn z2() -> DiagonalGroup<Q> {
        DiagonalGroup::generated(2, &[[1, 1]], &["sigma"]).unwrap()
    }

    fn xy(terms: &[(u16, u16, i64)]) -> Poly<Q> {
        Poly::from_terms(default_vars("x", "y"), terms.iter().map(|&(a, b, c)| (Mono::new(a, b), Q::from_i64(c))))
    }

    #[test]
    fn sigma_acts_by_signs() {
        let g = z2();
        let s = g.by_name("sigma").unwrap();
        assert_eq!(g.act(s, &xy(&[(1, 0, 1)])), xy(&[(1, 0, -1)]));
        assert_eq!(g.act(s, &xy(&[(3, 1, 1)])), xy(&[(3, 1, 1)]));
        assert_eq!(g.act(IDENTITY, &xy(&[(3, 2, 5)])), xy(&[(3, 2, 5)]));
        assert!(g.is_calabi_yau());
        assert_eq!(g.mul(s, s), IDENTITY);
    }

    #[test]
    fn sectors_of_a3() {
        let g = z2();
        let w = xy(&[(4, 0, 1), (0, 2, 1)]);
        let e = sector_data(&g, IDENTITY, &w).unwrap();
        assert_eq!((e.moved, e.l_g, e.fix_dim()), ([false, false], 0, 2));
        assert_eq!(e.w_g, w);
        let s = sector_data(&g, 1, &w).unwrap();
        assert_eq!((s.moved, s.l_g, s.fix_dim()), ([true, true], 2, 0));
        assert!(s.w_g.is_zero());
    }

    #[test]
    fn non_invariant_w() {
        let w = xy(&[(3, 0, 1), (0, 2, 1)]);
        assert!(matches!(sector_data(&z2(), IDENTITY, &w), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn orbifold_jacobian_a3() {
        let w = xy(&[(4, 0, 1), (0, 2, 1)]);
        let scheme = WeightScheme {
            vars: [Rational64::one(), Rational64::from(2)],
            params: vec![],
            u: Rational64::from(4),
        };
        let oj = orbifold_jacobian(&w, &z2(), &scheme).unwrap();
        assert_eq!(oj[0].invariant_basis, vec![Mono::new(0, 0), Mono::new(2, 0)]);
        assert_eq!(oj[1].invariant_basis, vec![Mono::ONE]);
        assert_eq!(oj[1].shift(), 2);
    }

    #[test]
    fn order_three_needs_cyclotomic() {
        assert!(matches!(
            DiagonalGroup::<Q>::generated(3, &[[1, 2]], &[]),
            Err(Error::MissingRootOfUnity(3))
        ));
        let g = DiagonalGroup::<crate::scalar::Cyclotomic<3>>::generated(3, &[[1, 2]], &[]).unwrap();
        assert_eq!(g.order(), 3);
        assert!(g.is_calabi_yau());
    }
}
