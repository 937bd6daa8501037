use std::sync::Arc;

use ggm_core::linalg::Matrix;
use ggm_core::model::{Caps, Model, ModelKind, ModelSpec};
use ggm_core::retract::Retraction;
use ggm_core::scalar::{Cyclotomic, Field, Q};
use ggm_core::verify::{
    compatibility_check, invariant_forms, mixed_complex_check, random_smash_chains, random_twisted_chains, sdr_check,
    Status,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Z3 = Cyclotomic<3>;

fn caps() -> Caps {
    Caps { k_max: 2, u_max: 1, tensor_cap: 5, weight_cap: 12 }
}

fn model(kind: ModelKind, n: u16) -> Arc<Model<Q>> {
    Arc::new(Model::build(ModelSpec { caps: caps(), ..ModelSpec::new(kind, n) }).unwrap())
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn expect_pass(c: ggm_core::verify::Check) -> Result<(), TestCaseError> {
    prop_assert_eq!(c.status, Status::Pass, "{}: {}", c.name, c.detail);
    Ok(())
}

#[test]
fn mixed_complex_identities_hold_on_random_chains() {
    for kind in [ModelKind::Aorb, ModelKind::D] {
        let m = model(kind, 2);
        runner(24)
            .run(&any::<u64>(), |seed| {
                let chains = random_twisted_chains(&m, 4, 3, 2, &mut ChaCha8Rng::seed_from_u64(seed));
                expect_pass(mixed_complex_check(&m, &chains))
            })
            .unwrap();
    }
}

#[test]
fn psi_gamma_compatibilities_hold_on_random_chains() {
    for (kind, n) in [(ModelKind::Aorb, 2), (ModelKind::D, 3)] {
        let m = model(kind, n);
        runner(24)
            .run(&any::<u64>(), |seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let twisted = random_twisted_chains(&m, 4, 3, 2, &mut rng);
                let smash = random_smash_chains(&m, 4, 3, 2, &mut rng);
                expect_pass(compatibility_check(&m, &twisted, &smash))
            })
            .unwrap();
    }
}

#[test]
fn side_conditions_hold_on_random_chains() {
    for kind in [ModelKind::Aorb, ModelKind::D] {
        let r = Retraction::new(model(kind, 2));
        let forms = invariant_forms(&r, 6);
        runner(8)
            .run(&(any::<u64>(), 0..forms.len()), |(seed, start)| {
                let chains = random_twisted_chains(&r.model, 3, 3, 1, &mut ChaCha8Rng::seed_from_u64(seed));
                let picked: Vec<_> = forms.iter().cycle().skip(start).take(4).copied().collect();
                expect_pass(sdr_check(&r, &chains, &picked))
            })
            .unwrap();
    }
}

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix<Q>> {
    prop::collection::vec(-3i64..=3, rows * cols).prop_map(move |v| {
        Matrix::from_rows(v.chunks(cols).map(|r| r.iter().map(|&x| Q::from(x)).collect()).collect())
    })
}

fn z3() -> impl Strategy<Value = Z3> {
    (-4i64..=4, -4i64..=4).prop_map(|(a, b)| Z3::from_i64(a) + Z3::from_i64(b) * Z3::zeta_pow(1))
}

proptest! {
    #[test]
    fn rank_nullity(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| small_matrix(r, c))) {
        let kernel = m.kernel();
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(m.apply(v).iter().all(|x| x.is_zero()));
        }
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn inverse_is_two_sided(m in (1usize..5).prop_flat_map(|n| small_matrix(n, n))) {
        match m.inverse() {
            Some(inv) => {
                let id = Matrix::identity(m.rows());
                prop_assert_eq!(m.mul(&inv), id.clone());
                prop_assert_eq!(inv.mul(&m), id);
            }
            None => prop_assert!(m.rank() < m.rows()),
        }
    }

    #[test]
    fn cyclotomic_field_axioms(a in z3(), b in z3(), c in z3()) {
        prop_assert_eq!((a.clone() + b.clone()) * c.clone(), a.clone() * c.clone() + b.clone() * c.clone());
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        if !b.is_zero() {
            prop_assert_eq!((a.clone() / b.clone()) * b.clone(), a.clone());
        }
        prop_assert_eq!(Z3::parse_canonical(&a.to_string()), Some(a));
    }

    #[test]
    fn roots_of_unity_have_their_order(k in 0u32..12) {
        let z = Z3::root_of_unity(3, k).unwrap();
        let cube = z.clone() * z.clone() * z;
        prop_assert_eq!(cube, Z3::one());
        prop_assert_eq!(Q::parse_canonical(&Q::from_ratio(k as i64 - 5, 7).to_string()), Some(Q::from_ratio(k as i64 - 5, 7)));
    }
}
