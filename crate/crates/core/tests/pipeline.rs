use mereology::bitstate::random_ontic;
use mereology::entropy::{collision_entropy, renyi_entropy, spectrum_of, von_neumann_entropy};
use mereology::indexing::{proper_masks, FactorizationShape, SubsystemMask};
use mereology::permrep::{random_permutation, to_energy_basis, EnergyBasis};
use mereology::reduction::{purity, reduced_density};
use mereology::states::{state_from_natural, state_from_ontic, NaturalVector};
use proptest::prelude::*;

fn shape_strategy() -> impl Strategy<Value = FactorizationShape> {
    prop::collection::vec(2usize..=4, 2..=5)
        .prop_filter("at most 512 points", |d| d.iter().product::<usize>() <= 512)
        .prop_map(|d| FactorizationShape::new(d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn complementary_reductions_agree(shape in shape_strategy(), seed in any::<u64>()) {
        let psi = state_from_ontic(&random_ontic(shape.total(), seed).unwrap(), &shape).unwrap();
        let k = shape.num_factors();
        for mask in proper_masks(k).unwrap() {
            let a = collision_entropy(purity(&psi, mask).unwrap()).unwrap();
            let b = collision_entropy(purity(&psi, mask.complement()).unwrap()).unwrap();
            prop_assert!((a - b).abs() < 1e-11);
            let small = shape.subsystem_dim(mask).min(shape.subsystem_dim(mask.complement()));
            prop_assert!(a >= -1e-12 && a <= (small as f64).log2() + 1e-9);
        }
    }

    #[test]
    fn complement_gives_the_same_reductions(shape in shape_strategy(), seed in any::<u64>()) {
        let q = random_ontic(shape.total(), seed).unwrap();
        let psi = state_from_ontic(&q, &shape).unwrap();
        let chi = state_from_ontic(&q.complement(), &shape).unwrap();
        for mask in proper_masks(shape.num_factors()).unwrap() {
            let a = reduced_density(&psi, mask, 4096).unwrap();
            let b = reduced_density(&chi, mask, 4096).unwrap();
            prop_assert!(a.max_abs_diff(&b) < 1e-15);
        }
    }

    #[test]
    fn energy_basis_entropy_chain(seed in any::<u64>()) {
        let shape = FactorizationShape::new(vec![2, 3, 2, 2]).unwrap();
        let g = random_permutation(shape.total(), seed);
        let phi = to_energy_basis(
            &EnergyBasis::new(&g),
            &state_from_ontic(&random_ontic(shape.total(), seed ^ 1).unwrap(), &shape).unwrap(),
        )
        .unwrap();
        let mask = SubsystemMask::parse("1,3", 4).unwrap();
        let rho = reduced_density(&phi, mask, 4096).unwrap();
        let spec = spectrum_of(&rho).unwrap();
        let s2 = collision_entropy(purity(&phi, mask).unwrap()).unwrap();
        prop_assert!((renyi_entropy(&spec, 2.0).unwrap() - s2).abs() < 1e-9);
        prop_assert!(von_neumann_entropy(&spec) >= s2 - 1e-12);
    }
}

#[test]
fn order_two_natural_vector_is_the_ontic_state() {
    let shape = FactorizationShape::uniform(2, 5).unwrap();
    for seed in 0..10 {
        let q = random_ontic(32, seed).unwrap();
        let a = state_from_ontic(&q, &shape).unwrap();
        let b = state_from_natural(&NaturalVector::from(&q), &shape).unwrap();
        for (x, y) in a.amps().iter().zip(b.amps()) {
            assert!((x - y).norm() < 1e-15);
        }
    }
}
