//! Invariance of the constraint under the stable permutation family.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmae::autgroup::{
    is_stable, sample_blta_pl, sample_group, stability_survey, transform_constraint, AffinePerm,
    Group,
};
use rmae::codespec::{count_stable_variants, enumerate_variants, CodeSpec, Constraint};
use rmae::encdec::FreezingPlan;

fn pairs() -> Vec<(usize, usize)> {
    (4..=8).flat_map(|n| (1..n - 1).map(move |r| (r, n))).collect()
}

#[test]
fn twenty_code_pairs() {
    assert_eq!(pairs().len(), 20);
}

#[test]
fn every_variant_stable_under_sampled_members() {
    let mut failures = Vec::new();
    for (r, n) in pairs() {
        let spec = CodeSpec::reed_muller(r, n).unwrap();
        let perms = sample_blta_pl(n, 50.min(Group::StablePl.size(n).unwrap() as usize), 7).unwrap();
        for variant in enumerate_variants(&spec) {
            let c = Constraint::build(&spec, &variant).unwrap();
            for p in &perms {
                if !is_stable(&c, p).unwrap() {
                    failures.push((r, n, variant.clone(), p.perm().to_vec()));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{} unstable cases, first {:?}", failures.len(), failures.first());
}

#[test]
fn exhaustive_on_short_codes() {
    for (r, n) in pairs().into_iter().filter(|&(_, n)| n <= 6) {
        let spec = CodeSpec::reed_muller(r, n).unwrap();
        let report = stability_survey(&Constraint::full(&spec), &Group::StablePl, usize::MAX, 0).unwrap();
        assert!(report.exhaustive);
        assert_eq!(report.tested as u128, Group::StablePl.size(n).unwrap());
        assert_eq!(report.stable, report.tested, "R({r},{n})");
    }
}

#[test]
fn lower_triangular_affine_maps_break_stability() {
    let spec = CodeSpec::reed_muller(3, 7).unwrap();
    let report = stability_survey(&Constraint::full(&spec), &Group::Lta, 100, 3).unwrap();
    assert!(report.stable < report.tested);
    assert!(!report.counterexamples.is_empty());
    // a constraint without dynamic bits is trivially invariant
    let plain = Constraint::build(&spec, &[]).unwrap();
    let report = stability_survey(&plain, &Group::Lta, 100, 3).unwrap();
    assert_eq!(report.stable, report.tested);
}

#[test]
fn stable_variant_count_matches_enumeration() {
    for n in 1..=8 {
        for r in 1..n {
            let spec = CodeSpec::reed_muller(r, n).unwrap();
            assert_eq!(
                count_stable_variants(&spec).unwrap(),
                enumerate_variants(&spec).len() as u64,
                "R({r},{n})"
            );
        }
    }
    let rm37 = CodeSpec::reed_muller(3, 7).unwrap();
    assert_eq!(count_stable_variants(&rm37).unwrap(), 8);
}

#[test]
fn variants_are_distinct_constraints() {
    let spec = CodeSpec::reed_muller(3, 7).unwrap();
    let constraints: Vec<Constraint> = enumerate_variants(&spec)
        .iter()
        .map(|v| Constraint::build(&spec, v).unwrap())
        .collect();
    for (i, a) in constraints.iter().enumerate() {
        for b in &constraints[i + 1..] {
            assert_ne!(a.v(), b.v());
        }
    }
}

fn random_code(seed: u64) -> Constraint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=7);
    let r = rng.gen_range(1..n);
    let spec = CodeSpec::reed_muller(r, n).unwrap();
    let variants = enumerate_variants(&spec);
    let v = &variants[rng.gen_range(0..variants.len())];
    Constraint::build(&spec, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stable_member_keeps_constraint(seed in any::<u64>()) {
        let c = random_code(seed);
        let n = c.spec().n();
        let p = &sample_group(&Group::StablePl, n, 1, seed).unwrap()[0];
        prop_assert!(is_stable(&c, p).unwrap());
    }

    /// The transformed constraint describes the permuted code for any
    /// affine map, stable or not.
    #[test]
    fn transformed_constraint_holds_permuted_codewords(seed in any::<u64>()) {
        let c = random_code(seed);
        let n = c.spec().n();
        let p: AffinePerm = sample_group(&Group::Ga, n, 1, seed).unwrap().remove(0);
        let plan = FreezingPlan::from_constraint(&c);
        let permuted = FreezingPlan::from_matrix(&transform_constraint(c.v(), &p).unwrap()).unwrap();
        prop_assert_eq!(permuted.dim(), plan.dim());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for _ in 0..8 {
            let v: Vec<u8> = (0..plan.dim()).map(|_| rng.gen_range(0..2)).collect();
            let x = plan.encode(&v).unwrap();
            prop_assert!(permuted.contains(&p.apply(&x)));
        }
    }
}
