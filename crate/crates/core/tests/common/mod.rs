//! Seeded decoder invariant checks shared by the test targets. Each check
//! returns the number of violating cases.
#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmae::autgroup::{sample_group, AffinePerm, Group};
use rmae::codespec::{enumerate_variants, CodeSpec, Constraint};
use rmae::encdec::{
    encode, encode_via_matrices, sc_decode, scl_decode, AeDecoder, BranchMode, FreezingPlan,
    SoftInput,
};
use rmae::sim::{transmit, ChannelPoint};

pub struct Case {
    pub constraint: Constraint,
    pub info: Vec<u8>,
    pub codeword: Vec<u8>,
    pub rx: SoftInput,
    pub rng: ChaCha8Rng,
}

/// Random code, variant, message and AWGN reception at 0..4 dB.
pub fn case(seed: u64, max_n: usize) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=max_n);
    let r = rng.gen_range(1..n);
    let spec = CodeSpec::reed_muller(r, n).unwrap();
    let variants = enumerate_variants(&spec);
    let variant = variants[rng.gen_range(0..variants.len())].clone();
    let constraint = Constraint::build(&spec, &variant).unwrap();
    let info: Vec<u8> = (0..spec.dim()).map(|_| rng.gen_range(0..2)).collect();
    let codeword = encode(&info, &constraint).unwrap();
    let ch = ChannelPoint::new(rng.gen_range(0.0..4.0), spec.rate()).unwrap();
    let rx = transmit(&codeword, &ch, &mut rng);
    Case {
        constraint,
        info,
        codeword,
        rx,
        rng,
    }
}

fn ensemble(c: &Case, group: &Group, size: usize, with_identity: bool) -> Vec<AffinePerm> {
    let n = c.constraint.spec().n();
    let avail = group.size(n).unwrap() as usize - 1;
    let mut perms = sample_group(group, n, size.min(avail), c.rng.clone().gen()).unwrap();
    if with_identity {
        perms.retain(|p| !p.is_identity());
        perms.insert(0, AffinePerm::identity(n));
    }
    perms
}

/// Encoding through the rule table agrees with the matrices, and every
/// decoder returns the message from a noise-free reception.
pub fn round_trip(cases: u64, seed: u64) -> usize {
    (0..cases)
        .filter(|&i| {
            let c = case(seed.wrapping_add(i), 7);
            let rx = SoftInput::noiseless(&c.codeword, 4.0);
            let ok_matrix = encode_via_matrices(&c.info, &c.constraint).unwrap() == c.codeword;
            let ok_sc = sc_decode(&rx, &c.constraint).unwrap().info_bits == c.info;
            let ok_scl = scl_decode(&rx, &c.constraint, 4).unwrap()[0].info_bits == c.info;
            let perms = ensemble(&c, &Group::StablePl, 4, false);
            let ae = AeDecoder::new(Arc::new(c.constraint.clone()), perms, 2, BranchMode::Shared).unwrap();
            let ok_ae = ae.decode(&rx, &mut ae.workspace().unwrap()).unwrap().info_bits == c.info;
            !(ok_matrix && ok_sc && ok_scl && ok_ae)
        })
        .count()
}

/// A list of one behaves exactly like successive cancellation.
pub fn list_one_is_sc(cases: u64, seed: u64) -> usize {
    (0..cases)
        .filter(|&i| {
            let c = case(seed.wrapping_add(i), 8);
            let sc = sc_decode(&c.rx, &c.constraint).unwrap();
            let scl = scl_decode(&c.rx, &c.constraint, 1).unwrap();
            scl.len() != 1 || scl[0].codeword != sc.codeword || scl[0].info_bits != sc.info_bits
        })
        .count()
}

/// With the identity in the ensemble the decision is never farther from the
/// reception than the plain list decoder's.
pub fn identity_dominance(cases: u64, seed: u64) -> usize {
    (0..cases)
        .filter(|&i| {
            let c = case(seed.wrapping_add(i), 7);
            let list = 1 << (i % 4);
            let perms = ensemble(&c, &Group::StablePl, 4, true);
            let ae = AeDecoder::new(Arc::new(c.constraint.clone()), perms, list, BranchMode::Shared).unwrap();
            let ae_best = ae.decode(&c.rx, &mut ae.workspace().unwrap()).unwrap();
            let scl_best = &scl_decode(&c.rx, &c.constraint, list).unwrap()[0];
            ae_best.metric > scl_best.metric + 1e-9
        })
        .count()
}

/// Every branch winner, mapped back, is a codeword of the original code.
/// Alternates between stable shared-rule ensembles and arbitrary affine
/// ensembles with per-branch rules.
pub fn branch_validity(cases: u64, seed: u64) -> usize {
    (0..cases)
        .filter(|&i| {
            let c = case(seed.wrapping_add(i), 7);
            let (group, mode) = if i % 2 == 0 {
                (Group::StablePl, BranchMode::Shared)
            } else {
                (Group::Ga, BranchMode::Transformed)
            };
            let perms = ensemble(&c, &group, 4, false);
            let ae = AeDecoder::new(Arc::new(c.constraint.clone()), perms, 4, mode).unwrap();
            let plan = FreezingPlan::from_constraint(&c.constraint);
            let branches = ae.decode_branches(&c.rx, &mut ae.workspace().unwrap()).unwrap();
            branches.iter().any(|b| {
                !plan.contains(&b.codeword)
                    || plan.info_of_codeword(&b.codeword) != b.info_bits
                    || encode(&b.info_bits, &c.constraint).unwrap() != b.codeword
            })
        })
        .count()
}
