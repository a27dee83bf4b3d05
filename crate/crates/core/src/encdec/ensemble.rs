use std::sync::Arc;

use super::list::ListDecoder;
use super::plan::FreezingPlan;
use super::{least_squares, select_ml, DecodeResult, SoftInput};
use crate::autgroup::{is_stable, transform_constraint, AffinePerm};
use crate::codespec::Constraint;
use crate::error::{Error, Result};
use crate::gf2::polar_transform;

/// How branch decoders obtain their freezing rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchMode {
    /// One rule table shared by all branches. Requires every permutation to
    /// leave the constraint invariant.
    Shared,
    /// Each branch derives its own rules from the transformed constraint
    /// matrix of its permutation.
    Transformed,
}

struct Branch {
    perm: AffinePerm,
    plan: Arc<FreezingPlan>,
}

/// Automorphism ensemble decoder: `M` SCL decoders on permuted copies of the
/// observation, the least-squares best of the back-permuted winners is kept.
pub struct AeDecoder {
    constraint: Arc<Constraint>,
    code_plan: Arc<FreezingPlan>,
    branches: Vec<Branch>,
    list: usize,
    mode: BranchMode,
}

/// Per-thread scratch space for [`AeDecoder`].
pub struct AeWorkspace {
    dec: ListDecoder,
    llrs: Vec<f64>,
    u: Vec<u8>,
}

impl AeDecoder {
    pub fn new(
        constraint: Arc<Constraint>,
        perms: Vec<AffinePerm>,
        list: usize,
        mode: BranchMode,
    ) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::Empty("automorphism ensemble"));
        }
        let n = constraint.spec().n();
        if let Some(p) = perms.iter().find(|p| p.n() != n) {
            return Err(Error::DimensionMismatch(format!(
                "permutation acts on n = {}, code has n = {n}",
                p.n()
            )));
        }
        let code_plan = Arc::new(FreezingPlan::from_constraint(&constraint));
        let branches = match mode {
            BranchMode::Shared => {
                for (i, p) in perms.iter().enumerate() {
                    if !is_stable(&constraint, p)? {
                        return Err(Error::UnstablePermutation(i));
                    }
                }
                perms
                    .into_iter()
                    .map(|perm| Branch {
                        perm,
                        plan: Arc::clone(&code_plan),
                    })
                    .collect()
            }
            BranchMode::Transformed => perms
                .into_iter()
                .map(|perm| {
                    let vt = transform_constraint(constraint.v(), &perm)?;
                    Ok(Branch {
                        plan: Arc::new(FreezingPlan::from_matrix(&vt)?),
                        perm,
                    })
                })
                .collect::<Result<_>>()?,
        };
        Ok(AeDecoder {
            constraint,
            code_plan,
            branches,
            list,
            mode,
        })
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    pub fn mode(&self) -> BranchMode {
        self.mode
    }

    pub fn ensemble_size(&self) -> usize {
        self.branches.len()
    }

    pub fn list_size(&self) -> usize {
        self.list
    }

    pub fn perms(&self) -> impl Iterator<Item = &AffinePerm> {
        self.branches.iter().map(|b| &b.perm)
    }

    /// Number of distinct rule tables held by the branches.
    pub fn stored_plans(&self) -> usize {
        let mut distinct: Vec<&Arc<FreezingPlan>> = Vec::new();
        for b in &self.branches {
            if !distinct.iter().any(|d| Arc::ptr_eq(d, &b.plan)) {
                distinct.push(&b.plan);
            }
        }
        distinct.len()
    }

    pub fn workspace(&self) -> Result<AeWorkspace> {
        let n = self.constraint.spec().n();
        Ok(AeWorkspace {
            dec: ListDecoder::new(n, self.list)?,
            llrs: vec![0.0; 1 << n],
            u: vec![0; 1 << n],
        })
    }

    /// Winner of every branch, mapped back to the original coordinates.
    pub fn decode_branches(&self, s: &SoftInput, ws: &mut AeWorkspace) -> Result<Vec<DecodeResult>> {
        let len = self.code_plan.len();
        if s.llrs.len() != len || s.y.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "soft input length {} for code length {len}",
                s.llrs.len()
            )));
        }
        self.branches
            .iter()
            .map(|b| {
                b.perm.apply_into(&s.llrs, &mut ws.llrs);
                let path_metric = ws.dec.decode_best(&ws.llrs, &b.plan, &mut ws.u)?;
                polar_transform(&mut ws.u);
                let codeword = b.perm.apply_inverse(&ws.u);
                Ok(DecodeResult {
                    info_bits: self.code_plan.info_of_codeword(&codeword),
                    metric: least_squares(&codeword, &s.y),
                    codeword,
                    path_metric,
                })
            })
            .collect()
    }

    pub fn decode(&self, s: &SoftInput, ws: &mut AeWorkspace) -> Result<DecodeResult> {
        let winners = self.decode_branches(s, ws)?;
        select_ml(&winners, &s.y)
    }
}
