//! Encoding and successive-cancellation based decoding of pre-transformed
//! codes, including automorphism ensemble decoding.
//!
//! LLR sign convention: positive favours bit 0. BPSK maps 0 to +1 and 1 to -1.
//! Decoders use the min-sum check-node update and the matching path-metric
//! penalty `|llr|` for every decision that disagrees with the LLR sign.

mod ensemble;
mod list;
mod plan;
mod sc;

use std::sync::Arc;

pub use ensemble::{AeDecoder, AeWorkspace, BranchMode};
pub use list::{ListDecoder, ListPath, MAX_LIST_WORK};
pub use plan::{FreezingPlan, Slot};

use crate::autgroup::AffinePerm;
use crate::codespec::Constraint;
use crate::error::{Error, Result};
use crate::gf2::polar_transform;

/// LLR magnitude cap applied to channel outputs.
pub const LLR_CLIP: f64 = 1.0e4;

// The kernels below are written without data-dependent branches; noisy
// signs defeat the branch predictor.

const SIGN: u64 = 1 << 63;

/// Min-sum check-node update: negative iff exactly one input is negative.
#[inline]
pub(crate) fn f_minsum(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    let neg = (a < 0.0) != (b < 0.0);
    f64::from_bits(m.to_bits() | (u64::from(neg) << 63))
}

/// Variable-node update `b + (1 - 2 left_bit) a`.
#[inline]
pub(crate) fn g_combine(a: f64, b: f64, left_bit: u8) -> f64 {
    b + f64::from_bits(a.to_bits() ^ (u64::from(left_bit & 1) * SIGN))
}

/// Path-metric increment for deciding `bit` against `llr`.
#[inline]
pub(crate) fn penalty(llr: f64, bit: u8) -> f64 {
    let mismatch = (bit == 1) != (llr < 0.0);
    f64::from_bits(llr.abs().to_bits() & (u64::from(mismatch) * !SIGN))
}

/// Channel observation and the LLRs derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftInput {
    pub llrs: Vec<f64>,
    /// Received BPSK samples, kept for least-squares selection.
    pub y: Vec<f64>,
}

impl SoftInput {
    /// AWGN observation with noise variance `sigma2`: `llr = 2 y / sigma2`,
    /// clipped to [`LLR_CLIP`].
    pub fn from_observation(y: Vec<f64>, sigma2: f64) -> Self {
        let llrs = y
            .iter()
            .map(|&v| (2.0 * v / sigma2).clamp(-LLR_CLIP, LLR_CLIP))
            .collect();
        SoftInput { llrs, y }
    }

    /// LLRs without a separate observation; selection then correlates
    /// against the LLRs themselves.
    pub fn from_llrs(llrs: Vec<f64>) -> Self {
        let llrs: Vec<f64> = llrs.into_iter().map(|l| l.clamp(-LLR_CLIP, LLR_CLIP)).collect();
        SoftInput {
            y: llrs.clone(),
            llrs,
        }
    }

    /// Noise-free reception of codeword `x` with LLR magnitude `magnitude`.
    pub fn noiseless(x: &[u8], magnitude: f64) -> Self {
        let y: Vec<f64> = x.iter().map(|&b| bpsk(b)).collect();
        let llrs = y.iter().map(|&s| (s * magnitude).clamp(-LLR_CLIP, LLR_CLIP)).collect();
        SoftInput { llrs, y }
    }

    pub fn len(&self) -> usize {
        self.llrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.llrs.is_empty()
    }

    /// Both vectors moved through `p` (entry `i` lands at `perm[i]`).
    pub fn permuted(&self, p: &AffinePerm) -> SoftInput {
        SoftInput {
            llrs: p.apply(&self.llrs),
            y: p.apply(&self.y),
        }
    }
}

#[inline]
pub fn bpsk(bit: u8) -> f64 {
    1.0 - 2.0 * f64::from(bit)
}

/// Squared Euclidean distance between the BPSK image of `x` and `y`.
pub fn least_squares(x: &[u8], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(&b, &v)| (v - bpsk(b)).powi(2)).sum()
}

/// A decoded codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub codeword: Vec<u8>,
    pub info_bits: Vec<u8>,
    /// Least-squares distance to the observation.
    pub metric: f64,
    /// Decoder path metric; zero when not meaningful.
    pub path_metric: f64,
}

impl DecodeResult {
    fn from_input_vector(u: Vec<u8>, plan: &FreezingPlan, y: &[f64], path_metric: f64) -> Self {
        let info_bits = plan.info_positions().iter().map(|&i| u[i]).collect();
        let mut codeword = u;
        polar_transform(&mut codeword);
        DecodeResult {
            metric: least_squares(&codeword, y),
            codeword,
            info_bits,
            path_metric,
        }
    }
}

fn check_len(s: &SoftInput, c: &Constraint) -> Result<()> {
    let len = c.spec().len();
    if s.llrs.len() != len || s.y.len() != len {
        return Err(Error::DimensionMismatch(format!(
            "soft input has {} LLRs and {} samples, code length is {len}",
            s.llrs.len(),
            s.y.len()
        )));
    }
    Ok(())
}

/// Encodes `v` by placing it on the information set and filling the frozen
/// positions by rule, then applying `G_N`.
pub fn encode(v: &[u8], c: &Constraint) -> Result<Vec<u8>> {
    FreezingPlan::from_constraint(c).encode(v)
}

/// Encodes through the matrices: `x = (v W) G_N`.
pub fn encode_via_matrices(v: &[u8], c: &Constraint) -> Result<Vec<u8>> {
    let mut x = c.w().vec_mul(v)?;
    polar_transform(&mut x);
    Ok(x)
}

/// Successive-cancellation decoding.
pub fn sc_decode(s: &SoftInput, c: &Constraint) -> Result<DecodeResult> {
    check_len(s, c)?;
    let plan = FreezingPlan::from_constraint(c);
    let out = sc::decode(&s.llrs, &plan);
    debug_assert_eq!({
        let mut x = out.u.clone();
        polar_transform(&mut x);
        x
    }, out.x);
    Ok(DecodeResult::from_input_vector(out.u, &plan, &s.y, out.path_metric))
}

/// SC decoding under an arbitrary plan.
pub fn sc_decode_plan(s: &SoftInput, plan: &FreezingPlan) -> DecodeResult {
    let out = sc::decode(&s.llrs, plan);
    DecodeResult::from_input_vector(out.u, plan, &s.y, out.path_metric)
}

/// SC-list decoding; at most `list` candidates sorted by path metric.
pub fn scl_decode(s: &SoftInput, c: &Constraint, list: usize) -> Result<Vec<DecodeResult>> {
    check_len(s, c)?;
    let plan = FreezingPlan::from_constraint(c);
    let mut dec = ListDecoder::new(c.spec().n(), list)?;
    Ok(dec
        .decode(&s.llrs, &plan)?
        .into_iter()
        .map(|p| DecodeResult::from_input_vector(p.u, &plan, &s.y, p.path_metric))
        .collect())
}

/// The candidate closest to `y` in Euclidean distance; first one on ties.
pub fn select_ml(candidates: &[DecodeResult], y: &[f64]) -> Result<DecodeResult> {
    let mut best: Option<(f64, &DecodeResult)> = None;
    for cand in candidates {
        let d = least_squares(&cand.codeword, y);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, cand));
        }
    }
    let (d, cand) = best.ok_or(Error::Empty("candidate list"))?;
    Ok(DecodeResult {
        metric: d,
        ..cand.clone()
    })
}

/// Automorphism ensemble decoding with one shared constraint; every
/// permutation must leave the constraint invariant.
pub fn ae_decode(
    s: &SoftInput,
    perms: &[AffinePerm],
    c: &Constraint,
    list: usize,
) -> Result<DecodeResult> {
    check_len(s, c)?;
    let ae = AeDecoder::new(Arc::new(c.clone()), perms.to_vec(), list, BranchMode::Shared)?;
    let mut ws = ae.workspace()?;
    ae.decode(s, &mut ws)
}
