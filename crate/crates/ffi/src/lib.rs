//! C ABI over the core library.
//!
//! Objects cross the boundary as opaque pointers created by `*_new` and
//! released by the matching `*_free`. Every fallible call returns an
//! [`RmaeStatus`]; the message of the last failure on the calling thread is
//! available from [`rmae_last_error`]. Bit vectors are arrays of `uint8_t`
//! holding 0 or 1.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;
use std::sync::Arc;

use rmae::analysis::{memory_requirements, truncated_union_bound, MemoryScenario, WeightSpectrum};
use rmae::autgroup::{is_stable, sample_group, AffinePerm, Group};
use rmae::codespec::{CodeSpec, Constraint};
use rmae::encdec::{AeDecoder, AeWorkspace, BranchMode, FreezingPlan, ListDecoder, SoftInput};
use rmae::gf2::BitMatrix;
use rmae::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmaeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    UnstablePermutation = 4,
    ResourceCap = 5,
    Parse = 6,
    Internal = 7,
}

/// Storage model for [`rmae_memory_requirements`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmaeMemoryScenario {
    Stable = 0,
    UnknownPerms = 1,
}

/// A pre-transformed Reed-Muller code.
pub struct RmaeConstraint {
    inner: Arc<Constraint>,
    plan: FreezingPlan,
}

/// An automorphism ensemble decoder with its scratch space.
pub struct RmaeAeDecoder {
    inner: AeDecoder,
    ws: AeWorkspace,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> RmaeStatus {
    match e {
        Error::DimensionMismatch(_) | Error::DimensionOverflow(_) => RmaeStatus::DimensionMismatch,
        Error::UnstablePermutation(_) => RmaeStatus::UnstablePermutation,
        Error::ResourceCap(_) => RmaeStatus::ResourceCap,
        Error::Parse(_) => RmaeStatus::Parse,
        Error::Io(_) => RmaeStatus::Internal,
        _ => RmaeStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RmaeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RmaeStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            RmaeStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            RmaeStatus::Internal
        }
    }
}

unsafe fn slice_in<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn slice_out<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn obj<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

fn copy_exact(src: &[u8], dst: &mut [u8], what: &str) -> Result<(), Fail> {
    if src.len() != dst.len() {
        return Err(Error::DimensionMismatch(format!(
            "{what} buffer holds {} entries, {} needed",
            dst.len(),
            src.len()
        ))
        .into());
    }
    dst.copy_from_slice(src);
    Ok(())
}

fn boxed_constraint(c: Constraint) -> *mut RmaeConstraint {
    let plan = FreezingPlan::from_constraint(&c);
    Box::into_raw(Box::new(RmaeConstraint {
        inner: Arc::new(c),
        plan,
    }))
}

/// Message of the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rmae_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds `R(r, n)` with the dynamic classes whose weights are listed in
/// `weights`. Pass `full = true` to enable every class and ignore `weights`.
///
/// # Safety
/// `weights` must point to `weights_len` readable entries (or be null when
/// `weights_len` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rmae_constraint_new(
    r: usize,
    n: usize,
    weights: *const usize,
    weights_len: usize,
    full: bool,
    out: *mut *mut RmaeConstraint,
) -> RmaeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let spec = CodeSpec::reed_muller(r, n)?;
        let c = if full {
            Constraint::full(&spec)
        } else {
            Constraint::build(&spec, slice_in(weights, weights_len, "weights")?)?
        };
        *out = boxed_constraint(c);
        Ok(())
    })
}

/// Parses a constraint file.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rmae_constraint_from_toml(
    text: *const c_char,
    out: *mut *mut RmaeConstraint,
) -> RmaeStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if text.is_null() {
            return Err(Fail::Null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Error::Parse(format!("constraint text is not UTF-8: {e}")))?;
        *out = boxed_constraint(Constraint::from_toml(text)?);
        Ok(())
    })
}

/// # Safety
/// `c` must come from a constructor of this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rmae_constraint_free(c: *mut RmaeConstraint) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Code length `N`; 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rmae_constraint_length(c: *const RmaeConstraint) -> usize {
    c.as_ref().map_or(0, |c| c.inner.spec().len())
}

/// Code dimension `K`; 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rmae_constraint_dimension(c: *const RmaeConstraint) -> usize {
    c.as_ref().map_or(0, |c| c.inner.spec().dim())
}

/// Number of dynamic frozen bits; 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rmae_constraint_dynamic_count(c: *const RmaeConstraint) -> usize {
    c.as_ref().map_or(0, |c| c.inner.dynamic_count())
}

/// Encodes `K` information bits into `N` code bits.
///
/// # Safety
/// `info` must hold `info_len` bytes and `codeword` `codeword_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn rmae_encode(
    c: *const RmaeConstraint,
    info: *const u8,
    info_len: usize,
    codeword: *mut u8,
    codeword_len: usize,
) -> RmaeStatus {
    guard(|| {
        let c = obj(c, "constraint")?;
        let x = c.plan.encode(slice_in(info, info_len, "info")?)?;
        copy_exact(&x, slice_out(codeword, codeword_len, "codeword")?, "codeword")
    })
}

/// Whether the affine map `z -> A z + b` leaves the constraint invariant.
/// `a` holds `n * n` entries in row-major order, `b` holds `n`.
///
/// # Safety
/// `a`, `b` and `stable` must be valid for the stated sizes.
#[no_mangle]
pub unsafe extern "C" fn rmae_is_stable(
    c: *const RmaeConstraint,
    a: *const u8,
    b: *const u8,
    n: usize,
    stable: *mut bool,
) -> RmaeStatus {
    guard(|| {
        let c = obj(c, "constraint")?;
        let stable = out_ptr(stable, "stable")?;
        let a = slice_in(a, n * n, "a")?;
        let rows: Vec<&[u8]> = a.chunks(n.max(1)).collect();
        let p = AffinePerm::new(BitMatrix::from_rows(&rows)?, slice_in(b, n, "b")?.to_vec())?;
        *stable = is_stable(&c.inner, &p)?;
        Ok(())
    })
}

/// Ensemble decoder with `m` distinct members of `group` (`identity`,
/// `blta-pl`, `pl`, `lta`, `ga` or `blta:s1,s2,...`) sampled with `seed`.
/// With `transformed = false` every member must leave the constraint
/// invariant; otherwise each branch derives its own freezing rules.
///
/// # Safety
/// `c` must be a live handle, `group` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rmae_ae_decoder_new(
    c: *const RmaeConstraint,
    group: *const c_char,
    m: usize,
    seed: u64,
    list: usize,
    transformed: bool,
    out: *mut *mut RmaeAeDecoder,
) -> RmaeStatus {
    guard(|| {
        let c = obj(c, "constraint")?;
        let out = out_ptr(out, "out")?;
        if group.is_null() {
            return Err(Fail::Null("group"));
        }
        let group: Group = CStr::from_ptr(group)
            .to_str()
            .map_err(|e| Error::Parse(format!("group name is not UTF-8: {e}")))?
            .parse()?;
        let perms = sample_group(&group, c.inner.spec().n(), m, seed)?;
        let mode = if transformed { BranchMode::Transformed } else { BranchMode::Shared };
        let inner = AeDecoder::new(Arc::clone(&c.inner), perms, list, mode)?;
        let ws = inner.workspace()?;
        *out = Box::into_raw(Box::new(RmaeAeDecoder { inner, ws }));
        Ok(())
    })
}

/// # Safety
/// `d` must come from [`rmae_ae_decoder_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rmae_ae_decoder_free(d: *mut RmaeAeDecoder) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Decodes the BPSK-AWGN observation `y` (bit 0 sent as +1) with noise
/// variance `sigma2`. Writes `K` information bits and, when `codeword` is
/// non-null, `N` code bits.
///
/// # Safety
/// `d` must be a live handle not used concurrently; buffers must be valid
/// for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn rmae_ae_decode(
    d: *mut RmaeAeDecoder,
    y: *const f64,
    len: usize,
    sigma2: f64,
    info: *mut u8,
    info_len: usize,
    codeword: *mut u8,
    codeword_len: usize,
) -> RmaeStatus {
    guard(|| {
        let d = d.as_mut().ok_or(Fail::Null("decoder"))?;
        let s = soft_input(slice_in(y, len, "y")?, sigma2)?;
        let res = d.inner.decode(&s, &mut d.ws)?;
        copy_exact(&res.info_bits, slice_out(info, info_len, "info")?, "info")?;
        if !codeword.is_null() {
            copy_exact(&res.codeword, slice_out(codeword, codeword_len, "codeword")?, "codeword")?;
        }
        Ok(())
    })
}

/// SC-list decoding of `y`; writes the information bits of the path with the
/// best metric.
///
/// # Safety
/// Buffers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn rmae_scl_decode(
    c: *const RmaeConstraint,
    y: *const f64,
    len: usize,
    sigma2: f64,
    list: usize,
    info: *mut u8,
    info_len: usize,
) -> RmaeStatus {
    guard(|| {
        let c = obj(c, "constraint")?;
        let s = soft_input(slice_in(y, len, "y")?, sigma2)?;
        if s.len() != c.plan.len() {
            return Err(Error::DimensionMismatch(format!(
                "observation has {} samples, code length is {}",
                s.len(),
                c.plan.len()
            ))
            .into());
        }
        let mut dec = ListDecoder::new(c.plan.n(), list)?;
        let mut u = vec![0u8; c.plan.len()];
        dec.decode_best(&s.llrs, &c.plan, &mut u)?;
        let bits: Vec<u8> = c.plan.info_positions().iter().map(|&i| u[i]).collect();
        copy_exact(&bits, slice_out(info, info_len, "info")?, "info")
    })
}

fn soft_input(y: &[f64], sigma2: f64) -> Result<SoftInput, Fail> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidParameters(format!("noise variance {sigma2} must be positive")).into());
    }
    Ok(SoftInput::from_observation(y.to_vec(), sigma2))
}

/// Constraint storage in bits for an `m`-branch ensemble on `R(r, n)`.
///
/// # Safety
/// `bits` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rmae_memory_requirements(
    r: usize,
    n: usize,
    m: usize,
    scenario: RmaeMemoryScenario,
    bits: *mut u64,
) -> RmaeStatus {
    guard(|| {
        let bits = out_ptr(bits, "bits")?;
        let spec = CodeSpec::reed_muller(r, n)?;
        let scenario = match scenario {
            RmaeMemoryScenario::Stable => MemoryScenario::Stable,
            RmaeMemoryScenario::UnknownPerms => MemoryScenario::UnknownPerms,
        };
        *bits = memory_requirements(&spec, m, scenario)?;
        Ok(())
    })
}

/// Truncated union bound from `len` (weight, count) pairs.
///
/// # Safety
/// `weights` and `counts` must hold `len` entries; `bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rmae_union_bound(
    weights: *const usize,
    counts: *const u64,
    len: usize,
    rate: f64,
    ebn0_db: f64,
    w_max: usize,
    bound: *mut f64,
) -> RmaeStatus {
    guard(|| {
        let bound = out_ptr(bound, "bound")?;
        let w = slice_in(weights, len, "weights")?;
        let a = slice_in(counts, len, "counts")?;
        let ws = WeightSpectrum::from_counts(w.iter().copied().zip(a.iter().copied()));
        *bound = truncated_union_bound(&ws, rate, ebn0_db, w_max)?;
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn rmae_status_name(status: RmaeStatus) -> *const c_char {
    let s: &'static CStr = match status {
        RmaeStatus::Ok => c"ok",
        RmaeStatus::NullPointer => c"null pointer",
        RmaeStatus::InvalidArgument => c"invalid argument",
        RmaeStatus::DimensionMismatch => c"dimension mismatch",
        RmaeStatus::UnstablePermutation => c"unstable permutation",
        RmaeStatus::ResourceCap => c"resource cap exceeded",
        RmaeStatus::Parse => c"parse error",
        RmaeStatus::Internal => c"internal error",
    };
    s.as_ptr()
}
