//! Affine transformations of `GF(2)^n`, the coordinate permutations they
//! induce on length-`2^n` vectors, group sampling, and the stability test for
//! dynamic freezing constraints.
//!
//! An affine map `z -> A z + b` acts on indices through their binary
//! representation: `perm[i] = bi2int(A * bits(i) + b)`. Applying it to a
//! vector moves entry `i` to position `perm[i]`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codespec::Constraint;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, MAX_LOG_LEN};

/// Largest group we are willing to list member by member.
pub const ENUMERATION_CAP: u128 = 1 << 22;

/// An invertible affine map over `GF(2)^n` with its induced index permutation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffinePerm {
    a: BitMatrix,
    b: Vec<u8>,
    perm: Vec<usize>,
}

impl AffinePerm {
    pub fn new(a: BitMatrix, b: Vec<u8>) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "affine matrix must be square, got {}x{}",
                n,
                a.cols()
            )));
        }
        if n > MAX_LOG_LEN {
            return Err(Error::DimensionOverflow(n));
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "offset has length {}, expected {n}",
                b.len()
            )));
        }
        if b.iter().any(|&x| x > 1) {
            return Err(Error::Parse("offset entries must be 0/1".into()));
        }
        if a.rank() < n {
            return Err(Error::Singular);
        }
        let masks: Vec<usize> = (0..n)
            .map(|r| a.row_support(r).iter().fold(0, |m, &c| m | 1 << c))
            .collect();
        let perm = (0..1usize << n)
            .map(|i| {
                masks.iter().zip(&b).enumerate().fold(0, |acc, (r, (&mask, &off))| {
                    let bit = ((i & mask).count_ones() as usize + off as usize) & 1;
                    acc | bit << r
                })
            })
            .collect();
        Ok(AffinePerm { a, b, perm })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(BitMatrix::identity(n), vec![0; n]).expect("identity is invertible")
    }

    /// Linear map with `A[r][sigma[r]] = 1`, i.e. `z'_r = z_{sigma(r)}`.
    pub fn from_bit_permutation(sigma: &[usize]) -> Result<Self> {
        let n = sigma.len();
        let mut seen = vec![false; n];
        for &s in sigma {
            if s >= n || std::mem::replace(&mut seen[s], true) {
                return Err(Error::NotPermutation);
            }
        }
        Self::new(BitMatrix::from_row_permutation(sigma), vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.a
    }

    pub fn offset(&self) -> &[u8] {
        &self.b
    }

    /// The induced index map.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn inverse(&self) -> AffinePerm {
        let a_inv = self.a.inverse().expect("matrix checked invertible");
        let b_inv = a_inv.transpose().vec_mul(&self.b).expect("dimensions agree");
        let mut perm = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
        }
        AffinePerm {
            a: a_inv,
            b: b_inv,
            perm,
        }
    }

    /// `out[perm[i]] = v[i]`.
    pub fn apply<T: Copy + Default>(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); v.len()];
        self.apply_into(v, &mut out);
        out
    }

    pub fn apply_into<T: Copy>(&self, v: &[T], out: &mut [T]) {
        debug_assert_eq!(v.len(), self.perm.len());
        for (i, &p) in self.perm.iter().enumerate() {
            out[p] = v[i];
        }
    }

    /// `out[i] = v[perm[i]]`, undoing [`apply`](Self::apply).
    pub fn apply_inverse<T: Copy>(&self, v: &[T]) -> Vec<T> {
        self.perm.iter().map(|&p| v[p]).collect()
    }

    /// `A` is a permutation matrix and `b = 0`.
    pub fn is_permutation_linear(&self) -> bool {
        is_permutation_matrix(&self.a) && self.b.iter().all(|&x| x == 0)
    }

    /// Block-lower-triangular with the given diagonal block sizes.
    pub fn is_blta(&self, blocks: &[usize]) -> bool {
        let n = self.n();
        if blocks.iter().sum::<usize>() != n || blocks.contains(&0) {
            return false;
        }
        let block_of = block_index(blocks);
        for r in 0..n {
            for c in self.a.row_support(r) {
                if block_of[c] > block_of[r] {
                    return false;
                }
            }
        }
        let mut start = 0;
        for &s in blocks {
            let mut blk = BitMatrix::zeros(s, s);
            for r in 0..s {
                for c in 0..s {
                    blk.set(r, c, self.a.get(start + r, start + c));
                }
            }
            if blk.rank() < s {
                return false;
            }
            start += s;
        }
        true
    }

    pub fn is_lta(&self) -> bool {
        self.is_blta(&vec![1; self.n()])
    }

    pub fn to_file(&self) -> PermFile {
        PermFile {
            n: self.n(),
            a: self.a.to_string().lines().map(str::to_owned).collect(),
            b: self.b.iter().map(|&x| if x == 1 { '1' } else { '0' }).collect(),
        }
    }
}

impl fmt::Debug for AffinePerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AffinePerm")
            .field("a", &self.a.to_rows())
            .field("b", &self.b)
            .field("perm", &self.perm)
            .finish()
    }
}

fn block_index(blocks: &[usize]) -> Vec<usize> {
    blocks
        .iter()
        .enumerate()
        .flat_map(|(bi, &s)| std::iter::repeat(bi).take(s))
        .collect()
}

pub fn is_permutation_matrix(a: &BitMatrix) -> bool {
    a.rows() == a.cols()
        && (0..a.rows()).all(|r| a.row_weight(r) == 1)
        && (0..a.cols()).all(|c| (0..a.rows()).filter(|&r| a.get(r, c)).count() == 1)
}

/// Image of row index `k` under a permutation matrix: `bits(k') = A bits(k)`.
pub fn permute_monomial(a: &BitMatrix, k: usize) -> Result<usize> {
    if !is_permutation_matrix(a) {
        return Err(Error::NotPermutation);
    }
    Ok((0..a.rows()).fold(0, |acc, r| {
        let src = a.row_support(r)[0];
        acc | ((k >> src) & 1) << r
    }))
}

/// `T^{-1}`: the `N x N` permutation matrix with a one at `(perm[i], i)`.
pub fn post_transformation_matrix(p: &AffinePerm) -> BitMatrix {
    let len = p.perm().len();
    let mut t = BitMatrix::zeros(len, len);
    for (i, &pi) in p.perm().iter().enumerate() {
        t.set(pi, i, true);
    }
    t
}

/// `V_T = V (G_N T^{-1} G_N)^T`: the constraint matrix of the permuted code
/// `{ apply(p, x) : x in C }`.
pub fn transform_constraint(v: &BitMatrix, p: &AffinePerm) -> Result<BitMatrix> {
    let len = p.perm().len();
    if v.cols() != len {
        return Err(Error::DimensionMismatch(format!(
            "constraint has {} columns, permutation acts on {len}",
            v.cols()
        )));
    }
    let g = BitMatrix::kron_power(p.n())?;
    let inner = g.mul(&post_transformation_matrix(p))?.mul(&g)?;
    v.mul(&inner.transpose())
}

/// True iff the transformed constraint spans the same row space as `c.v()`.
pub fn is_stable(c: &Constraint, p: &AffinePerm) -> Result<bool> {
    if c.spec().n() != p.n() {
        return Err(Error::DimensionMismatch(format!(
            "constraint has n = {}, permutation n = {}",
            c.spec().n(),
            p.n()
        )));
    }
    let vt = transform_constraint(c.v(), p)?;
    let rows = vt.rows();
    let (red_t, piv_t) = vt.rref();
    if piv_t.len() < rows {
        return Err(Error::RankDeficient {
            rank: piv_t.len(),
            rows,
        });
    }
    let (red, piv) = c.v().rref();
    if piv.len() < c.v().rows() {
        return Err(Error::RankDeficient {
            rank: piv.len(),
            rows: c.v().rows(),
        });
    }
    let equal = red == red_t;
    if equal && !c.w().mul(&vt.transpose())?.is_zero() {
        return Err(Error::InvalidParameters(
            "equivalent constraint is not orthogonal to W".into(),
        ));
    }
    Ok(equal)
}

/// A family of affine transformations of `GF(2)^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Group {
    Identity,
    /// `BLTA(n-1, 1) ∩ PL`: permutations of the lower `n - 1` coordinates.
    StablePl,
    /// All permutation matrices, `b = 0`.
    Pl,
    Lta,
    Ga,
    Blta(Vec<usize>),
}

impl Group {
    /// Diagonal block structure for the affine families, `None` for the
    /// permutation-linear ones.
    fn blocks(&self, n: usize) -> Option<Vec<usize>> {
        match self {
            Group::Lta => Some(vec![1; n]),
            Group::Ga => Some(if n == 0 { vec![] } else { vec![n] }),
            Group::Blta(s) => Some(s.clone()),
            _ => None,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if n > MAX_LOG_LEN {
            return Err(Error::DimensionOverflow(n));
        }
        match self {
            Group::Blta(s) if s.iter().sum::<usize>() != n || s.contains(&0) => {
                Err(Error::InvalidParameters(format!(
                    "block structure {s:?} does not partition n = {n}"
                )))
            }
            Group::StablePl if n == 0 => Err(Error::InvalidParameters(
                "BLTA(n-1,1) needs n >= 1".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Number of members for length `2^n`, saturating at `u128::MAX`.
    pub fn size(&self, n: usize) -> Result<u128> {
        self.validate(n)?;
        Ok(match self {
            Group::Identity => 1,
            Group::StablePl => factorial(n - 1),
            Group::Pl => factorial(n),
            _ => {
                let blocks = self.blocks(n).expect("affine family");
                let mut size = 1u128.checked_shl(n as u32).unwrap_or(u128::MAX);
                let mut seen = 0usize;
                for &s in &blocks {
                    size = size.saturating_mul(gl_order(s));
                    size = size.saturating_mul(pow2(seen * s));
                    seen += s;
                }
                size
            }
        })
    }

    /// Whether `p` belongs to this group.
    pub fn contains(&self, p: &AffinePerm) -> bool {
        let n = p.n();
        match self {
            Group::Identity => p.is_identity(),
            Group::Pl => p.is_permutation_linear(),
            Group::StablePl => p.is_permutation_linear() && n > 0 && p.matrix().get(n - 1, n - 1),
            _ => self.blocks(n).is_some_and(|b| p.is_blta(&b)),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Identity => write!(f, "identity"),
            Group::StablePl => write!(f, "blta-pl"),
            Group::Pl => write!(f, "pl"),
            Group::Lta => write!(f, "lta"),
            Group::Ga => write!(f, "ga"),
            Group::Blta(s) => {
                let parts: Vec<String> = s.iter().map(ToString::to_string).collect();
                write!(f, "blta:{}", parts.join(","))
            }
        }
    }
}

/// Accepts `identity`, `blta-pl`, `pl`, `lta`, `ga` and `blta:s1,s2,...`.
impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Ok(match s.as_str() {
            "identity" | "id" => Group::Identity,
            "blta-pl" | "stable" => Group::StablePl,
            "pl" => Group::Pl,
            "lta" => Group::Lta,
            "ga" => Group::Ga,
            other => {
                let Some(list) = other.strip_prefix("blta:") else {
                    return Err(Error::Parse(format!("unknown group {other:?}")));
                };
                let blocks = list
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<usize>()
                            .map_err(|e| Error::Parse(format!("block size {x:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Group::Blta(blocks)
            }
        })
    }
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).fold(1u128, |acc, x| acc.saturating_mul(x))
}

fn pow2(e: usize) -> u128 {
    1u128.checked_shl(e as u32).unwrap_or(u128::MAX)
}

/// `|GL(s, 2)| = prod_{k<s} (2^s - 2^k)`.
fn gl_order(s: usize) -> u128 {
    (0..s).fold(1u128, |acc, k| acc.saturating_mul(pow2(s).saturating_sub(pow2(k))))
}

/// Permutation of `len` elements with the given Lehmer rank.
fn lehmer_decode(mut rank: u128, len: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..len).collect();
    let mut out = Vec::with_capacity(len);
    for i in (0..len).rev() {
        let f = factorial(i);
        let d = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(d));
    }
    out
}

/// Permutation-linear member whose `A` permutes the first `movable`
/// coordinates by the permutation of Lehmer rank `rank`.
fn pl_member(n: usize, movable: usize, rank: u128) -> AffinePerm {
    let mut sigma = lehmer_decode(rank, movable);
    sigma.extend(movable..n);
    AffinePerm::from_bit_permutation(&sigma).expect("Lehmer decode yields a permutation")
}

fn random_invertible<R: Rng>(rng: &mut R, s: usize) -> BitMatrix {
    loop {
        let mut m = BitMatrix::zeros(s, s);
        for r in 0..s {
            for c in 0..s {
                m.set(r, c, rng.gen());
            }
        }
        if m.rank() == s {
            return m;
        }
    }
}

fn random_blta<R: Rng>(rng: &mut R, blocks: &[usize]) -> AffinePerm {
    let n: usize = blocks.iter().sum();
    let block_of = block_index(blocks);
    let mut a = BitMatrix::zeros(n, n);
    let mut start = 0;
    for &s in blocks {
        let blk = random_invertible(rng, s);
        for r in 0..s {
            for c in 0..s {
                a.set(start + r, start + c, blk.get(r, c));
            }
            for c in 0..start {
                a.set(start + r, c, rng.gen());
            }
        }
        start += s;
    }
    debug_assert!((0..n).all(|r| a.row_support(r).iter().all(|&c| block_of[c] <= block_of[r])));
    let b = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
    AffinePerm::new(a, b).expect("block-triangular with invertible blocks")
}

/// Lists every member of a group of at most [`ENUMERATION_CAP`] elements.
pub fn enumerate_group(group: &Group, n: usize) -> Result<Vec<AffinePerm>> {
    let size = group.size(n)?;
    if size > ENUMERATION_CAP {
        return Err(Error::ResourceCap(format!(
            "group {group} has {size} members for n = {n}"
        )));
    }
    Ok(match group {
        Group::Identity => vec![AffinePerm::identity(n)],
        Group::StablePl => (0..size).map(|k| pl_member(n, n - 1, k)).collect(),
        Group::Pl => (0..size).map(|k| pl_member(n, n, k)).collect(),
        _ => {
            let blocks = group.blocks(n).expect("affine family");
            let block_of = block_index(&blocks);
            let free: Vec<(usize, usize)> = (0..n)
                .flat_map(|r| (0..n).map(move |c| (r, c)))
                .filter(|&(r, c)| block_of[c] <= block_of[r])
                .collect();
            let mut out = Vec::new();
            for pattern in 0u64..1 << free.len() {
                let mut a = BitMatrix::zeros(n, n);
                for (bit, &(r, c)) in free.iter().enumerate() {
                    a.set(r, c, (pattern >> bit) & 1 == 1);
                }
                let probe = AffinePerm {
                    a: a.clone(),
                    b: vec![0; n],
                    perm: Vec::new(),
                };
                if !probe.is_blta(&blocks) {
                    continue;
                }
                for off in 0u64..1 << n {
                    let b = (0..n).map(|t| ((off >> t) & 1) as u8).collect();
                    out.push(AffinePerm::new(a.clone(), b)?);
                }
            }
            debug_assert_eq!(out.len() as u128, size);
            out
        }
    })
}

/// `count` distinct members of `group`, deterministic in `seed`.
///
/// The identity is left out unless `count` equals the group size, in which
/// case the whole group is returned.
pub fn sample_group(group: &Group, n: usize, count: usize, seed: u64) -> Result<Vec<AffinePerm>> {
    let size = group.size(n)?;
    let requested = count as u128;
    if requested > size {
        return Err(Error::GroupTooSmall {
            requested,
            available: size,
        });
    }
    if requested == size {
        return enumerate_group(group, n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match group {
        Group::Identity => unreachable!("count < 1 handled above"),
        Group::StablePl | Group::Pl => {
            let movable = if *group == Group::Pl { n } else { n - 1 };
            let pool = usize::try_from(size - 1).map_err(|_| {
                Error::ResourceCap(format!("group {group} too large to index for n = {n}"))
            })?;
            Ok(index::sample(&mut rng, pool, count)
                .into_iter()
                .map(|k| pl_member(n, movable, k as u128 + 1))
                .collect())
        }
        _ => {
            let blocks = group.blocks(n).expect("affine family");
            let mut seen = HashSet::new();
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let p = random_blta(&mut rng, &blocks);
                if !p.is_identity() && seen.insert(p.perm.clone()) {
                    out.push(p);
                }
            }
            Ok(out)
        }
    }
}

/// Distinct non-identity members of `BLTA(n-1,1) ∩ PL`.
pub fn sample_blta_pl(n: usize, count: usize, seed: u64) -> Result<Vec<AffinePerm>> {
    sample_group(&Group::StablePl, n, count, seed)
}

/// Distinct members of `BLTA(blocks)` with random invertible diagonal blocks,
/// random sub-diagonal entries and random offset.
pub fn sample_blta(blocks: &[usize], n: usize, count: usize, seed: u64) -> Result<Vec<AffinePerm>> {
    sample_group(&Group::Blta(blocks.to_vec()), n, count, seed)
}

/// Outcome of checking many permutations against one constraint.
#[derive(Debug, Clone)]
pub struct SurveyReport {
    pub tested: usize,
    pub stable: usize,
    pub exhaustive: bool,
    /// At most [`SurveyReport::MAX_COUNTEREXAMPLES`] unstable permutations.
    pub counterexamples: Vec<AffinePerm>,
}

impl SurveyReport {
    pub const MAX_COUNTEREXAMPLES: usize = 10;

    pub fn fraction(&self) -> f64 {
        if self.tested == 0 {
            return 1.0;
        }
        self.stable as f64 / self.tested as f64
    }
}

/// Checks stability over `samples` members of `group`. When `samples`
/// reaches the group size the whole group is checked.
pub fn stability_survey(
    c: &Constraint,
    group: &Group,
    samples: usize,
    seed: u64,
) -> Result<SurveyReport> {
    let n = c.spec().n();
    let size = group.size(n)?;
    let exhaustive = samples as u128 >= size;
    let perms = if exhaustive {
        enumerate_group(group, n)?
    } else {
        sample_group(group, n, samples, seed)?
    };
    let verdicts = perms
        .par_iter()
        .map(|p| is_stable(c, p))
        .collect::<Result<Vec<bool>>>()?;
    let counterexamples = perms
        .iter()
        .zip(&verdicts)
        .filter(|(_, &ok)| !ok)
        .map(|(p, _)| p.clone())
        .take(SurveyReport::MAX_COUNTEREXAMPLES)
        .collect();
    Ok(SurveyReport {
        tested: perms.len(),
        stable: verdicts.iter().filter(|&&ok| ok).count(),
        exhaustive,
        counterexamples,
    })
}

/// Serialized affine permutation: `A` as rows of 0/1 characters, `b` as a
/// 0/1 string (entry `t` is the offset of coordinate `t`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermFile {
    pub n: usize,
    pub a: Vec<String>,
    pub b: String,
}

impl PermFile {
    pub fn into_perm(self) -> Result<AffinePerm> {
        let a: BitMatrix = self.a.join("\n").parse()?;
        if a.rows() != self.n || a.cols() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "permutation file declares n = {} but A is {}x{}",
                self.n,
                a.rows(),
                a.cols()
            )));
        }
        let b = self
            .b
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("offset character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        AffinePerm::new(a, b)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PermListFile {
    #[serde(rename = "perm", default)]
    pub perms: Vec<PermFile>,
}

pub fn perms_to_toml(perms: &[AffinePerm]) -> String {
    let file = PermListFile {
        perms: perms.iter().map(AffinePerm::to_file).collect(),
    };
    toml::to_string(&file).expect("permutation list serializes")
}

pub fn perms_from_toml(text: &str) -> Result<Vec<AffinePerm>> {
    let file: PermListFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.perms.into_iter().map(PermFile::into_perm).collect()
}
