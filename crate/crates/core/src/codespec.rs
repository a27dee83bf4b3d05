//! Reed-Muller information sets, the monomial view of `G_N` rows, and the
//! complement-pairing dynamic freezing constraints.
//!
//! Index bit `t` is the coefficient of `2^t`; bit `n-1` is the most
//! significant one, so `k >= N/2` exactly when that bit is set.
//!
//! A frozen index `i` whose top bit is set is paired with its bitwise
//! complement `j = !i` (which lies below `N/2`). When `j` carries information
//! and the Hamming weight of `i` belongs to the selected variant, `u_i` is
//! forced to equal `u_j`; otherwise `u_i = 0`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, MAX_LOG_LEN};

/// Hamming weight of the binary representation.
#[inline]
pub fn weight(k: usize) -> usize {
    k.count_ones() as usize
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Parameters of the underlying code `R(r, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    n: usize,
    r: usize,
    info_set: Vec<usize>,
    frozen_set: Vec<usize>,
    is_info: Vec<bool>,
}

impl CodeSpec {
    /// `R(r, n)`: information indices are those whose binary weight is at
    /// least `n - r`.
    pub fn reed_muller(r: usize, n: usize) -> Result<Self> {
        if n > MAX_LOG_LEN {
            return Err(Error::DimensionOverflow(n));
        }
        if r > n {
            return Err(Error::InvalidParameters(format!(
                "order r = {r} exceeds n = {n}"
            )));
        }
        let len = 1usize << n;
        let is_info: Vec<bool> = (0..len).map(|k| weight(k) + r >= n).collect();
        let (info_set, frozen_set) = (0..len).partition(|&k| is_info[k]);
        Ok(CodeSpec {
            n,
            r,
            info_set,
            frozen_set,
            is_info,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Block length `N = 2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    /// Dimension `K`.
    pub fn dim(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.dim() as f64 / self.len() as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    pub fn is_info(&self, k: usize) -> bool {
        self.is_info[k]
    }

    /// Minimum distance `2^(n-r)` of the underlying code.
    pub fn min_distance(&self) -> usize {
        1 << (self.n - self.r)
    }

    /// `K` from the binomial sum, independent of the set construction.
    pub fn dimension_formula(r: usize, n: usize) -> u64 {
        (n - r.min(n)..=n).map(|i| binomial(n, i)).sum()
    }

    fn top_bit(&self, k: usize) -> bool {
        self.n > 0 && (k >> (self.n - 1)) & 1 == 1
    }

    fn complement(&self, k: usize) -> usize {
        !k & (self.len() - 1)
    }

    /// Frozen indices with the top bit set and Hamming weight `w`.
    pub fn frozen_upper_class(&self, w: usize) -> Vec<usize> {
        self.frozen_set
            .iter()
            .copied()
            .filter(|&k| self.top_bit(k) && weight(k) == w)
            .collect()
    }

    /// Information indices with the top bit clear and Hamming weight `w`.
    pub fn info_lower_class(&self, w: usize) -> Vec<usize> {
        self.info_set
            .iter()
            .copied()
            .filter(|&k| !self.top_bit(k) && weight(k) == w)
            .collect()
    }

    /// Weights `w` for which a dynamic class exists: both the frozen upper
    /// class of weight `w` and the information lower class of weight `n - w`
    /// are non-empty.
    pub fn dynamic_weights(&self) -> Vec<usize> {
        (1..self.n)
            .filter(|&w| {
                !self.frozen_upper_class(w).is_empty()
                    && !self.info_lower_class(self.n - w).is_empty()
            })
            .collect()
    }
}

/// Variables (positions of zero bits of `k`) of the monomial for row `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    variables: Vec<usize>,
}

impl Monomial {
    pub fn new(mut variables: Vec<usize>) -> Self {
        variables.sort_unstable();
        variables.dedup();
        Monomial { variables }
    }

    /// Monomial of row `k` of `G_N` for `N = 2^n`.
    pub fn of_row(k: usize, n: usize) -> Self {
        Monomial {
            variables: (0..n).filter(|&j| (k >> j) & 1 == 0).collect(),
        }
    }

    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn degree(&self) -> usize {
        self.variables.len()
    }

    /// Row index this monomial corresponds to in `G_{2^n}`.
    pub fn row_index(&self, n: usize) -> usize {
        let mask = self.variables.iter().fold(0usize, |acc, &j| acc | (1 << j));
        !mask & ((1usize << n) - 1)
    }

    /// Evaluation vector: coordinate `m` is the monomial at the point whose
    /// binary representation is `N - m - 1`.
    pub fn evaluate(&self, n: usize) -> Result<Vec<u8>> {
        if n > MAX_LOG_LEN {
            return Err(Error::DimensionOverflow(n));
        }
        if let Some(&bad) = self.variables.iter().find(|&&j| j >= n) {
            return Err(Error::InvalidParameters(format!(
                "variable z_{bad} does not exist for n = {n}"
            )));
        }
        let len = 1usize << n;
        Ok((0..len)
            .map(|m| {
                let point = len - m - 1;
                self.variables.iter().all(|&j| (point >> j) & 1 == 1) as u8
            })
            .collect())
    }
}

/// How a frozen position is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FrozenRule {
    Zero,
    Dynamic { source: usize },
}

/// A pre-transformed code: the underlying Reed-Muller spec together with the
/// dynamic freezing rules and their matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    spec: CodeSpec,
    variant: Vec<usize>,
    /// One entry per frozen index, aligned with `spec.frozen_set()`.
    rules: Vec<FrozenRule>,
    v: BitMatrix,
    w: BitMatrix,
}

impl Constraint {
    /// Builds the constraint keeping the dynamic classes whose frozen-side
    /// weights are listed in `variant`.
    pub fn build(spec: &CodeSpec, variant: &[usize]) -> Result<Self> {
        let allowed = spec.dynamic_weights();
        let variant: BTreeSet<usize> = variant.iter().copied().collect();
        if let Some(&bad) = variant.iter().find(|w| !allowed.contains(w)) {
            return Err(Error::InvalidVariant(format!(
                "weight class {bad} is empty for R({}, {}); valid classes are {allowed:?}",
                spec.r(),
                spec.n()
            )));
        }
        let rules: Vec<FrozenRule> = spec
            .frozen_set()
            .iter()
            .map(|&i| {
                if !spec.top_bit(i) || !variant.contains(&weight(i)) {
                    return FrozenRule::Zero;
                }
                let j = spec.complement(i);
                if spec.is_info(j) {
                    FrozenRule::Dynamic { source: j }
                } else {
                    FrozenRule::Zero
                }
            })
            .collect();
        Ok(Self::assemble(spec.clone(), variant.into_iter().collect(), rules))
    }

    /// Builds the constraint with every dynamic class active.
    pub fn full(spec: &CodeSpec) -> Self {
        Self::build(spec, &spec.dynamic_weights()).expect("all dynamic weights are valid")
    }

    fn assemble(spec: CodeSpec, variant: Vec<usize>, rules: Vec<FrozenRule>) -> Self {
        let len = spec.len();
        let mut v = BitMatrix::zeros(spec.frozen_set().len(), len);
        for (row, (&i, rule)) in spec.frozen_set().iter().zip(&rules).enumerate() {
            v.set(row, i, true);
            if let FrozenRule::Dynamic { source } = *rule {
                v.set(row, source, true);
            }
        }
        let mut w = BitMatrix::zeros(spec.dim(), len);
        let mut info_row = vec![usize::MAX; len];
        for (row, &i) in spec.info_set().iter().enumerate() {
            w.set(row, i, true);
            info_row[i] = row;
        }
        for (&d, rule) in spec.frozen_set().iter().zip(&rules) {
            if let FrozenRule::Dynamic { source } = *rule {
                w.set(info_row[source], d, true);
            }
        }
        Constraint {
            spec,
            variant,
            rules,
            v,
            w,
        }
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    /// Active dynamic weight classes, ascending.
    pub fn variant(&self) -> &[usize] {
        &self.variant
    }

    /// Frozen rules aligned with `spec().frozen_set()`.
    pub fn rules(&self) -> &[FrozenRule] {
        &self.rules
    }

    /// `(frozen index, rule)` pairs in index order.
    pub fn frozen_rules(&self) -> impl Iterator<Item = (usize, FrozenRule)> + '_ {
        self.spec.frozen_set().iter().copied().zip(self.rules.iter().copied())
    }

    /// `(target, source)` pairs of the dynamic frozen bits.
    pub fn dynamic_pairs(&self) -> Vec<(usize, usize)> {
        self.frozen_rules()
            .filter_map(|(i, r)| match r {
                FrozenRule::Dynamic { source } => Some((i, source)),
                FrozenRule::Zero => None,
            })
            .collect()
    }

    pub fn dynamic_count(&self) -> usize {
        self.dynamic_pairs().len()
    }

    /// The `(N-K) x N` constraint matrix, one row per frozen index.
    pub fn v(&self) -> &BitMatrix {
        &self.v
    }

    /// The `K x N` pre-transformation matrix.
    pub fn w(&self) -> &BitMatrix {
        &self.w
    }

    /// `K x N` generator matrix `W * G_N`.
    pub fn generator(&self) -> BitMatrix {
        let g = BitMatrix::kron_power(self.spec.n()).expect("n validated by CodeSpec");
        self.w.mul(&g).expect("W has N columns")
    }

    pub fn to_file(&self) -> ConstraintFile {
        ConstraintFile {
            n: self.spec.n(),
            r: self.spec.r(),
            variant: self.variant.clone(),
            rules: self
                .frozen_rules()
                .map(|(index, rule)| RuleEntry { index, rule })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("constraint file serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConstraintFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_constraint()
    }
}

/// Maximum number of dynamic frozen bits: the smaller of the number of
/// top-half frozen indices and bottom-half information indices.
pub fn max_dynamic_count(spec: &CodeSpec) -> usize {
    let upper_frozen = spec.frozen_set().iter().filter(|&&i| spec.top_bit(i)).count();
    let lower_info = spec.info_set().iter().filter(|&&j| !spec.top_bit(j)).count();
    upper_frozen.min(lower_info)
}

/// `min(2^(n-r-1), 2^r)` for `0 < r < n`.
pub fn count_stable_variants(spec: &CodeSpec) -> Result<u64> {
    let (n, r) = (spec.n(), spec.r());
    if r == 0 || r >= n {
        return Err(Error::InvalidParameters(format!(
            "stable variant count needs 0 < r < n, got R({r}, {n})"
        )));
    }
    Ok(1u64 << (n - r - 1).min(r))
}

/// Every valid variant: all subsets of the non-empty dynamic weight classes,
/// including the empty one.
pub fn enumerate_variants(spec: &CodeSpec) -> Vec<Vec<usize>> {
    let weights = spec.dynamic_weights();
    (0u64..1 << weights.len())
        .map(|mask| {
            weights
                .iter()
                .enumerate()
                .filter(|(b, _)| (mask >> b) & 1 == 1)
                .map(|(_, &w)| w)
                .collect()
        })
        .collect()
}

/// Serialized constraint: code parameters, variant and the frozen rule table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintFile {
    pub n: usize,
    pub r: usize,
    pub variant: Vec<usize>,
    #[serde(rename = "rule")]
    pub rules: Vec<RuleEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleEntry {
    pub index: usize,
    #[serde(flatten)]
    pub rule: FrozenRule,
}

impl ConstraintFile {
    /// Rebuilds the constraint and checks the stored rule table against it.
    pub fn into_constraint(self) -> Result<Constraint> {
        let spec = CodeSpec::reed_muller(self.r, self.n)?;
        let c = Constraint::build(&spec, &self.variant)?;
        let expected: Vec<RuleEntry> = c
            .frozen_rules()
            .map(|(index, rule)| RuleEntry { index, rule })
            .collect();
        if expected != self.rules {
            return Err(Error::Parse(
                "rule table does not match the constraint implied by (n, r, variant)".into(),
            ));
        }
        Ok(c)
    }
}
