//! Weight spectra, truncated union bounds and constraint storage costs.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::autgroup::{transform_constraint, AffinePerm};
use crate::codespec::{max_dynamic_count, CodeSpec, Constraint};
use crate::encdec::{FreezingPlan, ListDecoder};
use crate::error::{Error, Result};
use crate::gf2::polar_transform;

/// Largest dimension accepted by [`brute_weight_enum`].
pub const MAX_BRUTE_DIM: usize = 24;

/// Largest weight cap accepted by [`low_weight_enum_scl`].
pub const MAX_SCL_WEIGHT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    Brute,
    Formula,
    SclEstimate,
}

/// Codeword counts per Hamming weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSpectrum {
    pub counts: BTreeMap<usize, u64>,
    /// Counts are exact (for every weight up to `max_weight`, if set).
    pub exact: bool,
    pub method: SpectrumMethod,
    /// Weights above this were not examined.
    pub max_weight: Option<usize>,
}

impl WeightSpectrum {
    /// Spectrum from known `(weight, count)` pairs, e.g. tabulated counts.
    pub fn from_counts<I: IntoIterator<Item = (usize, u64)>>(pairs: I) -> Self {
        let mut counts: BTreeMap<usize, u64> = pairs.into_iter().collect();
        counts.entry(0).or_insert(1);
        WeightSpectrum {
            counts,
            exact: false,
            method: SpectrumMethod::Formula,
            max_weight: None,
        }
    }

    pub fn count(&self, w: usize) -> u64 {
        self.counts.get(&w).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Smallest non-zero weight present.
    pub fn min_nonzero_weight(&self) -> Option<usize> {
        self.counts.iter().find(|(&w, &c)| w > 0 && c > 0).map(|(&w, _)| w)
    }

    /// `weight,count` lines for non-empty weights.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("weight,count\n");
        for (w, c) in self.counts.iter().filter(|(_, &c)| c > 0) {
            out.push_str(&format!("{w},{c}\n"));
        }
        out
    }
}

fn pack(x: &[u8]) -> Vec<u64> {
    let mut words = vec![0u64; x.len().div_ceil(64)];
    for (i, &b) in x.iter().enumerate() {
        words[i / 64] |= u64::from(b) << (i % 64);
    }
    words
}

/// Exact spectrum by walking all `2^K` information words in Gray-code order.
pub fn brute_weight_enum(c: &Constraint) -> Result<WeightSpectrum> {
    let k = c.spec().dim();
    if k > MAX_BRUTE_DIM {
        return Err(Error::ResourceCap(format!(
            "brute-force enumeration of 2^{k} codewords (limit 2^{MAX_BRUTE_DIM})"
        )));
    }
    let len = c.spec().len();
    let plan = FreezingPlan::from_constraint(c);
    let rows: Vec<Vec<u64>> = (0..k)
        .map(|i| {
            let mut v = vec![0u8; k];
            v[i] = 1;
            pack(&plan.encode(&v).expect("unit vector has length K"))
        })
        .collect();
    let words = len.div_ceil(64);
    // top `split` information bits select a chunk, the rest are Gray-walked
    let split = k.min(8);
    let low = k - split;
    let histogram = (0u64..1 << split)
        .into_par_iter()
        .map(|chunk| {
            let mut hist = vec![0u64; len + 1];
            let mut acc = vec![0u64; words];
            for b in 0..split {
                if (chunk >> b) & 1 == 1 {
                    for (a, r) in acc.iter_mut().zip(&rows[low + b]) {
                        *a ^= r;
                    }
                }
            }
            let weight = |acc: &[u64]| acc.iter().map(|w| w.count_ones() as usize).sum::<usize>();
            hist[weight(&acc)] += 1;
            for step in 1u64..1 << low {
                let flip = step.trailing_zeros() as usize;
                for (a, r) in acc.iter_mut().zip(&rows[flip]) {
                    *a ^= r;
                }
                hist[weight(&acc)] += 1;
            }
            hist
        })
        .reduce(
            || vec![0u64; len + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(WeightSpectrum {
        counts: histogram
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(w, c)| (w, c))
            .collect(),
        exact: true,
        method: SpectrumMethod::Brute,
        max_weight: None,
    })
}

/// Gaussian binomial coefficient `[n choose k]_2`.
pub fn gaussian_binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    // row-by-row Pascal-style recurrence: [m,j] = [m-1,j-1] + 2^j [m-1,j]
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for m in 1..=n {
        for j in (1..=k.min(m)).rev() {
            row[j] = row[j - 1].saturating_add(row[j].saturating_mul(1u128 << j));
        }
    }
    row[k]
}

/// Number of minimum-weight (`2^(n-r)`) codewords of `R(r, n)`:
/// `2^r` times the number of `(n-r)`-dimensional subspaces of `GF(2)^n`.
pub fn rm_minweight_count(r: usize, n: usize) -> Result<u128> {
    if r == 0 || r >= n {
        return Err(Error::InvalidParameters(format!(
            "minimum-weight count needs 0 < r < n, got R({r}, {n})"
        )));
    }
    if n > crate::gf2::MAX_LOG_LEN {
        return Err(Error::DimensionOverflow(n));
    }
    Ok((1u128 << r) * gaussian_binomial(n, r))
}

/// Lower-bound estimate of the low-weight spectrum: decode a noise-free
/// all-zero reception with list size `list` and tally the weights of the
/// surviving codewords up to `w_max`.
pub fn low_weight_enum_scl(c: &Constraint, list: usize, w_max: usize) -> Result<WeightSpectrum> {
    if w_max > MAX_SCL_WEIGHT {
        return Err(Error::ResourceCap(format!(
            "weight cap {w_max} exceeds {MAX_SCL_WEIGHT}"
        )));
    }
    let spec = c.spec();
    let plan = FreezingPlan::from_constraint(c);
    let mut dec = ListDecoder::new(spec.n(), list)?;
    let llrs = vec![1.0; spec.len()];
    let mut counts = BTreeMap::new();
    for path in dec.decode(&llrs, &plan)? {
        let mut x = path.u;
        polar_transform(&mut x);
        let w = x.iter().filter(|&&b| b == 1).count();
        if w <= w_max {
            *counts.entry(w).or_insert(0u64) += 1;
        }
    }
    let complete = spec.dim() < 64 && (list as u128) >= 1u128 << spec.dim();
    Ok(WeightSpectrum {
        counts,
        exact: complete,
        method: SpectrumMethod::SclEstimate,
        max_weight: Some(w_max),
    })
}

/// Gaussian tail `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// `sum_{0<w<=w_max} A_w Q(sqrt(2 R w Eb/N0))`.
pub fn truncated_union_bound(ws: &WeightSpectrum, rate: f64, ebn0_db: f64, w_max: usize) -> Result<f64> {
    if ws.counts.is_empty() {
        return Err(Error::Empty("weight spectrum"));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidParameters(format!("code rate {rate} outside (0, 1]")));
    }
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    Ok(ws
        .counts
        .range(1..=w_max)
        .map(|(&w, &a)| a as f64 * q_function((2.0 * rate * w as f64 * ebn0).sqrt()))
        .sum())
}

/// Storage model for the constraint matrices of an ensemble decoder.
#[derive(Debug, Clone, Copy)]
pub enum MemoryScenario<'a> {
    /// One stable constraint shared by every branch.
    Stable,
    /// Branch constraints known in advance, row-reduced before storage.
    KnownPerms(&'a [AffinePerm]),
    /// Every branch stores its full transformed constraint matrix.
    UnknownPerms,
}

/// Storage of row-reduced transformed constraints, under two conventions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownPermsCost {
    /// Rows carrying a dynamic constraint (weight > 1) after reduction,
    /// summed over the ensemble.
    pub rows_kept: u64,
    /// `rows_kept * N`.
    pub dense_bits: u64,
    /// Ones in the kept rows.
    pub nonzero_bits: u64,
}

/// Row-reduces the transformed full-dynamic constraint of every permutation.
/// Rows reduced to a single one are zero-frozen positions and are not
/// stored.
pub fn known_perms_cost(c: &Constraint, perms: &[AffinePerm]) -> Result<KnownPermsCost> {
    let len = c.spec().len() as u64;
    perms.iter().try_fold(KnownPermsCost::default(), |mut acc, p| {
        let (red, _) = transform_constraint(c.v(), p)?.rref_trailing();
        for row in 0..red.rows() {
            let w = red.row_weight(row) as u64;
            if w > 1 {
                acc.rows_kept += 1;
                acc.dense_bits += len;
                acc.nonzero_bits += w;
            }
        }
        Ok(acc)
    })
}

/// Bits needed to hold the freezing constraints of an `m`-branch ensemble.
/// Known permutations are costed with [`KnownPermsCost::dense_bits`] on the
/// full-dynamic constraint.
pub fn memory_requirements(spec: &CodeSpec, m: usize, scenario: MemoryScenario<'_>) -> Result<u64> {
    let len = spec.len() as u64;
    let redundancy = (spec.len() - spec.dim()) as u64;
    match scenario {
        MemoryScenario::Stable => Ok(max_dynamic_count(spec) as u64),
        MemoryScenario::UnknownPerms => Ok(m as u64 * len * redundancy),
        MemoryScenario::KnownPerms(perms) => {
            if perms.len() != m {
                return Err(Error::InvalidParameters(format!(
                    "known-permutation scenario with M = {m} needs {m} permutations, got {}",
                    perms.len()
                )));
            }
            Ok(known_perms_cost(&Constraint::full(spec), perms)?.dense_bits)
        }
    }
}
