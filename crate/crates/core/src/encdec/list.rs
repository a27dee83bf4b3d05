//! Successive-cancellation list decoding in the LLR domain.
//!
//! Paths share intermediate LLR and partial-sum arrays copy-on-write, one
//! pool per layer. Layer `λ` arrays hold `N >> λ` entries; layer 0 is the
//! channel and is shared by every path. The leaf layer is not stored: leaf
//! LLRs come straight from layer `n - 1` and the last two decisions are read
//! from each path's input vector.

use super::plan::{FreezingPlan, Slot};
use super::{f_minsum, g_combine, penalty};
use crate::error::{Error, Result};
use crate::gf2::MAX_LOG_LEN;

/// Largest `list * N` product a decoder will allocate.
pub const MAX_LIST_WORK: usize = 1 << 24;

/// A surviving path: its input vector and min-sum path metric.
#[derive(Debug, Clone)]
pub struct ListPath {
    pub u: Vec<u8>,
    pub path_metric: f64,
}

/// Reusable SCL decoder state for one `(n, list size)` pair.
pub struct ListDecoder {
    n: usize,
    len: usize,
    list: usize,
    /// Highest stored layer, `n - 1` (0 when nothing is stored).
    top: usize,
    channel: Vec<f64>,
    /// `llr[λ][s * (N >> λ) + β]`, index 0 unused.
    llr: Vec<Vec<f64>>,
    /// `bits[λ][2 * s * (N >> λ) + parity * (N >> λ) + β]`, index 0 unused.
    bits: Vec<Vec<u8>>,
    path_array: Vec<Vec<usize>>,
    refs: Vec<Vec<u32>>,
    free_arrays: Vec<Vec<usize>>,
    free_paths: Vec<usize>,
    active: Vec<bool>,
    /// Active path slots in increasing order.
    alive: Vec<usize>,
    metric: Vec<f64>,
    leaf: Vec<f64>,
    uhat: Vec<u8>,
    cand: Vec<u128>,
    keep: Vec<[Option<f64>; 2]>,
}

/// Sort key of a fork candidate: metric first, then bit 0 before bit 1, then
/// lower path slot. Metrics are non-negative, so their bit patterns order
/// like the values.
#[inline]
fn cand_key(pm: f64, slot: usize, bit: u8) -> u128 {
    debug_assert!(pm >= 0.0);
    (u128::from(pm.to_bits()) << 64) | (u128::from(bit) << 32) | slot as u128
}

#[inline]
fn cand_parts(key: u128) -> (f64, usize, u8) {
    (
        f64::from_bits((key >> 64) as u64),
        (key & 0xffff_ffff) as usize,
        ((key >> 32) & 1) as u8,
    )
}

impl ListDecoder {
    pub fn new(n: usize, list: usize) -> Result<Self> {
        if n > MAX_LOG_LEN {
            return Err(Error::DimensionOverflow(n));
        }
        if list == 0 {
            return Err(Error::InvalidParameters("list size must be at least 1".into()));
        }
        let len = 1usize << n;
        if list.saturating_mul(len) > MAX_LIST_WORK {
            return Err(Error::ResourceCap(format!(
                "list size {list} at length {len} exceeds {MAX_LIST_WORK} path-positions"
            )));
        }
        let top = n.saturating_sub(1);
        let layer_len = |lambda: usize| if lambda == 0 || lambda > top { 0 } else { len >> lambda };
        Ok(ListDecoder {
            n,
            len,
            list,
            top,
            channel: vec![0.0; len],
            llr: (0..=top).map(|l| vec![0.0; list * layer_len(l)]).collect(),
            bits: (0..=top).map(|l| vec![0; 2 * list * layer_len(l)]).collect(),
            path_array: vec![vec![0; list]; top + 1],
            refs: vec![vec![0; list]; top + 1],
            free_arrays: vec![Vec::with_capacity(list); top + 1],
            free_paths: Vec::with_capacity(list),
            active: vec![false; list],
            alive: Vec::with_capacity(list),
            metric: vec![0.0; list],
            leaf: vec![0.0; list],
            uhat: vec![0; list * len],
            cand: Vec::with_capacity(2 * list),
            keep: vec![[None; 2]; list],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn list_size(&self) -> usize {
        self.list
    }

    fn reset(&mut self) {
        for lambda in 1..=self.top {
            self.free_arrays[lambda].clear();
            self.free_arrays[lambda].extend((0..self.list).rev());
            self.refs[lambda].fill(0);
        }
        self.free_paths.clear();
        self.free_paths.extend((0..self.list).rev());
        self.active.fill(false);
        self.alive.clear();
    }

    fn refresh_alive(&mut self) {
        self.alive.clear();
        self.alive.extend((0..self.list).filter(|&l| self.active[l]));
    }

    fn assign_initial_path(&mut self) {
        let l = self.free_paths.pop().expect("fresh decoder has free paths");
        self.active[l] = true;
        self.metric[l] = 0.0;
        for lambda in 1..=self.top {
            let s = self.free_arrays[lambda].pop().expect("fresh layer has free arrays");
            self.path_array[lambda][l] = s;
            self.refs[lambda][s] = 1;
        }
        self.refresh_alive();
    }

    fn clone_path(&mut self, l: usize) -> usize {
        let c = self.free_paths.pop().expect("list never exceeds capacity");
        self.active[c] = true;
        self.metric[c] = self.metric[l];
        self.leaf[c] = self.leaf[l];
        for lambda in 1..=self.top {
            let s = self.path_array[lambda][l];
            self.path_array[lambda][c] = s;
            self.refs[lambda][s] += 1;
        }
        self.uhat.copy_within(l * self.len..(l + 1) * self.len, c * self.len);
        c
    }

    fn kill_path(&mut self, l: usize) {
        self.active[l] = false;
        self.free_paths.push(l);
        for lambda in 1..=self.top {
            let s = self.path_array[lambda][l];
            self.refs[lambda][s] -= 1;
            if self.refs[lambda][s] == 0 {
                self.free_arrays[lambda].push(s);
            }
        }
    }

    /// Array index of path `l` at `lambda`, privatized if shared.
    #[inline]
    fn writable(&mut self, lambda: usize, l: usize) -> usize {
        let s = self.path_array[lambda][l];
        if self.refs[lambda][s] == 1 {
            return s;
        }
        let t = self.free_arrays[lambda].pop().expect("a shared array implies a free one");
        let w = 2 * (self.len >> lambda);
        self.bits[lambda].copy_within(s * w..(s + 1) * w, t * w);
        self.refs[lambda][s] -= 1;
        self.refs[lambda][t] = 1;
        self.path_array[lambda][l] = t;
        t
    }

    /// Brings the leaf LLR of phase `phi` up to date on every live path.
    fn calc_p(&mut self, phi: usize) {
        let n = self.n;
        // the first layer whose phase is odd needs g, layers above it need f
        let start = if phi == 0 { 1 } else { n - phi.trailing_zeros() as usize };
        for lambda in start..=self.top {
            let odd = lambda == start && phi != 0;
            let width = self.len >> lambda;
            for i in 0..self.alive.len() {
                let l = self.alive[i];
                let s = self.writable(lambda, l);
                let (lower, upper) = self.llr.split_at_mut(lambda);
                let parent: &[f64] = if lambda == 1 {
                    &self.channel
                } else {
                    let sp = self.path_array[lambda - 1][l];
                    &lower[lambda - 1][sp * 2 * width..(sp + 1) * 2 * width]
                };
                let (pa, pb) = parent.split_at(width);
                let out = &mut upper[0][s * width..(s + 1) * width];
                if odd {
                    let c = &self.bits[lambda][2 * s * width..(2 * s + 1) * width];
                    for (((o, &a), &b), &bit) in out.iter_mut().zip(pa).zip(pb).zip(c) {
                        *o = g_combine(a, b, bit);
                    }
                } else {
                    for ((o, &a), &b) in out.iter_mut().zip(pa).zip(pb) {
                        *o = f_minsum(a, b);
                    }
                }
            }
        }
        if n == 0 {
            for i in 0..self.alive.len() {
                self.leaf[self.alive[i]] = self.channel[0];
            }
            return;
        }
        for i in 0..self.alive.len() {
            let l = self.alive[i];
            let (a, b) = if n == 1 {
                (self.channel[0], self.channel[1])
            } else {
                let s = self.path_array[self.top][l];
                let arr = &self.llr[self.top];
                (arr[2 * s], arr[2 * s + 1])
            };
            self.leaf[l] = if phi % 2 == 0 {
                f_minsum(a, b)
            } else {
                g_combine(a, b, self.uhat[l * self.len + phi - 1])
            };
        }
    }

    /// Propagates partial sums after the decision at odd phase `phi`.
    fn update_c(&mut self, phi: usize) {
        // layer-0 partial sums are never read
        if self.n < 2 {
            return;
        }
        let top = self.top;
        let parity = (phi >> 1) & 1;
        for i in 0..self.alive.len() {
            let l = self.alive[i];
            let t = self.writable(top, l);
            let a = self.uhat[l * self.len + phi - 1];
            let b = self.uhat[l * self.len + phi];
            let base = 4 * t + parity * 2;
            self.bits[top][base] = a ^ b;
            self.bits[top][base + 1] = b;
        }
        let mut lambda = top;
        let mut phi = phi >> 1;
        while lambda > 1 && phi % 2 == 1 {
            let psi = phi >> 1;
            let parity = psi & 1;
            let width = self.len >> lambda;
            for i in 0..self.alive.len() {
                let l = self.alive[i];
                let t = self.writable(lambda - 1, l);
                let s = self.path_array[lambda][l];
                let (lo, hi) = self.bits.split_at_mut(lambda);
                let src = &hi[0][2 * s * width..2 * (s + 1) * width];
                let (left, right) = src.split_at(width);
                let base = 4 * t * width + parity * 2 * width;
                let (d0, d1) = lo[lambda - 1][base..base + 2 * width].split_at_mut(width);
                for (((x, y), &a), &b) in d0.iter_mut().zip(d1.iter_mut()).zip(left).zip(right) {
                    *x = a ^ b;
                    *y = b;
                }
            }
            phi = psi;
            lambda -= 1;
        }
    }

    fn fork(&mut self, phi: usize) {
        self.cand.clear();
        for i in 0..self.alive.len() {
            let l = self.alive[i];
            let llr = self.leaf[l];
            let m = self.metric[l];
            self.cand.push(cand_key(m + penalty(llr, 0), l, 0));
            self.cand.push(cand_key(m + penalty(llr, 1), l, 1));
        }
        if self.cand.len() > self.list {
            self.cand.select_nth_unstable(self.list - 1);
            self.cand.truncate(self.list);
        }
        self.keep.fill([None; 2]);
        for &key in &self.cand {
            let (pm, l, b) = cand_parts(key);
            self.keep[l][b as usize] = Some(pm);
        }
        for i in 0..self.alive.len() {
            let l = self.alive[i];
            if self.keep[l] == [None, None] {
                self.kill_path(l);
            }
        }
        // paths cloned below must not be revisited in this phase
        self.refresh_alive();
        for i in 0..self.alive.len() {
            let l = self.alive[i];
            match self.keep[l] {
                [Some(pm0), Some(pm1)] => {
                    let c = self.clone_path(l);
                    self.metric[l] = pm0;
                    self.uhat[l * self.len + phi] = 0;
                    self.metric[c] = pm1;
                    self.uhat[c * self.len + phi] = 1;
                }
                [Some(pm0), None] => {
                    self.metric[l] = pm0;
                    self.uhat[l * self.len + phi] = 0;
                }
                [None, Some(pm1)] => {
                    self.metric[l] = pm1;
                    self.uhat[l * self.len + phi] = 1;
                }
                [None, None] => unreachable!("pruned above"),
            }
        }
        self.refresh_alive();
    }

    fn run(&mut self, llrs: &[f64], plan: &FreezingPlan) -> Result<()> {
        if llrs.len() != self.len || plan.len() != self.len {
            return Err(Error::DimensionMismatch(format!(
                "decoder length {}, input {}, plan {}",
                self.len,
                llrs.len(),
                plan.len()
            )));
        }
        self.reset();
        self.channel.copy_from_slice(llrs);
        self.assign_initial_path();
        for phi in 0..self.len {
            self.calc_p(phi);
            if let Slot::Info = plan.slot(phi) {
                self.fork(phi);
            } else {
                for i in 0..self.alive.len() {
                    let l = self.alive[i];
                    let u = &mut self.uhat[l * self.len..(l + 1) * self.len];
                    let bit = plan.frozen_value(phi, u);
                    u[phi] = bit;
                    self.metric[l] += penalty(self.leaf[l], bit);
                }
            }
            if phi % 2 == 1 {
                self.update_c(phi);
            }
        }
        Ok(())
    }

    fn best(&self) -> usize {
        self.alive
            .iter()
            .copied()
            .min_by(|&a, &b| self.metric[a].total_cmp(&self.metric[b]).then(a.cmp(&b)))
            .expect("at least one path survives")
    }

    /// Decodes `llrs` under `plan`; survivors come back sorted by ascending
    /// path metric, ties by path slot.
    pub fn decode(&mut self, llrs: &[f64], plan: &FreezingPlan) -> Result<Vec<ListPath>> {
        self.run(llrs, plan)?;
        let mut order = self.alive.clone();
        order.sort_by(|&a, &b| self.metric[a].total_cmp(&self.metric[b]).then(a.cmp(&b)));
        Ok(order
            .into_iter()
            .map(|l| ListPath {
                u: self.uhat[l * self.len..(l + 1) * self.len].to_vec(),
                path_metric: self.metric[l],
            })
            .collect())
    }

    /// Best surviving path only: writes its input vector to `u_out` and
    /// returns its path metric.
    pub fn decode_best(&mut self, llrs: &[f64], plan: &FreezingPlan, u_out: &mut [u8]) -> Result<f64> {
        if u_out.len() != self.len {
            return Err(Error::DimensionMismatch(format!(
                "output buffer {} for length {}",
                u_out.len(),
                self.len
            )));
        }
        self.run(llrs, plan)?;
        let best = self.best();
        u_out.copy_from_slice(&self.uhat[best * self.len..(best + 1) * self.len]);
        Ok(self.metric[best])
    }
}
