//! Plain recursive successive-cancellation decoding.

use super::plan::{FreezingPlan, Slot};
use super::{f_minsum, g_combine, penalty};

/// Decoded input vector, codeword and min-sum path metric.
pub(crate) struct ScOutput {
    pub u: Vec<u8>,
    pub x: Vec<u8>,
    pub path_metric: f64,
}

pub(crate) fn decode(llrs: &[f64], plan: &FreezingPlan) -> ScOutput {
    let mut u = vec![0u8; llrs.len()];
    let mut metric = 0.0;
    let x = recurse(llrs, plan, 0, &mut u, &mut metric);
    ScOutput {
        u,
        x,
        path_metric: metric,
    }
}

fn recurse(llrs: &[f64], plan: &FreezingPlan, first: usize, u: &mut [u8], metric: &mut f64) -> Vec<u8> {
    let len = llrs.len();
    if len == 1 {
        let l = llrs[0];
        let bit = match plan.slot(first) {
            Slot::Info => (l < 0.0) as u8,
            _ => plan.frozen_value(first, u),
        };
        *metric += penalty(l, bit);
        u[first] = bit;
        return vec![bit];
    }
    let half = len / 2;
    let left: Vec<f64> = (0..half).map(|k| f_minsum(llrs[k], llrs[k + half])).collect();
    let xa = recurse(&left, plan, first, u, metric);
    let right: Vec<f64> = (0..half)
        .map(|k| g_combine(llrs[k], llrs[k + half], xa[k]))
        .collect();
    let xb = recurse(&right, plan, first + half, u, metric);
    xa.iter().zip(&xb).map(|(a, b)| a ^ b).chain(xb.iter().copied()).collect()
}
