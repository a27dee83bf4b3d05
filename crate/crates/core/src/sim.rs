//! Monte Carlo block error rate simulation over BPSK-AWGN.
//!
//! Every trial draws its information word and noise from its own ChaCha
//! stream, keyed by the campaign seed, the SNR point and the trial index.
//! Trials are decoded in batches and scanned in order, so the outcome does
//! not depend on the number of worker threads.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autgroup::AffinePerm;
use crate::codespec::Constraint;
use crate::encdec::{sc_decode_plan, AeDecoder, AeWorkspace, BranchMode, FreezingPlan, ListDecoder, SoftInput};
use crate::error::{Error, Result};

/// Operating point on the AWGN channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPoint {
    pub ebn0_db: f64,
    pub rate: f64,
    /// Noise variance per real dimension, `1 / (2 R Eb/N0)`.
    pub sigma2: f64,
}

impl ChannelPoint {
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidParameters(format!("code rate {rate} outside (0, 1]")));
        }
        if !ebn0_db.is_finite() {
            return Err(Error::InvalidParameters(format!("Eb/N0 {ebn0_db} dB is not finite")));
        }
        let ebn0 = 10f64.powf(ebn0_db / 10.0);
        Ok(ChannelPoint {
            ebn0_db,
            rate,
            sigma2: 1.0 / (2.0 * rate * ebn0),
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// BPSK modulation plus white Gaussian noise.
pub fn transmit<R: Rng + ?Sized>(x: &[u8], ch: &ChannelPoint, rng: &mut R) -> SoftInput {
    let sigma = ch.sigma();
    let y = x
        .iter()
        .map(|&b| {
            let z: f64 = rng.sample(StandardNormal);
            crate::encdec::bpsk(b) + sigma * z
        })
        .collect();
    SoftInput::from_observation(y, ch.sigma2)
}

/// Wilson score interval for `errors` out of `trials` at normal quantile `z`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors >= trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// 97.5% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlerPoint {
    pub ebn0_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bler: f64,
    pub ci95: (f64, f64),
}

impl BlerPoint {
    fn new(ebn0_db: f64, trials: u64, block_errors: u64) -> Self {
        BlerPoint {
            ebn0_db,
            trials,
            block_errors,
            bler: if trials == 0 { 0.0 } else { block_errors as f64 / trials as f64 },
            ci95: wilson_interval(block_errors, trials, Z95),
        }
    }
}

/// A point stops once it has `min_errors` block errors or `max_trials`
/// trials, whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_trials: u64,
}

/// Decoder to simulate.
#[derive(Debug, Clone)]
pub enum DecoderSpec {
    Sc,
    Scl { list: usize },
    Ae { list: usize, perms: Vec<AffinePerm>, mode: BranchMode },
}

impl DecoderSpec {
    pub fn label(&self) -> String {
        match self {
            DecoderSpec::Sc => "SC".into(),
            DecoderSpec::Scl { list } => format!("SCL-{list}"),
            DecoderSpec::Ae { list, perms, .. } => format!("AE-{}-SCL-{list}", perms.len()),
        }
    }
}

enum Engine {
    Sc,
    Scl(usize),
    Ae(AeDecoder),
}

enum Workspace {
    Sc,
    Scl(ListDecoder, Vec<u8>),
    Ae(AeWorkspace),
}

struct Trial<'a> {
    constraint: &'a Constraint,
    plan: &'a FreezingPlan,
    engine: &'a Engine,
}

impl Trial<'_> {
    fn workspace(&self) -> Result<Workspace> {
        let n = self.constraint.spec().n();
        Ok(match self.engine {
            Engine::Sc => Workspace::Sc,
            Engine::Scl(list) => Workspace::Scl(ListDecoder::new(n, *list)?, vec![0; 1 << n]),
            Engine::Ae(ae) => Workspace::Ae(ae.workspace()?),
        })
    }

    /// True on a block error.
    fn run(&self, ch: &ChannelPoint, point_seed: u64, index: u64, ws: &mut Workspace) -> Result<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(point_seed);
        rng.set_stream(index);
        let k = self.plan.dim();
        let v: Vec<u8> = (0..k).map(|_| rng.gen::<bool>() as u8).collect();
        let x = self.plan.encode(&v)?;
        let s = transmit(&x, ch, &mut rng);
        let info = match (self.engine, ws) {
            (Engine::Sc, Workspace::Sc) => sc_decode_plan(&s, self.plan).info_bits,
            (Engine::Scl(_), Workspace::Scl(dec, u)) => {
                dec.decode_best(&s.llrs, self.plan, u)?;
                let info = self.plan.info_positions().iter().map(|&i| u[i]).collect();
                info
            }
            (Engine::Ae(ae), Workspace::Ae(w)) => ae.decode(&s, w)?.info_bits,
            _ => unreachable!("workspace built for this engine"),
        };
        Ok(info != v)
    }
}

fn point_seed(seed: u64, point: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (point as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Simulates `decoder` on the code of `constraint` at every `ebn0_db` point.
pub fn run_bler(
    constraint: &Arc<Constraint>,
    decoder: &DecoderSpec,
    ebn0_db: &[f64],
    stop: StopRule,
    seed: u64,
    workers: usize,
) -> Result<Vec<BlerPoint>> {
    if stop.min_errors == 0 || stop.max_trials == 0 {
        return Err(Error::InvalidParameters(
            "stop rule needs min_errors >= 1 and max_trials >= 1".into(),
        ));
    }
    if workers == 0 {
        return Err(Error::InvalidParameters("at least one worker is required".into()));
    }
    let plan = FreezingPlan::from_constraint(constraint);
    let engine = match decoder {
        DecoderSpec::Sc => Engine::Sc,
        DecoderSpec::Scl { list } => Engine::Scl(*list),
        DecoderSpec::Ae { list, perms, mode } => {
            Engine::Ae(AeDecoder::new(Arc::clone(constraint), perms.clone(), *list, *mode)?)
        }
    };
    let trial = Trial {
        constraint,
        plan: &plan,
        engine: &engine,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))?;
    trial.workspace()?;
    let batch = 64 * workers as u64;
    let rate = constraint.spec().rate();

    ebn0_db
        .iter()
        .enumerate()
        .map(|(pi, &snr)| {
            let ch = ChannelPoint::new(snr, rate)?;
            let pseed = point_seed(seed, pi);
            let (mut trials, mut errors) = (0u64, 0u64);
            while trials < stop.max_trials && errors < stop.min_errors {
                let end = (trials + batch).min(stop.max_trials);
                let outcomes: Vec<bool> = pool.install(|| {
                    (trials..end)
                        .into_par_iter()
                        .map_init(
                            || trial.workspace().expect("workspace validated before the run"),
                            |ws, t| trial.run(&ch, pseed, t, ws),
                        )
                        .collect::<Result<_>>()
                })?;
                for failed in outcomes {
                    trials += 1;
                    errors += u64::from(failed);
                    if errors >= stop.min_errors {
                        break;
                    }
                }
            }
            Ok(BlerPoint::new(snr, trials, errors))
        })
        .collect()
}

/// One simulated point with its decoder label, for tabular output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlerRecord {
    pub decoder: String,
    pub ebn0_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub bler: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BlerRecord {
    pub fn new(decoder: &str, p: &BlerPoint) -> Self {
        BlerRecord {
            decoder: decoder.to_string(),
            ebn0_db: p.ebn0_db,
            trials: p.trials,
            errors: p.block_errors,
            bler: p.bler,
            ci_low: p.ci95.0,
            ci_high: p.ci95.1,
        }
    }
}

pub fn records_to_csv(records: &[BlerRecord]) -> String {
    let mut out = String::from("decoder,ebn0_db,trials,errors,bler,ci_low,ci_high\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{:.6e},{:.6e},{:.6e}\n",
            r.decoder, r.ebn0_db, r.trials, r.errors, r.bler, r.ci_low, r.ci_high
        ));
    }
    out
}
