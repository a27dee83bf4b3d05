//! Command-line front end of the `rmae` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{
    brute_weight_enum, known_perms_cost, low_weight_enum_scl, memory_requirements, rm_minweight_count,
    truncated_union_bound, MemoryScenario, SpectrumMethod, WeightSpectrum,
};
use crate::autgroup::{perms_from_toml, perms_to_toml, sample_group, stability_survey, AffinePerm, Group};
use crate::codespec::{count_stable_variants, max_dynamic_count, CodeSpec, Constraint};
use crate::encdec::BranchMode;
use crate::error::{Error, Result};
use crate::sim::{records_to_csv, run_bler, BlerRecord, DecoderSpec, StopRule};

#[derive(Debug, Parser)]
#[command(name = "rmae", version, about = "Reed-Muller codes with permutation-stable dynamic frozen bits")]
pub struct Cli {
    /// Worker threads for parallel analysis and simulation.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a dynamic freezing constraint and print its summary.
    Construct(ConstructArgs),
    /// Check constraint invariance over a permutation group.
    Stability(StabilityArgs),
    /// Constraint storage of an automorphism ensemble decoder.
    Memory(MemoryArgs),
    /// Weight spectrum and truncated union bound.
    Analyze(AnalyzeArgs),
    /// Monte Carlo BLER campaign from a configuration file.
    Simulate(SimulateArgs),
    /// Sample distinct permutations from a group.
    Sample(SampleArgs),
    /// Canned recipes for the storage table and the R(3,7) curves.
    Repro(ReproArgs),
}

/// Code selection shared by several subcommands.
#[derive(Debug, Clone, Args)]
pub struct CodeArgs {
    /// Constraint file written by `construct`; overrides --r/--n/--variant.
    #[arg(long)]
    pub constraint: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub r: usize,
    #[arg(long, default_value_t = 7)]
    pub n: usize,
    /// Weights of the dynamic classes: comma list, `full` or `none`.
    #[arg(long, default_value = "full")]
    pub variant: String,
}

impl CodeArgs {
    pub fn load(&self) -> Result<Constraint> {
        match &self.constraint {
            Some(path) => Constraint::from_toml(&fs::read_to_string(path)?),
            None => build_constraint(self.r, self.n, &parse_variant(&self.variant)?),
        }
    }
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Print V and W even for long codes.
    #[arg(long)]
    pub matrices: bool,
    /// Write the constraint file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// identity, blta-pl, pl, lta, ga or blta:s1,s2,...
    #[arg(long, default_value = "blta-pl")]
    pub group: String,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MemoryArgs {
    #[arg(long, default_value_t = 3)]
    pub r: usize,
    #[arg(long, default_value_t = 7)]
    pub n: usize,
    /// Ensemble size.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    /// Permutation file for the known-permutation scenario.
    #[arg(long)]
    pub perms: Option<PathBuf>,
    /// Group sampled when no permutation file is given.
    #[arg(long, default_value = "lta")]
    pub group: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Brute,
    Formula,
    Scl,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Brute)]
    pub method: MethodArg,
    /// List size of the SCL estimate.
    #[arg(long, default_value_t = 1024)]
    pub list: usize,
    /// Largest weight tallied or summed.
    #[arg(long, default_value_t = 24)]
    pub wmax: usize,
    /// Eb/N0 grid for the union bound, dB.
    #[arg(long, value_delimiter = ',', default_value = "2,2.5,3,3.5,4")]
    pub ebn0: Vec<f64>,
    #[arg(long)]
    pub spectrum_out: Option<PathBuf>,
    #[arg(long)]
    pub bound_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Campaign file.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub min_errors: Option<u64>,
    #[arg(long)]
    pub max_trials: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub ebn0: Option<Vec<f64>>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, default_value = "blta-pl")]
    pub group: String,
    #[arg(long, default_value_t = 7)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Put the identity first and sample the other `count - 1`.
    #[arg(long)]
    pub include_identity: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReproTarget {
    Table1,
    Fig1,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    #[arg(value_enum)]
    pub target: ReproTarget,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Trial budget per point for the simulated curves of `fig1`.
    #[arg(long, default_value_t = 20_000)]
    pub max_trials: u64,
    #[arg(long, default_value_t = 100)]
    pub min_errors: u64,
}

/// Parses `1,2,3`, `full` or `none`.
pub fn parse_variant(text: &str) -> Result<Option<Vec<usize>>> {
    match text.trim() {
        "full" => Ok(None),
        "none" | "" => Ok(Some(Vec::new())),
        list => list
            .split(',')
            .map(|w| {
                w.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad variant weight {w:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some),
    }
}

fn build_constraint(r: usize, n: usize, variant: &Option<Vec<usize>>) -> Result<Constraint> {
    let spec = CodeSpec::reed_muller(r, n)?;
    match variant {
        None => Ok(Constraint::full(&spec)),
        Some(v) => Constraint::build(&spec, v),
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Permutations for an ensemble of size `m` drawn from `group`.
pub fn ensemble_perms(group: &Group, n: usize, m: usize, seed: u64, include_identity: bool) -> Result<Vec<AffinePerm>> {
    if include_identity && m > 0 {
        let mut perms = vec![AffinePerm::identity(n)];
        let size = group.size(n)?;
        if (m as u128) > size {
            return Err(Error::GroupTooSmall {
                requested: m as u128,
                available: size,
            });
        }
        perms.extend(sample_group(group, n, m - 1, seed)?.into_iter().filter(|p| !p.is_identity()).take(m - 1));
        Ok(perms)
    } else {
        sample_group(group, n, m, seed)
    }
}

pub fn cmd_construct(args: &ConstructArgs, out: &mut dyn Write) -> Result<()> {
    let c = args.code.load()?;
    let spec = c.spec();
    writeln!(out, "code R({}, {}): N = {}, K = {}", spec.r(), spec.n(), spec.len(), spec.dim())?;
    writeln!(out, "variant: {:?}", c.variant())?;
    writeln!(out, "D = {}", max_dynamic_count(spec))?;
    writeln!(out, "dynamic frozen bits: {}", c.dynamic_count())?;
    match count_stable_variants(spec) {
        Ok(count) => writeln!(out, "stable variants: {count}")?,
        Err(_) => writeln!(out, "stable variants: 1 (no dynamic frozen bits possible)")?,
    }
    if args.matrices || spec.len() <= 16 {
        writeln!(out, "V =\n{}", c.v())?;
        writeln!(out, "W =\n{}", c.w())?;
    }
    if let Some(path) = &args.out {
        fs::write(path, c.to_toml())?;
        writeln!(out, "constraint written to {}", path.display())?;
    }
    Ok(())
}

pub fn cmd_stability(args: &StabilityArgs, out: &mut dyn Write) -> Result<()> {
    let c = args.code.load()?;
    let group: Group = args.group.parse()?;
    let report = stability_survey(&c, &group, args.samples, args.seed)?;
    writeln!(out, "group: {group}")?;
    writeln!(
        out,
        "tested: {} ({})",
        report.tested,
        if report.exhaustive { "exhaustive" } else { "sampled" }
    )?;
    writeln!(out, "stable: {}", report.stable)?;
    writeln!(out, "fraction: {:.6}", report.fraction())?;
    for p in &report.counterexamples {
        writeln!(out, "unstable: {:?}", p.perm())?;
    }
    Ok(())
}

/// All three scenarios for one code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryRow {
    pub r: usize,
    pub n: usize,
    pub m: usize,
    pub stable: u64,
    pub known_dense: u64,
    pub known_nonzero: u64,
    pub unknown: u64,
}

pub fn memory_row(r: usize, n: usize, m: usize, perms: &[AffinePerm]) -> Result<MemoryRow> {
    let spec = CodeSpec::reed_muller(r, n)?;
    let known = known_perms_cost(&Constraint::full(&spec), perms)?;
    Ok(MemoryRow {
        r,
        n,
        m,
        stable: memory_requirements(&spec, m, MemoryScenario::Stable)?,
        known_dense: memory_requirements(&spec, m, MemoryScenario::KnownPerms(perms))?,
        known_nonzero: known.nonzero_bits,
        unknown: memory_requirements(&spec, m, MemoryScenario::UnknownPerms)?,
    })
}

fn write_memory_rows(rows: &[MemoryRow], out: &mut dyn Write) -> Result<()> {
    writeln!(out, "code,M,stable,known_dense,known_nonzero,unknown")?;
    for row in rows {
        writeln!(
            out,
            "R({};{}),{},{},{},{},{}",
            row.r, row.n, row.m, row.stable, row.known_dense, row.known_nonzero, row.unknown
        )?;
    }
    Ok(())
}

pub fn cmd_memory(args: &MemoryArgs, out: &mut dyn Write) -> Result<()> {
    let perms = match &args.perms {
        Some(path) => perms_from_toml(&fs::read_to_string(path)?)?,
        None => sample_group(&args.group.parse()?, args.n, args.m, args.seed)?,
    };
    let row = memory_row(args.r, args.n, args.m, &perms)?;
    write_memory_rows(&[row], out)
}

fn spectrum_for(c: &Constraint, method: MethodArg, list: usize, wmax: usize) -> Result<WeightSpectrum> {
    match method {
        MethodArg::Brute => brute_weight_enum(c),
        MethodArg::Scl => low_weight_enum_scl(c, list, wmax),
        MethodArg::Formula => {
            let spec = c.spec();
            if c.dynamic_count() != 0 {
                return Err(Error::InvalidParameters(
                    "the closed form only covers the plain Reed-Muller code (variant none)".into(),
                ));
            }
            let count = rm_minweight_count(spec.r(), spec.n())?;
            let count = u64::try_from(count).map_err(|_| Error::ResourceCap("count exceeds 64 bits".into()))?;
            Ok(WeightSpectrum {
                counts: [(0, 1), (spec.min_distance(), count)].into_iter().collect(),
                exact: true,
                method: SpectrumMethod::Formula,
                max_weight: Some(spec.min_distance()),
            })
        }
    }
}

pub fn bound_csv(ws: &WeightSpectrum, rate: f64, ebn0: &[f64], wmax: usize) -> Result<String> {
    let mut text = String::from("ebn0_db,bound\n");
    for &snr in ebn0 {
        text.push_str(&format!("{snr},{:.6e}\n", truncated_union_bound(ws, rate, snr, wmax)?));
    }
    Ok(text)
}

pub fn cmd_analyze(args: &AnalyzeArgs, workers: usize, out: &mut dyn Write) -> Result<()> {
    let c = args.code.load()?;
    let ws = with_pool(workers, || spectrum_for(&c, args.method, args.list, args.wmax))?;
    writeln!(
        out,
        "# method {:?}, {}",
        ws.method,
        if ws.exact { "exact" } else { "lower bound (not exact)" }
    )?;
    emit(args.spectrum_out.as_deref(), &ws.to_csv(), out)?;
    emit(
        args.bound_out.as_deref(),
        &bound_csv(&ws, c.spec().rate(), &args.ebn0, args.wmax)?,
        out,
    )
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if workers == 0 {
        return Err(Error::InvalidParameters("at least one worker is required".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))?
        .install(f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    /// Constraint file; takes precedence over `r`, `n`, `variant`.
    pub constraint: Option<PathBuf>,
    #[serde(default)]
    pub r: usize,
    #[serde(default)]
    pub n: usize,
    /// Missing means every dynamic class.
    pub variant: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Sc,
    #[default]
    Scl,
    Ae,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderConfig {
    pub kind: DecoderKind,
    #[serde(default = "default_list")]
    pub list: usize,
    /// Ensemble size.
    #[serde(default)]
    pub m: usize,
    pub group: Option<String>,
    pub perm_file: Option<PathBuf>,
    #[serde(default)]
    pub include_identity: bool,
    #[serde(default)]
    pub transformed: bool,
    #[serde(default)]
    pub seed: u64,
    pub label: Option<String>,
}

fn default_list() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

/// A simulation campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub code: CodeConfig,
    #[serde(rename = "decoder")]
    pub decoders: Vec<DecoderConfig>,
    pub ebn0_db: Vec<f64>,
    pub stop: StopRule,
    #[serde(default)]
    pub seed: u64,
    pub output: Option<OutputConfig>,
}

impl CampaignConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Resolves relative paths against `base`.
    pub fn constraint(&self, base: &Path) -> Result<Constraint> {
        match &self.code.constraint {
            Some(p) => Constraint::from_toml(&fs::read_to_string(base.join(p))?),
            None => build_constraint(self.code.r, self.code.n, &self.code.variant),
        }
    }

    pub fn decoder_spec(&self, d: &DecoderConfig, n: usize, base: &Path) -> Result<DecoderSpec> {
        Ok(match d.kind {
            DecoderKind::Sc => DecoderSpec::Sc,
            DecoderKind::Scl => DecoderSpec::Scl { list: d.list },
            DecoderKind::Ae => {
                let perms = match (&d.perm_file, &d.group) {
                    (Some(p), _) => perms_from_toml(&fs::read_to_string(base.join(p))?)?,
                    (None, Some(g)) => ensemble_perms(&g.parse()?, n, d.m, d.seed, d.include_identity)?,
                    (None, None) => {
                        return Err(Error::InvalidParameters(
                            "ensemble decoder needs `group` or `perm_file`".into(),
                        ))
                    }
                };
                DecoderSpec::Ae {
                    list: d.list,
                    perms,
                    mode: if d.transformed { BranchMode::Transformed } else { BranchMode::Shared },
                }
            }
        })
    }
}

pub fn cmd_simulate(args: &SimulateArgs, workers: usize, out: &mut dyn Write) -> Result<Vec<BlerRecord>> {
    let mut cfg = CampaignConfig::from_toml(&fs::read_to_string(&args.config)?)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(e) = args.min_errors {
        cfg.stop.min_errors = e;
    }
    if let Some(t) = args.max_trials {
        cfg.stop.max_trials = t;
    }
    if let Some(grid) = &args.ebn0 {
        cfg.ebn0_db = grid.clone();
    }
    let base = args.config.parent().unwrap_or(Path::new("."));
    let records = run_campaign(&cfg, base, workers)?;
    let output = cfg.output.clone().unwrap_or(OutputConfig { csv: None, json: None });
    let csv_path = args.csv.clone().or(output.csv.map(|p| base.join(p)));
    let json_path = args.json.clone().or(output.json.map(|p| base.join(p)));
    emit(csv_path.as_deref(), &records_to_csv(&records), out)?;
    if let Some(p) = json_path {
        let text = serde_json::to_string_pretty(&records).map_err(|e| Error::Parse(e.to_string()))?;
        fs::write(p, text)?;
    }
    Ok(records)
}

pub fn run_campaign(cfg: &CampaignConfig, base: &Path, workers: usize) -> Result<Vec<BlerRecord>> {
    if cfg.decoders.is_empty() {
        return Err(Error::Empty("decoder list"));
    }
    let c = Arc::new(cfg.constraint(base)?);
    let mut records = Vec::new();
    for d in &cfg.decoders {
        let spec = cfg.decoder_spec(d, c.spec().n(), base)?;
        let label = d.label.clone().unwrap_or_else(|| spec.label());
        for p in run_bler(&c, &spec, &cfg.ebn0_db, cfg.stop, cfg.seed, workers)? {
            records.push(BlerRecord::new(&label, &p));
        }
    }
    Ok(records)
}

pub fn cmd_sample(args: &SampleArgs, out: &mut dyn Write) -> Result<()> {
    let perms = ensemble_perms(&args.group.parse()?, args.n, args.count, args.seed, args.include_identity)?;
    emit(args.out.as_deref(), &perms_to_toml(&perms), out)
}

/// The four codes of the memory table.
pub const TABLE1_CODES: [(usize, usize); 4] = [(3, 7), (3, 8), (4, 8), (5, 8)];

pub fn repro_table1(seed: u64, out: &mut dyn Write) -> Result<Vec<MemoryRow>> {
    let rows = TABLE1_CODES
        .iter()
        .map(|&(r, n)| {
            let perms = sample_group(&Group::Lta, n, 8, seed)?;
            memory_row(r, n, 8, &perms)
        })
        .collect::<Result<Vec<_>>>()?;
    write_memory_rows(&rows, out)?;
    Ok(rows)
}

/// Reference low-weight counts of the R(3,7) based codes.
pub fn reference_spectrum(name: &str) -> Option<WeightSpectrum> {
    match name {
        "V_0" => Some(WeightSpectrum::from_counts([(16, 94488), (24, 74078592)])),
        "V_d" => Some(WeightSpectrum::from_counts([(16, 20760), (18, 0), (20, 203420)])),
        "V_D" => Some(WeightSpectrum::from_counts([(16, 28632), (18, 13504), (20, 172800)])),
        _ => None,
    }
}

pub fn repro_fig1(args: &ReproArgs, workers: usize, out: &mut dyn Write) -> Result<()> {
    let grid = [2.0, 2.5, 3.0, 3.5, 4.0];
    writeln!(out, "# truncated union bound from reference low-weight counts")?;
    writeln!(out, "code,ebn0_db,bound")?;
    for name in ["V_d", "V_D"] {
        let ws = reference_spectrum(name).expect("known name");
        for &snr in &grid {
            writeln!(out, "{name},{snr},{:.4e}", truncated_union_bound(&ws, 0.5, snr, 20)?)?;
        }
    }
    writeln!(out, "# simulated block error rate")?;
    let spec = CodeSpec::reed_muller(3, 7)?;
    let codes = [("V_0", Vec::new()), ("V_d", vec![3]), ("V_D", vec![1, 2, 3])];
    let perms = sample_group(&Group::StablePl, 7, 8, args.seed)?;
    let stop = StopRule {
        min_errors: args.min_errors,
        max_trials: args.max_trials,
    };
    let mut records = Vec::new();
    for (name, variant) in codes {
        let c = Arc::new(Constraint::build(&spec, &variant)?);
        let decoders = [
            DecoderSpec::Scl { list: 16 },
            DecoderSpec::Ae {
                list: 16,
                perms: perms.clone(),
                mode: BranchMode::Shared,
            },
        ];
        for d in &decoders {
            let label = format!("{} {name}", d.label());
            for p in run_bler(&c, d, &grid, stop, args.seed, workers)? {
                records.push(BlerRecord::new(&label, &p));
            }
        }
    }
    out.write_all(records_to_csv(&records).as_bytes())?;
    Ok(())
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Construct(a) => cmd_construct(a, out),
        Command::Stability(a) => with_pool(cli.workers, || cmd_stability_string(a)).and_then(|s| {
            out.write_all(s.as_bytes())?;
            Ok(())
        }),
        Command::Memory(a) => cmd_memory(a, out),
        Command::Analyze(a) => cmd_analyze(a, cli.workers, out),
        Command::Simulate(a) => cmd_simulate(a, cli.workers, out).map(|_| ()),
        Command::Sample(a) => cmd_sample(a, out),
        Command::Repro(a) => match a.target {
            ReproTarget::Table1 => repro_table1(a.seed, out).map(|_| ()),
            ReproTarget::Fig1 => repro_fig1(a, cli.workers, out),
        },
    }
}

fn cmd_stability_string(a: &StabilityArgs) -> Result<String> {
    let mut buf = Vec::new();
    cmd_stability(a, &mut buf)?;
    Ok(String::from_utf8_lossy(&buf).into_owned())
}
