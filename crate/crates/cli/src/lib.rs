//! Experiment harness behind the `tailsampler` binary.

pub mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tailsampler::ars_mixture::{Ars1Sampler, ExponentialDensity};
use tailsampler::bounds::BoundOptions;
use tailsampler::model::{builtin_model, MarginalPotential, Nonlinearity, PotentialModel};
use tailsampler::pf::{self, FilterOptions, SVParams, SvTarget};
use tailsampler::rou::RouSampler;
use tailsampler::stats::{acceptance_curve, AcceptanceStats};
use tailsampler::support::SupportSet;

use crate::config::ModelConfig;

#[derive(Debug, Parser)]
#[command(name = "tailsampler", version, about = "Adaptive rejection samplers and a particle filter")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw samples with one of the adaptive schemes.
    Sample(SampleArgs),
    /// Per-index acceptance rate averaged over independent runs.
    Curve(CurveArgs),
    /// Dump the ratio-of-uniforms cover and region boundary.
    Region(RegionArgs),
    /// Filter a stochastic-volatility series.
    PfSv(PfArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    /// Mixture proposal built from one exponential term.
    Ars1,
    /// Triangle cover of the ratio-of-uniforms region.
    Rou,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Jacobian,
    Written,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Registered model name.
    #[arg(long, default_value = "artificial3obs", conflicts_with = "config")]
    pub model: String,
    /// TOML model description.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Model parameter override, `name=value`. Repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// Comma-separated initial support points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub supports: Option<Vec<f64>>,
    /// Golden-section search for finite-interval tangent anchors.
    #[arg(long)]
    pub tighten: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    #[arg(long, value_enum, default_value = "ars1")]
    pub scheme: Scheme,
    /// Ratio-of-uniforms exponent.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// One-based index of the term used as proposal density.
    #[arg(long)]
    pub j: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples file, one value per line.
    #[arg(long)]
    pub out: PathBuf,
    /// Trials-per-accept file. Defaults to `<out>.stats.csv`.
    #[arg(long)]
    pub stats_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Rejections (cover refinements) to run before the dump.
    #[arg(long, default_value_t = 0)]
    pub warmup: u64,
    /// Boundary points in the dump.
    #[arg(long, default_value_t = 1000)]
    pub probes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PfArgs {
    #[arg(long, default_value_t = 0.8, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.9)]
    pub sigma: f64,
    /// Length of the simulated series. Ignored with `--obs-file`.
    #[arg(long, default_value_t = 40)]
    pub steps: usize,
    #[arg(long, default_value_t = 1000)]
    pub particles: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Observations `ln(y²)`, one per line.
    #[arg(long)]
    pub obs_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "jacobian")]
    pub sv_target: TargetArg,
    #[arg(long)]
    pub tighten: bool,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// A model with its default initial support points.
#[derive(Debug, Clone)]
pub struct ResolvedModel {
    pub model: Arc<PotentialModel>,
    pub supports: SupportSet,
    pub opts: BoundOptions,
}

pub fn artificial_supports() -> Vec<f64> {
    let r = std::f64::consts::SQRT_2;
    vec![0.0, 2.0 - r, 2.0, 2.0 + r]
}

fn fallback_supports(model: &PotentialModel) -> Vec<f64> {
    let d = model.support();
    if d.contains(0.0) {
        vec![0.0]
    } else if d.lo.is_finite() && d.hi.is_finite() {
        vec![0.5 * (d.lo + d.hi)]
    } else if d.lo.is_finite() {
        vec![d.lo + 1.0]
    } else {
        vec![d.hi - 1.0]
    }
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<ResolvedModel> {
        let params: BTreeMap<String, f64> = self.params.iter().cloned().collect();
        let (model, defaults) = match &self.config {
            Some(path) => {
                ensure!(params.is_empty(), "--param applies to registered models, not --config");
                let cfg = ModelConfig::load(path)?;
                let model = cfg.build()?;
                let defaults = cfg.supports.clone().unwrap_or_else(|| fallback_supports(&model));
                (model, defaults)
            }
            None => {
                let model = builtin_model(&self.model, &params)
                    .with_context(|| format!("cannot build model `{}`", self.model))?;
                let defaults = match self.model.as_str() {
                    "artificial3obs" => artificial_supports(),
                    "sv_step" | "sv_step_jacobian" => {
                        pf::initial_supports(params["alpha"], params["y"])?.points().to_vec()
                    }
                    _ => fallback_supports(&model),
                };
                (model, defaults)
            }
        };
        let points = self.supports.clone().unwrap_or(defaults);
        let supports = SupportSet::new(points).context("invalid support points")?;
        supports.check_within(&model.support())?;
        Ok(ResolvedModel {
            model: Arc::new(model),
            supports,
            opts: BoundOptions { tighten: self.tighten },
        })
    }
}

/// Exponential proposal matching term `j` (zero-based), if it has that form.
pub fn exponential_term(model: &PotentialModel, j: usize) -> Result<ExponentialDensity> {
    let term = model
        .terms()
        .get(j)
        .with_context(|| format!("--j {} out of range for a model with {} terms", j + 1, model.len()))?;
    let rate = match (&term.marginal, &term.nonlinearity) {
        (
            MarginalPotential::AbsLinear { slope } | MarginalPotential::Linear { slope },
            Nonlinearity::Affine { slope: a, offset },
        ) if *offset == 0.0 => slope * a,
        _ => bail!(
            "term {} is `{}`; scheme ars1 needs a term of the form slope·x",
            j + 1,
            term.marginal.name()
        ),
    };
    ensure!(model.support().is_nonnegative(), "scheme ars1 needs a model supported on [0, ∞)");
    Ok(ExponentialDensity::new(rate)?)
}

enum Sampler {
    Ars1(Box<Ars1Sampler<ExponentialDensity>>),
    Rou(Box<RouSampler>),
}

impl Sampler {
    fn new(resolved: &ResolvedModel, scheme: &SchemeArgs) -> Result<Self> {
        let model = Arc::clone(&resolved.model);
        match scheme.scheme {
            Scheme::Ars1 => {
                let j = scheme.j.unwrap_or(model.len());
                ensure!(j >= 1, "--j is one-based");
                let q = exponential_term(&model, j - 1)?;
                let s = Ars1Sampler::new(model, j - 1, q, resolved.supports.clone(), resolved.opts)?;
                Ok(Sampler::Ars1(Box::new(s)))
            }
            Scheme::Rou => {
                let s = RouSampler::new(model, scheme.rho, resolved.supports.clone(), resolved.opts)?;
                Ok(Sampler::Rou(Box::new(s)))
            }
        }
    }

    fn sample_n(&mut self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        Ok(match self {
            Sampler::Ars1(s) => s.sample_n(n, rng)?,
            Sampler::Rou(s) => s.sample_n(n, rng)?,
        })
    }

    fn stats(&self) -> &AcceptanceStats {
        match self {
            Sampler::Ars1(s) => s.stats(),
            Sampler::Rou(s) => s.stats(),
        }
    }
}

/// Generator for run `run` under `seed`.
pub fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn stats_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".stats.csv");
    PathBuf::from(s)
}

pub fn run_sample(args: &SampleArgs) -> Result<()> {
    let resolved = args.model.resolve()?;
    let mut sampler = Sampler::new(&resolved, &args.scheme)?;
    let mut rng = run_rng(args.seed, 0);
    let xs = sampler.sample_n(args.n, &mut rng)?;
    let mut out = String::from("x\n");
    for x in &xs {
        writeln!(out, "{x}")?;
    }
    write_file(&args.out, &out)?;
    let mut stats = String::from("i,trials\n");
    for (i, t) in sampler.stats().trials_per_accept.iter().enumerate() {
        writeln!(stats, "{},{t}", i + 1)?;
    }
    write_file(&args.stats_out.clone().unwrap_or_else(|| stats_path(&args.out)), &stats)
}

/// Acceptance curve over `runs` independent samplers of `n` draws each.
pub fn curve(resolved: &ResolvedModel, scheme: &SchemeArgs, n: usize, runs: usize, seed: u64) -> Result<Vec<f64>> {
    ensure!(runs > 0, "--runs must be positive");
    let all = (0..runs as u64)
        .into_par_iter()
        .map(|run| {
            let mut sampler = Sampler::new(resolved, scheme)?;
            sampler
                .sample_n(n, &mut run_rng(seed, run))
                .with_context(|| format!("run {run}"))?;
            Ok(sampler.stats().clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(acceptance_curve(&all))
}

pub fn run_curve(args: &CurveArgs) -> Result<()> {
    let resolved = args.model.resolve()?;
    let rates = curve(&resolved, &args.scheme, args.n, args.runs, args.seed)?;
    let mut out = String::from("i,acceptance_rate\n");
    for (i, r) in rates.iter().enumerate() {
        writeln!(out, "{},{r}", i + 1)?;
    }
    write_file(&args.out, &out)
}

pub fn run_region(args: &RegionArgs) -> Result<()> {
    let resolved = args.model.resolve()?;
    let mut sampler = RouSampler::new(resolved.model, args.rho, resolved.supports, resolved.opts)?;
    let mut rng = run_rng(args.seed, 0);
    while sampler.stats().rejections < args.warmup {
        sampler.sample(&mut rng)?;
    }
    write_file(&args.out, &sampler.export_region(args.probes).to_csv())
}

pub fn read_observations(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut obs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) => obs.push(v),
            Err(_) if n == 0 => {}
            Err(e) => bail!("{}:{}: `{line}`: {e}", path.display(), n + 1),
        }
    }
    Ok(obs)
}

pub fn run_pf(args: &PfArgs) -> Result<()> {
    let params = SVParams::new(args.beta, args.sigma)?;
    let opts = FilterOptions {
        bounds: BoundOptions { tighten: args.tighten },
        target: match args.sv_target {
            TargetArg::Jacobian => SvTarget::Jacobian,
            TargetArg::Written => SvTarget::Written,
        },
    };
    let mut rng = run_rng(args.seed, 0);
    let (truth, obs) = match &args.obs_file {
        Some(path) => (None, read_observations(path)?),
        None => {
            let (states, obs) = pf::simulate_sv(args.beta, args.sigma, args.steps, 1.0, &mut rng)?;
            (Some(states), obs)
        }
    };
    let mut trace = pf::run_filter(&params, &obs, args.particles, &mut rng, opts)?;
    trace.truth = truth;
    write_file(&args.out, &trace.to_csv())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Sample(a) => run_sample(a),
        Command::Curve(a) => run_curve(a),
        Command::Region(a) => run_region(a),
        Command::PfSv(a) => run_pf(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_parse() {
        assert_eq!(parse_param("y=-1.5").unwrap(), ("y".to_string(), -1.5));
        assert!(parse_param("y").is_err());
        assert!(parse_param("y=abc").is_err());
    }

    #[test]
    fn stats_path_appends_suffix() {
        assert_eq!(stats_path(Path::new("a/b.csv")), PathBuf::from("a/b.csv.stats.csv"));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn artificial_last_term_is_exponential() {
        let m = builtin_model("artificial3obs", &BTreeMap::new()).unwrap();
        assert_eq!(exponential_term(&m, 3).unwrap().rate(), 0.2);
        assert!(exponential_term(&m, 0).is_err());
        assert!(exponential_term(&m, 4).is_err());
    }
}
