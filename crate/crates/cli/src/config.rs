//! Layered run configuration: defaults, then the `--config` file, then flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use sfm_core::solvers::{Algorithm, EpsilonMode, Momentum, SolverConfig};

use crate::cli::{BenchArgs, ProblemArgs, SolveArgs};

/// Parsed `key = value` file. Keys are case-insensitive and `_` is read
/// as `-`.
#[derive(Debug, Default)]
pub struct ConfigFile {
    path: Option<PathBuf>,
    entries: BTreeMap<String, (usize, String)>,
}

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(ConfigFile::default()) };
        let text =
            std::fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::parse(&text, Some(path.to_path_buf()))
    }

    pub fn parse(text: &str, path: Option<PathBuf>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected 'key = value'", i + 1))?;
            let key = normalize(k);
            if entries.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                bail!("config line {}: duplicate key '{key}'", i + 1);
            }
        }
        Ok(ConfigFile { path, entries })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|e| {
                let file = self.path.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
                anyhow!("config {file} line {line}: invalid value for '{key}': {e}")
            }),
        }
    }

    /// Rejects keys outside `known`.
    fn check_known(&self, known: &[&str]) -> Result<()> {
        for (key, (line, _)) in &self.entries {
            if !known.contains(&key.as_str()) {
                bail!("config line {line}: unknown key '{key}'");
            }
        }
        Ok(())
    }
}

fn layered<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionKind {
    Auto,
    Grid2d,
    FramesChains,
    Chains3,
}

impl FromStr for DecompositionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "auto" => Ok(DecompositionKind::Auto),
            "grid2d" | "2d" => Ok(DecompositionKind::Grid2d),
            "frames-chains" | "frames_chains" => Ok(DecompositionKind::FramesChains),
            "chains3" | "chains" => Ok(DecompositionKind::Chains3),
            other => Err(format!("unknown decomposition '{other}'")),
        }
    }
}

impl fmt::Display for DecompositionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecompositionKind::Auto => "auto",
            DecompositionKind::Grid2d => "grid2d",
            DecompositionKind::FramesChains => "frames-chains",
            DecompositionKind::Chains3 => "chains3",
        })
    }
}

/// `64x64`, `4x3x2` or `64,64`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let dims: Vec<usize> = s
        .split(['x', 'X', ','])
        .map(|t| t.trim().parse::<usize>().map_err(|_| anyhow!("invalid dimension '{t}' in '{s}'")))
        .collect::<Result<_>>()?;
    if dims.len() != 2 && dims.len() != 3 {
        bail!("expected 2 or 3 dimensions, got '{s}'");
    }
    if dims.contains(&0) {
        bail!("dimensions must be positive, got '{s}'");
    }
    Ok(dims)
}

pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s.split_once(',').ok_or_else(|| anyhow!("expected 'lo,hi', got '{s}'"))?;
    let lo: f64 = a.trim().parse().map_err(|_| anyhow!("invalid range bound '{a}'"))?;
    let hi: f64 = b.trim().parse().map_err(|_| anyhow!("invalid range bound '{b}'"))?;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        bail!("empty range '{s}'");
    }
    Ok((lo, hi))
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(item).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Synthetic(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    pub lambda: f64,
    pub sigma: f64,
    pub fg: f64,
    pub bg: f64,
}

impl Default for WeightParams {
    fn default() -> Self {
        WeightParams { lambda: 0.1, sigma: 10.0, fg: 255.0, bg: 0.0 }
    }
}

/// Everything needed to build and solve a problem, apart from the
/// algorithm, epsilon mode and seed that a sweep varies.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub source: Source,
    pub decomposition: DecompositionKind,
    pub epsilon_mode: EpsilonMode<f64>,
    pub proportionality: Option<f64>,
    pub max_outer_iters: usize,
    pub gap_tolerance: Option<f64>,
    pub weights: WeightParams,
    pub timing: bool,
}

impl ProblemConfig {
    pub fn solver(&self, algorithm: Algorithm, epsilon_mode: EpsilonMode<f64>) -> SolverConfig<f64> {
        SolverConfig {
            algorithm,
            epsilon_mode,
            proportionality: self.proportionality,
            max_outer_iters: self.max_outer_iters,
            gap_tolerance: self.gap_tolerance,
            momentum: Momentum::Fista,
            record_wall_time: self.timing,
        }
    }
}

const PROBLEM_KEYS: &[&str] = &[
    "input",
    "dims",
    "decomposition",
    "epsilon-mode",
    "proportionality",
    "max-outer-iters",
    "gap-tolerance",
    "lambda",
    "sigma",
    "fg",
    "bg",
    "timing",
];

fn resolve_problem(args: &ProblemArgs, file: &ConfigFile) -> Result<ProblemConfig> {
    let input: Option<PathBuf> = layered(args.input.clone(), file, "input")?;
    let dims: Option<String> = layered(args.dims.clone(), file, "dims")?;
    let source = match (input, dims) {
        (Some(p), _) => Source::File(p),
        (None, Some(d)) => Source::Synthetic(parse_dims(&d)?),
        (None, None) => bail!("no problem given: pass --input or --dims"),
    };
    let decomposition = layered(args.decomposition.clone(), file, "decomposition")?
        .map(|s: String| s.parse::<DecompositionKind>().map_err(|e| anyhow!(e)))
        .transpose()?
        .unwrap_or(DecompositionKind::Auto);
    let epsilon_mode = match layered(args.epsilon_mode.clone(), file, "epsilon-mode")? {
        Some(s) => parse_mode(&s)?,
        None => EpsilonMode::ConstDelta,
    };
    let defaults = WeightParams::default();
    let weights = WeightParams {
        lambda: layered(args.lambda, file, "lambda")?.unwrap_or(defaults.lambda),
        sigma: layered(args.sigma, file, "sigma")?.unwrap_or(defaults.sigma),
        fg: layered(args.fg, file, "fg")?.unwrap_or(defaults.fg),
        bg: layered(args.bg, file, "bg")?.unwrap_or(defaults.bg),
    };
    let timing = args.timing || file.get::<bool>("timing")?.unwrap_or(false);
    Ok(ProblemConfig {
        source,
        decomposition,
        epsilon_mode,
        proportionality: layered(args.proportionality, file, "proportionality")?,
        max_outer_iters: layered(args.max_outer_iters, file, "max-outer-iters")?.unwrap_or(1000),
        gap_tolerance: layered(args.gap_tolerance, file, "gap-tolerance")?,
        weights,
        timing,
    })
}

fn parse_mode(s: &str) -> Result<EpsilonMode<f64>> {
    s.parse::<EpsilonMode<f64>>().map_err(|e| anyhow!("{e}"))
}

fn parse_algorithm(s: &str) -> Result<Algorithm> {
    s.parse::<Algorithm>().map_err(|e| anyhow!("{e}"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub problem: ProblemConfig,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub trace: Option<PathBuf>,
}

impl SolveConfig {
    pub fn resolve(args: &SolveArgs) -> Result<Self> {
        let file = ConfigFile::load(args.problem.config.as_deref())?;
        let mut known = PROBLEM_KEYS.to_vec();
        known.extend(["algorithm", "seed", "output", "trace"]);
        file.check_known(&known)?;
        let problem = resolve_problem(&args.problem, &file)?;
        let algorithm = match layered(args.algorithm.clone(), &file, "algorithm")? {
            Some(s) => parse_algorithm(&s)?,
            None => Algorithm::Bcd,
        };
        let cfg = SolveConfig {
            algorithm,
            seed: layered(args.seed, &file, "seed")?.unwrap_or(0),
            output: layered(args.output.clone(), &file, "output")?,
            trace: layered(args.trace.clone(), &file, "trace")?,
            problem,
        };
        // catches algorithm/schedule mismatches before any input is read
        let r = match cfg.problem.decomposition {
            DecompositionKind::Chains3 => 3,
            _ => 2,
        };
        cfg.problem.solver(cfg.algorithm, cfg.problem.epsilon_mode).validate(r).map_err(|e| anyhow!("{e}"))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub problem: ProblemConfig,
    pub algorithms: Vec<Algorithm>,
    pub epsilon_modes: Vec<EpsilonMode<f64>>,
    pub seeds: Vec<u64>,
    pub output_dir: Option<PathBuf>,
}

impl BenchConfig {
    pub fn resolve(args: &BenchArgs) -> Result<Self> {
        let file = ConfigFile::load(args.problem.config.as_deref())?;
        let mut known = PROBLEM_KEYS.to_vec();
        known.extend(["algorithms", "epsilon-modes", "seeds", "output-dir"]);
        file.check_known(&known)?;
        let problem = resolve_problem(&args.problem, &file)?;
        let algorithms = match layered(args.algorithms.clone(), &file, "algorithms")? {
            Some(s) => parse_list(&s, parse_algorithm)?,
            None => vec![Algorithm::Bcd],
        };
        let epsilon_modes = match layered(args.epsilon_modes.clone(), &file, "epsilon-modes")? {
            Some(s) => parse_list(&s, parse_mode)?,
            None => vec![problem.epsilon_mode],
        };
        let seeds = match layered(args.seeds.clone(), &file, "seeds")? {
            Some(s) => parse_list(&s, |t| t.parse::<u64>().map_err(|_| anyhow!("invalid seed '{t}'")))?,
            None => vec![0],
        };
        Ok(BenchConfig {
            problem,
            algorithms,
            epsilon_modes,
            seeds,
            output_dir: layered(args.output_dir.clone(), &file, "output-dir")?,
        })
    }

    pub fn cells(&self) -> Vec<(Algorithm, EpsilonMode<f64>, u64)> {
        let mut out = Vec::new();
        for &a in &self.algorithms {
            for &m in &self.epsilon_modes {
                for &s in &self.seeds {
                    out.push((a, m, s));
                }
            }
        }
        out
    }
}
