//! Experiment configuration: defaults, then a TOML file, then command-line flags.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize, Serializer};

use heatstein::heatkernel::validate_t_grid;
use heatstein::steinlab::{DEFAULT_INCREMENT_GRID, MIN_DISTANCE_SAMPLES};
use heatstein::{NormalizedA, SquareMatrix};

pub const DEFAULT_N: usize = 6;
pub const DEFAULT_SEED: u64 = 42;

/// Where the matrix `A` comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ASource {
    Identity,
    Borel,
    Random(u64),
    File(PathBuf),
}

impl fmt::Display for ASource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ASource::Identity => f.write_str("identity"),
            ASource::Borel => f.write_str("borel"),
            ASource::Random(seed) => write!(f, "random:{seed}"),
            ASource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for ASource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "identity" | "i" => return Ok(ASource::Identity),
            "borel" => return Ok(ASource::Borel),
            _ => {}
        }
        if let Some(seed) = s.strip_prefix("random:") {
            let seed = seed
                .parse()
                .with_context(|| format!("bad seed in A source {s:?}"))?;
            return Ok(ASource::Random(seed));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(ASource::File(PathBuf::from(path)));
        }
        if Path::new(s).is_file() {
            return Ok(ASource::File(PathBuf::from(s)));
        }
        bail!("unknown A source {s:?}; expected identity, borel, random:SEED or file:PATH")
    }
}

impl Serialize for ASource {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Reads a square matrix as JSON (`[[..], ..]`) or as whitespace-separated rows.
pub fn read_matrix(path: &Path) -> Result<SquareMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rows: Vec<Vec<f64>> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).with_context(|| format!("parsing JSON matrix {}", path.display()))?
    } else {
        text.lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|l| {
                l.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|x| !x.is_empty())
                    .map(|x| x.parse::<f64>().map_err(|e| anyhow!("bad entry {x:?}: {e}")))
                    .collect()
            })
            .collect::<Result<_>>()?
    };
    Ok(SquareMatrix::from_rows(&rows)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSizes {
    /// Haar samples for scalar expectations.
    pub scalar: usize,
    /// Haar samples for distance checks.
    pub distance: usize,
    /// Heat-step resamples per `(base point, t)`.
    pub resamples: usize,
    /// Samples per time for the increment scaling fit.
    pub increments: usize,
}

impl Default for SampleSizes {
    fn default() -> Self {
        SampleSizes {
            scalar: 1_000_000,
            distance: MIN_DISTANCE_SAMPLES,
            resamples: 200_000,
            increments: 200_000,
        }
    }
}

/// A fully resolved experiment. Thread count and output path are left out
/// of the serialized form so reports do not depend on them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: ASource,
    pub seed: u64,
    pub samples: SampleSizes,
    pub panel: usize,
    pub t_grid: Vec<f64>,
    pub increment_grid: Vec<f64>,
    pub max_degree: usize,
    pub mgf_times: Vec<f64>,
    pub bound_ns: Vec<usize>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: DEFAULT_N,
            a: ASource::Identity,
            seed: DEFAULT_SEED,
            samples: SampleSizes::default(),
            panel: 8,
            t_grid: vec![1e-3, 4e-3, 1.6e-2],
            increment_grid: DEFAULT_INCREMENT_GRID.to_vec(),
            max_degree: 8,
            mgf_times: vec![0.25, 0.5],
            bound_ns: vec![4, 6, 8, 12, 16],
            out: None,
            threads: None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSamples {
    scalar: Option<usize>,
    distance: Option<usize>,
    resamples: Option<usize>,
    increments: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConditional {
    panel: Option<usize>,
    t_grid: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGrid {
    t_grid: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileMgf {
    t: Option<Vec<f64>>,
    max_degree: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDistance {
    ns: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileOutput {
    out: Option<PathBuf>,
    threads: Option<usize>,
}

/// Layout of the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    n: Option<usize>,
    #[serde(rename = "A")]
    a: Option<String>,
    seed: Option<u64>,
    #[serde(default)]
    samples: FileSamples,
    #[serde(default)]
    conditional: FileConditional,
    #[serde(default)]
    increments: FileGrid,
    #[serde(default)]
    mgf: FileMgf,
    #[serde(default)]
    distance: FileDistance,
    #[serde(default)]
    output: FileOutput,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config file {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }
}

/// Values given on the command line; `None` leaves the lower layers alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub a: Option<ASource>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub resamples: Option<usize>,
    pub panel: Option<usize>,
    pub t_grid: Option<Vec<f64>>,
    pub increment_grid: Option<Vec<f64>>,
    pub max_degree: Option<usize>,
    pub bound_ns: Option<Vec<usize>>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    /// Merges the layers with precedence command line > file > defaults,
    /// then validates.
    pub fn build(file: Option<FileConfig>, cli: Overrides) -> Result<Self> {
        let file = file.unwrap_or_default();
        let d = ExperimentConfig::default();
        let a = match (cli.a, file.a) {
            (Some(a), _) => a,
            (None, Some(s)) => s.parse()?,
            (None, None) => d.a,
        };
        let file_dim = match &a {
            ASource::File(p) => Some(read_matrix(p)?.dim()),
            _ => None,
        };
        let n = cli.n.or(file.n).or(file_dim).unwrap_or(d.n);
        if let Some(k) = file_dim {
            if k != n {
                bail!("A file is {k}x{k} but n = {n}");
            }
        }
        let samples = SampleSizes {
            scalar: cli.samples.or(file.samples.scalar).unwrap_or(d.samples.scalar),
            distance: cli.samples.or(file.samples.distance).unwrap_or(d.samples.distance),
            resamples: cli.resamples.or(file.samples.resamples).unwrap_or(d.samples.resamples),
            increments: cli
                .resamples
                .or(file.samples.increments)
                .unwrap_or(d.samples.increments),
        };
        let cfg = ExperimentConfig {
            n,
            a,
            seed: cli.seed.or(file.seed).unwrap_or(d.seed),
            samples,
            panel: cli.panel.or(file.conditional.panel).unwrap_or(d.panel),
            t_grid: cli.t_grid.or(file.conditional.t_grid).unwrap_or(d.t_grid),
            increment_grid: cli
                .increment_grid
                .or(file.increments.t_grid)
                .unwrap_or(d.increment_grid),
            max_degree: cli.max_degree.or(file.mgf.max_degree).unwrap_or(d.max_degree),
            mgf_times: file.mgf.t.unwrap_or(d.mgf_times),
            bound_ns: cli.bound_ns.or(file.distance.ns).unwrap_or(d.bound_ns),
            out: cli.out.or(file.output.out),
            threads: cli.threads.or(file.output.threads),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            bail!("n must be at least 2 for group experiments, got {}", self.n);
        }
        let s = &self.samples;
        // the distance minimum is enforced by the distance check itself
        if s.scalar < 2 || s.resamples < 2 || s.increments < 2 || s.distance < 2 {
            bail!("sample sizes must be at least 2");
        }
        if self.panel == 0 {
            bail!("panel size must be positive");
        }
        validate_t_grid(&self.t_grid)?;
        validate_t_grid(&self.increment_grid)?;
        if self.max_degree % 2 != 0 || self.max_degree > 12 {
            bail!("max degree must be even and at most 12, got {}", self.max_degree);
        }
        if self.mgf_times.iter().any(|t| !(t.abs() <= 1.0)) {
            bail!("mgf times must satisfy |t| <= 1");
        }
        if self.bound_ns.iter().any(|&n| n < 2) {
            bail!("every n in the distance sweep must be at least 2");
        }
        if self.threads == Some(0) {
            bail!("thread count must be positive");
        }
        Ok(())
    }

    /// `A` at the configured dimension.
    pub fn a_matrix(&self) -> Result<NormalizedA> {
        self.a_at(self.n)
    }

    /// `A` at dimension `n`; file sources only exist at their own size.
    pub fn a_at(&self, n: usize) -> Result<NormalizedA> {
        Ok(match &self.a {
            ASource::Identity => NormalizedA::identity(n),
            ASource::Borel => NormalizedA::borel(n),
            ASource::Random(seed) => NormalizedA::random(n, *seed),
            ASource::File(p) => {
                let a = heatstein::haar::normalize_a(&read_matrix(p)?)?;
                if a.dim() != n {
                    bail!("A file is {0}x{0}, cannot be used at n = {n}", a.dim());
                }
                a
            }
        })
    }
}

/// Parses `1e-3,4e-3` or `1e-3 4e-3`.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|e| anyhow!("bad list entry {x:?}: {e}")))
        .collect()
}
