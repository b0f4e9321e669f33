//! Run configuration: a TOML file overlaid with command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cayley_spectra::{Convention, GroupParams, InvolutiveHom, SubgroupSpec, DEFAULT_MAX_BALL};
use clap::Args;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const MAX_BALL_ENV: &str = "CAYLEY_SPECTRA_MAX_BALL";

/// An inline homomorphism: one cycle-notation image per generator.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct HomSpec {
    pub m: usize,
    pub images: Vec<String>,
}

impl HomSpec {
    pub fn build(&self, params: GroupParams) -> Result<InvolutiveHom> {
        Ok(InvolutiveHom::from_cycles(params, self.m, &self.images)?)
    }

    pub fn of(hom: &InvolutiveHom) -> Self {
        Self {
            m: hom.degree(),
            images: hom.images().iter().map(|p| p.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    pub c1: Option<[f64; 2]>,
    pub c2: Option<[f64; 2]>,
    pub seeds: Option<[f64; 2]>,
    pub n_min: Option<i64>,
    pub n_max: Option<i64>,
}

/// Contents of a configuration file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<usize>,
    pub subgroup: Option<String>,
    pub hom: Option<HomSpec>,
    pub epsilon: Option<f64>,
    pub potential: Option<Vec<f64>>,
    pub energy: Option<f64>,
    pub convention: Option<String>,
    pub radius: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub chain: ChainSection,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    match parse_list(s)?.as_slice() {
        &[a, b] => Ok([a, b]),
        _ => Err(format!("expected two comma-separated numbers, got {s:?}")),
    }
}

/// Flags shared by every subcommand; they override the configuration file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Tree order k (each vertex has k+1 neighbours)
    #[arg(long)]
    pub k: Option<usize>,
    /// Subgroup: trivial, even, hA:1,3, hpair:1,2, hcap, zM:1,2
    #[arg(long)]
    pub subgroup: Option<String>,
    /// Coupling constant
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// Potential values, comma-separated (one per coset, a constant, or a period)
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub potential: Option<::std::vec::Vec<f64>>,
    /// Energy (chain runs)
    #[arg(long, allow_hyphen_values = true)]
    pub energy: Option<f64>,
    /// Verification radius
    #[arg(long)]
    pub radius: Option<usize>,
    /// adjacency or laplacian
    #[arg(long)]
    pub convention: Option<String>,
    /// Random seed for sampled checks
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output prefix; writes <out>.json and <out>.csv
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ChainArgs {
    /// Coefficient C1 as "re,im"
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub c1: Option<[f64; 2]>,
    /// Coefficient C2 as "re,im"
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub c2: Option<[f64; 2]>,
    /// Real seeds "phi0,phi1"; overrides C1, C2
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub seeds: Option<[f64; 2]>,
    #[arg(long, allow_hyphen_values = true)]
    pub n_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub n_max: Option<i64>,
}

/// How a chain run is seeded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainStart {
    Coefficients(Complex64, Complex64),
    Seeds(f64, f64),
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub k: usize,
    pub subgroup: Option<String>,
    pub hom: Option<HomSpec>,
    pub epsilon: f64,
    pub potential: Option<Vec<f64>>,
    pub energy: Option<f64>,
    pub convention: Convention,
    pub radius: usize,
    pub seed: u64,
    pub trials: usize,
    pub out: Option<PathBuf>,
    pub max_ball: usize,
    pub chain_start: Option<ChainStart>,
    pub n_range: (i64, i64),
}

pub const DEFAULT_K: usize = 2;
pub const DEFAULT_RADIUS: usize = 4;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_N_RANGE: (i64, i64) = (-20, 20);

impl RunConfig {
    pub fn resolve(common: &CommonArgs, chain: &ChainArgs) -> Result<Self> {
        let file = match &common.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::merge(file, common, chain, std::env::var(MAX_BALL_ENV).ok())
    }

    pub fn merge(file: FileConfig, common: &CommonArgs, chain: &ChainArgs, max_ball: Option<String>) -> Result<Self> {
        let k = common.k.or(file.k).unwrap_or(DEFAULT_K);
        GroupParams::new(k)?;
        let convention = match common.convention.as_ref().or(file.convention.as_ref()) {
            Some(c) => c.parse::<Convention>().map_err(anyhow::Error::msg)?,
            None => Convention::Adjacency,
        };
        let max_ball = match max_ball {
            Some(v) => v
                .trim()
                .parse()
                .with_context(|| format!("{MAX_BALL_ENV} must be a positive integer, got {v:?}"))?,
            None => DEFAULT_MAX_BALL,
        };
        let subgroup = common.subgroup.clone().or(file.subgroup);
        if subgroup.is_some() && file.hom.is_some() && common.subgroup.is_none() {
            bail!("configuration gives both `subgroup` and `[hom]`");
        }
        let hom = if common.subgroup.is_some() { None } else { file.hom };

        let z = |c: Option<[f64; 2]>| c.map(|[re, im]| Complex64::new(re, im)).unwrap_or_default();
        let pick = |seeds: Option<[f64; 2]>, c1: Option<[f64; 2]>, c2: Option<[f64; 2]>| match (seeds, c1, c2) {
            (Some([a, b]), _, _) => Some(ChainStart::Seeds(a, b)),
            (None, None, None) => None,
            (None, c1, c2) => Some(ChainStart::Coefficients(z(c1), z(c2))),
        };
        let chain_start =
            pick(chain.seeds, chain.c1, chain.c2).or_else(|| pick(file.chain.seeds, file.chain.c1, file.chain.c2));
        let n_range = (
            chain.n_min.or(file.chain.n_min).unwrap_or(DEFAULT_N_RANGE.0),
            chain.n_max.or(file.chain.n_max).unwrap_or(DEFAULT_N_RANGE.1),
        );
        if n_range.0 > 0 || n_range.1 < 1 {
            bail!("sequence range [{}, {}] must contain 0 and 1", n_range.0, n_range.1);
        }
        Ok(Self {
            k,
            subgroup,
            hom,
            epsilon: common.epsilon.or(file.epsilon).unwrap_or(1.0),
            potential: common.potential.clone().or(file.potential),
            energy: common.energy.or(file.energy),
            convention,
            radius: common.radius.or(file.radius).unwrap_or(DEFAULT_RADIUS),
            seed: common.seed.or(file.seed).unwrap_or(0),
            trials: file.trials.unwrap_or(DEFAULT_TRIALS),
            out: common.out.clone().or(file.out),
            max_ball,
            chain_start,
            n_range,
        })
    }

    pub fn params(&self) -> GroupParams {
        GroupParams::new(self.k).expect("validated in merge")
    }

    pub fn subgroup_spec(&self) -> Result<Option<SubgroupSpec>> {
        self.subgroup
            .as_deref()
            .map(|s| s.parse::<SubgroupSpec>().map_err(Into::into))
            .transpose()
    }

    /// Potential for `r` cosets: a length-1 list is broadcast, a missing one is zero.
    pub fn coset_potential(&self, r: usize) -> Result<Vec<f64>> {
        match &self.potential {
            None => Ok(vec![0.0; r]),
            Some(v) if v.len() == r => Ok(v.clone()),
            Some(v) if v.len() == 1 => Ok(vec![v[0]; r]),
            Some(v) => bail!("potential has {} values but the subgroup has index {r}", v.len()),
        }
    }
}
