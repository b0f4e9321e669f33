//! The four subcommands. Each returns a report; writing it is left to the caller.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use cayley_spectra::chain::{characteristic_roots, solution_from_seeds, solve_recurrence};
use cayley_spectra::spectrum::RESIDUAL_TOLERANCE;
use cayley_spectra::verify::{check_periodicity, lift_chain, lift_components, residual, BALL_TOLERANCE};
use cayley_spectra::{
    BallWaveFunction, ChainParams, ChainPotential, ChainSequence, ChainSolution, CosetLabeling, CosetPartition,
    InvolutiveHom, PeriodicPotential, SpectralProblem, Subgroup, SubgroupSpec, ZProjection,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ChainStart, HomSpec, RunConfig};
use crate::report::{
    ChainReport, ClosedForm, CosetRow, Metadata, PartitionReport, Report, SequenceRow, SolutionRow, SpectrumReport,
    VerificationCheck, VerificationReport, DK_CONVENTION,
};

const CUSTOM_SUBGROUP: &str = "custom";
const DEFAULT_CHAIN_SUBGROUP: &str = "zM:1,2";

impl Report {
    /// Whether the run met its checks (drives the exit code).
    pub fn passed(&self) -> bool {
        match self {
            Report::Partition(_) | Report::Chain(_) => true,
            Report::Spectrum(s) => s.pass,
            Report::Verification(v) => v.pass,
        }
    }
}

/// Finite-index subgroup of a run, with the name recorded in reports.
fn finite_hom(cfg: &RunConfig) -> Result<(String, InvolutiveHom)> {
    let params = cfg.params();
    if let Some(hom) = &cfg.hom {
        return Ok((CUSTOM_SUBGROUP.into(), hom.build(params)?));
    }
    let spec = cfg.subgroup_spec()?.ok_or_else(|| anyhow!("no subgroup given"))?;
    match spec.resolve(params)? {
        Subgroup::Finite(hom) => Ok((spec.to_string(), hom)),
        Subgroup::Infinite(_) => bail!("{spec} has infinite index; use the chain subcommand"),
    }
}

fn coset_partition(cfg: &RunConfig) -> Result<(String, CosetPartition)> {
    let (name, hom) = finite_hom(cfg)?;
    Ok((name, CosetPartition::new(hom)?))
}

pub fn cmd_partition(cfg: &RunConfig) -> Result<Report> {
    let (name, p) = coset_partition(cfg)?;
    let cosets = p
        .representatives()
        .iter()
        .zip(p.cosets())
        .enumerate()
        .map(|(index, (w, g))| CosetRow {
            index,
            representative: w.to_string(),
            image: g.to_string(),
        })
        .collect();
    Ok(Report::Partition(PartitionReport {
        metadata: Metadata::new(vec!["coset 0 contains the identity".into()]),
        k: cfg.k,
        subgroup: name,
        hom: HomSpec::of(p.hom()),
        r: p.r(),
        cosets,
        q: p.q().to_vec(),
        q_h0: p.q_h0().to_vec(),
        n_h0: p.n_h0(),
    }))
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Report> {
    let (name, p) = coset_partition(cfg)?;
    let potential = PeriodicPotential::new(cfg.coset_potential(p.r())?, cfg.epsilon)?;
    let problem = SpectralProblem::with_convention(&p, potential, cfg.convention)?;
    let poly = problem.determinant_poly();
    let solutions: Vec<SolutionRow> = problem
        .energies()?
        .into_iter()
        .enumerate()
        .map(|(index, s)| SolutionRow {
            index,
            energy: s.energy,
            multiplicity: s.multiplicity,
            components: s.components,
            residual: s.residual,
        })
        .collect();
    let pass = solutions
        .iter()
        .all(|s| s.residual <= RESIDUAL_TOLERANCE * (1.0 + s.energy.abs()));
    Ok(Report::Spectrum(SpectrumReport {
        metadata: Metadata::new(vec![format!("D_K(E) = {DK_CONVENTION}")]),
        k: cfg.k,
        subgroup: name,
        hom: HomSpec::of(p.hom()),
        r: p.r(),
        q: p.q().to_vec(),
        epsilon: cfg.epsilon,
        potential: problem.potential().values().to_vec(),
        convention: cfg.convention,
        dk_exact: poly.is_exact(),
        dk_coefficients: poly.coefficients,
        residual_tolerance: RESIDUAL_TOLERANCE,
        solutions,
        pass,
    }))
}

fn z_projection(cfg: &RunConfig, subgroup: &str) -> Result<ZProjection> {
    match subgroup.parse::<SubgroupSpec>()?.resolve(cfg.params())? {
        Subgroup::Infinite(z) => Ok(z),
        Subgroup::Finite(_) => bail!("{subgroup} has finite index; use the spectrum subcommand"),
    }
}

fn chain_potential(values: &[f64]) -> ChainPotential {
    match values {
        [] => ChainPotential::Constant(0.0),
        [v] => ChainPotential::Constant(*v),
        vs => ChainPotential::Periodic(vs.to_vec()),
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn cmd_chain(cfg: &RunConfig) -> Result<Report> {
    if cfg.hom.is_some() {
        bail!("chain runs take a zM subgroup, not an inline homomorphism");
    }
    let subgroup = cfg.subgroup.clone().unwrap_or_else(|| DEFAULT_CHAIN_SUBGROUP.into());
    z_projection(cfg, &subgroup)?;
    let energy = cfg
        .energy
        .ok_or_else(|| anyhow!("chain runs need an energy (--energy)"))?;
    let values = cfg.potential.clone().unwrap_or_default();
    let potential = chain_potential(&values);
    let params = ChainParams::new(cfg.k, cfg.epsilon, potential.clone(), energy)?.with_convention(cfg.convention);
    let range = cfg.n_range.0..=cfg.n_range.1;

    let constant = potential.constant().is_some();
    let start = cfg.chain_start.unwrap_or(if constant {
        ChainStart::Coefficients(Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0))
    } else {
        ChainStart::Seeds(1.0, 0.0)
    });
    let mut notes = vec![format!("{} sign convention", cfg.convention)];
    let (closed, sequence) = match (constant, start) {
        (true, ChainStart::Coefficients(c1, c2)) => {
            let sol = ChainSolution {
                roots: characteristic_roots(&params)?,
                c1,
                c2,
            };
            (Some(sol), sol.sequence(range)?)
        }
        (true, ChainStart::Seeds(a, b)) => {
            let (a, b) = (Complex64::new(a, 0.0), Complex64::new(b, 0.0));
            match solution_from_seeds(&params, a, b) {
                Ok(sol) => (Some(sol), sol.sequence(range)?),
                Err(cayley_spectra::Error::IllConditioned { gap }) => {
                    notes.push(format!(
                        "roots nearly equal (gap {gap:e}); sequence from the recurrence only"
                    ));
                    (None, solve_recurrence(&params, a, b, range)?)
                }
                Err(e) => return Err(e.into()),
            }
        }
        (false, ChainStart::Seeds(a, b)) => {
            notes.push(format!(
                "period-{} potential; sequence from the recurrence",
                values.len()
            ));
            let seq = solve_recurrence(&params, Complex64::new(a, 0.0), Complex64::new(b, 0.0), range)?;
            (None, seq)
        }
        (false, ChainStart::Coefficients(..)) => {
            bail!("a periodic chain potential has no closed form; give seeds instead of C1, C2")
        }
    };
    let closed_form = closed.map(|s| ClosedForm {
        lambda1: pair(s.roots.lambda1),
        lambda2: pair(s.roots.lambda2),
        c1: pair(s.c1),
        c2: pair(s.c2),
        degenerate: s.degenerate(),
        classification: s.roots.class,
        pointwise_only: s.pointwise_only(),
    });
    Ok(Report::Chain(ChainReport {
        metadata: Metadata::new(notes),
        k: cfg.k,
        subgroup,
        epsilon: cfg.epsilon,
        potential: match &potential {
            ChainPotential::Constant(v) => vec![*v],
            ChainPotential::Periodic(vs) => vs.clone(),
        },
        energy,
        convention: cfg.convention,
        closed_form,
        real: sequence.is_real(),
        sequence: sequence
            .iter()
            .map(|(n, v)| SequenceRow { n, re: v.re, im: v.im })
            .collect(),
    }))
}

fn check<L: CosetLabeling>(
    label: String,
    w: &BallWaveFunction,
    labeling: &L,
    cfg: &RunConfig,
    rng: &mut ChaCha8Rng,
) -> Result<VerificationCheck> {
    let res = residual(w)?;
    let tolerance = BALL_TOLERANCE * w.scale();
    let periodic = check_periodicity(w, labeling, cfg.trials, rng)?;
    Ok(VerificationCheck {
        label,
        energy: w.energy(),
        radius: cfg.radius,
        interior_count: res.interior_count,
        max_residual: res.max_residual,
        worst_vertex: res.worst_vertex.to_string(),
        tolerance,
        periodicity_trials: periodic.trials,
        periodicity_witness: periodic.witness.map(|(y, x)| [y.to_string(), x.to_string()]),
        pass: res.max_residual <= tolerance && periodic.passed,
    })
}

/// Lifts every solution in a spectrum or chain report to a ball of radius
/// `cfg.radius` and checks the equation and periodicity there.
pub fn cmd_verify(cfg: &RunConfig, source: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(source).with_context(|| format!("reading {}", source.display()))?;
    let input = Report::from_json(&text)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();
    match input {
        Report::Spectrum(s) => {
            let run = RunConfig { k: s.k, ..cfg.clone() };
            let p = CosetPartition::new(s.hom.build(run.params())?)?;
            if p.q() != s.q.as_slice() {
                bail!("stored Q does not match the stored homomorphism");
            }
            let potential = PeriodicPotential::new(s.potential, s.epsilon)?;
            for sol in &s.solutions {
                let w = lift_components(
                    &p,
                    &sol.components,
                    &potential,
                    sol.energy,
                    s.convention,
                    run.radius,
                    run.max_ball,
                )?;
                checks.push(check(format!("solution {}", sol.index), &w, &p, &run, &mut rng)?);
            }
        }
        Report::Chain(c) => {
            let run = RunConfig { k: c.k, ..cfg.clone() };
            let z = z_projection(&run, &c.subgroup)?;
            let params = ChainParams::new(c.k, c.epsilon, chain_potential(&c.potential), c.energy)?
                .with_convention(c.convention);
            let start = c.sequence.first().ok_or_else(|| anyhow!("empty sequence"))?.n;
            if c.sequence.iter().enumerate().any(|(i, row)| row.n != start + i as i64) {
                bail!("sequence indices are not consecutive");
            }
            let seq = ChainSequence::new(start, c.sequence.iter().map(|r| Complex64::new(r.re, r.im)).collect());
            let w = lift_chain(&z, &params, &seq, run.radius, run.max_ball)?;
            checks.push(check("chain".into(), &w, &z, &run, &mut rng)?);
        }
        Report::Partition(_) | Report::Verification(_) => {
            bail!("{} holds neither a spectrum nor a chain report", source.display())
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report::Verification(VerificationReport {
        metadata: Metadata::new(vec![]),
        source: source.display().to_string(),
        seed: cfg.seed,
        checks,
        pass,
    }))
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = OsString::from(prefix.as_os_str());
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Writes `<out>.json` (and `<out>.csv` when the report has a table), or the
/// JSON to stdout when there is no prefix. Returns the files written.
pub fn write_report(report: &Report, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    let json = report.to_json()?;
    let Some(prefix) = out else {
        print!("{json}");
        return Ok(vec![]);
    };
    let mut written = Vec::new();
    let path = with_extension(prefix, "json");
    std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
    written.push(path);
    if let Some(csv) = report.to_csv()? {
        let path = with_extension(prefix, "csv");
        std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}
