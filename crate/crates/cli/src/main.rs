//! `slepian`: spectra, regional solves, synthetic experiments and kernel
//! evaluations from the command line.
//!
//! Every subcommand accepts the problem flags below and an optional
//! `--config` TOML file. Keys present in the file take precedence over the
//! corresponding flags.

use std::f64::consts::{PI, TAU};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use toml::{Table, Value};

use slepian_core::config::ProblemKind;
use slepian_core::experiment::{
    generate_truth, masked_rms, run_experiment, sample_rhs, ExperimentConfig,
};
use slepian_core::regularization::{scaling_coefficients, tsvd_solve, Direction, Kernel};
use slepian_core::report::{emit_reports, num, write_columns, write_eigenvectors, write_spectrum};
use slepian_core::spaces::RegionSpec;
use slepian_core::{Domain1D, GridSpec, Point, RegionQuadrature, SlepianSystem};

#[derive(Parser, Debug)]
#[command(name = "slepian", version, about = "Slepian bases for regional inverse problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues and singular values of the projected operator.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Spectrum CSV (k,rho,tau); stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the eigenvector coefficients to this CSV.
        #[arg(long)]
        vectors: Option<PathBuf>,
    },
    /// Solve one synthetic circle problem at a single scale.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Scale J of the scaling-function solution.
        #[arg(long, default_value_t = 6)]
        scale: u32,
        /// Use truncated SVD with this many modes instead of the filter.
        #[arg(long)]
        truncation: Option<usize>,
        /// Solution CSV (x,truth,approx); stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a multiscale experiment and write all report files.
    Experiment {
        #[command(flatten)]
        common: Common,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate the forward or inverse kernel for a fixed data point.
    Kernels {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = KernelDirection::Down)]
        direction: KernelDirection,
        /// Data point in the region: `x` on the circle, `colatitude,longitude` on the sphere.
        #[arg(long, value_delimiter = ',', num_args = 1..=2)]
        z: Option<Vec<f64>>,
        /// Filter the kernel with the scaling function of this scale.
        #[arg(long)]
        scale: Option<u32>,
        /// Sample count along the circle or along the meridian through `z`.
        #[arg(long, default_value_t = 401)]
        samples: usize,
        /// Kernel CSV (x,kernel); stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KernelDirection {
    Up,
    Down,
}

/// Flags mirroring the experiment configuration. Unset flags fall back to
/// the configuration defaults.
#[derive(Args, Debug, Default)]
struct Common {
    /// TOML configuration; its keys override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// identity | ill_posed | downward | coupled
    #[arg(long)]
    problem: Option<String>,
    /// Fourier bandlimit N.
    #[arg(long = "bandlimit", short = 'N')]
    bandlimit: Option<usize>,
    /// Maximal spherical-harmonic degree L.
    #[arg(long, short = 'L')]
    max_degree: Option<usize>,
    /// Region bounds on the circle, `a,b`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    bounds: Option<Vec<f64>>,
    #[arg(long)]
    region_nodes: Option<usize>,
    #[arg(long)]
    r_p: Option<f64>,
    #[arg(long)]
    r_s: Option<f64>,
    #[arg(long)]
    r_e: Option<f64>,
    #[arg(long)]
    cap_angle: Option<f64>,
    #[arg(long)]
    n_theta: Option<usize>,
    #[arg(long)]
    n_phi: Option<usize>,
    /// concatenated | interleaved
    #[arg(long)]
    layout: Option<String>,
    /// Keep modes with tau_k >= threshold * tau_1.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    noise_coeff: Option<f64>,
    #[arg(long)]
    noise_data: Option<f64>,
    #[arg(long)]
    rhs_nodes: Option<usize>,
    #[arg(long)]
    eval_nodes: Option<usize>,
    /// Comma-separated scales.
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<u32>>,
}

impl Common {
    fn flag_table(&self) -> Result<Table> {
        let mut problem = Table::new();
        let mut top = Table::new();
        if let Some(p) = &self.problem {
            p.parse::<ProblemKind>()?;
            problem.insert("kind".into(), Value::String(p.clone()));
        }
        let int = |v: usize| Value::Integer(v as i64);
        let put = |t: &mut Table, k: &str, v: Option<Value>| {
            if let Some(v) = v {
                t.insert(k.into(), v);
            }
        };
        put(&mut problem, "bandlimit", self.bandlimit.map(int));
        put(&mut problem, "max_degree", self.max_degree.map(int));
        put(&mut problem, "bounds", self.bounds.as_ref().map(|b| Value::Array(b.iter().map(|x| Value::Float(*x)).collect())));
        put(&mut problem, "region_nodes", self.region_nodes.map(int));
        put(&mut problem, "r_p", self.r_p.map(Value::Float));
        put(&mut problem, "r_s", self.r_s.map(Value::Float));
        put(&mut problem, "r_e", self.r_e.map(Value::Float));
        put(&mut problem, "cap_angle", self.cap_angle.map(Value::Float));
        put(&mut problem, "n_theta", self.n_theta.map(int));
        put(&mut problem, "n_phi", self.n_phi.map(int));
        put(&mut problem, "layout", self.layout.clone().map(Value::String));
        put(&mut top, "threshold_ratio", self.threshold.map(Value::Float));
        put(&mut top, "seed", self.seed.map(|s| Value::Integer(s as i64)));
        put(&mut top, "noise_coeff_std", self.noise_coeff.map(Value::Float));
        put(&mut top, "noise_data_amp", self.noise_data.map(Value::Float));
        put(&mut top, "rhs_nodes", self.rhs_nodes.map(int));
        put(&mut top, "eval_nodes", self.eval_nodes.map(int));
        put(
            &mut top,
            "scales",
            self.scales.as_ref().map(|s| Value::Array(s.iter().map(|j| Value::Integer(*j as i64)).collect())),
        );
        if !problem.is_empty() {
            top.insert("problem".into(), Value::Table(problem));
        }
        Ok(top)
    }

    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut table = self.flag_table()?;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file: Table = text.parse().with_context(|| format!("parsing {}", path.display()))?;
            merge(&mut table, file);
        }
        let config: ExperimentConfig = Value::Table(table).try_into().context("invalid configuration")?;
        Ok(config)
    }
}

/// Deep merge; values from `over` win.
fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn build(config: &ExperimentConfig) -> Result<SlepianSystem> {
    let instance = config.problem.instance()?;
    Ok(instance.build_with_threshold(config.threshold_ratio)?)
}

fn spectrum(common: &Common, out: Option<&Path>, vectors: Option<&Path>) -> Result<()> {
    let config = common.resolve()?;
    let sys = build(&config)?;
    write_spectrum(sink(out)?, sys.rhos(), sys.taus())?;
    if let Some(p) = vectors {
        write_eigenvectors(sink(Some(p))?, &sys)?;
    }
    eprintln!(
        "size {}, kept {}, condition {}, trace {}",
        sys.size(),
        sys.kept(),
        num(sys.condition_number()),
        num(sys.matrix_trace())
    );
    Ok(())
}

fn solve(common: &Common, scale: u32, truncation: Option<usize>, out: Option<&Path>) -> Result<()> {
    let config = common.resolve()?;
    config.validate()?;
    let instance = config.problem.instance()?;
    let sys = instance.build_with_threshold(config.threshold_ratio)?;
    let truth = generate_truth(sys.size(), config.seed, config.noise_coeff_std);
    let RegionSpec::Interval { lower, upper, .. } = *instance.region.spec() else {
        bail!("solve needs a circle problem");
    };
    let rhs = Arc::new(RegionQuadrature::interval(Domain1D::circle(), lower, upper, config.rhs_nodes)?);
    let data = sample_rhs(&instance, &truth, rhs, config.noise_data_amp, config.seed)?;
    let solution = match truncation {
        Some(k) => tsvd_solve(&sys, &data, k)?,
        None => scaling_coefficients(&sys, &data, &config.filter, scale)?,
    };

    let grid = GridSpec::new(config.eval_nodes, 0.0, TAU)?;
    let points = grid.points();
    let approx = solution.sample(&points)?;
    let exact = points
        .iter()
        .map(|&p| Ok(instance.operator.u_basis().values(p)?.iter().zip(&truth).map(|(u, c)| u * c).sum()))
        .collect::<slepian_core::Result<Vec<f64>>>()?;
    let inside: Vec<bool> = points.iter().map(|&p| instance.region.contains(p)).collect();
    write_columns(sink(out)?, &grid.coordinates(), &[("truth", &exact), ("approx", &approx)])?;
    eprintln!("kept {}, rms on region {}", sys.kept(), num(masked_rms(&exact, &approx, &inside)));
    Ok(())
}

fn experiment(common: &Common, out: &Path) -> Result<()> {
    let config = common.resolve()?;
    let report = run_experiment(&config)?;
    let files = emit_reports(&report, out)?;
    println!("config {} kept {} condition {}", report.config_hash, report.kept, num(report.condition_number));
    println!("J,rms");
    for s in &report.scales {
        println!("{},{}", s.scale, num(s.rms));
    }
    eprintln!("wrote {} files to {}", files.len(), out.display());
    Ok(())
}

fn kernels(
    common: &Common,
    direction: KernelDirection,
    z: Option<&[f64]>,
    scale: Option<u32>,
    samples: usize,
    out: Option<&Path>,
) -> Result<()> {
    let config = common.resolve()?;
    let sys = build(&config)?;
    let circle = config.problem.kind.is_circle();
    let z = match (circle, z) {
        (true, None) => Point::Line(PI),
        (true, Some([x])) => Point::Line(*x),
        (false, None) => Point::Sphere { colatitude: 0.0, longitude: 0.0 },
        (false, Some([t, p])) => Point::Sphere { colatitude: *t, longitude: *p },
        _ => bail!("--z takes one coordinate on the circle and two on the sphere"),
    };
    let direction = match direction {
        KernelDirection::Up => Direction::Up,
        KernelDirection::Down => Direction::Down,
    };
    let mut kernel = Kernel::new(&sys, direction);
    if let Some(j) = scale {
        kernel = kernel.with_filter(config.filter.clone(), j);
    }
    let (coords, points): (Vec<f64>, Vec<Point>) = if circle {
        let grid = GridSpec::new(samples, 0.0, TAU)?;
        (grid.coordinates(), grid.points())
    } else {
        let Point::Sphere { longitude, .. } = z else { unreachable!() };
        let grid = GridSpec::new(samples, 0.0, PI)?;
        let c = grid.coordinates();
        let p = c.iter().map(|&t| Point::Sphere { colatitude: t, longitude }).collect();
        (c, p)
    };
    let mut values = Vec::with_capacity(points.len());
    let mut unstable = false;
    for p in points {
        let v = kernel.eval(p, z)?;
        unstable |= v.unstable;
        values.push(v.value);
    }
    write_columns(sink(out)?, &coords, &[("kernel", &values)])?;
    eprintln!(
        "z {z}, kept {}, condition {}{}",
        sys.kept(),
        num(kernel.condition_number()),
        if unstable { ", UNSTABLE: tau_kept/tau_1 below 1e-6, filter with --scale" } else { "" }
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Spectrum { common, out, vectors } => spectrum(common, out.as_deref(), vectors.as_deref()),
        Command::Solve { common, scale, truncation, out } => solve(common, *scale, *truncation, out.as_deref()),
        Command::Experiment { common, out } => experiment(common, out),
        Command::Kernels { common, direction, z, scale, samples, out } => {
            kernels(common, *direction, z.as_deref(), *scale, *samples, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_prefers_file_values_and_keeps_other_flags() {
        let mut base: Table = "seed = 1\n[problem]\nbandlimit = 8\nkind = \"identity\"\n".parse().unwrap();
        let over: Table = "[problem]\nbandlimit = 12\n".parse().unwrap();
        merge(&mut base, over);
        assert_eq!(base["seed"].as_integer(), Some(1));
        assert_eq!(base["problem"]["bandlimit"].as_integer(), Some(12));
        assert_eq!(base["problem"]["kind"].as_str(), Some("identity"));
    }

    #[test]
    fn unset_flags_give_defaults() {
        let cfg = Common::default().resolve().unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn unknown_problem_is_rejected() {
        let c = Common { problem: Some("nope".into()), ..Default::default() };
        assert!(c.resolve().is_err());
    }
}
