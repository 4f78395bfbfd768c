use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lacuna::app::{finish, run_experiment, EXIT_ERROR};
use lacuna::config::{parse_float_list, parse_int_list, ExperimentConfig};
use lacuna::{CliError, Result};

/// Experiments on homogeneous groups: algebras, measures, averaging
/// operators and the estimates built on them.
#[derive(Parser)]
#[command(name = "lacuna", version)]
struct Cli {
    /// Global seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; overrides LACUNA_THREADS and the config file.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overwrite an output directory that already holds results.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand)]
enum Group {
    /// Structure checks on graded Lie algebras.
    Algebra {
        #[command(subcommand)]
        cmd: AlgebraCmd,
    },
    /// Measure construction, convolution powers and smoothing.
    Measure {
        #[command(subcommand)]
        cmd: MeasureCmd,
    },
    /// Averaging, maximal and Littlewood–Paley operators.
    Op {
        #[command(subcommand)]
        cmd: OpCmd,
    },
    /// Numerical checks of the decay, orthogonality and kernel estimates.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Validate an algebra and test the group law on random triples.
    Check(ExpArgs),
    /// Decide whether a measure's first-layer projection spans V1.
    Gentest(ExpArgs),
    /// Kernel dimension of ad X for random X.
    Adkernel(ExpArgs),
    /// Test that the first layer generates the algebra.
    Stratified(ExpArgs),
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Build a measure and write it as JSON.
    Build(ExpArgs),
    /// Alternating convolution power of a measure.
    Convpow(ExpArgs),
    /// Convolution-power sweep with translation-modulus fit.
    Ca(ExpArgs),
    /// Fourier decay exponent of a measure in an abelian group.
    Fourier(ExpArgs),
}

#[derive(Subcommand)]
enum OpCmd {
    /// Average a test function against a dilated measure.
    Average(ExpArgs),
    /// Lacunary maximal function of a test function.
    Maximal(ExpArgs),
    /// Build the Littlewood–Paley kernel.
    Psi(ExpArgs),
    /// L2 operator norm of convolution with a dilated measure.
    Norm(ExpArgs),
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Operator-norm decay against the scale gap.
    L2decay(ExpArgs),
    /// Almost-orthogonality table.
    Ao(ExpArgs),
    /// Hörmander sums along a ray and the vanishing certificate.
    Hormander(ExpArgs),
    /// Mean-value ratios along a dyadic sequence.
    Meanvalue(ExpArgs),
    /// Convex double-point chord.
    Convexchord(ExpArgs),
}

/// Config file and per-run overrides.
#[derive(Args)]
struct ExpArgs {
    /// JSON config; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Algebra file or built-in name.
    #[arg(long)]
    algebra: Option<String>,
    /// Measure kind (koranyi, horizontal, tilted, sphere, moment, point, bump, file).
    #[arg(long)]
    measure: Option<String>,
    /// Measure file, implies `--measure file`.
    #[arg(long)]
    measure_file: Option<String>,
    /// Sample points in the measure
    #[arg(long)]
    points: Option<usize>,
    /// Seed of the measure sampler
    #[arg(long)]
    measure_seed: Option<u64>,
    /// Subtract a smooth bump of equal mass.
    #[arg(long)]
    mean_zero: bool,
    /// Grid nodes per axis (one value or one per axis).
    #[arg(long, value_parser = usize_list)]
    resolution: Option<Usizes>,
    /// Grid half-widths (one value or one per axis).
    #[arg(long, value_parser = parse_float_list)]
    half: Option<Floats>,
    /// Scale gaps, e.g. `0..8`.
    #[arg(long, value_parser = i32_list, allow_hyphen_values = true)]
    gaps: Option<Ints>,
    /// Scales k, e.g. `-2..1`
    #[arg(long, value_parser = i32_list, allow_hyphen_values = true)]
    ks: Option<Ints>,
    /// Scales j
    #[arg(long, value_parser = i32_list, allow_hyphen_values = true)]
    js: Option<Ints>,
    /// Scale offsets l
    #[arg(long, value_parser = i32_list, allow_hyphen_values = true)]
    ls: Option<Ints>,
    /// Scale offset l
    #[arg(long, allow_hyphen_values = true)]
    l: Option<i32>,
    /// Dilation exponent k
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i32>,
    /// Convolution power.
    #[arg(long)]
    n: Option<usize>,
    /// Convolution powers, e.g. `1..4`
    #[arg(long, value_parser = usize_list)]
    ns: Option<Usizes>,
    /// Power-iteration limit
    #[arg(long)]
    iters: Option<usize>,
    /// Convergence or acceptance tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Random samples per check
    #[arg(long)]
    samples: Option<usize>,
    /// Smoothing bandwidth in grid cells
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Cloud size cap for convolution products
    #[arg(long)]
    max_points: Option<usize>,
    /// Directions per radius
    #[arg(long)]
    directions: Option<usize>,
    /// Radii, comma separated
    #[arg(long, value_parser = parse_float_list)]
    radii: Option<Floats>,
    /// Group element, comma separated.
    #[arg(long, value_parser = parse_float_list, allow_hyphen_values = true)]
    point: Option<Floats>,
    /// Lebesgue exponent
    #[arg(long)]
    p: Option<f64>,
}

// Aliases keep clap from treating list-valued flags as repeated flags.
type Ints = Vec<i32>;
type Usizes = Vec<usize>;
type Floats = Vec<f64>;

fn i32_list(s: &str) -> std::result::Result<Vec<i32>, String> {
    parse_int_list(s)
}

fn usize_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    parse_int_list(s)
}

fn experiment(group: &Group) -> (&'static str, &ExpArgs) {
    match group {
        Group::Algebra { cmd } => match cmd {
            AlgebraCmd::Check(a) => ("check", a),
            AlgebraCmd::Gentest(a) => ("gentest", a),
            AlgebraCmd::Adkernel(a) => ("adkernel", a),
            AlgebraCmd::Stratified(a) => ("stratified", a),
        },
        Group::Measure { cmd } => match cmd {
            MeasureCmd::Build(a) => ("build", a),
            MeasureCmd::Convpow(a) => ("convpow", a),
            MeasureCmd::Ca(a) => ("ca", a),
            MeasureCmd::Fourier(a) => ("fourier", a),
        },
        Group::Op { cmd } => match cmd {
            OpCmd::Average(a) => ("average", a),
            OpCmd::Maximal(a) => ("maximal", a),
            OpCmd::Psi(a) => ("psi", a),
            OpCmd::Norm(a) => ("norm", a),
        },
        Group::Verify { cmd } => match cmd {
            VerifyCmd::L2decay(a) => ("l2decay", a),
            VerifyCmd::Ao(a) => ("ao", a),
            VerifyCmd::Hormander(a) => ("hormander", a),
            VerifyCmd::Meanvalue(a) => ("meanvalue", a),
            VerifyCmd::Convexchord(a) => ("convexchord", a),
        },
    }
}

/// File values first, then the thread-count environment variable, then flags.
fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let (name, a) = experiment(&cli.group);
    let mut c = match &a.config {
        Some(path) => {
            let c = ExperimentConfig::load(path)?;
            if c.experiment != name {
                return Err(CliError::Invalid(format!(
                    "config names experiment `{}` but the command runs `{name}`",
                    c.experiment
                )));
            }
            c
        }
        None => ExperimentConfig::new(name)?,
    };
    if let Ok(v) = std::env::var("LACUNA_THREADS") {
        c.threads = v
            .parse()
            .map_err(|_| CliError::Invalid(format!("LACUNA_THREADS=`{v}` is not a count")))?;
    }
    macro_rules! set {
        ($($flag:ident => $field:expr),* $(,)?) => {
            $(if let Some(v) = &a.$flag { $field = Some(v.clone()); })*
        };
    }
    if let Some(v) = &a.algebra {
        c.algebra = v.clone();
    }
    if let Some(v) = &a.measure {
        c.measure.kind = v.clone();
    }
    if let Some(v) = &a.measure_file {
        c.measure.kind = "file".into();
        c.measure.path = Some(v.clone());
    }
    if let Some(v) = a.points {
        c.measure.points = v;
    }
    if let Some(v) = a.measure_seed {
        c.measure.seed = v;
    }
    if a.mean_zero {
        c.measure.mean_zero = true;
    }
    if let Some(v) = &a.resolution {
        c.grid.resolution = v.clone();
    }
    if let Some(v) = &a.half {
        c.grid.half = v.clone();
    }
    let p = &mut c.params;
    set!(
        gaps => p.gaps, ks => p.ks, js => p.js, ls => p.ls, l => p.l, k => p.k,
        n => p.n, ns => p.ns, iters => p.iters, tol => p.tol, samples => p.samples,
        bandwidth => p.bandwidth, max_points => p.max_points, directions => p.directions,
        radii => p.radii, point => p.point, p => p.p,
    );
    if let Some(v) = cli.seed {
        c.seed = v;
    }
    if let Some(v) = cli.threads {
        c.threads = v;
    }
    if let Some(v) = &cli.out {
        c.out = v.to_string_lossy().into_owned();
    }
    c.validate()?;
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => return ExitCode::from(finish(None, Err(e)) as u8),
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build_global()
    {
        eprintln!("thread pool: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    let start = Instant::now();
    let result = run_experiment(&cfg, cli.force);
    if let Ok(r) = &result {
        for e in &r.manifest {
            println!("{}  {}", e.sha256, e.name);
        }
    }
    eprintln!("wall time {:.3} s", start.elapsed().as_secs_f64());
    ExitCode::from(finish(Some(&cfg), result) as u8)
}
