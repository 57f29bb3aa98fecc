//! `bellnoise` command-line front end.
//!
//! Exit codes: 0 on success, 1 on a domain error reported by the library,
//! 2 on a usage or configuration error.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::correlation::{
    chsh, classical_angles_for_correlation, classical_joint, classical_match_delta, maximize_chsh, quantum_joint,
    wrap_delta, Angle, CorrelationModel, Settings4, SpinConvention,
};
use crate::distortion::{
    affine_distort, critical_visibility, inhibition_steady_state, to_complement_form, DistortionParams,
    InhibitionNetwork,
};
use crate::error::Error;
use crate::quantum_state::{
    is_separable_2x2, min_partial_transpose_eigenvalue, separability_threshold, werner_state, DensityMatrix,
    DEFAULT_PSD_TOL,
};
use crate::trial_sim::{breilmann_trial, estimate_chsh, masking_report_with, AngleMode, DEFAULT_JITTER_SPREAD};
use config::{BreilmannFile, PopulationFile};

/// Environment variable supplying a default seed.
pub const SEED_ENV: &str = "BELLNOISE_SEED";

#[derive(Debug, Parser)]
#[command(name = "bellnoise", version, about = "Classical vs quantum pair correlations under noise and selection")]
pub struct Cli {
    /// Read angles on the command line and in config files as degrees.
    #[arg(long, global = true)]
    degrees: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Correlation curves of the classical and quantum models over [0, π] as CSV.
    Curve {
        #[arg(long, default_value_t = 180)]
        steps: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Evaluate or maximize the CHSH combination for a model.
    Chsh(ChshArgs),
    /// Classical angle difference reproducing a quantum one, or a target correlation.
    Match(MatchArgs),
    /// Apply the affine distortion p' = s·p − b to a probability vector.
    Distort(DistortArgs),
    /// Separability threshold of the Werner family, or the PPT verdict for a state.
    Separability(SeparabilityArgs),
    /// Monte Carlo CHSH estimate for a population config.
    Trial(SimArgs),
    /// Self-selected clinical trial simulation.
    Breilmann(SimArgs),
    /// CHSH estimates for raw, distorted, jittered and classically matched sources.
    Masking(MaskingArgs),
    /// Steady state of a lateral inhibition network.
    Inhibit(InhibitArgs),
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Classical,
    QuantumHalf,
    QuantumPhoton,
    Werner,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpinArg {
    Half,
    Photon,
}

impl From<SpinArg> for SpinConvention {
    fn from(s: SpinArg) -> Self {
        match s {
            SpinArg::Half => SpinConvention::Half,
            SpinArg::Photon => SpinConvention::Photon,
        }
    }
}

#[derive(Debug, Args)]
struct ChshArgs {
    #[arg(long, value_enum, default_value = "quantum-half")]
    model: ModelArg,
    /// Density matrix JSON file; overrides --model.
    #[arg(long)]
    state: Option<PathBuf>,
    /// White-noise visibility applied to the model (for `werner`, the state's visibility).
    #[arg(long)]
    visibility: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a_prime: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b_prime: Option<f64>,
    /// Search all four angles for the largest |CHSH|.
    #[arg(long)]
    optimize: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
#[group(id = "match_input", required = true, multiple = false, args = ["delta_q", "target"])]
struct MatchArgs {
    /// Quantum angle difference to imitate classically.
    #[arg(long, allow_hyphen_values = true)]
    delta_q: Option<f64>,
    #[arg(long, value_enum, default_value = "half")]
    spin: SpinArg,
    /// Target correlation in [-1, 1].
    #[arg(long, allow_hyphen_values = true)]
    target: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
#[group(id = "distortion", required = true, multiple = false, args = ["b", "visibility"])]
struct DistortArgs {
    /// Comma-separated probabilities summing to 1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    probs: Vec<f64>,
    /// Offset b; the scale is s = 1 + K·b.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Visibility V, equivalent to b = (V − 1)/K.
    #[arg(long)]
    visibility: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Werner,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CriterionArg {
    /// Positive partial transpose (entanglement).
    Ppt,
    /// Maximal CHSH value exceeding 2 (nonlocality).
    Chsh,
}

#[derive(Debug, Args)]
struct SeparabilityArgs {
    #[arg(long, value_enum, default_value = "werner")]
    family: FamilyArg,
    #[arg(long, value_enum, default_value = "ppt")]
    criterion: CriterionArg,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Density matrix JSON file to test instead of locating a threshold.
    #[arg(long)]
    state: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct SimArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config file's seed and the BELLNOISE_SEED environment variable.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
#[group(id = "noise", multiple = false, args = ["b", "visibility"])]
struct MaskingArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Visibility of the distorted scenario.
    #[arg(long)]
    visibility: Option<f64>,
    /// Offset b (K = 4) of the distorted scenario.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Full width of the uniform angle jitter.
    #[arg(long)]
    jitter: Option<f64>,
}

#[derive(Debug, Args)]
#[group(id = "coupling", required = true, multiple = false, args = ["w", "weights"])]
struct InhibitArgs {
    /// Comma-separated nonnegative inputs.
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<f64>,
    /// Uniform mutual inhibition weight.
    #[arg(long)]
    w: Option<f64>,
    /// Weight matrix as a JSON array of rows.
    #[arg(long)]
    weights: Option<String>,
    /// Clamp outputs at zero.
    #[arg(long)]
    rectified: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(msg) => Failure::Usage(msg),
            other => Failure::Domain(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    let angle_scale = if cli.degrees { 1f64.to_radians() } else { 1.0 };
    let angle = |x: f64| x * angle_scale;
    match &cli.command {
        Command::Curve { steps, out } => write_output(out, &output::emit_curve(*steps)?),
        Command::Chsh(args) => {
            let model = chsh_model(args)?;
            let value = if args.optimize {
                let best = maximize_chsh(&model);
                json!({ "optimized": true, "value": best.value, "settings": best.settings })
            } else {
                let std = Settings4::standard();
                let settings = Settings4 {
                    a: args.a.map(|x| Angle(angle(x))).unwrap_or(std.a),
                    a_prime: args.a_prime.map(|x| Angle(angle(x))).unwrap_or(std.a_prime),
                    b: args.b.map(|x| Angle(angle(x))).unwrap_or(std.b),
                    b_prime: args.b_prime.map(|x| Angle(angle(x))).unwrap_or(std.b_prime),
                };
                json!({ "optimized": false, "value": chsh(&model, &settings), "settings": settings })
            };
            write_json(&args.out, &value)
        }
        Command::Match(args) => {
            let value = if let Some(dq) = args.delta_q {
                let dq = wrap_delta(angle(dq));
                let spin = SpinConvention::from(args.spin);
                let dc = classical_match_delta(dq, spin);
                json!({
                    "delta_q": dq,
                    "spin": spin,
                    "delta_c": dc,
                    "quantum_joint": quantum_joint(Angle(dq), Angle(0.0), spin),
                    "classical_joint": classical_joint(Angle(dc), Angle(0.0)),
                })
            } else {
                let target = args.target.expect("clap enforces one of --delta-q or --target");
                json!({ "target": target, "delta_c": classical_angles_for_correlation(target)? })
            };
            write_json(&args.out, &value)
        }
        Command::Distort(args) => {
            let k = args.probs.len();
            let params = match (args.b, args.visibility) {
                (Some(b), _) => DistortionParams::new(b, k)?,
                (None, Some(v)) => DistortionParams::from_visibility(v, k)?,
                (None, None) => unreachable!("clap enforces one of --b or --visibility"),
            };
            let out = affine_distort(&args.probs, &params)?;
            let complement = to_complement_form(&params);
            let mut value = json!({
                "k": k,
                "s": params.s(),
                "b_coef": params.b_coef(),
                "a_coef": complement.a_coef,
                "output": out.entries(),
                "negative": out.negative_indices(),
            });
            if out.has_negative() {
                value["clamped"] = json!(out.clamp_renormalize());
            }
            write_json(&args.out, &value)
        }
        Command::Separability(args) => {
            let value = if let Some(path) = &args.state {
                let rho: DensityMatrix = config::load(path)?;
                json!({
                    "separable": is_separable_2x2(&rho, DEFAULT_PSD_TOL),
                    "min_pt_eigenvalue": min_partial_transpose_eigenvalue(&rho),
                })
            } else {
                let FamilyArg::Werner = args.family;
                match args.criterion {
                    CriterionArg::Ppt => {
                        let t = separability_threshold(werner_state, args.tol)?;
                        json!({ "family": "werner", "criterion": "ppt", "tol": args.tol, "threshold": t.value() })
                    }
                    CriterionArg::Chsh => {
                        let t = critical_visibility(&CorrelationModel::quantum_half(), args.tol)?;
                        json!({ "family": "werner", "criterion": "chsh", "tol": args.tol, "threshold": t.value() })
                    }
                }
            };
            write_json(&args.out, &value)
        }
        Command::Trial(args) => {
            let file: PopulationFile = config::load(&args.config)?;
            let cfg = file.to_config(angle_scale, args.seed, env_seed()?)?;
            let est = with_threads(args.threads, || estimate_chsh(&cfg))??;
            write_json(&args.out, &serde_json::to_value(&est).map_err(Error::from)?)
        }
        Command::Breilmann(args) => {
            let file: BreilmannFile = config::load(&args.config)?;
            let cfg = file.to_config(args.seed, env_seed()?)?;
            let result = with_threads(args.threads, || breilmann_trial(&cfg))??;
            write_json(&args.out, &serde_json::to_value(&result).map_err(Error::from)?)
        }
        Command::Masking(args) => {
            let file: PopulationFile = config::load(&args.sim.config)?;
            let cfg = file.to_config(angle_scale, args.sim.seed, env_seed()?)?;
            let distortion = match (args.visibility, args.b) {
                (Some(v), _) => Some(DistortionParams::from_visibility(v, 4)?),
                (None, Some(b)) => Some(DistortionParams::new(b, 4)?),
                (None, None) => None,
            };
            let spread = match (args.jitter, &cfg.angle_mode) {
                (Some(j), _) => angle(j),
                (None, AngleMode::Jittered { spread, .. }) => *spread,
                (None, _) => DEFAULT_JITTER_SPREAD,
            };
            let report = with_threads(args.sim.threads, || masking_report_with(&cfg, distortion, spread))??;
            write_json(&args.sim.out, &serde_json::to_value(&report).map_err(Error::from)?)
        }
        Command::Inhibit(args) => {
            let net = match (&args.w, &args.weights) {
                (Some(w), _) => InhibitionNetwork::uniform(args.x.clone(), *w, args.rectified)?,
                (None, Some(text)) => {
                    let weights: Vec<Vec<f64>> = config::parse(text)?;
                    InhibitionNetwork::new(args.x.clone(), weights, args.rectified)?
                }
                (None, None) => unreachable!("clap enforces one of --w or --weights"),
            };
            let y = inhibition_steady_state(&net)?;
            let negative: Vec<usize> = y.iter().enumerate().filter(|(_, &v)| v < 0.0).map(|(i, _)| i).collect();
            write_json(
                &args.out,
                &json!({
                    "rectified": net.rectified(),
                    "spectral_radius": net.spectral_radius(),
                    "output": y,
                    "negative_units": negative,
                }),
            )
        }
    }
}

fn chsh_model(args: &ChshArgs) -> CliResult<CorrelationModel> {
    if let Some(path) = &args.state {
        let rho: DensityMatrix = config::load(path)?;
        let base = CorrelationModel::StateModel(rho);
        return Ok(match args.visibility {
            Some(v) => CorrelationModel::with_visibility(base, v)?,
            None => base,
        });
    }
    let base = match args.model {
        ModelArg::Classical => CorrelationModel::ClassicalLinear,
        ModelArg::QuantumHalf => CorrelationModel::Quantum(SpinConvention::Half),
        ModelArg::QuantumPhoton => CorrelationModel::Quantum(SpinConvention::Photon),
        ModelArg::Werner => {
            let v = crate::quantum_state::Visibility::new(args.visibility.unwrap_or(1.0))?;
            return Ok(CorrelationModel::StateModel(werner_state(v)));
        }
    };
    Ok(match args.visibility {
        Some(v) => CorrelationModel::with_visibility(base, v)?,
        None => base,
    })
}

fn env_seed() -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}={s:?} is not an unsigned 64-bit integer"))),
        Err(_) => Ok(0),
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Domain(Error::Io(std::io::Error::other(e))))?;
            Ok(pool.install(f))
        }
    }
}

fn write_json(out: &OutArgs, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    write_output(out, &text)
}

fn write_output(out: &OutArgs, text: &str) -> CliResult<()> {
    match &out.out {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::Domain(e.into()))
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| Failure::Domain(e.into()))
}
