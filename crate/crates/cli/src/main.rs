//! Command-line pipeline: simulate -> fst/qot -> estimate -> analyze/scan.
//!
//! Numeric knobs resolve in three layers: explicit flag, then the optional
//! `--config` JSON file, then the built-in default. Every run echoes its
//! resolved configuration (including the seed) to stdout as a single JSON
//! line, so outputs are reproducible byte for byte. Errors exit nonzero
//! with one machine-parsable line: `error[<category>]: <detail>`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use tomo_core::analysis::{build_report, phase_scan};
use tomo_core::bayes::{
    estimate_full, estimate_pairs, sample_functional, ParamVector, SamplerConfig,
};
use tomo_core::error::TomoError;
use tomo_core::exact::reconstruct_full;
use tomo_core::io;
use tomo_core::qot::{qot_schedule, reconstruct_pairs};
use tomo_core::source::{four_photon_state, ghz_state, simulate_dataset, NoiseSpec, SourceParams};
use tomo_core::state::{
    fidelity_to_pure, stokes_from_density, von_neumann_entropy, DensityMatrix, PureState,
};
use tomo_core::Dataset;

#[derive(Parser)]
#[command(name = "tomo", about = "Polarization-state tomography pipeline", version)]
struct Cli {
    /// JSON file of default values for the numeric flags; explicit flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a coincidence-count file for a source state
    Simulate(SimulateArgs),
    /// Full-state linear inversion over the 3^n schedule
    Fst(FstArgs),
    /// Pairwise linear inversion over the overlapping-tomography schedule
    Qot(QotArgs),
    /// Bayesian mean estimation (full-state or per-pair)
    Estimate(EstimateArgs),
    /// FST-vs-QOT comparison report with credible intervals
    Analyze(AnalyzeArgs),
    /// Fidelity scan over the prime-reference phase grid
    Scan(ScanArgs),
}

/// Defaults file: any subset of these keys.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDefaults {
    counts: Option<u64>,
    noise: Option<f64>,
    seed: Option<u64>,
    sweeps: Option<usize>,
    pair_sweeps: Option<usize>,
    beta: Option<f64>,
    burn_in: Option<f64>,
    sigma_floor: Option<f64>,
    level: Option<f64>,
    grid_step: Option<f64>,
}

fn load_defaults(path: &Option<PathBuf>) -> Result<FileDefaults, TomoError> {
    match path {
        None => Ok(FileDefaults::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| TomoError::InvalidConfig(format!("config file {}: {e}", p.display())))
        }
    }
}

fn pick<T: Copy>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

#[derive(Args)]
struct StateArgs {
    /// Source state: ghz<n> (e.g. ghz4), prime, or matrix
    #[arg(long)]
    state: String,
    /// GHZ phase in degrees
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    /// HWP plate angle a in degrees (prime source)
    #[arg(long, default_value_t = -22.5, allow_negative_numbers = true)]
    theta_a: f64,
    /// HWP plate angle b in degrees (prime source)
    #[arg(long, default_value_t = -22.5, allow_negative_numbers = true)]
    theta_b: f64,
    /// SPDC phase 1 in degrees (prime source)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta1: f64,
    /// SPDC phase 2 in degrees (prime source)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta2: f64,
    /// Density-matrix JSON file (state = matrix)
    #[arg(long)]
    matrix: Option<PathBuf>,
}

impl StateArgs {
    fn resolve(&self) -> Result<DensityMatrix, TomoError> {
        if let Some(n_str) = self.state.strip_prefix("ghz") {
            if !n_str.is_empty() {
                let n: usize = n_str.parse().map_err(|_| {
                    TomoError::InvalidConfig(format!("bad ghz qubit count '{n_str}'"))
                })?;
                return Ok(ghz_state(n, self.theta)?.density());
            }
        }
        match self.state.as_str() {
            "prime" => {
                let p = SourceParams::new(self.theta_a, self.theta_b, self.theta1, self.theta2)?;
                Ok(four_photon_state(&p)?.density())
            }
            "matrix" => {
                let path = self.matrix.as_ref().ok_or_else(|| {
                    TomoError::InvalidConfig("--state matrix requires --matrix <path>".into())
                })?;
                let m = io::read_matrix(path)?;
                let n = m.dim().trailing_zeros() as usize;
                DensityMatrix::new(n, m)
            }
            other => Err(TomoError::InvalidConfig(format!(
                "unknown state spec '{other}' (expected ghz<n>, prime, or matrix)"
            ))),
        }
    }

    fn echo(&self) -> serde_json::Value {
        json!({
            "state": self.state,
            "theta": self.theta,
            "theta_a": self.theta_a,
            "theta_b": self.theta_b,
            "theta1": self.theta1,
            "theta2": self.theta2,
            "matrix": self.matrix.as_ref().map(|p| p.display().to_string()),
        })
    }
}

/// Reference-state spec for priors and fidelity targets; reuses the source
/// grammar.
fn resolve_reference(
    spec: &str,
    theta: f64,
    prime_phases: (f64, f64),
) -> Result<PureState, TomoError> {
    if let Some(n_str) = spec.strip_prefix("ghz") {
        if !n_str.is_empty() {
            let n: usize = n_str
                .parse()
                .map_err(|_| TomoError::InvalidConfig(format!("bad ghz qubit count '{n_str}'")))?;
            return ghz_state(n, theta);
        }
    }
    if spec == "prime" {
        return Ok(tomo_core::analysis::reference_prime(
            prime_phases.0,
            prime_phases.1,
        ));
    }
    Err(TomoError::InvalidConfig(format!(
        "unknown reference spec '{spec}' (expected ghz<n> or prime)"
    )))
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Measurement plan: full (3^n) or qot (3 + 6 ceil(log2 n))
    #[arg(long, default_value = "full")]
    schedule: String,
    /// Events recorded per setting
    #[arg(long)]
    counts: Option<u64>,
    /// White-noise mixture fraction in [0,1]
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct FstArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Output prefix; writes <prefix>.stokes.json, .raw.json, .physical.json
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct QotArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Output path for the combined per-pair JSON
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct SamplerArgs {
    /// Sweeps of the full-state chain
    #[arg(long)]
    sweeps: Option<usize>,
    /// Sweeps of each per-pair chain
    #[arg(long)]
    pair_sweeps: Option<usize>,
    /// Relative step size; defaults per scheme when omitted
    #[arg(long)]
    beta: Option<f64>,
    /// Burn-in fraction in [0,1)
    #[arg(long)]
    burn_in: Option<f64>,
    /// Proposal/prior scale floor
    #[arg(long)]
    sigma_floor: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Credible-interval level
    #[arg(long)]
    level: Option<f64>,
}

/// Flag/file/default resolution of the sampler knobs.
struct ResolvedSampler {
    sweeps: usize,
    pair_sweeps: usize,
    beta: Option<f64>,
    burn_in: f64,
    sigma_floor: f64,
    seed: u64,
    level: f64,
}

impl ResolvedSampler {
    fn new(args: &SamplerArgs, file: &FileDefaults) -> Self {
        Self {
            sweeps: pick(args.sweeps, file.sweeps, 5000),
            pair_sweeps: pick(args.pair_sweeps, file.pair_sweeps, 2000),
            beta: args.beta.or(file.beta),
            burn_in: pick(args.burn_in, file.burn_in, 0.2),
            sigma_floor: pick(args.sigma_floor, file.sigma_floor, 0.1),
            seed: pick(args.seed, file.seed, 1),
            level: pick(args.level, file.level, 0.95),
        }
    }

    fn full_config(&self) -> SamplerConfig {
        let mut cfg = SamplerConfig::full_default(self.seed);
        cfg.iterations = self.sweeps;
        cfg.burn_in = self.burn_in;
        cfg.sigma_floor = self.sigma_floor;
        if let Some(b) = self.beta {
            cfg.beta = b;
        }
        cfg
    }

    fn pair_config(&self) -> SamplerConfig {
        let mut cfg = SamplerConfig::pair_default(self.seed);
        cfg.iterations = self.pair_sweeps;
        cfg.burn_in = self.burn_in;
        cfg.sigma_floor = self.sigma_floor;
        if let Some(b) = self.beta {
            cfg.beta = b;
        }
        cfg
    }

    fn echo(&self) -> serde_json::Value {
        json!({
            "sweeps": self.sweeps,
            "pair_sweeps": self.pair_sweeps,
            "beta": self.beta,
            "burn_in": self.burn_in,
            "sigma_floor": self.sigma_floor,
            "seed": self.seed,
            "level": self.level,
        })
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Estimation route: fst (full state) or qot (per pair)
    #[arg(long, default_value = "fst")]
    scheme: String,
    /// Reference state for the prior and fidelity target (ghz<n> or prime);
    /// defaults to a self-prior on the raw inversion
    #[arg(long)]
    reference: Option<String>,
    /// GHZ phase for the reference, degrees
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    ref_theta: f64,
    /// Prime-reference phases, degrees
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    ref_theta1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    ref_theta2: f64,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Output prefix; writes <prefix>.estimate.json and mean matrices
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Reference state (ghz<n> or prime)
    #[arg(long)]
    reference: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    ref_theta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    ref_theta1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    ref_theta2: f64,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Output prefix; writes <prefix>.report.json and <prefix>.report.txt
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    /// Density-matrix JSON (a 4-qubit estimate, or 2-qubit with --pair)
    #[arg(long)]
    matrix: PathBuf,
    /// Which reference pair a 2-qubit estimate reduces to, e.g. 0,2
    #[arg(long)]
    pair: Option<String>,
    /// Grid step in degrees
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long, short)]
    output: PathBuf,
}

fn parse_pair(text: &str) -> Result<(usize, usize), TomoError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(TomoError::InvalidConfig(format!(
            "pair must be 'a,b', got '{text}'"
        )));
    }
    let a = parts[0]
        .trim()
        .parse()
        .map_err(|_| TomoError::InvalidConfig(format!("bad pair index '{}'", parts[0])))?;
    let b = parts[1]
        .trim()
        .parse()
        .map_err(|_| TomoError::InvalidConfig(format!("bad pair index '{}'", parts[1])))?;
    Ok((a, b))
}

fn echo_config(command: &str, detail: serde_json::Value) {
    println!("config: {}", json!({ "command": command, "args": detail }));
}

fn schedule_for(dataset_n: usize, kind: &str) -> Result<Vec<tomo_core::BasisSetting>, TomoError> {
    match kind {
        "full" => Ok(tomo_core::exact::full_schedule(dataset_n)),
        "qot" => Ok(qot_schedule(dataset_n)?.all_settings()),
        other => Err(TomoError::InvalidConfig(format!(
            "unknown schedule '{other}' (expected full or qot)"
        ))),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(suffix);
    prefix.with_file_name(name)
}

#[derive(Serialize)]
struct IntervalJson {
    lo: f64,
    hi: f64,
}

fn run_simulate(args: &SimulateArgs, file: &FileDefaults) -> Result<(), TomoError> {
    let counts = pick(args.counts, file.counts, 2000);
    let noise_fraction = pick(args.noise, file.noise, 0.0);
    let seed = pick(args.seed, file.seed, 1);
    let rho = args.state.resolve()?;
    let schedule = schedule_for(rho.n_qubits(), &args.schedule)?;
    let noise = NoiseSpec::new(counts, noise_fraction, seed)?;
    let dataset = simulate_dataset(&rho, &schedule, &noise)?;
    io::write_count_file(&dataset, &args.output)?;
    echo_config(
        "simulate",
        json!({
            "source": args.state.echo(),
            "schedule": args.schedule,
            "counts": counts,
            "noise": noise_fraction,
            "seed": seed,
            "output": args.output.display().to_string(),
            "settings": schedule.len(),
        }),
    );
    println!(
        "wrote {} records ({counts} counts/setting) to {}",
        schedule.len(),
        args.output.display()
    );
    Ok(())
}

fn run_fst(args: &FstArgs) -> Result<(), TomoError> {
    let dataset = io::read_count_file(&args.input)?;
    let rec = reconstruct_full(&dataset)?;
    io::write_stokes(&rec.stokes, &with_suffix(&args.output, ".stokes.json"))?;
    io::write_matrix(&rec.raw, &with_suffix(&args.output, ".raw.json"))?;
    io::write_matrix(
        rec.physical.matrix(),
        &with_suffix(&args.output, ".physical.json"),
    )?;
    echo_config(
        "fst",
        json!({
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "n_qubits": dataset.n_qubits(),
        }),
    );
    println!(
        "full reconstruction done: {} settings, wrote {}.{{stokes,raw,physical}}.json",
        dataset.len(),
        args.output.display()
    );
    Ok(())
}

fn run_qot(args: &QotArgs) -> Result<(), TomoError> {
    let dataset = io::read_count_file(&args.input)?;
    let pairs = reconstruct_pairs(&dataset)?;
    let out: Vec<serde_json::Value> = pairs
        .iter()
        .map(|((a, b), rec)| {
            json!({
                "pair": [a, b],
                "stokes": io::stokes_to_json(&rec.stokes),
                "raw": io::matrix_to_json(&rec.raw),
                "physical": io::matrix_to_json(rec.physical.matrix()),
            })
        })
        .collect();
    let doc = json!({ "n_qubits": dataset.n_qubits(), "pairs": out });
    io::write_atomic(&args.output, serde_json::to_string_pretty(&doc)?.as_bytes())?;
    echo_config(
        "qot",
        json!({
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "n_qubits": dataset.n_qubits(),
        }),
    );
    println!(
        "reconstructed {} pairs, wrote {}",
        pairs.len(),
        args.output.display()
    );
    Ok(())
}

fn reference_for(
    spec: &Option<String>,
    n_qubits: usize,
    theta: f64,
    phases: (f64, f64),
) -> Result<Option<PureState>, TomoError> {
    match spec {
        None => Ok(None),
        Some(s) => {
            let psi = resolve_reference(s, theta, phases)?;
            if psi.n_qubits() != n_qubits {
                return Err(TomoError::DimensionMismatch {
                    expected: n_qubits,
                    got: psi.n_qubits(),
                });
            }
            Ok(Some(psi))
        }
    }
}

fn run_estimate(args: &EstimateArgs, file: &FileDefaults) -> Result<(), TomoError> {
    let dataset = io::read_count_file(&args.input)?;
    let n = dataset.n_qubits();
    let reference = reference_for(
        &args.reference,
        n,
        args.ref_theta,
        (args.ref_theta1, args.ref_theta2),
    )?;
    let sampler = ResolvedSampler::new(&args.sampler, file);
    let level = sampler.level;

    let echo = json!({
        "input": args.input.display().to_string(),
        "scheme": args.scheme,
        "reference": args.reference,
        "sampler": sampler.echo(),
        "output": args.output.display().to_string(),
    });

    match args.scheme.as_str() {
        "fst" => {
            let cfg = sampler.full_config();
            let theta_ref = reference
                .as_ref()
                .map(|psi| ParamVector::from_stokes(&stokes_from_density(&psi.density())));
            let est = estimate_full(&dataset, theta_ref.as_ref(), &cfg)?;
            io::write_matrix(est.mean.matrix(), &with_suffix(&args.output, ".mean.json"))?;
            io::write_stokes(&est.stokes_raw, &with_suffix(&args.output, ".stokes.json"))?;

            let mut summary = json!({
                "scheme": "fst",
                "n_qubits": n,
                "acceptance_rate": est.samples.acceptance_rate,
                "n_samples": est.samples.samples.len(),
                "burn_in_index": est.samples.burn_in_index,
                "vne_mean_state": von_neumann_entropy(&est.mean),
            });
            let vne_values = sample_functional(&est.samples, von_neumann_entropy)?;
            let (lo, hi) = tomo_core::bayes::interval_from_values(&vne_values, level)?;
            summary["vne_interval"] = serde_json::to_value(IntervalJson { lo, hi })?;
            if let Some(psi) = &reference {
                let f_values =
                    sample_functional(&est.samples, |d| fidelity_to_pure(psi, d).unwrap_or(0.0))?;
                let (lo, hi) = tomo_core::bayes::interval_from_values(&f_values, level)?;
                summary["fidelity_mean_state"] =
                    serde_json::to_value(fidelity_to_pure(psi, &est.mean)?)?;
                summary["fidelity_interval"] = serde_json::to_value(IntervalJson { lo, hi })?;
            }
            let doc = json!({ "config": echo, "result": summary });
            io::write_atomic(
                &with_suffix(&args.output, ".estimate.json"),
                serde_json::to_string_pretty(&doc)?.as_bytes(),
            )?;
            echo_config("estimate", echo);
            println!(
                "estimate done: acceptance {:.3}, wrote {}.{{mean,stokes,estimate}}.json",
                est.samples.acceptance_rate,
                args.output.display()
            );
        }
        "qot" => {
            let cfg = sampler.pair_config();
            let pairs = estimate_pairs(&dataset, &cfg)?;
            let reference_density = reference.as_ref().map(|psi| psi.density());
            let mut rows = Vec::new();
            for ((a, b), est) in &pairs {
                let mut row = json!({
                    "pair": [a, b],
                    "mean": io::matrix_to_json(est.mean.matrix()),
                    "stokes_raw": io::stokes_to_json(&est.stokes_raw),
                    "acceptance_rate": est.samples.acceptance_rate,
                    "n_samples": est.samples.samples.len(),
                    "burn_in_index": est.samples.burn_in_index,
                    "vne_mean_state": von_neumann_entropy(&est.mean),
                });
                let vne_values = sample_functional(&est.samples, von_neumann_entropy)?;
                let (lo, hi) = tomo_core::bayes::interval_from_values(&vne_values, level)?;
                row["vne_interval"] = serde_json::to_value(IntervalJson { lo, hi })?;
                if let Some(refd) = &reference_density {
                    let reduced = tomo_core::partial_trace(refd, &[*a, *b])?;
                    let f_values = sample_functional(&est.samples, |d| {
                        tomo_core::fidelity(d, &reduced).unwrap_or(0.0)
                    })?;
                    let (lo, hi) = tomo_core::bayes::interval_from_values(&f_values, level)?;
                    row["fidelity_mean_state"] =
                        serde_json::to_value(tomo_core::fidelity(&est.mean, &reduced)?)?;
                    row["fidelity_interval"] = serde_json::to_value(IntervalJson { lo, hi })?;
                }
                rows.push(row);
            }
            let doc = json!({ "config": echo, "pairs": rows });
            io::write_atomic(
                &with_suffix(&args.output, ".estimate.json"),
                serde_json::to_string_pretty(&doc)?.as_bytes(),
            )?;
            echo_config("estimate", echo);
            println!(
                "estimated {} pairs, wrote {}.estimate.json",
                pairs.len(),
                args.output.display()
            );
        }
        other => {
            return Err(TomoError::InvalidConfig(format!(
                "unknown scheme '{other}' (expected fst or qot)"
            )))
        }
    }
    Ok(())
}

fn run_analyze(args: &AnalyzeArgs, file: &FileDefaults) -> Result<(), TomoError> {
    let dataset = io::read_count_file(&args.input)?;
    let n = dataset.n_qubits();
    let reference = resolve_reference(
        &args.reference,
        args.ref_theta,
        (args.ref_theta1, args.ref_theta2),
    )?;
    if reference.n_qubits() != n {
        return Err(TomoError::DimensionMismatch {
            expected: n,
            got: reference.n_qubits(),
        });
    }
    let sampler = ResolvedSampler::new(&args.sampler, file);

    // FST runs when the full schedule is available; QOT runs on its subset.
    let has_full = tomo_core::exact::require_full_schedule(&dataset).is_ok();
    let fst = if has_full {
        let theta_ref = ParamVector::from_stokes(&stokes_from_density(&reference.density()));
        Some(estimate_full(
            &dataset,
            Some(&theta_ref),
            &sampler.full_config(),
        )?)
    } else {
        None
    };
    let qot_data = if has_full {
        // mirror the experiment: QOT consumes the schedule subset of the
        // same dataset
        let mut subset = Dataset::new(n);
        for setting in qot_schedule(n)?.all_settings() {
            if let Some(rec) = dataset.get(&setting) {
                subset.insert(rec.clone())?;
            }
        }
        subset
    } else {
        dataset.clone()
    };
    let qot = estimate_pairs(&qot_data, &sampler.pair_config())?;

    let report = build_report(fst.as_ref(), Some(&qot), &reference, sampler.level)?;
    io::write_report_json(&report, &with_suffix(&args.output, ".report.json"))?;
    io::write_atomic(
        &with_suffix(&args.output, ".report.txt"),
        io::format_report_table(&report).as_bytes(),
    )?;
    echo_config(
        "analyze",
        json!({
            "input": args.input.display().to_string(),
            "reference": args.reference,
            "fst": has_full,
            "sampler": sampler.echo(),
            "output": args.output.display().to_string(),
        }),
    );
    println!(
        "report covers {} pairs (fst: {}), wrote {}.report.{{json,txt}}",
        report.pairs.len(),
        has_full,
        args.output.display()
    );
    Ok(())
}

fn run_scan(args: &ScanArgs, file: &FileDefaults) -> Result<(), TomoError> {
    let grid_step = pick(args.grid_step, file.grid_step, 3.0);
    let m = io::read_matrix(&args.matrix)?;
    let n = m.dim().trailing_zeros() as usize;
    let estimate = DensityMatrix::new(n, m)?;
    let reducer = args.pair.as_deref().map(parse_pair).transpose()?;
    let scan = phase_scan(&estimate, reducer, grid_step)?;
    io::write_scan_csv(&scan, &args.output)?;
    echo_config(
        "scan",
        json!({
            "matrix": args.matrix.display().to_string(),
            "pair": args.pair,
            "grid_step": grid_step,
            "output": args.output.display().to_string(),
        }),
    );
    println!(
        "peak fidelity {:.4} at theta1={} theta2={}, wrote {}",
        scan.peak_fidelity,
        scan.peak.0,
        scan.peak.1,
        args.output.display()
    );
    Ok(())
}

fn run() -> Result<(), TomoError> {
    let cli = Cli::parse();
    let file = load_defaults(&cli.config)?;
    match &cli.command {
        Command::Simulate(args) => run_simulate(args, &file),
        Command::Fst(args) => run_fst(args),
        Command::Qot(args) => run_qot(args),
        Command::Estimate(args) => run_estimate(args, &file),
        Command::Analyze(args) => run_analyze(args, &file),
        Command::Scan(args) => run_scan(args, &file),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error[{}]: {err}", err.category());
            ExitCode::FAILURE
        }
    }
}
