//! Command-line driver: state construction, amplitude tables, the full
//! synchronization pipeline, and parameter sweeps with seeded determinism.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qcs::density::DensityMatrix;
use qcs::noise;
use qcs::optimize;
use qcs::output::{float_repr, render_csv, render_json, OutputHeader};
use qcs::protocol::{
    self, amplitude_closed_form, amplitude_correlation, amplitude_direct,
    amplitude_postprocessed, CorrectionMode, ProtocolConfig, RunRecord,
};
use qcs::purify::{self, RoundRecord, SectorDecision};
use qcs::spin;
use qcs::state::{hadamard, C64, Mat2};
use qcs::timing::{self, ErrorBudget};
use qcs::{QcsError, Result};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "qcs", version, about = "Multiparty quantum clock synchronization simulator")]
struct Cli {
    /// Plain-text key=value file supplying flag defaults; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a state and write it as JSON.
    State(StateArgs),
    /// Per-party signal amplitudes from every computation route.
    Amps(AmpsArgs),
    /// Full end-to-end run: purification, sector check, distillation
    /// stand-in, measurement and per-party time estimation.
    Pipeline(PipelineArgs),
    /// Parameter sweeps (purify, dephase, error, optimize).
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateKind {
    Supersinglet,
    Homogeneous,
    Dicke,
    RandomSinglet,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisKind {
    Z,
    X,
    Y,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct StateArgs {
    #[arg(long, value_enum)]
    kind: StateKind,
    /// Number of qubits.
    #[arg(long)]
    n: usize,
    /// Excitation count (dicke only).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Basis used for the human-readable amplitude listing.
    #[arg(long, value_enum, default_value_t = BasisKind::Z)]
    basis: BasisKind,
}

#[derive(Args)]
struct AmpsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = StateKind::Supersinglet)]
    kind: StateKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Injected pair phase offset in radians.
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, default_value_t = 10)]
    rounds: usize,
    /// Measurements per party.
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    /// True elapsed time to recover.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output fidelity of the distillation stand-in.
    #[arg(long, default_value_t = 0.99)]
    fsuper: f64,
    /// Samples used by the sector check.
    #[arg(long, default_value_t = 4000)]
    check_shots: u64,
    #[arg(long, value_enum, default_value_t = CliCorrection::Physical)]
    correction: CliCorrection,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliCorrection {
    Physical,
    Classical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    Purify,
    Dephase,
    Error,
    Optimize,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    kind: SweepKind,
    /// Grid resolution (meaning depends on the sweep kind).
    #[arg(long, default_value_t = 33)]
    grid: usize,
    #[arg(long, default_value_t = 10)]
    rounds: usize,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fidelity list for the error sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.9, 0.95, 0.99, 1.0])]
    fidelity: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn main() {
    let args = expand_config(std::env::args().collect());
    let args = match args {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    };
    let cli = Cli::parse_from(&args);
    let command_line = args.join(" ");
    if let Err(e) = run(cli, command_line) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

/// Pull defaults from a `key=value` config file: any key without a
/// matching `--key` on the command line is appended as one.
fn expand_config(mut args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config") else {
        return Ok(args);
    };
    let path = args
        .get(pos + 1)
        .ok_or_else(|| QcsError::InvalidArgument("--config requires a path".to_string()))?
        .clone();
    let text = std::fs::read_to_string(&path)?;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            QcsError::InvalidArgument(format!("config line without '=': {line}"))
        })?;
        let flag = format!("--{}", key.trim());
        if !args.iter().any(|a| *a == flag) {
            args.push(flag);
            args.push(value.trim().to_string());
        }
    }
    Ok(args)
}

fn run(cli: Cli, command_line: String) -> Result<()> {
    match cli.command {
        Command::State(a) => cmd_state(a, command_line),
        Command::Amps(a) => cmd_amps(a, command_line),
        Command::Pipeline(a) => cmd_pipeline(a, command_line),
        Command::Sweep(a) => cmd_sweep(a, command_line),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Unitary whose rows are the chosen measurement basis, so that applying
/// it expresses the state in that basis.
fn basis_change(basis: BasisKind) -> Option<Mat2> {
    let sq = std::f64::consts::FRAC_1_SQRT_2;
    match basis {
        BasisKind::Z => None,
        BasisKind::X => Some(hadamard()),
        BasisKind::Y => Some([
            [C64::new(sq, 0.0), C64::new(0.0, -sq)],
            [C64::new(sq, 0.0), C64::new(0.0, sq)],
        ]),
    }
}

fn cmd_state(a: StateArgs, command_line: String) -> Result<()> {
    let mut rng = qcs::rng::master(a.seed);
    let state = match a.kind {
        StateKind::Supersinglet => spin::supersinglet(a.n)?,
        StateKind::Homogeneous => spin::homogeneous_singlet(a.n, &mut rng)?,
        StateKind::Dicke => {
            let k = a.k.ok_or_else(|| {
                QcsError::InvalidArgument("--k is required for dicke states".to_string())
            })?;
            spin::dicke_state(a.n, k)?
        }
        StateKind::RandomSinglet => spin::random_singlet(a.n, &mut rng)?,
    };
    // State JSON with provenance fields; readers of the plain format
    // ignore the extras.
    let header = OutputHeader::new(command_line, a.seed);
    let mut doc = serde_json::Map::new();
    doc.insert("version".into(), header.version.clone().into());
    doc.insert("command".into(), header.command.clone().into());
    doc.insert("seed".into(), header.seed.into());
    let plain: serde_json::Value = serde_json::from_str(&state.to_json()?)?;
    if let serde_json::Value::Object(m) = plain {
        for (k, v) in m {
            doc.insert(k, v);
        }
    }
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc))?;
    text.push('\n');
    emit(a.out.as_ref(), &text)?;

    // human-readable report on stderr
    let s2 = state.inner(&spin::apply_s2(&state))?.re;
    eprintln!("norm_sqr          = {}", float_repr(state.norm_sqr()));
    eprintln!("spin_sq           = {}", float_repr(s2));
    eprintln!("singlet_residual  = {}", float_repr(spin::singlet_residual(&state)));
    let display = match basis_change(a.basis) {
        Some(u) => state.apply_global_rotation(&u)?,
        None => state.clone(),
    };
    let tag = match a.basis {
        BasisKind::Z => "z",
        BasisKind::X => "x",
        BasisKind::Y => "y",
    };
    for i in 0..display.dim() {
        let amp = display.amp(i);
        if amp.norm() > 1e-12 {
            eprintln!(
                "|{}>_{tag}: {} {}i",
                display.basis_label(i),
                float_repr(amp.re),
                float_repr(amp.im)
            );
        }
    }
    Ok(())
}

fn cmd_amps(a: AmpsArgs, command_line: String) -> Result<()> {
    let mut rng = qcs::rng::master(a.seed);
    let state = match a.kind {
        StateKind::Supersinglet => spin::supersinglet(a.n)?,
        StateKind::Homogeneous => spin::homogeneous_singlet(a.n, &mut rng)?,
        StateKind::RandomSinglet => spin::random_singlet(a.n, &mut rng)?,
        StateKind::Dicke => {
            return Err(QcsError::InvalidArgument(
                "amplitude tables require a singlet state".to_string(),
            ))
        }
    };
    let direct = amplitude_direct(&state)?;
    let correlation = amplitude_correlation(&state)?;
    let postprocessed = amplitude_postprocessed(&state)?;
    let closed = if a.kind == StateKind::Supersinglet && a.n >= 4 {
        Some(amplitude_closed_form(a.n)?)
    } else {
        None
    };
    let mut worst: f64 = direct.max_deviation(&correlation);
    worst = worst.max(direct.max_deviation(&postprocessed));
    if let Some(c) = &closed {
        worst = worst.max(direct.max_deviation(c));
    }
    direct.validate()?;

    let header = OutputHeader::new(command_line, a.seed);
    let text = match a.format {
        Format::Csv => {
            let mut rows = Vec::new();
            for (i, e) in direct.entries.iter().enumerate() {
                rows.push(vec![
                    e.party.to_string(),
                    e.group.label().to_string(),
                    float_repr(e.amplitude),
                    float_repr(correlation.entries[i].amplitude),
                    float_repr(postprocessed.entries[i].amplitude),
                    closed
                        .as_ref()
                        .map(|c| float_repr(c.entries[i].amplitude))
                        .unwrap_or_default(),
                ]);
            }
            render_csv(
                &header,
                &["party", "group", "direct", "correlation", "postprocessed", "closed_form"],
                &rows,
            )
        }
        Format::Json => {
            #[derive(Serialize)]
            struct AmpsDoc<'a> {
                direct: &'a protocol::AmplitudeTable,
                correlation: &'a protocol::AmplitudeTable,
                postprocessed: &'a protocol::AmplitudeTable,
                closed_form: &'a Option<protocol::AmplitudeTable>,
                sum: f64,
                max_route_deviation: f64,
            }
            render_json(
                &header,
                &AmpsDoc {
                    direct: &direct,
                    correlation: &correlation,
                    postprocessed: &postprocessed,
                    closed_form: &closed,
                    sum: direct.sum(),
                    max_route_deviation: worst,
                },
            )?
        }
    };
    emit(a.out.as_ref(), &text)?;
    eprintln!("amplitude sum       = {}", float_repr(direct.sum()));
    eprintln!("max route deviation = {}", float_repr(worst));
    if worst > qcs::TOL {
        return Err(QcsError::Invariant(format!(
            "amplitude routes disagree by {worst:.3e}"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct PipelineParty {
    party: usize,
    t_estimate: f64,
    abs_error: f64,
    within_3_delta_t: bool,
}

#[derive(Serialize)]
struct PipelineReport {
    n_qubits: usize,
    phi: f64,
    rounds: usize,
    shots: u64,
    t_true: f64,
    omega: f64,
    f_super_target: f64,
    sector_decision: SectorDecision,
    pair_fidelity: f64,
    pair_trace: Vec<RoundRecord>,
    distilled_fidelity: f64,
    predicted: ErrorBudget,
    parties: Vec<PipelineParty>,
    run: RunRecord,
}

fn cmd_pipeline(a: PipelineArgs, command_line: String) -> Result<()> {
    if !(a.fsuper > 0.0 && a.fsuper <= 1.0) {
        return Err(QcsError::InvalidArgument(format!(
            "--fsuper {} outside (0, 1]",
            a.fsuper
        )));
    }
    let mut rng = qcs::rng::master(a.seed);
    // Step 1-3: pair purification with the sector check.
    let (pair, decision, trace) =
        purify::purify_with_sector_check(a.phi, a.rounds, a.check_shots, &mut rng)?;
    // Step 4: multiparty distillation stand-in — prepare the canonical
    // singlet at the configured fidelity, realized as the worst-case
    // residual rotation for the timing signal.
    let target = spin::supersinglet(a.n)?;
    let epsilon = a.fsuper.sqrt().min(1.0).acos();
    let prepared = noise::preskill_worst_case(&target, epsilon)?;
    let distilled_fidelity = noise::fidelity_pure(&prepared, &target)?;
    // sanity: the prepared state stays inside the singlet sector
    let basis = spin::singlet_subspace(a.n)?;
    let projected = purify::singlet_project(&DensityMatrix::from_pure(&prepared), &basis)?;
    let _ = projected;
    // Steps 5-8: measurement, correction, sampling, inversion.
    let config = ProtocolConfig {
        n_qubits: a.n,
        omega: a.omega,
        correction_mode: match a.correction {
            CliCorrection::Physical => CorrectionMode::Physical,
            CliCorrection::Classical => CorrectionMode::Classical,
        },
        seed: a.seed,
    };
    let table = if a.n >= 4 {
        amplitude_closed_form(a.n)?
    } else {
        amplitude_direct(&target)?
    };
    let run = protocol::simulate_run(&config, &prepared, &table, a.t, a.shots, &mut rng)?;
    let predicted = timing::delta_t_total(a.shots, a.fsuper, a.omega)?;
    let parties = run
        .parties
        .iter()
        .map(|p| {
            let abs_error = (p.t_estimate - a.t).abs();
            PipelineParty {
                party: p.party,
                t_estimate: p.t_estimate,
                abs_error,
                within_3_delta_t: abs_error <= 3.0 * predicted.delta_t_total,
            }
        })
        .collect();
    let report = PipelineReport {
        n_qubits: a.n,
        phi: a.phi,
        rounds: a.rounds,
        shots: a.shots,
        t_true: a.t,
        omega: a.omega,
        f_super_target: a.fsuper,
        sector_decision: decision,
        pair_fidelity: pair.fidelity(),
        pair_trace: trace,
        distilled_fidelity,
        predicted,
        parties,
        run,
    };
    let header = OutputHeader::new(command_line, a.seed);
    let text = match a.format {
        Format::Json => render_json(&header, &report)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .parties
                .iter()
                .map(|p| {
                    vec![
                        p.party.to_string(),
                        float_repr(p.t_estimate),
                        float_repr(p.abs_error),
                        float_repr(3.0 * report.predicted.delta_t_total),
                        p.within_3_delta_t.to_string(),
                    ]
                })
                .collect();
            render_csv(
                &header,
                &["party", "t_estimate", "abs_error", "three_delta_t", "within"],
                &rows,
            )
        }
    };
    emit(a.out.as_ref(), &text)?;
    eprintln!(
        "sector={:?} pair_fidelity={} distilled_fidelity={}",
        report.sector_decision,
        float_repr(report.pair_fidelity),
        float_repr(report.distilled_fidelity)
    );
    Ok(())
}

fn cmd_sweep(a: SweepArgs, command_line: String) -> Result<()> {
    let header = OutputHeader::new(command_line, a.seed);
    let text = match a.kind {
        SweepKind::Purify => {
            if a.grid < 2 {
                return Err(QcsError::InvalidArgument("--grid must be >= 2".to_string()));
            }
            let phis: Vec<f64> = (0..a.grid)
                .map(|i| i as f64 * std::f64::consts::PI / (a.grid - 1) as f64)
                .collect();
            let traces = purify::purify_sweep(&phis, a.rounds)?;
            match a.format {
                Format::Json => render_json(&header, &traces)?,
                Format::Csv => {
                    let mut rows = Vec::new();
                    for tr in &traces {
                        for r in &tr.rounds {
                            rows.push(vec![
                                float_repr(tr.phi),
                                r.round.to_string(),
                                float_repr(r.fidelity),
                                float_repr(r.success_prob),
                                float_repr(r.zz),
                            ]);
                        }
                    }
                    render_csv(
                        &header,
                        &["phi", "round", "fidelity", "success_prob", "zz"],
                        &rows,
                    )
                }
            }
        }
        SweepKind::Dephase => {
            if a.grid < 2 {
                return Err(QcsError::InvalidArgument("--grid must be >= 2".to_string()));
            }
            #[derive(Serialize)]
            struct DephaseRow {
                n_qubits: usize,
                p: f64,
                party: usize,
                group: String,
                amplitude: f64,
            }
            let mut data = Vec::new();
            for n in [4usize, 6, 8] {
                for i in 0..a.grid {
                    let p = i as f64 / (a.grid - 1) as f64;
                    let table = noise::dephased_amplitudes(n, p)?;
                    for e in &table.entries {
                        data.push(DephaseRow {
                            n_qubits: n,
                            p,
                            party: e.party,
                            group: e.group.label().to_string(),
                            amplitude: e.amplitude,
                        });
                    }
                }
            }
            match a.format {
                Format::Json => render_json(&header, &data)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = data
                        .iter()
                        .map(|r| {
                            vec![
                                r.n_qubits.to_string(),
                                float_repr(r.p),
                                r.party.to_string(),
                                r.group.clone(),
                                float_repr(r.amplitude),
                            ]
                        })
                        .collect();
                    render_csv(&header, &["N", "p", "party", "group", "amplitude"], &rows)
                }
            }
        }
        SweepKind::Error => {
            if a.grid < 2 {
                return Err(QcsError::InvalidArgument("--grid must be >= 2".to_string()));
            }
            // log-spaced shot counts from 1 to 1e6
            let mut m_grid: Vec<u64> = (0..a.grid)
                .map(|i| {
                    let e = 6.0 * i as f64 / (a.grid - 1) as f64;
                    10f64.powf(e).round() as u64
                })
                .collect();
            m_grid.dedup();
            let rows_data = timing::error_sweep(&m_grid, &a.fidelity, a.omega)?;
            match a.format {
                Format::Json => render_json(&header, &rows_data)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = rows_data
                        .iter()
                        .map(|b| {
                            vec![
                                b.shots.to_string(),
                                float_repr(b.fidelity),
                                float_repr(b.dt_omega()),
                                float_repr(b.cs_picoseconds()),
                                float_repr(b.sr_femtoseconds()),
                            ]
                        })
                        .collect();
                    render_csv(
                        &header,
                        &["M", "F", "dt_omega", "dt_cs_ps", "dt_sr_fs"],
                        &rows,
                    )
                }
            }
        }
        SweepKind::Optimize => {
            let scan = optimize::scan_n4(a.grid, a.grid)?;
            let mut summary = String::new();
            for p in &scan.maxima {
                writeln!(
                    summary,
                    "maximum at theta={} phi={} value={}",
                    float_repr(p.theta),
                    float_repr(p.phi),
                    float_repr(p.objective.unwrap_or(f64::NAN))
                )
                .ok();
            }
            eprint!("{summary}");
            match a.format {
                Format::Json => render_json(&header, &scan)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = scan
                        .points
                        .iter()
                        .map(|p| {
                            vec![
                                float_repr(p.theta),
                                float_repr(p.phi),
                                p.objective.map(float_repr).unwrap_or_default(),
                            ]
                        })
                        .collect();
                    render_csv(&header, &["theta", "phi", "objective"], &rows)
                }
            }
        }
    };
    emit(a.out.as_ref(), &text)?;
    Ok(())
}
