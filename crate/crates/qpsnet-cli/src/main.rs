//! Command-line front end for the link-layer toolkit: frame encoding and
//! inspection, key-rate sweeps, a Monte Carlo routing-factor check, and
//! entanglement-distribution sweeps.
//!
//! All sweep output is CSV written with the default float formatting, so
//! repeated runs with the same inputs produce byte-identical files. Exit
//! codes: 0 on success, 1 for I/O failures, 2 for anything wrong with the
//! input (flags, config files, hex, frame contents, parameter domains).

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use config::ConfigFile;
use qpsnet::entdist::{
    compare_scenarios, sweep_length_hops, sweep_proc_t1, sweep_t1t2_length, EntError, EntParams,
    EntSweepRow, ScenarioKind,
};
use qpsnet::frame_codec::{
    self, DecodeError, EncodeError, EncodingScheme, FrameHeader, FrameTrailer, MacAddr,
    Multiplexing, QduDescriptor, QuantumFrame,
};
use qpsnet::qkd::{k_factor, monte_carlo_k, qkd_sweep, QkdError, QkdParams, QkdSweepRow};

#[derive(Parser)]
#[command(
    name = "qpsnet",
    version,
    about = "Link-layer analytics for packet-switched quantum networks"
)]
struct Cli {
    /// TOML file supplying parameter defaults; flags still win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for commands that draw random numbers.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode control frames to hex or inspect them.
    #[command(subcommand)]
    Frame(FrameCommand),
    /// Sweep the secret-key rate over fiber length and switch count (CSV).
    QkdSweep(QkdSweepArgs),
    /// Cross-check the routing factor against a Monte Carlo estimate.
    McK(McKArgs),
    /// Run an entanglement-distribution fidelity sweep (CSV).
    Entdist(EntdistArgs),
}

#[derive(Subcommand)]
enum FrameCommand {
    /// Build a frame and print it as hex.
    Encode(EncodeArgs),
    /// Parse a hex frame and print its fields.
    Decode(DecodeArgs),
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long, default_value = "aa:bb:cc:dd:ee:ff")]
    dest: MacAddr,
    #[arg(long, default_value = "11:22:33:44:55:66")]
    src: MacAddr,
    /// Emit the trailer that closes a payload instead of a header.
    #[arg(long)]
    trailer: bool,
    /// Advertisement time-to-live in seconds.
    #[arg(long, default_value_t = 120)]
    ttl_secs: u16,
    /// Payload qubits announced by the header.
    #[arg(long, default_value_t = 10)]
    payload_len: u16,
    /// Payload encoding: bb84, epr, or a numeric id.
    #[arg(long, default_value = "epr")]
    encoding: EncodingArg,
    /// Spacing between payload qubits in ns.
    #[arg(long, default_value_t = 5_000)]
    period_ns: u64,
    /// Multiplexing: tdm, wdm, or a numeric id.
    #[arg(long, default_value = "tdm")]
    multiplexing: MultiplexingArg,
    /// Burst guard budget in ns.
    #[arg(long, default_value_t = 500_000)]
    guard_ns: u64,
    /// Memory dwell already accumulated, in ns.
    #[arg(long, default_value_t = 1_000)]
    elapsed_ns: u64,
    /// Dwell bound in ns; zero means no bound.
    #[arg(long, default_value_t = 250_000)]
    cutoff_ns: u64,
    /// Error-correction protocol id.
    #[arg(long, default_value_t = 7)]
    qec: u8,
}

#[derive(Args)]
struct DecodeArgs {
    /// Hex bytes; read from standard input when omitted.
    hex: Option<String>,
}

#[derive(Args)]
struct QkdSweepArgs {
    /// Output CSV path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Comma-separated fiber lengths in km; default 0..=200 km step 5.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    lengths: Option<Vec<f64>>,
    /// Comma-separated switch counts; default 0,1,2,3.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    switches: Option<Vec<u32>>,
    #[command(flatten)]
    params: QkdParamFlags,
}

#[derive(Args)]
struct QkdParamFlags {
    /// Fiber attenuation in dB/km.
    #[arg(long)]
    attenuation: Option<f64>,
    /// Detector efficiency.
    #[arg(long)]
    detector_efficiency: Option<f64>,
    /// Dark-count probability per gate.
    #[arg(long)]
    dark_count: Option<f64>,
    /// Error-correction inefficiency factor.
    #[arg(long)]
    ec_inefficiency: Option<f64>,
    /// Misalignment error probability.
    #[arg(long)]
    misalignment: Option<f64>,
    /// Per-switch availability probability.
    #[arg(long)]
    availability: Option<f64>,
    /// Quantum frame duration over per-switch processing time.
    #[arg(long)]
    tq_over_tp: Option<f64>,
}

impl QkdParamFlags {
    fn apply(&self, params: &mut QkdParams) {
        if let Some(v) = self.attenuation {
            params.attenuation_db_per_km = v;
        }
        if let Some(v) = self.detector_efficiency {
            params.detector_efficiency = v;
        }
        if let Some(v) = self.dark_count {
            params.dark_count_prob = v;
        }
        if let Some(v) = self.ec_inefficiency {
            params.error_correction_inefficiency = v;
        }
        if let Some(v) = self.misalignment {
            params.misalignment_prob = v;
        }
        if let Some(v) = self.availability {
            params.availability_p = v;
        }
        if let Some(v) = self.tq_over_tp {
            params.tq_over_tp = v;
        }
    }
}

#[derive(Args)]
struct McKArgs {
    /// Per-switch availability probability.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Switch count on the path.
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Quantum frame duration over per-switch processing time.
    #[arg(long, default_value_t = 100.0)]
    tq_over_tp: f64,
    /// Monte Carlo trials.
    #[arg(long, default_value_t = 100_000)]
    trials: u32,
}

#[derive(Args)]
struct EntdistArgs {
    /// Which sweep to run.
    #[arg(long, value_enum)]
    sweep: SweepKind,
    /// Output CSV path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Source placement for the length-hops sweep.
    #[arg(long, value_enum, default_value = "central")]
    scenario: PlacementArg,
    /// Comma-separated total lengths in km; default 0..=100 km step 10.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    lengths: Option<Vec<f64>>,
    /// Comma-separated relay counts; default 0,1,2,3 (the comparison
    /// sweep takes exactly one count and defaults to 1).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    hops: Option<Vec<u32>>,
    /// Comma-separated memory constants in ns; default decades 1e4..1e8.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    t_grid: Option<Vec<f64>>,
    /// Comma-separated processing times in ns.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    proc_grid: Option<Vec<u64>>,
    /// off disables fiber depolarization and memory decay (sweeps that
    /// scan the memory constant still scan it).
    #[arg(long, value_enum, default_value = "on")]
    noise: NoiseArg,
    #[command(flatten)]
    params: EntParamFlags,
}

#[derive(Args)]
struct EntParamFlags {
    /// Memory relaxation constant in ns (accepts inf).
    #[arg(long)]
    t1_ns: Option<f64>,
    /// Memory coherence constant in ns (accepts inf).
    #[arg(long)]
    t2_ns: Option<f64>,
    /// Relay header-processing time in ns.
    #[arg(long)]
    proc_ns: Option<u64>,
    /// Spacing between payload qubits in ns.
    #[arg(long)]
    period_ns: Option<u64>,
    /// Payload qubits per frame.
    #[arg(long)]
    qubits: Option<u32>,
    /// Fiber depolarization coefficient per km.
    #[arg(long)]
    p_l: Option<f64>,
}

impl EntParamFlags {
    fn apply(&self, params: &mut EntParams) {
        if let Some(v) = self.t1_ns {
            params.t1_ns = v;
        }
        if let Some(v) = self.t2_ns {
            params.t2_ns = v;
        }
        if let Some(v) = self.proc_ns {
            params.processing_ns = v;
        }
        if let Some(v) = self.period_ns {
            params.emission_period_ns = v;
        }
        if let Some(v) = self.qubits {
            params.qubits_per_frame = v;
        }
        if let Some(v) = self.p_l {
            params.p_l_per_km = v;
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum SweepKind {
    LengthHops,
    T1t2Length,
    ProcT1,
    Compare,
}

#[derive(ValueEnum, Clone, Copy)]
enum PlacementArg {
    Central,
    Sender,
}

impl PlacementArg {
    fn kind(self) -> ScenarioKind {
        match self {
            PlacementArg::Central => ScenarioKind::Central,
            PlacementArg::Sender => ScenarioKind::Sender,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum NoiseArg {
    On,
    Off,
}

/// Encoding-scheme flag value: a name or a raw id.
#[derive(Clone, Copy)]
struct EncodingArg(EncodingScheme);

impl FromStr for EncodingArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bb84" | "bb84-polarization" => Ok(EncodingArg(EncodingScheme::Bb84Polarization)),
            "epr" | "epr-half" => Ok(EncodingArg(EncodingScheme::EprHalf)),
            other => other
                .parse::<u8>()
                .map(|id| EncodingArg(EncodingScheme::from_id(id)))
                .map_err(|_| format!("unknown encoding '{other}' (use bb84, epr, or an id)")),
        }
    }
}

/// Multiplexing flag value: a name or a raw id.
#[derive(Clone, Copy)]
struct MultiplexingArg(Multiplexing);

impl FromStr for MultiplexingArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tdm" => Ok(MultiplexingArg(Multiplexing::Tdm)),
            "wdm" => Ok(MultiplexingArg(Multiplexing::Wdm)),
            other => other
                .parse::<u8>()
                .map(|id| MultiplexingArg(Multiplexing::from_id(id)))
                .map_err(|_| format!("unknown multiplexing '{other}' (use tdm, wdm, or an id)")),
        }
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Hex(#[from] hex::FromHexError),
    #[error("{0}")]
    Decode(#[from] DecodeError),
    #[error("{0}")]
    Encode(#[from] EncodeError),
    #[error("{0}")]
    Qkd(#[from] QkdError),
    #[error("{0}")]
    Ent(#[from] EntError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Io(_) => ExitCode::from(1),
            _ => ExitCode::from(2),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            config::parse(&text).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => ConfigFile::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    match cli.command {
        Command::Frame(FrameCommand::Encode(args)) => run_frame_encode(args),
        Command::Frame(FrameCommand::Decode(args)) => run_frame_decode(args),
        Command::QkdSweep(args) => run_qkd_sweep(args, &config),
        Command::McK(args) => run_mc_k(args, seed),
        Command::Entdist(args) => run_entdist(args, &config),
    }
}

fn run_frame_encode(args: EncodeArgs) -> Result<(), CliError> {
    let frame = if args.trailer {
        QuantumFrame::Trailer(FrameTrailer {
            dest: args.dest,
            src: args.src,
        })
    } else {
        QuantumFrame::Header(FrameHeader {
            dest: args.dest,
            src: args.src,
            ttl_secs: args.ttl_secs,
            qdu: QduDescriptor {
                payload_len: args.payload_len,
                encoding: args.encoding.0,
                emission_period_ns: args.period_ns,
                multiplexing: args.multiplexing.0,
            },
            guard_time_ns: args.guard_ns,
            elapsed_memory_ns: args.elapsed_ns,
            max_cutoff_ns: args.cutoff_ns,
            qec_protocol: args.qec,
        })
    };
    let bytes = frame_codec::encode(&frame)?;
    println!("{}", hex::encode(bytes));
    Ok(())
}

fn run_frame_decode(args: DecodeArgs) -> Result<(), CliError> {
    let text = match args.hex {
        Some(h) => h,
        None => std::io::read_to_string(std::io::stdin())?,
    };
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bytes = hex::decode(cleaned)?;
    let decoded = frame_codec::decode(&bytes)?;
    let mut out = String::new();
    match decoded.frame {
        QuantumFrame::Header(h) => {
            writeln!(out, "role: header").unwrap();
            writeln!(out, "dest: {}", h.dest).unwrap();
            writeln!(out, "src: {}", h.src).unwrap();
            writeln!(out, "ttl_secs: {}", h.ttl_secs).unwrap();
            writeln!(out, "payload_len: {}", h.qdu.payload_len).unwrap();
            writeln!(out, "encoding: {}", encoding_name(h.qdu.encoding)).unwrap();
            writeln!(out, "emission_period_ns: {}", h.qdu.emission_period_ns).unwrap();
            writeln!(out, "multiplexing: {}", multiplexing_name(h.qdu.multiplexing)).unwrap();
            writeln!(out, "guard_time_ns: {}", h.guard_time_ns).unwrap();
            writeln!(out, "elapsed_memory_ns: {}", h.elapsed_memory_ns).unwrap();
            writeln!(out, "max_cutoff_ns: {}", h.max_cutoff_ns).unwrap();
            writeln!(out, "qec_protocol: {}", h.qec_protocol).unwrap();
            writeln!(out, "live: {}", h.is_live()).unwrap();
        }
        QuantumFrame::Trailer(t) => {
            writeln!(out, "role: trailer").unwrap();
            writeln!(out, "dest: {}", t.dest).unwrap();
            writeln!(out, "src: {}", t.src).unwrap();
        }
    }
    for tlv in &decoded.unknown_tlvs {
        writeln!(
            out,
            "unknown_tlv: type={} offset={} len={}",
            tlv.tlv_type,
            tlv.offset,
            tlv.value.len()
        )
        .unwrap();
    }
    print!("{out}");
    Ok(())
}

fn encoding_name(e: EncodingScheme) -> String {
    match e {
        EncodingScheme::Bb84Polarization => "bb84-polarization".into(),
        EncodingScheme::EprHalf => "epr-half".into(),
        EncodingScheme::Other(n) => format!("other({n})"),
    }
}

fn multiplexing_name(m: Multiplexing) -> String {
    match m {
        Multiplexing::Tdm => "tdm".into(),
        Multiplexing::Wdm => "wdm".into(),
        Multiplexing::Other(n) => format!("other({n})"),
    }
}

fn default_qkd_lengths() -> Vec<f64> {
    (0..=40).map(|i| i as f64 * 5.0).collect()
}

fn default_ent_lengths() -> Vec<f64> {
    (0..=10).map(|i| i as f64 * 10.0).collect()
}

const DEFAULT_SWITCH_COUNTS: [u32; 4] = [0, 1, 2, 3];
const DEFAULT_HOPS: [u32; 4] = [0, 1, 2, 3];
const DEFAULT_T_GRID: [f64; 5] = [1e4, 1e5, 1e6, 1e7, 1e8];
const DEFAULT_PROC_GRID: [u64; 9] = [
    0, 1_000, 10_000, 25_000, 50_000, 75_000, 125_000, 250_000, 500_000,
];

fn run_qkd_sweep(args: QkdSweepArgs, config: &ConfigFile) -> Result<(), CliError> {
    let mut params = QkdParams::default();
    config.qkd.apply(&mut params);
    args.params.apply(&mut params);
    let lengths = args.lengths.unwrap_or_else(default_qkd_lengths);
    let switches = args
        .switches
        .unwrap_or_else(|| DEFAULT_SWITCH_COUNTS.to_vec());
    let rows = qkd_sweep(&params, &lengths, &switches)?;
    write_qkd_csv(&args.out, &rows)?;
    Ok(())
}

fn write_qkd_csv(path: &Path, rows: &[QkdSweepRow]) -> Result<(), CliError> {
    let mut text = String::from("L_km,n,Q,e,K,R\n");
    for r in rows {
        writeln!(
            text,
            "{},{},{},{},{},{}",
            r.length_km, r.switch_count, r.gain, r.qber, r.routing_factor, r.key_rate
        )
        .expect("writing to a string cannot fail");
    }
    fs::write(path, text)?;
    Ok(())
}

fn run_mc_k(args: McKArgs, seed: u64) -> Result<(), CliError> {
    let analytic = k_factor(args.p, args.n, args.tq_over_tp)?;
    let estimate = monte_carlo_k(args.p, args.n, args.tq_over_tp, args.trials, seed)?;
    println!("analytic_k = {analytic}");
    println!("monte_carlo_k = {estimate}");
    println!("abs_error = {}", (estimate - analytic).abs());
    println!("trials = {}", args.trials);
    println!("seed = {seed}");
    Ok(())
}

fn run_entdist(args: EntdistArgs, config: &ConfigFile) -> Result<(), CliError> {
    let mut params = EntParams::default();
    config.entdist.apply(&mut params);
    args.params.apply(&mut params);
    if args.noise == NoiseArg::Off {
        params.p_l_per_km = 0.0;
        params.t1_ns = f64::INFINITY;
        params.t2_ns = f64::INFINITY;
    }
    let lengths = args.lengths.unwrap_or_else(default_ent_lengths);
    let hops = args.hops.unwrap_or_else(|| match args.sweep {
        SweepKind::Compare => vec![1],
        _ => DEFAULT_HOPS.to_vec(),
    });
    let t_grid = args.t_grid.unwrap_or_else(|| DEFAULT_T_GRID.to_vec());
    let proc_grid = args
        .proc_grid
        .unwrap_or_else(|| DEFAULT_PROC_GRID.to_vec());

    let rows = match args.sweep {
        SweepKind::LengthHops => {
            sweep_length_hops(&params, &lengths, &hops, args.scenario.kind())?
        }
        SweepKind::T1t2Length => sweep_t1t2_length(&params, &t_grid, &lengths)?,
        SweepKind::ProcT1 => sweep_proc_t1(&params, &proc_grid, &t_grid)?,
        SweepKind::Compare => {
            let hop_count = match hops.as_slice() {
                [single] => *single,
                _ => {
                    return Err(CliError::Usage(
                        "the comparison sweep takes exactly one --hops value".into(),
                    ))
                }
            };
            let cmp = compare_scenarios(&params, &lengths, hop_count)?;
            println!("central_crossing_km = {}", fmt_crossing(cmp.central_crossing_km));
            println!("sender_crossing_km = {}", fmt_crossing(cmp.sender_crossing_km));
            cmp.rows
        }
    };
    write_ent_csv(&args.out, &rows)?;
    Ok(())
}

fn fmt_crossing(crossing: Option<f64>) -> String {
    match crossing {
        Some(km) => km.to_string(),
        None => "none".into(),
    }
}

fn write_ent_csv(path: &Path, rows: &[EntSweepRow]) -> Result<(), CliError> {
    let mut text =
        String::from("scenario,total_length_km,hops,T1_ns,T2_ns,proc_ns,pair_index,fidelity\n");
    for r in rows {
        writeln!(
            text,
            "{},{},{},{},{},{},{},{}",
            r.scenario,
            r.total_length_km,
            r.hops,
            r.t1_ns,
            r.t2_ns,
            r.processing_ns,
            r.pair_index,
            r.fidelity
        )
        .expect("writing to a string cannot fail");
    }
    fs::write(path, text)?;
    Ok(())
}
