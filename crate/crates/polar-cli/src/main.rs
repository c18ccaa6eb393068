//! Command-line front end: construct code specs, encode/decode single
//! frames, run Monte-Carlo sweeps, and compare decoders on paired
//! channel realizations.
//!
//! Exit codes: 0 on success, 1 when a decode fails its CRC, 2 on usage
//! or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use polar::code::{CodeSpec, CrcConfig, DEFAULT_DESIGN_SNR_DB};
use polar::sc::CombineMode;
use polar::sim::{
    compare_decoders, report_json, run_sweep, DecoderConfig, SimConfig, SimReport,
};
use polar::word::{BitWord, LlrWord};

#[derive(Parser)]
#[command(name = "polar", version, about = "Polar-code codec and Monte-Carlo simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecoderKind {
    Sc,
    Scl,
    Psc,
    Pscl,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a code spec and write it as JSON.
    Construct {
        /// Transform order; the block length is N = 2^n.
        #[arg(long)]
        n: usize,
        /// Information bits carried in u (CRC included).
        #[arg(long)]
        k: usize,
        /// Reserve 16 of the K bits for a CRC-16 field.
        #[arg(long)]
        crc16: bool,
        /// Construction SNR in dB (Eb/N0).
        #[arg(long, default_value_t = DEFAULT_DESIGN_SNR_DB)]
        design_snr: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Encode a payload bit file into a codeword bit file.
    Encode {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Decode a channel LLR file; writes the payload and prints
    /// decode metadata as JSON.
    Decode {
        #[arg(long)]
        spec: PathBuf,
        /// Channel LLR file, one decimal value per line.
        #[arg(long)]
        llrs: PathBuf,
        #[arg(long, value_enum)]
        decoder: DecoderKind,
        /// Component decoder count for psc/pscl.
        #[arg(long)]
        m: Option<usize>,
        /// List size (scl/pscl); the maximum when --adaptive is set.
        #[arg(long)]
        list: Option<usize>,
        #[arg(long)]
        adaptive: bool,
        /// Use the min-sum combine rule instead of the exact one.
        #[arg(long)]
        min_sum: bool,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Monte-Carlo BER/FER sweep; writes a CSV report.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        decoder: DecoderKind,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        list: Option<usize>,
        #[arg(long)]
        adaptive: bool,
        #[arg(long)]
        min_sum: bool,
        /// SNR points in dB: a single value or an inclusive range a:b:step.
        #[arg(long)]
        snr: String,
        #[arg(long)]
        frames: u64,
        /// Frame errors per point before stopping early (0 disables).
        #[arg(long, default_value_t = 100)]
        max_errors: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the report with the config embedded as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Paired comparison of several decoders; writes a parity CSV.
    Compare {
        #[arg(long)]
        spec: PathBuf,
        /// Decoder list, e.g. sc,psc:2,scl:8,pscl:2:8:adaptive.
        #[arg(long, value_delimiter = ',', required = true)]
        decoders: Vec<String>,
        #[arg(long)]
        min_sum: bool,
        #[arg(long)]
        snr: String,
        #[arg(long)]
        frames: u64,
        #[arg(long, default_value_t = 0)]
        max_errors: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// Non-usage failure carrying the exit code to report.
struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }
}

impl From<polar::Error> for CliError {
    fn from(e: polar::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn load_spec(path: &Path) -> CliResult<CodeSpec> {
    CodeSpec::from_json(&read_file(path)?)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn read_bits(path: &Path) -> CliResult<BitWord> {
    BitWord::parse01(&read_file(path)?)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn read_llrs(path: &Path) -> CliResult<LlrWord> {
    let text = read_file(path)?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|e| {
            CliError::usage(format!("{}:{}: {e}", path.display(), lineno + 1))
        })?;
        values.push(v);
    }
    Ok(LlrWord::new(values))
}

/// Parses `a`, or the inclusive range `a:b:step` (both ends within
/// 1e-9).
fn parse_snr_points(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| -> CliResult<f64> {
        s.parse()
            .map_err(|e| CliError::usage(format!("bad SNR value {s:?}: {e}")))
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step <= 0.0 {
                return Err(CliError::usage("SNR step must be positive"));
            }
            let mut points = Vec::new();
            let mut i = 0u32;
            loop {
                let v = a + f64::from(i) * step;
                if v > b + 1e-9 {
                    break;
                }
                points.push(v);
                i += 1;
            }
            if points.is_empty() {
                return Err(CliError::usage("empty SNR range"));
            }
            Ok(points)
        }
        _ => Err(CliError::usage(format!(
            "bad SNR syntax {text:?}; expected a or a:b:step"
        ))),
    }
}

fn combine_mode(min_sum: bool) -> CombineMode {
    if min_sum {
        CombineMode::MinSum
    } else {
        CombineMode::Exact
    }
}

fn decoder_from_flags(
    kind: DecoderKind,
    m: Option<usize>,
    list: Option<usize>,
    adaptive: bool,
    mode: CombineMode,
) -> CliResult<DecoderConfig> {
    let need_m = || m.ok_or_else(|| CliError::usage("--m is required for this decoder"));
    let need_list = || list.ok_or_else(|| CliError::usage("--list is required for this decoder"));
    let reject_m = || {
        if m.is_some() {
            Err(CliError::usage("--m does not apply to this decoder"))
        } else {
            Ok(())
        }
    };
    let reject_list = || {
        if list.is_some() || adaptive {
            Err(CliError::usage(
                "--list/--adaptive do not apply to this decoder",
            ))
        } else {
            Ok(())
        }
    };
    Ok(match kind {
        DecoderKind::Sc => {
            reject_m()?;
            reject_list()?;
            DecoderConfig::Sc { mode }
        }
        DecoderKind::Psc => {
            reject_list()?;
            DecoderConfig::Psc { m: need_m()?, mode }
        }
        DecoderKind::Scl => {
            reject_m()?;
            DecoderConfig::Scl {
                list_size: need_list()?,
                adaptive,
                mode,
            }
        }
        DecoderKind::Pscl => DecoderConfig::Pscl {
            m: need_m()?,
            list_size: need_list()?,
            adaptive,
            mode,
        },
    })
}

/// Parses a compare token: `sc`, `psc:M`, `scl:L[:adaptive]`,
/// `pscl:M:L[:adaptive]`.
fn parse_decoder_token(token: &str, mode: CombineMode) -> CliResult<DecoderConfig> {
    let parts: Vec<&str> = token.split(':').collect();
    let int = |s: &str| -> CliResult<usize> {
        s.parse()
            .map_err(|e| CliError::usage(format!("bad decoder token {token:?}: {e}")))
    };
    let adaptive_flag = |s: &str| -> CliResult<bool> {
        match s {
            "adaptive" => Ok(true),
            _ => Err(CliError::usage(format!(
                "bad decoder token {token:?}: expected 'adaptive', got {s:?}"
            ))),
        }
    };
    match parts.as_slice() {
        ["sc"] => Ok(DecoderConfig::Sc { mode }),
        ["psc", m] => Ok(DecoderConfig::Psc { m: int(m)?, mode }),
        ["scl", l] => Ok(DecoderConfig::Scl {
            list_size: int(l)?,
            adaptive: false,
            mode,
        }),
        ["scl", l, a] => Ok(DecoderConfig::Scl {
            list_size: int(l)?,
            adaptive: adaptive_flag(a)?,
            mode,
        }),
        ["pscl", m, l] => Ok(DecoderConfig::Pscl {
            m: int(m)?,
            list_size: int(l)?,
            adaptive: false,
            mode,
        }),
        ["pscl", m, l, a] => Ok(DecoderConfig::Pscl {
            m: int(m)?,
            list_size: int(l)?,
            adaptive: adaptive_flag(a)?,
            mode,
        }),
        _ => Err(CliError::usage(format!("unknown decoder token {token:?}"))),
    }
}

/// Worker cap from POLAR_THREADS; 0 or unset picks the default pool.
fn workers_from_env() -> CliResult<usize> {
    match std::env::var("POLAR_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| CliError::usage(format!("bad POLAR_THREADS value {v:?}: {e}"))),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Construct {
            n,
            k,
            crc16,
            design_snr,
            output,
        } => {
            let crc = crc16.then(CrcConfig::crc16_ccitt);
            let spec = CodeSpec::build(n, k, crc, design_snr)?;
            write_file(&output, &spec.to_json())?;
            eprintln!(
                "wrote spec: N={}, K={}, payload={} bits",
                spec.block_len(),
                spec.k(),
                spec.payload_len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Encode {
            spec,
            input,
            output,
        } => {
            let spec = load_spec(&spec)?;
            let payload = read_bits(&input)?;
            let codeword = spec.encode_payload(&payload)?;
            write_file(&output, &format!("{}\n", codeword.to_string01()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Decode {
            spec,
            llrs,
            decoder,
            m,
            list,
            adaptive,
            min_sum,
            output,
        } => {
            let spec = load_spec(&spec)?;
            let llrs = read_llrs(&llrs)?;
            let decoder = decoder_from_flags(decoder, m, list, adaptive, combine_mode(min_sum))?;
            let decoded = polar::sim::decode_with(&decoder, &spec, &llrs)?;
            write_file(&output, &format!("{}\n", decoded.payload.to_string01()))?;
            let meta = serde_json::json!({
                "decoder": decoder.label(),
                "crc_ok": decoded.crc_ok,
                "used_list_size": decoded.used_list_size,
                "sequential_steps": decoded.sequential_steps,
                "fg_ops": decoded.fg_ops,
                "payload_bits": decoded.payload.len(),
            });
            println!("{meta}");
            if decoded.crc_ok == Some(false) {
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            spec,
            decoder,
            m,
            list,
            adaptive,
            min_sum,
            snr,
            frames,
            max_errors,
            seed,
            output,
            json,
        } => {
            let spec = load_spec(&spec)?;
            let decoder = decoder_from_flags(decoder, m, list, adaptive, combine_mode(min_sum))?;
            let config = SimConfig {
                spec,
                decoder,
                snr_points_db: parse_snr_points(&snr)?,
                snr_convention: Default::default(),
                max_frames: frames,
                max_errors,
                master_seed: seed,
            };
            let report: SimReport = run_sweep(&config, workers_from_env()?)?;
            write_file(&output, &report.to_csv())?;
            if let Some(path) = json {
                write_file(&path, &report_json(&config, &report))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            spec,
            decoders,
            min_sum,
            snr,
            frames,
            max_errors,
            seed,
            output,
        } => {
            let spec = load_spec(&spec)?;
            let mode = combine_mode(min_sum);
            let snr_points_db = parse_snr_points(&snr)?;
            let configs: Vec<SimConfig> = decoders
                .iter()
                .map(|token| {
                    Ok(SimConfig {
                        spec: spec.clone(),
                        decoder: parse_decoder_token(token, mode)?,
                        snr_points_db: snr_points_db.clone(),
                        snr_convention: Default::default(),
                        max_frames: frames,
                        max_errors,
                        master_seed: seed,
                    })
                })
                .collect::<CliResult<_>>()?;
            let report = compare_decoders(&configs, workers_from_env()?)?;
            write_file(&output, &report.to_csv())?;
            if report.any_parity_failure() {
                eprintln!("parity failure flagged (|z| > 3)");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
