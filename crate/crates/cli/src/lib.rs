//! Command-line front end: stellar decomposition, reconstruction, transition
//! tables, equivalence sweeps and cascade simulations.
//!
//! Exit codes: 0 success, 1 equivalence failures, 2 invalid input,
//! 3 round-trip overlap below `1 - tol`, 4 capacity exceeded.

pub mod files;

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use majorana_core::embedding::{verify_equivalence, EquivalenceReport, MAX_GENERIC_SYMMETRIZE};
use majorana_core::majorana::{constellation_to_state, state_to_constellation};
use majorana_core::simulation::{run_simulation, Mode, Preparation};
use majorana_core::spin::{coherent_state, transition_probability, BlochPoint, EulerAngles, Spin, SpinState};
use serde::Serialize;

use files::{ConstellationFile, StateFile, SCHEMA};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] majorana_core::Error),
    #[error("round-trip overlap {overlap} below 1 - {tol}")]
    RoundTrip { overlap: f64, tol: f64 },
    #[error("{failed} of {cases} equivalence cases failed")]
    Equivalence { failed: usize, cases: usize },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Equivalence { .. } => 1,
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Core(majorana_core::Error::Capacity(_)) => 4,
            CliError::Core(_) => 2,
            CliError::RoundTrip { .. } => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "majorana", version, about = "Spin-S states as constellations of spin-1/2 stars")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Quantum,
    Classical,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Quantum => Mode::Quantum,
            ModeArg::Classical => Mode::Classical,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to PATH instead of stdout; nothing is written on failure.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Read angle flags (and constellation file angles) in degrees.
    #[arg(long)]
    pub degrees: bool,
}

impl OutputArgs {
    fn angle_scale(&self) -> f64 {
        if self.degrees {
            PI / 180.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stellar decomposition of a state file into a constellation file.
    #[command(after_help = "CSV columns: alpha,beta (one row per star, radians).")]
    Decompose {
        state_file: PathBuf,
        /// Exit 3 when the reconstruction overlap is below 1 - tol.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// State whose constellation is the given one.
    #[command(after_help = "CSV columns: M,re,im (one row per amplitude, ascending M).")]
    Reconstruct {
        constellation_file: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Transition probabilities P(M -> M') between a basis state and the coherent
    /// states along a direction at polar angle beta.
    #[command(after_help = "CSV columns: beta,M,M_prime,probability.")]
    Transprob {
        #[arg(long)]
        spin_twice: u32,
        /// Restrict the table to one row (accepts 1/2 style values).
        #[arg(long, value_parser = parse_half_integer, allow_hyphen_values = true)]
        m: Option<i32>,
        /// Single polar angle; without it a grid over [0, pi] is used.
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u32).range(2..))]
        grid: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compares spin-S transition probabilities with projections of the symmetrized embedding.
    #[command(after_help = "CSV columns: S,M,M_prime,alpha,beta,lhs,rhs,delta,pass.")]
    Equiv {
        #[arg(long)]
        spin_twice: u32,
        /// Sweep every 2S from 1 up to --spin-twice.
        #[arg(long)]
        up_to: bool,
        /// Directions per angle axis when --alpha/--beta are not given.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        samples: u32,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        /// A case passes when |lhs - rhs| < tol.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo run of the measurement cascade.
    #[command(after_help = "CSV columns: M_prime,count,frequency,exact,band (band = 3 sqrt(p (1 - p) / trials)).")]
    Simulate {
        #[arg(value_enum)]
        mode: ModeArg,
        #[arg(long, required_unless_present = "state")]
        spin_twice: Option<u32>,
        /// Prepared basis state `M` (accepts 1/2 style values).
        #[arg(long, value_parser = parse_half_integer, allow_hyphen_values = true, requires = "spin_twice")]
        m: Option<i32>,
        /// Prepared state file instead of a basis state.
        #[arg(long, conflicts_with_all = ["m", "spin_twice"])]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Parses `M` as an integer, `k/2`, or a decimal, returning `2M`.
pub fn parse_half_integer(s: &str) -> Result<i32, String> {
    let s = s.trim();
    if let Some(num) = s.strip_suffix("/2") {
        return num.trim().parse::<i32>().map_err(|e| format!("{s}: {e}"));
    }
    let x: f64 = s.parse().map_err(|_| format!("{s}: not a number"))?;
    let twice = 2.0 * x;
    if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > i32::MAX as f64 {
        return Err(format!("{s}: not a multiple of 1/2"));
    }
    Ok(twice as i32)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.into(), message: e.to_string() })
}

/// Writes `text` to `out` in one step (temporary file plus rename), or to stdout.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    let Some(path) = out else {
        print!("{text}");
        return Ok(());
    };
    let io = |e: std::io::Error| CliError::Io { path: path.into(), message: e.to_string() };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn angle(name: &'static str, x: f64, scale: f64) -> Result<f64, CliError> {
    if !x.is_finite() {
        return Err(CliError::Input(format!("{name} must be finite")));
    }
    Ok(x * scale)
}

fn check_tol(tol: f64, allow_zero: bool) -> Result<(), CliError> {
    if !tol.is_finite() || tol < 0.0 || (tol == 0.0 && !allow_zero) {
        return Err(CliError::Input(format!("invalid tolerance {tol}")));
    }
    Ok(())
}

fn overlap_check(original: &SpinState, tol: f64) -> Result<f64, CliError> {
    let back = constellation_to_state(&state_to_constellation(original)?)?;
    let overlap = transition_probability(original, &back)?;
    if overlap < 1.0 - tol {
        return Err(CliError::RoundTrip { overlap, tol });
    }
    Ok(overlap)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Decompose { state_file, tol, output } => {
            check_tol(*tol, false)?;
            let state = StateFile::parse(&read(state_file)?)?.to_state()?;
            let constellation = state_to_constellation(&state)?;
            let overlap = overlap_check(&state, *tol)?;
            let text = match output.format {
                Format::Json => {
                    let mut f = ConstellationFile::from_constellation(&constellation);
                    f.round_trip_overlap = Some(overlap);
                    to_json(&f)
                }
                Format::Csv => constellation.points().iter().fold(String::from("alpha,beta\n"), |mut s, p| {
                    let _ = writeln!(s, "{:?},{:?}", p.alpha(), p.beta());
                    s
                }),
            };
            emit(&text, output.out.as_deref())
        }
        Command::Reconstruct { constellation_file, tol, output } => {
            check_tol(*tol, false)?;
            let constellation =
                ConstellationFile::parse(&read(constellation_file)?)?.to_constellation(output.angle_scale())?;
            let state = constellation_to_state(&constellation)?;
            let overlap = overlap_check(&state, *tol)?;
            let text = match output.format {
                Format::Json => {
                    let mut f = StateFile::from_state(&state);
                    f.round_trip_overlap = Some(overlap);
                    to_json(&f)
                }
                Format::Csv => state.spin().magnetic_numbers().zip(state.amplitudes()).fold(
                    String::from("M,re,im\n"),
                    |mut s, (m, a)| {
                        let _ = writeln!(s, "{:?},{:?},{:?}", m.value(), a.re, a.im);
                        s
                    },
                ),
            };
            emit(&text, output.out.as_deref())
        }
        Command::Transprob { spin_twice, m, beta, grid, output } => {
            let spin = Spin::from_twice(*spin_twice)?;
            let rows = match m {
                Some(t) => vec![spin.m(*t)?],
                None => spin.magnetic_numbers().collect(),
            };
            let betas = match beta {
                Some(b) => vec![angle("beta", *b, output.angle_scale())?],
                None => (0..*grid).map(|j| PI * j as f64 / (*grid - 1) as f64).collect(),
            };
            let report = transition_tables(spin, &rows, &betas)?;
            let text = match output.format {
                Format::Json => to_json(&report),
                Format::Csv => {
                    let mut s = String::from("beta,M,M_prime,probability\n");
                    for t in &report.tables {
                        for (m, row) in t.m.iter().zip(&t.probabilities) {
                            for (mp, p) in spin.magnetic_numbers().zip(row) {
                                let _ = writeln!(s, "{:?},{:?},{:?},{:?}", t.beta, m, mp.value(), p);
                            }
                        }
                    }
                    s
                }
            };
            emit(&text, output.out.as_deref())
        }
        Command::Equiv { spin_twice, up_to, samples, alpha, beta, tol, output } => {
            check_tol(*tol, true)?;
            let scale = output.angle_scale();
            let spins: Vec<u32> = if *up_to { (1..=*spin_twice).collect() } else { vec![*spin_twice] };
            for &t in &spins {
                Spin::from_twice(t)?;
                if t as usize > MAX_GENERIC_SYMMETRIZE {
                    return Err(majorana_core::Error::Capacity(format!(
                        "equivalence sweep at 2S = {t} (max {MAX_GENERIC_SYMMETRIZE})"
                    ))
                    .into());
                }
            }
            let alphas = match alpha {
                Some(a) => vec![angle("alpha", *a, scale)?],
                None => (0..*samples).map(|i| TAU * i as f64 / *samples as f64).collect(),
            };
            let betas = match beta {
                Some(b) => vec![angle("beta", *b, scale)?],
                None if *samples == 1 => vec![PI / 2.0],
                None => (0..*samples).map(|j| PI * j as f64 / (*samples - 1) as f64).collect(),
            };
            let report = equivalence_sweep(&spins, &alphas, &betas, *tol)?;
            let text = match output.format {
                Format::Json => to_json(&report),
                Format::Csv => {
                    let mut s = String::from("S,M,M_prime,alpha,beta,lhs,rhs,delta,pass\n");
                    for r in &report.records {
                        let _ = writeln!(
                            s,
                            "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{}",
                            r.s, r.m, r.m_prime, r.alpha, r.beta, r.lhs, r.rhs, r.delta, r.pass
                        );
                    }
                    s
                }
            };
            emit(&text, output.out.as_deref())?;
            if report.failed > 0 {
                return Err(CliError::Equivalence { failed: report.failed, cases: report.cases });
            }
            Ok(())
        }
        Command::Simulate { mode, spin_twice, m, state, alpha, beta, trials, seed, output } => {
            let scale = output.angle_scale();
            let direction = BlochPoint::new(angle("alpha", *alpha, scale)?, angle("beta", *beta, scale)?)?;
            let preparation = match (state, spin_twice) {
                (Some(path), _) => Preparation::State(StateFile::parse(&read(path)?)?.to_state()?),
                (None, Some(t)) => {
                    let spin = Spin::from_twice(*t)?;
                    Preparation::Coherent(match m {
                        Some(tm) => spin.m(*tm)?,
                        None => spin.max_m(),
                    })
                }
                (None, None) => return Err(CliError::Input("either --spin-twice or --state is required".into())),
            };
            if *trials == 0 {
                return Err(CliError::Input("--trials must be at least 1".into()));
            }
            let report = run_simulation(&preparation, &direction, (*mode).into(), *trials, *seed)?;
            let text = match output.format {
                Format::Json => to_json(&report),
                Format::Csv => report.histogram_csv(),
            };
            emit(&text, output.out.as_deref())
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionTable {
    pub beta: f64,
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    /// Row `M`, column `M'` ascending.
    pub probabilities: Vec<Vec<f64>>,
    pub row_sums: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionReport {
    pub schema: u32,
    #[serde(rename = "S")]
    pub spin: String,
    pub twice_s: u32,
    #[serde(rename = "M_prime")]
    pub m_prime: Vec<f64>,
    pub tables: Vec<TransitionTable>,
}

pub fn transition_tables(
    spin: Spin,
    rows: &[majorana_core::spin::MagneticQuantumNumber],
    betas: &[f64],
) -> Result<TransitionReport, CliError> {
    let mut tables = Vec::with_capacity(betas.len());
    for &beta in betas {
        let angles = EulerAngles::direction(0.0, beta)?;
        let targets =
            spin.magnetic_numbers().map(|mp| coherent_state(spin, mp, &angles)).collect::<Result<Vec<_>, _>>()?;
        let probabilities = rows
            .iter()
            .map(|&m| targets.iter().map(|t| transition_probability(&SpinState::basis(m), t)).collect())
            .collect::<Result<Vec<Vec<f64>>, _>>()?;
        let row_sums = probabilities.iter().map(|r| r.iter().sum()).collect();
        tables.push(TransitionTable { beta, m: rows.iter().map(|m| m.value()).collect(), probabilities, row_sums });
    }
    Ok(TransitionReport {
        schema: SCHEMA,
        spin: spin.to_string(),
        twice_s: spin.twice(),
        m_prime: spin.magnetic_numbers().map(|m| m.value()).collect(),
        tables,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceSweep {
    pub schema: u32,
    pub tol: f64,
    pub cases: usize,
    pub failed: usize,
    pub max_delta: f64,
    pub records: Vec<EquivalenceReport>,
}

pub fn equivalence_sweep(spins: &[u32], alphas: &[f64], betas: &[f64], tol: f64) -> Result<EquivalenceSweep, CliError> {
    let mut records = Vec::new();
    for &t in spins {
        let spin = Spin::from_twice(t)?;
        for &beta in betas {
            for &alpha in alphas {
                let dir = BlochPoint::new(alpha, beta)?;
                for m in spin.magnetic_numbers() {
                    for mp in spin.magnetic_numbers() {
                        records.push(verify_equivalence(spin, m, mp, &dir, tol)?);
                    }
                }
            }
        }
    }
    Ok(EquivalenceSweep {
        schema: SCHEMA,
        tol,
        cases: records.len(),
        failed: records.iter().filter(|r| !r.pass).count(),
        max_delta: records.iter().map(|r| r.delta).fold(0.0, f64::max),
        records,
    })
}
