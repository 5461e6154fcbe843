//! Subcommands. Each one reads a JSON file, calls one library operation and
//! renders the result; identical inputs give byte-identical outputs.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ergodic_core::ergopt::{aubry_set, calibrated_subaction, max_ergodic_value, rate_function_cylinder};
use ergodic_core::involution::{dual_eigenvalue_identity, kernel_matrix, reversed_twist_check, twist_check};
use ergodic_core::maxplus::{critical_eigenpair, mp_eigen, mp_eigen_check};
use ergodic_core::measures::birkhoff_average;
use ergodic_core::thermo::{gibbs_log_cylinder_mass, thermo_state};
use ergodic_core::zero_temp::{beta_sweep, limit_selection_chapter7, BetaSchedule, MAX_BETA};
use ergodic_core::Word;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::formats::*;

#[derive(Debug, Parser)]
#[command(name = "ergodic", version, about = "Equilibrium states, maximizing measures and zero-temperature limits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Perron data and equilibrium state of beta*A (potential JSON in, JSON out).
    Perron {
        input: PathBuf,
        /// Inverse temperature; overrides the "beta" field of the input, which defaults to 1.
        #[arg(long)]
        beta: Option<f64>,
        /// Also report the Birkhoff average of A over this many sampled steps.
        #[arg(long)]
        samples: Option<usize>,
        /// Seed of the sampler.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Pressure, cylinder masses and normalized log-eigenfunctions over a beta schedule (CSV).
    Sweep {
        input: PathBuf,
        #[command(flatten)]
        schedule: ScheduleArgs,
    },
    /// Maximizing cycles, Aubry transition matrix and component entropies.
    Aubry { input: PathBuf },
    /// Calibrated subaction normalized by max V = 0.
    Subaction {
        input: PathBuf,
        /// Largest accepted calibration residual.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Max-plus eigenvalue and eigenvector of a matrix given as JSON rows ("-inf" allowed).
    Maxplus {
        input: PathBuf,
        /// Tolerance of the eigen-equation check.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Three-symbol closed-form analysis of {"eps": 3x3}; exit code 4 when unresolved.
    Ch7 { input: PathBuf },
    /// Rate function of a cylinder against -(1/beta) ln of its equilibrium mass.
    Ldp {
        input: PathBuf,
        /// 0-based symbols, comma separated, as in every output file.
        #[arg(long, value_delimiter = ',', required = true)]
        word: Vec<usize>,
        #[arg(long, default_value_t = 200.0)]
        beta: f64,
    },
    /// Twist condition of the involution kernel and the dual eigenvalue identity.
    Twist {
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScheduleKind {
    Linear,
    Geometric,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long, default_value_t = 1.0)]
    pub beta_min: f64,
    /// At most 500.
    #[arg(long, default_value_t = 300.0)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 40)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = ScheduleKind::Geometric)]
    pub schedule: ScheduleKind,
}

impl ScheduleArgs {
    pub fn build(&self) -> CliResult<BetaSchedule> {
        if !(self.beta_max <= MAX_BETA) {
            return Err(CliError::Input(format!("--beta-max must be at most {MAX_BETA}")));
        }
        Ok(match self.schedule {
            ScheduleKind::Linear => BetaSchedule::linear(self.beta_min, self.beta_max, self.steps)?,
            ScheduleKind::Geometric => BetaSchedule::geometric(self.beta_min, self.beta_max, self.steps)?,
        })
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct PerronReport {
    #[serde(flatten)]
    state: ThermoFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    birkhoff_average: Option<f64>,
}

/// Runs one command and returns the text to write.
pub fn execute(command: &Command) -> CliResult<String> {
    match command {
        Command::Perron { input, beta, samples, seed } => {
            let file: PotentialFile = read_json(input)?;
            let a = file.potential()?;
            let beta = beta.or(file.beta).unwrap_or(1.0);
            let s = thermo_state(&a, beta)?;
            let birkhoff_average = match samples {
                Some(n) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    Some(birkhoff_average(&a, s.equilibrium(), *n, &mut rng)?)
                }
                None => None,
            };
            Ok(to_json(&PerronReport { state: ThermoFile::from_state(&s), birkhoff_average }))
        }
        Command::Sweep { input, schedule } => {
            let file: PotentialFile = read_json(input)?;
            let a = file.potential()?;
            let sweep = beta_sweep(&a, &schedule.build()?)?;
            let csv = sweep_csv(a.dim(), &sweep);
            if let Some((beta, e)) = sweep.failures.first() {
                if sweep.records.is_empty() {
                    return Err(CliError::Numeric(format!("every point failed; first at beta = {beta}: {e}")));
                }
                let total = sweep.failures.len() + sweep.records.len();
                let reason = format!("{} of {total} points failed; first at beta = {beta}: {e}", sweep.failures.len());
                return Err(CliError::Partial { report: csv, reason });
            }
            Ok(csv)
        }
        Command::Aubry { input } => {
            let a = read_json::<PotentialFile>(input)?.potential()?;
            Ok(to_json(&AubryFile::from_data(&aubry_set(&a)?)))
        }
        Command::Subaction { input, tol } => {
            let a = read_json::<PotentialFile>(input)?.potential()?;
            let m = max_ergodic_value(&a)?;
            let report = SubactionFile::new(&a, &calibrated_subaction(&a)?, m);
            if !(report.calibration_residual <= *tol) {
                return Err(CliError::Numeric(format!(
                    "calibration residual {:e} exceeds {tol:e}",
                    report.calibration_residual
                )));
            }
            Ok(to_json(&report))
        }
        Command::Maxplus { input, tol } => {
            let m = read_json::<MaxPlusFile>(input)?.matrix()?;
            let pair = match m.to_real() {
                Some(_) => mp_eigen(&m)?,
                None => critical_eigenpair(&m)?,
            };
            let check = mp_eigen_check(&m, pair.lambda, &pair.v, *tol)?;
            Ok(to_json(&MaxPlusReport {
                lambda: pair.lambda,
                eigenvector: ext_vec(&pair.v),
                holds: check.holds,
                residual: ExtReal(check.residual),
            }))
        }
        Command::Ch7 { input } => {
            let p = read_json::<Chapter7File>(input)?.params()?;
            let an = limit_selection_chapter7(&p)?;
            let report = Chapter7Report::from_analysis(&an);
            if an.agree {
                Ok(to_json(&report))
            } else {
                Err(CliError::Unresolved { reason: report.classification.clone(), report: to_json(&report) })
            }
        }
        Command::Ldp { input, word, beta } => {
            let a = read_json::<PotentialFile>(input)?.potential()?;
            let one_based: Vec<usize> = word.iter().map(|&k| k + 1).collect();
            let w = Word::new(&one_based)?;
            let v = calibrated_subaction(&a)?;
            let rate = rate_function_cylinder(&a, &v, &w)?;
            let s = thermo_state(&a, *beta)?;
            let log_mass = gibbs_log_cylinder_mass(&s, &a, &w)?;
            Ok(to_json(&LdpReport {
                word: word.clone(),
                rate: ExtReal(rate.value),
                unique_maximizer: rate.unique_maximizer,
                beta: *beta,
                empirical: ExtReal(-log_mass / beta + 0.0),
            }))
        }
        Command::Twist { input, beta } => {
            let a = read_json::<PotentialFile>(input)?.potential()?;
            let w = kernel_matrix(&a);
            let dual = dual_eigenvalue_identity(&a, *beta)?;
            Ok(to_json(&TwistFile::new(&twist_check(&w)?, &reversed_twist_check(&w)?, *beta, dual)))
        }
    }
}

/// Executes, writes the output and returns the process exit status.
pub fn run(cli: &Cli) -> u8 {
    emit(execute(&cli.command), cli.out.as_deref())
}

/// Writes a command's output, including the report carried by a failure.
pub fn emit(result: CliResult<String>, out: Option<&Path>) -> u8 {
    let (text, status) = match result {
        Ok(text) => (Some(text), 0),
        Err(e) => {
            eprintln!("error: {e}");
            (e.report().map(str::to_owned), e.exit_code())
        }
    };
    if let Some(text) = text {
        let written = match out {
            Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        };
        if let Err(e) = written {
            eprintln!("error: {e}");
            return 2;
        }
    }
    status
}
