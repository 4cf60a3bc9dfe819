//! `qap`: store, read and check register banks, and run forgery experiments.
//!
//! Exit codes: 0 success / all checks passed, 1 a check failed,
//! 2 usage or validation error, 3 cannot write output, 4 corrupt or
//! unreadable input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use quantum_antipiracy::adversary::AttackStrategy;
use quantum_antipiracy::analysis::{flip_detection_per_index, sweep};
use quantum_antipiracy::authcode::auth_keygen;
use quantum_antipiracy::io::{
    load_bank, load_key, save_bank, save_key, write_flip_detection_csv, write_sweep_csv, FileError,
    Key,
};
use quantum_antipiracy::protocol::{
    check_bank, check_subset, read_bank, store, BitString, CheckReport,
};
use quantum_antipiracy::qcore::RandomSource;
use quantum_antipiracy::{authcode, Error};

#[derive(Parser)]
#[command(
    name = "qap",
    version,
    about = "Anti-piracy storage in 4-state quantum registers"
)]
struct Cli {
    /// Worker threads for Monte Carlo runs (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Store a bit string; writes a bank file and a storage key file.
    Store {
        bits: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        bank: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long, default_value = "")]
        label: String,
    },
    /// Read the bits held in a bank; rewrites the bank with post-measurement states.
    Read {
        #[arg(long)]
        bank: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a bank (or some of its registers) against a storage key.
    Check {
        #[arg(long)]
        bank: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated register indices; default checks all.
        #[arg(long, value_delimiter = ',')]
        indices: Option<Vec<usize>>,
    },
    /// Monte Carlo pass rate of one attack strategy; writes CSV.
    Attack {
        /// guess | measure-resend | flip
        strategy: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Measurement basis angle for measure-resend.
        #[arg(long, default_value_t = 0.0)]
        basis_angle: f64,
        /// Auth key file; with `flip`, reports per-index detection for this key.
        #[arg(long)]
        key: Option<PathBuf>,
    },
    /// Pass rate against bank length; one CSV row per n.
    Sweep {
        strategy: String,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32")]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        basis_angle: f64,
    },
    /// Generate a pre-shared authentication key.
    Authgen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        key: PathBuf,
    },
    /// Sign a message with an unused auth key; marks the key file spent.
    Authsign {
        bits: String,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        bank: PathBuf,
    },
    /// Read a signed bank and check it against the auth key.
    Authverify {
        #[arg(long)]
        bank: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        let code = match e {
            FileError::Write { .. } => 3,
            FileError::Read { .. } | FileError::Corrupt { .. } => 4,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::usage(e)
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| run(cli.command)),
            Err(e) => Err(Failure::usage(e)),
        },
        None => run(cli.command),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("qap: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Store {
            bits,
            seed,
            bank,
            key,
            label,
        } => cmd_store(&bits, seed, &bank, &key, label),
        Command::Read { bank, seed } => cmd_read(&bank, seed),
        Command::Check {
            bank,
            key,
            seed,
            indices,
        } => cmd_check(&bank, &key, seed, indices.as_deref()),
        Command::Attack {
            strategy,
            n,
            trials,
            seed,
            out,
            basis_angle,
            key,
        } => cmd_attack(
            &strategy,
            n,
            trials,
            seed,
            &out,
            basis_angle,
            key.as_deref(),
        ),
        Command::Sweep {
            strategy,
            n_list,
            trials,
            seed,
            out,
            basis_angle,
        } => {
            let strategy = parse_strategy(&strategy, basis_angle)?;
            let result = sweep(&strategy, &n_list, trials, seed)?;
            write_sweep_csv(&out, &result.rows)?;
            print_rows(&result.rows);
            Ok(0)
        }
        Command::Authgen { n, seed, key } => {
            let k = auth_keygen(n, &mut RandomSource::new(seed))?;
            save_key(&key, &Key::Auth(k))?;
            println!("{n}");
            Ok(0)
        }
        Command::Authsign { bits, key, bank } => cmd_authsign(&bits, &key, &bank),
        Command::Authverify { bank, key, seed } => cmd_authverify(&bank, &key, seed),
    }
}

fn cmd_store(bits: &str, seed: u64, bank_path: &Path, key_path: &Path, label: String) -> CmdResult {
    let c: BitString = bits.parse()?;
    let (mut bank, key) = store(&c, &mut RandomSource::new(seed));
    bank.label = label;
    save_bank(bank_path, &bank)?;
    save_key(key_path, &Key::Storage(key))?;
    println!("{}", c.len());
    Ok(0)
}

fn cmd_read(bank_path: &Path, seed: u64) -> CmdResult {
    let bank = load_bank(bank_path)?;
    let (bits, post) = read_bank(&bank, &mut RandomSource::new(seed))?;
    save_bank(bank_path, &post)?;
    println!("{bits}");
    Ok(0)
}

fn cmd_check(bank_path: &Path, key_path: &Path, seed: u64, indices: Option<&[usize]>) -> CmdResult {
    let bank = load_bank(bank_path)?;
    let key = match load_key(key_path)? {
        Key::Storage(k) => k,
        Key::Auth(_) => return Err(Failure::usage("check needs a storage key; use authverify")),
    };
    let mut rng = RandomSource::new(seed);
    let (report, post) = match indices {
        Some(idx) => check_subset(&bank, &key, idx, &mut rng)?,
        None => check_bank(&bank, &key, &mut rng)?,
    };
    save_bank(bank_path, &post)?;
    print_report(&report);
    Ok(if report.all_pass { 0 } else { 1 })
}

fn cmd_attack(
    name: &str,
    n: Option<usize>,
    trials: u64,
    seed: u64,
    out: &Path,
    basis_angle: f64,
    key_path: Option<&Path>,
) -> CmdResult {
    let strategy = parse_strategy(name, basis_angle)?;
    if let Some(path) = key_path {
        let key = match (&strategy, load_key(path)?) {
            (AttackStrategy::UnitaryFlip(_), Key::Auth(k)) => k,
            (AttackStrategy::UnitaryFlip(_), Key::Storage(_)) => {
                return Err(Failure::usage("flip with --key needs an auth key"))
            }
            _ => return Err(Failure::usage("--key is only used with the flip strategy")),
        };
        let rows = flip_detection_per_index(&key, trials, seed)?;
        write_flip_detection_csv(out, &rows)?;
        println!("index  detected   analytic");
        for r in &rows {
            println!(
                "{:>5}  {:.6}  {:.6}",
                r.index, r.empirical_detection, r.analytic_detection
            );
        }
        return Ok(0);
    }
    let n = n.ok_or_else(|| Failure::usage("--n is required"))?;
    let result = sweep(&strategy, &[n], trials, seed)?;
    write_sweep_csv(out, &result.rows)?;
    print_rows(&result.rows);
    Ok(0)
}

fn cmd_authsign(bits: &str, key_path: &Path, bank_path: &Path) -> CmdResult {
    let c: BitString = bits.parse()?;
    let mut key = match load_key(key_path)? {
        Key::Auth(k) => k,
        Key::Storage(_) => return Err(Failure::usage("authsign needs an auth key")),
    };
    let bank = key.sign(&c)?;
    save_bank(bank_path, &bank)?;
    save_key(key_path, &Key::Auth(key))?;
    println!("{}", c.len());
    Ok(0)
}

fn cmd_authverify(bank_path: &Path, key_path: &Path, seed: u64) -> CmdResult {
    let bank = load_bank(bank_path)?;
    let key = match load_key(key_path)? {
        Key::Auth(k) => k,
        Key::Storage(_) => return Err(Failure::usage("authverify needs an auth key")),
    };
    let (verdict, post) = authcode::auth_verify(&bank, &key, &mut RandomSource::new(seed))?;
    save_bank(bank_path, &post)?;
    println!("{}", verdict.message);
    print_report(&verdict.report);
    Ok(if verdict.authentic { 0 } else { 1 })
}

fn parse_strategy(name: &str, basis_angle: f64) -> Result<AttackStrategy, Failure> {
    Ok(match name.parse::<AttackStrategy>()? {
        AttackStrategy::MeasureResend { .. } => AttackStrategy::measure_resend(basis_angle),
        s => s,
    })
}

fn print_report(report: &CheckReport) {
    println!("index  result");
    for &(i, pass) in &report.per_index {
        println!("{:>5}  {}", i, if pass { "pass" } else { "FAIL" });
    }
    if report.all_pass {
        println!("verdict: original");
    } else {
        println!("verdict: NOT original ({} failed)", report.failures());
    }
}

fn print_rows(rows: &[quantum_antipiracy::analysis::SweepRow]) {
    println!(
        "{:>4}  {:<15} {:>12} {:>12} {:>10}",
        "n", "strategy", "empirical", "analytic", "std_err"
    );
    for r in rows {
        println!(
            "{:>4}  {:<15} {:>12.6e} {:>12.6e} {:>10.2e}",
            r.n, r.strategy, r.empirical_pass, r.analytic_pass, r.std_error
        );
    }
}
