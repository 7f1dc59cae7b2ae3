use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "aes-eqclass",
    version,
    about = "AES-128 equivalence-class experiments"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for randomized runs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random trials per property.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub trials: u64,
    /// Output file (directory for sbox-dist).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads: a positive integer or "auto".
    #[arg(long, global = true, default_value = "auto")]
    pub threads: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Naive,
    Fast,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the randomized invariant suite.
    VerifyProperties {
        /// Negative control: flip one step-matrix coefficient.
        #[arg(long, hide = true)]
        corrupt_matrix: bool,
    },
    /// Compute the SubBytes / InvSubBytes class-count matrices.
    SboxDist {
        #[arg(long, value_enum, default_value_t = Mode::Fast)]
        mode: Mode,
        /// Write a `y0,y1,...` header line in CSV output.
        #[arg(long)]
        csv_header: bool,
    },
    /// Print the class vector at every stage of one encryption.
    Trace {
        #[arg(long)]
        key: String,
        #[arg(long)]
        plaintext: String,
        /// Replace SubBytes with the identity and compare against predictions.
        #[arg(long)]
        linearized: bool,
        /// Rounds to run in linearized mode (1-10).
        #[arg(long, default_value_t = 10)]
        rounds: usize,
    },
    /// Audit the key-schedule class recurrences.
    Keysched {
        #[arg(long)]
        key: Option<String>,
        /// Also audit this many random keys drawn from --seed.
        #[arg(long)]
        random: Option<u64>,
    },
    Encrypt {
        #[arg(long)]
        key: String,
        #[arg(long)]
        block: String,
    },
    Decrypt {
        #[arg(long)]
        key: String,
        #[arg(long)]
        block: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyProperties { .. } => "verify-properties",
            Command::SboxDist { .. } => "sbox-dist",
            Command::Trace { .. } => "trace",
            Command::Keysched { .. } => "keysched",
            Command::Encrypt { .. } => "encrypt",
            Command::Decrypt { .. } => "decrypt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Count(usize),
}

impl std::str::FromStr for Threads {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "auto" {
            return Ok(Threads::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Threads::Count(n)),
            _ => Err(CliError::BadThreads(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub seed: u64,
    pub trials: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Threads,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        Ok(RunConfig {
            subcommand: cli.command.name(),
            seed: cli.global.seed,
            trials: cli.global.trials,
            out: cli.global.out.clone(),
            format: cli.global.format,
            threads: cli.global.threads.parse()?,
        })
    }

    /// Run `f` against `--out` if given, else stdout.
    pub fn with_output<T>(
        &self,
        f: impl FnOnce(&mut dyn Write) -> Result<T, CliError>,
    ) -> Result<T, CliError> {
        match &self.out {
            Some(path) => {
                let file = create(path)?;
                let mut w = BufWriter::new(file);
                let value = f(&mut w)?;
                w.flush().map_err(|e| CliError::io(path, e))?;
                Ok(value)
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                let value = f(&mut w)?;
                w.flush()?;
                Ok(value)
            }
        }
    }

    pub fn thread_pool(&self) -> Result<rayon::ThreadPool, CliError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Threads::Count(n) = self.threads {
            builder = builder.num_threads(n);
        }
        Ok(builder.build()?)
    }
}

pub(crate) fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::io(path, e))
}

/// Execute one invocation. `Ok(true)` means every check in it passed.
pub fn run(cli: Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::from_cli(&cli)?;
    match cli.command {
        Command::VerifyProperties { corrupt_matrix } => {
            commands::verify_properties(&cfg, corrupt_matrix)
        }
        Command::SboxDist { mode, csv_header } => commands::sbox_dist(&cfg, mode, csv_header),
        Command::Trace {
            key,
            plaintext,
            linearized,
            rounds,
        } => commands::trace(&cfg, &key, &plaintext, linearized, rounds),
        Command::Keysched { key, random } => commands::keysched(&cfg, key.as_deref(), random),
        Command::Encrypt { key, block } => commands::encrypt(&cfg, &key, &block, true),
        Command::Decrypt { key, block } => commands::encrypt(&cfg, &key, &block, false),
    }
}
