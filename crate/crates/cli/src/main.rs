mod commands;
mod error;
mod experiment;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jpegqim_core::metrics::{DEFAULT_HIST_HI, DEFAULT_HIST_LO};
use jpegqim_core::{StegoParams, StepValue};

use error::CliError;
use experiment::RowOutcome;

/// Adaptive-step QIM steganography for baseline JPEG files.
#[derive(Parser)]
#[command(name = "jpegqim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct StegoFlags {
    /// First zigzag index of the embedding area.
    #[arg(long, default_value_t = StegoParams::DEFAULT_SPLIT_INDEX)]
    split_index: usize,
    #[arg(long, default_value_t = StegoParams::DEFAULT_Q_MIN)]
    q_min: u32,
    #[arg(long, default_value_t = StegoParams::DEFAULT_Q_MAX)]
    q_max: u32,
}

impl StegoFlags {
    fn params(self) -> Result<StegoParams, CliError> {
        Ok(StegoParams::new(self.split_index, self.q_min, self.q_max)?)
    }
}

#[derive(Args, Clone, Copy)]
struct RangeFlags {
    /// Lowest histogram bin.
    #[arg(long, default_value_t = DEFAULT_HIST_LO, allow_negative_numbers = true)]
    range_lo: i32,
    /// Highest histogram bin.
    #[arg(long, default_value_t = DEFAULT_HIST_HI, allow_negative_numbers = true)]
    range_hi: i32,
}

#[derive(Subcommand)]
enum Command {
    /// Hide a message file inside a cover JPEG.
    Embed {
        cover: PathBuf,
        message: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        flags: StegoFlags,
    },
    /// Recover the message from a stego JPEG.
    Extract {
        stego: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        flags: StegoFlags,
    },
    /// Compare a cover and stego image; writes cover_hist.csv and stego_hist.csv into OUT_DIR.
    Analyze {
        cover: PathBuf,
        stego: PathBuf,
        out_dir: PathBuf,
        #[command(flatten)]
        range: RangeFlags,
    },
    /// Sweep payload sizes over a directory of covers, adaptive vs fixed step.
    Experiment {
        corpus_dir: PathBuf,
        output_csv: PathBuf,
        /// Comma-separated embedded bit counts.
        #[arg(long, value_delimiter = ',', default_values_t = [10_000usize, 30_000, 50_000])]
        capacities: Vec<usize>,
        /// Step used by the fixed-step baseline.
        #[arg(long, default_value_t = 8)]
        fixed_q: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        flags: StegoFlags,
        #[command(flatten)]
        range: RangeFlags,
    },
    /// Parse and re-serialize a JPEG, checking that nothing changes.
    Recompress {
        input: PathBuf,
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Embed {
            cover,
            message,
            output,
            flags,
        } => commands::embed(&cover, &message, &output, &flags.params()?),
        Command::Extract {
            stego,
            output,
            flags,
        } => commands::extract(&stego, &output, &flags.params()?),
        Command::Analyze {
            cover,
            stego,
            out_dir,
            range,
        } => commands::analyze(&cover, &stego, &out_dir, range.range_lo, range.range_hi),
        Command::Experiment {
            corpus_dir,
            output_csv,
            capacities,
            fixed_q,
            seed,
            flags,
            range,
        } => {
            let settings = experiment::Settings {
                capacities,
                fixed_q: StepValue::new(fixed_q)?,
                seed,
                params: flags.params()?,
                lo: range.range_lo,
                hi: range.range_hi,
            };
            let rows = experiment::run(&corpus_dir, &settings)?;
            for row in &rows {
                if let RowOutcome::Skipped {
                    image_id,
                    capacity_bits,
                    reason,
                } = row
                {
                    eprintln!("warning: skipped {image_id} at {capacity_bits} bits: {reason}");
                }
            }
            let mut buf = Vec::new();
            experiment::write_csv(&mut buf, &rows, &settings)?;
            fs::write(&output_csv, buf).map_err(CliError::io(&output_csv))?;
            print!(
                "{}",
                experiment::report_summary(&rows, &settings.capacities)
            );
            if !rows.iter().any(|r| matches!(r, RowOutcome::Measured(_))) {
                return Err(CliError::Other("no images were processed".into()));
            }
            Ok(())
        }
        Command::Recompress { input, output } => commands::recompress(&input, output.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
