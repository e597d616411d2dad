use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use aoc_core::timing::{
    ack_duration_ms, fdma_round_ms, idealized_timing, status_duration_ms, tdma_slot_ms,
};
use aoc_core::{
    emit_rows, load_per_table, run_order_study, run_sweep, Mode, PerTable, PerVector, PhyProfile,
    SchemeKind, SweepRow, TimingModel, TransmissionOrder,
};

#[derive(Parser)]
#[command(name = "aoc", version, about = "Average Age of Collection for TDMA-NR, TDMA-R and FDMA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form average AoC for every scheme and SNR point
    Theory {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        timing: TimingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulated average AoC with batch-means confidence half-widths
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        timing: TimingArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Theory and simulation rows side by side
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        timing: TimingArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// TDMA transmission-order study
    Orders {
        #[command(flatten)]
        input: InputArgs,
        /// Semicolon-separated device orders, e.g. "1,2,3,4,5,6;6,1,2,3,4,5".
        /// Defaults to the three six-device study orders.
        #[arg(long)]
        orders: Option<String>,
        /// Skip the simulation rows
        #[arg(long)]
        theory_only: bool,
        #[command(flatten)]
        timing: TimingArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Slot and round durations from PHY parameters
    Timing {
        #[command(flatten)]
        phy: PhyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// PER table with header snr_db,scheme,device_id,per
    #[arg(long, conflicts_with = "p")]
    per_table: Option<PathBuf>,
    /// Number of devices; replicates a single --p value
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated per-device PERs
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    p: Option<Vec<f64>>,
}

#[derive(Args)]
struct TimingArgs {
    /// TDMA slot duration in ms (default: derived from the default PHY profile)
    #[arg(long)]
    t_td: Option<f64>,
    /// FDMA round duration in ms (default: derived from the default PHY profile)
    #[arg(long, conflicts_with = "idealized")]
    t_fd: Option<f64>,
    /// Overhead-free timing: one FDMA round lasts N TDMA slots
    #[arg(long)]
    idealized: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Simulation horizon in slots (TDMA) or rounds (FDMA)
    #[arg(long, default_value_t = 1_000_000)]
    horizon: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PhyArgs {
    #[arg(long)]
    bandwidth_hz: Option<f64>,
    #[arg(long)]
    preamble_samples: Option<u32>,
    #[arg(long)]
    payload_bits: Option<u32>,
    #[arg(long)]
    code_rate_inv: Option<u32>,
    #[arg(long)]
    fft_size: Option<u32>,
    #[arg(long)]
    cp_samples: Option<u32>,
    #[arg(long)]
    gi_ms: Option<f64>,
    #[arg(long)]
    ack_payload_bits: Option<u32>,
    /// Data subcarriers of a TDMA packet
    #[arg(long)]
    tdma_subcarriers: Option<u32>,
    /// Data subcarriers of one FDMA sub-channel
    #[arg(long)]
    fdma_subcarriers: Option<u32>,
    #[arg(long)]
    devices: Option<u32>,
}

impl InputArgs {
    fn per_vector(&self) -> Result<PerVector> {
        let probs = self.p.clone().ok_or_else(|| anyhow!("--p is required"))?;
        let probs = match (self.n, probs.len()) {
            (Some(n), 1) => vec![probs[0]; n],
            (Some(n), len) if n != len => bail!("--n {n} disagrees with {len} --p values"),
            _ => probs,
        };
        Ok(PerVector::new(probs)?)
    }

    fn table(&self) -> Result<PerTable> {
        match &self.per_table {
            Some(path) => {
                load_per_table(path).with_context(|| format!("loading {}", path.display()))
            }
            None => Ok(PerTable::single(0.0, &self.per_vector()?, &SchemeKind::ALL)),
        }
    }
}

impl TimingArgs {
    fn model(&self, devices: usize) -> Result<TimingModel> {
        let t_td = self
            .t_td
            .unwrap_or_else(|| tdma_slot_ms(&PhyProfile::tdma_default()));
        if self.idealized {
            return Ok(idealized_timing(devices, t_td)?);
        }
        let t_fd = self
            .t_fd
            .unwrap_or_else(|| fdma_round_ms(&PhyProfile::fdma_default()));
        Ok(TimingModel::new(t_td, t_fd)?)
    }
}

impl PhyArgs {
    fn profiles(&self) -> Result<(PhyProfile, PhyProfile)> {
        let mut tdma = PhyProfile::tdma_default();
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { tdma.$field = v; })* };
        }
        set!(bandwidth_hz, preamble_samples, payload_bits, code_rate_inv, fft_size, cp_samples, gi_ms, ack_payload_bits);
        if let Some(d) = self.devices {
            tdma.num_devices = d;
        }
        let mut fdma = PhyProfile {
            data_subcarriers: PhyProfile::fdma_default().data_subcarriers,
            ..tdma.clone()
        };
        if let Some(s) = self.tdma_subcarriers {
            tdma.data_subcarriers = s;
        }
        if let Some(s) = self.fdma_subcarriers {
            fdma.data_subcarriers = s;
        }
        tdma.validate()?;
        fdma.validate()?;
        Ok((tdma, fdma))
    }
}

fn table_devices(table: &PerTable) -> Result<usize> {
    let mut sizes = table.iter().map(|(_, _, p)| p.len());
    let first = sizes.next().ok_or_else(|| anyhow!("PER table is empty"))?;
    if sizes.any(|n| n != first) {
        bail!("--idealized needs the same device count at every table entry");
    }
    Ok(first)
}

fn parse_orders(spec: &str) -> Result<Vec<TransmissionOrder>> {
    spec.split(';')
        .map(|chunk| {
            let ids = chunk
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .with_context(|| format!("invalid order '{chunk}'"))?;
            Ok(TransmissionOrder::from_one_based(&ids)?)
        })
        .collect()
}

fn open_output(out: &OutputArgs) -> Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_rows(rows: &[SweepRow], out: &OutputArgs) -> Result<()> {
    emit_rows(rows, open_output(out)?).context("writing rows")
}

fn sweep(input: &InputArgs, timing: &TimingArgs, modes: &[Mode], run: Option<&RunArgs>) -> Result<Vec<SweepRow>> {
    let table = input.table()?;
    let devices = if timing.idealized { table_devices(&table)? } else { 0 };
    let model = timing.model(devices)?;
    let (horizon, seed) = run.map_or((1, 0), |r| (r.horizon, r.seed));
    Ok(run_sweep(&table, &model, modes, horizon, seed)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Theory { input, timing, output } => {
            write_rows(&sweep(&input, &timing, &[Mode::Theory], None)?, &output)
        }
        Command::Simulate { input, timing, run, output } => {
            write_rows(&sweep(&input, &timing, &[Mode::Simulation], Some(&run))?, &output)
        }
        Command::Sweep { input, timing, run, output } => write_rows(
            &sweep(&input, &timing, &[Mode::Theory, Mode::Simulation], Some(&run))?,
            &output,
        ),
        Command::Orders { input, orders, theory_only, timing, run, output } => {
            let p = input.per_vector()?;
            let orders = match orders {
                Some(spec) => parse_orders(&spec)?,
                None if p.len() == 6 => TransmissionOrder::study_orders().to_vec(),
                None => bail!("--orders is required unless there are exactly 6 devices"),
            };
            let modes: &[Mode] = if theory_only {
                &[Mode::Theory]
            } else {
                &[Mode::Theory, Mode::Simulation]
            };
            let model = timing.model(p.len())?;
            let rows = run_order_study(&p, &orders, &model, modes, run.horizon, run.seed)?;
            write_rows(&rows, &output)
        }
        Command::Timing { phy, output } => {
            let (tdma, fdma) = phy.profiles()?;
            let mut w = open_output(&output)?;
            writeln!(w, "quantity,ms")?;
            for (name, v) in [
                ("tdma_status", status_duration_ms(&tdma)),
                ("tdma_ack", ack_duration_ms(&tdma)),
                ("tdma_slot", tdma_slot_ms(&tdma)),
                ("fdma_status", status_duration_ms(&fdma)),
                ("fdma_round", fdma_round_ms(&fdma)),
                ("idealized_fdma_round", tdma.num_devices as f64 * tdma_slot_ms(&tdma)),
            ] {
                writeln!(w, "{name},{}", aoc_core::sweep::format_sig6(v))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
