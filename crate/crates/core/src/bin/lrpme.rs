use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lrpme::cluster::{make_schedule, pack_schedule, ClusterConfig, ExecMode};
use lrpme::perf::report::{
    a2a_rows, balance_rows, fft_rows, gflops_rows, scaling_rows, write_csv,
};
use lrpme::perf::DEFAULT_BALANCE_THRESHOLD;
use lrpme::verify::{fft_verify, pme_run, PmeRunOptions};
use lrpme::{AtomSet, Cell, Dims, Network, TopologyKind};

#[derive(Parser)]
#[command(name = "lrpme", version, about = "Long-range PME pipeline, distributed FFT simulator and timing model")]
struct Cli {
    /// Worker threads for the numeric kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ClusterArgs {
    #[arg(long, default_value_t = 1)]
    nodes: usize,
    /// Pipelines per node.
    #[arg(long, default_value_t = 1)]
    pipes: usize,
    #[arg(long, default_value = "switched", value_parser = parse_topology)]
    topology: TopologyKind,
    /// Run node exchanges on one thread per node.
    #[arg(long)]
    threaded: bool,
}

impl ClusterArgs {
    fn config(&self) -> ClusterConfig {
        ClusterConfig::new(self.nodes, self.pipes, self.topology)
    }

    fn mode(&self) -> ExecMode {
        if self.threaded {
            ExecMode::Threaded
        } else {
            ExecMode::Sequential
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Fft,
    A2a,
    Balance,
    Gflops,
    Scaling,
}

#[derive(Subcommand)]
enum Command {
    /// Check the 3D FFT against the direct DFT and the distributed transform.
    FftVerify {
        /// `N` for a cube or `NXxNYxNZ`; powers of two, at least 8.
        #[arg(long, value_parser = parse_dims)]
        dims: Dims,
        #[command(flatten)]
        cluster: ClusterArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Long-range forces for an atom file (`x y z q` per line).
    PmeRun {
        /// Atom file; omit to use a random neutral system.
        #[arg(long)]
        atoms: Option<PathBuf>,
        /// Atom count for a random system.
        #[arg(long, default_value_t = 64)]
        random: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_parser = parse_dims)]
        dims: Dims,
        /// Ewald splitting parameter; defaults to a grid-resolved value.
        #[arg(long)]
        beta: Option<f64>,
        /// Cubic box edge length.
        #[arg(long, default_value_t = 1.0)]
        box_length: f64,
        #[command(flatten)]
        cluster: ClusterArgs,
        /// Compare against the direct reciprocal-space sum.
        #[arg(long)]
        check: bool,
        /// Force output (`fx fy fz` per atom); standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the run report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Timing-model tables as CSV on standard output.
    PerfTable {
        #[arg(long, value_enum)]
        which: Table,
        #[arg(long, default_value_t = 78.0)]
        bandwidth_gbps: f64,
        #[arg(long, default_value_t = 300.0)]
        fmax_mhz: f64,
        #[arg(long, default_value_t = DEFAULT_BALANCE_THRESHOLD)]
        threshold: f64,
    },
    /// Print the round-robin all-to-all schedule.
    Schedule {
        #[arg(long)]
        nodes: usize,
        /// Payload per transfer in bytes.
        #[arg(long, default_value_t = 0)]
        bytes: u64,
        /// Also pack the schedule onto this network and report slot usage.
        #[arg(long, value_parser = parse_topology)]
        topology: Option<TopologyKind>,
    },
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    let parts: Vec<&str> = s.split('x').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("'{s}' is not N or NXxNYxNZ")))
        .collect::<Result<Vec<_>, _>>()?;
    let dims = match nums.as_slice() {
        [n] => Dims::cube(*n),
        [x, y, z] => Dims::new(*x, *y, *z),
        _ => return Err(format!("'{s}' is not N or NXxNYxNZ")),
    };
    dims.map_err(|e| e.to_string())
}

fn parse_topology(s: &str) -> Result<TopologyKind, String> {
    s.parse().map_err(|e: lrpme::Error| e.to_string())
}

fn run(cli: Cli) -> lrpme::Result<bool> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::FftVerify {
            dims,
            cluster,
            seed,
            json,
        } => {
            let report = fft_verify(dims, &cluster.config(), cluster.mode(), seed)?;
            if json {
                writeln!(out, "{}", report.to_json()?)?;
            } else {
                write!(out, "{}", report.check_lines())?;
                writeln!(
                    out,
                    "{}",
                    if report.passed() { "PASS" } else { "FAIL" }
                )?;
            }
            Ok(report.passed())
        }
        Command::PmeRun {
            atoms,
            random,
            seed,
            dims,
            beta,
            box_length,
            cluster,
            check,
            out: out_path,
            report: report_path,
        } => {
            let set = match atoms {
                Some(p) => AtomSet::parse(&fs::read_to_string(&p)?)?,
                None => AtomSet::random_neutral(random, seed)?,
            };
            let opts = PmeRunOptions {
                dims,
                beta,
                cell: Cell::cubic(box_length)?,
                config: cluster.config(),
                mode: cluster.mode(),
                check,
            };
            let (result, report) = pme_run(&set, &opts)?;
            match out_path {
                Some(p) => fs::write(p, result.forces.to_text())?,
                None => write!(out, "{}", result.forces.to_text())?,
            }
            if let Some(p) = report_path {
                fs::write(p, report.to_json()?)?;
            }
            eprintln!("energy {:.12e}", result.energy);
            eprint!("{}", report.check_lines());
            Ok(report.passed())
        }
        Command::PerfTable {
            which,
            bandwidth_gbps,
            fmax_mhz,
            threshold,
        } => {
            let bw = bandwidth_gbps * 1e9;
            let fmax = fmax_mhz * 1e6;
            match which {
                Table::Fft => write_csv(&mut out, &fft_rows(fmax))?,
                Table::A2a => write_csv(&mut out, &a2a_rows(bw)?)?,
                Table::Balance => write_csv(&mut out, &balance_rows(fmax, bw, threshold)?)?,
                Table::Gflops => write_csv(&mut out, &gflops_rows())?,
                Table::Scaling => write_csv(&mut out, &scaling_rows(bw)?)?,
            }
            Ok(true)
        }
        Command::Schedule {
            nodes,
            bytes,
            topology,
        } => {
            if nodes == 0 {
                return Err(lrpme::Error::InvalidParameter("nodes must be >= 1".into()));
            }
            let s = lrpme::cluster::schedule::make_schedule_with_payload(nodes, bytes);
            write!(out, "{}", s.dump())?;
            s.validate()?;
            if let Some(kind) = topology {
                let packed = pack_schedule(&make_schedule(nodes), &Network::new(kind, nodes)?, 1)?;
                eprintln!(
                    "makespan {} slots, busiest link {} slots, mean hops {:.3}, max buffer {}",
                    packed.makespan_slots,
                    packed.busiest_link_slots,
                    packed.mean_hops,
                    packed.max_buffer_occupancy
                );
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
