use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hashpim::crossbar::CrossbarConfig;
use hashpim::keccak::LayoutDump;
use hashpim::metrics::{MetricsInput, COMPETITORS};
use hashpim::reference;
use hashpim::HashPim;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod report;

use report::{MessageReport, MetricsSection, Packing, Report};

/// Hash messages with SHA3-256 on a simulated memristive crossbar and check
/// every digest against a software reference.
#[derive(Debug, Parser)]
#[command(name = "hashpim", version)]
struct Args {
    /// Message given as UTF-8 text (repeatable)
    #[arg(long, value_name = "TEXT")]
    text: Vec<String>,
    /// Message given as hex (repeatable)
    #[arg(long, value_name = "HEX")]
    hex: Vec<String>,
    /// Message read from a file (repeatable)
    #[arg(long, value_name = "PATH")]
    file: Vec<PathBuf>,
    /// Number of random messages to generate
    #[arg(long, value_name = "N")]
    random: Option<usize>,
    /// Length in bytes of each random message
    #[arg(long, value_name = "L", default_value_t = 136, requires = "random")]
    len: usize,
    /// Seed for random messages
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    /// Crossbars available
    #[arg(long, value_name = "N", default_value_t = 1)]
    crossbars: usize,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Partitions across a row
    #[arg(long)]
    hpart: Option<usize>,
    /// Partitions down a column
    #[arg(long)]
    vpart: Option<usize>,
    #[arg(long, value_name = "NS")]
    gate_delay_ns: Option<f64>,
    #[arg(long, value_name = "FJ")]
    gate_energy_fj: Option<f64>,
    /// Write one JSON line per cycle of the first crossbar
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Print throughput, power and area figures
    #[arg(long)]
    metrics: bool,
    /// Use the published latency and energy instead of measured values
    #[arg(long)]
    paper_constants: bool,
    /// Fail on reads of never-written cells
    #[arg(long)]
    strict_init: bool,
    /// Write the JSON report here
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Print the unit layout and constant blocks as JSON
    #[arg(long)]
    layout: bool,
    /// Hash the standard test vectors
    #[arg(long)]
    self_test: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    ReadFile {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed hex message {index}: {source}")]
    Hex {
        index: usize,
        source: hex::FromHexError,
    },
    #[error("nothing to do: give --text, --hex, --file, --random, --self-test, --layout or --paper-constants --metrics")]
    NoInput,
    #[error("cannot write {path}: {source}")]
    WriteFile {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Sim(#[from] hashpim::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::ReadFile { .. } | CliError::Hex { .. } | CliError::NoInput => 2,
            CliError::WriteFile { .. } => 4,
            CliError::Sim(_) => 3,
        }
    }
}

const SELF_TEST: [&str; 4] = [
    "",
    "abc",
    "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq",
    "abcdefghbcdefghicdefghijdefghijkefghijklfghijklmghijklmnhijklmnoijklmnopjklmnopqklmnopqrlmnopqrsmnopqrstnopqrstu",
];

fn config(args: &Args) -> CrossbarConfig {
    let mut c = CrossbarConfig::default();
    c.rows = args.rows.unwrap_or(c.rows);
    c.cols = args.cols.unwrap_or(c.cols);
    c.horizontal_partitions = args.hpart.unwrap_or(c.horizontal_partitions);
    c.vertical_partitions = args.vpart.unwrap_or(c.vertical_partitions);
    c.gate_delay_ns = args.gate_delay_ns.unwrap_or(c.gate_delay_ns);
    c.gate_energy_fj = args.gate_energy_fj.unwrap_or(c.gate_energy_fj);
    c.strict_init = args.strict_init;
    c
}

fn messages(args: &Args) -> Result<Vec<(String, Vec<u8>)>, CliError> {
    let mut out = Vec::new();
    if args.self_test {
        out.extend(
            SELF_TEST
                .iter()
                .map(|t| (format!("self-test {t:?}"), t.as_bytes().to_vec())),
        );
    }
    out.extend(
        args.text
            .iter()
            .map(|t| (format!("text {t:?}"), t.as_bytes().to_vec())),
    );
    for (index, h) in args.hex.iter().enumerate() {
        let bytes = hex::decode(h.trim()).map_err(|source| CliError::Hex { index, source })?;
        out.push((format!("hex[{index}]"), bytes));
    }
    for path in &args.file {
        let bytes = std::fs::read(path).map_err(|source| CliError::ReadFile {
            path: path.clone(),
            source,
        })?;
        out.push((format!("file {}", path.display()), bytes));
    }
    if let Some(n) = args.random {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        for i in 0..n {
            let m: Vec<u8> = (0..args.len).map(|_| rng.gen()).collect();
            out.push((format!("random[{i}]"), m));
        }
    }
    Ok(out)
}

fn create(path: &PathBuf) -> Result<File, CliError> {
    File::create(path).map_err(|source| CliError::WriteFile {
        path: path.clone(),
        source,
    })
}

fn print_metrics(m: &MetricsSection) {
    let r = &m.report;
    println!("metrics ({}):", m.source);
    println!(
        "  latency/round     {:.1} cycles",
        m.input.latency_round_cycles
    );
    println!("  energy/unit/round {:.4} nJ", m.input.energy_unit_j * 1e9);
    println!("  clock             {:.1} MHz", m.input.clock_hz / 1e6);
    println!(
        "  units x crossbars {} x {}",
        m.input.units_per_crossbar, m.input.crossbars
    );
    println!("  throughput        {:.2} Gbps", r.tput_system_bps / 1e9);
    println!("  power             {:.4} W", r.power_system_w);
    println!("  throughput/W      {:.1} Gbps/W", r.tput_per_watt / 1e9);
    println!("  throughput/area   {:.0} bps/F2", r.tput_per_area);
    for c in COMPETITORS {
        let per_watt = c
            .tput_per_watt_gbps
            .map_or("-".to_string(), |v| format!("{v}"));
        println!(
            "  [published] {:<10} {:>6} MHz {:>6} Gbps {:>5} Gbps/W {:>7} bps/F2",
            c.name, c.clock_mhz, c.tput_gbps, per_watt, c.tput_per_area
        );
    }
}

fn run(args: &Args) -> Result<bool, CliError> {
    let config = config(args);
    let hp = HashPim::new(config.clone())?;
    let inputs = messages(args)?;
    let metrics_only = args.metrics && args.paper_constants;
    if inputs.is_empty() && !metrics_only && !args.layout {
        return Err(CliError::NoInput);
    }
    if args.layout {
        let dump = serde_json::to_string_pretty(&LayoutDump::new(hp.geometry()))
            .expect("layout serializes");
        println!("{dump}");
    }
    if args.random.is_some() {
        println!("seed: {}", args.seed);
    }

    let bodies: Vec<&[u8]> = inputs.iter().map(|(_, m)| m.as_slice()).collect();
    let trace: Option<Box<dyn Write + Send>> = match &args.trace {
        Some(p) => Some(Box::new(BufWriter::new(create(p)?))),
        None => None,
    };
    let run = if bodies.is_empty() {
        None
    } else {
        Some(hp.hash_messages_traced(&bodies, args.crossbars, trace)?)
    };

    let mut all_ok = true;
    let mut message_reports = Vec::new();
    if let Some(run) = &run {
        for ((source, body), digest) in inputs.iter().zip(&run.digests) {
            let expected = hex::encode(reference::sha3_256(body));
            let ok = digest.to_hex() == expected;
            all_ok &= ok;
            println!("{digest}  {}  {source}", if ok { "OK" } else { "MISMATCH" });
            message_reports.push(MessageReport {
                source: source.clone(),
                bytes: body.len(),
                digest: digest.to_hex(),
                expected,
                ok,
            });
        }
    }

    let metrics = if args.paper_constants {
        Some(MetricsSection::new(
            "paper",
            MetricsInput::paper().with_crossbars(args.crossbars),
        )?)
    } else if let Some(input) = run
        .as_ref()
        .and_then(|r| report::measured_input(&hp, r, args.crossbars))
    {
        Some(MetricsSection::new("measured", input)?)
    } else {
        None
    };
    if args.metrics {
        if let Some(m) = &metrics {
            print_metrics(m);
        }
    }

    if let Some(path) = &args.report {
        let report = Report::new(
            config,
            args.random.map(|_| args.seed),
            message_reports,
            all_ok,
            Packing::new(&hp, bodies.len(), run.as_ref()),
            run.as_ref(),
            metrics,
        );
        let mut f = BufWriter::new(create(path)?);
        serde_json::to_writer_pretty(&mut f, &report)
            .map_err(std::io::Error::from)
            .and_then(|_| f.write_all(b"\n"))
            .and_then(|_| f.flush())
            .map_err(|source| CliError::WriteFile {
                path: path.clone(),
                source,
            })?;
    }
    Ok(all_ok)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: at least one digest does not match the reference");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
