use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use avauction_core::{
    generate_batch, solve_wdp, validate_instance, AuctionInstance, AvailabilityLaw, CostLaw,
    GenerationLaw, Pivot, ServiceType, SolveOutcome,
};
use avauction_harness::studies::{
    run_asymptoticity_study, run_charge_study, run_servability_study, run_timing_study,
    run_truthfulness_study,
};
use avauction_harness::{
    parse_instance, write_instance, ChargeMode, ExperimentConfig, ResultTable,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_UNSERVABLE: u8 = 2;
const EXIT_PARSE: u8 = 64;
const EXIT_INVALID: u8 = 65;
const EXIT_IO: u8 = 74;
const EXIT_STUDY: u8 = 70;

#[derive(Parser)]
#[command(
    name = "avauction",
    version,
    about = "Seat auctions for shared autonomous vehicles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the winner-determination problem of an instance file.
    Solve(InstanceArgs),
    /// Compute VCG charges for an instance file.
    Charge(InstanceArgs),
    /// Write generated instances to a directory.
    Gen(GenArgs),
    /// Run a Monte-Carlo study and write its CSV tables.
    Study(StudyArgs),
}

#[derive(Args)]
struct InstanceArgs {
    file: PathBuf,
    /// Override the service type declared in the file.
    #[arg(long, value_enum)]
    service: Option<ServiceArg>,
    /// Solve the exclusion problems on the thread pool.
    #[arg(long)]
    concurrent: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 20_240_501)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 5)]
    capacity: u32,
    #[arg(long, default_value_t = 1)]
    cases: usize,
    #[arg(long, default_value_t = 1)]
    requested_seats: u32,
    #[arg(long, value_enum, default_value_t = ServiceArg::Splittable)]
    service: ServiceArg,
    #[arg(long, value_enum, default_value_t = LawArg::Large)]
    law: LawArg,
    #[arg(long, default_value_t = GenerationLaw::DEFAULT_CONCAVITY)]
    gamma: f64,
    /// Draw empty vehicles with this probability instead of uniform seats.
    #[arg(long, value_name = "P")]
    empty_vehicle: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(value_enum)]
    study: StudyKind,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cases: Option<usize>,
    /// Comma-separated bidder counts.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    law: Option<LawArg>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Draw empty vehicles with this probability instead of uniform seats.
    #[arg(long, value_name = "P")]
    empty_vehicle: Option<f64>,
    #[arg(long, value_enum)]
    parallel: Option<Switch>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ServiceArg {
    Splittable,
    #[value(alias = "nonsplittable")]
    NonSplittable,
    Private,
}

impl From<ServiceArg> for ServiceType {
    fn from(s: ServiceArg) -> Self {
        match s {
            ServiceArg::Splittable => ServiceType::Splittable,
            ServiceArg::NonSplittable => ServiceType::NonSplittable,
            ServiceArg::Private => ServiceType::Private,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    Large,
    Small,
}

impl From<LawArg> for CostLaw {
    fn from(l: LawArg) -> Self {
        match l {
            LawArg::Large => CostLaw::LargeVariation,
            LawArg::Small => CostLaw::SmallVariation,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyKind {
    Servability,
    Charges,
    Truthfulness,
    Asymptoticity,
    Timing,
    All,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve(&args),
        Command::Charge(args) => charge(&args),
        Command::Gen(args) => generate(&args),
        Command::Study(args) => study(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("avauction: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(args: &InstanceArgs) -> Result<AuctionInstance, Failure> {
    let text = fs::read_to_string(&args.file)
        .map_err(|e| fail(EXIT_IO, format!("{}: {e}", args.file.display())))?;
    let mut raw = parse_instance(&text)
        .map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", args.file.display())))?
        .instance;
    if let Some(s) = args.service {
        raw.service = s.into();
    }
    validate_instance(raw).map_err(|e| fail(EXIT_INVALID, format!("{}: {e}", args.file.display())))
}

fn solve(args: &InstanceArgs) -> Result<u8, Failure> {
    let inst = load(args)?;
    match solve_wdp(&inst) {
        SolveOutcome::Unservable => {
            println!("unservable");
            Ok(EXIT_UNSERVABLE)
        }
        SolveOutcome::Served(a) => {
            let mut line = String::new();
            for w in a.assignments() {
                line += &format!("winner {} size {} ", w.bidder, w.seats);
            }
            println!("{line}total {}", a.total_bid());
            Ok(0)
        }
    }
}

fn charge(args: &InstanceArgs) -> Result<u8, Failure> {
    let inst = load(args)?;
    if !avauction_core::feasibility(&inst).get(inst.service()) {
        println!("unservable");
        return Ok(EXIT_UNSERVABLE);
    }
    let mode = if args.concurrent {
        ChargeMode::Concurrent
    } else {
        ChargeMode::Sequential
    };
    let report = mode.charges(&inst).map_err(|e| fail(EXIT_STUDY, e))?;
    println!("optimum {}", report.optimum());
    for entry in report.per_bidder() {
        let pivotal = match entry.pivotal {
            Pivot::Value(v) => v.to_string(),
            Pivot::Infeasible => "infeasible".to_string(),
        };
        println!(
            "charge {} pivotal {} charge {}",
            entry.bidder, pivotal, entry.charge
        );
    }
    println!("total {}", report.total_charge());
    println!("fallback {}", report.fallback());
    Ok(0)
}

fn availability(empty_vehicle: Option<f64>) -> AvailabilityLaw {
    match empty_vehicle {
        Some(probability) => AvailabilityLaw::EmptyVehicle { probability },
        None => AvailabilityLaw::Uniform,
    }
}

fn generate(args: &GenArgs) -> Result<u8, Failure> {
    let law = GenerationLaw {
        concavity: args.gamma,
        availability: availability(args.empty_vehicle),
        ..GenerationLaw::new(args.law.into(), args.seed)
    };
    let batch = generate_batch(law, args.k, args.capacity, args.cases)
        .map_err(|e| fail(EXIT_INVALID, e))?;
    fs::create_dir_all(&args.out).map_err(|e| fail(EXIT_IO, e))?;
    let service: ServiceType = args.service.into();
    let digest = hex::encode(batch.digest());
    for case in 0..batch.case_count() {
        let inst = batch
            .instance(case, args.requested_seats, service)
            .map_err(|e| fail(EXIT_INVALID, e))?;
        let provenance = format!(
            "seed={} law={} gamma={} k={} case={} batch={}",
            args.seed,
            law.cost.as_str(),
            args.gamma,
            args.k,
            case,
            &digest[..16]
        );
        let path = args.out.join(format!("k{}-case{:03}.txt", args.k, case));
        fs::write(&path, write_instance(&inst, Some(&provenance)))
            .map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(0)
}

fn study(args: &StudyArgs) -> Result<u8, Failure> {
    let mut config = ExperimentConfig::default();
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    }
    if let Some(cases) = args.cases {
        config.cases = cases;
    }
    if let Some(k) = &args.k {
        config.scenario_sizes = k.clone();
    }
    if let Some(law) = args.law {
        config.cost_law = law.into();
    }
    if let Some(gamma) = args.gamma {
        config.concavity = gamma;
    }
    if args.empty_vehicle.is_some() {
        config.availability = availability(args.empty_vehicle);
    }
    if let Some(p) = args.parallel {
        config.parallel = matches!(p, Switch::On);
    }
    config.validate().map_err(|e| fail(EXIT_INVALID, e))?;

    let kinds: &[StudyKind] = match args.study {
        StudyKind::All => &[
            StudyKind::Servability,
            StudyKind::Charges,
            StudyKind::Truthfulness,
            StudyKind::Asymptoticity,
            StudyKind::Timing,
        ],
        ref one => std::slice::from_ref(one),
    };
    for kind in kinds {
        let err = |e| fail(EXIT_STUDY, e);
        let tables = match kind {
            StudyKind::Servability => vec![run_servability_study(&config).map_err(err)?.table()],
            StudyKind::Charges => vec![run_charge_study(&config).map_err(err)?.table()],
            StudyKind::Truthfulness => {
                let r = run_truthfulness_study(&config).map_err(err)?;
                vec![r.winner_table(), r.run_table()]
            }
            StudyKind::Asymptoticity => {
                vec![run_asymptoticity_study(&config).map_err(err)?.table()]
            }
            StudyKind::Timing => vec![run_timing_study(&config).map_err(err)?.table()],
            StudyKind::All => unreachable!(),
        };
        for t in tables {
            write_table(&t, &config.out_dir)?;
        }
    }
    Ok(0)
}

fn write_table(table: &ResultTable, dir: &Path) -> Result<(), Failure> {
    let path = table.write_to(dir).map_err(|e| fail(EXIT_IO, e))?;
    println!("{}", path.display());
    Ok(())
}
