use std::collections::hash_map::RandomState;
use std::fs;
use std::hash::{BuildHasher, Hasher};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fractal_lab::dimension::{default_fit_range, estimate_dimension, threshold_profile, DimensionEstimate};
use fractal_lab::experiments::{self, ExperimentConfig, ExperimentKind};
use fractal_lab::walk::{write_stat_rows, WalkStatRow};
use fractal_lab::{cantor_set, frostman_cascade, sample_walk, CantorSpec, GridSet, LatticePoint};

#[derive(Parser)]
#[command(name = "fractal-lab", version, about = "Finite-scale Hausdorff dimension toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a digit-restricted Cantor set and write it as a GridSet.
    Cantor(CantorArgs),
    /// Fit the log-log dimension of a GridSet.
    Dim(DimArgs),
    /// Build the cascade measure of a GridSet.
    Frostman(FrostmanArgs),
    /// Sample a random walk.
    Walk(WalkArgs),
    /// Local time and Perkins ratio of a sampled walk.
    Localtime(LocaltimeArgs),
    /// Run a replicated experiment.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct CantorArgs {
    #[arg(long, default_value_t = 3)]
    base: u32,
    /// Comma-separated kept digits.
    #[arg(long, value_delimiter = ',', default_value = "0,2")]
    kept: Vec<u32>,
    #[arg(long)]
    depth: u32,
    /// Output path; `.bin` selects the compact binary form, anything else JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DimArgs {
    /// GridSet file (JSON or binary).
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    lo: Option<u32>,
    #[arg(long)]
    hi: Option<u32>,
    /// Also print the cover sums at the finest level for these exponents.
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    /// Write the estimate; `.csv` selects the CSV row form, anything else JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FrostmanArgs {
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    alpha: f64,
    /// Measure JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of `level,cell_index,mass`.
    #[arg(long)]
    cells: Option<PathBuf>,
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long)]
    steps_log2: u32,
    #[arg(long)]
    seed: Option<u64>,
    /// Binary walk file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of per-walk statistics.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct LocaltimeArgs {
    #[arg(long)]
    steps_log2: u32,
    #[arg(long)]
    seed: Option<u64>,
    /// Level in lattice units of √Δt.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    x: i64,
    /// Time horizon in steps; defaults to N.
    #[arg(long)]
    t_cells: Option<u64>,
    /// Neighbourhood widths for the Perkins ratio.
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    ZeroSetDim,
    Doubling,
    Perkins,
    LevyIdentity,
    CantorExact,
}

impl From<KindArg> for ExperimentKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::ZeroSetDim => ExperimentKind::ZeroSetDim,
            KindArg::Doubling => ExperimentKind::Doubling,
            KindArg::Perkins => ExperimentKind::Perkins,
            KindArg::LevyIdentity => ExperimentKind::LevyIdentity,
            KindArg::CantorExact => ExperimentKind::CantorExact,
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config JSON. Cannot be combined with the flags it defines.
    #[arg(long, conflicts_with_all = ["kind", "steps_log2", "replicas", "seed"])]
    config: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "config")]
    kind: Option<KindArg>,
    #[arg(long)]
    steps_log2: Option<u32>,
    #[arg(long)]
    replicas: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for replicas.
    #[arg(long, env = "FRACTAL_LAB_JOBS")]
    jobs: Option<usize>,
    /// Shrink to a quick run (m <= 10, at most 5 replicas).
    #[arg(long)]
    smoke: bool,
    /// Output directory for `<kind>.csv` and `<kind>.json`.
    #[arg(long)]
    out: PathBuf,
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let mut h = RandomState::new().build_hasher();
        h.write_u128(
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_nanos())
                .unwrap_or_default(),
        );
        let seed = h.finish();
        eprintln!("seed: {seed}");
        seed
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn read_set(path: &Path) -> Result<GridSet> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let set = if bytes.first() == Some(&b'{') {
        serde_json::from_slice(&bytes)?
    } else {
        GridSet::from_bytes(&bytes)?
    };
    Ok(set)
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

fn cmd_cantor(args: CantorArgs) -> Result<()> {
    let spec = CantorSpec::new(args.base, args.kept, args.depth)?;
    let set = cantor_set(&spec)?;
    let bytes = if has_extension(&args.out, "bin") {
        set.to_bytes()
    } else {
        serde_json::to_vec(&set)?
    };
    write_file(&args.out, &bytes)?;
    println!("cells {}", set.len());
    println!("similarity_dimension {:.6}", spec.similarity_dimension());
    Ok(())
}

fn cmd_dim(args: DimArgs) -> Result<()> {
    let set = read_set(&args.set)?;
    let (default_lo, default_hi) = default_fit_range(set.depth());
    let (lo, hi) = (args.lo.unwrap_or(default_lo), args.hi.unwrap_or(default_hi));
    let est = estimate_dimension(&set.scale_counts(), lo, hi)?;
    println!("slope {:.6}", est.slope);
    println!("intercept {:.6}", est.intercept);
    println!("rms_residual {:.3e}", est.rms_residual);
    println!("levels {}..={} ({} points)", est.level_lo, est.level_hi, est.points_used);
    if !est.is_plausible() {
        eprintln!("warning: slope {} lies outside [0, 1]", est.slope);
    }
    if !args.beta.is_empty() {
        let profile = threshold_profile(&set, &args.beta)?;
        for (beta, sum) in profile.betas.iter().zip(&profile.sums) {
            println!("cover_sum beta={beta} {sum:.6e}");
        }
    }
    if let Some(out) = &args.out {
        let bytes = if has_extension(out, "csv") {
            format!("{}\n{}\n", DimensionEstimate::CSV_HEADER, est.csv_row()).into_bytes()
        } else {
            json_bytes(&est)?
        };
        write_file(out, &bytes)?;
    }
    Ok(())
}

fn cmd_frostman(args: FrostmanArgs) -> Result<()> {
    let set = read_set(&args.set)?;
    let measure = frostman_cascade(&set, args.alpha)?;
    println!("frostman_constant {:.6}", measure.frostman_constant());
    println!("observed_constant {:.6}", measure.verify_frostman());
    if measure.is_degenerate() {
        eprintln!("warning: constant exceeds 1e6; no useful Frostman measure at this alpha");
    }
    if let Some(out) = &args.out {
        write_file(out, &json_bytes(&measure)?)?;
    }
    if let Some(path) = &args.cells {
        let mut buf = Vec::new();
        measure.write_cell_csv(&mut buf)?;
        write_file(path, &buf)?;
    }
    Ok(())
}

fn cmd_walk(args: WalkArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let walk = sample_walk(args.steps_log2, seed)?;
    let n = walk.steps();
    let stats = [
        ("final_value", walk.value(n as usize)),
        ("running_max", f64::from(*walk.running_max().last().unwrap_or(&0)) * walk.space_step()),
        ("local_time_0", walk.local_time(n, LatticePoint::ZERO)?),
        ("zero_count", walk.level_set(LatticePoint::ZERO).len() as f64),
        ("record_count", walk.record_times().len() as f64),
    ];
    for (name, value) in &stats {
        println!("{name} {value}");
    }
    if let Some(out) = &args.out {
        write_file(out, &walk.to_bytes())?;
    }
    if let Some(path) = &args.stats {
        let rows: Vec<WalkStatRow> = stats
            .iter()
            .map(|(name, value)| WalkStatRow {
                replica: 0,
                seed,
                statistic: (*name).to_string(),
                value: *value,
            })
            .collect();
        let mut buf = Vec::new();
        write_stat_rows(&mut buf, &rows)?;
        write_file(path, &buf)?;
    }
    Ok(())
}

fn cmd_localtime(args: LocaltimeArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let walk = sample_walk(args.steps_log2, seed)?;
    let t = args.t_cells.unwrap_or(walk.steps());
    let x = LatticePoint::new(args.x);
    println!("local_time {}", walk.local_time(t, x)?);
    for &delta in &args.delta {
        println!("occupation_lambda delta={delta} {}", walk.occupation_lambda(t, x, delta)?);
        println!("perkins_ratio delta={delta} {}", walk.perkins_ratio(t, x, delta)?);
    }
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let mut config = match (&args.config, args.kind) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<ExperimentConfig>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, Some(kind)) => {
            let mut cfg = ExperimentConfig::preset(kind.into(), resolve_seed(args.seed));
            if let Some(m) = args.steps_log2 {
                cfg.steps_log2 = m;
            }
            if let Some(r) = args.replicas {
                cfg.replicas = r;
            }
            cfg
        }
        (None, None) => bail!("either --config or --kind is required"),
    };
    if args.smoke {
        config = config.smoke();
    }
    let report = experiments::run(&config, args.jobs)?;
    let (csv, json) = report.save(&args.out)?;
    for (name, value) in &report.summary {
        println!("{name} {value}");
    }
    println!("rows_used {} rows_flagged {}", report.rows_used, report.rows_flagged);
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Cantor(a) => cmd_cantor(a),
        Command::Dim(a) => cmd_dim(a),
        Command::Frostman(a) => cmd_frostman(a),
        Command::Walk(a) => cmd_walk(a),
        Command::Localtime(a) => cmd_localtime(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
