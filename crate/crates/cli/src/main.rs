//! `bandsel`: band selection, classification and sweeps over ENVI cubes.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bandsel_core::cube::{GroundTruth, HyperCube};
use bandsel_core::io::report::{load_trace_bands, write_trace};
use bandsel_core::io::{load_envi, load_labels, save_envi, synth_cube, write_atomic, Interleave, SynthSpec};
use bandsel_core::io::envi::write_label_raster;
use bandsel_core::pipeline::{classify_bands, run_selection, sweep, sweep_csv, RunOutcome, RunSettings};
use bandsel_core::select::Method;
use bandsel_core::svm::SvmParams;

#[derive(Parser)]
#[command(name = "bandsel", version, about = "Hyperspectral band selection and SVM classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Greedy band selection; writes trace.txt and trace.json.
    Select(SelectArgs),
    /// Select (or read) bands, train the SVM and write report, map and model.
    Classify(ClassifyArgs),
    /// Classify every (method, k) cell and write sweep.csv plus per-cell reports.
    Sweep(SweepArgs),
    /// Write a synthetic cube and label raster.
    Synth(SynthArgs),
}

#[derive(Args)]
struct DataArgs {
    /// ENVI cube (data file or .hdr).
    #[arg(long, env = "BANDSEL_CUBE")]
    cube: PathBuf,
    /// Ground truth: ENVI label raster or CSV of row,col,label.
    #[arg(long, env = "BANDSEL_LABELS")]
    labels: PathBuf,
    /// Dataset name for reports; defaults to the cube file stem.
    #[arg(long, env = "BANDSEL_DATASET")]
    dataset: Option<String>,
    /// Output directory.
    #[arg(long, env = "BANDSEL_OUT", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SelectionArgs {
    /// Quantization levels per band.
    #[arg(long, env = "BANDSEL_LEVELS", default_value_t = bandsel_core::select::DEFAULT_LEVELS)]
    levels: usize,
    /// Redundancy weight for MIFS and NMIFS.
    #[arg(long, env = "BANDSEL_BETA", default_value_t = bandsel_core::select::DEFAULT_BETA)]
    beta: f64,
    /// MIBF interaction threshold.
    #[arg(long, env = "BANDSEL_THRESHOLD", default_value_t = bandsel_core::select::DEFAULT_THRESHOLD, allow_hyphen_values = true)]
    threshold: f64,
}

#[derive(Args)]
struct TrainingArgs {
    /// Fraction of each class's labeled pixels used for training.
    #[arg(long, env = "BANDSEL_TRAIN_FRAC", default_value_t = 0.5)]
    train_frac: f64,
    #[arg(long, env = "BANDSEL_SEED", default_value_t = 0)]
    seed: u64,
    /// SVM box constraint.
    #[arg(long, env = "BANDSEL_SVM_C", default_value_t = 100.0)]
    svm_c: f64,
    /// RBF width; defaults to 1/(d * mean feature variance).
    #[arg(long, env = "BANDSEL_SVM_GAMMA")]
    svm_gamma: Option<f64>,
    /// Choose C and gamma by 5-fold cross-validation on the training pixels.
    #[arg(long, env = "BANDSEL_GRID_SEARCH")]
    grid_search: bool,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, env = "BANDSEL_METHOD", value_parser = parse_method)]
    method: Method,
    #[arg(long, env = "BANDSEL_K")]
    k: usize,
    #[command(flatten)]
    selection: SelectionArgs,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, env = "BANDSEL_METHOD", value_parser = parse_method, required_unless_present_any = ["trace", "all_bands"])]
    method: Option<Method>,
    #[arg(long, env = "BANDSEL_K", required_unless_present_any = ["trace", "all_bands"])]
    k: Option<usize>,
    /// Use the bands listed in an existing trace (text or JSON).
    #[arg(long, env = "BANDSEL_TRACE", conflicts_with_all = ["method", "all_bands"])]
    trace: Option<PathBuf>,
    /// Classify with every band of the cube.
    #[arg(long, env = "BANDSEL_ALL_BANDS", conflicts_with = "method")]
    all_bands: bool,
    #[command(flatten)]
    selection: SelectionArgs,
    #[command(flatten)]
    training: TrainingArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Comma-separated selection methods.
    #[arg(long, env = "BANDSEL_METHODS", value_delimiter = ',', value_parser = parse_method, required = true)]
    methods: Vec<Method>,
    /// Comma-separated band counts.
    #[arg(long, env = "BANDSEL_K_LIST", value_delimiter = ',', required = true)]
    k_list: Vec<usize>,
    #[command(flatten)]
    selection: SelectionArgs,
    #[command(flatten)]
    training: TrainingArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Synergy pair whose XOR is the class.
    Xor,
    /// One planted band among noise.
    Informative,
    /// Every band separates the classes.
    Separable,
    /// Informative bands followed by exact copies.
    Redundancy,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    preset: Preset,
    #[arg(long, env = "BANDSEL_SEED", default_value_t = 0)]
    seed: u64,
    /// Output directory; receives cube.raw/.hdr and labels.raw/.hdr.
    #[arg(long, env = "BANDSEL_OUT", default_value = ".")]
    out: PathBuf,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

struct Dataset {
    name: String,
    cube: HyperCube,
    gt: GroundTruth,
}

fn load(data: &DataArgs) -> Result<Dataset> {
    let cube = load_envi(&data.cube).with_context(|| format!("reading --cube {}", data.cube.display()))?;
    let gt = load_labels(&data.labels, cube.rows(), cube.cols())
        .with_context(|| format!("reading --labels {}", data.labels.display()))?;
    let name = data.dataset.clone().unwrap_or_else(|| {
        data.cube
            .file_stem()
            .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned())
    });
    std::fs::create_dir_all(&data.out).with_context(|| format!("creating --out {}", data.out.display()))?;
    Ok(Dataset { name, cube, gt })
}

fn settings(selection: &SelectionArgs, training: Option<&TrainingArgs>) -> RunSettings {
    let mut s = RunSettings {
        levels: selection.levels,
        beta: selection.beta,
        threshold: selection.threshold,
        ..RunSettings::default()
    };
    if let Some(t) = training {
        s.fraction = t.train_frac;
        s.seed = t.seed;
        s.svm = SvmParams {
            c: t.svm_c,
            gamma: t.svm_gamma,
            ..SvmParams::default()
        };
        s.grid_search = t.grid_search;
    }
    s
}

fn write_outcome(dir: &Path, stem: &str, outcome: &RunOutcome, gt: &GroundTruth) -> Result<()> {
    outcome.report.write(&dir.join(format!("{stem}.json")))?;
    log::info!(
        "{} k={} OA={:.4} AA={:.4} kappa={:.4}",
        outcome.report.method,
        outcome.report.k,
        outcome.report.metrics.oa.0,
        outcome.report.metrics.aa.0,
        outcome.report.metrics.kappa.0
    );
    write_atomic(&dir.join(format!("{}.ppm", stem.replacen("report", "map", 1))), &outcome.map(gt)?)?;
    Ok(())
}

fn cmd_select(args: &SelectArgs) -> Result<()> {
    let d = load(&args.data)?;
    let s = settings(&args.selection, None);
    let (trace, ms) = run_selection(&d.cube, &d.gt, args.method, args.k, &s)?;
    write_trace(&args.data.out, "trace", &trace)?;
    log::info!("selected {} bands with {} in {ms:.1} ms", trace.len(), args.method);
    for band in trace.bands() {
        println!("{band}");
    }
    Ok(())
}

fn cmd_classify(args: &ClassifyArgs) -> Result<()> {
    let d = load(&args.data)?;
    let s = settings(&args.selection, Some(&args.training));
    let (label, bands, ms) = if args.all_bands {
        ("all".to_string(), (0..d.cube.bands()).collect(), 0.0)
    } else if let Some(path) = &args.trace {
        let bands = load_trace_bands(path).with_context(|| format!("reading --trace {}", path.display()))?;
        let bands = match args.k {
            Some(k) if k > bands.len() => bail!("--k {k} exceeds the {} bands in --trace", bands.len()),
            Some(k) => bands[..k].to_vec(),
            None => bands,
        };
        ("trace".to_string(), bands, 0.0)
    } else {
        let method = args.method.expect("clap requires --method");
        let k = args.k.expect("clap requires --k");
        let (trace, ms) = run_selection(&d.cube, &d.gt, method, k, &s)?;
        write_trace(&args.data.out, "trace", &trace)?;
        (method.name().to_string(), trace.bands(), ms)
    };
    let outcome = classify_bands(&d.name, &d.cube, &d.gt, &label, &bands, &s, ms)?;
    write_outcome(&args.data.out, "report", &outcome, &d.gt)?;
    outcome.model.save(&args.data.out.join("model.json"))?;
    println!(
        "OA {:.6} AA {:.6} kappa {:.6} SP {:.6}",
        outcome.report.metrics.oa.0,
        outcome.report.metrics.aa.0,
        outcome.report.metrics.kappa.0,
        outcome.report.metrics.specificity.0
    );
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let d = load(&args.data)?;
    let s = settings(&args.selection, Some(&args.training));
    let out = sweep(&d.name, &d.cube, &d.gt, &args.methods, &args.k_list, &s)?;
    for trace in &out.traces {
        write_trace(&args.data.out, &format!("trace_{}", trace.method.name()), trace)?;
    }
    for cell in &out.cells {
        write_outcome(
            &args.data.out,
            &format!("report_{}_k{}", cell.method.name(), cell.k),
            &cell.outcome,
            &d.gt,
        )?;
    }
    let csv = sweep_csv(&out.cells);
    write_atomic(&args.data.out.join("sweep.csv"), csv.as_bytes())?;
    print!("{csv}");
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let spec = match args.preset {
        Preset::Xor => SynthSpec::xor_benchmark(args.seed),
        Preset::Informative => SynthSpec::informative(args.seed),
        Preset::Separable => SynthSpec::separable(args.seed),
        Preset::Redundancy => SynthSpec::redundancy(args.seed),
    };
    let (cube, gt) = synth_cube(&spec)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating --out {}", args.out.display()))?;
    save_envi(&cube, &args.out.join("cube.raw"), Interleave::Bsq)?;
    let (header, data) = write_label_raster(gt.rows(), gt.cols(), gt.labels());
    write_atomic(&args.out.join("labels.raw"), &data)?;
    write_atomic(&args.out.join("labels.hdr"), header.as_bytes())?;
    println!(
        "{}x{}x{} cube with {} classes in {}",
        cube.rows(),
        cube.cols(),
        cube.bands(),
        gt.classes().len(),
        args.out.display()
    );
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Select(a) => cmd_select(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Synth(a) => cmd_synth(a),
    }
}
