//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 runtime/data error, 2 usage error. Every error
//! path prints one line starting with a greppable class code (`ERR_IO`,
//! `ERR_FORMAT`, `ERR_FLAGS`, `ERR_DEGENERATE`) before anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use chromawarp::bench::{
    fetch_instructions, run_table1, run_table3, run_table4_ours, table4_reference_metadata,
    to_csv, DatasetManifest, Experiment, ExperimentSpec, WeightsSource,
};
use chromawarp::demosaic::{refine_rounds, CfaPattern, HqliGains};
use chromawarp::error::Error;
use chromawarp::geometry::GeometricMap;
use chromawarp::io::{load_image, save_image};
use chromawarp::kernel::InterpKernel;
use chromawarp::metrics::PsnrSpace;
use chromawarp::training::{collect_samples, fit_weights, Loss, TrainSpec};
use chromawarp::warp::{warp, WarpConfig, WarpMode, WeightSet};

#[derive(Parser)]
#[command(
    name = "chromawarp",
    version,
    about = "Color image warping with cross-channel Laplacian detail",
    disable_help_subcommand = true
)]
struct Cli {
    /// Cap internal parallelism (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for every random choice the tool makes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resize an image by a scale factor.
    Upscale(UpscaleArgs),
    /// Warp an image under an affine or projective map.
    Warp(WarpArgs),
    /// Re-estimate every channel by sequential CFA demosaicking rounds.
    DemosaicRefine(DemosaicArgs),
    /// Learn cross-channel gains from a corpus of ground-truth images.
    Train(TrainArgs),
    /// Run a benchmark experiment and emit CSV.
    Bench(BenchArgs),
    /// Print where to obtain the benchmark datasets.
    FetchInstructions,
}

#[derive(Args)]
struct UpscaleArgs {
    /// Input image (.png or .ppm).
    input: PathBuf,
    /// Output image (.png or .ppm).
    output: PathBuf,
    /// Scale factor (> 0; fractional values are fine).
    #[arg(long)]
    scale: f64,
    /// Interpolation kernel: nearest, bilinear, bicubic, lanczos, lanczos2, lanczos3.
    #[arg(long, default_value = "bilinear")]
    kernel: String,
    /// Warp mode: independent or correlated.
    #[arg(long, default_value = "independent")]
    mode: String,
    /// Weights file for correlated mode (defaults to built-in gains for the kernel).
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Laplacian tap spacing for the correlated mode.
    #[arg(long, default_value_t = 2)]
    stride: u32,
}

#[derive(Args)]
struct WarpArgs {
    /// Input image (.png or .ppm).
    input: PathBuf,
    /// Output image (.png or .ppm).
    output: PathBuf,
    /// Forward affine map: 6 whitespace-separated numbers, row-major 2x3.
    #[arg(long, conflicts_with = "homography")]
    affine: Option<String>,
    /// Forward projective map: 9 whitespace-separated numbers, row-major 3x3.
    #[arg(long)]
    homography: Option<String>,
    /// Output height in pixels.
    #[arg(long)]
    height: usize,
    /// Output width in pixels.
    #[arg(long)]
    width: usize,
    /// Interpolation kernel: nearest, bilinear, bicubic, lanczos, lanczos2, lanczos3.
    #[arg(long, default_value = "bilinear")]
    kernel: String,
    /// Warp mode: independent or correlated.
    #[arg(long, default_value = "independent")]
    mode: String,
    /// Weights file for correlated mode (defaults to built-in gains for the kernel).
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Laplacian tap spacing for the correlated mode.
    #[arg(long, default_value_t = 2)]
    stride: u32,
}

#[derive(Args)]
struct DemosaicArgs {
    /// Input image (.png or .ppm).
    input: PathBuf,
    /// Output image (.png or .ppm).
    output: PathBuf,
    /// Comma-separated CFA rounds (rggb, bggr, grbg, gbrg), applied in order.
    #[arg(long, default_value = "grbg,rggb,bggr")]
    patterns: String,
    /// Gain on the Laplacian when estimating green at red/blue sites.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Gain when estimating red/blue at green sites.
    #[arg(long, default_value_t = 0.625)]
    beta: f64,
    /// Gain when estimating red at blue sites and vice versa.
    #[arg(long, default_value_t = 0.75)]
    gamma: f64,
}

#[derive(Args)]
struct TrainArgs {
    /// Directory of ground-truth .png/.ppm images.
    corpus: PathBuf,
    /// Output weights file (a `.meta` sidecar is written next to it).
    output: PathBuf,
    /// Downsampling factor the training pairs are built at.
    #[arg(long, default_value_t = 4.0)]
    scale: f64,
    /// Interpolation kernel: nearest, bilinear, bicubic, lanczos, lanczos2, lanczos3.
    #[arg(long, default_value = "bilinear")]
    kernel: String,
    /// Total number of training pixels drawn across the corpus.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Regression loss: mse or mae.
    #[arg(long, default_value = "mse")]
    loss: String,
    /// Laplacian tap spacing.
    #[arg(long, default_value_t = 2)]
    stride: u32,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment: table1, table3, or table4.
    #[arg(long)]
    experiment: String,
    /// Dataset directory of .png/.ppm files; repeat for several datasets.
    #[arg(long, required_unless_present = "manifest")]
    data_dir: Vec<PathBuf>,
    /// Manifest file (`<sha256> <relative path>` lines) instead of a directory scan.
    #[arg(long)]
    manifest: Vec<PathBuf>,
    /// Write scanned manifests to `<path>-<dataset>.manifest` for later
    /// `--manifest` runs with hash verification.
    #[arg(long)]
    write_manifest: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated scale factors (default per experiment).
    #[arg(long)]
    scales: Option<String>,
    /// Comma-separated kernels (default per experiment).
    #[arg(long)]
    kernels: Option<String>,
    /// Weights file for correlated warps (default: built-in gains).
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Border pixels excluded from PSNR.
    #[arg(long, default_value_t = 0)]
    crop: usize,
    /// PSNR color space: rgb or y.
    #[arg(long, default_value = "rgb")]
    psnr_space: String,
}

enum FailClass {
    Io,
    Format,
    Flags,
    Degenerate,
}

struct Failure {
    class: FailClass,
    message: String,
}

impl Failure {
    fn flags(message: impl Into<String>) -> Self {
        Failure { class: FailClass::Flags, message: message.into() }
    }

    fn code(&self) -> u8 {
        match self.class {
            FailClass::Flags => 2,
            _ => 1,
        }
    }

    fn prefix(&self) -> &'static str {
        match self.class {
            FailClass::Io => "ERR_IO",
            FailClass::Format => "ERR_FORMAT",
            FailClass::Flags => "ERR_FLAGS",
            FailClass::Degenerate => "ERR_DEGENERATE",
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let class = match &e {
            Error::Io { .. } => FailClass::Io,
            Error::Format(_) | Error::Dimension(_) => FailClass::Format,
            Error::Degenerate(_) | Error::PointAtInfinity { .. } => FailClass::Degenerate,
            Error::InvalidArg(_) => FailClass::Flags,
        };
        Failure { class, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("ERR_FLAGS: invalid command line");
            eprint!("{e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        // Ignore the error if a pool already exists (tests, repeated init).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}: {}", f.prefix(), f.message.lines().next().unwrap_or(""));
            for line in f.message.lines().skip(1) {
                eprintln!("{line}");
            }
            ExitCode::from(f.code())
        }
    }
}

fn parse_mode(mode: &str) -> Result<WarpMode, Failure> {
    match mode.to_ascii_lowercase().as_str() {
        "independent" => Ok(WarpMode::Independent),
        "correlated" => Ok(WarpMode::Correlated),
        other => Err(Failure::flags(format!("unknown mode '{other}' (independent, correlated)"))),
    }
}

fn resolve_weights(
    mode: WarpMode,
    kernel: InterpKernel,
    file: &Option<PathBuf>,
) -> Result<Option<WeightSet>, Failure> {
    if mode != WarpMode::Correlated {
        return Ok(None);
    }
    match file {
        Some(path) => Ok(Some(WeightSet::from_file(path)?)),
        None => WeightSet::builtin(kernel)
            .map(Some)
            .ok_or_else(|| {
                Failure::flags(format!(
                    "no built-in weights for kernel '{}'; pass --weights",
                    kernel.name()
                ))
            }),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Upscale(args) => cmd_upscale(args),
        Command::Warp(args) => cmd_warp(args),
        Command::DemosaicRefine(args) => cmd_demosaic_refine(args),
        Command::Train(args) => cmd_train(args, cli.seed),
        Command::Bench(args) => cmd_bench(args),
        Command::FetchInstructions => {
            print!("{}", fetch_instructions());
            Ok(())
        }
    }
}

fn cmd_upscale(args: UpscaleArgs) -> Result<(), Failure> {
    let kernel = InterpKernel::parse(&args.kernel).map_err(|e| Failure::flags(e.to_string()))?;
    let mode = parse_mode(&args.mode)?;
    if !(args.scale > 0.0) || !args.scale.is_finite() {
        return Err(Failure::flags(format!("--scale must be positive, got {}", args.scale)));
    }
    let weights = resolve_weights(mode, kernel, &args.weights)?;

    let img = load_image(&args.input)?;
    let map = GeometricMap::scale(args.scale)?;
    let (th, tw) = map.target_extent(img.height(), img.width())?;
    let mut cfg = WarpConfig::new(map, kernel);
    cfg.weights = weights;
    cfg.laplacian_stride = args.stride;
    let t0 = Instant::now();
    let out = warp(&img, &cfg, mode, th, tw)?;
    let elapsed = t0.elapsed().as_secs_f64();
    save_image(&out.image, &args.output)?;
    println!("{}x{} -> {}x{} in {:.4} s", img.height(), img.width(), th, tw, elapsed);
    Ok(())
}

fn cmd_warp(args: WarpArgs) -> Result<(), Failure> {
    let kernel = InterpKernel::parse(&args.kernel).map_err(|e| Failure::flags(e.to_string()))?;
    let mode = parse_mode(&args.mode)?;
    let map = match (&args.affine, &args.homography) {
        (Some(text), None) => GeometricMap::parse_affine(text)?,
        (None, Some(text)) => GeometricMap::parse_homography(text)?,
        (None, None) => return Err(Failure::flags("one of --affine or --homography is required")),
        (Some(_), Some(_)) => unreachable!("clap rejects the conflict"),
    };
    if args.height == 0 || args.width == 0 {
        return Err(Failure::flags("--height and --width must be positive"));
    }
    let weights = resolve_weights(mode, kernel, &args.weights)?;

    let img = load_image(&args.input)?;
    let mut cfg = WarpConfig::new(map, kernel);
    cfg.weights = weights;
    cfg.laplacian_stride = args.stride;
    let t0 = Instant::now();
    let out = warp(&img, &cfg, mode, args.height, args.width)?;
    let elapsed = t0.elapsed().as_secs_f64();
    save_image(&out.image, &args.output)?;
    if out.infinity_pixels > 0 {
        println!("warning: {} target pixels had no finite source (filled with 0)", out.infinity_pixels);
    }
    println!("{}x{} -> {}x{} in {:.4} s", img.height(), img.width(), args.height, args.width, elapsed);
    Ok(())
}

fn cmd_demosaic_refine(args: DemosaicArgs) -> Result<(), Failure> {
    let rounds: Vec<CfaPattern> = args
        .patterns
        .split(',')
        .map(|p| CfaPattern::parse(p.trim()))
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::flags(e.to_string()))?;
    if rounds.is_empty() {
        return Err(Failure::flags("--patterns needs at least one round"));
    }
    let gains = HqliGains { alpha: args.alpha, beta: args.beta, gamma: args.gamma };
    let img = load_image(&args.input)?;
    let t0 = Instant::now();
    let out = refine_rounds(&img, &rounds, &gains);
    let elapsed = t0.elapsed().as_secs_f64();
    save_image(&out, &args.output)?;
    let names: Vec<&str> = rounds.iter().map(|p| p.name()).collect();
    println!("refined {} rounds ({}) in {:.4} s", rounds.len(), names.join(","), elapsed);
    Ok(())
}

fn cmd_train(args: TrainArgs, seed: u64) -> Result<(), Failure> {
    let kernel = InterpKernel::parse(&args.kernel).map_err(|e| Failure::flags(e.to_string()))?;
    let loss = Loss::parse(&args.loss).map_err(|e| Failure::flags(e.to_string()))?;
    let manifest = DatasetManifest::from_dir(&args.corpus)?;
    let images = manifest.load_images()?;
    let spec = TrainSpec {
        scale: args.scale,
        kernel,
        sample_count: args.samples,
        loss,
        seed,
        laplacian_stride: args.stride,
    };
    let set = collect_samples(&images, &spec)?;
    if set.skipped_images > 0 {
        println!("warning: skipped {} images below the minimum size", set.skipped_images);
    }
    let weights = fit_weights(&set.samples, loss)?;
    weights.write_file(&args.output)?;

    // sidecar: corpus identity plus the spec, in plain key/value lines
    use sha2::Digest as _;
    let mut corpus_id = sha2::Sha256::new();
    for e in &manifest.entries {
        corpus_id.update(e.sha256.as_bytes());
    }
    let corpus_hex: String = corpus_id.finalize().iter().map(|b| format!("{b:02x}")).collect();
    let meta_path = sidecar_path(&args.output);
    let meta = format!(
        "corpus_sha256 {corpus_hex}\ncorpus_images {}\nscale {}\nkernel {}\nsamples {}\nloss {}\nseed {}\nstride {}\nskipped_images {}\n",
        manifest.entries.len(),
        args.scale,
        kernel.name(),
        set.samples.len(),
        args.loss.to_ascii_lowercase(),
        seed,
        args.stride,
        set.skipped_images,
    );
    std::fs::write(&meta_path, meta).map_err(|e| Failure::from(Error::io(&meta_path, e)))?;

    for (name, value) in weights.entries() {
        println!("{name} {value:.6}");
    }
    Ok(())
}

fn sidecar_path(weights: &Path) -> PathBuf {
    let mut os = weights.as_os_str().to_os_string();
    os.push(".meta");
    PathBuf::from(os)
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let experiment = Experiment::parse(&args.experiment).map_err(|e| Failure::flags(e.to_string()))?;
    let mut spec = ExperimentSpec::new(experiment);
    if let Some(scales) = &args.scales {
        spec.scales = scales
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Failure::flags(format!("bad scale '{s}'")))
            })
            .collect::<Result<_, _>>()?;
        if spec.scales.iter().any(|s| !(*s > 1.0)) {
            return Err(Failure::flags("scales must be > 1"));
        }
    }
    if let Some(kernels) = &args.kernels {
        spec.kernels = kernels
            .split(',')
            .map(|k| InterpKernel::parse(k.trim()).map_err(|e| Failure::flags(e.to_string())))
            .collect::<Result<_, _>>()?;
    }
    if let Some(weights) = &args.weights {
        spec.weights_source = WeightsSource::File(weights.clone());
    }
    spec.psnr_crop = args.crop;
    spec.psnr_space =
        PsnrSpace::parse(&args.psnr_space).map_err(|e| Failure::flags(e.to_string()))?;

    let mut manifests = Vec::new();
    for dir in &args.data_dir {
        manifests.push(DatasetManifest::from_dir(dir).map_err(|e| match e {
            Error::Io { path, source } => Failure {
                class: FailClass::Io,
                message: format!(
                    "{}: {source}\nfetch the dataset first; `chromawarp fetch-instructions` lists sources",
                    path.display()
                ),
            },
            other => other.into(),
        })?);
    }
    for path in &args.manifest {
        manifests.push(DatasetManifest::load(path)?);
    }
    if let Some(base) = &args.write_manifest {
        for m in &manifests {
            let path = base.with_file_name(format!(
                "{}{}.manifest",
                base.file_name().and_then(|n| n.to_str()).map(|n| format!("{n}-")).unwrap_or_default(),
                m.name
            ));
            let cwd = std::env::current_dir().map_err(|e| Failure::from(Error::io(".", e)))?;
            m.save(&path, &cwd)?;
        }
    }

    let mut metadata = vec![format!("experiment {}", args.experiment.to_ascii_lowercase())];
    let mut rows = Vec::new();
    match experiment {
        Experiment::Table1 => {
            metadata.push(format!(
                "assumed downsample factor {} (nearest-neighbour protocol)",
                spec.scales.first().copied().unwrap_or(2.0)
            ));
            for m in &manifests {
                rows.extend(run_table1(m, &spec)?);
            }
        }
        Experiment::Table3 => {
            for m in &manifests {
                rows.extend(run_table3(m, &spec)?);
            }
        }
        Experiment::Table4Ours => {
            metadata.extend(table4_reference_metadata());
            rows.extend(run_table4_ours(&manifests, &spec)?);
        }
    }

    let csv = to_csv(&rows, &metadata);
    match &args.out {
        Some(path) => std::fs::write(path, csv).map_err(|e| Failure::from(Error::io(path, e)))?,
        None => print!("{csv}"),
    }
    Ok(())
}
