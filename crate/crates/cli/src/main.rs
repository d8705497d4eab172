//! Command-line front end: batch enhancement, scene synthesis for oracle
//! testing, prior comparison, and dark-channel debugging dumps.

mod config;
mod imgio;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use config::{parse_prior, Manifest, PipelineSettings};
use unveil::pipeline::{enhance_frame, EnhancedResult, PipelineConfig};
use unveil::{ChannelTriple, GrayF, ImageF, PriorMode, WindowSpec};

#[derive(Parser)]
#[command(
    name = "unveil",
    version,
    about = "Underwater haze removal: shifted-RGB dark channel pipeline plus a formation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enhance images or directories of numbered frames
    Enhance(EnhanceArgs),
    /// Synthesize a hazy frame with full ground truth from a scene config
    Synth(SynthArgs),
    /// Run several priors on one input and tabulate the differences
    Compare(CompareArgs),
    /// Dump the dark channel of an image as 8-bit grayscale
    Darkchannel(DarkArgs),
}

/// Flags shared by the pipeline-running subcommands. Values from `--config`
/// are applied first; explicit flags override them.
#[derive(Args)]
struct PipelineFlags {
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// dark-channel prior: classic | udcp | rdcp | shifted
    #[arg(long)]
    prior: Option<String>,
    /// disable the white-balance stage
    #[arg(long)]
    no_whitebalance: bool,
    /// patch radius of the windowed minimum
    #[arg(long)]
    window_radius: Option<usize>,
    /// haze retention factor in (0, 1]
    #[arg(long)]
    omega: Option<f32>,
    /// transmission floor in (0, 1)
    #[arg(long)]
    t0: Option<f32>,
    /// worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

impl PipelineFlags {
    fn resolve(&self) -> Result<PipelineSettings> {
        let mut settings = PipelineSettings::default();
        if let Some(path) = &self.config {
            settings.apply_file(path)?;
        }
        if let Some(prior) = &self.prior {
            settings.apply_key("prior", prior)?;
        }
        if self.no_whitebalance {
            settings.apply_key("use_whitebalance", "off")?;
        }
        if let Some(r) = self.window_radius {
            settings.apply_key("window_radius", &r.to_string())?;
        }
        if let Some(v) = self.omega {
            settings.apply_key("omega", &v.to_string())?;
        }
        if let Some(v) = self.t0 {
            settings.apply_key("t0", &v.to_string())?;
        }
        settings
            .config
            .validate()
            .map_err(|e| anyhow::anyhow!("invalid configuration: {e}"))?;
        Ok(settings)
    }

    fn build_pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.unwrap_or(0))
            .build()
            .context("cannot build worker pool")
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enhance(args) => cmd_enhance(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Darkchannel(args) => cmd_darkchannel(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

#[derive(Args)]
struct EnhanceArgs {
    /// input images, or directories scanned for numbered frames
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// output directory
    #[arg(long, short)]
    out: PathBuf,
    /// also write dark-channel and transmission dumps per frame
    #[arg(long)]
    dump_intermediates: bool,
    #[command(flatten)]
    pipeline: PipelineFlags,
}

fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut frames: Vec<PathBuf> = std::fs::read_dir(input)
                .with_context(|| format!("cannot list {}", input.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && imgio::is_supported(p))
                .collect();
            frames.sort();
            if frames.is_empty() {
                bail!("no supported images in {}", input.display());
            }
            files.extend(frames);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

struct FrameRecord {
    input: PathBuf,
    output: PathBuf,
    airlight: ChannelTriple,
    timings: Vec<(unveil::Stage, f64)>,
    dark_mean_before: f64,
    dark_mean_after: f64,
    contrast_before: f64,
    contrast_after: f64,
}

fn process_frame(
    input: &Path,
    out_dir: &Path,
    config: &PipelineConfig,
    dump: bool,
) -> Result<FrameRecord> {
    let image = imgio::load_color(input)?;
    let result: EnhancedResult = enhance_frame(&image, config)
        .map_err(|e| anyhow::anyhow!("{}: {e}", input.display()))?;

    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("frame")
        .to_string();
    let ext = input
        .extension()
        .and_then(|s| s.to_str())
        .unwrap_or("png")
        .to_string();
    let output = out_dir.join(format!("{stem}.{ext}"));
    imgio::save_color(&output, &result.output)?;

    if dump {
        imgio::save_gray8(&out_dir.join(format!("{stem}.dark.png")), &result.dark)?;
        imgio::save_gray8(
            &out_dir.join(format!("{stem}.t_refined.png")),
            result.transmission.map(),
        )?;
        // raw estimate, recomputed from the same working image
        let working = if config.use_whitebalance {
            unveil::local_gray_world(&image, config.wb)?
        } else {
            image.clone()
        };
        let raw = unveil::estimate_transmission(
            &working,
            result.airlight,
            config.window,
            config.omega,
        )?;
        imgio::save_gray8(&out_dir.join(format!("{stem}.t_raw.png")), &raw)?;
    }

    let window = config.window;
    Ok(FrameRecord {
        input: input.to_path_buf(),
        output,
        airlight: result.airlight,
        timings: result
            .timings
            .iter()
            .map(|&(s, d)| (s, d.as_secs_f64() * 1e3))
            .collect(),
        dark_mean_before: unveil::dark_channel_mean(&image, window, PriorMode::Classic),
        dark_mean_after: unveil::dark_channel_mean(&result.output, window, PriorMode::Classic),
        contrast_before: unveil::global_contrast(&image),
        contrast_after: unveil::global_contrast(&result.output),
    })
}

fn airlight_8bit(a: ChannelTriple) -> [u8; 3] {
    let q = |v: f32| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    [q(a.r), q(a.g), q(a.b)]
}

fn cmd_enhance(args: EnhanceArgs) -> Result<()> {
    let settings = args.pipeline.resolve()?;
    let files = collect_inputs(&args.inputs)?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;

    let pool = args.pipeline.build_pool()?;
    let config = settings.config.clone();
    let results: Vec<Result<FrameRecord>> = pool.install(|| {
        files
            .par_iter()
            .map(|f| process_frame(f, &args.out, &config, args.dump_intermediates))
            .collect()
    });

    let mut report = String::new();
    let _ = writeln!(report, "run.command = enhance");
    let _ = writeln!(report, "run.frames = {}", files.len());
    report.push_str(&settings.emit());

    let mut failures = 0usize;
    for (i, outcome) in results.iter().enumerate() {
        match outcome {
            Ok(rec) => {
                let _ = writeln!(report, "frame.{i}.input = {}", rec.input.display());
                let _ = writeln!(report, "frame.{i}.output = {}", rec.output.display());
                let a = rec.airlight;
                let _ = writeln!(
                    report,
                    "frame.{i}.airlight = {:.6} {:.6} {:.6}",
                    a.r, a.g, a.b
                );
                let q = airlight_8bit(a);
                let _ = writeln!(
                    report,
                    "frame.{i}.airlight_8bit = {} {} {}",
                    q[0], q[1], q[2]
                );
                for (stage, ms) in &rec.timings {
                    let _ = writeln!(report, "frame.{i}.time.{}_ms = {ms:.3}", stage.name());
                }
                let _ = writeln!(
                    report,
                    "frame.{i}.metric.dark_mean_before = {:.6}",
                    rec.dark_mean_before
                );
                let _ = writeln!(
                    report,
                    "frame.{i}.metric.dark_mean_after = {:.6}",
                    rec.dark_mean_after
                );
                let _ = writeln!(
                    report,
                    "frame.{i}.metric.contrast_before = {:.6}",
                    rec.contrast_before
                );
                let _ = writeln!(
                    report,
                    "frame.{i}.metric.contrast_after = {:.6}",
                    rec.contrast_after
                );
            }
            Err(err) => {
                failures += 1;
                let _ = writeln!(report, "frame.{i}.error = {err:#}");
                eprintln!("error: {}: {err:#}", files[i].display());
            }
        }
    }

    let report_path = args.out.join("report.txt");
    std::fs::write(&report_path, report)
        .with_context(|| format!("cannot write {}", report_path.display()))?;

    println!(
        "enhanced {}/{} frame(s) -> {}",
        files.len() - failures,
        files.len(),
        args.out.display()
    );
    if failures > 0 {
        bail!("{failures} frame(s) failed");
    }
    Ok(())
}

#[derive(Args)]
struct SynthArgs {
    /// scene description (key=value)
    #[arg(long)]
    scene: PathBuf,
    /// output directory
    #[arg(long, short)]
    out: PathBuf,
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let recipe = config::parse_scene(&args.scene)?;
    let scene = recipe
        .build()
        .map_err(|e| anyhow::anyhow!("invalid scene: {e}"))?;
    let hazy = unveil::synthesize(&scene).map_err(|e| anyhow::anyhow!("synthesis failed: {e}"))?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    imgio::save_color(&args.out.join("hazy.png"), &hazy)?;
    imgio::save_color(&args.out.join("radiance.png"), &scene.radiance)?;
    imgio::save_gray16(
        &args.out.join("depth_mm.png"),
        scene.depth.width(),
        scene.depth.height(),
        imgio::depth_to_samples(&scene.depth),
    )?;
    for (suffix, coeff) in [
        ("r", scene.attenuation.r),
        ("g", scene.attenuation.g),
        ("b", scene.attenuation.b),
    ] {
        let t = unveil::channel_transmission(&scene.depth, coeff);
        imgio::save_gray16(
            &args.out.join(format!("t_{suffix}.png")),
            t.width(),
            t.height(),
            imgio::unit_to_samples(&t),
        )?;
    }

    let manifest = Manifest {
        width: hazy.width(),
        height: hazy.height(),
        attenuation: scene.attenuation,
        veiling: scene.veiling,
        hazy_file: "hazy.png".to_string(),
        radiance_file: "radiance.png".to_string(),
        depth_file: "depth_mm.png".to_string(),
    };
    std::fs::write(args.out.join("manifest.txt"), manifest.emit())?;
    std::fs::write(args.out.join("scene.cfg"), config::emit_scene(&recipe))?;

    println!(
        "synthesized {}x{} scene -> {}",
        hazy.width(),
        hazy.height(),
        args.out.display()
    );
    Ok(())
}

#[derive(Args)]
struct CompareArgs {
    /// input image
    input: PathBuf,
    /// comma-separated list of priors to run
    #[arg(long, default_value = "classic,udcp,rdcp,shifted")]
    methods: String,
    /// ground-truth manifest (default: manifest.txt next to the input)
    #[arg(long)]
    truth: Option<PathBuf>,
    /// output directory
    #[arg(long, short)]
    out: PathBuf,
    #[command(flatten)]
    pipeline: PipelineFlags,
}

struct Truth {
    radiance: ImageF,
    veiling: ChannelTriple,
    t_min: GrayF,
}

fn load_truth(path: &Path) -> Result<Truth> {
    let manifest = Manifest::read(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let radiance = imgio::load_color(&dir.join(&manifest.radiance_file))?;
    let (w, h, samples) = imgio::load_gray16(&dir.join(&manifest.depth_file))?;
    let depth = imgio::samples_to_depth(w, h, &samples)?;
    let c_min = manifest.attenuation.min_component();
    Ok(Truth {
        radiance,
        veiling: manifest.veiling,
        t_min: unveil::channel_transmission(&depth, c_min),
    })
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let settings = args.pipeline.resolve()?;
    let image = imgio::load_color(&args.input)?;

    let methods: Vec<PriorMode> = args
        .methods
        .split(',')
        .map(|m| parse_prior(m.trim()))
        .collect::<Result<_>>()?;
    if methods.is_empty() {
        bail!("no methods requested");
    }

    let truth_path = args.truth.clone().or_else(|| {
        let sibling = args
            .input
            .parent()
            .unwrap_or(Path::new("."))
            .join("manifest.txt");
        sibling.exists().then_some(sibling)
    });
    let truth = truth_path.as_deref().map(load_truth).transpose()?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;

    let pool = args.pipeline.build_pool()?;
    let runs: Vec<(PriorMode, EnhancedResult)> = pool.install(|| {
        methods
            .par_iter()
            .map(|&prior| {
                let config = PipelineConfig {
                    prior,
                    ..settings.config.clone()
                };
                enhance_frame(&image, &config)
                    .map(|r| (prior, r))
                    .map_err(|e| anyhow::anyhow!("{prior}: {e}"))
            })
            .collect::<Result<_>>()
    })?;

    // composite strip: input followed by each method's output
    let mut strip: Vec<&ImageF> = vec![&image];
    strip.extend(runs.iter().map(|(_, r)| &r.output));
    let composite = compose_strip(&strip);
    imgio::save_color(&args.out.join("compare.png"), &composite)?;

    let mut table = String::new();
    let _ = writeln!(
        table,
        "# method  airlight_r airlight_g airlight_b  dark_mean  contrast  airlight_err  rmse  t_mae"
    );
    let window = settings.config.window;
    for (prior, result) in &runs {
        let a = result.airlight;
        let dark_mean = unveil::dark_channel_mean(&image, window, *prior);
        let contrast = unveil::global_contrast(&result.output);
        let (aerr, rmse, t_mae) = match &truth {
            Some(t) => {
                let aerr = (a.r - t.veiling.r)
                    .abs()
                    .max((a.g - t.veiling.g).abs())
                    .max((a.b - t.veiling.b).abs());
                let rmse = unveil::rmse(&result.output, &t.radiance)
                    .map(|v| format!("{v:.4}"))
                    .unwrap_or_else(|_| "absent".to_string());
                let mae: f64 = result
                    .transmission
                    .map()
                    .data()
                    .iter()
                    .zip(t.t_min.data())
                    .map(|(&x, &y)| (x as f64 - y as f64).abs())
                    .sum::<f64>()
                    / t.t_min.data().len() as f64;
                (format!("{aerr:.4}"), rmse, format!("{mae:.4}"))
            }
            None => (
                "absent".to_string(),
                "absent".to_string(),
                "absent".to_string(),
            ),
        };
        let _ = writeln!(
            table,
            "{}  {:.4} {:.4} {:.4}  {:.4}  {:.4}  {}  {}  {}",
            prior, a.r, a.g, a.b, dark_mean, contrast, aerr, rmse, t_mae
        );
    }
    std::fs::write(args.out.join("compare.txt"), &table)?;
    print!("{table}");
    println!("composite -> {}", args.out.join("compare.png").display());
    Ok(())
}

fn compose_strip(images: &[&ImageF]) -> ImageF {
    let gap = 4usize;
    let h = images.iter().map(|i| i.height()).max().unwrap();
    let w: usize =
        images.iter().map(|i| i.width()).sum::<usize>() + gap * (images.len() - 1);
    let mut out = ImageF::filled(w, h, ChannelTriple::splat(1.0)).unwrap();
    let mut x0 = 0usize;
    for img in images {
        for y in 0..img.height() {
            for x in 0..img.width() {
                out.set_pixel(x0 + x, y, img.pixel(x, y));
            }
        }
        x0 += img.width() + gap;
    }
    out
}

#[derive(Args)]
struct DarkArgs {
    /// input image
    input: PathBuf,
    /// output directory
    #[arg(long, short)]
    out: PathBuf,
    /// dark-channel prior: classic | udcp | rdcp | shifted
    #[arg(long, default_value = "shifted")]
    prior: String,
    /// patch radius of the windowed minimum
    #[arg(long, default_value_t = 7)]
    window_radius: usize,
}

fn cmd_darkchannel(args: DarkArgs) -> Result<()> {
    let prior = parse_prior(&args.prior)?;
    let image = imgio::load_color(&args.input)?;
    let dark = unveil::dark_channel(&image, WindowSpec::new(args.window_radius), prior);

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let stem = args
        .input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("image");
    let path = args.out.join(format!("{stem}.dark_{prior}.png"));
    imgio::save_gray8(&path, &dark)?;
    println!("dark channel ({prior}) -> {}", path.display());
    Ok(())
}
