//! `ihc` command line: `compute`, `synth`, `intervals` and `maps`.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::io::{dump_maps, load_sequence, write_frames, write_report, FrameSource, ReportDocument, ReportFormat};
use crate::metric::evaluate_sequence_with_ids;
use crate::retinex::DEFAULT_SIGMA;
use crate::svg::{LineChart, Series};
use crate::synth::{generate_ramp, interval_sweep, sweep_frames, sweep_trend, BasePattern, IntervalSample, RampMode, RampSpec, SweepPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ihc", version, about = "Illumination histogram consistency of frame sequences")]
pub struct Cli {
    /// Gaussian surround width in pixels for illumination estimation.
    #[arg(long, global = true, default_value_t = DEFAULT_SIGMA, value_parser = positive_f64)]
    pub sigma: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a directory of frames and write a report.
    Compute(ComputeArgs),
    /// Generate a synthetic sequence with linearly increasing brightness.
    Synth(SynthArgs),
    /// Score fixed-interval subsets of a ramp sequence and chart the result.
    Intervals(IntervalArgs),
    /// Dump raw, reflectance and illumination maps plus histograms per frame.
    Maps(MapsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
}

impl From<OutFormat> for ReportFormat {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => ReportFormat::Json,
            OutFormat::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Directory holding the frames.
    #[arg(long)]
    pub input_dir: PathBuf,

    /// Filename glob selecting frames (png, jpg, jpeg, pgm); sorted by name.
    #[arg(long, default_value = "*")]
    pub pattern: String,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Report format.
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    pub format: OutFormat,

    /// Report path [default: ihc_report.json or ihc_report.csv].
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Timestamp recorded in the report (RFC 3339) [default: now].
    #[arg(long)]
    pub timestamp: Option<DateTime<Utc>>,
}

#[derive(Debug, Args)]
pub struct RampArgs {
    /// Number of generated frames.
    #[arg(long, default_value_t = 100)]
    pub frames: usize,

    /// Frame width in pixels.
    #[arg(long, default_value_t = 256)]
    pub width: usize,

    /// Frame height in pixels.
    #[arg(long, default_value_t = 256)]
    pub height: usize,

    /// Brightness of the first frame.
    #[arg(long, default_value_t = 40.0)]
    pub brightness_start: f64,

    /// Brightness of the last frame.
    #[arg(long, default_value_t = 200.0)]
    pub brightness_end: f64,

    /// Texture shared by all frames.
    #[arg(long, default_value = "flat", value_parser = parse_pattern)]
    pub base_pattern: BasePattern,

    /// Peak deviation of the texture from the frame brightness.
    #[arg(long, default_value_t = 40.0)]
    pub amplitude: f64,

    /// Scale the texture by the brightness instead of adding it.
    #[arg(long, default_value_t = false)]
    pub multiplicative: bool,

    /// Seed for the randomized parts of the texture.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RampArgs {
    pub fn spec(&self) -> RampSpec {
        RampSpec {
            frame_count: self.frames,
            width: self.width,
            height: self.height,
            brightness_start: self.brightness_start,
            brightness_end: self.brightness_end,
            base_pattern: self.base_pattern,
            pattern_amplitude: self.amplitude,
            mode: if self.multiplicative { RampMode::Multiplicative } else { RampMode::Additive },
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub ramp: RampArgs,

    /// Output directory for frame_NNN.png files.
    #[arg(long, default_value = "frames")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct IntervalArgs {
    #[command(flatten)]
    pub ramp: RampArgs,

    /// Read the sequence from this directory instead of generating a ramp.
    #[arg(long, conflicts_with_all = ["frames", "width", "height", "brightness_start", "brightness_end", "base_pattern", "amplitude", "multiplicative", "seed"])]
    pub frames_dir: Option<PathBuf>,

    /// Filename glob used with --frames-dir.
    #[arg(long, default_value = "*", requires = "frames_dir")]
    pub frames_pattern: String,

    /// Intervals to evaluate: comma-separated values and inclusive ranges, e.g. "1,3,6" or "1..12".
    #[arg(long, default_value = "1..12")]
    pub intervals: String,

    /// Index of the middle sampled frame.
    #[arg(long, default_value_t = 50)]
    pub center: usize,

    /// Frames sampled on each side of the center.
    #[arg(long, default_value_t = 4)]
    pub arm: usize,

    /// Table of interval,ihd,ihc.
    #[arg(long, default_value = "intervals.csv")]
    pub out_csv: PathBuf,

    /// Line chart of IHD and IHC against interval.
    #[arg(long, default_value = "intervals.svg")]
    pub out_svg: PathBuf,
}

#[derive(Debug, Args)]
pub struct MapsArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Output directory for the map PNGs and histogram CSVs.
    #[arg(long, default_value = "maps")]
    pub out_dir: PathBuf,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive number, got {s}"))
    }
}

fn parse_pattern(s: &str) -> Result<BasePattern, String> {
    s.parse()
}

/// Parses "1,3,6", "1..12", "1..=12" or mixtures like "1..4,8".
pub fn parse_intervals(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| -> Result<usize, String> {
            let v: usize = t.trim().parse().map_err(|_| format!("invalid interval {t:?}"))?;
            if v == 0 {
                return Err("intervals must be positive".to_owned());
            }
            Ok(v)
        };
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty interval range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(num(part)?);
        }
    }
    if out.is_empty() {
        return Err("no intervals given".to_owned());
    }
    Ok(out)
}

/// Failure carrying the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_io() { EXIT_IO } else { EXIT_DATA },
            message: e.to_string(),
        }
    }
}

/// Parses `args`, runs the subcommand and returns the process exit status.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Compute(args) => compute(args, cli.sigma),
        Command::Synth(args) => synth(args),
        Command::Intervals(args) => intervals(args, cli.sigma),
        Command::Maps(args) => maps(args, cli.sigma),
    }
}

fn compute(args: &ComputeArgs, sigma: f64) -> Result<(), Failure> {
    let format = ReportFormat::from(args.format);
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("ihc_report.{}", format.extension())));
    let source = FrameSource::new(&args.input.input_dir, &args.input.pattern);
    let seq = load_sequence::<f64>(&source)?;
    let report = evaluate_sequence_with_ids(&seq.frames, seq.frame_ids(), sigma)?;
    println!("IHD={:.9} IHC={:.9}", report.ihd, report.ihc);
    let doc = ReportDocument::new(&report, source, args.timestamp.unwrap_or_else(Utc::now));
    write_report(&doc, format, &out)?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<(), Failure> {
    let spec = args.ramp.spec();
    spec.validate().map_err(Failure::usage)?;
    let frames = generate_ramp::<f64>(&spec)?;
    let paths = write_frames(&frames, &args.out_dir)?;
    println!("wrote {} frames to {}", paths.len(), args.out_dir.display());
    Ok(())
}

fn intervals(args: &IntervalArgs, sigma: f64) -> Result<(), Failure> {
    let list = parse_intervals(&args.intervals).map_err(|m| Failure::usage(format!("--intervals: {m}")))?;
    let template = IntervalSample {
        center: args.center,
        arm: args.arm,
        interval: 1,
    };
    let points = match &args.frames_dir {
        Some(dir) => {
            let seq = load_sequence::<f64>(&FrameSource::new(dir, &args.frames_pattern))?;
            sweep_frames(&seq.frames, &template, &list, sigma)?
        }
        None => {
            let spec = args.ramp.spec();
            spec.validate().map_err(Failure::usage)?;
            interval_sweep(&spec, &template, &list, sigma)?
        }
    };

    println!("interval,ihd,ihc,frames");
    for p in &points {
        let ids: Vec<String> = p.frame_indices.iter().map(|i| i.to_string()).collect();
        println!("{},{:.9},{:.9},{}", p.interval, p.ihd, p.ihc, ids.join(" "));
    }
    let trend = sweep_trend(&points);
    println!(
        "# rank correlation: ihd {:.3}, ihc {:.3}",
        trend.ihd_rank_correlation, trend.ihc_rank_correlation
    );
    if let Some(spread) = trend.difference_spread {
        println!("# successive ihd difference spread: {:.1}%", spread * 100.0);
    }

    write_text(&args.out_csv, &sweep_csv(&points))?;
    write_text(&args.out_svg, &sweep_chart(&points).render())?;
    Ok(())
}

fn maps(args: &MapsArgs, sigma: f64) -> Result<(), Failure> {
    let seq = load_sequence::<f64>(&FrameSource::new(&args.input.input_dir, &args.input.pattern))?;
    let files = dump_maps(&seq.frames, sigma, &args.out_dir)?;
    println!("wrote {} files to {}", files.len(), args.out_dir.display());
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    Ok(())
}

pub fn sweep_csv(points: &[SweepPoint<f64>]) -> String {
    let mut s = String::from("interval,ihd,ihc\n");
    for p in points {
        s.push_str(&format!("{},{},{}\n", p.interval, crate::io::format_sig17(p.ihd), crate::io::format_sig17(p.ihc)));
    }
    s
}

pub fn sweep_chart(points: &[SweepPoint<f64>]) -> LineChart {
    let series = |name: &str, color: &str, f: fn(&SweepPoint<f64>) -> f64| {
        Series::new(name, color, points.iter().map(|p| (p.interval as f64, f(p))).collect())
    };
    LineChart {
        title: "Illumination histogram scores by frame interval".to_owned(),
        x_label: "frame interval".to_owned(),
        y_label: "score".to_owned(),
        series: vec![
            series("IHD", "#d62728", |p| p.ihd),
            series("IHC", "#1f77b4", |p| p.ihc),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn interval_lists() {
        assert_eq!(parse_intervals("1,3,6,9,12").unwrap(), vec![1, 3, 6, 9, 12]);
        assert_eq!(parse_intervals("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_intervals("1..=3, 7").unwrap(), vec![1, 2, 3, 7]);
        assert!(parse_intervals("").is_err());
        assert!(parse_intervals("0").is_err());
        assert!(parse_intervals("5..2").is_err());
        assert!(parse_intervals("a").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn rejects_non_positive_sigma() {
        assert_eq!(run(["ihc", "--sigma", "0", "synth"]), EXIT_USAGE);
        assert_eq!(run(["ihc", "synth", "--sigma=-3"]), EXIT_USAGE);
    }

    #[test]
    fn rejects_conflicting_sources() {
        assert_eq!(run(["ihc", "intervals", "--frames-dir", "x", "--width", "8"]), EXIT_USAGE);
    }
}
