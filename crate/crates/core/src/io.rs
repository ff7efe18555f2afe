//! Frame loading, report serialization and map dumps.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use image::{DynamicImage, ImageBuffer, Luma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{rescale_for_display, to_luminance, GrayImage, PixelBuffer, Raster};
use crate::metric::{histogram_of, SequenceReport, BIN_COUNT};
use crate::retinex::decompose;
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: &str = "1";

/// File extensions considered frames; anything else in the directory is skipped.
pub const FRAME_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg", "pgm", "ppm", "pnm"];

/// A directory of frames filtered by a filename glob and ordered by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSource {
    pub root: PathBuf,
    pub pattern: String,
    pub ordering: String,
}

impl FrameSource {
    pub fn new(root: impl Into<PathBuf>, pattern: impl Into<String>) -> Self {
        Self {
            root: root.into(),
            pattern: pattern.into(),
            ordering: "lexicographic".to_owned(),
        }
    }

    /// Matching frame files in lexicographic filename order.
    pub fn resolve(&self) -> Result<Vec<PathBuf>> {
        let glob = glob::Pattern::new(&self.pattern).map_err(|e| Error::Pattern {
            pattern: self.pattern.clone(),
            message: e.to_string(),
        })?;
        let entries = fs::read_dir(&self.root).map_err(|e| Error::io(&self.root, e))?;
        let mut files = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&self.root, e))?;
            let path = entry.path();
            if !path.is_file() {
                continue;
            }
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
                continue;
            };
            if glob.matches(name) && has_frame_extension(&path) {
                files.push(path);
            }
        }
        files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
        if files.is_empty() {
            return Err(Error::NoFrames {
                root: self.root.clone(),
                pattern: self.pattern.clone(),
            });
        }
        Ok(files)
    }
}

fn has_frame_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| FRAME_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        .unwrap_or(false)
}

/// Decoded frames with the files they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSequence<T> {
    pub frames: Vec<GrayImage<T>>,
    pub paths: Vec<PathBuf>,
}

impl<T> LoadedSequence<T> {
    /// File names, used as frame identifiers in reports.
    pub fn frame_ids(&self) -> Vec<String> {
        self.paths
            .iter()
            .map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default())
            .collect()
    }
}

pub fn decode_frame<T: Scalar>(path: &Path) -> Result<GrayImage<T>> {
    let decode_err = |message: String| Error::Decode {
        path: path.to_owned(),
        message,
    };
    let img = image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| decode_err(e.to_string()))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let buffer = match img {
        DynamicImage::ImageLuma8(g) => PixelBuffer::gray(w, h, g.into_raw()),
        DynamicImage::ImageLumaA8(_) => PixelBuffer::gray(w, h, img.to_luma8().into_raw()),
        DynamicImage::ImageRgb8(rgb) => PixelBuffer::rgb(w, h, rgb.into_raw()),
        DynamicImage::ImageRgba8(_) => PixelBuffer::rgb(w, h, img.to_rgb8().into_raw()),
        other => {
            return Err(decode_err(format!(
                "unsupported sample format {:?}; only 8-bit gray or RGB frames are accepted",
                other.color()
            )))
        }
    };
    to_luminance(&buffer)
}

/// Decodes every frame of `source` and checks they share one size.
pub fn load_sequence<T: Scalar>(source: &FrameSource) -> Result<LoadedSequence<T>> {
    let paths = source.resolve()?;
    let frames = paths
        .par_iter()
        .map(|p| decode_frame::<T>(p))
        .collect::<Result<Vec<_>>>()?;
    let first = &frames[0];
    for (f, p) in frames.iter().zip(&paths).skip(1) {
        if f.width() != first.width() || f.height() != first.height() {
            return Err(Error::MismatchedFiles {
                first: paths[0].clone(),
                width: first.width(),
                height: first.height(),
                second: p.clone(),
                other_width: f.width(),
                other_height: f.height(),
            });
        }
    }
    Ok(LoadedSequence { frames, paths })
}

/// A report plus the provenance needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub report: SequenceReport<f64>,
    pub source: FrameSource,
    pub timestamp: DateTime<Utc>,
}

impl ReportDocument {
    pub fn new<T: Scalar>(report: &SequenceReport<T>, source: FrameSource, timestamp: DateTime<Utc>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_owned(),
            report: SequenceReport {
                frame_count: report.frame_count,
                pixel_count: report.pixel_count,
                per_frame_discrepancy: report.per_frame_discrepancy.iter().map(|v| v.to_f64_lossy()).collect(),
                ihd: report.ihd.to_f64_lossy(),
                ihc: report.ihc.to_f64_lossy(),
                sigma: report.sigma.to_f64_lossy(),
                frame_ids: report.frame_ids.clone(),
            },
            source,
            timestamp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        }
    }
}

/// Shortest form with 17 significant digits, enough to round-trip an `f64`.
pub fn format_sig17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_report(doc: &ReportDocument, format: ReportFormat, path: &Path) -> Result<()> {
    let bytes = match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(doc).map_err(|e| Error::Serialize {
                path: path.to_owned(),
                message: e.to_string(),
            })?;
            s.push('\n');
            s.into_bytes()
        }
        ReportFormat::Csv => report_csv(doc).map_err(|e| Error::Serialize {
            path: path.to_owned(),
            message: e.to_string(),
        })?,
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn report_csv(doc: &ReportDocument) -> std::result::Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["frame_id", "discrepancy"])?;
    for (id, d) in doc.report.frame_ids.iter().zip(&doc.report.per_frame_discrepancy) {
        w.write_record([id.as_str(), &format_sig17(*d)])?;
    }
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    writeln!(out, "# ihd={}", format_sig17(doc.report.ihd))?;
    writeln!(out, "# ihc={}", format_sig17(doc.report.ihc))?;
    Ok(out)
}

pub fn read_report(path: &Path) -> Result<ReportDocument> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Serialize {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

pub fn write_png<T: Scalar>(image: &GrayImage<T>, path: &Path) -> Result<()> {
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_raw(image.width() as u32, image.height() as u32, image.to_u8())
            .expect("buffer length matches dimensions");
    buf.save_with_format(path, image::ImageFormat::Png).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::Serialize {
            path: path.to_owned(),
            message: other.to_string(),
        },
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `frame_000.png`, `frame_001.png`, ... and returns the paths.
pub fn write_frames<T: Scalar>(frames: &[GrayImage<T>], out_dir: &Path) -> Result<Vec<PathBuf>> {
    create_dir(out_dir)?;
    frames
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let path = out_dir.join(format!("frame_{i:03}.png"));
            write_png(f, &path)?;
            Ok(path)
        })
        .collect()
}

/// For each frame `i`: the raw frame, the display-rescaled reflectance, the
/// illumination map and its histogram (`bin,count`, 256 rows). Metric data
/// comes from the in-memory maps, never from the quantized PNGs.
pub fn dump_maps<T: Scalar>(frames: &[GrayImage<T>], sigma: T, out_dir: &Path) -> Result<Vec<PathBuf>> {
    create_dir(out_dir)?;
    let per_frame = frames
        .par_iter()
        .enumerate()
        .map(|(i, frame)| {
            let d = decompose(frame, sigma)?;
            let hist = histogram_of(&d.illumination)?;

            let raw = out_dir.join(format!("raw_{i}.png"));
            write_png(frame, &raw)?;
            let refl = out_dir.join(format!("reflectance_{i}.png"));
            write_png(&rescale_for_display(&d.reflectance), &refl)?;
            let ill = out_dir.join(format!("illumination_{i}.png"));
            write_png(d.illumination.as_image(), &ill)?;

            let csv_path = out_dir.join(format!("histogram_{i}.csv"));
            let mut text = String::with_capacity(BIN_COUNT * 8);
            text.push_str("bin,count\n");
            for (bin, count) in hist.bins().iter().enumerate() {
                text.push_str(&format!("{bin},{count}\n"));
            }
            fs::write(&csv_path, text).map_err(|e| Error::io(&csv_path, e))?;
            Ok(vec![raw, refl, ill, csv_path])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_frame.into_iter().flatten().collect())
}
