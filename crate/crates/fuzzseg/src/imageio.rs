//! Grayscale image I/O: PGM (P2/P5) and PNG decoding, histogram computation,
//! and rendering of segmented output images.
//!
//! Color PNG input is reduced to luma with BT.601 weights
//! (`round(0.299 R + 0.587 G + 0.114 B)`, half up). All loaded images use
//! 256 gray levels; synthetic images may use any `levels >= 2`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fuzzy_entropy::ThresholdSet;

/// A grayscale image: row-major pixel values in `[0, levels - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    levels: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Builds an image, validating dimensions and pixel range.
    pub fn new(width: u32, height: u32, levels: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if !(2..=256).contains(&levels) {
            return Err(Error::InvalidImage(format!(
                "levels must be in [2, 256], got {levels}"
            )));
        }
        if pixels.len() != width as usize * height as usize {
            return Err(Error::InvalidImage(format!(
                "pixel count {} does not match {width}x{height}",
                pixels.len()
            )));
        }
        if let Some(&p) = pixels.iter().find(|&&p| u32::from(p) >= levels) {
            return Err(Error::InvalidImage(format!(
                "pixel value {p} outside [0, {}]",
                levels - 1
            )));
        }
        Ok(Self { width, height, levels, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Number of representable gray values (L).
    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Minimum and maximum gray values actually present.
    pub fn gray_range(&self) -> (u8, u8) {
        let mut lo = u8::MAX;
        let mut hi = u8::MIN;
        for &p in &self.pixels {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        (lo, hi)
    }
}

/// Normalized gray-level histogram: `bins[k]` is the fraction of pixels at level `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    levels: u32,
    bins: Vec<f64>,
    pixel_count: u64,
}

impl Histogram {
    /// Builds a histogram directly from bin frequencies (used for synthetic cases).
    pub fn from_bins(bins: Vec<f64>, pixel_count: u64) -> Result<Self> {
        if bins.len() < 2 {
            return Err(Error::InvalidImage("histogram needs at least 2 bins".into()));
        }
        if bins.iter().any(|&b| b < 0.0 || !b.is_finite()) {
            return Err(Error::InvalidImage("histogram bins must be non-negative".into()));
        }
        let sum: f64 = bins.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidImage(format!(
                "histogram bins must sum to 1, got {sum}"
            )));
        }
        Ok(Self { levels: bins.len() as u32, bins, pixel_count })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    pub fn pixel_count(&self) -> u64 {
        self.pixel_count
    }
}

/// Counts pixel frequencies and normalizes by the pixel count.
pub fn compute_histogram(img: &GrayImage) -> Histogram {
    let mut counts = vec![0u64; img.levels as usize];
    for &p in &img.pixels {
        counts[p as usize] += 1;
    }
    let total = img.pixels.len() as u64;
    let bins = counts.iter().map(|&c| c as f64 / total as f64).collect();
    Histogram { levels: img.levels, bins, pixel_count: total }
}

/// Replaces each pixel by the representative level of its threshold region.
///
/// Region `j` covers gray values `T_j < p <= T_(j+1)` with sentinels
/// `T_0 = -1` and `T_(LV+1) = L - 1`; its representative is
/// `round(j * (L-1) / LV)` (half up).
pub fn render_segmented(img: &GrayImage, thresholds: &ThresholdSet) -> Result<GrayImage> {
    let l = img.levels;
    let lv = thresholds.len() as u32;
    if thresholds.values().iter().any(|&t| t >= l) {
        return Err(Error::InvalidImage(format!(
            "threshold outside [0, {}]",
            l - 1
        )));
    }

    // Lookup table: gray value -> representative level.
    let mut lut = vec![0u8; l as usize];
    let mut region = 0u32;
    for (value, slot) in lut.iter_mut().enumerate() {
        while region < lv && value as u32 > thresholds.values()[region as usize] {
            region += 1;
        }
        let rep = (f64::from(region) * f64::from(l - 1) / f64::from(lv)).round();
        *slot = rep as u8;
    }

    let pixels = img.pixels.iter().map(|&p| lut[p as usize]).collect();
    Ok(GrayImage {
        width: img.width,
        height: img.height,
        levels: l,
        pixels,
    })
}

/// Decodes a PGM (P2/P5) or PNG file into a 256-level grayscale image.
pub fn load_gray_image(path: &Path) -> Result<GrayImage> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;

    match bytes.first() {
        Some(b'P') => decode_pgm(path, &bytes),
        Some(0x89) => decode_png(path, &bytes),
        _ => Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            detail: "expected a PGM (P2/P5) or PNG file".into(),
        }),
    }
}

/// BT.601 luma, rounded half up.
fn luma(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b);
    y.round().clamp(0.0, 255.0) as u8
}

fn decode_png(path: &Path, bytes: &[u8]) -> Result<GrayImage> {
    let as_err = |e: png::DecodingError| Error::Png(path.to_path_buf(), e.to_string());
    let mut decoder = png::Decoder::new(bytes);
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(as_err)?;
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(as_err)?;
    buf.truncate(info.buffer_size());

    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            detail: format!("only 8-bit PNG is supported, got {:?}", info.bit_depth),
        });
    }

    let (width, height) = (info.width, info.height);
    let pixels: Vec<u8> = match info.color_type {
        png::ColorType::Grayscale => buf,
        png::ColorType::GrayscaleAlpha => buf.chunks_exact(2).map(|px| px[0]).collect(),
        png::ColorType::Rgb => buf.chunks_exact(3).map(|px| luma(px[0], px[1], px[2])).collect(),
        png::ColorType::Rgba => buf.chunks_exact(4).map(|px| luma(px[0], px[1], px[2])).collect(),
        other => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                detail: format!("unsupported PNG color type {other:?}"),
            })
        }
    };

    GrayImage::new(width, height, 256, pixels)
}

/// Incremental PGM header tokenizer that tracks its byte offset for diagnostics.
struct PgmScanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PgmScanner<'a> {
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn next_uint(&mut self, path: &Path, what: &str) -> Result<u32> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::CorruptHeader {
                path: path.to_path_buf(),
                offset: start,
                detail: format!("expected {what}"),
            });
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("digits are ascii");
        text.parse().map_err(|_| Error::CorruptHeader {
            path: path.to_path_buf(),
            offset: start,
            detail: format!("{what} out of range"),
        })
    }
}

fn decode_pgm(path: &Path, bytes: &[u8]) -> Result<GrayImage> {
    let magic = bytes.get(0..2).ok_or_else(|| Error::CorruptHeader {
        path: path.to_path_buf(),
        offset: 0,
        detail: "file shorter than magic number".into(),
    })?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                detail: format!("unsupported PNM magic {:?}", String::from_utf8_lossy(magic)),
            })
        }
    };

    let mut scan = PgmScanner { bytes, pos: 2 };
    let width = scan.next_uint(path, "width")?;
    let height = scan.next_uint(path, "height")?;
    let maxval = scan.next_uint(path, "maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::CorruptHeader {
            path: path.to_path_buf(),
            offset: scan.pos,
            detail: format!("dimensions must be positive, got {width}x{height}"),
        });
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            detail: format!("maxval must be in [1, 255], got {maxval}"),
        });
    }

    let expected = width as usize * height as usize;
    let pixels = if binary {
        // Exactly one whitespace byte separates the header from raw data.
        let data_start = scan.pos + 1;
        let data = bytes.get(data_start..).unwrap_or(&[]);
        if data.len() < expected {
            return Err(Error::TruncatedData {
                path: path.to_path_buf(),
                offset: data_start + data.len(),
                expected,
                found: data.len(),
            });
        }
        data[..expected].to_vec()
    } else {
        let mut values = Vec::with_capacity(expected);
        for _ in 0..expected {
            scan.skip_separators();
            if scan.pos >= bytes.len() {
                return Err(Error::TruncatedData {
                    path: path.to_path_buf(),
                    offset: scan.pos,
                    expected,
                    found: values.len(),
                });
            }
            let v = scan.next_uint(path, "pixel value")?;
            if v > maxval {
                return Err(Error::CorruptHeader {
                    path: path.to_path_buf(),
                    offset: scan.pos,
                    detail: format!("pixel value {v} exceeds maxval {maxval}"),
                });
            }
            values.push(v as u8);
        }
        values
    };

    if pixels.iter().any(|&p| u32::from(p) > maxval) {
        return Err(Error::InvalidImage(format!(
            "pixel value exceeds maxval {maxval}"
        )));
    }
    GrayImage::new(width, height, 256, pixels)
}

/// Writes a binary PGM (P5, maxval 255).
pub fn save_pgm(img: &GrayImage, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    write!(w, "P5\n{} {}\n255\n", img.width, img.height).map_err(io_err)?;
    w.write_all(&img.pixels).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Writes an 8-bit grayscale PNG.
pub fn save_png(img: &GrayImage, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), img.width, img.height);
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| Error::Png(path.to_path_buf(), e.to_string()))?;
    writer
        .write_image_data(&img.pixels)
        .map_err(|e| Error::Png(path.to_path_buf(), e.to_string()))
}

/// Saves in the format implied by the extension (`.png` or anything else as PGM).
pub fn save_gray_image(img: &GrayImage, path: &Path) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("png") => save_png(img, path),
        _ => save_pgm(img, path),
    }
}

/// Writes `level,frequency` CSV rows for every nonzero histogram bin.
pub fn write_histogram_csv(hist: &Histogram, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "level,frequency")?;
    for (level, &freq) in hist.bins.iter().enumerate() {
        if freq > 0.0 {
            writeln!(out, "{level},{freq}")?;
        }
    }
    Ok(())
}
