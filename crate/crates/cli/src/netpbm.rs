//! Binary netpbm rasters: PGM (P5) for single-channel, PPM (P6) for
//! three-channel images, maxval fixed at 255.
//!
//! The reader follows the pixmap header grammar — any whitespace between
//! tokens, `#` comments through end of line — and rejects every other
//! maxval. Samples map linearly: byte / 255 on ingest; on save samples are
//! clamped to `[0, 1]` and rounded half away from zero.

use std::fs;
use std::path::Path;

use shiftdeconv_core::image::ImageRaster;

use crate::error::CliError;

fn format_error(path: &Path, detail: &str) -> CliError {
    CliError::Format {
        name: "ImageFormat",
        detail: format!("{}: {detail}", path.display()),
    }
}

/// Quick check whether a file starts with a netpbm magic we understand.
pub fn looks_like_netpbm(bytes: &[u8]) -> bool {
    bytes.starts_with(b"P5") || bytes.starts_with(b"P6")
}

pub fn read_image(path: &Path) -> Result<ImageRaster, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_image(&bytes).map_err(|detail| format_error(path, &detail))
}

pub fn parse_image(bytes: &[u8]) -> Result<ImageRaster, String> {
    let channels = match bytes.get(0..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err("not a binary PGM (P5) or PPM (P6) file".into()),
    };
    let mut pos = 2;
    let width = read_header_int(bytes, &mut pos)?;
    let height = read_header_int(bytes, &mut pos)?;
    let maxval = read_header_int(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(format!("maxval {maxval} unsupported; only 255"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err("missing whitespace after maxval".into()),
    }
    let expected = width * height * channels;
    let raster = bytes
        .get(pos..pos + expected)
        .ok_or_else(|| format!("raster truncated: expected {expected} bytes"))?;
    if width == 0 || height == 0 {
        return Err("zero image dimension".into());
    }
    let samples = raster.iter().map(|&b| b as f64 / 255.0).collect();
    ImageRaster::new(width, height, channels, samples).map_err(|e| e.to_string())
}

fn read_header_int(bytes: &[u8], pos: &mut usize) -> Result<usize, String> {
    // Skip whitespace and comments.
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            _ => break,
        }
    }
    let start = *pos;
    while matches!(bytes.get(*pos), Some(b) if b.is_ascii_digit()) {
        *pos += 1;
    }
    if *pos == start {
        return Err("expected an integer in the header".into());
    }
    std::str::from_utf8(&bytes[start..*pos])
        .unwrap()
        .parse()
        .map_err(|_| "header integer out of range".into())
}

/// Saves 1-channel rasters as P5 and 3-channel as P6.
pub fn write_image(path: &Path, img: &ImageRaster) -> Result<(), CliError> {
    fs::write(path, render_image(img)).map_err(|e| CliError::io(path, e))
}

pub fn render_image(img: &ImageRaster) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.samples().iter().map(|&v| quantize(v)));
    out
}

/// byte = round(clamp(sample, 0, 1) * 255), round half away from zero.
fn quantize(sample: f64) -> u8 {
    (sample.clamp(0.0, 1.0) * 255.0).round() as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse_round_trip() {
        let samples: Vec<f64> = (0..12).map(|i| i as f64 / 11.0).collect();
        let img = ImageRaster::new(2, 2, 3, samples).unwrap();
        let bytes = render_image(&img);
        assert!(bytes.starts_with(b"P6\n2 2\n255\n"));
        let back = parse_image(&bytes).unwrap();
        // Quantized once; rendering again must be byte-identical.
        assert_eq!(render_image(&back), bytes);
    }

    #[test]
    fn header_accepts_whitespace_and_comments() {
        let mut bytes = b"P5 # comment\n# another comment\n  3\t1 # w h\n255 ".to_vec();
        bytes.extend_from_slice(&[0u8, 128, 255]);
        let img = parse_image(&bytes).unwrap();
        assert_eq!((img.width(), img.height(), img.channels()), (3, 1, 1));
        assert_eq!(img.sample(2, 0, 0), 1.0);
        assert!((img.sample(1, 0, 0) - 128.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_maxval_and_magic_are_rejected() {
        assert!(parse_image(b"P5\n1 1\n65535\n\x00\x00").is_err());
        assert!(parse_image(b"P4\n1 1\n").is_err());
        assert!(parse_image(b"P5\n2 2\n255\n\x00\x00").is_err()); // truncated
    }

    #[test]
    fn quantization_rounds_half_away_from_zero() {
        assert_eq!(quantize(0.0), 0);
        assert_eq!(quantize(1.0), 255);
        assert_eq!(quantize(-0.5), 0);
        assert_eq!(quantize(2.0), 255);
        assert_eq!(quantize(0.5 / 255.0), 1); // exactly half rounds up
    }
}
