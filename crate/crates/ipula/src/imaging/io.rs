//! Grayscale image I/O: portable graymap (P2/P5, 8- and 16-bit) parsed and
//! written directly, PNG (8- and 16-bit grayscale) through the `image`
//! crate. Loading scales to `[0, 1]`; saving clamps to `[0, 1]` and
//! quantizes.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Image;

/// Output quantization depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    fn maxval(self) -> u32 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }
}

fn extension(path: &Path) -> Result<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .ok_or_else(|| Error::UnsupportedFormat(format!("{}: no file extension", path.display())))
}

/// Load an 8- or 16-bit grayscale image (`.pgm` or `.png`), scaled to
/// `[0, 1]`.
pub fn load_image<F: Scalar>(path: &Path) -> Result<Image<F>> {
    match extension(path)?.as_str() {
        "pgm" => load_pgm(path),
        "png" => load_png(path),
        other => Err(Error::UnsupportedFormat(format!(
            "{other:?} images are not supported (use pgm or png)"
        ))),
    }
}

/// Save as grayscale `.pgm` (binary P5) or `.png` at the requested depth,
/// clamping to `[0, 1]` first.
pub fn save_image<F: Scalar>(image: &Image<F>, path: &Path, depth: BitDepth) -> Result<()> {
    match extension(path)?.as_str() {
        "pgm" => save_pgm(image, path, depth),
        "png" => save_png(image, path, depth),
        other => Err(Error::UnsupportedFormat(format!(
            "{other:?} images are not supported (use pgm or png)"
        ))),
    }
}

fn quantize<F: Scalar>(pixels: &[F], maxval: u32) -> Vec<u32> {
    pixels
        .iter()
        .map(|&p| {
            let c = p.to_f64_lossy().clamp(0.0, 1.0);
            (c * maxval as f64).round() as u32
        })
        .collect()
}

fn save_pgm<F: Scalar>(image: &Image<F>, path: &Path, depth: BitDepth) -> Result<()> {
    let maxval = depth.maxval();
    let mut out = format!("P5\n{} {}\n{}\n", image.width(), image.height(), maxval).into_bytes();
    for q in quantize(image.pixels(), maxval) {
        match depth {
            BitDepth::Eight => out.push(q as u8),
            BitDepth::Sixteen => out.extend_from_slice(&(q as u16).to_be_bytes()),
        }
    }
    fs::write(path, out)?;
    Ok(())
}

struct PnmReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PnmReader<'a> {
    fn corrupt(&self, what: &str) -> Error {
        Error::CorruptFile(format!("graymap: {what} at byte {}", self.pos))
    }

    /// Skip whitespace and `#` comments.
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next_unsigned(&mut self) -> Result<u32> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.corrupt("expected an unsigned integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| self.corrupt("integer out of range"))
    }

    fn rest(&self) -> &'a [u8] {
        &self.bytes[self.pos.min(self.bytes.len())..]
    }
}

fn load_pgm<F: Scalar>(path: &Path) -> Result<Image<F>> {
    let bytes = fs::read(path)?;
    let mut r = PnmReader { bytes: &bytes, pos: 0 };
    if bytes.len() < 2 {
        return Err(r.corrupt("file too short for a magic number"));
    }
    let magic = &bytes[0..2];
    r.pos = 2;
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        _ => return Err(r.corrupt("magic number is not P2 or P5")),
    };
    let width = r.next_unsigned()? as usize;
    let height = r.next_unsigned()? as usize;
    let maxval = r.next_unsigned()?;
    if width == 0 || height == 0 {
        return Err(r.corrupt("zero image dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(r.corrupt("maxval must be in [1, 65535]"));
    }
    let count = width * height;
    let scale = 1.0 / maxval as f64;

    let mut pixels = Vec::with_capacity(count);
    if binary {
        // Exactly one separator byte after maxval, then raw samples.
        if r.rest().is_empty() || !bytes[r.pos].is_ascii_whitespace() {
            return Err(r.corrupt("missing separator before binary samples"));
        }
        r.pos += 1;
        let wide = maxval > 255;
        let needed = count * if wide { 2 } else { 1 };
        let data = r.rest();
        if data.len() < needed {
            return Err(r.corrupt("binary sample data truncated"));
        }
        for i in 0..count {
            let v = if wide {
                u16::from_be_bytes([data[2 * i], data[2 * i + 1]]) as u32
            } else {
                data[i] as u32
            };
            if v > maxval {
                return Err(r.corrupt("sample exceeds maxval"));
            }
            pixels.push(F::cast(v as f64 * scale));
        }
    } else {
        for _ in 0..count {
            let v = r.next_unsigned()?;
            if v > maxval {
                return Err(r.corrupt("sample exceeds maxval"));
            }
            pixels.push(F::cast(v as f64 * scale));
        }
    }
    Image::new(width, height, pixels)
}

fn save_png<F: Scalar>(image: &Image<F>, path: &Path, depth: BitDepth) -> Result<()> {
    let (w, h) = (image.width() as u32, image.height() as u32);
    let q = quantize(image.pixels(), depth.maxval());
    let encode_err = |e: image::ImageError| Error::CorruptFile(format!("png encode: {e}"));
    match depth {
        BitDepth::Eight => {
            let data: Vec<u8> = q.into_iter().map(|v| v as u8).collect();
            let buf = image::ImageBuffer::<image::Luma<u8>, _>::from_raw(w, h, data)
                .expect("buffer length matches dimensions");
            buf.save(path).map_err(encode_err)
        }
        BitDepth::Sixteen => {
            let data: Vec<u16> = q.into_iter().map(|v| v as u16).collect();
            let buf = image::ImageBuffer::<image::Luma<u16>, _>::from_raw(w, h, data)
                .expect("buffer length matches dimensions");
            buf.save(path).map_err(encode_err)
        }
    }
}

fn load_png<F: Scalar>(path: &Path) -> Result<Image<F>> {
    let dynamic = image::open(path).map_err(|e| Error::CorruptFile(format!("png decode: {e}")))?;
    match dynamic {
        image::DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            let pixels = buf.into_raw().into_iter().map(|v| F::cast(v as f64 / 255.0)).collect();
            Image::new(w as usize, h as usize, pixels)
        }
        image::DynamicImage::ImageLuma16(buf) => {
            let (w, h) = buf.dimensions();
            let pixels =
                buf.into_raw().into_iter().map(|v| F::cast(v as f64 / 65535.0)).collect();
            Image::new(w as usize, h as usize, pixels)
        }
        other => Err(Error::UnsupportedFormat(format!(
            "PNG color type {:?} (expected 8- or 16-bit grayscale)",
            other.color()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::phantom;

    fn tmpdir() -> tempfile::TempDir {
        tempfile::tempdir().expect("create temp dir")
    }

    #[test]
    fn pgm_eight_bit_round_trip_within_half_level() {
        let dir = tmpdir();
        let path = dir.path().join("img.pgm");
        let img = phantom::<f64>(32, 32).unwrap();
        save_image(&img, &path, BitDepth::Eight).unwrap();
        let back = load_image::<f64>(&path).unwrap();
        assert_eq!(back.width(), 32);
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn pgm_sixteen_bit_round_trip_is_exact_after_first_quantization() {
        let dir = tmpdir();
        let p1 = dir.path().join("a.pgm");
        let p2 = dir.path().join("b.pgm");
        let img = phantom::<f64>(16, 16).unwrap();
        save_image(&img, &p1, BitDepth::Sixteen).unwrap();
        let once = load_image::<f64>(&p1).unwrap();
        save_image(&once, &p2, BitDepth::Sixteen).unwrap();
        let twice = load_image::<f64>(&p2).unwrap();
        assert_eq!(once, twice);
        for (a, b) in img.pixels().iter().zip(once.pixels()) {
            assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-15);
        }
    }

    #[test]
    fn ascii_graymap_with_comments_parses() {
        let dir = tmpdir();
        let path = dir.path().join("ascii.pgm");
        std::fs::write(&path, b"P2\n# a comment\n2 2\n# another\n255\n0 128\n255 64\n").unwrap();
        let img = load_image::<f64>(&path).unwrap();
        assert_eq!(img.width(), 2);
        assert_eq!(img.height(), 2);
        let px = img.pixels();
        assert_eq!(px[0], 0.0);
        assert!((px[1] - 128.0 / 255.0).abs() < 1e-15);
        assert_eq!(px[2], 1.0);
    }

    #[test]
    fn corrupt_and_unsupported_inputs_are_reported() {
        let dir = tmpdir();
        let truncated = dir.path().join("t.pgm");
        std::fs::write(&truncated, b"P5\n4 4\n255\n\x00\x01").unwrap();
        assert!(matches!(load_image::<f64>(&truncated), Err(Error::CorruptFile(_))));

        let garbage = dir.path().join("g.png");
        std::fs::write(&garbage, b"not a png at all").unwrap();
        assert!(matches!(load_image::<f64>(&garbage), Err(Error::CorruptFile(_))));

        let overflow = dir.path().join("o.pgm");
        std::fs::write(&overflow, b"P2\n1 1\n100\n101\n").unwrap();
        assert!(matches!(load_image::<f64>(&overflow), Err(Error::CorruptFile(_))));

        let odd = dir.path().join("x.jpg");
        std::fs::write(&odd, b"whatever").unwrap();
        assert!(matches!(load_image::<f64>(&odd), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn png_round_trips_at_both_depths() {
        let dir = tmpdir();
        let img = phantom::<f64>(24, 24).unwrap();

        let p8 = dir.path().join("img8.png");
        save_image(&img, &p8, BitDepth::Eight).unwrap();
        let back8 = load_image::<f64>(&p8).unwrap();
        for (a, b) in img.pixels().iter().zip(back8.pixels()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }

        let p16 = dir.path().join("img16.png");
        save_image(&img, &p16, BitDepth::Sixteen).unwrap();
        let back16 = load_image::<f64>(&p16).unwrap();
        for (a, b) in img.pixels().iter().zip(back16.pixels()) {
            assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-15);
        }
    }
}
