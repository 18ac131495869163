//! Portable FloatMap I/O.
//!
//! Header: `PF` (RGB) or `Pf` (gray), then width and height, then a scale
//! whose sign gives the byte order (negative: little-endian). Scanlines are
//! stored bottom to top.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::HdrImage;
use crate::error::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn load_pfm(path: impl AsRef<Path>) -> Result<HdrImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(io_err(path))?;
    decode_pfm(&bytes)
}

pub fn save_pfm(img: &HdrImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = fs::File::create(path).map_err(io_err(path))?;
    file.write_all(&encode_pfm(img)).map_err(io_err(path))
}

/// Colour PFM, little-endian.
pub fn encode_pfm(img: &HdrImage) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    let mut out = format!("PF\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(w * h * 12);
    for row in (0..h).rev() {
        for px in &img.pixels()[row * w..(row + 1) * w] {
            for c in px {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn token(&mut self, what: &str) -> Result<&'a str> {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| Error::MalformedHeader(format!("{what} is not ASCII")))
    }
}

pub fn decode_pfm(bytes: &[u8]) -> Result<HdrImage> {
    let mut cur = Cursor { bytes, pos: 0 };
    let channels = match cur.token("magic")? {
        "PF" => 3,
        "Pf" => 1,
        other => return Err(Error::MalformedHeader(format!("bad magic {other:?}"))),
    };
    let dim = |s: &str, what| {
        s.parse::<u64>()
            .map_err(|_| Error::MalformedHeader(format!("{what} {s:?} is not an integer")))
    };
    let width = dim(cur.token("width")?, "width")?;
    let height = dim(cur.token("height")?, "height")?;
    let scale_tok = cur.token("scale")?;
    let scale: f64 = scale_tok
        .parse()
        .map_err(|_| Error::MalformedHeader(format!("scale {scale_tok:?} is not a number")))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::MalformedHeader(format!(
            "scale {scale} carries no byte order"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "empty image {width}x{height}"
        )));
    }
    // Exactly one whitespace byte separates the header from the data.
    if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
        return Err(Error::MalformedHeader("no separator after scale".into()));
    }
    let data = &bytes[cur.pos + 1..];

    let overflow = Error::DimensionOverflow { width, height };
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .and_then(|n| usize::try_from(n).ok())
        .ok_or(overflow)?;
    let expected = count
        .checked_mul(4)
        .ok_or(Error::DimensionOverflow { width, height })?;
    if data.len() < expected {
        return Err(Error::TruncatedData {
            expected,
            found: data.len(),
        });
    }

    let little = scale < 0.0;
    let floats: Vec<f32> = data[..expected]
        .chunks_exact(4)
        .map(|b| {
            let b = [b[0], b[1], b[2], b[3]];
            if little {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            }
        })
        .collect();

    let (w, h, ch) = (width as usize, height as usize, channels as usize);
    let mut pixels = Vec::with_capacity(w * h);
    for row in (0..h).rev() {
        for x in 0..w {
            let i = (row * w + x) * ch;
            pixels.push(if ch == 3 {
                [floats[i], floats[i + 1], floats[i + 2]]
            } else {
                [floats[i]; 3]
            });
        }
    }
    HdrImage::new(w, h, pixels)
}
