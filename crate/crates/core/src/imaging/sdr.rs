//! 8-bit PNG output.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use super::{gamma_encode, tone_map_aces, HdrImage, ScalarImage};
use crate::error::{Error, Result};

/// An image that can be written as an 8-bit PNG.
pub trait Png8Source {
    fn dimensions(&self) -> (usize, usize);
    fn color(&self) -> png::ColorType;
    /// Row-major 8-bit samples.
    fn to_bytes(&self) -> Result<Vec<u8>>;
}

fn quantize(x: f64) -> u8 {
    (x * 255.0).round().clamp(0.0, 255.0) as u8
}

impl Png8Source for ScalarImage {
    fn dimensions(&self) -> (usize, usize) {
        (self.width(), self.height())
    }

    fn color(&self) -> png::ColorType {
        png::ColorType::Grayscale
    }

    fn to_bytes(&self) -> Result<Vec<u8>> {
        self.values()
            .iter()
            .map(|v| gamma_encode(*v).map(quantize))
            .collect()
    }
}

impl Png8Source for HdrImage {
    fn dimensions(&self) -> (usize, usize) {
        (self.width(), self.height())
    }

    fn color(&self) -> png::ColorType {
        png::ColorType::Rgb
    }

    /// ACES tone map, then gamma, per channel.
    fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(self.pixels().len() * 3);
        for px in self.pixels() {
            for c in px {
                out.push(quantize(gamma_encode(tone_map_aces(*c as f64)?)?));
            }
        }
        Ok(out)
    }
}

pub fn save_png8<I: Png8Source + ?Sized>(img: &I, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = img.dimensions();
    let (Ok(w32), Ok(h32)) = (u32::try_from(w), u32::try_from(h)) else {
        return Err(Error::DimensionOverflow {
            width: w as u64,
            height: h as u64,
        });
    };
    let data = img.to_bytes()?;
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), w32, h32);
    encoder.set_color(img.color());
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&data)?;
    writer.finish()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_scalar_is_255() {
        let img = ScalarImage::new(3, 2, vec![1.0; 6]).unwrap();
        assert!(img.to_bytes().unwrap().iter().all(|b| *b == 255));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.png");
        save_png8(&img, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[1..4], b"PNG");
    }

    #[test]
    fn sdr_path_is_order_preserving() {
        let px: Vec<[f32; 3]> = (0..64).map(|i| [i as f32 * 0.25; 3]).collect();
        let img = HdrImage::new(64, 1, px).unwrap();
        let bytes = img.to_bytes().unwrap();
        assert_eq!(bytes[0], 0);
        assert!(bytes
            .chunks(3)
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[0][0] <= w[1][0]));
    }
}
