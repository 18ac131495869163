//! Gray-disk and HDR noise-injection experiments.
//!
//! Every pixel (or HDR channel) becomes one independent scheme run whose
//! random stream is derived from its position, so parallel and serial
//! execution agree bit for bit.

mod pfm;
mod sdr;
mod tone;

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phase_dist::{fraction_to_phase, Fraction};
use crate::rng::RandomStream;
use crate::schemes::{EstimateRecord, SchemeConfig};

pub use pfm::{decode_pfm, encode_pfm, load_pfm, save_pfm};
pub use sdr::{save_png8, Png8Source};
pub use tone::{gamma_decode, gamma_encode, tone_map_aces, GAMMA};

pub const DEFAULT_DISK_SIZE: usize = 256;
pub const DEFAULT_B: u32 = 16;
pub const DEFAULT_B0: u32 = 4;
pub const DIFF_THRESHOLDS: [f64; 3] = [0.05, 0.1, 0.2];

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidConfig(format!(
            "image dimensions must be positive, got {width}x{height}"
        )));
    }
    match width.checked_mul(height) {
        Some(n) if n == len => Ok(()),
        Some(n) => Err(Error::TruncatedData {
            expected: n,
            found: len,
        }),
        None => Err(Error::DimensionOverflow {
            width: width as u64,
            height: height as u64,
        }),
    }
}

/// Row-major gray image with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarImage {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(width, height, values.len())?;
        if let Some(&v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidFraction(v));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }
}

/// Row-major linear-light RGB image.
#[derive(Debug, Clone, PartialEq)]
pub struct HdrImage {
    width: usize,
    height: usize,
    pixels: Vec<[f32; 3]>,
}

impl HdrImage {
    /// Rejects negative or non-finite components.
    pub fn new(width: usize, height: usize, pixels: Vec<[f32; 3]>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        for (i, px) in pixels.iter().enumerate() {
            if px.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite(i));
            }
            if let Some(c) = px.iter().find(|c| **c < 0.0) {
                return Err(Error::OutOfRange {
                    what: "HDR component",
                    value: *c as f64,
                });
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[f32; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f32; 3] {
        self.pixels[y * self.width + x]
    }
}

/// Fixed-point layout and estimator for the HDR pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    /// Total fixed-point bits.
    pub b: u32,
    /// Integer bits; inputs are scaled by `2^-b0` before simulation.
    pub b0: u32,
    pub scheme: SchemeConfig,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(scheme: SchemeConfig, seed: u64) -> Self {
        Self {
            b: DEFAULT_B,
            b0: DEFAULT_B0,
            scheme,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.b == 0 || self.b > 52 || self.b0 > self.b {
            return Err(Error::InvalidConfig(format!(
                "need 0 <= b0 <= b and 1 <= b <= 52, got b={} b0={}",
                self.b, self.b0
            )));
        }
        self.scheme.validate()
    }

    pub fn scale(&self) -> f64 {
        (self.b0 as f64).exp2()
    }

    /// Fraction-space value fed to the scheme: `c·2^-b0`, clamped, truncated
    /// to `b` fractional bits.
    pub fn quantize(&self, c: f64) -> f64 {
        let v = (c / self.scale()).clamp(0.0, 1.0);
        let steps = (self.b as f64).exp2();
        (v * steps).floor() / steps
    }
}

/// Square radial ramp: 0 at the center pixel, rising linearly to 1 at
/// distance `size/2` and beyond.
pub fn generate_gray_disk(size: usize) -> Result<ScalarImage> {
    if size < 2 {
        return Err(Error::InvalidConfig(format!(
            "disk size must be >= 2, got {size}"
        )));
    }
    let c = (size / 2) as f64;
    let radius = size as f64 / 2.0;
    let values = (0..size * size)
        .map(|i| {
            let dx = (i % size) as f64 - c;
            let dy = (i / size) as f64 - c;
            (dx.hypot(dy) / radius).min(1.0)
        })
        .collect();
    ScalarImage::new(size, size, values)
}

fn run_pixel(scheme: &SchemeConfig, v: f64, seed: u64, stream: u64) -> Result<EstimateRecord> {
    let phi = fraction_to_phase(Fraction::new(v)?);
    scheme.estimate(phi, &RandomStream::new(seed, stream))
}

/// One noisy estimate per pixel, stream = pixel index.
pub fn simulate_scalar(img: &ScalarImage, scheme: &SchemeConfig, seed: u64) -> Result<ScalarImage> {
    scheme.validate()?;
    let values = img
        .values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            run_pixel(scheme, v, seed, i as u64).map(|r| r.fraction_estimate.clamp(0.0, 1.0))
        })
        .collect::<Result<Vec<_>>>()?;
    ScalarImage::new(img.width, img.height, values)
}

/// Per-channel record of one HDR simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelTrace {
    pub stream: u64,
    /// Quantized fraction-space input.
    pub fraction_in: f64,
    pub record: EstimateRecord,
}

/// Like [`simulate_hdr`], also returning one trace entry per channel in
/// stream order.
pub fn simulate_hdr_traced(
    img: &HdrImage,
    cfg: &PipelineConfig,
) -> Result<(HdrImage, Vec<ChannelTrace>)> {
    cfg.validate()?;
    let scale = cfg.scale();
    let traces = (0..img.pixels.len() * 3)
        .into_par_iter()
        .map(|k| {
            let c = img.pixels[k / 3][k % 3] as f64;
            if !c.is_finite() {
                return Err(Error::NonFinite(k / 3));
            }
            let v = cfg.quantize(c);
            let stream = k as u64;
            let record = run_pixel(&cfg.scheme, v, cfg.seed, stream)?;
            Ok(ChannelTrace {
                stream,
                fraction_in: v,
                record,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pixels = traces
        .chunks_exact(3)
        .map(|ch| {
            let out =
                |t: &ChannelTrace| (t.record.fraction_estimate.clamp(0.0, 1.0) * scale) as f32;
            [out(&ch[0]), out(&ch[1]), out(&ch[2])]
        })
        .collect();
    Ok((HdrImage::new(img.width, img.height, pixels)?, traces))
}

/// Scale, quantize, inject scheme noise, scale back. Stream = `3·pixel + channel`.
pub fn simulate_hdr(img: &HdrImage, cfg: &PipelineConfig) -> Result<HdrImage> {
    simulate_hdr_traced(img, cfg).map(|(out, _)| out)
}

/// Exceedance counts of `|noisy - reference|` in fraction space.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffReport {
    pub samples: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    /// `(threshold, count strictly above)`.
    pub exceedances: Vec<(f64, usize)>,
}

impl DiffReport {
    pub fn from_errors(errors: impl IntoIterator<Item = f64>, thresholds: &[f64]) -> Self {
        let mut samples = 0;
        let mut max_abs = 0.0f64;
        let mut sum = 0.0;
        let mut counts = vec![0usize; thresholds.len()];
        for e in errors {
            let e = e.abs();
            samples += 1;
            sum += e;
            max_abs = max_abs.max(e);
            for (n, t) in counts.iter_mut().zip(thresholds) {
                *n += usize::from(e > *t);
            }
        }
        Self {
            samples,
            max_abs,
            mean_abs: if samples == 0 {
                0.0
            } else {
                sum / samples as f64
            },
            exceedances: thresholds.iter().copied().zip(counts).collect(),
        }
    }

    pub fn scalar(reference: &ScalarImage, noisy: &ScalarImage) -> Result<Self> {
        same_shape(reference.width, reference.height, noisy.width, noisy.height)?;
        let errors = reference
            .values
            .iter()
            .zip(&noisy.values)
            .map(|(a, b)| b - a);
        Ok(Self::from_errors(errors, &DIFF_THRESHOLDS))
    }

    /// Reference channels are clamped to the representable range first;
    /// errors are divided by `2^b0`.
    pub fn hdr(reference: &HdrImage, noisy: &HdrImage, b0: u32) -> Result<Self> {
        same_shape(reference.width, reference.height, noisy.width, noisy.height)?;
        let scale = (b0 as f64).exp2();
        let errors = reference
            .pixels
            .iter()
            .zip(&noisy.pixels)
            .flat_map(|(a, b)| (0..3).map(move |c| (a[c] as f64, b[c] as f64)))
            .map(|(a, b)| b / scale - (a / scale).clamp(0.0, 1.0));
        Ok(Self::from_errors(errors, &DIFF_THRESHOLDS))
    }

    pub fn count_above(&self, threshold: f64) -> Option<usize> {
        self.exceedances
            .iter()
            .find(|(t, _)| *t == threshold)
            .map(|(_, n)| *n)
    }
}

fn same_shape(w0: usize, h0: usize, w1: usize, h1: usize) -> Result<()> {
    if (w0, h0) == (w1, h1) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "image shapes differ: {w0}x{h0} vs {w1}x{h1}"
        )))
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples {}", self.samples)?;
        writeln!(f, "max_abs {:.6}", self.max_abs)?;
        writeln!(f, "mean_abs {:.6}", self.mean_abs)?;
        for (t, n) in &self.exceedances {
            writeln!(f, "above {t} {n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_dist::GridSize;
    use crate::schemes::{AbpeaConfig, BpeaConfig, McConfig, PeaConfig};

    fn pea(t: u32) -> SchemeConfig {
        SchemeConfig::Pea(PeaConfig {
            grid: GridSize::from_t(t).unwrap(),
        })
    }

    fn all_schemes() -> Vec<SchemeConfig> {
        let g = GridSize::from_t(6).unwrap();
        vec![
            SchemeConfig::Mc(McConfig { n_shot: 16 }),
            pea(6),
            SchemeConfig::Bpea(BpeaConfig { grid: g, n_shot: 3 }),
            SchemeConfig::Abpea(AbpeaConfig {
                grid: g,
                alpha: 0.8,
                n_min: 3,
                n_max: 8,
            }),
        ]
    }

    #[test]
    fn disk_examples() {
        let d = generate_gray_disk(256).unwrap();
        assert_eq!(d.get(128, 128), 0.0);
        assert_eq!(d.get(0, 0), 1.0);
        assert_eq!(d.get(255, 255), 1.0);
        assert_eq!(d.get(128 + 64, 128), 0.5);
        assert_eq!(d.get(128, 128 - 32), 0.25);
        assert!(generate_gray_disk(1).is_err());
        assert_eq!(generate_gray_disk(2).unwrap().values().len(), 4);
    }

    #[test]
    fn image_validation() {
        assert!(ScalarImage::new(2, 1, vec![0.0, 1.5]).is_err());
        assert!(ScalarImage::new(0, 1, vec![]).is_err());
        assert!(ScalarImage::new(2, 2, vec![0.0; 3]).is_err());
        assert!(matches!(
            HdrImage::new(1, 1, vec![[0.0, f32::NAN, 0.0]]),
            Err(Error::NonFinite(0))
        ));
        assert!(HdrImage::new(1, 1, vec![[0.0, -1.0, 0.0]]).is_err());
    }

    #[test]
    fn zero_scalar_stays_zero() {
        let img = ScalarImage::new(4, 4, vec![0.0; 16]).unwrap();
        for s in all_schemes() {
            let out = simulate_scalar(&img, &s, 1).unwrap();
            assert!(out.values().iter().all(|v| *v == 0.0), "{s}");
        }
    }

    #[test]
    fn on_grid_constant_is_preserved_by_pea() {
        // phi = 1/8 lies on the T = 64 grid.
        let v = (std::f64::consts::PI / 8.0).sin().powi(2);
        let img = ScalarImage::new(5, 3, vec![v; 15]).unwrap();
        let out = simulate_scalar(&img, &pea(6), 9).unwrap();
        for o in out.values() {
            assert!((o - v).abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_range_and_determinism() {
        let disk = generate_gray_disk(24).unwrap();
        for s in all_schemes() {
            let a = simulate_scalar(&disk, &s, 5).unwrap();
            let b = simulate_scalar(&disk, &s, 5).unwrap();
            assert_eq!(a, b);
            assert!(a.values().iter().all(|v| (0.0..=1.0).contains(v)));
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .unwrap();
            let serial = pool.install(|| simulate_scalar(&disk, &s, 5).unwrap());
            assert_eq!(a, serial);
        }
    }

    #[test]
    fn scalar_matches_scheme_streams() {
        let disk = generate_gray_disk(8).unwrap();
        let s = all_schemes()[3];
        let out = simulate_scalar(&disk, &s, 77).unwrap();
        for (i, v) in disk.values().iter().enumerate() {
            let r = run_pixel(&s, *v, 77, i as u64).unwrap();
            assert_eq!(out.values()[i], r.fraction_estimate.clamp(0.0, 1.0));
        }
    }

    #[test]
    fn hdr_zero_and_endpoint() {
        let cfg = PipelineConfig::new(pea(8), 3);
        let zero = HdrImage::new(2, 2, vec![[0.0; 3]; 4]).unwrap();
        assert_eq!(simulate_hdr(&zero, &cfg).unwrap(), zero);
        let top = HdrImage::new(1, 1, vec![[16.0, 40.0, 16.0]]).unwrap();
        assert_eq!(simulate_hdr(&top, &cfg).unwrap().pixel(0, 0), [16.0; 3]);
    }

    #[test]
    fn quantization_bound() {
        let cfg = PipelineConfig::new(pea(4), 0);
        let res = ((cfg.b0 as f64) - cfg.b as f64).exp2();
        for i in 0..2000 {
            let c = i as f64 * 0.007919;
            if c > 16.0 {
                break;
            }
            let back = cfg.quantize(c) * cfg.scale();
            assert!(back <= c && c - back < res);
        }
    }

    #[test]
    fn hdr_trace_plumbing() {
        let px: Vec<[f32; 3]> = (0..12)
            .map(|i| [i as f32 * 1.3, 0.25, 15.0 - i as f32])
            .collect();
        let img = HdrImage::new(4, 3, px).unwrap();
        for s in all_schemes() {
            let cfg = PipelineConfig::new(s, 11);
            let (out, trace) = simulate_hdr_traced(&img, &cfg).unwrap();
            assert_eq!(trace.len(), 36);
            let mut max_err = 0.0f64;
            for (k, t) in trace.iter().enumerate() {
                assert_eq!(t.stream, k as u64);
                let direct = run_pixel(&s, t.fraction_in, 11, k as u64).unwrap();
                assert_eq!(direct, t.record);
                max_err = max_err.max((t.record.fraction_estimate - t.fraction_in).abs());
            }
            let quant = ((cfg.b0 as f64) - cfg.b as f64).exp2();
            for (a, b) in img.pixels().iter().zip(out.pixels()) {
                for c in 0..3 {
                    assert!((0.0..=16.0).contains(&b[c]));
                    let d = (a[c] as f64 - b[c] as f64).abs();
                    assert!(d <= 16.0 * max_err + quant + 1e-5, "{s}: {d}");
                }
            }
        }
    }

    #[test]
    fn hdr_rejects_bad_config() {
        let img = HdrImage::new(1, 1, vec![[1.0; 3]]).unwrap();
        let mut cfg = PipelineConfig::new(pea(4), 0);
        cfg.b0 = 17;
        assert!(simulate_hdr(&img, &cfg).is_err());
    }

    #[test]
    fn diff_report_counts() {
        let r = DiffReport::from_errors([0.0, -0.06, 0.15, 0.3, -0.25], &DIFF_THRESHOLDS);
        assert_eq!(r.count_above(0.05), Some(4));
        assert_eq!(r.count_above(0.1), Some(3));
        assert_eq!(r.count_above(0.2), Some(2));
        assert_eq!(r.max_abs, 0.3);
        let text = r.to_string();
        assert!(text.contains("above 0.2 2"));

        let a = HdrImage::new(1, 1, vec![[0.0, 32.0, 8.0]]).unwrap();
        let b = HdrImage::new(1, 1, vec![[1.6, 16.0, 8.0]]).unwrap();
        let r = DiffReport::hdr(&a, &b, 4).unwrap();
        assert_eq!(r.count_above(0.05), Some(1));
        assert!((r.max_abs - 0.1).abs() < 1e-6);
    }
}
