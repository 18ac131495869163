use crate::error::{Error, Result};

pub const GAMMA: f64 = 2.2;

/// Single-curve ACES filmic fit, clamped to `[0, 1]`.
pub fn tone_map_aces(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::OutOfRange {
            what: "tone map input",
            value: x,
        });
    }
    let y = x * (2.51 * x + 0.03) / (x * (2.43 * x + 0.59) + 0.14);
    Ok(y.clamp(0.0, 1.0))
}

/// `x^(1/2.2)`.
pub fn gamma_encode(x: f64) -> Result<f64> {
    unit("gamma input", x).map(|x| x.powf(1.0 / GAMMA))
}

/// `x^2.2`.
pub fn gamma_decode(x: f64) -> Result<f64> {
    unit("gamma input", x).map(|x| x.powf(GAMMA))
}

fn unit(what: &'static str, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::OutOfRange { what, value: x })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tone_map_examples() {
        assert_eq!(tone_map_aces(0.0).unwrap(), 0.0);
        assert_eq!(tone_map_aces(100.0).unwrap(), 1.0);
        assert!(tone_map_aces(-0.1).is_err());
        assert!(tone_map_aces(f64::NAN).is_err());
    }

    #[test]
    fn tone_map_monotone() {
        let mut prev = 0.0;
        for i in 0..=10_000 {
            let y = tone_map_aces(i as f64 * 1e-3).unwrap();
            assert!(y >= prev);
            prev = y;
        }
    }

    #[test]
    fn gamma() {
        assert_eq!(gamma_encode(0.0).unwrap(), 0.0);
        assert_eq!(gamma_encode(1.0).unwrap(), 1.0);
        assert!((gamma_encode(0.5).unwrap() - 0.7297400528407231).abs() < 1e-15);
        assert!(gamma_encode(1.5).is_err());
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let back = gamma_decode(gamma_encode(x).unwrap()).unwrap();
            assert!((back - x).abs() < 1e-12);
        }
    }
}
