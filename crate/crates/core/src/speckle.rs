//! Speckle filtering: boxcar multi-looking of single-look complex data and a
//! span-driven Lee MMSE refinement on coherency rasters.

use crate::error::{Error, Result};
use crate::types::{
    multilook, target_vector, CoherencyRaster, HermitianMatrix3, ScatteringSample, TargetVector,
};

/// Single-look complex raster, row-major.
#[derive(Debug, Clone)]
pub struct SlcRaster {
    width: usize,
    height: usize,
    data: Vec<ScatteringSample>,
}

impl SlcRaster {
    pub fn new(width: usize, height: usize, data: Vec<ScatteringSample>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::config(format!(
                "SLC data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if let Some(i) = data.iter().position(|s| !s.is_finite()) {
            return Err(Error::Data(format!("non-finite scattering sample at pixel {i}")));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[ScatteringSample] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> &ScatteringSample {
        &self.data[y * self.width + x]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterMode {
    Boxcar,
    Lee,
}

/// Filter parameters. `looks` is the equivalent-look estimate used for the
/// Lee noise level `C_u = 1/sqrt(n)`.
#[derive(Debug, Clone, Copy)]
pub struct FilterConfig {
    pub window: usize,
    pub mode: FilterMode,
    pub looks: f64,
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 || self.window.is_multiple_of(2) {
            return Err(Error::config(format!(
                "filter window must be odd and >= 1, got {}",
                self.window
            )));
        }
        if self.looks < 1.0 {
            return Err(Error::config(format!(
                "equivalent looks must be >= 1, got {}",
                self.looks
            )));
        }
        Ok(())
    }
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            window: 3,
            mode: FilterMode::Boxcar,
            looks: 1.0,
        }
    }
}

/// Mirror index for out-of-range window coordinates.
fn mirror(i: isize, dim: usize) -> usize {
    let dim = dim as isize;
    let m = if i < 0 {
        -i - 1
    } else if i >= dim {
        2 * dim - 1 - i
    } else {
        i
    };
    m as usize
}

fn check_window(window: usize, width: usize, height: usize) -> Result<()> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::config(format!(
            "window must be odd and >= 1, got {window}"
        )));
    }
    if window > width || window > height {
        return Err(Error::config(format!(
            "window {window} larger than raster {width}x{height}"
        )));
    }
    Ok(())
}

/// Boxcar multi-looking: each output pixel is the average of the target
/// vector outer products over the centered window (mirror-padded at the
/// edges), converted to the coherency (Pauli) basis. Output look count is
/// `window^2`.
pub fn boxcar_multilook(slc: &SlcRaster, window: usize) -> Result<CoherencyRaster> {
    check_window(window, slc.width, slc.height)?;
    let half = (window / 2) as isize;
    let mut vectors: Vec<TargetVector> = Vec::with_capacity(window * window);
    let mut out = Vec::with_capacity(slc.width * slc.height);
    for y in 0..slc.height as isize {
        for x in 0..slc.width as isize {
            vectors.clear();
            for dy in -half..=half {
                let yy = mirror(y + dy, slc.height);
                for dx in -half..=half {
                    let xx = mirror(x + dx, slc.width);
                    vectors.push(target_vector(slc.get(xx, yy)));
                }
            }
            let z = multilook(&vectors)?;
            out.push(z.target_to_pauli());
        }
    }
    CoherencyRaster::new(slc.width, slc.height, (window * window) as u32, out)
}

/// Lee MMSE weight from the local span statistics:
/// `w = max(0, (C_y^2 - C_u^2) / (C_y^2 * (1 + C_u^2)))`.
pub fn lee_weight(span_mean: f64, span_std: f64, looks: f64) -> f64 {
    if span_mean <= 0.0 {
        return 0.0;
    }
    let cu2 = 1.0 / looks;
    let cy = span_std / span_mean;
    let cy2 = cy * cy;
    if cy2 <= 0.0 {
        return 0.0;
    }
    ((cy2 - cu2) / (cy2 * (1.0 + cu2))).max(0.0)
}

/// Lee MMSE refinement: per pixel, `out = mean + w * (center - mean)` with
/// the weight computed from the window span statistics and applied uniformly
/// to all matrix elements, preserving the Hermitian structure.
pub fn lee_filter(raster: &CoherencyRaster, cfg: &FilterConfig) -> Result<CoherencyRaster> {
    cfg.validate()?;
    check_window(cfg.window, raster.width(), raster.height())?;
    let half = (cfg.window / 2) as isize;
    let count = (cfg.window * cfg.window) as f64;
    let mut out = Vec::with_capacity(raster.width() * raster.height());

    for y in 0..raster.height() as isize {
        for x in 0..raster.width() as isize {
            let mut mean = HermitianMatrix3::zero();
            let mut span_sum = 0.0;
            let mut span_sq_sum = 0.0;
            for dy in -half..=half {
                let yy = mirror(y + dy, raster.height());
                for dx in -half..=half {
                    let xx = mirror(x + dx, raster.width());
                    let m = raster.get(xx, yy);
                    mean += *m;
                    let span = m.trace();
                    span_sum += span;
                    span_sq_sum += span * span;
                }
            }
            mean = mean.scaled(1.0 / count);
            let span_mean = span_sum / count;
            let span_var = (span_sq_sum / count - span_mean * span_mean).max(0.0);
            let w = lee_weight(span_mean, span_var.sqrt(), cfg.looks);

            let center = raster.get(x as usize, y as usize);
            out.push(mean + (*center - mean).scaled(w));
        }
    }
    CoherencyRaster::new(raster.width(), raster.height(), raster.looks(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn constant_slc(width: usize, height: usize, s: ScatteringSample) -> SlcRaster {
        SlcRaster::new(width, height, vec![s; width * height]).unwrap()
    }

    #[test]
    fn constant_raster_gives_rank_one_coherency() {
        let s = ScatteringSample::new(c(0.4, 0.2), c(0.1, -0.1), c(-0.3, 0.5));
        let slc = constant_slc(5, 4, s);
        let out = boxcar_multilook(&slc, 3).unwrap();
        assert_eq!(out.looks(), 9);
        let expected = crate::types::pauli_vector(&s).outer();
        for px in out.pixels() {
            assert!((*px - expected).frobenius_norm() <= 1e-14);
        }
    }

    #[test]
    fn window_one_is_per_pixel_outer_product() {
        let samples: Vec<ScatteringSample> = (0..12)
            .map(|i| {
                let t = i as f64 * 0.37;
                ScatteringSample::new(c(t.sin(), t.cos()), c(0.2 * t, -0.1), c(1.0 - t, 0.3 * t))
            })
            .collect();
        let slc = SlcRaster::new(4, 3, samples.clone()).unwrap();
        let out = boxcar_multilook(&slc, 1).unwrap();
        assert_eq!(out.looks(), 1);
        for (px, s) in out.pixels().iter().zip(&samples) {
            let expected = crate::types::pauli_vector(s).outer();
            assert!((*px - expected).frobenius_norm() <= 1e-14);
        }
    }

    #[test]
    fn rejects_even_or_oversized_window() {
        let slc = constant_slc(4, 4, ScatteringSample::new(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)));
        assert!(boxcar_multilook(&slc, 2).is_err());
        assert!(boxcar_multilook(&slc, 5).is_err());
    }

    #[test]
    fn mirror_padding_indices() {
        assert_eq!(mirror(-1, 5), 0);
        assert_eq!(mirror(-2, 5), 1);
        assert_eq!(mirror(0, 5), 0);
        assert_eq!(mirror(4, 5), 4);
        assert_eq!(mirror(5, 5), 4);
        assert_eq!(mirror(6, 5), 3);
    }

    #[test]
    fn lee_weight_limits() {
        // Homogeneous window: no variance -> weight 0.
        assert_eq!(lee_weight(1.0, 0.0, 9.0), 0.0);
        // Zero mean span forces weight 0 instead of dividing by zero.
        assert_eq!(lee_weight(0.0, 1.0, 9.0), 0.0);
        // Extreme heterogeneity: weight approaches 1/(1+C_u^2) from below.
        let n = 9.0;
        let w = lee_weight(1.0, 1e6, n);
        let limit = 1.0 / (1.0 + 1.0 / n);
        assert!(w < limit);
        assert_relative_eq!(w, limit, epsilon = 1e-9);
        // Direct evaluation of the formula for a mid-range case.
        let (mean, std, looks) = (2.0, 1.0, 9.0);
        let cy2 = (std / mean) * (std / mean);
        let cu2 = 1.0 / looks;
        assert_relative_eq!(
            lee_weight(mean, std, looks),
            (cy2 - cu2) / (cy2 * (1.0 + cu2)),
            epsilon = 1e-15
        );
    }

    #[test]
    fn lee_on_homogeneous_raster_returns_local_mean() {
        let m = HermitianMatrix3::new([1.0, 0.5, 0.2], [c(0.1, 0.05), c(0.0, 0.0), c(0.02, -0.01)]);
        let raster = CoherencyRaster::new(6, 6, 9, vec![m; 36]).unwrap();
        let cfg = FilterConfig {
            window: 3,
            mode: FilterMode::Lee,
            looks: 9.0,
        };
        let out = lee_filter(&raster, &cfg).unwrap();
        for px in out.pixels() {
            assert!((*px - m).frobenius_norm() <= 1e-14);
        }
    }

    #[test]
    fn lee_mostly_preserves_extreme_outlier() {
        let base = HermitianMatrix3::from_diag([1.0, 1.0, 1.0]);
        let mut data = vec![base; 25];
        data[12] = HermitianMatrix3::from_diag([1e4, 1e4, 1e4]);
        let raster = CoherencyRaster::new(5, 5, 9, data).unwrap();
        let cfg = FilterConfig {
            window: 3,
            mode: FilterMode::Lee,
            looks: 9.0,
        };
        let out = lee_filter(&raster, &cfg).unwrap();
        let center = out.get(2, 2);
        // With C_y >> C_u the center keeps most of its value: w -> 1/(1+1/9) = 0.9.
        assert!(center.diag[0] > 0.8 * 1e4, "center = {}", center.diag[0]);
    }

    #[test]
    fn determinism() {
        let samples: Vec<ScatteringSample> = (0..64)
            .map(|i| {
                let t = i as f64;
                ScatteringSample::new(c(t.sin(), t.cos()), c((2.0 * t).sin(), 0.1), c(0.5, t.cos()))
            })
            .collect();
        let slc = SlcRaster::new(8, 8, samples).unwrap();
        let a = boxcar_multilook(&slc, 3).unwrap();
        let b = boxcar_multilook(&slc, 3).unwrap();
        for (x, y) in a.pixels().iter().zip(b.pixels()) {
            assert_eq!(x, y);
        }
    }
}
