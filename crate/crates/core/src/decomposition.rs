//! Entropy / anisotropy / mean-alpha decomposition of coherency matrices.
//!
//! From the eigendecomposition `T = sum lambda_i e_i e_i*ᵀ` with pseudo
//! probabilities `p_i = lambda_i / sum lambda`:
//!
//! - entropy `H = -sum p_i log3 p_i` (base 3 so H lies in `[0, 1]` for q=3),
//! - anisotropy `A = (lambda2 - lambda3) / (lambda2 + lambda3)`,
//! - alpha angles `alpha_i = arccos |e_i[0]|`, averaged as
//!   `mean_alpha = sum p_i alpha_i` (degrees).

use crate::eigen::hermitian_eig;
use crate::error::{Error, Result};
use crate::types::{CoherencyRaster, HermitianMatrix3};

/// Entropy, anisotropy and mean alpha angle of one pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Haa {
    /// Scattering entropy in [0, 1].
    pub entropy: f64,
    /// Anisotropy in [0, 1]; 0 when the secondary spectrum is degenerate.
    pub anisotropy: f64,
    /// Mean alpha angle in degrees, [0, 90].
    pub mean_alpha: f64,
    /// Set when `lambda2 + lambda3` vanished and anisotropy was forced to 0.
    pub degenerate: bool,
}

/// Per-pixel decomposition; `None` marks zero-power pixels.
#[derive(Debug, Clone)]
pub struct HaaRaster {
    width: usize,
    height: usize,
    data: Vec<Option<Haa>>,
}

impl HaaRaster {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Option<Haa>] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> Option<Haa> {
        self.data[y * self.width + x]
    }
}

fn log3(x: f64) -> f64 {
    x.ln() / 3f64.ln()
}

/// Decompose a single coherency matrix. Fails with `ZeroPowerPixel` when the
/// trace is not positive.
pub fn haa_from_matrix(m: &HermitianMatrix3) -> Result<Haa> {
    let trace = m.trace();
    if trace.is_nan() || trace <= 0.0 {
        return Err(Error::ZeroPowerPixel);
    }
    let eig = hermitian_eig(m)?;
    let total: f64 = eig.values.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::ZeroPowerPixel);
    }

    let p = [
        eig.values[0] / total,
        eig.values[1] / total,
        eig.values[2] / total,
    ];
    // 0 * log 0 = 0 convention.
    let entropy: f64 = -p
        .iter()
        .map(|&pi| if pi > 0.0 { pi * log3(pi) } else { 0.0 })
        .sum::<f64>();

    let lam23 = eig.values[1] + eig.values[2];
    let degenerate = lam23 <= crate::types::PSD_EIG_TOL_FACTOR * trace;
    let anisotropy = if degenerate {
        0.0
    } else {
        (eig.values[1] - eig.values[2]) / lam23
    };

    let mean_alpha: f64 = (0..3)
        .map(|i| {
            let cos_alpha = eig.vectors[i][0].norm().min(1.0);
            p[i] * cos_alpha.acos().to_degrees()
        })
        .sum();

    Ok(Haa {
        entropy: entropy.clamp(0.0, 1.0),
        anisotropy: anisotropy.clamp(0.0, 1.0),
        mean_alpha: mean_alpha.clamp(0.0, 90.0),
        degenerate,
    })
}

/// Element-wise decomposition of a raster. Zero-power pixels become `None`
/// rather than failing the whole raster.
pub fn haa_raster(raster: &CoherencyRaster) -> Result<HaaRaster> {
    let mut data = Vec::with_capacity(raster.pixels().len());
    for m in raster.pixels() {
        match haa_from_matrix(m) {
            Ok(h) => data.push(Some(h)),
            Err(Error::ZeroPowerPixel) => data.push(None),
            Err(e) => return Err(e),
        }
    }
    Ok(HaaRaster {
        width: raster.width(),
        height: raster.height(),
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn rank_one_matrix() {
        let haa = haa_from_matrix(&HermitianMatrix3::from_diag([1.0, 0.0, 0.0])).unwrap();
        assert_eq!(haa.entropy, 0.0);
        assert_eq!(haa.anisotropy, 0.0);
        assert!(haa.degenerate);
        assert_eq!(haa.mean_alpha, 0.0);
    }

    #[test]
    fn identity_matrix() {
        let haa = haa_from_matrix(&HermitianMatrix3::identity()).unwrap();
        assert_relative_eq!(haa.entropy, 1.0, epsilon = 1e-12);
        assert_relative_eq!(haa.anisotropy, 0.0, epsilon = 1e-12);
        // Standard-basis eigenvectors: alpha = 0, 90, 90 with p = 1/3 each.
        assert_relative_eq!(haa.mean_alpha, 60.0, epsilon = 1e-9);
        assert!(!haa.degenerate);
    }

    #[test]
    fn known_diagonal_spectrum() {
        // H frozen from an independent scalar evaluation of
        // -sum p_i log3 p_i with p = (0.5, 0.3, 0.2).
        let haa = haa_from_matrix(&HermitianMatrix3::from_diag([0.5, 0.3, 0.2])).unwrap();
        assert_relative_eq!(haa.entropy, 0.9372305632161295, epsilon = 1e-12);
        assert_relative_eq!(haa.anisotropy, 0.2, epsilon = 1e-12);
        assert_relative_eq!(haa.mean_alpha, 45.0, epsilon = 1e-9);
    }

    #[test]
    fn scale_invariance() {
        let m = HermitianMatrix3::new(
            [1.0, 0.6, 0.3],
            [
                Complex64::new(0.2, 0.1),
                Complex64::new(-0.05, 0.15),
                Complex64::new(0.1, 0.0),
            ],
        );
        let base = haa_from_matrix(&m).unwrap();
        for c in [1e-3, 1.0, 1e3] {
            let scaled = haa_from_matrix(&m.scaled(c)).unwrap();
            assert_relative_eq!(scaled.entropy, base.entropy, epsilon = 1e-12);
            assert_relative_eq!(scaled.anisotropy, base.anisotropy, epsilon = 1e-12);
            assert_relative_eq!(scaled.mean_alpha, base.mean_alpha, epsilon = 1e-9);
        }
    }

    #[test]
    fn zero_power_pixel_errors() {
        assert!(matches!(
            haa_from_matrix(&HermitianMatrix3::zero()),
            Err(Error::ZeroPowerPixel)
        ));
    }

    #[test]
    fn raster_masks_zero_power_pixels() {
        let mut data = vec![HermitianMatrix3::identity(); 4];
        data[2] = HermitianMatrix3::zero();
        let raster = CoherencyRaster::new(2, 2, 1, data).unwrap();
        let haa = haa_raster(&raster).unwrap();
        assert!(haa.get(0, 0).is_some());
        assert!(haa.get(0, 1).is_none());
        // Constant input pixels give a constant output.
        assert_eq!(haa.get(0, 0), haa.get(1, 0));
        assert_relative_eq!(haa.get(1, 1).unwrap().entropy, 1.0, epsilon = 1e-12);
    }
}
