//! Supervised maximum-likelihood classification under the complex Wishart
//! model.
//!
//! The class-dependent part of the negative log-likelihood of a multi-look
//! coherency matrix `Z` under class center `Sigma_m` reduces to
//!
//! ```text
//! d_m(Z) = ln|Sigma_m| + tr(Sigma_m^-1 Z)
//! ```
//!
//! after dropping the factors shared by every class; the look count scales
//! all distances identically and so never changes the argmin.

use crate::error::{Error, Result};
use crate::types::{CoherencyRaster, HermitianMatrix3};

/// Diagonal loading added to class centers before inversion, relative to the
/// center trace.
pub const CENTER_LOADING_FACTOR: f64 = 1e-9;

/// Minimum labeled pixels per class: a full-rank 3x3 complex covariance
/// needs at least q^2 = 9 samples.
pub const MIN_TRAINING_PIXELS: usize = 9;

/// Ground-truth labels, 0 = unlabeled.
#[derive(Debug, Clone)]
pub struct LabelMask {
    width: usize,
    height: usize,
    labels: Vec<u8>,
}

impl LabelMask {
    pub fn new(width: usize, height: usize, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::config(format!(
                "mask length {} does not match {}x{}",
                labels.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Highest class id present (0 when fully unlabeled).
    pub fn num_classes(&self) -> u8 {
        self.labels.iter().copied().max().unwrap_or(0)
    }
}

/// Predicted class per pixel, 1..=K.
#[derive(Debug, Clone)]
pub struct ClassMap {
    width: usize,
    height: usize,
    classes: Vec<u8>,
}

impl ClassMap {
    pub fn new(width: usize, height: usize, classes: Vec<u8>) -> Result<Self> {
        if classes.len() != width * height {
            return Err(Error::config(format!(
                "class map length {} does not match {}x{}",
                classes.len(),
                width,
                height
            )));
        }
        if classes.contains(&0) {
            return Err(Error::config("class map contains unassigned pixels"));
        }
        Ok(Self {
            width,
            height,
            classes,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn classes(&self) -> &[u8] {
        &self.classes
    }
}

/// One trained class: center with cached log-determinant and inverse.
#[derive(Debug, Clone)]
pub struct ClassModel {
    pub class_id: u8,
    pub center: HermitianMatrix3,
    pub log_det: f64,
    pub inverse: HermitianMatrix3,
}

/// Supervised Wishart model.
#[derive(Debug, Clone)]
pub struct WishartModel {
    classes: Vec<ClassModel>,
    looks: u32,
}

impl WishartModel {
    /// Build a model from explicit per-class centers (applies the same
    /// loading and caching as training).
    pub fn from_centers(centers: &[(u8, HermitianMatrix3)], looks: u32) -> Result<Self> {
        Self::build(centers, looks, true)
    }

    /// Build from centers that already carry their diagonal loading, e.g.
    /// when reloading a serialized model.
    pub fn from_stored_centers(centers: &[(u8, HermitianMatrix3)], looks: u32) -> Result<Self> {
        Self::build(centers, looks, false)
    }

    fn build(centers: &[(u8, HermitianMatrix3)], looks: u32, apply_loading: bool) -> Result<Self> {
        // Ascending id order pins the lowest-id tie-break in classification.
        let mut centers = centers.to_vec();
        centers.sort_by_key(|&(id, _)| id);
        let mut classes = Vec::with_capacity(centers.len());
        let mut seen = std::collections::BTreeSet::new();
        for (class_id, center) in centers {
            if class_id == 0 {
                return Err(Error::config("class id 0 is reserved for unlabeled"));
            }
            if !seen.insert(class_id) {
                return Err(Error::config(format!("duplicate class id {class_id}")));
            }
            let center = if apply_loading {
                let loading = CENTER_LOADING_FACTOR * center.trace();
                HermitianMatrix3::new(
                    [
                        center.diag[0] + loading,
                        center.diag[1] + loading,
                        center.diag[2] + loading,
                    ],
                    center.upper,
                )
            } else {
                center
            };
            classes.push(make_class_model(class_id, center)?);
        }
        if classes.is_empty() {
            return Err(Error::config("model needs at least one class"));
        }
        Ok(Self { classes, looks })
    }

    pub fn classes(&self) -> &[ClassModel] {
        &self.classes
    }

    /// Look count of the training raster; retained for documentation, the
    /// decision rule does not depend on it.
    pub fn looks(&self) -> u32 {
        self.looks
    }
}

fn make_class_model(class_id: u8, center: HermitianMatrix3) -> Result<ClassModel> {
    let det = center.det();
    if det.is_nan() || det <= 0.0 {
        return Err(Error::DegenerateClass(class_id));
    }
    let inverse = center
        .inverse()
        .map_err(|_| Error::DegenerateClass(class_id))?;
    // Contract: center * inverse = identity to 1e-8; ill-conditioned centers
    // that break it are rejected rather than silently misclassifying.
    let cf = center.full();
    let inf = inverse.full();
    for i in 0..3 {
        for j in 0..3 {
            let p: num_complex::Complex64 = (0..3).map(|k| cf[i][k] * inf[k][j]).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            if (p.re - expect).abs() > 1e-8 || p.im.abs() > 1e-8 {
                return Err(Error::DegenerateClass(class_id));
            }
        }
    }
    Ok(ClassModel {
        class_id,
        center,
        log_det: det.ln(),
        inverse,
    })
}

/// Estimate per-class centers as the mean coherency over labeled pixels.
pub fn train_wishart(raster: &CoherencyRaster, mask: &LabelMask) -> Result<WishartModel> {
    if mask.width() != raster.width() || mask.height() != raster.height() {
        return Err(Error::config("mask dimensions do not match raster"));
    }
    let k = mask.num_classes();
    if k == 0 {
        return Err(Error::MissingClass(1));
    }
    let mut sums = vec![HermitianMatrix3::zero(); k as usize];
    let mut counts = vec![0usize; k as usize];
    for (label, pixel) in mask.labels().iter().zip(raster.pixels()) {
        if *label == 0 {
            continue;
        }
        let idx = (*label - 1) as usize;
        sums[idx] += *pixel;
        counts[idx] += 1;
    }

    let mut centers = Vec::with_capacity(k as usize);
    for class in 1..=k {
        let idx = (class - 1) as usize;
        if counts[idx] == 0 {
            return Err(Error::MissingClass(class));
        }
        if counts[idx] < MIN_TRAINING_PIXELS {
            return Err(Error::InsufficientClassSamples {
                class,
                got: counts[idx],
                need: MIN_TRAINING_PIXELS,
            });
        }
        centers.push((class, sums[idx].scaled(1.0 / counts[idx] as f64)));
    }
    WishartModel::from_centers(&centers, raster.looks())
}

/// Class-dependent negative log-likelihood term
/// `d = ln|Sigma| + tr(Sigma^-1 Z)`.
pub fn wishart_distance(z: &HermitianMatrix3, class: &ClassModel) -> f64 {
    class.log_det + class.inverse.trace_product(z)
}

/// Assign every pixel to the class with minimal Wishart distance; ties break
/// toward the lowest class id.
pub fn classify_wishart(raster: &CoherencyRaster, model: &WishartModel) -> ClassMap {
    let classes = raster
        .pixels()
        .iter()
        .map(|z| {
            let mut best = model.classes()[0].class_id;
            let mut best_d = f64::INFINITY;
            for class in model.classes() {
                let d = wishart_distance(z, class);
                if d < best_d {
                    best_d = d;
                    best = class.class_id;
                }
            }
            best
        })
        .collect();
    ClassMap::new(raster.width(), raster.height(), classes)
        .expect("classification output matches raster dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identical_training_pixels_recover_center() {
        let m = HermitianMatrix3::new([1.0, 0.5, 0.2], [c(0.3, 0.1), c(0.0, 0.0), c(0.05, -0.02)]);
        let raster = CoherencyRaster::new(3, 3, 9, vec![m; 9]).unwrap();
        let mask = LabelMask::new(3, 3, vec![1; 9]).unwrap();
        let model = train_wishart(&raster, &mask).unwrap();
        let center = &model.classes()[0].center;
        // Center equals the common matrix up to the diagonal loading.
        for i in 0..3 {
            assert_relative_eq!(center.diag[i], m.diag[i], epsilon = 1e-8);
            assert_relative_eq!(center.upper[i].re, m.upper[i].re, epsilon = 1e-12);
            assert_relative_eq!(center.upper[i].im, m.upper[i].im, epsilon = 1e-12);
        }
    }

    #[test]
    fn distance_at_center_is_logdet_plus_q() {
        let m = HermitianMatrix3::new([2.0, 1.0, 0.5], [c(0.4, -0.2), c(0.1, 0.1), c(0.0, 0.3)]);
        let model = WishartModel::from_centers(&[(1, m)], 9).unwrap();
        let class = &model.classes()[0];
        let d = wishart_distance(&class.center, class);
        assert_relative_eq!(d, class.log_det + 3.0, epsilon = 1e-9);
    }

    #[test]
    fn identity_center_distance_is_trace() {
        let model = WishartModel::from_centers(&[(1, HermitianMatrix3::identity())], 1).unwrap();
        let z = HermitianMatrix3::new([0.7, 0.2, 1.4], [c(0.1, 0.0), c(0.0, -0.2), c(0.3, 0.1)]);
        let d = wishart_distance(&z, &model.classes()[0]);
        assert_relative_eq!(d, z.trace(), epsilon = 1e-7);
    }

    #[test]
    fn classifies_exact_centers() {
        let a = HermitianMatrix3::from_diag([1.0, 0.8, 0.1]);
        let b = HermitianMatrix3::from_diag([0.4, 0.05, 0.02]);
        let model = WishartModel::from_centers(&[(1, a), (2, b)], 9).unwrap();
        let raster = CoherencyRaster::new(2, 1, 9, vec![a, b]).unwrap();
        let map = classify_wishart(&raster, &model);
        assert_eq!(map.classes(), &[1, 2]);
    }

    #[test]
    fn single_class_model_labels_everything() {
        let a = HermitianMatrix3::from_diag([1.0, 1.0, 1.0]);
        let model = WishartModel::from_centers(&[(3, a)], 1).unwrap();
        let raster = CoherencyRaster::new(2, 2, 1, vec![
            HermitianMatrix3::from_diag([5.0, 0.1, 0.1]),
            HermitianMatrix3::from_diag([0.1, 5.0, 0.1]),
            a,
            HermitianMatrix3::from_diag([9.0, 9.0, 9.0]),
        ])
        .unwrap();
        let map = classify_wishart(&raster, &model);
        assert!(map.classes().iter().all(|&c| c == 3));
    }

    #[test]
    fn tie_breaks_toward_lowest_class_id() {
        let a = HermitianMatrix3::identity();
        let model = WishartModel::from_centers(&[(1, a), (2, a)], 1).unwrap();
        let raster = CoherencyRaster::new(1, 1, 1, vec![a]).unwrap();
        let map = classify_wishart(&raster, &model);
        assert_eq!(map.classes(), &[1]);
    }

    #[test]
    fn missing_class_detected() {
        let raster = CoherencyRaster::new(5, 4, 1, vec![HermitianMatrix3::identity(); 20]).unwrap();
        // Class 2 declared (class 3 present) but has no pixels; class 1 has
        // enough pixels, so the gap in the id range is what gets reported.
        let mut labels = vec![1u8; 20];
        labels[0] = 3;
        let mask = LabelMask::new(5, 4, labels).unwrap();
        match train_wishart(&raster, &mask) {
            Err(Error::MissingClass(2)) => {}
            other => panic!("expected MissingClass(2), got {other:?}"),
        }
    }

    #[test]
    fn too_few_pixels_detected() {
        let raster = CoherencyRaster::new(3, 3, 1, vec![HermitianMatrix3::identity(); 9]).unwrap();
        let mut labels = vec![1u8; 9];
        labels[8] = 0;
        let mask = LabelMask::new(3, 3, labels).unwrap();
        assert!(matches!(
            train_wishart(&raster, &mask),
            Err(Error::InsufficientClassSamples { class: 1, got: 8, .. })
        ));
    }

    #[test]
    fn scaling_centers_and_data_together_preserves_decisions() {
        let a = HermitianMatrix3::new([1.0, 0.8, 0.1], [c(0.55, 0.25), c(0.0, 0.0), c(0.0, 0.0)]);
        let b = HermitianMatrix3::from_diag([0.4, 0.05, 0.02]);
        let z = HermitianMatrix3::new([0.9, 0.6, 0.2], [c(0.3, 0.1), c(0.0, 0.0), c(0.01, 0.0)]);
        for scale in [1e-3, 1.0, 1e3] {
            let model = WishartModel::from_centers(
                &[(1, a.scaled(scale)), (2, b.scaled(scale))],
                9,
            )
            .unwrap();
            let raster = CoherencyRaster::new(1, 1, 9, vec![z.scaled(scale)]).unwrap();
            let map = classify_wishart(&raster, &model);
            assert_eq!(map.classes(), &[1], "scale {scale}");
        }
    }

    #[test]
    fn centers_given_out_of_order_are_sorted_by_id() {
        let a = HermitianMatrix3::identity();
        let model = WishartModel::from_centers(&[(3, a), (1, a), (2, a)], 1).unwrap();
        let ids: Vec<u8> = model.classes().iter().map(|c| c.class_id).collect();
        assert_eq!(ids, [1, 2, 3]);
        // All-identical centers: every pixel ties and resolves to class 1.
        let raster = CoherencyRaster::new(1, 1, 1, vec![a]).unwrap();
        assert_eq!(classify_wishart(&raster, &model).classes(), &[1]);
    }

    #[test]
    fn relabeling_permutes_output() {
        let a = HermitianMatrix3::from_diag([1.0, 0.8, 0.1]);
        let b = HermitianMatrix3::from_diag([0.4, 0.05, 0.02]);
        let raster = CoherencyRaster::new(2, 1, 9, vec![a, b]).unwrap();
        let fwd = classify_wishart(
            &raster,
            &WishartModel::from_centers(&[(1, a), (2, b)], 9).unwrap(),
        );
        let swapped = classify_wishart(
            &raster,
            &WishartModel::from_centers(&[(1, b), (2, a)], 9).unwrap(),
        );
        assert_eq!(fwd.classes(), &[1, 2]);
        assert_eq!(swapped.classes(), &[2, 1]);
    }
}
