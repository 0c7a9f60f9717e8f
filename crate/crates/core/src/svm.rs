//! Kernel SVM over coherency-matrix features.
//!
//! Per-pixel features are the nine independent real values of the T3 matrix.
//! Binary machines are trained with an SMO solver on the standardized
//! features (maximal-violating-pair working-set selection, soft margin with
//! cost `C`); multiclass classification is one-vs-one majority voting.
//!
//! Defaults follow the reference configuration: RBF kernel
//! `K(x, y) = exp(-gamma |x - y|^2)` with `gamma = 0.444` and `C = 100`.

use crate::error::{Error, Result};
use crate::types::{CoherencyRaster, HermitianMatrix3};
use crate::wishart::ClassMap;
use num_complex::Complex64;

pub const DEFAULT_GAMMA: f64 = 0.444;
pub const DEFAULT_COST: f64 = 100.0;
pub const DEFAULT_KKT_TOL: f64 = 1e-3;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Floor for vanishing kernel-matrix curvature in the two-variable solve.
const CURVATURE_FLOOR: f64 = 1e-12;

/// Nine real features of a coherency matrix, in the order
/// T11, T22, T33, Re T12, Im T12, Re T13, Im T13, Re T23, Im T23.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; 9]);

impl FeatureVector {
    pub fn from_matrix(m: &HermitianMatrix3) -> Self {
        FeatureVector([
            m.diag[0],
            m.diag[1],
            m.diag[2],
            m.upper[0].re,
            m.upper[0].im,
            m.upper[1].re,
            m.upper[1].im,
            m.upper[2].re,
            m.upper[2].im,
        ])
    }

    /// Reassemble the coherency matrix the features came from.
    pub fn to_matrix(&self) -> HermitianMatrix3 {
        let f = &self.0;
        HermitianMatrix3::new(
            [f[0], f[1], f[2]],
            [
                Complex64::new(f[3], f[4]),
                Complex64::new(f[5], f[6]),
                Complex64::new(f[7], f[8]),
            ],
        )
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

fn dot(a: &FeatureVector, b: &FeatureVector) -> f64 {
    a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum()
}

fn dist_sqr(a: &FeatureVector, b: &FeatureVector) -> f64 {
    a.0.iter().zip(&b.0).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Per-pixel feature extraction in raster order.
pub fn extract_features(raster: &CoherencyRaster) -> Vec<FeatureVector> {
    raster.pixels().iter().map(FeatureVector::from_matrix).collect()
}

/// Kernel functions. The sigmoid kernel is implemented as printed,
/// `tanh(<x,y> + 1)`; it is not positive semidefinite, so SMO training with
/// it may stop at a local stationary point and is considered experimental.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `(<x,y> + 1)^p`
    Polynomial(u32),
    /// `tanh(<x,y> + 1)`
    Sigmoid,
    /// `exp(-gamma |x-y|^2)`
    Rbf(f64),
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match self {
            Kernel::Polynomial(p) if *p >= 1 => Ok(()),
            Kernel::Polynomial(p) => Err(Error::config(format!(
                "polynomial degree must be >= 1, got {p}"
            ))),
            Kernel::Sigmoid => Ok(()),
            Kernel::Rbf(g) if *g > 0.0 => Ok(()),
            Kernel::Rbf(g) => Err(Error::config(format!("RBF gamma must be > 0, got {g}"))),
        }
    }
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::Rbf(DEFAULT_GAMMA)
    }
}

pub fn kernel_eval(k: &Kernel, x: &FeatureVector, y: &FeatureVector) -> f64 {
    match k {
        Kernel::Polynomial(p) => (dot(x, y) + 1.0).powi(*p as i32),
        Kernel::Sigmoid => (dot(x, y) + 1.0).tanh(),
        Kernel::Rbf(gamma) => (-gamma * dist_sqr(x, y)).exp(),
    }
}

/// Per-feature standardization computed from the training pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaler {
    pub mean: [f64; 9],
    pub std: [f64; 9],
    /// Features that were constant in training (std forced to 1).
    pub constant: [bool; 9],
}

impl FeatureScaler {
    pub fn fit(samples: &[FeatureVector]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Data("cannot fit scaler on empty training set".into()));
        }
        let n = samples.len() as f64;
        let mut mean = [0.0; 9];
        for s in samples {
            for (m, v) in mean.iter_mut().zip(&s.0) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = [0.0; 9];
        for s in samples {
            for i in 0..9 {
                let d = s.0[i] - mean[i];
                var[i] += d * d;
            }
        }
        let mut std = [0.0; 9];
        let mut constant = [false; 9];
        for i in 0..9 {
            let s = (var[i] / n).sqrt();
            if s > 0.0 {
                std[i] = s;
            } else {
                std[i] = 1.0;
                constant[i] = true;
            }
        }
        Ok(Self {
            mean,
            std,
            constant,
        })
    }

    pub fn apply(&self, f: &FeatureVector) -> FeatureVector {
        let mut out = [0.0; 9];
        for i in 0..9 {
            out[i] = (f.0[i] - self.mean[i]) / self.std[i];
        }
        FeatureVector(out)
    }
}

/// Training configuration.
#[derive(Debug, Clone, Copy)]
pub struct SvmParams {
    pub kernel: Kernel,
    pub cost: f64,
    pub kkt_tol: f64,
    pub max_iter: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            kernel: Kernel::default(),
            cost: DEFAULT_COST,
            kkt_tol: DEFAULT_KKT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Result of one binary SMO run over the full training subset.
#[derive(Debug, Clone)]
pub struct BinarySolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    /// Final maximal KKT violation `m(alpha) - M(alpha)`.
    pub kkt_gap: f64,
    /// Dual objective `sum alpha - 0.5 alpha' Q alpha`.
    pub objective: f64,
}

/// Solve the binary soft-margin dual with SMO.
///
/// `labels` must be +1/-1. Selection is the maximal KKT violating pair;
/// stops when the violation drops to `kkt_tol`, errors with `Convergence`
/// when `max_iter` pair updates were not enough.
pub fn solve_binary(
    features: &[FeatureVector],
    labels: &[f64],
    kernel: &Kernel,
    cost: f64,
    kkt_tol: f64,
    max_iter: usize,
) -> Result<BinarySolution> {
    kernel.validate()?;
    let n = features.len();
    if n == 0 || labels.len() != n {
        return Err(Error::Data("binary problem needs matching features and labels".into()));
    }
    if cost <= 0.0 {
        return Err(Error::config(format!("cost must be > 0, got {cost}")));
    }
    for (i, f) in features.iter().enumerate() {
        if !f.is_finite() {
            return Err(Error::Data(format!("non-finite feature vector at index {i}")));
        }
    }
    if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(Error::Data("binary labels must be +1 or -1".into()));
    }
    if labels.iter().all(|&y| y == labels[0]) {
        return Err(Error::MissingClass(if labels[0] > 0.0 { 2 } else { 1 }));
    }

    // Q_ij = y_i y_j K(x_i, x_j), dense; training subsets stay desk-scale.
    let mut q = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = labels[i] * labels[j] * kernel_eval(kernel, &features[i], &features[j]);
            q[i * n + j] = v;
            q[j * n + i] = v;
        }
    }

    let mut alpha = vec![0.0f64; n];
    let mut grad = vec![-1.0f64; n];
    let mut iterations = 0usize;
    let mut gap;

    loop {
        // Maximal violating pair over I_up / I_low.
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let mut i_sel = usize::MAX;
        let mut j_sel = usize::MAX;
        for t in 0..n {
            let v = -labels[t] * grad[t];
            let in_up = (labels[t] > 0.0 && alpha[t] < cost) || (labels[t] < 0.0 && alpha[t] > 0.0);
            let in_low = (labels[t] > 0.0 && alpha[t] > 0.0) || (labels[t] < 0.0 && alpha[t] < cost);
            if in_up && v > gmax {
                gmax = v;
                i_sel = t;
            }
            if in_low && v < gmin {
                gmin = v;
                j_sel = t;
            }
        }
        gap = gmax - gmin;
        if gap <= kkt_tol || i_sel == usize::MAX || j_sel == usize::MAX {
            break;
        }
        if iterations >= max_iter {
            return Err(Error::Convergence(max_iter));
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        let old_ai = alpha[i];
        let old_aj = alpha[j];
        if labels[i] != labels[j] {
            let mut quad = q[i * n + i] + q[j * n + j] + 2.0 * q[i * n + j];
            if quad <= 0.0 {
                quad = CURVATURE_FLOOR;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > cost {
                    alpha[i] = cost;
                    alpha[j] = cost - diff;
                }
            } else if alpha[j] > cost {
                alpha[j] = cost;
                alpha[i] = cost + diff;
            }
        } else {
            let mut quad = q[i * n + i] + q[j * n + j] - 2.0 * q[i * n + j];
            if quad <= 0.0 {
                quad = CURVATURE_FLOOR;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > cost {
                if alpha[i] > cost {
                    alpha[i] = cost;
                    alpha[j] = sum - cost;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cost {
                if alpha[j] > cost {
                    alpha[j] = cost;
                    alpha[i] = sum - cost;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let dai = alpha[i] - old_ai;
        let daj = alpha[j] - old_aj;
        for t in 0..n {
            grad[t] += q[i * n + t] * dai + q[j * n + t] * daj;
        }
    }

    // Bias from the free support vectors; midpoint of the bound gradients
    // when none are free.
    let mut n_free = 0usize;
    let mut sum_free = 0.0;
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    for t in 0..n {
        let yg = labels[t] * grad[t];
        if alpha[t] >= cost {
            if labels[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if labels[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };

    let objective = -0.5
        * alpha
            .iter()
            .zip(&grad)
            .map(|(a, g)| a * (g - 1.0))
            .sum::<f64>();

    Ok(BinarySolution {
        alpha,
        bias: -rho,
        iterations,
        kkt_gap: gap,
        objective,
    })
}

/// One trained one-vs-one machine: positive class is the lower id.
#[derive(Debug, Clone)]
pub struct BinaryMachine {
    pub class_pos: u8,
    pub class_neg: u8,
    /// Support vectors in scaled feature space.
    pub support_vectors: Vec<FeatureVector>,
    pub sv_labels: Vec<f64>,
    pub sv_alpha: Vec<f64>,
    pub bias: f64,
}

impl BinaryMachine {
    /// Decision value for an already-scaled feature vector.
    pub fn decision(&self, kernel: &Kernel, x: &FeatureVector) -> f64 {
        let mut f = self.bias;
        for ((sv, y), a) in self
            .support_vectors
            .iter()
            .zip(&self.sv_labels)
            .zip(&self.sv_alpha)
        {
            f += y * a * kernel_eval(kernel, x, sv);
        }
        f
    }
}

/// Trained multiclass model.
#[derive(Debug, Clone)]
pub struct SvmModel {
    pub kernel: Kernel,
    pub cost: f64,
    pub scaler: FeatureScaler,
    pub classes: Vec<u8>,
    pub machines: Vec<BinaryMachine>,
}

impl SvmModel {
    /// Predict the class of an unscaled feature vector: evaluate all
    /// K(K-1)/2 machines, majority vote, ties toward the lowest class id.
    pub fn predict(&self, feature: &FeatureVector) -> u8 {
        let scaled = self.scaler.apply(feature);
        let mut votes = std::collections::BTreeMap::new();
        for machine in &self.machines {
            let f = machine.decision(&self.kernel, &scaled);
            let winner = if f >= 0.0 {
                machine.class_pos
            } else {
                machine.class_neg
            };
            *votes.entry(winner).or_insert(0u32) += 1;
        }
        let mut best_class = self.classes[0];
        let mut best_votes = 0u32;
        for &class in &self.classes {
            let v = votes.get(&class).copied().unwrap_or(0);
            if v > best_votes {
                best_votes = v;
                best_class = class;
            }
        }
        best_class
    }
}

/// Train a one-vs-one multiclass SVM on labeled feature vectors
/// (labels use the mask convention: class ids 1..=K, 0 not allowed here).
pub fn train_svm(features: &[FeatureVector], labels: &[u8], params: &SvmParams) -> Result<SvmModel> {
    params.kernel.validate()?;
    if features.len() != labels.len() {
        return Err(Error::Data("features and labels length mismatch".into()));
    }
    for (i, f) in features.iter().enumerate() {
        if !f.is_finite() {
            return Err(Error::Data(format!("non-finite feature vector at index {i}")));
        }
    }
    if labels.contains(&0) {
        return Err(Error::Data("training labels must be >= 1".into()));
    }
    let mut classes: Vec<u8> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::MissingClass(
            classes.first().copied().map_or(1, |c| c.saturating_add(1)),
        ));
    }

    let scaler = FeatureScaler::fit(features)?;
    let scaled: Vec<FeatureVector> = features.iter().map(|f| scaler.apply(f)).collect();

    let mut machines = Vec::new();
    for (ai, &a) in classes.iter().enumerate() {
        for &b in &classes[ai + 1..] {
            let mut x = Vec::new();
            let mut y = Vec::new();
            for (f, &l) in scaled.iter().zip(labels) {
                if l == a {
                    x.push(*f);
                    y.push(1.0);
                } else if l == b {
                    x.push(*f);
                    y.push(-1.0);
                }
            }
            let solution = solve_binary(&x, &y, &params.kernel, params.cost, params.kkt_tol, params.max_iter)?;
            let mut support_vectors = Vec::new();
            let mut sv_labels = Vec::new();
            let mut sv_alpha = Vec::new();
            for (i, &alpha) in solution.alpha.iter().enumerate() {
                if alpha > 0.0 {
                    support_vectors.push(x[i]);
                    sv_labels.push(y[i]);
                    sv_alpha.push(alpha);
                }
            }
            machines.push(BinaryMachine {
                class_pos: a,
                class_neg: b,
                support_vectors,
                sv_labels,
                sv_alpha,
                bias: solution.bias,
            });
        }
    }

    Ok(SvmModel {
        kernel: params.kernel,
        cost: params.cost,
        scaler,
        classes,
        machines,
    })
}

/// Classify every pixel of a raster.
pub fn classify_svm(raster: &CoherencyRaster, model: &SvmModel) -> ClassMap {
    let classes = raster
        .pixels()
        .iter()
        .map(|m| model.predict(&FeatureVector::from_matrix(m)))
        .collect();
    ClassMap::new(raster.width(), raster.height(), classes)
        .expect("classification output matches raster dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn features_of_identity_and_diagonal() {
        let id = FeatureVector::from_matrix(&HermitianMatrix3::identity());
        assert_eq!(id.0, [1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let d = FeatureVector::from_matrix(&HermitianMatrix3::from_diag([2.0, 1.0, 0.5]));
        assert_eq!(d.0, [2.0, 1.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn feature_round_trip_is_exact() {
        let m = HermitianMatrix3::new(
            [1.25, 0.5, 0.125],
            [c(0.3, -0.7), c(0.01, 0.02), c(-0.4, 0.9)],
        );
        let f = FeatureVector::from_matrix(&m);
        assert_eq!(f.to_matrix(), m);
    }

    #[test]
    fn kernel_values() {
        let x = FeatureVector([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let y = x;
        assert_eq!(kernel_eval(&Kernel::Rbf(0.444), &x, &y), 1.0);
        assert_eq!(kernel_eval(&Kernel::Polynomial(1), &x, &y), 2.0);
        // Frozen from an independent evaluation of exp(-0.444 * 1).
        let mut z = x;
        z.0[1] = 1.0;
        z.0[0] = 1.0;
        let x0 = FeatureVector([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_relative_eq!(
            kernel_eval(&Kernel::Rbf(0.444), &x0, &z),
            0.6414654208273198,
            epsilon = 1e-15
        );
    }

    #[test]
    fn kernel_symmetry() {
        let a = FeatureVector([0.3, -1.2, 0.5, 0.0, 2.0, -0.7, 0.1, 0.9, -0.4]);
        let b = FeatureVector([1.1, 0.2, -0.8, 0.6, -0.5, 0.0, 1.4, -1.0, 0.3]);
        for k in [Kernel::Rbf(0.444), Kernel::Polynomial(3), Kernel::Sigmoid] {
            assert_eq!(kernel_eval(&k, &a, &b), kernel_eval(&k, &b, &a));
        }
        // RBF stays in (0, 1].
        let v = kernel_eval(&Kernel::Rbf(0.444), &a, &b);
        assert!(v > 0.0 && v <= 1.0);
    }

    #[test]
    fn scaler_standardizes_and_flags_constants() {
        let samples = vec![
            FeatureVector([1.0, 5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            FeatureVector([3.0, 5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ];
        let scaler = FeatureScaler::fit(&samples).unwrap();
        assert_eq!(scaler.mean[0], 2.0);
        assert!(scaler.constant[1] && scaler.std[1] == 1.0);
        let s = scaler.apply(&samples[0]);
        assert_relative_eq!(s.0[0], -1.0, epsilon = 1e-15);
        assert_eq!(s.0[1], 0.0);
    }

    fn feat(vals: [f64; 2]) -> FeatureVector {
        let mut f = [0.0; 9];
        f[0] = vals[0];
        f[1] = vals[1];
        FeatureVector(f)
    }

    #[test]
    fn two_point_problem_is_perpendicular_bisector() {
        let x = vec![feat([0.0, 0.0]), feat([2.0, 2.0])];
        let y = vec![1.0, -1.0];
        let kernel = Kernel::Polynomial(1);
        let sol = solve_binary(&x, &y, &kernel, 100.0, 1e-6, 100_000).unwrap();
        // Both points are support vectors with equal multipliers.
        assert!(sol.alpha[0] > 0.0 && sol.alpha[1] > 0.0);
        assert_relative_eq!(sol.alpha[0], sol.alpha[1], epsilon = 1e-9);
        // Decision is zero at the midpoint, positive at x0, negative at x1.
        let f = |p: &FeatureVector| {
            y[0] * sol.alpha[0] * kernel_eval(&kernel, p, &x[0])
                + y[1] * sol.alpha[1] * kernel_eval(&kernel, p, &x[1])
                + sol.bias
        };
        assert_relative_eq!(f(&feat([1.0, 1.0])), 0.0, epsilon = 1e-9);
        assert!(f(&x[0]) > 0.0);
        assert!(f(&x[1]) < 0.0);
        // The boundary is perpendicular to x0 - x1: moving along the
        // orthogonal direction keeps the decision at zero.
        assert_relative_eq!(f(&feat([0.0, 2.0])), 0.0, epsilon = 1e-9);
        assert_relative_eq!(f(&feat([2.0, 0.0])), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn xor_with_rbf_separates() {
        let features = vec![
            feat([0.0, 0.0]),
            feat([1.0, 1.0]),
            feat([0.0, 1.0]),
            feat([1.0, 0.0]),
        ];
        let labels = vec![1u8, 1, 2, 2];
        let params = SvmParams {
            kernel: Kernel::Rbf(1.0),
            cost: 100.0,
            ..Default::default()
        };
        let model = train_svm(&features, &labels, &params).unwrap();
        for (f, &l) in features.iter().zip(&labels) {
            assert_eq!(model.predict(f), l, "XOR point misclassified");
        }
    }

    #[test]
    fn dual_constraint_and_kkt_hold() {
        // Deterministic pseudo-random two-class set.
        let mut features = Vec::new();
        let mut y = Vec::new();
        let mut state = 0x12345u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for i in 0..24 {
            let label = if i % 2 == 0 { 1.0 } else { -1.0 };
            let mut f = [0.0; 9];
            for v in &mut f {
                *v = next() + label * 0.3;
            }
            features.push(FeatureVector(f));
            y.push(label);
        }
        let sol = solve_binary(&features, &y, &Kernel::Rbf(0.444), 100.0, 1e-3, 1_000_000).unwrap();
        let balance: f64 = sol.alpha.iter().zip(&y).map(|(a, yy)| a * yy).sum();
        assert!(balance.abs() <= 1e-6, "sum alpha_i y_i = {balance:e}");
        assert!(sol.alpha.iter().all(|&a| (0.0..=100.0 + 1e-12).contains(&a)));
        assert!(sol.kkt_gap <= 1e-3);
    }

    #[test]
    fn training_is_deterministic() {
        let features: Vec<FeatureVector> = (0..30)
            .map(|i| {
                let t = i as f64 * 0.7;
                feat([t.sin() + (i % 3) as f64, t.cos()])
            })
            .collect();
        let labels: Vec<u8> = (0..30).map(|i| (i % 3) as u8 + 1).collect();
        let params = SvmParams::default();
        let m1 = train_svm(&features, &labels, &params).unwrap();
        let m2 = train_svm(&features, &labels, &params).unwrap();
        let probe = feat([0.5, -0.5]);
        let s1 = m1.scaler.apply(&probe);
        let s2 = m2.scaler.apply(&probe);
        for (a, b) in m1.machines.iter().zip(&m2.machines) {
            let fa = a.decision(&m1.kernel, &s1);
            let fb = b.decision(&m2.kernel, &s2);
            assert!((fa - fb).abs() <= 1e-12);
        }
    }

    #[test]
    fn two_class_model_is_single_machine_sign() {
        let features = vec![feat([0.0, 0.0]), feat([0.1, 0.0]), feat([4.0, 4.0]), feat([4.1, 4.0])];
        let labels = vec![1u8, 1, 2, 2];
        let model = train_svm(&features, &labels, &SvmParams::default()).unwrap();
        assert_eq!(model.machines.len(), 1);
        for (f, &l) in features.iter().zip(&labels) {
            assert_eq!(model.predict(f), l);
        }
        // Support vectors live deep inside their class regions here.
        let sv = model.machines[0].support_vectors[0];
        let back = FeatureVector({
            let mut raw = [0.0; 9];
            for i in 0..9 {
                raw[i] = sv.0[i] * model.scaler.std[i] + model.scaler.mean[i];
            }
            raw
        });
        let predicted = model.predict(&back);
        assert!(predicted == 1 || predicted == 2);
    }

    #[test]
    fn single_class_training_fails() {
        let features = vec![feat([0.0, 0.0]), feat([1.0, 1.0])];
        assert!(matches!(
            train_svm(&features, &[1, 1], &SvmParams::default()),
            Err(Error::MissingClass(_))
        ));
    }

    #[test]
    fn non_finite_feature_fails() {
        let features = vec![feat([f64::NAN, 0.0]), feat([1.0, 1.0])];
        assert!(matches!(
            train_svm(&features, &[1, 2], &SvmParams::default()),
            Err(Error::Data(_))
        ));
    }
}
