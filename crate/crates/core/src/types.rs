//! Complex scattering vectors, 3x3 Hermitian matrices and multi-looking.
//!
//! Everything downstream (filtering, decomposition, both classifiers, the
//! scene generator) is built on the types in this module. Matrices are stored
//! Hermitian-by-construction: three real diagonal entries plus the three
//! complex upper-triangle entries, so `M = M*ᵀ` can never drift.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues in `[-PSD_EIG_TOL_FACTOR * trace, 0)` are clamped to zero;
/// anything lower is a data-integrity error rather than rounding drift.
pub const PSD_EIG_TOL_FACTOR: f64 = 1e-9;

/// Cholesky pivots below `CHOLESKY_PIVOT_FACTOR * trace` reject the matrix
/// as not positive definite.
pub const CHOLESKY_PIVOT_FACTOR: f64 = 1e-12;

/// Single-pixel complex scattering measurement (linear amplitude units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringSample {
    pub s_hh: Complex64,
    pub s_hv: Complex64,
    pub s_vv: Complex64,
}

impl ScatteringSample {
    pub fn new(s_hh: Complex64, s_hv: Complex64, s_vv: Complex64) -> Self {
        Self { s_hh, s_hv, s_vv }
    }

    pub fn is_finite(&self) -> bool {
        self.s_hh.is_finite() && self.s_hv.is_finite() && self.s_vv.is_finite()
    }
}

/// Scattering vector in the Pauli basis: components are
/// `(S_HH+S_VV, S_HH-S_VV, 2*S_HV)` scaled by `1/sqrt(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliVector(pub [Complex64; 3]);

/// Lexicographic target vector `(S_HH, sqrt(2)*S_HV, S_VV)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetVector(pub [Complex64; 3]);

impl PauliVector {
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Rank-1 coherency matrix `k * k*ᵀ`.
    pub fn outer(&self) -> HermitianMatrix3 {
        outer_product(&self.0)
    }
}

impl TargetVector {
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Rank-1 covariance matrix `h * h*ᵀ`.
    pub fn outer(&self) -> HermitianMatrix3 {
        outer_product(&self.0)
    }
}

/// Pauli scattering vector of a sample.
pub fn pauli_vector(s: &ScatteringSample) -> PauliVector {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    PauliVector([
        (s.s_hh + s.s_vv) * inv_sqrt2,
        (s.s_hh - s.s_vv) * inv_sqrt2,
        s.s_hv * 2.0 * inv_sqrt2,
    ])
}

/// Lexicographic target vector of a sample.
pub fn target_vector(s: &ScatteringSample) -> TargetVector {
    TargetVector([s.s_hh, s.s_hv * std::f64::consts::SQRT_2, s.s_vv])
}

/// The fixed unitary mapping the target basis to the Pauli basis,
/// `k = D * h`. Coherency and covariance matrices are related by
/// `T = D * Z * D*ᵀ`.
pub fn pauli_basis_matrix() -> [[Complex64; 3]; 3] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let c = |x: f64| Complex64::new(x, 0.0);
    [
        [c(r), c(0.0), c(r)],
        [c(r), c(0.0), c(-r)],
        [c(0.0), c(1.0), c(0.0)],
    ]
}

fn outer_product(v: &[Complex64; 3]) -> HermitianMatrix3 {
    HermitianMatrix3 {
        diag: [v[0].norm_sqr(), v[1].norm_sqr(), v[2].norm_sqr()],
        upper: [
            v[0] * v[1].conj(),
            v[0] * v[2].conj(),
            v[1] * v[2].conj(),
        ],
    }
}

/// Average of the outer products of `samples`; the multi-look covariance
/// `Z = (1/n) * sumh_k h_k*ᵀ`.
pub fn multilook(samples: &[TargetVector]) -> Result<HermitianMatrix3> {
    if samples.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let mut acc = HermitianMatrix3::zero();
    for s in samples {
        acc += s.outer();
    }
    Ok(acc.scaled(1.0 / samples.len() as f64))
}

/// 3x3 complex Hermitian matrix stored as 6 independent values.
///
/// `diag` holds the real diagonal, `upper` the (0,1), (0,2), (1,2) entries;
/// the lower triangle is implied by conjugate symmetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMatrix3 {
    pub diag: [f64; 3],
    pub upper: [Complex64; 3],
}

impl HermitianMatrix3 {
    pub fn zero() -> Self {
        Self {
            diag: [0.0; 3],
            upper: [Complex64::new(0.0, 0.0); 3],
        }
    }

    pub fn new(diag: [f64; 3], upper: [Complex64; 3]) -> Self {
        Self { diag, upper }
    }

    pub fn from_diag(d: [f64; 3]) -> Self {
        Self {
            diag: d,
            upper: [Complex64::new(0.0, 0.0); 3],
        }
    }

    pub fn identity() -> Self {
        Self::from_diag([1.0, 1.0, 1.0])
    }

    /// Entry (i, j) of the full matrix.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match (i, j) {
            (0, 0) | (1, 1) | (2, 2) => Complex64::new(self.diag[i], 0.0),
            (0, 1) => self.upper[0],
            (0, 2) => self.upper[1],
            (1, 2) => self.upper[2],
            (1, 0) => self.upper[0].conj(),
            (2, 0) => self.upper[1].conj(),
            (2, 1) => self.upper[2].conj(),
            _ => panic!("index out of range: ({i}, {j})"),
        }
    }

    pub fn full(&self) -> [[Complex64; 3]; 3] {
        let mut m = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.get(i, j);
            }
        }
        m
    }

    /// Hermitian part of a full matrix. Inputs that are Hermitian up to
    /// rounding (e.g. results of unitary conjugation) pack losslessly.
    pub fn from_full(m: &[[Complex64; 3]; 3]) -> Self {
        Self {
            diag: [m[0][0].re, m[1][1].re, m[2][2].re],
            upper: [
                (m[0][1] + m[1][0].conj()) * 0.5,
                (m[0][2] + m[2][0].conj()) * 0.5,
                (m[1][2] + m[2][1].conj()) * 0.5,
            ],
        }
    }

    pub fn trace(&self) -> f64 {
        self.diag[0] + self.diag[1] + self.diag[2]
    }

    pub fn frobenius_norm(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|x| x * x).sum();
        let u: f64 = self.upper.iter().map(|c| c.norm_sqr()).sum();
        (d + 2.0 * u).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.diag.iter().all(|x| x.is_finite()) && self.upper.iter().all(|c| c.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            diag: [self.diag[0] * c, self.diag[1] * c, self.diag[2] * c],
            upper: [self.upper[0] * c, self.upper[1] * c, self.upper[2] * c],
        }
    }

    /// Determinant; real for Hermitian matrices.
    pub fn det(&self) -> f64 {
        let [a, b, c] = self.diag;
        let [u, v, w] = self.upper;
        a * b * c - a * w.norm_sqr() - b * v.norm_sqr() - c * u.norm_sqr()
            + 2.0 * (u * w * v.conj()).re
    }

    /// Inverse via the adjugate; the inverse of a Hermitian matrix is
    /// Hermitian. Fails when the determinant vanishes.
    pub fn inverse(&self) -> Result<HermitianMatrix3> {
        let det = self.det();
        if !det.is_finite() || det.abs() <= f64::MIN_POSITIVE {
            return Err(Error::Data(format!(
                "matrix is numerically singular (det = {det:e})"
            )));
        }
        let [a, b, c] = self.diag;
        let [u, v, w] = self.upper;
        let inv = 1.0 / det;
        Ok(HermitianMatrix3 {
            diag: [
                (b * c - w.norm_sqr()) * inv,
                (a * c - v.norm_sqr()) * inv,
                (a * b - u.norm_sqr()) * inv,
            ],
            upper: [
                (v * w.conj() - u * c) * inv,
                (u * w - v * b) * inv,
                (v * u.conj() - w * a) * inv,
            ],
        })
    }

    /// `tr(self * other)`; real for Hermitian operands.
    pub fn trace_product(&self, other: &HermitianMatrix3) -> f64 {
        let diag: f64 = (0..3).map(|i| self.diag[i] * other.diag[i]).sum();
        let off: f64 = (0..3)
            .map(|k| (self.upper[k] * other.upper[k].conj()).re)
            .sum();
        diag + 2.0 * off
    }

    /// Lower Cholesky factor `L` with `M = L * L*ᵀ`. Pivots below
    /// `CHOLESKY_PIVOT_FACTOR * trace` reject the matrix as not PD.
    pub fn cholesky_lower(&self) -> Result<[[Complex64; 3]; 3]> {
        let threshold = CHOLESKY_PIVOT_FACTOR * self.trace();
        let m = self.full();
        let mut l = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..=i {
                let mut sum = m[i][j];
                for k in 0..j {
                    sum -= l[i][k] * l[j][k].conj();
                }
                if i == j {
                    let pivot = sum.re;
                    if pivot < threshold || pivot <= 0.0 {
                        return Err(Error::Cholesky { pivot, threshold });
                    }
                    l[i][j] = Complex64::new(pivot.sqrt(), 0.0);
                } else {
                    l[i][j] = sum / l[j][j].re;
                }
            }
        }
        Ok(l)
    }

    /// Unitary conjugation `U * self * U*ᵀ`, re-packed Hermitian.
    pub fn conjugate_by(&self, u: &[[Complex64; 3]; 3]) -> HermitianMatrix3 {
        let m = self.full();
        // B = U * M
        let mut b = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i][j] = (0..3).map(|k| u[i][k] * m[k][j]).sum();
            }
        }
        // C = B * U*ᵀ
        let mut c = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] = (0..3).map(|k| b[i][k] * u[j][k].conj()).sum();
            }
        }
        HermitianMatrix3::from_full(&c)
    }

    /// Covariance-basis matrix (Z) to coherency basis (T).
    pub fn target_to_pauli(&self) -> HermitianMatrix3 {
        self.conjugate_by(&pauli_basis_matrix())
    }

    /// Coherency basis (T) to covariance basis (Z); `D` is unitary so the
    /// inverse conjugation uses `D*ᵀ`.
    pub fn pauli_to_target(&self) -> HermitianMatrix3 {
        let d = pauli_basis_matrix();
        let mut dh = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                dh[i][j] = d[j][i].conj();
            }
        }
        self.conjugate_by(&dh)
    }
}

impl std::ops::Add for HermitianMatrix3 {
    type Output = HermitianMatrix3;
    fn add(self, rhs: HermitianMatrix3) -> HermitianMatrix3 {
        HermitianMatrix3 {
            diag: [
                self.diag[0] + rhs.diag[0],
                self.diag[1] + rhs.diag[1],
                self.diag[2] + rhs.diag[2],
            ],
            upper: [
                self.upper[0] + rhs.upper[0],
                self.upper[1] + rhs.upper[1],
                self.upper[2] + rhs.upper[2],
            ],
        }
    }
}

impl std::ops::AddAssign for HermitianMatrix3 {
    fn add_assign(&mut self, rhs: HermitianMatrix3) {
        *self = *self + rhs;
    }
}

impl std::ops::Sub for HermitianMatrix3 {
    type Output = HermitianMatrix3;
    fn sub(self, rhs: HermitianMatrix3) -> HermitianMatrix3 {
        self + rhs.scaled(-1.0)
    }
}

/// Grid of coherency matrices with the look count used to form them.
#[derive(Debug, Clone)]
pub struct CoherencyRaster {
    width: usize,
    height: usize,
    looks: u32,
    data: Vec<HermitianMatrix3>,
}

impl CoherencyRaster {
    pub fn new(width: usize, height: usize, looks: u32, data: Vec<HermitianMatrix3>) -> Result<Self> {
        if looks < 1 {
            return Err(Error::config("look count must be >= 1"));
        }
        if data.len() != width * height {
            return Err(Error::config(format!(
                "raster data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if let Some(i) = data.iter().position(|m| !m.is_finite()) {
            return Err(Error::Data(format!("non-finite coherency matrix at pixel {i}")));
        }
        Ok(Self {
            width,
            height,
            looks,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn looks(&self) -> u32 {
        self.looks
    }

    pub fn pixels(&self) -> &[HermitianMatrix3] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> &HermitianMatrix3 {
        &self.data[y * self.width + x]
    }
}
