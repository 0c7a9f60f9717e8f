//! Eigendecomposition of 3x3 Hermitian matrices by cyclic Jacobi rotations.
//!
//! Each rotation is the complex analogue of the classical plane rotation: the
//! phase of the targeted off-diagonal entry is absorbed into the rotation so
//! the remaining 2x2 subproblem is real, then the usual stable tangent
//! formula annihilates it. At this size the method is unconditionally stable
//! and converges in a handful of sweeps.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{HermitianMatrix3, PSD_EIG_TOL_FACTOR};

/// Convergence when the off-diagonal Frobenius norm drops below
/// `EIG_CONVERGENCE_FACTOR * trace`.
pub const EIG_CONVERGENCE_FACTOR: f64 = 1e-13;

/// Sweep cap; reaching it on valid input indicates a bug upstream.
pub const EIG_MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem3 {
    /// `values[0] >= values[1] >= values[2]`, clamped to be non-negative.
    pub values: [f64; 3],
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: [[Complex64; 3]; 3],
}

impl EigenSystem3 {
    /// `sum_i values[i] * e_i e_i*ᵀ`, for reconstruction checks.
    pub fn reconstruct(&self) -> HermitianMatrix3 {
        let mut m = HermitianMatrix3::zero();
        for i in 0..3 {
            let v = self.vectors[i];
            let rank1 = HermitianMatrix3::new(
                [v[0].norm_sqr(), v[1].norm_sqr(), v[2].norm_sqr()],
                [v[0] * v[1].conj(), v[0] * v[2].conj(), v[1] * v[2].conj()],
            );
            m += rank1.scaled(self.values[i]);
        }
        m
    }
}

fn off_diagonal_norm(a: &[[Complex64; 3]; 3]) -> f64 {
    let s = a[0][1].norm_sqr() + a[0][2].norm_sqr() + a[1][2].norm_sqr();
    (2.0 * s).sqrt()
}

/// Annihilate entry (p, q); updates `a` in place and accumulates the
/// rotation into the eigenvector matrix `v` (columns).
fn rotate(a: &mut [[Complex64; 3]; 3], v: &mut [[Complex64; 3]; 3], p: usize, q: usize) {
    let z = a[p][q];
    let w = z.norm();
    if w == 0.0 {
        return;
    }
    let phase = z / w;
    // Real 2x2 problem in the rotated frame: tan(2theta) = 2w / (a_pp - a_qq).
    let theta = (a[q][q].re - a[p][p].re) / (2.0 * w);
    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // B = A * U with U[p][p]=c, U[p][q]=s*phase, U[q][p]=-s*conj(phase), U[q][q]=c.
    for k in 0..3 {
        let akp = a[k][p];
        let akq = a[k][q];
        a[k][p] = akp * c - akq * s * phase.conj();
        a[k][q] = akp * s * phase + akq * c;
    }
    // A = U*ᵀ * B.
    for j in 0..3 {
        let apj = a[p][j];
        let aqj = a[q][j];
        a[p][j] = apj * c - aqj * s * phase;
        a[q][j] = apj * s * phase.conj() + aqj * c;
    }
    // Freshly annihilated entries are set to exactly zero.
    a[p][q] = Complex64::new(0.0, 0.0);
    a[q][p] = Complex64::new(0.0, 0.0);
    a[p][p] = Complex64::new(a[p][p].re, 0.0);
    a[q][q] = Complex64::new(a[q][q].re, 0.0);

    for k in 0..3 {
        let vkp = v[k][p];
        let vkq = v[k][q];
        v[k][p] = vkp * c - vkq * s * phase.conj();
        v[k][q] = vkp * s * phase + vkq * c;
    }
}

/// Full eigendecomposition of a Hermitian PSD matrix.
///
/// Eigenvalues in `[-tol, 0)` with `tol = PSD_EIG_TOL_FACTOR * trace` are
/// clamped to zero; anything below `-tol` reports `NotPsd`. Non-convergence
/// after [`EIG_MAX_SWEEPS`] reports `EigFailure`.
pub fn hermitian_eig(m: &HermitianMatrix3) -> Result<EigenSystem3> {
    if !m.is_finite() {
        return Err(Error::Data("non-finite matrix in eigendecomposition".into()));
    }
    let trace = m.trace();
    let threshold = EIG_CONVERGENCE_FACTOR * trace.abs();
    let mut a = m.full();
    let mut v = HermitianMatrix3::identity().full();

    let mut converged = false;
    for _ in 0..EIG_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            rotate(&mut a, &mut v, p, q);
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::EigFailure(EIG_MAX_SWEEPS));
    }

    let mut order = [0usize, 1, 2];
    let raw = [a[0][0].re, a[1][1].re, a[2][2].re];
    order.sort_by(|&i, &j| raw[j].partial_cmp(&raw[i]).unwrap());

    let psd_tol = PSD_EIG_TOL_FACTOR * trace.abs();
    let mut values = [0.0; 3];
    let mut vectors = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (rank, &idx) in order.iter().enumerate() {
        let lam = raw[idx];
        if lam < -psd_tol {
            return Err(Error::NotPsd {
                eigenvalue: lam,
                tolerance: psd_tol,
            });
        }
        values[rank] = lam.max(0.0);
        for row in 0..3 {
            vectors[rank][row] = v[row][idx];
        }
    }

    Ok(EigenSystem3 { values, vectors })
}
