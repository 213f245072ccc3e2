//! Dense complex linear algebra helpers shared by the gate, pulse and
//! tomography layers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Maximum absolute entry of `m`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// ‖U†U − I‖_max.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - identity(n)))
}

pub fn trace(m: &CMatrix) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// exp(−i·2π·h_hz·dt) for Hermitian `h_hz` (entries in Hz, `dt` in seconds).
///
/// Taylor series with scaling-and-squaring; for Hermitian input the result is
/// unitary to machine precision at the step sizes used by the propagator.
pub fn expm_minus_i_2pi(h_hz: &CMatrix, dt: f64) -> CMatrix {
    let n = h_hz.nrows();
    let mut a = h_hz * c(0.0, -2.0 * std::f64::consts::PI * dt);
    let norm = max_abs(&a) * n as f64;
    let mut squarings = 0u32;
    while max_abs(&a) * (n as f64) > 0.5 && squarings < 40 {
        a /= c(2.0, 0.0);
        squarings += 1;
    }
    let _ = norm;
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..60 {
        term = (&term * &a) / c(k as f64, 0.0);
        result += &term;
        if max_abs(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching eigenvector columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let se = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Hermitian square root of a positive-semidefinite matrix.
///
/// Eigenvalues more negative than `-1e-8` are rejected; small negative values
/// from roundoff are clipped to zero.
pub fn sqrtm_psd(m: &CMatrix) -> Result<CMatrix, f64> {
    let (vals, vecs) = hermitian_eigen(m);
    if let Some(&worst) = vals
        .iter()
        .filter(|v| **v < -1e-8)
        .min_by(|a, b| a.partial_cmp(b).unwrap())
    {
        return Err(worst);
    }
    let n = m.nrows();
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = c(vals[i].max(0.0).sqrt(), 0.0);
    }
    Ok(&vecs * d * vecs.adjoint())
}

/// Trace distance (1/2)‖ρ − σ‖₁ between Hermitian matrices.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let (vals, _) = hermitian_eigen(&(rho - sigma));
    0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()
}

/// Average gate fidelity between unitaries of dimension d:
/// (|Tr(U†V)|² + d) / (d(d+1)). Insensitive to global phase.
pub fn average_gate_fidelity(u: &CMatrix, v: &CMatrix) -> f64 {
    let d = u.nrows() as f64;
    let t = trace(&(u.adjoint() * v)).norm();
    (t * t + d) / (d * (d + 1.0))
}

/// |⟨a|b⟩|² for normalized state vectors.
pub fn state_overlap(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm_sqr()
}

/// ρ = |ψ⟩⟨ψ|.
pub fn projector(psi: &CVector) -> CMatrix {
    psi * psi.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermitian_eigen_complex_smoke() {
        // 2x2 Hermitian with complex off-diagonal: eigenvalues of
        // [[1, i],[-i, 1]] are 0 and 2.
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = ONE;
        m[(1, 1)] = ONE;
        m[(0, 1)] = I;
        m[(1, 0)] = -I;
        let (vals, vecs) = hermitian_eigen(&m);
        assert_relative_eq!(vals[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(vals[1], 2.0, epsilon = 1e-12);
        let recon = &vecs
            * CMatrix::from_diagonal(&CVector::from_iterator(
                2,
                vals.iter().map(|&v| c(v, 0.0)),
            ))
            * vecs.adjoint();
        assert!(max_abs(&(recon - m)) < 1e-12);
    }

    #[test]
    fn expm_diagonal_phase() {
        // exp(-i 2π f dt) on a diagonal generator is a pure phase.
        let mut h = CMatrix::zeros(2, 2);
        h[(1, 1)] = c(5e9, 0.0);
        let u = expm_minus_i_2pi(&h, 1e-10);
        assert_relative_eq!(u[(0, 0)].re, 1.0, epsilon = 1e-14);
        let expected = c(0.0, -2.0 * std::f64::consts::PI * 0.5).exp();
        assert!((u[(1, 1)] - expected).norm() < 1e-12);
        assert!(unitarity_error(&u) < 1e-13);
    }

    #[test]
    fn sqrtm_of_projector() {
        let psi = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let p = projector(&psi);
        let s = sqrtm_psd(&p).unwrap();
        assert!(max_abs(&(&s * &s - p)) < 1e-12);
    }
}
