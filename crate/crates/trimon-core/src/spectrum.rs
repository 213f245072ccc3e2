//! Exact-diagonalization oracle for the truncated three-mode circuit
//! Hamiltonian in the harmonic-oscillator product basis.
//!
//! The kinetic terms are E_Ci q_i²; the potential is selectable: the harmonic
//! quadratic part alone, the quartic expansion, or the full trigonometric
//! junction potential at arbitrary loop flux. Trigonometric matrix elements
//! are the exact normal-ordered Fock-basis elements of cos(λx̂) and sin(λx̂),
//! so the only approximation anywhere is the basis truncation itself.

use crate::circuit::{derive_charging_energies, ChargingEnergies, DeviceSpec};
use crate::error::{CoreError, Result};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Which junction potential enters the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialForm {
    /// Quadratic part only; the spectrum is exactly harmonic.
    Harmonic,
    /// Fourth-order expansion of the junction potential.
    Quartic,
    /// Full cos/sin potential, including the flux-dependent odd term.
    Cosine,
}

impl std::str::FromStr for PotentialForm {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic" => Ok(Self::Harmonic),
            "quartic" => Ok(Self::Quartic),
            "cosine" | "full" => Ok(Self::Cosine),
            other => Err(CoreError::InvalidInput(format!(
                "unknown potential form '{other}' (expected harmonic|quartic|cosine)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Fock states kept per mode; Hilbert dimension is n_max³.
    pub n_max: usize,
    pub form: PotentialForm,
    /// Re-diagonalize with one extra Fock state per mode and measure the
    /// ground-state population on the added layer.
    pub check_convergence: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            n_max: 6,
            form: PotentialForm::Quartic,
            check_convergence: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Sorted eigenvalues in Hz, shifted so the ground state is zero.
    pub levels: Vec<f64>,
    pub n_max: usize,
    /// Ground-state population on the top Fock layer at n_max + 1, when the
    /// convergence check ran.
    pub leakage: Option<f64>,
}

impl SpectrumResult {
    pub fn is_converged(&self) -> bool {
        self.leakage.is_none_or(|l| l <= 1e-6)
    }

    pub fn ensure_converged(&self) -> Result<()> {
        match self.leakage {
            Some(l) if l > 1e-6 => Err(CoreError::Truncation { leakage: l }),
            _ => Ok(()),
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// −(a† − a)² in the Fock basis: diag 2n+1 with −√((n+1)(n+2)) two off.
fn q2_op(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = 2.0 * k as f64 + 1.0;
    }
    for k in 0..n.saturating_sub(2) {
        let v = -(((k + 1) * (k + 2)) as f64).sqrt();
        m[(k, k + 2)] = v;
        m[(k + 2, k)] = v;
    }
    m
}

/// (a† + a)² in the Fock basis.
fn x2_op(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = 2.0 * k as f64 + 1.0;
    }
    for k in 0..n.saturating_sub(2) {
        let v = (((k + 1) * (k + 2)) as f64).sqrt();
        m[(k, k + 2)] = v;
        m[(k + 2, k)] = v;
    }
    m
}

/// (a† + a)⁴, computed in a padded basis so the truncated block is exact.
fn x4_op(n: usize) -> DMatrix<f64> {
    let big = x2_op(n + 2);
    let prod = &big * &big;
    prod.view((0, 0), (n, n)).into()
}

/// Exact Fock-basis matrix elements of cos(λx̂) and sin(λx̂) from the
/// normal-ordered expansion of exp(iλx̂).
fn cos_sin_ops(lambda: f64, n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut cos_m = DMatrix::zeros(n, n);
    let mut sin_m = DMatrix::zeros(n, n);
    let pref = (-lambda * lambda / 2.0).exp();
    for m in 0..n {
        for k in 0..=m {
            let d = m - k;
            let mut sum = 0.0;
            for q in 0..=k {
                sum += (-lambda * lambda).powi(q as i32)
                    / (factorial(d + q) * factorial(q) * factorial(k - q));
            }
            let val = pref * lambda.powi(d as i32) * (factorial(m) * factorial(k)).sqrt() * sum;
            if d % 2 == 0 {
                let signed = if (d / 2) % 2 == 0 { val } else { -val };
                cos_m[(m, k)] = signed;
                cos_m[(k, m)] = signed;
            } else {
                let signed = if ((d - 1) / 2) % 2 == 0 { val } else { -val };
                sin_m[(m, k)] = signed;
                sin_m[(k, m)] = signed;
            }
        }
    }
    (cos_m, sin_m)
}

fn kron3(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b).kronecker(c)
}

/// Zero-point amplitudes of the reduced mode fluxes φ_i = Φ_i/φ0.
fn phi_zp(ej: f64, ec: &ChargingEnergies) -> (f64, f64, f64) {
    (
        (2.0 * (ec.e_ca / (2.0 * ej)).sqrt()).sqrt(),
        (2.0 * (ec.e_cb / (2.0 * ej)).sqrt()).sqrt(),
        (2.0 * (ec.e_cc / (8.0 * ej)).sqrt()).sqrt(),
    )
}

/// Assemble the three-mode Hamiltonian (Hz) in the Fock product basis with
/// index ((n_A · n) + n_B) · n + n_C.
pub fn build_hamiltonian(
    spec: &DeviceSpec,
    ec: &ChargingEnergies,
    n_max: usize,
    form: PotentialForm,
) -> DMatrix<f64> {
    let n = n_max;
    let ej = spec.ej_hz;
    let eye = DMatrix::<f64>::identity(n, n);
    let q2 = q2_op(n);
    let (pa, pb, pc) = phi_zp(ej, ec);
    let (ka, kb, kc) = (
        (ej * ec.e_ca / 2.0).sqrt(),
        (ej * ec.e_cb / 2.0).sqrt(),
        (2.0 * ej * ec.e_cc).sqrt(),
    );

    let mut h = kron3(&q2, &eye, &eye) * ka;
    h += kron3(&eye, &q2, &eye) * kb;
    h += kron3(&eye, &eye, &q2) * kc;

    match form {
        PotentialForm::Harmonic => {
            let x2 = x2_op(n);
            h += kron3(&x2, &eye, &eye) * ka;
            h += kron3(&eye, &x2, &eye) * kb;
            h += kron3(&eye, &eye, &x2) * kc;
        }
        PotentialForm::Quartic => {
            let x2 = x2_op(n);
            let x4 = x4_op(n);
            h += kron3(&x2, &eye, &eye) * (ej / 2.0 * pa * pa);
            h += kron3(&eye, &x2, &eye) * (ej / 2.0 * pb * pb);
            h += kron3(&eye, &eye, &x2) * (2.0 * ej * pc * pc);
            h -= kron3(&x4, &eye, &eye) * (ej / 96.0 * pa.powi(4));
            h -= kron3(&eye, &x4, &eye) * (ej / 96.0 * pb.powi(4));
            h -= kron3(&eye, &eye, &x4) * (ej / 6.0 * pc.powi(4));
            h -= kron3(&x2, &x2, &eye) * (ej / 16.0 * pa * pa * pb * pb);
            h -= kron3(&eye, &x2, &x2) * (ej / 4.0 * pb * pb * pc * pc);
            h -= kron3(&x2, &eye, &x2) * (ej / 4.0 * pc * pc * pa * pa);
        }
        PotentialForm::Cosine => {
            let (cos_a, sin_a) = cos_sin_ops(pa / 2.0, n);
            let (cos_b, sin_b) = cos_sin_ops(pb / 2.0, n);
            let (cos_c, sin_c) = cos_sin_ops(pc, n);
            let flux_angle = PI * spec.flux / 2.0;
            h -= kron3(&cos_a, &cos_b, &cos_c) * (4.0 * ej * flux_angle.cos());
            h -= kron3(&sin_a, &sin_b, &sin_c) * (4.0 * ej * flux_angle.sin());
        }
    }
    h
}

fn sorted_eigen(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let se = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Ground-state population on basis states that touch the top Fock layer.
fn top_layer_population(ground: nalgebra::DVectorView<f64>, n: usize) -> f64 {
    let mut pop = 0.0;
    for idx in 0..ground.len() {
        let na = idx / (n * n);
        let nb = (idx / n) % n;
        let nc = idx % n;
        if na == n - 1 || nb == n - 1 || nc == n - 1 {
            pop += ground[idx] * ground[idx];
        }
    }
    pop
}

/// Diagonalize the truncated circuit Hamiltonian; eigenvalues are shifted so
/// the ground state sits at zero. A leakage above 1e-6 in the convergence
/// check marks the truncation as too small (see
/// [`SpectrumResult::ensure_converged`]).
pub fn exact_spectrum(spec: &DeviceSpec, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    if opts.n_max < 3 {
        return Err(CoreError::InvalidInput(format!(
            "n_max must be at least 3, got {}",
            opts.n_max
        )));
    }
    let ec = derive_charging_energies(spec)?;
    let h = build_hamiltonian(spec, &ec, opts.n_max, opts.form);
    let (vals, _) = sorted_eigen(&h);
    let ground = vals[0];
    let levels = vals.iter().map(|v| v - ground).collect();

    let leakage = if opts.check_convergence {
        let n_big = opts.n_max + 1;
        let h_big = build_hamiltonian(spec, &ec, n_big, opts.form);
        let (_, vecs) = sorted_eigen(&h_big);
        Some(top_layer_population(vecs.column(0).as_view(), n_big))
    } else {
        None
    };

    Ok(SpectrumResult {
        levels,
        n_max: opts.n_max,
        leakage,
    })
}

/// Eigenvalues (ground-shifted, Hz) of the low-lying states identified by
/// maximum overlap with the given bare Fock occupations.
pub fn levels_by_occupation(
    spec: &DeviceSpec,
    opts: &SpectrumOptions,
    occupations: &[(usize, usize, usize)],
) -> Result<Vec<f64>> {
    if opts.n_max < 3 {
        return Err(CoreError::InvalidInput(format!(
            "n_max must be at least 3, got {}",
            opts.n_max
        )));
    }
    let ec = derive_charging_energies(spec)?;
    let n = opts.n_max;
    let h = build_hamiltonian(spec, &ec, n, opts.form);
    let (vals, vecs) = sorted_eigen(&h);
    let find = |occ: (usize, usize, usize)| -> f64 {
        let idx = (occ.0 * n + occ.1) * n + occ.2;
        let mut best = 0;
        let mut best_ov = -1.0;
        for k in 0..vals.len() {
            let ov = vecs[(idx, k)] * vecs[(idx, k)];
            if ov > best_ov {
                best_ov = ov;
                best = k;
            }
        }
        vals[best]
    };
    let ground = find((0, 0, 0));
    Ok(occupations.iter().map(|&occ| find(occ) - ground).collect())
}
