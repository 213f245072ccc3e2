//! Maximum-likelihood two-qubit state reconstruction: Cholesky-parameterized
//! density matrices, the Gaussian log-likelihood functional, forced-purity
//! initialization, Uhlmann fidelity and bootstrap uncertainty.

use crate::error::{CoreError, Result};
use crate::linalg::{c, kron, sqrtm_psd, trace, CMatrix, CVector, ONE};
use crate::optim::{nelder_mead, SimplexOptions};
use crate::readout::{combine_frequencies, setting_projector, SettingData, TomoData};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const PROBABILITY_FLOOR: f64 = 1e-12;

/// The 16 real parameters of the upper-triangular factor:
///
/// T = [[t1, t5−it6, t11−it12, t15−it16],
///      [0,  t2,     t7−it8,   t13−it14],
///      [0,  0,      t3,       t9−it10 ],
///      [0,  0,      0,        t4      ]]
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CholeskyParams {
    pub t: [f64; 16],
}

impl CholeskyParams {
    pub fn maximally_mixed() -> Self {
        let mut t = [0.0; 16];
        t[0] = 0.5;
        t[1] = 0.5;
        t[2] = 0.5;
        t[3] = 0.5;
        Self { t }
    }

    fn factor(&self) -> CMatrix {
        let t = &self.t;
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(t[0], 0.0);
        m[(1, 1)] = c(t[1], 0.0);
        m[(2, 2)] = c(t[2], 0.0);
        m[(3, 3)] = c(t[3], 0.0);
        m[(0, 1)] = c(t[4], -t[5]);
        m[(1, 2)] = c(t[6], -t[7]);
        m[(2, 3)] = c(t[8], -t[9]);
        m[(0, 2)] = c(t[10], -t[11]);
        m[(1, 3)] = c(t[12], -t[13]);
        m[(0, 3)] = c(t[14], -t[15]);
        m
    }
}

/// ρ = T†T / Tr[T†T]: Hermitian, positive semidefinite, unit trace for any
/// nonzero parameter vector.
pub fn cholesky_density(params: &CholeskyParams) -> Result<CMatrix> {
    if params.t.iter().all(|v| *v == 0.0) {
        return Err(CoreError::DegenerateParameters(
            "all Cholesky parameters are zero".into(),
        ));
    }
    let t = params.factor();
    let mut rho = t.adjoint() * &t;
    let tr = trace(&rho).re;
    rho /= c(tr, 0.0);
    Ok(rho)
}

/// Upper-triangular factorization of a density matrix back into parameters.
/// Small eigenvalue jitter keeps the factorization defined for rank-deficient
/// states.
pub fn params_from_density(rho: &CMatrix) -> Result<CholeskyParams> {
    let jitter = 1e-12;
    let mut stabilized = rho.clone();
    for i in 0..4 {
        stabilized[(i, i)] += c(jitter, 0.0);
    }
    stabilized /= c(1.0 + 4.0 * jitter, 0.0);
    let chol = nalgebra::Cholesky::new(stabilized.clone()).ok_or_else(|| {
        CoreError::InvalidState("density matrix is not positive semidefinite".into())
    })?;
    // nalgebra returns lower L with ρ = L L†; our convention is ρ = T†T.
    let t = chol.l().adjoint();
    let mut p = [0.0; 16];
    p[0] = t[(0, 0)].re;
    p[1] = t[(1, 1)].re;
    p[2] = t[(2, 2)].re;
    p[3] = t[(3, 3)].re;
    p[4] = t[(0, 1)].re;
    p[5] = -t[(0, 1)].im;
    p[6] = t[(1, 2)].re;
    p[7] = -t[(1, 2)].im;
    p[8] = t[(2, 3)].re;
    p[9] = -t[(2, 3)].im;
    p[10] = t[(0, 2)].re;
    p[11] = -t[(0, 2)].im;
    p[12] = t[(1, 3)].re;
    p[13] = -t[(1, 3)].im;
    p[14] = t[(0, 3)].re;
    p[15] = -t[(0, 3)].im;
    Ok(CholeskyParams { t: p })
}

/// The two-qubit Pauli basis σ_i ⊗ σ_j with index order (I, X, Y, Z).
pub fn pauli_products() -> Vec<CMatrix> {
    let eye = CMatrix::identity(2, 2);
    let mut x = CMatrix::zeros(2, 2);
    x[(0, 1)] = ONE;
    x[(1, 0)] = ONE;
    let mut y = CMatrix::zeros(2, 2);
    y[(0, 1)] = c(0.0, -1.0);
    y[(1, 0)] = c(0.0, 1.0);
    let mut z = CMatrix::identity(2, 2);
    z[(1, 1)] = c(-1.0, 0.0);
    let singles = [eye, x, y, z];
    let mut out = Vec::with_capacity(16);
    for a in &singles {
        for b in &singles {
            out.push(kron(a, b));
        }
    }
    out
}

/// Stokes coefficients S_ij = Tr[ρ (σ_i ⊗ σ_j)]; S_00 is the trace and
/// equals 1 for a normalized state.
pub fn stokes(rho: &CMatrix) -> [[f64; 4]; 4] {
    let paulis = pauli_products();
    let mut s = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            s[i][j] = trace(&(&paulis[4 * i + j] * rho)).re;
        }
    }
    s
}

/// ρ = (1/4) Σ S_ij σ_i ⊗ σ_j.
pub fn density_from_stokes(s: &[[f64; 4]; 4]) -> CMatrix {
    let paulis = pauli_products();
    let mut rho = CMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            rho += &paulis[4 * i + j] * c(s[i][j] / 4.0, 0.0);
        }
    }
    rho
}

/// One likelihood term: the effective measured projector and its observed
/// occurrence frequency.
#[derive(Debug, Clone)]
pub struct LikelihoodTerm {
    pub projector: CVector,
    pub f: f64,
}

/// Expand a tomography dataset into likelihood terms (four outcomes per
/// pre-rotation pair).
pub fn likelihood_terms(data: &TomoData) -> Vec<LikelihoodTerm> {
    let mut terms = Vec::with_capacity(data.settings.len() * 4);
    for setting in &data.settings {
        for s in 0..4 {
            terms.push(LikelihoodTerm {
                projector: setting_projector(setting.pre_a, setting.pre_b, s),
                f: setting.f[s],
            });
        }
    }
    terms
}

/// Gaussian log-likelihood −Σ_k (⟨ψ_k|ρ|ψ_k⟩ − f_k)² / (2⟨ψ_k|ρ|ψ_k⟩); zero
/// at a perfect fit, negative elsewhere. Predicted probabilities are floored
/// at 1e−12; `floor_hits` counts how often the guard engaged.
pub fn log_likelihood_of_density(rho: &CMatrix, terms: &[LikelihoodTerm]) -> (f64, usize) {
    let mut total = 0.0;
    let mut floor_hits = 0;
    for term in terms {
        let p_raw = term.projector.dotc(&(rho * &term.projector)).re;
        let p = if p_raw < PROBABILITY_FLOOR {
            floor_hits += 1;
            PROBABILITY_FLOOR
        } else {
            p_raw
        };
        let d = p - term.f;
        total -= d * d / (2.0 * p);
    }
    (total, floor_hits)
}

/// Log-likelihood as a function of the Cholesky parameters.
pub fn log_likelihood(params: &CholeskyParams, terms: &[LikelihoodTerm]) -> Result<f64> {
    let rho = cholesky_density(params)?;
    Ok(log_likelihood_of_density(&rho, terms).0)
}

/// Linear-inversion estimate followed by eigenvalue clipping: a fast,
/// always-physical starting point for the likelihood search. Falls back to
/// the maximally mixed state when the inversion is singular.
pub fn forced_purity_init(terms: &[LikelihoodTerm]) -> CholeskyParams {
    let paulis = pauli_products();
    let m = terms.len();
    // columns: the 15 free Stokes coefficients (S_00 fixed at 1)
    let mut a = DMatrix::zeros(m, 15);
    let mut b = DVector::zeros(m);
    for (row, term) in terms.iter().enumerate() {
        for idx in 1..16 {
            let expect = term
                .projector
                .dotc(&(&paulis[idx] * &term.projector))
                .re;
            a[(row, idx - 1)] = expect / 4.0;
        }
        let ident = term.projector.dotc(&term.projector).re / 4.0;
        b[row] = term.f - ident;
    }
    let svd = a.svd(true, true);
    let Ok(sol) = svd.solve(&b, 1e-10) else {
        return CholeskyParams::maximally_mixed();
    };
    let mut s = [[0.0; 4]; 4];
    s[0][0] = 1.0;
    for idx in 1..16 {
        s[idx / 4][idx % 4] = sol[idx - 1];
    }
    let raw = density_from_stokes(&s);
    // hermitize, clip negative eigenvalues, renormalize
    let herm = (&raw + raw.adjoint()) * c(0.5, 0.0);
    let (vals, vecs) = crate::linalg::hermitian_eigen(&herm);
    let clipped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return CholeskyParams::maximally_mixed();
    }
    let mut d = CMatrix::zeros(4, 4);
    for i in 0..4 {
        d[(i, i)] = c(clipped[i] / total, 0.0);
    }
    let physical = &vecs * d * vecs.adjoint();
    params_from_density(&physical).unwrap_or_else(|_| CholeskyParams::maximally_mixed())
}

/// Reconstruction output.
#[derive(Debug, Clone)]
pub struct TomographyResult {
    pub rho: CMatrix,
    pub stokes: [[f64; 4]; 4],
    pub log_likelihood: f64,
    /// Observed frequencies per setting, as fed to the likelihood.
    pub f_k: Vec<[f64; 4]>,
    pub fidelity: Option<f64>,
    pub fidelity_std: Option<f64>,
    pub floor_hits: usize,
    pub converged: bool,
}

/// MLE options.
#[derive(Debug, Clone, Copy)]
pub struct MleOptions {
    pub restarts: usize,
    pub seed: u64,
    pub simplex: SimplexOptions,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            seed: 7,
            simplex: SimplexOptions::default(),
        }
    }
}

/// Maximize the log-likelihood over the Cholesky parameters with a simplex
/// search restarted from perturbed forced-purity initializations. The result
/// is never worse than the initialization.
pub fn mle_reconstruct(data: &TomoData, opts: &MleOptions) -> Result<TomographyResult> {
    let terms = likelihood_terms(data);
    let informative = terms.iter().filter(|t| t.f.is_finite()).count();
    if informative < 16 {
        return Err(CoreError::InsufficientStatistics(format!(
            "{informative} informative settings, need at least 16"
        )));
    }
    let init = forced_purity_init(&terms);
    let objective = |t: &[f64]| -> f64 {
        let params = CholeskyParams {
            t: t.try_into().expect("16 parameters"),
        };
        match cholesky_density(&params) {
            Ok(rho) => -log_likelihood_of_density(&rho, &terms).0,
            Err(_) => f64::INFINITY,
        }
    };

    let mut best_t = init.t;
    let mut best_obj = objective(&init.t);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for restart in 0..opts.restarts.max(1) {
        let mut start = init.t;
        if restart > 0 {
            for v in &mut start {
                *v += rng.gen_range(-0.05..0.05);
            }
        }
        let (t_opt, obj) = nelder_mead(objective, &start, &opts.simplex);
        if obj < best_obj {
            best_obj = obj;
            best_t = t_opt.try_into().expect("16 parameters");
        }
    }

    if !best_obj.is_finite() {
        return Err(CoreError::Convergence { best: best_obj });
    }
    let params = CholeskyParams { t: best_t };
    let rho = cholesky_density(&params)?;
    let (ll, floor_hits) = log_likelihood_of_density(&rho, &terms);
    Ok(TomographyResult {
        stokes: stokes(&rho),
        rho,
        log_likelihood: ll,
        f_k: data.settings.iter().map(|s| s.f).collect(),
        fidelity: None,
        fidelity_std: None,
        floor_hits,
        converged: true,
    })
}

/// Uhlmann fidelity F = Tr √(√ρ_th ρ √ρ_th).
pub fn fidelity(rho_th: &CMatrix, rho: &CMatrix) -> Result<f64> {
    for (name, m) in [("target", rho_th), ("state", rho)] {
        let tr = trace(m).re;
        if (tr - 1.0).abs() > 1e-6 {
            return Err(CoreError::InvalidState(format!(
                "{name} trace {tr} is not 1"
            )));
        }
    }
    let sqrt_th = sqrtm_psd(rho_th)
        .map_err(|worst| CoreError::InvalidState(format!("eigenvalue {worst:.3e} below -1e-8")))?;
    let inner = &sqrt_th * rho * &sqrt_th;
    let (vals, _) = crate::linalg::hermitian_eigen(&inner);
    // roundoff-scale eigenvalues would contribute √ε each; drop them
    Ok(vals
        .iter()
        .filter(|v| **v > 1e-14)
        .map(|v| v.sqrt())
        .sum())
}

/// Fidelity against a pure target: √⟨ψ|ρ|ψ⟩.
pub fn fidelity_pure(psi: &CVector, rho: &CMatrix) -> f64 {
    psi.dotc(&(rho * psi)).re.max(0.0).sqrt()
}

/// Resample the classified counts of each setting with replacement, rerun
/// the reconstruction, and return the standard deviation of the fidelity to
/// `target` over `n_resamples` replicas.
pub fn bootstrap_fidelity(
    data: &TomoData,
    target: &CMatrix,
    n_resamples: usize,
    opts: &MleOptions,
) -> Result<f64> {
    if n_resamples < 100 {
        return Err(CoreError::InvalidInput(format!(
            "need at least 100 resamples, got {n_resamples}"
        )));
    }
    if data.analytic {
        return Err(CoreError::InvalidInput(
            "bootstrap needs sampled data, not analytic frequencies".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9e37_79b9).wrapping_add(11));
    let mut fidelities = Vec::with_capacity(n_resamples);
    // cheaper simplex for replicas: the landscape barely moves between them
    let replica_opts = MleOptions {
        restarts: 1,
        ..*opts
    };
    for _ in 0..n_resamples {
        let mut resampled = data.clone();
        for setting in &mut resampled.settings {
            let plain = resample_counts(setting.counts_plain, &mut rng);
            let cnot = resample_counts(setting.counts_cnot, &mut rng);
            setting.counts_plain = plain;
            setting.counts_cnot = cnot;
            setting.f = combine_frequencies(plain, cnot)?;
        }
        let result = mle_reconstruct(&resampled, &replica_opts)?;
        fidelities.push(fidelity(target, &result.rho)?);
    }
    Ok(sample_std(&fidelities))
}

/// Multinomial resampling of a 3-way classified count vector.
fn resample_counts(counts: [u64; 3], rng: &mut impl Rng) -> [u64; 3] {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return counts;
    }
    let p = [
        counts[0] as f64 / total as f64,
        counts[1] as f64 / total as f64,
    ];
    let mut out = [0u64; 3];
    for _ in 0..total {
        let r: f64 = rng.gen();
        if r < p[0] {
            out[0] += 1;
        } else if r < p[0] + p[1] {
            out[1] += 1;
        } else {
            out[2] += 1;
        }
    }
    out
}

/// Bootstrap standard error of a binomial fraction: resample `n` Bernoulli
/// outcomes with success count `k`, return the std of the resampled
/// fractions. Control case for validating the bootstrap machinery.
pub fn bootstrap_binomial_std(k: u64, n: u64, n_resamples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = k as f64 / n as f64;
    let mut fractions = Vec::with_capacity(n_resamples);
    for _ in 0..n_resamples {
        let mut successes = 0u64;
        for _ in 0..n {
            if rng.gen::<f64>() < p {
                successes += 1;
            }
        }
        fractions.push(successes as f64 / n as f64);
    }
    sample_std(&fractions)
}

pub fn sample_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Helper assembling a synthetic analytic dataset from known per-setting
/// frequencies (used by tests and the infinite-shot pipeline).
pub fn analytic_data_from(settings: Vec<SettingData>) -> TomoData {
    TomoData {
        settings,
        records: Vec::new(),
        analytic: true,
    }
}
