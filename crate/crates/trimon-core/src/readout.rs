//! Dispersive joint-readout Monte Carlo: Gaussian pointer model, voltage
//! thresholding, heralding, and the over-complete 18-setting tomography
//! measurement set with the population-exchange (CNOT-pair) variant.

use crate::error::{CoreError, Result};
use crate::gates::rotation_2x2;
use crate::linalg::{kron, CMatrix, CVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Joint-readout voltage model.
///
/// Mean voltage per basis state: μ_s = β0 + β1 z_A + β2 z_B + β12 z_A z_B
/// with z = +1 for ground. States are classified 00 above `vth_plus`, 11
/// below `vth_minus`, discarded in between.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeasurementModel {
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta12: f64,
    pub sigma: f64,
    pub vth_plus: f64,
    pub vth_minus: f64,
    /// Post-select on an initial |000⟩ strong measurement.
    pub herald: bool,
    /// Residual per-qubit excited population rejected by heralding.
    pub p_therm: f64,
}

impl MeasurementModel {
    pub fn new(
        beta0: f64,
        beta1: f64,
        beta2: f64,
        beta12: f64,
        sigma: f64,
        vth_plus: f64,
        vth_minus: f64,
    ) -> Result<Self> {
        let model = Self {
            beta0,
            beta1,
            beta2,
            beta12,
            sigma,
            vth_plus,
            vth_minus,
            herald: false,
            p_therm: 0.0,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma <= 0.0 {
            return Err(CoreError::InvalidInput("sigma must be positive".into()));
        }
        let mu = self.means();
        let mid_max = mu[1].max(mu[2]);
        let mid_min = mu[1].min(mu[2]);
        if !(mu[0] > self.vth_plus
            && self.vth_plus > mid_max
            && mid_min > self.vth_minus
            && self.vth_minus > mu[3])
        {
            return Err(CoreError::InvalidInput(format!(
                "voltage ordering violated: need μ00 > vth+ > μ01,μ10 > vth− > μ11, got μ={mu:?}, thresholds ({}, {})",
                self.vth_plus, self.vth_minus
            )));
        }
        if !(0.0..1.0).contains(&self.p_therm) {
            return Err(CoreError::InvalidInput(
                "p_therm must lie in [0, 1)".into(),
            ));
        }
        Ok(())
    }

    /// Mean voltages for (00, 01, 10, 11).
    pub fn means(&self) -> [f64; 4] {
        let mut mu = [0.0; 4];
        for (s, entry) in mu.iter_mut().enumerate() {
            let z_a = if s & 0b10 == 0 { 1.0 } else { -1.0 };
            let z_b = if s & 0b01 == 0 { 1.0 } else { -1.0 };
            *entry = self.beta0 + self.beta1 * z_a + self.beta2 * z_b + self.beta12 * z_a * z_b;
        }
        mu
    }
}

impl Default for MeasurementModel {
    /// Synthetic default reproducing the histogram phenomenology: 00 and 11
    /// well separated at ±4σ, 01 and 10 largely overlapping at ±0.5σ,
    /// thresholds at ±2.5σ.
    fn default() -> Self {
        Self {
            beta0: 0.0,
            beta1: 2.25,
            beta2: 1.75,
            beta12: 0.0,
            sigma: 1.0,
            vth_plus: 2.5,
            vth_minus: -2.5,
            herald: false,
            p_therm: 0.0,
        }
    }
}

/// Classified measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    ZeroZero,
    OneOne,
    Discard,
}

/// Threshold classification; boundary values map to discard.
pub fn classify(v: f64, model: &MeasurementModel) -> Outcome {
    if v > model.vth_plus {
        Outcome::ZeroZero
    } else if v < model.vth_minus {
        Outcome::OneOne
    } else {
        Outcome::Discard
    }
}

/// One raw readout record.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShotRecord {
    pub setting: usize,
    pub v: f64,
    pub outcome: Outcome,
}

/// Draw voltage records for a population vector over (00, 01, 10, 11).
pub fn sample_shots(
    probabilities: [f64; 4],
    model: &MeasurementModel,
    n_shots: usize,
    rng: &mut impl Rng,
) -> Result<Vec<ShotRecord>> {
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 || probabilities.iter().any(|p| *p < -1e-12) {
        return Err(CoreError::InvalidInput(format!(
            "probabilities must be nonnegative and sum to 1, got {probabilities:?}"
        )));
    }
    let mu = model.means();
    let noise = Normal::new(0.0, model.sigma)
        .map_err(|e| CoreError::InvalidInput(format!("bad noise width: {e}")))?;
    let mut records = Vec::with_capacity(n_shots);
    for _ in 0..n_shots {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let mut state = 3;
        for (s, p) in probabilities.iter().enumerate() {
            acc += p;
            if r < acc {
                state = s;
                break;
            }
        }
        let v = mu[state] + noise.sample(rng);
        records.push(ShotRecord {
            setting: 0,
            v,
            outcome: classify(v, model),
        });
    }
    Ok(records)
}

/// Tomography pre-rotation alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PreRotation {
    /// Measure Z directly.
    Identity,
    /// R_x(π/2): maps the y-axis onto the measurement axis.
    XHalf,
    /// R_y(−π/2): maps the x-axis onto the measurement axis.
    YMinusHalf,
}

impl PreRotation {
    pub const ALL: [PreRotation; 3] = [
        PreRotation::Identity,
        PreRotation::XHalf,
        PreRotation::YMinusHalf,
    ];

    pub fn matrix(&self) -> CMatrix {
        match self {
            PreRotation::Identity => CMatrix::identity(2, 2),
            PreRotation::XHalf => rotation_2x2(-FRAC_PI_2, FRAC_PI_2),
            PreRotation::YMinusHalf => rotation_2x2(0.0, -FRAC_PI_2),
        }
    }
}

/// One of the 18 measurement settings: a pre-rotation pair, with or without
/// the population-exchange CNOT pair before classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TomographySetting {
    pub pre_a: PreRotation,
    pub pre_b: PreRotation,
    pub cnot_pair: bool,
}

impl TomographySetting {
    pub fn pre_rotation(&self) -> CMatrix {
        kron(&self.pre_a.matrix(), &self.pre_b.matrix())
    }
}

/// The over-complete set: 9 pre-rotation pairs × {plain, CNOT-pair}.
pub fn tomography_settings() -> Vec<TomographySetting> {
    let mut out = Vec::with_capacity(18);
    for pre_a in PreRotation::ALL {
        for pre_b in PreRotation::ALL {
            for cnot_pair in [false, true] {
                out.push(TomographySetting {
                    pre_a,
                    pre_b,
                    cnot_pair,
                });
            }
        }
    }
    out
}

/// Population exchange |01⟩↔|00⟩, |10⟩↔|11⟩ applied by the two-CNOT pair.
pub fn exchange_populations(p: [f64; 4]) -> [f64; 4] {
    [p[1], p[0], p[3], p[2]]
}

/// Born populations of a state after a setting's pre-rotations (and
/// population exchange when flagged).
pub fn setting_populations(rho: &CMatrix, setting: &TomographySetting) -> [f64; 4] {
    let u = setting.pre_rotation();
    let rotated = &u * rho * u.adjoint();
    let mut p = [0.0; 4];
    for s in 0..4 {
        p[s] = rotated[(s, s)].re.max(0.0);
    }
    if setting.cnot_pair {
        p = exchange_populations(p);
    }
    p
}

/// Effective measured projector |ψ⟩ = (U_A ⊗ U_B)†|s⟩ for outcome s of a
/// pre-rotation pair.
pub fn setting_projector(pre_a: PreRotation, pre_b: PreRotation, s: usize) -> CVector {
    let u = kron(&pre_a.matrix(), &pre_b.matrix());
    let mut basis = CVector::zeros(4);
    basis[s] = crate::linalg::ONE;
    u.adjoint() * basis
}

/// Per-pre-rotation-pair measurement record: classified counts from the two
/// setting variants plus the combined occurrence frequencies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SettingData {
    pub pre_a: PreRotation,
    pub pre_b: PreRotation,
    /// (n00, n11, discards) from the plain variant.
    pub counts_plain: [u64; 3],
    /// (n00, n11, discards) from the CNOT-pair variant.
    pub counts_cnot: [u64; 3],
    pub shots_per_variant: u64,
    pub herald_discards: u64,
    /// Occurrence frequencies over (00, 01, 10, 11).
    pub f: [f64; 4],
}

/// Combine kept counts from the two variants into occurrence frequencies:
/// 00/11 from the plain variant, 01/10 from the population-exchange variant,
/// normalized over all kept shots.
pub fn combine_frequencies(counts_plain: [u64; 3], counts_cnot: [u64; 3]) -> Result<[f64; 4]> {
    let raw = [
        counts_plain[0] as f64,
        counts_cnot[0] as f64,
        counts_cnot[1] as f64,
        counts_plain[1] as f64,
    ];
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        return Err(CoreError::InsufficientStatistics(
            "all shots discarded in a setting".into(),
        ));
    }
    Ok([
        raw[0] / total,
        raw[1] / total,
        raw[2] / total,
        raw[3] / total,
    ])
}

/// Full tomography dataset for one input state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TomoData {
    pub settings: Vec<SettingData>,
    /// Raw voltage records in setting order (empty in analytic mode).
    pub records: Vec<ShotRecord>,
    pub analytic: bool,
}

/// Run the measurement pipeline on a two-qubit state.
///
/// `shots_per_setting = 0` selects the analytic infinite-shot mode where the
/// occurrence frequencies equal the exact Born populations (no pointer noise,
/// no misclassification). Otherwise each of the 18 settings draws that many
/// voltage records with per-setting deterministic RNG streams derived from
/// `seed`.
pub fn run_tomography(
    rho: &CMatrix,
    model: &MeasurementModel,
    shots_per_setting: usize,
    seed: u64,
) -> Result<TomoData> {
    model.validate()?;
    let pairs: Vec<(PreRotation, PreRotation)> = PreRotation::ALL
        .iter()
        .flat_map(|a| PreRotation::ALL.iter().map(move |b| (*a, *b)))
        .collect();

    if shots_per_setting == 0 {
        let settings = pairs
            .iter()
            .map(|&(pre_a, pre_b)| {
                let p = setting_populations(
                    rho,
                    &TomographySetting {
                        pre_a,
                        pre_b,
                        cnot_pair: false,
                    },
                );
                SettingData {
                    pre_a,
                    pre_b,
                    counts_plain: [0; 3],
                    counts_cnot: [0; 3],
                    shots_per_variant: 0,
                    herald_discards: 0,
                    f: p,
                }
            })
            .collect();
        return Ok(TomoData {
            settings,
            records: Vec::new(),
            analytic: true,
        });
    }

    let mut settings = Vec::with_capacity(9);
    let mut records = Vec::new();
    for (pair_idx, &(pre_a, pre_b)) in pairs.iter().enumerate() {
        let mut counts = [[0u64; 3]; 2];
        let mut herald_discards = 0u64;
        for (variant, counts_v) in counts.iter_mut().enumerate() {
            let setting = TomographySetting {
                pre_a,
                pre_b,
                cnot_pair: variant == 1,
            };
            let setting_index = 2 * pair_idx + variant;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(setting_index as u64 + 1);
            let p = setting_populations(rho, &setting);
            let mut kept_probs = p;
            // populations are renormalized against roundoff only
            let norm: f64 = kept_probs.iter().sum();
            for q in &mut kept_probs {
                *q /= norm;
            }
            let mut n_kept = 0usize;
            for _ in 0..shots_per_setting {
                if model.herald {
                    let excited = (0..3).any(|_| rng.gen::<f64>() < model.p_therm);
                    if excited {
                        herald_discards += 1;
                        continue;
                    }
                }
                n_kept += 1;
                let mut shot = sample_shots(kept_probs, model, 1, &mut rng)?;
                shot[0].setting = setting_index;
                match shot[0].outcome {
                    Outcome::ZeroZero => counts_v[0] += 1,
                    Outcome::OneOne => counts_v[1] += 1,
                    Outcome::Discard => counts_v[2] += 1,
                }
                records.push(shot[0]);
            }
            let _ = n_kept;
        }
        let f = combine_frequencies(counts[0], counts[1])?;
        settings.push(SettingData {
            pre_a,
            pre_b,
            counts_plain: counts[0],
            counts_cnot: counts[1],
            shots_per_variant: shots_per_setting as u64,
            herald_discards,
            f,
        });
    }
    Ok(TomoData {
        settings,
        records,
        analytic: false,
    })
}

/// Histogram of record voltages: uniform bins over [lo, hi).
pub fn histogram(records: &[ShotRecord], lo: f64, hi: f64, n_bins: usize) -> Vec<(f64, f64, u64)> {
    let width = (hi - lo) / n_bins as f64;
    let mut bins = vec![0u64; n_bins];
    for r in records {
        if r.v >= lo && r.v < hi {
            bins[((r.v - lo) / width) as usize] += 1;
        }
    }
    bins.iter()
        .enumerate()
        .map(|(i, &count)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, count))
        .collect()
}
