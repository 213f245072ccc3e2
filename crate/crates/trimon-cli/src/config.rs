//! JSON run configuration: device inputs plus optional cavity, readout and
//! pulse sections.

use crate::error::{CliError, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use trimon_core::circuit::{
    derive_charging_energies, derive_kerr_couplings, derive_mode_params, transition_bands,
    CavityParams, ChargingEnergies, DeviceSpec, KerrCouplings, ModeParams, Qubit, SpinModel,
    TransitionTable,
};
use trimon_core::pulse::PulseConfig;
use trimon_core::readout::MeasurementModel;

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ConfigFile {
    pub device: DeviceSection,
    #[serde(default)]
    pub cavity: Option<CavitySection>,
    #[serde(default)]
    pub readout: ReadoutSection,
    #[serde(default)]
    pub pulses: PulseSection,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct DeviceSection {
    pub ej_ghz: f64,
    pub ca_ff: f64,
    pub cb_ff: f64,
    pub ccp_ff: f64,
    #[serde(default)]
    pub flux: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct CavitySection {
    pub omega_bare_ghz: f64,
    pub g_mhz: f64,
    pub kappa_mhz: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default)]
pub struct ReadoutSection {
    pub beta0_v: f64,
    pub beta1_v: f64,
    pub beta2_v: f64,
    pub beta12_v: f64,
    pub sigma_v: f64,
    pub vth_plus_v: f64,
    pub vth_minus_v: f64,
    pub herald: bool,
    pub p_therm: f64,
    pub seed: Option<u64>,
}

impl Default for ReadoutSection {
    fn default() -> Self {
        let m = MeasurementModel::default();
        Self {
            beta0_v: m.beta0,
            beta1_v: m.beta1,
            beta2_v: m.beta2,
            beta12_v: m.beta12,
            sigma_v: m.sigma,
            vth_plus_v: m.vth_plus,
            vth_minus_v: m.vth_minus,
            herald: m.herald,
            p_therm: m.p_therm,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default)]
pub struct PulseSection {
    pub dt_ps: f64,
    pub pi_a_ns: f64,
    pub pi_b_ns: f64,
    pub half_pi_a_ns: f64,
    pub half_pi_b_ns: f64,
    pub quarter_pi_a_ns: f64,
    pub quarter_pi_b_ns: f64,
}

impl Default for PulseSection {
    fn default() -> Self {
        let p = PulseConfig::default();
        Self {
            dt_ps: p.dt / 1e-12,
            pi_a_ns: p.pi_a / 1e-9,
            pi_b_ns: p.pi_b / 1e-9,
            half_pi_a_ns: p.half_pi_a / 1e-9,
            half_pi_b_ns: p.half_pi_b / 1e-9,
            quarter_pi_a_ns: p.quarter_pi_a / 1e-9,
            quarter_pi_b_ns: p.quarter_pi_b / 1e-9,
        }
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config_io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::config_io(path, e))
    }

    pub fn device_spec(&self) -> Result<DeviceSpec> {
        DeviceSpec::new(
            self.device.ej_ghz * 1e9,
            self.device.ca_ff * 1e-15,
            self.device.cb_ff * 1e-15,
            self.device.ccp_ff * 1e-15,
            self.device.flux,
        )
        .map_err(CliError::from)
    }

    pub fn measurement_model(&self) -> Result<MeasurementModel> {
        let r = &self.readout;
        let mut model = MeasurementModel::new(
            r.beta0_v,
            r.beta1_v,
            r.beta2_v,
            r.beta12_v,
            r.sigma_v,
            r.vth_plus_v,
            r.vth_minus_v,
        )?;
        model.herald = r.herald;
        model.p_therm = r.p_therm;
        model.validate()?;
        Ok(model)
    }

    pub fn pulse_config(&self, dt_ps_override: Option<f64>) -> PulseConfig {
        let p = &self.pulses;
        PulseConfig {
            dt: dt_ps_override.unwrap_or(p.dt_ps) * 1e-12,
            pi_a: p.pi_a_ns * 1e-9,
            pi_b: p.pi_b_ns * 1e-9,
            half_pi_a: p.half_pi_a_ns * 1e-9,
            half_pi_b: p.half_pi_b_ns * 1e-9,
            quarter_pi_a: p.quarter_pi_a_ns * 1e-9,
            quarter_pi_b: p.quarter_pi_b_ns * 1e-9,
        }
    }
}

/// Everything the closed-form layer derives from one device spec.
pub struct Derived {
    pub spec: DeviceSpec,
    pub charging: ChargingEnergies,
    pub modes: ModeParams,
    pub kerr: KerrCouplings,
    pub table: TransitionTable,
    pub cavity: Option<CavityParams>,
    pub chi: Option<trimon_core::circuit::DispersiveShifts>,
}

pub fn derive_all(config: &ConfigFile) -> Result<Derived> {
    let spec = config.device_spec()?;
    if spec.flux != 0.0 {
        return Err(CliError::Config(
            "closed-form derivations require flux = 0 (nonzero flux is accepted only by the spectrum oracle)"
                .into(),
        ));
    }
    let charging = derive_charging_energies(&spec)?;
    let modes = derive_mode_params(spec.ej_hz, &charging)?;
    let kerr = derive_kerr_couplings(&charging);
    let table = transition_bands(&modes, &kerr);
    let (cavity, chi) = match &config.cavity {
        Some(c) => {
            let cav = CavityParams::new(
                c.omega_bare_ghz * 1e9,
                c.g_mhz * 1e6,
                c.kappa_mhz * 1e6,
                table.upper(Qubit::A),
                kerr.alpha_a,
            )?;
            let chi = trimon_core::circuit::dispersive_shifts(&cav, &kerr)?;
            (Some(cav), Some(chi))
        }
        None => (None, None),
    };
    Ok(Derived {
        spec,
        charging,
        modes,
        kerr,
        table,
        cavity,
        chi,
    })
}

impl Derived {
    pub fn spin_model(&self) -> SpinModel {
        SpinModel::from_derived(&self.modes, &self.kerr)
    }
}
