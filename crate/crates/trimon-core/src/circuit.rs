//! Static device parameters: charging energies, mode frequencies and
//! impedances, Kerr couplings, anharmonicities, conditional transition bands
//! and dispersive shifts, all derived from the circuit inputs.
//!
//! Every energy is stored as a linear frequency (E/h, Hz). The J/π and χ/2π
//! table conventions are applied only when printing reports.

use crate::constants::{ELECTRON_CHARGE, PLANCK};
use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Qubit labels: A and B are the dipolar modes, C the quadrupolar mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Qubit {
    A,
    B,
    C,
}

impl Qubit {
    pub const ALL: [Qubit; 3] = [Qubit::A, Qubit::B, Qubit::C];

    pub fn index(self) -> usize {
        match self {
            Qubit::A => 0,
            Qubit::B => 1,
            Qubit::C => 2,
        }
    }

    /// Partner ordering used by the conditional-transition table. The first
    /// partner shares the dominant pair coupling of the two-qubit subspace.
    pub fn partners(self) -> (Qubit, Qubit) {
        match self {
            Qubit::A => (Qubit::B, Qubit::C),
            Qubit::B => (Qubit::C, Qubit::A),
            Qubit::C => (Qubit::A, Qubit::B),
        }
    }
}

impl std::fmt::Display for Qubit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Qubit::A => write!(f, "A"),
            Qubit::B => write!(f, "B"),
            Qubit::C => write!(f, "C"),
        }
    }
}

/// Physical circuit inputs.
///
/// `ej_hz` is the Josephson energy of one junction as E_J/h. Capacitances are
/// in farads; `c_cp` is the adjacent-node capacitance including the junction
/// capacitance. `flux` is the loop flux in units of the flux quantum and must
/// be zero for every closed-form derivation; only the exact-diagonalization
/// oracle accepts nonzero flux.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub ej_hz: f64,
    pub c_a: f64,
    pub c_b: f64,
    pub c_cp: f64,
    pub flux: f64,
}

impl DeviceSpec {
    pub fn new(ej_hz: f64, c_a: f64, c_b: f64, c_cp: f64, flux: f64) -> Result<Self> {
        if ej_hz <= 0.0 {
            return Err(CoreError::InvalidInput(format!(
                "Josephson energy must be positive, got {ej_hz}"
            )));
        }
        if c_a <= 0.0 || c_b <= 0.0 || c_cp <= 0.0 {
            return Err(CoreError::InvalidInput(format!(
                "capacitances must be positive, got C_A={c_a}, C_B={c_b}, C_C'={c_cp}"
            )));
        }
        Ok(Self {
            ej_hz,
            c_a,
            c_b,
            c_cp,
            flux,
        })
    }

    /// Invert the charging-energy formulas: build the capacitances that
    /// reproduce the given energies (all in Hz).
    pub fn from_charging_energies(ej_hz: f64, ec: &ChargingEnergies) -> Result<Self> {
        let e2 = ELECTRON_CHARGE * ELECTRON_CHARGE;
        let c_cp = e2 / (8.0 * ec.e_cc * PLANCK);
        let c_a = e2 / (2.0 * ec.e_ca * PLANCK) - c_cp;
        let c_b = e2 / (2.0 * ec.e_cb * PLANCK) - c_cp;
        Self::new(ej_hz, c_a, c_b, c_cp, 0.0)
    }

    /// Desk-scale test device: E_J/h = 8.7 GHz with charging energies chosen
    /// so the anharmonicities come out at (-111.0, -116.0, -138.6) MHz.
    pub fn canonical() -> Self {
        let ec = ChargingEnergies {
            e_ca: 444.0e6,
            e_cb: 464.0e6,
            e_cc: 138.6e6,
        };
        Self::from_charging_energies(8.7e9, &ec).expect("canonical device is valid")
    }
}

/// Charging energies per mode, as E/h in Hz.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ChargingEnergies {
    pub e_ca: f64,
    pub e_cb: f64,
    pub e_cc: f64,
}

/// Uncoupled mode frequencies (ω/2π, Hz) and mode impedances (Ω).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModeParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub omega_c: f64,
    pub z_a: f64,
    pub z_b: f64,
    pub z_c: f64,
}

impl ModeParams {
    pub fn omega(&self, q: Qubit) -> f64 {
        match q {
            Qubit::A => self.omega_a,
            Qubit::B => self.omega_b,
            Qubit::C => self.omega_c,
        }
    }
}

/// Self-Kerr, cross-Kerr, composite shifts and anharmonicities (Hz).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KerrCouplings {
    pub j_a: f64,
    pub j_b: f64,
    pub j_c: f64,
    pub j_ab: f64,
    pub j_bc: f64,
    pub j_ca: f64,
    pub beta_a: f64,
    pub beta_b: f64,
    pub beta_c: f64,
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub alpha_c: f64,
}

impl KerrCouplings {
    pub fn self_kerr(&self, q: Qubit) -> f64 {
        match q {
            Qubit::A => self.j_a,
            Qubit::B => self.j_b,
            Qubit::C => self.j_c,
        }
    }

    pub fn beta(&self, q: Qubit) -> f64 {
        match q {
            Qubit::A => self.beta_a,
            Qubit::B => self.beta_b,
            Qubit::C => self.beta_c,
        }
    }

    pub fn alpha(&self, q: Qubit) -> f64 {
        match q {
            Qubit::A => self.alpha_a,
            Qubit::B => self.alpha_b,
            Qubit::C => self.alpha_c,
        }
    }

    /// Cross-Kerr coupling of the unordered pair containing both qubits.
    pub fn pair(&self, p: Qubit, q: Qubit) -> f64 {
        use Qubit::*;
        match (p, q) {
            (A, B) | (B, A) => self.j_ab,
            (B, C) | (C, B) => self.j_bc,
            (C, A) | (A, C) => self.j_ca,
            _ => panic!("pair coupling requires two distinct qubits"),
        }
    }
}

/// E_CA = e²/(2(C_C'+C_A)), E_CB = e²/(2(C_C'+C_B)), E_CC = e²/(8 C_C'),
/// converted to Hz.
pub fn derive_charging_energies(spec: &DeviceSpec) -> Result<ChargingEnergies> {
    if spec.c_a <= 0.0 || spec.c_b <= 0.0 || spec.c_cp <= 0.0 {
        return Err(CoreError::InvalidInput(
            "capacitances must be positive".into(),
        ));
    }
    let e2 = ELECTRON_CHARGE * ELECTRON_CHARGE;
    Ok(ChargingEnergies {
        e_ca: e2 / (2.0 * (spec.c_cp + spec.c_a)) / PLANCK,
        e_cb: e2 / (2.0 * (spec.c_cp + spec.c_b)) / PLANCK,
        e_cc: e2 / (8.0 * spec.c_cp) / PLANCK,
    })
}

/// ω_A/2π = √(8 E_J E_CA), ω_B/2π = √(8 E_J E_CB), ω_C/2π = √(32 E_J E_CC),
/// with the matching impedances.
pub fn derive_mode_params(ej_hz: f64, ec: &ChargingEnergies) -> Result<ModeParams> {
    if ej_hz <= 0.0 {
        return Err(CoreError::InvalidInput(
            "Josephson energy must be positive".into(),
        ));
    }
    let hbar_over_e2 = crate::constants::HBAR / (ELECTRON_CHARGE * ELECTRON_CHARGE);
    Ok(ModeParams {
        omega_a: (8.0 * ej_hz * ec.e_ca).sqrt(),
        omega_b: (8.0 * ej_hz * ec.e_cb).sqrt(),
        omega_c: (32.0 * ej_hz * ec.e_cc).sqrt(),
        z_a: hbar_over_e2 * (ec.e_ca / (2.0 * ej_hz)).sqrt(),
        z_b: hbar_over_e2 * (ec.e_cb / (2.0 * ej_hz)).sqrt(),
        z_c: hbar_over_e2 * (ec.e_cc / (8.0 * ej_hz)).sqrt(),
    })
}

/// Kerr coefficients from the charging energies. In E/h units:
/// J_A = E_CA/8, J_B = E_CB/8, J_C = E_CC/2,
/// J_AB = √(E_CA E_CB)/4, J_BC = √(E_CB E_CC)/2, J_CA = √(E_CC E_CA)/2,
/// β_i = J_i + J_ij + J_ik, α_A = −E_CA/4, α_B = −E_CB/4, α_C = −E_CC.
pub fn derive_kerr_couplings(ec: &ChargingEnergies) -> KerrCouplings {
    let j_a = ec.e_ca / 8.0;
    let j_b = ec.e_cb / 8.0;
    let j_c = ec.e_cc / 2.0;
    let j_ab = (ec.e_ca * ec.e_cb).sqrt() / 4.0;
    let j_bc = (ec.e_cb * ec.e_cc).sqrt() / 2.0;
    let j_ca = (ec.e_cc * ec.e_ca).sqrt() / 2.0;
    KerrCouplings {
        j_a,
        j_b,
        j_c,
        j_ab,
        j_bc,
        j_ca,
        beta_a: j_a + j_ab + j_ca,
        beta_b: j_b + j_ab + j_bc,
        beta_c: j_c + j_ca + j_bc,
        alpha_a: -ec.e_ca / 4.0,
        alpha_b: -ec.e_cb / 4.0,
        alpha_c: -ec.e_cc,
    }
}

/// Closed-form level energies, ground state at zero:
/// E(n)/h = Σ_i [(ω_i − β_i) n_i − J_i n_i²] − 2 Σ_pairs J_ij n_i n_j,
/// each unordered pair counted once.
pub fn perturbative_energy(n: (u32, u32, u32), modes: &ModeParams, kerr: &KerrCouplings) -> f64 {
    let (na, nb, nc) = (n.0 as f64, n.1 as f64, n.2 as f64);
    (modes.omega_a - kerr.beta_a) * na - kerr.j_a * na * na
        + (modes.omega_b - kerr.beta_b) * nb - kerr.j_b * nb * nb
        + (modes.omega_c - kerr.beta_c) * nc - kerr.j_c * nc * nc
        - 2.0 * (kerr.j_ab * na * nb + kerr.j_bc * nb * nc + kerr.j_ca * nc * na)
}

/// Conditional transition frequencies: for each qubit the four values indexed
/// by the states (s, t) of its partners in the ordering of
/// [`Qubit::partners`], plus the upper/lower band aliases of the
/// qubit-C-grounded subspace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionTable {
    /// `cond[qubit][s][t]` in Hz, with (s, t) the partner occupations.
    pub cond: [[[f64; 2]; 2]; 3],
}

impl TransitionTable {
    /// Transition with both partners in the ground state.
    pub fn upper(&self, q: Qubit) -> f64 {
        self.cond[q.index()][0][0]
    }

    /// Transition with the band-defining partner excited: the other qubit of
    /// the A–B pair for qubits A and B (split 2 J_AB), qubit A for qubit C
    /// (split 2 J_CA).
    pub fn lower(&self, q: Qubit) -> f64 {
        match q {
            Qubit::A => self.cond[0][1][0], // B excited
            Qubit::B => self.cond[1][0][1], // A excited
            Qubit::C => self.cond[2][1][0], // A excited
        }
    }
}

/// All twelve conditional transition frequencies:
/// ω_i(s, t) = ω_i − 2β_i + (−1)^s J_(i,p1) + (−1)^t J_(i,p2).
pub fn transition_bands(modes: &ModeParams, kerr: &KerrCouplings) -> TransitionTable {
    let mut cond = [[[0.0; 2]; 2]; 3];
    for q in Qubit::ALL {
        let (p1, p2) = q.partners();
        let j1 = kerr.pair(q, p1);
        let j2 = kerr.pair(q, p2);
        let base = modes.omega(q) - 2.0 * kerr.beta(q);
        for (s, row) in cond[q.index()].iter_mut().enumerate() {
            for (t, entry) in row.iter_mut().enumerate() {
                let sgn1 = if s == 0 { 1.0 } else { -1.0 };
                let sgn2 = if t == 0 { 1.0 } else { -1.0 };
                *entry = base + sgn1 * j1 + sgn2 * j2;
            }
        }
    }
    TransitionTable { cond }
}

/// Readout cavity parameters (Hz). `delta0 = ω_A^u − ω_bare` and
/// `delta1 = delta0 + α_A` are fixed at construction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CavityParams {
    pub omega_bare: f64,
    pub g: f64,
    pub kappa: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub g_b: f64,
    pub g_c: f64,
}

impl CavityParams {
    pub fn new(
        omega_bare: f64,
        g: f64,
        kappa: f64,
        omega_a_upper: f64,
        alpha_a: f64,
    ) -> Result<Self> {
        if kappa <= 0.0 {
            return Err(CoreError::InvalidInput(format!(
                "cavity linewidth must be positive, got {kappa}"
            )));
        }
        let delta0 = omega_a_upper - omega_bare;
        Ok(Self {
            omega_bare,
            g,
            kappa,
            delta0,
            delta1: delta0 + alpha_a,
            g_b: 0.0,
            g_c: 0.0,
        })
    }
}

/// Dispersive shifts (χ/2π, Hz).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DispersiveShifts {
    pub chi_a: f64,
    pub chi_b: f64,
    pub chi_c: f64,
}

/// χ_A = g²(1/Δ0 − 1/Δ1), χ_B = (g²/2)(1/Δ0 − 1/(Δ0+2J_AB)),
/// χ_C = (g²/2)(1/Δ0 − 1/(Δ0+2J_CA)); evaluated verbatim.
pub fn dispersive_shifts(cav: &CavityParams, kerr: &KerrCouplings) -> Result<DispersiveShifts> {
    let checks = [
        (cav.delta0, "Delta0"),
        (cav.delta1, "Delta1"),
        (cav.delta0 + 2.0 * kerr.j_ab, "Delta0 + 2 J_AB"),
        (cav.delta0 + 2.0 * kerr.j_ca, "Delta0 + 2 J_CA"),
    ];
    for (value, name) in checks {
        if value.abs() < 1.0 {
            return Err(CoreError::Resonance {
                detuning: name.to_string(),
            });
        }
    }
    let g2 = cav.g * cav.g;
    Ok(DispersiveShifts {
        chi_a: g2 * (1.0 / cav.delta0 - 1.0 / cav.delta1),
        chi_b: g2 / 2.0 * (1.0 / cav.delta0 - 1.0 / (cav.delta0 + 2.0 * kerr.j_ab)),
        chi_c: g2 / 2.0 * (1.0 / cav.delta0 - 1.0 / (cav.delta0 + 2.0 * kerr.j_ca)),
    })
}

/// Invert the χ_A formula for the qubit-A–cavity coupling g (Hz).
pub fn g_from_chi_a(chi_a: f64, delta0: f64, alpha_a: f64) -> Result<f64> {
    let delta1 = delta0 + alpha_a;
    if delta0.abs() < 1.0 || delta1.abs() < 1.0 {
        return Err(CoreError::Resonance {
            detuning: "Delta0 or Delta1".into(),
        });
    }
    let denom = 1.0 / delta0 - 1.0 / delta1;
    let g2 = chi_a / denom;
    if g2 < 0.0 {
        return Err(CoreError::InvalidInput(
            "chi_A sign incompatible with the given detunings".into(),
        ));
    }
    Ok(g2.sqrt())
}

/// Spin-level description of the three-qubit manifold: upper-band frequencies
/// (both partners ground) plus the pair couplings. This is the input the
/// pulse engine and the diagonal spin Hamiltonian consume; it can be built
/// from derived parameters or directly from measured table values.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpinModel {
    pub omega_upper: [f64; 3],
    pub j_ab: f64,
    pub j_bc: f64,
    pub j_ca: f64,
}

impl SpinModel {
    /// Spectroscopy reference values of the demonstration device: upper-band
    /// frequencies (5.5585, 6.1470, 7.0180) GHz and pair couplings with
    /// J/π = (201.2, 253.0, 232.0) MHz.
    pub fn measured_reference() -> Self {
        Self {
            omega_upper: [5.5585e9, 6.1470e9, 7.0180e9],
            j_ab: 201.2e6 / 2.0,
            j_bc: 253.0e6 / 2.0,
            j_ca: 232.0e6 / 2.0,
        }
    }

    pub fn from_derived(modes: &ModeParams, kerr: &KerrCouplings) -> Self {
        let table = transition_bands(modes, kerr);
        Self {
            omega_upper: [
                table.upper(Qubit::A),
                table.upper(Qubit::B),
                table.upper(Qubit::C),
            ],
            j_ab: kerr.j_ab,
            j_bc: kerr.j_bc,
            j_ca: kerr.j_ca,
        }
    }

    pub fn pair(&self, p: Qubit, q: Qubit) -> f64 {
        use Qubit::*;
        match (p, q) {
            (A, B) | (B, A) => self.j_ab,
            (B, C) | (C, B) => self.j_bc,
            (C, A) | (A, C) => self.j_ca,
            _ => panic!("pair coupling requires two distinct qubits"),
        }
    }

    /// Level energy above the ground state for occupation (a, b, c):
    /// Σ_i ω_i^u n_i − 2 Σ_pairs J_ij n_i n_j.
    pub fn level(&self, a: u8, b: u8, c: u8) -> f64 {
        let (a, b, c) = (a as f64, b as f64, c as f64);
        self.omega_upper[0] * a + self.omega_upper[1] * b + self.omega_upper[2] * c
            - 2.0 * (self.j_ab * a * b + self.j_bc * b * c + self.j_ca * c * a)
    }
}

/// Diagonal of the spin Hamiltonian over the computational basis |ABC⟩
/// (index 4a + 2b + c), ground state shifted to zero, in Hz.
pub fn spin_hamiltonian(model: &SpinModel) -> [f64; 8] {
    let mut diag = [0.0; 8];
    for (idx, entry) in diag.iter_mut().enumerate() {
        let a = (idx >> 2) as u8 & 1;
        let b = (idx >> 1) as u8 & 1;
        let c = idx as u8 & 1;
        *entry = model.level(a, b, c);
    }
    diag
}
