//! Exact matrix-level gate layer: band-selective conditional rotations on the
//! two-qubit |AB⟩ subspace, virtual-Z frame bookkeeping for the native
//! π-pulse CNOT, unconditional multi-band rotations and the composite
//! SWAP / transfer sequences.
//!
//! Basis ordering is |AB⟩ = |00⟩, |01⟩, |10⟩, |11⟩ with A the leftmost label.
//! Qubit C is representable through [`embed_ab`] but every gate here acts in
//! the C-grounded 4×4 subspace.

use crate::circuit::Qubit;
use crate::error::{CoreError, Result};
use crate::linalg::{c, identity, kron, CMatrix, CVector, ONE};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Which conditioned subspace a band-selective pulse addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    /// Partner in the ground state.
    Upper,
    /// Partner in the excited state.
    Lower,
}

/// A single band-selective conditional rotation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GateSpec {
    pub target: Qubit,
    pub band: Band,
    /// Rotation-plane angle φ in radians.
    pub phi: f64,
    /// Rotation angle θ in radians, in [−2π, 2π].
    pub theta: f64,
}

impl GateSpec {
    pub fn new(target: Qubit, band: Band, phi: f64, theta: f64) -> Result<Self> {
        if target == Qubit::C {
            return Err(CoreError::InvalidInput(
                "gates act on the C-grounded subspace; target must be A or B".into(),
            ));
        }
        if !(-2.0 * PI..=2.0 * PI).contains(&theta) {
            return Err(CoreError::InvalidInput(format!(
                "theta must lie in [-2π, 2π], got {theta}"
            )));
        }
        Ok(Self {
            target,
            band,
            phi,
            theta,
        })
    }

    /// The control/partner qubit of the conditioned subspace.
    pub fn partner(&self) -> Qubit {
        match self.target {
            Qubit::A => Qubit::B,
            Qubit::B => Qubit::A,
            Qubit::C => unreachable!("validated at construction"),
        }
    }

    /// Native π-pulses implement a CNOT up to a virtual Z on the control.
    pub fn is_native_cnot(&self) -> bool {
        (self.theta.abs() - PI).abs() < 1e-12
    }
}

/// Accumulated virtual-Z phase per qubit (radians). The ledger only offsets
/// the φ of later pulses; already-emitted matrices are never touched.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FrameLedger {
    pub zeta_a: f64,
    pub zeta_b: f64,
}

impl FrameLedger {
    pub fn get(&self, q: Qubit) -> f64 {
        match q {
            Qubit::A => self.zeta_a,
            Qubit::B => self.zeta_b,
            Qubit::C => 0.0,
        }
    }

    pub fn add(&mut self, q: Qubit, delta: f64) {
        match q {
            Qubit::A => self.zeta_a += delta,
            Qubit::B => self.zeta_b += delta,
            Qubit::C => {}
        }
    }
}

/// 2×2 rotation by θ about the axis at angle φ in the equatorial plane:
/// [[cos(θ/2), −e^{−iφ} sin(θ/2)], [e^{iφ} sin(θ/2), cos(θ/2)]].
pub fn rotation_2x2(phi: f64, theta: f64) -> CMatrix {
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = c(ct, 0.0);
    m[(0, 1)] = -c(0.0, -phi).exp() * c(st, 0.0);
    m[(1, 0)] = c(0.0, phi).exp() * c(st, 0.0);
    m[(1, 1)] = c(ct, 0.0);
    m
}

/// The (row, col) index pairs of the conditioned 2-dimensional block.
fn block_indices(target: Qubit, band: Band) -> [usize; 2] {
    match (target, band) {
        // target B: blocks are A = |0⟩ (upper) or A = |1⟩ (lower)
        (Qubit::B, Band::Upper) => [0b00, 0b01],
        (Qubit::B, Band::Lower) => [0b10, 0b11],
        // target A: blocks are B = |0⟩ (upper) or B = |1⟩ (lower)
        (Qubit::A, Band::Upper) => [0b00, 0b10],
        (Qubit::A, Band::Lower) => [0b01, 0b11],
        (Qubit::C, _) => unreachable!("gate targets are A or B"),
    }
}

/// The band-selective conditional rotation matrix R_{target,band}(φ, θ).
pub fn conditional_rotation(spec: &GateSpec) -> CMatrix {
    let r = rotation_2x2(spec.phi, spec.theta);
    let idx = block_indices(spec.target, spec.band);
    let mut u = identity(4);
    for (bi, &i) in idx.iter().enumerate() {
        for (bj, &j) in idx.iter().enumerate() {
            u[(i, j)] = r[(bi, bj)];
        }
    }
    u
}

/// Product of the lower- and upper-band rotations at identical (φ, θ): a
/// plain single-qubit rotation on the target, independent of the partner.
pub fn unconditional_rotation(target: Qubit, phi: f64, theta: f64) -> Result<CMatrix> {
    let lower = conditional_rotation(&GateSpec::new(target, Band::Lower, phi, theta)?);
    let upper = conditional_rotation(&GateSpec::new(target, Band::Upper, phi, theta)?);
    Ok(lower * upper)
}

/// The intended logical gate of a spec: for θ = ±π pulses the block phase
/// −i·sgn(θ) is stripped (it is tracked as a virtual Z on the control), so a
/// φ = −π/2 π-pulse reads as a plain CNOT. All other θ pass through as the
/// bare conditional rotation.
pub fn ideal_gate(spec: &GateSpec) -> CMatrix {
    let mut u = conditional_rotation(spec);
    if spec.is_native_cnot() {
        let idx = block_indices(spec.target, spec.band);
        // multiply the conditioned block by +i (θ = +π) or −i (θ = −π)
        let ph = c(0.0, spec.theta.signum() * FRAC_PI_2).exp();
        for &i in &idx {
            for &j in &idx {
                u[(i, j)] *= ph;
            }
        }
    }
    u
}

/// One entry of a gate sequence.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum SequenceOp {
    /// Band-selective conditional rotation.
    ConditionalRotation(GateSpec),
    /// Both-band rotation on one qubit (two pulses, same φ and θ).
    Rotation { target: Qubit, phi: f64, theta: f64 },
    /// Native CNOT with `target` flipped conditioned on the partner: a
    /// lower-band π-pulse at φ = −π/2.
    Cnot { target: Qubit },
}

/// Ordered list of gates; composition order is application order (leftmost
/// applied first).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GateSequence {
    pub ops: Vec<SequenceOp>,
}

impl GateSequence {
    pub fn new(ops: Vec<SequenceOp>) -> Self {
        Self { ops }
    }

    pub fn cnot(target: Qubit) -> SequenceOp {
        SequenceOp::Cnot { target }
    }

    /// Expand composite ops into the flat list of conditional rotations.
    pub fn flatten(&self) -> Result<Vec<GateSpec>> {
        let mut out = Vec::new();
        for op in &self.ops {
            match *op {
                SequenceOp::ConditionalRotation(spec) => out.push(spec),
                SequenceOp::Rotation { target, phi, theta } => {
                    out.push(GateSpec::new(target, Band::Lower, phi, theta)?);
                    out.push(GateSpec::new(target, Band::Upper, phi, theta)?);
                }
                SequenceOp::Cnot { target } => {
                    out.push(GateSpec::new(target, Band::Lower, -FRAC_PI_2, PI)?);
                }
            }
        }
        Ok(out)
    }
}

/// SWAP via three native CNOT pulses: CNOT_BA, CNOT_AB, CNOT_BA.
pub fn swap_sequence() -> GateSequence {
    GateSequence::new(vec![
        GateSequence::cnot(Qubit::A),
        GateSequence::cnot(Qubit::B),
        GateSequence::cnot(Qubit::A),
    ])
}

/// Transfer of a state from A to B (B starting in ground): CNOT_AB, CNOT_BA.
pub fn transfer_sequence() -> GateSequence {
    GateSequence::new(vec![GateSequence::cnot(Qubit::B), GateSequence::cnot(Qubit::A)])
}

/// Bell preparation: π/2 on B in the upper band, then the native CNOT_BA.
pub fn bell_sequence() -> GateSequence {
    GateSequence::new(vec![
        SequenceOp::ConditionalRotation(GateSpec {
            target: Qubit::B,
            band: Band::Upper,
            phi: 0.0,
            theta: FRAC_PI_2,
        }),
        GateSequence::cnot(Qubit::A),
    ])
}

/// Apply a sequence with frame accounting.
///
/// Each emitted pulse has its φ offset by the ledger entry of its target;
/// each native π conditional rotation then appends ∓π/2 (lower/upper band)
/// of virtual Z for the control qubit. The returned matrix is the composite
/// in the logical frame (final ledger unwound), equal to the product of
/// [`ideal_gate`] matrices up to global phase.
pub fn apply_with_frame(seq: &GateSequence, ledger: FrameLedger) -> Result<(CMatrix, FrameLedger)> {
    let mut state_ledger = ledger;
    let mut u = identity(4);
    for spec in seq.flatten()? {
        let emitted = GateSpec {
            phi: spec.phi + state_ledger.get(spec.target),
            ..spec
        };
        u = conditional_rotation(&emitted) * u;
        if spec.is_native_cnot() {
            let sign = match spec.band {
                Band::Upper => 1.0,
                Band::Lower => -1.0,
            } * spec.theta.signum();
            state_ledger.add(spec.partner(), sign * FRAC_PI_2);
        }
    }
    // unwind: logical = Rz(−ζ_final) · physical · Rz(ζ_initial)
    let unwind = virtual_z(-state_ledger.zeta_a, -state_ledger.zeta_b)
        * u
        * virtual_z(ledger.zeta_a, ledger.zeta_b);
    Ok((unwind, state_ledger))
}

/// The ideal logical circuit for a sequence: the product of [`ideal_gate`]
/// matrices in application order.
pub fn ideal_circuit(seq: &GateSequence) -> Result<CMatrix> {
    let mut u = identity(4);
    for spec in seq.flatten()? {
        u = ideal_gate(&spec) * u;
    }
    Ok(u)
}

/// Rz(ζ_A) ⊗ Rz(ζ_B) with Rz(ζ) = diag(e^{−iζ/2}, e^{+iζ/2}).
pub fn virtual_z(zeta_a: f64, zeta_b: f64) -> CMatrix {
    let rz = |z: f64| {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(0.0, -z / 2.0).exp();
        m[(1, 1)] = c(0.0, z / 2.0).exp();
        m
    };
    kron(&rz(zeta_a), &rz(zeta_b))
}

/// Embed a 4×4 |AB⟩ operator into the 8-dimensional |ABC⟩ space with C as
/// the trailing (least-significant) qubit.
pub fn embed_ab(u: &CMatrix) -> CMatrix {
    kron(u, &identity(2))
}

/// The C-grounded |AB⟩ block of an 8-dimensional |ABC⟩ operator — the
/// subspace every gate here is defined on.
pub fn c_ground_block(u: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            out[(a, b)] = u[(a << 1, b << 1)];
        }
    }
    out
}

/// On-disk form of one circuit entry: {op, target, band, phi_deg, theta_deg}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitEntry {
    pub op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_deg: Option<f64>,
}

fn parse_qubit(label: Option<&String>) -> Result<Qubit> {
    match label.map(String::as_str) {
        Some("A") | Some("a") => Ok(Qubit::A),
        Some("B") | Some("b") => Ok(Qubit::B),
        Some(other) => Err(CoreError::InvalidInput(format!(
            "unknown target '{other}' (expected A or B)"
        ))),
        None => Err(CoreError::InvalidInput("missing target".into())),
    }
}

/// Parse a JSON circuit description into a gate sequence.
pub fn sequence_from_json(text: &str) -> Result<GateSequence> {
    let entries: Vec<CircuitEntry> = serde_json::from_str(text)
        .map_err(|e| CoreError::InvalidInput(format!("circuit JSON: {e}")))?;
    let mut ops = Vec::new();
    for entry in &entries {
        match entry.op.as_str() {
            "crot" => {
                let band = match entry.band.as_deref() {
                    Some("upper") => Band::Upper,
                    Some("lower") => Band::Lower,
                    other => {
                        return Err(CoreError::InvalidInput(format!(
                            "crot needs band upper|lower, got {other:?}"
                        )))
                    }
                };
                let phi = entry.phi_deg.unwrap_or(0.0).to_radians();
                let theta = entry
                    .theta_deg
                    .ok_or_else(|| CoreError::InvalidInput("crot needs theta_deg".into()))?
                    .to_radians();
                ops.push(SequenceOp::ConditionalRotation(GateSpec::new(
                    parse_qubit(entry.target.as_ref())?,
                    band,
                    phi,
                    theta,
                )?));
            }
            "rot" => {
                let phi = entry.phi_deg.unwrap_or(0.0).to_radians();
                let theta = entry
                    .theta_deg
                    .ok_or_else(|| CoreError::InvalidInput("rot needs theta_deg".into()))?
                    .to_radians();
                ops.push(SequenceOp::Rotation {
                    target: parse_qubit(entry.target.as_ref())?,
                    phi,
                    theta,
                });
            }
            "cnot" => ops.push(SequenceOp::Cnot {
                target: parse_qubit(entry.target.as_ref())?,
            }),
            "swap" => ops.extend(swap_sequence().ops),
            "transfer" => ops.extend(transfer_sequence().ops),
            other => {
                return Err(CoreError::InvalidInput(format!(
                    "unknown op '{other}' (expected crot|rot|cnot|swap|transfer)"
                )))
            }
        }
    }
    Ok(GateSequence::new(ops))
}

/// The ideal SWAP matrix.
pub fn ideal_swap() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    m
}

/// |ψ⟩ → U|ψ⟩ fidelity-up-to-global-phase against a target state.
pub fn state_fidelity_up_to_phase(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm_sqr()
}
