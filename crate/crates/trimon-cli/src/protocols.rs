//! Named demonstration protocols: preparation plus entangling sequence, with
//! the explicitly constructed target states they must reproduce.

use std::f64::consts::{FRAC_PI_2, PI};
use trimon_core::circuit::Qubit;
use trimon_core::error::{CoreError, Result};
use trimon_core::gates::{
    swap_sequence, transfer_sequence, Band, GateSequence, GateSpec, SequenceOp,
};
use trimon_core::linalg::{c, CVector};

pub struct Protocol {
    pub name: &'static str,
    pub sequence: GateSequence,
    /// The state the full sequence must produce from |00⟩.
    pub target: CVector,
}

/// π/2 on B (upper band, A ground) then the native CNOT_BA:
/// (|00⟩ + |11⟩)/√2.
pub fn bell() -> Protocol {
    let sequence = GateSequence::new(vec![
        SequenceOp::ConditionalRotation(
            GateSpec::new(Qubit::B, Band::Upper, 0.0, FRAC_PI_2).expect("valid"),
        ),
        GateSequence::cnot(Qubit::A),
    ]);
    let mut target = CVector::zeros(4);
    let h = c(1.0 / 2.0f64.sqrt(), 0.0);
    target[0b00] = h;
    target[0b11] = h;
    Protocol {
        name: "bell",
        sequence,
        target,
    }
}

/// Prepare (cos(π/8)|0⟩ + i sin(π/8)|1⟩)_A ⊗ |+⟩_B and swap the two qubits.
pub fn swap() -> Protocol {
    let mut ops = vec![
        SequenceOp::ConditionalRotation(
            GateSpec::new(Qubit::B, Band::Upper, 0.0, FRAC_PI_2).expect("valid"),
        ),
        SequenceOp::Rotation {
            target: Qubit::A,
            phi: FRAC_PI_2,
            theta: PI / 4.0,
        },
    ];
    ops.extend(swap_sequence().ops);
    let h = 1.0 / 2.0f64.sqrt();
    let cos8 = (PI / 8.0).cos();
    let sin8 = (PI / 8.0).sin();
    // after the swap: |+⟩_A ⊗ (cos(π/8)|0⟩ + i sin(π/8)|1⟩)_B
    let mut target = CVector::zeros(4);
    target[0b00] = c(h * cos8, 0.0);
    target[0b01] = c(0.0, h * sin8);
    target[0b10] = c(h * cos8, 0.0);
    target[0b11] = c(0.0, h * sin8);
    Protocol {
        name: "swap",
        sequence: GateSequence::new(ops),
        target,
    }
}

/// Prepare |+⟩ on A and move it to B: |0⟩_A ⊗ (|0⟩+|1⟩)/√2.
pub fn transfer() -> Protocol {
    let mut ops = vec![SequenceOp::ConditionalRotation(
        GateSpec::new(Qubit::A, Band::Upper, 0.0, FRAC_PI_2).expect("valid"),
    )];
    ops.extend(transfer_sequence().ops);
    let h = c(1.0 / 2.0f64.sqrt(), 0.0);
    let mut target = CVector::zeros(4);
    target[0b00] = h;
    target[0b01] = h;
    Protocol {
        name: "transfer",
        sequence: GateSequence::new(ops),
        target,
    }
}

pub fn by_name(name: &str) -> Result<Protocol> {
    match name {
        "bell" => Ok(bell()),
        "swap" => Ok(swap()),
        "transfer" => Ok(transfer()),
        other => Err(CoreError::InvalidInput(format!(
            "unknown protocol '{other}' (expected bell|swap|transfer)"
        ))),
    }
}
