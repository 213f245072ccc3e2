//! Time-domain pulse engine checks: envelopes, Rabi physics, selective
//! band calibration and full gate-sequence simulation.

use approx::assert_relative_eq;
use std::f64::consts::{FRAC_PI_2, PI};
use trimon_core::circuit::{Qubit, SpinModel};
use trimon_core::gates::{
    self, apply_with_frame, bell_sequence, swap_sequence, Band, FrameLedger, GateSequence,
    GateSpec, SequenceOp,
};
use trimon_core::linalg::{average_gate_fidelity, c, identity, max_abs, CVector, ONE};
use trimon_core::pulse::{
    band_detuning, calibrate, export_schedule, import_schedule, propagate, simulate_circuit,
    DriveTone, PulseConfig, PulseShape,
};

fn decoupled_model() -> SpinModel {
    SpinModel {
        omega_upper: [5.5585e9, 6.1470e9, 7.0180e9],
        j_ab: 0.0,
        j_bc: 0.0,
        j_ca: 0.0,
    }
}

fn rect_tone(target: Qubit, amp: f64, total: f64, detuning: f64) -> DriveTone {
    DriveTone {
        target,
        shape: PulseShape::new(amp, 0.0, total, total, 0.0, detuning).unwrap(),
        start: 0.0,
    }
}

#[test]
fn envelope_flat_top_and_rectangle_limit() {
    let shape = PulseShape::standard(241e-9, 3.5e6, 0.1, 0.0);
    assert_relative_eq!(shape.envelope(shape.total / 2.0), shape.amp, epsilon = 1e-12);
    assert!(shape.envelope(0.0) < 1e-4 * shape.amp);
    assert!(shape.envelope(shape.total) < 1e-4 * shape.amp);
    assert_eq!(shape.envelope(-1e-9), 0.0);
    assert_eq!(shape.envelope(shape.total + 1e-9), 0.0);

    // σ → 0 leaves a rectangle with area amp · flat
    let rect = PulseShape::new(2e6, 0.0, 100e-9, 100e-9, 0.0, 0.0).unwrap();
    assert_relative_eq!(rect.area(), 2e6 * 100e-9, epsilon = 1e-18);
}

#[test]
fn envelope_area_matches_quadrature() {
    let shape = PulseShape::standard(241e-9, 3.5e6, 0.0, 0.0);
    let n = 200_001;
    let dt = shape.total / (n - 1) as f64;
    // Simpson quadrature
    let mut sum = shape.envelope(0.0) + shape.envelope(shape.total);
    for i in 1..n - 1 {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * shape.envelope(i as f64 * dt);
    }
    let quad = sum * dt / 3.0;
    assert_relative_eq!(quad, shape.area(), max_relative = 1e-6);
}

#[test]
fn zero_amplitude_propagates_to_identity() {
    let model = SpinModel::measured_reference();
    let tone = rect_tone(Qubit::A, 0.0, 100e-9, band_detuning(&model, Qubit::A, Band::Lower));
    let result = propagate(&[tone], &model, 10e-12).unwrap();
    let stripped = result.stripped(&model);
    assert!(max_abs(&(stripped - identity(8))) < 1e-10);
}

#[test]
fn resonant_rabi_oscillation_matches_analytic_population() {
    let model = decoupled_model();
    let omega = 2.0e6;
    for &t_ns in &[50.0, 100.0, 150.0, 200.0] {
        let total = t_ns * 1e-9;
        let tone = rect_tone(Qubit::A, omega, total, 0.0);
        let result = propagate(&[tone], &model, 10e-12).unwrap();
        let mut ground = CVector::zeros(8);
        ground[0] = ONE;
        let out = &result.u * ground;
        let p_excited = out[0b100].norm_sqr();
        let expected = (PI * omega * total).sin().powi(2);
        assert_relative_eq!(p_excited, expected, epsilon = 1e-6);
    }
}

#[test]
fn detuned_drive_follows_generalized_rabi_ceiling() {
    // drive the A transition detuned by 2 J_AB: maximum transferred
    // population is Ω²/(Ω² + Δ²)
    let model = SpinModel::measured_reference();
    let omega = 2.0e6;
    let delta = 2.0 * model.j_ab;
    let ratio = omega * omega / (omega * omega + delta * delta);
    // start with B excited: the upper-band tone is 2J off resonance there
    let mut start = CVector::zeros(8);
    start[0b010] = ONE;
    let mut max_pop: f64 = 0.0;
    let period = 1.0 / (omega * omega + delta * delta).sqrt();
    let mut t = period / 40.0;
    while t < 1.5 * period {
        let tone = rect_tone(Qubit::A, omega, t, band_detuning(&model, Qubit::A, Band::Upper));
        let result = propagate(&[tone], &model, 10e-12).unwrap();
        let out = &result.u * &start;
        max_pop = max_pop.max(out[0b110].norm_sqr());
        t += period / 40.0;
    }
    assert_relative_eq!(max_pop, ratio, max_relative = 0.05);
}

#[test]
fn calibrate_zero_angle_returns_zero_amplitude() {
    let model = SpinModel::measured_reference();
    let template = [DriveTone {
        target: Qubit::A,
        shape: PulseShape::standard(241e-9, 1.0, 0.0, band_detuning(&model, Qubit::A, Band::Lower)),
        start: 0.0,
    }];
    let tones = calibrate(&template, (Qubit::A, Band::Lower), 0.0, &model, 10e-12).unwrap();
    assert_eq!(tones[0].shape.amp, 0.0);
}

#[test]
fn unreachable_angle_is_a_calibration_error() {
    let model = SpinModel::measured_reference();
    let template = [DriveTone {
        target: Qubit::A,
        shape: PulseShape::standard(241e-9, 1.0, 0.0, band_detuning(&model, Qubit::A, Band::Lower)),
        start: 0.0,
    }];
    let err = calibrate(&template, (Qubit::A, Band::Lower), 3.0 * PI, &model, 10e-12);
    assert!(matches!(
        err,
        Err(trimon_core::error::CoreError::Calibration(_))
    ));
}

#[test]
fn calibrated_pi_pulse_implements_native_cnot() {
    let model = SpinModel::measured_reference();
    let template = [DriveTone {
        target: Qubit::A,
        shape: PulseShape::standard(241e-9, 1.0, 0.0, band_detuning(&model, Qubit::A, Band::Lower)),
        start: 0.0,
    }];
    let tones = calibrate(&template, (Qubit::A, Band::Lower), PI, &model, 10e-12).unwrap();
    let ideal = gates::conditional_rotation(
        &GateSpec::new(Qubit::A, Band::Lower, -FRAC_PI_2, PI).unwrap(),
    );
    let result = propagate(&tones, &model, 10e-12)
        .unwrap()
        .against_ideal(&ideal, &model);
    let fidelity = result.fidelity_to_ideal.unwrap();
    assert!(fidelity >= 0.99, "gate fidelity {fidelity}");

    // off-band leakage: the partner-ground subspace stays put
    let stripped = gates::c_ground_block(&result.stripped(&model));
    let mut ground = CVector::zeros(4);
    ground[0] = ONE;
    let leak = 1.0 - (&stripped * ground)[0].norm_sqr();
    assert!(leak < 0.01, "leakage {leak}");
}

#[test]
fn two_tone_half_pi_realizes_unconditional_rotation() {
    let model = SpinModel::measured_reference();
    let mk = |band| DriveTone {
        target: Qubit::B,
        shape: PulseShape::standard(281e-9, 1.0, 0.0, band_detuning(&model, Qubit::B, band)),
        start: 0.0,
    };
    let template = [mk(Band::Lower), mk(Band::Upper)];
    let tones = calibrate(&template, (Qubit::B, Band::Upper), FRAC_PI_2, &model, 10e-12).unwrap();
    let result = propagate(&tones, &model, 10e-12).unwrap();
    let stripped = gates::c_ground_block(&result.stripped(&model));
    let ideal = gates::unconditional_rotation(Qubit::B, -FRAC_PI_2, FRAC_PI_2).unwrap();
    let fidelity = average_gate_fidelity(&ideal, &stripped);
    assert!(fidelity >= 0.99, "unconditional rotation fidelity {fidelity}");
}

#[test]
fn empty_sequence_simulates_to_identity() {
    let model = SpinModel::measured_reference();
    let mut input = CVector::zeros(4);
    input[0] = ONE;
    let result = simulate_circuit(
        &GateSequence::default(),
        &model,
        &PulseConfig::default(),
        &input,
    )
    .unwrap();
    assert_relative_eq!(result.fidelity_to_ideal, 1.0, epsilon = 1e-10);
}

#[test]
fn bell_sequence_at_the_pulse_level() {
    let model = SpinModel::measured_reference();
    let mut input = CVector::zeros(4);
    input[0] = ONE;
    let result =
        simulate_circuit(&bell_sequence(), &model, &PulseConfig::default(), &input).unwrap();
    assert!(
        result.fidelity_to_ideal >= 0.99,
        "Bell fidelity {}",
        result.fidelity_to_ideal
    );
    assert!(result.unitarity_error < 1e-8);

    // pulse-level Z-basis probabilities match the matrix-level circuit
    let (ideal_u, _) = apply_with_frame(&bell_sequence(), FrameLedger::default()).unwrap();
    let ideal_state = &ideal_u * &input;
    for k in 0..4 {
        let diff = (result.final_state[k].norm_sqr() - ideal_state[k].norm_sqr()).abs();
        assert!(diff < 1e-2, "population {k} differs by {diff}");
    }
}

#[test]
fn swap_sequence_with_protocol_pulse_lengths() {
    let model = SpinModel::measured_reference();
    // (cos(π/8)|0⟩ + i sin(π/8)|1⟩)_A ⊗ |+⟩_B
    let ca = c((PI / 8.0).cos(), 0.0);
    let sa = c(0.0, (PI / 8.0).sin());
    let h = c(1.0 / 2.0f64.sqrt(), 0.0);
    let mut input = CVector::zeros(4);
    input[0b00] = ca * h;
    input[0b01] = ca * h;
    input[0b10] = sa * h;
    input[0b11] = sa * h;
    let result =
        simulate_circuit(&swap_sequence(), &model, &PulseConfig::default(), &input).unwrap();
    assert!(
        result.fidelity_to_ideal >= 0.98,
        "SWAP fidelity {}",
        result.fidelity_to_ideal
    );
}

#[test]
fn halving_the_step_barely_moves_the_result() {
    let model = SpinModel::measured_reference();
    let mut input = CVector::zeros(4);
    input[0] = ONE;
    let seq = GateSequence::new(vec![SequenceOp::ConditionalRotation(
        GateSpec::new(Qubit::A, Band::Lower, -FRAC_PI_2, PI).unwrap(),
    )]);
    let coarse = simulate_circuit(&seq, &model, &PulseConfig::default(), &input).unwrap();
    let fine_config = PulseConfig {
        dt: 5e-12,
        ..PulseConfig::default()
    };
    let fine = simulate_circuit(&seq, &model, &fine_config, &input).unwrap();
    assert!(
        (coarse.fidelity_to_ideal - fine.fidelity_to_ideal).abs() < 1e-6,
        "dt sensitivity {}",
        (coarse.fidelity_to_ideal - fine.fidelity_to_ideal).abs()
    );
}

#[test]
fn coarse_step_is_rejected() {
    let model = SpinModel::measured_reference();
    let tone = rect_tone(Qubit::A, 2e6, 100e-9, band_detuning(&model, Qubit::A, Band::Lower));
    assert!(propagate(&[tone], &model, 1e-9).is_err());
}

#[test]
fn schedule_round_trips_through_json() {
    let model = SpinModel::measured_reference();
    let mut input = CVector::zeros(4);
    input[0] = ONE;
    let result =
        simulate_circuit(&bell_sequence(), &model, &PulseConfig::default(), &input).unwrap();
    let entries = export_schedule(&result.schedule);
    let json = serde_json::to_string_pretty(&entries).unwrap();
    let parsed: Vec<trimon_core::pulse::ScheduleEntry> = serde_json::from_str(&json).unwrap();
    let tones = import_schedule(&parsed, &model).unwrap();
    let direct: Vec<DriveTone> = result.schedule.iter().flat_map(|p| p.tones.clone()).collect();
    assert_eq!(tones.len(), direct.len());
    let rerun = propagate(&tones, &model, 10e-12).unwrap();
    let baseline = propagate(&direct, &model, 10e-12).unwrap();
    assert!(max_abs(&(rerun.u - baseline.u)) < 1e-9);
}
