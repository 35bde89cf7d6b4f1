use qecmetro::channels::{depolarizing_parameter, trotter_solve, LindbladSpec};
use qecmetro::codes::{logical_flip_retention, CodeSpec};
use qecmetro::linalg::{evolve_unitary, Generator};
use qecmetro::qfi::qfi_depolarized_ghz;
use qecmetro::scenario::{
    block_hamiltonian, codespace_weight, demo_single_error_fidelity, encoded_ghz, flags, run_scenario,
    run_two_qubit_demo, scenario2_frame, scenario2_master_equation, QfiMode, ScenarioKind, ScenarioSpec,
};
use qecmetro::Execution;

fn spec(kind: ScenarioKind, n_blocks: usize, code: CodeSpec, noise: LindbladSpec, t: f64) -> ScenarioSpec {
    ScenarioSpec { kind, n_blocks, code, noise, t, theta: 0.1, mode: QfiMode::Phase, trotter_steps: 1 }
}

fn dephasing(n: usize, m: usize, p: f64) -> ScenarioSpec {
    // 2p − 1 = e^{−γt} at γ = 1.
    let t = if p < 1.0 { -(2.0 * p - 1.0).ln() } else { 1.0 };
    let gamma = if p < 1.0 { 1.0 } else { 0.0 };
    spec(ScenarioKind::IDephasing, n, CodeSpec::RepetitionPhase { m }, LindbladSpec::dephasing(gamma).unwrap(), t)
}

fn oracle(s: &ScenarioSpec) -> f64 {
    run_scenario(s, Execution::default()).unwrap().qfi_oracle.unwrap().value
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn dephasing_examples() {
    for m in [1, 3, 5] {
        let r = run_scenario(&dephasing(2, m, 1.0), Execution::default()).unwrap();
        assert!((r.qfi_oracle.unwrap().value - 4.0).abs() < 1e-10);
    }
    for (m, p) in [(3usize, 0.99), (1, 0.99), (1, 0.9), (3, 0.9)] {
        let r = run_scenario(&dephasing(2, m, p), Execution::default()).unwrap();
        let p_l = logical_flip_retention(p, m).unwrap();
        let expected = (2.0 * p_l - 1.0).powi(4) * 4.0;
        assert!(rel(r.qfi_oracle.unwrap().value, expected) <= 1e-8, "m={m} p={p}");
        assert!(rel(r.qfi_closed.unwrap().value, expected) <= 1e-12);
    }
}

#[test]
fn dephasing_logical_fallback_matches_closed_form() {
    // 3 blocks of 3 qubits exceed the full-state QFI cap and use the decoded state.
    let r = run_scenario(&dephasing(3, 3, 0.95), Execution::default()).unwrap();
    assert!(r.flags.contains(&flags::LOGICAL_QFI.to_string()));
    assert!(r.discrepancy.unwrap() <= 1e-8);
}

#[test]
fn dephasing_beyond_dense_limit_skips_oracle() {
    let r = run_scenario(&dephasing(5, 3, 0.95), Execution::default()).unwrap();
    assert!(r.qfi_oracle.is_none());
    assert!(r.flags.contains(&flags::ORACLE_SKIPPED.to_string()));
    assert!(r.qfi_closed.unwrap().value > 0.0);
}

#[test]
fn local_noise_examples() {
    let noiseless =
        spec(ScenarioKind::ILocalNoise, 1, CodeSpec::FiveQubitGraph, LindbladSpec::depolarizing(0.0).unwrap(), 1.0);
    assert!((oracle(&noiseless) - 1.0).abs() < 1e-8);
    let two = spec(
        ScenarioKind::ILocalNoise,
        2,
        CodeSpec::Concatenated { levels: 0 },
        LindbladSpec::depolarizing(0.0).unwrap(),
        1.0,
    );
    assert!((oracle(&two) - 4.0).abs() < 1e-8);

    // m = 1: bare qubits under depolarizing noise with p = 0.95.
    let gamma = 1.0;
    let t = -1.5 * 0.95f64.ln() / gamma;
    assert!((depolarizing_parameter(gamma, t).unwrap() - 0.95).abs() < 1e-14);
    let s = spec(
        ScenarioKind::ILocalNoise,
        2,
        CodeSpec::Concatenated { levels: 0 },
        LindbladSpec::depolarizing(gamma).unwrap(),
        t,
    );
    let r = run_scenario(&s, Execution::default()).unwrap();
    let expected = qfi_depolarized_ghz(0.95, 2).unwrap().value;
    assert!(rel(r.qfi_oracle.unwrap().value, expected) <= 1e-8);
    assert!(rel(r.qfi_closed.unwrap().value, expected) <= 1e-12);
}

#[test]
fn local_noise_graph_code_protects() {
    let gamma = 1.0;
    let t = 0.02;
    let encoded =
        spec(ScenarioKind::ILocalNoise, 1, CodeSpec::FiveQubitGraph, LindbladSpec::depolarizing(gamma).unwrap(), t);
    let bare = ScenarioSpec { code: CodeSpec::Concatenated { levels: 0 }, ..encoded.clone() };
    let r = run_scenario(&encoded, Execution::default()).unwrap();
    assert!(r.qfi_oracle.unwrap().value > oracle(&bare));
    // Beyond weight-1 corrections the exact logical channel is not depolarizing,
    // so the closed form is a lower estimate at leading order only.
    assert!(r.discrepancy.unwrap() < 1e-3);
}

#[test]
fn logical_subspace_preservation() {
    for (code, n) in [
        (CodeSpec::RepetitionPhase { m: 3 }, 2usize),
        (CodeSpec::RepetitionPhase { m: 5 }, 2),
        (CodeSpec::FiveQubitGraph, 2),
        (CodeSpec::TwoQubitDemo, 3),
    ] {
        let m = code.block_size();
        let rho0 = encoded_ghz(&code, n).unwrap().to_density();
        let h = Generator::Pauli(block_hamiltonian(n, m).unwrap());
        for theta in [0.0, 0.1, 1.3] {
            let rho = evolve_unitary(&rho0, &h, theta).unwrap();
            assert!((codespace_weight(&rho, &code, n).unwrap() - 1.0).abs() <= 1e-12, "{code} θ={theta}");
        }
    }
}

#[test]
fn qfi_is_theta_invariant() {
    let base = dephasing(2, 3, 0.9);
    let values: Vec<f64> =
        [0.1, 0.7, 1.9].iter().map(|&th| oracle(&ScenarioSpec { theta: th, ..base.clone() })).collect();
    let spread = values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread <= 1e-10, "{values:?}");

    // Covariant noise in the derivative-based pipelines: invariant up to
    // five-point truncation error.
    for s in [
        spec(ScenarioKind::TwoQubitDemo, 2, CodeSpec::TwoQubitDemo, LindbladSpec::transversal(1.0).unwrap(), 0.1),
        spec(ScenarioKind::ILocalNoise, 2, CodeSpec::FiveQubitGraph, LindbladSpec::depolarizing(1.0).unwrap(), 0.05),
    ] {
        assert!(theta_spread(&s) <= 1e-8, "{:?}", s.kind);
    }
}

fn theta_spread(base: &ScenarioSpec) -> f64 {
    let values: Vec<f64> =
        [0.1, 0.7, 1.9].iter().map(|&th| oracle(&ScenarioSpec { theta: th, ..base.clone() })).collect();
    values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min)
}

#[test]
fn transversal_noise_theta_dependence_vanishes_at_short_times() {
    // σ_x noise does not commute with the rotation, so the θ-dependence of the
    // factorised family is a second-order short-time effect.
    let spreads: Vec<f64> = [0.05, 0.01, 0.002]
        .iter()
        .map(|&t| {
            theta_spread(&spec(
                ScenarioKind::II,
                2,
                CodeSpec::RepetitionPhase { m: 3 },
                LindbladSpec::transversal(1.0).unwrap(),
                t,
            ))
        })
        .collect();
    assert!(spreads[0] < 0.05, "{spreads:?}");
    assert!(spreads[1] < spreads[0] / 10.0 && spreads[2] < spreads[1] / 10.0, "{spreads:?}");
}

#[test]
fn phase_frequency_consistency() {
    let t = 0.2;
    for base in [
        dephasing(2, 3, 0.95),
        spec(ScenarioKind::II, 2, CodeSpec::RepetitionPhase { m: 3 }, LindbladSpec::transversal(1.0).unwrap(), t),
    ] {
        let lambda = 0.5;
        let phase = ScenarioSpec { theta: lambda * base.t, mode: QfiMode::Phase, ..base.clone() };
        let freq = ScenarioSpec { mode: QfiMode::Frequency, ..phase.clone() };
        let (rp, rf) =
            (run_scenario(&phase, Execution::default()).unwrap(), run_scenario(&freq, Execution::default()).unwrap());
        let t2 = base.t * base.t;
        assert!((rf.qfi_oracle.unwrap().value - t2 * rp.qfi_oracle.unwrap().value).abs() <= 1e-10);
        if let Some(closed) = rf.qfi_closed {
            assert_eq!(closed.t, Some(base.t));
            assert!((closed.value - t2 * rp.qfi_closed.unwrap().value).abs() <= 1e-10);
        }
    }
}

#[test]
fn scenario2_examples() {
    for m in [1usize, 3] {
        let s =
            spec(ScenarioKind::II, 2, CodeSpec::RepetitionPhase { m }, LindbladSpec::transversal(0.0).unwrap(), 1.0);
        assert!((oracle(&s) - 4.0).abs() < 1e-6, "m={m}");
    }
}

#[test]
fn scenario2_mapping_consistency() {
    for steps in [1usize, 3] {
        for (code, n) in [(CodeSpec::RepetitionPhase { m: 3 }, 2usize), (CodeSpec::TwoQubitDemo, 2)] {
            let s = ScenarioSpec {
                trotter_steps: steps,
                ..spec(ScenarioKind::II, n, code, LindbladSpec::transversal(0.8).unwrap(), 0.3)
            };
            let r = run_scenario(&s, Execution::default()).unwrap();
            assert!(r.mapping_discrepancy.unwrap() <= 1e-6, "{code} steps={steps}");
        }
    }
}

#[test]
fn scenario2_short_time_factorisation() {
    // γ²t²N ≤ 1e−3 on 6 qubits: one factorised step vs a fine Trotter reference.
    let gamma: f64 = 1.0;
    let n_qubits = 6.0;
    let t = (1e-3 / (gamma * gamma * n_qubits)).sqrt();
    let s = spec(ScenarioKind::II, 2, CodeSpec::RepetitionPhase { m: 3 }, LindbladSpec::transversal(gamma).unwrap(), t);
    let me =
        scenario2_master_equation(&s).unwrap().conjugate_by_circuit(&scenario2_frame(&s.code, 2).unwrap()).unwrap();
    let mut me = me;
    me.lambda = 3.0;
    let rho0 = encoded_ghz(&s.code, 2).unwrap().to_density();
    let one = trotter_solve(&me, &rho0, t, 1).unwrap();
    assert!(!one.short_time_warning);
    let fine = trotter_solve(&me, &rho0, t, 256).unwrap();
    assert!(one.rho.max_abs_diff(&fine.rho) <= 1e-4);
}

#[test]
fn scenario2_short_time_approaches_heisenberg() {
    let mut previous = 0.0;
    for t in [0.2, 0.05, 0.01] {
        let s = spec(ScenarioKind::II, 2, CodeSpec::TwoQubitDemo, LindbladSpec::transversal(1.0).unwrap(), t);
        let s = ScenarioSpec { trotter_steps: 4, ..s };
        let f = oracle(&s);
        assert!(f <= 4.0 + 1e-6);
        assert!(f >= previous - 1e-9);
        previous = f;
    }
    assert!(previous >= 0.99 * 4.0);

    for t in [0.05, 0.01] {
        let s =
            spec(ScenarioKind::II, 2, CodeSpec::RepetitionPhase { m: 3 }, LindbladSpec::transversal(1.0).unwrap(), t);
        let f = oracle(&s);
        assert!((0.9 * 4.0..=4.0 + 1e-6).contains(&f), "t={t} F={f}");
    }
}

#[test]
fn two_qubit_demo_examples() {
    for n in 1..=3 {
        for b in 0..n {
            assert!((demo_single_error_fidelity(n, b).unwrap() - 1.0).abs() <= 1e-12);
        }
    }
    let noiseless =
        spec(ScenarioKind::TwoQubitDemo, 2, CodeSpec::TwoQubitDemo, LindbladSpec::transversal(0.0).unwrap(), 1.0);
    assert!((oracle(&noiseless) - 4.0).abs() < 1e-8);

    // Flip probability (1 − e^{−γt})/2 = 0.05 on the first qubit of each block.
    let t = -(0.9f64).ln();
    let s = spec(ScenarioKind::TwoQubitDemo, 2, CodeSpec::TwoQubitDemo, LindbladSpec::transversal(1.0).unwrap(), t);
    let r = run_two_qubit_demo(&s, Execution::default()).unwrap();
    assert!((r.qfi_oracle.unwrap().value - 4.0).abs() <= 4.0 * 1e-8);
    assert!(r.discrepancy.unwrap() <= 1e-8);
    assert!(run_two_qubit_demo(&ScenarioSpec { n_blocks: 5, ..s }, Execution::default()).is_err());
}

#[test]
fn spec_validation() {
    let bad_noise = spec(
        ScenarioKind::IDephasing,
        2,
        CodeSpec::RepetitionPhase { m: 3 },
        LindbladSpec::transversal(1.0).unwrap(),
        0.1,
    );
    assert!(run_scenario(&bad_noise, Execution::default()).is_err());
    let bad_code = spec(
        ScenarioKind::ILocalNoise,
        2,
        CodeSpec::RepetitionPhase { m: 3 },
        LindbladSpec::depolarizing(1.0).unwrap(),
        0.1,
    );
    assert!(run_scenario(&bad_code, Execution::default()).is_err());
    let too_big =
        spec(ScenarioKind::II, 3, CodeSpec::RepetitionPhase { m: 5 }, LindbladSpec::transversal(1.0).unwrap(), 0.1);
    assert!(run_scenario(&too_big, Execution::default()).is_err());
}
