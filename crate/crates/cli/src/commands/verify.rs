//! Oracle cross-check suite.

use qecmetro::channels::{apply_pauli_channel, LindbladSpec, PauliChannel};
use qecmetro::codes::{
    concatenated_failure, depolarizing_to_q, enumerate_logical_channel, enumerate_no_error_probability,
    five_qubit_logical_q, five_qubit_threshold, logical_flip_retention, CodeSpec,
};
use qecmetro::estimation::optimize_interrogation_time;
use qecmetro::linalg::{ghz_state, ComplexMatrix, Generator};
use qecmetro::pauli::{verify_scenario2_mapping, CliffordCircuit, CliffordGate, Letter, PauliString, PauliSum};
use qecmetro::qfi::{qfi_dephased_ghz_phase, qfi_depolarized_ghz, qfi_spectral};
use qecmetro::scenario::{demo_single_error_fidelity, run_scenario, QfiMode, ScenarioKind, ScenarioSpec};
use qecmetro::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Context;
use crate::config::{RunConfig, VerifyConfig};
use crate::error::{invalid, CliError, Result};

pub const CHECKS: [&str; 10] = [
    "mapping",
    "channel_identity",
    "dephased_qfi",
    "depolarized_qfi",
    "dephasing_pipeline",
    "five_qubit",
    "optimizer",
    "two_qubit_demo",
    "scenario2_consistency",
    "random_cliffords",
];

pub const DEFAULT_MAPPING_M: [usize; 3] = [1, 3, 5];
const RANDOM_CIRCUITS: usize = 64;

/// One case of a check: a measured error against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub case: String,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: Vec<CaseResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

struct Cases {
    override_tol: Option<f64>,
    cases: Vec<CaseResult>,
}

impl Cases {
    /// Records `error ≤ tolerance`; `ok` carries any exact condition as well.
    fn push(&mut self, case: String, error: f64, tolerance: f64, ok: bool) {
        let tolerance = self.override_tol.unwrap_or(tolerance);
        let passed = ok && error.is_finite() && error <= tolerance;
        self.cases.push(CaseResult { case, error, tolerance, passed });
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn z_sum(n: usize) -> Result<Generator> {
    let terms = (0..n).map(|q| (0.5, PauliString::single(n, q, Letter::Z))).collect();
    Ok(Generator::Pauli(PauliSum::new(n, terms)?))
}

fn noisy_ghz(n: usize, ch: &PauliChannel) -> Result<ComplexMatrix> {
    let mut rho = ghz_state(n).to_density();
    for q in 0..n {
        rho = apply_pauli_channel(&rho, ch, q)?;
    }
    Ok(rho)
}

fn logical_probe() -> ComplexMatrix {
    use qecmetro::linalg::Complex64;
    ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => Complex64::new(0.7, 0.0),
        (1, 1) => Complex64::new(0.3, 0.0),
        (0, 1) => Complex64::new(0.2, -0.15),
        _ => Complex64::new(0.2, 0.15),
    })
}

fn scenario(
    kind: ScenarioKind,
    n_blocks: usize,
    code: CodeSpec,
    noise: LindbladSpec,
    t: f64,
    steps: usize,
) -> ScenarioSpec {
    ScenarioSpec { kind, n_blocks, code, noise, t, theta: 0.1, mode: QfiMode::Phase, trotter_steps: steps }
}

fn run_check(name: &str, c: &mut Cases, ms: &[usize], seed: u64, exec: Execution) -> Result<()> {
    match name {
        "mapping" => {
            for &m in ms {
                let r = verify_scenario2_mapping(m)?;
                let fixed = r.transversal_fixed.iter().all(|(_, ok)| *ok);
                let dense = r.dense_max_error.unwrap_or(0.0);
                c.push(format!("m={m} hamiltonian -> {}", r.hamiltonian_image), dense, 1e-12, r.hamiltonian_ok);
                c.push(format!("m={m} transversal X fixed"), dense, 1e-12, fixed);
            }
        }
        "channel_identity" => {
            let rho = logical_probe();
            for m in [3, 5] {
                for p in [0.6, 0.9, 0.99] {
                    let code = CodeSpec::repetition(m)?;
                    let out = enumerate_logical_channel(&code, &PauliChannel::dephasing(p)?, &rho, exec)?;
                    let p_l = logical_flip_retention(p, m)?;
                    let expected = apply_pauli_channel(&rho, &PauliChannel::dephasing(p_l)?, 0)?;
                    c.push(format!("m={m} p={p}"), out.max_abs_diff(&expected), 1e-10, true);
                }
            }
        }
        "dephased_qfi" => {
            for n in 1..=4usize {
                for p in [0.6, 0.8, 0.95, 1.0] {
                    let spectral = qfi_spectral(&noisy_ghz(n, &PauliChannel::dephasing(p)?)?, &z_sum(n)?, 1.0, exec)?;
                    let closed = qfi_dephased_ghz_phase(p, n as u64)?;
                    c.push(format!("N={n} p={p}"), rel(closed.value, spectral.value), 1e-10, true);
                }
            }
        }
        "depolarized_qfi" => {
            for n in 1..=3usize {
                for p in [0.8, 0.95] {
                    let spectral =
                        qfi_spectral(&noisy_ghz(n, &PauliChannel::depolarizing(p)?)?, &z_sum(n)?, 1.0, exec)?;
                    let closed = qfi_depolarized_ghz(p, n as u64)?;
                    c.push(format!("N={n} p={p}"), rel(closed.value, spectral.value), 1e-9, true);
                }
            }
        }
        "dephasing_pipeline" => {
            for m in [1, 3] {
                for p in [0.9f64, 0.99] {
                    let t = -(2.0 * p - 1.0).ln();
                    let s = scenario(
                        ScenarioKind::IDephasing,
                        2,
                        CodeSpec::repetition(m)?,
                        LindbladSpec::dephasing(1.0)?,
                        t,
                        1,
                    );
                    let r = run_scenario(&s, exec)?;
                    let p_l = logical_flip_retention(p, m)?;
                    let expected = (2.0 * p_l - 1.0).powi(4) * 4.0;
                    let oracle = r.qfi_oracle.map_or(f64::NAN, |q| q.value);
                    c.push(format!("N=2 m={m} p={p}"), rel(oracle, expected), 1e-8, true);
                }
            }
        }
        "five_qubit" => {
            for p in [0.5, 0.8, 0.95, 0.999] {
                let q = depolarizing_to_q(p);
                let e =
                    enumerate_no_error_probability(&CodeSpec::FiveQubitGraph, &PauliChannel::depolarizing(p)?, exec)?;
                c.push(
                    format!("q={q}"),
                    (e.correctable_probability - five_qubit_logical_q(q)).abs(),
                    1e-12,
                    e.correctable_all_trivial,
                );
            }
            let q_star = five_qubit_threshold();
            c.push(
                format!("fixed point q*={q_star}"),
                (five_qubit_logical_q(q_star) - q_star).abs(),
                1e-12,
                q_star > 0.5 && q_star < 1.0,
            );
            for e in [1e-2, 1e-3, 1e-4] {
                let (e1, e2) = (concatenated_failure(e, 1), concatenated_failure(e, 2));
                // Ratio to the squared-failure bound with C = 10.
                c.push(format!("double-exponential e={e}"), e2 / (10.0 * e1 * e1), 1.0, true);
            }
        }
        "optimizer" => {
            for gamma in [0.1, 1.0] {
                for n in [1u64, 10, 100] {
                    let nf = n as f64;
                    let obj = move |t: f64| t * (-2.0 * nf * gamma * t).exp() * nf * nf;
                    let opt = optimize_interrogation_time(obj, 1e-6 / gamma, 10.0 / gamma, exec)?;
                    c.push(
                        format!("N={n} gamma={gamma}"),
                        rel(opt.t_opt, 1.0 / (2.0 * nf * gamma)),
                        1e-6,
                        !opt.at_boundary,
                    );
                }
            }
        }
        "two_qubit_demo" => {
            for n in 1..=3 {
                for b in 0..n {
                    let f = demo_single_error_fidelity(n, b)?;
                    c.push(format!("N={n} error on block {b}"), (f - 1.0).abs(), 1e-12, true);
                }
            }
            let t = -(0.9f64).ln();
            let s =
                scenario(ScenarioKind::TwoQubitDemo, 2, CodeSpec::TwoQubitDemo, LindbladSpec::transversal(1.0)?, t, 1);
            let f = run_scenario(&s, exec)?.qfi_oracle.map_or(f64::NAN, |q| q.value);
            c.push("N=2 QFI".into(), rel(f, 4.0), 1e-8, true);
        }
        "scenario2_consistency" => {
            for (code, n) in [(CodeSpec::repetition(3)?, 2usize), (CodeSpec::TwoQubitDemo, 2)] {
                for steps in [1, 3] {
                    let s = scenario(ScenarioKind::II, n, code, LindbladSpec::transversal(0.8)?, 0.3, steps);
                    let d = run_scenario(&s, exec)?.mapping_discrepancy.unwrap_or(f64::NAN);
                    c.push(format!("{code} steps={steps}"), d, 1e-6, true);
                }
            }
        }
        "random_cliffords" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
            let mut worst = 0.0f64;
            for _ in 0..RANDOM_CIRCUITS {
                let width = rng.random_range(1..=5usize);
                let word: Vec<Letter> = (0..width).map(|_| letters[rng.random_range(0..4)]).collect();
                let p = PauliString::new(2 * rng.random_range(0..2u8), &word);
                let mut circuit = CliffordCircuit::new(width);
                for _ in 0..rng.random_range(0..12) {
                    let a = rng.random_range(0..width);
                    let gate = if width == 1 || rng.random_bool(1.0 / 3.0) {
                        CliffordGate::Hadamard(a)
                    } else {
                        let b = (a + rng.random_range(1..width)) % width;
                        if rng.random_bool(0.5) {
                            CliffordGate::ControlledPhase(a, b)
                        } else {
                            CliffordGate::ControlledX(a, b)
                        }
                    };
                    circuit.push(gate)?;
                }
                let u = circuit.to_dense();
                let dense = u.matmul(&p.to_dense()).matmul(&u.adjoint());
                let symbolic = p.conjugate_by_circuit(&circuit)?.to_dense();
                worst = worst.max(dense.max_abs_diff(&symbolic));
            }
            c.push(format!("{RANDOM_CIRCUITS} circuits, seed {seed}"), worst, 1e-12, true);
        }
        other => return Err(invalid(format!("unknown check `{other}`; known: {}", CHECKS.join(", ")))),
    }
    Ok(())
}

pub fn compute(config: &VerifyConfig, seed: u64, exec: Execution) -> Result<VerifyReport> {
    let names: Vec<String> = config.checks.clone().unwrap_or_else(|| CHECKS.iter().map(|s| s.to_string()).collect());
    if let Some(bad) = names.iter().find(|n| !CHECKS.contains(&n.as_str())) {
        return Err(invalid(format!("unknown check `{bad}`; known: {}", CHECKS.join(", "))));
    }
    if config.tolerance.is_some_and(|t| !(t >= 0.0)) {
        return Err(invalid("tolerance must be non-negative"));
    }
    let ms = config.m.clone().unwrap_or_else(|| DEFAULT_MAPPING_M.to_vec());
    let mut checks = Vec::new();
    for name in &names {
        let mut cases = Cases { override_tol: config.tolerance, cases: Vec::new() };
        run_check(name, &mut cases, &ms, seed, exec)?;
        checks.push(CheckResult {
            name: name.clone(),
            passed: cases.cases.iter().all(|c| c.passed),
            cases: cases.cases,
        });
    }
    Ok(VerifyReport { seed, passed: checks.iter().all(|c| c.passed), checks })
}

pub fn run(config: VerifyConfig, base: RunConfig, ctx: &mut Context) -> Result<VerifyReport> {
    let report = compute(&config, ctx.seed, ctx.exec)?;
    ctx.write_config("verify", &RunConfig { verify: Some(config), ..base })?;
    ctx.out.write_json("verify.json", &report)?;
    for check in &report.checks {
        for case in &check.cases {
            println!(
                "{} {} [{}] error={:.3e} tol={:.1e}",
                if case.passed { "PASS" } else { "FAIL" },
                check.name,
                case.case,
                case.error,
                case.tolerance
            );
        }
    }
    ctx.announce();
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::ChecksFailed { failed, total: report.checks.len() });
    }
    println!("all {} checks passed", report.checks.len());
    Ok(report)
}
