//! End-to-end density-matrix pipelines.
//!
//! Each pipeline prepares a logical GHZ probe in `N` code blocks, evolves it
//! under the block Hamiltonian and the noise, corrects each block and
//! evaluates the QFI. Where a closed form exists it is attached next to the
//! brute-force value.
//!
//! Frames: scenario I works directly in the code frame, where the block
//! Hamiltonian is `σ_z^{⊗m}`. Scenario II and the two-qubit demo prepare the
//! probe in the code frame, move to the physical frame with `F†` (`F` is the
//! block mapper followed by Hadamards on qubits 2..m for the repetition code),
//! evolve there under `½Σσ_z^{(1)}` with `σ_x` noise, and return with `F`
//! before correcting. Encoding and decoding gates are noiseless.

use serde::{Deserialize, Serialize};

use crate::channels::{apply_pauli_channel, trotter_solve, LindbladSpec, MasterEquationSpec, PauliChannel};
use crate::codes::{
    concatenated_q, correct_and_decode, decode_logical, depolarizing_to_q, encode_state, five_qubit_logical_q,
    logical_flip_retention, q_to_depolarizing, syndrome_correct, syndrome_correct_blocks, CodeSpec, MAX_DENSE_QUBITS,
};
use crate::error::{invalid, Result};
use crate::exec::Execution;
use crate::linalg::{evolve_unitary, ghz_state, ComplexMatrix, Generator, StateVector};
use crate::pauli::{build_block_mapper, hadamard, CliffordCircuit, CliffordGate, Letter, PauliString, PauliSum};
use crate::qfi::{
    five_point_derivative, qfi_dephased_ghz_phase, qfi_depolarized_ghz, qfi_from_derivative, qfi_spectral, QfiMethod,
    QfiResult,
};

/// Default evolution angle at which QFIs are evaluated.
pub const DEFAULT_THETA: f64 = 0.1;
/// States up to this many qubits get their QFI from the full physical state;
/// larger ones are decoded to the logical register first.
pub const FULL_STATE_QFI_QUBITS: usize = 8;
const DERIVATIVE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Scenario I with pure dephasing, solved exactly.
    IDephasing,
    /// Scenario I with arbitrary local Pauli noise, short-time Trotter.
    ILocalNoise,
    /// Scenario II: `σ_z` on the first qubit of each block, transversal noise.
    #[serde(rename = "ii")]
    II,
    TwoQubitDemo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QfiMode {
    /// QFI with respect to the angle `θ`.
    #[default]
    Phase,
    /// QFI with respect to the frequency `λ = θ/t`: the phase value times `t²`.
    Frequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub n_blocks: usize,
    pub code: CodeSpec,
    pub noise: LindbladSpec,
    /// Interrogation time over which the noise acts.
    pub t: f64,
    /// Total evolution angle `θ_λ = λt`.
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub mode: QfiMode,
    #[serde(default = "default_steps")]
    pub trotter_steps: usize,
}

fn default_theta() -> f64 {
    DEFAULT_THETA
}

fn default_steps() -> usize {
    1
}

impl ScenarioSpec {
    pub fn n_qubits(&self) -> usize {
        self.n_blocks * self.code.block_size()
    }

    pub fn validate(&self) -> Result<()> {
        self.code.validate()?;
        self.noise.validate()?;
        if self.n_blocks == 0 {
            return Err(invalid("need at least one block"));
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(invalid("t must be finite and ≥ 0"));
        }
        if !self.theta.is_finite() {
            return Err(invalid("theta must be finite"));
        }
        if self.trotter_steps == 0 {
            return Err(invalid("trotter_steps must be at least 1"));
        }
        let dense = self.n_qubits() <= MAX_DENSE_QUBITS;
        match self.kind {
            ScenarioKind::IDephasing => {
                if !matches!(self.code, CodeSpec::RepetitionPhase { .. }) {
                    return Err(invalid("dephasing pipeline needs the repetition phase code"));
                }
                if !self.noise.is_dephasing() {
                    return Err(invalid("dephasing pipeline needs mu_z = 1"));
                }
            }
            ScenarioKind::ILocalNoise => {
                if !matches!(self.code, CodeSpec::FiveQubitGraph | CodeSpec::Concatenated { .. }) {
                    return Err(invalid("local-noise pipeline needs the five-qubit or concatenated code"));
                }
                if !dense {
                    return Err(invalid(format!("local-noise pipeline is limited to {MAX_DENSE_QUBITS} qubits")));
                }
            }
            ScenarioKind::II | ScenarioKind::TwoQubitDemo => {
                if !self.noise.is_transversal() {
                    return Err(invalid("scenario II needs transversal noise (mu_x = 1)"));
                }
                let ok = match self.kind {
                    ScenarioKind::II => {
                        matches!(self.code, CodeSpec::RepetitionPhase { .. } | CodeSpec::TwoQubitDemo)
                    }
                    _ => self.code == CodeSpec::TwoQubitDemo,
                };
                if !ok {
                    return Err(invalid(format!("code {} is not supported by this pipeline", self.code)));
                }
                if !dense {
                    return Err(invalid(format!("scenario II is limited to {MAX_DENSE_QUBITS} qubits")));
                }
            }
        }
        Ok(())
    }

    fn frequency_scale(&self) -> f64 {
        match self.mode {
            QfiMode::Phase => 1.0,
            QfiMode::Frequency => self.t * self.t,
        }
    }
}

/// Result flags.
pub mod flags {
    pub const PERFECT_GATES: &str = "noiseless_encoding_and_decoding";
    pub const SHORT_TIME: &str = "outside_short_time_regime";
    pub const ORACLE_SKIPPED: &str = "oracle_skipped_beyond_dense_limit";
    pub const NOT_DEPOLARIZING: &str = "logical_channel_treated_as_depolarizing";
    pub const LOGICAL_QFI: &str = "qfi_on_decoded_logical_state";
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub spec: ScenarioSpec,
    /// Corrected physical state at `θ` (oracle regime only).
    pub final_state: Option<ComplexMatrix>,
    /// Corrected state decoded onto the `N` logical qubits.
    pub logical_state: Option<ComplexMatrix>,
    pub qfi_closed: Option<QfiResult>,
    pub qfi_oracle: Option<QfiResult>,
    /// Oracle QFI of the noisy state before correction, when it was computed.
    pub qfi_uncorrected: Option<QfiResult>,
    /// `|closed − oracle| / max(oracle, ε)`.
    pub discrepancy: Option<f64>,
    /// Logical retention used by the closed form (`p_L`, or `q_L` for the
    /// five-qubit family).
    pub p_logical: Option<f64>,
    pub short_time_warning: bool,
    /// Largest `t` with `γ²t²N ≤ 0.01`; shrinks as `N^{−1/2}`.
    pub short_time_limit: Option<f64>,
    /// Max-entry difference between the physical-frame run mapped back and a
    /// run of the conjugated problem directly in the code frame.
    pub mapping_discrepancy: Option<f64>,
    pub flags: Vec<String>,
}

impl ScenarioResult {
    fn new(spec: &ScenarioSpec) -> Self {
        let gamma = spec.noise.gamma;
        Self {
            spec: spec.clone(),
            final_state: None,
            logical_state: None,
            qfi_closed: None,
            qfi_oracle: None,
            qfi_uncorrected: None,
            discrepancy: None,
            p_logical: None,
            short_time_warning: false,
            short_time_limit: (gamma > 0.0).then(|| 0.1 / (gamma * (spec.n_qubits() as f64).sqrt())),
            mapping_discrepancy: None,
            flags: vec![flags::PERFECT_GATES.into()],
        }
    }

    fn finish(mut self) -> Self {
        if let (Some(c), Some(o)) = (self.qfi_closed, self.qfi_oracle) {
            self.discrepancy = Some((c.value - o.value).abs() / o.value.max(f64::EPSILON));
        }
        self
    }
}

/// `½ Σ_k σ_z^{⊗m}` on block `k`.
pub fn block_hamiltonian(n_blocks: usize, m: usize) -> Result<PauliSum> {
    let n = n_blocks * m;
    PauliSum::new(n, (0..n_blocks).map(|k| (0.5, PauliString::on_qubits(n, k * m..(k + 1) * m, Letter::Z))).collect())
}

/// `½ Σ_k σ_z^{(1)}` on the first qubit of each block.
pub fn first_qubit_hamiltonian(n_blocks: usize, m: usize) -> Result<PauliSum> {
    let n = n_blocks * m;
    PauliSum::new(n, (0..n_blocks).map(|k| (0.5, PauliString::single(n, k * m, Letter::Z))).collect())
}

/// Encoded logical GHZ state `|GHZ_L⟩` across `n_blocks` blocks.
pub fn encoded_ghz(code: &CodeSpec, n_blocks: usize) -> Result<StateVector> {
    encode_state(code, &ghz_state(n_blocks))
}

/// Total weight of `ρ` inside the code space of every block.
pub fn codespace_weight(rho: &ComplexMatrix, code: &CodeSpec, n_blocks: usize) -> Result<f64> {
    Ok(decode_logical(rho, code, n_blocks)?.trace().re)
}

/// `C ρ C†`, applied gate by gate so only single-qubit dense operators are
/// ever built.
pub fn conjugate_density_by_circuit(rho: &ComplexMatrix, circuit: &CliffordCircuit) -> Result<ComplexMatrix> {
    let n = rho.n_qubits().ok_or_else(|| invalid("dimension is not a power of two"))?;
    if n != circuit.width() {
        return Err(crate::Error::WidthMismatch { left: n, right: circuit.width() });
    }
    let had = hadamard();
    let cp = |r: &ComplexMatrix, a: usize, b: usize| {
        let mask = (1usize << (n - 1 - a)) | (1usize << (n - 1 - b));
        let s = |i: usize| if i & mask == mask { -1.0 } else { 1.0 };
        ComplexMatrix::from_fn(r.dim(), |i, j| r[(i, j)] * (s(i) * s(j)))
    };
    let mut out = rho.clone();
    for gate in circuit.gates() {
        out = match *gate {
            CliffordGate::Hadamard(q) => out.conjugate_local(&had, q),
            CliffordGate::ControlledPhase(a, b) => cp(&out, a, b),
            CliffordGate::ControlledX(a, b) => {
                let r = out.conjugate_local(&had, a).conjugate_local(&had, b);
                let r = cp(&r, a, b);
                r.conjugate_local(&had, a).conjugate_local(&had, b)
            }
        };
    }
    Ok(out)
}

/// The code-frame map `F` for scenario II on `n_blocks` blocks: the block
/// mapper on every block, then (repetition code only) Hadamards on qubits
/// 2..m so the block Hamiltonian becomes `σ_z^{⊗m}`.
pub fn scenario2_frame(code: &CodeSpec, n_blocks: usize) -> Result<CliffordCircuit> {
    let m = code.block_size();
    let width = n_blocks * m;
    let mapper = build_block_mapper(m)?;
    let mut frame = CliffordCircuit::new(width);
    for k in 0..n_blocks {
        frame = frame.then(&mapper.embed(width, k * m)?)?;
    }
    if matches!(code, CodeSpec::RepetitionPhase { .. }) {
        for k in 0..n_blocks {
            for j in 1..m {
                frame.push(CliffordGate::Hadamard(k * m + j))?;
            }
        }
    }
    Ok(frame)
}

pub fn run_scenario(spec: &ScenarioSpec, exec: Execution) -> Result<ScenarioResult> {
    match spec.kind {
        ScenarioKind::IDephasing => run_scenario1_dephasing(spec, exec),
        ScenarioKind::ILocalNoise => run_scenario1_local_noise(spec, exec),
        ScenarioKind::II => run_scenario2(spec, exec),
        ScenarioKind::TwoQubitDemo => run_two_qubit_demo(spec, exec),
    }
}

fn logical_generator(n_blocks: usize) -> Result<Generator> {
    Ok(Generator::Pauli(block_hamiltonian(n_blocks, 1)?))
}

/// Scenario I under dephasing: encode `|GHZ_L⟩`, rotate by `e^{−iθH}`, apply
/// `E_z(p)` to every qubit, correct every block, then evaluate the QFI.
pub fn run_scenario1_dephasing(spec: &ScenarioSpec, exec: Execution) -> Result<ScenarioResult> {
    spec.validate()?;
    if spec.kind != ScenarioKind::IDephasing {
        return Err(invalid("expected an i_dephasing scenario"));
    }
    let CodeSpec::RepetitionPhase { m } = spec.code else {
        unreachable!("validated above");
    };
    let n = spec.n_blocks;
    let mut result = ScenarioResult::new(spec);
    let p = crate::channels::dephasing_flip_probability(spec.noise.gamma, spec.t)?;
    let p_l = logical_flip_retention(p, m)?;
    result.p_logical = Some(p_l);
    let closed = qfi_dephased_ghz_phase(p_l, n as u64)?;
    let scale = spec.frequency_scale();
    result.qfi_closed = Some(QfiResult {
        value: closed.value * scale,
        t: (spec.mode == QfiMode::Frequency).then_some(spec.t),
        ..closed
    });

    let n_qubits = spec.n_qubits();
    if n_qubits > MAX_DENSE_QUBITS {
        result.flags.push(flags::ORACLE_SKIPPED.into());
        return Ok(result.finish());
    }
    let h = Generator::Pauli(block_hamiltonian(n, m)?);
    let rho0 = encoded_ghz(&spec.code, n)?.to_density();
    let mut rho = evolve_unitary(&rho0, &h, spec.theta)?;
    let channel = PauliChannel::dephasing(p)?;
    for q in 0..n_qubits {
        rho = apply_pauli_channel(&rho, &channel, q)?;
    }
    let dtheta = scale.sqrt();
    if n_qubits <= FULL_STATE_QFI_QUBITS {
        result.qfi_uncorrected = Some(qfi_spectral(&rho, &h, dtheta, exec)?);
        let corrected = syndrome_correct_blocks(&rho, &spec.code, n)?;
        result.qfi_oracle = Some(qfi_spectral(&corrected, &h, dtheta, exec)?);
        result.logical_state = Some(decode_logical(&corrected, &spec.code, n)?);
        result.final_state = Some(corrected);
    } else {
        let logical = correct_and_decode(&rho, &spec.code, n)?;
        result.qfi_oracle = Some(qfi_spectral(&logical, &logical_generator(n)?, dtheta, exec)?);
        result.logical_state = Some(logical);
        result.flags.push(flags::LOGICAL_QFI.into());
    }
    Ok(result.finish())
}

fn evolve_with_noise(
    spec: &MasterEquationSpec,
    rho0: &ComplexMatrix,
    theta: f64,
    t: f64,
    steps: usize,
) -> Result<(ComplexMatrix, bool)> {
    if t == 0.0 {
        let h = Generator::Pauli(spec.hamiltonian.clone());
        return Ok((evolve_unitary(rho0, &h, theta)?, false));
    }
    let mut s = spec.clone();
    s.lambda = theta / t;
    let out = trotter_solve(&s, rho0, t, steps)?;
    Ok((out.rho, out.short_time_warning))
}

fn derivative_qfi<F>(family: F, theta: f64, scale: f64, exec: Execution) -> Result<(ComplexMatrix, QfiResult)>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    let rho = family(theta)?;
    let d = five_point_derivative(&family, theta, DERIVATIVE_STEP)?;
    let mut q = qfi_from_derivative(&rho, &d, exec)?;
    q.value *= scale;
    Ok((rho, q))
}

/// Scenario I under arbitrary local Pauli noise, for the five-qubit code and
/// its concatenation. The closed form treats the logical channel as
/// depolarizing with `p_L = (4q_L − 1)/3`.
pub fn run_scenario1_local_noise(spec: &ScenarioSpec, exec: Execution) -> Result<ScenarioResult> {
    spec.validate()?;
    if spec.kind != ScenarioKind::ILocalNoise {
        return Err(invalid("expected an i_local_noise scenario"));
    }
    let n = spec.n_blocks;
    let m = spec.code.block_size();
    let mut result = ScenarioResult::new(spec);

    let q = spec.noise.channel(spec.t)?.p_i;
    let q_l = match spec.code {
        CodeSpec::FiveQubitGraph => five_qubit_logical_q(q),
        CodeSpec::Concatenated { levels } => concatenated_q(q, levels),
        _ => unreachable!("validated above"),
    };
    if !spec.noise.is_depolarizing() && spec.noise.gamma > 0.0 {
        result.flags.push(flags::NOT_DEPOLARIZING.into());
    }
    result.p_logical = Some(q_l);
    let p_l = q_to_depolarizing(q_l).clamp(0.0, 1.0);
    let scale = spec.frequency_scale();
    let closed = qfi_depolarized_ghz(p_l, n as u64)?;
    result.qfi_closed = Some(QfiResult {
        value: closed.value * scale,
        t: (spec.mode == QfiMode::Frequency).then_some(spec.t),
        ..closed
    });
    debug_assert!((depolarizing_to_q(p_l) - q_l).abs() < 1e-12 || q_l < 0.25);

    let me = MasterEquationSpec::new(0.0, block_hamiltonian(n, m)?, vec![])?
        .with_local_noise(&spec.noise, 0..spec.n_qubits())?;
    let rho0 = encoded_ghz(&spec.code, n)?.to_density();
    let (rho, warn) = evolve_with_noise(&me, &rho0, spec.theta, spec.t, spec.trotter_steps)?;
    result.short_time_warning = warn;
    if warn {
        result.flags.push(flags::SHORT_TIME.into());
    }
    let family = |theta: f64| {
        let (r, _) = evolve_with_noise(&me, &rho0, theta, spec.t, spec.trotter_steps)?;
        correct_and_decode(&r, &spec.code, n)
    };
    let (logical, qfi) = derivative_qfi(family, spec.theta, scale, exec)?;
    result.qfi_oracle = Some(qfi);
    result.logical_state = Some(logical);
    if spec.n_qubits() <= FULL_STATE_QFI_QUBITS {
        result.final_state = Some(syndrome_correct_blocks(&rho, &spec.code, n)?);
    }
    result.flags.push(flags::LOGICAL_QFI.into());
    Ok(result.finish())
}

/// Physical-frame master equation for scenario II: `½Σσ_z^{(1)}` and `σ_x`
/// noise on every qubit (repetition code) or on the first qubit of each block
/// only (two-qubit demo).
pub fn scenario2_master_equation(spec: &ScenarioSpec) -> Result<MasterEquationSpec> {
    let n = spec.n_blocks;
    let m = spec.code.block_size();
    let noisy: Vec<usize> = match spec.code {
        CodeSpec::TwoQubitDemo => (0..n).map(|k| k * m).collect(),
        _ => (0..n * m).collect(),
    };
    MasterEquationSpec::new(0.0, first_qubit_hamiltonian(n, m)?, vec![])?.with_local_noise(&spec.noise, noisy)
}

/// Scenario II: prepare in the code frame, map to the physical frame with
/// `F†`, evolve under `½Σσ_z^{(1)}` with transversal noise, map back with `F`,
/// correct, and evaluate the QFI from the numerical `θ`-derivative.
pub fn run_scenario2(spec: &ScenarioSpec, exec: Execution) -> Result<ScenarioResult> {
    spec.validate()?;
    if !matches!(spec.kind, ScenarioKind::II | ScenarioKind::TwoQubitDemo) {
        return Err(invalid("expected a scenario II or two-qubit demo scenario"));
    }
    let n = spec.n_blocks;
    let mut result = ScenarioResult::new(spec);
    let frame = scenario2_frame(&spec.code, n)?;
    let frame_inv = frame.inverse();
    let me_phys = scenario2_master_equation(spec)?;
    let me_code = me_phys.conjugate_by_circuit(&frame)?;

    let rho_code0 = encoded_ghz(&spec.code, n)?.to_density();
    let rho_phys0 = conjugate_density_by_circuit(&rho_code0, &frame_inv)?;
    let run = |theta: f64| -> Result<(ComplexMatrix, bool)> {
        let (r, warn) = evolve_with_noise(&me_phys, &rho_phys0, theta, spec.t, spec.trotter_steps)?;
        Ok((conjugate_density_by_circuit(&r, &frame)?, warn))
    };

    let (mapped, warn) = run(spec.theta)?;
    result.short_time_warning = warn;
    if warn {
        result.flags.push(flags::SHORT_TIME.into());
    }
    let (direct, _) = evolve_with_noise(&me_code, &rho_code0, spec.theta, spec.t, spec.trotter_steps)?;
    result.mapping_discrepancy = Some(mapped.max_abs_diff(&direct));

    let scale = spec.frequency_scale();
    let family = |theta: f64| correct_and_decode(&run(theta)?.0, &spec.code, n);
    let (logical, qfi) = derivative_qfi(family, spec.theta, scale, exec)?;
    result.qfi_oracle = Some(qfi);
    result.logical_state = Some(logical);
    result.flags.push(flags::LOGICAL_QFI.into());
    if spec.n_qubits() <= FULL_STATE_QFI_QUBITS {
        result.final_state = Some(syndrome_correct_blocks(&mapped, &spec.code, n)?);
    }
    if spec.code == CodeSpec::TwoQubitDemo && spec.trotter_steps == 1 {
        // Noise after the full rotation is a correctable X on the first qubit,
        // so the Heisenberg value N² is exact.
        let nf = n as f64;
        result.qfi_closed = Some(QfiResult {
            value: nf * nf * scale,
            method: QfiMethod::ClosedFormRank2,
            t: (spec.mode == QfiMode::Frequency).then_some(spec.t),
            terms_kept: None,
        });
        result.p_logical = Some(1.0);
    }
    Ok(result.finish())
}

/// The two-qubit experimental code: scenario II with codewords `|0⟩|±⟩` and
/// `σ_x` noise on the first qubit of each block only.
pub fn run_two_qubit_demo(spec: &ScenarioSpec, exec: Execution) -> Result<ScenarioResult> {
    if spec.kind != ScenarioKind::TwoQubitDemo {
        return Err(invalid("expected a two_qubit_demo scenario"));
    }
    if spec.n_blocks > 4 {
        return Err(invalid("the two-qubit demo supports at most 4 blocks"));
    }
    run_scenario2(spec, exec)
}

/// Fidelity with the encoded GHZ probe after a single `σ_x` on the first
/// qubit of `block` followed by correction of that block.
pub fn demo_single_error_fidelity(n_blocks: usize, block: usize) -> Result<f64> {
    if block >= n_blocks {
        return Err(invalid("block index out of range"));
    }
    let code = CodeSpec::TwoQubitDemo;
    let psi = encoded_ghz(&code, n_blocks)?;
    let err = PauliString::single(2 * n_blocks, 2 * block, Letter::X);
    let corrupted = psi.apply_pauli(&err).to_density();
    let corrected = syndrome_correct_blocks(&corrupted, &code, n_blocks)?;
    Ok(psi.fidelity_with(&corrected))
}

/// Corrects a single block; exposed for the demo's one-block checks.
pub fn correct_block(rho: &ComplexMatrix, code: &CodeSpec) -> Result<ComplexMatrix> {
    syndrome_correct(rho, code)
}
