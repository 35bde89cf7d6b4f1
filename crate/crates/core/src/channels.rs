//! Noise descriptions and the Trotterised master equation.
//!
//! A single-qubit Lindbladian
//! `L ρ = γ/2 (−ρ + μ_x XρX + μ_y YρY + μ_z ZρZ)` damps the Pauli component
//! `σ_b` of the state by `exp(−γ(1 − μ_b)t)` and leaves the identity alone, so
//! its exact solution over any duration is a Pauli channel. The Trotter solver
//! uses that exact channel for every dissipative substep.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{evolve_unitary, ComplexMatrix, Generator};
use crate::pauli::{Letter, PauliString, PauliSum};

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladSpec {
    pub gamma: f64,
    pub mu_x: f64,
    pub mu_y: f64,
    pub mu_z: f64,
}

impl LindbladSpec {
    pub fn new(gamma: f64, mu_x: f64, mu_y: f64, mu_z: f64) -> Result<Self> {
        let spec = Self { gamma, mu_x, mu_y, mu_z };
        spec.validate()?;
        Ok(spec)
    }

    /// Pure dephasing (`μ_z = 1`).
    pub fn dephasing(gamma: f64) -> Result<Self> {
        Self::new(gamma, 0.0, 0.0, 1.0)
    }

    /// Transversal noise (`μ_x = 1`).
    pub fn transversal(gamma: f64) -> Result<Self> {
        Self::new(gamma, 1.0, 0.0, 0.0)
    }

    /// Depolarizing noise (`μ_x = μ_y = μ_z = 1/3`).
    pub fn depolarizing(gamma: f64) -> Result<Self> {
        Self::new(gamma, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(invalid(format!("gamma must be finite and ≥ 0, got {}", self.gamma)));
        }
        if [self.mu_x, self.mu_y, self.mu_z].iter().any(|&m| !(m >= 0.0)) {
            return Err(invalid("noise weights must be nonnegative"));
        }
        let total = self.mu_x + self.mu_y + self.mu_z;
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(invalid(format!("noise weights must sum to 1, got {total}")));
        }
        Ok(())
    }

    pub fn is_dephasing(&self) -> bool {
        (self.mu_z - 1.0).abs() <= SUM_TOLERANCE
    }

    pub fn is_transversal(&self) -> bool {
        (self.mu_x - 1.0).abs() <= SUM_TOLERANCE
    }

    pub fn is_depolarizing(&self) -> bool {
        [self.mu_x, self.mu_y, self.mu_z].iter().all(|m| (m - 1.0 / 3.0).abs() <= SUM_TOLERANCE)
    }

    /// Exact Pauli channel generated over duration `dt`.
    pub fn channel(&self, dt: f64) -> Result<PauliChannel> {
        if dt < 0.0 {
            return Err(invalid("duration must be nonnegative"));
        }
        let damp = |mu: f64| (-self.gamma * (1.0 - mu) * dt).exp();
        PauliChannel::from_transfer(damp(self.mu_x), damp(self.mu_y), damp(self.mu_z))
    }

    /// Lindblad jump terms `rate · (PρP − ρ)` on `qubit` of a `width`-qubit register.
    pub fn jumps_on(&self, width: usize, qubit: usize) -> Vec<PauliJump> {
        [(self.mu_x, Letter::X), (self.mu_y, Letter::Y), (self.mu_z, Letter::Z)]
            .into_iter()
            .filter(|(mu, _)| *mu > 0.0 && self.gamma > 0.0)
            .map(|(mu, l)| PauliJump { op: PauliString::single(width, qubit, l), rate: 0.5 * self.gamma * mu })
            .collect()
    }
}

/// `ρ ↦ p_i ρ + p_x XρX + p_y YρY + p_z ZρZ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    pub p_i: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl PauliChannel {
    pub fn new(p_i: f64, p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        let probs = [p_i, p_x, p_y, p_z];
        if probs.iter().any(|&p| !(p >= -SUM_TOLERANCE)) {
            return Err(invalid(format!("channel probabilities must be ≥ 0: {probs:?}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(invalid(format!("channel probabilities sum to {total}")));
        }
        let clip = |p: f64| p.max(0.0);
        Ok(Self { p_i: clip(p_i), p_x: clip(p_x), p_y: clip(p_y), p_z: clip(p_z) })
    }

    pub fn identity() -> Self {
        Self { p_i: 1.0, p_x: 0.0, p_y: 0.0, p_z: 0.0 }
    }

    /// `E_z(p) ρ = p ρ + (1 − p) ZρZ`.
    pub fn dephasing(p: f64) -> Result<Self> {
        Self::new(p, 0.0, 0.0, 1.0 - p)
    }

    /// `E_x(p) ρ = p ρ + (1 − p) XρX`.
    pub fn bit_flip(p: f64) -> Result<Self> {
        Self::new(p, 1.0 - p, 0.0, 0.0)
    }

    /// `D(p) ρ = p ρ + (1 − p)/4 Σ_σ σρσ = p ρ + (1 − p) 𝟙/2`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(-1.0 / 3.0..=1.0).contains(&p) {
            return Err(invalid(format!("depolarizing parameter {p} outside [-1/3, 1]")));
        }
        let e = (1.0 - p) / 4.0;
        Self::new(p + e, e, e, e)
    }

    /// Channel with Pauli-transfer eigenvalues `(λ_x, λ_y, λ_z)`.
    pub fn from_transfer(lx: f64, ly: f64, lz: f64) -> Result<Self> {
        Self::new(
            (1.0 + lx + ly + lz) / 4.0,
            (1.0 + lx - ly - lz) / 4.0,
            (1.0 - lx + ly - lz) / 4.0,
            (1.0 - lx - ly + lz) / 4.0,
        )
    }

    pub fn transfer(&self) -> [f64; 3] {
        [
            self.p_i + self.p_x - self.p_y - self.p_z,
            self.p_i - self.p_x + self.p_y - self.p_z,
            self.p_i - self.p_x - self.p_y + self.p_z,
        ]
    }

    pub fn terms(&self) -> [(f64, Letter); 4] {
        [(self.p_i, Letter::I), (self.p_x, Letter::X), (self.p_y, Letter::Y), (self.p_z, Letter::Z)]
    }
}

/// `p = (1 + e^{−γt})/2`, the retention probability of dephasing over `t`.
pub fn dephasing_flip_probability(gamma: f64, t: f64) -> Result<f64> {
    check_rate_time(gamma, t)?;
    Ok(0.5 * (1.0 + (-gamma * t).exp()))
}

/// Flip probability `1 − p = (1 − e^{−γt})/2`, accurate for small `γt`.
pub fn dephasing_error_probability(gamma: f64, t: f64) -> Result<f64> {
    check_rate_time(gamma, t)?;
    Ok(-0.5 * (-gamma * t).exp_m1())
}

/// `p = e^{−2γt/3}`, the depolarizing parameter over `t`.
pub fn depolarizing_parameter(gamma: f64, t: f64) -> Result<f64> {
    check_rate_time(gamma, t)?;
    Ok((-2.0 * gamma * t / 3.0).exp())
}

fn check_rate_time(gamma: f64, t: f64) -> Result<()> {
    if !(gamma >= 0.0) || !(t >= 0.0) {
        return Err(invalid(format!("rate and time must be ≥ 0 (gamma={gamma}, t={t})")));
    }
    Ok(())
}

/// `Σ_σ p_σ σ^{(qubit)} ρ σ^{(qubit)}`.
pub fn apply_pauli_channel(rho: &ComplexMatrix, ch: &PauliChannel, qubit: usize) -> Result<ComplexMatrix> {
    let n = rho.n_qubits().ok_or_else(|| invalid("density matrix dimension is not a power of two"))?;
    if qubit >= n {
        return Err(invalid(format!("qubit {qubit} out of range for {n} qubits")));
    }
    let mut out = rho.scale(ch.p_i);
    for (p, l) in ch.terms().into_iter().skip(1) {
        if p > 0.0 {
            out.add_scaled(&rho.conjugate_by_pauli(&PauliString::single(n, qubit, l)), p);
        }
    }
    Ok(out)
}

/// Lindblad term `rate · (PρP − ρ)` for a Hermitian Pauli string `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliJump {
    pub op: PauliString,
    pub rate: f64,
}

impl PauliJump {
    /// Weight on `PρP` after evolving for `dt`: `(1 − e^{−2·rate·dt})/2`.
    pub fn flip_weight(&self, dt: f64) -> f64 {
        -0.5 * (-2.0 * self.rate * dt).exp_m1()
    }

    pub fn apply(&self, rho: &ComplexMatrix, dt: f64) -> ComplexMatrix {
        let w = self.flip_weight(dt);
        let mut out = rho.scale(1.0 - w);
        out.add_scaled(&rho.conjugate_by_pauli(&self.op), w);
        out
    }
}

/// `ρ̇ = −iλ[H, ρ] + Σ_j rate_j (P_j ρ P_j − ρ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasterEquationSpec {
    pub n_qubits: usize,
    pub lambda: f64,
    pub hamiltonian: PauliSum,
    pub jumps: Vec<PauliJump>,
}

impl MasterEquationSpec {
    pub fn new(lambda: f64, hamiltonian: PauliSum, jumps: Vec<PauliJump>) -> Result<Self> {
        let spec = Self { n_qubits: hamiltonian.width(), lambda, hamiltonian, jumps };
        spec.validate()?;
        Ok(spec)
    }

    /// Adds the jumps of `noise` on each listed qubit.
    pub fn with_local_noise(mut self, noise: &LindbladSpec, qubits: impl IntoIterator<Item = usize>) -> Result<Self> {
        noise.validate()?;
        for q in qubits {
            if q >= self.n_qubits {
                return Err(invalid(format!("noise qubit {q} out of range")));
            }
            self.jumps.extend(noise.jumps_on(self.n_qubits, q));
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() {
            return Err(invalid("lambda must be finite"));
        }
        if !self.hamiltonian.is_hermitian() {
            return Err(invalid("Hamiltonian has a non-Hermitian term"));
        }
        for j in &self.jumps {
            if j.op.width() != self.n_qubits {
                return Err(Error::WidthMismatch { left: self.n_qubits, right: j.op.width() });
            }
            if !j.op.is_hermitian() || !(j.rate >= 0.0) {
                return Err(invalid(format!("invalid jump {} with rate {}", j.op, j.rate)));
            }
        }
        Ok(())
    }

    /// Largest per-qubit noise strength `γ = 2 Σ rate` over jumps touching the qubit.
    pub fn max_local_gamma(&self) -> f64 {
        (0..self.n_qubits)
            .map(|q| 2.0 * self.jumps.iter().filter(|j| j.op.letter(q) != Letter::I).map(|j| j.rate).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Conjugates the Hamiltonian and every jump operator by `circuit`.
    pub fn conjugate_by_circuit(&self, circuit: &crate::pauli::CliffordCircuit) -> Result<Self> {
        let jumps = self
            .jumps
            .iter()
            .map(|j| Ok(PauliJump { op: j.op.conjugate_by_circuit(circuit)?, rate: j.rate }))
            .collect::<Result<Vec<_>>>()?;
        MasterEquationSpec::new(self.lambda, self.hamiltonian.conjugate_by_circuit(circuit)?, jumps)
    }
}

/// `γ²t²N` above this sets [`TrotterOutput::short_time_warning`].
pub const SHORT_TIME_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct TrotterOutput {
    pub rho: ComplexMatrix,
    pub steps: usize,
    pub dt: f64,
    /// `γ²t²N > 0.01`: outside the regime where one unitary step followed by
    /// one noise step approximates the joint evolution.
    pub short_time_warning: bool,
}

/// First-order Lie–Trotter integration over `[0, t]`.
///
/// Every step applies the exact unitary `e^{−iλδH}` and then the exact
/// channel of each jump over `δ = t/steps`. With `steps = 1` this is the
/// factorised form `N(U ρ U†)`.
pub fn trotter_solve(spec: &MasterEquationSpec, rho0: &ComplexMatrix, t: f64, steps: usize) -> Result<TrotterOutput> {
    spec.validate()?;
    if steps == 0 {
        return Err(invalid("steps must be at least 1"));
    }
    if !(t >= 0.0) {
        return Err(invalid("evolution time must be nonnegative"));
    }
    if rho0.dim() != 1 << spec.n_qubits {
        return Err(Error::DimensionMismatch { expected: 1 << spec.n_qubits, got: rho0.dim() });
    }
    let dt = t / steps as f64;
    let generator = Generator::Pauli(spec.hamiltonian.clone());
    let mut rho = rho0.clone();
    for _ in 0..steps {
        rho = evolve_unitary(&rho, &generator, spec.lambda * dt)?;
        for jump in &spec.jumps {
            rho = jump.apply(&rho, dt);
        }
    }
    let gamma = spec.max_local_gamma();
    Ok(TrotterOutput {
        rho,
        steps,
        dt,
        short_time_warning: gamma * gamma * t * t * spec.n_qubits as f64 > SHORT_TIME_THRESHOLD,
    })
}
