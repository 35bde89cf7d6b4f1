//! Quantum Fisher information.
//!
//! The spectral engine evaluates, for `ρ = Σ p_j |j⟩⟨j|`,
//!
//! ```text
//! F = 2 Σ_{j,k: p_j+p_k > cutoff} (p_j − p_k)² / (p_j + p_k) · |⟨j|H|k⟩|² · (dθ/dλ)²
//! ```
//!
//! when the parameter enters through `e^{−iθH}`, and
//! `F = 2 Σ |⟨j|∂ρ|k⟩|² / (p_j + p_k)` when only the derivative of the state is
//! available. Closed forms cover GHZ probes under dephasing and depolarizing
//! noise.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::linalg::{hermitian_eig, ComplexMatrix, Generator, HermitianSpectrum};
use crate::numeric::{compensated_sum, CompensatedSum};

/// Pairs with `p_j + p_k` at or below this are skipped.
pub const PAIR_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QfiMethod {
    Spectral,
    SpectralDerivative,
    ClosedFormRank2,
    ClosedFormDepolarizing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiResult {
    pub value: f64,
    pub method: QfiMethod,
    /// Interrogation time in frequency mode.
    pub t: Option<f64>,
    /// Spectral pairs above the cutoff.
    pub terms_kept: Option<usize>,
}

impl QfiResult {
    fn closed(value: f64, method: QfiMethod, t: Option<f64>) -> Self {
        Self { value, method, t, terms_kept: None }
    }
}

fn check_state(rho: &ComplexMatrix) -> Result<HermitianSpectrum> {
    let dev = rho.hermitian_deviation();
    if dev > 1e-10 {
        return Err(Error::NotHermitian(dev));
    }
    let tr = rho.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(invalid(format!("density matrix has trace {tr}")));
    }
    hermitian_eig(rho)
}

/// `V† A V` with `V` the eigenvector matrix.
fn in_eigenbasis(v: &ComplexMatrix, av: &ComplexMatrix) -> ComplexMatrix {
    v.adjoint().matmul(av)
}

fn pair_sum<F>(p: &[f64], exec: Execution, weight: F) -> (f64, usize)
where
    F: Fn(usize, usize) -> Option<f64> + Sync + Send,
{
    let rows = exec.map_range(p.len(), |j| {
        let mut acc = CompensatedSum::new();
        let mut kept = 0usize;
        for k in 0..p.len() {
            if let Some(w) = weight(j, k) {
                acc.add(w);
                kept += 1;
            }
        }
        (acc.value(), kept)
    });
    let kept = rows.iter().map(|r| r.1).sum();
    (compensated_sum(rows.into_iter().map(|r| r.0)), kept)
}

/// Spectral QFI for `ρ_λ = e^{−iθ(λ)H} ρ e^{iθ(λ)H}` at the given `ρ`,
/// scaled by `(dθ/dλ)²`. Frequency mode is `dtheta_dlambda = t`.
pub fn qfi_spectral(rho: &ComplexMatrix, h: &Generator, dtheta_dlambda: f64, exec: Execution) -> Result<QfiResult> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: h.dim() });
    }
    let spec = check_state(rho)?;
    let p = spec.probabilities()?;
    let v = &spec.eigenvectors;
    let hk = in_eigenbasis(v, &h.apply_left(v));
    let (sum, kept) = pair_sum(&p, exec, |j, k| {
        let s = p[j] + p[k];
        (s > PAIR_CUTOFF).then(|| {
            let d = p[j] - p[k];
            d * d / s * hk[(j, k)].norm_sqr()
        })
    });
    Ok(QfiResult {
        value: 2.0 * sum * dtheta_dlambda * dtheta_dlambda,
        method: QfiMethod::Spectral,
        t: None,
        terms_kept: Some(kept),
    })
}

/// `F = 2 Σ |⟨j|∂ρ|k⟩|² / (p_j + p_k)` for a state and its parameter derivative.
///
/// Pairs below the cutoff are skipped; for a physical family `∂ρ` has no
/// support there.
pub fn qfi_from_derivative(rho: &ComplexMatrix, drho: &ComplexMatrix, exec: Execution) -> Result<QfiResult> {
    if drho.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: drho.dim() });
    }
    let spec = check_state(rho)?;
    let p = spec.probabilities()?;
    let v = &spec.eigenvectors;
    let dk = in_eigenbasis(v, &drho.matmul(v));
    let (sum, kept) = pair_sum(&p, exec, |j, k| {
        let s = p[j] + p[k];
        (s > PAIR_CUTOFF).then(|| dk[(j, k)].norm_sqr() / s)
    });
    Ok(QfiResult { value: 2.0 * sum, method: QfiMethod::SpectralDerivative, t: None, terms_kept: Some(kept) })
}

/// Fourth-order central difference `∂ρ/∂x` with step `h`.
pub fn five_point_derivative<F>(f: F, x: f64, h: f64) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    if !(h > 0.0) {
        return Err(invalid("finite-difference step must be positive"));
    }
    let m2 = f(x - 2.0 * h)?;
    let m1 = f(x - h)?;
    let p1 = f(x + h)?;
    let p2 = f(x + 2.0 * h)?;
    let mut d = m2.scale(1.0);
    d.add_scaled(&m1, -8.0);
    d.add_scaled(&p1, 8.0);
    d.add_scaled(&p2, -1.0);
    Ok(d.scale(1.0 / (12.0 * h)))
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(invalid("need at least one probe"));
    }
    Ok(())
}

/// `(1 − 2e)^{2N} N²` with `e = 1 − p`, evaluated through `ln_1p`.
pub fn rank2_qfi_from_error(e: f64, n: u64) -> Result<f64> {
    check_n(n)?;
    if !(0.0..=0.5).contains(&e) {
        return Err(invalid(format!("flip probability {e} outside [0, 1/2]")));
    }
    let nf = n as f64;
    Ok(nf * nf * heisenberg_retention_from_error(e, n))
}

/// `(1 − 2e)^{2N}`, the fraction of `N²` retained.
pub fn heisenberg_retention_from_error(e: f64, n: u64) -> f64 {
    if e >= 0.5 {
        return 0.0;
    }
    (2.0 * n as f64 * (-2.0 * e).ln_1p()).exp()
}

/// `F = (2p − 1)^{2N} N²` for a GHZ probe under dephasing with retention `p`
/// (physical `p` or logical `p_L`).
pub fn qfi_dephased_ghz_phase(p: f64, n: u64) -> Result<QfiResult> {
    if !(0.5..=1.0).contains(&p) {
        return Err(invalid(format!("retention {p} outside [1/2, 1]")));
    }
    Ok(QfiResult::closed(rank2_qfi_from_error(1.0 - p, n)?, QfiMethod::ClosedFormRank2, None))
}

/// `F = t² (2p_L(t) − 1)^{2N} N²` for retention `p_logical` reached at time `t`.
pub fn qfi_dephased_ghz_frequency(p_logical: f64, n: u64, t: f64) -> Result<QfiResult> {
    if !(t >= 0.0) {
        return Err(invalid("time must be nonnegative"));
    }
    let phase = qfi_dephased_ghz_phase(p_logical, n)?;
    Ok(QfiResult::closed(t * t * phase.value, QfiMethod::ClosedFormRank2, Some(t)))
}

/// Frequency-mode QFI from a logical rate: `2p_L − 1 = e^{−γ_L t}`.
pub fn qfi_dephased_ghz_frequency_rate(gamma_logical: f64, n: u64, t: f64) -> Result<QfiResult> {
    check_n(n)?;
    if !(t >= 0.0) || !(gamma_logical >= 0.0) {
        return Err(invalid("time and rate must be nonnegative"));
    }
    let nf = n as f64;
    let value = t * t * (-2.0 * nf * gamma_logical * t).exp() * nf * nf;
    Ok(QfiResult::closed(value, QfiMethod::ClosedFormRank2, Some(t)))
}

/// `F = p^{2N} N² / [((1+p)/2)^N + ((1−p)/2)^N]` for a GHZ probe after
/// depolarizing noise `D(p)` on every qubit.
pub fn qfi_depolarized_ghz(p: f64, n: u64) -> Result<QfiResult> {
    check_n(n)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("depolarizing parameter {p} outside [0, 1]")));
    }
    let nf = n as f64;
    let ni = n as i32;
    let denom = ((1.0 + p) / 2.0).powi(ni) + ((1.0 - p) / 2.0).powi(ni);
    Ok(QfiResult::closed(p.powi(2 * ni) * nf * nf / denom, QfiMethod::ClosedFormDepolarizing, None))
}

/// `N(1 − p)²` above this marks the `p^{3N/2}N²` approximation as unreliable.
pub const DEPOLARIZED_APPROX_LIMIT: f64 = 0.01;

/// `F ≈ p^{3N/2} N²` and whether `p` is close enough to 1 for it to hold.
pub fn qfi_depolarized_ghz_approx(p: f64, n: u64) -> Result<(f64, bool)> {
    check_n(n)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("depolarizing parameter {p} outside [0, 1]")));
    }
    let nf = n as f64;
    let e = 1.0 - p;
    Ok((p.powf(1.5 * nf) * nf * nf, nf * e * e <= DEPOLARIZED_APPROX_LIMIT))
}
