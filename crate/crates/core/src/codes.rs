//! Error-correcting codes and the logical noise they induce.
//!
//! Four codes are supported:
//!
//! - the `m`-qubit repetition phase code with codewords
//!   `(|+⟩^{⊗m} ± |−⟩^{⊗m})/√2`, correcting up to `(m−1)/2` phase flips;
//! - the five-qubit code built on the ring graph, correcting any single-qubit
//!   Pauli error;
//! - its concatenation (level 0 is a bare qubit);
//! - the two-qubit code `|0⟩|±⟩`, correcting `X` errors on the first qubit.
//!
//! Every code here is perfect with respect to its correctable set `{E}`: the
//! subspaces `E·C` are orthogonal and fill the block Hilbert space, so the
//! recovery is `R(ρ) = Σ_E Π E ρ E Π` with `Π` the codespace projector.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::PauliChannel;
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::linalg::{ComplexMatrix, StateVector};
use crate::numeric::{binomial, compensated_sum};
use crate::pauli::{Letter, PauliString};

/// Largest block the dense routines will build.
pub const MAX_DENSE_QUBITS: usize = 12;

const RING_EDGES: [(usize, usize); 5] = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodeSpec {
    RepetitionPhase { m: usize },
    FiveQubitGraph,
    Concatenated { levels: usize },
    TwoQubitDemo,
}

impl CodeSpec {
    pub fn repetition(m: usize) -> Result<Self> {
        let code = CodeSpec::RepetitionPhase { m };
        code.validate()?;
        Ok(code)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CodeSpec::RepetitionPhase { m } => check_odd(m),
            CodeSpec::Concatenated { levels } if levels > 20 => {
                Err(invalid(format!("concatenation depth {levels} is unreasonably large")))
            }
            _ => Ok(()),
        }
    }

    /// Physical qubits per logical qubit.
    pub fn block_size(&self) -> usize {
        match *self {
            CodeSpec::RepetitionPhase { m } => m,
            CodeSpec::FiveQubitGraph => 5,
            CodeSpec::Concatenated { levels } => 5usize.pow(levels as u32),
            CodeSpec::TwoQubitDemo => 2,
        }
    }

    fn dense_kind(&self) -> Result<DenseKind> {
        self.validate()?;
        let n = self.block_size();
        if n > MAX_DENSE_QUBITS {
            return Err(invalid(format!("block of {n} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}")));
        }
        Ok(match *self {
            CodeSpec::RepetitionPhase { m } => DenseKind::Repetition(m),
            CodeSpec::FiveQubitGraph | CodeSpec::Concatenated { levels: 1 } => DenseKind::Graph,
            CodeSpec::Concatenated { .. } => DenseKind::Bare,
            CodeSpec::TwoQubitDemo => DenseKind::TwoQubit,
        })
    }
}

impl std::fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CodeSpec::RepetitionPhase { m } => write!(f, "repetition_phase(m={m})"),
            CodeSpec::FiveQubitGraph => write!(f, "five_qubit_graph"),
            CodeSpec::Concatenated { levels } => write!(f, "concatenated(levels={levels})"),
            CodeSpec::TwoQubitDemo => write!(f, "two_qubit_demo"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum DenseKind {
    Repetition(usize),
    Graph,
    Bare,
    TwoQubit,
}

fn check_odd(m: usize) -> Result<()> {
    if m == 0 || m.is_multiple_of(2) {
        return Err(invalid(format!("block size m must be odd and ≥ 1, got {m}")));
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Exact,
    LeadingOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalNoiseReport {
    /// Logical retention probability (`p_L` or `q_L`).
    pub p_logical: f64,
    /// `γ_L` defined by `2p_L − 1 = e^{−γ_L t}`, when a time is known.
    pub gamma_logical: Option<f64>,
    pub regime: Regime,
}

impl LogicalNoiseReport {
    /// Repetition code under dephasing of strength `gamma` for time `t`.
    pub fn repetition(gamma: f64, m: usize, t: f64) -> Result<Self> {
        let e = crate::channels::dephasing_error_probability(gamma, t)?;
        let fail = logical_failure_from_error(e, m)?;
        Ok(Self {
            p_logical: 1.0 - fail,
            gamma_logical: if t > 0.0 { Some(logical_noise_rate(gamma, m, t)?) } else { None },
            regime: Regime::Exact,
        })
    }
}

/// `1 − p_L = Σ_{k>(m−1)/2} C(m,k) p^{m−k} e^k` with `e = 1 − p` supplied
/// directly, so tiny error probabilities keep full relative precision.
pub fn logical_failure_from_error(e: f64, m: usize) -> Result<f64> {
    check_odd(m)?;
    check_probability(e)?;
    let p = 1.0 - e;
    let mu = m as u64;
    Ok(compensated_sum(
        ((m as u64).div_ceil(2)..=mu).map(|k| binomial(mu, k) * p.powi((mu - k) as i32) * e.powi(k as i32)),
    ))
}

/// `p_L = Σ_{k=0}^{(m−1)/2} C(m,k) p^{m−k} (1−p)^k`.
///
/// For `p > 0.9` the value is formed as `1 − tail` to avoid cancellation.
pub fn logical_flip_retention(p: f64, m: usize) -> Result<f64> {
    check_odd(m)?;
    check_probability(p)?;
    if p > 0.9 {
        return Ok(1.0 - logical_failure_from_error(1.0 - p, m)?);
    }
    let e = 1.0 - p;
    let mu = m as u64;
    Ok(compensated_sum((0..=(mu - 1) / 2).map(|k| binomial(mu, k) * p.powi((mu - k) as i32) * e.powi(k as i32))))
}

/// `ε_L = 2(1 − p_L)`.
pub fn logical_error_epsilon(p: f64, m: usize) -> Result<f64> {
    check_probability(p)?;
    Ok(2.0 * logical_failure_from_error(1.0 - p, m)?)
}

/// `p_L ≈ 1 − C(m,(m+1)/2)(1−p)^{(m+1)/2}`, only for `1 − p ≤ 0.1`.
pub fn logical_retention_leading_order(p: f64, m: usize) -> Result<f64> {
    check_odd(m)?;
    check_probability(p)?;
    let e = 1.0 - p;
    if e > 0.1 {
        return Err(invalid(format!("leading-order expansion needs 1 − p ≤ 0.1, got {e}")));
    }
    let h = (m as u64).div_ceil(2);
    Ok(1.0 - binomial(m as u64, h) * e.powi(h as i32))
}

/// `γ_L = −ln(2p_L − 1)/t` for the repetition code under dephasing.
pub fn logical_noise_rate(gamma: f64, m: usize, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid("logical rate needs t > 0"));
    }
    let e = crate::channels::dephasing_error_probability(gamma, t)?;
    let fail = logical_failure_from_error(e, m)?;
    if fail >= 0.5 {
        return Err(invalid("p_L ≤ 1/2: logical rate undefined"));
    }
    Ok(-(-2.0 * fail).ln_1p() / t)
}

/// Depolarizing parameter `p` to no-error probability `q = (1 + 3p)/4`.
pub fn depolarizing_to_q(p: f64) -> f64 {
    (1.0 + 3.0 * p) / 4.0
}

/// Inverse of [`depolarizing_to_q`]: `p = (4q − 1)/3`.
pub fn q_to_depolarizing(q: f64) -> f64 {
    (4.0 * q - 1.0) / 3.0
}

/// `q_L = q⁵ + 5q⁴(1 − q)`.
pub fn five_qubit_logical_q(q: f64) -> f64 {
    q.powi(5) + 5.0 * q.powi(4) * (1.0 - q)
}

/// `1 − q_L` from `e = 1 − q`: the probability of two or more errors.
pub fn five_qubit_logical_failure(e: f64) -> f64 {
    let q = 1.0 - e;
    compensated_sum((2..=5u64).map(|k| binomial(5, k) * e.powi(k as i32) * q.powi(5 - k as i32)))
}

/// `levels`-fold composition of [`five_qubit_logical_q`].
pub fn concatenated_q(q: f64, levels: usize) -> f64 {
    1.0 - concatenated_failure(1.0 - q, levels)
}

/// Failure probability after `levels` rounds of concatenation.
pub fn concatenated_failure(e: f64, levels: usize) -> f64 {
    (0..levels).fold(e, |acc, _| five_qubit_logical_failure(acc))
}

/// The nontrivial fixed point of `q ↦ q⁵ + 5q⁴(1−q)` in `(1/2, 1)`.
///
/// `f(q) − q = −q(q − 1)(4q³ − q² − q − 1)`, so the fixed point is the root of
/// the cubic factor, found by bisection.
pub fn five_qubit_threshold() -> f64 {
    let g = |q: f64| ((4.0 * q - 1.0) * q - 1.0) * q - 1.0;
    let (mut lo, mut hi) = (0.5, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRegime {
    Above,
    Below,
    At,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcatenationReport {
    pub q: f64,
    pub threshold: f64,
    pub regime: ThresholdRegime,
    /// `q_L` after `0, 1, …, levels` rounds.
    pub q_by_level: Vec<f64>,
    pub failure_by_level: Vec<f64>,
}

pub fn concatenation_report(q: f64, levels: usize) -> Result<ConcatenationReport> {
    check_probability(q)?;
    let threshold = five_qubit_threshold();
    let regime = if (q - threshold).abs() <= 1e-12 {
        ThresholdRegime::At
    } else if q > threshold {
        ThresholdRegime::Above
    } else {
        ThresholdRegime::Below
    };
    let failure_by_level: Vec<f64> = (0..=levels).map(|l| concatenated_failure(1.0 - q, l)).collect();
    Ok(ConcatenationReport {
        q,
        threshold,
        regime,
        q_by_level: failure_by_level.iter().map(|e| 1.0 - e).collect(),
        failure_by_level,
    })
}

/// A syndrome class `k̄` of the repetition code and its correction `σ_z^{k̄}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyndromeOutcome {
    pub k_vector: Vec<bool>,
    pub correction: PauliString,
}

impl SyndromeOutcome {
    fn from_mask(m: usize, mask: usize) -> Self {
        let k_vector: Vec<bool> = (0..m).map(|q| mask >> (m - 1 - q) & 1 == 1).collect();
        let correction =
            PauliString::on_qubits(m, k_vector.iter().enumerate().filter(|(_, b)| **b).map(|(q, _)| q), Letter::Z);
        Self { k_vector, correction }
    }
}

/// All syndrome classes of the repetition code: `k̄` of weight ≤ `(m−1)/2`.
pub fn repetition_syndromes(m: usize) -> Result<Vec<SyndromeOutcome>> {
    check_odd(m)?;
    let t = (m - 1) / 2;
    let mut masks: Vec<usize> = (0..1usize << m).filter(|k| k.count_ones() as usize <= t).collect();
    masks.sort_by_key(|k| (k.count_ones(), *k));
    Ok(masks.into_iter().map(|k| SyndromeOutcome::from_mask(m, k)).collect())
}

/// Syndrome class hit by the phase-flip pattern `error_mask` (bit `m−1−q`
/// marks qubit `q`). Patterns heavier than `(m−1)/2` land in the class of
/// their complement, which is a logical flip after correction.
pub fn repetition_syndrome_of(m: usize, error_mask: usize) -> Result<SyndromeOutcome> {
    check_odd(m)?;
    if error_mask >> m != 0 {
        return Err(invalid("error pattern wider than the block"));
    }
    let full = (1usize << m) - 1;
    let k = if error_mask.count_ones() as usize <= (m - 1) / 2 { error_mask } else { full ^ error_mask };
    Ok(SyndromeOutcome::from_mask(m, k))
}

/// Codewords `(|0_L⟩, |1_L⟩)` of a block.
///
/// For the repetition and graph codes `σ_z^{⊗m}` acts as the logical `Z`.
pub fn encode_codewords(code: &CodeSpec) -> Result<(StateVector, StateVector)> {
    let n = code.block_size();
    let parity_state = |odd: bool, sign: &dyn Fn(usize) -> f64| {
        let amps =
            (0..1usize << n)
                .map(|b| {
                    if (b.count_ones() % 2 == 1) == odd {
                        Complex64::new(sign(b), 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
        StateVector::new(amps)
    };
    match code.dense_kind()? {
        DenseKind::Repetition(_) => Ok((parity_state(false, &|_| 1.0)?, parity_state(true, &|_| 1.0)?)),
        DenseKind::Graph => {
            // |G⟩ has amplitude (−1)^{Σ_edges b_i b_j}; (|G⟩ ± Z^{⊗5}|G⟩)/√2
            // keeps the even- or odd-weight part.
            let bit = |b: usize, q: usize| (b >> (4 - q)) & 1;
            let sign = |b: usize| {
                let cuts: usize = RING_EDGES.iter().map(|&(i, j)| bit(b, i) & bit(b, j)).sum();
                if cuts.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            };
            Ok((parity_state(false, &sign)?, parity_state(true, &sign)?))
        }
        DenseKind::Bare => Ok((StateVector::basis(1, 0), StateVector::basis(1, 1))),
        DenseKind::TwoQubit => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let c = |re: f64| Complex64::new(re, 0.0);
            let zero_l = StateVector::new(vec![c(h), c(h), c(0.0), c(0.0)])?;
            let one_l = StateVector::new(vec![c(h), c(-h), c(0.0), c(0.0)])?;
            Ok((zero_l, one_l))
        }
    }
}

/// Correctable error set. The first entry is always the identity.
pub fn correctable_errors(code: &CodeSpec) -> Result<Vec<PauliString>> {
    let n = code.block_size();
    Ok(match code.dense_kind()? {
        DenseKind::Repetition(m) => repetition_syndromes(m)?.into_iter().map(|s| s.correction).collect(),
        DenseKind::Graph => {
            let mut errs = vec![PauliString::identity(n)];
            for q in 0..n {
                for l in [Letter::X, Letter::Y, Letter::Z] {
                    errs.push(PauliString::single(n, q, l));
                }
            }
            errs
        }
        DenseKind::Bare => vec![PauliString::identity(1)],
        DenseKind::TwoQubit => vec![PauliString::identity(2), PauliString::single(2, 0, Letter::X)],
    })
}

/// Dense `2^{k_out} × 2^{k_in}` operator acting on one block of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl BlockOperator {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        if !rows.is_power_of_two() || !cols.is_power_of_two() {
            return Err(invalid("block operator dimensions must be powers of two"));
        }
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }
}

/// `Σ_k K_k ρ K_k†` with every `K_k` acting on qubits `first..first + k_in`.
///
/// All operators must share their shape; the output register has the block
/// replaced by `k_out` qubits.
pub fn apply_block_map(rho: &ComplexMatrix, ops: &[BlockOperator], first: usize) -> Result<ComplexMatrix> {
    let Some(op0) = ops.first() else {
        return Err(invalid("empty operator list"));
    };
    let n = rho.n_qubits().ok_or_else(|| invalid("density matrix dimension is not a power of two"))?;
    let (rows, cols) = (op0.rows, op0.cols);
    if ops.iter().any(|k| k.rows != rows || k.cols != cols) {
        return Err(invalid("block operators have different shapes"));
    }
    let k_in = cols.trailing_zeros() as usize;
    let k_out = rows.trailing_zeros() as usize;
    if first + k_in > n {
        return Err(invalid(format!("block {first}..{} exceeds {n} qubits", first + k_in)));
    }
    let low = n - first - k_in;
    let outers = rho.dim() >> k_in;
    let in_dim = rho.dim();
    let out_dim = outers << k_out;
    let idx = |outer: usize, local: usize, k: usize| {
        let hi = outer >> low;
        let lo = outer & ((1 << low) - 1);
        (hi << (k + low)) | (local << low) | lo
    };

    let mut out = ComplexMatrix::zeros(out_dim);
    let mut left = vec![Complex64::new(0.0, 0.0); out_dim * in_dim];
    let mut buf = vec![Complex64::new(0.0, 0.0); cols];
    for op in ops {
        for col in 0..in_dim {
            for outer in 0..outers {
                for (l, slot) in buf.iter_mut().enumerate() {
                    *slot = rho[(idx(outer, l, k_in), col)];
                }
                for r in 0..rows {
                    left[idx(outer, r, k_out) * in_dim + col] = (0..cols).map(|l| op.get(r, l) * buf[l]).sum();
                }
            }
        }
        for row in 0..out_dim {
            for outer in 0..outers {
                for (l, slot) in buf.iter_mut().enumerate() {
                    *slot = left[row * in_dim + idx(outer, l, k_in)];
                }
                for c in 0..rows {
                    let v: Complex64 = (0..cols).map(|l| buf[l] * op.get(c, l).conj()).sum();
                    out[(row, idx(outer, c, k_out))] += v;
                }
            }
        }
    }
    Ok(out)
}

fn codeword_columns(code: &CodeSpec) -> Result<[StateVector; 2]> {
    let (a, b) = encode_codewords(code)?;
    Ok([a, b])
}

/// Kraus operators `Π E` of the recovery map.
pub fn recovery_operators(code: &CodeSpec) -> Result<Vec<BlockOperator>> {
    let words = codeword_columns(code)?;
    let dim = words[0].dim();
    correctable_errors(code)?
        .iter()
        .map(|e| {
            // (Π E)_{ij} = Σ_c w_c[i] conj((E w_c)[j]) since E is Hermitian.
            let moved: Vec<StateVector> = words.iter().map(|w| w.apply_pauli(e)).collect();
            BlockOperator::from_fn(dim, dim, |i, j| {
                (0..2).map(|c| words[c].amplitudes()[i] * moved[c].amplitudes()[j].conj()).sum()
            })
        })
        .collect()
}

/// Kraus operators `W† E` of recovery followed by decoding to one qubit.
pub fn correct_decode_operators(code: &CodeSpec) -> Result<Vec<BlockOperator>> {
    let words = codeword_columns(code)?;
    let dim = words[0].dim();
    correctable_errors(code)?
        .iter()
        .map(|e| {
            let moved: Vec<StateVector> = words.iter().map(|w| w.apply_pauli(e)).collect();
            BlockOperator::from_fn(2, dim, |c, j| moved[c].amplitudes()[j].conj())
        })
        .collect()
}

/// The isometry adjoint `W†` mapping the codespace onto one qubit.
pub fn decode_operator(code: &CodeSpec) -> Result<BlockOperator> {
    let words = codeword_columns(code)?;
    BlockOperator::from_fn(2, words[0].dim(), |c, j| words[c].amplitudes()[j].conj())
}

/// The isometry `W` embedding one qubit into the codespace.
pub fn encode_operator(code: &CodeSpec) -> Result<BlockOperator> {
    let words = codeword_columns(code)?;
    BlockOperator::from_fn(words[0].dim(), 2, |j, c| words[c].amplitudes()[j])
}

fn check_blocks(rho: &ComplexMatrix, block: usize, n_blocks: usize) -> Result<()> {
    let expected = 1usize
        .checked_shl((block * n_blocks) as u32)
        .filter(|_| block * n_blocks < usize::BITS as usize)
        .ok_or_else(|| invalid("register too large"))?;
    if rho.dim() != expected {
        return Err(Error::DimensionMismatch { expected, got: rho.dim() });
    }
    Ok(())
}

/// Recovery `Σ_E Π E ρ E Π` on a single block.
pub fn syndrome_correct(rho_block: &ComplexMatrix, code: &CodeSpec) -> Result<ComplexMatrix> {
    syndrome_correct_blocks(rho_block, code, 1)
}

/// Recovery applied independently to each of `n_blocks` consecutive blocks.
pub fn syndrome_correct_blocks(rho: &ComplexMatrix, code: &CodeSpec, n_blocks: usize) -> Result<ComplexMatrix> {
    let m = code.block_size();
    check_blocks(rho, m, n_blocks)?;
    let ops = recovery_operators(code)?;
    (0..n_blocks).try_fold(rho.clone(), |acc, b| apply_block_map(&acc, &ops, b * m))
}

/// `W†^{⊗N} ρ W^{⊗N}`: the logical `N`-qubit state of codespace-supported `ρ`.
pub fn decode_logical(rho: &ComplexMatrix, code: &CodeSpec, n_blocks: usize) -> Result<ComplexMatrix> {
    let m = code.block_size();
    check_blocks(rho, m, n_blocks)?;
    let op = [decode_operator(code)?];
    (0..n_blocks).rev().try_fold(rho.clone(), |acc, b| apply_block_map(&acc, &op, b * m))
}

/// Recovery followed by decoding, block by block, without ever forming the
/// corrected physical state.
pub fn correct_and_decode(rho: &ComplexMatrix, code: &CodeSpec, n_blocks: usize) -> Result<ComplexMatrix> {
    let m = code.block_size();
    check_blocks(rho, m, n_blocks)?;
    let ops = correct_decode_operators(code)?;
    (0..n_blocks).rev().try_fold(rho.clone(), |acc, b| apply_block_map(&acc, &ops, b * m))
}

/// Encodes an `N`-qubit logical state into `N` blocks.
pub fn encode_state(code: &CodeSpec, logical: &StateVector) -> Result<StateVector> {
    let n_blocks = logical.dim().trailing_zeros() as usize;
    if !logical.dim().is_power_of_two() || n_blocks == 0 {
        return Err(invalid("logical state must live on at least one qubit"));
    }
    let m = code.block_size();
    if n_blocks * m > MAX_DENSE_QUBITS {
        return Err(invalid(format!("{n_blocks} blocks of {m} qubits exceed the dense limit of {MAX_DENSE_QUBITS}")));
    }
    let words = codeword_columns(code)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (n_blocks * m)];
    for (a, &c) in logical.amplitudes().iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let product = (0..n_blocks)
            .map(|b| &words[(a >> (n_blocks - 1 - b)) & 1])
            .fold(None::<StateVector>, |acc, w| Some(acc.map_or_else(|| w.clone(), |s| s.kron(w))))
            .expect("at least one block");
        for (slot, v) in amps.iter_mut().zip(product.amplitudes()) {
            *slot += c * v;
        }
    }
    StateVector::new(amps)
}

/// Every Pauli error pattern on `n` qubits with nonzero probability under the
/// i.i.d. channel `ch`, in lexicographic order (qubit 0 slowest).
pub fn pauli_patterns(n: usize, ch: &PauliChannel) -> Vec<(f64, PauliString)> {
    let letters: Vec<(f64, Letter)> = ch.terms().into_iter().filter(|(p, _)| *p > 0.0).collect();
    let mut out = vec![(1.0, Vec::with_capacity(n))];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|(p, ls): (f64, Vec<Letter>)| {
                letters.iter().map(move |&(pl, l)| {
                    let mut next = ls.clone();
                    next.push(l);
                    (p * pl, next)
                })
            })
            .collect();
    }
    out.into_iter().map(|(p, ls)| (p, PauliString::new(0, &ls))).collect()
}

/// Logical output of encode → i.i.d. `ch` on every qubit → recovery → decode,
/// by explicit enumeration of all error patterns.
pub fn enumerate_logical_channel(
    code: &CodeSpec,
    ch: &PauliChannel,
    rho_logical: &ComplexMatrix,
    exec: Execution,
) -> Result<ComplexMatrix> {
    if rho_logical.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho_logical.dim() });
    }
    let n = code.block_size();
    let encoded = apply_block_map(rho_logical, &[encode_operator(code)?], 0)?;
    let ops = correct_decode_operators(code)?;
    let patterns = pauli_patterns(n, ch);
    let parts =
        exec.map(&patterns, |(p, e)| apply_block_map(&encoded.conjugate_by_pauli(e), &ops, 0).map(|r| r.scale(*p)));
    let mut total = ComplexMatrix::zeros(2);
    for part in parts {
        total.add_scaled(&part?, 1.0);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoErrorEnumeration {
    /// Total probability of the correctable patterns.
    pub correctable_probability: f64,
    /// Total probability of every pattern whose net logical action is trivial,
    /// including heavier patterns that happen to be harmless.
    pub trivial_probability: f64,
    /// Every correctable pattern was verified to be undone exactly.
    pub correctable_all_trivial: bool,
    pub patterns: usize,
}

/// Probability that encode → i.i.d. `ch` → recovery leaves the logical qubit
/// untouched, by enumeration of all error patterns.
pub fn enumerate_no_error_probability(
    code: &CodeSpec,
    ch: &PauliChannel,
    exec: Execution,
) -> Result<NoErrorEnumeration> {
    let words = codeword_columns(code)?;
    let correctable = correctable_errors(code)?;
    let patterns = pauli_patterns(code.block_size(), ch);
    let trivial = |e: &PauliString| -> bool {
        // Logical Kraus operators L_{E'} = W† E' E W; the net map is the
        // identity iff every one of them is a multiple of 1 and their
        // weights sum to one.
        let mut weight = 0.0;
        for ec in &correctable {
            let moved: Vec<StateVector> = words.iter().map(|w| w.apply_pauli(e).apply_pauli(ec)).collect();
            let l = |a: usize, b: usize| words[a].inner(&moved[b]);
            let (l00, l01, l10, l11) = (l(0, 0), l(0, 1), l(1, 0), l(1, 1));
            if l01.norm() > 1e-12 || l10.norm() > 1e-12 || (l00 - l11).norm() > 1e-12 {
                return false;
            }
            weight += l00.norm_sqr();
        }
        (weight - 1.0).abs() < 1e-12
    };
    let flags = exec.map(&patterns, |(_, e)| {
        let is_correctable = correctable.iter().any(|c| c.letters() == e.letters());
        (is_correctable, trivial(e))
    });
    let mut correctable_probability = Vec::new();
    let mut trivial_probability = Vec::new();
    let mut correctable_all_trivial = true;
    for ((p, _), (is_c, is_t)) in patterns.iter().zip(&flags) {
        if *is_c {
            correctable_probability.push(*p);
            correctable_all_trivial &= *is_t;
        }
        if *is_t {
            trivial_probability.push(*p);
        }
    }
    Ok(NoErrorEnumeration {
        correctable_probability: compensated_sum(correctable_probability),
        trivial_probability: compensated_sum(trivial_probability),
        correctable_all_trivial,
        patterns: patterns.len(),
    })
}
