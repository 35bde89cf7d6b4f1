//! Phase-tracked Pauli strings and their conjugation by Clifford circuits.
//!
//! A [`PauliString`] is `i^phase · P_0 ⊗ P_1 ⊗ … ⊗ P_{n-1}` with each letter
//! stored as an (x, z) bit pair: `I = (0,0)`, `X = (1,0)`, `Y = (1,1)`,
//! `Z = (0,1)`. Qubit 0 is the leftmost tensor factor and the most significant
//! bit of a computational-basis index.
//!
//! Textual form: an optional sign (`+`, `-`, `+i`, `-i`, default `+`) followed
//! by one letter per qubit, e.g. `+ZXX` or `-iYI`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    /// Power of `i` picked up by the single-qubit product `self · other`.
    fn product_phase(self, other: Letter) -> u8 {
        use Letter::*;
        match (self, other) {
            (X, Y) | (Y, Z) | (Z, X) => 1,
            (Y, X) | (Z, Y) | (X, Z) => 3,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: u8,
    x: Vec<bool>,
    z: Vec<bool>,
}

impl PauliString {
    /// `phase` is the exponent of `i` (taken mod 4).
    pub fn new(phase: u8, letters: &[Letter]) -> Self {
        let (x, z) = letters.iter().map(|l| l.bits()).unzip();
        Self { phase: phase % 4, x, z }
    }

    pub fn identity(width: usize) -> Self {
        Self { phase: 0, x: vec![false; width], z: vec![false; width] }
    }

    /// A single letter on `qubit`, identity elsewhere.
    pub fn single(width: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = Self::identity(width);
        p.set_letter(qubit, letter);
        p
    }

    /// `letter` on every qubit in `qubits`.
    pub fn on_qubits(width: usize, qubits: impl IntoIterator<Item = usize>, letter: Letter) -> Self {
        let mut p = Self::identity(width);
        for q in qubits {
            p.set_letter(q, letter);
        }
        p
    }

    pub fn width(&self) -> usize {
        self.x.len()
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn phase_factor(&self) -> Complex64 {
        match self.phase {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        Letter::from_bits(self.x[qubit], self.z[qubit])
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.width()).map(|q| self.letter(q)).collect()
    }

    pub fn set_letter(&mut self, qubit: usize, letter: Letter) {
        let (x, z) = letter.bits();
        self.x[qubit] = x;
        self.z[qubit] = z;
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).filter(|(x, z)| **x || **z).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.width()).filter(|&q| self.x[q] || self.z[q]).collect()
    }

    /// Hermitian strings carry a real phase (±1).
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// Diagonal in the computational basis (only I and Z letters).
    pub fn is_diagonal(&self) -> bool {
        !self.x.iter().any(|&b| b)
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.weight() == 0
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = (0..self.width().min(other.width()))
            .filter(|&q| (self.x[q] && other.z[q]) != (self.z[q] && other.x[q]))
            .count();
        anti % 2 == 0
    }

    /// Group product `self · other` with the accumulated phase.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.width() != other.width() {
            return Err(Error::WidthMismatch { left: self.width(), right: other.width() });
        }
        let mut phase = self.phase + other.phase;
        let mut out = PauliString::identity(self.width());
        for q in 0..self.width() {
            let (a, b) = (self.letter(q), other.letter(q));
            phase += a.product_phase(b);
            out.x[q] = self.x[q] ^ other.x[q];
            out.z[q] = self.z[q] ^ other.z[q];
        }
        out.phase = phase % 4;
        Ok(out)
    }

    /// Inverse in the Pauli group: letters unchanged, phase conjugated.
    pub fn inverse(&self) -> PauliString {
        let mut p = self.clone();
        p.phase = (4 - self.phase) % 4;
        p
    }

    /// Bit mask of X/Y letters, qubit 0 in the most significant position.
    pub fn x_mask(&self) -> usize {
        mask(&self.x)
    }

    pub fn z_mask(&self) -> usize {
        mask(&self.z)
    }

    fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).filter(|(x, z)| **x && **z).count() as u32
    }

    /// Action on a computational basis state: `P|b⟩ = coeff · |b'⟩`.
    pub fn apply_to_basis(&self, basis: usize) -> (Complex64, usize) {
        // P = i^(phase + #Y) X^x Z^z qubit-wise.
        let exponent = (self.phase as u32 + self.y_count()) % 4;
        let sign_flips = (basis & self.z_mask()).count_ones();
        let total = (exponent + 2 * (sign_flips % 2)) % 4;
        (i_power(total), basis ^ self.x_mask())
    }

    /// Eigenvalue of a diagonal string on basis state `basis`.
    pub fn diagonal_value(&self, basis: usize) -> Complex64 {
        debug_assert!(self.is_diagonal());
        self.apply_to_basis(basis).0
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let dim = 1usize << self.width();
        let mut m = ComplexMatrix::zeros(dim);
        for b in 0..dim {
            let (c, out) = self.apply_to_basis(b);
            m[(out, b)] = c;
        }
        m
    }

    /// The same string placed on qubits `offset..offset + self.width()` of a
    /// wider register.
    pub fn embed(&self, width: usize, offset: usize) -> PauliString {
        let mut p = PauliString::identity(width);
        for q in 0..self.width() {
            p.set_letter(offset + q, self.letter(q));
        }
        p.phase = self.phase;
        p
    }

    pub fn conjugate_by_gate(&self, gate: &CliffordGate) -> PauliString {
        let targets = gate.targets();
        let mut out = self.clone();
        for &q in &targets {
            out.set_letter(q, Letter::I);
        }
        for &q in &targets {
            let factor = match self.letter(q) {
                Letter::I => continue,
                Letter::X => gate.image(self.width(), q, Letter::X),
                Letter::Z => gate.image(self.width(), q, Letter::Z),
                // Y = i·X·Z
                Letter::Y => gate
                    .image(self.width(), q, Letter::X)
                    .multiply(&gate.image(self.width(), q, Letter::Z))
                    .expect("same width")
                    .with_phase_added(1),
            };
            out = out.multiply(&factor).expect("same width");
        }
        out
    }

    /// `C · self · C†` for the circuit `C` (gates applied in order).
    pub fn conjugate_by_circuit(&self, circuit: &CliffordCircuit) -> Result<PauliString> {
        if circuit.width() != self.width() {
            return Err(Error::WidthMismatch { left: self.width(), right: circuit.width() });
        }
        Ok(circuit.gates().iter().fold(self.clone(), |p, g| p.conjugate_by_gate(g)))
    }

    fn with_phase_added(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) % 4;
        self
    }
}

fn mask(bits: &[bool]) -> usize {
    let n = bits.len();
    bits.iter().enumerate().filter(|(_, &b)| b).fold(0usize, |acc, (q, _)| acc | (1 << (n - 1 - q)))
}

fn i_power(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Group product of two strings.
pub fn pauli_multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.multiply(b)
}

/// `c · p · c†`.
pub fn conjugate_by_circuit(p: &PauliString, c: &CliffordCircuit) -> Result<PauliString> {
    p.conjugate_by_circuit(c)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(sign)?;
        for q in 0..self.width() {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else {
            (0, s)
        };
        if rest.is_empty() {
            return Err(Error::Parse(format!("empty Pauli string {s:?}")));
        }
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                other => Err(Error::Parse(format!("unknown Pauli letter {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::new(phase, &letters))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Real linear combination of Pauli strings, e.g. a Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    width: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn new(width: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        for (_, p) in &terms {
            if p.width() != width {
                return Err(Error::WidthMismatch { left: width, right: p.width() });
            }
        }
        Ok(Self { width, terms })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.is_hermitian())
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.is_diagonal())
    }

    pub fn mutually_commuting(&self) -> bool {
        self.terms.iter().enumerate().all(|(i, (_, a))| self.terms[i + 1..].iter().all(|(_, b)| a.commutes_with(b)))
    }

    /// Diagonal entries; only meaningful when [`Self::is_diagonal`].
    pub fn diagonal(&self) -> Vec<f64> {
        let dim = 1usize << self.width;
        (0..dim).map(|b| self.terms.iter().map(|(c, p)| c * p.diagonal_value(b).re).sum()).collect()
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let dim = 1usize << self.width;
        let mut m = ComplexMatrix::zeros(dim);
        for (c, p) in &self.terms {
            for b in 0..dim {
                let (v, out) = p.apply_to_basis(b);
                m[(out, b)] += v * *c;
            }
        }
        m
    }

    pub fn conjugate_by_circuit(&self, circuit: &CliffordCircuit) -> Result<PauliSum> {
        let terms =
            self.terms.iter().map(|(c, p)| Ok((*c, p.conjugate_by_circuit(circuit)?))).collect::<Result<Vec<_>>>()?;
        PauliSum::new(self.width, terms)
    }
}

/// The three Clifford gates used by the block circuits.
///
/// `ControlledX` is defined as `(Had ⊗ Had) · CP · (Had ⊗ Had)†`. This is the
/// Hadamard-conjugated controlled phase, which is symmetric in its two qubits
/// and differs from the textbook CNOT: it maps `Z⊗I ↦ Z⊗X` and fixes `X⊗I`
/// and `I⊗X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CliffordGate {
    Hadamard(usize),
    ControlledPhase(usize, usize),
    ControlledX(usize, usize),
}

impl CliffordGate {
    pub fn targets(&self) -> Vec<usize> {
        match *self {
            CliffordGate::Hadamard(q) => vec![q],
            CliffordGate::ControlledPhase(a, b) | CliffordGate::ControlledX(a, b) => vec![a, b],
        }
    }

    fn name(&self) -> &'static str {
        match self {
            CliffordGate::Hadamard(_) => "H",
            CliffordGate::ControlledPhase(..) => "CP",
            CliffordGate::ControlledX(..) => "CX",
        }
    }

    /// `G · letter_q · G†` for `letter` ∈ {X, Z} on target `q`.
    fn image(&self, width: usize, q: usize, letter: Letter) -> PauliString {
        use Letter::*;
        match (*self, letter) {
            (CliffordGate::Hadamard(_), X) => PauliString::single(width, q, Z),
            (CliffordGate::Hadamard(_), Z) => PauliString::single(width, q, X),
            (CliffordGate::ControlledPhase(a, b), X) => {
                let other = if q == a { b } else { a };
                let mut p = PauliString::single(width, q, X);
                p.set_letter(other, Z);
                p
            }
            (CliffordGate::ControlledPhase(..), Z) => PauliString::single(width, q, Z),
            (CliffordGate::ControlledX(..), X) => PauliString::single(width, q, X),
            (CliffordGate::ControlledX(a, b), Z) => {
                let other = if q == a { b } else { a };
                let mut p = PauliString::single(width, q, Z);
                p.set_letter(other, X);
                p
            }
            _ => unreachable!("images are only requested for X and Z"),
        }
    }

    /// Dense unitary on `width` qubits, built from `Had` and `CP = diag(1,1,1,-1)`.
    pub fn to_dense(&self, width: usize) -> ComplexMatrix {
        match *self {
            CliffordGate::Hadamard(q) => embed_operator(&hadamard(), &[q], width),
            CliffordGate::ControlledPhase(a, b) => embed_operator(&controlled_phase(), &[a, b], width),
            CliffordGate::ControlledX(a, b) => embed_operator(&controlled_x(), &[a, b], width),
        }
    }
}

pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, &[h, h, h, -h])
}

pub fn controlled_phase() -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(4);
    m[(3, 3)] = Complex64::new(-1.0, 0.0);
    m
}

/// `(Had ⊗ Had) · CP · (Had ⊗ Had)†`.
pub fn controlled_x() -> ComplexMatrix {
    let hh = hadamard().kron(&hadamard());
    hh.matmul(&controlled_phase()).matmul(&hh.adjoint())
}

/// Places a `2^k × 2^k` operator on the listed qubits of a `width`-qubit register.
pub fn embed_operator(op: &ComplexMatrix, qubits: &[usize], width: usize) -> ComplexMatrix {
    let k = qubits.len();
    assert_eq!(op.dim(), 1 << k);
    let dim = 1usize << width;
    let bit = |q: usize| 1usize << (width - 1 - q);
    let local = |b: usize| qubits.iter().fold(0usize, |acc, &q| (acc << 1) | usize::from(b & bit(q) != 0));
    let clear: usize = qubits.iter().fold(0, |acc, &q| acc | bit(q));
    let scatter = |rest: usize, l: usize| {
        qubits.iter().enumerate().fold(
            rest,
            |acc, (i, &q)| {
                if l & (1 << (k - 1 - i)) != 0 {
                    acc | bit(q)
                } else {
                    acc
                }
            },
        )
    };
    let mut out = ComplexMatrix::zeros(dim);
    for col in 0..dim {
        let lc = local(col);
        let rest = col & !clear;
        for lr in 0..(1 << k) {
            let v = op[(lr, lc)];
            if v != Complex64::new(0.0, 0.0) {
                out[(scatter(rest, lr), col)] = v;
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    width: usize,
    gates: Vec<CliffordGate>,
}

impl CliffordCircuit {
    pub fn new(width: usize) -> Self {
        Self { width, gates: Vec::new() }
    }

    pub fn from_gates(width: usize, gates: impl IntoIterator<Item = CliffordGate>) -> Result<Self> {
        let mut c = Self::new(width);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: CliffordGate) -> Result<()> {
        let targets = gate.targets();
        if let Some(&q) = targets.iter().find(|&&q| q >= self.width) {
            return Err(invalid(format!("gate target {q} out of range for width {}", self.width)));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(invalid(format!("two-qubit gate needs distinct targets, got {} twice", targets[0])));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[CliffordGate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Every gate here is self-inverse, so the inverse is the reversed circuit.
    pub fn inverse(&self) -> CliffordCircuit {
        CliffordCircuit { width: self.width, gates: self.gates.iter().rev().copied().collect() }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &CliffordCircuit) -> Result<CliffordCircuit> {
        if self.width != other.width {
            return Err(Error::WidthMismatch { left: self.width, right: other.width });
        }
        let mut c = self.clone();
        c.gates.extend_from_slice(&other.gates);
        Ok(c)
    }

    /// Places this circuit on qubits `offset..offset + width` of a wider register.
    pub fn embed(&self, width: usize, offset: usize) -> Result<CliffordCircuit> {
        let shift = |g: CliffordGate| match g {
            CliffordGate::Hadamard(q) => CliffordGate::Hadamard(q + offset),
            CliffordGate::ControlledPhase(a, b) => CliffordGate::ControlledPhase(a + offset, b + offset),
            CliffordGate::ControlledX(a, b) => CliffordGate::ControlledX(a + offset, b + offset),
        };
        CliffordCircuit::from_gates(width, self.gates.iter().copied().map(shift))
    }

    /// Dense unitary `G_k ⋯ G_1`.
    pub fn to_dense(&self) -> ComplexMatrix {
        self.gates.iter().fold(ComplexMatrix::identity(1 << self.width), |u, g| g.to_dense(self.width).matmul(&u))
    }

    /// Parses newline-separated gate lines such as `CX 1 2` (1-based qubits).
    /// Blank lines and `#` comments are ignored.
    pub fn parse(width: usize, text: &str) -> Result<CliffordCircuit> {
        let mut c = CliffordCircuit::new(width);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let qubit = |s: &str| -> Result<usize> {
                let v: usize =
                    s.parse().map_err(|_| Error::Parse(format!("line {}: bad qubit index {s:?}", lineno + 1)))?;
                v.checked_sub(1).ok_or_else(|| Error::Parse(format!("line {}: qubits are 1-based", lineno + 1)))
            };
            let gate = match fields.as_slice() {
                ["H", q] => CliffordGate::Hadamard(qubit(q)?),
                ["CP", a, b] => CliffordGate::ControlledPhase(qubit(a)?, qubit(b)?),
                ["CX", a, b] => CliffordGate::ControlledX(qubit(a)?, qubit(b)?),
                _ => return Err(Error::Parse(format!("line {}: unrecognised gate {line:?}", lineno + 1))),
            };
            c.push(gate)?;
        }
        Ok(c)
    }
}

impl fmt::Display for CliffordCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            let t: Vec<String> = g.targets().iter().map(|q| (q + 1).to_string()).collect();
            writeln!(f, "{} {}", g.name(), t.join(" "))?;
        }
        Ok(())
    }
}

/// The block circuit `V = ∏_{j=2}^{m} CX^{(1,j)}`: `m - 1` controlled-X gates
/// from the first qubit to every ancilla. Empty for `m = 1`.
pub fn build_block_mapper(m: usize) -> Result<CliffordCircuit> {
    if m < 1 {
        return Err(invalid("block size must be at least 1"));
    }
    CliffordCircuit::from_gates(m, (1..m).map(|j| CliffordGate::ControlledX(0, j)))
}

/// Outcome of checking the two block-mapper conjugation identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingReport {
    pub m: usize,
    /// `V (Z ⊗ I^{m-1}) V†` as computed symbolically.
    pub hamiltonian_image: PauliString,
    pub expected_hamiltonian: PauliString,
    pub hamiltonian_ok: bool,
    /// `(j, V X_j V† == X_j)` for every qubit `j` (0-based).
    pub transversal_fixed: Vec<(usize, bool)>,
    /// Max-entry error of the dense-matrix cross-check, when it was run.
    pub dense_max_error: Option<f64>,
}

impl MappingReport {
    pub fn passed(&self) -> bool {
        self.hamiltonian_ok
            && self.transversal_fixed.iter().all(|(_, ok)| *ok)
            && self.dense_max_error.is_none_or(|e| e <= DENSE_TOLERANCE)
    }
}

const DENSE_TOLERANCE: f64 = 1e-12;
const DENSE_CHECK_MAX_WIDTH: usize = 6;

/// Checks `V H V† = Z ⊗ X^{⊗m-1}` (phase included) and `V X_j V† = X_j` for
/// every `j`, symbolically and, for `m ≤ 6`, against dense matrices.
pub fn verify_scenario2_mapping(m: usize) -> Result<MappingReport> {
    let v = build_block_mapper(m)?;
    let h = PauliString::single(m, 0, Letter::Z);
    let image = h.conjugate_by_circuit(&v)?;
    let mut expected = PauliString::on_qubits(m, 1..m, Letter::X);
    expected.set_letter(0, Letter::Z);
    let transversal_fixed: Vec<(usize, bool)> = (0..m)
        .map(|j| {
            let x = PauliString::single(m, j, Letter::X);
            (j, x.conjugate_by_circuit(&v).map(|y| y == x).unwrap_or(false))
        })
        .collect();

    let dense_max_error = (m <= DENSE_CHECK_MAX_WIDTH).then(|| {
        let u = v.to_dense();
        let ud = u.adjoint();
        let mut err = u.matmul(&h.to_dense()).matmul(&ud).max_abs_diff(&expected.to_dense());
        for j in 0..m {
            let x = PauliString::single(m, j, Letter::X).to_dense();
            err = err.max(u.matmul(&x).matmul(&ud).max_abs_diff(&x));
        }
        err
    });

    Ok(MappingReport {
        m,
        hamiltonian_ok: image == expected,
        hamiltonian_image: image,
        expected_hamiltonian: expected,
        transversal_fixed,
        dense_max_error,
    })
}
