//! Dense complex linear algebra at small dimension.
//!
//! Matrices are row-major `dim × dim` arrays of [`Complex64`]. Basis index `b`
//! of an `n`-qubit register encodes qubit `q` in bit `n - 1 - q`.

use std::ops::{Index, IndexMut};

pub use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance on `‖M − M†‖_max` accepted by [`hermitian_eig`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
/// Eigenvalues in `[-EIGENVALUE_CLIP, 0)` are treated as zero probabilities.
pub const EIGENVALUE_CLIP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self { dim, data }
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self { dim, data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits, if the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        self.dim.is_power_of_two().then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// `self += s · other`.
    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Checks Hermiticity (1e-12), unit trace (1e-10) and eigenvalues ≥ −1e-10.
    pub fn validate_density(&self) -> Result<()> {
        let dev = self.hermitian_deviation();
        if dev > 1e-12 {
            return Err(Error::NotHermitian(dev));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > 1e-10 {
            return Err(Error::InvalidInput(format!("trace {tr} is not 1")));
        }
        let spec = hermitian_eig(self)?;
        if let Some(&lo) = spec.eigenvalues.first() {
            if lo < -EIGENVALUE_CLIP {
                return Err(Error::NegativeEigenvalue(lo));
            }
        }
        Ok(())
    }

    /// `P · self · P†` for a Pauli string, in O(dim²).
    pub fn conjugate_by_pauli(&self, p: &PauliString) -> Self {
        let n = self.dim;
        let coeffs: Vec<(Complex64, usize)> = (0..n).map(|b| p.apply_to_basis(b)).collect();
        let mut out = Self::zeros(n);
        for (b, &(cb, ob)) in coeffs.iter().enumerate() {
            for (c, &(cc, oc)) in coeffs.iter().enumerate() {
                out.data[ob * n + oc] = cb * self.data[b * n + c] * cc.conj();
            }
        }
        out
    }

    /// `P · self`.
    pub fn pauli_left(&self, p: &PauliString) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for b in 0..n {
            let (cb, ob) = p.apply_to_basis(b);
            for c in 0..n {
                out.data[ob * n + c] = cb * self.data[b * n + c];
            }
        }
        out
    }

    /// `self · P`.
    pub fn pauli_right(&self, p: &PauliString) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for b in 0..n {
            // (ρP)_{a,b} = Σ_c ρ_{a,c} P_{c,b}; P|b⟩ = cb|ob⟩ so P_{ob,b} = cb.
            let (cb, ob) = p.apply_to_basis(b);
            for a in 0..n {
                out.data[a * n + b] = self.data[a * n + ob] * cb;
            }
        }
        out
    }

    /// `O · self · O†` with `O` acting on the contiguous qubits
    /// `first..first + k` of an `n`-qubit register (`O` is `2^k × 2^k`).
    pub fn conjugate_local(&self, op: &ComplexMatrix, first: usize) -> Self {
        let n = self.n_qubits().expect("qubit register");
        let k = op.n_qubits().expect("qubit operator");
        assert!(first + k <= n);
        let low_bits = n - first - k;
        let block = 1usize << k;
        let idx = |outer: usize, local: usize| {
            let hi = outer >> low_bits;
            let lo = outer & ((1 << low_bits) - 1);
            (hi << (k + low_bits)) | (local << low_bits) | lo
        };
        let outers = self.dim >> k;
        let dim = self.dim;
        let op_adj = op.adjoint();

        // Left multiply: columns of self.
        let mut left = Self::zeros(dim);
        let mut buf = vec![ZERO; block];
        for col in 0..dim {
            for outer in 0..outers {
                for (l, slot) in buf.iter_mut().enumerate() {
                    *slot = self.data[idx(outer, l) * dim + col];
                }
                for r in 0..block {
                    let v: Complex64 = (0..block).map(|l| op[(r, l)] * buf[l]).sum();
                    left.data[idx(outer, r) * dim + col] = v;
                }
            }
        }
        // Right multiply by O†: rows of left.
        let mut out = Self::zeros(dim);
        for row in 0..dim {
            for outer in 0..outers {
                for (l, slot) in buf.iter_mut().enumerate() {
                    *slot = left.data[row * dim + idx(outer, l)];
                }
                for c in 0..block {
                    let v: Complex64 = (0..block).map(|l| buf[l] * op_adj[(l, c)]).sum();
                    out.data[row * dim + idx(outer, c)] = v;
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Normalises `amps`; rejects the zero vector.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput("state vector has zero norm".into()));
        }
        Ok(Self { amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = ONE;
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        StateVector { amps }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `α|self⟩ + β|other⟩`, renormalised.
    pub fn superpose(&self, alpha: Complex64, other: &StateVector, beta: Complex64) -> Result<StateVector> {
        StateVector::new(self.amps.iter().zip(&other.amps).map(|(a, b)| alpha * a + beta * b).collect())
    }

    pub fn apply_pauli(&self, p: &PauliString) -> StateVector {
        let mut amps = vec![ZERO; self.dim()];
        for (b, a) in self.amps.iter().enumerate() {
            let (c, ob) = p.apply_to_basis(b);
            amps[ob] = c * a;
        }
        StateVector { amps }
    }

    pub fn apply(&self, u: &ComplexMatrix) -> StateVector {
        let n = self.dim();
        let amps = (0..n).map(|i| u.row(i).iter().zip(&self.amps).map(|(a, b)| a * b).sum()).collect();
        StateVector { amps }
    }

    /// Expectation `⟨ψ|M|ψ⟩`.
    pub fn expectation(&self, m: &ComplexMatrix) -> Complex64 {
        self.inner(&self.apply(m))
    }

    pub fn to_density(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, |i, j| self.amps[i] * self.amps[j].conj())
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with(&self, rho: &ComplexMatrix) -> f64 {
        self.expectation(rho).re
    }
}

/// GHZ state `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
pub fn ghz_state(n: usize) -> StateVector {
    let dim = 1usize << n;
    let mut amps = vec![ZERO; dim];
    amps[0] = ONE;
    amps[dim - 1] += ONE;
    StateVector::new(amps).expect("nonzero")
}

/// Product state `|+⟩^{⊗n}`.
pub fn plus_product_state(n: usize) -> StateVector {
    StateVector::new(vec![ONE; 1 << n]).expect("nonzero")
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianSpectrum {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj()).sum())
    }

    /// Eigenvalues as probabilities: values in `[-1e-10, 0)` clip to zero,
    /// anything lower is an error.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        self.eigenvalues
            .iter()
            .map(|&x| {
                if x >= 0.0 {
                    Ok(x)
                } else if x >= -EIGENVALUE_CLIP {
                    Ok(0.0)
                } else {
                    Err(Error::NegativeEigenvalue(x))
                }
            })
            .collect()
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation zeroes one off-diagonal pair with the unitary
/// `[[c, s·e^{iα}], [−s·e^{−iα}, c]]`, where `α` is the phase of the pivot.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianSpectrum> {
    let n = m.dim();
    let scale = m.max_abs().max(1.0);
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOLERANCE * scale {
        return Err(Error::NotHermitian(dev));
    }
    // Symmetrise so rounding in the input cannot bias the rotations.
    let mut a = ComplexMatrix::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    let mut v = ComplexMatrix::identity(n);

    let frob = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = (4.0 * f64::EPSILON * frob).max(f64::MIN_POSITIVE);
    let off_norm = |a: &ComplexMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[(i, j)].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Pivots at rounding level are dropped rather than rotated.
                let negligible = target * 1e-2 / (n as f64) + f64::EPSILON * 1e-2 * (app.abs() + aqq.abs());
                if mag <= negligible {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t =
                    if tau.abs() > 1e150 { 0.5 / tau } else { tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let vpq = phase * s;
                let vqp = -phase.conj() * s;
                rotate(&mut a, &mut v, p, q, c, vpq, vqp);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(HermitianSpectrum { eigenvalues, eigenvectors })
}

/// `A ← J† A J`, `V ← V J` with `J_pp = J_qq = c`, `J_pq = vpq`, `J_qp = vqp`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, c: f64, vpq: Complex64, vqp: Complex64) {
    let n = a.dim;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * vqp;
        a[(k, q)] = akp * vpq + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * vqp.conj();
        a[(q, k)] = apk * vpq.conj() + aqk * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * vqp;
        v[(k, q)] = vkp * vpq + vkq * c;
    }
}

/// Generator of a unitary evolution `e^{−iθH}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Pauli(PauliSum),
    Dense(ComplexMatrix),
}

impl Generator {
    pub fn dim(&self) -> usize {
        match self {
            Generator::Pauli(s) => 1 << s.width(),
            Generator::Dense(m) => m.dim(),
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        match self {
            Generator::Pauli(s) => s.to_dense(),
            Generator::Dense(m) => m.clone(),
        }
    }

    /// `H · M` without densifying Pauli generators.
    pub fn apply_left(&self, m: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Generator::Dense(h) => h.matmul(m),
            Generator::Pauli(sum) => {
                let mut out = ComplexMatrix::zeros(m.dim());
                for (c, p) in sum.terms() {
                    out.add_scaled(&m.pauli_left(p), *c);
                }
                out
            }
        }
    }
}

impl From<PauliSum> for Generator {
    fn from(s: PauliSum) -> Self {
        Generator::Pauli(s)
    }
}

impl From<ComplexMatrix> for Generator {
    fn from(m: ComplexMatrix) -> Self {
        Generator::Dense(m)
    }
}

/// `e^{−iθH} ρ e^{+iθH}`.
///
/// Diagonal Pauli generators apply phases entrywise, mutually commuting Pauli
/// terms apply one rotation each, and everything else goes through the
/// spectral decomposition of the dense generator.
pub fn evolve_unitary(rho: &ComplexMatrix, h: &Generator, theta: f64) -> Result<ComplexMatrix> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: h.dim() });
    }
    if theta == 0.0 {
        return Ok(rho.clone());
    }
    match h {
        Generator::Pauli(sum) if !sum.is_hermitian() => {
            Err(Error::InvalidInput("generator has a non-Hermitian Pauli term".into()))
        }
        Generator::Pauli(sum) if sum.is_diagonal() => {
            let diag = sum.diagonal();
            Ok(ComplexMatrix::from_fn(rho.dim(), |i, j| {
                rho[(i, j)] * Complex64::from_polar(1.0, -theta * (diag[i] - diag[j]))
            }))
        }
        Generator::Pauli(sum) if sum.mutually_commuting() => {
            let mut out = rho.clone();
            for (c, p) in sum.terms() {
                out = pauli_rotation(&out, p, theta * c);
            }
            Ok(out)
        }
        _ => {
            let u = unitary_from_generator(&h.to_dense(), theta)?;
            Ok(u.matmul(rho).matmul(&u.adjoint()))
        }
    }
}

/// `U ρ U†` with `U = e^{−iφP} = cos φ − i sin φ P` for a Hermitian Pauli string.
fn pauli_rotation(rho: &ComplexMatrix, p: &PauliString, phi: f64) -> ComplexMatrix {
    let (s, c) = phi.sin_cos();
    let prp = rho.conjugate_by_pauli(p);
    let pr = rho.pauli_left(p);
    let rp = rho.pauli_right(p);
    let mi = Complex64::new(0.0, -c * s);
    ComplexMatrix::from_fn(rho.dim(), |i, j| {
        rho[(i, j)] * (c * c) + prp[(i, j)] * (s * s) + (pr[(i, j)] - rp[(i, j)]) * mi
    })
}

/// `e^{−iθH}` from the spectral decomposition of `H`.
pub fn unitary_from_generator(h: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(h)?;
    let v = &spec.eigenvectors;
    let n = h.dim();
    let phases: Vec<Complex64> = spec.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -theta * l)).collect();
    Ok(ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Letter;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_spectrum() {
        let m = ComplexMatrix::from_diagonal(&[0.75, 0.25]);
        let s = hermitian_eig(&m).unwrap();
        assert_eq!(s.eigenvalues, vec![0.25, 0.75]);
        assert!((s.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((s.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = PauliString::single(1, 0, Letter::X).to_dense();
        let s = hermitian_eig(&x).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let minus = StateVector::new(vec![c(h, 0.0), c(-h, 0.0)]).unwrap();
        let plus = StateVector::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let col = |k: usize| StateVector::new(vec![s.eigenvectors[(0, k)], s.eigenvectors[(1, k)]]).unwrap();
        assert!((minus.inner(&col(0)).norm() - 1.0).abs() < 1e-14);
        assert!((plus.inner(&col(1)).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let m = ComplexMatrix::from_fn(6, |i, j| {
            let base = c((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.3);
            let mirror = c((j + 2 * i) as f64 * 0.1, (j as f64 - i as f64) * 0.3).conj();
            base + mirror
        });
        let s = hermitian_eig(&m).unwrap();
        assert!(s.reconstruct().max_abs_diff(&m) < 1e-10);
        let v = &s.eigenvectors;
        assert!(v.adjoint().matmul(v).max_abs_diff(&ComplexMatrix::identity(6)) < 1e-10);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn half_period_rotation() {
        let plus = plus_product_state(1).to_density();
        let h = PauliSum::new(1, vec![(0.5, PauliString::single(1, 0, Letter::Z))]).unwrap();
        let out = evolve_unitary(&plus, &h.into(), std::f64::consts::PI).unwrap();
        let minus = ComplexMatrix::from_real(2, &[0.5, -0.5, -0.5, 0.5]);
        assert!(out.max_abs_diff(&minus) < 1e-15);
        assert_eq!(evolve_unitary(&plus, &Generator::Dense(ComplexMatrix::identity(2)), 0.0).unwrap(), plus);
    }

    #[test]
    fn dimension_mismatch() {
        let rho = ComplexMatrix::identity(4).scale(0.25);
        let h = PauliSum::new(1, vec![(1.0, PauliString::single(1, 0, Letter::Z))]).unwrap();
        assert!(matches!(evolve_unitary(&rho, &h.into(), 0.3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn commuting_and_dense_paths_agree() {
        let psi = StateVector::new((0..8).map(|k| c(1.0 + k as f64, 0.5 * k as f64)).collect()).unwrap();
        let rho = psi.to_density();
        let sum = PauliSum::new(
            3,
            vec![(0.7, "ZXX".parse().unwrap()), (-0.3, "IXX".parse().unwrap()), (0.2, "IZZ".parse().unwrap())],
        )
        .unwrap();
        assert!(sum.mutually_commuting());
        let a = evolve_unitary(&rho, &Generator::Pauli(sum.clone()), 0.9).unwrap();
        let b = evolve_unitary(&rho, &Generator::Dense(sum.to_dense()), 0.9).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn local_conjugation_matches_embedding() {
        let psi = StateVector::new((0..16).map(|k| c((k as f64).sin(), (k as f64).cos())).collect()).unwrap();
        let rho = psi.to_density();
        let had = crate::pauli::hadamard();
        let op = had.kron(&PauliString::single(1, 0, Letter::Y).to_dense());
        let full = crate::pauli::embed_operator(&op, &[1, 2], 4);
        let expected = full.matmul(&rho).matmul(&full.adjoint());
        assert!(rho.conjugate_local(&op, 1).max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn pauli_products_match_dense() {
        let psi = StateVector::new((0..8).map(|k| c(k as f64, 1.0 - k as f64)).collect()).unwrap();
        let rho = psi.to_density();
        let p: PauliString = "-iYZX".parse().unwrap();
        let d = p.to_dense();
        assert!(rho.pauli_left(&p).max_abs_diff(&d.matmul(&rho)) < 1e-14);
        assert!(rho.pauli_right(&p).max_abs_diff(&rho.matmul(&d)) < 1e-14);
        assert!(rho.conjugate_by_pauli(&p).max_abs_diff(&d.matmul(&rho).matmul(&d.adjoint())) < 1e-14);
    }
}
