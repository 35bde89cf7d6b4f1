//! Cramér–Rao bounds, interrogation-time optimisation and scaling sweeps.

use serde::{Deserialize, Serialize};

use crate::codes::logical_failure_from_error;
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::numeric::{ln_binomial, log_space};
use crate::qfi::heisenberg_retention_from_error;

/// Seeds on the log-spaced bracket grid.
pub const OPTIMIZER_SEEDS: usize = 200;
/// Relative tolerance on the optimal time.
pub const OPTIMIZER_TOLERANCE: f64 = 1e-8;
/// Interrogation time reported when there is no noise and `F/t` grows forever.
pub const NOISELESS_T_MAX: f64 = 1.0;
/// Fraction of `N²` that still counts as Heisenberg scaling.
pub const RETENTION_THRESHOLD: f64 = 0.99;
/// Closed form vs numeric optimum disagreement that gets flagged.
pub const CLOSED_FORM_TOLERANCE: f64 = 0.10;
/// `γ·t_opt` above which the closed form is outside its short-time regime.
pub const CLOSED_FORM_GAMMA_T_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum EstimationBudget {
    /// `ν` repetitions of a phase measurement.
    Phase { nu: f64 },
    /// Total running time `T = ν t` split into runs of length `t`.
    Frequency { t: f64, total_time: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionBound {
    pub delta_lambda: f64,
    /// `δλ√T`, frequency mode only.
    pub delta_lambda_sqrt_t: Option<f64>,
    pub achieving_state: String,
}

/// `δλ ≥ 1/√(νF)`; in frequency mode `ν = T/t` and `δλ√T = 1/√(F/t)`.
pub fn precision_bound(fisher: f64, budget: EstimationBudget, achieving_state: &str) -> Result<PrecisionBound> {
    if !(fisher > 0.0) || !fisher.is_finite() {
        return Err(invalid(format!("Fisher information must be positive, got {fisher}")));
    }
    match budget {
        EstimationBudget::Phase { nu } => {
            if !(nu >= 1.0) {
                return Err(invalid("need at least one repetition"));
            }
            Ok(PrecisionBound {
                delta_lambda: 1.0 / (nu * fisher).sqrt(),
                delta_lambda_sqrt_t: None,
                achieving_state: achieving_state.to_owned(),
            })
        }
        EstimationBudget::Frequency { t, total_time } => {
            if !(t > 0.0) || !(total_time > 0.0) {
                return Err(invalid("frequency budget needs t > 0 and T > 0"));
            }
            let nu = total_time / t;
            Ok(PrecisionBound {
                delta_lambda: 1.0 / (nu * fisher).sqrt(),
                delta_lambda_sqrt_t: Some(frequency_bound(fisher / t)?),
                achieving_state: achieving_state.to_owned(),
            })
        }
    }
}

/// `δλ√T = (F/t)^{−1/2}`.
pub fn frequency_bound(f_per_t: f64) -> Result<f64> {
    if !(f_per_t > 0.0) {
        return Err(invalid(format!("F/t must be positive, got {f_per_t}")));
    }
    Ok(1.0 / f_per_t.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub t_opt: f64,
    pub value: f64,
    /// The best seed sat on an end of the bracket, so no interior maximum
    /// was found.
    pub at_boundary: bool,
    pub evaluations: usize,
}

/// The default search bracket `[10⁻⁶/γ, 10/γ]`.
pub fn default_bracket(gamma: f64) -> Result<(f64, f64)> {
    if !(gamma > 0.0) {
        return Err(invalid("bracket needs gamma > 0"));
    }
    Ok((1e-6 / gamma, 10.0 / gamma))
}

/// Maximises `objective` over `[t_min, t_max]`.
///
/// The objective is sampled on [`OPTIMIZER_SEEDS`] log-spaced points; the best
/// seed (ties go to the larger `t`) is refined by golden-section search in
/// `ln t` to relative tolerance [`OPTIMIZER_TOLERANCE`]. A best seed at either
/// end of the bracket is returned unrefined and flagged.
pub fn optimize_interrogation_time<F>(objective: F, t_min: f64, t_max: f64, exec: Execution) -> Result<Optimum>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    if !(t_min > 0.0) || !(t_max > t_min) {
        return Err(invalid(format!("invalid bracket [{t_min}, {t_max}]")));
    }
    let grid = log_space(t_min, t_max, OPTIMIZER_SEEDS);
    let values = exec.map(&grid, |&t| objective(t));
    if let Some((t, _)) = grid.iter().zip(&values).find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFiniteObjective { t: *t });
    }
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v >= values[best] {
            best = i;
        }
    }
    let mut evaluations = grid.len();
    if best == 0 || best == grid.len() - 1 {
        return Ok(Optimum { t_opt: grid[best], value: values[best], at_boundary: true, evaluations });
    }

    let f = |u: f64| objective(u.exp());
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid[best - 1].ln(), grid[best + 1].ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    evaluations += 2;
    let (mut best_u, mut best_v) = (grid[best].ln(), values[best]);
    while b - a > OPTIMIZER_TOLERANCE {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        evaluations += 1;
        for (u, v) in [(c, fc), (d, fd)] {
            if !v.is_finite() {
                return Err(Error::NonFiniteObjective { t: u.exp() });
            }
            if v > best_v || (v == best_v && u > best_u) {
                best_u = u;
                best_v = v;
            }
        }
    }
    Ok(Optimum { t_opt: best_u.exp(), value: best_v, at_boundary: false, evaluations })
}

/// `F/t = t (2p_L(t) − 1)^{2N} N²` for `N` blocks of the `m`-qubit repetition
/// code under dephasing of strength `gamma`; `m = 1` is the bare GHZ probe.
pub fn encoded_f_per_t(m: usize, gamma: f64, n: u64, t: f64) -> Result<f64> {
    let e = crate::channels::dephasing_error_probability(gamma, t)?;
    let fail = logical_failure_from_error(e, m)?;
    let nf = n as f64;
    Ok(t * heisenberg_retention_from_error(fail, n) * nf * nf)
}

/// Numeric maximum of [`encoded_f_per_t`] over the default bracket.
pub fn numeric_optimum(m: usize, gamma: f64, n: u64, exec: Execution) -> Result<Optimum> {
    crate::codes::CodeSpec::repetition(m)?;
    check_n(n)?;
    let (lo, hi) = default_bracket(gamma)?;
    optimize_interrogation_time(|t| encoded_f_per_t(m, gamma, n, t).unwrap_or(f64::NAN), lo, hi, exec)
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    Ok(())
}

fn check_closed_form(m: usize, gamma: f64, n: u64) -> Result<()> {
    crate::codes::CodeSpec::repetition(m)?;
    if m < 3 {
        return Err(invalid("closed-form optimum needs m ≥ 3"));
    }
    if !(gamma > 0.0) {
        return Err(invalid("closed-form optimum needs gamma > 0"));
    }
    check_n(n)
}

/// `t_opt = [2 C(m,(m+1)/2) (γ/2)^{(m+1)/2} (3 + Nm)]^{−2/(m+2)}`, evaluated in logs.
pub fn t_opt_closed_form(m: usize, gamma: f64, n: u64) -> Result<f64> {
    check_closed_form(m, gamma, n)?;
    let h = (m as u64).div_ceil(2);
    let nm = n as f64 * m as f64;
    let ln_a = 2f64.ln() + ln_binomial(m as u64, h) + h as f64 * (gamma / 2.0).ln() + (3.0 + nm).ln();
    Ok((-2.0 / (m as f64 + 2.0) * ln_a).exp())
}

/// `(F/t)_opt = N² t_opt ((Nm+2)/(Nm+3))^{2N}`.
pub fn f_per_t_closed_form(m: usize, gamma: f64, n: u64) -> Result<f64> {
    let t = t_opt_closed_form(m, gamma, n)?;
    let nf = n as f64;
    let nm = nf * m as f64;
    Ok(nf * nf * t * (2.0 * nf * (-1.0 / (nm + 3.0)).ln_1p()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StirlingAsymptote {
    /// `N^{−2/m} / (2γ m^{2/m})`.
    pub t_opt: f64,
    /// `N^{2(1−1/m)} / (2γ m^{2/m})`.
    pub f_per_t: f64,
    /// `1/(2γe²)`.
    pub t_limit: f64,
    /// `N²/(2γe²)`.
    pub f_per_t_limit: f64,
}

pub fn stirling_asymptote(m: usize, gamma: f64, n: u64) -> Result<StirlingAsymptote> {
    check_closed_form(m, gamma, n)?;
    let (mf, nf) = (m as f64, n as f64);
    let denom = 2.0 * gamma * mf.powf(2.0 / mf);
    let e2 = std::f64::consts::E.powi(2);
    Ok(StirlingAsymptote {
        t_opt: nf.powf(-2.0 / mf) / denom,
        f_per_t: nf.powf(2.0 * (1.0 - 1.0 / mf)) / denom,
        t_limit: 1.0 / (2.0 * gamma * e2),
        f_per_t_limit: nf * nf / (2.0 * gamma * e2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineBounds {
    /// Best quantum strategy under parallel noise: `√(2γ/N)`.
    pub parallel_quantum: f64,
    /// Classical (or unencoded GHZ) strategy: `√(2γe/N)`.
    pub classical: f64,
    /// Transversal noise: `√((9γ)^{1/3} / (2N^{5/3}))`.
    pub transversal: f64,
    /// Interrogation time of the transversal bound: `(3/(γN))^{1/3}`.
    pub transversal_t_opt: f64,
    /// Unencoded GHZ optimal time `1/(2Nγ)`.
    pub ghz_t_opt: f64,
}

/// Reference `δλ√T` values that do not use error correction.
pub fn baseline_bounds(n: u64, gamma: f64) -> Result<BaselineBounds> {
    check_n(n)?;
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(invalid("gamma must be finite and ≥ 0"));
    }
    let nf = n as f64;
    Ok(BaselineBounds {
        parallel_quantum: (2.0 * gamma / nf).sqrt(),
        classical: (2.0 * gamma * std::f64::consts::E / nf).sqrt(),
        transversal: ((9.0 * gamma).cbrt() / (2.0 * nf.powf(5.0 / 3.0))).sqrt(),
        transversal_t_opt: (3.0 / (gamma * nf)).cbrt(),
        ghz_t_opt: 1.0 / (2.0 * nf * gamma),
    })
}

/// Smallest `N` on a geometric grid up to `n_max` where the numeric optimum
/// of the `m`-encoded probe beats the unencoded GHZ value `N/(2γe)`.
pub fn encoding_crossover(m: usize, gamma: f64, n_max: u64, exec: Execution) -> Result<Option<u64>> {
    let mut grid: Vec<u64> = log_space(1.0, n_max.max(1) as f64, 60).into_iter().map(|x| x.round() as u64).collect();
    grid.dedup();
    let wins = exec.map(&grid, |&n| -> Result<bool> {
        let encoded = numeric_optimum(m, gamma, n, Execution::Sequential)?.value;
        Ok(encoded > n as f64 / (2.0 * gamma * std::f64::consts::E))
    });
    for (n, w) in grid.iter().zip(wins) {
        if w? {
            return Ok(Some(*n));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum MPolicy {
    Fixed { m: usize },
    CeilLog,
}

impl MPolicy {
    pub fn block_size(&self, n: u64) -> usize {
        match *self {
            MPolicy::Fixed { m } => m,
            MPolicy::CeilLog => ceil_log_m(n),
        }
    }
}

/// Smallest odd integer `≥ ln N`, at least 1.
pub fn ceil_log_m(n: u64) -> usize {
    let m = (n.max(1) as f64).ln().ceil().max(1.0) as usize;
    if m.is_multiple_of(2) {
        m + 1
    } else {
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SweepMode {
    /// Optimise the interrogation time at each `(N, m)`.
    Frequency,
    /// Fixed physical retention `p`; the interrogation time is the one that
    /// yields `p` at rate `gamma`.
    Phase { p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_values: Vec<u64>,
    pub m_policy: MPolicy,
    pub gamma: f64,
    pub mode: SweepMode,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(invalid("sweep grid is empty"));
        }
        if self.n_values.contains(&0) {
            return Err(invalid("N must be at least 1"));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(invalid("gamma must be finite and ≥ 0"));
        }
        if let MPolicy::Fixed { m } = self.m_policy {
            crate::codes::CodeSpec::repetition(m)?;
        }
        if let SweepMode::Phase { p } = self.mode {
            if !(p > 0.5 && p <= 1.0) {
                return Err(invalid(format!("phase sweep needs p in (1/2, 1], got {p}")));
            }
            if self.gamma == 0.0 && p < 1.0 {
                return Err(invalid("phase sweep with p < 1 needs gamma > 0"));
            }
        }
        Ok(())
    }
}

/// Row flags.
pub mod flags {
    pub const NOISELESS: &str = "noiseless";
    pub const BOUNDARY: &str = "optimum_at_boundary";
    pub const CLOSED_FORM_DEVIATION: &str = "closed_form_deviation_gt_10pct";
    pub const OUTSIDE_SHORT_TIME: &str = "gamma_t_opt_gt_0.1";
    pub const BELOW_RETENTION: &str = "retention_below_0.99";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u64,
    pub m: usize,
    pub gamma: f64,
    pub t_opt: f64,
    pub f_per_t: f64,
    pub delta_lambda_sqrt_t: f64,
    pub baseline_parallel: f64,
    pub baseline_classical: f64,
    pub baseline_transversal: f64,
    pub heisenberg_retention: f64,
    pub flags: Vec<String>,
    /// Closed-form optimum, when it applies (`m ≥ 3`, `γ > 0`).
    pub t_opt_closed: Option<f64>,
    pub f_per_t_closed: Option<f64>,
    /// Numeric optimum of the exact objective (frequency mode).
    pub t_opt_numeric: Option<f64>,
    pub f_per_t_numeric: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Largest `N` before the first row whose retention drops below
    /// [`RETENTION_THRESHOLD`]; `None` if the first row already fails.
    pub n_max_retention: Option<u64>,
}

fn sweep_row(spec: &SweepSpec, n: u64) -> Result<SweepRow> {
    let m = spec.m_policy.block_size(n);
    let gamma = spec.gamma;
    let nf = n as f64;
    let b = baseline_bounds(n, gamma)?;
    let mut row = SweepRow {
        n,
        m,
        gamma,
        t_opt: 0.0,
        f_per_t: 0.0,
        delta_lambda_sqrt_t: 0.0,
        baseline_parallel: b.parallel_quantum,
        baseline_classical: b.classical,
        baseline_transversal: b.transversal,
        heisenberg_retention: 1.0,
        flags: Vec::new(),
        t_opt_closed: None,
        f_per_t_closed: None,
        t_opt_numeric: None,
        f_per_t_numeric: None,
    };

    match spec.mode {
        _ if gamma == 0.0 => {
            row.t_opt = NOISELESS_T_MAX;
            row.f_per_t = nf * nf / NOISELESS_T_MAX;
            row.flags.push(flags::NOISELESS.into());
        }
        SweepMode::Phase { p } => {
            // Time at which dephasing leaves retention p: 2p − 1 = e^{−γt}.
            let t0 = -(2.0 * p - 1.0).ln() / gamma;
            let fail = logical_failure_from_error(1.0 - p, m)?;
            row.heisenberg_retention = heisenberg_retention_from_error(fail, n);
            row.t_opt = t0;
            row.f_per_t = if t0 > 0.0 { row.heisenberg_retention * nf * nf / t0 } else { f64::INFINITY };
        }
        SweepMode::Frequency => {
            let numeric = numeric_optimum(m, gamma, n, Execution::Sequential)?;
            row.t_opt_numeric = Some(numeric.t_opt);
            row.f_per_t_numeric = Some(numeric.value);
            if numeric.at_boundary {
                row.flags.push(flags::BOUNDARY.into());
            }
            if m >= 3 {
                let t = t_opt_closed_form(m, gamma, n)?;
                let f = f_per_t_closed_form(m, gamma, n)?;
                row.t_opt_closed = Some(t);
                row.f_per_t_closed = Some(f);
                row.t_opt = t;
                row.f_per_t = f;
                let dev_t = (t / numeric.t_opt - 1.0).abs();
                let dev_f = (f / numeric.value - 1.0).abs();
                if dev_t > CLOSED_FORM_TOLERANCE || dev_f > CLOSED_FORM_TOLERANCE {
                    row.flags.push(flags::CLOSED_FORM_DEVIATION.into());
                }
                if gamma * t > CLOSED_FORM_GAMMA_T_LIMIT {
                    row.flags.push(flags::OUTSIDE_SHORT_TIME.into());
                }
            } else {
                row.t_opt = numeric.t_opt;
                row.f_per_t = numeric.value;
            }
            let e = crate::channels::dephasing_error_probability(gamma, row.t_opt)?;
            row.heisenberg_retention = heisenberg_retention_from_error(logical_failure_from_error(e, m)?, n);
        }
    }
    row.delta_lambda_sqrt_t = frequency_bound(row.f_per_t)?;
    if row.heisenberg_retention < RETENTION_THRESHOLD {
        row.flags.push(flags::BELOW_RETENTION.into());
    }
    Ok(row)
}

/// Tabulates optimal times, `F/t`, `δλ√T` and baselines over the grid.
///
/// Rows are computed independently and returned sorted by `N`, then `m`.
pub fn scaling_sweep(spec: &SweepSpec, exec: Execution) -> Result<SweepReport> {
    spec.validate()?;
    let mut grid = spec.n_values.clone();
    grid.sort_unstable();
    grid.dedup();
    let mut rows = exec.map(&grid, |&n| sweep_row(spec, n)).into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|a| (a.n, a.m));
    let mut n_max_retention = None;
    for r in &rows {
        if r.heisenberg_retention < RETENTION_THRESHOLD {
            break;
        }
        n_max_retention = Some(r.n);
    }
    Ok(SweepReport { rows, n_max_retention })
}
