use proptest::prelude::*;
use qecmetro::estimation::{
    baseline_bounds, ceil_log_m, encoded_f_per_t, encoding_crossover, f_per_t_closed_form, flags, numeric_optimum,
    optimize_interrogation_time, precision_bound, scaling_sweep, stirling_asymptote, t_opt_closed_form,
    EstimationBudget, MPolicy, SweepMode, SweepSpec, CLOSED_FORM_TOLERANCE,
};
use qecmetro::numeric::fit_slope;
use qecmetro::Execution;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn precision_examples() {
    let n = 7.0;
    let heis = precision_bound(n * n, EstimationBudget::Phase { nu: 1.0 }, "ghz").unwrap();
    assert!(rel(heis.delta_lambda, 1.0 / n) < 1e-15);
    let sql = precision_bound(n, EstimationBudget::Phase { nu: 1.0 }, "product").unwrap();
    assert!(rel(sql.delta_lambda, 1.0 / n.sqrt()) < 1e-15);
    let freq = precision_bound(12.0, EstimationBudget::Frequency { t: 3.0, total_time: 30.0 }, "ghz").unwrap();
    assert!(rel(freq.delta_lambda_sqrt_t.unwrap(), 0.5) < 1e-15);
}

#[test]
fn optimizer_recovers_unencoded_optimum() {
    for gamma in [0.1, 1.0] {
        for n in [1u64, 10, 100] {
            let nf = n as f64;
            let obj = move |t: f64| t * (-2.0 * nf * gamma * t).exp() * nf * nf;
            let opt = optimize_interrogation_time(obj, 1e-6 / gamma, 10.0 / gamma, Execution::default()).unwrap();
            assert!(rel(opt.t_opt, 1.0 / (2.0 * nf * gamma)) <= 1e-6, "N={n} γ={gamma}");
            assert!(!opt.at_boundary);
            // The library objective at m = 1 is the same function.
            let lib = numeric_optimum(1, gamma, n, Execution::default()).unwrap();
            assert!(rel(lib.t_opt, 1.0 / (2.0 * nf * gamma)) <= 1e-6);
        }
    }
}

#[test]
fn constant_objective_hits_boundary() {
    let opt = optimize_interrogation_time(|_| 1.0, 0.01, 5.0, Execution::Sequential).unwrap();
    assert_eq!(opt.t_opt, 5.0);
    assert!(opt.at_boundary);
}

fn frequency_row(m: usize, gamma: f64, n: u64) -> qecmetro::estimation::SweepRow {
    let spec = SweepSpec { n_values: vec![n], m_policy: MPolicy::Fixed { m }, gamma, mode: SweepMode::Frequency };
    scaling_sweep(&spec, Execution::default()).unwrap().rows.remove(0)
}

#[test]
fn closed_form_vs_numeric_m3() {
    let deviation_flag = flags::CLOSED_FORM_DEVIATION.to_string();

    // γ = 0.01, N = 1000: t_opt agrees within 10%; F/t misses by about half a
    // percent beyond it, so the row carries the deviation flag.
    let numeric = numeric_optimum(3, 0.01, 1000, Execution::default()).unwrap();
    let t = t_opt_closed_form(3, 0.01, 1000).unwrap();
    let f = f_per_t_closed_form(3, 0.01, 1000).unwrap();
    assert!(rel(t, numeric.t_opt) <= CLOSED_FORM_TOLERANCE);
    let dev_f = rel(f, numeric.value);
    assert!(dev_f > 0.09 && dev_f < 0.12, "dev {dev_f}");
    let row = frequency_row(3, 0.01, 1000);
    assert_eq!(row.flags.contains(&deviation_flag), dev_f > CLOSED_FORM_TOLERANCE);
    assert_eq!(row.t_opt_numeric, Some(numeric.t_opt));

    // γ = 1, N = 100: the printed closed form is not covariant under t → t/γ
    // and lands far from the exact optimum; the deviation is reported.
    let numeric = numeric_optimum(3, 1.0, 100, Execution::default()).unwrap();
    let t = t_opt_closed_form(3, 1.0, 100).unwrap();
    assert!(rel(t, numeric.t_opt) > CLOSED_FORM_TOLERANCE);
    let row = frequency_row(3, 1.0, 100);
    assert!(row.flags.contains(&deviation_flag));
}

#[test]
fn numeric_optimum_scales_as_inverse_gamma() {
    let a = numeric_optimum(5, 1.0, 300, Execution::default()).unwrap();
    let b = numeric_optimum(5, 0.01, 300, Execution::default()).unwrap();
    assert!(rel(b.t_opt, 100.0 * a.t_opt) < 1e-6);
    assert!(rel(b.value, 100.0 * a.value) < 1e-6);
}

#[test]
fn asymptote_convergence() {
    let gamma = 0.01;
    let limit = 1.0 / (2.0 * gamma * std::f64::consts::E.powi(2));
    let t = t_opt_closed_form(ceil_log_m(1_000_000), gamma, 1_000_000).unwrap();
    assert!(rel(t, limit) <= 0.2, "t_opt {t} vs {limit}");
    let s = stirling_asymptote(ceil_log_m(1_000_000), gamma, 1_000_000).unwrap();
    assert!(rel(s.t_limit, limit) < 1e-15);
    let f = f_per_t_closed_form(ceil_log_m(1_000_000), gamma, 1_000_000).unwrap();
    assert!(rel(f, s.f_per_t_limit) <= 0.2);
}

#[test]
fn baseline_examples() {
    let b = baseline_bounds(100, 1.0).unwrap();
    assert!((b.parallel_quantum - 0.02f64.sqrt()).abs() < 1e-15);
    let b = baseline_bounds(1000, 1.0).unwrap();
    assert!(rel(b.transversal_t_opt, (3.0f64 / 1000.0).cbrt()) < 1e-14);
}

#[test]
fn crossover_exists() {
    let n0 = encoding_crossover(3, 1.0, 10_000, Execution::default()).unwrap();
    let n0 = n0.expect("encoding must eventually beat the unencoded probe");
    for n in [n0, 10 * n0, 1000 * n0] {
        let encoded = numeric_optimum(3, 1.0, n, Execution::default()).unwrap().value;
        assert!(encoded > n as f64 / (2.0 * std::f64::consts::E), "N={n}");
    }
}

#[test]
fn phase_sweep_retention() {
    let spec = SweepSpec {
        n_values: vec![1, 10, 100, 1_000, 10_000, 100_000, 250_000],
        m_policy: MPolicy::Fixed { m: 5 },
        gamma: 1.0,
        mode: SweepMode::Phase { p: 1.0 - 1e-3 },
    };
    let report = scaling_sweep(&spec, Execution::default()).unwrap();
    assert!(report.rows.iter().all(|r| r.heisenberg_retention >= 0.99));
    assert_eq!(report.n_max_retention, Some(250_000));
    let ln_n: Vec<f64> = report.rows.iter().map(|r| (r.n as f64).ln()).collect();
    let enc: Vec<f64> = report.rows.iter().map(|r| r.delta_lambda_sqrt_t.ln()).collect();
    let cls: Vec<f64> = report.rows.iter().map(|r| r.baseline_classical.ln()).collect();
    assert!((fit_slope(&ln_n, &enc) + 1.0).abs() <= 0.02);
    assert!((fit_slope(&ln_n, &cls) + 0.5).abs() <= 1e-12);
}

#[test]
fn noiseless_sweep_is_heisenberg() {
    let spec =
        SweepSpec { n_values: vec![3, 1, 40, 7], m_policy: MPolicy::CeilLog, gamma: 0.0, mode: SweepMode::Frequency };
    let report = scaling_sweep(&spec, Execution::default()).unwrap();
    let ns: Vec<u64> = report.rows.iter().map(|r| r.n).collect();
    assert_eq!(ns, vec![1, 3, 7, 40]);
    for r in &report.rows {
        assert_eq!(r.delta_lambda_sqrt_t, 1.0 / r.n as f64);
        assert_eq!(r.f_per_t, (r.n * r.n) as f64);
        assert_eq!(r.t_opt, 1.0);
        assert!(r.flags.contains(&flags::NOISELESS.to_string()));
    }
}

#[test]
fn ceil_log_frequency_sweep_time_asymptote() {
    let spec = SweepSpec {
        n_values: vec![100, 10_000, 1_000_000],
        m_policy: MPolicy::CeilLog,
        gamma: 0.01,
        mode: SweepMode::Frequency,
    };
    let report = scaling_sweep(&spec, Execution::default()).unwrap();
    let limit = 1.0 / (2.0 * 0.01 * std::f64::consts::E.powi(2));
    let ms: Vec<usize> = report.rows.iter().map(|r| r.m).collect();
    assert_eq!(ms, vec![5, 11, 15]);
    assert!(rel(report.rows.last().unwrap().t_opt, limit) <= 0.2);
}

#[test]
fn ceil_log_phase_sweep_trends_to_heisenberg() {
    // 4N(2√(1−p))^m ≪ 1 holds increasingly well along the grid at p = 1 − 10⁻³.
    let p: f64 = 1.0 - 1e-3;
    let ns = vec![10, 100, 1_000, 10_000, 100_000, 1_000_000];
    let spec = SweepSpec { n_values: ns, m_policy: MPolicy::CeilLog, gamma: 1.0, mode: SweepMode::Phase { p } };
    let report = scaling_sweep(&spec, Execution::default()).unwrap();
    let t0 = -(2.0 * p - 1.0).ln();
    let ratios: Vec<f64> = report.rows.iter().map(|r| r.f_per_t * t0 / (r.n * r.n) as f64).collect();
    for (r, ratio) in report.rows.iter().zip(&ratios) {
        assert!(rel(*ratio, r.heisenberg_retention) < 1e-12);
        let condition = 4.0 * r.n as f64 * (2.0 * (1.0 - p).sqrt()).powi(r.m as i32);
        assert!(condition < 1.0);
    }
    assert!(ratios.last().unwrap() > &0.99999, "{ratios:?}");
    assert!(ratios[3..].windows(2).all(|w| w[1] >= w[0]), "{ratios:?}");
}

#[test]
fn sweep_is_execution_independent() {
    let spec = SweepSpec {
        n_values: vec![2, 20, 200, 2000],
        m_policy: MPolicy::Fixed { m: 3 },
        gamma: 0.5,
        mode: SweepMode::Frequency,
    };
    let a = scaling_sweep(&spec, Execution::Sequential).unwrap();
    let b = scaling_sweep(&spec, Execution::default()).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #[test]
    fn closed_forms_finite_and_positive(k in 1usize..8, gamma in 1e-4f64..10.0, n in 1u64..10_000_000) {
        let m = 2 * k + 1;
        let t = t_opt_closed_form(m, gamma, n).unwrap();
        let f = f_per_t_closed_form(m, gamma, n).unwrap();
        prop_assert!(t.is_finite() && t > 0.0);
        prop_assert!(f.is_finite() && f > 0.0);
        let s = stirling_asymptote(m, gamma, n).unwrap();
        prop_assert!(s.t_opt.is_finite() && s.t_opt > 0.0 && s.f_per_t > 0.0);
    }

    #[test]
    fn encoded_objective_is_finite(k in 0usize..6, gamma in 1e-3f64..10.0, n in 1u64..1_000_000, t in 1e-6f64..10.0) {
        let v = encoded_f_per_t(2 * k + 1, gamma, n, t).unwrap();
        prop_assert!(v.is_finite() && v >= 0.0);
    }
}
