//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed. The
//! process fails if any criterion outside [`KNOWN_UNATTAINABLE`] fails, or if
//! one inside it starts passing (so the list cannot go stale).

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use qecmetro::channels::{apply_pauli_channel, LindbladSpec, PauliChannel};
use qecmetro::codes::{
    concatenated_failure, depolarizing_to_q, enumerate_logical_channel, enumerate_no_error_probability,
    five_qubit_threshold, logical_error_epsilon, CodeSpec,
};
use qecmetro::estimation::{ceil_log_m, optimize_interrogation_time, t_opt_closed_form};
use qecmetro::linalg::{ghz_state, Complex64, ComplexMatrix, Generator};
use qecmetro::pauli::{build_block_mapper, verify_scenario2_mapping, Letter, PauliString, PauliSum};
use qecmetro::qfi::qfi_spectral;
use qecmetro::scenario::{demo_single_error_fidelity, run_scenario, QfiMode, ScenarioKind, ScenarioSpec};
use qecmetro::Execution;

/// Criteria that fail for documented reasons.
///
/// 1: the quoted ε_L = 1.3e−15 at m = 11 is not what the retention formula
/// gives; the exact value is 9.24e−16 (leading term 2·C(11,6)·10⁻¹⁸).
const KNOWN_UNATTAINABLE: &[usize] = &[1];

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Majority-vote retention by direct summation.
fn retention(p: f64, m: usize) -> f64 {
    (0..=(m - 1) / 2).map(|k| binomial(m as u64, k as u64) * p.powi((m - k) as i32) * (1.0 - p).powi(k as i32)).sum()
}

fn pauli_2x2(letter: char) -> ComplexMatrix {
    let (o, z, i) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0));
    let e = match letter {
        'I' => [o, z, z, o],
        'X' => [z, o, o, z],
        'Z' => [o, z, z, -o],
        _ => [z, -i, i, z],
    };
    ComplexMatrix::from_fn(2, |r, c| e[2 * r + c])
}

fn dense_word(word: &str) -> ComplexMatrix {
    word.chars().skip(1).fold(pauli_2x2(word.chars().next().unwrap()), |acc, c| acc.kron(&pauli_2x2(c)))
}

fn z_sum(n: usize) -> Generator {
    let terms = (0..n).map(|q| (0.5, PauliString::single(n, q, Letter::Z))).collect();
    Generator::Pauli(PauliSum::new(n, terms).unwrap())
}

fn scenario(kind: ScenarioKind, code: CodeSpec, noise: LindbladSpec, t: f64) -> ScenarioSpec {
    ScenarioSpec { kind, n_blocks: 2, code, noise, t, theta: 0.1, mode: QfiMode::Phase, trotter_steps: 1 }
}

fn within(elapsed: Duration, limit_s: f64, detail: &mut String) -> bool {
    detail.push_str(&format!("; {:.2}s of {limit_s}s", elapsed.as_secs_f64()));
    elapsed.as_secs_f64() < limit_s
}

fn logical_suppression() -> Outcome {
    let start = Instant::now();
    let p = 1.0 - 1e-3;
    let mut passed = true;
    let mut parts = Vec::new();
    for (m, quoted) in [(3usize, 6e-6), (5, 2e-8), (11, 1.3e-15)] {
        let eps = logical_error_epsilon(p, m).unwrap();
        let ok = rel(eps, quoted) <= 0.10;
        passed &= ok;
        parts.push(format!("m={m} eps_L={eps:.3e} vs {quoted:.1e} ({})", if ok { "ok" } else { "off" }));
    }
    let mut detail = parts.join(", ");
    passed &= within(start.elapsed(), 1.0, &mut detail);
    Outcome { passed, detail }
}

fn dephasing_pipeline() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for m in [1usize, 3] {
        for p in [0.9f64, 0.99] {
            let s = scenario(
                ScenarioKind::IDephasing,
                CodeSpec::RepetitionPhase { m },
                LindbladSpec::dephasing(1.0).unwrap(),
                -(2.0 * p - 1.0).ln(),
            );
            let f = run_scenario(&s, Execution::default()).unwrap().qfi_oracle.unwrap().value;
            let expected = (2.0 * retention(p, m) - 1.0).powi(4) * 4.0;
            worst = worst.max(rel(f, expected));
        }
    }
    let mut detail = format!("max rel error {worst:.2e} (tol 1e-8)");
    let passed = worst <= 1e-8 && within(start.elapsed(), 10.0, &mut detail);
    Outcome { passed, detail }
}

fn depolarizing_qfi() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=3usize {
        for p in [0.8f64, 0.95] {
            let mut rho = ghz_state(n).to_density();
            let ch = PauliChannel::depolarizing(p).unwrap();
            for q in 0..n {
                rho = apply_pauli_channel(&rho, &ch, q).unwrap();
            }
            let spectral = qfi_spectral(&rho, &z_sum(n), 1.0, Execution::default()).unwrap().value;
            let ni = n as i32;
            let closed = p.powi(2 * ni) * (n * n) as f64 / (((1.0 + p) / 2.0).powi(ni) + ((1.0 - p) / 2.0).powi(ni));
            worst = worst.max(rel(spectral, closed));
        }
    }
    let mut detail = format!("max rel error {worst:.2e} (tol 1e-9)");
    let passed = worst <= 1e-9 && within(start.elapsed(), 10.0, &mut detail);
    Outcome { passed, detail }
}

fn channel_identity() -> Outcome {
    let rho = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => Complex64::new(0.7, 0.0),
        (1, 1) => Complex64::new(0.3, 0.0),
        (0, 1) => Complex64::new(0.2, -0.15),
        _ => Complex64::new(0.2, 0.15),
    });
    let mut worst = 0.0f64;
    for m in [3usize, 5] {
        for p in [0.6, 0.9, 0.99] {
            let code = CodeSpec::RepetitionPhase { m };
            let out =
                enumerate_logical_channel(&code, &PauliChannel::dephasing(p).unwrap(), &rho, Execution::default())
                    .unwrap();
            // Logical dephasing damps the coherences by 2p_L − 1.
            let damp = 2.0 * retention(p, m) - 1.0;
            let expected = ComplexMatrix::from_fn(2, |i, j| if i == j { rho.row(i)[j] } else { rho.row(i)[j] * damp });
            worst = worst.max(out.max_abs_diff(&expected));
        }
    }
    Outcome { passed: worst <= 1e-10, detail: format!("2^m patterns, max entry error {worst:.2e} (tol 1e-10)") }
}

fn scenario2_mapping() -> Outcome {
    let start = Instant::now();
    let mut passed = true;
    let mut worst = 0.0f64;
    for m in [1usize, 3, 5] {
        let r = verify_scenario2_mapping(m).unwrap();
        let symbolic_h = r.hamiltonian_image == {
            let mut e = PauliString::on_qubits(m, 1..m, Letter::X);
            e.set_letter(0, Letter::Z);
            e
        };
        passed &= symbolic_h && r.transversal_fixed.iter().all(|(_, ok)| *ok);
        let u = build_block_mapper(m).unwrap().to_dense();
        let ud = u.adjoint();
        let h = format!("Z{}", "I".repeat(m - 1));
        let image = format!("Z{}", "X".repeat(m - 1));
        worst = worst.max(u.matmul(&dense_word(&h)).matmul(&ud).max_abs_diff(&dense_word(&image)));
        for j in 0..m {
            let x: String = (0..m).map(|k| if k == j { 'X' } else { 'I' }).collect();
            worst = worst.max(u.matmul(&dense_word(&x)).matmul(&ud).max_abs_diff(&dense_word(&x)));
        }
    }
    // Entries are 0, ±1, ±i up to rounding in the dense products.
    passed &= worst <= 1e-12;
    let mut detail = format!("symbolic exact, dense max error {worst:.2e}");
    passed &= within(start.elapsed(), 5.0, &mut detail);
    Outcome { passed, detail }
}

fn optimal_time() -> Outcome {
    let start = Instant::now();
    let gamma = 0.01;
    let mut worst = 0.0f64;
    for n in [1u64, 10, 100] {
        let nf = n as f64;
        let obj = move |t: f64| t * (-2.0 * nf * gamma * t).exp() * nf * nf;
        let opt = optimize_interrogation_time(obj, 1e-6 / gamma, 10.0 / gamma, Execution::default()).unwrap();
        worst = worst.max(rel(opt.t_opt, 1.0 / (2.0 * nf * gamma)));
    }
    let n = 1_000_000;
    let t = t_opt_closed_form(ceil_log_m(n), gamma, n).unwrap();
    let limit = 1.0 / (2.0 * gamma * std::f64::consts::E.powi(2));
    let asym = rel(t, limit);
    let mut detail = format!("optimizer max rel error {worst:.2e}; closed t_opt {t:.4} vs {limit:.4} ({asym:.3})");
    let passed = worst <= 1e-6 && asym <= 0.2 && within(start.elapsed(), 5.0, &mut detail);
    Outcome { passed, detail }
}

fn five_qubit_threshold_check() -> Outcome {
    let mut worst = 0.0f64;
    for p in [0.5, 0.8, 0.95, 0.999] {
        let q = depolarizing_to_q(p);
        let e = enumerate_no_error_probability(
            &CodeSpec::FiveQubitGraph,
            &PauliChannel::depolarizing(p).unwrap(),
            Execution::default(),
        )
        .unwrap();
        let formula = q.powi(5) + 5.0 * q.powi(4) * (1.0 - q);
        worst = worst.max((e.correctable_probability - formula).abs());
    }
    let q_star = five_qubit_threshold();
    // Measured C = max (1 − q_L(2)) / (1 − q_L(1))² over a range of physical
    // errors; the weight-2 coefficient bounds it by 10.
    let c = [1e-2, 3e-3, 1e-3, 1e-4]
        .iter()
        .map(|&e| concatenated_failure(e, 2) / concatenated_failure(e, 1).powi(2))
        .fold(0.0, f64::max);
    let passed = worst <= 1e-12 && q_star > 0.5 && q_star < 1.0 && c.is_finite() && c <= 10.0 * (1.0 + 1e-9);
    Outcome { passed, detail: format!("enumeration error {worst:.1e}, q* = {q_star:.6}, C = {c:.3}") }
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn cli(out: &Path, args: &[&str]) -> std::process::ExitStatus {
    Command::new(env!("CARGO_BIN_EXE_qecmetro"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap()
}

const SWEEP_ARGS: &[&str] = &[
    "sweep", "--n-min", "1", "--n-max", "250000", "--points", "24", "--m", "5", "--mode", "phase", "--p", "0.999",
    "--gamma", "1", "--plot",
];

fn scaling_demo(dir: &Path) -> Outcome {
    let status = cli(dir, SWEEP_ARGS);
    if !status.success() {
        return Outcome { passed: false, detail: format!("sweep exited with {status}") };
    }
    let (header, rows) = read_csv(&dir.join("sweep.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let get = |r: &Vec<String>, name: &str| r[col(name)].parse::<f64>().unwrap();
    let ln_n: Vec<f64> = rows.iter().map(|r| get(r, "N").ln()).collect();
    let enc: Vec<f64> = rows.iter().map(|r| get(r, "delta_lambda_sqrtT").ln()).collect();
    let cls: Vec<f64> = rows.iter().map(|r| get(r, "baseline_classical").ln()).collect();
    let min_ret = rows.iter().map(|r| get(r, "heisenberg_retention")).fold(1.0, f64::min);
    let n_max = rows.iter().map(|r| get(r, "N")).fold(0.0, f64::max);
    let (se, sc) = (slope(&ln_n, &enc), slope(&ln_n, &cls));
    let passed = min_ret >= 0.99 && n_max >= 2.5e5 && (se + 1.0).abs() <= 0.02 && (sc + 0.5).abs() <= 1e-9;
    Outcome { passed, detail: format!("min retention {min_ret:.6} to N={n_max}, slope {se:.4} vs classical {sc:.4}") }
}

fn two_qubit_demo() -> Outcome {
    let fidelity_err = (1..=3)
        .flat_map(|n| (0..n).map(move |b| (demo_single_error_fidelity(n, b).unwrap() - 1.0).abs()))
        .fold(0.0, f64::max);
    // Flip probability 0.05 on the first qubit of each block: always correctable.
    let s = scenario(
        ScenarioKind::TwoQubitDemo,
        CodeSpec::TwoQubitDemo,
        LindbladSpec::transversal(1.0).unwrap(),
        -(0.9f64).ln(),
    );
    let f = run_scenario(&s, Execution::default()).unwrap().qfi_oracle.unwrap().value;
    let passed = fidelity_err <= 1e-12 && (f - 4.0).abs() <= 1e-8;
    Outcome { passed, detail: format!("fidelity error {fidelity_err:.1e}, QFI {f:.12} vs 4") }
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism(root: &Path) -> Outcome {
    let (a, b) = (root.join("run_a"), root.join("run_b"));
    for dir in [&a, &b] {
        assert!(cli(dir, &["verify", "--seed", "11"]).success());
        assert!(cli(dir, SWEEP_ARGS).success());
    }
    let (sa, sb) = (snapshot(&a), snapshot(&b));
    let names: Vec<&str> = sa.iter().map(|(n, _)| n.as_str()).collect();
    Outcome { passed: !sa.is_empty() && sa == sb, detail: format!("{} files compared: {}", sa.len(), names.join(" ")) }
}

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let criteria: Vec<Criterion> = vec![
        ("logical suppression numbers", Box::new(logical_suppression)),
        ("dephasing pipeline oracle", Box::new(dephasing_pipeline)),
        ("depolarized GHZ spectral QFI", Box::new(depolarizing_qfi)),
        ("logical dephasing channel identity", Box::new(channel_identity)),
        ("scenario II mapping", Box::new(scenario2_mapping)),
        ("optimal-time recovery", Box::new(optimal_time)),
        ("five-qubit code threshold", Box::new(five_qubit_threshold_check)),
        ("scaling demonstration", Box::new(|| scaling_demo(&tmp.path().join("scaling")))),
        ("two-qubit demo", Box::new(two_qubit_demo)),
        ("determinism", Box::new(|| determinism(tmp.path()))),
    ];

    let mut unexpected = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        let outcome = check();
        let known = KNOWN_UNATTAINABLE.contains(&id);
        println!(
            "{} {id:>2} {name}: {}{}",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail,
            if known && !outcome.passed { " [known unattainable]" } else { "" }
        );
        if outcome.passed == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
