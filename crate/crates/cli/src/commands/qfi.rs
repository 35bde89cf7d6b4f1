use qecmetro::channels::{apply_pauli_channel, PauliChannel};
use qecmetro::linalg::{ghz_state, Generator};
use qecmetro::pauli::{Letter, PauliString, PauliSum};
use qecmetro::qfi::{qfi_dephased_ghz_phase, qfi_depolarized_ghz, qfi_spectral};
use serde::Serialize;

use super::Context;
use crate::config::{QfiConfig, QfiModel, RunConfig};
use crate::error::Result;
use crate::output::{join_flags, sci, sci_opt, Csv};

/// Largest register for the dense spectral cross-check.
pub const SPECTRAL_MAX_QUBITS: u64 = 8;

pub const SPECTRAL_SKIPPED: &str = "spectral_skipped_beyond_8_qubits";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QfiRow {
    pub model: QfiModel,
    pub n: u64,
    pub p: f64,
    pub qfi_closed: f64,
    pub qfi_spectral: Option<f64>,
    pub discrepancy: Option<f64>,
    pub flags: Vec<String>,
}

pub fn compute(model: QfiModel, n: u64, p: f64, ctx: &Context) -> Result<QfiRow> {
    let (closed, channel) = match model {
        QfiModel::DephasedGhz => (qfi_dephased_ghz_phase(p, n)?.value, PauliChannel::dephasing(p)?),
        QfiModel::DepolarizedGhz => (qfi_depolarized_ghz(p, n)?.value, PauliChannel::depolarizing(p)?),
    };
    let mut row = QfiRow { model, n, p, qfi_closed: closed, qfi_spectral: None, discrepancy: None, flags: Vec::new() };
    if n > SPECTRAL_MAX_QUBITS {
        row.flags.push(SPECTRAL_SKIPPED.into());
        return Ok(row);
    }
    let width = n as usize;
    let mut rho = ghz_state(width).to_density();
    for q in 0..width {
        rho = apply_pauli_channel(&rho, &channel, q)?;
    }
    let h = PauliSum::new(width, (0..width).map(|q| (0.5, PauliString::single(width, q, Letter::Z))).collect())?;
    let spectral = qfi_spectral(&rho, &Generator::Pauli(h), 1.0, ctx.exec)?.value;
    row.qfi_spectral = Some(spectral);
    row.discrepancy = Some((closed - spectral).abs() / spectral.abs().max(f64::EPSILON));
    Ok(row)
}

pub fn run(config: QfiConfig, base: RunConfig, ctx: &mut Context) -> Result<QfiRow> {
    let (model, n, p) = config.resolve()?;
    let row = compute(model, n, p, ctx)?;

    ctx.write_config("qfi", &RunConfig { qfi: Some(config), ..base })?;
    if ctx.format.csv() {
        let mut csv = Csv::new("model,N,p,qfi_closed,qfi_spectral,discrepancy,flags");
        let model_name = match model {
            QfiModel::DephasedGhz => "dephased-ghz",
            QfiModel::DepolarizedGhz => "depolarized-ghz",
        };
        csv.row(&[
            model_name.into(),
            n.to_string(),
            sci(p),
            sci(row.qfi_closed),
            sci_opt(row.qfi_spectral),
            sci_opt(row.discrepancy),
            join_flags(&row.flags),
        ]);
        ctx.out.write("qfi.csv", csv.into_string().as_bytes())?;
    }
    if ctx.format.json() {
        ctx.out.write_json("qfi.json", &row)?;
    }
    println!(
        "qfi closed={} spectral={} discrepancy={}",
        row.qfi_closed,
        row.qfi_spectral.map_or("-".into(), |v| v.to_string()),
        row.discrepancy.map_or("-".into(), |v| format!("{v:.3e}")),
    );
    ctx.announce();
    Ok(row)
}
