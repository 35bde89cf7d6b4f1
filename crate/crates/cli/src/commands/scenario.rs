use qecmetro::qfi::QfiResult;
use qecmetro::scenario::{run_scenario, ScenarioResult, ScenarioSpec};
use serde::Serialize;

use super::Context;
use crate::config::{RunConfig, ScenarioConfig};
use crate::error::Result;
use crate::output::{join_flags, sci, sci_opt, Csv};

/// The serializable part of a [`ScenarioResult`]; density matrices are left out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub spec: ScenarioSpec,
    pub n_qubits: usize,
    pub qfi_closed: Option<QfiResult>,
    pub qfi_oracle: Option<QfiResult>,
    pub qfi_uncorrected: Option<QfiResult>,
    pub discrepancy: Option<f64>,
    pub p_logical: Option<f64>,
    pub short_time_warning: bool,
    pub short_time_limit: Option<f64>,
    pub mapping_discrepancy: Option<f64>,
    pub flags: Vec<String>,
}

impl From<ScenarioResult> for ScenarioSummary {
    fn from(r: ScenarioResult) -> Self {
        Self {
            n_qubits: r.spec.n_qubits(),
            spec: r.spec,
            qfi_closed: r.qfi_closed,
            qfi_oracle: r.qfi_oracle,
            qfi_uncorrected: r.qfi_uncorrected,
            discrepancy: r.discrepancy,
            p_logical: r.p_logical,
            short_time_warning: r.short_time_warning,
            short_time_limit: r.short_time_limit,
            mapping_discrepancy: r.mapping_discrepancy,
            flags: r.flags,
        }
    }
}

pub const HEADER: &str = "kind,n_blocks,code,gamma,t,theta,mode,trotter_steps,qfi_closed,qfi_oracle,qfi_uncorrected,discrepancy,p_logical,short_time_warning,mapping_discrepancy,flags";

fn name<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_value(value)?.as_str().unwrap_or_default().to_string())
}

pub fn run(config: ScenarioConfig, base: RunConfig, ctx: &mut Context) -> Result<ScenarioSummary> {
    let spec = config.resolve()?;
    let summary = ScenarioSummary::from(run_scenario(&spec, ctx.exec)?);
    ctx.write_config("scenario", &RunConfig { scenario: Some(config), ..base })?;
    if ctx.format.csv() {
        let s = &summary.spec;
        let mut csv = Csv::new(HEADER);
        csv.row(&[
            name(&s.kind)?,
            s.n_blocks.to_string(),
            s.code.to_string().replace(',', ";"),
            sci(s.noise.gamma),
            sci(s.t),
            sci(s.theta),
            name(&s.mode)?,
            s.trotter_steps.to_string(),
            sci_opt(summary.qfi_closed.map(|q| q.value)),
            sci_opt(summary.qfi_oracle.map(|q| q.value)),
            sci_opt(summary.qfi_uncorrected.map(|q| q.value)),
            sci_opt(summary.discrepancy),
            sci_opt(summary.p_logical),
            summary.short_time_warning.to_string(),
            sci_opt(summary.mapping_discrepancy),
            join_flags(&summary.flags),
        ]);
        ctx.out.write("scenario.csv", csv.into_string().as_bytes())?;
    }
    if ctx.format.json() {
        ctx.out.write_json("scenario.json", &summary)?;
    }
    let show = |q: Option<QfiResult>| q.map_or("-".to_string(), |q| q.value.to_string());
    println!(
        "scenario qfi_closed={} qfi_oracle={} discrepancy={}",
        show(summary.qfi_closed),
        show(summary.qfi_oracle),
        summary.discrepancy.map_or("-".into(), |d| format!("{d:.3e}"))
    );
    if summary.short_time_warning {
        eprintln!("warning: outside the short-time regime (gamma^2 t^2 N > 0.01)");
    }
    ctx.announce();
    Ok(summary)
}
