use qecmetro::estimation::{scaling_sweep, SweepReport, SweepSpec};
use serde::Serialize;

use super::Context;
use crate::config::{RunConfig, SweepConfig};
use crate::error::Result;
use crate::output::{join_flags, sci, Csv};
use crate::plot::sweep_svg;

pub const HEADER: &str = "N,m,gamma,t_opt,f_per_t,delta_lambda_sqrtT,baseline_parallel,baseline_classical,baseline_transversal,heisenberg_retention,flags";

#[derive(Debug, Serialize)]
struct SweepJson<'a> {
    spec: &'a SweepSpec,
    #[serde(flatten)]
    report: &'a SweepReport,
}

pub fn to_csv(report: &SweepReport) -> String {
    let mut csv = Csv::new(HEADER);
    for r in &report.rows {
        csv.row(&[
            r.n.to_string(),
            r.m.to_string(),
            sci(r.gamma),
            sci(r.t_opt),
            sci(r.f_per_t),
            sci(r.delta_lambda_sqrt_t),
            sci(r.baseline_parallel),
            sci(r.baseline_classical),
            sci(r.baseline_transversal),
            sci(r.heisenberg_retention),
            join_flags(&r.flags),
        ]);
    }
    csv.into_string()
}

pub fn run(config: SweepConfig, base: RunConfig, ctx: &mut Context) -> Result<SweepReport> {
    let spec = config.resolve()?;
    let report = scaling_sweep(&spec, ctx.exec)?;
    let plot = config.plot.unwrap_or(false);

    ctx.write_config("sweep", &RunConfig { sweep: Some(config), ..base })?;
    let csv = to_csv(&report);
    if ctx.format.csv() {
        ctx.out.write("sweep.csv", csv.as_bytes())?;
    }
    if ctx.format.json() {
        ctx.out.write_json("sweep.json", &SweepJson { spec: &spec, report: &report })?;
    }
    if plot {
        ctx.out.write("sweep.svg", sweep_svg(&csv)?.as_bytes())?;
    }
    println!(
        "sweep rows={} n_max_retention={}",
        report.rows.len(),
        report.n_max_retention.map_or("none".into(), |n| n.to_string())
    );
    ctx.announce();
    Ok(report)
}
