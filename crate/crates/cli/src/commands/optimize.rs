use qecmetro::estimation::{
    default_bracket, encoded_f_per_t, f_per_t_closed_form, frequency_bound, optimize_interrogation_time,
    t_opt_closed_form, Optimum, CLOSED_FORM_TOLERANCE,
};
use serde::Serialize;

use super::Context;
use crate::config::{OptimizeConfig, RunConfig};
use crate::error::{invalid, Result};
use crate::output::{join_flags, sci, sci_opt, Csv};

pub const BOUNDARY: &str = "optimum_at_boundary";
pub const CLOSED_FORM_DEVIATION: &str = "closed_form_deviation_gt_10pct";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeReport {
    pub n: u64,
    pub m: usize,
    pub gamma: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub optimum: Optimum,
    pub delta_lambda_sqrt_t: f64,
    /// `1/(2Nγ)`, the optimum without encoding.
    pub unencoded_t_opt: f64,
    pub t_opt_closed: Option<f64>,
    pub f_per_t_closed: Option<f64>,
    /// Relative deviation of the closed-form `t_opt` from the numeric one.
    pub closed_form_deviation: Option<f64>,
    pub flags: Vec<String>,
}

pub fn compute(config: &OptimizeConfig, ctx: &Context) -> Result<OptimizeReport> {
    let m = config.m.unwrap_or(1);
    let gamma = config.gamma.ok_or_else(|| invalid("missing required parameter `gamma`"))?;
    let n = config.n.ok_or_else(|| invalid("missing required parameter `N`"))?;
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    let (lo, hi) = default_bracket(gamma)?;
    let (t_min, t_max) = (config.t_min.unwrap_or(lo), config.t_max.unwrap_or(hi));
    // Validates m before the optimizer swallows errors as zeros.
    encoded_f_per_t(m, gamma, n, t_min)?;
    let optimum =
        optimize_interrogation_time(|t| encoded_f_per_t(m, gamma, n, t).unwrap_or(0.0), t_min, t_max, ctx.exec)?;
    let (t_opt_closed, f_per_t_closed) = if m >= 3 {
        (Some(t_opt_closed_form(m, gamma, n)?), Some(f_per_t_closed_form(m, gamma, n)?))
    } else {
        (None, None)
    };
    let closed_form_deviation = t_opt_closed.map(|t| (t - optimum.t_opt).abs() / optimum.t_opt);
    let mut flags = Vec::new();
    if optimum.at_boundary {
        flags.push(BOUNDARY.to_string());
    }
    if closed_form_deviation.is_some_and(|d| d > CLOSED_FORM_TOLERANCE) {
        flags.push(CLOSED_FORM_DEVIATION.to_string());
    }
    Ok(OptimizeReport {
        n,
        m,
        gamma,
        t_min,
        t_max,
        delta_lambda_sqrt_t: frequency_bound(optimum.value)?,
        optimum,
        unencoded_t_opt: 1.0 / (2.0 * n as f64 * gamma),
        t_opt_closed,
        f_per_t_closed,
        closed_form_deviation,
        flags,
    })
}

pub fn run(config: OptimizeConfig, base: RunConfig, ctx: &mut Context) -> Result<OptimizeReport> {
    let report = compute(&config, ctx)?;
    ctx.write_config("optimize_time", &RunConfig { optimize_time: Some(config), ..base })?;
    if ctx.format.csv() {
        let mut csv = Csv::new(
            "N,m,gamma,t_opt,f_per_t,delta_lambda_sqrtT,unencoded_t_opt,t_opt_closed,f_per_t_closed,closed_form_deviation,flags",
        );
        csv.row(&[
            report.n.to_string(),
            report.m.to_string(),
            sci(report.gamma),
            sci(report.optimum.t_opt),
            sci(report.optimum.value),
            sci(report.delta_lambda_sqrt_t),
            sci(report.unencoded_t_opt),
            sci_opt(report.t_opt_closed),
            sci_opt(report.f_per_t_closed),
            sci_opt(report.closed_form_deviation),
            join_flags(&report.flags),
        ]);
        ctx.out.write("optimize_time.csv", csv.into_string().as_bytes())?;
    }
    if ctx.format.json() {
        ctx.out.write_json("optimize_time.json", &report)?;
    }
    println!(
        "optimize-time t_opt={} f_per_t={} delta_lambda_sqrtT={}",
        report.optimum.t_opt, report.optimum.value, report.delta_lambda_sqrt_t
    );
    ctx.announce();
    Ok(report)
}
