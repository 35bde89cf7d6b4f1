use qecmetro::codes::{
    concatenation_report, five_qubit_threshold, logical_error_epsilon, logical_flip_retention, ConcatenationReport,
};
use serde::Serialize;

use super::Context;
use crate::config::{CodesConfig, RunConfig};
use crate::error::Result;
use crate::output::{sci, Csv};

pub const DEFAULT_P: [f64; 1] = [0.999];
pub const DEFAULT_M: [usize; 4] = [1, 3, 5, 11];
pub const DEFAULT_Q: [f64; 3] = [0.8, 0.9, 0.99];
pub const DEFAULT_LEVELS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepetitionRow {
    pub p: f64,
    pub m: usize,
    pub p_logical: f64,
    pub epsilon_logical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodesReport {
    pub repetition: Vec<RepetitionRow>,
    pub five_qubit_threshold: f64,
    pub concatenation: Vec<ConcatenationReport>,
}

pub fn compute(config: &CodesConfig) -> Result<CodesReport> {
    let ps = config.p.clone().unwrap_or_else(|| DEFAULT_P.to_vec());
    let ms = config.m.clone().unwrap_or_else(|| DEFAULT_M.to_vec());
    let qs = config.q.clone().unwrap_or_else(|| DEFAULT_Q.to_vec());
    let levels = config.levels.unwrap_or(DEFAULT_LEVELS);
    let mut repetition = Vec::new();
    for &p in &ps {
        for &m in &ms {
            repetition.push(RepetitionRow {
                p,
                m,
                p_logical: logical_flip_retention(p, m)?,
                epsilon_logical: logical_error_epsilon(p, m)?,
            });
        }
    }
    Ok(CodesReport {
        repetition,
        five_qubit_threshold: five_qubit_threshold(),
        concatenation: qs.iter().map(|&q| concatenation_report(q, levels)).collect::<qecmetro::Result<_>>()?,
    })
}

pub fn run(config: CodesConfig, base: RunConfig, ctx: &mut Context) -> Result<CodesReport> {
    let report = compute(&config)?;
    ctx.write_config("codes", &RunConfig { codes: Some(config), ..base })?;
    if ctx.format.csv() {
        let mut rep = Csv::new("p,m,p_L,epsilon_L");
        for r in &report.repetition {
            rep.row(&[sci(r.p), r.m.to_string(), sci(r.p_logical), sci(r.epsilon_logical)]);
        }
        ctx.out.write("codes_repetition.csv", rep.into_string().as_bytes())?;
        let mut cat = Csv::new("q,level,q_L,failure,threshold,regime");
        for c in &report.concatenation {
            let regime = serde_json::to_value(c.regime)?;
            for (level, (q_l, fail)) in c.q_by_level.iter().zip(&c.failure_by_level).enumerate() {
                cat.row(&[
                    sci(c.q),
                    level.to_string(),
                    sci(*q_l),
                    sci(*fail),
                    sci(c.threshold),
                    regime.as_str().unwrap_or_default().to_string(),
                ]);
            }
        }
        ctx.out.write("codes_concatenation.csv", cat.into_string().as_bytes())?;
    }
    if ctx.format.json() {
        ctx.out.write_json("codes.json", &report)?;
    }
    for r in &report.repetition {
        println!("repetition p={} m={} p_L={} epsilon_L={:.3e}", r.p, r.m, r.p_logical, r.epsilon_logical);
    }
    println!("five-qubit threshold q*={}", report.five_qubit_threshold);
    ctx.announce();
    Ok(report)
}
