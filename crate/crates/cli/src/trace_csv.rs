use std::io::Write;

use anyhow::Result;
use sfm_core::solvers::TraceRecord;

pub fn header(r: usize) -> Vec<String> {
    let mut h = vec!["iter".to_string(), "sfmd_total".to_string()];
    h.extend((1..=r).map(|i| format!("sfmd_{i}")));
    h.extend(["sfmc_total", "discrete_gap", "best_value", "epsilon", "wall_ms"].map(String::from));
    h
}

pub fn row(rec: &TraceRecord<f64>) -> Vec<String> {
    let mut v = vec![rec.iter.to_string(), rec.sfmd_total.to_string()];
    v.extend(rec.sfmd_per_summand.iter().map(u64::to_string));
    v.push(rec.sfmc_total.to_string());
    v.push(rec.discrete_gap.to_string());
    v.push(rec.best_value.to_string());
    v.push(rec.epsilon.to_string());
    v.push(rec.wall_ms.to_string());
    v
}

pub fn write<W: Write>(out: W, trace: &[TraceRecord<f64>], r: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(r))?;
    for rec in trace {
        w.write_record(row(rec))?;
    }
    w.flush()?;
    Ok(())
}
