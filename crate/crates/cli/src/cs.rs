//! `c(s)` table with a log-log slope over the upper half of the spins.

use std::fmt::Write as _;
use std::io::Write;

use spinroof_core::relations::{compute_c, loglog_slope, CsResult};
use spinroof_core::Spin;

use crate::args::CsArgs;
use crate::{emit, exit, CliResult};

pub const SCHEMA: &str = "spinroof.cs/1";

/// `c(s)` for `2s = 1..=two_s_max`.
pub fn cs_table(two_s_max: u32, restarts: usize, seed: u64) -> CliResult<Vec<CsResult>> {
    (1..=two_s_max)
        .map(|t| Ok(compute_c(Spin::new(t)?, restarts, seed)?))
        .collect()
}

/// Rows with `2s ≥ ⌈2s_max / 2⌉`, or `None` when fewer than two remain.
pub fn upper_half(table: &[CsResult]) -> Option<&[CsResult]> {
    let max = table.last()?.s.two_s();
    let from = table.iter().position(|r| r.s.two_s() >= max.div_ceil(2))?;
    let upper = &table[from..];
    (upper.len() >= 2).then_some(upper)
}

pub fn render(table: &[CsResult]) -> CliResult<String> {
    let mut text = format!("# schema: {SCHEMA}\ns,two_s,c,converged\n");
    for r in table {
        writeln!(text, "{},{},{},{}", r.s.s(), r.s.two_s(), r.c, r.converged).expect("string");
    }
    if let Some(upper) = upper_half(table) {
        let points: Vec<(f64, f64)> = upper.iter().map(|r| (r.s.s(), r.c)).collect();
        let slope = loglog_slope(&points)?;
        writeln!(
            text,
            "# loglog_slope: {slope} over s in [{}, {}]",
            upper[0].s.s(),
            upper[upper.len() - 1].s.s()
        )
        .expect("string");
    }
    Ok(text)
}

pub fn cmd_cs(a: &CsArgs, out: &mut dyn Write) -> CliResult<i32> {
    let table = cs_table(a.smax, a.restarts as usize, a.seed)?;
    emit(render(&table)?.as_bytes(), None, out)?;
    Ok(if table.iter().all(|r| r.converged) {
        exit::OK
    } else {
        exit::NON_CONVERGENCE
    })
}
