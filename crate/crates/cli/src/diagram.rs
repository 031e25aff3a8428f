//! Uncertainty-diagram datasets.
//!
//! Sample `i` is drawn from stream `(seed, i)` with Ginibre rank
//! `i mod d + 1`, so every rank from pure (`1`) to full (`d`) appears in
//! equal proportion. Pure states populate the boundary of the diagram,
//! where the lower bounds are approached.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use spinroof_core::rng::stream;
use spinroof_core::states::{purity, sample_state};
use spinroof_core::{qfi, spin_operators, variance, Measure, Spin};

use crate::args::{DiagramArgs, Format, Mode};
use crate::{emit, CliError, CliResult};

pub const SCHEMA: &str = "spinroof.diagram/1";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramRow {
    pub sample_id: u64,
    pub purity: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub mode: Mode,
}

/// Ginibre rank used for sample `index` in dimension `dim`.
pub fn sample_rank(index: u64, dim: usize) -> usize {
    (index % dim as u64) as usize + 1
}

pub fn diagram_rows(spin: Spin, mode: Mode, samples: u64, seed: u64) -> CliResult<Vec<DiagramRow>> {
    let l = spin_operators(spin);
    let dim = spin.dim();
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let measure = Measure::GinibreMixed {
                rank: sample_rank(i, dim),
            };
            let rho = sample_state(dim, measure, &mut stream(seed, i))?;
            let var = |a| variance(&rho, a);
            let q = |a| Ok::<f64, spinroof_core::Error>(qfi(&rho, a)? / 4.0);
            let (c1, c2, c3) = match mode {
                Mode::Vvv => (var(&l.x)?, var(&l.y)?, var(&l.z)?),
                Mode::Vvq => (var(&l.x)?, var(&l.y)?, q(&l.z)?),
                Mode::Qqq => (q(&l.x)?, q(&l.y)?, q(&l.z)?),
            };
            Ok(DiagramRow {
                sample_id: i,
                purity: purity(&rho),
                c1,
                c2,
                c3,
                mode,
            })
        })
        .collect()
}

pub fn render_csv(rows: &[DiagramRow]) -> CliResult<Vec<u8>> {
    let mut buf = format!("# schema: {SCHEMA}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in rows {
            w.serialize(row)
                .map_err(|e| CliError::Validation(format!("csv: {e}")))?;
        }
        w.flush().map_err(|source| CliError::Io {
            path: "<buffer>".into(),
            source,
        })?;
    }
    Ok(buf)
}

/// One JSON object per line, after a `{"schema": ...}` line.
pub fn render_jsonl(rows: &[DiagramRow]) -> Vec<u8> {
    let mut buf = serde_json::json!({ "schema": SCHEMA }).to_string().into_bytes();
    buf.push(b'\n');
    for row in rows {
        serde_json::to_writer(&mut buf, row).expect("plain data serializes");
        buf.push(b'\n');
    }
    buf
}

pub fn cmd_sample_diagram(a: &DiagramArgs, out: &mut dyn Write) -> CliResult<i32> {
    let spin = Spin::new(a.two_s)?;
    let sample = || diagram_rows(spin, a.mode, a.samples, a.seed);
    let rows = match a.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?
            .install(sample)?,
        None => sample()?,
    };
    let bytes = match a.format {
        Format::Csv => render_csv(&rows)?,
        Format::Jsonl => render_jsonl(&rows),
    };
    emit(&bytes, a.out.as_deref(), out)?;
    Ok(crate::exit::OK)
}
