//! Runs the relation checks on random states (or one supplied state) and
//! reports failures with the offending state, followed by one summary line
//! per spin and relation.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use spinroof_core::io::DensityJson;
use spinroof_core::relations::{self, compute_c, Kind, RelationReport};
use spinroof_core::rng::{random_triad, stream, unit_vector};
use spinroof_core::roofs::{
    average_variance, eigendecomposition, maximal_decomposition, minimal_decomposition,
};
use spinroof_core::states::{density_to_bloch, sample_state};
use spinroof_core::{
    io, qfi, spin_operators, variance, DensityMatrix, Direction, Error, Measure, Spin,
};

use crate::args::VerifyArgs;
use crate::diagram::sample_rank;
use crate::{emit, exit, read_file, CliResult};

/// Restarts used to compute `c(s)` for the two-variance relations.
const CS_RESTARTS: usize = 64;

/// All relations on one state, with axes drawn from `rng`.
pub fn check_state<R: rand::Rng + ?Sized>(
    rho: &DensityMatrix,
    spin: Spin,
    c: f64,
    rng: &mut R,
) -> Result<Vec<RelationReport>, Error> {
    let triad = random_triad(rng);
    let [n1, n2, n3] = triad.directions();
    let l = spin_operators(spin);
    let (a, b) = (l.along(&n1), l.along(&n2));

    let mut out = vec![relations::check_robertson(rho, &a, &b)?];
    out.extend(relations::check_robertson_qfi(rho, &a, &b)?);

    let sum3 = relations::check_sum3(rho, &triad, spin)?;
    let sum3_qfi = relations::check_sum3_qfi(rho, &triad, spin)?;
    let sum2 = relations::check_sum2(rho, &n1, &n2, spin, c)?;
    let sum2_qfi = relations::check_sum2_qfi(rho, &n1, &n2, spin, c)?;
    out.push(RelationReport::new("tightening.sum3", Kind::AtMost, sum3_qfi.lhs, sum3.lhs));
    out.push(RelationReport::new("tightening.sum2", Kind::AtMost, sum2_qfi.lhs, sum2.lhs));
    out.extend([sum3, sum3_qfi, sum2, sum2_qfi]);

    // the eigendecomposition lies between the two roofs
    let avg = average_variance(&eigendecomposition(rho), &l.along(&n3))?;
    let ln3 = l.along(&n3);
    out.push(RelationReport::new("roof.lower", Kind::AtLeast, avg, qfi(rho, &ln3)? / 4.0));
    out.push(RelationReport::new("roof.upper", Kind::AtMost, avg, variance(rho, &ln3)?));

    if spin == Spin::half() {
        let da = Direction::normalize(unit_vector(rng))?;
        let db = Direction::normalize(unit_vector(rng))?;
        out.push(relations::check_busch(rho, &da, &db)?);
        out.push(relations::check_busch_qfi(rho, &da, &db)?);
        out.extend(relations::qubit_equalities(rho, &triad)?);
        out.extend(relations::purity_band(rho, &n1, &n2)?);
        out.extend(chord_checks(rho, &n1)?);
    }
    Ok(out)
}

/// The minimal and maximal chords attain the two roofs.
fn chord_checks(rho: &DensityMatrix, n: &Direction) -> Result<Vec<RelationReport>, Error> {
    let target = density_to_bloch(rho)?;
    let ln = spin_operators(Spin::half()).along(n);
    let mut out = Vec::new();
    match minimal_decomposition(&target, n) {
        Ok(min) => {
            let avg = average_variance(&min.to_decomposition(), &ln)?;
            out.push(RelationReport::new("chord.min", Kind::Equality, avg, qfi(rho, &ln)? / 4.0));
            let max = maximal_decomposition(&target, n)?;
            let avg = average_variance(&max.to_decomposition(), &ln)?;
            out.push(RelationReport::new("chord.max", Kind::Equality, avg, variance(rho, &ln)?));
        }
        // pure targets have no chord; nothing to check
        Err(Error::PureTarget(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(out)
}

#[derive(Serialize)]
struct Failure<'a> {
    spin: Spin,
    sample: u64,
    report: &'a RelationReport,
    state: DensityJson,
}

#[derive(Serialize)]
struct Summary<'a> {
    spin: Spin,
    relation: &'a str,
    checked: usize,
    failed: usize,
    min_residual: f64,
    max_residual: f64,
}

struct Tally {
    checked: usize,
    failed: usize,
    min: f64,
    max: f64,
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let supplied = match &a.state {
        Some(path) => Some(io::density_from_json(&read_file(path)?)?),
        None => None,
    };
    let spins: Vec<Spin> = match &supplied {
        Some(rho) => vec![spinroof_core::states::spin_for(rho)?],
        None => a.spins.iter().map(|&t| Spin::new(t)).collect::<Result<_, _>>()?,
    };

    let mut buf = Vec::new();
    let mut total_failed = 0;
    for (k, &spin) in spins.iter().enumerate() {
        let c = compute_c(spin, CS_RESTARTS, a.seed)?.c;
        // distinct stream families per spin
        let seed = a.seed.wrapping_add((k as u64) << 32);
        let results: Vec<(u64, DensityMatrix, Vec<RelationReport>)> = (0..a.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(seed, i);
                let rho = match &supplied {
                    Some(rho) => rho.clone(),
                    None => {
                        let rank = sample_rank(i, spin.dim());
                        sample_state(spin.dim(), Measure::GinibreMixed { rank }, &mut rng)?
                    }
                };
                let reports = check_state(&rho, spin, c, &mut rng)?;
                Ok((i, rho, reports))
            })
            .collect::<Result<_, Error>>()?;

        let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
        for (i, rho, reports) in &results {
            for r in reports {
                let t = tallies.entry(r.name.clone()).or_insert(Tally {
                    checked: 0,
                    failed: 0,
                    min: f64::INFINITY,
                    max: f64::NEG_INFINITY,
                });
                t.checked += 1;
                t.min = t.min.min(r.residual);
                t.max = t.max.max(r.residual);
                if !r.satisfied {
                    t.failed += 1;
                    let line = Failure {
                        spin,
                        sample: *i,
                        report: r,
                        state: DensityJson::from(rho),
                    };
                    serde_json::to_writer(&mut buf, &line).expect("plain data serializes");
                    buf.push(b'\n');
                }
            }
        }
        for (name, t) in &tallies {
            total_failed += t.failed;
            let line = Summary {
                spin,
                relation: name,
                checked: t.checked,
                failed: t.failed,
                min_residual: t.min,
                max_residual: t.max,
            };
            serde_json::to_writer(&mut buf, &line).expect("plain data serializes");
            buf.push(b'\n');
        }
    }
    emit(&buf, a.out.as_deref(), out)?;
    Ok(if total_failed == 0 { exit::OK } else { exit::VALIDATION })
}
