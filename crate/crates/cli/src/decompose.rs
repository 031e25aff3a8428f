//! Minimal, maximal or spectral decomposition of a mixed qubit, with the
//! parallel-axis gaps that certify it.

use std::io::Write;

use nalgebra::Vector3;
use serde::Serialize;

use spinroof_core::io::DecompositionJson;
use spinroof_core::roofs::{
    eigendecomposition_gaps, maximal_decomposition, minimal_decomposition, parallel_axis_gaps,
    qubit_eigendecomposition, ChordDecomposition, EigenGaps, ParallelAxisGaps,
};
use spinroof_core::states::bloch_to_density;
use spinroof_core::{BlochVector, Direction, Error};

use crate::args::{DecomposeArgs, Kind};
use crate::{emit, exit, CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct DecomposeOutput {
    pub kind: Kind,
    pub target: BlochVector,
    pub axis: Direction,
    /// Set when the target is pure and the decomposition is the state itself.
    pub pure: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chord: Option<ChordDecomposition>,
    pub decomposition: DecompositionJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaps: Option<ParallelAxisGaps>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigen_gaps: Option<EigenGaps>,
}

pub fn decompose(r: [f64; 3], n: [f64; 3], kind: Kind) -> CliResult<DecomposeOutput> {
    let target = BlochVector::new(Vector3::from(r))?;
    let axis = Direction::normalize(Vector3::from(n))?;
    let chord = match kind {
        Kind::Min => minimal_decomposition(&target, &axis).map_err(CliError::from),
        Kind::Max => maximal_decomposition(&target, &axis).map_err(CliError::from),
        Kind::Eigen => qubit_eigendecomposition(&target).map_err(|e| match e {
            Error::Degenerate => CliError::Validation(
                "degenerate state: the maximally mixed qubit has no unique eigendecomposition"
                    .into(),
            ),
            other => other.into(),
        }),
    };
    let chord = match chord {
        Ok(c) => c,
        Err(CliError::Core(Error::PureTarget(d))) => {
            return Ok(DecomposeOutput {
                kind,
                target,
                axis,
                pure: true,
                chord: None,
                decomposition: DecompositionJson::from(d.as_ref()),
                gaps: None,
                eigen_gaps: None,
            })
        }
        Err(e) => return Err(e),
    };
    let d = chord.to_decomposition();
    let eigen_gaps = match kind {
        Kind::Eigen => Some(eigendecomposition_gaps(&bloch_to_density(&target), &axis)?),
        _ => None,
    };
    Ok(DecomposeOutput {
        kind,
        target,
        axis,
        pure: false,
        chord: Some(chord),
        decomposition: DecompositionJson::from(&d),
        gaps: Some(parallel_axis_gaps(&target, &d, &axis)?),
        eigen_gaps,
    })
}

pub fn cmd_decompose(a: &DecomposeArgs, out: &mut dyn Write) -> CliResult<i32> {
    let report = decompose(a.r, a.n, a.kind)?;
    let mut text = serde_json::to_string_pretty(&report).expect("plain data serializes");
    text.push('\n');
    emit(text.as_bytes(), None, out)?;
    Ok(exit::OK)
}
