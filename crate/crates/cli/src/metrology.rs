//! Worst-case QFI of a named or supplied `N`-qubit state.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use spinroof_core::metrology::{limit_report, tetrad, xyz_triple, AxisSet, LimitReport, StateClass};
use spinroof_core::states::{
    dicke_state, embed_symmetric, product_state, tetrahedron_state, BlochVector,
};
use spinroof_core::{io, DensityMatrix, PureState, C64, CVector};

use crate::args::{Axes, MetrologyArgs};
use crate::{emit, exit, read_file, CliError, CliResult};

pub const BUILTIN_STATES: [&str; 6] = [
    "twin-fock",
    "all-up",
    "xyz-product",
    "tetrad-product",
    "tetrahedron",
    "ghz",
];

fn repeated(pattern: &[BlochVector], n: usize, name: &str) -> CliResult<DensityMatrix> {
    if !n.is_multiple_of(pattern.len()) {
        return Err(CliError::Validation(format!(
            "{name} needs N to be a multiple of {}, got {n}",
            pattern.len()
        )));
    }
    Ok(product_state(&pattern.iter().copied().cycle().take(n).collect::<Vec<_>>())?)
}

/// A built-in `N`-qubit state.
pub fn builtin_state(name: &str, n: usize) -> CliResult<DensityMatrix> {
    match name {
        "twin-fock" => {
            if !n.is_multiple_of(2) {
                return Err(CliError::Validation(format!(
                    "twin-fock needs an even N, got {n}"
                )));
            }
            Ok(dicke_state(n, n / 2)?)
        }
        "all-up" => {
            let up = BlochVector::from_xyz(0.0, 0.0, 1.0)?;
            Ok(product_state(&vec![up; n])?)
        }
        "xyz-product" => repeated(&xyz_triple(), n, name),
        "tetrad-product" => repeated(&tetrad(), n, name),
        "tetrahedron" => {
            if n != 4 {
                return Err(CliError::Validation(format!(
                    "tetrahedron is a 4-qubit state, got N = {n}"
                )));
            }
            Ok(embed_symmetric(&tetrahedron_state())?)
        }
        "ghz" => {
            let dim = spinroof_core::spinops::qubit_space_dim(n)?;
            let mut v = CVector::zeros(dim);
            v[0] = C64::from(1.0);
            v[dim - 1] = C64::from(1.0);
            Ok(PureState::normalized(v)?.to_density())
        }
        _ => Err(CliError::Usage(format!(
            "unknown state {name:?}; expected one of {} or @file.json",
            BUILTIN_STATES.join(", ")
        ))),
    }
}

#[derive(Debug, Serialize)]
pub struct MetrologyOutput {
    pub state: String,
    pub quantum: LimitReport,
    pub classical: LimitReport,
}

pub fn evaluate(state: &str, n: usize, axes: Axes) -> CliResult<MetrologyOutput> {
    let rho = match state.strip_prefix('@') {
        Some(path) => io::density_from_json(&read_file(Path::new(path))?)?,
        None => builtin_state(state, n)?,
    };
    if rho.dim() != 1 << n {
        return Err(CliError::Validation(format!(
            "state has dimension {}, expected 2^{n} = {}",
            rho.dim(),
            1usize << n
        )));
    }
    let axes = match axes {
        Axes::Plane => AxisSet::xy(),
        Axes::Sphere => AxisSet::FullSphere,
    };
    Ok(MetrologyOutput {
        state: state.to_string(),
        quantum: limit_report(&rho, &axes, StateClass::All)?,
        classical: limit_report(&rho, &axes, StateClass::Separable)?,
    })
}

pub fn cmd_metrology(a: &MetrologyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let report = evaluate(&a.state, a.n as usize, a.axes)?;
    let mut text = serde_json::to_string_pretty(&report).expect("plain data serializes");
    text.push('\n');
    emit(text.as_bytes(), None, out)?;
    Ok(exit::OK)
}
