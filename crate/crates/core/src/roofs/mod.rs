//! Pure-state decompositions and the variance roofs.
//!
//! The QFI is four times the smallest average pure-state variance over all
//! decompositions of a state, and the variance is the largest. For qubits
//! both extremes are reached by two-element decompositions whose Bloch
//! vectors span a chord through the state; see [`chord`]. For general
//! dimension, [`search`] finds the minimum numerically.

pub mod chord;
pub mod search;

pub use chord::{
    chord_decomposition, eigendecomposition_gaps, maximal_decomposition, min_max_duality_check,
    minimal_decomposition, parallel_axis_gaps, qubit_eigendecomposition, ChordDecomposition,
    DualityReport, EigenGaps, ParallelAxisGaps,
};
pub use search::{numeric_convex_roof, RoofBudget, RoofSearch};

use crate::spinops::{check_dim, HermitianOperator};
use crate::states::{DensityMatrix, PureState};
use crate::{Error, Result, C64, CMatrix};

/// Weight tolerance: weights must sum to one within this.
pub const WEIGHT_TOL: f64 = 1e-10;
/// Per-entry tolerance for reconstructing a target state.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub weight: f64,
    pub state: PureState,
}

/// A convex combination of pure states.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    elements: Vec<Element>,
}

impl Decomposition {
    pub fn new(elements: Vec<Element>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty decomposition".into()))?;
        let dim = first.state.dim();
        let mut total = 0.0;
        for e in &elements {
            check_dim(dim, e.state.dim())?;
            if e.weight.is_nan() || e.weight <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "weight {} is not positive",
                    e.weight
                )));
            }
            total += e.weight;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidParameter(format!("weights sum to {total}")));
        }
        Ok(Self { elements })
    }

    pub fn single(state: PureState) -> Self {
        Self {
            elements: vec![Element { weight: 1.0, state }],
        }
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].state.dim()
    }

    /// `Σ p_k |Ψk><Ψk|` as a raw matrix.
    pub fn sum(&self) -> CMatrix {
        let dim = self.dim();
        self.elements
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, e| {
                acc + e.state.projector() * C64::from(e.weight)
            })
    }

    pub fn reconstruct(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.sum())
    }

    /// Errors unless the decomposition reproduces `rho` within
    /// [`RECONSTRUCTION_TOL`] per entry.
    pub fn check_target(&self, rho: &DensityMatrix) -> Result<()> {
        let deviation = rho.distance(&self.sum());
        if deviation > RECONSTRUCTION_TOL {
            return Err(Error::Reconstruction(deviation));
        }
        Ok(())
    }
}

/// `Σ p_k Var(Ψk, A)`.
pub fn average_variance(d: &Decomposition, a: &HermitianOperator) -> Result<f64> {
    d.elements
        .iter()
        .map(|e| Ok(e.weight * e.state.variance(a)?))
        .sum()
}

/// `Σ p_k F_Q[Ψk, A]`; four times [`average_variance`] because every element
/// is pure.
pub fn average_qfi(d: &Decomposition, a: &HermitianOperator) -> Result<f64> {
    Ok(4.0 * average_variance(d, a)?)
}

/// Spectral decomposition from the cached eigenpairs, dropping zero weights.
pub fn eigendecomposition(rho: &DensityMatrix) -> Decomposition {
    let vectors = rho.eigenvectors();
    let mut elements: Vec<Element> = rho
        .eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 1e-15)
        .map(|(k, &w)| Element {
            weight: w,
            state: PureState::normalized(vectors.column(k).into_owned())
                .expect("eigenvectors are unit columns"),
        })
        .collect();
    let total: f64 = elements.iter().map(|e| e.weight).sum();
    elements.iter_mut().for_each(|e| e.weight /= total);
    Decomposition { elements }
}
