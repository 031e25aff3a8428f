//! Fluctuations of spin-s quantum states.
//!
//! Variances and quantum Fisher information (QFI) of angular-momentum
//! observables, sum uncertainty relations tightened with the QFI, optimal
//! pure-state decompositions of qubits in the Bloch sphere, and worst-case
//! phase-estimation limits for rotations about an unknown axis.
//!
//! Everything operates on dense complex matrices; dimensions are capped at
//! [`DIMENSION_CAP`].

pub mod error;
pub mod fluctuation;
pub mod io;
pub mod metrology;
pub mod relations;
pub mod rng;
pub mod roofs;
pub mod spinops;
pub mod states;

pub use error::{Error, Result};
pub use fluctuation::{
    covariance_matrix, fisher_matrix, purity_gap_bound, qfi, qfi_bloch_curve, qfi_bloch_unitary,
    variance, CovarianceMatrix, FisherMatrix, PurityGap, TangentBloch,
};
pub use spinops::{
    collective_operator, complete_triad, direction_operator, spin_operators, Direction,
    HermitianOperator, Spin, SpinOperators, Triad,
};
pub use states::{BlochVector, DensityMatrix, Measure, PureState, RandomSpec};

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest Hilbert-space dimension accepted by the multi-qubit constructors.
pub const DIMENSION_CAP: usize = 1 << 12;

/// Absolute tolerance on Hermiticity, per entry.
pub const HERMITIAN_TOL: f64 = 1e-12;
