//! Worst-case phase sensitivity when the rotation axis is unknown.
//!
//! For `N` qubits with collective spin `L`, the figure of merit is
//! `min_n F_Q[ρ, L_n]` over a plane or over all directions. The largest
//! values reachable by any state and by separable states are
//!
//! | axes   | all states   | separable |
//! |--------|--------------|-----------|
//! | plane  | `N(N+2)/2`   | `N`       |
//! | sphere | `N(N+2)/3`   | `2N/3`    |
//!
//! so exceeding the separable value witnesses entanglement.

use nalgebra::{Matrix2, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::fluctuation::{crb_from_qfi, fisher_matrix, qfi, FisherMatrix};
use crate::rng::{stream, unit_vector};
use crate::spinops::{complete_triad, Direction, HermitianOperator, SpinOperators};
use crate::states::{
    dicke_state, embed_symmetric, product_state, tetrahedron_state, BlochVector, DensityMatrix,
};
use crate::{Error, Result};

/// Margin above the separable limit required before flagging entanglement.
pub const WITNESS_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisSet {
    /// Axes in the plane orthogonal to the normal.
    Plane(Direction),
    FullSphere,
}

impl AxisSet {
    /// The `xy` plane.
    pub fn xy() -> Self {
        AxisSet::Plane(Direction::z())
    }

    /// A random unit vector in the axis set.
    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Direction {
        let v = unit_vector(rng);
        match self {
            AxisSet::FullSphere => Direction::normalize(v).expect("unit vector"),
            AxisSet::Plane(normal) => {
                let t = complete_triad(*normal);
                let (a, b) = (t.n2.dot(&v), t.n3.dot(&v));
                let w = t.n2.vector() * a + t.n3.vector() * b;
                Direction::normalize(w).unwrap_or(t.n2)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateClass {
    All,
    Separable,
}

/// Largest worst-case QFI over all `N`-qubit states.
pub fn quantum_limit(axes: &AxisSet, n: usize) -> f64 {
    let n = n as f64;
    match axes {
        AxisSet::Plane(_) => n * (n + 2.0) / 2.0,
        AxisSet::FullSphere => n * (n + 2.0) / 3.0,
    }
}

/// Largest worst-case QFI over separable `N`-qubit states.
pub fn classical_limit(axes: &AxisSet, n: usize) -> f64 {
    let n = n as f64;
    match axes {
        AxisSet::Plane(_) => n,
        AxisSet::FullSphere => 2.0 * n / 3.0,
    }
}

pub fn limit(axes: &AxisSet, class: StateClass, n: usize) -> f64 {
    match class {
        StateClass::All => quantum_limit(axes, n),
        StateClass::Separable => classical_limit(axes, n),
    }
}

/// `min_n nᵀFn` over the axis set, with a minimizing axis.
pub fn min_qfi_of(f: &FisherMatrix, axes: &AxisSet) -> (f64, Direction) {
    match axes {
        AxisSet::FullSphere => {
            let (values, vectors) = f.eigen();
            let argmin = Direction::normalize(vectors[0]).expect("eigenvector");
            (values[0], argmin)
        }
        AxisSet::Plane(normal) => {
            let t = complete_triad(*normal);
            let (e1, e2) = (t.n2, t.n3);
            let a = f.quadratic(&e1);
            let b = f.quadratic(&e2);
            let c = e1.vector().dot(&(f.matrix() * e2.vector()));
            let closed = 0.5 * (a + b - ((a - b).powi(2) + 4.0 * c * c).sqrt());

            let eig = Matrix2::new(a, c, c, b).symmetric_eigen();
            let k = if eig.eigenvalues[0] <= eig.eigenvalues[1] { 0 } else { 1 };
            debug_assert!(
                (eig.eigenvalues[k] - closed).abs() <= 1e-9 * (1.0 + closed.abs()),
                "plane minimum {closed} disagrees with eigen-solve {}",
                eig.eigenvalues[k]
            );
            let w = eig.eigenvectors.column(k);
            let axis: Vector3<f64> = e1.vector() * w[0] + e2.vector() * w[1];
            let argmin = Direction::normalize(axis).expect("unit combination");
            (closed, argmin)
        }
    }
}

/// Worst-case QFI of `rho` over the axis set.
pub fn min_qfi(rho: &DensityMatrix, l: &SpinOperators, axes: &AxisSet) -> Result<(f64, Direction)> {
    Ok(min_qfi_of(&fisher_matrix(rho, l)?, axes))
}

/// Smallest `nᵀFn` over `samples` random axes in the set. Never below the
/// true minimum, so it certifies [`min_qfi`] from above.
pub fn sampled_min_qfi(
    rho: &DensityMatrix,
    l: &SpinOperators,
    axes: &AxisSet,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let f = fisher_matrix(rho, l)?;
    Ok((0..samples as u64)
        .into_par_iter()
        .map(|i| f.quadratic(&axes.sample(&mut stream(seed, i))))
        .reduce(|| f64::INFINITY, f64::min))
}

/// Number of qubits behind a `2^N`-dimensional state.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    pub n: usize,
    pub axes: AxisSet,
    pub state_class: StateClass,
    pub limit: f64,
    /// Worst-case QFI of the supplied state.
    pub achieved: f64,
    /// `achieved` exceeds the separable limit.
    pub witness: bool,
    pub argmin: Direction,
    /// `F_Q` along `x`, `y`, `z`.
    pub per_axis: [f64; 3],
}

/// Evaluates an `N`-qubit state against the limit of `class`.
pub fn limit_report(rho: &DensityMatrix, axes: &AxisSet, class: StateClass) -> Result<LimitReport> {
    let n = qubit_count(rho.dim())?;
    let l = SpinOperators::collective(n)?;
    let f = fisher_matrix(rho, &l)?;
    let (achieved, argmin) = min_qfi_of(&f, axes);
    let m = f.matrix();
    Ok(LimitReport {
        n,
        axes: *axes,
        state_class: class,
        limit: limit(axes, class, n),
        achieved,
        witness: achieved > classical_limit(axes, n) + WITNESS_SLACK,
        argmin,
        per_axis: [m[(0, 0)], m[(1, 1)], m[(2, 2)]],
    })
}

/// Compares the state against the separable limit.
pub fn witness_entanglement(rho: &DensityMatrix, axes: &AxisSet) -> Result<LimitReport> {
    limit_report(rho, axes, StateClass::Separable)
}

fn unit(x: f64, y: f64, z: f64) -> BlochVector {
    BlochVector::new(Vector3::new(x, y, z).normalize()).expect("unit vector")
}

/// Bloch vectors `x, y, z`.
pub fn xyz_triple() -> [BlochVector; 3] {
    [unit(1.0, 0.0, 0.0), unit(0.0, 1.0, 0.0), unit(0.0, 0.0, 1.0)]
}

/// Bloch vectors on alternate corners of a cube.
pub fn tetrad() -> [BlochVector; 4] {
    [
        unit(-1.0, 1.0, 1.0),
        unit(1.0, -1.0, 1.0),
        unit(1.0, 1.0, -1.0),
        unit(1.0, 1.0, 1.0),
    ]
}

/// Rotates a pure state's Bloch vector from `z` to `normal`.
fn rotated_to(normal: &Direction, r: &BlochVector) -> BlochVector {
    let rot = nalgebra::Rotation3::rotation_between(&Vector3::z(), normal.vector())
        .unwrap_or_else(|| nalgebra::Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI));
    BlochVector::new(rot * r.vector()).expect("rotation preserves length")
}

/// A state attaining the limit of `(axes, class)` for `N` qubits.
///
/// * plane, all states: twin-Fock state, `N` even
/// * plane, separable: every qubit polarized along the normal
/// * sphere, all states: tetrahedron state, `N = 4`
/// * sphere, separable: `x, y, z` triples or tetrads, `N` a multiple of 3 or 4
///
/// Plane states are built for the `xy` plane and otherwise require the
/// normal to be `±z`, except the product state which follows any normal.
pub fn optimal_state(axes: &AxisSet, class: StateClass, n: usize) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    match (axes, class) {
        (AxisSet::Plane(normal), StateClass::All) => {
            if !n.is_multiple_of(2) {
                return Err(Error::Unsupported(format!(
                    "the twin-Fock state needs an even number of qubits, got N = {n}"
                )));
            }
            if normal.vector().z.abs() < 1.0 - 1e-12 {
                return Err(Error::Unsupported(
                    "the twin-Fock state is built for the xy plane only".into(),
                ));
            }
            dicke_state(n, n / 2)
        }
        (AxisSet::Plane(normal), StateClass::Separable) => {
            let up = rotated_to(normal, &unit(0.0, 0.0, 1.0));
            product_state(&vec![up; n])
        }
        (AxisSet::FullSphere, StateClass::All) => {
            if n != 4 {
                return Err(Error::Unsupported(format!(
                    "an anticoherent state is provided for N = 4 only, got N = {n}"
                )));
            }
            embed_symmetric(&tetrahedron_state())
        }
        (AxisSet::FullSphere, StateClass::Separable) => {
            let blochs: Vec<BlochVector> = if n.is_multiple_of(3) {
                xyz_triple().iter().copied().cycle().take(n).collect()
            } else if n.is_multiple_of(4) {
                tetrad().iter().copied().cycle().take(n).collect()
            } else {
                return Err(Error::Unsupported(format!(
                    "separable sphere-optimal products need N a multiple of 3 or 4, got N = {n}"
                )));
            };
            product_state(&blochs)
        }
    }
}

/// Residuals of the conditions under which a product of pure qubits attains
/// the separable sphere limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparableConstraints {
    /// `max_k ||r_k|² - 1|`
    pub unit_norm: f64,
    /// Spread of `Σ_k (r_k)_i²` over `i = x, y, z`.
    pub equal_squares: f64,
    /// `max_{i<j} |Σ_k (r_k)_i (r_k)_j|`
    pub cross_sums: f64,
}

impl SeparableConstraints {
    pub fn satisfied(&self, tol: f64) -> bool {
        self.unit_norm <= tol && self.equal_squares <= tol && self.cross_sums <= tol
    }
}

pub fn separable_constraints_check(blochs: &[BlochVector]) -> SeparableConstraints {
    let unit_norm = blochs
        .iter()
        .map(|r| (r.norm_squared() - 1.0).abs())
        .fold(0.0, f64::max);
    let mut second = nalgebra::Matrix3::<f64>::zeros();
    for r in blochs {
        second += r.vector() * r.vector().transpose();
    }
    let diag = [second[(0, 0)], second[(1, 1)], second[(2, 2)]];
    let hi = diag.iter().copied().fold(f64::MIN, f64::max);
    let lo = diag.iter().copied().fold(f64::MAX, f64::min);
    let cross_sums = [second[(0, 1)], second[(0, 2)], second[(1, 2)]]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max);
    SeparableConstraints {
        unit_norm,
        equal_squares: hi - lo,
        cross_sums,
    }
}

/// Cramér-Rao bound `1/F_Q` on the phase variance.
pub fn crb(rho: &DensityMatrix, a: &HermitianOperator) -> Result<f64> {
    crb_from_qfi(qfi(rho, a)?)
}
