//! Two-element qubit decompositions as chords of the Bloch sphere.
//!
//! A decomposition `{p_k, r_k}` is a rigid body of point masses on the
//! sphere with center of mass at the state's Bloch vector `r`. Its average
//! QFI about `n` exceeds the state's QFI by `Σ p_k |n × r'_k|^2`, with
//! `r'_k = r_k - r`, so the chord parallel to `n` is the unique minimizer
//! and any chord perpendicular to `n` maximizes the average variance.

use nalgebra::Vector3;
use serde::Serialize;

use super::{average_variance, Decomposition, Element};
use crate::fluctuation::{qfi, qfi_bloch_unitary, variance};
use crate::spinops::{check_dim, complete_triad, spin_operators, Direction, Spin, Triad};
use crate::states::{bloch_to_density, density_to_bloch, BlochVector, DensityMatrix, PureState};
use crate::{Error, Result};

/// Targets at least this long are treated as pure.
pub const PURE_THRESHOLD: f64 = 1.0 - 1e-10;
/// Bloch vectors shorter than this are treated as maximally mixed.
pub const DEGENERATE_THRESHOLD: f64 = 1e-10;

/// `ρ(target) = p ρ(r1) + (1-p) ρ(r2)` with unit `r1`, `r2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChordDecomposition {
    pub p: f64,
    pub r1: BlochVector,
    pub r2: BlochVector,
    pub target: BlochVector,
}

impl ChordDecomposition {
    pub fn to_decomposition(&self) -> Decomposition {
        Decomposition::new(vec![
            Element {
                weight: self.p,
                state: PureState::from_bloch(&self.r1).expect("unit endpoint"),
            },
            Element {
                weight: 1.0 - self.p,
                state: PureState::from_bloch(&self.r2).expect("unit endpoint"),
            },
        ])
        .expect("weights in (0, 1)")
    }

    /// Separation vectors `r'_k = r_k - r` with their weights.
    pub fn separations(&self) -> [(f64, Vector3<f64>); 2] {
        let t = self.target.vector();
        [
            (self.p, self.r1.vector() - t),
            (1.0 - self.p, self.r2.vector() - t),
        ]
    }

    /// Largest deviation of `p r1 + (1-p) r2` from the target.
    pub fn reconstruction_residual(&self) -> f64 {
        let mix = self.r1.vector() * self.p + self.r2.vector() * (1.0 - self.p);
        (mix - self.target.vector()).amax()
    }

    /// Average variance of `L_n` from the Bloch geometry:
    /// `Σ p_k (1 - (n·r_k)^2)/4`.
    pub fn average_variance_along(&self, n: &Direction) -> f64 {
        let v = |r: &BlochVector| (1.0 - n.dot(r.vector()).powi(2)) / 4.0;
        self.p * v(&self.r1) + (1.0 - self.p) * v(&self.r2)
    }
}

fn pure_fallback(target: &BlochVector) -> Error {
    let unit = BlochVector::new(target.vector() / target.norm()).expect("unit vector");
    let state = PureState::from_bloch(&unit).expect("unit vector");
    Error::PureTarget(Box::new(Decomposition::single(state)))
}

/// The chord through `target` along `u`.
///
/// With `r'_1 = a u`, `r'_2 = -b u`:
/// `a = sqrt((u·r)^2 - |r|^2 + 1) - u·r`, `b = sqrt((u·r)^2 - |r|^2 + 1) + u·r`,
/// `p = b / (a + b)`.
pub fn chord_decomposition(target: &BlochVector, u: &Direction) -> Result<ChordDecomposition> {
    if target.norm() >= PURE_THRESHOLD {
        return Err(pure_fallback(target));
    }
    let t = target.vector();
    let ut = u.dot(t);
    let root = (ut * ut - target.norm_squared() + 1.0).sqrt();
    let a = root - ut;
    let b = root + ut;
    let on_sphere = |v: Vector3<f64>| BlochVector::new(v / v.norm()).expect("unit vector");
    Ok(ChordDecomposition {
        p: b / (a + b),
        r1: on_sphere(t + u.vector() * a),
        r2: on_sphere(t - u.vector() * b),
        target: *target,
    })
}

/// The unique chord parallel to `n`; its average variance is `F_Q/4`.
pub fn minimal_decomposition(target: &BlochVector, n: &Direction) -> Result<ChordDecomposition> {
    chord_decomposition(target, n)
}

/// A chord perpendicular to `n`; its average variance equals the variance.
///
/// The perpendicular chord is not unique. This picks `n × r` when it is
/// nonzero and otherwise the second axis of [`complete_triad`] of `n`.
pub fn maximal_decomposition(target: &BlochVector, n: &Direction) -> Result<ChordDecomposition> {
    let cross = n.vector().cross(target.vector());
    let u = if cross.norm() > 1e-9 {
        Direction::normalize(cross)?
    } else {
        complete_triad(*n).n2
    };
    chord_decomposition(target, &u)
}

/// Eigendecomposition of a nondegenerate mixed qubit: the chord through the
/// origin along `r̂`, with weights `(1 ± |r|)/2`.
pub fn qubit_eigendecomposition(target: &BlochVector) -> Result<ChordDecomposition> {
    let norm = target.norm();
    if norm <= DEGENERATE_THRESHOLD {
        return Err(Error::Degenerate);
    }
    let axis = Direction::normalize(*target.vector())?;
    chord_decomposition(target, &axis)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParallelAxisGaps {
    /// `Σ p_k F_Q[Ψk] - F_Q[ρ]`, from the matrices.
    pub qfi_gap: f64,
    /// `Var[ρ] - Σ p_k Var[Ψk]`, from the matrices.
    pub var_gap: f64,
    /// `Σ p_k |n × r'_k|^2`.
    pub qfi_gap_geometric: f64,
    /// `Σ p_k (n·r'_k)^2 / 4`.
    pub var_gap_geometric: f64,
}

impl ParallelAxisGaps {
    pub fn residual(&self) -> f64 {
        (self.qfi_gap - self.qfi_gap_geometric)
            .abs()
            .max((self.var_gap - self.var_gap_geometric).abs())
    }
}

/// Both sides of the parallel-axis identities for a qubit decomposition.
pub fn parallel_axis_gaps(
    target: &BlochVector,
    d: &Decomposition,
    n: &Direction,
) -> Result<ParallelAxisGaps> {
    check_dim(2, d.dim())?;
    let rho = bloch_to_density(target);
    d.check_target(&rho)?;
    let ln = spin_operators(Spin::half()).along(n);

    let avg_var = average_variance(d, &ln)?;
    let mut qfi_geo = 0.0;
    let mut var_geo = 0.0;
    for e in d.elements() {
        let sep = e.state.bloch()?.vector() - target.vector();
        qfi_geo += e.weight * n.vector().cross(&sep).norm_squared();
        var_geo += e.weight * n.dot(&sep).powi(2) / 4.0;
    }
    Ok(ParallelAxisGaps {
        qfi_gap: 4.0 * avg_var - qfi(&rho, &ln)?,
        var_gap: variance(&rho, &ln)? - avg_var,
        qfi_gap_geometric: qfi_geo,
        var_gap_geometric: var_geo,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenGaps {
    /// `(1 - |r|^2)(n·r̂)^2`.
    pub var_gap: f64,
    /// `(1 - |r|^2)|n × r̂|^2`.
    pub qfi_gap: f64,
    /// `4 Var[ρ] - 4 Σ λk Var[Φk]`, from the matrices.
    pub var_gap_direct: f64,
    /// `Σ λk F_Q[Φk] - F_Q[ρ]`, from the matrices.
    pub qfi_gap_direct: f64,
}

impl EigenGaps {
    /// Where the eigendecomposition splits the interval between the QFI and
    /// four times the variance: `|n × r̂|^2 / (n·r̂)^2`.
    pub fn ratio(&self) -> f64 {
        self.qfi_gap / self.var_gap
    }

    pub fn residual(&self) -> f64 {
        (self.var_gap - self.var_gap_direct)
            .abs()
            .max((self.qfi_gap - self.qfi_gap_direct).abs())
    }
}

/// Gaps of the eigendecomposition of a nondegenerate mixed qubit relative to
/// the two roofs, both in closed form and computed directly.
pub fn eigendecomposition_gaps(rho: &DensityMatrix, n: &Direction) -> Result<EigenGaps> {
    check_dim(2, rho.dim())?;
    let r = density_to_bloch(rho)?;
    let norm = r.norm();
    if norm <= DEGENERATE_THRESHOLD {
        return Err(Error::Degenerate);
    }
    if norm >= PURE_THRESHOLD {
        return Err(pure_fallback(&r));
    }
    let unit = r.vector() / norm;
    let mixedness = 1.0 - r.norm_squared();

    let ln = spin_operators(Spin::half()).along(n);
    let d = super::eigendecomposition(rho);
    let avg_var = average_variance(&d, &ln)?;
    Ok(EigenGaps {
        var_gap: mixedness * n.dot(&unit).powi(2),
        qfi_gap: mixedness * n.vector().cross(&unit).norm_squared(),
        var_gap_direct: 4.0 * (variance(rho, &ln)? - avg_var),
        qfi_gap_direct: 4.0 * avg_var - qfi(rho, &ln)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualityReport {
    /// Average variance along `n1` of the minimal decomposition.
    pub average_n1: f64,
    /// `F_Q[ρ, L_n1] / 4`.
    pub qfi_n1: f64,
    pub average_n2: f64,
    pub variance_n2: f64,
    pub average_n3: f64,
    pub variance_n3: f64,
}

impl DualityReport {
    pub fn residual(&self) -> f64 {
        [
            self.average_n1 - self.qfi_n1,
            self.average_n2 - self.variance_n2,
            self.average_n3 - self.variance_n3,
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
    }
}

/// The minimal decomposition along `n1` is maximal along `n2` and `n3`.
pub fn min_max_duality_check(target: &BlochVector, triad: &Triad) -> Result<DualityReport> {
    let chord = minimal_decomposition(target, &triad.n1)?;
    let d = chord.to_decomposition();
    let rho = bloch_to_density(target);
    let l = spin_operators(Spin::half());
    let [l1, l2, l3] = triad.directions().map(|n| l.along(&n));
    Ok(DualityReport {
        average_n1: average_variance(&d, &l1)?,
        qfi_n1: qfi_bloch_unitary(target, &triad.n1) / 4.0,
        average_n2: average_variance(&d, &l2)?,
        variance_n2: variance(&rho, &l2)?,
        average_n3: average_variance(&d, &l3)?,
        variance_n3: variance(&rho, &l3)?,
    })
}
