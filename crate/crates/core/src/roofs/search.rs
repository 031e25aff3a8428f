//! Numerical search for the variance-minimizing decomposition.
//!
//! Every `m`-element decomposition of a rank-`r` state is `ψ̃_j = W x_j`,
//! where `W = Φ diag(√λ)` is the square-root factor of `ρ` and the `x_j`
//! are the rows of an `m×r` isometry `U` (`U†U = 1`). With
//! `p_j = x_j†Λx_j` and `a_j = x_j†(W†AW)x_j`, the average variance is
//! `Tr(ρA²) - Σ a_j²/p_j`, so we maximize `g(U) = Σ a_j²/p_j` by
//! projected gradient ascent on the Stiefel manifold from random starts.

use rayon::prelude::*;
use serde::Serialize;

use super::{average_variance, Decomposition, Element};
use crate::rng::{gaussian_matrix, stream};
use crate::spinops::{check_dim, HermitianOperator};
use crate::states::{DensityMatrix, PureState};
use crate::{Error, Result, CMatrix, CVector, C64};

/// Largest dimension accepted by [`numeric_convex_roof`].
pub const MAX_DIM: usize = 16;
/// Eigenvalues below this are not part of the support.
const SUPPORT_FLOOR: f64 = 1e-12;
/// Elements lighter than this are dropped from the result.
const WEIGHT_FLOOR: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RoofBudget {
    pub restarts: usize,
    pub steps: usize,
    pub seed: u64,
    /// Number of decomposition elements; `r²` when unset.
    pub elements: Option<usize>,
    /// Riemannian gradient norm below which a restart counts as converged.
    pub tolerance: f64,
}

impl Default for RoofBudget {
    fn default() -> Self {
        Self {
            restarts: 200,
            steps: 500,
            seed: 0,
            elements: None,
            tolerance: 1e-7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RoofSearch {
    /// Average variance of `decomposition`.
    pub value: f64,
    pub decomposition: Decomposition,
    /// Whether the best restart reached the gradient tolerance.
    pub converged: bool,
    pub gradient_norm: f64,
    pub restarts_converged: usize,
}

/// Square-root factorization restricted to the support, with the reduced
/// operator `M = W†AW`.
struct Problem {
    w: CMatrix,
    lambda: Vec<f64>,
    m: CMatrix,
    second_moment: f64,
}

impl Problem {
    fn new(rho: &DensityMatrix, a: &HermitianOperator) -> Result<Self> {
        let support: Vec<usize> = (0..rho.dim())
            .filter(|&k| rho.eigenvalues()[k] > SUPPORT_FLOOR)
            .collect();
        let dim = rho.dim();
        let rank = support.len();
        let vectors = rho.eigenvectors();
        let mut w = CMatrix::zeros(dim, rank);
        let mut lambda = Vec::with_capacity(rank);
        for (col, &k) in support.iter().enumerate() {
            let l = rho.eigenvalues()[k];
            lambda.push(l);
            w.set_column(col, &(vectors.column(k) * C64::from(l.sqrt())));
        }
        let m = w.adjoint() * a.matrix() * &w;
        let second_moment = rho.expectation(&a.squared())?;
        Ok(Self {
            w,
            lambda,
            m,
            second_moment,
        })
    }

    fn rank(&self) -> usize {
        self.lambda.len()
    }

    /// Per-row `(p_j, a_j)`.
    fn moments(&self, u: &CMatrix) -> Vec<(f64, f64)> {
        (0..u.nrows())
            .map(|j| {
                let x: CVector = u.row(j).transpose();
                let p: f64 = x
                    .iter()
                    .zip(&self.lambda)
                    .map(|(c, l)| c.norm_sqr() * l)
                    .sum();
                let a = x.dotc(&(&self.m * &x)).re;
                (p, a)
            })
            .collect()
    }

    fn objective(&self, u: &CMatrix) -> f64 {
        self.moments(u)
            .into_iter()
            .filter(|&(p, _)| p > f64::MIN_POSITIVE)
            .map(|(p, a)| a * a / p)
            .sum()
    }

    /// Euclidean gradient of the objective with respect to the real and
    /// imaginary parts of `U`, packed as a complex matrix.
    fn gradient(&self, u: &CMatrix) -> CMatrix {
        let mut g = CMatrix::zeros(u.nrows(), u.ncols());
        for (j, (p, a)) in self.moments(u).into_iter().enumerate() {
            if p <= f64::MIN_POSITIVE {
                continue;
            }
            let x: CVector = u.row(j).transpose();
            let q = a / p;
            let mx = &self.m * &x;
            let row = CVector::from_fn(x.len(), |k, _| {
                (mx[k] * C64::from(2.0 * q) - x[k] * C64::from(q * q * self.lambda[k]))
                    * C64::from(2.0)
            });
            g.set_row(j, &row.transpose());
        }
        g
    }
}

/// Orthonormalizes the columns in place by modified Gram-Schmidt.
fn orthonormalize(u: &mut CMatrix) {
    for k in 0..u.ncols() {
        for j in 0..k {
            let proj = u.column(j).dotc(&u.column(k));
            let qj = u.column(j).into_owned();
            u.column_mut(k).axpy(-proj, &qj, C64::from(1.0));
        }
        let norm = u.column(k).norm();
        u.column_mut(k).unscale_mut(norm);
    }
}

/// Tangent projection `G - U sym(U†G)` at `U`.
fn project(u: &CMatrix, g: &CMatrix) -> CMatrix {
    let ug = u.adjoint() * g;
    let sym = (&ug + ug.adjoint()) * C64::from(0.5);
    g - u * sym
}

struct Restart {
    u: CMatrix,
    objective: f64,
    gradient_norm: f64,
}

/// Barzilai-Borwein step `<s,s>/|<s,y>|` clamped to a sane range, or
/// `fallback` when the curvature estimate is degenerate.
pub(crate) fn bb_step(s: &CMatrix, y: &CMatrix, fallback: f64) -> f64 {
    let ss = s.norm_squared();
    let sy = s.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum::<f64>().abs();
    if sy > f64::MIN_POSITIVE && ss > 0.0 {
        (ss / sy).clamp(1e-8, 1e8)
    } else {
        fallback
    }
}

fn ascend(problem: &Problem, mut u: CMatrix, steps: usize, tol: f64) -> Restart {
    let mut value = problem.objective(&u);
    let mut step = 1.0;
    let mut xi = project(&u, &problem.gradient(&u));
    let mut norm2 = xi.norm_squared();
    for _ in 0..steps {
        if norm2.sqrt() < tol {
            break;
        }
        let mut accepted = None;
        while step > 1e-16 {
            let mut trial = &u + &xi * C64::from(step);
            orthonormalize(&mut trial);
            let trial_value = problem.objective(&trial);
            if trial_value >= value + 1e-4 * step * norm2 {
                accepted = Some((trial, trial_value));
                break;
            }
            step *= 0.5;
        }
        let Some((next, next_value)) = accepted else {
            break;
        };
        let next_xi = project(&next, &problem.gradient(&next));
        step = bb_step(&(&next - &u), &(&xi - &next_xi), 2.0 * step);
        u = next;
        value = next_value;
        xi = next_xi;
        norm2 = xi.norm_squared();
    }
    Restart {
        u,
        objective: value,
        gradient_norm: norm2.sqrt(),
    }
}

fn to_decomposition(problem: &Problem, u: &CMatrix) -> Result<Decomposition> {
    let mut elements = Vec::new();
    for j in 0..u.nrows() {
        let x: CVector = u.row(j).transpose();
        let psi = &problem.w * x;
        let weight = psi.norm_squared();
        if weight < WEIGHT_FLOOR {
            continue;
        }
        elements.push(Element {
            weight,
            state: PureState::normalized(psi)?,
        });
    }
    let total: f64 = elements.iter().map(|e| e.weight).sum();
    elements.iter_mut().for_each(|e| e.weight /= total);
    Decomposition::new(elements)
}

/// Smallest average variance of `a` over decompositions of `rho`, found by
/// multi-start local search. A run that exhausts its budget still returns
/// the best decomposition, with `converged` unset.
pub fn numeric_convex_roof(
    rho: &DensityMatrix,
    a: &HermitianOperator,
    budget: &RoofBudget,
) -> Result<RoofSearch> {
    check_dim(rho.dim(), a.dim())?;
    if rho.dim() > MAX_DIM {
        return Err(Error::DimensionCap {
            dim: rho.dim(),
            cap: MAX_DIM,
        });
    }
    if budget.restarts == 0 {
        return Err(Error::InvalidParameter("at least one restart".into()));
    }
    let problem = Problem::new(rho, a)?;
    let rank = problem.rank();
    if rank == 1 {
        let d = to_decomposition(&problem, &CMatrix::identity(1, 1))?;
        return Ok(RoofSearch {
            value: average_variance(&d, a)?,
            decomposition: d,
            converged: true,
            gradient_norm: 0.0,
            restarts_converged: budget.restarts,
        });
    }
    let elements = budget.elements.unwrap_or(rank * rank).max(rank);
    let tol = budget.tolerance;

    let runs: Vec<Restart> = (0..budget.restarts as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = stream(budget.seed, index);
            let mut u = gaussian_matrix(&mut rng, elements, rank);
            orthonormalize(&mut u);
            ascend(&problem, u, budget.steps, tol)
        })
        .collect();
    let restarts_converged = runs.iter().filter(|r| r.gradient_norm < tol).count();
    // first index wins ties so the result does not depend on scheduling
    let best = runs
        .into_iter()
        .reduce(|best, r| if r.objective > best.objective { r } else { best })
        .expect("at least one restart");

    let d = to_decomposition(&problem, &best.u)?;
    let value = average_variance(&d, a)?;
    debug_assert!((value - (problem.second_moment - best.objective)).abs() < 1e-8);
    Ok(RoofSearch {
        value,
        decomposition: d,
        converged: best.gradient_norm < tol,
        gradient_norm: best.gradient_norm,
        restarts_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluctuation::{qfi, variance};
    use crate::spinops::{spin_operators, Spin};
    use crate::states::{random_state, RandomSpec};

    fn small() -> RoofBudget {
        RoofBudget {
            restarts: 20,
            steps: 500,
            ..RoofBudget::default()
        }
    }

    #[test]
    fn pure_state_is_its_own_roof() {
        let l = spin_operators(Spin::new(2).unwrap());
        let rho = random_state(3, &RandomSpec::haar(3)).unwrap();
        let r = numeric_convex_roof(&rho, &l.z, &small()).unwrap();
        assert_eq!(r.decomposition.len(), 1);
        assert!((r.value - variance(&rho, &l.z).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_qubit_reaches_zero() {
        let l = spin_operators(Spin::half());
        let r = numeric_convex_roof(&DensityMatrix::maximally_mixed(2), &l.z, &small()).unwrap();
        assert!(r.value <= 1e-6, "{} {} {}", r.value, r.gradient_norm, r.restarts_converged);
        r.decomposition
            .check_target(&DensityMatrix::maximally_mixed(2))
            .unwrap();
    }

    #[test]
    fn rank_two_qutrit_matches_spectral_qfi() {
        let l = spin_operators(Spin::new(2).unwrap());
        let rho = random_state(3, &RandomSpec::ginibre(11, 2)).unwrap();
        let r = numeric_convex_roof(&rho, &l.z, &small()).unwrap();
        let target = qfi(&rho, &l.z).unwrap() / 4.0;
        assert!(r.value >= target - 1e-9);
        assert!(r.value - target < 1e-4, "{} vs {}", r.value, target);
        r.decomposition.check_target(&rho).unwrap();
    }

    #[test]
    fn deterministic_for_a_seed() {
        let l = spin_operators(Spin::new(2).unwrap());
        let rho = random_state(3, &RandomSpec::ginibre(2, 3)).unwrap();
        let a = numeric_convex_roof(&rho, &l.x, &small()).unwrap();
        let b = numeric_convex_roof(&rho, &l.x, &small()).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn refuses_large_dimension() {
        let l = spin_operators(Spin::new(16).unwrap());
        let rho = DensityMatrix::maximally_mixed(17);
        assert!(matches!(
            numeric_convex_roof(&rho, &l.z, &small()),
            Err(Error::DimensionCap { .. })
        ));
    }
}
