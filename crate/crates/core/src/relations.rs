//! Uncertainty relations evaluated on concrete states, and the constants
//! `c(s)` bounding `Var(L_x) + Var(L_y)` from below.

use rayon::prelude::*;
use serde::Serialize;

use crate::fluctuation::{qfi, variance};
use crate::rng::{gaussian_vector, stream};
use crate::spinops::{check_dim, spin_operators, Direction, HermitianOperator, Spin, Triad};
use crate::states::{density_to_bloch, purity, DensityMatrix, PureState};
use crate::{Error, Result, CMatrix, CVector, C64};

/// Slack allowed on inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-9;
/// Slack allowed on equalities.
pub const EQUALITY_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// `lhs = rhs`
    Equality,
    /// `lhs ≥ rhs`
    AtLeast,
    /// `lhs ≤ rhs`
    AtMost,
}

/// One evaluated relation. `residual = lhs - rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub residual: f64,
    #[serde(skip)]
    pub kind: Kind,
}

impl RelationReport {
    pub fn new(name: impl Into<String>, kind: Kind, lhs: f64, rhs: f64) -> Self {
        let residual = lhs - rhs;
        let satisfied = match kind {
            Kind::Equality => residual.abs() <= EQUALITY_SLACK,
            Kind::AtLeast => residual >= -INEQUALITY_SLACK,
            Kind::AtMost => residual <= INEQUALITY_SLACK,
        };
        Self {
            name: name.into(),
            lhs,
            rhs,
            satisfied,
            residual,
            kind,
        }
    }
}

/// `⟨i[A,B]⟩`, real for Hermitian `A`, `B`.
fn commutator_expectation(rho: &DensityMatrix, a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    let c = a.commutator(b)? * C64::i();
    Ok((rho.matrix() * c).trace().re)
}

/// `Var(A) Var(B) ≥ ⟨i[A,B]⟩²/4`.
pub fn check_robertson(
    rho: &DensityMatrix,
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<RelationReport> {
    check_dim(rho.dim(), a.dim())?;
    let lhs = variance(rho, a)? * variance(rho, b)?;
    let rhs = commutator_expectation(rho, a, b)?.powi(2) / 4.0;
    Ok(RelationReport::new("robertson.var", Kind::AtLeast, lhs, rhs))
}

/// `F_Q[A] Var(B) ≥ ⟨i[A,B]⟩²`, together with the check that its left side
/// never exceeds four times the variance form.
pub fn check_robertson_qfi(
    rho: &DensityMatrix,
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<Vec<RelationReport>> {
    check_dim(rho.dim(), a.dim())?;
    let var_b = variance(rho, b)?;
    let lhs = qfi(rho, a)? * var_b;
    let rhs = commutator_expectation(rho, a, b)?.powi(2);
    let four_var = 4.0 * variance(rho, a)? * var_b;
    Ok(vec![
        RelationReport::new("robertson.qfi", Kind::AtLeast, lhs, rhs),
        RelationReport::new("robertson.qfi_tighter", Kind::AtMost, lhs, four_var),
    ])
}

fn axes(rho: &DensityMatrix, s: Spin, dirs: &[Direction]) -> Result<Vec<HermitianOperator>> {
    check_dim(s.dim(), rho.dim())?;
    let l = spin_operators(s);
    Ok(dirs.iter().map(|n| l.along(n)).collect())
}

/// `Var(L1) + Var(L2) + Var(L3) ≥ s`.
pub fn check_sum3(rho: &DensityMatrix, triad: &Triad, s: Spin) -> Result<RelationReport> {
    let l = axes(rho, s, &triad.directions())?;
    let lhs = variance(rho, &l[0])? + variance(rho, &l[1])? + variance(rho, &l[2])?;
    Ok(RelationReport::new("sum3.var", Kind::AtLeast, lhs, s.s()))
}

/// `F_Q[L1]/4 + Var(L2) + Var(L3) ≥ s`.
pub fn check_sum3_qfi(rho: &DensityMatrix, triad: &Triad, s: Spin) -> Result<RelationReport> {
    let l = axes(rho, s, &triad.directions())?;
    let lhs = qfi(rho, &l[0])? / 4.0 + variance(rho, &l[1])? + variance(rho, &l[2])?;
    Ok(RelationReport::new("sum3.qfi", Kind::AtLeast, lhs, s.s()))
}

fn check_orthogonal(n1: &Direction, n2: &Direction) -> Result<()> {
    let overlap = n1.dot(n2.vector());
    if overlap.abs() > Triad::TOL {
        return Err(Error::NotOrthogonal(overlap));
    }
    Ok(())
}

/// `Var(L1) + Var(L2) ≥ c(s)` for orthogonal `n1`, `n2`.
pub fn check_sum2(
    rho: &DensityMatrix,
    n1: &Direction,
    n2: &Direction,
    s: Spin,
    c: f64,
) -> Result<RelationReport> {
    check_orthogonal(n1, n2)?;
    let l = axes(rho, s, &[*n1, *n2])?;
    let lhs = variance(rho, &l[0])? + variance(rho, &l[1])?;
    Ok(RelationReport::new("sum2.var", Kind::AtLeast, lhs, c))
}

/// `F_Q[L1]/4 + Var(L2) ≥ c(s)` for orthogonal `n1`, `n2`.
pub fn check_sum2_qfi(
    rho: &DensityMatrix,
    n1: &Direction,
    n2: &Direction,
    s: Spin,
    c: f64,
) -> Result<RelationReport> {
    check_orthogonal(n1, n2)?;
    let l = axes(rho, s, &[*n1, *n2])?;
    let lhs = qfi(rho, &l[0])? / 4.0 + variance(rho, &l[1])?;
    Ok(RelationReport::new("sum2.qfi", Kind::AtLeast, lhs, c))
}

fn busch_rhs(a: &Direction, b: &Direction) -> f64 {
    (1.0 - a.dot(b.vector()).abs()) / 4.0
}

/// `Var(La) + Var(Lb) ≥ (1 - |a·b|)/4` for a qubit.
pub fn check_busch(rho: &DensityMatrix, a: &Direction, b: &Direction) -> Result<RelationReport> {
    let l = axes(rho, Spin::half(), &[*a, *b])?;
    let lhs = variance(rho, &l[0])? + variance(rho, &l[1])?;
    Ok(RelationReport::new("busch.var", Kind::AtLeast, lhs, busch_rhs(a, b)))
}

/// `F_Q[La]/4 + Var(Lb) ≥ (1 - |a·b|)/4` for a qubit.
pub fn check_busch_qfi(rho: &DensityMatrix, a: &Direction, b: &Direction) -> Result<RelationReport> {
    let l = axes(rho, Spin::half(), &[*a, *b])?;
    let lhs = qfi(rho, &l[0])? / 4.0 + variance(rho, &l[1])?;
    Ok(RelationReport::new("busch.qfi", Kind::AtLeast, lhs, busch_rhs(a, b)))
}

/// Per-axis `(Var, F_Q/4)` of a qubit along a triad.
fn qubit_fluctuations(rho: &DensityMatrix, dirs: &[Direction]) -> Result<Vec<(f64, f64)>> {
    let l = axes(rho, Spin::half(), dirs)?;
    l.iter()
        .map(|op| Ok((variance(rho, op)?, qfi(rho, op)? / 4.0)))
        .collect()
}

/// The four purity identities of a qubit, replacing successively more
/// variances by `F_Q/4`:
///
/// * `V1 + V2 + V3 = 1 - Trρ²/2`
/// * `Q1 + V2 + V3 = 1/2`
/// * `Q1 + Q2 + V3 = Trρ²/2`
/// * `Q1 + Q2 + Q3 = Trρ² - 1/2`
pub fn qubit_equalities(rho: &DensityMatrix, triad: &Triad) -> Result<Vec<RelationReport>> {
    let f = qubit_fluctuations(rho, &triad.directions())?;
    let p = purity(rho);
    let (v, q): (Vec<f64>, Vec<f64>) = f.into_iter().unzip();
    Ok(vec![
        RelationReport::new("qubit.var3", Kind::Equality, v[0] + v[1] + v[2], 1.0 - p / 2.0),
        RelationReport::new("qubit.qfi1_var2", Kind::Equality, q[0] + v[1] + v[2], 0.5),
        RelationReport::new("qubit.qfi2_var1", Kind::Equality, q[0] + q[1] + v[2], p / 2.0),
        RelationReport::new("qubit.qfi3", Kind::Equality, q[0] + q[1] + q[2], p - 0.5),
    ])
}

/// Purity-dependent two-sided bounds on pairs of qubit fluctuations along
/// orthogonal `n1`, `n2`:
///
/// * `1/2 - |r|²/4 ≤ V1 + V2 ≤ 1/2`
/// * `1/4 ≤ Q1 + V2 ≤ (1 + |r|²)/4`
/// * `|r|²/4 ≤ Q1 + Q2 ≤ |r|²/2`
pub fn purity_band(rho: &DensityMatrix, n1: &Direction, n2: &Direction) -> Result<Vec<RelationReport>> {
    check_orthogonal(n1, n2)?;
    let f = qubit_fluctuations(rho, &[*n1, *n2])?;
    let r2 = density_to_bloch(rho)?.norm_squared();
    let vv = f[0].0 + f[1].0;
    let qv = f[0].1 + f[1].0;
    let qq = f[0].1 + f[1].1;
    let band = |name: &str, value: f64, lo: f64, hi: f64| {
        [
            RelationReport::new(format!("band.{name}.lower"), Kind::AtLeast, value, lo),
            RelationReport::new(format!("band.{name}.upper"), Kind::AtMost, value, hi),
        ]
    };
    let mut out = Vec::with_capacity(6);
    out.extend(band("var2", vv, 0.5 - r2 / 4.0, 0.5));
    out.extend(band("qfi1_var1", qv, 0.25, (1.0 + r2) / 4.0));
    out.extend(band("qfi2", qq, r2 / 4.0, r2 / 2.0));
    Ok(out)
}

/// Numerically determined `c(s)`.
#[derive(Clone, Debug, Serialize)]
pub struct CsResult {
    pub s: Spin,
    pub c: f64,
    #[serde(skip)]
    pub argmin_state: PureState,
    /// `(iteration, value)` along the best restart.
    pub optimizer_trace: Vec<(usize, f64)>,
    /// Riemannian gradient norm at the reported minimum.
    pub gradient_norm: f64,
    /// Whether the best restart reached the gradient tolerance.
    pub converged: bool,
}

/// Largest spin dimension accepted by [`compute_c`].
pub const MAX_CS_DIM: usize = 201;
const CS_STEPS: usize = 20_000;
/// Gradient tolerance per unit of `1 + s²`, the scale of the operators.
const CS_TOL: f64 = 2e-8;
/// Iterations between checks that the value is still decreasing.
const STALL_WINDOW: usize = 200;
const TRACE_EVERY: usize = 50;

/// `f(ψ) = Var(Lx) + Var(Ly)` and its Riemannian gradient on the sphere.
struct SumVariance {
    lx: CMatrix,
    ly: CMatrix,
}

impl SumVariance {
    fn new(s: Spin) -> Self {
        let l = spin_operators(s);
        Self {
            lx: l.x.matrix().clone(),
            ly: l.y.matrix().clone(),
        }
    }

    /// `(f, ⟨Lx⟩, ⟨Ly⟩)`. Each variance is taken as `|(L - ⟨L⟩)ψ|²`, which
    /// avoids cancelling two terms of order `s²`.
    fn value(&self, psi: &CVector) -> (f64, f64, f64) {
        let lx = &self.lx * psi;
        let ly = &self.ly * psi;
        let ex = psi.dotc(&lx).re;
        let ey = psi.dotc(&ly).re;
        let vx = (lx - psi * C64::from(ex)).norm_squared();
        let vy = (ly - psi * C64::from(ey)).norm_squared();
        (vx + vy, ex, ey)
    }

    /// `2 (K - ⟨K⟩) ψ` with `K = (Lx - ⟨Lx⟩)² + (Ly - ⟨Ly⟩)²`.
    fn gradient(&self, psi: &CVector, ex: f64, ey: f64) -> CVector {
        let shifted = |l: &CMatrix, e: f64| {
            let u = l * psi - psi * C64::from(e);
            l * &u - u * C64::from(e)
        };
        let k = shifted(&self.lx, ex) + shifted(&self.ly, ey);
        let along = psi.dotc(&k).re;
        (k - psi * C64::from(along)) * C64::from(2.0)
    }
}

struct Descent {
    psi: CVector,
    value: f64,
    gradient_norm: f64,
    iterations: usize,
    trace: Vec<(usize, f64)>,
}

fn descend(f: &SumVariance, mut psi: CVector, tol: f64) -> Descent {
    let (mut value, ex, ey) = f.value(&psi);
    let mut g = f.gradient(&psi, ex, ey);
    let mut norm2 = g.norm_squared();
    let mut step = 0.1;
    let mut trace = vec![(0, value)];
    let mut iterations = 0;
    let mut checkpoint = value;
    for it in 1..=CS_STEPS {
        if norm2.sqrt() < tol {
            break;
        }
        if it % STALL_WINDOW == 0 {
            if checkpoint - value <= 1e-15 * value.abs() {
                break;
            }
            checkpoint = value;
        }
        iterations = it;
        let mut accepted = None;
        while step > 1e-16 {
            let trial = (&psi - &g * C64::from(step)).normalize();
            let (v, tx, ty) = f.value(&trial);
            if v <= value - 1e-4 * step * norm2 {
                accepted = Some((trial, v, tx, ty));
                break;
            }
            step *= 0.5;
        }
        let Some((next, v, tx, ty)) = accepted else {
            break;
        };
        let next_g = f.gradient(&next, tx, ty);
        let s = &next - &psi;
        let y = &next_g - &g;
        let ss = s.norm_squared();
        let sy = s.dotc(&y).re.abs();
        step = if sy > f64::MIN_POSITIVE { (ss / sy).clamp(1e-8, 1e8) } else { 2.0 * step };
        (psi, value, g) = (next, v, next_g);
        norm2 = g.norm_squared();
        if it % TRACE_EVERY == 0 {
            trace.push((it, value));
        }
    }
    Descent {
        psi,
        value,
        gradient_norm: norm2.sqrt(),
        iterations,
        trace,
    }
}

/// `min_ψ Var(Lx) + Var(Ly)` over pure spin-`s` states, by projected
/// gradient descent from `restarts` random starts.
pub fn compute_c(s: Spin, restarts: usize, seed: u64) -> Result<CsResult> {
    if s.dim() > MAX_CS_DIM {
        return Err(Error::DimensionCap {
            dim: s.dim(),
            cap: MAX_CS_DIM,
        });
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter("at least one restart".into()));
    }
    let f = SumVariance::new(s);
    let tol = CS_TOL * (1.0 + s.s() * s.s());
    let runs: Vec<Descent> = (0..restarts as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = stream(seed, index);
            descend(&f, gaussian_vector(&mut rng, s.dim()).normalize(), tol)
        })
        .collect();
    let best = runs
        .into_iter()
        .reduce(|best, r| if r.value < best.value { r } else { best })
        .expect("at least one restart");
    let mut trace = best.trace;
    if trace.last().map(|&(it, _)| it) != Some(best.iterations) {
        trace.push((best.iterations, best.value));
    }
    Ok(CsResult {
        s,
        c: best.value.max(0.0),
        argmin_state: PureState::normalized(best.psi)?,
        optimizer_trace: trace,
        gradient_norm: best.gradient_norm,
        converged: best.gradient_norm < tol,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::InvalidParameter(
            "slope needs two or more positive points".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all abscissae coincide".into()));
    }
    Ok(sxy / sxx)
}
