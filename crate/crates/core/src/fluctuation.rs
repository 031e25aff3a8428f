//! Variances, quantum Fisher information, and the 3×3 Fisher and covariance
//! matrices of an angular-momentum triple.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::spinops::{check_dim, Direction, HermitianOperator, SpinOperators};
use crate::states::{purity, trace_product, BlochVector, DensityMatrix};
use crate::{Error, Result, CMatrix};

/// Pairs `(k, l)` with `λk + λl` below this are skipped in spectral sums.
pub const SPECTRAL_FLOOR: f64 = 1e-12;

/// `<A^2> - <A>^2`, clamped at zero.
pub fn variance(rho: &DensityMatrix, a: &HermitianOperator) -> Result<f64> {
    check_dim(rho.dim(), a.dim())?;
    let mean = trace_product(rho.matrix(), a.matrix());
    let a2 = a.matrix() * a.matrix();
    let second = trace_product(rho.matrix(), &a2);
    Ok((second - mean * mean).max(0.0))
}

/// Operator expressed in the eigenbasis of `rho`.
fn in_eigenbasis(rho: &DensityMatrix, a: &HermitianOperator) -> CMatrix {
    let v = rho.eigenvectors();
    v.adjoint() * a.matrix() * v
}

/// Weights `2 (λk - λl)^2 / (λk + λl)` of the spectral sum.
fn spectral_weights(rho: &DensityMatrix) -> Vec<(usize, usize, f64)> {
    let lambda = rho.eigenvalues();
    let mut out = Vec::new();
    for (k, &lk) in lambda.iter().enumerate() {
        for (l, &ll) in lambda.iter().enumerate().skip(k + 1) {
            let sum = lk + ll;
            if sum < SPECTRAL_FLOOR {
                continue;
            }
            let diff = lk - ll;
            // (k, l) and (l, k) contribute equally
            out.push((k, l, 4.0 * diff * diff / sum));
        }
    }
    out
}

/// QFI for the unitary family `exp(-iAθ) ρ exp(iAθ)`:
/// `2 Σ_{k,l} (λk-λl)^2/(λk+λl) |<Φk|A|Φl>|^2`.
pub fn qfi(rho: &DensityMatrix, a: &HermitianOperator) -> Result<f64> {
    check_dim(rho.dim(), a.dim())?;
    let m = in_eigenbasis(rho, a);
    let value = spectral_weights(rho)
        .into_iter()
        .map(|(k, l, w)| w * m[(k, l)].norm_sqr())
        .sum::<f64>();
    Ok(value.max(0.0))
}

/// Qubit QFI for rotations about `n`: `|r|^2 - (n·r)^2`.
pub fn qfi_bloch_unitary(r: &BlochVector, n: &Direction) -> f64 {
    (r.norm_squared() - n.dot(r.vector()).powi(2)).max(0.0)
}

/// A Bloch vector together with its derivative along a parameter.
#[derive(Clone, Copy, Debug)]
pub struct TangentBloch {
    pub r: BlochVector,
    pub dr: Vector3<f64>,
}

impl TangentBloch {
    /// Tangent of the rotation generated by `L_n`: `dr = n × r`.
    pub fn rotation(r: BlochVector, n: &Direction) -> Self {
        Self {
            dr: n.vector().cross(r.vector()),
            r,
        }
    }
}

/// `|r| >= SURFACE_THRESHOLD` selects the pure-state branch.
pub const SURFACE_THRESHOLD: f64 = 1.0 - 1e-9;

/// Qubit QFI along an arbitrary curve of Bloch vectors:
/// `|dr|^2 + (dr·r)^2 / (1 - |r|^2)` inside the ball, `|dr|^2` on the surface.
pub fn qfi_bloch_curve(t: &TangentBloch) -> Result<f64> {
    let r = t.r.vector();
    let radial = t.dr.dot(r);
    let norm = t.r.norm();
    if norm >= SURFACE_THRESHOLD {
        if radial.abs() > 1e-10 {
            return Err(Error::InconsistentTangent(radial));
        }
        return Ok(t.dr.norm_squared());
    }
    Ok(t.dr.norm_squared() + radial * radial / (1.0 - r.norm_squared()))
}

macro_rules! symmetric3 {
    ($name:ident) => {
        #[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
        pub struct $name(pub Matrix3<f64>);

        impl $name {
            pub fn matrix(&self) -> &Matrix3<f64> {
                &self.0
            }

            /// `nᵀ M n`.
            pub fn quadratic(&self, n: &Direction) -> f64 {
                n.vector().dot(&(self.0 * n.vector()))
            }

            pub fn trace(&self) -> f64 {
                self.0.trace()
            }

            /// Eigenvalues ascending, with matching unit eigenvectors.
            pub fn eigen(&self) -> ([f64; 3], [Vector3<f64>; 3]) {
                let e = SymmetricEigen::new(self.0);
                let mut order = [0usize, 1, 2];
                order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
                (
                    order.map(|i| e.eigenvalues[i]),
                    order.map(|i| e.eigenvectors.column(i).into_owned()),
                )
            }
        }
    };
}

symmetric3!(FisherMatrix);
symmetric3!(CovarianceMatrix);

/// `F_ij = 2 Σ (λk-λl)^2/(λk+λl) Re(<Φk|Li|Φl><Φl|Lj|Φk>)`.
pub fn fisher_matrix(rho: &DensityMatrix, l: &SpinOperators) -> Result<FisherMatrix> {
    check_dim(rho.dim(), l.dim())?;
    let parts = l.components().map(|op| in_eigenbasis(rho, op));
    let weights = spectral_weights(rho);
    let mut f = Matrix3::zeros();
    for i in 0..3 {
        for j in i..3 {
            let value: f64 = weights
                .iter()
                .map(|&(k, m, w)| w * (parts[i][(k, m)] * parts[j][(m, k)]).re)
                .sum();
            f[(i, j)] = value;
            f[(j, i)] = value;
        }
    }
    Ok(FisherMatrix(f))
}

/// `Γ_ij = <LiLj + LjLi>/2 - <Li><Lj>`.
pub fn covariance_matrix(rho: &DensityMatrix, l: &SpinOperators) -> Result<CovarianceMatrix> {
    check_dim(rho.dim(), l.dim())?;
    let ops = l.components();
    let means = ops.map(|op| trace_product(rho.matrix(), op.matrix()));
    let mut g = Matrix3::zeros();
    for i in 0..3 {
        for j in i..3 {
            let prod: CMatrix = ops[i].matrix() * ops[j].matrix();
            // Re Tr(ρ LiLj) equals Tr(ρ (LiLj + LjLi)/2) for Hermitian ρ, Li, Lj.
            let value = trace_product(rho.matrix(), &prod) - means[i] * means[j];
            g[(i, j)] = value;
            g[(j, i)] = value;
        }
    }
    Ok(CovarianceMatrix(g))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PurityGap {
    /// `Var - F_Q/4`.
    pub gap: f64,
    /// `(1 - Trρ^2)/2 · (λmax(A) - λmin(A))^2`.
    pub bound: f64,
}

pub fn purity_gap_bound(rho: &DensityMatrix, a: &HermitianOperator) -> Result<PurityGap> {
    let gap = variance(rho, a)? - qfi(rho, a)? / 4.0;
    let spread = a.spread();
    Ok(PurityGap {
        gap,
        bound: (1.0 - purity(rho)) / 2.0 * spread * spread,
    })
}

/// Quantum Cramér-Rao floor `1/F_Q` on the estimator variance.
pub fn crb_from_qfi(qfi: f64) -> Result<f64> {
    if qfi <= 1e-12 {
        return Err(Error::ZeroQfi(qfi));
    }
    Ok(1.0 / qfi)
}
