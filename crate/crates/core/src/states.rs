//! Density matrices, pure states and Bloch vectors, plus the named states
//! used throughout the crate (Dicke, product, anticoherent, diagonal spin-1).

use nalgebra::{SymmetricEigen, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::spinops::{
    check_dim, hermitian_deviation, kron, qubit_space_dim, spin_operators, symmetrized,
    HermitianOperator, Spin,
};
use crate::{Error, Result, C64, CMatrix, CVector, DIMENSION_CAP, HERMITIAN_TOL};

/// Trace tolerance accepted on construction.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-EIGEN_FLOOR, 0)` are treated as roundoff and clamped.
pub const EIGEN_FLOOR: f64 = 1e-10;

/// A positive-semidefinite unit-trace matrix with its cached spectrum.
///
/// Eigenvalues are ascending; column `k` of `eigenvectors` belongs to
/// `eigenvalues[k]`.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    entries: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Malformed("non-finite matrix entry".into()));
        }
        let deviation = hermitian_deviation(&entries);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian(deviation));
        }
        let trace = entries.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::Trace(trace));
        }
        let entries = symmetrized(entries);
        let eigen = SymmetricEigen::new(entries.clone());
        let mut order: Vec<usize> = (0..entries.nrows()).collect();
        order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));

        let mut eigenvalues = Vec::with_capacity(order.len());
        for &k in &order {
            let value = eigen.eigenvalues[k];
            if value < -EIGEN_FLOOR {
                return Err(Error::NotPositive(value));
            }
            eigenvalues.push(value.max(0.0));
        }
        let total: f64 = eigenvalues.iter().sum();
        eigenvalues.iter_mut().for_each(|v| *v /= total);
        let eigenvectors = eigen.eigenvectors.select_columns(&order);
        Ok(Self {
            entries,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(CMatrix::identity(dim, dim) * C64::from(1.0 / dim as f64))
            .expect("identity over dim is a state")
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be non-negative and sum to 1.
    pub fn mixture<'a, I>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a DensityMatrix)>,
    {
        let mut acc: Option<CMatrix> = None;
        for (w, rho) in parts {
            if w.is_nan() || w < 0.0 {
                return Err(Error::InvalidParameter(format!("negative weight {w}")));
            }
            let term = rho.matrix() * C64::from(w);
            acc = Some(match acc {
                None => term,
                Some(a) => {
                    check_dim(a.nrows(), term.nrows())?;
                    a + term
                }
            });
        }
        let m = acc.ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// `Tr(ρA)`.
    pub fn expectation(&self, a: &HermitianOperator) -> Result<f64> {
        check_dim(self.dim(), a.dim())?;
        Ok(trace_product(&self.entries, a.matrix()))
    }

    /// Largest entry magnitude of `[ρ, A]`.
    pub fn commutator_norm(&self, a: &HermitianOperator) -> Result<f64> {
        check_dim(self.dim(), a.dim())?;
        let c = &self.entries * a.matrix() - a.matrix() * &self.entries;
        Ok(c.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let dim = self.dim() * other.dim();
        if dim > DIMENSION_CAP {
            return Err(Error::DimensionCap {
                dim,
                cap: DIMENSION_CAP,
            });
        }
        DensityMatrix::new(kron(&self.entries, &other.entries))
    }

    /// Largest entry deviation from another matrix of the same size.
    pub fn distance(&self, other: &CMatrix) -> f64 {
        if other.shape() != self.entries.shape() {
            return f64::INFINITY;
        }
        (&self.entries - other)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (purity(self) - 1.0).abs() <= tol
    }
}

/// `Re Tr(AB)` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(amplitudes: CVector) -> Result<Self> {
        let sq = amplitudes.norm_squared();
        if (sq - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized(sq));
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            amplitudes: amplitudes / C64::from(norm),
        })
    }

    /// Basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = C64::from(1.0);
        Self { amplitudes: v }
    }

    /// Qubit state with unit Bloch vector `r`:
    /// `cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>`.
    pub fn from_bloch(r: &BlochVector) -> Result<Self> {
        let norm = r.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::MixedFactor { index: 0, norm });
        }
        let v = r.vector() / norm;
        let theta = v.z.clamp(-1.0, 1.0).acos();
        let phi = v.y.atan2(v.x);
        Ok(Self {
            amplitudes: CVector::from_vec(vec![
                C64::from((theta / 2.0).cos()),
                C64::from_polar((theta / 2.0).sin(), phi),
            ]),
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `|ψ><ψ|` as a matrix.
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::new(self.projector()).expect("projector of a unit vector is a state")
    }

    pub fn expectation(&self, a: &HermitianOperator) -> Result<f64> {
        check_dim(self.dim(), a.dim())?;
        Ok(a.expectation_pure(&self.amplitudes))
    }

    /// `<A^2> - <A>^2`, clamped at zero.
    pub fn variance(&self, a: &HermitianOperator) -> Result<f64> {
        check_dim(self.dim(), a.dim())?;
        let applied = a.matrix() * &self.amplitudes;
        let mean = self.amplitudes.dotc(&applied).re;
        let second = applied.norm_squared();
        Ok((second - mean * mean).max(0.0))
    }

    /// Bloch vector of a qubit state.
    pub fn bloch(&self) -> Result<BlochVector> {
        check_dim(2, self.dim())?;
        let (a, b) = (self.amplitudes[0], self.amplitudes[1]);
        let cross = a.conj() * b;
        Ok(BlochVector(Vector3::new(
            2.0 * cross.re,
            2.0 * cross.im,
            a.norm_sqr() - b.norm_sqr(),
        )))
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

/// A real 3-vector of length at most one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector(Vector3<f64>);

impl BlochVector {
    pub const LENGTH_TOL: f64 = 1e-12;

    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm > 1.0 + Self::LENGTH_TOL {
            return Err(Error::BlochLength(norm));
        }
        Ok(Self(v))
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vector3::new(x, y, z))
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }
}

impl TryFrom<[f64; 3]> for BlochVector {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        BlochVector::new(Vector3::from(v))
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(b: BlochVector) -> [f64; 3] {
        b.0.into()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    /// Unitarily invariant pure states.
    HaarPure,
    /// `G†G / Tr(G†G)` with `G` a `rank × dim` complex Ginibre matrix.
    GinibreMixed { rank: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub seed: u64,
    pub measure: Measure,
}

impl RandomSpec {
    pub fn haar(seed: u64) -> Self {
        Self {
            seed,
            measure: Measure::HaarPure,
        }
    }

    pub fn ginibre(seed: u64, rank: usize) -> Self {
        Self {
            seed,
            measure: Measure::GinibreMixed { rank },
        }
    }
}

pub fn random_state(dim: usize, spec: &RandomSpec) -> Result<DensityMatrix> {
    random_state_indexed(dim, spec, 0)
}

/// Sample `index` of the stream keyed by `spec.seed`.
pub fn random_state_indexed(dim: usize, spec: &RandomSpec, index: u64) -> Result<DensityMatrix> {
    let mut rng = rng::stream(spec.seed, index);
    sample_state(dim, spec.measure, &mut rng)
}

pub fn sample_state<R: Rng + ?Sized>(
    dim: usize,
    measure: Measure,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("dimension {dim} < 2")));
    }
    match measure {
        Measure::HaarPure => Ok(sample_pure(dim, rng).to_density()),
        Measure::GinibreMixed { rank } => {
            if rank == 0 || rank > dim {
                return Err(Error::Rank { rank, dim });
            }
            let g = rng::gaussian_matrix(rng, rank, dim);
            let m = g.adjoint() * g;
            let trace = m.trace().re;
            DensityMatrix::new(symmetrized(m / C64::from(trace)))
        }
    }
}

pub fn sample_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        if let Ok(psi) = PureState::normalized(rng::gaussian_vector(rng, dim)) {
            return psi;
        }
    }
}

pub fn bloch_to_density(r: &BlochVector) -> DensityMatrix {
    let v = r.vector();
    let half = C64::from(0.5);
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            half * (1.0 + v.z),
            C64::new(v.x, -v.y) * half,
            C64::new(v.x, v.y) * half,
            half * (1.0 - v.z),
        ],
    );
    DensityMatrix::new(m).expect("Bloch vector within the ball gives a state")
}

/// `r_k = Tr(ρ σ_k)`.
pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    check_dim(2, rho.dim())?;
    let m = rho.matrix();
    let v = Vector3::new(
        2.0 * m[(1, 0)].re,
        2.0 * m[(1, 0)].im,
        m[(0, 0)].re - m[(1, 1)].re,
    );
    // A valid state can exceed unit length only by roundoff.
    let norm = v.norm();
    Ok(BlochVector(if norm > 1.0 { v / norm } else { v }))
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues().iter().map(|l| l * l).sum()
}

/// Symmetric `N`-qubit state with `n_up` qubits in `|0>`.
pub fn dicke_state(n_qubits: usize, n_up: usize) -> Result<DensityMatrix> {
    Ok(dicke_vector(n_qubits, n_up)?.to_density())
}

pub fn dicke_vector(n_qubits: usize, n_up: usize) -> Result<PureState> {
    if n_up > n_qubits {
        return Err(Error::InvalidParameter(format!(
            "n_up = {n_up} exceeds N = {n_qubits}"
        )));
    }
    let dim = qubit_space_dim(n_qubits)?;
    // |0> is spin up, so n_up zeros means N - n_up ones.
    let n_down = (n_qubits - n_up) as u32;
    let mut v = CVector::zeros(dim);
    for (b, amp) in v.iter_mut().enumerate() {
        if b.count_ones() == n_down {
            *amp = C64::from(1.0);
        }
    }
    PureState::normalized(v)
}

/// Isometry from the spin-`N/2` space (basis `m = N/2, ..., -N/2`) onto the
/// symmetric subspace of `N` qubits. Column `i` is the Dicke state with
/// `N - i` qubits up.
pub fn symmetric_embedding(n_qubits: usize) -> Result<CMatrix> {
    let dim = qubit_space_dim(n_qubits)?;
    let mut e = CMatrix::zeros(dim, n_qubits + 1);
    for i in 0..=n_qubits {
        let col = dicke_vector(n_qubits, n_qubits - i)?;
        e.set_column(i, col.amplitudes());
    }
    Ok(e)
}

/// Maps a spin-`N/2` state into the `N`-qubit space.
pub fn embed_symmetric(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let n_qubits = rho.dim() - 1;
    let e = symmetric_embedding(n_qubits)?;
    DensityMatrix::new(&e * rho.matrix() * e.adjoint())
}

/// Tensor product of pure qubit states, in list order.
pub fn product_state(blochs: &[BlochVector]) -> Result<DensityMatrix> {
    Ok(product_vector(blochs)?.to_density())
}

pub fn product_vector(blochs: &[BlochVector]) -> Result<PureState> {
    if blochs.is_empty() {
        return Err(Error::InvalidParameter("empty factor list".into()));
    }
    qubit_space_dim(blochs.len())?;
    let mut acc: Option<PureState> = None;
    for (index, r) in blochs.iter().enumerate() {
        let norm = r.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::MixedFactor { index, norm });
        }
        let factor = PureState::from_bloch(r)?;
        acc = Some(match acc {
            None => factor,
            Some(a) => a.tensor(&factor),
        });
    }
    Ok(acc.expect("nonempty"))
}

/// Order-2 anticoherent spin-2 state `(|2,2> + √2|2,-1>)/√3`.
pub fn tetrahedron_state() -> DensityMatrix {
    let mut v = CVector::zeros(5);
    // basis index i has m = 2 - i
    v[0] = C64::from(1.0 / 3f64.sqrt());
    v[3] = C64::from((2.0 / 3.0f64).sqrt());
    PureState::normalized(v)
        .expect("nonzero amplitudes")
        .to_density()
}

/// `diag(a, b, 1-a-b)` in the spin-1 `Lz` eigenbasis.
pub fn diagonal_spin1(a: f64, b: f64) -> Result<DensityMatrix> {
    const SLACK: f64 = 1e-12;
    if !(a >= -SLACK && b >= -SLACK && a + b <= 1.0 + SLACK) {
        return Err(Error::InvalidParameter(format!(
            "({a}, {b}) is outside the simplex a, b >= 0, a + b <= 1"
        )));
    }
    let (a, b) = (a.max(0.0), b.max(0.0));
    let c = (1.0 - a - b).max(0.0);
    let diag = CVector::from_vec(vec![C64::from(a), C64::from(b), C64::from(c)]);
    DensityMatrix::new(CMatrix::from_diagonal(&diag))
}

/// Spin-s operators matching a state's dimension.
pub fn spin_for(rho: &DensityMatrix) -> Result<Spin> {
    Spin::new(rho.dim() as u32 - 1)
}

pub fn lz_spin_one() -> HermitianOperator {
    spin_operators(Spin::new(2).expect("valid")).z
}
