//! Angular-momentum operators for spin s and for collections of qubits.
//!
//! Single-spin operators are built from ladder operators in the `Lz`
//! eigenbasis, ordered by `m = s, s-1, ..., -s` with Condon-Shortley phases.
//! Multi-qubit operators use the full tensor-product space with qubit 0 as
//! the most significant bit and `|0>` as the `+1/2` eigenstate of `σz/2`.

use std::fmt;

use nalgebra::{SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64, CMatrix, CVector, DIMENSION_CAP, HERMITIAN_TOL};

/// A spin quantum number stored as the integer `2s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Spin {
    two_s: u32,
}

impl Spin {
    pub fn new(two_s: u32) -> Result<Self> {
        if two_s == 0 {
            return Err(Error::InvalidSpin);
        }
        Ok(Self { two_s })
    }

    pub fn half() -> Self {
        Self { two_s: 1 }
    }

    pub fn two_s(self) -> u32 {
        self.two_s
    }

    pub fn s(self) -> f64 {
        f64::from(self.two_s) / 2.0
    }

    pub fn dim(self) -> usize {
        self.two_s as usize + 1
    }

    /// `s(s+1)`, the eigenvalue of `L^2`.
    pub fn casimir(self) -> f64 {
        let s = self.s();
        s * (s + 1.0)
    }
}

impl TryFrom<u32> for Spin {
    type Error = Error;

    fn try_from(two_s: u32) -> Result<Self> {
        Spin::new(two_s)
    }
}

impl From<Spin> for u32 {
    fn from(s: Spin) -> u32 {
        s.two_s
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_s.is_multiple_of(2) {
            write!(f, "{}", self.two_s / 2)
        } else {
            write!(f, "{}/2", self.two_s)
        }
    }
}

/// A Hermitian matrix, checked on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
}

impl HermitianOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        let deviation = hermitian_deviation(&entries);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian(deviation));
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_entries_unchecked(entries: CMatrix) -> Self {
        debug_assert!(hermitian_deviation(&entries) <= HERMITIAN_TOL);
        Self { entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// `λmax - λmin`.
    pub fn spread(&self) -> f64 {
        let values = self.eigenvalues();
        values[values.len() - 1] - values[0]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: &self.entries * C64::from(factor),
        }
    }

    pub fn squared(&self) -> Self {
        Self::from_entries_unchecked(symmetrized(&self.entries * &self.entries))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<CMatrix> {
        check_dim(self.dim(), other.dim())?;
        Ok(&self.entries * &other.entries - &other.entries * &self.entries)
    }

    /// `A ⊗ 1 + 1 ⊗ B` on the tensor-product space.
    pub fn local_sum(&self, other: &Self) -> Self {
        let a = kron(&self.entries, &CMatrix::identity(other.dim(), other.dim()));
        let b = kron(&CMatrix::identity(self.dim(), self.dim()), &other.entries);
        Self { entries: a + b }
    }

    /// `<ψ|A|ψ>`; the imaginary part is dropped.
    pub fn expectation_pure(&self, psi: &CVector) -> f64 {
        psi.dotc(&(&self.entries * psi)).re
    }
}

/// A unit vector in R^3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Direction(Vector3<f64>);

impl Direction {
    pub const UNIT_TOL: f64 = 1e-12;

    /// Accepts only vectors that already have unit length.
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > Self::UNIT_TOL {
            return Err(Error::NotUnit(norm));
        }
        Ok(Self(v))
    }

    /// Normalizes any nonzero finite vector.
    pub fn normalize(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::ZeroVector);
        }
        Ok(Self(v / norm))
    }

    pub fn x() -> Self {
        Self(Vector3::x())
    }

    pub fn y() -> Self {
        Self(Vector3::y())
    }

    pub fn z() -> Self {
        Self(Vector3::z())
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn dot(&self, v: &Vector3<f64>) -> f64 {
        self.0.dot(v)
    }
}

impl TryFrom<[f64; 3]> for Direction {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        Direction::normalize(Vector3::from(v))
    }
}

impl From<Direction> for [f64; 3] {
    fn from(d: Direction) -> [f64; 3] {
        d.0.into()
    }
}

/// A right-handed orthonormal basis of R^3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triad {
    pub n1: Direction,
    pub n2: Direction,
    pub n3: Direction,
}

impl Triad {
    pub const TOL: f64 = 1e-12;

    pub fn new(n1: Direction, n2: Direction, n3: Direction) -> Result<Self> {
        let (a, b, c) = (n1.vector(), n2.vector(), n3.vector());
        let residual = [
            a.dot(b).abs(),
            a.dot(c).abs(),
            b.dot(c).abs(),
            (a.cross(b) - c).amax(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if residual > Self::TOL {
            return Err(Error::NotTriad(residual));
        }
        Ok(Self { n1, n2, n3 })
    }

    pub fn xyz() -> Self {
        Self {
            n1: Direction::x(),
            n2: Direction::y(),
            n3: Direction::z(),
        }
    }

    pub fn directions(&self) -> [Direction; 3] {
        [self.n1, self.n2, self.n3]
    }

    /// Cyclic relabeling `(n2, n3, n1)`, still right-handed.
    pub fn rotated(&self) -> Self {
        Self {
            n1: self.n2,
            n2: self.n3,
            n3: self.n1,
        }
    }
}

/// Completes `n1` to a right-handed triad.
///
/// `n2` is the coordinate axis least aligned with `n1` (first one on ties),
/// orthogonalized against `n1`; `n3 = n1 × n2`.
pub fn complete_triad(n1: Direction) -> Triad {
    let v = *n1.vector();
    let axis = (0..3)
        .min_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()))
        .expect("three axes");
    let mut e = Vector3::zeros();
    e[axis] = 1.0;
    let n2 = (e - v * v.dot(&e)).normalize();
    let n3 = v.cross(&n2).normalize();
    Triad {
        n1,
        n2: Direction(n2),
        n3: Direction(n3),
    }
}

/// The angular-momentum triple `(Lx, Ly, Lz)` on a common space.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub x: HermitianOperator,
    pub y: HermitianOperator,
    pub z: HermitianOperator,
}

impl SpinOperators {
    pub fn from_components(
        x: HermitianOperator,
        y: HermitianOperator,
        z: HermitianOperator,
    ) -> Result<Self> {
        check_dim(x.dim(), y.dim())?;
        check_dim(x.dim(), z.dim())?;
        Ok(Self { x, y, z })
    }

    /// Collective operators `Σ_i σ^(i)/2` of `n_qubits` qubits.
    pub fn collective(n_qubits: usize) -> Result<Self> {
        let half = spin_operators(Spin::half());
        Ok(Self {
            x: collective_operator(n_qubits, &half.x)?,
            y: collective_operator(n_qubits, &half.y)?,
            z: collective_operator(n_qubits, &half.z)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn components(&self) -> [&HermitianOperator; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// `L_n = nx Lx + ny Ly + nz Lz`.
    pub fn along(&self, n: &Direction) -> HermitianOperator {
        direction_operator(self, n)
    }
}

/// Spin-s operators from `L± = Lx ± iLy`,
/// `<m+1|L+|m> = sqrt(s(s+1) - m(m+1))`.
pub fn spin_operators(spin: Spin) -> SpinOperators {
    let d = spin.dim();
    let s = spin.s();
    let m_of = |i: usize| s - i as f64;
    let mut raise = CMatrix::zeros(d, d);
    for i in 1..d {
        let m = m_of(i);
        raise[(i - 1, i)] = C64::from((s * (s + 1.0) - m * (m + 1.0)).sqrt());
    }
    let lower = raise.adjoint();
    let x = (&raise + &lower) * C64::new(0.5, 0.0);
    let y = (&raise - &lower) * C64::new(0.0, -0.5);
    let z = CMatrix::from_diagonal(&CVector::from_fn(d, |i, _| C64::from(m_of(i))));
    SpinOperators {
        x: HermitianOperator::from_entries_unchecked(x),
        y: HermitianOperator::from_entries_unchecked(y),
        z: HermitianOperator::from_entries_unchecked(z),
    }
}

pub fn direction_operator(l: &SpinOperators, n: &Direction) -> HermitianOperator {
    let v = n.vector();
    let entries = l.x.matrix() * C64::from(v.x)
        + l.y.matrix() * C64::from(v.y)
        + l.z.matrix() * C64::from(v.z);
    HermitianOperator::from_entries_unchecked(entries)
}

/// `Σ_i single^(i)` over `n_qubits` qubits, each term acting on one qubit.
pub fn collective_operator(n_qubits: usize, single: &HermitianOperator) -> Result<HermitianOperator> {
    check_dim(2, single.dim())?;
    if n_qubits == 0 {
        return Err(Error::InvalidParameter("need at least one qubit".into()));
    }
    let dim = qubit_space_dim(n_qubits)?;
    let s = single.matrix();
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        for q in 0..n_qubits {
            let shift = n_qubits - 1 - q;
            let bit = (col >> shift) & 1;
            for new_bit in 0..2 {
                let row = (col & !(1 << shift)) | (new_bit << shift);
                out[(row, col)] += s[(new_bit, bit)];
            }
        }
    }
    Ok(HermitianOperator::from_entries_unchecked(out))
}

/// `2^n`, refusing anything above [`DIMENSION_CAP`].
pub fn qubit_space_dim(n_qubits: usize) -> Result<usize> {
    if n_qubits >= usize::BITS as usize - 1 || (1usize << n_qubits) > DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dim: 1usize.checked_shl(n_qubits as u32).unwrap_or(usize::MAX),
            cap: DIMENSION_CAP,
        });
    }
    Ok(1 << n_qubits)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn symmetrized(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()) * C64::from(0.5)
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
