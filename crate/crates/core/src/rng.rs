//! Counter-based random streams.
//!
//! Every sample is drawn from its own ChaCha stream keyed by
//! `(seed, index)`, so results never depend on iteration order or on the
//! number of worker threads.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{C64, CMatrix, CVector};

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

pub fn gaussian_vector<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    DVector::from_fn(dim, |_, _| complex_gaussian(rng))
}

pub fn gaussian_matrix<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Uniformly distributed point on the unit sphere in R^3.
pub fn unit_vector<R: rand::Rng + ?Sized>(rng: &mut R) -> nalgebra::Vector3<f64> {
    loop {
        let v = nalgebra::Vector3::from_fn(|_, _| StandardNormal.sample(rng));
        let norm: f64 = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Uniformly distributed point in the unit ball.
pub fn ball_vector<R: rand::Rng + ?Sized>(rng: &mut R) -> nalgebra::Vector3<f64> {
    let u: f64 = rng.random();
    unit_vector(rng) * u.cbrt()
}

/// Uniformly random right-handed orthonormal triad.
pub fn random_triad<R: rand::Rng + ?Sized>(rng: &mut R) -> crate::Triad {
    let n1 = unit_vector(rng);
    let n2 = loop {
        let v = unit_vector(rng);
        let w = v - n1 * n1.dot(&v);
        if w.norm() > 1e-6 {
            break w.normalize();
        }
    };
    let n3 = n1.cross(&n2);
    let dir = |v| crate::Direction::normalize(v).expect("unit vector");
    crate::Triad::new(dir(n1), dir(n2), dir(n3)).expect("orthonormal by construction")
}
