//! JSON forms of states and decompositions.
//!
//! A density matrix is `{"dim": d, "re": [[..]], "im": [[..]]}` with rows in
//! order. A decomposition is
//! `{"weights": [..], "states": [{"re": [..], "im": [..]}, ..]}`.

use serde::{Deserialize, Serialize};

use crate::roofs::{Decomposition, Element};
use crate::states::{DensityMatrix, PureState};
use crate::{Error, Result, CMatrix, CVector, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&DensityMatrix> for DensityJson {
    fn from(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let rows = |f: fn(&C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            dim: rho.dim(),
            re: rows(|c| c.re),
            im: rows(|c| c.im),
        }
    }
}

impl DensityJson {
    /// Validates shape and then the density-matrix conditions.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        let d = self.dim;
        let shaped = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if d == 0 || !shaped(&self.re) || !shaped(&self.im) {
            return Err(Error::Malformed(format!(
                "expected {d}x{d} arrays for \"re\" and \"im\""
            )));
        }
        if self.re.iter().chain(&self.im).flatten().any(|x| !x.is_finite()) {
            return Err(Error::Malformed("non-finite matrix entry".into()));
        }
        DensityMatrix::new(CMatrix::from_fn(d, d, |i, j| {
            C64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&DensityJson::from(rho)).expect("plain data serializes")
}

pub fn density_from_json(text: &str) -> Result<DensityMatrix> {
    serde_json::from_str::<DensityJson>(text)?.to_density()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&PureState> for StateJson {
    fn from(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        Self {
            re: a.iter().map(|c| c.re).collect(),
            im: a.iter().map(|c| c.im).collect(),
        }
    }
}

impl StateJson {
    pub fn to_state(&self) -> Result<PureState> {
        if self.re.len() != self.im.len() || self.re.is_empty() {
            return Err(Error::Malformed(
                "\"re\" and \"im\" must be nonempty and equally long".into(),
            ));
        }
        let v = CVector::from_iterator(
            self.re.len(),
            self.re.iter().zip(&self.im).map(|(&r, &i)| C64::new(r, i)),
        );
        PureState::new(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub weights: Vec<f64>,
    pub states: Vec<StateJson>,
}

impl From<&Decomposition> for DecompositionJson {
    fn from(d: &Decomposition) -> Self {
        Self {
            weights: d.elements().iter().map(|e| e.weight).collect(),
            states: d.elements().iter().map(|e| StateJson::from(&e.state)).collect(),
        }
    }
}

impl DecompositionJson {
    pub fn to_decomposition(&self) -> Result<Decomposition> {
        if self.weights.len() != self.states.len() {
            return Err(Error::Malformed(format!(
                "{} weights for {} states",
                self.weights.len(),
                self.states.len()
            )));
        }
        let elements = self
            .weights
            .iter()
            .zip(&self.states)
            .map(|(&weight, s)| {
                Ok(Element {
                    weight,
                    state: s.to_state()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Decomposition::new(elements)
    }
}

pub fn decomposition_to_json(d: &Decomposition) -> String {
    serde_json::to_string(&DecompositionJson::from(d)).expect("plain data serializes")
}

pub fn decomposition_from_json(text: &str) -> Result<Decomposition> {
    serde_json::from_str::<DecompositionJson>(text)?.to_decomposition()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roofs::chord::minimal_decomposition;
    use crate::spinops::Direction;
    use crate::states::{random_state, BlochVector, RandomSpec};

    #[test]
    fn density_round_trip() {
        let rho = random_state(3, &RandomSpec::ginibre(4, 2)).unwrap();
        let back = density_from_json(&density_to_json(&rho)).unwrap();
        assert!(back.distance(rho.matrix()) < 1e-15);
    }

    #[test]
    fn density_rejects_bad_input() {
        let bad_trace = r#"{"dim":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}"#;
        assert!(matches!(density_from_json(bad_trace), Err(Error::Trace(_))));
        let bad_shape = r#"{"dim":2,"re":[[1,0]],"im":[[0,0],[0,0]]}"#;
        assert!(matches!(density_from_json(bad_shape), Err(Error::Malformed(_))));
        assert!(matches!(density_from_json("{"), Err(Error::Json(_))));
    }

    #[test]
    fn decomposition_round_trip() {
        let t = BlochVector::from_xyz(0.5, 0.0, 0.0).unwrap();
        let d = minimal_decomposition(&t, &Direction::z())
            .unwrap()
            .to_decomposition();
        let text = decomposition_to_json(&d);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["weights"].as_array().unwrap().len(), 2);
        let back = decomposition_from_json(&text).unwrap();
        for (a, b) in back.elements().iter().zip(d.elements()) {
            assert!((a.weight - b.weight).abs() < 1e-15);
            assert!((a.state.amplitudes() - b.state.amplitudes()).camax() < 1e-15);
        }
    }
}
