//! JSON formats for measurements, configurations and states.
//!
//! Complex matrices are stored as separate `re` and `im` row-major nested
//! arrays. Floats are written in the shortest form that parses back to the
//! identical value, so files round-trip exactly.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{GeamError, Result};
use crate::geam::Geam;
use crate::linalg::{c64, CMatrix};
use crate::states::DensityMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |f: fn(&num_complex::Complex64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        let shape_ok = self.im.len() == n
            && self.re.iter().all(|r| r.len() == cols)
            && self.im.iter().all(|r| r.len() == cols);
        if !shape_ok || n == 0 {
            return Err(GeamError::Serialization(
                "re and im must be non-empty arrays of equal-length rows with matching shapes"
                    .into(),
            ));
        }
        Ok(CMatrix::from_fn(n, cols, |i, j| c64(self.re[i][j], self.im[i][j])))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameJson {
    pub gamma: f64,
    pub operators: Vec<MatrixJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeamJson {
    pub dim: usize,
    pub frames: Vec<FrameJson>,
}

impl GeamJson {
    pub fn from_geam(geam: &Geam) -> Self {
        Self {
            dim: geam.dim,
            frames: geam
                .frames
                .iter()
                .map(|f| FrameJson {
                    gamma: f.gamma,
                    operators: f.operators.iter().map(MatrixJson::from_matrix).collect(),
                })
                .collect(),
        }
    }

    pub fn to_geam(&self) -> Result<Geam> {
        let frames = self
            .frames
            .iter()
            .map(|f| {
                let ops = f
                    .operators
                    .iter()
                    .map(MatrixJson::to_matrix)
                    .collect::<Result<Vec<_>>>()?;
                Ok((f.gamma, ops))
            })
            .collect::<Result<Vec<_>>>()?;
        Geam::from_operators(self.dim, frames)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    /// Local dimension; the matrix is `dim^2` square when `bipartite`.
    pub dim: usize,
    pub bipartite: bool,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl StateJson {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = MatrixJson::from_matrix(rho.matrix());
        Self {
            dim: rho.dim(),
            bipartite: rho.is_bipartite(),
            re: m.re,
            im: m.im,
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        let m = MatrixJson {
            re: self.re.clone(),
            im: self.im.clone(),
        }
        .to_matrix()?;
        let rho = DensityMatrix::new(m, self.bipartite)?;
        if rho.dim() != self.dim {
            return Err(GeamError::DimensionMismatch {
                expected: format!("local dimension {}", self.dim),
                found: format!("matrix of local dimension {}", rho.dim()),
            });
        }
        Ok(rho)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn geam_to_json(geam: &Geam) -> Result<String> {
    to_json(&GeamJson::from_geam(geam))
}

pub fn geam_from_json(text: &str) -> Result<Geam> {
    from_json::<GeamJson>(text)?.to_geam()
}

pub fn state_to_json(rho: &DensityMatrix) -> Result<String> {
    to_json(&StateJson::from_state(rho))
}

pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    from_json::<StateJson>(text)?.to_state()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geam::GeamConfig;
    use crate::presets::{preset, Preset};
    use crate::states::{random_bipartite_pure, random_mixed, seeded_rng};

    #[test]
    fn geam_round_trip_is_exact() {
        let g = preset(&Preset::Sic, 3).unwrap();
        let text = geam_to_json(&g).unwrap();
        let back = geam_from_json(&text).unwrap();
        for (p, q) in g.operators().zip(back.operators()) {
            assert_eq!(p, q);
        }
        assert_eq!(geam_to_json(&back).unwrap(), text);
    }

    #[test]
    fn state_round_trip_is_exact() {
        let mut rng = seeded_rng(4);
        let rho = random_mixed(3, 2, &mut rng).unwrap();
        assert_eq!(state_from_json(&state_to_json(&rho).unwrap()).unwrap(), rho);
        let psi = random_bipartite_pure(2, &mut rng).unwrap();
        let text = state_to_json(&psi).unwrap();
        assert!(text.contains("\"dim\": 2"));
        assert_eq!(state_from_json(&text).unwrap(), psi);
    }

    #[test]
    fn config_round_trip() {
        let cfg = GeamConfig::uniform(3, 4, 3, 0.6).with_target_s(0.01);
        let text = to_json(&cfg).unwrap();
        assert!(text.contains("target_S"));
        assert_eq!(from_json::<GeamConfig>(&text).unwrap(), cfg);
    }

    #[test]
    fn malformed_input_rejected() {
        assert!(geam_from_json("{\"dim\": 2}").is_err());
        let bad = "{\"dim\":2,\"bipartite\":false,\"re\":[[1,0],[0]],\"im\":[[0,0],[0,0]]}";
        assert!(state_from_json(bad).is_err());
    }
}
