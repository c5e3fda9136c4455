//! JSON schema for potentials.
//!
//! ```json
//! {"m": 1,
//!  "Q": {"breakpoints": [0.0], "pieces": [[[[0.0, 0.0]]], [[[-2.0, 0.0]]]]},
//!  "s": {"breakpoints": [], "pieces": [[[[0.0, 0.0]]]]}}
//! ```
//!
//! `pieces[i][k]` is the degree-`k` coefficient of piece `i`, an m×m matrix
//! flattened row-major into `m²` `[re, im]` pairs. `Q` and `s` default to
//! zero when absent; `extension` defaults to `"constant"`.

use serde::{Deserialize, Serialize};

use super::{Extension, MatrixFunction, Potential};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFunctionConfig {
    #[serde(default)]
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<Extension>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub m: usize,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub primitive: Option<MatrixFunctionConfig>,
    #[serde(rename = "s", default, skip_serializing_if = "Option::is_none")]
    pub remainder: Option<MatrixFunctionConfig>,
}

impl MatrixFunctionConfig {
    pub fn build(&self, m: usize, field: &str) -> Result<MatrixFunction> {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (i, piece) in self.pieces.iter().enumerate() {
            let mut coeffs = Vec::with_capacity(piece.len());
            for (k, flat) in piece.iter().enumerate() {
                if flat.len() != m * m {
                    return Err(Error::Config(format!(
                        "{field}.pieces[{i}][{k}]: expected {} [re, im] entries ({m}x{m} row-major), got {}",
                        m * m,
                        flat.len()
                    )));
                }
                let entries: Vec<C64> = flat.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                coeffs.push(CMatrix::from_row_slice(m, m, &entries));
            }
            pieces.push(coeffs);
        }
        MatrixFunction::new(
            m,
            self.breakpoints.clone(),
            pieces,
            self.extension.unwrap_or_default(),
        )
        .map_err(|e| Error::Config(format!("{field}: {e}")))
    }

    pub fn from_function(f: &MatrixFunction) -> Self {
        let pieces = f
            .stored_pieces()
            .iter()
            .map(|p| {
                p.coeffs
                    .iter()
                    .map(|c| {
                        // row-major
                        let mut flat = Vec::with_capacity(c.len());
                        for i in 0..c.nrows() {
                            for j in 0..c.ncols() {
                                let z = c[(i, j)];
                                flat.push([z.re, z.im]);
                            }
                        }
                        flat
                    })
                    .collect()
            })
            .collect();
        MatrixFunctionConfig {
            breakpoints: f.breakpoints().to_vec(),
            pieces,
            extension: Some(f.extension()),
        }
    }
}

impl PotentialConfig {
    pub fn build(&self) -> Result<Potential> {
        if self.m == 0 {
            return Err(Error::Config("m: must be a positive integer".into()));
        }
        let part = |cfg: &Option<MatrixFunctionConfig>, name: &str| match cfg {
            Some(c) => c.build(self.m, name),
            None => Ok(MatrixFunction::zero(self.m)),
        };
        Potential::new(part(&self.primitive, "Q")?, part(&self.remainder, "s")?)
    }

    pub fn from_potential(p: &Potential) -> Self {
        PotentialConfig {
            m: p.dim(),
            primitive: Some(MatrixFunctionConfig::from_function(p.primitive())),
            remainder: Some(MatrixFunctionConfig::from_function(p.remainder())),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

impl Potential {
    pub fn from_json(text: &str) -> Result<Potential> {
        PotentialConfig::from_json(text)?.build()
    }

    pub fn to_json(&self) -> String {
        PotentialConfig::from_potential(self).to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Side;

    pub(crate) const DELTA_EXAMPLE: &str = r#"{"m": 1,
 "Q": {"breakpoints": [0.0], "pieces": [[[[0.0, 0.0]]], [[[-2.0, 0.0]]]]},
 "s": {"breakpoints": [], "pieces": [[[[0.0, 0.0]]]]}}"#;

    #[test]
    fn delta_example_parses() {
        let p = Potential::from_json(DELTA_EXAMPLE).unwrap();
        assert_eq!(p, Potential::scalar_delta(0.0, C64::new(-2.0, 0.0)));
    }

    #[test]
    fn minimal_free_config() {
        let p = Potential::from_json(r#"{"m": 1}"#).unwrap();
        assert_eq!(p, Potential::free(1));
    }

    #[test]
    fn zero_dimension_names_m() {
        let err = Potential::from_json(r#"{"m": 0}"#).unwrap_err().to_string();
        assert!(err.contains("m:"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = Potential::from_json(r#"{"m": 1, "q": {}}"#).unwrap_err().to_string();
        assert!(err.contains("unknown field"), "{err}");
    }

    #[test]
    fn wrong_entry_count_names_field() {
        let err = Potential::from_json(r#"{"m": 2, "s": {"pieces": [[[[1.0, 0.0]]]]}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("s.pieces[0][0]"), "{err}");
    }

    #[test]
    fn round_trip_is_idempotent() {
        let p = Potential::from_json(DELTA_EXAMPLE).unwrap();
        let once = p.to_json();
        let q = Potential::from_json(&once).unwrap();
        assert_eq!(p, q);
        assert_eq!(once, q.to_json());
        assert_eq!(q.primitive().eval(0.0, Side::Left)[(0, 0)], C64::new(0.0, 0.0));
    }
}
