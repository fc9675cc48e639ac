//! Operator JSON schema shared with the CLI and other front ends.
//!
//! An operator file is an object with integer fields `p` and `m` and
//! arrays `a` and `b` of length `p`; each entry is an `m*m` row-major
//! array of `[re, im]` pairs. `b` entries must be Hermitian; `a` entries
//! positive definite for a positive operator, merely invertible when the
//! object carries `"general": true`. Complex numbers always serialize as
//! `[re, im]` pairs even when the imaginary part is zero, and floats use
//! shortest round-trip formatting, so generate -> parse -> serialize is
//! byte-identical.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::operator::{BlockJacobiOperator, GeneralBlockJacobi};
use crate::scalar::cplx;

fn is_false(b: &bool) -> bool {
    !*b
}

/// Wire form of an operator (positive or general).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OperatorJson {
    pub a: Vec<Vec<[f64; 2]>>,
    pub b: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub general: bool,
    pub m: usize,
    pub p: usize,
}

fn matrix_to_entries(mat: &Matrix<f64>) -> Vec<[f64; 2]> {
    mat.data().iter().map(|z| [z.re, z.im]).collect()
}

fn entries_to_matrix(entries: &[[f64; 2]], m: usize, what: &str) -> Result<Matrix<f64>> {
    if entries.len() != m * m {
        return Err(Error::Validation(format!(
            "{what}: expected {} entries for an {m}x{m} block, got {}",
            m * m,
            entries.len()
        )));
    }
    Ok(Matrix::from_vec(
        m,
        m,
        entries.iter().map(|e| cplx(e[0], e[1])).collect(),
    ))
}

impl OperatorJson {
    pub fn from_positive(j: &BlockJacobiOperator<f64>) -> Self {
        OperatorJson {
            a: j.a_blocks().iter().map(matrix_to_entries).collect(),
            b: j.b_blocks().iter().map(matrix_to_entries).collect(),
            general: false,
            m: j.m(),
            p: j.p(),
        }
    }

    pub fn from_general(j: &GeneralBlockJacobi<f64>) -> Self {
        OperatorJson {
            a: (0..j.p()).map(|i| matrix_to_entries(j.a(i))).collect(),
            b: (0..j.p()).map(|i| matrix_to_entries(j.b(i))).collect(),
            general: true,
            m: j.m(),
            p: j.p(),
        }
    }

    fn blocks(&self) -> Result<(Vec<Matrix<f64>>, Vec<Matrix<f64>>)> {
        if self.p < 1 || self.m < 1 {
            return Err(Error::InvalidDimension(format!(
                "p and m must be >= 1 (got p={}, m={})",
                self.p, self.m
            )));
        }
        if self.a.len() != self.p || self.b.len() != self.p {
            return Err(Error::Validation(format!(
                "coefficient arrays must have length p={} (got a: {}, b: {})",
                self.p,
                self.a.len(),
                self.b.len()
            )));
        }
        let a = self
            .a
            .iter()
            .enumerate()
            .map(|(i, e)| entries_to_matrix(e, self.m, &format!("a[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let b = self
            .b
            .iter()
            .enumerate()
            .map(|(i, e)| entries_to_matrix(e, self.m, &format!("b[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Ok((a, b))
    }

    /// Decode as a positive operator; rejects files tagged `general`.
    pub fn to_positive(&self) -> Result<BlockJacobiOperator<f64>> {
        if self.general {
            return Err(Error::Validation(
                "file is tagged general; decode it as a general operator".into(),
            ));
        }
        let (a, b) = self.blocks()?;
        BlockJacobiOperator::new(a, b)
    }

    /// Decode as a general (invertible-coefficient) operator.
    pub fn to_general(&self) -> Result<GeneralBlockJacobi<f64>> {
        let (a, b) = self.blocks()?;
        GeneralBlockJacobi::new(a, b)
    }

    /// Canonical serialization: pretty JSON, fixed field order, shortest
    /// round-trip floats, trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("operator serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("JSON parse: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_round_trip_is_byte_identical() {
        let j = BlockJacobiOperator::<f64>::random(3, 2, 42, 0.5).unwrap();
        let json = OperatorJson::from_positive(&j);
        let text = json.to_json_string();
        let reparsed = OperatorJson::parse(&text).unwrap();
        assert_eq!(json, reparsed);
        assert_eq!(text, reparsed.to_json_string());
        let back = reparsed.to_positive().unwrap();
        assert!(back == j);
    }

    #[test]
    fn general_flag_round_trip() {
        let g = GeneralBlockJacobi::<f64>::random(2, 2, 7, 0.4).unwrap();
        let json = OperatorJson::from_general(&g);
        let text = json.to_json_string();
        assert!(text.contains("\"general\": true"));
        let back = OperatorJson::parse(&text).unwrap().to_general().unwrap();
        assert!(back == g);
        assert!(OperatorJson::parse(&text).unwrap().to_positive().is_err());
    }

    #[test]
    fn free_file_omits_general_flag() {
        let j = BlockJacobiOperator::<f64>::free(1, 1).unwrap();
        let text = OperatorJson::from_positive(&j).to_json_string();
        assert!(!text.contains("general"));
        assert!(text.contains("[\n        1.0,\n        0.0\n      ]"));
    }

    #[test]
    fn shape_errors_are_reported() {
        let mut json = OperatorJson::from_positive(&BlockJacobiOperator::free(2, 1).unwrap());
        json.a[0].push([0.0, 0.0]);
        assert!(matches!(json.to_positive(), Err(Error::Validation(_))));

        let mut json = OperatorJson::from_positive(&BlockJacobiOperator::free(2, 1).unwrap());
        json.b.pop();
        assert!(json.to_positive().is_err());
    }

    #[test]
    fn invalid_coefficients_rejected() {
        // non-Hermitian b
        let mut json = OperatorJson::from_positive(&BlockJacobiOperator::free(1, 2).unwrap());
        json.b[0][1] = [1.0, 0.0];
        assert!(json.to_positive().is_err());

        // indefinite a is fine only for general files
        let mut json = OperatorJson::from_positive(&BlockJacobiOperator::free(1, 1).unwrap());
        json.a[0][0] = [-1.0, 0.0];
        assert!(json.to_positive().is_err());
        json.general = true;
        assert!(json.to_general().is_ok());
    }
}
