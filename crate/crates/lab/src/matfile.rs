//! JSON matrix files.
//!
//! ```json
//! {"dim": 2, "entries": [[[1.0e0, 0.0e0], [2.0e0, -1.0e0]], [[2.0e0, 1.0e0], [5.0e0, 0.0e0]]], "label": "A"}
//! ```
//!
//! Each entry is a `[re, im]` pair written with 17 significant digits
//! (`{:.16e}`), which reads back to the same `f64` bit pattern.

use std::fs;
use std::path::Path;

use meanlab_core::{CMatrix, HermitianMatrix, HpdMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{LabError, LabResult};

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
    pub label: Option<String>,
}

#[derive(Deserialize)]
struct Parsed {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    label: Option<String>,
}

#[derive(Serialize)]
struct Written<'a> {
    dim: usize,
    entries: Vec<Vec<[Box<RawValue>; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
}

fn float(x: f64) -> LabResult<Box<RawValue>> {
    if !x.is_finite() {
        return Err(LabError::Usage(format!("cannot serialize non-finite entry {x}")));
    }
    Ok(RawValue::from_string(format!("{x:.16e}"))?)
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix, label: Option<&str>) -> Self {
        let entries = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self {
            dim: m.nrows(),
            entries,
            label: label.map(str::to_owned),
        }
    }

    pub fn from_hpd(a: &HpdMatrix, label: Option<&str>) -> Self {
        Self::from_matrix(a.matrix(), label)
    }

    pub fn to_matrix(&self) -> LabResult<CMatrix> {
        if self.entries.len() != self.dim || self.entries.iter().any(|r| r.len() != self.dim) {
            return Err(LabError::Usage(format!(
                "matrix file declares dim {} but entries are not {0}x{0}",
                self.dim
            )));
        }
        Ok(CMatrix::from_fn(self.dim, self.dim, |i, j| {
            let [re, im] = self.entries[i][j];
            Complex64::new(re, im)
        }))
    }

    pub fn to_hermitian(&self) -> LabResult<HermitianMatrix> {
        Ok(HermitianMatrix::new(self.to_matrix()?)?)
    }

    pub fn to_hpd(&self) -> LabResult<HpdMatrix> {
        Ok(HpdMatrix::new(self.to_hermitian()?)?)
    }

    pub fn to_json(&self) -> LabResult<String> {
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|[re, im]| Ok([float(*re)?, float(*im)?])).collect())
            .collect::<LabResult<_>>()?;
        let w = Written {
            dim: self.dim,
            entries,
            label: self.label.as_deref(),
        };
        Ok(serde_json::to_string(&w)?)
    }

    /// Parses `text`; `origin` names the source in error messages.
    pub fn from_json(text: &str, origin: &Path) -> LabResult<Self> {
        let p: Parsed = serde_json::from_str(text).map_err(|e| LabError::MatrixFile {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let file = Self {
            dim: p.dim,
            entries: p.entries,
            label: p.label,
        };
        file.to_matrix().map_err(|e| LabError::MatrixFile {
            path: origin.to_path_buf(),
            line: 1,
            column: 1,
            message: e.to_string(),
        })?;
        Ok(file)
    }

    pub fn read(path: &Path) -> LabResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn write(&self, path: &Path) -> LabResult<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text).map_err(|e| LabError::io(path, e))
    }
}

/// Reads a positive definite matrix from `path`.
pub fn read_hpd(path: &Path) -> LabResult<HpdMatrix> {
    MatrixFile::read(path)?.to_hpd()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let vals = [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 5e-324, 0.0, -0.0];
        let m = CMatrix::from_fn(3, 3, |i, j| Complex64::new(vals[(i + j) % 8], vals[(2 * i + j + 1) % 8]));
        let f = MatrixFile::from_matrix(&m, Some("x"));
        let back = MatrixFile::from_json(&f.to_json().unwrap(), Path::new("mem")).unwrap();
        for (r, s) in f.entries.iter().flatten().zip(back.entries.iter().flatten()) {
            assert_eq!(r[0].to_bits(), s[0].to_bits());
            assert_eq!(r[1].to_bits(), s[1].to_bits());
        }
        assert_eq!(back.label.as_deref(), Some("x"));
    }

    #[test]
    fn malformed_reports_position() {
        let err = MatrixFile::from_json("{\"dim\": 2,\n \"entries\": [[[1, 0]] oops", Path::new("bad.json"))
            .unwrap_err();
        match err {
            LabError::MatrixFile { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let text = r#"{"dim": 2, "entries": [[[1, 0], [0, 0]]]}"#;
        assert!(MatrixFile::from_json(text, Path::new("m")).is_err());
    }

    #[test]
    fn non_finite_is_rejected() {
        let m = CMatrix::from_element(1, 1, Complex64::new(f64::NAN, 0.0));
        assert!(MatrixFile::from_matrix(&m, None).to_json().is_err());
    }
}
