//! JSON matrix documents: `{"dim": n, "entries": [[re, im], ...], "label": "..."}`
//! with entries in row-major order. An optional `cols` field makes the
//! matrix `dim × cols` instead of square.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::{ComplexMatrix, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, label: Option<&str>) -> Result<Self> {
        m.ensure_finite()?;
        let cols = (m.cols() != m.rows()).then_some(m.cols());
        Ok(Self {
            dim: m.rows(),
            cols,
            entries: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
            label: label.map(str::to_owned),
        })
    }

    pub fn columns(&self) -> usize {
        self.cols.unwrap_or(self.dim)
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.dim * self.columns();
        if self.entries.len() != expected {
            return Err(Error::Parse(format!(
                "matrix file declares {}x{} but has {} entries (expected {expected})",
                self.dim,
                self.columns(),
                self.entries.len(),
            )));
        }
        if self.entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse(
                "matrix file contains non-finite entries".into(),
            ));
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        self.validate()?;
        ComplexMatrix::from_row_major(
            self.dim,
            self.columns(),
            self.entries
                .iter()
                .map(|&[re, im]| C64::new(re, im))
                .collect(),
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f: Self =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix file: {e}")))?;
        f.validate()?;
        Ok(f)
    }

    /// Pretty JSON, one entry per line, every number with 17 significant
    /// digits.
    pub fn render(&self) -> String {
        let mut s = format!("{{\n  \"dim\": {},\n", self.dim);
        if let Some(c) = self.cols {
            s.push_str(&format!("  \"cols\": {c},\n"));
        }
        if let Some(label) = &self.label {
            s.push_str(&format!(
                "  \"label\": {},\n",
                serde_json::Value::String(label.clone())
            ));
        }
        s.push_str("  \"entries\": [");
        for (i, [re, im]) in self.entries.iter().enumerate() {
            let sep = if i + 1 == self.entries.len() { "" } else { "," };
            s.push_str(&format!("\n    [{re:.16e}, {im:.16e}]{sep}"));
        }
        s.push_str(if self.entries.is_empty() {
            "]\n}\n"
        } else {
            "\n  ]\n}\n"
        });
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    MatrixFile::read(path)?.to_matrix()
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix, label: Option<&str>) -> Result<()> {
    MatrixFile::from_matrix(m, label)?.write(path)
}
