//! JSON shapes shared by the library and the command line.

use crate::error::{Error, Result};
use crate::kernel::{make_classical, make_n_mk, make_power_pole, Classical, MeromorphicKernel, PoleTerm};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "snake_case")]
pub enum Builtin {
    NAlpha { alpha: f64 },
    NAlphaStar { alpha: f64 },
    MAlpha { alpha: f64 },
    PowerPole { c: C64, m: u32 },
    NMk { m: u32, k: u32 },
}

/// Either explicit pole data or a named constructor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelSpec {
    Terms { terms: Vec<PoleTerm> },
    Builtin(Builtin),
}

impl KernelSpec {
    pub fn build(&self) -> Result<MeromorphicKernel> {
        match self {
            KernelSpec::Terms { terms } => Ok(MeromorphicKernel::new(terms.clone())),
            KernelSpec::Builtin(b) => match *b {
                Builtin::NAlpha { alpha } => make_classical(Classical::NAlpha, alpha),
                Builtin::NAlphaStar { alpha } => make_classical(Classical::NAlphaStar, alpha),
                Builtin::MAlpha { alpha } => make_classical(Classical::MAlpha, alpha),
                Builtin::PowerPole { c, m } => make_power_pole(c, m),
                Builtin::NMk { m, k } => make_n_mk(m, k),
            },
        }
    }
}

impl From<MeromorphicKernel> for KernelSpec {
    fn from(k: MeromorphicKernel) -> Self {
        KernelSpec::Terms { terms: k.terms }
    }
}

/// Square complex matrix; JSON is a list of rows, or a single [re, im] for 1x1.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix(pub DMatrix<C64>);

impl CMatrix {
    pub fn scalar(v: C64) -> Self {
        CMatrix(DMatrix::from_element(1, 1, v))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<C64>> = (0..self.0.nrows()).map(|i| self.0.row(i).iter().copied().collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Scalar(C64),
            Rows(Vec<Vec<C64>>),
        }
        match Raw::deserialize(de)? {
            Raw::Scalar(v) => Ok(CMatrix::scalar(v)),
            Raw::Rows(rows) => {
                let n = rows.len();
                if n == 0 || rows.iter().any(|r| r.len() != n) {
                    return Err(serde::de::Error::custom("matrix must be square and non-empty"));
                }
                Ok(CMatrix(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
            }
        }
    }
}

/// Reads and parses a JSON file, naming the file in errors.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
}
