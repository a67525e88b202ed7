//! CSV dataset ingestion and the truth file used by diagnostics.

use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::design::{Dataset, ModelSet, StandardizedDesign};
use crate::error::{Error, Result};
use crate::identifiability::TruthSpec;

/// Selects the response column by header name or 1-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResponseColumn {
    Name(String),
    Index(usize),
}

impl FromStr for ResponseColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidData("empty response selector".into()));
        }
        match s.parse::<usize>() {
            Ok(0) => Err(Error::InvalidData("response index is 1-based".into())),
            Ok(i) => Ok(ResponseColumn::Index(i)),
            Err(_) => Ok(ResponseColumn::Name(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub has_header: bool,
    /// Defaults to the last column.
    pub response: Option<ResponseColumn>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            has_header: true,
            response: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedDataset {
    pub data: Dataset,
    pub predictor_names: Vec<String>,
    pub response_name: String,
}

pub fn read_dataset_path(path: &Path, opts: &CsvOptions) -> Result<NamedDataset> {
    read_dataset(File::open(path)?, opts)
}

pub fn read_dataset<R: Read>(reader: R, opts: &CsvOptions) -> Result<NamedDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(opts.has_header)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Option<Vec<String>> = if opts.has_header {
        Some(rdr.headers()?.iter().map(str::to_string).collect())
    } else {
        None
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let mut row = Vec::with_capacity(rec.len());
        for (col, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::InvalidData(format!(
                    "record {}, column {}: cannot parse {field:?} as a number",
                    line + 1,
                    col + 1
                ))
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    let ncols = match (&header, rows.first()) {
        (Some(h), _) => h.len(),
        (None, Some(r)) => r.len(),
        (None, None) => 0,
    };
    if rows.is_empty() {
        return Err(Error::InvalidData("no data records".into()));
    }
    if ncols < 2 {
        return Err(Error::InvalidData(
            "need at least one predictor and a response".into(),
        ));
    }
    if let Some(r) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::InvalidData(format!(
            "record {} has the wrong field count",
            r + 1
        )));
    }
    let names: Vec<String> = header.unwrap_or_else(|| {
        (1..ncols)
            .map(|j| format!("x{j}"))
            .chain(std::iter::once("y".to_string()))
            .collect()
    });
    let response = match &opts.response {
        None => ncols - 1,
        Some(ResponseColumn::Index(i)) if *i <= ncols => i - 1,
        Some(ResponseColumn::Index(i)) => {
            return Err(Error::InvalidData(format!(
                "response column {i} out of range 1..={ncols}"
            )))
        }
        Some(ResponseColumn::Name(name)) => {
            if !opts.has_header {
                return Err(Error::InvalidData(
                    "response by name requires a header row".into(),
                ));
            }
            names
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::InvalidData(format!("no column named {name:?}")))?
        }
    };
    let predictors: Vec<usize> = (0..ncols).filter(|&c| c != response).collect();
    let x = DMatrix::from_fn(rows.len(), predictors.len(), |i, j| rows[i][predictors[j]]);
    let y = DVector::from_fn(rows.len(), |i, _| rows[i][response]);
    Ok(NamedDataset {
        data: Dataset::new(x, y)?,
        predictor_names: predictors.iter().map(|&c| names[c].clone()).collect(),
        response_name: names[response].clone(),
    })
}

/// True support and coefficients on the raw scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthFile {
    /// 1-based predictor indices.
    pub support: Vec<usize>,
    pub beta: Vec<f64>,
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
}

fn default_sigma2() -> f64 {
    1.0
}

impl TruthFile {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let t: TruthFile = serde_json::from_str(s)?;
        t.validate()?;
        Ok(t)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.support.len() != self.beta.len() {
            return Err(Error::InvalidData(
                "support and beta differ in length".into(),
            ));
        }
        let set = ModelSet::from_one_based(&self.support)?;
        if set.len() != self.support.len() {
            return Err(Error::InvalidData("support has repeated indices".into()));
        }
        if self.beta.iter().any(|b| !b.is_finite() || *b == 0.0) {
            return Err(Error::InvalidData(
                "beta entries must be finite and nonzero".into(),
            ));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::InvalidData("sigma2 must be positive".into()));
        }
        Ok(())
    }

    pub fn truth_spec(&self, design: &StandardizedDesign) -> Result<TruthSpec> {
        self.validate()?;
        let mut pairs: Vec<(usize, f64)> = self
            .support
            .iter()
            .map(|i| i - 1)
            .zip(self.beta.iter().copied())
            .collect();
        pairs.sort_by_key(|p| p.0);
        let support = ModelSet::from_indices(pairs.iter().map(|p| p.0));
        let beta: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        TruthSpec::new(design, support, beta, self.sigma2)
    }
}
