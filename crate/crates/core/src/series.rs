//! Observation container shared by estimation, monitoring and simulation.

use crate::error::{Error, Result};

/// Ordered observations `y_1..y_n`, optionally with one covariate vector per
/// time index.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
    covariates: Option<Vec<Vec<f64>>>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values, "observation")?;
        Ok(Self {
            values,
            covariates: None,
        })
    }

    /// Builds a series with aligned covariates. Every covariate vector must
    /// have the same dimension `p >= 1`.
    pub fn with_covariates(values: Vec<f64>, covariates: Vec<Vec<f64>>) -> Result<Self> {
        check_finite(&values, "observation")?;
        if covariates.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "{} observations but {} covariate rows",
                values.len(),
                covariates.len()
            )));
        }
        let p = covariates.first().map_or(0, Vec::len);
        if !covariates.is_empty() && p == 0 {
            return Err(Error::InvalidSeries("covariate dimension must be >= 1".into()));
        }
        for (i, row) in covariates.iter().enumerate() {
            if row.len() != p {
                return Err(Error::InvalidSeries(format!(
                    "covariate row {} has dimension {}, expected {p}",
                    i + 1,
                    row.len()
                )));
            }
            check_finite(row, "covariate")?;
        }
        Ok(Self {
            values,
            covariates: Some(covariates),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn covariates(&self) -> Option<&[Vec<f64>]> {
        self.covariates.as_deref()
    }

    /// Covariate dimension, 0 when no covariates are attached.
    pub fn dim(&self) -> usize {
        self.covariates
            .as_ref()
            .and_then(|c| c.first())
            .map_or(0, Vec::len)
    }

    pub fn covariate(&self, i: usize) -> Option<&[f64]> {
        self.covariates.as_ref().map(|c| c[i].as_slice())
    }

    /// Copies the half-open index range `[start, end)` into a new series.
    pub fn slice(&self, start: usize, end: usize) -> Series {
        Series {
            values: self.values[start..end].to_vec(),
            covariates: self.covariates.as_ref().map(|c| c[start..end].to_vec()),
        }
    }

    /// Splits into the training window (first `m` values) and the rest.
    pub fn split_at(&self, m: usize) -> Result<(Series, Series)> {
        if m > self.len() {
            return Err(Error::InvalidSeries(format!(
                "training length {m} exceeds series length {}",
                self.len()
            )));
        }
        Ok((self.slice(0, m), self.slice(m, self.len())))
    }

    /// Replaces every covariate by its first difference, dropping the first
    /// time index (which has no predecessor).
    pub fn difference_covariates(&self) -> Series {
        match &self.covariates {
            None => self.clone(),
            Some(cov) if cov.len() < 2 => Series {
                values: Vec::new(),
                covariates: Some(Vec::new()),
            },
            Some(cov) => Series {
                values: self.values[1..].to_vec(),
                covariates: Some(
                    cov.windows(2)
                        .map(|w| w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect())
                        .collect(),
                ),
            },
        }
    }
}

fn check_finite(xs: &[f64], what: &str) -> Result<()> {
    match xs.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::InvalidSeries(format!(
            "{what} at index {} is not finite",
            i + 1
        ))),
        None => Ok(()),
    }
}
