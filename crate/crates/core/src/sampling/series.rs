//! Observed sample paths and the sample lag estimator.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub model: String,
    pub seed: u64,
}

/// A finite observation y_0..y_N of a stationary process.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSeries {
    values: Vec<f64>,
    meta: SeriesMeta,
}

impl SampleSeries {
    pub fn new(values: Vec<f64>, meta: SeriesMeta) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Invalid(format!(
                "series needs at least 2 samples, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("non-finite sample {v}")));
        }
        Ok(Self { values, meta })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> &SeriesMeta {
        &self.meta
    }

    /// Sample lags r̃_k = (1/(N+1−k))·Σ_{t=0}^{N−k} y_t·y_{t+k} for k = 0..order.
    ///
    /// No positive-definiteness projection is applied: raw estimates may fail
    /// the PD test, and downstream solvers reject them explicitly.
    pub fn estimate_lags(&self, order: usize) -> Result<Vec<f64>> {
        let len = self.values.len();
        if order >= len {
            return Err(Error::OrderTooLarge { order, len });
        }
        Ok((0..=order)
            .map(|k| {
                let count = len - k;
                let sum: f64 = self.values[..count]
                    .iter()
                    .zip(&self.values[k..])
                    .map(|(a, b)| a * b)
                    .sum();
                sum / count as f64
            })
            .collect())
    }

    /// Single-column CSV with a comment header carrying the provenance.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# seed={}, model={}", self.meta.seed, self.meta.model)?;
        writeln!(w, "value")?;
        for v in &self.values {
            writeln!(w, "{v}")?;
        }
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut meta = SeriesMeta {
            model: String::new(),
            seed: 0,
        };
        let mut values = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                // header format: "# seed=<u64>, model=<rest of line>"
                if let Some((seed_part, model_part)) = rest.split_once(',') {
                    if let Some(value) = seed_part.trim().strip_prefix("seed=") {
                        meta.seed = value.trim().parse().map_err(|_| Error::Parse {
                            line: i + 1,
                            message: format!("bad seed {value}"),
                        })?;
                    }
                    if let Some(value) = model_part.trim().strip_prefix("model=") {
                        meta.model = value.trim().to_string();
                    }
                }
                continue;
            }
            if line == "value" {
                continue;
            }
            values.push(line.parse::<f64>().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("bad value {line}"),
            })?);
        }
        SampleSeries::new(values, meta)
    }

    pub fn read_csv_path(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<f64>) -> SampleSeries {
        SampleSeries::new(
            values,
            SeriesMeta {
                model: "test".into(),
                seed: 0,
            },
        )
        .unwrap()
    }

    #[test]
    fn constant_series_lags() {
        let s = series(vec![1.0, 1.0, 1.0]);
        assert_eq!(s.estimate_lags(1).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn alternating_series_lags() {
        let s = series(vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(s.estimate_lags(1).unwrap(), vec![1.0, -1.0]);
    }

    #[test]
    fn lag_zero_is_mean_of_squares() {
        let s = series(vec![1.0, 2.0, -3.0, 0.5]);
        let r = s.estimate_lags(0).unwrap();
        let expect = (1.0 + 4.0 + 9.0 + 0.25) / 4.0;
        assert_eq!(r[0], expect);
    }

    #[test]
    fn scale_equivariance() {
        let s = series(vec![0.3, -1.2, 0.7, 2.0, -0.4]);
        let scaled = series(s.values().iter().map(|v| 3.0 * v).collect());
        let r = s.estimate_lags(2).unwrap();
        let rs = scaled.estimate_lags(2).unwrap();
        for (a, b) in r.iter().zip(&rs) {
            assert!((b - 9.0 * a).abs() < 1e-12);
        }
    }

    #[test]
    fn order_too_large_rejected() {
        let s = series(vec![1.0, 2.0]);
        assert!(matches!(
            s.estimate_lags(2),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn csv_round_trip_lossless() {
        let s = SampleSeries::new(
            vec![0.1, -2.5e-17, std::f64::consts::PI, 1e300],
            SeriesMeta {
                model: "ar(coeffs=[0.5],var=1)".into(),
                seed: 99,
            },
        )
        .unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = SampleSeries::read_csv(&buf[..]).unwrap();
        assert_eq!(back, s);
    }
}
