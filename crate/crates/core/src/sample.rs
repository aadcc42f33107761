//! Samples and the single-pass streams that deliver them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One covariate vector with its scalar response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: f64,
}

impl Sample {
    pub fn new(x: Vec<f64>, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dimension(&self) -> usize {
        self.x.len()
    }

    pub fn is_finite(&self) -> bool {
        self.y.is_finite() && self.x.iter().all(|v| v.is_finite())
    }
}

/// Gaussian noise level of a synthetic generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    sigma: f64,
}

impl NoiseModel {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma.is_finite() && sigma >= 0.0 {
            Ok(Self { sigma })
        } else {
            Err(Error::InvalidConfig(format!(
                "noise sd must be >= 0, got {sigma}"
            )))
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

type Source = Box<dyn Iterator<Item = Result<Sample>> + Send>;

/// An ordered, single-pass producer of samples of fixed dimension.
///
/// Every sample is checked on the way out: a dimension change or a non-finite
/// entry ends the stream with an error naming the 1-based sample index.
/// Replaying a stream means building a new one from the same seed or source.
pub struct LabeledStream {
    dimension: usize,
    seed: Option<u64>,
    source: Source,
    delivered: u64,
    failed: bool,
}

impl LabeledStream {
    pub fn new<I>(dimension: usize, seed: Option<u64>, source: I) -> Result<Self>
    where
        I: Iterator<Item = Result<Sample>> + Send + 'static,
    {
        if dimension == 0 {
            return Err(Error::InvalidConfig(
                "stream dimension must be positive".into(),
            ));
        }
        Ok(Self {
            dimension,
            seed,
            source: Box::new(source),
            delivered: 0,
            failed: false,
        })
    }

    /// Wraps an in-memory list of samples.
    pub fn from_samples(dimension: usize, samples: Vec<Sample>) -> Result<Self> {
        Self::new(dimension, None, samples.into_iter().map(Ok))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Number of samples handed out so far.
    pub fn delivered(&self) -> u64 {
        self.delivered
    }
}

impl Iterator for LabeledStream {
    type Item = Result<Sample>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let item = self.source.next()?;
        let index = self.delivered + 1;
        let checked = item.and_then(|sample| {
            if sample.dimension() != self.dimension {
                Err(Error::DimensionMismatch {
                    expected: self.dimension,
                    found: sample.dimension(),
                })
            } else if !sample.is_finite() {
                Err(Error::NonFiniteSample { index })
            } else {
                Ok(sample)
            }
        });
        match checked {
            Ok(sample) => {
                self.delivered = index;
                Some(Ok(sample))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

impl std::fmt::Debug for LabeledStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LabeledStream")
            .field("dimension", &self.dimension)
            .field("seed", &self.seed)
            .field("delivered", &self.delivered)
            .finish()
    }
}
