//! Synthetic regression laws with a known regression function.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::{LabeledStream, NoiseModel, Sample};

/// Number of cosine terms in the univariate truth.
const EXAMPLE1_TERMS: usize = 30;

/// Data-generating law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// `X ~ U[0,1]`, `Y = sum_{k<=30} k^-2.5 cos((k-1) pi X) + N(0, 0.5^2)`.
    Example1,
    /// `X ~ U[0,1]^10`, `Y = sum_{odd j} (0.5 - |X_j - 0.5|) + sum_{even j} exp(-X_j) + N(0, 2^2)`
    /// with 1-based coordinates.
    Example2,
    /// `X` uniform on the cube of half-width `radius / sqrt(p)` (so `|X| <= radius`),
    /// `Y = X . beta + N(0, sigma^2)`.
    CustomLinear {
        beta: Vec<f64>,
        sigma: f64,
        covariate_radius: f64,
    },
}

impl GeneratorKind {
    pub fn validate(&self) -> Result<()> {
        if let GeneratorKind::CustomLinear {
            beta,
            sigma,
            covariate_radius,
        } = self
        {
            if beta.is_empty() || beta.iter().any(|b| !b.is_finite()) {
                return Err(Error::InvalidConfig(
                    "linear generator needs finite coefficients".into(),
                ));
            }
            NoiseModel::new(*sigma)?;
            if !(*covariate_radius > 0.0 && covariate_radius.is_finite()) {
                return Err(Error::InvalidConfig("covariate radius must be > 0".into()));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        match self {
            GeneratorKind::Example1 => 1,
            GeneratorKind::Example2 => 10,
            GeneratorKind::CustomLinear { beta, .. } => beta.len(),
        }
    }

    pub fn noise(&self) -> NoiseModel {
        let sigma = match self {
            GeneratorKind::Example1 => 0.5,
            GeneratorKind::Example2 => 2.0,
            GeneratorKind::CustomLinear { sigma, .. } => *sigma,
        };
        NoiseModel::new(sigma).expect("validated noise level")
    }

    /// Regression function `E[Y | X = x]`.
    pub fn f0(&self, x: &[f64]) -> f64 {
        match self {
            GeneratorKind::Example1 => example1_f0(x[0]),
            GeneratorKind::Example2 => x
                .iter()
                .enumerate()
                .map(|(m, &v)| {
                    // m is 0-based: m even <=> coordinate m + 1 odd
                    if m % 2 == 0 {
                        0.5 - (v - 0.5).abs()
                    } else {
                        (-v).exp()
                    }
                })
                .sum(),
            GeneratorKind::CustomLinear { beta, .. } => {
                beta.iter().zip(x).map(|(b, v)| b * v).sum()
            }
        }
    }

    pub fn draw_x<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            GeneratorKind::CustomLinear {
                beta,
                covariate_radius,
                ..
            } => {
                let half = covariate_radius / (beta.len() as f64).sqrt();
                (0..beta.len())
                    .map(|_| half * (2.0 * rng.random::<f64>() - 1.0))
                    .collect()
            }
            _ => (0..self.dimension()).map(|_| rng.random::<f64>()).collect(),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Sample {
        let x = self.draw_x(rng);
        let eps: f64 = rng.sample(StandardNormal);
        let y = self.f0(&x) + self.noise().sigma() * eps;
        Sample::new(x, y)
    }

    /// Replayable stream of `n` samples.
    pub fn stream(&self, seed: u64, n: u64) -> Result<LabeledStream> {
        self.validate()?;
        let generator = self.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let source = (0..n).map(move |_| Ok(generator.draw(&mut rng)));
        LabeledStream::new(self.dimension(), Some(seed), source)
    }
}

/// Generator plus the seed of its stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Spec for replicate `r`, with a seed mixed from `(self.seed, r)`.
    pub fn replicate(&self, r: u64) -> Self {
        Self {
            kind: self.kind.clone(),
            seed: derive_seed(self.seed, STREAM_DATA, r),
        }
    }

    pub fn stream(&self, n: u64) -> Result<LabeledStream> {
        self.kind.stream(self.seed, n)
    }
}

pub fn gen_example1(seed: u64, n: u64) -> Result<LabeledStream> {
    GeneratorKind::Example1.stream(seed, n)
}

pub fn gen_example2(seed: u64, n: u64) -> Result<LabeledStream> {
    GeneratorKind::Example2.stream(seed, n)
}

pub fn example1_f0(x: f64) -> f64 {
    (1..=EXAMPLE1_TERMS)
        .map(|k| (k as f64).powf(-2.5) * ((k - 1) as f64 * PI * x).cos())
        .sum()
}

/// Tags separating the seed streams derived from one base seed.
pub const STREAM_DATA: u64 = 1;
pub const STREAM_TEST: u64 = 2;
pub const STREAM_REPLACEMENT: u64 = 3;

/// SplitMix64 mix of a base seed, a stream tag and a replicate index.
pub fn derive_seed(base: u64, tag: u64, index: u64) -> u64 {
    let mut z =
        base ^ tag.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    for _ in 0..2 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}
