//! Monte-Carlo estimation error against the known regression function.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::generators::GeneratorKind;
use crate::error::{check_dimension, Error, Result};
use crate::estimators::Predictor;

/// Fresh covariates with their true regression values.
#[derive(Debug, Clone)]
pub struct OracleTestSet {
    xs: Vec<Vec<f64>>,
    truth: Vec<f64>,
}

impl OracleTestSet {
    pub fn draw(generator: &GeneratorKind, n_test: usize, seed: u64) -> Result<Self> {
        if n_test == 0 {
            return Err(Error::InvalidInput("n_test must be positive".into()));
        }
        generator.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<Vec<f64>> = (0..n_test).map(|_| generator.draw_x(&mut rng)).collect();
        let truth = xs.iter().map(|x| generator.f0(x)).collect();
        Ok(Self { xs, truth })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn covariates(&self) -> &[Vec<f64>] {
        &self.xs
    }

    /// Mean of `(f(X) - f0(X))^2` over the test covariates.
    pub fn mse_with<F>(&self, mut predict: F) -> Result<f64>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let mut total = 0.0;
        for (x, t) in self.xs.iter().zip(&self.truth) {
            let d = predict(x)? - t;
            total += d * d;
        }
        Ok(total / self.xs.len() as f64)
    }

    pub fn mse(&self, predictor: &dyn Predictor) -> Result<f64> {
        if let Some(x) = self.xs.first() {
            check_dimension(predictor.dimension(), x.len())?;
        }
        self.mse_with(|x| predictor.predict(x))
    }
}

/// `E[(f(X) - f0(X))^2]` estimated from `n_test` fresh covariates drawn with `seed`.
pub fn oracle_mse(
    predictor: &dyn Predictor,
    generator: &GeneratorKind,
    n_test: usize,
    seed: u64,
) -> Result<f64> {
    check_dimension(generator.dimension(), predictor.dimension())?;
    OracleTestSet::draw(generator, n_test, seed)?.mse(predictor)
}
