use serde::{Deserialize, Serialize};

use super::{dot, Predictor};
use crate::basis::BasisCatalog;
use crate::error::{check_dimension, Error, Result};
use crate::sample::Sample;

/// Orthogonal-series fit `beta_k = n^-1 sum_i Y_i phi_k(X_i)` over the first
/// `J` catalog functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSieveEstimate {
    catalog: BasisCatalog,
    coefficients: Vec<f64>,
}

impl BatchSieveEstimate {
    pub fn j(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }
}

pub fn batch_sieve_fit(
    data: &[Sample],
    j: usize,
    catalog: &BasisCatalog,
) -> Result<BatchSieveEstimate> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if j == 0 {
        return Err(Error::InvalidInput("J must be >= 1".into()));
    }
    let mut catalog = catalog.clone();
    catalog.ensure(j);
    let mut coefficients = vec![0.0; j];
    let mut phi = Vec::with_capacity(j);
    for sample in data {
        catalog.basis_vector_into(j, &sample.x, &mut phi)?;
        for (c, p) in coefficients.iter_mut().zip(&phi) {
            *c += sample.y * p;
        }
    }
    let n = data.len() as f64;
    coefficients.iter_mut().for_each(|c| *c /= n);
    Ok(BatchSieveEstimate {
        catalog,
        coefficients,
    })
}

impl Predictor for BatchSieveEstimate {
    fn dimension(&self) -> usize {
        self.catalog.dimension()
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        check_dimension(self.catalog.dimension(), x.len())?;
        let phi = self.catalog.materialized_basis_vector(self.j(), x)?;
        Ok(dot(&self.coefficients, &phi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni() -> BasisCatalog {
        BasisCatalog::new(1).unwrap()
    }

    #[test]
    fn examples() {
        let fit = batch_sieve_fit(&[Sample::new(vec![0.0], 2.0)], 1, &uni()).unwrap();
        assert_eq!(fit.coefficients(), &[2.0]);
        let data = [Sample::new(vec![0.0], 1.0), Sample::new(vec![0.0], 3.0)];
        assert_eq!(
            batch_sieve_fit(&data, 2, &uni()).unwrap().coefficients(),
            &[2.0, 2.0]
        );
        let zeros: Vec<_> = (0..5)
            .map(|t| Sample::new(vec![t as f64 / 5.0], 0.0))
            .collect();
        let fit = batch_sieve_fit(&zeros, 4, &uni()).unwrap();
        assert!(fit.coefficients().iter().all(|&c| c == 0.0));
        assert_eq!(batch_sieve_fit(&[], 3, &uni()), Err(Error::EmptyData));
    }

    #[test]
    fn coefficients_recompute() {
        let data: Vec<_> = (0..40)
            .map(|t| {
                let x = (t as f64 * 0.618) % 1.0;
                Sample::new(vec![x], (3.0 * x).sin())
            })
            .collect();
        let fit = batch_sieve_fit(&data, 5, &uni()).unwrap();
        for k in 0..5 {
            let direct: f64 = data
                .iter()
                .map(|s| s.y * (k as f64 * std::f64::consts::PI * s.x[0]).cos())
                .sum::<f64>()
                / 40.0;
            assert!((fit.coefficients()[k] - direct).abs() < 1e-12);
        }
        let x = 0.3;
        let pred: f64 = (0..5)
            .map(|k| fit.coefficients()[k] * (k as f64 * std::f64::consts::PI * x).cos())
            .sum();
        assert!((fit.predict(&[x]).unwrap() - pred).abs() < 1e-12);
    }
}
