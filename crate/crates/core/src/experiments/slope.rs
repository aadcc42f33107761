//! Least-squares exponent of a power law `msd ~ C i^slope`.

use serde::{Deserialize, Serialize};

/// Result of a log-log fit. Nonpositive or non-finite values are excluded
/// and counted; fewer than two usable points leave the slope undefined, and
/// exactly two leave the standard error undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: Option<f64>,
    pub stderr: Option<f64>,
    pub excluded: usize,
    pub used: usize,
}

impl SlopeFit {
    pub fn is_degenerate(&self) -> bool {
        self.slope.is_none() || self.stderr.is_none()
    }
}

pub fn fit_loglog_slope(points: &[(f64, f64)]) -> SlopeFit {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(i, m)| *i > 0.0 && *m > 0.0 && i.is_finite() && m.is_finite())
        .map(|(i, m)| (i.ln(), m.ln()))
        .collect();
    let excluded = points.len() - logs.len();
    let used = logs.len();
    let mut fit = SlopeFit {
        slope: None,
        stderr: None,
        excluded,
        used,
    };
    if used < 2 {
        return fit;
    }
    let n = used as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return fit;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    fit.slope = Some(slope);
    if used > 2 {
        let intercept = my - slope * mx;
        let ssr: f64 = logs
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        fit.stderr = Some((ssr / (n - 2.0) / sxx).sqrt());
    }
    fit
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Vec<f64> {
        (5..=12).map(|k| f64::from(1u32 << k)).collect()
    }

    #[test]
    fn exact_inverse_square() {
        let pts: Vec<_> = grid().into_iter().map(|i| (i, i.powi(-2))).collect();
        let fit = fit_loglog_slope(&pts);
        assert!((fit.slope.unwrap() + 2.0).abs() < 1e-12);
        assert!(fit.stderr.unwrap() < 1e-12);
        assert_eq!((fit.used, fit.excluded), (8, 0));
    }

    #[test]
    fn constant_is_flat() {
        let pts: Vec<_> = grid().into_iter().map(|i| (i, 3.5)).collect();
        assert!(fit_loglog_slope(&pts).slope.unwrap().abs() < 1e-12);
    }

    #[test]
    fn noisy_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<_> = grid()
            .into_iter()
            .map(|i| (i, (1.0 + 0.01 * (2.0 * rng.random::<f64>() - 1.0)) / i))
            .collect();
        let s = fit_loglog_slope(&pts).slope.unwrap();
        assert!((-1.1..=-0.9).contains(&s), "slope {s}");
    }

    #[test]
    fn zeros_are_excluded() {
        let pts = [(8.0, 0.0), (16.0, 0.0), (32.0, 0.0)];
        let fit = fit_loglog_slope(&pts);
        assert_eq!(fit.slope, None);
        assert_eq!(fit.excluded, 3);

        let pts = [
            (8.0, 0.0),
            (16.0, 1.0 / 256.0),
            (32.0, 1.0 / 1024.0),
            (64.0, 1.0 / 4096.0),
        ];
        let fit = fit_loglog_slope(&pts);
        assert_eq!(fit.excluded, 1);
        assert!((fit.slope.unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_points_have_no_stderr() {
        let fit = fit_loglog_slope(&[(8.0, 0.1), (16.0, 0.025)]);
        assert!((fit.slope.unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(fit.stderr, None);
        assert!(fit.is_degenerate());
    }
}
