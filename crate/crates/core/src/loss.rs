//! Squared and pinball losses.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Loss used both for the SGD step and for rolling validation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    #[default]
    Squared,
    /// Quantile loss at level `alpha`, strictly inside (0, 1).
    Pinball { alpha: f64 },
}

impl LossKind {
    pub fn pinball(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(LossKind::Pinball { alpha })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LossKind::Squared => Ok(()),
            LossKind::Pinball { alpha } => check_alpha(alpha),
        }
    }

    pub fn eval(&self, prediction: f64, y: f64) -> Result<f64> {
        match *self {
            LossKind::Squared => squared_loss(prediction, y),
            LossKind::Pinball { alpha } => pinball_loss(prediction, y, alpha),
        }
    }

    /// Factor multiplying the (shrunken) basis vector in a descent step:
    /// the residual for squared loss, the subgradient sign for pinball.
    pub fn descent_factor(&self, prediction: f64, y: f64) -> Result<f64> {
        match *self {
            LossKind::Squared => Ok(y - prediction),
            LossKind::Pinball { alpha } => pinball_subgradient_sign(prediction, y, alpha),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "pinball level must lie in (0, 1), got {alpha}"
        )))
    }
}

pub fn squared_loss(prediction: f64, y: f64) -> Result<f64> {
    ensure_finite(prediction, "prediction")?;
    ensure_finite(y, "response")?;
    let r = prediction - y;
    Ok(r * r)
}

/// `alpha * (y - f)` when `y > f`, otherwise `(1 - alpha) * (f - y)`.
pub fn pinball_loss(prediction: f64, y: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    ensure_finite(prediction, "prediction")?;
    ensure_finite(y, "response")?;
    if y > prediction {
        Ok(alpha * (y - prediction))
    } else {
        Ok((1.0 - alpha) * (prediction - y))
    }
}

/// Negative subgradient of the pinball loss with respect to the prediction.
/// Ties fall to the `otherwise` branch of the loss.
pub fn pinball_subgradient_sign(prediction: f64, y: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    ensure_finite(prediction, "prediction")?;
    ensure_finite(y, "response")?;
    if y > prediction {
        Ok(alpha)
    } else {
        Ok(-(1.0 - alpha))
    }
}
