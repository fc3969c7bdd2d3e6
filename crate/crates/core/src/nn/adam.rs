use ndarray::{Array2, Zip};

use crate::error::{HgnnError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates, one pair per parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: Vec<Array2<f64>>,
    pub second_moment: Vec<Array2<f64>>,
    pub step_count: u64,
}

impl AdamState {
    pub fn zeros_like<'a>(params: impl IntoIterator<Item = &'a Array2<f64>>) -> Self {
        let first_moment: Vec<_> = params
            .into_iter()
            .map(|p| Array2::zeros(p.raw_dim()))
            .collect();
        AdamState {
            second_moment: first_moment.clone(),
            first_moment,
            step_count: 0,
        }
    }
}

/// One bias-corrected Adam update applied in place.
pub fn adam_step<'a>(
    params: impl IntoIterator<Item = &'a mut Array2<f64>>,
    grads: &[Array2<f64>],
    state: &mut AdamState,
    cfg: &AdamConfig,
) -> Result<()> {
    let params: Vec<&mut Array2<f64>> = params.into_iter().collect();
    if params.len() != grads.len() || params.len() != state.first_moment.len() {
        return Err(HgnnError::ShapeMismatch(format!(
            "{} parameters, {} gradients, {} moment slots",
            params.len(),
            grads.len(),
            state.first_moment.len()
        )));
    }
    for (k, (p, g)) in params.iter().zip(grads).enumerate() {
        if p.dim() != g.dim() || state.first_moment[k].dim() != g.dim() {
            return Err(HgnnError::ShapeMismatch(format!(
                "parameter {k}: {:?} vs gradient {:?}",
                p.dim(),
                g.dim()
            )));
        }
    }

    state.step_count += 1;
    let t = state.step_count as i32;
    let bias1 = 1.0 - cfg.beta1.powi(t);
    let bias2 = 1.0 - cfg.beta2.powi(t);
    let (b1, b2, lr, eps) = (cfg.beta1, cfg.beta2, cfg.learning_rate, cfg.eps);
    for ((p, g), (m, v)) in params
        .into_iter()
        .zip(grads)
        .zip(state.first_moment.iter_mut().zip(state.second_moment.iter_mut()))
    {
        Zip::from(p).and(g).and(m).and(v).for_each(|p, &g, m, v| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let m_hat = *m / bias1;
            let v_hat = *v / bias2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        });
    }
    Ok(())
}
