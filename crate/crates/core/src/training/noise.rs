use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::encoder::GteTensor;
use crate::error::{Error, Result};

/// Synthetic corruption applied to a clean tensor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseConfig {
    /// Std of additive Gaussian noise on probability channels.
    pub sigma_p: f64,
    /// Std of additive Gaussian noise on vector channels, meters.
    pub sigma_vec: f64,
    /// Box-blur radius for probability channels, cells; 0 disables.
    pub blur_radius: usize,
    /// Fraction of true-vertex cells whose vertexness is zeroed.
    pub drop_rate: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_p >= 0.0 && self.sigma_vec >= 0.0 && self.sigma_p.is_finite() && self.sigma_vec.is_finite()) {
            return Err(Error::Config("noise standard deviations must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.drop_rate) {
            return Err(Error::Config(format!("drop_rate must lie in [0, 1], got {}", self.drop_rate)));
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.sigma_p == 0.0 && self.sigma_vec == 0.0 && self.blur_radius == 0 && self.drop_rate == 0.0
    }
}

/// Applies, in order: additive Gaussian noise on every channel, the box blur
/// on probability channels, clamping of probabilities to `[0, 1]`, and
/// vertex dropping. Deterministic for a given seed.
pub fn perturb(t: &GteTensor, cfg: &NoiseConfig) -> Result<GteTensor> {
    cfg.validate()?;
    let mut out = t.clone();
    if cfg.is_identity() {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let channels = t.channels();

    let prob_noise = (cfg.sigma_p > 0.0).then(|| Normal::new(0.0, cfg.sigma_p).unwrap());
    let vec_noise = (cfg.sigma_vec > 0.0).then(|| Normal::new(0.0, cfg.sigma_vec).unwrap());
    if prob_noise.is_some() || vec_noise.is_some() {
        for (i, v) in out.data_mut().iter_mut().enumerate() {
            let dist = if GteTensor::is_probability_channel(i % channels) {
                &prob_noise
            } else {
                &vec_noise
            };
            if let Some(n) = dist {
                *v = (*v as f64 + n.sample(&mut rng)) as f32;
            }
        }
    }

    if cfg.blur_radius > 0 {
        for ch in (0..channels).filter(|&c| GteTensor::is_probability_channel(c)) {
            box_blur(&mut out, ch, cfg.blur_radius);
        }
    }

    for (i, v) in out.data_mut().iter_mut().enumerate() {
        if GteTensor::is_probability_channel(i % channels) {
            *v = v.clamp(0.0, 1.0);
        }
    }

    if cfg.drop_rate > 0.0 {
        let vertex_cells: Vec<(usize, usize)> = (0..t.height())
            .flat_map(|y| (0..t.width()).map(move |x| (x, y)))
            .filter(|&(x, y)| t.vertexness(x, y) >= 0.5)
            .collect();
        let n = (cfg.drop_rate * vertex_cells.len() as f64).round() as usize;
        for i in sample(&mut rng, vertex_cells.len(), n.min(vertex_cells.len())) {
            let (x, y) = vertex_cells[i];
            out.cell_mut(x, y)[0] = 0.0;
        }
    }
    Ok(out)
}

/// Mean over a `(2r+1)^2` window truncated at the border, via prefix sums.
fn box_blur(t: &mut GteTensor, channel: usize, r: usize) {
    let (w, h) = (t.width(), t.height());
    let mut integral = vec![0.0f64; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0.0;
        for x in 0..w {
            row += t.cell(x, y)[channel] as f64;
            integral[(y + 1) * (w + 1) + x + 1] = integral[y * (w + 1) + x + 1] + row;
        }
    }
    for y in 0..h {
        let (y0, y1) = (y.saturating_sub(r), (y + r + 1).min(h));
        for x in 0..w {
            let (x0, x1) = (x.saturating_sub(r), (x + r + 1).min(w));
            let s = integral[y1 * (w + 1) + x1] - integral[y0 * (w + 1) + x1] - integral[y1 * (w + 1) + x0]
                + integral[y0 * (w + 1) + x0];
            t.cell_mut(x, y)[channel] = (s / ((y1 - y0) * (x1 - x0)) as f64) as f32;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn impulse() -> GteTensor {
        let mut t = GteTensor::zeros(9, 9, 3, 1.0).unwrap();
        t.cell_mut(4, 4)[0] = 1.0;
        t
    }

    #[test]
    fn zero_config_is_identity() {
        let t = impulse();
        assert_eq!(perturb(&t, &NoiseConfig { seed: 9, ..Default::default() }).unwrap(), t);
    }

    #[test]
    fn blur_spreads_mass_evenly() {
        let t = impulse();
        let out = perturb(&t, &NoiseConfig { blur_radius: 1, ..Default::default() }).unwrap();
        for y in 3..=5 {
            for x in 3..=5 {
                assert!((out.vertexness(x, y) - 1.0 / 9.0).abs() < 1e-6);
            }
        }
        assert_eq!(out.vertexness(2, 2), 0.0);
    }

    #[test]
    fn drop_all_vertices() {
        let out = perturb(&impulse(), &NoiseConfig { drop_rate: 1.0, ..Default::default() }).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(perturb(&impulse(), &NoiseConfig { drop_rate: 1.5, ..Default::default() }).is_err());
        assert!(perturb(&impulse(), &NoiseConfig { sigma_p: -0.1, ..Default::default() }).is_err());
    }
}
