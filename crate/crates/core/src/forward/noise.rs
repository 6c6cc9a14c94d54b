//! Multiplicative noise `|w^ε| = (1 + ε r)|w|`, `r` uniform in `[-1, 1)`.
//!
//! Each (wavenumber, channel) pair owns an independent ChaCha stream, so a
//! draw depends only on (seed, k, channel, point index) and not on the order
//! in which channels are processed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ForwardError, PhaselessTrace};

/// Channel ids: 0 for `|u|`, 1 for `|Δu|`, then two per reference source.
pub mod channel {
    pub const ABS_U: u64 = 0;
    pub const ABS_LAP_U: u64 = 1;

    pub fn reference(j: usize, ell: usize, laplacian: bool) -> u64 {
        2 + 4 * (j as u64 - 1) + 2 * (ell as u64 - 1) + u64::from(laplacian)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    eps: f64,
    seed: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl NoiseModel {
    pub fn new(eps: f64, seed: u64) -> Result<Self, ForwardError> {
        if !(0.0..1.0).contains(&eps) {
            return Err(ForwardError::NoiseLevel(eps));
        }
        Ok(Self { eps, seed })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn stream(&self, k: f64, channel: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ splitmix(k.to_bits()));
        rng.set_stream(channel);
        rng
    }

    /// Multiplies `values[i]` by `1 + ε r_i`.
    pub fn perturb(&self, values: &mut [f64], k: f64, channel: u64) {
        if self.eps == 0.0 {
            return;
        }
        let mut rng = self.stream(k, channel);
        for v in values {
            let r: f64 = rng.gen_range(-1.0..1.0);
            *v *= 1.0 + self.eps * r;
        }
    }
}

/// Applies independent noise draws to every magnitude in the trace.
pub fn add_noise(t: &PhaselessTrace, eps: f64, seed: u64) -> Result<PhaselessTrace, ForwardError> {
    let model = NoiseModel::new(eps, seed)?;
    let mut out = t.clone();
    model.perturb(&mut out.abs_u, t.k, channel::ABS_U);
    model.perturb(&mut out.abs_laplacian_u, t.k, channel::ABS_LAP_U);
    for c in &mut out.references {
        model.perturb(&mut c.abs_v, t.k, channel::reference(c.j, c.ell, false));
        model.perturb(
            &mut c.abs_laplacian_v,
            t.k,
            channel::reference(c.j, c.ell, true),
        );
    }
    Ok(out)
}
