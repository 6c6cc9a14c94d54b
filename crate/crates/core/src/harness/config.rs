use std::f64::consts::{PI, SQRT_2};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{HarnessError, Result};
use crate::fourier::truncation_from_noise;
use crate::phase_retrieval::RetrievalParams;

/// Campaign parameters. Every field has a default, so a config file only
/// lists what it overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Half-width of the source box `V0 = (-a, a)^2`.
    pub a: f64,
    /// Measurement radius factor, `R = τa` away from `k0`.
    pub tau: f64,
    /// Number of measurement arcs.
    pub m: usize,
    /// Continuation radius for the Fourier stage.
    pub rho: f64,
    /// Measurement radius; when present it must equal `τa`.
    pub radius: Option<f64>,
    pub points_per_circle: usize,
    /// Gauss-Legendre nodes per axis for forward synthesis.
    pub quadrature: usize,
    /// Fixed truncation `N`, overriding the noise rule.
    pub truncation: Option<usize>,
    /// Upper bound applied to the noise-rule `N`.
    pub n_cap: Option<usize>,
    /// `N` for noiseless reconstructions.
    pub noiseless_n: usize,
    /// `N` of the admissible set swept by the bound checks.
    pub bounds_n: usize,
    /// Noise levels of the retrieval tables.
    pub retrieval_eps: Vec<f64>,
    /// Noise levels of the reconstruction table.
    pub reconstruction_eps: Vec<f64>,
    pub repetitions: usize,
    pub seed: u64,
    /// Reconstruction grid side.
    pub grid: usize,
    /// Multiplier on `M` in the determinant floors.
    pub m_scale: f64,
    pub out_dir: PathBuf,
    /// Reuse forward data across runs via CSV files in `out_dir`.
    pub cache_forward: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            a: 3.0,
            tau: 6.0,
            m: 10,
            rho: 20.0,
            radius: None,
            points_per_circle: 400,
            quadrature: 240,
            truncation: None,
            n_cap: None,
            noiseless_n: 10,
            bounds_n: 20,
            retrieval_eps: vec![0.0, 0.001, 0.01, 0.05],
            reconstruction_eps: vec![0.01, 0.05, 0.1, 0.2],
            repetitions: 10,
            seed: 0,
            grid: 600,
            m_scale: 1.0,
            out_dir: PathBuf::from("out"),
            cache_forward: true,
        }
    }
}

fn invalid(msg: String) -> HarnessError {
    HarnessError::Config(msg)
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(invalid(format!("a = {} must be positive", self.a)));
        }
        if !(self.tau >= 6.0 && self.tau.is_finite()) {
            return Err(invalid(format!("tau = {} must be at least 6", self.tau)));
        }
        if self.m < 10 {
            return Err(invalid(format!("m = {} must be at least 10", self.m)));
        }
        let r = self.tau * self.a;
        if let Some(given) = self.radius {
            if (given - r).abs() > 1e-12 * r {
                return Err(invalid(format!("radius = {given} must equal tau·a = {r}")));
            }
        }
        if r <= SQRT_2 * self.a {
            return Err(invalid(format!("R = {r} must exceed √2·a")));
        }
        if !(self.rho > r && self.rho.is_finite()) {
            return Err(invalid(format!("rho = {} must exceed R = {r}", self.rho)));
        }
        if self.points_per_circle < 2 * self.m {
            return Err(invalid(format!(
                "{} points cannot cover {} arcs",
                self.points_per_circle, self.m
            )));
        }
        if self.quadrature == 0 || self.grid == 0 || self.repetitions == 0 {
            return Err(invalid(
                "quadrature, grid and repetitions must be positive".into(),
            ));
        }
        if [self.truncation, self.n_cap].contains(&Some(0))
            || self.noiseless_n == 0
            || self.bounds_n == 0
        {
            return Err(invalid("truncation orders must be positive".into()));
        }
        for &e in self.retrieval_eps.iter().chain(&self.reconstruction_eps) {
            if !(0.0..1.0).contains(&e) {
                return Err(invalid(format!("noise level {e} outside [0, 1)")));
            }
        }
        if !(self.m_scale > 0.0 && self.m_scale.is_finite()) {
            return Err(invalid(format!(
                "m_scale = {} must be positive",
                self.m_scale
            )));
        }
        Ok(())
    }

    pub fn params(&self) -> RetrievalParams {
        RetrievalParams {
            a: self.a,
            m: self.m,
            tau: self.tau,
            k0: self.k0(),
        }
    }

    /// `k0 = π/(30a)`.
    pub fn k0(&self) -> f64 {
        PI / (30.0 * self.a)
    }

    /// Wavenumbers of the retrieval tables: `k0, π/3, 5π/3, 10π/3`.
    pub fn retrieval_wavenumbers(&self) -> [f64; 4] {
        [self.k0(), PI / 3.0, 5.0 * PI / 3.0, 10.0 * PI / 3.0]
    }

    /// Truncation for noise level `eps`: the explicit override, else the
    /// noise rule (or `noiseless_n` at `eps = 0`), then the cap.
    pub fn truncation_for(&self, eps: f64) -> Result<usize> {
        let n = match self.truncation {
            Some(n) => n,
            None if eps == 0.0 => self.noiseless_n,
            None => truncation_from_noise(eps)?,
        };
        Ok(self.n_cap.map_or(n, |cap| n.min(cap)))
    }
}
