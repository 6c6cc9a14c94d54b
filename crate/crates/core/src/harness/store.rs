//! Forward traces of the test source, synthesized once per wavenumber and
//! optionally persisted so later runs skip the quadrature.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use log::info;

use super::{test_source_field, ExperimentConfig, Result};
use crate::forward::{
    circle_points, radiate, read_field_csv, write_field_csv, FieldTrace, QuadratureRule,
};

pub struct ForwardStore {
    cfg: ExperimentConfig,
    rule: QuadratureRule,
    traces: BTreeMap<u64, FieldTrace>,
}

impl ForwardStore {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let rule = QuadratureRule::gauss_legendre(cfg.a, cfg.quadrature)?;
        let mut store = Self {
            cfg: cfg.clone(),
            rule,
            traces: BTreeMap::new(),
        };
        if cfg.cache_forward {
            store.load()?;
        }
        Ok(store)
    }

    fn radii(&self) -> Vec<f64> {
        let p = self.cfg.params();
        let mut r = vec![p.radius(p.k0), p.radius(1.0)];
        r.dedup();
        r
    }

    fn cache_path(&self, radius: f64) -> PathBuf {
        self.cfg.out_dir.join(format!(
            "forward_a{}_q{}_n{}_r{}.csv",
            self.cfg.a, self.cfg.quadrature, self.cfg.points_per_circle, radius
        ))
    }

    fn load(&mut self) -> Result<()> {
        for radius in self.radii() {
            let path = self.cache_path(radius);
            if path.exists() {
                for t in read_field_csv(BufReader::new(File::open(&path)?), radius)? {
                    self.traces.insert(t.k.to_bits(), t);
                }
                info!("loaded forward cache {}", path.display());
            }
        }
        Ok(())
    }

    fn save(&self) -> Result<()> {
        std::fs::create_dir_all(&self.cfg.out_dir)?;
        let p = self.cfg.params();
        for radius in self.radii() {
            let group: Vec<FieldTrace> = self
                .traces
                .values()
                .filter(|t| p.radius(t.k) == radius)
                .cloned()
                .collect();
            write_field_csv(
                BufWriter::new(File::create(self.cache_path(radius))?),
                &group,
            )?;
        }
        Ok(())
    }

    /// Traces at every `k`, in the given order, synthesizing missing ones.
    pub fn traces(&mut self, ks: &[f64]) -> Result<Vec<FieldTrace>> {
        let p = self.cfg.params();
        let source = test_source_field(self.cfg.a);
        let missing: Vec<f64> = ks
            .iter()
            .copied()
            .filter(|k| !self.traces.contains_key(&k.to_bits()))
            .collect();
        for (i, &k) in missing.iter().enumerate() {
            let pts = circle_points(p.radius(k), self.cfg.points_per_circle);
            info!(
                "forward synthesis {}/{} at k = {k:.6}",
                i + 1,
                missing.len()
            );
            self.traces
                .insert(k.to_bits(), radiate(&source, k, &pts, &self.rule)?);
        }
        if self.cfg.cache_forward && !missing.is_empty() {
            self.save()?;
        }
        Ok(ks
            .iter()
            .map(|k| self.traces[&k.to_bits()].clone())
            .collect())
    }
}
