//! Numeric checks of the analytic estimates behind the retrieval stage.
//!
//! Each check evaluates an inequality at many points and records the
//! smallest margin, `bound / value` for upper bounds and `value / bound` for
//! lower bounds, so a margin below 1 is a violation.

use std::f64::consts::{FRAC_PI_4, PI};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use super::{ExperimentConfig, Result};
use crate::forward::circle_points;
use crate::fourier::AdmissibleSet;
use crate::phase_retrieval::{build_geometry, det_lower_bound, det_sweep, OpTag};
use crate::specfun::{bessel_j, bessel_k, bessel_y, dbessel_j, dbessel_y, h0_tilde, hankel1};

/// Relative slack on inequalities that hold with equality at arc midlines.
pub const EQUALITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub k: Option<f64>,
    pub j: Option<usize>,
    pub point_index: Option<usize>,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub check: &'static str,
    pub evaluated: usize,
    pub violations: usize,
    pub min_margin: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundsReport {
    pub checks: Vec<CheckSummary>,
    pub violations: Vec<Violation>,
}

impl BoundsReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("bounds_summary.csv"))?;
        for c in &self.checks {
            w.serialize(c)?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("bounds_violations.csv"))?;
        for v in &self.violations {
            w.serialize(v)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Default)]
struct Site {
    k: Option<f64>,
    j: Option<usize>,
    point_index: Option<usize>,
}

struct Check {
    summary: CheckSummary,
    violations: Vec<Violation>,
}

impl Check {
    fn new(check: &'static str) -> Self {
        Self {
            summary: CheckSummary {
                check,
                evaluated: 0,
                violations: 0,
                min_margin: f64::INFINITY,
            },
            violations: Vec::new(),
        }
    }

    fn record(&mut self, margin: f64, value: f64, bound: f64, at: Site) {
        self.summary.evaluated += 1;
        // NaN margins count as violations
        if !(margin >= 1.0) {
            self.summary.violations += 1;
            self.violations.push(Violation {
                check: self.summary.check,
                k: at.k,
                j: at.j,
                point_index: at.point_index,
                value,
                bound,
            });
        }
        self.summary.min_margin = self.summary.min_margin.min(margin);
    }

    /// `value <= bound` for nonnegative values.
    fn upper(&mut self, value: f64, bound: f64, at: Site) {
        self.record(bound / value, value, bound, at);
    }

    /// `value < bound`; equality gets margin 0.
    fn strict_upper(&mut self, value: f64, bound: f64, at: Site) {
        let margin = if value < bound { bound / value } else { 0.0 };
        self.record(margin, value, bound, at);
    }

    /// `value >= bound` for positive bounds.
    fn lower(&mut self, value: f64, bound: f64, at: Site) {
        self.record(value / bound, value, bound, at);
    }

    /// `value > bound`; equality gets margin 0.
    fn strict_lower(&mut self, value: f64, bound: f64, at: Site) {
        let margin = if value > bound { value / bound } else { 0.0 };
        self.record(margin, value, bound, at);
    }

    fn finish(self, report: &mut BoundsReport) {
        report.checks.push(self.summary);
        report.violations.extend(self.violations);
    }
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (l, h) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (l + (h - l) * i as f64 / (n - 1) as f64).exp())
}

fn lin_spaced(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn special_function_checks(report: &mut BoundsReport) -> Result<()> {
    let none = Site::default();
    let mut c = Check::new("k0_envelope");
    for x in log_spaced(0.1, 50.0, 200) {
        let diff = (bessel_k(0, x)? - (PI / (2.0 * x)).sqrt() * (-x).exp()).abs();
        c.upper(diff, PI.sqrt() * x.powf(-1.5) / (8.0 * 2f64.sqrt()), none);
    }
    c.finish(report);

    let mut c = Check::new("h0_envelope");
    for x in log_spaced(0.1, 50.0, 200) {
        let lead = Complex64::from_polar((2.0 / (PI * x)).sqrt(), x - FRAC_PI_4);
        c.upper(
            (hankel1(0, x)? - lead).norm(),
            x.powf(-1.5) / (4.0 * (2.0 * PI).sqrt()),
            none,
        );
    }
    c.finish(report);

    let mut c = Check::new("wronskian");
    for n in 0..=20 {
        for x in [0.5, 1.0, 3.0, 10.0, 30.0] {
            let w = bessel_j(n, x)? * dbessel_y(n, x)? - dbessel_j(n, x)? * bessel_y(n, x)?;
            let want = 2.0 / (PI * x);
            c.upper(((w - want) / want).abs(), 1e-10, none);
        }
    }
    c.finish(report);

    let brackets = [
        ("bracket_t1", 0.314, 0.346, [0.976, 0.777, 0.848]),
        ("bracket_t2", 1.551, 1.571, [0.49, 0.413, 0.128]),
    ];
    for (name, lo, hi, caps) in brackets {
        let mut c = Check::new(name);
        for t in lin_spaced(lo, hi, 401) {
            for (v, cap) in [bessel_j(0, t)?, bessel_y(0, t)?, h0_tilde(t)?]
                .into_iter()
                .zip(caps)
            {
                c.strict_upper(v.abs(), cap, none);
            }
        }
        c.finish(report);
    }
    Ok(())
}

/// Runs every check over `𝕂_N ∪ {k0}` with `N = cfg.bounds_n`. The
/// determinant floors are multiplied by `cfg.m_scale`.
pub fn verify_bounds(cfg: &ExperimentConfig) -> Result<BoundsReport> {
    cfg.validate()?;
    let p = cfg.params();
    let mut report = BoundsReport::default();
    special_function_checks(&mut report)?;

    let set = AdmissibleSet::new(cfg.bounds_n, cfg.a, p.k0, p.radius(p.k0))?;
    let mut det = [Check::new("det_identity"), Check::new("det_laplacian")];
    let [mut lambda2, mut kr1, mut kr2, mut kdr_lo, mut kdr_hi, mut t1, mut t2] = [
        "lambda2",
        "kr1_lower",
        "kr2_lower",
        "kdr_lower",
        "kdr_upper",
        "k0_t1",
        "k0_t2",
    ]
    .map(Check::new);
    let tau = p.tau;
    for k in set.wavenumbers() {
        let g = build_geometry(&p, k)?;
        let pts = circle_points(g.radius, cfg.points_per_circle);
        for s in det_sweep(&g, &pts)? {
            let at = Site {
                k: Some(k),
                j: Some(s.j),
                point_index: Some(s.point_index),
            };
            let bound = cfg.m_scale * det_lower_bound(k, &p, s.tag);
            det[usize::from(s.tag == OpTag::Laplacian)].lower(s.det, bound, at);
        }
        for (arc, idx) in g.arcs.iter().zip(g.partition(&pts)) {
            for i in idx {
                let at = Site {
                    k: Some(k),
                    j: Some(arc.j),
                    point_index: Some(i),
                };
                let (r1, r2) = (pts[i].dist(arc.z[0]), pts[i].dist(arc.z[1]));
                if p.is_k0(k) {
                    t1.lower(k * r1, 0.314 * (1.0 - EQUALITY_SLACK), at);
                    t1.upper(k * r1, 0.346, at);
                    t2.lower(k * r2, 1.551, at);
                    t2.upper(k * r2, 1.571, at);
                } else {
                    lambda2.upper(arc.lambda[1], 2.0 / 3.0, at);
                    kr1.lower(k * r1, tau * PI / 2.0 * (1.0 - EQUALITY_SLACK), at);
                    kr2.strict_lower(k * r2, tau * PI / 3.0, at);
                    kdr_lo.lower(k * (r1 - r2), 0.3363 * PI, at);
                    kdr_hi.upper(k * (r1 - r2), PI / 2.0 * (1.0 + EQUALITY_SLACK), at);
                }
            }
        }
    }
    for c in det
        .into_iter()
        .chain([lambda2, kr1, kr2, kdr_lo, kdr_hi, t1, t2])
    {
        c.finish(&mut report);
    }
    Ok(report)
}
