use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use log::info;
use rayon::prelude::*;
use serde::Serialize;

use super::{rel_inf_error, rel_l2_error, test_source, ExperimentConfig, ForwardStore, Result};
use crate::forward::{FieldTrace, NoiseModel};
use crate::fourier::{
    coefficients_from_traces, reconstruct, write_coefficients_csv, write_grid_bin, write_grid_csv,
    AdmissibleSet, FourierCoefficientMap, Grid, Reconstruction, SeriesReport, ZerothMode,
};
use crate::phase_retrieval::{acquire, build_geometry, retrieve_trace, OpTag, RetrievalGeometry};

/// Mean arc errors of one (k, ε, op) cell over the repetitions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalRow {
    pub k: f64,
    pub j: usize,
    pub op_tag: OpTag,
    pub eps: f64,
    pub rel_l2: f64,
    pub rel_inf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DataPath {
    /// Noisy phaseless data through phase retrieval.
    Retrieved,
    /// Exact phased forward data, skipping retrieval.
    PhasedTruth,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionRow {
    pub eps: f64,
    pub n: usize,
    pub data: DataPath,
    pub rel_l2_grid: f64,
    pub imag_residue: f64,
    pub conjugate_defect: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorReport {
    pub retrieval: Vec<RetrievalRow>,
    pub reconstruction: Vec<ReconstructionRow>,
}

/// `[(l2, inf) of u, (l2, inf) of Δu]` restricted to the given points.
pub fn arc_errors(truth: &FieldTrace, got: &FieldTrace, idx: &[usize]) -> Result<[(f64, f64); 2]> {
    let pick = |v: &[num_complex::Complex64]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let mut out = [(0.0, 0.0); 2];
    for (o, (e, a)) in out
        .iter_mut()
        .zip([(&truth.u, &got.u), (&truth.laplacian_u, &got.laplacian_u)])
    {
        let (ex, ap) = (pick(e), pick(a));
        *o = (rel_l2_error(&ap, &ex)?, rel_inf_error(&ap, &ex)?);
    }
    Ok(out)
}

fn noise_for(eps: f64, seed: u64) -> Result<Option<NoiseModel>> {
    Ok(if eps == 0.0 {
        None
    } else {
        Some(NoiseModel::new(eps, seed)?)
    })
}

fn retrieve_once(
    truth: &FieldTrace,
    g: &RetrievalGeometry,
    eps: f64,
    seed: u64,
) -> Result<FieldTrace> {
    let noise = noise_for(eps, seed)?;
    let pt = acquire(truth, g, noise.as_ref())?;
    Ok(retrieve_trace(&pt, g)?.field)
}

/// Arc-1 retrieval errors at the table wavenumbers for every configured
/// noise level, averaged over seeds `seed, seed + 1, ...`.
pub fn run_phase_retrieval_experiment(
    cfg: &ExperimentConfig,
    store: &mut ForwardStore,
) -> Result<Vec<RetrievalRow>> {
    cfg.validate()?;
    let p = cfg.params();
    let ks = cfg.retrieval_wavenumbers();
    let truths = store.traces(&ks)?;
    let mut rows = Vec::new();
    for truth in &truths {
        let g = build_geometry(&p, truth.k)?;
        let idx = g.partition(&truth.points).swap_remove(0);
        for &eps in &cfg.retrieval_eps {
            // noiseless retrieval is deterministic, one run is the mean
            let reps = if eps == 0.0 { 1 } else { cfg.repetitions };
            let errs: Vec<[(f64, f64); 2]> = (0..reps as u64)
                .into_par_iter()
                .map(|r| arc_errors(truth, &retrieve_once(truth, &g, eps, cfg.seed + r)?, &idx))
                .collect::<Result<_>>()?;
            for (o, tag) in OpTag::BOTH.into_iter().enumerate() {
                let mean = |f: fn((f64, f64)) -> f64| {
                    errs.iter().map(|e| f(e[o])).sum::<f64>() / reps as f64
                };
                rows.push(RetrievalRow {
                    k: truth.k,
                    j: 1,
                    op_tag: tag,
                    eps,
                    rel_l2: mean(|e| e.0),
                    rel_inf: mean(|e| e.1),
                });
            }
            info!("retrieval k = {:.6}, eps = {eps}: done", truth.k);
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct TableRow {
    eps: f64,
    k: f64,
    error: f64,
}

/// `table1.csv`..`table4.csv`: L² of `u`, L² of `Δu`, L∞ of `u`, L∞ of `Δu`,
/// each in long form `eps,k,error`; plus every row in `retrieval_errors.csv`.
pub fn write_retrieval_tables(dir: &Path, rows: &[RetrievalRow]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let specs: [(OpTag, bool); 4] = [
        (OpTag::Identity, true),
        (OpTag::Laplacian, true),
        (OpTag::Identity, false),
        (OpTag::Laplacian, false),
    ];
    for (i, (tag, l2)) in specs.into_iter().enumerate() {
        let mut w = csv::Writer::from_path(dir.join(format!("table{}.csv", i + 1)))?;
        let mut selected: Vec<&RetrievalRow> = rows.iter().filter(|r| r.op_tag == tag).collect();
        selected.sort_by(|a, b| a.eps.total_cmp(&b.eps).then(a.k.total_cmp(&b.k)));
        for r in selected {
            w.serialize(TableRow {
                eps: r.eps,
                k: r.k,
                error: if l2 { r.rel_l2 } else { r.rel_inf },
            })?;
        }
        w.flush()?;
    }
    let mut w = csv::Writer::from_path(dir.join("retrieval_errors.csv"))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ReconstructionOutcome {
    pub row: ReconstructionRow,
    pub coefficients: FourierCoefficientMap,
    pub reconstruction: Reconstruction,
    pub series: Vec<SeriesReport>,
}

/// One reconstruction at noise level `eps` with `N` from the config.
pub fn reconstruct_at(
    cfg: &ExperimentConfig,
    store: &mut ForwardStore,
    eps: f64,
    data: DataPath,
) -> Result<ReconstructionOutcome> {
    cfg.validate()?;
    let p = cfg.params();
    let n = cfg.truncation_for(eps)?;
    let set = AdmissibleSet::new(n, cfg.a, p.k0, p.radius(p.k0))?;
    let truths = store.traces(&set.wavenumbers())?;
    info!(
        "reconstruction eps = {eps}, N = {n}, {} wavenumbers, {data:?}",
        truths.len()
    );
    let fields: Vec<FieldTrace> = match data {
        DataPath::PhasedTruth => truths,
        DataPath::Retrieved => truths
            .par_iter()
            .map(|t| retrieve_once(t, &build_geometry(&p, t.k)?, eps, cfg.seed))
            .collect::<Result<_>>()?,
    };
    let (coefficients, series) = coefficients_from_traces(&set, &fields, cfg.rho)?;
    let grid = Grid::cell_centered(cfg.a, cfg.grid);
    let reconstruction = reconstruct(&coefficients, &grid, ZerothMode::Constant)?;
    let exact = grid.sample(test_source);
    let row = ReconstructionRow {
        eps,
        n,
        data,
        rel_l2_grid: rel_l2_error(&reconstruction.values, &exact)?,
        imag_residue: reconstruction.imag_residue,
        conjugate_defect: coefficients.conjugate_symmetry_defect(),
    };
    info!(
        "reconstruction eps = {eps}: relative L2 error {:.4e}",
        row.rel_l2_grid
    );
    Ok(ReconstructionOutcome {
        row,
        coefficients,
        reconstruction,
        series,
    })
}

fn stem(eps: f64, data: DataPath) -> String {
    match data {
        DataPath::Retrieved => format!("eps{eps}"),
        DataPath::PhasedTruth => format!("phased_eps{eps}"),
    }
}

/// `recon_<stem>.csv`, `recon_<stem>.bin` and `coefficients_<stem>.csv`.
pub fn write_reconstruction_outputs(dir: &Path, o: &ReconstructionOutcome) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let s = stem(o.row.eps, o.row.data);
    write_grid_csv(
        BufWriter::new(File::create(dir.join(format!("recon_{s}.csv")))?),
        &o.reconstruction,
    )?;
    write_grid_bin(
        BufWriter::new(File::create(dir.join(format!("recon_{s}.bin")))?),
        &o.reconstruction,
    )?;
    write_coefficients_csv(
        BufWriter::new(File::create(dir.join(format!("coefficients_{s}.csv")))?),
        &o.coefficients,
    )?;
    Ok(())
}

/// Every configured noise level through retrieval, plus the phased-truth
/// bypass at `ε = 0`; writes grids for each and `table5.csv`.
pub fn run_reconstruction_experiment(
    cfg: &ExperimentConfig,
    store: &mut ForwardStore,
) -> Result<Vec<ReconstructionRow>> {
    let mut rows = Vec::new();
    let runs = cfg
        .reconstruction_eps
        .iter()
        .map(|&e| (e, DataPath::Retrieved))
        .chain(std::iter::once((0.0, DataPath::PhasedTruth)));
    for (eps, data) in runs {
        let o = reconstruct_at(cfg, store, eps, data)?;
        write_reconstruction_outputs(&cfg.out_dir, &o)?;
        rows.push(o.row);
    }
    write_table5(&cfg.out_dir, &rows)?;
    Ok(rows)
}

pub fn write_table5(dir: &Path, rows: &[ReconstructionRow]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("table5.csv"))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct GeometryRow {
    k: f64,
    #[serde(rename = "R")]
    radius: f64,
    j: usize,
    ell: usize,
    lambda: f64,
    x1: f64,
    x2: f64,
}

/// Reference-point layout at `k`, one row per `z_{j,ℓ}`.
pub fn write_geometry_csv(path: &Path, cfg: &ExperimentConfig, k: f64) -> Result<()> {
    let g = build_geometry(&cfg.params(), k)?;
    let mut w = csv::Writer::from_path(path)?;
    for arc in &g.arcs {
        for ell in 0..2 {
            w.serialize(GeometryRow {
                k,
                radius: g.radius,
                j: arc.j,
                ell: ell + 1,
                lambda: arc.lambda[ell],
                x1: arc.z[ell].x1,
                x2: arc.z[ell].x2,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `geometry_k0.csv` at `k0` and `geometry_k1.csv` at `k = π`.
pub fn write_geometry_files(cfg: &ExperimentConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    write_geometry_csv(&cfg.out_dir.join("geometry_k0.csv"), cfg, cfg.k0())?;
    write_geometry_csv(
        &cfg.out_dir.join("geometry_k1.csv"),
        cfg,
        std::f64::consts::PI,
    )?;
    Ok(())
}

/// The exact source on the reconstruction grid, `x1,x2,value`.
pub fn write_source_exact(cfg: &ExperimentConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let grid = Grid::cell_centered(cfg.a, cfg.grid);
    let values = grid.sample(test_source);
    let r = Reconstruction {
        grid,
        values,
        imag_residue: 0.0,
    };
    write_grid_csv(
        BufWriter::new(File::create(cfg.out_dir.join("source_exact.csv"))?),
        &r,
    )?;
    Ok(())
}
