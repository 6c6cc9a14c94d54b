use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info, warn};

use biharmonic_isp::forward::{
    read_field_csv, read_phaseless_csv, write_field_csv, write_phaseless_csv, NoiseModel,
};
use biharmonic_isp::harness::{
    reconstruct_at, run_phase_retrieval_experiment, run_reconstruction_experiment, verify_bounds,
    write_geometry_files, write_reconstruction_outputs, write_retrieval_tables, write_source_exact,
    write_table5, DataPath, ExperimentConfig, ForwardStore,
};
use biharmonic_isp::phase_retrieval::{
    acquire, build_geometry, error_rows, retrieve_trace, write_error_report,
};

type BoxResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(
    name = "biharm",
    version,
    about = "Phaseless biharmonic inverse source experiments"
)]
struct Cli {
    /// TOML config; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Comma-separated noise levels for the stage being run.
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Reconstruction grid side.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Radiate the test source at the table wavenumbers; writes forward.csv
    /// and phaseless.csv (noisy at the first --eps level, clean otherwise).
    Forward,
    /// Retrieve phases from phaseless.csv; writes retrieved.csv, and
    /// retrieval_report.csv when forward.csv is present.
    Retrieve,
    /// Reconstruct at each noise level; writes grids, coefficients and
    /// table5.csv. Without --eps also runs the phased-truth bypass.
    Reconstruct,
    /// Retrieval error tables table1.csv..table4.csv.
    Tables,
    /// Numeric bound checks; exits with 2 on any violation.
    VerifyBounds,
    /// Every stage plus geometry and exact-source files.
    Full,
}

enum Outcome {
    Done,
    Violations,
}

fn load_config(cli: &Cli) -> BoxResult<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &cli.out_dir {
        cfg.out_dir = dir.clone();
    }
    if let Some(grid) = cli.grid {
        cfg.grid = grid;
    }
    if let Some(eps) = &cli.eps {
        match cli.command {
            Command::Tables => cfg.retrieval_eps = eps.clone(),
            Command::Full => {
                cfg.retrieval_eps = eps.clone();
                cfg.reconstruction_eps = eps.clone();
            }
            _ => cfg.reconstruction_eps = eps.clone(),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create(path: &Path) -> BoxResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn forward(cfg: &ExperimentConfig, eps: Option<f64>) -> BoxResult<()> {
    let p = cfg.params();
    let mut store = ForwardStore::new(cfg)?;
    let traces = store.traces(&cfg.retrieval_wavenumbers())?;
    let noise = match eps {
        Some(e) if e > 0.0 => Some(NoiseModel::new(e, cfg.seed)?),
        _ => None,
    };
    let phaseless = traces
        .iter()
        .map(|t| acquire(t, &build_geometry(&p, t.k)?, noise.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    write_field_csv(create(&cfg.out_dir.join("forward.csv"))?, &traces)?;
    write_phaseless_csv(create(&cfg.out_dir.join("phaseless.csv"))?, &phaseless)?;
    info!("wrote {} traces to {}", traces.len(), cfg.out_dir.display());
    Ok(())
}

/// Trace files store angles only; rebuild each trace on its own radius.
fn rescale(points: &mut [biharmonic_isp::forward::Point2], radius: f64) {
    for p in points {
        *p = p.scale(radius);
    }
}

fn retrieve(cfg: &ExperimentConfig) -> BoxResult<()> {
    let p = cfg.params();
    let mut inputs = read_phaseless_csv(
        BufReader::new(File::open(cfg.out_dir.join("phaseless.csv"))?),
        1.0,
    )?;
    for t in &mut inputs {
        rescale(&mut t.points, p.radius(t.k));
    }
    let truth_path = cfg.out_dir.join("forward.csv");
    let truths = if truth_path.exists() {
        let mut t = read_field_csv(BufReader::new(File::open(&truth_path)?), 1.0)?;
        for f in &mut t {
            rescale(&mut f.points, p.radius(f.k));
        }
        t
    } else {
        Vec::new()
    };
    let mut retrieved = Vec::with_capacity(inputs.len());
    let mut rows = Vec::new();
    for pt in &inputs {
        let g = build_geometry(&p, pt.k)?;
        let r = retrieve_trace(pt, &g)?;
        for a in r.arcs.iter().filter(|a| a.degenerate) {
            warn!(
                "k = {:.6}: arc {} ({}) is degenerate",
                pt.k,
                a.j,
                a.tag.as_str()
            );
        }
        if let Some(truth) = truths.iter().find(|t| t.k == pt.k) {
            rows.extend(error_rows(truth, &r, &g));
        }
        retrieved.push(r.field);
    }
    write_field_csv(create(&cfg.out_dir.join("retrieved.csv"))?, &retrieved)?;
    if !truths.is_empty() {
        write_error_report(create(&cfg.out_dir.join("retrieval_report.csv"))?, &rows)?;
    }
    info!("retrieved {} traces", retrieved.len());
    Ok(())
}

fn reconstruct(cfg: &ExperimentConfig, with_bypass: bool) -> BoxResult<()> {
    let mut store = ForwardStore::new(cfg)?;
    let rows = if with_bypass {
        run_reconstruction_experiment(cfg, &mut store)?
    } else {
        let mut rows = Vec::new();
        for &eps in &cfg.reconstruction_eps {
            let o = reconstruct_at(cfg, &mut store, eps, DataPath::Retrieved)?;
            write_reconstruction_outputs(&cfg.out_dir, &o)?;
            rows.push(o.row);
        }
        write_table5(&cfg.out_dir, &rows)?;
        rows
    };
    for r in &rows {
        info!(
            "eps = {}, N = {}, {:?}: relative L2 error {:.4}%",
            r.eps,
            r.n,
            r.data,
            100.0 * r.rel_l2_grid
        );
    }
    Ok(())
}

fn tables(cfg: &ExperimentConfig) -> BoxResult<()> {
    let mut store = ForwardStore::new(cfg)?;
    let rows = run_phase_retrieval_experiment(cfg, &mut store)?;
    write_retrieval_tables(&cfg.out_dir, &rows)?;
    Ok(())
}

fn bounds(cfg: &ExperimentConfig) -> BoxResult<Outcome> {
    let report = verify_bounds(cfg)?;
    report.write_csv(&cfg.out_dir)?;
    for c in &report.checks {
        info!(
            "{:>14}: {} evaluated, {} violations, min margin {:.6}",
            c.check, c.evaluated, c.violations, c.min_margin
        );
    }
    if report.is_clean() {
        Ok(Outcome::Done)
    } else {
        error!(
            "{} bound violations, see bounds_violations.csv",
            report.violations.len()
        );
        Ok(Outcome::Violations)
    }
}

fn run(cli: &Cli) -> BoxResult<Outcome> {
    let cfg = load_config(cli)?;
    match cli.command {
        Command::Forward => forward(&cfg, cli.eps.as_ref().and_then(|e| e.first().copied()))?,
        Command::Retrieve => retrieve(&cfg)?,
        Command::Reconstruct => reconstruct(&cfg, cli.eps.is_none())?,
        Command::Tables => tables(&cfg)?,
        Command::VerifyBounds => return bounds(&cfg),
        Command::Full => {
            let outcome = bounds(&cfg)?;
            write_geometry_files(&cfg)?;
            write_source_exact(&cfg)?;
            tables(&cfg)?;
            reconstruct(&cfg, true)?;
            return Ok(outcome);
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Violations) => ExitCode::from(2),
        Err(e) => {
            error!("{e}");
            ExitCode::from(1)
        }
    }
}
