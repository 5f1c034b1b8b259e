//! The four experiment sweeps.

use std::path::{Path, PathBuf};
use std::time::Instant;

use hbs_core::blockenc::{recursive_encode, sparse_alpha, to_f64, write_descriptor};
use hbs_core::dense::{norm2, rel_diff};
use hbs_core::geometry::PointCloud;
use hbs_core::hbs::{apply, compress_kernel, HbsFactors, HbsOptions};
use hbs_core::kernels::{sphere_surface, starfish_boundary_with, starfish_equispaced, KernelMatrix, KernelSpec, Starfish};
use hbs_core::sparsify::{
    assemble_extended, cond_estimate_dense, cond_estimate_sparse, sparsity_profile, split_solution, extend_rhs,
    solve_extended, tikhonov_solve,
};
use hbs_core::{c64, HbsError};
use rand::{Rng, SeedableRng};
use rand_xorshift::XorShiftRng;

use crate::config::{Experiment, ExperimentConfig, Geometry, Rhs};
use crate::output::{render_csv, write_atomic, Row, RunLog};
use crate::CliError;

/// Largest N for which the dense condition number is estimated.
pub const COND_LIMIT: usize = 2048;
const COND_ITERS: usize = 40;

/// Tables written by one run, in the order they were produced.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub tables: Vec<(PathBuf, Vec<Row>)>,
    pub log: PathBuf,
}

fn rng_for(seed: u64, n: usize, salt: u64) -> XorShiftRng {
    XorShiftRng::seed_from_u64(seed ^ (n as u64).rotate_left(20) ^ salt.rotate_left(40))
}

fn build_matrix(cfg: &ExperimentConfig, spec: KernelSpec, n: usize) -> Result<KernelMatrix, CliError> {
    let shape = Starfish { arms: cfg.arms, amplitude: cfg.amplitude };
    let (cloud, weights) = match &cfg.geometry {
        Geometry::Starfish { nodes_per_panel } => starfish_boundary_with(shape, n / nodes_per_panel, *nodes_per_panel)?,
        Geometry::StarfishEquispaced => starfish_equispaced(shape, n)?,
        Geometry::Sphere { radius } => sphere_surface(n, *radius)?,
        Geometry::Line { jitter } => {
            let mut rng = rng_for(cfg.seed, n, 1);
            let coords: Vec<f64> = (0..n)
                .map(|i| {
                    let u = if *jitter > 0.0 { rng.random_range(-0.5..0.5) * jitter } else { 0.0 };
                    (i as f64 + 0.5 + u) / n as f64
                })
                .collect();
            (PointCloud::new(1, coords)?, vec![1.0 / n as f64; n])
        }
        Geometry::File(path) => {
            let all = PointCloud::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            if all.len() < n {
                return Err(CliError::Config(format!("{} holds {} points, N = {n} requested", path.display(), all.len())));
            }
            let d = all.dim();
            let coords = (0..n).flat_map(|i| all.point(i).to_vec()).collect();
            (PointCloud::new(d, coords)?, vec![1.0 / n as f64; n])
        }
    };
    Ok(KernelMatrix::new(spec, cloud, weights)?)
}

fn rhs(cfg: &ExperimentConfig, km: &KernelMatrix) -> Vec<c64> {
    match cfg.rhs {
        Rhs::Source => km.rhs(),
        Rhs::Random => {
            let mut rng = rng_for(cfg.seed, km.n(), 2);
            (0..km.n())
                .map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect()
        }
    }
}

fn options(cfg: &ExperimentConfig, use_proxy: bool) -> HbsOptions {
    HbsOptions { f: cfg.f, tol: cfg.tol, use_proxy, proxy_points: cfg.proxy_points, ..HbsOptions::default() }
}

fn elapsed(cfg: &ExperimentConfig, t0: Instant) -> f64 {
    if cfg.timing {
        t0.elapsed().as_secs_f64()
    } else {
        0.0
    }
}

fn cond_ratio(km: &KernelMatrix, f: &HbsFactors, t: f64, log: &mut RunLog) -> Result<f64, CliError> {
    if km.n() > COND_LIMIT {
        log.note(format!("N = {}: cond_ratio skipped (N > {COND_LIMIT})", km.n()));
        return Ok(0.0);
    }
    let a_sp = assemble_extended(f, t)?;
    let sp = cond_estimate_sparse(&a_sp, COND_ITERS)?;
    let de = cond_estimate_dense(&km.to_dense(), COND_ITERS)?;
    Ok(sp.cond / de.cond)
}

/// Compression statistics for one matrix.
fn compress_row(cfg: &ExperimentConfig, km: &KernelMatrix, use_proxy: bool, log: &mut RunLog) -> Result<Row, CliError> {
    let t0 = Instant::now();
    let (f, stats, _) = compress_kernel(km, cfg.leaf_size, &options(cfg, use_proxy))?;
    let runtime_s = elapsed(cfg, t0);
    let a_sp = assemble_extended(&f, 1.0)?;
    let prof = sparsity_profile(&a_sp);
    log.note(format!(
        "N = {} {} proxy = {use_proxy}: depth {}, max rank {}, factor nnz {}, N_sp {}",
        km.n(),
        km.spec.family.name(),
        f.depth(),
        stats.max_rank,
        stats.nnz_total,
        a_sp.n_rows()
    ));
    Ok(Row {
        n: km.n(),
        runtime_s,
        nnz: a_sp.nnz(),
        s_r: prof.s_r,
        s_c: prof.s_c,
        cond_ratio: cond_ratio(km, &f, 1.0, log)?,
        alpha_a: to_f64(&sparse_alpha(&a_sp)?),
        ..Row::default()
    })
}

fn check_rows(rows: &[Row]) -> Result<(), CliError> {
    match rows.iter().find(|r| !r.is_finite()) {
        Some(r) => Err(HbsError::InvalidInput(format!("non-finite result at N = {}", r.n)).into()),
        None => Ok(()),
    }
}

fn run_compress(cfg: &ExperimentConfig, use_proxy: bool, log: &mut RunLog) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        for spec in cfg.kernels() {
            let km = build_matrix(cfg, spec, n)?;
            rows.push(compress_row(cfg, &km, use_proxy, log)?);
        }
    }
    Ok(rows)
}

fn run_solve(cfg: &ExperimentConfig, log: &mut RunLog) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        for spec in cfg.kernels() {
            let km = build_matrix(cfg, spec, n)?;
            let b = rhs(cfg, &km);
            let (f, _, _) = compress_kernel(&km, cfg.leaf_size, &options(cfg, cfg.proxy))?;
            for &t in &cfg.t_list {
                let t0 = Instant::now();
                let a_sp = assemble_extended(&f, t)?;
                let sol = match cfg.alpha {
                    None => solve_extended(&a_sp, &b)?,
                    Some(alpha) => {
                        let res = tikhonov_solve(&a_sp, &extend_rhs(&a_sp, &b)?, alpha)?;
                        log.note(format!("N = {n} t = {t}: Tikhonov alpha = {alpha}, cond bound {:.3e}", res.cond_bound_weak));
                        split_solution(&a_sp, res.x)
                    }
                };
                let runtime_s = elapsed(cfg, t0);
                let ax = apply(&f, &sol.x)?;
                let residual = rel_diff(&ax, &b);
                if !residual.is_finite() || !norm2(&sol.x).is_finite() {
                    return Err(HbsError::Singular { pivot: 0 }.into());
                }
                let prof = sparsity_profile(&a_sp);
                rows.push(Row {
                    n,
                    runtime_s,
                    nnz: a_sp.nnz(),
                    s_r: prof.s_r,
                    s_c: prof.s_c,
                    cond_ratio: cond_ratio(&km, &f, t, log)?,
                    alpha_a: to_f64(&sparse_alpha(&a_sp)?),
                    solve_residual: residual,
                    success_prob: sol.success_prob,
                });
            }
        }
    }
    Ok(rows)
}

fn run_encode(cfg: &ExperimentConfig, out: &Path, log: &mut RunLog) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        for spec in cfg.kernels() {
            let km = build_matrix(cfg, spec, n)?;
            let t0 = Instant::now();
            let (f, stats, _) = compress_kernel(&km, cfg.leaf_size, &options(cfg, cfg.proxy))?;
            let enc = recursive_encode(&f, cfg.eps)?;
            let runtime_s = elapsed(cfg, t0);
            let d = &enc.descriptor;
            let extraction = if d.payload.is_some() { d.extraction_error(km.to_dense().as_ref())? } else { 0.0 };
            if d.flagged {
                log.note(format!("N = {n} p = {}: prediction only, no payload", spec.p));
            }
            log.note(format!(
                "N = {n} p = {}: depth {}, ancillas {}, alpha {:.6e}, eps closed {:.3e} recursion {:.3e}",
                spec.p,
                f.depth(),
                d.ancillas,
                d.alpha_f64(),
                enc.eps.closed_form,
                enc.eps.recursion
            ));
            write_descriptor(d, out.join("descriptors"), &format!("N{n}_p{}", spec.p))?;
            let a_sp = assemble_extended(&f, 1.0)?;
            let prof = sparsity_profile(&a_sp);
            rows.push(Row {
                n,
                runtime_s,
                nnz: stats.nnz_total,
                s_r: prof.s_r,
                s_c: prof.s_c,
                alpha_a: d.alpha_f64(),
                solve_residual: extraction,
                ..Row::default()
            });
        }
    }
    Ok(rows)
}

/// Runs the configured sweep and writes `<out>/<experiment>.csv` plus
/// `<out>/run.log`. With `compare_proxy` a second table
/// `<out>/<experiment>_noproxy.csv` holds the same sweep without proxy.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunSummary, CliError> {
    cfg.validate().map_err(CliError::Config)?;
    let mut log = RunLog::default();
    log.note(format!(
        "{} ({}): kernel {}, N = {:?}, tol {:e}, leaf {}, proxy {}, seed {}",
        cfg.experiment.name(),
        cfg.name,
        cfg.family.name(),
        cfg.n_list,
        cfg.tol,
        cfg.leaf_size,
        cfg.proxy,
        cfg.seed
    ));
    let name = cfg.experiment.name();
    let mut summary = RunSummary { log: out.join("run.log"), ..Default::default() };
    let result = (|| -> Result<(), CliError> {
        let rows = match cfg.experiment {
            Experiment::Compress | Experiment::Exp3d => run_compress(cfg, cfg.proxy, &mut log)?,
            Experiment::Solve => run_solve(cfg, &mut log)?,
            Experiment::Encode => run_encode(cfg, out, &mut log)?,
        };
        check_rows(&rows)?;
        let path = out.join(format!("{name}.csv"));
        write_atomic(&path, &render_csv(&rows))?;
        summary.tables.push((path, rows));
        if cfg.compare_proxy {
            let mut plain = cfg.clone();
            plain.experiment = Experiment::Compress;
            let rows = run_compress(&plain, false, &mut log)?;
            check_rows(&rows)?;
            let path = out.join(format!("{name}_noproxy.csv"));
            write_atomic(&path, &render_csv(&rows))?;
            summary.tables.push((path, rows));
        }
        Ok(())
    })();
    if let Err(e) = &result {
        log.note(format!("failed: {e}"));
    }
    write_atomic(&summary.log, log.text())?;
    result.map(|_| summary)
}
