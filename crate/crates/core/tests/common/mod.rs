#![allow(dead_code)]

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, MatRef};
use hbs_core::geometry::PointCloud;
use hbs_core::hbs::{compress_kernel, HbsFactors, HbsOptions};
use hbs_core::kernels::{KernelMatrix, KernelSpec};
use rand::{Rng, SeedableRng};
use rand_xorshift::XorShiftRng;

pub fn rng(seed: u64) -> XorShiftRng {
    XorShiftRng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut XorShiftRng, n: usize) -> Vec<c64> {
    (0..n).map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

pub fn random_mat(rng: &mut XorShiftRng, m: usize, n: usize) -> Mat<c64> {
    Mat::from_fn(m, n, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Uniform random points in the unit box with weights 1/N.
pub fn random_cloud(rng: &mut XorShiftRng, d: usize, n: usize) -> (PointCloud, Vec<f64>) {
    let coords = (0..d * n).map(|_| rng.random_range(0.0..1.0)).collect();
    (PointCloud::new(d, coords).unwrap(), vec![1.0 / n as f64; n])
}

/// Jittered grid on [0, 1] with weights 1/N.
pub fn jittered_line(rng: &mut XorShiftRng, n: usize) -> (PointCloud, Vec<f64>) {
    let coords = (0..n).map(|i| (i as f64 + 0.5 + 0.4 * rng.random_range(-1.0..1.0)) / n as f64).collect();
    (PointCloud::new(1, coords).unwrap(), vec![1.0 / n as f64; n])
}

/// A random kernel system: 1D power law on a jittered line, 2D Laplace or
/// Helmholtz on random points.
pub fn random_system(rng: &mut XorShiftRng, n: usize) -> KernelMatrix {
    match rng.random_range(0..3) {
        0 => {
            let (c, w) = jittered_line(rng, n);
            KernelMatrix::new(KernelSpec::powerlaw(rng.random_range(0.3..1.0)), c, w).unwrap()
        }
        1 => {
            let (c, w) = random_cloud(rng, 2, n);
            KernelMatrix::new(KernelSpec::log2d(), c, w).unwrap()
        }
        _ => {
            let (c, w) = random_cloud(rng, 2, n);
            KernelMatrix::new(KernelSpec::hankel2d(rng.random_range(1.0..10.0)), c, w).unwrap()
        }
    }
}

pub fn compress(km: &KernelMatrix, leaf: usize, tol: f64) -> HbsFactors {
    let opts = HbsOptions { tol, ..HbsOptions::default() };
    compress_kernel(km, leaf, &opts).unwrap().0
}

pub fn norm(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel_err(a: &[c64], b: &[c64]) -> f64 {
    let d: Vec<c64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(b)
}

/// Dense LU solve through faer.
pub fn dense_solve(a: MatRef<'_, c64>, b: &[c64]) -> Vec<c64> {
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = a.to_owned().partial_piv_lu().solve(&rhs);
    (0..b.len()).map(|i| x[(i, 0)]).collect()
}

/// Singular values, largest first.
pub fn svals(m: MatRef<'_, c64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s = m.to_owned().singular_values().unwrap();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spec_norm(m: MatRef<'_, c64>) -> f64 {
    svals(m).first().copied().unwrap_or(0.0)
}
