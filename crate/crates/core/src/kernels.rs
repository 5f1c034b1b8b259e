//! Kernel families, Nyström assembly and the boundary/surface samplers used
//! by the experiments.

use std::f64::consts::PI;

use faer::{c64, Mat};

use crate::error::{invalid, HbsError, Result};
use crate::geometry::{dist, fibonacci_sphere, PointCloud};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    /// log|x−y|
    Log2d,
    /// H0^(1)(κ|x−y|)
    Hankel2d,
    /// 1/|x−y|
    Coulomb3d,
    /// e^{iκ|x−y|}/|x−y|
    Helmholtz3d,
    /// |x−y|^{−p}
    PowerLaw,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Log2d => "log2d",
            KernelFamily::Hankel2d => "hankel2d",
            KernelFamily::Coulomb3d => "coulomb3d",
            KernelFamily::Helmholtz3d => "helmholtz3d",
            KernelFamily::PowerLaw => "powerlaw",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "log2d" => KernelFamily::Log2d,
            "hankel2d" => KernelFamily::Hankel2d,
            "coulomb3d" | "coulomb" => KernelFamily::Coulomb3d,
            "helmholtz3d" => KernelFamily::Helmholtz3d,
            "powerlaw" => KernelFamily::PowerLaw,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub kappa: f64,
    pub p: f64,
}

impl KernelSpec {
    pub fn log2d() -> Self {
        Self { family: KernelFamily::Log2d, kappa: 0.0, p: 1.0 }
    }
    pub fn hankel2d(kappa: f64) -> Self {
        Self { family: KernelFamily::Hankel2d, kappa, p: 1.0 }
    }
    pub fn coulomb() -> Self {
        Self { family: KernelFamily::Coulomb3d, kappa: 0.0, p: 1.0 }
    }
    pub fn helmholtz3d(kappa: f64) -> Self {
        Self { family: KernelFamily::Helmholtz3d, kappa, p: 1.0 }
    }
    pub fn powerlaw(p: f64) -> Self {
        Self { family: KernelFamily::PowerLaw, kappa: 0.0, p }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.kappa.is_finite() || self.kappa < 0.0 {
            return invalid(format!("wavenumber {} must be finite and non-negative", self.kappa));
        }
        if !(self.p > 0.0) || !self.p.is_finite() {
            return invalid(format!("exponent {} must be positive", self.p));
        }
        Ok(())
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.family, KernelFamily::Hankel2d | KernelFamily::Helmholtz3d)
    }

    /// Kernel as a function of the distance r > 0.
    pub fn eval_r(&self, r: f64) -> c64 {
        match self.family {
            KernelFamily::Log2d => c64::new(r.ln(), 0.0),
            KernelFamily::Hankel2d => hankel_h0(self.kappa * r),
            KernelFamily::Coulomb3d => c64::new(1.0 / r, 0.0),
            KernelFamily::Helmholtz3d => {
                let (s, c) = (self.kappa * r).sin_cos();
                c64::new(c / r, s / r)
            }
            KernelFamily::PowerLaw => c64::new(r.powf(-self.p), 0.0),
        }
    }
}

/// K(x, y). Coincident points are an error.
pub fn eval_kernel(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<c64> {
    let r = dist(x, y);
    if r == 0.0 {
        return Err(HbsError::SingularEvaluation { i: 0, j: 0 });
    }
    Ok(spec.eval_r(r))
}

/// H0^(1)(x) = J0(x) + i Y0(x) for real x > 0.
pub fn hankel_h0(x: f64) -> c64 {
    c64::new(libm::j0(x), libm::y0(x))
}

/// Dense second-kind Nyström system: A_ii = 1, A_ij = w_j K(x_i, x_j).
#[derive(Clone, Debug)]
pub struct DenseSystem {
    pub spec: KernelSpec,
    pub matrix: Mat<c64>,
    pub rhs: Vec<c64>,
    pub cloud: PointCloud,
    pub weights: Vec<f64>,
}

impl DenseSystem {
    pub fn n(&self) -> usize {
        self.weights.len()
    }
}

fn check_weights(cloud: &PointCloud, weights: &[f64]) -> Result<()> {
    if weights.len() != cloud.len() {
        return invalid(format!(
            "{} weights for {} points",
            weights.len(),
            cloud.len()
        ));
    }
    if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return invalid("weights must be positive and finite");
    }
    Ok(())
}

pub fn assemble_nystrom(spec: &KernelSpec, cloud: &PointCloud, weights: &[f64]) -> Result<DenseSystem> {
    spec.validate()?;
    check_weights(cloud, weights)?;
    let n = cloud.len();
    let mut a = Mat::<c64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                a[(i, j)] = c64::new(1.0, 0.0);
                continue;
            }
            let r = cloud.dist(i, j);
            if r == 0.0 {
                return Err(HbsError::SingularEvaluation { i: i.min(j), j: i.max(j) });
            }
            a[(i, j)] = spec.eval_r(r) * weights[j];
        }
    }
    let rhs = point_source_rhs(spec, cloud, &exterior_source(cloud));
    Ok(DenseSystem { spec: *spec, matrix: a, rhs, cloud: cloud.clone(), weights: weights.to_vec() })
}

/// Entry-wise access to a Nyström matrix without storing it.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    pub spec: KernelSpec,
    pub cloud: PointCloud,
    pub weights: Vec<f64>,
}

impl KernelMatrix {
    pub fn new(spec: KernelSpec, cloud: PointCloud, weights: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        check_weights(&cloud, &weights)?;
        if let Some((i, j)) = find_duplicate(&cloud) {
            return Err(HbsError::SingularEvaluation { i, j });
        }
        Ok(Self { spec, cloud, weights })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> c64 {
        if i == j {
            c64::new(1.0, 0.0)
        } else {
            self.spec.eval_r(self.cloud.dist(i, j)) * self.weights[j]
        }
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let n = self.n();
        Mat::from_fn(n, n, |i, j| self.entry(i, j))
    }

    pub fn rhs(&self) -> Vec<c64> {
        point_source_rhs(&self.spec, &self.cloud, &exterior_source(&self.cloud))
    }
}

/// Lowest-index pair of coincident points, if any.
pub fn find_duplicate(cloud: &PointCloud) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    order.sort_by(|&a, &b| {
        cloud
            .point(a)
            .partial_cmp(cloud.point(b))
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut best: Option<(usize, usize)> = None;
    for w in order.windows(2) {
        if cloud.point(w[0]) == cloud.point(w[1]) {
            let pair = (w[0].min(w[1]), w[0].max(w[1]));
            best = Some(best.map_or(pair, |b| b.min(pair)));
        }
    }
    best
}

/// A point well outside the cloud, used as the source of the experiment data.
pub fn exterior_source(cloud: &PointCloud) -> Vec<f64> {
    let d = cloud.dim();
    let n = cloud.len();
    let mut c = vec![0.0; d];
    for i in 0..n {
        for (k, v) in cloud.point(i).iter().enumerate() {
            c[k] += v / n as f64;
        }
    }
    let rad = (0..n).map(|i| dist(cloud.point(i), &c)).fold(0.0, f64::max);
    let dir = [1.0, 0.5, 0.25];
    let norm = dir[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
    (0..d).map(|k| c[k] + (rad + 1.0) * dir[k] / norm).collect()
}

/// b_i = K(x_i, source).
pub fn point_source_rhs(spec: &KernelSpec, cloud: &PointCloud, source: &[f64]) -> Vec<c64> {
    (0..cloud.len())
        .map(|i| spec.eval_r(dist(cloud.point(i), source)))
        .collect()
}

/// Gauss–Legendre nodes and weights on [−1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // p1 = P_n(z), p0 = P_{n-1}(z)
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// r(θ) = 1 + amplitude·cos(arms·θ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Starfish {
    pub arms: f64,
    pub amplitude: f64,
}

impl Default for Starfish {
    fn default() -> Self {
        Self { arms: 5.0, amplitude: 0.3 }
    }
}

impl Starfish {
    pub fn point(&self, th: f64) -> [f64; 2] {
        let r = 1.0 + self.amplitude * (self.arms * th).cos();
        [r * th.cos(), r * th.sin()]
    }

    pub fn speed(&self, th: f64) -> f64 {
        let r = 1.0 + self.amplitude * (self.arms * th).cos();
        let dr = -self.amplitude * self.arms * (self.arms * th).sin();
        (r * r + dr * dr).sqrt()
    }
}

pub fn starfish_boundary(n_panels: usize, nodes_per_panel: usize) -> Result<(PointCloud, Vec<f64>)> {
    starfish_boundary_with(Starfish::default(), n_panels, nodes_per_panel)
}

/// Composite Gauss–Legendre sampling of the starfish; the weights carry the
/// arclength Jacobian.
pub fn starfish_boundary_with(
    shape: Starfish,
    n_panels: usize,
    nodes_per_panel: usize,
) -> Result<(PointCloud, Vec<f64>)> {
    if n_panels == 0 || nodes_per_panel == 0 {
        return invalid("need at least one panel and one node");
    }
    let (gx, gw) = gauss_legendre(nodes_per_panel);
    let h = 2.0 * PI / n_panels as f64;
    let mut coords = Vec::with_capacity(2 * n_panels * nodes_per_panel);
    let mut weights = Vec::with_capacity(n_panels * nodes_per_panel);
    for pnl in 0..n_panels {
        let a = pnl as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            let th = a + 0.5 * h * (x + 1.0);
            coords.extend(shape.point(th));
            weights.push(0.5 * h * w * shape.speed(th));
        }
    }
    Ok((PointCloud::new(2, coords)?, weights))
}

/// N points equispaced in arclength on the starfish, each weighted by
/// length/N (periodic trapezoid rule).
pub fn starfish_equispaced(shape: Starfish, n: usize) -> Result<(PointCloud, Vec<f64>)> {
    if n == 0 {
        return invalid("need at least one point");
    }
    let m = 64 * n.max(1024);
    let h = 2.0 * PI / m as f64;
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    let mut prev = shape.speed(0.0);
    for k in 1..=m {
        let sp = shape.speed(k as f64 * h);
        cum.push(cum[k - 1] + 0.5 * h * (prev + sp));
        prev = sp;
    }
    let total = cum[m];
    let mut coords = Vec::with_capacity(2 * n);
    for i in 0..n {
        let target = total * i as f64 / n as f64;
        let k = cum.partition_point(|&c| c <= target).clamp(1, m) - 1;
        let frac = (target - cum[k]) / (cum[k + 1] - cum[k]);
        let th = (k as f64 + frac) * h;
        coords.extend(shape.point(th));
    }
    Ok((PointCloud::new(2, coords)?, vec![total / n as f64; n]))
}

/// Quasi-uniform samples of a sphere with equal area weights.
pub fn sphere_surface(n: usize, radius: f64) -> Result<(PointCloud, Vec<f64>)> {
    if n == 0 || !(radius > 0.0) {
        return invalid("sphere needs n ≥ 1 and a positive radius");
    }
    let coords = fibonacci_sphere(n)
        .into_iter()
        .flat_map(|u| u.map(|c| radius * c))
        .collect();
    let w = 4.0 * PI * radius * radius / n as f64;
    Ok((PointCloud::new(3, coords)?, vec![w; n]))
}
