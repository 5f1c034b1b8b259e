//! Strong rank-revealing QR (Gu–Eisenstat) and the interpolative
//! decompositions built from it.

use faer::{c64, Mat, MatRef};

use crate::error::{invalid, Result};
use crate::geometry::{BoundingBox, ProxySurface};

#[derive(Clone, Debug)]
pub struct RrqrResult {
    pub rank: usize,
    /// Column permutation; the first `rank` entries are the selected columns.
    pub perm: Vec<usize>,
    /// T = A_k^{-1} B_k, shape rank × (n − rank).
    pub t: Mat<c64>,
    /// |R_ii| of the final leading triangle.
    pub r_diag: Vec<f64>,
    /// ‖C_k‖_F, the norm of the trailing block (equal to the ID residual).
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct IdResult {
    pub skeleton: Vec<usize>,
    /// k × n; `p[(i, skeleton[i])] = 1` and all other skeleton columns vanish.
    pub p: Mat<c64>,
    /// ‖M − M[:, skeleton] P‖_F / ‖M‖_F.
    pub achieved_tol: f64,
}

impl IdResult {
    pub fn rank(&self) -> usize {
        self.skeleton.len()
    }
}

/// q1(k, n) = √(1 + f² k (n − k)).
pub fn q1(f: f64, k: usize, n: usize) -> f64 {
    (1.0 + f * f * (k * (n - k)) as f64).sqrt()
}

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

fn col_norm_from(a: &Mat<c64>, j: usize, from: usize) -> f64 {
    let mut s = 0.0;
    for i in from..a.nrows() {
        s += a[(i, j)].norm_sqr();
    }
    s.sqrt()
}

/// Householder step on column `s`, rows s.., applied to columns s+1...
fn householder_step(a: &mut Mat<c64>, s: usize) {
    let m = a.nrows();
    let n = a.ncols();
    let norm = col_norm_from(a, s, s);
    if norm == 0.0 {
        return;
    }
    let x0 = a[(s, s)];
    let phase = if x0.norm() == 0.0 { c64::new(1.0, 0.0) } else { x0 / x0.norm() };
    let alpha = -phase * norm;
    let mut v: Vec<c64> = (s..m).map(|i| a[(i, s)]).collect();
    v[0] -= alpha;
    let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if vnorm2 == 0.0 {
        return;
    }
    for j in s + 1..n {
        let mut dot = ZERO;
        for (k, vk) in v.iter().enumerate() {
            dot += vk.conj() * a[(s + k, j)];
        }
        let scale = dot * (2.0 / vnorm2);
        for (k, vk) in v.iter().enumerate() {
            a[(s + k, j)] -= vk * scale;
        }
    }
    a[(s, s)] = alpha;
    for i in s + 1..m {
        a[(i, s)] = ZERO;
    }
}

fn permuted(m: MatRef<'_, c64>, perm: &[usize]) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, perm[j])])
}

/// Solve the upper-triangular system R X = B, R = a[0..k, 0..k].
fn upper_solve(a: &Mat<c64>, k: usize, b: &Mat<c64>) -> Mat<c64> {
    let mut x = b.clone();
    for c in 0..x.ncols() {
        for i in (0..k).rev() {
            let mut s = x[(i, c)];
            for l in i + 1..k {
                s -= a[(i, l)] * x[(l, c)];
            }
            x[(i, c)] = s / a[(i, i)];
        }
    }
    x
}

pub fn strong_rrqr(m: MatRef<'_, c64>, f: f64, tol: f64) -> Result<RrqrResult> {
    if !(f >= 1.0) || !f.is_finite() {
        return invalid(format!("f = {f} must be a finite number ≥ 1"));
    }
    if !(tol >= 0.0) || !tol.is_finite() {
        return invalid(format!("tol = {tol} must be finite and non-negative"));
    }
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return invalid(format!("non-finite entry at ({i}, {j})"));
            }
        }
    }
    let (rows, n) = (m.nrows(), m.ncols());
    let mut perm: Vec<usize> = (0..n).collect();
    let mut a = m.to_owned();

    // Column-norm pivoting until the diagonal decays below tol·|R_11|.
    let mut k = 0;
    let mut r11 = 0.0;
    for s in 0..rows.min(n) {
        let mut jmax = s;
        let mut nmax = -1.0;
        for j in s..n {
            let nj = col_norm_from(&a, j, s);
            if nj > nmax {
                nmax = nj;
                jmax = j;
            }
        }
        if s == 0 {
            r11 = nmax;
        }
        if nmax <= tol * r11 || nmax == 0.0 {
            break;
        }
        if jmax != s {
            for i in 0..rows {
                let tmp = a[(i, s)];
                a[(i, s)] = a[(i, jmax)];
                a[(i, jmax)] = tmp;
            }
            perm.swap(s, jmax);
        }
        householder_step(&mut a, s);
        k = s + 1;
    }

    // Gu–Eisenstat swaps until every |T_ij| and γ_j/ω_i is at most f.
    let max_swaps = 64 + 8 * n;
    let mut swaps = 0;
    let t = loop {
        if k == 0 || k == n {
            break Mat::<c64>::zeros(k, n - k);
        }
        let b = Mat::from_fn(k, n - k, |i, j| a[(i, k + j)]);
        let t = upper_solve(&a, k, &b);
        if swaps >= max_swaps {
            break t;
        }
        let ident = Mat::from_fn(k, k, |i, j| if i == j { c64::new(1.0, 0.0) } else { ZERO });
        let ainv = upper_solve(&a, k, &ident);
        let inv_omega: Vec<f64> = (0..k)
            .map(|i| (0..k).map(|l| ainv[(i, l)].norm_sqr()).sum::<f64>().sqrt())
            .collect();
        let gamma: Vec<f64> = (0..n - k).map(|j| col_norm_from(&a, k + j, k)).collect();
        let mut best = (f * f, usize::MAX, usize::MAX);
        for j in 0..n - k {
            for i in 0..k {
                let rho2 = t[(i, j)].norm_sqr() + (gamma[j] * inv_omega[i]).powi(2);
                if rho2 > best.0 {
                    best = (rho2, i, j);
                }
            }
        }
        if best.1 == usize::MAX {
            break t;
        }
        perm.swap(best.1, k + best.2);
        swaps += 1;
        a = permuted(m, &perm);
        for s in 0..k {
            householder_step(&mut a, s);
        }
    };

    let r_diag = (0..k).map(|i| a[(i, i)].norm()).collect();
    let mut residual = 0.0;
    for j in k..n {
        residual += col_norm_from(&a, j, k).powi(2);
    }
    Ok(RrqrResult { rank: k, perm, t, r_diag, residual: residual.sqrt() })
}

/// Column ID: M ≈ M[:, skeleton] · P.
pub fn interp_decompose(m: MatRef<'_, c64>, f: f64, tol: f64) -> Result<IdResult> {
    let rr = strong_rrqr(m, f, tol)?;
    Ok(id_from_rrqr(m, &rr))
}

fn id_from_rrqr(m: MatRef<'_, c64>, rr: &RrqrResult) -> IdResult {
    let n = m.ncols();
    let k = rr.rank;
    let mut p = Mat::<c64>::zeros(k, n);
    for i in 0..k {
        p[(i, rr.perm[i])] = c64::new(1.0, 0.0);
    }
    for j in 0..n - k {
        for i in 0..k {
            p[(i, rr.perm[k + j])] = rr.t[(i, j)];
        }
    }
    let total = crate::dense::frobenius(m);
    let achieved_tol = if total == 0.0 { 0.0 } else { rr.residual / total };
    IdResult { skeleton: rr.perm[..k].to_vec(), p, achieved_tol }
}

/// Column ID of a block from its interactions with explicitly listed far
/// points (`explicit`, one row per point) and with the proxy surface
/// (`proxy_rows`, one row per proxy point).
pub fn proxy_id(
    explicit: MatRef<'_, c64>,
    proxy_rows: MatRef<'_, c64>,
    bbox: &BoundingBox,
    proxy: &ProxySurface,
    f: f64,
    tol: f64,
) -> Result<IdResult> {
    if proxy.radius <= bbox.circumradius() || proxy.intersects_box(bbox) {
        return invalid("proxy surface does not enclose the box");
    }
    if explicit.ncols() != proxy_rows.ncols() {
        return invalid("explicit and proxy interactions disagree on the block size");
    }
    let e = explicit.nrows();
    let stacked = Mat::from_fn(e + proxy_rows.nrows(), explicit.ncols(), |i, j| {
        if i < e {
            explicit[(i, j)]
        } else {
            proxy_rows[(i - e, j)]
        }
    });
    interp_decompose(stacked.as_ref(), f, tol)
}
