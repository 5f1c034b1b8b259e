//! Small dense helpers on top of faer.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, MatRef};

use crate::error::{HbsError, Result};

/// Largest singular value. Empty matrices have norm zero.
pub fn spectral_norm(m: MatRef<'_, c64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let owned = m.to_owned();
    match owned.singular_values() {
        Ok(s) => s.into_iter().fold(0.0, f64::max),
        Err(_) => f64::NAN,
    }
}

/// All singular values in non-increasing order.
pub fn singular_values(m: MatRef<'_, c64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s = m.to_owned().singular_values().unwrap_or_default();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn frobenius(m: MatRef<'_, c64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Plain triple-loop product. Used where bitwise reproducibility of the
/// result matters more than speed (zero padding must not change a single bit).
pub fn matmul_naive(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    assert_eq!(a.ncols(), b.nrows());
    let mut c = Mat::<c64>::zeros(a.nrows(), b.ncols());
    for j in 0..b.ncols() {
        for k in 0..a.ncols() {
            let bkj = b[(k, j)];
            if bkj == c64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..a.nrows() {
                c[(i, j)] += a[(i, k)] * bkj;
            }
        }
    }
    c
}

/// Solve `a x = b` by partial-pivoting LU.
pub fn solve(a: MatRef<'_, c64>, b: &[c64]) -> Result<Vec<c64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(HbsError::InvalidInput(format!(
            "dense solve: matrix {}x{}, rhs {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let rhs = column(b);
    let x = a.partial_piv_lu().solve(&rhs);
    let out: Vec<c64> = (0..n).map(|i| x[(i, 0)]).collect();
    if let Some(p) = out.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(HbsError::Singular { pivot: p });
    }
    Ok(out)
}

pub fn column(v: &[c64]) -> Mat<c64> {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

pub fn matvec(a: MatRef<'_, c64>, v: &[c64]) -> Vec<c64> {
    assert_eq!(a.ncols(), v.len());
    let mut out = vec![c64::new(0.0, 0.0); a.nrows()];
    for j in 0..a.ncols() {
        let vj = v[j];
        for (i, o) in out.iter_mut().enumerate() {
            *o += a[(i, j)] * vj;
        }
    }
    out
}

pub fn norm2(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖a − b‖₂ / ‖b‖₂ for vectors; returns the absolute difference when b = 0.
pub fn rel_diff(a: &[c64], b: &[c64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let nb = norm2(b);
    if nb == 0.0 {
        diff
    } else {
        diff / nb
    }
}

/// 2-norm condition number from the full singular value spectrum.
pub fn cond2(m: MatRef<'_, c64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

pub fn is_finite(z: c64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
