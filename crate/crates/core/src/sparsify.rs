//! The extended sparse system assembled from HBS factors, its solution,
//! and the sparsity, Gershgorin, Tikhonov and error-propagation checks.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat};

use crate::dense::{self, norm2};
use crate::error::{invalid, Result};
use crate::hbs::HbsFactors;
pub use crate::sparse::{Segment, SparseLu, SparseMatrix};

const ONE: c64 = c64 { re: 1.0, im: 0.0 };

/// Unknown and equation segments of the extended system.
fn layouts(f: &HbsFactors) -> (Vec<Segment>, Vec<Segment>) {
    let mut cols = vec![Segment { name: "x".into(), offset: 0, size: f.n }];
    let mut rows = vec![Segment { name: "eq_x".into(), offset: 0, size: f.n }];
    let mut off = f.n;
    for l in 0..f.depth() {
        let (ny, nz) = (f.l[l].n_cols(), f.r[l].n_rows());
        cols.push(Segment { name: format!("y{}", l + 1), offset: off, size: ny });
        cols.push(Segment { name: format!("z{}", l + 1), offset: off + ny, size: nz });
        rows.push(Segment { name: format!("eq_z{}", l + 1), offset: off, size: nz });
        rows.push(Segment { name: format!("eq_y{}", l + 1), offset: off + nz, size: ny });
        off += ny + nz;
    }
    (cols, rows)
}

fn push_block(t: &mut Vec<(usize, usize, c64)>, m: &SparseMatrix, r0: usize, c0: usize, s: c64) {
    for (i, j, v) in m.iter() {
        t.push((r0 + i, c0 + j, v * s));
    }
}

fn push_neg_identity(t: &mut Vec<(usize, usize, c64)>, r0: usize, c0: usize, n: usize) {
    for i in 0..n {
        t.push((r0 + i, c0 + i, -ONE));
    }
}

fn extended(f: &HbsFactors, t: f64, post: bool) -> Result<SparseMatrix> {
    if !(t > 0.0 && t <= 1.0) {
        return invalid(format!("scaling t = {t} must lie in (0, 1]"));
    }
    f.validate()?;
    let (cols, rows) = layouts(f);
    let n_sp = cols.last().map_or(0, |s| s.offset + s.size);
    let lam = f.depth();
    let mut trip = Vec::new();
    if post {
        for i in 0..f.n {
            trip.push((i, i, ONE));
        }
    } else {
        push_block(&mut trip, &f.d[0], 0, 0, ONE);
        if lam > 0 {
            push_block(&mut trip, &f.l[0], 0, cols[1].offset, c64::new(1.0 / t, 0.0));
        }
    }
    for l in 0..lam {
        let (y, z) = (&cols[1 + 2 * l], &cols[2 + 2 * l]);
        let (eq_z, eq_y) = (&rows[1 + 2 * l], &rows[2 + 2 * l]);
        // z_l = t R_l (x or z_{l-1})
        let prev = if l == 0 { 0 } else { cols[2 * l].offset };
        push_block(&mut trip, &f.r[l], eq_z.offset, prev, c64::new(t, 0.0));
        push_neg_identity(&mut trip, eq_z.offset, z.offset, z.size);
        // y_l = D_{l+1} z_l + t^{-1} L_{l+1} y_{l+1}
        push_neg_identity(&mut trip, eq_y.offset, y.offset, y.size);
        push_block(&mut trip, &f.d[l + 1], eq_y.offset, z.offset, ONE);
        if l + 1 < lam {
            push_block(&mut trip, &f.l[l + 1], eq_y.offset, cols[3 + 2 * l].offset, c64::new(1.0 / t, 0.0));
        }
    }
    let mut m = SparseMatrix::from_triplets(n_sp, n_sp, trip)?;
    m.block_layout = cols;
    m.row_layout = rows;
    Ok(m)
}

/// The banded extended system with L_l → L_l/t and R_l → t R_l.
pub fn assemble_extended(f: &HbsFactors, t: f64) -> Result<SparseMatrix> {
    extended(f, t, false)
}

/// A′: the extended system with its first block row replaced by [I 0 … 0].
pub fn build_postprocess(f: &HbsFactors) -> Result<SparseMatrix> {
    extended(f, 1.0, true)
}

/// A′ for an extended system assembled with scaling `t`.
pub fn build_postprocess_scaled(f: &HbsFactors, t: f64) -> Result<SparseMatrix> {
    extended(f, t, true)
}

#[derive(Clone, Debug)]
pub struct ExtendedSolution {
    pub x: Vec<c64>,
    /// (y_l, z_l) per level, as solved (i.e. already scaled by t^l).
    pub aux: Vec<(Vec<c64>, Vec<c64>)>,
    pub success_prob: f64,
    /// The whole extended vector x′.
    pub full: Vec<c64>,
}

/// Pads b with zeros over the auxiliary blocks.
pub fn extend_rhs(a_sp: &SparseMatrix, b: &[c64]) -> Result<Vec<c64>> {
    let n = a_sp.block_layout.first().map_or(a_sp.n_rows(), |s| s.size);
    if b.len() != n && b.len() != a_sp.n_rows() {
        return invalid(format!("rhs length {} matches neither N = {n} nor N_sp = {}", b.len(), a_sp.n_rows()));
    }
    let mut out = b.to_vec();
    out.resize(a_sp.n_rows(), c64::new(0.0, 0.0));
    Ok(out)
}

pub fn split_solution(a_sp: &SparseMatrix, full: Vec<c64>) -> ExtendedSolution {
    let seg = |s: &Segment| full[s.range()].to_vec();
    let lay = &a_sp.block_layout;
    let x = lay.first().map_or(full.clone(), seg);
    let aux: Vec<(Vec<c64>, Vec<c64>)> = lay[1.min(lay.len())..]
        .chunks(2)
        .map(|p| (seg(&p[0]), seg(&p[1])))
        .collect();
    let total = norm2(&full).powi(2);
    let success_prob = if total == 0.0 { 1.0 } else { norm2(&x).powi(2) / total };
    ExtendedSolution { x, aux, success_prob, full }
}

/// Sparse LU solve of A_sp x′ = (b, 0, …, 0).
pub fn solve_extended(a_sp: &SparseMatrix, b: &[c64]) -> Result<ExtendedSolution> {
    let rhs = extend_rhs(a_sp, b)?;
    let full = SparseLu::new(a_sp)?.solve(&rhs)?;
    Ok(split_solution(a_sp, full))
}

/// max_i Σ_j |a_ij|.
pub fn gershgorin_bound(a: &SparseMatrix) -> f64 {
    (0..a.n_rows())
        .map(|i| a.row(i).map(|(_, v)| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparsityProfile {
    pub s_r: usize,
    pub s_c: usize,
    pub c_sp: f64,
}

pub fn sparsity_profile(a: &SparseMatrix) -> SparsityProfile {
    SparsityProfile {
        s_r: (0..a.n_rows()).map(|i| a.row_nnz(i)).max().unwrap_or(0),
        s_c: a.col_nnz().into_iter().max().unwrap_or(0),
        c_sp: a.max_abs(),
    }
}

/// max{3^d n₁+k₁, n₁−k₁+1, (6^d−3^d)k₁+k₂+1, …, n_λ−k_λ+1, (6^d−3^d)k_λ+1}
/// evaluated on the measured level sizes (largest block and largest rank
/// over rows and columns). λ = 0 gives the largest row of D₁ as 3^d n₁ with
/// n₁ = `leaf_size`.
pub fn row_sparsity_bound(f: &HbsFactors, d: u32, leaf_size: usize) -> usize {
    let three = 3usize.pow(d);
    let band = 6usize.pow(d) - three;
    let nk: Vec<(usize, usize)> = f
        .dims
        .iter()
        .map(|l| (l.max_row_block.max(l.max_col_block), l.max_row_rank.max(l.max_col_rank)))
        .collect();
    if nk.is_empty() {
        return three * leaf_size;
    }
    let mut b = three * nk[0].0 + nk[0].1;
    for (l, &(n, k)) in nk.iter().enumerate() {
        let next_k = nk.get(l + 1).map_or(0, |x| x.1);
        b = b.max(n - k + 1).max(band * k + next_k + 1);
    }
    b
}

/// N + 2r(2^{d(λ+1)} − 2^d) with λ the model depth of the leaf count.
pub fn extended_size_bound(n: usize, d: u32, r: usize, lambda: u32) -> usize {
    n + 2 * r * ((1usize << (d * (lambda + 1))) - (1usize << d))
}

#[derive(Clone, Debug)]
pub struct TikhonovResult {
    pub x: Vec<c64>,
    /// (c_sp² s_r s_c + α)/α.
    pub cond_bound: f64,
    /// (c_sp² max(s_r s_c, s_r²) + α)/α, the weaker form.
    pub cond_bound_weak: f64,
}

/// Solves (A†A + αI)x = A†b through the augmented system
/// [[I, A], [A†, −αI]] [r; x] = [b; 0].
pub fn tikhonov_solve(a: &SparseMatrix, b: &[c64], alpha: f64) -> Result<TikhonovResult> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return invalid(format!("regularization alpha = {alpha} must be positive"));
    }
    let (m, n) = (a.n_rows(), a.n_cols());
    let mut rhs = b.to_vec();
    if rhs.len() > m {
        return invalid("rhs longer than the system");
    }
    rhs.resize(m + n, c64::new(0.0, 0.0));
    let mut t = Vec::with_capacity(2 * a.nnz() + m + n);
    for i in 0..m {
        t.push((i, i, ONE));
    }
    for (i, j, v) in a.iter() {
        t.push((i, m + j, v));
        t.push((m + j, i, v.conj()));
    }
    for j in 0..n {
        t.push((m + j, m + j, c64::new(-alpha, 0.0)));
    }
    let aug = SparseMatrix::from_triplets(m + n, m + n, t)?;
    let sol = SparseLu::new(&aug)?.solve(&rhs)?;
    let p = sparsity_profile(a);
    let c2 = p.c_sp * p.c_sp;
    let (sr, sc) = (p.s_r as f64, p.s_c as f64);
    Ok(TikhonovResult {
        x: sol[m..].to_vec(),
        cond_bound: (c2 * sr * sc + alpha) / alpha,
        cond_bound_weak: (c2 * (sr * sc).max(sr * sr) + alpha) / alpha,
    })
}

/// Default regularization 1e−8·(c_sp·s_r)².
pub fn default_tikhonov_alpha(a: &SparseMatrix) -> f64 {
    let p = sparsity_profile(a);
    1e-8 * (p.c_sp * p.s_r as f64).powi(2)
}

#[derive(Clone, Debug)]
pub struct ErrorReport {
    pub eps: f64,
    pub kappa: f64,
    pub rel_b_err: f64,
    pub rel_x_err: f64,
    pub b_bound: f64,
    pub x_bound: f64,
    /// False when εκ ≥ 1; the bounds are then not asserted.
    pub precondition_holds: bool,
}

impl ErrorReport {
    pub fn bounds_hold(&self) -> bool {
        self.precondition_holds && self.rel_b_err <= self.b_bound && self.rel_x_err <= self.x_bound
    }
}

/// Compares Ax = b with A_ε x_ε = b and b_ε = A_ε x in the 2-norm.
pub fn error_propagation_check(a: &Mat<c64>, a_eps: &Mat<c64>, b: &[c64]) -> Result<ErrorReport> {
    let n = a.nrows();
    if a.ncols() != n || a_eps.nrows() != n || a_eps.ncols() != n || b.len() != n {
        return invalid("error propagation check needs matching square systems");
    }
    let diff = a - a_eps;
    let eps = dense::spectral_norm(diff.as_ref()) / dense::spectral_norm(a.as_ref());
    let kappa = dense::cond2(a.as_ref());
    let x = dense::solve(a.as_ref(), b)?;
    let x_eps = dense::solve(a_eps.as_ref(), b)?;
    let b_eps = dense::matvec(a_eps.as_ref(), &x);
    let ek = eps * kappa;
    Ok(ErrorReport {
        eps,
        kappa,
        rel_b_err: dense::rel_diff(&b_eps, b),
        rel_x_err: dense::rel_diff(&x_eps, &x),
        b_bound: ek,
        x_bound: if ek < 1.0 { ek / (1.0 - ek) } else { f64::INFINITY },
        precondition_holds: ek < 1.0,
    })
}

/// Power / inverse-power estimates of σ_max, σ_min and their ratio.
#[derive(Clone, Copy, Debug)]
pub struct CondEstimate {
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub cond: f64,
}

fn power_iterate(n: usize, iters: usize, mut op: impl FnMut(&[c64]) -> Result<Vec<c64>>) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    // Deterministic start with no special structure.
    let mut v: Vec<c64> = (0..n)
        .map(|i| c64::new(1.0 + ((i * 7919) % 101) as f64 / 101.0, ((i * 104729) % 37) as f64 / 37.0))
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|z| *z /= nv);
    let mut lam = 0.0;
    for _ in 0..iters {
        let w = op(&v)?;
        let nw = norm2(&w);
        if nw == 0.0 {
            return Ok(0.0);
        }
        lam = nw;
        v = w.into_iter().map(|z| z / nw).collect();
    }
    Ok(lam)
}

/// 2-norm condition estimate of a sparse square matrix.
pub fn cond_estimate_sparse(a: &SparseMatrix, iters: usize) -> Result<CondEstimate> {
    let n = a.n_rows();
    let smax2 = power_iterate(n, iters, |v| Ok(a.matvec_adjoint(&a.matvec(v))))?;
    let lu = SparseLu::new(a)?;
    let lu_h = SparseLu::new(&a.adjoint())?;
    let inv2 = power_iterate(n, iters, |v| lu.solve(&lu_h.solve(v)?))?;
    let (smax, smin) = (smax2.sqrt(), 1.0 / inv2.sqrt());
    Ok(CondEstimate { sigma_max: smax, sigma_min: smin, cond: smax / smin })
}

/// 2-norm condition estimate of a dense square matrix.
pub fn cond_estimate_dense(a: &Mat<c64>, iters: usize) -> Result<CondEstimate> {
    let n = a.nrows();
    let ah = Mat::from_fn(n, n, |i, j| a[(j, i)].conj());
    let smax2 = power_iterate(n, iters, |v| {
        let w = dense::matvec(a.as_ref(), v);
        Ok(dense::matvec(ah.as_ref(), &w))
    })?;
    let lu = a.partial_piv_lu();
    let lu_h = ah.partial_piv_lu();
    let inv2 = power_iterate(n, iters, |v| {
        let w = lu_h.solve(&dense::column(v));
        let u = lu.solve(&w);
        let u: Vec<c64> = (0..n).map(|i| u[(i, 0)]).collect();
        if u.iter().all(|z| dense::is_finite(*z)) { Ok(u) } else { Err(crate::HbsError::Singular { pivot: 0 }) }
    })?;
    let (smax, smin) = (smax2.sqrt(), 1.0 / inv2.sqrt());
    Ok(CondEstimate { sigma_max: smax, sigma_min: smin, cond: smax / smin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointCloud;
    use crate::hbs::{compress_kernel, reconstruct, HbsOptions};
    use crate::kernels::{KernelMatrix, KernelSpec};

    fn z(re: f64) -> c64 {
        c64::new(re, 0.0)
    }

    fn line(n: usize, spec: KernelSpec) -> KernelMatrix {
        let cloud = PointCloud::new(1, (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()).unwrap();
        KernelMatrix::new(spec, cloud, vec![1.0 / n as f64; n]).unwrap()
    }

    fn diag_factors(n: usize) -> HbsFactors {
        let d = SparseMatrix::from_triplets(n, n, (0..n).map(|i| (i, i, z(2.0 + i as f64))).collect()).unwrap();
        HbsFactors::single_level(d).unwrap()
    }

    #[test]
    fn diagonal_system() {
        let f = diag_factors(4);
        let a = assemble_extended(&f, 1.0).unwrap();
        assert_eq!(a, {
            let mut m = f.d[0].clone();
            m.block_layout = a.block_layout.clone();
            m.row_layout = a.row_layout.clone();
            m
        });
        let sol = solve_extended(&a, &[z(1.0), z(0.0), z(0.0), z(0.0)]).unwrap();
        assert!((sol.x[0] - z(0.5)).norm() < 1e-15);
        assert!(sol.aux.is_empty());
        assert_eq!(sol.success_prob, 1.0);
        assert_eq!(build_postprocess(&f).unwrap().to_dense(), SparseMatrix::identity(4).to_dense());
        assert!(assemble_extended(&f, 0.0).is_err());
        assert!(assemble_extended(&f, 1.5).is_err());
    }

    #[test]
    fn single_level_block_pattern() {
        let km = line(256, KernelSpec::coulomb());
        let (f, ..) = compress_kernel(&km, 32, &HbsOptions { max_levels: Some(1), tol: 1e-8, ..Default::default() }).unwrap();
        assert_eq!(f.depth(), 1);
        let a = assemble_extended(&f, 1.0).unwrap();
        let names: Vec<&str> = a.block_layout.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["x", "y1", "z1"]);
        let dense = a.to_dense();
        let (x, y, zz) = (&a.block_layout[0], &a.block_layout[1], &a.block_layout[2]);
        let (ex, ez, ey) = (&a.row_layout[0], &a.row_layout[1], &a.row_layout[2]);
        for i in 0..a.n_rows() {
            for j in 0..a.n_cols() {
                let v = dense[(i, j)];
                let want = if ex.range().contains(&i) && x.range().contains(&j) {
                    f.d[0].get(i, j)
                } else if ex.range().contains(&i) && y.range().contains(&j) {
                    f.l[0].get(i, j - y.offset)
                } else if ez.range().contains(&i) && x.range().contains(&j) {
                    f.r[0].get(i - ez.offset, j)
                } else if ez.range().contains(&i) && zz.range().contains(&j) {
                    if i - ez.offset == j - zz.offset { z(-1.0) } else { z(0.0) }
                } else if ey.range().contains(&i) && y.range().contains(&j) {
                    if i - ey.offset == j - y.offset { z(-1.0) } else { z(0.0) }
                } else if ey.range().contains(&i) && zz.range().contains(&j) {
                    f.d[1].get(i - ey.offset, j - zz.offset)
                } else {
                    z(0.0)
                };
                assert_eq!(v, want, "({i}, {j})");
            }
        }
        let p = sparsity_profile(&a);
        let n1 = f.dims[0].max_row_block;
        let k1 = f.dims[0].max_row_rank;
        assert!(p.s_r <= 3 * n1 + k1);
    }

    #[test]
    fn extended_size_within_bound() {
        let km = line(512, KernelSpec::coulomb());
        let (f, stats, tree) = compress_kernel(&km, 32, &HbsOptions { tol: 1e-8, ..Default::default() }).unwrap();
        let a = assemble_extended(&f, 1.0).unwrap();
        let lam = crate::hbs::model_depth(1, tree.blocks(1));
        assert!(a.n_rows() <= extended_size_bound(512, 1, stats.max_rank, lam));
        assert!(a.n_rows() > 512);
    }

    #[test]
    fn solve_matches_dense_reconstruction() {
        let km = line(512, KernelSpec::powerlaw(0.5));
        let (f, ..) = compress_kernel(&km, 32, &HbsOptions::default()).unwrap();
        let b = km.rhs();
        let a = assemble_extended(&f, 1.0).unwrap();
        let sol = solve_extended(&a, &b).unwrap();
        let want = dense::solve(reconstruct(&f).unwrap().as_ref(), &b).unwrap();
        assert!(dense::rel_diff(&sol.x, &want) <= 1e-10);
        // coupling rows hold exactly up to roundoff
        let r = a.matvec(&sol.full);
        let rhs = extend_rhs(&a, &b).unwrap();
        assert!(dense::rel_diff(&r, &rhs) <= 1e-12);
        let z1 = f.r[0].matvec(&sol.x);
        assert!(dense::rel_diff(&z1, &sol.aux[0].1) <= 1e-12);
        // post-processing recovers (x, 0, …, 0)
        let post = build_postprocess(&f).unwrap().matvec(&sol.full);
        for (i, v) in post.iter().enumerate() {
            if i < 512 {
                assert!((v - sol.x[i]).norm() <= 1e-12);
            } else {
                assert!(v.norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn scaling_is_exact_reformulation() {
        let km = line(1024, KernelSpec::coulomb());
        let (f, ..) = compress_kernel(&km, 32, &HbsOptions { tol: 1e-8, ..Default::default() }).unwrap();
        assert!(f.depth() >= 2);
        let b = km.rhs();
        let s1 = solve_extended(&assemble_extended(&f, 1.0).unwrap(), &b).unwrap();
        let mut last = s1.success_prob;
        for t in [0.5, 0.25] {
            let st = solve_extended(&assemble_extended(&f, t).unwrap(), &b).unwrap();
            assert!(dense::rel_diff(&st.x, &s1.x) <= 1e-12);
            for (l, ((y, zz), (y1, z1))) in st.aux.iter().zip(&s1.aux).enumerate() {
                let tl = t.powi(l as i32 + 1);
                assert!((norm2(y) - tl * norm2(y1)).abs() <= 1e-12 * norm2(y1).max(1e-300));
                assert!((norm2(zz) - tl * norm2(z1)).abs() <= 1e-12 * norm2(z1).max(1e-300));
            }
            assert!(st.success_prob >= last);
            last = st.success_prob;
        }
    }

    #[test]
    fn gershgorin_examples() {
        assert_eq!(gershgorin_bound(&SparseMatrix::identity(5)), 1.0);
        let m = SparseMatrix::from_triplets(2, 2, vec![(0, 0, z(2.0)), (0, 1, z(-1.0)), (1, 0, z(-1.0)), (1, 1, z(2.0))]).unwrap();
        assert_eq!(gershgorin_bound(&m), 3.0);
    }

    #[test]
    fn profile_of_identity() {
        assert_eq!(sparsity_profile(&SparseMatrix::identity(7)), SparsityProfile { s_r: 1, s_c: 1, c_sp: 1.0 });
    }

    #[test]
    fn tikhonov_identity() {
        let b = [z(1.0), c64::new(0.0, 2.0), z(-4.0)];
        let r = tikhonov_solve(&SparseMatrix::identity(3), &b, 1.0).unwrap();
        for (x, bi) in r.x.iter().zip(&b) {
            assert!((x - bi / 2.0).norm() < 1e-15);
        }
        assert_eq!(r.cond_bound, 2.0);
        assert!(tikhonov_solve(&SparseMatrix::identity(3), &b, 0.0).is_err());
    }

    #[test]
    fn error_check_identity_and_diagonal() {
        let a = Mat::from_fn(2, 2, |i, j| if i == j { z(if i == 0 { 1.0 } else { 0.1 }) } else { z(0.0) });
        let r = error_propagation_check(&a, &a, &[z(1.0), z(1.0)]).unwrap();
        assert_eq!((r.rel_b_err, r.rel_x_err), (0.0, 0.0));
        let mut ae = a.clone();
        ae[(1, 1)] += z(1e-3);
        let r = error_propagation_check(&a, &ae, &[z(1.0), z(1.0)]).unwrap();
        assert!((r.kappa - 10.0).abs() < 1e-12);
        assert!((r.eps - 1e-3).abs() < 1e-15);
        assert!((r.x_bound - 1e-2 / (1.0 - 1e-2)).abs() < 1e-12);
        assert!(r.bounds_hold());
        let mut bad = a.clone();
        bad[(1, 1)] = z(-0.1);
        let r = error_propagation_check(&a, &bad, &[z(1.0), z(1.0)]).unwrap();
        assert!(!r.precondition_holds);
    }

    #[test]
    fn condition_estimates_agree_with_svd() {
        let a = Mat::from_fn(30, 30, |i, j| {
            if i == j { z(2.0 + i as f64 / 10.0) } else { c64::new(0.3 / (1.0 + (i as f64 - j as f64).abs()), 0.05) }
        });
        let exact = dense::cond2(a.as_ref());
        let d = cond_estimate_dense(&a, 200).unwrap();
        let s = cond_estimate_sparse(&SparseMatrix::from_dense(&a), 200).unwrap();
        assert!((d.cond - exact).abs() <= 1e-6 * exact, "{} {}", d.cond, exact);
        assert!((s.cond - exact).abs() <= 1e-6 * exact);
    }
}
