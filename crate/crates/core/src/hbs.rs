//! Hierarchically block separable compression, the telescoping
//! reconstruction, fast application and nonzero/runtime accounting.

use std::ops::Range;
use std::path::Path;
use std::time::Instant;

use faer::{c64, Mat};
use rayon::prelude::*;

use crate::error::{invalid, HbsError, Result};
use crate::geometry::{dist, make_proxy, NearFarLists, PointCloud, ProxySurface, SpatialTree};
use crate::kernels::{DenseSystem, KernelFamily, KernelMatrix, KernelSpec};
use crate::lowrank::{interp_decompose, proxy_id, IdResult};
use crate::sparse::SparseMatrix;

/// Largest N accepted by [`reconstruct`].
pub const DENSE_GUARD: usize = 4096;

/// What the compressor needs to see a kernel: where the points are and how
/// the columns are weighted.
pub struct KernelCtx<'a> {
    pub spec: &'a KernelSpec,
    pub cloud: &'a PointCloud,
    pub weights: &'a [f64],
}

/// Entry-wise access to the matrix being compressed.
pub trait EntrySource: Sync {
    fn n(&self) -> usize;
    fn entry(&self, i: usize, j: usize) -> c64;
    /// Needed for proxy compression; sources without it fall back to
    /// explicit far-field blocks.
    fn kernel(&self) -> Option<KernelCtx<'_>> {
        None
    }
}

impl EntrySource for Mat<c64> {
    fn n(&self) -> usize {
        self.nrows()
    }
    fn entry(&self, i: usize, j: usize) -> c64 {
        self[(i, j)]
    }
}

impl EntrySource for KernelMatrix {
    fn n(&self) -> usize {
        KernelMatrix::n(self)
    }
    fn entry(&self, i: usize, j: usize) -> c64 {
        KernelMatrix::entry(self, i, j)
    }
    fn kernel(&self) -> Option<KernelCtx<'_>> {
        Some(KernelCtx { spec: &self.spec, cloud: &self.cloud, weights: &self.weights })
    }
}

impl EntrySource for DenseSystem {
    fn n(&self) -> usize {
        self.matrix.nrows()
    }
    fn entry(&self, i: usize, j: usize) -> c64 {
        self.matrix[(i, j)]
    }
    fn kernel(&self) -> Option<KernelCtx<'_>> {
        Some(KernelCtx { spec: &self.spec, cloud: &self.cloud, weights: &self.weights })
    }
}

#[derive(Clone, Debug)]
pub struct HbsOptions {
    pub f: f64,
    pub tol: f64,
    pub use_proxy: bool,
    /// Proxy points per surface; `None` picks 64 in 1D/2D and 288 in 3D.
    pub proxy_points: Option<usize>,
    pub radius_factor: f64,
    /// Cap on the number of compressed levels.
    pub max_levels: Option<usize>,
}

impl Default for HbsOptions {
    fn default() -> Self {
        Self { f: 2.0, tol: 1e-10, use_proxy: true, proxy_points: None, radius_factor: 1.5, max_levels: None }
    }
}

/// Block counts and sizes of one compressed level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelDims {
    pub blocks: usize,
    pub rows_in: usize,
    pub rows_out: usize,
    pub cols_in: usize,
    pub cols_out: usize,
    pub max_row_block: usize,
    pub max_row_rank: usize,
    pub max_col_block: usize,
    pub max_col_rank: usize,
}

/// A ≈ D₁ + L₁(D₂ + L₂(… D_λ + L_λ D_{λ+1} R_λ …)R₂)R₁.
///
/// Level-1 factors act on original indices. Deeper factors act on skeleton
/// frames: frame l+1 lists the level-l skeletons block by block, each block
/// in ascending order of its frame-l position.
#[derive(Clone, Debug)]
pub struct HbsFactors {
    pub n: usize,
    pub d: Vec<SparseMatrix>,
    pub l: Vec<SparseMatrix>,
    pub r: Vec<SparseMatrix>,
    /// `row_skeletons[l-1][i]` is the frame-l position (original index for
    /// l = 1) of row i in frame l+1.
    pub row_skeletons: Vec<Vec<usize>>,
    pub col_skeletons: Vec<Vec<usize>>,
    pub dims: Vec<LevelDims>,
}

impl HbsFactors {
    pub fn depth(&self) -> usize {
        self.l.len()
    }

    /// Factors of a matrix with no compressible structure: D₁ = A.
    pub fn single_level(a: SparseMatrix) -> Result<Self> {
        if a.n_rows() != a.n_cols() {
            return invalid("single-level factors need a square matrix");
        }
        Ok(Self {
            n: a.n_rows(),
            d: vec![a],
            l: Vec::new(),
            r: Vec::new(),
            row_skeletons: Vec::new(),
            col_skeletons: Vec::new(),
            dims: Vec::new(),
        })
    }

    /// Factors in telescoping order D1, L1, R1, D2, …, D_{λ+1}.
    pub fn named_factors(&self) -> Vec<(String, &SparseMatrix)> {
        let mut out = Vec::new();
        for l in 0..self.depth() {
            out.push((format!("D{}", l + 1), &self.d[l]));
            out.push((format!("L{}", l + 1), &self.l[l]));
            out.push((format!("R{}", l + 1), &self.r[l]));
        }
        out.push((format!("D{}", self.depth() + 1), &self.d[self.depth()]));
        out
    }

    pub fn validate(&self) -> Result<()> {
        let lam = self.depth();
        if self.d.len() != lam + 1 || self.r.len() != lam {
            return invalid("factor list lengths disagree");
        }
        let mut rows = self.n;
        let mut cols = self.n;
        for l in 0..=lam {
            let dl = &self.d[l];
            if dl.n_rows() != rows || dl.n_cols() != cols {
                return invalid(format!("D{} has shape {}x{}, expected {rows}x{cols}", l + 1, dl.n_rows(), dl.n_cols()));
            }
            if l == lam {
                break;
            }
            let (ll, rr) = (&self.l[l], &self.r[l]);
            if ll.n_rows() != rows || rr.n_cols() != cols {
                return invalid(format!("level {} bases do not match the frame", l + 1));
            }
            rows = ll.n_cols();
            cols = rr.n_rows();
        }
        Ok(())
    }

    pub fn stats(&self, runtime_seconds: f64) -> FactorStats {
        let named = self.named_factors();
        let nnz_per_factor: Vec<(String, usize)> = named.iter().map(|(n, m)| (n.clone(), m.nnz())).collect();
        let max_rank = self
            .dims
            .iter()
            .map(|d| d.max_row_rank.max(d.max_col_rank))
            .max()
            .unwrap_or(0);
        FactorStats {
            nnz_total: nnz_per_factor.iter().map(|(_, k)| k).sum(),
            nnz_per_factor,
            max_rank,
            runtime_seconds,
            c_sp: named.iter().map(|(_, m)| m.max_abs()).fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FactorStats {
    pub nnz_total: usize,
    pub nnz_per_factor: Vec<(String, usize)>,
    pub max_rank: usize,
    pub runtime_seconds: f64,
    pub c_sp: f64,
}

fn default_proxy_points(d: usize) -> usize {
    if d == 3 {
        288
    } else {
        64
    }
}

/// Oscillatory kernels need enough proxy points to resolve κ·radius.
fn proxy_points_for(spec: &KernelSpec, d: usize, base: usize, radius: f64) -> usize {
    let kr = spec.kappa * radius;
    match (spec.family, d) {
        (KernelFamily::Hankel2d, _) => base.max(2 * kr.ceil() as usize + 40),
        (KernelFamily::Helmholtz3d, 3) => base.max((2.0 * (kr + 6.0).powi(2)).ceil() as usize),
        _ => base,
    }
}

/// Interactions of the block points with the proxy surface, one row per
/// proxy point. `as_source` selects the column (source) orientation, which
/// carries the quadrature weight.
fn proxy_rows(ctx: &KernelCtx<'_>, proxy: &ProxySurface, pts: &[usize], as_source: bool) -> Mat<c64> {
    let d = ctx.cloud.dim();
    Mat::from_fn(proxy.m(), pts.len(), |k, i| {
        let idx = pts[i];
        let w = if as_source { ctx.weights[idx] } else { 1.0 };
        if d == 1 {
            // Cauchy kernel on a circle in the complex plane.
            let (zr, zi) = proxy.complex_point(k);
            let x = ctx.cloud.point(idx)[0];
            c64::new(w, 0.0) / c64::new(zr - x, zi)
        } else {
            let r = dist(&proxy.points[k], ctx.cloud.point(idx));
            ctx.spec.eval_r(r) * w
        }
    })
}

struct Frame {
    /// Original index of each active position.
    orig: Vec<usize>,
    /// Position range of each block on the current level.
    ranges: Vec<Range<usize>>,
    /// Block of each position on the previous (finer) level.
    prev_block: Option<Vec<usize>>,
}

fn leaf_frame(tree: &SpatialTree) -> Frame {
    let mut orig = Vec::with_capacity(tree.n_points);
    let mut ranges = Vec::with_capacity(tree.blocks(1));
    for &id in &tree.levels[0] {
        let start = orig.len();
        orig.extend(&tree.nodes[id].indices);
        ranges.push(start..orig.len());
    }
    Frame { orig, ranges, prev_block: None }
}

struct BlockId {
    skeleton: Vec<usize>,
    /// Rows follow `skeleton` (ascending).
    p: Mat<c64>,
}

fn sorted_id(id: IdResult) -> BlockId {
    let mut order: Vec<usize> = (0..id.rank()).collect();
    order.sort_by_key(|&i| id.skeleton[i]);
    let skeleton = order.iter().map(|&i| id.skeleton[i]).collect();
    let p = Mat::from_fn(order.len(), id.p.ncols(), |i, j| id.p[(order[i], j)]);
    BlockId { skeleton, p }
}

/// Compress `src` along `tree`.
pub fn hbs_compress<S: EntrySource + ?Sized>(
    src: &S,
    tree: &SpatialTree,
    near_far: &NearFarLists,
    opts: &HbsOptions,
) -> Result<(HbsFactors, FactorStats)> {
    let start = Instant::now();
    let n = src.n();
    if tree.n_points != n {
        return invalid(format!("tree covers {} points, matrix has {n} rows", tree.n_points));
    }
    if near_far.levels() != tree.depth() {
        return invalid("near/far lists do not match the tree");
    }
    if !(opts.tol > 0.0) {
        return invalid("tol must be positive");
    }
    if !(opts.f >= 1.0) {
        return invalid("f must be at least 1");
    }
    let kernel = if opts.use_proxy { src.kernel() } else { None };
    if let Some(ctx) = &kernel {
        if ctx.cloud.len() != n || ctx.cloud.dim() != tree.d {
            return invalid("kernel cloud does not match the tree");
        }
    }
    let base_m = opts.proxy_points.unwrap_or_else(|| default_proxy_points(tree.d));
    let depth = tree.depth();
    let max_levels = opts.max_levels.unwrap_or(usize::MAX);

    let mut rows = leaf_frame(tree);
    let mut cols = leaf_frame(tree);
    let mut f = HbsFactors {
        n,
        d: Vec::new(),
        l: Vec::new(),
        r: Vec::new(),
        row_skeletons: Vec::new(),
        col_skeletons: Vec::new(),
        dims: Vec::new(),
    };

    for k in 1..=depth {
        let nb = tree.blocks(k);
        let out_row = |pos: usize| if k == 1 { rows.orig[pos] } else { pos };
        let out_col = |pos: usize| if k == 1 { cols.orig[pos] } else { pos };
        let (n_rows, n_cols) = if k == 1 { (n, n) } else { (rows.orig.len(), cols.orig.len()) };

        // Entries of S on block pair (p, q) that were not taken at level k−1.
        let block_pair = |p: usize, q: usize, out: &mut Vec<(usize, usize, c64)>| {
            for r in rows.ranges[p].clone() {
                for c in cols.ranges[q].clone() {
                    if let (Some(pr), Some(pc)) = (&rows.prev_block, &cols.prev_block) {
                        if near_far.is_near(k - 1, pr[r], pc[c]) {
                            continue;
                        }
                    }
                    out.push((out_row(r), out_col(c), src.entry(rows.orig[r], cols.orig[c])));
                }
            }
        };
        let assemble = |only_near: bool| -> Result<SparseMatrix> {
            let trip: Vec<(usize, usize, c64)> = (0..nb)
                .into_par_iter()
                .flat_map_iter(|p| {
                    let mut out = Vec::new();
                    if only_near {
                        for &q in near_far.near_blocks(k, p) {
                            block_pair(p, q, &mut out);
                        }
                    } else {
                        for q in 0..nb {
                            block_pair(p, q, &mut out);
                        }
                    }
                    out
                })
                .collect();
            SparseMatrix::from_triplets(n_rows, n_cols, trip)
        };

        let exhausted = rows.orig.is_empty() || cols.orig.is_empty();
        if k == depth || exhausted || !near_far.has_far_pairs(k) || f.l.len() >= max_levels {
            f.d.push(assemble(false)?);
            break;
        }

        let proxy_for = |p: usize| -> Result<Option<ProxySurface>> {
            match &kernel {
                None => Ok(None),
                Some(ctx) => {
                    let bbox = &tree.node(k, p).bbox;
                    let rad = opts.radius_factor * bbox.circumradius();
                    let m = proxy_points_for(ctx.spec, tree.d, base_m, rad);
                    make_proxy(bbox, m, opts.radius_factor).map(Some)
                }
            }
        };

        // ID of one block. `as_rows`: compress rows of block p against far
        // columns; otherwise columns of block p against far rows.
        let block_id = |p: usize, as_rows: bool| -> Result<BlockId> {
            let (own, other) = if as_rows { (&rows, &cols) } else { (&cols, &rows) };
            let own_pos: Vec<usize> = own.ranges[p].clone().collect();
            let far_pos: Vec<usize> = near_far
                .far_blocks(k, p)
                .into_iter()
                .flat_map(|q| other.ranges[q].clone())
                .collect();
            if far_pos.is_empty() || own_pos.is_empty() {
                return Ok(BlockId { skeleton: Vec::new(), p: Mat::zeros(0, own_pos.len()) });
            }
            let entry = |o: usize, f: usize| {
                if as_rows {
                    src.entry(own.orig[o], other.orig[f])
                } else {
                    src.entry(other.orig[f], own.orig[o])
                }
            };
            let id = match (proxy_for(p)?, &kernel) {
                (Some(proxy), Some(ctx)) => {
                    let inside: Vec<usize> = far_pos
                        .iter()
                        .copied()
                        .filter(|&fp| {
                            let x = ctx.cloud.point(other.orig[fp]);
                            dist(&x[..tree.d], &proxy.center) < proxy.radius
                        })
                        .collect();
                    let explicit = Mat::from_fn(inside.len(), own_pos.len(), |e, i| entry(own_pos[i], inside[e]));
                    let pts: Vec<usize> = own_pos.iter().map(|&o| own.orig[o]).collect();
                    let prox = proxy_rows(ctx, &proxy, &pts, !as_rows);
                    proxy_id(explicit.as_ref(), prox.as_ref(), &tree.node(k, p).bbox, &proxy, opts.f, opts.tol)?
                }
                _ => {
                    let m = Mat::from_fn(far_pos.len(), own_pos.len(), |e, i| entry(own_pos[i], far_pos[e]));
                    interp_decompose(m.as_ref(), opts.f, opts.tol)?
                }
            };
            Ok(sorted_id(id))
        };

        let row_ids: Vec<BlockId> = (0..nb).into_par_iter().map(|p| block_id(p, true)).collect::<Result<_>>()?;
        let col_ids: Vec<BlockId> = (0..nb).into_par_iter().map(|p| block_id(p, false)).collect::<Result<_>>()?;

        // A level where every block keeps full rank is useless; stop and let
        // the final dense factor absorb the remainder.
        let compresses = (0..nb).any(|p| {
            row_ids[p].skeleton.len() < rows.ranges[p].len() || col_ids[p].skeleton.len() < cols.ranges[p].len()
        });
        if !compresses {
            f.d.push(assemble(false)?);
            break;
        }

        let dk = assemble(true)?;
        let parents = tree.parent_positions(k);
        let (lk, row_next, row_map) = next_frame(&rows, &row_ids, &parents, tree.blocks(k + 1), &out_row, true, n_rows)?;
        let (rk, col_next, col_map) = next_frame(&cols, &col_ids, &parents, tree.blocks(k + 1), &out_col, false, n_cols)?;

        f.dims.push(LevelDims {
            blocks: nb,
            rows_in: rows.orig.len(),
            rows_out: row_next.orig.len(),
            cols_in: cols.orig.len(),
            cols_out: col_next.orig.len(),
            max_row_block: rows.ranges.iter().map(|r| r.len()).max().unwrap_or(0),
            max_row_rank: row_ids.iter().map(|b| b.skeleton.len()).max().unwrap_or(0),
            max_col_block: cols.ranges.iter().map(|r| r.len()).max().unwrap_or(0),
            max_col_rank: col_ids.iter().map(|b| b.skeleton.len()).max().unwrap_or(0),
        });
        f.d.push(dk);
        f.l.push(lk);
        f.r.push(rk);
        f.row_skeletons.push(row_map);
        f.col_skeletons.push(col_map);
        rows = row_next;
        cols = col_next;
    }

    let stats = f.stats(start.elapsed().as_secs_f64());
    Ok((f, stats))
}

/// Builds the basis factor of one side and the frame of the next level.
#[allow(clippy::type_complexity)]
fn next_frame(
    frame: &Frame,
    ids: &[BlockId],
    parents: &[usize],
    n_parents: usize,
    out: &dyn Fn(usize) -> usize,
    as_rows: bool,
    n_out: usize,
) -> Result<(SparseMatrix, Frame, Vec<usize>)> {
    let mut trip = Vec::new();
    let mut orig = Vec::new();
    let mut prev_block = Vec::new();
    let mut map = Vec::new();
    let mut ranges: Vec<Range<usize>> = vec![0..0; n_parents];
    let mut last_parent: Option<usize> = None;
    for (p, id) in ids.iter().enumerate() {
        let block: Vec<usize> = frame.ranges[p].clone().collect();
        let base = orig.len();
        for (j, &s) in id.skeleton.iter().enumerate() {
            orig.push(frame.orig[block[s]]);
            prev_block.push(p);
            map.push(out(block[s]));
            for (i, &pos) in block.iter().enumerate() {
                let v = id.p[(j, i)];
                if as_rows {
                    trip.push((out(pos), base + j, v));
                } else {
                    trip.push((base + j, out(pos), v));
                }
            }
        }
        let par = parents[p];
        if last_parent != Some(par) {
            if !ranges[par].is_empty() {
                return invalid("tree level is not ordered by parent");
            }
            ranges[par] = base..orig.len();
            last_parent = Some(par);
        } else {
            ranges[par].end = orig.len();
        }
    }
    let k = orig.len();
    let basis = if as_rows {
        SparseMatrix::from_triplets(n_out, k, trip)?
    } else {
        SparseMatrix::from_triplets(k, n_out, trip)?
    };
    Ok((basis, Frame { orig, ranges, prev_block: Some(prev_block) }, map))
}

/// Convenience: tree, admissibility and compression in one call.
pub fn compress_kernel(km: &KernelMatrix, leaf_size: usize, opts: &HbsOptions) -> Result<(HbsFactors, FactorStats, SpatialTree)> {
    let tree = crate::geometry::build_tree(&km.cloud, leaf_size)?;
    let nf = crate::geometry::mark_near_far(&tree);
    let (f, s) = hbs_compress(km, &tree, &nf, opts)?;
    Ok((f, s, tree))
}

/// Dense evaluation of the telescoping form.
pub fn reconstruct(f: &HbsFactors) -> Result<Mat<c64>> {
    if f.n > DENSE_GUARD {
        return Err(HbsError::DimensionGuard { n: f.n, limit: DENSE_GUARD });
    }
    f.validate()?;
    let lam = f.depth();
    let mut m = f.d[lam].to_dense();
    for l in (0..lam).rev() {
        let lm = f.l[l].to_dense();
        let rm = f.r[l].to_dense();
        let inner = &lm * &m;
        m = &f.d[l].to_dense() + &(&inner * &rm);
    }
    Ok(m)
}

/// y = A_ε v through the factors in O(nnz).
pub fn apply(f: &HbsFactors, v: &[c64]) -> Result<Vec<c64>> {
    if v.len() != f.n {
        return invalid(format!("vector length {} for N = {}", v.len(), f.n));
    }
    let lam = f.depth();
    let mut zs: Vec<Vec<c64>> = Vec::with_capacity(lam + 1);
    zs.push(v.to_vec());
    for l in 0..lam {
        let z = f.r[l].matvec(&zs[l]);
        zs.push(z);
    }
    let mut y = f.d[lam].matvec(&zs[lam]);
    for l in (0..lam).rev() {
        let up = f.l[l].matvec(&y);
        let mut cur = f.d[l].matvec(&zs[l]);
        for (c, u) in cur.iter_mut().zip(up) {
            *c += u;
        }
        y = cur;
    }
    Ok(y)
}

/// Closed-form nonzero count s and runtime model T for a tree of depth λ.
/// The logarithm in T is natural.
pub fn predict_counts(d: u32, n: u64, r: u64, n1: u64, lambda: u32, m: u64) -> (u128, f64) {
    let two_d = 1u128 << d;
    let three_d = 3u128.pow(d);
    let six_d = 6u128.pow(d);
    let four_d = 4u128.pow(d);
    let (r, n, n1) = (r as u128, n as u128, n1 as u128);
    let geom = ((1u128 << (d * lambda)) - 1) / (two_d - 1);
    let per = (2 * two_d * r * r - 2 * r * r + 4 * r) + four_d * (six_d - three_d) * r * r;
    let s = three_d * n1 * n + two_d * per * geom;

    let (rf, mf, df) = (r as f64, m as f64, d as i32);
    let t = 2f64.powi(df + 1) * (mf * rf * rf.max(1.0).ln() + rf.powi(3))
        * (2f64.powi(df * (lambda as i32 + 1)) - 2f64.powi(df))
        / (2f64.powi(df) - 1.0);
    (s, t)
}

/// Tree depth implied by a leaf count under the uniform-tree model.
pub fn model_depth(d: u32, leaves: usize) -> u32 {
    let mut lam = 0;
    while (1usize << (d * lam)) < leaves {
        lam += 1;
    }
    lam
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Writes one triplet file per factor plus `manifest.txt`.
pub fn write_factors(f: &HbsFactors, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut man = format!("n {}\nlambda {}\n", f.n, f.depth());
    for (l, d) in f.dims.iter().enumerate() {
        man += &format!(
            "level {} {} {} {} {} {} {} {} {} {}\n",
            l + 1,
            d.blocks,
            d.rows_in,
            d.rows_out,
            d.cols_in,
            d.cols_out,
            d.max_row_block,
            d.max_row_rank,
            d.max_col_block,
            d.max_col_rank
        );
    }
    for (l, s) in f.row_skeletons.iter().enumerate() {
        man += &format!("row_skeleton {} {}\n", l + 1, join(s));
    }
    for (l, s) in f.col_skeletons.iter().enumerate() {
        man += &format!("col_skeleton {} {}\n", l + 1, join(s));
    }
    for (name, m) in f.named_factors() {
        m.write(dir.join(format!("{name}.txt")))?;
    }
    std::fs::write(dir.join("manifest.txt"), man)?;
    Ok(())
}

pub fn read_factors(dir: impl AsRef<Path>) -> Result<HbsFactors> {
    let dir = dir.as_ref();
    let man = std::fs::read_to_string(dir.join("manifest.txt"))?;
    let mut n = None;
    let mut lam = None;
    let mut dims = Vec::new();
    let mut row_sk = Vec::new();
    let mut col_sk = Vec::new();
    for (ln, line) in man.lines().enumerate() {
        let mut it = line.split_whitespace();
        let Some(key) = it.next() else { continue };
        let nums: Vec<usize> = it
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| HbsError::Parse { line: ln + 1, msg: e.to_string() })?;
        let bad = |msg: &str| HbsError::Parse { line: ln + 1, msg: msg.into() };
        match key {
            "n" => n = nums.first().copied(),
            "lambda" => lam = nums.first().copied(),
            "level" => {
                if nums.len() != 10 {
                    return Err(bad("level line needs 10 fields"));
                }
                dims.push(LevelDims {
                    blocks: nums[1],
                    rows_in: nums[2],
                    rows_out: nums[3],
                    cols_in: nums[4],
                    cols_out: nums[5],
                    max_row_block: nums[6],
                    max_row_rank: nums[7],
                    max_col_block: nums[8],
                    max_col_rank: nums[9],
                });
            }
            "row_skeleton" => row_sk.push(nums[1..].to_vec()),
            "col_skeleton" => col_sk.push(nums[1..].to_vec()),
            _ => return Err(bad("unknown manifest key")),
        }
    }
    let n = n.ok_or(HbsError::Parse { line: 1, msg: "missing n".into() })?;
    let lam = lam.ok_or(HbsError::Parse { line: 2, msg: "missing lambda".into() })?;
    let mut f = HbsFactors { n, d: Vec::new(), l: Vec::new(), r: Vec::new(), row_skeletons: row_sk, col_skeletons: col_sk, dims };
    for l in 1..=lam + 1 {
        f.d.push(SparseMatrix::read(dir.join(format!("D{l}.txt")))?);
        if l <= lam {
            f.l.push(SparseMatrix::read(dir.join(format!("L{l}.txt")))?);
            f.r.push(SparseMatrix::read(dir.join(format!("R{l}.txt")))?);
        }
    }
    f.validate()?;
    Ok(f)
}
