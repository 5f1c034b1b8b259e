//! Point clouds, uniform-depth spatial trees, touching admissibility and
//! proxy surfaces.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, HbsError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    d: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// `coords` is row-major: point i occupies `coords[i*d..(i+1)*d]`.
    pub fn new(d: usize, coords: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return invalid(format!("spatial dimension {d} not in 1..=3"));
        }
        if coords.is_empty() {
            return invalid("empty point cloud");
        }
        if coords.len() % d != 0 {
            return invalid("coordinate count is not a multiple of the dimension");
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return invalid("non-finite coordinate");
        }
        Ok(Self { d, coords })
    }

    pub fn from_points(d: usize, points: &[Vec<f64>]) -> Result<Self> {
        if points.iter().any(|p| p.len() != d) {
            return invalid("point with wrong dimension");
        }
        Self::new(d, points.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        dist(self.point(i), self.point(j))
    }

    /// Plain-text format: `d N` on the first line, then one point per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (ln, header) = lines.next().ok_or(HbsError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| HbsError::Parse { line: ln + 1, msg: e.to_string() })?;
        if head.len() != 2 {
            return Err(HbsError::Parse { line: ln + 1, msg: "expected `d N`".into() });
        }
        let (d, n) = (head[0], head[1]);
        let mut coords = Vec::with_capacity(d * n);
        for (ln, line) in lines {
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| HbsError::Parse { line: ln + 1, msg: e.to_string() })?;
            if row.len() != d {
                return Err(HbsError::Parse {
                    line: ln + 1,
                    msg: format!("expected {d} coordinates, found {}", row.len()),
                });
            }
            coords.extend(row);
        }
        if coords.len() != d * n {
            return Err(HbsError::Parse {
                line: 1,
                msg: format!("header promises {n} points, found {}", coords.len() / d.max(1)),
            });
        }
        Self::new(d, coords)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.d, self.len());
        for i in 0..self.len() {
            let p = self.point(i);
            for (k, c) in p.iter().enumerate() {
                if k > 0 {
                    s.push(' ');
                }
                let _ = write!(s, "{c:.17e}");
            }
            s.push('\n');
        }
        s
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Axis-aligned cube.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundingBox {
    pub center: Vec<f64>,
    pub half_width: f64,
}

impl BoundingBox {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn circumradius(&self) -> f64 {
        self.half_width * (self.dim() as f64).sqrt()
    }

    /// Closed containment.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.center
            .iter()
            .zip(p)
            .all(|(c, x)| (x - c).abs() <= self.half_width)
    }

    /// Closed boxes intersect (touching counts).
    pub fn touches(&self, other: &BoundingBox) -> bool {
        let slack = 1e-12 * (self.half_width + other.half_width);
        self.center
            .iter()
            .zip(&other.center)
            .all(|(a, b)| (a - b).abs() <= self.half_width + other.half_width + slack)
    }
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    /// 1 for leaves, increasing towards the root.
    pub level: usize,
    /// Position of this node inside `SpatialTree::levels[level - 1]`.
    pub pos: usize,
    pub lattice: Vec<i64>,
    pub bbox: BoundingBox,
    pub indices: Vec<usize>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Uniform-depth 2^d-tree. Every leaf sits on level 1; the root is on level
/// `depth()`. Within a level, siblings are contiguous and ordered like their
/// parents.
#[derive(Clone, Debug)]
pub struct SpatialTree {
    pub d: usize,
    pub n_points: usize,
    pub leaf_size: usize,
    pub nodes: Vec<TreeNode>,
    /// `levels[l - 1]` lists the node ids of level l.
    pub levels: Vec<Vec<usize>>,
}

impl SpatialTree {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Node id of the level-`level` block at position `pos`.
    pub fn node(&self, level: usize, pos: usize) -> &TreeNode {
        &self.nodes[self.levels[level - 1][pos]]
    }

    pub fn blocks(&self, level: usize) -> usize {
        self.levels[level - 1].len()
    }

    /// Leaf-order permutation: concatenation of leaf index sets.
    pub fn leaf_order(&self) -> Vec<usize> {
        self.levels[0]
            .iter()
            .flat_map(|&id| self.nodes[id].indices.iter().copied())
            .collect()
    }

    /// For each point, its block position at `level`.
    pub fn block_of_points(&self, level: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.n_points];
        for (pos, &id) in self.levels[level - 1].iter().enumerate() {
            for &i in &self.nodes[id].indices {
                out[i] = pos;
            }
        }
        out
    }

    /// Parent position (on level+1) of each block position on `level`.
    pub fn parent_positions(&self, level: usize) -> Vec<usize> {
        self.levels[level - 1]
            .iter()
            .map(|&id| self.nodes[self.nodes[id].parent.expect("root has no parent")].pos)
            .collect()
    }
}

const MAX_DEPTH: usize = 48;

pub fn build_tree(cloud: &PointCloud, leaf_size: usize) -> Result<SpatialTree> {
    if leaf_size == 0 {
        return invalid("leaf_size must be at least 1");
    }
    if cloud.is_empty() {
        return invalid("empty point cloud");
    }
    let d = cloud.dim();
    let n = cloud.len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for i in 0..n {
        for (k, &c) in cloud.point(i).iter().enumerate() {
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
    }
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut half = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| 0.5 * (b - a))
        .fold(0.0, f64::max);
    if half == 0.0 {
        half = 0.5;
    }

    // Built top-down; levels are re-numbered once the depth is known.
    let mut nodes = vec![TreeNode {
        level: 0,
        pos: 0,
        lattice: vec![0; d],
        bbox: BoundingBox { center, half_width: half },
        indices: (0..n).collect(),
        parent: None,
        children: Vec::new(),
    }];
    let mut top_down: Vec<Vec<usize>> = vec![vec![0]];
    loop {
        let current = top_down.last().unwrap();
        let max_occ = current.iter().map(|&id| nodes[id].indices.len()).max().unwrap();
        if max_occ <= leaf_size || top_down.len() >= MAX_DEPTH {
            break;
        }
        let mut next = Vec::new();
        for &id in current.clone().iter() {
            let (bbox, lattice, indices) = {
                let nd = &nodes[id];
                (nd.bbox.clone(), nd.lattice.clone(), nd.indices.clone())
            };
            let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); 1 << d];
            for &i in &indices {
                let p = cloud.point(i);
                let mut code = 0;
                for k in 0..d {
                    if p[k] >= bbox.center[k] {
                        code |= 1 << k;
                    }
                }
                buckets[code].push(i);
            }
            let h = 0.5 * bbox.half_width;
            for (code, bucket) in buckets.into_iter().enumerate() {
                if bucket.is_empty() {
                    continue;
                }
                let mut c = bbox.center.clone();
                let mut lat = lattice.iter().map(|v| 2 * v).collect::<Vec<_>>();
                for k in 0..d {
                    if code & (1 << k) != 0 {
                        c[k] += h;
                        lat[k] += 1;
                    } else {
                        c[k] -= h;
                    }
                }
                let child = nodes.len();
                nodes.push(TreeNode {
                    level: 0,
                    pos: 0,
                    lattice: lat,
                    bbox: BoundingBox { center: c, half_width: h },
                    indices: bucket,
                    parent: Some(id),
                    children: Vec::new(),
                });
                nodes[id].children.push(child);
                next.push(child);
            }
        }
        top_down.push(next);
    }

    let depth = top_down.len();
    let mut levels = Vec::with_capacity(depth);
    for (t, ids) in top_down.into_iter().enumerate().rev() {
        let level = depth - t;
        for (pos, &id) in ids.iter().enumerate() {
            nodes[id].level = level;
            nodes[id].pos = pos;
        }
        levels.push(ids);
    }
    Ok(SpatialTree { d, n_points: n, leaf_size, nodes, levels })
}

/// Per-level adjacency under the touching rule.
#[derive(Clone, Debug)]
pub struct NearFarLists {
    /// `near[l - 1][p]` holds the sorted positions of level-l blocks touching p
    /// (p itself included).
    pub near: Vec<Vec<Vec<usize>>>,
    lattices: Vec<Vec<Vec<i64>>>,
}

impl NearFarLists {
    pub fn levels(&self) -> usize {
        self.near.len()
    }

    pub fn near_blocks(&self, level: usize, p: usize) -> &[usize] {
        &self.near[level - 1][p]
    }

    pub fn far_blocks(&self, level: usize, p: usize) -> Vec<usize> {
        let nb = &self.near[level - 1][p];
        (0..self.near[level - 1].len())
            .filter(|q| nb.binary_search(q).is_err())
            .collect()
    }

    /// Constant-time test through the integer lattice.
    pub fn is_near(&self, level: usize, p: usize, q: usize) -> bool {
        let a = &self.lattices[level - 1][p];
        let b = &self.lattices[level - 1][q];
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1)
    }

    pub fn has_far_pairs(&self, level: usize) -> bool {
        let n = self.near[level - 1].len();
        self.near[level - 1].iter().any(|nb| nb.len() < n)
    }
}

pub fn mark_near_far(tree: &SpatialTree) -> NearFarLists {
    let d = tree.d;
    let mut near = Vec::with_capacity(tree.depth());
    let mut lattices = Vec::with_capacity(tree.depth());
    for ids in &tree.levels {
        let lat: Vec<Vec<i64>> = ids.iter().map(|&id| tree.nodes[id].lattice.clone()).collect();
        let lookup: HashMap<&[i64], usize> =
            lat.iter().enumerate().map(|(p, l)| (l.as_slice(), p)).collect();
        let offsets = neighbor_offsets(d);
        let lists = lat
            .iter()
            .map(|l| {
                let mut nb: Vec<usize> = offsets
                    .iter()
                    .filter_map(|off| {
                        let key: Vec<i64> = l.iter().zip(off).map(|(a, b)| a + b).collect();
                        lookup.get(key.as_slice()).copied()
                    })
                    .collect();
                nb.sort_unstable();
                nb
            })
            .collect();
        near.push(lists);
        lattices.push(lat);
    }
    NearFarLists { near, lattices }
}

fn neighbor_offsets(d: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-1..=1).map(move |o| {
                    let mut w = v.clone();
                    w.push(o);
                    w
                })
            })
            .collect();
    }
    out
}

/// Equivalent-source surface around a box. For one-dimensional clouds the
/// surface is a circle in the complex plane around the interval, stored as
/// (re, im) pairs.
#[derive(Clone, Debug)]
pub struct ProxySurface {
    pub points: Vec<Vec<f64>>,
    pub center: Vec<f64>,
    pub radius: f64,
    /// Dimension of the box the surface encloses.
    pub d: usize,
}

impl ProxySurface {
    pub fn m(&self) -> usize {
        self.points.len()
    }

    /// For 1D clouds, the complex coordinate of proxy point `k`.
    pub fn complex_point(&self, k: usize) -> (f64, f64) {
        (self.points[k][0], self.points[k][1])
    }

    /// True when some proxy point lies in the closed box.
    pub fn intersects_box(&self, bbox: &BoundingBox) -> bool {
        self.points.iter().any(|p| {
            let on_axis = if self.d == 1 { p[1] == 0.0 } else { true };
            on_axis && bbox.contains(&p[..bbox.dim()])
        })
    }
}

pub fn make_proxy(bbox: &BoundingBox, m: usize, radius_factor: f64) -> Result<ProxySurface> {
    if m == 0 {
        return invalid("proxy needs at least one point");
    }
    if !(radius_factor > 1.0) || !radius_factor.is_finite() {
        return invalid(format!("radius_factor {radius_factor} must exceed 1"));
    }
    let d = bbox.dim();
    let radius = radius_factor * bbox.circumradius();
    let c = &bbox.center;
    let points = match d {
        1 | 2 => (0..m)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                let cy = if d == 2 { c[1] } else { 0.0 };
                vec![c[0] + radius * th.cos(), cy + radius * th.sin()]
            })
            .collect(),
        3 => fibonacci_sphere(m)
            .into_iter()
            .map(|u| vec![c[0] + radius * u[0], c[1] + radius * u[1], c[2] + radius * u[2]])
            .collect(),
        _ => return invalid("unsupported dimension"),
    };
    Ok(ProxySurface { points, center: c.clone(), radius, d })
}

/// Quasi-uniform unit-sphere points on the golden-angle spiral.
pub fn fibonacci_sphere(m: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / m as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid2d(side: usize) -> PointCloud {
        let mut pts = Vec::new();
        for i in 0..side {
            for j in 0..side {
                pts.push(vec![(i as f64 + 0.5) / side as f64, (j as f64 + 0.5) / side as f64]);
            }
        }
        PointCloud::from_points(2, &pts).unwrap()
    }

    fn line(n: usize) -> PointCloud {
        PointCloud::new(1, (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()).unwrap()
    }

    #[test]
    fn single_point_gives_single_block() {
        let c = PointCloud::new(2, vec![0.3, 0.4]).unwrap();
        let t = build_tree(&c, 64).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(t.blocks(1), 1);
        let nf = mark_near_far(&t);
        assert_eq!(nf.near_blocks(1, 0), &[0]);
        assert!(nf.far_blocks(1, 0).is_empty());
    }

    #[test]
    fn depth_formula_on_line() {
        let t = build_tree(&line(8192), 64).unwrap();
        assert_eq!(t.depth(), ((8192f64 / 64.0).log2() / 1.0).floor() as usize + 1);
        assert_eq!(t.depth(), 8);
    }

    #[test]
    fn leaves_partition_grid() {
        let t = build_tree(&grid2d(16), 16).unwrap();
        for level in 1..=t.depth() {
            let mut seen = vec![0usize; 256];
            for &id in &t.levels[level - 1] {
                if level == 1 {
                    assert!(t.nodes[id].indices.len() <= 16);
                }
                for &i in &t.nodes[id].indices {
                    seen[i] += 1;
                }
            }
            assert!(seen.iter().all(|&s| s == 1), "level {level} is not a partition");
        }
    }

    #[test]
    fn children_per_parent_bounded() {
        let t = build_tree(&grid2d(20), 7).unwrap();
        for nd in &t.nodes {
            assert!(nd.children.len() <= 4);
            for &c in &nd.children {
                assert_eq!(t.nodes[c].level + 1, nd.level);
            }
        }
    }

    #[test]
    fn interior_line_block_has_three_neighbors() {
        let t = build_tree(&line(1024), 16).unwrap();
        let nf = mark_near_far(&t);
        let p = t.blocks(1) / 2;
        assert_eq!(nf.near_blocks(1, p).len(), 3);
        assert_eq!(nf.near_blocks(1, 0).len(), 2);
    }

    #[test]
    fn near_lists_match_box_touch_oracle() {
        // 8x8 boxes at the leaf level.
        let t = build_tree(&grid2d(32), 16).unwrap();
        assert_eq!(t.blocks(1), 64);
        let nf = mark_near_far(&t);
        for level in 1..=t.depth() {
            let n = t.blocks(level);
            for p in 0..n {
                let oracle: Vec<usize> = (0..n)
                    .filter(|&q| t.node(level, p).bbox.touches(&t.node(level, q).bbox))
                    .collect();
                assert_eq!(nf.near_blocks(level, p), oracle.as_slice());
                for q in 0..n {
                    assert_eq!(nf.is_near(level, p, q), oracle.contains(&q));
                    assert_eq!(nf.is_near(level, p, q), nf.is_near(level, q, p));
                }
                assert!(nf.near_blocks(level, p).len() <= 9);
            }
        }
        let interior = (0..64)
            .find(|&p| {
                let c = &t.node(1, p).bbox.center;
                c[0] > 0.3 && c[0] < 0.7 && c[1] > 0.3 && c[1] < 0.7
            })
            .unwrap();
        assert_eq!(nf.near_blocks(1, interior).len(), 9);
    }

    #[test]
    fn proxy_square_symmetry() {
        let b = BoundingBox { center: vec![0.0, 0.0], half_width: 0.5 };
        let p = make_proxy(&b, 4, 1.5).unwrap();
        let r = 1.5 * 2f64.sqrt() / 2.0;
        let expect = [[r, 0.0], [0.0, r], [-r, 0.0], [0.0, -r]];
        for (got, want) in p.points.iter().zip(expect) {
            assert!((got[0] - want[0]).abs() < 1e-15 && (got[1] - want[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn proxy_points_outside_box() {
        let b = BoundingBox { center: vec![0.2, -0.1], half_width: 0.25 };
        let p = make_proxy(&b, 64, 1.5).unwrap();
        assert!(p.points.iter().all(|q| !b.contains(q)));
        assert!(!p.intersects_box(&b));
        let b1 = BoundingBox { center: vec![0.5], half_width: 0.5 };
        let p1 = make_proxy(&b1, 16, 1.5).unwrap();
        assert!(!p1.intersects_box(&b1));
    }

    #[test]
    fn sphere_proxy_spacing_positive() {
        let b = BoundingBox { center: vec![0.0; 3], half_width: 0.5 };
        let p = make_proxy(&b, 128, 1.5).unwrap();
        let mut min = f64::INFINITY;
        for i in 0..128 {
            assert!(!b.contains(&p.points[i]));
            for j in 0..i {
                min = min.min(dist(&p.points[i], &p.points[j]));
            }
        }
        assert!(min > 0.0);
    }

    #[test]
    fn proxy_rejects_small_factor() {
        let b = BoundingBox { center: vec![0.0, 0.0], half_width: 1.0 };
        assert!(make_proxy(&b, 8, 1.0).is_err());
        assert!(make_proxy(&b, 0, 1.5).is_err());
    }

    #[test]
    fn empty_cloud_rejected() {
        assert!(PointCloud::new(2, vec![]).is_err());
        assert!(build_tree(&line(4), 0).is_err());
    }

    #[test]
    fn cloud_text_round_trip() {
        let c = grid2d(3);
        let back = PointCloud::parse(&c.to_text()).unwrap();
        assert_eq!(c, back);
        assert!(PointCloud::parse("2 2\n0 0\n1\n").is_err());
    }
}
