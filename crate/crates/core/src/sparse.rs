//! Compressed-row sparse matrices, the triplet text format, and a thin
//! wrapper around faer's sparse LU.

use std::fmt::Write as _;
use std::path::Path;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};

use crate::error::{invalid, HbsError, Result};

/// A named contiguous range of rows or columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub name: String,
    pub offset: usize,
    pub size: usize,
}

impl Segment {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.size
    }
}

/// CSR storage with sorted column indices per row and no duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<c64>,
    /// Unknown segments (x, y_l, z_l for extended systems).
    pub block_layout: Vec<Segment>,
    /// Equation segments, in row order.
    pub row_layout: Vec<Segment>,
}

impl SparseMatrix {
    /// Duplicate coordinates are summed; exact zeros are dropped.
    pub fn from_triplets(n_rows: usize, n_cols: usize, mut t: Vec<(usize, usize, c64)>) -> Result<Self> {
        if let Some(&(i, j, _)) = t.iter().find(|(i, j, _)| *i >= n_rows || *j >= n_cols) {
            return invalid(format!("entry ({i}, {j}) outside {n_rows}x{n_cols}"));
        }
        t.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(t.len());
        let mut values: Vec<c64> = Vec::with_capacity(t.len());
        let mut rows = Vec::with_capacity(t.len());
        for (i, j, v) in t {
            if let (Some(&li), Some(&lj)) = (rows.last(), col_idx.last()) {
                if li == i && lj == j {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(i);
            col_idx.push(j);
            values.push(v);
        }
        let zero = c64::new(0.0, 0.0);
        let keep: Vec<usize> = (0..values.len()).filter(|&k| values[k] != zero).collect();
        let rows: Vec<usize> = keep.iter().map(|&k| rows[k]).collect();
        let col_idx: Vec<usize> = keep.iter().map(|&k| col_idx[k]).collect();
        let values: Vec<c64> = keep.iter().map(|&k| values[k]).collect();
        for &i in &rows {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
            block_layout: Vec::new(),
            row_layout: Vec::new(),
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self::from_triplets(n_rows, n_cols, Vec::new()).unwrap()
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, c64::new(1.0, 0.0))).collect()).unwrap()
    }

    pub fn from_dense(m: &Mat<c64>) -> Self {
        let mut t = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                t.push((i, j, m[(i, j)]));
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t).unwrap()
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, c64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, c64)> + '_ {
        (0..self.n_rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn triplets(&self) -> Vec<(usize, usize, c64)> {
        self.iter().collect()
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => c64::new(0.0, 0.0),
        }
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn col_nnz(&self) -> Vec<usize> {
        let mut c = vec![0usize; self.n_cols];
        for &j in &self.col_idx {
            c[j] += 1;
        }
        c
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: c64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out
    }

    pub fn matvec(&self, x: &[c64]) -> Vec<c64> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// y = A† x.
    pub fn matvec_adjoint(&self, x: &[c64]) -> Vec<c64> {
        assert_eq!(x.len(), self.n_rows);
        let mut y = vec![c64::new(0.0, 0.0); self.n_cols];
        for (i, j, v) in self.iter() {
            y[j] += v.conj() * x[i];
        }
        y
    }

    pub fn adjoint(&self) -> Self {
        let t = self.iter().map(|(i, j, v)| (j, i, v.conj())).collect();
        Self::from_triplets(self.n_cols, self.n_rows, t).unwrap()
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let mut m = Mat::<c64>::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn to_faer(&self) -> SparseColMat<usize, c64> {
        let t: Vec<Triplet<usize, usize, c64>> =
            self.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.n_rows, self.n_cols, &t)
            .expect("indices validated on construction")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("%%sparse complex {} {} {}\n", self.n_rows, self.n_cols, self.nnz());
        for (i, j, v) in self.iter() {
            let _ = writeln!(s, "{} {} {:.16e} {:.16e}", i + 1, j + 1, v.re, v.im);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(HbsError::Parse { line: 1, msg: "empty file".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "%%sparse" || fields[1] != "complex" {
            return Err(HbsError::Parse { line: 1, msg: "expected `%%sparse complex rows cols nnz`".into() });
        }
        let num = |s: &str, line: usize| -> Result<usize> {
            s.parse().map_err(|e: std::num::ParseIntError| HbsError::Parse { line, msg: e.to_string() })
        };
        let (r, c, nnz) = (num(fields[2], 1)?, num(fields[3], 1)?, num(fields[4], 1)?);
        let mut t = Vec::with_capacity(nnz);
        for (ln, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(HbsError::Parse { line: ln + 1, msg: "expected `row col re im`".into() });
            }
            let (i, j) = (num(f[0], ln + 1)?, num(f[1], ln + 1)?);
            if i == 0 || j == 0 {
                return Err(HbsError::Parse { line: ln + 1, msg: "indices are 1-based".into() });
            }
            let fl = |s: &str| -> Result<f64> {
                s.parse().map_err(|e: std::num::ParseFloatError| HbsError::Parse { line: ln + 1, msg: e.to_string() })
            };
            t.push((i - 1, j - 1, c64::new(fl(f[2])?, fl(f[3])?)));
        }
        if t.len() != nnz {
            return Err(HbsError::Parse { line: 1, msg: format!("header promises {nnz} entries, found {}", t.len()) });
        }
        Self::from_triplets(r, c, t)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sidecar listing of `block_layout`, one `name offset size` per line.
    pub fn layout_text(&self) -> String {
        self.block_layout
            .iter()
            .map(|s| format!("{} {} {}\n", s.name, s.offset, s.size))
            .collect()
    }

    pub fn parse_layout(text: &str) -> Result<Vec<Segment>> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(ln, l)| {
                let f: Vec<&str> = l.split_whitespace().collect();
                let bad = || HbsError::Parse { line: ln + 1, msg: "expected `name offset size`".into() };
                if f.len() != 3 {
                    return Err(bad());
                }
                Ok(Segment {
                    name: f[0].to_string(),
                    offset: f[1].parse().map_err(|_| bad())?,
                    size: f[2].parse().map_err(|_| bad())?,
                })
            })
            .collect()
    }
}

/// Sparse LU factorization of a square matrix.
pub struct SparseLu {
    n: usize,
    lu: Option<faer::sparse::linalg::solvers::Lu<usize, c64>>,
}

impl SparseLu {
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        if a.n_rows() != a.n_cols() {
            return invalid(format!("LU of a non-square {}x{} matrix", a.n_rows(), a.n_cols()));
        }
        if a.n_rows() == 0 {
            return Ok(Self { n: 0, lu: None });
        }
        match a.to_faer().sp_lu() {
            Ok(lu) => Ok(Self { n: a.n_rows(), lu: Some(lu) }),
            Err(faer::sparse::linalg::LuError::SymbolicSingular { index }) => {
                Err(HbsError::Singular { pivot: index })
            }
            Err(_) => Err(HbsError::Singular { pivot: 0 }),
        }
    }

    pub fn solve(&self, b: &[c64]) -> Result<Vec<c64>> {
        if b.len() != self.n {
            return invalid(format!("rhs length {} for a system of size {}", b.len(), self.n));
        }
        let Some(lu) = &self.lu else { return Ok(Vec::new()) };
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = lu.solve(&rhs);
        let out: Vec<c64> = (0..self.n).map(|i| x[(i, 0)]).collect();
        if let Some(p) = out.iter().position(|v| !crate::dense::is_finite(*v)) {
            return Err(HbsError::Singular { pivot: p });
        }
        Ok(out)
    }
}
