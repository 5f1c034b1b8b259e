//! Block encodings simulated as exact unitary dilations, with the LCU/QMM
//! subnormalization and error algebra and the recursive encoding of an HBS
//! representation.
//!
//! A descriptor carries the subnormalization α (kept as an exact rational),
//! the ancilla count, the error bound ε and, at desk scale, an explicit
//! unitary whose top-left `rows × cols` block is M/α up to ε.

use std::path::Path;

use faer::{c64, Mat, MatRef};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dense::{matmul_naive, spectral_norm};
use crate::error::{invalid, HbsError, Result};
use crate::hbs::{HbsFactors, LevelDims};
use crate::sparse::SparseMatrix;
use crate::sparsify::sparsity_profile;

/// Largest system dimension for which explicit unitaries are built.
pub const PAYLOAD_GUARD: usize = 256;

/// Slack allowed when checking α ≥ ‖M‖₂ against a floating-point norm.
const NORM_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct EncodingDescriptor {
    /// Dimensions of the encoded matrix (the designated top-left block).
    pub rows: usize,
    pub cols: usize,
    pub alpha: BigRational,
    pub ancillas: u32,
    pub eps: f64,
    /// Explicit unitary; absent beyond the payload guard.
    pub payload: Option<Mat<c64>>,
    /// Set when a payload was requested but skipped by the guard.
    pub flagged: bool,
    /// Stored nonzeros an oracle for this encoding has to serve, if sparse.
    pub oracle_nnz: Option<usize>,
}

impl EncodingDescriptor {
    pub fn alpha_f64(&self) -> f64 {
        to_f64(&self.alpha)
    }

    /// (⟨0|⊗I) U (|0⟩⊗I), i.e. the top-left block of the payload.
    pub fn block(&self) -> Option<Mat<c64>> {
        self.payload
            .as_ref()
            .map(|u| u.as_ref().submatrix(0, 0, self.rows, self.cols).to_owned())
    }

    /// ‖M − α·block‖₂.
    pub fn extraction_error(&self, m: MatRef<'_, c64>) -> Result<f64> {
        let Some(b) = self.block() else {
            return invalid("descriptor has no payload");
        };
        if m.nrows() != self.rows || m.ncols() != self.cols {
            return invalid("matrix does not match the encoded block");
        }
        let a = self.alpha_f64();
        Ok(spectral_norm((m.to_owned() - Mat::from_fn(self.rows, self.cols, |i, j| b[(i, j)] * a)).as_ref()))
    }

    /// ‖U†U − I‖₂ of the payload.
    pub fn unitarity_residual(&self) -> Option<f64> {
        self.payload.as_ref().map(|u| {
            let g = u.adjoint() * u;
            let n = g.nrows();
            spectral_norm((g - Mat::<c64>::identity(n, n)).as_ref())
        })
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite float.
pub fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| HbsError::InvalidInput(format!("{x} is not finite")))
}

/// W diag(t) W† for a unitary W.
fn congruence(w: MatRef<'_, c64>, t: &[f64]) -> Mat<c64> {
    let n = w.nrows();
    Mat::from_fn(n, n, |i, j| {
        let mut acc = c64::new(0.0, 0.0);
        for (k, &tk) in t.iter().enumerate() {
            acc += w[(i, k)] * w[(j, k)].conj() * tk;
        }
        acc
    })
}

/// [[B, √(I−BB†)], [√(I−B†B), −B†]] for a contraction B. Both square roots
/// come from one SVD B = WΣV†, so B†√(I−BB†) = √(I−B†B)B† holds to roundoff
/// even when singular values sit at 1.
fn dilation_of(b: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let (m, n) = (b.nrows(), b.ncols());
    let mut u = Mat::<c64>::zeros(m + n, m + n);
    if m == 0 || n == 0 {
        for i in 0..m + n {
            u[(i, (i + n) % (m + n))] = c64::new(1.0, 0.0);
        }
        return Ok(u);
    }
    let svd = b.to_owned().svd().map_err(|_| HbsError::Singular { pivot: 0 })?;
    let sig = svd.S().column_vector();
    let comp = |k: usize| {
        let s = sig[k].re.clamp(0.0, 1.0);
        ((1.0 - s) * (1.0 + s)).sqrt()
    };
    let r = m.min(n);
    let tm: Vec<f64> = (0..m).map(|k| if k < r { comp(k) } else { 1.0 }).collect();
    let tn: Vec<f64> = (0..n).map(|k| if k < r { comp(k) } else { 1.0 }).collect();
    let sm = congruence(svd.U(), &tm);
    let sn = congruence(svd.V(), &tn);
    for i in 0..m {
        for j in 0..n {
            u[(i, j)] = b[(i, j)];
            u[(m + j, n + i)] = -b[(i, j)].conj();
        }
        for j in 0..m {
            u[(i, n + j)] = sm[(i, j)];
        }
    }
    for i in 0..n {
        for j in 0..n {
            u[(m + i, j)] = sn[(i, j)];
        }
    }
    Ok(u)
}

fn blank(rows: usize, cols: usize, alpha: BigRational, ancillas: u32, eps: f64) -> EncodingDescriptor {
    EncodingDescriptor { rows, cols, alpha, ancillas, eps, payload: None, flagged: false, oracle_nnz: None }
}

fn with_block(mut d: EncodingDescriptor, block: Option<Mat<c64>>) -> Result<EncodingDescriptor> {
    if let Some(b) = block {
        d.payload = Some(dilation_of(b.as_ref())?);
    }
    Ok(d)
}

/// Exact dilation of M/α, one ancilla. ε is the achieved roundoff.
pub fn dilate(m: MatRef<'_, c64>, alpha: f64) -> Result<EncodingDescriptor> {
    dilate_exact(m, &rational(alpha)?)
}

pub fn dilate_exact(m: MatRef<'_, c64>, alpha: &BigRational) -> Result<EncodingDescriptor> {
    let a = to_f64(alpha);
    if !(a > 0.0) {
        return invalid("alpha must be positive");
    }
    let norm = spectral_norm(m);
    if norm > a * (1.0 + NORM_SLACK) {
        return invalid(format!("alpha = {a} is below the spectral norm {norm}"));
    }
    let b = Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / a);
    let d = with_block(blank(m.nrows(), m.ncols(), alpha.clone(), 1, 0.0), Some(b))?;
    let eps = d.extraction_error(m)?;
    Ok(EncodingDescriptor { eps, ..d })
}

/// Sparse-oracle encoding with α = c_sp·√(s_r s_c).
pub fn encode_sparse(a: &SparseMatrix) -> Result<EncodingDescriptor> {
    let p = sparsity_profile(a);
    let alpha = p.c_sp * ((p.s_r * p.s_c) as f64).sqrt();
    encode_sparse_with(a, &rational(alpha)?, 0.0)
}

/// The column-norm bound c_sp·√(s_r s_c) as an exact rational.
pub fn sparse_alpha(a: &SparseMatrix) -> Result<BigRational> {
    let p = sparsity_profile(a);
    rational(p.c_sp * ((p.s_r * p.s_c) as f64).sqrt())
}

/// Encodes `a` at a prescribed α. With `inject > 0` the block holds
/// (A + ε·uv†)/(α + ε) for fixed unit vectors u, v, and the descriptor
/// reports α + ε and ε.
pub fn encode_sparse_with(a: &SparseMatrix, alpha: &BigRational, inject: f64) -> Result<EncodingDescriptor> {
    if a.iter().any(|(_, _, v)| !crate::dense::is_finite(v)) {
        return invalid("matrix has non-finite entries");
    }
    if !(inject >= 0.0) {
        return invalid("injected error must be non-negative");
    }
    let (m, n) = (a.n_rows(), a.n_cols());
    let alpha = if inject > 0.0 { alpha + rational(inject)? } else { alpha.clone() };
    if m.max(n) > PAYLOAD_GUARD {
        let mut d = blank(m, n, alpha, 1, inject);
        d.flagged = true;
        d.oracle_nnz = Some(a.nnz());
        return Ok(d);
    }
    let mut dense = a.to_dense();
    if inject > 0.0 {
        let (u, v) = (unit_vector(m), unit_vector(n));
        for i in 0..m {
            for j in 0..n {
                dense[(i, j)] += u[i] * v[j].conj() * inject;
            }
        }
    }
    let mut d = dilate_exact(dense.as_ref(), &alpha)?;
    if inject > 0.0 {
        let clean = a.to_dense();
        d.eps = d.extraction_error(clean.as_ref())?.max(inject);
    }
    d.oracle_nnz = Some(a.nnz());
    Ok(d)
}

/// Unit vector with slowly varying phases; fixed so runs are reproducible.
fn unit_vector(n: usize) -> Vec<c64> {
    if n == 0 {
        return Vec::new();
    }
    let s = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|i| c64::from_polar(s, 0.37 * i as f64))
        .collect()
}

/// Zero-pads the encoded block to `rows × cols`; α, a and ε are unchanged.
pub fn pad(d: &EncodingDescriptor, rows: usize, cols: usize) -> Result<EncodingDescriptor> {
    if rows < d.rows || cols < d.cols {
        return invalid("padding cannot shrink a block");
    }
    let block = d.block().map(|b| {
        Mat::from_fn(rows, cols, |i, j| if i < d.rows && j < d.cols { b[(i, j)] } else { c64::new(0.0, 0.0) })
    });
    with_block(EncodingDescriptor { rows, cols, payload: None, ..d.clone() }, block)
}

/// Product encoding: (αβ, a+b, α·ε_V + β·ε_U).
pub fn qmm(u: &EncodingDescriptor, v: &EncodingDescriptor) -> Result<EncodingDescriptor> {
    if u.cols != v.rows {
        return invalid(format!("cannot multiply {}x{} by {}x{}", u.rows, u.cols, v.rows, v.cols));
    }
    let eps = u.alpha_f64() * v.eps + v.alpha_f64() * u.eps;
    let mut d = blank(u.rows, v.cols, &u.alpha * &v.alpha, u.ancillas + v.ancillas, eps);
    d.flagged = u.flagged || v.flagged;
    let block = match (u.block(), v.block()) {
        (Some(a), Some(b)) => Some(matmul_naive(a.as_ref(), b.as_ref())),
        _ => None,
    };
    with_block(d, block)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrepPair {
    pub y: Vec<c64>,
    pub beta: f64,
    pub gamma: f64,
}

impl PrepPair {
    /// Exact preparation of y with β = ‖y‖₁.
    pub fn exact(y: Vec<c64>) -> Self {
        let beta = y.iter().map(|v| v.norm()).sum();
        Self { y, beta, gamma: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let l1: f64 = self.y.iter().map(|v| v.norm()).sum();
        if l1 > self.beta * (1.0 + NORM_SLACK) || !(self.gamma >= 0.0) {
            return invalid(format!("state preparation needs beta ≥ ‖y‖₁ = {l1} and gamma ≥ 0"));
        }
        Ok(())
    }

    /// Register size for m terms.
    pub fn qubits(&self) -> u32 {
        let m = self.y.len().max(1);
        usize::BITS - (m - 1).leading_zeros()
    }
}

/// Σ y_j A_j with heterogeneous α_j: α = Σ|y_j|α_j, a = max a_j + n,
/// ε = (max α_j)·γ + Σ|y_j|ε_j.
pub fn lcu(encs: &[EncodingDescriptor], prep: &PrepPair) -> Result<EncodingDescriptor> {
    prep.validate()?;
    if encs.is_empty() || encs.len() != prep.y.len() {
        return invalid(format!("{} encodings for {} coefficients", encs.len(), prep.y.len()));
    }
    let (rows, cols) = (encs[0].rows, encs[0].cols);
    if encs.iter().any(|e| e.rows != rows || e.cols != cols) {
        return invalid("LCU terms must encode blocks of equal size");
    }
    let mut alpha = BigRational::zero();
    for (e, y) in encs.iter().zip(&prep.y) {
        alpha += rational(y.norm())? * &e.alpha;
    }
    if encs.len() == 1 && prep.y[0] == c64::new(1.0, 0.0) {
        return Ok(encs[0].clone());
    }
    let amax = encs.iter().map(|e| e.alpha_f64()).fold(0.0, f64::max);
    let eps = amax * prep.gamma + encs.iter().zip(&prep.y).map(|(e, y)| y.norm() * e.eps).sum::<f64>();
    let ancillas = encs.iter().map(|e| e.ancillas).max().unwrap_or(0) + prep.qubits();
    let mut d = blank(rows, cols, alpha, ancillas, eps);
    d.flagged = encs.iter().any(|e| e.flagged);
    let block = if encs.iter().all(|e| e.payload.is_some()) {
        let a_out = d.alpha_f64();
        let mut acc = Mat::<c64>::zeros(rows, cols);
        for (e, y) in encs.iter().zip(&prep.y) {
            let w = *y * (e.alpha_f64() / a_out);
            let b = e.block().expect("payload checked");
            for j in 0..cols {
                for i in 0..rows {
                    acc[(i, j)] += b[(i, j)] * w;
                }
            }
        }
        Some(acc)
    } else {
        None
    };
    with_block(d, block)
}

/// Per-level subnormalizations: α^{(D)}_1..α^{(D)}_{λ+1} and
/// α^{(L)}_1..α^{(L)}_λ (α^{(R)} taken equal to α^{(L)}).
#[derive(Clone, Debug, PartialEq)]
pub struct FactorAlphas {
    pub alpha_d: Vec<BigRational>,
    pub alpha_l: Vec<BigRational>,
}

impl FactorAlphas {
    pub fn from_f64(alpha_d: &[f64], alpha_l: &[f64]) -> Result<Self> {
        let conv = |v: &[f64]| v.iter().map(|&x| rational(x)).collect::<Result<Vec<_>>>();
        let fa = Self { alpha_d: conv(alpha_d)?, alpha_l: conv(alpha_l)? };
        fa.check()?;
        Ok(fa)
    }

    pub fn lambda(&self) -> usize {
        self.alpha_l.len()
    }

    fn check(&self) -> Result<()> {
        if self.alpha_d.len() != self.alpha_l.len() + 1 {
            return invalid(format!(
                "need λ+1 diagonal and λ interpolation alphas, got {} and {}",
                self.alpha_d.len(),
                self.alpha_l.len()
            ));
        }
        if self.alpha_d.iter().chain(&self.alpha_l).any(|a| a.is_negative()) {
            return invalid("subnormalizations must be non-negative");
        }
        Ok(())
    }

    /// α^{(D)} = c_sp√(s_r s_c) of each D_l; α^{(L)}_l = max over L_l and R_l.
    pub fn of_factors(f: &HbsFactors) -> Result<Self> {
        let alpha_d = f.d.iter().map(sparse_alpha).collect::<Result<Vec<_>>>()?;
        let alpha_l = f
            .l
            .iter()
            .zip(&f.r)
            .map(|(l, r)| Ok(sparse_alpha(l)?.max(sparse_alpha(r)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { alpha_d, alpha_l })
    }
}

/// α_A = Σ_{l=1}^{λ+1} α^{(D)}_l Π_{m<l} (α^{(L)}_m)².
pub fn predict_alpha(fa: &FactorAlphas) -> Result<BigRational> {
    fa.check()?;
    let mut total = BigRational::zero();
    let mut prod = BigRational::one();
    for (l, ad) in fa.alpha_d.iter().enumerate() {
        total += ad * &prod;
        if l < fa.lambda() {
            prod *= &fa.alpha_l[l] * &fa.alpha_l[l];
        }
    }
    Ok(total)
}

/// α_{λ+1} = α^{(D)}_{λ+1}; α_l = α_{l+1}(α^{(L)}_l)² + α^{(D)}_l.
pub fn predict_alpha_recursive(fa: &FactorAlphas) -> Result<BigRational> {
    fa.check()?;
    let lam = fa.lambda();
    let mut a = fa.alpha_d[lam].clone();
    for l in (0..lam).rev() {
        a = a * &fa.alpha_l[l] * &fa.alpha_l[l] + &fa.alpha_d[l];
    }
    Ok(a)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsPrediction {
    /// The closed form as printed.
    pub closed_form: f64,
    /// Unrolled level recursion.
    pub recursion: f64,
}

impl EpsPrediction {
    pub fn max(&self) -> f64 {
        self.closed_form.max(self.recursion)
    }
}

/// Error of the recursive encoding with per-factor error ε and exact state
/// preparation.
pub fn predict_eps(fa: &FactorAlphas, eps: f64) -> Result<EpsPrediction> {
    Ok(EpsPrediction { closed_form: predict_eps_closed(fa, eps)?, recursion: predict_eps_recursive(fa, eps, 0.0)? })
}

/// [Σ_{l=1}^{λ} (2α^{(L)}_l Σ_{j=l}^{λ+1} α^{(D)}_j Π_{m<j}(α^{(L)}_m)² + 1) Π_{m<l}(α^{(L)}_m)²
///  + Π_{m≤λ}(α^{(L)}_m)²]·ε
pub fn predict_eps_closed(fa: &FactorAlphas, eps: f64) -> Result<f64> {
    fa.check()?;
    if !(eps >= 0.0) {
        return invalid("per-factor eps must be non-negative");
    }
    let lam = fa.lambda();
    let sq: Vec<BigRational> = fa.alpha_l.iter().map(|a| a * a).collect();
    // prefix[l] = Π_{m<l} (α^{(L)}_m)², 0-based
    let mut prefix = vec![BigRational::one()];
    for s in &sq {
        let next = prefix.last().unwrap() * s;
        prefix.push(next);
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let mut total = prefix[lam].clone();
    for l in 0..lam {
        let mut inner = BigRational::zero();
        for j in l..=lam {
            inner += &fa.alpha_d[j] * &prefix[j];
        }
        total += (&two * &fa.alpha_l[l] * inner + BigRational::one()) * &prefix[l];
    }
    Ok(to_f64(&(total * rational(eps)?)))
}

/// ε_{λ+1} = ε;
/// ε_l = α^{(L)}_l(α_{l+1}ε + α^{(L)}_l ε_{l+1}) + α_{l+1}α^{(L)}_l ε + ε
///       + max((α^{(L)}_l)²α_{l+1}, α^{(D)}_l)·γ.
pub fn predict_eps_recursive(fa: &FactorAlphas, eps: f64, gamma: f64) -> Result<f64> {
    fa.check()?;
    if !(eps >= 0.0) || !(gamma >= 0.0) {
        return invalid("eps and gamma must be non-negative");
    }
    let (e, g) = (rational(eps)?, rational(gamma)?);
    let lam = fa.lambda();
    let mut a_next = fa.alpha_d[lam].clone();
    let mut e_next = e.clone();
    for l in (0..lam).rev() {
        let al = &fa.alpha_l[l];
        let prod = &a_next * al * al;
        let stat = if prod > fa.alpha_d[l] { prod.clone() } else { fa.alpha_d[l].clone() };
        e_next = al * (&a_next * &e + al * &e_next) + &a_next * al * &e + &e + stat * &g;
        a_next = prod + &fa.alpha_d[l];
    }
    Ok(to_f64(&e_next))
}

/// Bounds α^{(D)}_1 ≤ 3^d n₁ c_sp, α^{(D)}_l ≤ (6^d−3^d) n_l c_sp and
/// α^{(L)}_l ≤ f√(k_l(n_l−k_l+1)) for the compressed levels 1..λ, using the
/// largest block size and rank of each level.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaBounds {
    pub alpha_d: Vec<f64>,
    pub alpha_l: Vec<f64>,
}

pub fn alpha_bounds(dims: &[LevelDims], d: u32, f: f64, c_sp: f64) -> AlphaBounds {
    let (three, six) = (3f64.powi(d as i32), 6f64.powi(d as i32));
    let mut alpha_d = Vec::new();
    let mut alpha_l = Vec::new();
    for (l, ld) in dims.iter().enumerate() {
        let n = ld.max_row_block.max(ld.max_col_block) as f64;
        alpha_d.push(if l == 0 { three * n * c_sp } else { (six - three) * n * c_sp });
        let side = |n: usize, k: usize| f * ((k * (n - k + 1)) as f64).sqrt();
        alpha_l.push(side(ld.max_row_block, ld.max_row_rank).max(side(ld.max_col_block, ld.max_col_rank)));
    }
    AlphaBounds { alpha_d, alpha_l }
}

/// Model subnormalizations for |x−y|^{−p} on a uniform line with unit finest
/// cells: α^{(D)}_1 = 3^d n₁, α^{(D)}_l = 2^d(6^d−3^d) r 2^{−(l−1)p},
/// α^{(L)} = f√(r(2^d r − r + 1)).
pub fn kernel_p_alphas(d: u32, f: f64, r: f64, n1: f64, p: f64, lambda: usize) -> Result<FactorAlphas> {
    let (two_d, three, six) = (2f64.powi(d as i32), 3f64.powi(d as i32), 6f64.powi(d as i32));
    let mut ad = vec![three * n1];
    for l in 2..=lambda + 1 {
        ad.push(two_d * (six - three) * r * 2f64.powf(-((l - 1) as f64) * p));
    }
    let al = vec![f * (r * (two_d * r - r + 1.0)).sqrt(); lambda];
    FactorAlphas::from_f64(&ad, &al)
}

/// 2^d(6^d−3^d) r (q^{λ+1} − q)/(q − 1) + 3^d n₁ with q = f²r(2^d r−r+1)/2^p.
pub fn kernel_p_bound(d: u32, f: f64, r: f64, n1: f64, p: f64, lambda: usize) -> f64 {
    let (two_d, three, six) = (2f64.powi(d as i32), 3f64.powi(d as i32), 6f64.powi(d as i32));
    let q = f * f * r * (two_d * r - r + 1.0) / 2f64.powf(p);
    let geo = if (q - 1.0).abs() < 1e-15 {
        lambda as f64
    } else {
        (q.powi(lambda as i32 + 1) - q) / (q - 1.0)
    };
    two_d * (six - three) * r * geo + three * n1
}

#[derive(Clone, Debug)]
pub struct RecursiveEncoding {
    pub descriptor: EncodingDescriptor,
    pub alphas: FactorAlphas,
    pub eps: EpsPrediction,
    /// ε attached to each factor encoding.
    pub per_factor_eps: f64,
    /// Error bound accumulated by the descriptor algebra itself.
    pub composed_eps: f64,
}

/// Bottom-up encoding A_{λ+1} = D_{λ+1}, A_l = L_l A_{l+1} R_l + D_l.
/// Every factor block is zero-padded to N × N. The returned descriptor
/// carries α_A in closed form and the larger of the two error predictions.
pub fn recursive_encode(f: &HbsFactors, per_factor_eps: f64) -> Result<RecursiveEncoding> {
    recursive_encode_with(f, per_factor_eps, true)
}

pub fn recursive_encode_with(f: &HbsFactors, per_factor_eps: f64, pad_blocks: bool) -> Result<RecursiveEncoding> {
    f.validate()?;
    if !(per_factor_eps >= 0.0) {
        return invalid("per-factor eps must be non-negative");
    }
    let n = f.n;
    let lam = f.depth();
    let base = FactorAlphas::of_factors(f)?;
    let inj = |x: &BigRational| -> Result<BigRational> {
        if per_factor_eps > 0.0 { Ok(x + rational(per_factor_eps)?) } else { Ok(x.clone()) }
    };
    let alphas = FactorAlphas {
        alpha_d: base.alpha_d.iter().map(inj).collect::<Result<_>>()?,
        alpha_l: base.alpha_l.iter().map(inj).collect::<Result<_>>()?,
    };
    let enc = |m: &SparseMatrix, alpha: &BigRational| -> Result<EncodingDescriptor> {
        let mut d = if n <= PAYLOAD_GUARD {
            encode_sparse_with(m, alpha, per_factor_eps)?
        } else {
            let mut d = blank(m.n_rows(), m.n_cols(), inj(alpha)?, 1, per_factor_eps);
            d.flagged = true;
            d.oracle_nnz = Some(m.nnz());
            d
        };
        if pad_blocks {
            d = pad(&d, n, n)?;
        }
        Ok(d)
    };
    let mut cur = enc(&f.d[lam], &base.alpha_d[lam])?;
    let mut eps_used: f64 = cur.eps;
    for l in (0..lam).rev() {
        let ul = enc(&f.l[l], &base.alpha_l[l])?;
        let ur = enc(&f.r[l], &base.alpha_l[l])?;
        let ud = enc(&f.d[l], &base.alpha_d[l])?;
        eps_used = eps_used.max(ul.eps).max(ur.eps).max(ud.eps);
        let prod = qmm(&ul, &qmm(&cur, &ur)?)?;
        cur = lcu(&[prod, ud], &PrepPair::exact(vec![c64::new(1.0, 0.0); 2]))?;
    }
    let alpha_a = predict_alpha(&alphas)?;
    debug_assert_eq!(alpha_a, cur.alpha);
    let eps = predict_eps(&alphas, eps_used)?;
    let composed_eps = cur.eps;
    cur.eps = eps.max().max(composed_eps);
    Ok(RecursiveEncoding { descriptor: cur, alphas, eps, per_factor_eps: eps_used, composed_eps })
}

/// Writes `alpha ancillas eps [payload_file rows cols]`; α is written as an
/// exact fraction and the payload, if any, as a fully populated triplet file.
pub fn write_descriptor(d: &EncodingDescriptor, dir: impl AsRef<Path>, name: &str) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut line = format!("{} {} {:.17e}", d.alpha, d.ancillas, d.eps);
    if let Some(u) = &d.payload {
        let file = format!("{name}.payload.txt");
        std::fs::write(dir.join(&file), dense_triplets(u))?;
        line.push_str(&format!(" {file} {} {}", d.rows, d.cols));
    } else {
        line.push_str(&format!(" - {} {}", d.rows, d.cols));
    }
    if d.flagged {
        line.push_str(" flagged");
    }
    line.push('\n');
    std::fs::write(dir.join(format!("{name}.descriptor.txt")), line)?;
    Ok(())
}

pub fn read_descriptor(dir: impl AsRef<Path>, name: &str) -> Result<EncodingDescriptor> {
    let dir = dir.as_ref();
    let text = std::fs::read_to_string(dir.join(format!("{name}.descriptor.txt")))?;
    let bad = |msg: &str| HbsError::Parse { line: 1, msg: msg.to_string() };
    let f: Vec<&str> = text.split_whitespace().collect();
    if f.len() < 6 {
        return Err(bad("expected alpha ancillas eps payload rows cols"));
    }
    let alpha: BigRational = f[0].parse().map_err(|_| bad("bad alpha"))?;
    let ancillas: u32 = f[1].parse().map_err(|_| bad("bad ancilla count"))?;
    let eps: f64 = f[2].parse().map_err(|_| bad("bad eps"))?;
    let rows: usize = f[4].parse().map_err(|_| bad("bad rows"))?;
    let cols: usize = f[5].parse().map_err(|_| bad("bad cols"))?;
    let payload = if f[3] == "-" {
        None
    } else {
        Some(SparseMatrix::read(dir.join(f[3]))?.to_dense())
    };
    Ok(EncodingDescriptor { rows, cols, alpha, ancillas, eps, payload, flagged: f.get(6) == Some(&"flagged"), oracle_nnz: None })
}

fn dense_triplets(u: &Mat<c64>) -> String {
    let (r, c) = (u.nrows(), u.ncols());
    let mut s = format!("%%sparse complex {r} {c} {}\n", r * c);
    for i in 0..r {
        for j in 0..c {
            let v = u[(i, j)];
            s.push_str(&format!("{} {} {:.16e} {:.16e}\n", i + 1, j + 1, v.re, v.im));
        }
    }
    s
}
