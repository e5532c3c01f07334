//! Dense complex linear algebra: SVD-based rank, null spaces, orthogonal
//! complements and the subspace difference dimension used throughout the
//! precoder construction.
//!
//! Every routine accepts degenerate shapes (zero rows or zero columns) and
//! returns structurally consistent empty results instead of failing.

mod gsvd;
mod jacobi;

pub use gsvd::{gsvd, gsvd_dims, gsvd_with_tol, GsvdDims, GsvdResult};

use jacobi::thin_svd;

use nalgebra::{DMatrix, QR};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Relative tolerance used for rank decisions on matrices whose deficiency
/// is structural (stacked bases, intersections). Generic nonzero singular
/// values of the small random matrices handled here sit many orders of
/// magnitude above it.
pub const SUBSPACE_RTOL: f64 = 1e-10;

/// Full singular value decomposition `a = u · diag(s) · vᴴ`.
///
/// `u` is `m×m`, `v` is `n×n`, both unitary; `singular_values` has
/// `min(m, n)` entries sorted in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// Number of singular values strictly above `tol`.
    pub fn rank_above(&self, tol: f64) -> usize {
        self.singular_values.iter().take_while(|&&s| s > tol).count()
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Rebuild `u · Σ · vᴴ`, mostly useful in tests.
    pub fn reconstruct(&self) -> CMatrix {
        let (m, n) = (self.u.nrows(), self.v.nrows());
        let mut sigma = CMatrix::zeros(m, n);
        for (i, &s) in self.singular_values.iter().enumerate() {
            sigma[(i, i)] = Complex64::new(s, 0.0);
        }
        &self.u * sigma * self.v.adjoint()
    }
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Extend the orthonormal columns of `q` (`n×p`) to a full unitary `n×n`.
fn complete_unitary(q: &CMatrix) -> CMatrix {
    let (n, p) = q.shape();
    if p >= n {
        return q.columns(0, n).into_owned();
    }
    let mut stacked = CMatrix::zeros(n, p + n);
    stacked.view_mut((0, 0), (n, p)).copy_from(q);
    stacked.view_mut((0, p), (n, n)).fill_with_identity();
    let extra = QR::new(stacked).q();
    let mut full = CMatrix::zeros(n, n);
    full.view_mut((0, 0), (n, p)).copy_from(q);
    full.view_mut((0, p), (n, n - p))
        .copy_from(&extra.columns(p, n - p));
    full
}

pub fn svd(a: &CMatrix) -> Svd {
    let (u, s, v) = thin_svd(a);
    Svd {
        u: complete_unitary(&u),
        singular_values: s,
        v: complete_unitary(&v),
    }
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Vec::new();
    }
    thin_svd(a).1
}

/// The standard rank-revealing threshold `max(m, n) · ε · σ_max`.
pub fn default_rank_tol(a: &CMatrix, sigma_max: f64) -> f64 {
    let (m, n) = a.shape();
    m.max(n) as f64 * f64::EPSILON * sigma_max
}

pub fn numeric_rank(a: &CMatrix) -> usize {
    let s = singular_values(a);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    let tol = default_rank_tol(a, smax);
    s.iter().filter(|&&x| x > tol).count()
}

/// Rank counting singular values above `rtol · σ_max`.
pub fn rank_rtol(a: &CMatrix, rtol: f64) -> usize {
    let s = singular_values(a);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rtol * smax).count()
}

/// Rank counting singular values above an absolute threshold.
pub fn rank_abs(a: &CMatrix, tol: f64) -> usize {
    singular_values(a).iter().filter(|&&x| x > tol).count()
}

fn rank_of(svd: &Svd, a: &CMatrix, rtol: Option<f64>) -> usize {
    let smax = svd.sigma_max();
    if smax == 0.0 {
        return 0;
    }
    let tol = match rtol {
        Some(r) => r * smax,
        None => default_rank_tol(a, smax),
    };
    svd.rank_above(tol)
}

/// Γ(A): orthonormal basis of `null(a)`, one column per missing rank.
pub fn null_basis(a: &CMatrix) -> CMatrix {
    null_basis_impl(a, None)
}

/// [`null_basis`] with a relative rank tolerance.
pub fn null_basis_rtol(a: &CMatrix, rtol: f64) -> CMatrix {
    null_basis_impl(a, Some(rtol))
}

fn null_basis_impl(a: &CMatrix, rtol: Option<f64>) -> CMatrix {
    let n = a.ncols();
    if a.nrows() == 0 || n == 0 {
        return identity(n);
    }
    let dec = svd(a);
    let r = rank_of(&dec, a, rtol);
    dec.v.columns(r, n - r).into_owned()
}

/// A^⊥: orthonormal basis of `null(aᴴ)`, the complement of `span(a)` in
/// the column space `C^rows`.
///
/// The Γ^⊥(X) construction (complement of `null(X)` inside the domain, i.e.
/// the row space of X) is `perp_basis(&null_basis(x))`; see [`row_space_basis`].
pub fn perp_basis(a: &CMatrix) -> CMatrix {
    null_basis(&a.adjoint())
}

pub fn perp_basis_rtol(a: &CMatrix, rtol: f64) -> CMatrix {
    null_basis_rtol(&a.adjoint(), rtol)
}

/// Γ^⊥(X): orthonormal basis of the orthogonal complement of `null(x)`.
pub fn row_space_basis(x: &CMatrix) -> CMatrix {
    perp_basis(&null_basis(x))
}

/// Orthonormal basis of `span(a)`.
pub fn orth_basis(a: &CMatrix) -> CMatrix {
    orth_basis_impl(a, None)
}

pub fn orth_basis_rtol(a: &CMatrix, rtol: f64) -> CMatrix {
    orth_basis_impl(a, Some(rtol))
}

fn orth_basis_impl(a: &CMatrix, rtol: Option<f64>) -> CMatrix {
    let m = a.nrows();
    if m == 0 || a.ncols() == 0 {
        return CMatrix::zeros(m, 0);
    }
    let (u, s, _) = thin_svd(a);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return CMatrix::zeros(m, 0);
    }
    let tol = match rtol {
        Some(r) => r * smax,
        None => default_rank_tol(a, smax),
    };
    let r = s.iter().filter(|&&x| x > tol).count();
    u.columns(0, r).into_owned()
}

/// Orthonormal basis of `span(a)` keeping singular values above an
/// absolute threshold. Meant for inputs with orthonormal or unit-norm
/// columns, where "nothing left" must not be mistaken for full rank.
pub fn orth_basis_abs(a: &CMatrix, tol: f64) -> CMatrix {
    let m = a.nrows();
    if m == 0 || a.ncols() == 0 {
        return CMatrix::zeros(m, 0);
    }
    let (u, s, _) = thin_svd(a);
    let r = s.iter().filter(|&&x| x > tol).count();
    u.columns(0, r).into_owned()
}

/// Γ^⊥(X) with a relative rank tolerance.
pub fn row_space_basis_rtol(x: &CMatrix, rtol: f64) -> CMatrix {
    perp_basis_rtol(&null_basis_rtol(x, rtol), rtol)
}

/// Moore–Penrose pseudo-inverse with a relative cutoff.
pub fn pinv(a: &CMatrix, rtol: f64) -> CMatrix {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return CMatrix::zeros(n, m);
    }
    let (u, s, v) = thin_svd(a);
    let smax = s[0];
    let mut out = CMatrix::zeros(n, m);
    for (i, &si) in s.iter().enumerate() {
        if smax > 0.0 && si > rtol * smax {
            let scale = Complex64::new(1.0 / si, 0.0);
            out += v.column(i) * u.column(i).adjoint() * scale;
        }
    }
    out
}

pub fn spectral_norm(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Horizontal concatenation `[a b]`.
pub fn hstack(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "cannot stack {}x{} beside {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let mut out = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    Ok(out)
}

/// Same as [`hstack`] for a list of blocks sharing a row count.
pub fn hstack_all(rows: usize, blocks: &[&CMatrix]) -> Result<CMatrix> {
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        if b.nrows() != rows {
            return Err(Error::DimensionMismatch(format!(
                "block with {} rows in a {}-row stack",
                b.nrows(),
                rows
            )));
        }
        out.view_mut((0, at), b.shape()).copy_from(b);
        at += b.ncols();
    }
    Ok(out)
}

/// dim{span(a) \ span(b)}, read as `rank([a b]) − rank(b)`: the number of
/// dimensions `a` adds outside `span(b)`.
pub fn dim_diff(a: &CMatrix, b: &CMatrix) -> Result<usize> {
    let ab = hstack(a, b)?;
    Ok(numeric_rank(&ab) - numeric_rank(b).min(numeric_rank(&ab)))
}

/// [`dim_diff`] with one absolute threshold applied to both ranks, for
/// inputs whose scale is known (see `precoder::sdof`).
pub fn dim_diff_abs(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<usize> {
    let ab = hstack(a, b)?;
    let r_ab = rank_abs(&ab, tol);
    Ok(r_ab - rank_abs(b, tol).min(r_ab))
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Columns scaled to unit norm; all-zero columns stay zero.
pub fn normalize_columns(a: &CMatrix) -> CMatrix {
    let mut out = a.clone();
    for mut col in out.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col.unscale_mut(n);
        }
    }
    out
}
