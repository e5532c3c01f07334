//! Generalized SVD of a matrix pair sharing a row space, built from the
//! three pieces of `span(A) + span(B)`: the part only `A` reaches, the
//! intersection, and the part only `B` reaches.
//!
//! For `A` (`N×M`) and `B` (`N×K`) the result satisfies
//!
//! ```text
//! A·[Ψ11 Ψ12 Ψ13] = [0, X2·Λ1, X3]        widths (M−s−r, s, r)
//! B·[Ψ21 Ψ22 Ψ23] = [X1, X2·Λ2, 0]        widths (p, s, K−s−p)
//! ```
//!
//! with `Ψ1`, `Ψ2` unitary, `Λ1² + Λ2² = I` and `X = [X1 X2 X3]` of full
//! column rank `k`.

use nalgebra::linalg::{Cholesky, SymmetricEigen};
use nalgebra::DVector;
use num_complex::Complex64;

use super::{
    hstack, null_basis_rtol, orth_basis_rtol, pinv, rank_rtol, CMatrix, SUBSPACE_RTOL,
};
use crate::error::{Error, Result};

/// Subspace dimensions of a GSVD: `k` total, `p` exclusive to `B`, `r`
/// exclusive to `A`, `s` shared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GsvdDims {
    pub k: usize,
    pub p: usize,
    pub r: usize,
    pub s: usize,
}

impl GsvdDims {
    /// Dimensions expected for generic full-rank inputs.
    pub fn generic(n: usize, m: usize, k_cols: usize) -> Self {
        let k = (m + k_cols).min(n);
        let p = k - m.min(n);
        let r = k - k_cols.min(n);
        let s = (m.min(n) + k_cols.min(n)).saturating_sub(n);
        GsvdDims { k, p, r, s }
    }
}

#[derive(Debug, Clone)]
pub struct GsvdResult {
    pub psi1: CMatrix,
    pub psi2: CMatrix,
    /// Diagonal of Λ1 (`s` entries, all in (0, 1)).
    pub lambda1: Vec<f64>,
    /// Diagonal of Λ2.
    pub lambda2: Vec<f64>,
    pub x: CMatrix,
    pub dims: GsvdDims,
}

impl GsvdResult {
    fn m(&self) -> usize {
        self.psi1.ncols()
    }

    fn kb(&self) -> usize {
        self.psi2.ncols()
    }

    /// Null space of `A`.
    pub fn psi11(&self) -> CMatrix {
        let GsvdDims { s, r, .. } = self.dims;
        self.psi1.columns(0, self.m() - s - r).into_owned()
    }

    /// Directions of `A` landing in the intersection.
    pub fn psi12(&self) -> CMatrix {
        let GsvdDims { s, r, .. } = self.dims;
        self.psi1.columns(self.m() - s - r, s).into_owned()
    }

    /// Directions of `A` landing outside `span(B)`.
    pub fn psi13(&self) -> CMatrix {
        let r = self.dims.r;
        self.psi1.columns(self.m() - r, r).into_owned()
    }

    pub fn psi21(&self) -> CMatrix {
        self.psi2.columns(0, self.dims.p).into_owned()
    }

    pub fn psi22(&self) -> CMatrix {
        self.psi2.columns(self.dims.p, self.dims.s).into_owned()
    }

    /// Null space of `B`.
    pub fn psi23(&self) -> CMatrix {
        let GsvdDims { p, s, .. } = self.dims;
        self.psi2.columns(p + s, self.kb() - p - s).into_owned()
    }

    pub fn x1(&self) -> CMatrix {
        self.x.columns(0, self.dims.p).into_owned()
    }

    pub fn x2(&self) -> CMatrix {
        self.x.columns(self.dims.p, self.dims.s).into_owned()
    }

    pub fn x3(&self) -> CMatrix {
        self.x
            .columns(self.dims.p + self.dims.s, self.dims.r)
            .into_owned()
    }

    pub fn lambda1_matrix(&self) -> CMatrix {
        diag(&self.lambda1)
    }

    pub fn lambda2_matrix(&self) -> CMatrix {
        diag(&self.lambda2)
    }

    /// Largest of the two reconstruction residuals, relative to the input
    /// norms.
    pub fn reconstruction_error(&self, a: &CMatrix, b: &CMatrix) -> f64 {
        let n = self.x.nrows();
        let GsvdDims { s, r, p, .. } = self.dims;
        let m = self.m();
        let kb = self.kb();

        let mut lhs_a = CMatrix::zeros(n, m);
        lhs_a
            .view_mut((0, m - s - r), (n, s))
            .copy_from(&(self.x2() * self.lambda1_matrix()));
        lhs_a.view_mut((0, m - r), (n, r)).copy_from(&self.x3());

        let mut lhs_b = CMatrix::zeros(n, kb);
        lhs_b.view_mut((0, 0), (n, p)).copy_from(&self.x1());
        lhs_b
            .view_mut((0, p), (n, s))
            .copy_from(&(self.x2() * self.lambda2_matrix()));

        let ea = (a * &self.psi1 - lhs_a).norm() / a.norm().max(f64::MIN_POSITIVE);
        let eb = (b * &self.psi2 - lhs_b).norm() / b.norm().max(f64::MIN_POSITIVE);
        let ea = if a.norm() == 0.0 { 0.0 } else { ea };
        let eb = if b.norm() == 0.0 { 0.0 } else { eb };
        ea.max(eb)
    }

    /// `‖Λ1² + Λ2² − I‖`.
    pub fn normalization_error(&self) -> f64 {
        self.lambda1
            .iter()
            .zip(&self.lambda2)
            .map(|(l1, l2)| (l1 * l1 + l2 * l2 - 1.0).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

fn diag(v: &[f64]) -> CMatrix {
    let mut d = CMatrix::zeros(v.len(), v.len());
    for (i, &x) in v.iter().enumerate() {
        d[(i, i)] = Complex64::new(x, 0.0);
    }
    d
}

pub fn gsvd(a: &CMatrix, b: &CMatrix) -> Result<GsvdResult> {
    gsvd_with_tol(a, b, SUBSPACE_RTOL)
}

/// [`gsvd`] with an explicit relative rank tolerance.
pub fn gsvd_with_tol(a: &CMatrix, b: &CMatrix, rtol: f64) -> Result<GsvdResult> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "gsvd operands have {} and {} rows",
            a.nrows(),
            b.nrows()
        )));
    }
    let n = a.nrows();
    let (m, kb) = (a.ncols(), b.ncols());

    let qa = orth_basis_rtol(a, rtol);
    let qb = orth_basis_rtol(b, rtol);
    let (ra, rb) = (qa.ncols(), qb.ncols());

    // span(A) ∩ span(B) from the null space of [Qa, −Qb].
    let stacked = hstack(&qa, &(-&qb))?;
    let z = null_basis_rtol(&stacked, rtol);
    let w = if z.ncols() == 0 {
        CMatrix::zeros(n, 0)
    } else {
        orth_basis_rtol(&(&qa * z.rows(0, ra)), rtol)
    };
    let s = w.ncols();

    let psi11 = null_basis_rtol(a, rtol);
    let psi23 = null_basis_rtol(b, rtol);
    let (psi12, psi22, x2, lambda1, lambda2) = shared_block(a, b, &w, rtol)?;

    let psi13 = null_basis_rtol(&hstack(&psi11, &psi12)?.adjoint(), rtol);
    let psi21 = null_basis_rtol(&hstack(&psi22, &psi23)?.adjoint(), rtol);
    if psi11.ncols() + s + psi13.ncols() != m || psi21.ncols() + s + psi23.ncols() != kb {
        return Err(Error::InternalInconsistency(format!(
            "gsvd block widths do not partition the domains (ranks {ra}, {rb}, shared {s})"
        )));
    }

    let x1 = b * &psi21;
    let x3 = a * &psi13;
    let dims = GsvdDims {
        k: ra + rb - s,
        p: psi21.ncols(),
        r: psi13.ncols(),
        s,
    };

    Ok(GsvdResult {
        psi1: super::hstack_all(m, &[&psi11, &psi12, &psi13])?,
        psi2: super::hstack_all(kb, &[&psi21, &psi22, &psi23])?,
        lambda1,
        lambda2,
        x: super::hstack_all(n, &[&x1, &x2, &x3])?,
        dims,
    })
}

type SharedBlock = (CMatrix, CMatrix, CMatrix, Vec<f64>, Vec<f64>);

/// Orthonormal preimages of the intersection basis `w` under `A` and `B`
/// whose images agree up to the diagonal scalings Λ1, Λ2.
fn shared_block(a: &CMatrix, b: &CMatrix, w: &CMatrix, rtol: f64) -> Result<SharedBlock> {
    let s = w.ncols();
    let (n, m, kb) = (a.nrows(), a.ncols(), b.ncols());
    if s == 0 {
        return Ok((
            CMatrix::zeros(m, 0),
            CMatrix::zeros(kb, 0),
            CMatrix::zeros(n, 0),
            Vec::new(),
            Vec::new(),
        ));
    }
    let ya = pinv(a, rtol) * w;
    let yb = pinv(b, rtol) * w;
    let sa = ya.adjoint() * &ya;
    let sb = yb.adjoint() * &yb;

    let chol = Cholesky::new(sb).ok_or_else(|| {
        Error::InternalInconsistency("shared-block Gram matrix is not positive definite".into())
    })?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .solve_lower_triangular(&CMatrix::identity(s, s))
        .ok_or_else(|| Error::InternalInconsistency("singular Cholesky factor".into()))?;
    let mut core = &l_inv * sa * l_inv.adjoint();
    // Symmetrize so the Hermitian eigen-solver sees an exactly Hermitian input.
    core = (&core + core.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(core);
    let c0 = l_inv.adjoint() * &eig.eigenvectors;

    let mut t = DVector::<Complex64>::zeros(s);
    let mut lambda1 = Vec::with_capacity(s);
    let mut lambda2 = Vec::with_capacity(s);
    for (j, &dj) in eig.eigenvalues.iter().enumerate() {
        if dj <= 0.0 {
            return Err(Error::InternalInconsistency(
                "non-positive generalized eigenvalue in gsvd".into(),
            ));
        }
        let t2 = 1.0 / dj + 1.0;
        t[j] = Complex64::new(t2.sqrt(), 0.0);
        lambda1.push(1.0 / (t2 * dj).sqrt());
        lambda2.push(1.0 / t2.sqrt());
    }
    let c = &c0 * CMatrix::from_diagonal(&t);
    let psi12 = &ya * &c * diag(&lambda1);
    let psi22 = &yb * &c * diag(&lambda2);
    let x2 = w * c;
    Ok((psi12, psi22, x2, lambda1, lambda2))
}

/// Rank-based dimensions without building the factors.
pub fn gsvd_dims(a: &CMatrix, b: &CMatrix, rtol: f64) -> Result<GsvdDims> {
    let ra = rank_rtol(a, rtol);
    let rb = rank_rtol(b, rtol);
    let k = rank_rtol(&hstack(a, b)?, rtol);
    let s = ra + rb - k;
    Ok(GsvdDims {
        k,
        p: rb - s,
        r: ra - s,
        s,
    })
}
