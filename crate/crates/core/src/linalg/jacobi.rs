//! One-sided (Hestenes) Jacobi SVD.
//!
//! nalgebra's bidiagonal SVD loses accuracy on some small complex inputs
//! (singular values off in the third digit, "null" right vectors with a
//! visible image). Every decision in this crate hangs on telling a 1e-15
//! singular value from a 1e-1 one, so we use Jacobi instead: it is slow for
//! big matrices but ours are at most a dozen wide, and it computes small
//! singular values and the right vectors to full relative accuracy.

use num_complex::Complex64;

use super::CMatrix;

const MAX_SWEEPS: usize = 80;

/// Thin SVD of a tall (`m ≥ n`) matrix: `(u m×n, s, v n×n)`, unsorted.
fn tall(a: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let n = a.ncols();
    let mut u = a.clone();
    let mut v = CMatrix::identity(n, n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = u.column(i).norm_squared();
                let beta = u.column(j).norm_squared();
                let gamma = u.column(i).dotc(&u.column(j));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase = (gamma / g).conj();
                rotate(&mut u, i, j, c, s, phase);
                rotate(&mut v, i, j, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let s: Vec<f64> = (0..n).map(|k| u.column(k).norm()).collect();
    (u, s, v)
}

/// Columns `i`, `j` ← `c·x_i − s·φx_j`, `s·x_i + c·φx_j`.
fn rotate(m: &mut CMatrix, i: usize, j: usize, c: f64, s: f64, phase: Complex64) {
    for r in 0..m.nrows() {
        let xi = m[(r, i)];
        let xj = m[(r, j)] * phase;
        m[(r, i)] = xi * c - xj * s;
        m[(r, j)] = xi * s + xj * c;
    }
}

/// Orthonormalize the columns of `u` in order, replacing columns that
/// collapse (zero singular values) with directions from the complement.
fn orthonormalize(u: &mut CMatrix) {
    let (m, p) = u.shape();
    for k in 0..p {
        let mut col = u.column(k).into_owned();
        for _ in 0..2 {
            for j in 0..k {
                let proj = u.column(j).dotc(&col);
                col -= u.column(j) * proj;
            }
        }
        let mut norm = col.norm();
        if norm < 1e-8 {
            // Pick the canonical vector least covered by the columns so far.
            let mut best = (0, -1.0);
            for e in 0..m {
                let covered: f64 = (0..k).map(|j| u[(e, j)].norm_sqr()).sum();
                if 1.0 - covered > best.1 {
                    best = (e, 1.0 - covered);
                }
            }
            col.fill(Complex64::new(0.0, 0.0));
            col[best.0] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for j in 0..k {
                    let proj = u.column(j).dotc(&col);
                    col -= u.column(j) * proj;
                }
            }
            norm = col.norm();
        }
        u.set_column(k, &(col / Complex64::new(norm, 0.0)));
    }
}

/// Thin SVD sorted by descending singular value: `(u m×p, s, v n×p)` with
/// `p = min(m, n)`.
pub(super) fn thin_svd(a: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return (CMatrix::zeros(m, 0), Vec::new(), CMatrix::zeros(n, 0));
    }
    if m < n {
        let (u, s, v) = thin_svd(&a.adjoint());
        return (v, s, u);
    }
    let (w, s, v) = tall(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let mut us = CMatrix::zeros(m, n);
    let mut vs = CMatrix::zeros(n, n);
    let mut ss = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = s[src];
        if sigma > 0.0 {
            us.set_column(dst, &(w.column(src) / Complex64::new(sigma, 0.0)));
        }
        vs.set_column(dst, &v.column(src));
        ss.push(sigma);
    }
    orthonormalize(&mut us);
    (us, ss, vs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::complex_gaussian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check(a: &CMatrix) {
        let (u, s, v) = thin_svd(a);
        let p = s.len();
        let sig = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            p,
            s.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        let scale = a.norm().max(1.0);
        assert!((&u * sig * v.adjoint() - a).norm() <= 1e-13 * scale);
        assert!((u.adjoint() * &u - CMatrix::identity(p, p)).norm() <= 1e-12);
        assert!((v.adjoint() * &v - CMatrix::identity(p, p)).norm() <= 1e-12);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        // Each right vector maps to its singular value, small ones included.
        for k in 0..p {
            assert!(((a * v.column(k)).norm() - s[k]).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn random_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (m, n) in [(1, 1), (3, 2), (2, 3), (6, 6), (2, 7), (9, 4)] {
            check(&complex_gaussian(&mut rng, m, n, 1.0));
        }
    }

    #[test]
    fn rank_one_wide_matrix() {
        // The shape that tripped the bidiagonal SVD.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = complex_gaussian(&mut rng, 2, 1, 1.0);
        let y = complex_gaussian(&mut rng, 3, 1, 1.0);
        let a = &x * y.adjoint();
        check(&a);
        let (_, s, v) = thin_svd(&a);
        assert!(s[1] <= 1e-14 * s[0]);
        assert!((&a * v.column(1)).norm() <= 1e-14 * s[0]);
    }

    #[test]
    fn zero_and_repeated_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = complex_gaussian(&mut rng, 4, 1, 1.0);
        let mut a = CMatrix::zeros(4, 3);
        a.set_column(0, &c.column(0));
        a.set_column(2, &c.column(0));
        check(&a);
        check(&CMatrix::zeros(3, 2));
    }
}
