//! Finite-SNR secrecy rates and high-SNR slope fitting.
//!
//! Channels are already scaled by the noise standard deviation, so every
//! expression below uses unit noise. Rates are in bits per channel use.

use nalgebra::Cholesky;
use serde::Serialize;

use crate::channel::{dbm_to_watts, ChannelSet};
use crate::error::{Error, Result};
use crate::linalg::{identity, CMatrix};
use num_complex::Complex64;

/// Power-loaded transmit matrices: `Q_a = V_a V_aᴴ`, `Q_b = V_b V_bᴴ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitPair {
    pub v_a: CMatrix,
    pub v_b: CMatrix,
}

impl TransmitPair {
    pub fn silent(na_t: usize, nb_t: usize) -> Self {
        TransmitPair {
            v_a: CMatrix::zeros(na_t, 0),
            v_b: CMatrix::zeros(nb_t, 0),
        }
    }

    /// Same signals with Alice and Bob exchanged.
    pub fn swapped(&self) -> Self {
        TransmitPair {
            v_a: self.v_b.clone(),
            v_b: self.v_a.clone(),
        }
    }

    /// Multiply every column by `√factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = Complex64::new(factor.sqrt(), 0.0);
        TransmitPair {
            v_a: &self.v_a * s,
            v_b: &self.v_b * s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub power_dbm: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub r_e_a: f64,
    pub r_e_b: f64,
    pub rs_a: f64,
    pub rs_b: f64,
}

impl RatePoint {
    pub fn rs_sum(&self) -> f64 {
        self.rs_a + self.rs_b
    }
}

/// `H Q Hᴴ` for `Q = V Vᴴ`, kept Hermitian.
fn gram(h: &CMatrix, v: &CMatrix, scale: f64) -> CMatrix {
    let x = h * v;
    let g = &x * x.adjoint() * Complex64::new(scale, 0.0);
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `log2 |I + X|` for Hermitian PSD `X`.
fn log2det_shifted(x: &CMatrix) -> f64 {
    let n = x.nrows();
    if n == 0 {
        return 0.0;
    }
    let m = identity(n) + x;
    match Cholesky::new(m.clone()) {
        Some(c) => {
            let l = c.l();
            (0..n).map(|i| 2.0 * l[(i, i)].re.log2()).sum()
        }
        // I + X is positive definite in exact arithmetic; fall back to the
        // eigenvalues if rounding spoils the factorization.
        None => m
            .symmetric_eigenvalues()
            .iter()
            .map(|&e| e.max(f64::MIN_POSITIVE).log2())
            .sum(),
    }
}

/// `log2|I + (I+B)^{-1}A| = log2|I+A+B| − log2|I+B|`.
fn log2_sinr(signal: &CMatrix, interference: &CMatrix) -> f64 {
    let v = log2det_shifted(&(signal + interference)) - log2det_shifted(interference);
    v.max(0.0)
}

/// Legitimate and eavesdropper rates of both links.
///
/// `rho` scales residual self-interference at the legitimate receivers.
/// Eve has no self-interference, so her rates do not depend on `rho`.
pub fn rates(ch: &ChannelSet, pair: &TransmitPair, rho: f64) -> RatePoint {
    let r_a = log2_sinr(&gram(&ch.h_ba, &pair.v_a, 1.0), &gram(&ch.h_bb, &pair.v_b, rho));
    let r_b = log2_sinr(&gram(&ch.h_ab, &pair.v_b, 1.0), &gram(&ch.h_aa, &pair.v_a, rho));
    let eve_a = gram(&ch.g_a, &pair.v_a, 1.0);
    let eve_b = gram(&ch.g_b, &pair.v_b, 1.0);
    let r_e_a = log2_sinr(&eve_a, &eve_b);
    let r_e_b = log2_sinr(&eve_b, &eve_a);
    let per_side = |v: &CMatrix| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let p = per_side(&pair.v_a).max(per_side(&pair.v_b));
    RatePoint {
        power_dbm: 10.0 * p.log10() + 30.0,
        r_a,
        r_b,
        r_e_a,
        r_e_b,
        rs_a: (r_a - r_e_a).max(0.0),
        rs_b: (r_b - r_e_b).max(0.0),
    }
}

fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Least-squares slopes of `rs_a`, `rs_b` against `log2 P` over the upper
/// half of `grid_dbm`.
///
/// `builder` maps a linear transmit power in watts to the transmit pair
/// used at that power.
pub fn empirical_sdof<F>(
    ch: &ChannelSet,
    builder: F,
    grid_dbm: &[f64],
    rho: f64,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> TransmitPair,
{
    let mut grid: Vec<f64> = grid_dbm.iter().copied().filter(|p| p.is_finite()).collect();
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup();
    if grid.len() < 2 {
        return Err(Error::DegenerateGrid);
    }
    let top = &grid[(grid.len() / 2).min(grid.len() - 2)..];
    let mut x = Vec::with_capacity(top.len());
    let mut ya = Vec::with_capacity(top.len());
    let mut yb = Vec::with_capacity(top.len());
    for &dbm in top {
        let p = dbm_to_watts(dbm);
        let r = rates(ch, &builder(p), rho);
        x.push(p.log2());
        ya.push(r.rs_a);
        yb.push(r.rs_b);
    }
    Ok((ls_slope(&x, &ya), ls_slope(&x, &yb)))
}
