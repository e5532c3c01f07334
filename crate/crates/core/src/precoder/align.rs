//! Projection of an arbitrary precoder pair onto one whose two signals
//! coincide at Eve, without losing S.D.o.F. on either link.

use super::budget::scale_pairs;
use super::PrecoderPair;
use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{gsvd, hstack, orth_basis_rtol, pinv, rank_rtol, svd, CMatrix, SUBSPACE_RTOL};

fn pad_to(v: CMatrix, cols: usize) -> CMatrix {
    let extra = cols - v.ncols();
    if extra == 0 {
        return v;
    }
    hstack(&v, &CMatrix::zeros(v.nrows(), extra)).expect("same row count")
}

/// Split the right singular vectors of `m` into the range part `T1` and
/// the null part `T0`.
fn right_split(m: &CMatrix) -> (CMatrix, CMatrix) {
    let r = rank_rtol(m, SUBSPACE_RTOL);
    let dec = svd(m);
    let n = m.ncols();
    (
        dec.v.columns(0, r).into_owned(),
        dec.v.columns(r, n - r).into_owned(),
    )
}

/// Turn a pair with `span(G_a V_a) = span(G_b V_b)` into one with
/// `G_a V_a = G_b V_b`, using only invertible mixing and zero padding.
fn equalize(ch: &ChannelSet, v_a: &CMatrix, v_b: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let ga = &ch.g_a * v_a;
    let gb = &ch.g_b * v_b;
    let ne = ch.ne();
    let full_a = rank_rtol(&ga, SUBSPACE_RTOL) == v_a.ncols();
    let full_b = rank_rtol(&gb, SUBSPACE_RTOL) == v_b.ncols();

    if v_b.ncols() < ne && full_a && full_b {
        // Both images have full column rank: map each through its own
        // pseudo-inverse so both sides land on the common projector, then
        // keep one column per dimension of the shared image.
        let u = orth_basis_rtol(&ga, SUBSPACE_RTOL);
        let a = v_a * (pinv(&ga, SUBSPACE_RTOL) * &u);
        let b = v_b * (pinv(&gb, SUBSPACE_RTOL) * &u);
        return Ok((a, b));
    }

    let (ta1, ta0) = right_split(&ga);
    let (tb1, tb0) = right_split(&gb);
    if ta1.ncols() != tb1.ncols() {
        return Err(Error::InternalInconsistency(format!(
            "aligned images have ranks {} and {}",
            ta1.ncols(),
            tb1.ncols()
        )));
    }
    let mix = pinv(&(&ga * &ta1), SUBSPACE_RTOL) * (&gb * &tb1);
    let a = hstack(&(v_a * (&ta1 * mix)), &(v_a * ta0))?;
    let b = hstack(&(v_b * tb1), &(v_b * tb0))?;
    let width = a.ncols().max(b.ncols());
    Ok((pad_to(a, width), pad_to(b, width)))
}

/// Remove the parts of each source's Eve image that the other source does
/// not cover, then equalize the images column by column.
///
/// The signed S.D.o.F. terms of the result are never below those of the
/// input; the result has zero columns when the two images share nothing.
pub fn align_project(
    ch: &ChannelSet,
    v_a: &CMatrix,
    v_b: &CMatrix,
    power: f64,
) -> Result<PrecoderPair> {
    let ga = &ch.g_a * v_a;
    let gb = &ch.g_b * v_b;
    let g = gsvd(&gb, &ga)?;
    let va = v_a * hstack(&g.psi22(), &g.psi23())?;
    let vb = v_b * hstack(&g.psi11(), &g.psi12())?;
    let (a, b) = equalize(ch, &va, &vb)?;
    let (a, b) = scale_pairs(a, b);
    let n = a.ncols();
    Ok(PrecoderPair {
        v_a: a,
        v_b: b,
        provenance: vec![None; n],
        power,
    })
}
