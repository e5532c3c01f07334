//! Achieved S.D.o.F. of a precoder pair from subspace dimensions.
//!
//! Products such as `H_bb·V_b` with `V_b` inside `null(H_bb)` are pure
//! rounding noise, and a tolerance relative to their own largest singular
//! value would count that noise as rank. Every image is therefore formed
//! from unit-norm precoder columns and divided by the channel's spectral
//! norm before an absolute threshold is applied.

use serde::Serialize;

use super::{PrecoderPair, SDoFPair};
use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{dim_diff_abs, normalize_columns, rank_abs, spectral_norm, CMatrix};
use num_complex::Complex64;

/// Singular values of a normalized image below this count as zero.
pub const IMAGE_TOL: f64 = 1e-9;

fn image(h: &CMatrix, v: &CMatrix) -> CMatrix {
    let norm = spectral_norm(h);
    if norm == 0.0 {
        return CMatrix::zeros(h.nrows(), v.ncols());
    }
    h * normalize_columns(v) * Complex64::new(1.0 / norm, 0.0)
}

/// `rank(H·V)` with the scale-aware threshold described above.
pub fn image_rank(h: &CMatrix, v: &CMatrix) -> usize {
    rank_abs(&image(h, v), IMAGE_TOL)
}

fn diff(h1: &CMatrix, v1: &CMatrix, h2: &CMatrix, v2: &CMatrix) -> Result<usize> {
    dim_diff_abs(&image(h1, v1), &image(h2, v2), IMAGE_TOL)
}

/// `d_s^a = dim{span(H_ba V_a) \ span(H_bb V_b)}` and its mirror, checked
/// against `min{(N_b^r − rank H_bb V_b)⁺, rank H_ba V_a}`.
pub fn achieved_sdof(ch: &ChannelSet, pair: &PrecoderPair) -> Result<SDoFPair> {
    sdof_of(ch, &pair.v_a, &pair.v_b)
}

pub(crate) fn sdof_of(ch: &ChannelSet, v_a: &CMatrix, v_b: &CMatrix) -> Result<SDoFPair> {
    let ds_a = diff(&ch.h_ba, v_a, &ch.h_bb, v_b)?;
    let ds_b = diff(&ch.h_ab, v_b, &ch.h_aa, v_a)?;

    let nb_r = ch.h_bb.nrows();
    let na_r = ch.h_aa.nrows();
    let alt_a = nb_r
        .saturating_sub(image_rank(&ch.h_bb, v_b))
        .min(image_rank(&ch.h_ba, v_a));
    let alt_b = na_r
        .saturating_sub(image_rank(&ch.h_aa, v_a))
        .min(image_rank(&ch.h_ab, v_b));
    if (ds_a, ds_b) != (alt_a, alt_b) {
        return Err(Error::InternalInconsistency(format!(
            "subspace route gives ({ds_a}, {ds_b}) but rank route gives ({alt_a}, {alt_b})"
        )));
    }
    Ok(SDoFPair::new(ds_a, ds_b))
}

/// The four dimension terms of the subspace reformulation, kept signed so
/// unaligned pairs can report negative components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignedSdof {
    pub m1: usize,
    pub n1: usize,
    pub m2: usize,
    pub n2: usize,
}

impl SignedSdof {
    pub fn ds_a(&self) -> i64 {
        self.m1 as i64 - self.n1 as i64
    }

    pub fn ds_b(&self) -> i64 {
        self.m2 as i64 - self.n2 as i64
    }
}

/// `(m1 − n1, m2 − n2)` for an arbitrary precoder pair: what each
/// legitimate receiver sees free of interference minus what Eve sees
/// free of the other source's signal.
pub fn lemma1_sdof(ch: &ChannelSet, v_a: &CMatrix, v_b: &CMatrix) -> Result<SignedSdof> {
    Ok(SignedSdof {
        m1: diff(&ch.h_ba, v_a, &ch.h_bb, v_b)?,
        n1: diff(&ch.g_a, v_a, &ch.g_b, v_b)?,
        m2: diff(&ch.h_ab, v_b, &ch.h_aa, v_a)?,
        n2: diff(&ch.g_b, v_b, &ch.g_a, v_a)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{gen_rayleigh, NetworkConfig};
    use crate::precoder::{SubsetGenerator, SubsetId};

    fn pair_from(g: &SubsetGenerator, picks: &[(SubsetId, usize)], power: f64) -> PrecoderPair {
        let cfg = g.config();
        let mut v_a = CMatrix::zeros(cfg.na_t, 0);
        let mut v_b = CMatrix::zeros(cfg.nb_t, 0);
        let mut prov = Vec::new();
        for &(id, n) in picks {
            let (a, b) = g.vectors(id, n).unwrap();
            v_a = crate::linalg::hstack(&v_a, &a).unwrap();
            v_b = crate::linalg::hstack(&v_b, &b).unwrap();
            prov.extend(std::iter::repeat_n(Some(id), n));
        }
        PrecoderPair {
            v_a,
            v_b,
            provenance: prov,
            power,
        }
    }

    #[test]
    fn empty_pair_has_no_sdof() {
        let cfg = NetworkConfig::default();
        let ch = gen_rayleigh(&cfg, 1);
        let p = PrecoderPair::empty(cfg.na_t, cfg.nb_t, 1.0);
        assert_eq!(achieved_sdof(&ch, &p).unwrap(), SDoFPair::new(0, 0));
    }

    #[test]
    fn single_s13_pair() {
        let cfg = NetworkConfig::new(4, 6, 8, 2, 5);
        let ch = gen_rayleigh(&cfg, 2);
        let g = SubsetGenerator::new(&ch).unwrap();
        let p = pair_from(&g, &[(SubsetId::S13, 1)], 1.0);
        assert_eq!(achieved_sdof(&ch, &p).unwrap(), SDoFPair::new(0, 1));
    }

    #[test]
    fn example_two_pair() {
        let cfg = NetworkConfig::new(4, 6, 8, 2, 5);
        let ch = gen_rayleigh(&cfg, 2);
        let g = SubsetGenerator::new(&ch).unwrap();
        let p = pair_from(&g, &[(SubsetId::S22, 2), (SubsetId::S13, 1)], 1.0);
        assert_eq!(achieved_sdof(&ch, &p).unwrap(), SDoFPair::new(2, 3));
    }

    #[test]
    fn aligned_pair_has_no_eve_terms() {
        let cfg = NetworkConfig::new(5, 2, 4, 3, 5);
        let ch = gen_rayleigh(&cfg, 6);
        let g = SubsetGenerator::new(&ch).unwrap();
        let p = pair_from(&g, &[(SubsetId::S23, 1), (SubsetId::S22, 1)], 1.0);
        let l = lemma1_sdof(&ch, &p.v_a, &p.v_b).unwrap();
        assert_eq!((l.n1, l.n2), (0, 0));
        let s = achieved_sdof(&ch, &p).unwrap();
        assert_eq!((l.ds_a(), l.ds_b()), (s.ds_a as i64, s.ds_b as i64));
    }

    #[test]
    fn silent_bob_reduces_to_ranks() {
        let cfg = NetworkConfig::default();
        let ch = gen_rayleigh(&cfg, 7);
        let v_a = crate::channel::complex_gaussian(
            &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1),
            cfg.na_t,
            2,
            1.0,
        );
        let v_b = CMatrix::zeros(cfg.nb_t, 2);
        let l = lemma1_sdof(&ch, &v_a, &v_b).unwrap();
        assert_eq!(l.m1, 2);
        assert_eq!(l.n1, 2);
        assert_eq!(l.ds_a(), 0);
        assert_eq!(l.ds_b(), 0);
    }

    #[test]
    fn unaligned_pair_goes_negative() {
        let cfg = NetworkConfig::default();
        let ch = gen_rayleigh(&cfg, 8);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(2);
        let v_a = crate::channel::complex_gaussian(&mut rng, 3, 3, 1.0);
        let v_b = crate::channel::complex_gaussian(&mut rng, 3, 3, 1.0);
        let l = lemma1_sdof(&ch, &v_a, &v_b).unwrap();
        assert!(l.n1 > 0 && l.n2 > 0);
        assert!(l.ds_a() < 0 || l.ds_b() < 0);
    }
}
