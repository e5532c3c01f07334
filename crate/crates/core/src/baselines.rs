//! Reference schemes the aligned design is compared against. None of them
//! aligns anything at Eve.

use serde::Serialize;

use crate::channel::{ChannelSet, NetworkConfig};
use crate::linalg::{null_basis, svd, CMatrix};
use crate::rate::TransmitPair;
use num_complex::Complex64;

/// Unit vector maximizing `‖h v‖`. `None` when there is nothing to send on.
fn top_direction(h: &CMatrix) -> Option<CMatrix> {
    let n = h.ncols();
    if n == 0 {
        return None;
    }
    if h.nrows() == 0 {
        let mut e = CMatrix::zeros(n, 1);
        e[(0, 0)] = Complex64::new(1.0, 0.0);
        return Some(e);
    }
    Some(svd(h).v.columns(0, 1).into_owned())
}

fn loaded(v: Option<CMatrix>, rows: usize, power: f64) -> CMatrix {
    match v {
        Some(v) => v * Complex64::new(power.sqrt(), 0.0),
        None => CMatrix::zeros(rows, 0),
    }
}

/// Matched filter: each side beams along the strongest right singular
/// vector of its legitimate channel, with power `power`.
pub fn mf_precoders(ch: &ChannelSet, power: f64) -> TransmitPair {
    TransmitPair {
        v_a: loaded(top_direction(&ch.h_ba), ch.na_t(), power),
        v_b: loaded(top_direction(&ch.h_ab), ch.nb_t(), power),
    }
}

/// Which sides of a zero-forcing design had no self-interference null
/// space and fell back to the matched filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ZfFallback {
    pub alice: bool,
    pub bob: bool,
}

impl ZfFallback {
    pub fn any(&self) -> bool {
        self.alice || self.bob
    }
}

/// Strongest direction of `h` restricted to `null(si)`.
fn nulled_direction(h: &CMatrix, si: &CMatrix) -> (Option<CMatrix>, bool) {
    let n = null_basis(si);
    if n.ncols() == 0 {
        return (top_direction(h), h.ncols() > 0);
    }
    let inner = top_direction(&(h * &n)).expect("null basis has columns");
    (Some(n * inner), false)
}

/// Zero forcing: each side beams inside the null space of its own
/// self-interference channel, along the direction of largest legitimate
/// gain there.
pub fn zf_precoders(ch: &ChannelSet, power: f64) -> (TransmitPair, ZfFallback) {
    let (va, fa) = nulled_direction(&ch.h_ba, &ch.h_aa);
    let (vb, fb) = nulled_direction(&ch.h_ab, &ch.h_bb);
    (
        TransmitPair {
            v_a: loaded(va, ch.na_t(), power),
            v_b: loaded(vb, ch.nb_t(), power),
        },
        ZfFallback {
            alice: fa,
            bob: fb,
        },
    )
}

/// Antenna split for one-way operation: Alice only transmits, Bob keeps a
/// single transmit antenna and receives on the rest.
///
/// When Bob has no transmit antenna at all he gets one phantom antenna,
/// which [`oneway_bob_silent`] reports so callers can keep it at zero power.
pub fn oneway_config(cfg: &NetworkConfig) -> NetworkConfig {
    let nb_r = if cfg.nb_t == 0 {
        cfg.nb_r
    } else {
        cfg.nb_r + cfg.nb_t - 1
    };
    NetworkConfig {
        na_t: cfg.na_t + cfg.na_r,
        na_r: 0,
        nb_t: 1,
        nb_r,
        ..*cfg
    }
}

pub fn oneway_bob_silent(original: &NetworkConfig) -> bool {
    original.nb_t == 0
}
