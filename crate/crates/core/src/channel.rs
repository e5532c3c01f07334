//! Network configuration, channel generation and CSI perturbation.
//!
//! Channels are stored already divided by the noise standard deviation, so
//! every rate expression downstream can assume unit-variance noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use num_complex::Complex64;

/// Antenna split, self-interference level and power budget of one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub na_t: usize,
    pub na_r: usize,
    pub nb_t: usize,
    pub nb_r: usize,
    pub ne: usize,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default)]
    pub power_dbm: f64,
    #[serde(default = "default_noise_dbm")]
    pub noise_dbm: f64,
}

fn default_rho() -> f64 {
    1.0
}

fn default_noise_dbm() -> f64 {
    -60.0
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig::new(3, 2, 3, 2, 5)
    }
}

impl NetworkConfig {
    /// Antenna counts with ρ = 1, P = 0 dBm and σ² = −60 dBm.
    pub fn new(na_t: usize, na_r: usize, nb_t: usize, nb_r: usize, ne: usize) -> Self {
        NetworkConfig {
            na_t,
            na_r,
            nb_t,
            nb_r,
            ne,
            rho: default_rho(),
            power_dbm: 0.0,
            noise_dbm: default_noise_dbm(),
        }
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_power_dbm(mut self, power_dbm: f64) -> Self {
        self.power_dbm = power_dbm;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Config(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        if !self.power_dbm.is_finite() || !self.noise_dbm.is_finite() {
            return Err(Error::Config("power and noise levels must be finite".into()));
        }
        Ok(())
    }

    /// Transmit power budget in watts.
    pub fn power_linear(&self) -> f64 {
        dbm_to_watts(self.power_dbm)
    }

    pub fn noise_std(&self) -> f64 {
        dbm_to_watts(self.noise_dbm).sqrt()
    }

    /// The same network seen from Bob's side.
    pub fn mirrored(&self) -> Self {
        NetworkConfig {
            na_t: self.nb_t,
            na_r: self.nb_r,
            nb_t: self.na_t,
            nb_r: self.na_r,
            ..*self
        }
    }

    pub fn antennas(&self) -> (usize, usize, usize, usize, usize) {
        (self.na_t, self.na_r, self.nb_t, self.nb_r, self.ne)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Node positions in metres and the path-loss exponent `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub alice: [f64; 2],
    pub bob: [f64; 2],
    pub eve: [f64; 2],
    pub path_loss_exp: f64,
}

impl Geometry {
    /// Alice at (−r, 0), Bob at (r, 0).
    pub fn symmetric(r: f64, eve: [f64; 2], path_loss_exp: f64) -> Self {
        Geometry {
            alice: [-r, 0.0],
            bob: [r, 0.0],
            eve,
            path_loss_exp,
        }
    }

    /// Non-fatal remarks about unusual parameters.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(2.0..=4.0).contains(&self.path_loss_exp) {
            out.push(format!(
                "path-loss exponent {} is outside the usual range [2, 4]",
                self.path_loss_exp
            ));
        }
        out
    }
}

fn distance(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Large-scale amplitude of each link (already divided by σ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGains {
    pub ab: f64,
    pub aa: f64,
    pub bb: f64,
    pub ea: f64,
    pub eb: f64,
}

impl LinkGains {
    pub fn unit() -> Self {
        LinkGains {
            ab: 1.0,
            aa: 1.0,
            bb: 1.0,
            ea: 1.0,
            eb: 1.0,
        }
    }
}

/// The six channel matrices of one realization.
///
/// `h_ba`: Alice → Bob (`nb_r × na_t`), `h_ab`: Bob → Alice (`na_r × nb_t`),
/// `h_aa`, `h_bb`: self-interference, `g_a`, `g_b`: Alice/Bob → Eve.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_ba: CMatrix,
    pub h_ab: CMatrix,
    pub h_aa: CMatrix,
    pub h_bb: CMatrix,
    pub g_a: CMatrix,
    pub g_b: CMatrix,
    pub gains: LinkGains,
}

impl ChannelSet {
    pub fn conforms_to(&self, c: &NetworkConfig) -> bool {
        self.h_ba.shape() == (c.nb_r, c.na_t)
            && self.h_ab.shape() == (c.na_r, c.nb_t)
            && self.h_aa.shape() == (c.na_r, c.na_t)
            && self.h_bb.shape() == (c.nb_r, c.nb_t)
            && self.g_a.shape() == (c.ne, c.na_t)
            && self.g_b.shape() == (c.ne, c.nb_t)
    }

    /// Swap the roles of Alice and Bob.
    pub fn mirrored(&self) -> Self {
        ChannelSet {
            h_ba: self.h_ab.clone(),
            h_ab: self.h_ba.clone(),
            h_aa: self.h_bb.clone(),
            h_bb: self.h_aa.clone(),
            g_a: self.g_b.clone(),
            g_b: self.g_a.clone(),
            gains: LinkGains {
                aa: self.gains.bb,
                bb: self.gains.aa,
                ea: self.gains.eb,
                eb: self.gains.ea,
                ..self.gains
            },
        }
    }

    pub fn na_t(&self) -> usize {
        self.g_a.ncols()
    }

    pub fn nb_t(&self) -> usize {
        self.g_b.ncols()
    }

    pub fn ne(&self) -> usize {
        self.g_a.nrows()
    }
}

/// `rows × cols` matrix of i.i.d. `gain · CN(0, 1)` entries, drawn row-major.
pub fn complex_gaussian<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    gain: f64,
) -> CMatrix {
    let scale = gain * std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(i, j)] = Complex64::new(re * scale, im * scale);
        }
    }
    m
}

/// `rows × cols` matrix of `gain · e^{jθ}` entries with θ uniform on [0, 2π).
pub fn random_phase<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, gain: f64) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            m[(i, j)] = Complex64::from_polar(gain, theta);
        }
    }
    m
}

fn draw_all<F>(c: &NetworkConfig, gains: LinkGains, mut link: F) -> ChannelSet
where
    F: FnMut(usize, usize, f64) -> CMatrix,
{
    let h_ba = link(c.nb_r, c.na_t, gains.ab);
    let h_ab = link(c.na_r, c.nb_t, gains.ab);
    let h_aa = link(c.na_r, c.na_t, gains.aa);
    let h_bb = link(c.nb_r, c.nb_t, gains.bb);
    let g_a = link(c.ne, c.na_t, gains.ea);
    let g_b = link(c.ne, c.nb_t, gains.eb);
    ChannelSet {
        h_ba,
        h_ab,
        h_aa,
        h_bb,
        g_a,
        g_b,
        gains,
    }
}

/// I.i.d. unit-variance Rayleigh channels on every link.
pub fn gen_rayleigh(config: &NetworkConfig, seed: u64) -> ChannelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw_all(config, LinkGains::unit(), |r, c, g| {
        complex_gaussian(&mut rng, r, c, g)
    })
}

/// Path-loss channels: every entry is `d^{−c/2} e^{jθ} / σ` for the link
/// distance `d`; self-interference links use `d = 1`.
pub fn gen_pathloss(config: &NetworkConfig, geom: &Geometry, seed: u64) -> Result<ChannelSet> {
    let gains = pathloss_gains(config, geom)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw_all(config, gains, |r, c, g| random_phase(&mut rng, r, c, g)))
}

pub fn pathloss_gains(config: &NetworkConfig, geom: &Geometry) -> Result<LinkGains> {
    let sigma = config.noise_std();
    let amp = |d: f64| d.powf(-geom.path_loss_exp / 2.0) / sigma;
    let cross = |name: &'static str, p: [f64; 2], q: [f64; 2]| {
        let d = distance(p, q);
        if d == 0.0 {
            Err(Error::ZeroDistance(name))
        } else {
            Ok(amp(d))
        }
    };
    Ok(LinkGains {
        ab: cross("alice-bob", geom.alice, geom.bob)?,
        aa: amp(1.0),
        bb: amp(1.0),
        ea: cross("alice-eve", geom.alice, geom.eve)?,
        eb: cross("bob-eve", geom.bob, geom.eve)?,
    })
}

/// Which links a CSI perturbation touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkSelector {
    /// The eavesdropper links `g_a`, `g_b`.
    G,
    /// The four legitimate and self-interference links.
    H,
    All,
}

impl LinkSelector {
    fn g(self) -> bool {
        matches!(self, LinkSelector::G | LinkSelector::All)
    }

    fn h(self) -> bool {
        matches!(self, LinkSelector::H | LinkSelector::All)
    }
}

/// Gauss–Markov mismatch: each selected link becomes
/// `√(1−α²)·H + α·gain·Δ` with `Δ` i.i.d. `CN(0, 1)`.
///
/// Read `channels` as the estimate used to build precoders; the output is
/// the channel the signal actually sees. `alpha` is clamped to [0, 1].
pub fn perturb_csi(channels: &ChannelSet, alpha: f64, which: LinkSelector, seed: u64) -> ChannelSet {
    let alpha = alpha.clamp(0.0, 1.0);
    if alpha == 0.0 {
        return channels.clone();
    }
    let keep = (1.0 - alpha * alpha).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mix = |h: &CMatrix, gain: f64, on: bool| {
        if !on {
            return h.clone();
        }
        let delta = complex_gaussian(&mut rng, h.nrows(), h.ncols(), gain * alpha);
        h * Complex64::new(keep, 0.0) + delta
    };
    let g = channels.gains;
    ChannelSet {
        h_ba: mix(&channels.h_ba, g.ab, which.h()),
        h_ab: mix(&channels.h_ab, g.ab, which.h()),
        h_aa: mix(&channels.h_aa, g.aa, which.h()),
        h_bb: mix(&channels.h_bb, g.bb, which.h()),
        g_a: mix(&channels.g_a, g.ea, which.g()),
        g_b: mix(&channels.g_b, g.eb, which.g()),
        gains: g,
    }
}
