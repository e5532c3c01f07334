//! Secrecy-DoF-optimal linear precoding for a full-duplex MIMO wiretap
//! channel: Alice and Bob exchange messages simultaneously while a passive
//! eavesdropper (Eve) listens to both.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] holds complex SVD, null spaces and the generalized SVD.
//! * [`channel`] draws channel realizations and models imperfect CSI.
//! * [`precoder`] computes subset budgets, selection counts, the closed-form
//!   sum S.D.o.F. and the aligned precoder construction.
//! * [`rate`] evaluates finite-SNR secrecy rates and fits high-SNR slopes.
//! * [`baselines`] provides matched-filter, zero-forcing and one-way schemes.
//! * [`sim`] runs seeded Monte Carlo sweeps and S.D.o.F. tables.

pub mod baselines;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod precoder;
pub mod rate;
pub mod sim;

pub use channel::{ChannelSet, Geometry, LinkSelector, NetworkConfig};
pub use error::{Error, Result};
pub use linalg::CMatrix;
