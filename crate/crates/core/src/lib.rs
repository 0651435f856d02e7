//! Photon-mediated quantum state transfer between two heterogeneous
//! cavity-QED nodes linked by a time-reversing, stretching and
//! frequency-shifting channel.
//!
//! All times are in units of `1/γ₂` and all rates in units of `γ₂` unless a
//! function says otherwise.
//!
//! * [`signal`] and [`quad`]: uniform grids, sampled envelopes, quadrature.
//! * [`wavepacket`]: pulse design for node 1 and the ideal/transformed packets.
//! * [`transform`]: ideal unitary parameters and optimal timing.
//! * [`dynamics`]: amplitude equations integrated in time.
//! * [`analysis`]: success probabilities, error sweeps, separability, fidelities.
//! * [`budget`]: loss budgets, cooperativity data and error-correction overhead.

// Negated comparisons such as `!(x > 0.0)` are used on purpose so that NaN
// inputs are rejected along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod budget;
pub mod dynamics;
pub mod error;
pub mod ode;
pub mod quad;
pub mod signal;
pub mod special;
pub mod transform;
pub mod wavepacket;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use signal::{inner_product, norm_squared, resample, ComplexSignal, TimeGrid};
pub use wavepacket::{LinkParams, UnitaryParams};
