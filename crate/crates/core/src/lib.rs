//! Spontaneous emission line shape of a two-level atom prepared by a pi
//! pulse: pulse envelopes, the excited amplitude, spectral amplitudes in
//! closed form and by quadrature, line moments and decay laws, and a CGS
//! layer for laboratory numbers.

pub mod error;
pub mod quadrature;
pub mod special;
pub mod ode;
pub mod envelopes;
pub mod dynamics;
pub mod spectra;
pub mod analysis;
pub mod units;
pub mod cli;
