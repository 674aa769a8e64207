//! Single-photon model of a Wigner's-friend interferometer.
//!
//! The photon carries three qubits: polarization, path and mode shape
//! ([`qstate`]). Optical elements act on them as 8×8 unitaries ([`optics`]),
//! outcomes follow the Born rule over named or inline bases ([`measure`],
//! [`bases`]), and [`scenario`] assembles the two measurement contexts.
//! Circuits can also be written in a small line-oriented text format
//! ([`dsl`]); [`checks`] holds the named verification checks.

pub mod bases;
pub mod checks;
pub mod dsl;
pub mod measure;
pub mod number;
pub mod optics;
pub mod qstate;
pub mod scenario;
