//! Exact and simulated machinery for studying total-variation cutoff of
//! simple random walk on quotients of the affine building of `PGL_d`.
//!
//! * [`qcalc`]: exact q-polynomials, drift/variance constants, mixing schedules
//!   and the norm/ball bounds used by the cutoff argument.
//! * [`sector`]: the radial projection of the walk onto the sector `N^{d-1}`,
//!   with exact evolution and Monte Carlo.
//! * [`graphlab`]: finite graphs and digraphs: exact SRW evolution, TV profiles,
//!   cutoff detection, spectral certification.
//! * [`cayley`]: finite-field matrix groups and Cayley graph construction.

pub mod cayley;
pub mod error;
pub mod graphlab;
pub mod qcalc;
pub mod sector;

pub use error::{Error, Result};
