//! q-deformed valence-bond-solid ground states of integer spin-S chains.
//!
//! The crate builds the anisotropic (U_q(su(2))-symmetric) AKLT ground states
//! in three independent ways and cross-checks them:
//!
//! * a Schwinger-boson / Weyl-polynomial expansion ([`vbsstate`]),
//! * matrix-product tensors and their contraction ([`mps`]),
//! * transfer matrices, spectra and correlators ([`transfer`]).
//!
//! Exact arithmetic over `Q(q)` lives in [`qnum`]; the Clebsch–Gordan
//! structure and the projectors defining the Hamiltonian are in [`cgproj`].

pub mod budget;
pub mod cgproj;
pub mod error;
pub mod mps;
pub mod qnum;
pub mod state;
pub mod suites;
pub mod transfer;
pub mod vbsstate;
pub mod weylrep;

pub use error::{Error, Result};
