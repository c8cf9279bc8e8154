//! Gaussian boson sampling (GBS) emulation with photon loss and spectrally impure
//! sources, coupled to densest-k-subgraph (DkS) search.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: adjacency-matrix graphs, Erdős–Rényi generation, density and the
//!   greedy peeling baseline.
//! - [`gstate`]: Gaussian states in the doubled (annihilation/creation) basis,
//!   graph embedding, Williamson/Bloch-Messiah decompositions, Schmidt profiles,
//!   spectral-mode expansion and uniform loss.
//! - [`sampler`]: hafnians, photon-number-resolving and threshold-detector
//!   probabilities, exact subspace enumeration, chain-rule sampling and the
//!   choice of the scaling parameter.
//! - [`dks`]: random-search, simulated-annealing and raw (unpostselected) DkS
//!   algorithms driven by classical or GBS samples.
//! - [`harness`]: experiment configuration, deterministic parallel runs and
//!   CSV output.

pub mod dks;
pub mod error;
pub mod graph;
pub mod gstate;
pub mod harness;
mod linalg;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
pub use graph::{Graph, SubgraphSelection};
pub use gstate::{CovarianceState, SchmidtProfile, SqueezerBank, SymplecticFactors};
pub use sampler::{ClickPattern, SubspaceDistribution};
