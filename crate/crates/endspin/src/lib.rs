//! Exact end-to-end entanglement dynamics of open XX spin-1/2 chains.
//!
//! A chain prepared in a simple product or Bell-pair state and then left
//! alone under XX dynamics will, for the right preparations, build up
//! genuine entanglement between its two end spins. This crate computes that
//! process exactly: the chain maps to free fermions, two-spin reduced
//! density matrices of the end pair come out of Pfaffian-free moment
//! contractions of fermion words, and the usual two-qubit measures
//! (Wootters concurrence, fully entangled fraction, teleportation fidelity)
//! are evaluated on top. Chains of a few hundred sites take milliseconds
//! per time point; nothing is sampled or truncated.
//!
//! The supported preparations are canted product states (every spin tilted
//! in a site-linear pattern, with the staggered Neel state as the special
//! case that entangles the ends), nearest-neighbor Bell pair coverings, and
//! convex mixtures of product states (used for preparation-error studies).
//! Disorder enters either as random spin flips in the initial state or as
//! Gaussian noise on the couplings, averaged over a seeded ensemble.
//!
//! # Start with the examples
//!
//! Each major capability has a runnable example:
//!
//! - `cargo run --release --example time_sweep`: end-pair measures over a
//!   time window for a Neel chain, peak plus CSV.
//! - `cargo run --release --example bell_pairs`: the Bell-pair preparation
//!   across several sizes, with distillability checks.
//! - `cargo run --release --example alpha_map`: concurrence over the full
//!   (tilt angle, time) plane, showing the isolated Neel resonance.
//! - `cargo run --release --example fwhm`: width of that resonance in the
//!   tilt angle, narrowing as the chain grows.
//! - `cargo run --release --example scaling`: peak time and height versus
//!   chain length for both preparations, with the transit-time fit.
//! - `cargo run --release --example disorder_flip`: how random preparation
//!   flips at fixed expected count degrade the peak.
//! - `cargo run --release --example disorder_coupling`: ensemble-averaged
//!   measures under Gaussian coupling noise.
//! - `cargo run --release --example walk`: the underlying single-excitation
//!   wavefront that carries the correlations.
//! - `cargo run --release --example oracle_check`: the fermionic engine
//!   against brute-force diagonalization on small chains.
//!
//! The same capabilities are scriptable through the `endspin` binary, which
//! reads a JSON config (or flags), writes CSV plus a reproducibility
//! sidecar, and is documented in the README.
//!
//! # Library layout
//!
//! [`lattice`] declares chains, coupling profiles, and initial states;
//! [`propagator`] exponentiates the one-particle hopping matrix;
//! [`correlator`] contracts fermion-word moments against the initial state;
//! [`rdm`] assembles end-pair density matrices from those moments;
//! [`entanglement`] scores them; [`analysis`] runs sweeps, peak finding,
//! width extraction, and size scans; [`disorder`] builds flip mixtures and
//! coupling ensembles; [`oracle`] is the independent exact-diagonalization
//! route used by the checks; [`cli`] backs the binary.

pub mod analysis;
pub mod cli;
pub mod correlator;
pub mod disorder;
pub mod entanglement;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod propagator;
pub mod rdm;

pub use error::{Error, Result};
