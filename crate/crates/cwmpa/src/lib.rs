//! Amplification of ultra-small optical phases by post-selected weak
//! measurements, simulated exactly.
//!
//! A single amplification stage imprints a tiny phase `theta` on the vertical
//! polarization of one path branch and then post-selects the path state close
//! to orthogonality with the no-signal state. The surviving polarization
//! pointer carries an amplified relative phase `gamma ≈ arctan(theta/delta)`,
//! where `delta` measures how far the post-selection sits from the forbidden
//! orthogonal point. Cascading stages multiplies the per-stage factors.
//!
//! The crate is organized in four layers:
//!
//! * [`statevec`] — dense complex state vectors over path ⊗ polarization and
//!   the exact operations (tensor, control phase, post-selection, merges).
//! * [`stage`] — one amplification stage: exact pipeline, first-order closed
//!   forms, and the closed-form readout error model.
//! * [`cascade`] — multi-stage runs on a (stages + 1)-dimensional path space,
//!   total-factor accounting, the error recursion, and the stage-count
//!   planner.
//! * [`optics`] — the four-beam-splitter bench realization and its exact
//!   mapping onto the abstract cascade.
//!
//! All operations are pure functions over immutable values; everything here
//! is safe to call concurrently.

pub mod cascade;
pub mod error;
pub mod optics;
pub mod stage;
pub mod statevec;

pub use error::{Error, Result};
pub use statevec::{CompositeState, Pol, PointerState, SystemKet};
