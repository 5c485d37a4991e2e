//! Certification of nonlocality for bipartite quantum channels.
//!
//! The crate works with Choi matrices, conditional distributions and Bell
//! functionals. It decides membership in the local polytope, in NPA outer
//! approximations of the quantum set and in the nonsignaling polytope, and it
//! simulates the measurement protocols that turn a channel into a distribution.

pub mod channels;
pub mod constructions;
pub mod correlations;
pub mod dephasing;
pub mod error;
pub mod protocols;
pub mod random;
pub mod quantum_bounds;
pub mod report;
pub mod sdp;
pub mod tensor;

pub use channels::{ChoiChannel, KrausChannel, SuperchannelChoi};
pub use error::{Error, Result};
pub use report::{CertificateReport, Verdict};
pub use tensor::{ComplexMatrix, SubsystemIndex, C64};
