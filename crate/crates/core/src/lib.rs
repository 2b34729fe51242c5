//! Multi-qubit polarization-state tomography.
//!
//! Reconstructs n-qubit states from coincidence-count data through two
//! routes: full state tomography over all 3^n basis settings, and
//! overlapping tomography, which recovers every 2-qubit reduced density
//! matrix from only 3 + 6*ceil(log2 n) settings. Both routes feed a
//! Metropolis-within-Gibbs Bayesian mean estimator that turns raw linear
//! inversions into physical posterior-mean states with credible intervals.
//! A count simulator stands in for the photonic experiment at desk scale.

pub mod analysis;
pub mod bayes;
pub mod error;
pub mod exact;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod pauli;
pub mod qot;
pub mod source;
pub mod state;

pub use error::{Result, TomoError};
pub use linalg::{tensor_product, ComplexMatrix, C64};
pub use measurement::{
    basis_to_waveplates, normalize_counts, outcome_probabilities, pattern_to_outcome, projector,
    Basis, BasisSetting, CountRecord, Dataset,
};
pub use pauli::PauliWord;
pub use state::{
    density_from_stokes, fidelity, fidelity_to_pure, partial_trace, project_to_physical,
    stokes_from_density, trace_distance, von_neumann_entropy, DensityMatrix, PureState,
    StokesTensor,
};
