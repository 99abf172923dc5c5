//! Personalized edge flipping for multi-layer networks and community
//! detection on the privatized tensor.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs plus an explicit seed; file formats, the
//! experiment harness and the command line live in the `flipnet` crate.
//!
//! Pipeline:
//!
//! 1. [`model`] builds a degree-corrected multi-layer block model and
//!    samples an adjacency tensor from it.
//! 2. [`privacy`] flips every edge with a keep-probability derived from the
//!    two endpoints' privacy preferences, and debiases the result.
//! 3. [`detection`] embeds nodes through a semi-symmetric Tucker
//!    decomposition, normalizes the rows and clusters them with K-medians.
//! 4. [`evaluation`] scores labels against the truth and reports the
//!    quantities that drive the consistency rate.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod detection;
pub mod error;
pub mod evaluation;
pub mod linalg;
pub(crate) mod math;
pub mod model;
pub mod privacy;
pub mod rng;
pub mod tensor;

pub use detection::{
    detect, detect_tensor, estimate_k, estimate_k_tensor, k_medians, normalize_rows, DetectOptions, DetectionResult,
    KMediansResult, NormalizedRows, ScreeReport,
};
pub use error::{Error, Result};
pub use evaluation::{
    corollary_regime_check, diagnostics, hamming_error, DiagnosticConstants, DiagnosticsReport,
    RegimeReport, Scenario,
};
pub use linalg::{truncated_svd, Matrix, TruncatedSvd};
pub use model::{
    generate_params, generate_synthetic, probability_tensor, sample_network, DcMsbmParams,
    MultiLayerNetwork,
};
pub use privacy::{
    debias, debiased_expectation, flip_matrix, flip_network, preference_from_budgets,
    privacy_budget, rescale_debias, uniform_theta, BudgetMatrix, DebiasedTensor, FlipMatrix,
    PrivacyProfile,
};
pub use tensor::tucker::{tucker, TuckerFactors, TuckerOptions};
pub use tensor::{Mode, Tensor3};
