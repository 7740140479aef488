//! Entanglement- and coherence-generating power of two-qubit gates.
//!
//! The crate covers dense 4×4 linear algebra, gate construction and the
//! canonical (KAK) decomposition, entanglement and coherence measures,
//! optimization of the generating powers, and Haar-random campaigns with
//! histogramming and beta-distribution fits.

pub mod ensemble;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod measures;
pub mod optimize;
pub mod power;

pub use error::{Error, Result};
pub use gates::{
    compose_cartan, haar_sample, kak_decompose, named_gate, su2, CartanForm, CartanParams, KakDecomposition,
    NamedGate, RngState, SU2Params, Unitary4,
};
pub use linalg::{Mat2, Mat4, PureState4, C64};
pub use measures::{Basis4, ProductBasisParams};
pub use optimize::{maximize, OptimizerConfig, Optimum};
pub use power::{
    coherence_power_arbitrary, coherence_power_product, ent_power_closed_form, ent_power_numeric, fold_alpha,
    l1_coherence_power, max_ent_region_test, resource_report, stilde, vidal_ent_power, PowerBudgets,
    ProductInputParams, ResourceReport,
};
