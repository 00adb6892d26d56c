//! Finite models of spaces of `U`-equivariant functions with coefficients
//! in `A_m = Z_p[T]/(1 + T + ... + T^{p^m - 1})` and their Hecke operators.

use thiserror::Error;

mod am;
mod checks;
mod group;
pub mod linalg;
mod model;

pub use am::{am_mod_t_minus_1, am_ring, psi_character, AmElement, AmRing};
pub use checks::{
    decompose_rational, nonconstant_check, quotient_map_check, verify_congruence_theorem,
    CongruenceReport, NonconstantOutcome, NonconstantReport, OperatorCheck, QuotientOrbit,
    QuotientReport, RationalComponent, RationalDecomposition,
};
pub use group::{extend_hom, Elem, GroupSpec, Subgroup};
pub use model::{
    build_space, CoeffModule, EquivariantSpace, FiniteModel, HeckeOperator, LambdaConfig,
    ModelConfig, Orbit,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CongruenceError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("generator images do not define a homomorphism")]
    NotAHomomorphism,
    #[error("model too large to enumerate")]
    TooLarge,
    #[error("coefficient precision K = {k} is below the level m = {m}")]
    PrecisionBelowLevel { k: u32, m: u32 },
    #[error("coefficient module does not match the model")]
    CoefficientMismatch,
}
