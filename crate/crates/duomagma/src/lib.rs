//! Exact-arithmetic toolkit for duoseparable enlargements of topologized
//! magmas: step-function spaces over a base magma, semidirect products
//! with an absorbing automorphism (or automorphism group), unimodular
//! lattice machinery for torus absorption, and a mode-parameterized
//! witness-certificate verifier. All scalars are arbitrary-precision
//! rationals; nothing on the certificate path is approximate.

pub mod automorphism;
pub mod element;
pub mod error;
pub mod hm;
pub mod lll;
pub mod magma;
pub mod matrix;
pub mod neighborhood;
pub mod rational;
pub mod semidirect;
pub mod unimodular;
pub mod verify;

pub use automorphism::{aut_act, Automorphism, Direction};
pub use element::{Element, PairRight};
pub use error::{Error, Result};
pub use hm::{
    absorb_exponent, absorb_sufficient_bound, alpha_apply, hm_embed, hm_map, hm_measure_defect,
    hm_nbhd_member, hm_nbhd_normalize, hm_product, step_canonicalize, FiniteHom,
    NormalizedUnitNbhd, SqueezeMap, StepFunction, SubbasicPart,
};
pub use magma::{
    element_in, invert, is_group, mk_cyclic, mk_finite_magma, mk_left_zero_band, mk_nonassoc,
    op_apply, unit_of, MagmaDescriptor,
};
pub use matrix::{IntMatrix, RationalMatrix, UnimodularMatrix};
pub use neighborhood::{nbhd_intersect, nbhd_member, NeighborhoodSpec};
pub use rational::Rational;
pub use semidirect::{
    build_f, duo_witness_group, duo_witness_z, embed_into_f, sd_invert, sd_multiply, DuoWitness,
};
pub use unimodular::{
    block_diagonal_lift, make_primitive, primitive_completion, shrink_columns, small_combination,
    torus_absorb, torus_duo_group, AbsorbingFamilyRegistry, SearchBudget, SearchStrategy,
};
pub use verify::{
    check_certificate, duo_certificate, oracle_small_combination, oracle_step_membership,
    random_instance, Association, CoverageCardinality, CoverageMode, CoverageShape,
    RandomInstance, SlotTag, TaggedSlot, Verdict, WitnessCertificate,
};
