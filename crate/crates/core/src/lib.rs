//! Exact arithmetic for imaginary quadratic orders.
//!
//! The crate covers elements of an order ([`arith`]), Z-modules given by
//! generator tuples and integer substitutions between them ([`lattice`]),
//! their norm forms ([`norm_form`]), primitive binary quadratic forms and
//! their composition ([`forms`]), ideals of orders of conductor `f` and the
//! matrix form of ideal multiplication ([`ideal`]), and class groups with
//! their two-torsion and square quotient ([`class_group`]).
//!
//! All integers are arbitrary precision.

pub mod arith;
pub mod class_group;
pub mod error;
pub mod forms;
pub mod ideal;
pub mod lattice;
pub mod norm_form;
pub mod par;
pub mod verify;

pub use arith::{Discriminant, QuadInt};
pub use class_group::{ClassGroup, SquareQuotient};
pub use error::{Error, Result};
pub use forms::{compose_crt, enumerate_reduced, principal_form, BinaryForm};
pub use ideal::{
    compose_via_ideals, compose_via_matrices, form_to_ideal, h_alpha, ideal_mul, ideal_to_form,
    tau_pair, Order, OrderIdeal, TauPair,
};
pub use lattice::{
    apply_transform, contains, hnf_basis, module_mul, modules_equal, solve_transform, GenTuple,
    IntMatrix, ZModuleBasis,
};
pub use norm_form::{
    factor_witness, form_action, norm_form, represent_from_fo, MultiQuadraticForm,
};
pub use par::Strategy;
