//! Quasi-morphism invariants of area-preserving maps of the unit disk.
//!
//! Maps are presented by isotopies from the identity ([`flow::IsotopySpec`]),
//! i.e. as elements of the universal cover of the symplectomorphism group.
//! On top of them the crate computes
//!
//! * the Ruelle invariant ([`ruelle`]),
//! * the boundary rotation number ([`circle`]),
//! * Gambaudo-Ghys averages of braid quasi-morphisms ([`gg`], [`braids`],
//!   [`braidqm`]),
//! * the Calabi invariant ([`calabi`]),
//! * and the extension `ψ = φ̄ - a_φ · rot` ([`extend`]).
//!
//! Everything numeric is generic over [`Real`]; the `*64` and `*32` aliases
//! below fix the scalar type.

// `!(a <= b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod braidqm;
pub mod braids;
pub mod calabi;
pub mod circle;
pub mod error;
pub mod extend;
pub mod flow;
pub mod gg;
pub mod qmcore;
pub mod quadrature;
pub mod ruelle;
pub mod scalar;
pub mod scenario;

pub use braidqm::{homogenize_braid_qm, linking, seifert_matrix, signature, writhe, BraidQm, SeifertData};
pub use braids::{base_configuration, braid_from_loop, braid_op, BraidOp, BraidWord, Configuration};
pub use calabi::calabi;
pub use circle::{boundary_lift, rotation_number, CircleLift, RotConfig};
pub use error::{Error, Result};
pub use extend::{a_phi, extend_qm, extend_qm_with, lift_independence_residual, Extension};
pub use flow::{
    evaluate_path, group_op, sample_disk, FrameTrajectory, GroupOp, HamiltonianFamily, IsotopySpec, Point, TwistProfile,
};
pub use gg::{gamma_hat, gamma_tilde, GgConfig};
pub use qmcore::{defect_estimate, homogenize, Meta, PairFamily, QMFunctional, QMValue, ResultRecord};
pub use quadrature::DiskQuadrature;
pub use ruelle::{ang, ruelle_raw, AngleTrace};
pub use scalar::Real;
pub use scenario::{parse_flat, InvariantKind, Scenario};

pub type Point64 = flow::Point<f64>;
pub type Point32 = flow::Point<f32>;
pub type IsotopySpec64 = flow::IsotopySpec<f64>;
pub type IsotopySpec32 = flow::IsotopySpec<f32>;
pub type TwistProfile64 = flow::TwistProfile<f64>;
pub type FrameTrajectory64 = flow::FrameTrajectory<f64>;
pub type QMValue64 = qmcore::QMValue<f64>;
pub type QMValue32 = qmcore::QMValue<f32>;
pub type QMFunctional64 = qmcore::QMFunctional<f64>;
pub type Configuration64 = braids::Configuration<f64>;
pub type CircleLift64 = circle::CircleLift<f64>;
pub type AngleTrace64 = ruelle::AngleTrace<f64>;
pub type Scenario64 = scenario::Scenario<f64>;
