//! Two-fold singularities of Filippov systems and their regularization.
//!
//! The crate covers the piecewise-smooth normal form ([`pws`]), the
//! eigen-structure and canard census of the sliding flow ([`twofold`]),
//! regularization by a switching function ([`regularization`]), the blow-up
//! charts ([`blowup`]) and the numerical canard search ([`canard`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod canard;
pub mod error;
pub mod integrate;
pub mod pws;
pub mod regularization;
pub mod twofold;
pub mod weber;

pub use error::{Error, Result};
pub use pws::{
    classify_point, desingularized_sliding_field, eval_normal_form, sliding_field, FieldValue,
    PiecewiseSystem, RegionClass, Side, SlidingValue, SwitchedField, TwoFoldNormalForm,
};
pub use regularization::{
    critical_manifold_height, f_of_w, phi_cubic, phi_finite_k, regularized_field, slowfast_rhs,
    w_inverse, w_transform, wsystem_rhs, RegularizationFunction, SlowFastState, Smoothness,
};
pub use twofold::{
    case_classify, eigen_data, resonance_check, singular_canard_census, visibility, Branch,
    CanardCensus, CaseClass, EigenData, Resonance, Visibility,
};
