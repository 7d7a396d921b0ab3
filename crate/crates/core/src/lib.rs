//! Contact metric geometry on coordinate charts of R³, with a focus on
//! (κ, μ, υ)-nullity structures: symbolic scalar fields, exact curvature,
//! contact structure validation, the h-frame, nullity extraction and the
//! identities such structures satisfy, plus two explicit families and their
//! D-homothetic deformations.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod contact;
pub mod families;
pub mod jet;
pub mod kmv_analysis;
pub mod report;
pub mod residuals;
pub mod scalar_field;
pub mod tensor_calc;

pub use contact::{Box3, ContactError, ContactMetricStructure, HFrame};
pub use families::{
    build_family, d_homothetic_deform, DeformParams, FamilyError, FamilyParams, Variant,
};
pub use kmv_analysis::{boeckx_invariant, extract_kmv, KmvError, NullityTriple};
pub use report::{run_verify, RunConfig, Verdict, VerificationReport};
pub use residuals::{IdentityReport, PointResiduals};
pub use scalar_field::{parse_field, Axis, FieldError, Point, ScalarField};
pub use tensor_calc::{CurvatureBundle, MetricField, OneForm, VectorField};
