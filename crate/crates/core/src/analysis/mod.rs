//! Brackets, Green's identity, quadratic forms, cutoffs and the
//! kernel-growth diagnostic.

mod bracket;
mod cutoff;
mod form;
mod kernel;
mod scan;
mod test_function;

pub use bracket::{
    adjoint_pairing_residual, bracket, bracket_tail, green_identity, green_identity_residual, GreenReport, TailSample,
};
pub(crate) use bracket::solution_splits;
pub use cutoff::{cutoff_family, Bump, CutoffFamily, Profile, RampProfile};
pub use form::{form_value, l_pairing, sesquilinear_form, FormReport};
pub use kernel::{kernel_growth_test, DirectionReport, GrowthVerdict, KernelGrowthReport};
pub use scan::{accretivity_scan, default_family, FamilyMember, Operator, ScanEntry, ScanReport};
pub use test_function::{CompactTestFunction, TestValues};
