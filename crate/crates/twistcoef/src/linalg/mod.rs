//! Exact linear algebra over Z, Q and F_p.

pub mod group;
pub mod matrix;
pub mod modp;
pub mod scalar;
pub mod snf;
pub mod sparse;

pub use group::{
    cokernel, cokernel_with_section, column_lattice_basis, echelon_lattice_basis, homology_of_complex, homology_with_cycles, homology_with_section, left_inverse, HomologyData, image, image_contained,
    integer_kernel, intersect_subgroups, kernel, lift_through, same_subgroup, solve, AbMap, FgAbGroup,
    Invariants, LinalgError, Ring, Simplified,
};
pub use matrix::IntMatrix;
pub use modp::{ModPMatrix, ModPSolver};
pub use scalar::{Cancel, Halt};
pub use sparse::{saturated_rank, sparse_rank, Elimination, SparseColumns};
pub use snf::{invariant_factors, smith_normal_form, smith_normal_form_cancellable, SmithForm};
