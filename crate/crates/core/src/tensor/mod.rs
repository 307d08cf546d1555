//! Bipartite complex linear algebra: states, density matrices, partial
//! trace and transpose, Hermitian spectra and the Fourier matrix.
//!
//! The product basis is ordered row-major: `|j, jb⟩` sits at index
//! `j * d + jb`, party A being the major index.

mod eigen;
mod matrix;
mod state;

pub use eigen::{hermitian_eigenvalues, hermitian_spectrum, min_eigenvalue, Spectrum, HERMITIAN_TOL};
pub use matrix::{inner, kron_vec, norm, CMatrix};
pub use state::{
    fourier_matrix, local_dim_of, max_entangled, partial_trace, partial_trace_matrix, partial_transpose,
    schmidt_decompose, schmidt_state, swap_operator, DensityMatrix, PureState, SchmidtDecomposition, Subsystem,
    UnitaryMatrix, DENSITY_TOL, NORM_TOL, PSD_TOL, UNITARY_TOL,
};
pub(crate) use state::check_dim;
