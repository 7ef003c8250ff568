//! Dense complex linear algebra used by the dictionaries, estimators and the
//! combiner optimizer.

mod growing;
mod matrix;
mod qr;
mod svd;

pub use growing::GrowingQr;
pub use matrix::{devec, kron, vec, CMatrix, CVector, C64};
pub use qr::{ls_solve, ls_solve_matrix, orth_complement_projector, Qr, CONDITION_LIMIT};
pub use svd::{singular_values, svd, Svd};

