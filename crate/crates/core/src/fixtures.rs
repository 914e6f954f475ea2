//! Fixed incidence matrices shared by unit and acceptance tests.

use crate::matrix::BinaryMatrix;

/// The 7x8 incidence matrix with column weight 3, `w_min = 3`, `Γ = 2`.
pub fn reference_matrix() -> BinaryMatrix {
    BinaryMatrix::from_rows(&[
        [1u8, 0, 1, 0, 0, 0, 1, 0],
        [0, 1, 0, 1, 0, 1, 0, 0],
        [0, 0, 1, 0, 1, 0, 1, 1],
        [1, 0, 0, 0, 1, 1, 0, 1],
        [0, 1, 0, 1, 0, 1, 0, 0],
        [1, 0, 1, 0, 0, 0, 1, 0],
        [0, 1, 0, 1, 1, 0, 0, 1],
    ])
    .expect("fixture is well formed")
}
