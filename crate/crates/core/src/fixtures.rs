//! The 5-state worked example with eigenvalues 1..5.

use crate::numerics::ComplexDenseMatrix;

pub const WORKED_EXAMPLE: [[f64; 5]; 5] = [
    [3.0, 1.5, -1.5, -1.0, 0.5],
    [0.0, 2.0, 0.0, 0.0, 0.0],
    [-2.0, -1.5, 2.5, -1.0, -0.5],
    [0.0, 0.0, 0.0, 3.0, 0.0],
    [2.0, 1.5, 1.5, 1.0, 4.5],
];

pub fn worked_example() -> ComplexDenseMatrix {
    let rows: Vec<Vec<f64>> = WORKED_EXAMPLE.iter().map(|r| r.to_vec()).collect();
    ComplexDenseMatrix::from_real_rows(&rows).expect("5x5 literal")
}
