//! Standard single- and two-mode gates in the `{|0⟩, |1⟩}` photon-number basis.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

const O: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity() -> Matrix2<Complex64> {
    Matrix2::new(I, O, O, I)
}

pub fn pauli_x() -> Matrix2<Complex64> {
    Matrix2::new(O, I, I, O)
}

pub fn pauli_z() -> Matrix2<Complex64> {
    Matrix2::new(I, O, O, -I)
}

pub fn hadamard() -> Matrix2<Complex64> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Matrix2::new(h, h, h, -h)
}

/// Controlled-NOT with the first mode as control.
pub fn cnot() -> Matrix4<Complex64> {
    Matrix4::new(
        I, O, O, O, //
        O, I, O, O, //
        O, O, O, I, //
        O, O, I, O,
    )
}
