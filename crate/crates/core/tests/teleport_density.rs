//! Teleportation cross-checked against a separate density-matrix calculation
//! built from Kronecker products and projectors.

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;

use qtlink::quantum::{BellState, PureState};
use qtlink::teleport::{
    exact_average_fidelity, outcome_averaged_fidelity, teleport_all, InformationalQubit, DESTINATION_EBIT, SOURCE_EBIT,
};

type M = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mat2(a: [f64; 4]) -> M {
    M::from_row_slice(2, 2, &a.map(c))
}

fn kron(a: &M, b: &M) -> M {
    a.kronecker(b)
}

fn eye(n: usize) -> M {
    M::identity(n, n)
}

/// Per-outcome `(probability, probability × fidelity)` in outcome order
/// (m1, m2) = 00, 01, 10, 11. Qubit order: info, source ebit, destination.
fn density_pipeline(psi: (Complex64, Complex64), resource: &[Complex64; 4], frame: M) -> Vec<(f64, f64)> {
    let input = M::from_column_slice(2, 1, &[psi.0, psi.1]);
    let epr = M::from_column_slice(4, 1, resource);
    let epr = kron(&eye(2), &frame) * epr;
    let state = kron(&input, &epr);
    let rho = &state * state.adjoint();

    let x = mat2([0.0, 1.0, 1.0, 0.0]);
    let z = mat2([1.0, 0.0, 0.0, -1.0]);
    let h = mat2([1.0, 1.0, 1.0, -1.0]) * c(std::f64::consts::FRAC_1_SQRT_2);
    let mut cnot = M::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        cnot[(r, col)] = c(1.0);
    }
    let u = kron(&h, &eye(4)) * kron(&cnot, &eye(2));
    let rho = &u * rho * u.adjoint();

    let target = &input * input.adjoint();
    let mut out = Vec::new();
    for m1 in 0..2 {
        for m2 in 0..2 {
            let mut p1 = M::zeros(2, 2);
            p1[(m1, m1)] = c(1.0);
            let mut p2 = M::zeros(2, 2);
            p2[(m2, m2)] = c(1.0);
            let proj = kron(&kron(&p1, &p2), &eye(2));
            let branch = &proj * &rho * &proj;
            // trace out the two measured qubits
            let mut dest = M::zeros(2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..4 {
                        dest[(i, j)] += branch[(2 * k + i, 2 * k + j)];
                    }
                }
            }
            let mut corr = eye(2);
            if m2 == 1 {
                corr = &x * corr;
            }
            if m1 == 1 {
                corr = &z * corr;
            }
            let dest = &corr * dest * corr.adjoint();
            out.push((dest.trace().re, (&target * dest).trace().re));
        }
    }
    out
}

fn skewed() -> [Complex64; 4] {
    [c(0.0), c(0.15f64.sqrt()), c(0.85f64.sqrt()), c(0.0)]
}

#[test]
fn skewed_resource_agrees_with_density_pipeline() {
    let resource = skewed();
    let epr = PureState::new(vec![SOURCE_EBIT, DESTINATION_EBIT], resource.to_vec()).unwrap();
    let x = mat2([0.0, 1.0, 1.0, 0.0]);
    let mut sum = 0.0;
    for (i, theta) in [0.0, 0.4, 1.1, 1.9, 2.7, std::f64::consts::PI].into_iter().enumerate() {
        let psi = InformationalQubit::from_bloch(theta, 0.7 * i as f64);
        let from_kernel = outcome_averaged_fidelity(&psi, &epr, BellState::PsiPlus).unwrap();
        let from_density: f64 = density_pipeline(psi.amplitudes(), &resource, x.clone()).iter().map(|b| b.1).sum();
        assert_abs_diff_eq!(from_kernel, from_density, epsilon = 1e-12);
        sum += from_kernel;
    }
    assert!(sum / 6.0 < 1.0);
    // Haar average, independently: (2f + 1)/3 with f the Bell overlap
    assert_abs_diff_eq!(exact_average_fidelity(&epr).unwrap(), 0.904_714_280_951_428_333, epsilon = 1e-12);
}

#[test]
fn outcome_probabilities_match_density_pipeline() {
    let resource = skewed();
    let epr = PureState::new(vec![SOURCE_EBIT, DESTINATION_EBIT], resource.to_vec()).unwrap();
    let psi = InformationalQubit::from_bloch(1.2, 0.5);
    let branches = teleport_all(&psi, &epr, BellState::PsiPlus).unwrap();
    let total: f64 = branches.iter().map(|b| b.outcome.probability).sum();
    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    let reference = density_pipeline(psi.amplitudes(), &resource, mat2([0.0, 1.0, 1.0, 0.0]));
    for (b, (p, _)) in branches.iter().zip(&reference) {
        assert_abs_diff_eq!(b.outcome.probability, *p, epsilon = 1e-12);
    }
    // a non-maximal resource biases the outcomes
    assert!(branches.iter().any(|b| (b.outcome.probability - 0.25).abs() > 1e-3));
}

#[test]
fn product_resource_is_classical() {
    let product = [c(0.0), c(1.0), c(0.0), c(0.0)];
    let epr = PureState::new(vec![SOURCE_EBIT, DESTINATION_EBIT], product.to_vec()).unwrap();
    let f = exact_average_fidelity(&epr).unwrap();
    assert!(f <= 2.0 / 3.0 + 1e-12, "{f}");
}
