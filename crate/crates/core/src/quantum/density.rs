use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{gather_bits, positions_of, validate_labels, xlog2x_neg};
use super::{ModeLabel, EIGEN_FLOOR};
use crate::error::{Error, Result};

/// Tolerance on trace and Hermiticity checks.
const MIXED_TOLERANCE: f64 = 1e-12;

/// A mixed state over labeled modes, stored as a dense `2^k × 2^k` matrix in
/// canonical label order.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<ModeLabel>,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positive semidefiniteness.
    /// `labels` must already be in canonical order.
    pub fn new(labels: Vec<ModeLabel>, matrix: DMatrix<Complex64>) -> Result<Self> {
        validate_labels(&labels)?;
        let mut sorted = labels.clone();
        sorted.sort();
        if sorted != labels {
            return Err(Error::InvalidDensityMatrix(
                "labels must be given in canonical order".into(),
            ));
        }
        let dim = 1usize << labels.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                modes: labels.len(),
                expected: dim * dim,
                actual: matrix.len(),
            });
        }
        let herm_dev = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(herm_dev <= MIXED_TOLERANCE) {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm_dev:e})"
            )));
        }
        let rho = Self { labels, matrix };
        let tr = rho.trace();
        if !((tr - 1.0).abs() <= MIXED_TOLERANCE) {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let min_eig = rho.raw_eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -EIGEN_FLOOR {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(rho)
    }

    pub(crate) fn from_parts_unchecked(labels: Vec<ModeLabel>, matrix: DMatrix<Complex64>) -> Self {
        Self { labels, matrix }
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    fn raw_eigenvalues(&self) -> Vec<f64> {
        self.matrix.clone().symmetric_eigenvalues().iter().copied().collect()
    }

    /// Eigenvalues in ascending order, with jitter in `[-1e-10, 0)` clamped to 0.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eig: Vec<f64> = self
            .raw_eigenvalues()
            .into_iter()
            .map(|x| if (-EIGEN_FLOOR..0.0).contains(&x) { 0.0 } else { x })
            .collect();
        eig.sort_by(f64::total_cmp);
        eig
    }

    /// `-Σ λ log₂ λ` over the (clamped) spectrum, rescaled to unit sum so
    /// last-ulp trace drift does not leak into the entropy.
    pub fn von_neumann_entropy(&self) -> f64 {
        let eig = self.eigenvalues();
        let total: f64 = eig.iter().sum();
        if !(total > 0.0) {
            return 0.0;
        }
        eig.into_iter().map(|x| xlog2x_neg(x / total)).sum()
    }

    /// Traces out every mode not listed in `keep`.
    pub fn partial_trace(&self, keep: &[ModeLabel]) -> Result<DensityMatrix> {
        let kept = positions_of(&self.labels, keep)?;
        if kept.is_empty() {
            return Err(Error::InvalidCut("kept subsystem is empty".into()));
        }
        let k = self.labels.len();
        let traced: Vec<usize> = (0..k).filter(|p| !kept.contains(p)).collect();
        let dim = 1usize << k;
        let sub = 1usize << kept.len();
        let mut out = DMatrix::zeros(sub, sub);
        for i in 0..dim {
            let ti = gather_bits(i, &traced, k);
            let ki = gather_bits(i, &kept, k);
            for j in 0..dim {
                if gather_bits(j, &traced, k) == ti {
                    out[(ki, gather_bits(j, &kept, k))] += self.matrix[(i, j)];
                }
            }
        }
        let labels = kept.iter().map(|&p| self.labels[p]).collect();
        Ok(DensityMatrix { labels, matrix: out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{make_bell, BellState, Location, PureState};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const MS: ModeLabel = ModeLabel::microwave(Location::Source);
    const MD: ModeLabel = ModeLabel::microwave(Location::Destination);
    const OD: ModeLabel = ModeLabel::optical(Location::Destination);

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        let rho = make_bell(BellState::PhiPlus, [MS, MD]).unwrap().to_density();
        let red = rho.partial_trace(&[MD]).unwrap();
        assert_eq!(red.labels(), &[MD]);
        assert_abs_diff_eq!(red.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(red.matrix()[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(red.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(red.von_neumann_entropy(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn product_state_keeps_first_factor() {
        let rho = PureState::basis(&[(MS, false), (MD, true)]).unwrap().to_density();
        let red = rho.partial_trace(&[MS]).unwrap();
        assert_eq!(red.matrix()[(0, 0)], c(1.0));
        assert_eq!(red.matrix()[(1, 1)], c(0.0));
    }

    #[test]
    fn skewed_state_gives_diagonal_weights() {
        // √0.15|01⟩ + √0.85|10⟩ over (ms, md): keeping ms gives diag(0.15, 0.85)
        let psi = PureState::new(vec![MS, MD], vec![c(0.0), c(0.15f64.sqrt()), c(0.85f64.sqrt()), c(0.0)]).unwrap();
        let red = psi.to_density().partial_trace(&[MS]).unwrap();
        assert_abs_diff_eq!(red.matrix()[(0, 0)].re, 0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(red.matrix()[(1, 1)].re, 0.85, epsilon = 1e-15);
        assert_abs_diff_eq!(red.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
        // the M M† route agrees
        let direct = psi.reduced_density(&[MS]).unwrap();
        assert_abs_diff_eq!((direct.matrix() - red.matrix()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = make_bell(BellState::PhiPlus, [MS, MD]).unwrap().to_density();
        assert!(matches!(rho.partial_trace(&[OD]), Err(Error::UnknownLabel(_))));
        assert!(matches!(rho.partial_trace(&[]), Err(Error::InvalidCut(_))));
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let labels = vec![MS];
        let not_unit = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(0.4)]);
        assert!(DensityMatrix::new(labels.clone(), not_unit).is_err());
        let not_herm = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(DensityMatrix::new(labels.clone(), not_herm).is_err());
        let negative = DMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityMatrix::new(labels.clone(), negative).is_err());
        let ok = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.5), c(0.5), c(0.5)]);
        let rho = DensityMatrix::new(labels, ok).unwrap();
        assert_abs_diff_eq!(rho.von_neumann_entropy(), 0.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn partial_trace_preserves_trace(
            v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
            keep_mask in 1u8..7,
        ) {
            prop_assume!(v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3);
            let amps = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
            let psi = PureState::normalized(vec![MS, MD, OD], amps).unwrap();
            let rho = psi.to_density();
            let keep: Vec<ModeLabel> = psi.labels().iter().enumerate()
                .filter(|(i, _)| keep_mask >> i & 1 == 1).map(|(_, l)| *l).collect();
            let red = rho.partial_trace(&keep).unwrap();
            prop_assert!((red.trace() - 1.0).abs() < 1e-12);
            let herm = (red.matrix() - red.matrix().adjoint()).norm();
            prop_assert!(herm < 1e-12);
            prop_assert!(red.eigenvalues()[0] >= -1e-10);
        }
    }
}
