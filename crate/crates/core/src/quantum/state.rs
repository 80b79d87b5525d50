use std::collections::BTreeSet;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    format_labels, BellState, DensityMatrix, ModeLabel, MAX_MODES, NORM_TOLERANCE,
    UNITARY_TOLERANCE,
};
use crate::error::{check_range, Error, Result};

/// A normalized pure state over a set of uniquely labeled two-level modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct PureState {
    labels: Vec<ModeLabel>,
    amplitudes: Vec<Complex64>,
}

/// JSON form: `{labels: [...], amplitudes: [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct StateRepr {
    labels: Vec<ModeLabel>,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<StateRepr> for PureState {
    type Error = Error;

    fn try_from(repr: StateRepr) -> Result<Self> {
        let amps = repr
            .amplitudes
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        PureState::new(repr.labels, amps)
    }
}

impl From<PureState> for StateRepr {
    fn from(state: PureState) -> Self {
        StateRepr {
            labels: state.labels,
            amplitudes: state.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

/// Bit of basis index `index` owned by mode position `pos` in a `k`-mode layout.
#[inline]
pub(crate) fn bit_at(index: usize, pos: usize, k: usize) -> usize {
    (index >> (k - 1 - pos)) & 1
}

/// Packs the bits at `positions` (first position most significant).
#[inline]
pub(crate) fn gather_bits(index: usize, positions: &[usize], k: usize) -> usize {
    positions
        .iter()
        .fold(0, |acc, &p| (acc << 1) | bit_at(index, p, k))
}

pub(crate) fn validate_labels(labels: &[ModeLabel]) -> Result<()> {
    if labels.len() > MAX_MODES {
        return Err(Error::TooManyModes {
            max: MAX_MODES,
            actual: labels.len(),
        });
    }
    let mut seen = BTreeSet::new();
    for &label in labels {
        if !seen.insert(label) {
            return Err(Error::LabelCollision(label));
        }
    }
    Ok(())
}

/// Resolves a set of labels to sorted, deduplicated positions in `labels`.
pub(crate) fn positions_of(labels: &[ModeLabel], subset: &[ModeLabel]) -> Result<Vec<usize>> {
    let mut positions = subset
        .iter()
        .map(|l| {
            labels
                .binary_search(l)
                .map_err(|_| Error::UnknownLabel(*l))
        })
        .collect::<Result<Vec<_>>>()?;
    positions.sort_unstable();
    positions.dedup();
    Ok(positions)
}

fn canonicalize(labels: Vec<ModeLabel>, amplitudes: Vec<Complex64>) -> (Vec<ModeLabel>, Vec<Complex64>) {
    let mut sorted = labels.clone();
    sorted.sort();
    if sorted == labels {
        return (labels, amplitudes);
    }
    let k = labels.len();
    // position in the input layout of each canonical mode
    let order: Vec<usize> = sorted
        .iter()
        .map(|l| labels.iter().position(|x| x == l).expect("label present"))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); amplitudes.len()];
    for (idx, amp) in amplitudes.into_iter().enumerate() {
        out[gather_bits(idx, &order, k)] = amp;
    }
    (sorted, out)
}

impl PureState {
    /// Builds a state from amplitudes laid out in the order of `labels`
    /// (first label is the most significant bit). The result is re-sorted to
    /// canonical label order.
    pub fn new(labels: Vec<ModeLabel>, amplitudes: Vec<Complex64>) -> Result<Self> {
        validate_labels(&labels)?;
        let expected = 1usize << labels.len();
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                modes: labels.len(),
                expected,
                actual: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
            return Err(Error::NotNormalized(norm));
        }
        let (labels, amplitudes) = canonicalize(labels, amplitudes);
        Ok(Self { labels, amplitudes })
    }

    /// Like [`PureState::new`] but rescales the amplitudes to unit norm.
    pub fn normalized(labels: Vec<ModeLabel>, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized(norm));
        }
        let scale = norm.sqrt().recip();
        amplitudes.iter_mut().for_each(|a| *a *= scale);
        Self::new(labels, amplitudes)
    }

    /// Fock basis state with the given occupation per mode.
    pub fn basis(occupations: &[(ModeLabel, bool)]) -> Result<Self> {
        let labels: Vec<ModeLabel> = occupations.iter().map(|(l, _)| *l).collect();
        let index = occupations
            .iter()
            .fold(0usize, |acc, (_, occ)| (acc << 1) | usize::from(*occ));
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << labels.len()];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(labels, amps)
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn num_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn position(&self, label: ModeLabel) -> Result<usize> {
        self.labels
            .binary_search(&label)
            .map_err(|_| Error::UnknownLabel(label))
    }

    /// Amplitude of the basis state with the given occupations; every mode of
    /// the state must be listed exactly once.
    pub fn amplitude_for(&self, occupations: &[(ModeLabel, bool)]) -> Result<Complex64> {
        let listed: Vec<ModeLabel> = occupations.iter().map(|(l, _)| *l).collect();
        validate_labels(&listed)?;
        let mut sorted = listed.clone();
        sorted.sort();
        if sorted != self.labels {
            return Err(Error::LabelMismatch {
                left: format_labels(&self.labels),
                right: format_labels(&listed),
            });
        }
        let k = self.labels.len();
        let mut index = 0usize;
        for (label, occ) in occupations {
            if *occ {
                index |= 1 << (k - 1 - self.position(*label)?);
            }
        }
        Ok(self.amplitudes[index])
    }

    /// `self ⊗ other`, re-sorted to canonical order.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        validate_labels(&labels)?;
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        let (labels, amplitudes) = canonicalize(labels, amps);
        Ok(Self { labels, amplitudes })
    }

    pub fn apply_single_mode_gate(&self, label: ModeLabel, gate: &Matrix2<Complex64>) -> Result<Self> {
        let dyn_gate = DMatrix::from_iterator(2, 2, gate.iter().copied());
        self.apply_gate(&[label], &dyn_gate)
    }

    /// Applies a 4×4 gate whose basis is `|ab⟩` with `targets[0]` as the most
    /// significant bit, independent of the canonical order of the two labels.
    pub fn apply_two_mode_gate(&self, targets: [ModeLabel; 2], gate: &Matrix4<Complex64>) -> Result<Self> {
        if targets[0] == targets[1] {
            return Err(Error::LabelCollision(targets[0]));
        }
        let dyn_gate = DMatrix::from_iterator(4, 4, gate.iter().copied());
        self.apply_gate(&targets, &dyn_gate)
    }

    fn apply_gate(&self, targets: &[ModeLabel], gate: &DMatrix<Complex64>) -> Result<Self> {
        let deviation = unitary_deviation(gate);
        if !(deviation <= UNITARY_TOLERANCE) {
            return Err(Error::NotUnitary(deviation));
        }
        let positions = targets
            .iter()
            .map(|l| self.position(*l))
            .collect::<Result<Vec<_>>>()?;
        let k = self.labels.len();
        let t = positions.len();
        let mask: usize = positions.iter().map(|&p| 1usize << (k - 1 - p)).sum();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let col = gather_bits(idx, &positions, k);
            let rest = idx & !mask;
            for row in 0..(1usize << t) {
                let coeff = gate[(row, col)];
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                let mut target_idx = rest;
                for (j, &p) in positions.iter().enumerate() {
                    if (row >> (t - 1 - j)) & 1 == 1 {
                        target_idx |= 1 << (k - 1 - p);
                    }
                }
                out[target_idx] += coeff * amp;
            }
        }
        Ok(Self {
            labels: self.labels.clone(),
            amplitudes: out,
        })
    }

    /// Renames a mode without touching amplitudes (beyond re-sorting).
    pub fn relabel(&self, from: ModeLabel, to: ModeLabel) -> Result<Self> {
        let pos = self.position(from)?;
        if from != to && self.labels.contains(&to) {
            return Err(Error::LabelCollision(to));
        }
        let mut labels = self.labels.clone();
        labels[pos] = to;
        let (labels, amplitudes) = canonicalize(labels, self.amplitudes.clone());
        Ok(Self { labels, amplitudes })
    }

    /// Projects `label` onto occupation `outcome`. Returns the outcome
    /// probability and, when it is nonzero, the normalized post-measurement
    /// state of the remaining modes.
    pub fn measure(&self, label: ModeLabel, outcome: bool) -> Result<(f64, Option<PureState>)> {
        let pos = self.position(label)?;
        let k = self.labels.len();
        let keep: Vec<usize> = (0..k).filter(|&p| p != pos).collect();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << keep.len()];
        let mut prob = 0.0;
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            if bit_at(idx, pos, k) == usize::from(outcome) {
                amps[gather_bits(idx, &keep, k)] = *amp;
                prob += amp.norm_sqr();
            }
        }
        if prob <= f64::MIN_POSITIVE {
            return Ok((0.0, None));
        }
        let scale = prob.sqrt().recip();
        amps.iter_mut().for_each(|a| *a *= scale);
        let labels = keep.iter().map(|&p| self.labels[p]).collect();
        Ok((prob, Some(Self { labels, amplitudes: amps })))
    }

    pub fn to_density(&self) -> DensityMatrix {
        let n = self.amplitudes.len();
        let matrix = DMatrix::from_fn(n, n, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityMatrix::from_parts_unchecked(self.labels.clone(), matrix)
    }

    /// Reduced state over `keep`, computed as `M M†` with `M` the amplitude
    /// matrix split between kept and traced modes.
    pub fn reduced_density(&self, keep: &[ModeLabel]) -> Result<DensityMatrix> {
        let kept = positions_of(&self.labels, keep)?;
        if kept.is_empty() {
            return Err(Error::InvalidCut("kept subsystem is empty".into()));
        }
        let k = self.labels.len();
        let traced: Vec<usize> = (0..k).filter(|p| !kept.contains(p)).collect();
        let rows = 1 << kept.len();
        let cols = 1 << traced.len();
        let mut m = DMatrix::zeros(rows, cols);
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            m[(gather_bits(idx, &kept, k), gather_bits(idx, &traced, k))] = *amp;
        }
        let rho = &m * m.adjoint();
        let labels = kept.iter().map(|&p| self.labels[p]).collect();
        Ok(DensityMatrix::from_parts_unchecked(labels, rho))
    }
}

pub(crate) fn unitary_deviation(u: &DMatrix<Complex64>) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let product = u.adjoint() * u;
    let n = u.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            let d = (product[(i, j)] - Complex64::new(target, 0.0)).norm();
            worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
        }
    }
    worst
}

/// One of the four Bell states over two distinct modes. Amplitude positions
/// refer to the order of `labels` (`|01⟩` means the first label is empty).
pub fn make_bell(kind: BellState, labels: [ModeLabel; 2]) -> Result<PureState> {
    if labels[0] == labels[1] {
        return Err(Error::LabelCollision(labels[0]));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (i, j, sign) = match kind {
        BellState::PhiPlus => (0b00, 0b11, 1.0),
        BellState::PhiMinus => (0b00, 0b11, -1.0),
        BellState::PsiPlus => (0b01, 0b10, 1.0),
        BellState::PsiMinus => (0b01, 0b10, -1.0),
    };
    let mut amps = vec![Complex64::new(0.0, 0.0); 4];
    amps[i] = Complex64::new(h, 0.0);
    amps[j] = Complex64::new(sign * h, 0.0);
    PureState::new(labels.to_vec(), amps)
}

/// `|⟨a|b⟩|²` for states over the same labels.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    if a.labels != b.labels {
        return Err(Error::LabelMismatch {
            left: format_labels(&a.labels),
            right: format_labels(&b.labels),
        });
    }
    let overlap: Complex64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(overlap.norm_sqr().clamp(0.0, 1.0))
}

/// Von Neumann entropy (in ebits) of the reduced state on `cut`.
pub fn entropy_of_entanglement(psi: &PureState, cut: &[ModeLabel]) -> Result<f64> {
    let positions = positions_of(psi.labels(), cut)?;
    if positions.is_empty() || positions.len() == psi.num_modes() {
        return Err(Error::InvalidCut(format!(
            "cut {} must be a proper nonempty subset of {}",
            format_labels(cut),
            format_labels(psi.labels())
        )));
    }
    // the smaller side gives the smaller eigenproblem; the spectra coincide
    let keep: Vec<ModeLabel> = if 2 * positions.len() <= psi.num_modes() {
        positions.iter().map(|&p| psi.labels()[p]).collect()
    } else {
        (0..psi.num_modes())
            .filter(|p| !positions.contains(p))
            .map(|p| psi.labels()[p])
            .collect()
    };
    Ok(psi.reduced_density(&keep)?.von_neumann_entropy())
}

/// `S(η) = -η log₂η - (1-η) log₂(1-η)` with `S(0) = S(1) = 0`.
pub fn binary_entropy(eta: f64) -> Result<f64> {
    check_range("eta", eta, 0.0, 1.0, "[0, 1]")?;
    Ok(xlog2x_neg(eta) + xlog2x_neg(1.0 - eta))
}

/// `-x log₂ x` with the `0·log 0 = 0` convention.
#[inline]
pub(crate) fn xlog2x_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}
