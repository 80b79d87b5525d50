//! Teleportation of one qubit over a distributed EPR pair, simulated exactly
//! on three modes: the informational qubit and the source ebit at the
//! source, the destination ebit at the destination.
//!
//! The source applies CNOT (informational qubit as control) and H, measures
//! both modes to get `(m1, m2)`, and the destination applies `X^{m2}` then
//! `Z^{m1}`. A resource in another Bell frame is first mapped to `Φ⁺` by a
//! pre-agreed local Pauli on the destination ebit.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::trial_rng;
use crate::quantum::gates::{cnot, hadamard, pauli_x, pauli_z};
use crate::quantum::{fidelity, make_bell, BellState, Location, ModeLabel, PureState};

/// Source half of the resource.
pub const SOURCE_EBIT: ModeLabel = ModeLabel::microwave(Location::Source);
/// Destination half of the resource.
pub const DESTINATION_EBIT: ModeLabel = ModeLabel::microwave(Location::Destination);
/// The qubit to teleport, held next to the source ebit.
pub const INFO_QUBIT: ModeLabel = ModeLabel::microwave(Location::Source).with_slot(1);

/// `a|0⟩ + b|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationalQubit {
    a: Complex64,
    b: Complex64,
}

impl InformationalQubit {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if !((norm - 1.0).abs() <= crate::quantum::NORM_TOLERANCE) {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { a, b })
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        Self {
            a: Complex64::new((0.5 * theta).cos(), 0.0),
            b: Complex64::from_polar((0.5 * theta).sin(), phi),
        }
    }

    /// Haar-random qubit (uniform on the Bloch sphere).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let cos_theta = 1.0 - 2.0 * rng.random::<f64>();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        Self::from_bloch(cos_theta.clamp(-1.0, 1.0).acos(), phi)
    }

    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (self.a, self.b)
    }

    /// The qubit as a one-mode state on `label`.
    pub fn state_at(&self, label: ModeLabel) -> PureState {
        PureState::new(vec![label], vec![self.a, self.b]).expect("qubit is normalized")
    }

    /// Same qubit times a global phase.
    pub fn with_phase(&self, phase: f64) -> Self {
        let p = Complex64::from_polar(1.0, phase);
        Self {
            a: self.a * p,
            b: self.b * p,
        }
    }

    /// Six states forming three mutually unbiased bases; averaging a
    /// fidelity over them gives the exact Haar average.
    pub fn mub_states() -> [Self; 6] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        [
            Self { a: c(1.0, 0.0), b: c(0.0, 0.0) },
            Self { a: c(0.0, 0.0), b: c(1.0, 0.0) },
            Self { a: c(h, 0.0), b: c(h, 0.0) },
            Self { a: c(h, 0.0), b: c(-h, 0.0) },
            Self { a: c(h, 0.0), b: c(0.0, h) },
            Self { a: c(h, 0.0), b: c(0.0, -h) },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsmOutcome {
    /// `(m1, m2)`: informational qubit, then source ebit.
    pub bits: (u8, u8),
    pub probability: f64,
}

/// How the Bell-measurement outcome is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutcomeSelector {
    /// Force a particular outcome; fails if it has zero probability.
    Fixed(u8, u8),
    /// Sample with a uniform draw in `[0, 1)`.
    Draw(f64),
}

/// One BSM outcome with the corrected destination state (absent when the
/// outcome cannot occur).
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportBranch {
    pub outcome: BsmOutcome,
    pub state: Option<PureState>,
}

const OUTCOMES: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

/// Copies the two-mode resource onto the source/destination ebit labels,
/// keeping its amplitude layout (first canonical label becomes the source).
fn place_resource(epr: &PureState) -> Result<PureState> {
    if epr.num_modes() != 2 {
        return Err(Error::MalformedResource(format!(
            "expected 2 modes, got {}",
            epr.num_modes()
        )));
    }
    PureState::new(vec![SOURCE_EBIT, DESTINATION_EBIT], epr.amplitudes().to_vec())
        .map_err(|e| Error::MalformedResource(e.to_string()))
}

fn frame_correction(state: &PureState, frame: BellState) -> Result<PureState> {
    match frame {
        BellState::PhiPlus => Ok(state.clone()),
        BellState::PhiMinus => state.apply_single_mode_gate(DESTINATION_EBIT, &pauli_z()),
        BellState::PsiPlus => state.apply_single_mode_gate(DESTINATION_EBIT, &pauli_x()),
        BellState::PsiMinus => state
            .apply_single_mode_gate(DESTINATION_EBIT, &pauli_z())?
            .apply_single_mode_gate(DESTINATION_EBIT, &pauli_x()),
    }
}

/// Runs the circuit up to the measurement and returns the four branches.
pub fn teleport_all(psi: &InformationalQubit, epr: &PureState, frame: BellState) -> Result<[TeleportBranch; 4]> {
    let resource = frame_correction(&place_resource(epr)?, frame)?;
    let joint = psi
        .state_at(INFO_QUBIT)
        .tensor(&resource)?
        .apply_two_mode_gate([INFO_QUBIT, SOURCE_EBIT], &cnot())?
        .apply_single_mode_gate(INFO_QUBIT, &hadamard())?;

    let branch = |(m1, m2): (u8, u8)| -> Result<TeleportBranch> {
        let (p1, after_info) = joint.measure(INFO_QUBIT, m1 == 1)?;
        let Some(after_info) = after_info else {
            return Ok(TeleportBranch { outcome: BsmOutcome { bits: (m1, m2), probability: 0.0 }, state: None });
        };
        let (p2, remote) = after_info.measure(SOURCE_EBIT, m2 == 1)?;
        let outcome = BsmOutcome { bits: (m1, m2), probability: p1 * p2 };
        let state = match remote {
            Some(mut s) => {
                if m2 == 1 {
                    s = s.apply_single_mode_gate(DESTINATION_EBIT, &pauli_x())?;
                }
                if m1 == 1 {
                    s = s.apply_single_mode_gate(DESTINATION_EBIT, &pauli_z())?;
                }
                Some(s)
            }
            None => None,
        };
        Ok(TeleportBranch { outcome, state })
    };
    Ok([
        branch(OUTCOMES[0])?,
        branch(OUTCOMES[1])?,
        branch(OUTCOMES[2])?,
        branch(OUTCOMES[3])?,
    ])
}

/// Teleports `psi` and returns the selected outcome with the corrected state
/// of the destination ebit.
pub fn teleport(
    psi: &InformationalQubit,
    epr: &PureState,
    frame: BellState,
    selector: OutcomeSelector,
) -> Result<(BsmOutcome, PureState)> {
    let branches = teleport_all(psi, epr, frame)?;
    let chosen = match selector {
        OutcomeSelector::Fixed(m1, m2) => {
            if m1 > 1 || m2 > 1 {
                return Err(Error::ImpossibleOutcome(m1, m2));
            }
            branches
                .into_iter()
                .find(|b| b.outcome.bits == (m1, m2))
                .expect("all four outcomes enumerated")
        }
        OutcomeSelector::Draw(u) => {
            let mut cumulative = 0.0;
            let mut last = None;
            let mut pick = None;
            for b in branches {
                if b.state.is_none() {
                    continue;
                }
                cumulative += b.outcome.probability;
                if pick.is_none() && u < cumulative {
                    pick = Some(b.clone());
                }
                last = Some(b);
            }
            // a draw just below 1 can exceed the rounded cumulative sum
            pick.or(last).expect("some outcome has nonzero probability")
        }
    };
    let (m1, m2) = chosen.outcome.bits;
    let state = chosen.state.ok_or(Error::ImpossibleOutcome(m1, m2))?;
    Ok((chosen.outcome, state))
}

/// Bell frame closest to the resource, used to pick the pre-agreed
/// destination correction.
pub fn nearest_bell_frame(epr: &PureState) -> Result<BellState> {
    let placed = place_resource(epr)?;
    let mut best = (BellState::PhiPlus, f64::NEG_INFINITY);
    for kind in BellState::ALL {
        let f = fidelity(&make_bell(kind, [SOURCE_EBIT, DESTINATION_EBIT])?, &placed)?;
        if f > best.1 {
            best = (kind, f);
        }
    }
    Ok(best.0)
}

/// Fidelity with `psi` averaged over the four outcomes.
pub fn outcome_averaged_fidelity(psi: &InformationalQubit, epr: &PureState, frame: BellState) -> Result<f64> {
    let target = psi.state_at(DESTINATION_EBIT);
    teleport_all(psi, epr, frame)?
        .iter()
        .filter_map(|b| b.state.as_ref().map(|s| (b.outcome.probability, s)))
        .try_fold(0.0, |acc, (p, s)| Ok(acc + p * fidelity(&target, s)?))
}

/// Mean outcome-averaged fidelity over `n_inputs` Haar-random inputs, using
/// the nearest Bell frame. Input `i` is drawn from substream `i` of `seed`.
pub fn average_fidelity(epr: &PureState, n_inputs: u64, seed: u64) -> Result<f64> {
    if n_inputs == 0 {
        return Err(Error::ZeroTrials);
    }
    let frame = nearest_bell_frame(epr)?;
    let mut total = 0.0;
    for i in 0..n_inputs {
        let psi = InformationalQubit::random(&mut trial_rng(seed, i));
        total += outcome_averaged_fidelity(&psi, epr, frame)?;
    }
    Ok(total / n_inputs as f64)
}

/// Exact Haar-averaged fidelity, via the six mutually unbiased states.
pub fn exact_average_fidelity(epr: &PureState) -> Result<f64> {
    let frame = nearest_bell_frame(epr)?;
    let states = InformationalQubit::mub_states();
    let total = states
        .iter()
        .try_fold(0.0, |acc, psi| Ok::<_, Error>(acc + outcome_averaged_fidelity(psi, epr, frame)?))?;
    Ok(total / states.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn skewed() -> PureState {
        let c = |x: f64| Complex64::new(x, 0.0);
        PureState::new(
            vec![SOURCE_EBIT, DESTINATION_EBIT],
            vec![c(0.0), c(0.15f64.sqrt()), c(0.85f64.sqrt()), c(0.0)],
        )
        .unwrap()
    }

    fn phi_plus() -> PureState {
        make_bell(BellState::PhiPlus, [SOURCE_EBIT, DESTINATION_EBIT]).unwrap()
    }

    #[test]
    fn basis_input_is_recovered_for_every_outcome() {
        let zero = InformationalQubit::from_bloch(0.0, 0.0);
        for b in teleport_all(&zero, &phi_plus(), BellState::PhiPlus).unwrap() {
            assert_abs_diff_eq!(b.outcome.probability, 0.25, epsilon = 1e-15);
            let f = fidelity(&zero.state_at(DESTINATION_EBIT), b.state.as_ref().unwrap()).unwrap();
            assert_abs_diff_eq!(f, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn plus_state_is_recovered() {
        let plus = InformationalQubit::from_bloch(std::f64::consts::FRAC_PI_2, 0.0);
        assert_abs_diff_eq!(
            outcome_averaged_fidelity(&plus, &phi_plus(), BellState::PhiPlus).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn other_bell_frames_are_corrected() {
        for kind in BellState::ALL {
            let epr = make_bell(kind, [SOURCE_EBIT, DESTINATION_EBIT]).unwrap();
            assert_eq!(nearest_bell_frame(&epr).unwrap(), kind);
            assert_abs_diff_eq!(average_fidelity(&epr, 20, 3).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn fixed_and_drawn_outcomes() {
        let psi = InformationalQubit::from_bloch(1.0, 0.3);
        let (o, _) = teleport(&psi, &phi_plus(), BellState::PhiPlus, OutcomeSelector::Fixed(1, 0)).unwrap();
        assert_eq!(o.bits, (1, 0));
        let (o, _) = teleport(&psi, &phi_plus(), BellState::PhiPlus, OutcomeSelector::Draw(0.6)).unwrap();
        assert_eq!(o.bits, (1, 0));
        let (o, _) = teleport(&psi, &phi_plus(), BellState::PhiPlus, OutcomeSelector::Draw(0.999_999_999_999_999_9)).unwrap();
        assert_eq!(o.bits, (1, 1));
        assert!(teleport(&psi, &phi_plus(), BellState::PhiPlus, OutcomeSelector::Fixed(2, 0)).is_err());
    }

    #[test]
    fn product_resource_forbids_some_outcomes() {
        let product = PureState::basis(&[(SOURCE_EBIT, false), (DESTINATION_EBIT, false)]).unwrap();
        let zero = InformationalQubit::from_bloch(0.0, 0.0);
        // |0⟩ with |00⟩: CNOT does nothing, so m2 = 0 always
        assert!(matches!(
            teleport(&zero, &product, BellState::PhiPlus, OutcomeSelector::Fixed(0, 1)),
            Err(Error::ImpossibleOutcome(0, 1))
        ));
        let f = exact_average_fidelity(&product).unwrap();
        assert_abs_diff_eq!(f, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn malformed_resources_are_rejected() {
        let one_mode = InformationalQubit::from_bloch(0.0, 0.0).state_at(SOURCE_EBIT);
        assert!(matches!(nearest_bell_frame(&one_mode), Err(Error::MalformedResource(_))));
        assert!(InformationalQubit::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).is_err());
        assert!(average_fidelity(&phi_plus(), 0, 1).is_err());
    }

    #[test]
    fn skewed_resource_matches_singlet_fraction_formula() {
        // F = (2f + 1)/3 with f the overlap with the nearest Bell state
        let epr = skewed();
        assert_eq!(nearest_bell_frame(&epr).unwrap(), BellState::PsiPlus);
        let f = 0.5 * (0.15f64.sqrt() + 0.85f64.sqrt()).powi(2);
        let expected = (2.0 * f + 1.0) / 3.0;
        assert_abs_diff_eq!(exact_average_fidelity(&epr).unwrap(), expected, epsilon = 1e-12);
        // sampled inputs converge to the same value
        assert_abs_diff_eq!(average_fidelity(&epr, 20_000, 11).unwrap(), expected, epsilon = 5e-3);
    }

    proptest! {
        #[test]
        fn maximal_resource_is_exact(theta in 0.0f64..std::f64::consts::PI, phi in 0.0f64..std::f64::consts::TAU) {
            let psi = InformationalQubit::from_bloch(theta, phi);
            for b in teleport_all(&psi, &phi_plus(), BellState::PhiPlus).unwrap() {
                prop_assert!((b.outcome.probability - 0.25).abs() < 1e-12);
                let f = fidelity(&psi.state_at(DESTINATION_EBIT), b.state.as_ref().unwrap()).unwrap();
                prop_assert!((f - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn global_phase_commutes(theta in 0.0f64..PI, phi in 0.0f64..TAU, g in 0.0f64..TAU) {
            let psi = InformationalQubit::from_bloch(theta, phi);
            let epr = skewed();
            let a = teleport_all(&psi, &epr, BellState::PsiPlus).unwrap();
            let b = teleport_all(&psi.with_phase(g), &epr, BellState::PsiPlus).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.outcome.probability - y.outcome.probability).abs() < 1e-12);
                let p = Complex64::from_polar(1.0, g);
                for (u, v) in x.state.as_ref().unwrap().amplitudes().iter().zip(y.state.as_ref().unwrap().amplitudes()) {
                    prop_assert!((u * p - v).norm() < 1e-12);
                }
            }
        }

        #[test]
        fn outcome_probabilities_sum_to_one(theta in 0.0f64..PI, phi in 0.0f64..TAU, eta in 0.0f64..=1.0) {
            let c = |x: f64| Complex64::new(x, 0.0);
            let epr = PureState::new(vec![SOURCE_EBIT, DESTINATION_EBIT],
                vec![c(0.0), c(eta.sqrt()), c((1.0 - eta).sqrt()), c(0.0)]).unwrap();
            let psi = InformationalQubit::from_bloch(theta, phi);
            let total: f64 = teleport_all(&psi, &epr, BellState::PsiPlus).unwrap().iter().map(|b| b.outcome.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
