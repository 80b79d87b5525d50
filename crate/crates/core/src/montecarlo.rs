//! Seeded event simulator for the three archetypes.
//!
//! Each trial samples generation, conversion, fiber survival and detection as
//! independent Bernoulli events. Trial `i` of a run with seed `s` draws from
//! ChaCha8 keyed by `s` on stream `i`, so results do not depend on how trials
//! are split across threads. Every trial consumes the same draws whatever the
//! detector kind, which keeps PNRD and SPD runs on identical event samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::archetypes::{least_entangled, Archetype, LinkConfig};
use crate::channel::Segment;
use crate::error::{check_range, Error, Result};
use crate::quantum::{entropy_of_entanglement, make_bell, BellState, Location, ModeLabel, PureState};
use crate::teleport::exact_average_fidelity;
use crate::transducer::{dqt_relabel, egt_generate, Efficiency, EgtSource};

/// Trials per work unit handed to the thread pool.
pub const CHUNK_TRIALS: u64 = 8192;

/// Estimates further than this many standard errors from the closed form
/// are flagged.
pub const Z_FLAG_THRESHOLD: f64 = 4.0;

/// Zero-variance runs count as matching when within this of the closed form.
const EXACT_MATCH_TOLERANCE: f64 = 1e-12;

const MS: ModeLabel = ModeLabel::microwave(Location::Source);
const OS: ModeLabel = ModeLabel::optical(Location::Source);
const OD: ModeLabel = ModeLabel::optical(Location::Destination);
const MD: ModeLabel = ModeLabel::microwave(Location::Destination);

/// Generator for trial `index` of the run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    /// Photon-number resolving: two photons are seen as two.
    Pnrd,
    /// Click/no-click: one or more photons give the same click.
    Spd,
}

impl std::str::FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pnrd" => Ok(DetectorKind::Pnrd),
            "spd" => Ok(DetectorKind::Spd),
            other => Err(Error::InvalidLink(format!("unknown detector kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub kind: DetectorKind,
    /// Per-photon detection probability.
    pub efficiency: Efficiency,
}

impl DetectorModel {
    pub fn new(kind: DetectorKind, efficiency: f64) -> Result<Self> {
        Ok(Self {
            kind,
            efficiency: Efficiency::new(efficiency)?,
        })
    }

    pub fn ideal(kind: DetectorKind) -> Self {
        Self {
            kind,
            efficiency: Efficiency::ONE,
        }
    }
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::ideal(DetectorKind::Pnrd)
    }
}

/// Knobs that only affect the swapping archetype.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct McOptions {
    pub detector: DetectorModel,
    /// Sample the half-link survival of each photon separately. By default a
    /// single survival draw is shared, which reproduces the closed form's
    /// single `e^{-l/(2L₀)}` factor.
    pub independent_photon_loss: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub herald: bool,
    pub true_entanglement: bool,
    pub distributed_ebits: f64,
    pub double_generation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub archetype: Archetype,
    pub trials: u64,
    pub seed: u64,
    pub p_e_hat: f64,
    pub herald_rate: f64,
    /// Share of heralds that leave no entanglement behind.
    pub dark_count_fraction: f64,
    pub std_error: f64,
    /// Haar-averaged teleportation fidelity over heralded trials, using the
    /// state each herald leaves behind.
    pub teleport_fidelity: Option<f64>,
}

/// Event counts; summing is exact, so any grouping of trials gives the same
/// totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    trials: u64,
    heralds: u64,
    entangled: u64,
}

impl Tally {
    fn add(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        self.heralds += other.heralds;
        self.entangled += other.entangled;
        self
    }
}

/// Samples trials for one link configuration.
#[derive(Debug, Clone)]
pub struct LinkSimulator {
    config: LinkConfig,
    options: McOptions,
    /// Entropy of the state a successful trial leaves behind.
    ebits: f64,
    entangled_state: PureState,
}

impl LinkSimulator {
    pub fn new(config: LinkConfig, options: McOptions) -> Result<Self> {
        config.validate()?;
        if config.generation_location != config.archetype.default_location() {
            return Err(Error::UnsupportedVariant(
                "Monte-Carlo sampling covers the three basic archetypes only".into(),
            ));
        }
        let entangled_state = delivered_state(&config)?;
        let ebits = entropy_of_entanglement(&entangled_state, &[MS])?;
        Ok(Self {
            config,
            options,
            ebits,
            entangled_state,
        })
    }

    pub fn config(&self) -> &LinkConfig {
        &self.config
    }

    /// Ebits carried by a trial that ends in true entanglement.
    pub fn ebits_per_success(&self) -> f64 {
        self.ebits
    }

    /// Microwave-microwave state shared after a successful trial.
    pub fn entangled_state(&self) -> &PureState {
        &self.entangled_state
    }

    pub fn trial<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialOutcome {
        let c = &self.config;
        match c.archetype {
            Archetype::EDqt => {
                let up = rng.random::<f64>() < value(c.eta_up_source);
                let fiber = rng.random::<f64>() < c.fiber.transmissivity(Segment::Full);
                let down = rng.random::<f64>() < value(c.eta_down_destination);
                self.transported(up && fiber && down)
            }
            Archetype::EgtWithDqt => {
                let fiber = rng.random::<f64>() < c.fiber.transmissivity(Segment::Full);
                let down = rng.random::<f64>() < value(c.eta_down_destination);
                self.transported(fiber && down)
            }
            Archetype::EgtWithSwapping => self.swap_trial(rng),
        }
    }

    pub fn trial_at(&self, seed: u64, index: u64) -> TrialOutcome {
        self.trial(&mut trial_rng(seed, index))
    }

    fn transported(&self, success: bool) -> TrialOutcome {
        TrialOutcome {
            herald: success,
            true_entanglement: success,
            distributed_ebits: if success { self.ebits } else { 0.0 },
            double_generation: false,
        }
    }

    fn swap_trial<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialOutcome {
        let c = &self.config;
        let t = c.fiber.transmissivity(Segment::Half);
        let eff = self.options.detector.efficiency.value();
        let gen_s = rng.random::<f64>() < value(c.eta_up_source);
        let gen_d = rng.random::<f64>() < value(c.eta_up_destination);
        let shared = rng.random::<f64>() < t;
        let own_s = rng.random::<f64>() < t;
        let own_d = rng.random::<f64>() < t;
        let det_s = rng.random::<f64>() < eff;
        let det_d = rng.random::<f64>() < eff;
        let (survive_s, survive_d) = if self.options.independent_photon_loss {
            (own_s, own_d)
        } else {
            (shared, shared)
        };
        let count = u8::from(gen_s && survive_s && det_s) + u8::from(gen_d && survive_d && det_d);
        let herald = match self.options.detector.kind {
            DetectorKind::Pnrd => count == 1,
            DetectorKind::Spd => count >= 1,
        };
        // with both photons emitted the microwave modes are left in |0 0⟩
        let true_entanglement = herald && (gen_s != gen_d);
        TrialOutcome {
            herald,
            true_entanglement,
            distributed_ebits: if true_entanglement { self.ebits } else { 0.0 },
            double_generation: gen_s && gen_d,
        }
    }

    fn tally(&self, seed: u64, start: u64, end: u64) -> Tally {
        // same streams as `trial_rng`, without re-deriving the key per trial
        let base = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Tally::default();
        for i in start..end {
            let mut rng = base.clone();
            rng.set_stream(i);
            let o = self.trial(&mut rng);
            t.trials += 1;
            t.heralds += u64::from(o.herald);
            t.entangled += u64::from(o.true_entanglement);
        }
        t
    }

    pub fn run(&self, trials: u64, seed: u64) -> Result<McEstimate> {
        if trials == 0 {
            return Err(Error::ZeroTrials);
        }
        let chunks = trials.div_ceil(CHUNK_TRIALS);
        let tally = (0..chunks)
            .into_par_iter()
            .map(|k| self.tally(seed, k * CHUNK_TRIALS, ((k + 1) * CHUNK_TRIALS).min(trials)))
            .reduce(Tally::default, Tally::add);
        self.estimate(tally, seed)
    }

    fn estimate(&self, t: Tally, seed: u64) -> Result<McEstimate> {
        let n = t.trials as f64;
        let k = t.entangled as f64;
        let p_e_hat = k * self.ebits / n;
        // every success carries the same ebits, so the sample variance is
        // that of a scaled Bernoulli
        let std_error = if t.trials > 1 {
            (self.ebits * self.ebits * k * (n - k) / (n * (n - 1.0))).sqrt() / n.sqrt()
        } else {
            0.0
        };
        let false_heralds = t.heralds - t.entangled;
        let dark_count_fraction = if t.heralds == 0 {
            0.0
        } else {
            false_heralds as f64 / t.heralds as f64
        };
        let teleport_fidelity = if t.heralds == 0 {
            None
        } else {
            let f_true = if t.entangled > 0 {
                exact_average_fidelity(&self.entangled_state)?
            } else {
                0.0
            };
            let f_false = if false_heralds > 0 {
                exact_average_fidelity(&PureState::basis(&[(MS, false), (MD, false)])?)?
            } else {
                0.0
            };
            Some((t.entangled as f64 * f_true + false_heralds as f64 * f_false) / t.heralds as f64)
        };
        Ok(McEstimate {
            archetype: self.config.archetype,
            trials: t.trials,
            seed,
            p_e_hat,
            herald_rate: t.heralds as f64 / n,
            dark_count_fraction,
            std_error,
            teleport_fidelity,
        })
    }
}

fn value(eta: Option<Efficiency>) -> f64 {
    eta.map_or(0.0, Efficiency::value)
}

/// State shared by source and destination microwave modes after a
/// successful trial, built by running the archetype's quantum operations.
fn delivered_state(config: &LinkConfig) -> Result<PureState> {
    match config.archetype {
        Archetype::EDqt => {
            // microwave pair at the source; its second half is up-converted,
            // carried over the fiber and down-converted
            let partner = MS.with_slot(1);
            let pair = make_bell(BellState::PhiPlus, [MS, partner])?;
            let optical = dqt_relabel(&pair, partner)?;
            let arrived = optical.relabel(partner.with_domain(OS.domain), OD)?;
            dqt_relabel(&arrived, OD)
        }
        Archetype::EgtWithDqt => {
            let hybrid = egt_generate(&EgtSource::BeamSplitter { eta_up: config.source_up()? }, MS, OS)?;
            dqt_relabel(&hybrid.relabel(OS, OD)?, OD)
        }
        Archetype::EgtWithSwapping => {
            // the swapped pair keeps the Schmidt weights of the less entangled
            // hybrid pair
            let eta = least_entangled(config.source_up()?, config.destination_up()?);
            let hybrid = egt_generate(&EgtSource::BeamSplitter { eta_up: eta }, MS, OS)?;
            hybrid.relabel(OS, MD)
        }
    }
}

pub fn run(config: &LinkConfig, options: McOptions, trials: u64, seed: u64) -> Result<McEstimate> {
    LinkSimulator::new(*config, options)?.run(trials, seed)
}

pub fn run_edqt(config: &LinkConfig, trials: u64, seed: u64) -> Result<McEstimate> {
    expect_archetype(config, Archetype::EDqt)?;
    run(config, McOptions::default(), trials, seed)
}

pub fn run_egt_dqt(config: &LinkConfig, trials: u64, seed: u64) -> Result<McEstimate> {
    expect_archetype(config, Archetype::EgtWithDqt)?;
    run(config, McOptions::default(), trials, seed)
}

pub fn run_egt_swap(config: &LinkConfig, options: McOptions, trials: u64, seed: u64) -> Result<McEstimate> {
    expect_archetype(config, Archetype::EgtWithSwapping)?;
    run(config, options, trials, seed)
}

fn expect_archetype(config: &LinkConfig, archetype: Archetype) -> Result<()> {
    if config.archetype == archetype {
        Ok(())
    } else {
        Err(Error::InvalidLink(format!(
            "expected a {archetype} link, got {}",
            config.archetype
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub archetype: Archetype,
    pub p_e_hat: f64,
    pub p_e_closed: f64,
    pub std_error: f64,
    pub z_score: f64,
    pub flagged: bool,
}

/// z-score of an estimate against a reference value.
pub fn compare(estimate: &McEstimate, p_e_closed: f64) -> ValidationReport {
    let diff = estimate.p_e_hat - p_e_closed;
    let z_score = if estimate.std_error > 0.0 {
        diff / estimate.std_error
    } else if diff.abs() <= EXACT_MATCH_TOLERANCE {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    };
    ValidationReport {
        archetype: estimate.archetype,
        p_e_hat: estimate.p_e_hat,
        p_e_closed,
        std_error: estimate.std_error,
        z_score,
        flagged: !(z_score.abs() <= Z_FLAG_THRESHOLD),
    }
}

/// Expected `p̂_e` for the given options: the closed form, times the
/// detector efficiency for the swapping archetype (a heralding photon must
/// be detected).
pub fn expected_p_e(config: &LinkConfig, options: &McOptions) -> Result<f64> {
    let p = config.closed_form()?.p_e;
    Ok(match config.archetype {
        Archetype::EgtWithSwapping => p * options.detector.efficiency.value(),
        _ => p,
    })
}

pub fn estimate_vs_closed_form(
    config: &LinkConfig,
    options: McOptions,
    trials: u64,
    seed: u64,
) -> Result<(McEstimate, ValidationReport)> {
    let estimate = run(config, options, trials, seed)?;
    let report = compare(&estimate, expected_p_e(config, &options)?);
    Ok((estimate, report))
}

/// Twelve links per archetype spanning low/high efficiencies and short/long
/// fibers.
pub fn validation_preset() -> Result<Vec<LinkConfig>> {
    let sources = [0.15, 0.5, 0.9];
    let destinations = [0.3, 1.0];
    let lengths = [0.0, 21.714_724_095_162_59];
    let mut configs = Vec::with_capacity(36);
    for archetype in Archetype::ALL {
        for &s in &sources {
            for &d in &destinations {
                for &l in &lengths {
                    let fiber = crate::channel::FiberLink::with_length(l)?;
                    configs.push(LinkConfig::symmetric(
                        archetype,
                        Efficiency::new(s)?,
                        Efficiency::new(d)?,
                        fiber,
                    ));
                }
            }
        }
    }
    Ok(configs)
}

/// Checks a trial count against a lower bound.
pub fn require_trials(trials: u64, minimum: u64) -> Result<u64> {
    check_range("trials", trials as f64, minimum as f64, f64::MAX, "[minimum, inf)")?;
    Ok(trials)
}
