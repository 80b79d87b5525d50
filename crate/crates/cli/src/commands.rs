use std::io::Write;

use qtlink::archetypes::{Archetype, DistributionOutcome, GenerationLocation, LinkConfig};
use qtlink::channel::{FiberLink, DEFAULT_ATTENUATION_DB_PER_KM};
use qtlink::figures::{run_sweep, AxisRange, FigureTarget, SweepAxis, SweepSpec, ONE_WAY_THRESHOLD};
use qtlink::montecarlo::{
    compare, estimate_vs_closed_form, expected_p_e, require_trials, run, validation_preset, DetectorKind,
    DetectorModel, McEstimate, McOptions, ValidationReport,
};
use qtlink::quantum::{entropy_of_entanglement, fidelity, make_bell, BellState, Location, ModeLabel, PureState};
use qtlink::teleport::{
    average_fidelity, exact_average_fidelity, nearest_bell_frame, teleport_all, InformationalQubit,
    DESTINATION_EBIT, SOURCE_EBIT,
};
use qtlink::transducer::{conversion_efficiency, egt_generate, CouplingRegime, Efficiency, EgtSource, TransducerParams};
use serde::Serialize;

use crate::args::{EfficiencyArgs, Format, PeArgs, SweepArgs, TeleportArgs, ValidateArgs};
use crate::config::{resolve_seed, Config};
use crate::error::CliError;
use crate::output::{fmt_sig, with_sink, write_dataset, write_json, write_pairs};

pub const MIN_VALIDATION_TRIALS: u64 = 10_000;
pub const DEFAULT_VALIDATION_TRIALS: u64 = 1_000_000;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Serialize)]
struct EfficiencyReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    cooperativity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zeta_o: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zeta_m: Option<f64>,
    eta: f64,
    one_way_positive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    transducer: Option<TransducerParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coupling_regime: Option<CouplingRegime>,
}

pub fn efficiency(args: &EfficiencyArgs) -> Result<(), CliError> {
    let cfg = Config::load(args.config.as_deref())?;
    let hardware = [
        ("g0", cfg.pick_any(args.g0, &["g0", "g0-hz"])?),
        ("pump-photons", cfg.pick(args.pump_photons, "pump-photons")?),
        ("kappa-o", cfg.pick_any(args.kappa_o, &["kappa-o", "kappa-o-hz"])?),
        ("kappa-m", cfg.pick_any(args.kappa_m, &["kappa-m", "kappa-m-hz"])?),
        ("kappa-oe", cfg.pick_any(args.kappa_oe, &["kappa-oe", "kappa-oe-hz"])?),
        ("kappa-me", cfg.pick_any(args.kappa_me, &["kappa-me", "kappa-me-hz"])?),
    ];
    let eta_override = cfg.pick(args.eta, "eta")?;
    let c = cfg.pick_any(args.c, &["c", "cooperativity"])?;
    let zeta_o = cfg.pick(args.zeta_o, "zeta-o")?;
    let zeta_m = cfg.pick(args.zeta_m, "zeta-m")?;
    let grid = cfg.flag(args.grid, "grid")?;
    let format = cfg.pick(args.format.map(format_name), "format")?;
    cfg.finish()?;
    let format = format.map(|f: String| parse_format(&f)).transpose()?;

    let report = if let Some(eta) = eta_override {
        if c.is_some() || zeta_o.is_some() || zeta_m.is_some() || hardware.iter().any(|(_, v)| v.is_some()) {
            return Err(usage("--eta replaces the cooperativity and transducer inputs"));
        }
        let eta = efficiency_arg("eta", eta)?.value();
        Some(EfficiencyReport {
            cooperativity: None,
            zeta_o: None,
            zeta_m: None,
            eta,
            one_way_positive: eta > ONE_WAY_THRESHOLD,
            transducer: None,
            coupling_regime: None,
        })
    } else if hardware.iter().any(|(_, v)| v.is_some()) {
        if c.is_some() || zeta_o.is_some() || zeta_m.is_some() {
            return Err(usage("give either --C/--zeta-o/--zeta-m or the transducer rates, not both"));
        }
        let missing: Vec<&str> = hardware.iter().filter(|(_, v)| v.is_none()).map(|(k, _)| *k).collect();
        if !missing.is_empty() {
            return Err(usage(format!("transducer rates incomplete, missing --{}", missing.join(", --"))));
        }
        let v: Vec<f64> = hardware.iter().map(|(_, v)| v.unwrap()).collect();
        let params = TransducerParams {
            g0_hz: v[0],
            pump_photons: v[1],
            kappa_o_hz: v[2],
            kappa_m_hz: v[3],
            kappa_oe_hz: v[4],
            kappa_me_hz: v[5],
        };
        let (zo, zm) = params.extraction_ratios()?;
        let eta = params.efficiency()?.value();
        Some(EfficiencyReport {
            cooperativity: Some(params.cooperativity()?),
            zeta_o: Some(zo),
            zeta_m: Some(zm),
            eta,
            one_way_positive: eta > ONE_WAY_THRESHOLD,
            transducer: Some(params),
            coupling_regime: Some(params.coupling_regime()),
        })
    } else if let Some(c) = c {
        let (zo, zm) = (zeta_o.unwrap_or(1.0), zeta_m.unwrap_or(1.0));
        let eta = conversion_efficiency(c, zo, zm)?.value();
        Some(EfficiencyReport {
            cooperativity: Some(c),
            zeta_o: Some(zo),
            zeta_m: Some(zm),
            eta,
            one_way_positive: eta > ONE_WAY_THRESHOLD,
            transducer: None,
            coupling_regime: None,
        })
    } else {
        None
    };

    match (&report, grid) {
        (None, false) => return Err(usage("efficiency needs --C (or the transducer rates) or --grid")),
        (Some(r), _) => with_sink(None, |w| {
            if args.json {
                write_json(w, r)
            } else {
                let mut pairs = Vec::new();
                for (k, v) in [("cooperativity", r.cooperativity), ("zeta_o", r.zeta_o), ("zeta_m", r.zeta_m)] {
                    if let Some(v) = v {
                        pairs.push((k, fmt_sig(v)));
                    }
                }
                pairs.push(("eta", fmt_sig(r.eta)));
                pairs.push(("one_way_positive", r.one_way_positive.to_string()));
                if let Some(regime) = r.coupling_regime {
                    pairs.push(("coupling_regime", regime.to_string()));
                }
                write_pairs(w, &pairs)
            }
        })?,
        _ => {}
    }
    if grid {
        let dataset = run_sweep(&SweepSpec::preset(FigureTarget::Fig5))?;
        let format = format.unwrap_or(if args.json { Format::Json } else { Format::Csv });
        with_sink(args.output.as_deref(), |w| write_dataset(w, &dataset, format))?;
    }
    Ok(())
}

fn format_name(f: Format) -> String {
    match f {
        Format::Csv => "csv".into(),
        Format::Json => "json".into(),
    }
}

fn parse_format(s: &str) -> Result<Format, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(usage(format!("unknown format '{other}', expected csv or json"))),
    }
}

fn parse_location(s: &str) -> Result<GenerationLocation, CliError> {
    match s.to_ascii_lowercase().replace('_', "-").as_str() {
        "source" => Ok(GenerationLocation::Source),
        "midpoint" => Ok(GenerationLocation::Midpoint),
        "both-endpoints" | "both" => Ok(GenerationLocation::BothEndpoints),
        other => Err(usage(format!(
            "unknown location '{other}', expected source, midpoint or both-endpoints"
        ))),
    }
}

fn efficiency_arg(name: &str, value: f64) -> Result<Efficiency, CliError> {
    Efficiency::new(value).map_err(|_| usage(format!("--{name} = {value} must lie in [0, 1]")))
}

struct McRequest {
    trials: u64,
    seed: u64,
    options: McOptions,
}

fn resolve_link(args: &PeArgs, cfg: &Config) -> Result<(LinkConfig, Option<McRequest>), CliError> {
    let archetype: Archetype = cfg
        .pick(args.archetype.clone(), "archetype")?
        .ok_or_else(|| usage("--archetype is required (edqt, egt-dqt or egt-swap)"))?
        .parse()?;
    let eta_up = cfg.pick_any(args.eta_up, &["eta-up", "eta-up-s"])?;
    let eta_down = cfg.pick(args.eta_down, "eta-down")?;
    let eta_up_d = cfg.pick(args.eta_up_d, "eta-up-d")?;
    let eta_mid = cfg.pick(args.eta_mid, "eta-mid")?;
    let length = cfg.pick_any(args.length, &["length", "fiber-length-km"])?.unwrap_or(0.0);
    let attenuation = cfg
        .pick_any(args.attenuation, &["attenuation", "attenuation-db-per-km"])?
        .unwrap_or(DEFAULT_ATTENUATION_DB_PER_KM);
    let location = cfg
        .pick(args.location.clone(), "location")?
        .map(|s| parse_location(&s))
        .transpose()?
        .unwrap_or(archetype.default_location());

    let fiber = FiberLink::new(length, attenuation)?;
    let source = efficiency_arg("eta-up", eta_up.ok_or_else(|| usage(format!("{archetype} needs --eta-up")))?)?;
    let mut link = match archetype {
        Archetype::EDqt | Archetype::EgtWithDqt => {
            if eta_up_d.is_some() {
                return Err(usage(format!(
                    "--eta-up-d applies to egt-swap only; {archetype} uses --eta-down"
                )));
            }
            let down = efficiency_arg("eta-down", eta_down.ok_or_else(|| usage(format!("{archetype} needs --eta-down")))?)?;
            LinkConfig::symmetric(archetype, source, down, fiber)
        }
        Archetype::EgtWithSwapping => {
            if eta_down.is_some() {
                return Err(usage("--eta-down applies to the DQT archetypes; egt-swap uses --eta-up-d"));
            }
            let up_d = efficiency_arg("eta-up-d", eta_up_d.ok_or_else(|| usage("egt-swap needs --eta-up-d"))?)?;
            LinkConfig::egt_swap(source, up_d, fiber)
        }
    }
    .with_location(location);
    if let Some(m) = eta_mid {
        if location != GenerationLocation::Midpoint {
            return Err(usage("--eta-mid only applies with --location midpoint"));
        }
        link.eta_midpoint = Some(efficiency_arg("eta-mid", m)?);
    }

    let trials = cfg.pick_any(args.mc_trials, &["mc-trials", "trials"])?;
    let detector = cfg.pick(args.detector.clone(), "detector")?;
    let detector_eff = cfg.pick(args.detector_efficiency, "detector-efficiency")?;
    let independent = cfg.flag(args.independent_loss, "independent-loss")?;
    let seed = resolve_seed(args.seed, cfg)?;
    let Some(trials) = trials else {
        if detector.is_some() || detector_eff.is_some() || independent {
            return Err(usage("detector options need --mc-trials"));
        }
        return Ok((link, None));
    };
    if archetype != Archetype::EgtWithSwapping && (detector.is_some() || detector_eff.is_some() || independent) {
        return Err(usage("detector and loss options only apply to egt-swap"));
    }
    let kind: DetectorKind = detector.as_deref().unwrap_or("pnrd").parse()?;
    let detector = DetectorModel::new(kind, detector_eff.unwrap_or(1.0))?;
    let options = McOptions {
        detector,
        independent_photon_loss: independent,
    };
    Ok((link, Some(McRequest { trials, seed, options })))
}

#[derive(Serialize)]
struct McSection {
    options: McOptions,
    estimate: McEstimate,
    p_e_expected: f64,
    z_score: f64,
    flagged: bool,
}

#[derive(Serialize)]
struct PeReport {
    link: LinkConfig,
    closed_form: DistributionOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<McSection>,
}

pub fn pe(args: &PeArgs) -> Result<(), CliError> {
    let cfg = Config::load(args.config.as_deref())?;
    let (link, mc) = resolve_link(args, &cfg)?;
    let json = cfg.flag(args.json, "json")?;
    cfg.finish()?;

    let outcome = link.closed_form()?;
    let monte_carlo = match mc {
        Some(req) => {
            if link.generation_location != link.archetype.default_location() {
                return Err(usage("the Monte-Carlo engine covers the basic layout of each archetype only"));
            }
            let (estimate, report) = estimate_vs_closed_form(&link, req.options, req.trials, req.seed)?;
            Some(McSection {
                options: req.options,
                p_e_expected: report.p_e_closed,
                z_score: report.z_score,
                flagged: report.flagged,
                estimate,
            })
        }
        None => None,
    };
    let report = PeReport {
        link,
        closed_form: outcome,
        monte_carlo,
    };
    with_sink(None, |w| if json { write_json(w, &report) } else { write_pe_text(w, &report) })
}

fn write_pe_text(w: &mut dyn Write, r: &PeReport) -> std::io::Result<()> {
    let link = &r.link;
    let opt = |e: Option<Efficiency>| e.map(|e| fmt_sig(e.value()));
    let mut pairs = vec![
        ("archetype", link.archetype.to_string()),
        ("location", location_name(link.generation_location).to_string()),
    ];
    for (key, value) in [
        ("eta_up_source", opt(link.eta_up_source)),
        ("eta_down_destination", opt(link.eta_down_destination)),
        ("eta_up_destination", opt(link.eta_up_destination)),
        ("eta_midpoint", opt(link.eta_midpoint)),
    ] {
        if let Some(v) = value {
            pairs.push((key, v));
        }
    }
    pairs.extend([
        ("fiber_length_km", fmt_sig(link.fiber.length_km())),
        ("attenuation_db_per_km", fmt_sig(link.fiber.attenuation_db_per_km())),
        ("formula", r.closed_form.notes.clone()),
        ("p_e", fmt_sig(r.closed_form.p_e)),
        ("q_one_way", fmt_sig(r.closed_form.q_one_way)),
        ("q_two_way", fmt_sig(r.closed_form.q_two_way)),
    ]);
    if let Some(mc) = &r.monte_carlo {
        let e = &mc.estimate;
        pairs.extend([
            ("mc_trials", e.trials.to_string()),
            ("mc_seed", e.seed.to_string()),
            ("mc_p_e_hat", fmt_sig(e.p_e_hat)),
            ("mc_std_error", fmt_sig(e.std_error)),
            ("mc_p_e_expected", fmt_sig(mc.p_e_expected)),
            ("mc_z_score", fmt_sig(mc.z_score)),
            ("mc_flagged", mc.flagged.to_string()),
            ("mc_herald_rate", fmt_sig(e.herald_rate)),
            ("mc_dark_count_fraction", fmt_sig(e.dark_count_fraction)),
        ]);
        if let Some(f) = e.teleport_fidelity {
            pairs.push(("mc_teleport_fidelity", fmt_sig(f)));
        }
    }
    write_pairs(w, &pairs)
}

fn location_name(l: GenerationLocation) -> &'static str {
    match l {
        GenerationLocation::Source => "source",
        GenerationLocation::Midpoint => "midpoint",
        GenerationLocation::BothEndpoints => "both-endpoints",
    }
}

fn parse_axis(s: &str) -> Result<(SweepAxis, AxisRange), CliError> {
    let bad = || usage(format!("axis '{s}' is not NAME=MIN:MAX:STEPS"));
    let (name, range) = s.split_once('=').ok_or_else(bad)?;
    let axis: SweepAxis = name.trim().parse()?;
    let parts: Vec<&str> = range.split(':').map(str::trim).collect();
    let [min, max, steps] = parts.as_slice() else {
        return Err(bad());
    };
    let min: f64 = min.parse().map_err(|_| bad())?;
    let max: f64 = max.parse().map_err(|_| bad())?;
    let steps: usize = steps.parse().map_err(|_| bad())?;
    Ok((axis, AxisRange::new(min, max, steps)?))
}

pub fn resolve_sweep(args: &SweepArgs, cfg: &Config) -> Result<SweepSpec, CliError> {
    let target: FigureTarget = cfg
        .pick(args.target.clone(), "target")?
        .ok_or_else(|| usage("--target is required (fig5, fig8a, fig8b, fig8c, fig9 or custom)"))?
        .parse()?;
    let mut spec = SweepSpec::preset(target);

    let axis_texts: Vec<String> = if args.axes.is_empty() {
        match cfg.raw("axis") {
            Some(v) => v.split(',').map(str::to_string).collect(),
            None => Vec::new(),
        }
    } else {
        cfg.raw("axis");
        args.axes.clone()
    };
    let overrides = axis_texts.iter().map(|s| parse_axis(s)).collect::<Result<Vec<_>, _>>()?;
    if target == FigureTarget::Custom {
        if !overrides.is_empty() {
            spec.axes = overrides;
        }
    } else {
        for (axis, range) in overrides {
            let slot = spec
                .axes
                .iter_mut()
                .find(|(a, _)| *a == axis)
                .ok_or_else(|| usage(format!("{target} has no {axis} axis")))?;
            slot.1 = range;
        }
    }

    let f = &mut spec.fixed;
    if let Some(v) = cfg.pick(args.c_source, "c-source")? {
        f.c_source = v;
    }
    if let Some(v) = cfg.pick(args.c_destination, "c-destination")? {
        f.c_destination = v;
    }
    if let Some(v) = cfg.pick(args.zeta_product, "zeta-product")? {
        f.zeta_product = v;
    }
    if let Some(v) = cfg.pick_any(args.length, &["length", "fiber-length-km"])? {
        f.fiber_length_km = v;
    }
    if let Some(v) = cfg.pick_any(args.attenuation, &["attenuation", "attenuation-db-per-km"])? {
        f.attenuation_db_per_km = v;
    }
    if cfg.flag(args.no_egt_cap, "no-egt-cap")? {
        f.egt_source_cap = None;
    } else if let Some(v) = cfg.pick(args.egt_cap, "egt-cap")? {
        f.egt_source_cap = Some(v);
    }
    spec.validate()?;
    Ok(spec)
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let cfg = Config::load(args.config.as_deref())?;
    let spec = resolve_sweep(args, &cfg)?;
    let format = match cfg.pick(args.format.map(format_name), "format")? {
        Some(f) => parse_format(&f)?,
        None => Format::Csv,
    };
    let output = cfg.pick(args.output.clone(), "output")?;
    cfg.finish()?;
    let dataset = run_sweep(&spec)?;
    with_sink(output.as_deref(), |w| write_dataset(w, &dataset, format))
}

#[derive(Serialize)]
struct ValidationRow {
    eta_source: f64,
    eta_destination: f64,
    fiber_length_km: f64,
    #[serde(flatten)]
    report: ValidationReport,
}

#[derive(Serialize)]
struct ValidationSummary {
    trials: u64,
    seed: u64,
    z_flag_threshold: f64,
    flagged: usize,
    rows: Vec<ValidationRow>,
}

pub fn validate(args: &ValidateArgs) -> Result<(), CliError> {
    let cfg = Config::default();
    let trials = args.trials.unwrap_or(DEFAULT_VALIDATION_TRIALS);
    require_trials(trials, MIN_VALIDATION_TRIALS)
        .map_err(|_| usage(format!("--trials {trials} is below the minimum of {MIN_VALIDATION_TRIALS}")))?;
    let seed = resolve_seed(args.seed, &cfg)?;

    let options = McOptions::default();
    let mut rows = Vec::new();
    for (i, link) in validation_preset()?.into_iter().enumerate() {
        let estimate = run(&link, options, trials, seed.wrapping_add(i as u64))?;
        let report = compare(&estimate, expected_p_e(&link, &options)?);
        let destination = link.eta_down_destination.or(link.eta_up_destination).expect("preset links are complete");
        rows.push(ValidationRow {
            eta_source: link.source_up()?.value(),
            eta_destination: destination.value(),
            fiber_length_km: link.fiber.length_km(),
            report,
        });
    }
    let flagged: Vec<&ValidationRow> = rows.iter().filter(|r| r.report.flagged).collect();
    let n_flagged = flagged.len();
    let offending: Vec<String> = flagged.iter().map(|r| describe_row(r)).collect();
    let summary = ValidationSummary {
        trials,
        seed,
        z_flag_threshold: qtlink::montecarlo::Z_FLAG_THRESHOLD,
        flagged: n_flagged,
        rows,
    };
    with_sink(None, |w| {
        if args.json {
            write_json(w, &summary)
        } else {
            write_validation_table(w, &summary)
        }
    })?;
    if n_flagged > 0 {
        return Err(CliError::Validation(format!(
            "{n_flagged} of {} points exceed |z| = {}:\n  {}",
            summary.rows.len(),
            summary.z_flag_threshold,
            offending.join("\n  ")
        )));
    }
    Ok(())
}

fn describe_row(r: &ValidationRow) -> String {
    format!(
        "{} eta_s={} eta_d={} l={} km: p_e_hat={} p_e={} z={}",
        r.report.archetype,
        fmt_sig(r.eta_source),
        fmt_sig(r.eta_destination),
        fmt_sig(r.fiber_length_km),
        fmt_sig(r.report.p_e_hat),
        fmt_sig(r.report.p_e_closed),
        fmt_sig(r.report.z_score)
    )
}

fn write_validation_table(w: &mut dyn Write, s: &ValidationSummary) -> std::io::Result<()> {
    writeln!(w, "# trials per point: {}, seed: {}, flag when |z| > {}", s.trials, s.seed, s.z_flag_threshold)?;
    writeln!(
        w,
        "{:<10} {:>6} {:>6} {:>11} {:>13} {:>13} {:>11} {:>9}  flag",
        "archetype", "eta_s", "eta_d", "length_km", "p_e_hat", "p_e_closed", "std_error", "z"
    )?;
    for r in &s.rows {
        let rep = &r.report;
        writeln!(
            w,
            "{:<10} {:>6} {:>6} {:>11} {:>13} {:>13} {:>11} {:>9}  {}",
            rep.archetype.name(),
            fmt_sig(r.eta_source),
            fmt_sig(r.eta_destination),
            fmt_sig(r.fiber_length_km),
            fmt_sig(rep.p_e_hat),
            fmt_sig(rep.p_e_closed),
            fmt_sig(rep.std_error),
            format!("{:.3}", rep.z_score),
            if rep.flagged { "FLAG" } else { "ok" }
        )?;
    }
    writeln!(w, "{} of {} points flagged", s.flagged, s.rows.len())
}

fn parse_bell(s: &str) -> Result<BellState, CliError> {
    match s.to_ascii_lowercase().replace('_', "-").as_str() {
        "phi-plus" | "phi+" => Ok(BellState::PhiPlus),
        "phi-minus" | "phi-" => Ok(BellState::PhiMinus),
        "psi-plus" | "psi+" => Ok(BellState::PsiPlus),
        "psi-minus" | "psi-" => Ok(BellState::PsiMinus),
        other => Err(usage(format!(
            "unknown Bell state '{other}', expected phi-plus, phi-minus, psi-plus or psi-minus"
        ))),
    }
}

fn bell_name(b: BellState) -> &'static str {
    match b {
        BellState::PhiPlus => "phi-plus",
        BellState::PhiMinus => "phi-minus",
        BellState::PsiPlus => "psi-plus",
        BellState::PsiMinus => "psi-minus",
    }
}

#[derive(Serialize)]
struct BranchReport {
    m1: u8,
    m2: u8,
    probability: f64,
    fidelity: Option<f64>,
}

#[derive(Serialize)]
struct TeleportReport {
    resource: String,
    entanglement_ebits: f64,
    frame: &'static str,
    theta: f64,
    phi: f64,
    branches: Vec<BranchReport>,
    outcome_averaged_fidelity: f64,
    exact_average_fidelity: f64,
    sampled_inputs: u64,
    seed: u64,
    sampled_average_fidelity: f64,
}

pub fn teleport_demo(args: &TeleportArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, &Config::default())?;
    let (resource, epr): (String, PureState) = match (&args.bell, args.eta) {
        (Some(b), _) => {
            let kind = parse_bell(b)?;
            (bell_name(kind).to_string(), make_bell(kind, [SOURCE_EBIT, DESTINATION_EBIT])?)
        }
        (None, eta) => {
            let eta = efficiency_arg("eta", eta.unwrap_or(0.5))?;
            let src_optical = ModeLabel::optical(Location::Source);
            let state = egt_generate(&EgtSource::BeamSplitter { eta_up: eta }, SOURCE_EBIT, src_optical)?
                .relabel(src_optical, DESTINATION_EBIT)?;
            (format!("egt(eta={})", fmt_sig(eta.value())), state)
        }
    };
    if args.inputs == 0 {
        return Err(usage("--inputs must be at least 1"));
    }
    let psi = InformationalQubit::from_bloch(args.theta, args.phi);
    let frame = nearest_bell_frame(&epr)?;
    let target = psi.state_at(DESTINATION_EBIT);
    let mut branches = Vec::with_capacity(4);
    let mut averaged = 0.0;
    for b in teleport_all(&psi, &epr, frame)? {
        let f = b.state.as_ref().map(|s| fidelity(&target, s)).transpose()?;
        averaged += b.outcome.probability * f.unwrap_or(0.0);
        branches.push(BranchReport {
            m1: b.outcome.bits.0,
            m2: b.outcome.bits.1,
            probability: b.outcome.probability,
            fidelity: f,
        });
    }
    let report = TeleportReport {
        resource,
        entanglement_ebits: entropy_of_entanglement(&epr, &[SOURCE_EBIT])?,
        frame: bell_name(frame),
        theta: args.theta,
        phi: args.phi,
        branches,
        outcome_averaged_fidelity: averaged,
        exact_average_fidelity: exact_average_fidelity(&epr)?,
        sampled_inputs: args.inputs,
        seed,
        sampled_average_fidelity: average_fidelity(&epr, args.inputs, seed)?,
    };
    with_sink(None, |w| {
        if args.json {
            return write_json(w, &report);
        }
        write_pairs(
            w,
            &[
                ("resource", report.resource.clone()),
                ("entanglement_ebits", fmt_sig(report.entanglement_ebits)),
                ("frame", report.frame.to_string()),
                ("input_theta", fmt_sig(report.theta)),
                ("input_phi", fmt_sig(report.phi)),
            ],
        )?;
        writeln!(w, "outcome  probability  fidelity")?;
        for b in &report.branches {
            writeln!(
                w,
                "{}{}       {:<12} {}",
                b.m1,
                b.m2,
                fmt_sig(b.probability),
                b.fidelity.map(fmt_sig).unwrap_or_else(|| "-".into())
            )?;
        }
        write_pairs(
            w,
            &[
                ("outcome_averaged_fidelity", fmt_sig(report.outcome_averaged_fidelity)),
                ("exact_average_fidelity", fmt_sig(report.exact_average_fidelity)),
                ("sampled_inputs", report.sampled_inputs.to_string()),
                ("seed", report.seed.to_string()),
                ("sampled_average_fidelity", fmt_sig(report.sampled_average_fidelity)),
            ],
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_syntax() {
        let (axis, range) = parse_axis("C_source=0:2:5").unwrap();
        assert_eq!(axis, SweepAxis::CSource);
        assert_eq!((range.min, range.max, range.steps), (0.0, 2.0, 5));
        assert!(parse_axis("C_source=0:2").is_err());
        assert!(parse_axis("bogus=0:1:3").is_err());
        assert!(parse_axis("length=0:1:1").is_err());
    }
}
