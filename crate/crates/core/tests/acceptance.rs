//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use qtlink::archetypes::{capacities, p_e_edqt, p_e_egt_dqt, p_e_egt_swap, Archetype};
use qtlink::channel::FiberLink;
use qtlink::figures::{
    argmax_set, common_cooperativity_curves, fig9_crossover, grid_argmax, refine_max_2d, run_sweep,
    FigureTarget, SweepSpec,
};
use qtlink::montecarlo::{
    estimate_vs_closed_form, run_egt_swap, trial_rng, validation_preset, DetectorKind, DetectorModel,
    McOptions,
};
use qtlink::quantum::{binary_entropy, entropy_of_entanglement, fidelity, make_bell, BellState, Location, ModeLabel};
use qtlink::teleport::{teleport_all, InformationalQubit, DESTINATION_EBIT, SOURCE_EBIT};
use qtlink::transducer::{conversion_efficiency, egt_generate, Efficiency, EgtSource, HALF_EFFICIENCY_COOPERATIVITY};

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn eff(x: f64) -> Efficiency {
    Efficiency::new(x).unwrap()
}

fn eta(c: f64) -> Efficiency {
    conversion_efficiency(c, 1.0, 1.0).unwrap()
}

fn ac1_efficiency_peak() -> Verdict {
    let at_one = eta(1.0).value();
    let at_half = eta(HALF_EFFICIENCY_COOPERATIVITY).value();
    verdict(
        (at_one - 1.0).abs() <= 1e-12 && (at_half - 0.5).abs() <= 1e-12,
        format!("eta(1) = {at_one}, eta(3-2sqrt2) = {at_half}"),
    )
}

fn ac2_fig5() -> Verdict {
    let ds = run_sweep(&SweepSpec::preset(FigureTarget::Fig5)).unwrap();
    let c = ds.column("C_source").unwrap();
    let eta = ds.column("eta").unwrap();
    let (nc, nz) = (101, 101);
    if ds.rows.len() != nc * nz {
        return verdict(false, format!("grid has {} points", ds.rows.len()));
    }
    let step = 2.0 / 100.0;
    // rows are C-major: index = ic * nz + iz
    let monotone = (0..nc).all(|ic| (1..nz).all(|iz| eta[ic * nz + iz] >= eta[ic * nz + iz - 1]));
    let peaks_at_one = (0..nz).all(|iz| {
        let row: Vec<f64> = (0..nc).map(|ic| eta[ic * nz + iz]).collect();
        // a flat row (zero extraction) has every C in its argmax set
        argmax_set(&row, 0.0)
            .iter()
            .any(|&ic| (c[ic * nz + iz] - 1.0).abs() <= step + 1e-12)
    });
    verdict(monotone && peaks_at_one, format!("101x101 grid, monotone in zeta: {monotone}, argmax at C=1 in every row: {peaks_at_one}"))
}

fn ac3_anchors() -> Verdict {
    let l0 = FiberLink::default().attenuation_length_km();
    let edqt = p_e_edqt(eff(0.15), eff(0.15), &FiberLink::with_length(l0).unwrap());
    let egt = p_e_egt_dqt(eff(0.5), Efficiency::ONE, &FiberLink::default());
    let swap = p_e_egt_swap(eff(0.5), eff(0.5), &FiberLink::default());
    let ok = (edqt - 0.0225 * (-1.0f64).exp()).abs() <= 1e-9 && (egt - 1.0).abs() <= 1e-12 && (swap - 0.5).abs() <= 1e-12;
    verdict(ok, format!("e-DQT {edqt:.12}, EGT+DQT {egt}, EGT-swap {swap}"))
}

fn ac4_fig8c() -> Verdict {
    let ds = run_sweep(&SweepSpec::preset(FigureTarget::Fig8c)).unwrap();
    let cs = ds.column("C_source").unwrap();
    let cd = ds.column("C_destination").unwrap();
    let p = ds.column("p_e").unwrap();
    let step = 0.01;
    let i = grid_argmax(&p).unwrap();
    let near = |x: f64| (x - HALF_EFFICIENCY_COOPERATIVITY).abs() <= step + 1e-12;
    let swap = |a: f64, b: f64| p_e_egt_swap(eta(a), eta(b), &FiberLink::default());
    let ((rx, ry), refined) = refine_max_2d(swap, (cs[i], cd[i]), 2.0 * step, ((0.0, 1.0), (0.0, 1.0)), 1e-10);
    let sup = p.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(refined);
    let ok = near(cs[i]) && near(cd[i]) && (refined - 0.5).abs() <= 1e-6 && sup < 1.0;
    verdict(
        ok,
        format!(
            "grid argmax at (Cs, Cd) = ({:.2}, {:.2}), refined max {refined:.7} at ({rx:.4}, {ry:.4}); target 0.5 at ({c:.4}, {c:.4})",
            cs[i],
            cd[i],
            c = HALF_EFFICIENCY_COOPERATIVITY
        ),
    )
}

fn ac5_fig9() -> Verdict {
    let c1 = fig9_crossover(1e-12).unwrap();
    let c2 = fig9_crossover(1e-12).unwrap();
    let ordered = (1..200).all(|k| {
        let c = c1 * k as f64 / 200.0;
        let [edqt, egt, swap] = common_cooperativity_curves(c).unwrap();
        swap > egt && egt > edqt
    });
    let [edqt, egt, swap] = common_cooperativity_curves(1.0).unwrap();
    let limits = (edqt - 1.0).abs() < 1e-12 && (egt - 1.0).abs() < 1e-12 && swap.abs() < 1e-12;
    verdict(
        (c1 - c2).abs() <= 1e-6 && ordered && limits,
        format!("C* = {c1:.9}, ordering below C*: {ordered}, limits at C=1: ({edqt}, {egt}, {swap})"),
    )
}

fn ac6_monte_carlo() -> Verdict {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let reports = pool.install(|| {
        validation_preset()
            .unwrap()
            .iter()
            .enumerate()
            .map(|(i, config)| estimate_vs_closed_form(config, McOptions::default(), 1_000_000, 1000 + i as u64).unwrap().1)
            .collect::<Vec<_>>()
    });
    let elapsed = start.elapsed();
    let per_archetype = Archetype::ALL.map(|a| reports.iter().filter(|r| r.archetype == a).count());
    let worst = reports.iter().map(|r| r.z_score.abs()).fold(0.0, f64::max);
    let flagged = reports.iter().filter(|r| r.flagged).count();
    verdict(
        per_archetype.iter().all(|&n| n >= 12) && flagged == 0 && elapsed < Duration::from_secs(60),
        format!(
            "{} points x 1e6 trials, max |z| = {worst:.2}, flagged {flagged}, single-threaded {:.1} s",
            reports.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn ac7_capacities() -> Verdict {
    let ok = (0..1000).all(|i| {
        let p = i as f64 / 999.0;
        let q = capacities(p).unwrap();
        (q.one_way > 0.0) == (p > 0.5) && (q.two_way > 0.0) == (p > 0.0)
    });
    verdict(ok, "1000-point grid on [0, 1]")
}

fn ac8_teleport() -> Verdict {
    let epr = make_bell(BellState::PhiPlus, [SOURCE_EBIT, DESTINATION_EBIT]).unwrap();
    let mut worst_f = 0.0f64;
    let mut worst_p = 0.0f64;
    for i in 0..100 {
        let psi = InformationalQubit::random(&mut trial_rng(8, i));
        let target = psi.state_at(DESTINATION_EBIT);
        for b in teleport_all(&psi, &epr, BellState::PhiPlus).unwrap() {
            worst_p = worst_p.max((b.outcome.probability - 0.25).abs());
            let f = b.state.as_ref().map_or(0.0, |s| fidelity(&target, s).unwrap());
            worst_f = worst_f.max((f - 1.0).abs());
        }
    }
    verdict(
        worst_f <= 1e-10 && worst_p <= 1e-12,
        format!("max |F-1| = {worst_f:.1e}, max |p-1/4| = {worst_p:.1e}"),
    )
}

fn ac9_heralding() -> Verdict {
    let fiber0 = FiberLink::default();
    let mut pnrd_clean = true;
    for (s, d) in [(0.5, 0.5), (0.3, 0.8), (0.9, 0.9)] {
        let config = qtlink::archetypes::LinkConfig::egt_swap(eff(s), eff(d), fiber0);
        let est = run_egt_swap(&config, McOptions::default(), 100_000, 77).unwrap();
        pnrd_clean &= est.dark_count_fraction == 0.0;
    }
    let mut ordered = true;
    let matched = [(0.5, 0.5, 43.4), (0.2, 0.7, 10.0), (0.9, 0.4, 30.0), (0.6, 0.6, 5.0), (0.35, 0.95, 60.0)];
    for (k, (s, d, l)) in matched.into_iter().enumerate() {
        let config = qtlink::archetypes::LinkConfig::egt_swap(eff(s), eff(d), FiberLink::with_length(l).unwrap());
        let with = |kind| McOptions { detector: DetectorModel::ideal(kind), independent_photon_loss: true };
        let pnrd = run_egt_swap(&config, with(DetectorKind::Pnrd), 100_000, k as u64).unwrap();
        let spd = run_egt_swap(&config, with(DetectorKind::Spd), 100_000, k as u64).unwrap();
        ordered &= spd.dark_count_fraction >= pnrd.dark_count_fraction;
    }
    verdict(
        pnrd_clean && ordered,
        format!("PNRD dark fraction zero at l=0: {pnrd_clean}, SPD >= PNRD on 5 configs: {ordered}"),
    )
}

fn ac10_entropy() -> Verdict {
    let mut rng = trial_rng(10, 0);
    let mut worst_sym = 0.0f64;
    for _ in 0..10_000 {
        let x: f64 = rng.random();
        worst_sym = worst_sym.max((binary_entropy(x).unwrap() - binary_entropy(1.0 - x).unwrap()).abs());
    }
    let ms = ModeLabel::microwave(Location::Source);
    let os = ModeLabel::optical(Location::Source);
    let mut worst_state = 0.0f64;
    for i in 0..100 {
        let x = i as f64 / 99.0;
        let psi = egt_generate(&EgtSource::BeamSplitter { eta_up: eff(x) }, ms, os).unwrap();
        let s = entropy_of_entanglement(&psi, &[ms]).unwrap();
        worst_state = worst_state.max((s - binary_entropy(x).unwrap()).abs());
    }
    verdict(
        worst_sym <= 1e-12 && worst_state <= 1e-10,
        format!("max |S(x)-S(1-x)| = {worst_sym:.1e}, max |S_state - S| = {worst_state:.1e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Verdict); 10] = [
        ("AC1", "efficiency peak", ac1_efficiency_peak),
        ("AC2", "efficiency map", ac2_fig5),
        ("AC3", "closed-form anchors", ac3_anchors),
        ("AC4", "swap map maximum", ac4_fig8c),
        ("AC5", "common-cooperativity ordering", ac5_fig9),
        ("AC6", "Monte-Carlo agreement", ac6_monte_carlo),
        ("AC7", "capacity thresholds", ac7_capacities),
        ("AC8", "teleportation exactness", ac8_teleport),
        ("AC9", "heralding properties", ac9_heralding),
        ("AC10", "entropy identities", ac10_entropy),
    ];
    let mut failures = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let v = check();
        let tag = if v.ok { "PASS" } else { "FAIL" };
        failures += usize::from(!v.ok);
        println!("[{tag}] {id} {name}: {} ({:.2} s)", v.detail, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
