//! Parameter sweeps behind the efficiency and distribution-probability
//! figures, plus the small numerical helpers used to read them (grid argmax,
//! local refinement, bisection).

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::archetypes::{p_e_edqt, p_e_egt_dqt, p_e_egt_swap};
use crate::channel::FiberLink;
use crate::error::{Error, Result};
use crate::transducer::{conversion_efficiency, HALF_EFFICIENCY_COOPERATIVITY};

/// `η` above which two symmetric conversions still succeed more often than
/// not (`η² > ½`).
pub const ONE_WAY_THRESHOLD: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureTarget {
    /// `η` over cooperativity and extraction-ratio product.
    Fig5,
    /// e-DQT `p_e` over source and destination cooperativity.
    Fig8a,
    /// EGT + DQT `p_e` over source and destination cooperativity.
    Fig8b,
    /// EGT + swapping `p_e` over the two endpoint cooperativities.
    Fig8c,
    /// The three archetypes against a common cooperativity.
    Fig9,
    Custom,
}

impl FigureTarget {
    pub const ALL: [FigureTarget; 6] = [
        FigureTarget::Fig5,
        FigureTarget::Fig8a,
        FigureTarget::Fig8b,
        FigureTarget::Fig8c,
        FigureTarget::Fig9,
        FigureTarget::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureTarget::Fig5 => "fig5",
            FigureTarget::Fig8a => "fig8a",
            FigureTarget::Fig8b => "fig8b",
            FigureTarget::Fig8c => "fig8c",
            FigureTarget::Fig9 => "fig9",
            FigureTarget::Custom => "custom",
        }
    }
}

impl fmt::Display for FigureTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FigureTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        FigureTarget::ALL
            .into_iter()
            .find(|t| t.name() == lower)
            .ok_or_else(|| Error::InvalidSweep(format!("unknown target '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    CSource,
    CDestination,
    ZetaProduct,
    FiberLengthKm,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::CSource => "C_source",
            SweepAxis::CDestination => "C_destination",
            SweepAxis::ZetaProduct => "zeta_product",
            SweepAxis::FiberLengthKm => "fiber_length_km",
        }
    }

    fn domain(self) -> (f64, f64) {
        match self {
            SweepAxis::ZetaProduct => (0.0, 1.0),
            _ => (0.0, f64::MAX),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "c_source" | "cs" => Ok(SweepAxis::CSource),
            "c_destination" | "cd" => Ok(SweepAxis::CDestination),
            "zeta_product" | "zeta" => Ok(SweepAxis::ZetaProduct),
            "fiber_length_km" | "length" => Ok(SweepAxis::FiberLengthKm),
            _ => Err(Error::InvalidSweep(format!("unknown axis '{s}'"))),
        }
    }
}

/// `steps` evenly spaced points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidSweep(format!("need at least 2 steps, got {steps}")));
        }
        if !(min.is_finite() && max.is_finite() && min <= max) {
            return Err(Error::InvalidSweep(format!("bad range [{min}, {max}]")));
        }
        Ok(Self { min, max, steps })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.steps - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.max
        } else {
            self.min + i as f64 * (self.max - self.min) / (self.steps - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

/// Parameters held constant during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    pub c_source: f64,
    pub c_destination: f64,
    /// `ζ_o ζ_m`, shared by every transducer.
    pub zeta_product: f64,
    pub fiber_length_km: f64,
    pub attenuation_db_per_km: f64,
    /// Upper bound on the source cooperativity of the EGT + DQT archetype.
    pub egt_source_cap: Option<f64>,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            c_source: 1.0,
            c_destination: 1.0,
            zeta_product: 1.0,
            fiber_length_km: 0.0,
            attenuation_db_per_km: crate::channel::DEFAULT_ATTENUATION_DB_PER_KM,
            egt_source_cap: None,
        }
    }
}

impl FixedParams {
    fn with(mut self, axis: SweepAxis, value: f64) -> Self {
        match axis {
            SweepAxis::CSource => self.c_source = value,
            SweepAxis::CDestination => self.c_destination = value,
            SweepAxis::ZetaProduct => self.zeta_product = value,
            SweepAxis::FiberLengthKm => self.fiber_length_km = value,
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub target: FigureTarget,
    pub axes: Vec<(SweepAxis, AxisRange)>,
    pub fixed: FixedParams,
}

impl SweepSpec {
    /// Default grid for a figure. Cooperativity axes span `[0, 1]` except
    /// for the efficiency map, which goes to `C = 2`.
    pub fn preset(target: FigureTarget) -> Self {
        let unit = AxisRange { min: 0.0, max: 1.0, steps: 101 };
        let (axes, fixed) = match target {
            FigureTarget::Fig5 => (
                vec![
                    (SweepAxis::CSource, AxisRange { min: 0.0, max: 2.0, steps: 101 }),
                    (SweepAxis::ZetaProduct, unit),
                ],
                FixedParams::default(),
            ),
            FigureTarget::Fig8a | FigureTarget::Fig8b | FigureTarget::Fig8c => (
                vec![(SweepAxis::CSource, unit), (SweepAxis::CDestination, unit)],
                FixedParams::default(),
            ),
            FigureTarget::Fig9 => (
                vec![(SweepAxis::CSource, AxisRange { steps: 1001, ..unit })],
                FixedParams {
                    egt_source_cap: Some(HALF_EFFICIENCY_COOPERATIVITY),
                    ..FixedParams::default()
                },
            ),
            FigureTarget::Custom => (vec![(SweepAxis::CSource, unit)], FixedParams::default()),
        };
        Self { target, axes, fixed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidSweep(format!("expected 1 or 2 axes, got {}", self.axes.len())));
        }
        if self.axes.len() == 2 && self.axes[0].0 == self.axes[1].0 {
            return Err(Error::InvalidSweep(format!("axis {} given twice", self.axes[0].0)));
        }
        for (axis, range) in &self.axes {
            AxisRange::new(range.min, range.max, range.steps)?;
            let (lo, hi) = axis.domain();
            if range.min < lo || range.max > hi {
                return Err(Error::InvalidSweep(format!(
                    "{axis} range [{}, {}] leaves [{lo}, {hi}]",
                    range.min, range.max
                )));
            }
        }
        let expected: &[SweepAxis] = match self.target {
            FigureTarget::Fig5 => &[SweepAxis::CSource, SweepAxis::ZetaProduct],
            FigureTarget::Fig8a | FigureTarget::Fig8b | FigureTarget::Fig8c => {
                &[SweepAxis::CSource, SweepAxis::CDestination]
            }
            FigureTarget::Fig9 => &[SweepAxis::CSource],
            FigureTarget::Custom => &[],
        };
        if !expected.is_empty() {
            let got: Vec<SweepAxis> = self.axes.iter().map(|(a, _)| *a).collect();
            if got != expected {
                return Err(Error::InvalidSweep(format!(
                    "{} sweeps over {:?}",
                    self.target, expected
                )));
            }
        }
        let f = &self.fixed;
        FiberLink::new(f.fiber_length_km, f.attenuation_db_per_km)?;
        if !(0.0..=1.0).contains(&f.zeta_product) {
            return Err(Error::InvalidSweep(format!("zeta_product {} outside [0, 1]", f.zeta_product)));
        }
        if !(f.c_source >= 0.0 && f.c_destination >= 0.0) {
            return Err(Error::InvalidSweep("cooperativities must be non-negative".into()));
        }
        if let Some(cap) = f.egt_source_cap {
            if !(cap >= 0.0) {
                return Err(Error::InvalidSweep(format!("cap {cap} must be non-negative")));
            }
        }
        Ok(())
    }

    /// Grid points in output order: the first axis varies slowest.
    fn points(&self) -> Vec<Vec<f64>> {
        match self.axes.as_slice() {
            [(_, r)] => r.values().into_iter().map(|x| vec![x]).collect(),
            [(_, r0), (_, r1)] => {
                let ys = r1.values();
                r0.values()
                    .into_iter()
                    .flat_map(|x| ys.iter().map(move |&y| vec![x, y]))
                    .collect()
            }
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Bool(bool),
}

impl Cell {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Cell::Num(x) => x,
            Cell::Bool(b) => f64::from(u8::from(b)),
        }
    }
}

/// A table of sweep results with the formulas that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub target: FigureTarget,
    pub spec: SweepSpec,
    pub formulas: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }
}

fn eta(c: f64, zeta_product: f64) -> Result<crate::transducer::Efficiency> {
    conversion_efficiency(c, zeta_product, 1.0)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut columns: Vec<String> = spec.axes.iter().map(|(a, _)| a.name().to_string()).collect();
    let (extra, formulas): (&[&str], Vec<&str>) = match spec.target {
        FigureTarget::Fig5 => (
            &["eta", "one_way_positive"],
            vec![
                "eta = 4 zeta_o zeta_m C / (1 + C)^2",
                "one_way_positive = eta > 1/sqrt(2)",
            ],
        ),
        FigureTarget::Fig8a => (
            &["eta_source", "eta_destination", "p_e"],
            vec!["p_e = eta_up_s * eta_down_d * exp(-l/L0)"],
        ),
        FigureTarget::Fig8b => (
            &["eta_source", "eta_destination", "p_e"],
            vec!["p_e = S(eta_up_s) * eta_down_d * exp(-l/L0)"],
        ),
        FigureTarget::Fig8c => (
            &["eta_source", "eta_destination", "p_e"],
            vec!["p_e = S(eta_min_entropy) * [eta_s(1-eta_d) + eta_d(1-eta_s)] * exp(-l/(2 L0))"],
        ),
        FigureTarget::Fig9 | FigureTarget::Custom => (
            &["eta_source", "eta_destination", "p_e_edqt", "p_e_egt_dqt", "p_e_egt_swap"],
            vec![
                "eta = 4 zeta_o zeta_m C / (1 + C)^2",
                "p_e_edqt = eta_s * eta_d * exp(-l/L0)",
                "p_e_egt_dqt = S(eta(min(C_s, cap))) * eta_d * exp(-l/L0)",
                "p_e_egt_swap = S(eta_min_entropy) * [eta_s(1-eta_d) + eta_d(1-eta_s)] * exp(-l/(2 L0))",
            ],
        ),
    };
    columns.extend(extra.iter().map(|s| s.to_string()));
    let mut formulas: Vec<String> = formulas.into_iter().map(String::from).collect();
    formulas.push("S(x) = -x log2 x - (1-x) log2(1-x); L0 = 10 / (alpha ln 10)".into());

    let points = spec.points();
    let rows = points
        .par_iter()
        .map(|point| evaluate_point(spec, point))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        target: spec.target,
        spec: spec.clone(),
        formulas,
        columns,
        rows,
    })
}

fn evaluate_point(spec: &SweepSpec, point: &[f64]) -> Result<Vec<Cell>> {
    let mut p = spec.fixed;
    for ((axis, _), &x) in spec.axes.iter().zip(point) {
        p = p.with(*axis, x);
    }
    // the common-cooperativity figure ties both ends to the swept value
    if spec.target == FigureTarget::Fig9 {
        p.c_destination = p.c_source;
    }
    let fiber = FiberLink::new(p.fiber_length_km, p.attenuation_db_per_km)?;
    let eta_s = eta(p.c_source, p.zeta_product)?;
    let eta_d = eta(p.c_destination, p.zeta_product)?;
    let mut row: Vec<Cell> = point.iter().map(|&x| Cell::Num(x)).collect();
    match spec.target {
        FigureTarget::Fig5 => {
            row.push(Cell::Num(eta_s.value()));
            row.push(Cell::Bool(eta_s.value() > ONE_WAY_THRESHOLD));
        }
        FigureTarget::Fig8a | FigureTarget::Fig8b | FigureTarget::Fig8c => {
            let p_e = match spec.target {
                FigureTarget::Fig8a => p_e_edqt(eta_s, eta_d, &fiber),
                FigureTarget::Fig8b => p_e_egt_dqt(eta_s, eta_d, &fiber),
                _ => p_e_egt_swap(eta_s, eta_d, &fiber),
            };
            row.extend([Cell::Num(eta_s.value()), Cell::Num(eta_d.value()), Cell::Num(p_e)]);
        }
        FigureTarget::Fig9 | FigureTarget::Custom => {
            let capped = match p.egt_source_cap {
                Some(cap) => eta(p.c_source.min(cap), p.zeta_product)?,
                None => eta_s,
            };
            row.extend([
                Cell::Num(eta_s.value()),
                Cell::Num(eta_d.value()),
                Cell::Num(p_e_edqt(eta_s, eta_d, &fiber)),
                Cell::Num(p_e_egt_dqt(capped, eta_d, &fiber)),
                Cell::Num(p_e_egt_swap(eta_s, eta_d, &fiber)),
            ]);
        }
    }
    Ok(row)
}

/// Indices of every entry within `tol` of the maximum.
pub fn argmax_set(values: &[f64], tol: f64) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= best - tol)
        .map(|(i, _)| i)
        .collect()
}

/// First index of the maximum entry.
pub fn grid_argmax(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

/// Maximizes a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Zooming grid search for the maximum of `f` near `start`, clipped to
/// `bounds`. Copes with kinks, unlike gradient or coordinate methods: the
/// window follows the best point and only shrinks once the best point stays
/// put, so it can also crawl along a ridge.
pub fn refine_max_2d(
    f: impl Fn(f64, f64) -> f64,
    start: (f64, f64),
    half_width: f64,
    bounds: ((f64, f64), (f64, f64)),
    tol: f64,
) -> ((f64, f64), f64) {
    const N: usize = 20;
    const MAX_ROUNDS: usize = 10_000;
    let mut center = start;
    let mut best = f(start.0, start.1);
    let mut w = half_width;
    for _ in 0..MAX_ROUNDS {
        if w <= tol {
            break;
        }
        let (x_lo, x_hi) = ((center.0 - w).max(bounds.0 .0), (center.0 + w).min(bounds.0 .1));
        let (y_lo, y_hi) = ((center.1 - w).max(bounds.1 .0), (center.1 + w).min(bounds.1 .1));
        let mut moved = false;
        for i in 0..=N {
            let x = x_lo + (x_hi - x_lo) * i as f64 / N as f64;
            for j in 0..=N {
                let y = y_lo + (y_hi - y_lo) * j as f64 / N as f64;
                let v = f(x, y);
                if v > best {
                    best = v;
                    center = (x, y);
                    moved = true;
                }
            }
        }
        if !moved {
            w *= 0.5;
        }
    }
    (center, best)
}

/// Root of `f` on `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ
/// in sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let f_lo = f(lo);
    if f_lo.signum() == f(hi).signum() {
        return Err(Error::InvalidSweep(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `p_e` of the three archetypes at a common cooperativity, unit extraction
/// ratios and zero length, with the EGT + DQT source capped at `C = 3-2√2`.
pub fn common_cooperativity_curves(c: f64) -> Result<[f64; 3]> {
    let fiber = FiberLink::default();
    let e = eta(c, 1.0)?;
    let capped = eta(c.min(HALF_EFFICIENCY_COOPERATIVITY), 1.0)?;
    Ok([
        p_e_edqt(e, e, &fiber),
        p_e_egt_dqt(capped, e, &fiber),
        p_e_egt_swap(e, e, &fiber),
    ])
}

/// Cooperativity where EGT + swapping stops beating EGT + DQT.
pub fn fig9_crossover(tol: f64) -> Result<f64> {
    let gap = |c: f64| {
        let [_, egt, swap] = common_cooperativity_curves(c).expect("cooperativity in range");
        swap - egt
    };
    bisect(gap, 1e-9, 1.0, tol)
}
