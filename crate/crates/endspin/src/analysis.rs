//! Sweeps and derived quantities: peak finding, widths, scaling.
//!
//! All sweeps assign grid points to threads by index, and nothing is
//! accumulated across threads, so results are bitwise independent of the
//! thread count.

use rayon::prelude::*;

use crate::entanglement::{measure, EntanglementReport};
use crate::error::{Error, Result};
use crate::lattice::{
    BellPairStateSpec, ChainSpec, CouplingProfile, InitialState, ProductStateSpec,
};
use crate::propagator::{HoppingEigenbasis, Propagator};
use crate::rdm::rdm_of;

/// Uniformly spaced closed interval; the last value is exactly `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearGrid {
    start: f64,
    stop: f64,
    count: usize,
}

impl LinearGrid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::invalid("grid endpoints must be finite"));
        }
        if stop <= start {
            return Err(Error::invalid(format!(
                "grid needs stop > start, got [{start}, {stop}]"
            )));
        }
        if count < 2 {
            return Err(Error::invalid(format!("grid needs at least 2 points, got {count}")));
        }
        Ok(LinearGrid { start, stop, count })
    }

    /// Post-quench window `[0, N/(2J)]` at 241 points: twice the end-to-end
    /// transit time, enough to bracket the entanglement peak.
    pub fn default_time(n_sites: usize, coupling: f64) -> Result<Self> {
        if coupling <= 0.0 || !coupling.is_finite() {
            return Err(Error::invalid(format!("coupling {coupling} must be positive")));
        }
        LinearGrid::new(0.0, n_sites as f64 / (2.0 * coupling), 241)
    }

    /// Full tilt circle `[0, 2 pi]` at 201 points; the midpoint is exactly pi.
    pub fn default_alpha() -> Self {
        LinearGrid { start: 0.0, stop: std::f64::consts::TAU, count: 201 }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn values(&self) -> Vec<f64> {
        // Lerp form: exact at both endpoints, and symmetric grids land
        // exactly on their midpoint.
        let span = self.stop - self.start;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + span * (i as f64 / last))
            .collect()
    }
}

/// Where propagators come from: a uniform chain (closed-form mode sum) or an
/// explicit bond profile (diagonalized once, reused across times).
#[derive(Debug, Clone)]
pub enum Couplings {
    Uniform(ChainSpec),
    Profile(CouplingProfile),
}

impl Couplings {
    pub fn n_sites(&self) -> usize {
        match self {
            Couplings::Uniform(chain) => chain.n_sites(),
            Couplings::Profile(profile) => profile.n_sites(),
        }
    }

    fn eigenbasis(&self) -> Result<Option<HoppingEigenbasis>> {
        match self {
            Couplings::Uniform(_) => Ok(None),
            Couplings::Profile(profile) => Ok(Some(HoppingEigenbasis::new(profile)?)),
        }
    }

    fn propagator(&self, basis: &Option<HoppingEigenbasis>, t: f64) -> Result<Propagator> {
        match (self, basis) {
            (Couplings::Uniform(chain), _) => Propagator::analytic(chain, t),
            (Couplings::Profile(_), Some(basis)) => basis.propagator(t),
            (Couplings::Profile(profile), None) => Propagator::numeric(profile, t),
        }
    }
}

/// Entanglement measures along a time grid.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    times: Vec<f64>,
    reports: Vec<EntanglementReport>,
}

impl TimeSeries {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn reports(&self) -> &[EntanglementReport] {
        &self.reports
    }
}

fn check_sites(init: &InitialState, source: &Couplings) -> Result<()> {
    if init.n_sites() != source.n_sites() {
        return Err(Error::invalid(format!(
            "initial state has {} sites but couplings have {}",
            init.n_sites(),
            source.n_sites()
        )));
    }
    Ok(())
}

/// Measure the end-spin state at every grid time, in parallel.
pub fn time_sweep(
    init: &InitialState,
    source: &Couplings,
    grid: &LinearGrid,
) -> Result<TimeSeries> {
    check_sites(init, source)?;
    let basis = source.eigenbasis()?;
    let times = grid.values();
    let outcomes: Vec<Result<EntanglementReport>> = times
        .par_iter()
        .map(|&t| measure(&rdm_of(init, &source.propagator(&basis, t)?)?))
        .collect();
    let mut reports = Vec::with_capacity(times.len());
    for outcome in outcomes {
        reports.push(outcome?);
    }
    Ok(TimeSeries { times, reports })
}

/// Measures over the (tilt angle, time) plane for canted initial states.
#[derive(Debug, Clone)]
pub struct AlphaTimeMap {
    alphas: Vec<f64>,
    times: Vec<f64>,
    /// One row of reports per tilt angle.
    rows: Vec<Vec<EntanglementReport>>,
}

impl AlphaTimeMap {
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rows(&self) -> &[Vec<EntanglementReport>] {
        &self.rows
    }
}

/// Sweep canted product states over tilt angle and time.
pub fn alpha_map(
    source: &Couplings,
    alpha_grid: &LinearGrid,
    time_grid: &LinearGrid,
) -> Result<AlphaTimeMap> {
    let n = source.n_sites();
    let basis = source.eigenbasis()?;
    let alphas = alpha_grid.values();
    let times = time_grid.values();
    let outcomes: Vec<Result<Vec<EntanglementReport>>> = alphas
        .par_iter()
        .map(|&alpha| {
            let init = InitialState::Product(ProductStateSpec::canted(n, alpha)?);
            times
                .iter()
                .map(|&t| measure(&rdm_of(&init, &source.propagator(&basis, t)?)?))
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(alphas.len());
    for outcome in outcomes {
        rows.push(outcome?);
    }
    Ok(AlphaTimeMap { alphas, times, rows })
}

/// Which scalar a peak or width search tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeakMeasure {
    #[default]
    Fef,
    Concurrence,
}

impl PeakMeasure {
    fn pick(&self, report: &EntanglementReport) -> f64 {
        match self {
            PeakMeasure::Fef => report.fef,
            PeakMeasure::Concurrence => report.concurrence,
        }
    }

    /// A peak only counts once it clears this; below it the curve is noise
    /// around the unentangled floor. The concurrence level only screens out
    /// eigenvalue dust.
    fn threshold(&self) -> f64 {
        match self {
            PeakMeasure::Fef => 0.5,
            PeakMeasure::Concurrence => 1e-9,
        }
    }
}

/// Location and value of the entanglement peak of a time sweep.
#[derive(Debug, Clone, Copy)]
pub struct PeakSummary {
    pub t_max: f64,
    /// Tracked measure at `t_max`.
    pub value: f64,
    /// Full report at `t_max`.
    pub report: EntanglementReport,
    /// True when a genuine local maximum above the measure's threshold was
    /// found; false means the summary fell back to the global maximum.
    pub above_threshold: bool,
}

/// Find the first local maximum of the tracked measure above its threshold,
/// falling back to the global maximum, then sharpen it with one parabolic
/// refinement step. The refined value never drops below the grid value.
pub fn find_peak(
    init: &InitialState,
    source: &Couplings,
    grid: &LinearGrid,
    tracked: PeakMeasure,
) -> Result<PeakSummary> {
    check_sites(init, source)?;
    let series = time_sweep(init, source, grid)?;
    let values: Vec<f64> = series.reports.iter().map(|r| tracked.pick(r)).collect();

    let mut index = None;
    for i in 1..values.len().saturating_sub(1) {
        if values[i] > values[i - 1]
            && values[i] > values[i + 1]
            && values[i] > tracked.threshold()
        {
            index = Some(i);
            break;
        }
    }
    let above_threshold = index.is_some();
    let index = index.unwrap_or_else(|| {
        let mut best = 0;
        for i in 1..values.len() {
            if values[i] > values[best] {
                best = i;
            }
        }
        best
    });

    let basis = source.eigenbasis()?;
    let eval = |t: f64| -> Result<EntanglementReport> {
        measure(&rdm_of(init, &source.propagator(&basis, t)?)?)
    };

    let mut t_best = series.times[index];
    let mut report_best = series.reports[index];
    if index > 0 && index + 1 < values.len() {
        let (tm, t0, tp) = (
            series.times[index - 1],
            series.times[index],
            series.times[index + 1],
        );
        let (vm, v0, vp) = (values[index - 1], values[index], values[index + 1]);
        let curvature = vm - 2.0 * v0 + vp;
        if curvature < 0.0 {
            let h = 0.5 * (tp - tm);
            let vertex = t0 + 0.5 * h * (vm - vp) / curvature;
            let vertex = vertex.clamp(tm, tp);
            let refined = eval(vertex)?;
            if tracked.pick(&refined) >= tracked.pick(&report_best) {
                t_best = vertex;
                report_best = refined;
            }
        }
    }

    Ok(PeakSummary {
        t_max: t_best,
        value: tracked.pick(&report_best),
        report: report_best,
        above_threshold,
    })
}

/// Initial-state family for size scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateFamily {
    Neel,
    BellPairs,
}

impl StateFamily {
    pub fn initial_state(&self, n: usize) -> Result<InitialState> {
        match self {
            StateFamily::Neel => Ok(InitialState::Product(ProductStateSpec::neel(n)?)),
            StateFamily::BellPairs => {
                if n % 2 != 0 {
                    return Err(Error::invalid(format!(
                        "bell-pair chains need an even site count, got {n}"
                    )));
                }
                Ok(InitialState::BellPairs(BellPairStateSpec::new(n / 2)?))
            }
        }
    }
}

/// Peak data at one chain size.
#[derive(Debug, Clone, Copy)]
pub struct ScalingPoint {
    pub n_sites: usize,
    pub peak: PeakSummary,
}

/// Locate the entanglement peak for each chain size over the default time
/// window.
pub fn scaling_sweep(
    sizes: &[usize],
    family: StateFamily,
    coupling: f64,
    tracked: PeakMeasure,
) -> Result<Vec<ScalingPoint>> {
    if sizes.is_empty() {
        return Err(Error::invalid("need at least one chain size"));
    }
    sizes
        .iter()
        .map(|&n| {
            let chain = ChainSpec::new(n, coupling)?;
            let init = family.initial_state(n)?;
            let grid = LinearGrid::default_time(n, coupling)?;
            let peak = find_peak(&init, &Couplings::Uniform(chain), &grid, tracked)?;
            Ok(ScalingPoint { n_sites: n, peak })
        })
        .collect()
}

/// Least-squares slope and intercept of peak time versus chain size.
pub fn peak_time_trend(points: &[ScalingPoint]) -> Result<(f64, f64)> {
    let ns: Vec<f64> = points.iter().map(|p| p.n_sites as f64).collect();
    let ts: Vec<f64> = points.iter().map(|p| p.peak.t_max).collect();
    crate::linalg::linear_fit(&ns, &ts)
}

/// Full width at half maximum of a sampled peak, both height conventions.
#[derive(Debug, Clone, Copy)]
pub struct FwhmReport {
    /// Width at half height above the sampled background (default
    /// convention).
    pub width: f64,
    /// Width at half the absolute peak height.
    pub width_absolute: f64,
    pub alpha_peak: f64,
    pub peak_value: f64,
    /// Smallest sampled value, used as the background level.
    pub baseline: f64,
    /// Time the tilt scan was taken at: the Neel peak time.
    pub t_opt: f64,
}

/// Scan a scalar curve on a grid and bisect the two half-height crossings
/// around its maximum. `half` is the absolute crossing level.
fn crossing_width(
    eval: &dyn Fn(f64) -> Result<f64>,
    xs: &[f64],
    values: &[f64],
    peak_index: usize,
    half: f64,
) -> Result<f64> {
    let bisect = |mut lo: f64, mut hi: f64, rising: bool| -> Result<f64> {
        // Invariant: the curve crosses `half` inside [lo, hi].
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let above = eval(mid)? >= half;
            if above == rising {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-10 {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    };

    let mut left = None;
    for i in (0..peak_index).rev() {
        if values[i] < half && values[i + 1] >= half {
            left = Some(bisect(xs[i], xs[i + 1], true)?);
            break;
        }
    }
    let mut right = None;
    for i in peak_index..values.len() - 1 {
        if values[i] >= half && values[i + 1] < half {
            right = Some(bisect(xs[i], xs[i + 1], false)?);
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::SearchFailed(format!(
            "no half-height crossing at level {half}; peak may not decay within the grid"
        ))),
    }
}

/// Width of the entanglement peak across tilt angle at the optimal time.
///
/// The optimal time is the Neel-state peak over `time_grid`; the tilt curve
/// is then sampled on `alpha_grid` and both half-height conventions are
/// bisected to machine-level accuracy in alpha.
pub fn fwhm_alpha(
    source: &Couplings,
    alpha_grid: &LinearGrid,
    time_grid: &LinearGrid,
    tracked: PeakMeasure,
) -> Result<FwhmReport> {
    let n = source.n_sites();
    let neel = InitialState::Product(ProductStateSpec::neel(n)?);
    let t_opt = find_peak(&neel, source, time_grid, tracked)?.t_max;

    let basis = source.eigenbasis()?;
    let eval = |alpha: f64| -> Result<f64> {
        let init = InitialState::Product(ProductStateSpec::canted(n, alpha)?);
        let report = measure(&rdm_of(&init, &source.propagator(&basis, t_opt)?)?)?;
        Ok(tracked.pick(&report))
    };

    let alphas = alpha_grid.values();
    let outcomes: Vec<Result<f64>> = alphas.par_iter().map(|&a| eval(a)).collect();
    let mut values = Vec::with_capacity(alphas.len());
    for outcome in outcomes {
        values.push(outcome?);
    }

    let mut peak_index = 0;
    let mut baseline = f64::INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v > values[peak_index] {
            peak_index = i;
        }
        baseline = baseline.min(v);
    }
    let peak_value = values[peak_index];
    if peak_value <= baseline {
        return Err(Error::SearchFailed("tilt curve is flat; no peak to measure".into()));
    }

    let half_bg = baseline + 0.5 * (peak_value - baseline);
    let half_abs = 0.5 * peak_value;
    let width = crossing_width(&eval, &alphas, &values, peak_index, half_bg)?;
    let width_absolute = crossing_width(&eval, &alphas, &values, peak_index, half_abs)?;

    Ok(FwhmReport {
        width,
        width_absolute,
        alpha_peak: alphas[peak_index],
        peak_value,
        baseline,
        t_opt,
    })
}
