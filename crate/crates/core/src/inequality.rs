//! Closed-form temporal Clauser-Horne functional for the chain setup,
//!
//! `I(t) = 1/2 + (sqrt 2 / 4) (|G_NN|^2 + |G_1N|^2 + Re G_NN)`,
//!
//! and the analysis built on it: violation intervals (`I > 1`), the time at
//! which the initial violation ends, short-time curvature and revival peaks
//! of `|G_NN|^2` and `|G_1N|^2`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::propagator::Propagator;
use crate::spectral::{ChainParams, Convention};

/// `I(0) = (1 + sqrt 2) / 2`, the maximal value.
pub const I_CH_AT_ZERO: f64 = 0.5 * (1.0 + SQRT_2);

/// Upper edge of the classical range `0 <= I <= 1`.
pub const CLASSICAL_BOUND: f64 = 1.0;

/// One of the four fixed spin observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LocalObservable {
    SigmaZ,
    SigmaX,
    /// `(sigma_z + sigma_x) / sqrt 2`
    ZPlusX,
    /// `(sigma_z - sigma_x) / sqrt 2`
    ZMinusX,
}

impl LocalObservable {
    /// Real 2x2 matrix indexed by bit value (0 = down, 1 = up).
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let z = [[-1.0, 0.0], [0.0, 1.0]];
        let x = [[0.0, 1.0], [1.0, 0.0]];
        let combine = |s: f64| {
            let mut m = [[0.0; 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    m[r][c] = FRAC_1_SQRT_2 * (z[r][c] + s * x[r][c]);
                }
            }
            m
        };
        match self {
            LocalObservable::SigmaZ => z,
            LocalObservable::SigmaX => x,
            LocalObservable::ZPlusX => combine(1.0),
            LocalObservable::ZMinusX => combine(-1.0),
        }
    }
}

/// Alice measures `A_1 = sigma_z` or `A_2 = sigma_x` on site 1; Bob measures
/// `B_1 = (sigma_z + sigma_x)/sqrt 2` or `B_2 = (sigma_z - sigma_x)/sqrt 2`
/// on site N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeasurementSettings {
    pub a1: LocalObservable,
    pub a2: LocalObservable,
    pub b1: LocalObservable,
    pub b2: LocalObservable,
}

impl Default for MeasurementSettings {
    fn default() -> Self {
        Self {
            a1: LocalObservable::SigmaZ,
            a2: LocalObservable::SigmaX,
            b1: LocalObservable::ZPlusX,
            b2: LocalObservable::ZMinusX,
        }
    }
}

/// The propagator pieces entering `I(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChComponents {
    pub gnn_abs2: f64,
    pub g1n_abs2: f64,
    pub re_gnn: f64,
}

impl ChComponents {
    pub fn i_ch(&self) -> f64 {
        0.5 + 0.25 * SQRT_2 * (self.gnn_abs2 + self.g1n_abs2 + self.re_gnn)
    }
}

/// Closed-form evaluator bound to one chain and convention.
#[derive(Debug, Clone)]
pub struct ChFunctional {
    propagator: Propagator,
}

impl ChFunctional {
    pub fn new(params: &ChainParams, convention: Convention) -> Self {
        Self {
            propagator: Propagator::new(params, convention),
        }
    }

    pub fn params(&self) -> &ChainParams {
        self.propagator.params()
    }

    pub fn convention(&self) -> Convention {
        self.propagator.convention()
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn components(&self, t: f64) -> ChComponents {
        let (gnn, g1n) = self.propagator.end_entries(t);
        ChComponents {
            gnn_abs2: gnn.norm_sqr(),
            g1n_abs2: g1n.norm_sqr(),
            re_gnn: gnn.re,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.components(t).i_ch()
    }
}

pub fn i_ch_closed_form(t: f64, params: &ChainParams, convention: Convention) -> f64 {
    ChFunctional::new(params, convention).value(t)
}

/// Quadratic-expansion estimate `sqrt(4 - 2 sqrt 2) / sqrt(3 J^2 + mu^2)` of
/// when the initial violation ends. Independent of N.
pub fn t_star_estimate(params: &ChainParams) -> Result<f64> {
    let (j, mu) = (params.coupling_j(), params.mu());
    let denom = 3.0 * j * j + mu * mu;
    if denom == 0.0 {
        return Err(Error::DegenerateScale);
    }
    Ok((4.0 - 2.0 * SQRT_2).sqrt() / denom.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Curvature {
    pub second_derivative: f64,
    pub first_derivative: f64,
}

/// Second derivative of `I` at `t = 0` by central differences with one
/// Richardson step; the first derivative is reported alongside and should
/// vanish.
pub fn curvature_at_zero(
    params: &ChainParams,
    convention: Convention,
    step: f64,
) -> Result<Curvature> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    let f = ChFunctional::new(params, convention);
    let f0 = f.value(0.0);
    let second = |h: f64| (f.value(h) - 2.0 * f0 + f.value(-h)) / (h * h);
    let first = |h: f64| (f.value(h) - f.value(-h)) / (2.0 * h);
    let (h, h2) = (step, 0.5 * step);
    Ok(Curvature {
        second_derivative: (4.0 * second(h2) - second(h)) / 3.0,
        first_derivative: (4.0 * first(h2) - first(h)) / 3.0,
    })
}

/// Tunables for the grid-then-refine searches. Steps are in units of
/// `1 / energy_scale` (usually `1/J`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisOptions {
    pub grid_step: f64,
    pub root_tolerance: f64,
    /// Minimum topographic prominence of a peak of `|G|^2`.
    pub peak_prominence: f64,
    /// Height a peak must reach to count as a revival rather than a ripple of
    /// the initial decay.
    pub revival_min_height: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            grid_step: 1e-3,
            root_tolerance: 1e-12,
            peak_prominence: 0.01,
            revival_min_height: 0.1,
        }
    }
}

fn bisect<F: Fn(f64) -> f64>(g: &F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let lo_positive = g(lo) > 0.0;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest `t > 0` where `I(t) = 1`, or `None` when `I - 1` keeps its sign
/// on `(0, t_upper]`.
pub fn t_star_numeric(
    params: &ChainParams,
    convention: Convention,
    t_upper: f64,
) -> Result<Option<f64>> {
    t_star_numeric_with(params, convention, t_upper, &AnalysisOptions::default())
}

pub fn t_star_numeric_with(
    params: &ChainParams,
    convention: Convention,
    t_upper: f64,
    options: &AnalysisOptions,
) -> Result<Option<f64>> {
    if !(t_upper > 0.0 && t_upper.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "t_upper must be positive, got {t_upper}"
        )));
    }
    let f = ChFunctional::new(params, convention);
    let g = |t: f64| f.value(t) - CLASSICAL_BOUND;
    let scale = params.energy_scale();
    let step = options.grid_step / scale;
    let tol = options.root_tolerance / scale;
    let steps = (t_upper / step).ceil() as usize;
    let mut prev_t = 0.0;
    let mut prev_positive = g(0.0) > 0.0;
    for i in 1..=steps {
        let t = (i as f64 * step).min(t_upper);
        let positive = g(t) > 0.0;
        if positive != prev_positive {
            return Ok(Some(bisect(&g, prev_t, t, tol)));
        }
        prev_t = t;
        prev_positive = positive;
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChSample {
    pub t: f64,
    pub i_ch: f64,
    pub components: Option<ChComponents>,
}

/// Sampled `I(t)` on a strictly increasing, nonnegative grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChCurve {
    pub params: ChainParams,
    pub convention: Convention,
    pub samples: Vec<ChSample>,
}

impl ChCurve {
    /// Largest difference between stored `i_ch` values and the value rebuilt
    /// from the stored components.
    pub fn component_mismatch(&self) -> f64 {
        self.samples
            .iter()
            .filter_map(|s| s.components.map(|c| (c.i_ch() - s.i_ch).abs()))
            .fold(0.0, f64::max)
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }
}

pub fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (index, &t) in t_grid.iter().enumerate() {
        if !(t >= 0.0 && t.is_finite()) || (index > 0 && t <= t_grid[index - 1]) {
            return Err(Error::BadGrid { index });
        }
    }
    Ok(())
}

/// `t_steps + 1` equally spaced times on `[0, t_max]`; a single zero when
/// `t_max == 0`.
pub fn uniform_grid(t_max: f64, t_steps: usize) -> Result<Vec<f64>> {
    if t_steps == 0 {
        return Err(Error::InvalidArgument("t_steps must be at least 1".into()));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "t_max must be nonnegative, got {t_max}"
        )));
    }
    if t_max == 0.0 {
        return Ok(vec![0.0]);
    }
    Ok((0..=t_steps)
        .map(|i| t_max * i as f64 / t_steps as f64)
        .collect())
}

pub fn sample_curve(
    params: &ChainParams,
    convention: Convention,
    t_grid: &[f64],
) -> Result<ChCurve> {
    validate_grid(t_grid)?;
    let f = ChFunctional::new(params, convention);
    let samples = t_grid
        .iter()
        .map(|&t| {
            let c = f.components(t);
            ChSample {
                t,
                i_ch: c.i_ch(),
                components: Some(c),
            }
        })
        .collect();
    Ok(ChCurve {
        params: *params,
        convention,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub t_start: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub t: f64,
    pub value: f64,
    pub prominence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PeakSignal {
    /// `|G_NN(t)|^2`
    Gnn,
    /// `|G_1N(t)|^2`
    G1n,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationReport {
    pub violation_intervals: Vec<Interval>,
    /// Intervals with `I < 0`; never expected, reported as a bug signal.
    pub negative_intervals: Vec<Interval>,
    pub t_star_numeric: Option<f64>,
    pub t_star_estimate: Option<f64>,
    pub revival_peaks_gnn: Vec<Peak>,
    pub revival_peaks_g1n: Vec<Peak>,
    pub grid_resolution: f64,
    pub peak_prominence: f64,
}

impl ViolationReport {
    pub fn first_revival(&self, which: PeakSignal, min_height: f64) -> Option<Peak> {
        let peaks = match which {
            PeakSignal::Gnn => &self.revival_peaks_gnn,
            PeakSignal::G1n => &self.revival_peaks_g1n,
        };
        first_revival(peaks, min_height)
    }
}

/// Maximal runs where `above(sample)` holds, with interior endpoints refined
/// by bisection on `level_fn`.
fn threshold_intervals<F: Fn(f64) -> f64>(
    times: &[f64],
    values: &[f64],
    level_fn: &F,
    tol: f64,
) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    for i in 0..times.len() {
        let above = values[i] > 0.0;
        match (above, start) {
            (true, None) => {
                start = Some(if i == 0 {
                    times[0]
                } else {
                    bisect(level_fn, times[i - 1], times[i], tol)
                });
            }
            (false, Some(s)) => {
                out.push(Interval {
                    t_start: s,
                    t_end: bisect(level_fn, times[i - 1], times[i], tol),
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Interval {
            t_start: s,
            t_end: *times.last().expect("nonempty"),
        });
    }
    out
}

pub fn find_violations(curve: &ChCurve) -> Result<ViolationReport> {
    find_violations_with(curve, &AnalysisOptions::default())
}

pub fn find_violations_with(curve: &ChCurve, options: &AnalysisOptions) -> Result<ViolationReport> {
    if curve.samples.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let f = ChFunctional::new(&curve.params, curve.convention);
    let tol = options.root_tolerance / curve.params.energy_scale();
    let times = curve.times();

    let above: Vec<f64> = curve
        .samples
        .iter()
        .map(|s| s.i_ch - CLASSICAL_BOUND)
        .collect();
    let violation_intervals =
        threshold_intervals(&times, &above, &|t| f.value(t) - CLASSICAL_BOUND, tol);
    let below: Vec<f64> = curve.samples.iter().map(|s| -s.i_ch).collect();
    let negative_intervals = threshold_intervals(&times, &below, &|t| -f.value(t), tol);

    let last_t = *times.last().expect("nonempty");
    let t_star_numeric = violation_intervals
        .first()
        .filter(|iv| times[0] == 0.0 && iv.t_start == 0.0 && iv.t_end < last_t)
        .map(|iv| iv.t_end);

    let grid_resolution = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);

    let (revival_peaks_gnn, revival_peaks_g1n) = if last_t > times[0] {
        (
            peaks_on_span(&f, times[0], last_t, PeakSignal::Gnn, options),
            peaks_on_span(&f, times[0], last_t, PeakSignal::G1n, options),
        )
    } else {
        (Vec::new(), Vec::new())
    };

    Ok(ViolationReport {
        violation_intervals,
        negative_intervals,
        t_star_numeric,
        t_star_estimate: t_star_estimate(&curve.params).ok(),
        revival_peaks_gnn,
        revival_peaks_g1n,
        grid_resolution,
        peak_prominence: options.peak_prominence,
    })
}

fn signal_value(f: &ChFunctional, which: PeakSignal, t: f64) -> f64 {
    let c = f.components(t);
    match which {
        PeakSignal::Gnn => c.gnn_abs2,
        PeakSignal::G1n => c.g1n_abs2,
    }
}

fn golden_section_max<F: Fn(f64) -> f64>(g: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > tol {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    0.5 * (a + b)
}

/// Local maxima (including a maximum at the left edge) with their
/// topographic prominence.
fn grid_peaks(values: &[f64]) -> Vec<(usize, f64)> {
    let n = values.len();
    let mut out = Vec::new();
    for i in 0..n {
        let y = values[i];
        let left_ok = i == 0 || values[i - 1] < y;
        let right_ok = i + 1 < n && values[i + 1] <= y;
        if !(left_ok && right_ok) {
            continue;
        }
        let mut left_min = f64::INFINITY;
        for &v in values[..i].iter().rev() {
            if v > y {
                break;
            }
            left_min = left_min.min(v);
        }
        let mut right_min = f64::INFINITY;
        for &v in &values[i + 1..] {
            if v > y {
                break;
            }
            right_min = right_min.min(v);
        }
        let base = if i == 0 {
            right_min
        } else {
            left_min.max(right_min)
        };
        out.push((i, y - base));
    }
    out
}

fn peaks_on_span(
    f: &ChFunctional,
    t_start: f64,
    t_end: f64,
    which: PeakSignal,
    options: &AnalysisOptions,
) -> Vec<Peak> {
    let scale = f.params().energy_scale();
    let count = (((t_end - t_start) * scale) / options.grid_step)
        .ceil()
        .max(2.0) as usize;
    let step = (t_end - t_start) / count as f64;
    let times: Vec<f64> = (0..=count).map(|i| t_start + step * i as f64).collect();
    let values: Vec<f64> = times.iter().map(|&t| signal_value(f, which, t)).collect();
    let g = |t: f64| signal_value(f, which, t);
    grid_peaks(&values)
        .into_iter()
        .filter(|&(_, prominence)| prominence >= options.peak_prominence)
        .map(|(i, prominence)| {
            let t = if i == 0 {
                times[0]
            } else {
                golden_section_max(
                    &g,
                    times[i - 1],
                    times[i + 1],
                    options.root_tolerance / scale,
                )
            };
            Peak {
                t,
                value: g(t),
                prominence,
            }
        })
        .collect()
}

/// Peaks of `|G_NN|^2` or `|G_1N|^2` on `[0, horizon]`.
pub fn revival_peaks(
    params: &ChainParams,
    convention: Convention,
    horizon: f64,
    which: PeakSignal,
) -> Result<Vec<Peak>> {
    revival_peaks_with(
        params,
        convention,
        horizon,
        which,
        &AnalysisOptions::default(),
    )
}

pub fn revival_peaks_with(
    params: &ChainParams,
    convention: Convention,
    horizon: f64,
    which: PeakSignal,
    options: &AnalysisOptions,
) -> Result<Vec<Peak>> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let f = ChFunctional::new(params, convention);
    Ok(peaks_on_span(&f, 0.0, horizon, which, options))
}

/// First peak after `t = 0` tall enough to be a revival.
pub fn first_revival(peaks: &[Peak], min_height: f64) -> Option<Peak> {
    peaks
        .iter()
        .copied()
        .find(|p| p.t > 0.0 && p.value >= min_height)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, j: f64, mu: f64) -> ChainParams {
        ChainParams::new(n, j, mu).unwrap()
    }

    // Two sites: |G_22|^2 + |G_12|^2 = 1 and Re G_22 = cos(mu t) cos(J t).
    fn two_site(t: f64, j: f64, mu: f64) -> f64 {
        0.5 + 0.25 * SQRT_2 * (1.0 + (mu * t).cos() * (j * t).cos())
    }

    #[test]
    fn value_at_zero() {
        assert!((I_CH_AT_ZERO - 1.2071067811865476).abs() < 1e-15);
        for n in [2, 3, 17] {
            let v = i_ch_closed_form(0.0, &params(n, 1.0, 0.5), Convention::Plain);
            assert!((v - I_CH_AT_ZERO).abs() < 1e-12);
        }
    }

    #[test]
    fn two_site_matches_closed_form() {
        let v = i_ch_closed_form(
            std::f64::consts::FRAC_PI_2,
            &params(2, 1.0, -1.0),
            Convention::Plain,
        );
        assert!((v - (0.5 + 0.25 * SQRT_2)).abs() < 1e-12);
        for &t in &[0.1, 0.77, 3.3] {
            let v = i_ch_closed_form(t, &params(2, 0.6, 1.4), Convention::Alternating);
            assert!((v - two_site(t, 0.6, 1.4)).abs() < 1e-12);
        }
    }

    #[test]
    fn t_star_estimate_values() {
        let a = t_star_estimate(&params(3, 1.0, -1.0)).unwrap();
        assert!((a - 0.541196).abs() < 1e-6);
        let b = t_star_estimate(&params(3, 1.0, 0.0)).unwrap();
        assert!((b - 0.624920).abs() < 1e-6);
        assert_eq!(
            t_star_estimate(&params(3, 0.0, 0.0)),
            Err(Error::DegenerateScale)
        );
    }

    #[test]
    fn curvature_rejects_bad_step() {
        assert!(curvature_at_zero(&params(3, 1.0, 0.0), Convention::Plain, 0.0).is_err());
        assert!(curvature_at_zero(&params(3, 1.0, 0.0), Convention::Plain, -1.0).is_err());
    }

    #[test]
    fn two_site_curvature() {
        let c = curvature_at_zero(&params(2, 1.0, -1.0), Convention::Plain, 1e-2).unwrap();
        assert!((c.second_derivative + SQRT_2 / 2.0).abs() < 2e-6);
        assert!(c.first_derivative.abs() < 1e-8);
    }

    #[test]
    fn two_site_t_star() {
        let expected = (SQRT_2 - 1.0).sqrt().acos();
        let root = t_star_numeric(&params(2, 1.0, -1.0), Convention::Plain, 5.0)
            .unwrap()
            .unwrap();
        assert!((root - expected).abs() < 1e-9, "{root} vs {expected}");
        assert!((root - 0.87166).abs() < 1e-4);
    }

    #[test]
    fn t_star_absent_without_crossing() {
        // J = mu = 0: G is the identity and I stays at its maximum.
        let p = params(4, 0.0, 0.0);
        assert_eq!(t_star_numeric(&p, Convention::Plain, 10.0).unwrap(), None);
        assert!(t_star_numeric(&p, Convention::Plain, 0.0).is_err());
    }

    #[test]
    fn grid_validation() {
        assert_eq!(validate_grid(&[]), Err(Error::EmptyGrid));
        assert_eq!(validate_grid(&[0.0, 0.0]), Err(Error::BadGrid { index: 1 }));
        assert_eq!(validate_grid(&[-0.1]), Err(Error::BadGrid { index: 0 }));
        assert!(validate_grid(&[0.0, 0.5, 2.0]).is_ok());
        assert!(uniform_grid(1.0, 0).is_err());
        assert_eq!(uniform_grid(0.0, 5).unwrap(), vec![0.0]);
        assert_eq!(uniform_grid(2.0, 4).unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn single_point_curve() {
        let c = sample_curve(&params(5, 1.0, -1.0), Convention::Plain, &[0.0]).unwrap();
        assert_eq!(c.samples.len(), 1);
        assert!((c.samples[0].i_ch - I_CH_AT_ZERO).abs() < 1e-12);
        assert!(sample_curve(&params(5, 1.0, -1.0), Convention::Plain, &[]).is_err());
    }

    #[test]
    fn constant_curve_below_bound_has_no_violations() {
        let p = params(3, 1.0, -1.0);
        let samples = (0..50)
            .map(|i| ChSample {
                t: 1.0 + i as f64 * 0.1,
                i_ch: 0.9,
                components: None,
            })
            .collect();
        let curve = ChCurve {
            params: p,
            convention: Convention::Plain,
            samples,
        };
        let report = find_violations(&curve).unwrap();
        assert!(report.violation_intervals.is_empty());
        assert!(report.negative_intervals.is_empty());
        assert_eq!(report.t_star_numeric, None);
    }

    #[test]
    fn two_site_violation_interval_starts_at_zero() {
        let p = params(2, 1.0, -1.0);
        let grid = uniform_grid(2.0, 200).unwrap();
        let report = find_violations(&sample_curve(&p, Convention::Plain, &grid).unwrap()).unwrap();
        let first = report.violation_intervals[0];
        assert_eq!(first.t_start, 0.0);
        let expected = (SQRT_2 - 1.0).sqrt().acos();
        assert!((first.t_end - expected).abs() < 1e-9);
        assert_eq!(report.t_star_numeric, Some(first.t_end));
    }

    #[test]
    fn grid_peaks_prominence() {
        let values = [1.0, 0.2, 0.5, 0.1, 0.3, 0.25, 0.9, 0.0];
        let peaks = grid_peaks(&values);
        let idx: Vec<usize> = peaks.iter().map(|p| p.0).collect();
        assert_eq!(idx, vec![0, 2, 4, 6]);
        assert!((peaks[0].1 - 1.0).abs() < 1e-15);
        assert!((peaks[1].1 - 0.3).abs() < 1e-15);
        assert!((peaks[2].1 - 0.05).abs() < 1e-15);
        assert!((peaks[3].1 - 0.8).abs() < 1e-15);
    }

    #[test]
    fn gnn_peak_at_origin() {
        let peaks = revival_peaks(
            &params(16, 1.0, -1.0),
            Convention::Plain,
            5.0,
            PeakSignal::Gnn,
        )
        .unwrap();
        assert_eq!(peaks[0].t, 0.0);
        assert!((peaks[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_site_g1n_peaks_at_half_period() {
        // |G_12|^2 = sin^2(J t): maxima at (2n+1) pi / (2J).
        let peaks = revival_peaks(
            &params(2, 1.0, 0.3),
            Convention::Plain,
            6.0,
            PeakSignal::G1n,
        )
        .unwrap();
        let times: Vec<f64> = peaks.iter().map(|p| p.t).collect();
        assert_eq!(times.len(), 2);
        assert!((times[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
        assert!((times[1] - 1.5 * std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn observables_square_to_identity() {
        let s = MeasurementSettings::default();
        for obs in [s.a1, s.a2, s.b1, s.b2] {
            let m = obs.matrix();
            for r in 0..2 {
                for c in 0..2 {
                    assert_eq!(m[r][c], m[c][r]);
                    let sq: f64 = (0..2).map(|l| m[r][l] * m[l][c]).sum();
                    let id = if r == c { 1.0 } else { 0.0 };
                    assert!((sq - id).abs() < 1e-15);
                }
            }
        }
    }
}
