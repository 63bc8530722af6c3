//! Observable extraction: absorption, oscillation envelopes, plateau
//! probes, series correlation, and the two-level interference amplitudes
//! behind the destructive-interference picture.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{DensityMatrix, SystemParams, STATE_A, STATE_B};

/// Sampled real-valued observable over strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    label: String,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Series(format!(
                "length mismatch: {} times vs {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Series("times must be strictly increasing".into()));
        }
        Ok(Self { times, values, label: label.into() })
    }

    pub(crate) fn new_unchecked(
        times: Vec<f64>,
        values: Vec<f64>,
        label: impl Into<String>,
    ) -> Self {
        debug_assert_eq!(times.len(), values.len());
        Self { times, values, label: label.into() }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }
}

/// Envelope statistics of an oscillating series over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationStats {
    /// Half the peak-to-peak excursion.
    pub amplitude: f64,
    /// Midpoint of the excursion.
    pub center: f64,
    /// The window the extrema were taken over.
    pub window: (f64, f64),
}

/// Plateau probe: the sample nearest the probe time plus a local
/// flatness diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauValue {
    pub value: f64,
    /// Standard deviation over [0.9 t_probe, t_probe]; non-plateaus show
    /// up as a large value here.
    pub flatness: f64,
    pub t_probe: f64,
}

/// Probe absorption of a state: Im(rho_ab), proportionality constant 1.
pub fn absorption_of(rho: &DensityMatrix) -> f64 {
    rho.entry(STATE_A, STATE_B).im
}

/// Direct min/max envelope extraction over the samples inside `window`.
/// The caller picks a window covering at least one oscillation period;
/// fewer than 8 samples inside are rejected as insufficient.
pub fn oscillation_stats(series: &TimeSeries, window: (f64, f64)) -> Result<OscillationStats> {
    let (lo, hi) = window;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut count = 0usize;
    for (t, v) in series.iter() {
        if t >= lo && t <= hi {
            min = min.min(v);
            max = max.max(v);
            count += 1;
        }
    }
    if count < 8 {
        return Err(Error::Series(format!(
            "window [{lo}, {hi}] holds {count} samples; need at least 8"
        )));
    }
    Ok(OscillationStats { amplitude: (max - min) / 2.0, center: (max + min) / 2.0, window })
}

/// Value at the sample nearest `t_probe`, with the local standard
/// deviation over [0.9 t_probe, t_probe] as a flatness diagnostic.
pub fn plateau_value(series: &TimeSeries, t_probe: f64) -> Result<PlateauValue> {
    let first = *series.times().first().ok_or_else(|| Error::Series("empty series".into()))?;
    let last = *series.times().last().unwrap();
    if t_probe < first || t_probe > last {
        return Err(Error::Series(format!(
            "probe time {t_probe} outside series range [{first}, {last}]"
        )));
    }
    let nearest = series
        .iter()
        .min_by(|(ta, _), (tb, _)| {
            (ta - t_probe).abs().partial_cmp(&(tb - t_probe).abs()).unwrap()
        })
        .unwrap();
    let lo = 0.9 * t_probe;
    let window: Vec<f64> =
        series.iter().filter(|(t, _)| *t >= lo && *t <= t_probe).map(|(_, v)| v).collect();
    let flatness = if window.len() < 2 {
        0.0
    } else {
        let mean = window.iter().sum::<f64>() / window.len() as f64;
        (window.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / window.len() as f64).sqrt()
    };
    Ok(PlateauValue { value: nearest.1, flatness, t_probe })
}

/// Pearson correlation of two series on identical time grids.
pub fn series_correlation(x: &TimeSeries, y: &TimeSeries) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Series(format!("grid mismatch: {} vs {} samples", x.len(), y.len())));
    }
    if x.times().iter().zip(y.times()).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(Error::Series("time grids differ".into()));
    }
    let n = x.len() as f64;
    if x.is_empty() {
        return Err(Error::Series("empty series".into()));
    }
    let mx = x.values().iter().sum::<f64>() / n;
    let my = y.values().iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.values().iter().zip(y.values()) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Series("zero variance".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Excited-state amplitudes of the split two-level picture after the
/// first half period and after the full period, from the dark-state
/// start (|b> - |c>)/sqrt(2):
/// amp_half = (i/sqrt 2) sin(pi + tau Omega_c / 4),
/// amp_full = (i/sqrt 2)[sin(pi + tau Omega_c/4) cos(tau Omega_p/4)
///            + sin(tau Omega_p/4)].
/// The near-cancellation of amp_full is the interference mechanism that
/// keeps the doubly-modulated system transparent.
pub fn qdi_phase_estimate(params: &SystemParams, tau: f64) -> (Complex64, Complex64) {
    let i_over_sqrt2 = Complex64::new(0.0, 1.0 / 2f64.sqrt());
    let half = (std::f64::consts::PI + tau * params.omega_c / 4.0).sin();
    let full = half * (tau * params.omega_p / 4.0).cos() + (tau * params.omega_p / 4.0).sin();
    (i_over_sqrt2 * half, i_over_sqrt2 * full)
}
