//! Closed-form fidelity and absorption formulas for the modulated
//! schedules, including the detuned coefficient tables.
//!
//! The expressions are transcribed verbatim: the point of this module is
//! to test them against the numeric propagators, not to improve them.
//! All of them assume unit Rabi frequencies; the detuned set additionally
//! assumes small detuning (validity flagged beyond |delta| = 0.2 or
//! tau = 1, where the truncated expansion visibly deviates).

use crate::error::{Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Coefficient bundle of the detuned fidelity/absorption expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffSet {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
    pub b6: f64,
    pub b7: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub tau: f64,
    pub delta: f64,
    /// Set when (tau, delta) lies outside the expansion's validity window.
    pub extrapolated: bool,
}

impl CoeffSet {
    pub const CSV_HEADER: &'static str =
        "tau,delta,a1,a2,a3,a4,b1,b2,b3,b4,b5,b6,b7,f1,f2,f3";

    pub fn csv_row(&self) -> String {
        [
            self.tau, self.delta, self.a1, self.a2, self.a3, self.a4, self.b1, self.b2,
            self.b3, self.b4, self.b5, self.b6, self.b7, self.f1, self.f2, self.f3,
        ]
        .iter()
        .map(|x| format!("{x:.11e}"))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// Single-modulation stroboscopic fidelity at unit Rabi frequencies and
/// zero detuning. Valid for tau^2 < 576.
pub fn fidelity_single(t: f64, tau: f64) -> Result<f64> {
    let tau2 = tau * tau;
    if tau2 >= 576.0 {
        return Err(Error::OutOfRegime(format!(
            "single-modulation fidelity needs tau^2 < 576, got tau = {tau}"
        )));
    }
    let a = 184320.0 - 192.0 * tau2 + tau2 * tau2;
    let osc = (576.0 - tau2).powi(2)
        + (36864.0 + 768.0 * tau2 + tau2 * tau2) * (a.sqrt() * t / 768.0).cos();
    Ok(osc * osc / (4.0 * a * a))
}

/// Zero-period limit of the single-modulation fidelity,
/// [9/10 + (1/10) cos(sqrt(5) t / 4)]^2.
pub fn fidelity_single_limit(t: f64) -> f64 {
    let osc = 0.9 + 0.1 * (5f64.sqrt() * t / 4.0).cos();
    osc * osc
}

/// Double-modulation stroboscopic fidelity at unit Rabi frequencies and
/// zero detuning. Valid for tau^2 < 192.
pub fn fidelity_double(t: f64, tau: f64) -> Result<f64> {
    let tau2 = tau * tau;
    if tau2 >= 192.0 {
        return Err(Error::OutOfRegime(format!(
            "double-modulation fidelity needs tau^2 < 192, got tau = {tau}"
        )));
    }
    let b = 18432.0 - 48.0 * tau2 + tau2 * tau2 / 2.0;
    let osc = (192.0 - tau2).powi(2) + 288.0 * tau2 * (b.sqrt() * t / 384.0).cos();
    Ok(osc * osc / (4.0 * b * b))
}

/// Closed-form oscillation (amplitude, center) of the single-modulation
/// fidelity; the maximum is exactly 1.
pub fn single_mod_extrema(tau: f64) -> Result<(f64, f64)> {
    let tau2 = tau * tau;
    if tau2 >= 576.0 {
        return Err(Error::OutOfRegime(format!("tau = {tau} out of range")));
    }
    let a = 184320.0 - 192.0 * tau2 + tau2 * tau2;
    let min_osc = (576.0 - tau2).powi(2) - (36864.0 + 768.0 * tau2 + tau2 * tau2);
    let f_min = min_osc * min_osc / (4.0 * a * a);
    Ok(((1.0 - f_min) / 2.0, (1.0 + f_min) / 2.0))
}

/// Closed-form oscillation (amplitude, center) of the double-modulation
/// fidelity.
pub fn double_mod_extrema(tau: f64) -> Result<(f64, f64)> {
    let tau2 = tau * tau;
    if tau2 >= 192.0 {
        return Err(Error::OutOfRegime(format!("tau = {tau} out of range")));
    }
    let b = 18432.0 - 48.0 * tau2 + tau2 * tau2 / 2.0;
    let min_osc = (192.0 - tau2).powi(2) - 288.0 * tau2;
    let f_min = min_osc * min_osc / (4.0 * b * b);
    Ok(((1.0 - f_min) / 2.0, (1.0 + f_min) / 2.0))
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        // sgn(0) = 0 keeps the paired coefficients equal at zero detuning
        // and the fidelity continuous there.
        0.0
    }
}

/// Full coefficient table of the detuned double-modulation expansion.
///
/// The a-coefficients satisfy a1 + a2 + a3 + a4 = 1 identically, which
/// pins F(0) = 1.
pub fn detuned_coeffs(tau: f64, delta: f64) -> CoeffSet {
    let d = delta;
    let d2 = d * d;
    let d3 = d2 * d;
    let t2 = tau * tau;
    let sg = sgn(d);

    let a_odd = 3.0 * SQRT2 * d3 - SQRT2 * d * t2 / 3072.0 * (12.0 + 197.0 * d2);
    let a_even = 2.0 * d2 + t2 / 128.0 * (1.0 - 8.0 * d2);
    let a1 = a_even - sg * a_odd;
    let a2 = a_even + sg * a_odd;
    let a3 = d2 * t2 / 64.0;
    let a4 = 1.0 - 4.0 * d2 - t2 / 64.0 * (1.0 - 7.0 * d2);

    let f_even = SQRT2 / 4.0 + 5.0 * SQRT2 * d2 / 16.0 - SQRT2 * t2 / 12288.0 * (4.0 + 7.0 * d2);
    let f_odd = d / 4.0 - 3.0 * d3 / 2.0 - d * t2 / 512.0 * (1.0 - 4.0 * d2);
    let f1 = f_even + sg * f_odd;
    let f2 = f_even - sg * f_odd;
    let f3 = SQRT2 / 2.0 + 5.0 * SQRT2 * d2 / 8.0 - SQRT2 * t2 / 6144.0 * (4.0 + 7.0 * d2);

    let b_even = -tau / 32.0 * (1.0 - 12.0 * d2);
    let b_odd = SQRT2 * d * tau / 256.0 * (4.0 + 35.0 * d2);
    let b1 = b_even - sg * b_odd;
    let b2 = b_even + sg * b_odd;
    let b3 = -3.0 * d2 * tau / 16.0;
    let b45_even = d / 2.0 * (1.0 - 2.0 * d2) - d3 * t2 / 384.0;
    let b45_odd = 3.0 * SQRT2 * d2 / 4.0 + SQRT2 * t2 / 6144.0 * (12.0 - 109.0 * d2);
    let b4 = b45_even - sg * b45_odd;
    let b5 = b45_even + sg * b45_odd;
    let b6 = SQRT2 * d2 / 2.0 + SQRT2 * t2 / 2048.0 * (4.0 - 33.0 * d2);
    let b7 = tau / 16.0 * (1.0 - 9.0 * d2);

    CoeffSet {
        a1,
        a2,
        a3,
        a4,
        b1,
        b2,
        b3,
        b4,
        b5,
        b6,
        b7,
        f1,
        f2,
        f3,
        tau,
        delta,
        extrapolated: d.abs() > 0.2 || tau > 1.0,
    }
}

/// Detuned double-modulation fidelity,
/// F(t) = a1 cos(f1 t) + a2 cos(f2 t) + a3 cos(f3 t) + a4.
pub fn fidelity_detuned(t: f64, tau: f64, delta: f64) -> f64 {
    let c = detuned_coeffs(tau, delta);
    c.a1 * (c.f1 * t).cos() + c.a2 * (c.f2 * t).cos() + c.a3 * (c.f3 * t).cos() + c.a4
}

/// Detuned double-modulation absorption Im(rho_ab), including the minus
/// signs on the b5 and b6 sine terms.
pub fn absorption_detuned(t: f64, tau: f64, delta: f64) -> f64 {
    let c = detuned_coeffs(tau, delta);
    c.b1 * (c.f1 * t).cos() + c.b2 * (c.f2 * t).cos() + c.b3 * (c.f3 * t).cos()
        + c.b4 * (c.f1 * t).sin()
        - c.b5 * (c.f2 * t).sin()
        - c.b6 * (c.f3 * t).sin()
        + c.b7
}

/// Detuning profile of the absorption, b7 + sqrt(b1^2 + b4^2) — the slow
/// envelope that survives after the oscillatory terms average out.
pub fn absorption_envelope(tau: f64, delta: f64) -> f64 {
    let c = detuned_coeffs(tau, delta);
    c.b7 + (c.b1 * c.b1 + c.b4 * c.b4).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_fidelity_at_time_zero() {
        for tau in [0.01, 0.1, 0.5, 1.0, 1.6, 1.9] {
            assert!((fidelity_single(0.0, tau).unwrap() - 1.0).abs() < 1e-12);
            assert!((fidelity_double(0.0, tau).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((fidelity_single_limit(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_mod_small_tau_minimum() {
        // At cos = -1 the zero-period limit gives (0.9 - 0.1)^2 = 0.64.
        let t_min = 4.0 * std::f64::consts::PI / 5f64.sqrt();
        let f = fidelity_single(t_min, 0.01).unwrap();
        assert!((f - 0.6399993000000511).abs() < 1e-12);
        assert!((fidelity_single_limit(t_min) - 0.64).abs() < 1e-12);
    }

    #[test]
    fn single_limit_extrema() {
        // Center and amplitude of the zero-period oscillation.
        let (amp, center) = ((1.0 - 0.64) / 2.0, (1.0 + 0.64) / 2.0);
        assert!((amp - 0.18).abs() < 1e-15);
        assert!((center - 0.82).abs() < 1e-15);
        let (amp_tau, center_tau) = single_mod_extrema(1e-6).unwrap();
        assert!((amp_tau - 0.18).abs() < 1e-9);
        assert!((center_tau - 0.82).abs() < 1e-9);
    }

    #[test]
    fn single_mod_maximum_is_one() {
        // Periods where the cosine returns to +1 restore unit fidelity.
        let tau = 0.1;
        let a = 184320.0 - 192.0 * tau * tau + tau.powi(4);
        let period = 2.0 * std::f64::consts::PI * 768.0 / a.sqrt();
        let f = fidelity_single(period, tau).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_mod_minimum_at_half_tau() {
        let tau = 0.5;
        let b = 18432.0 - 48.0 * tau * tau + tau.powi(4) / 2.0;
        let t_min = 384.0 * std::f64::consts::PI / b.sqrt();
        let f = fidelity_double(t_min, tau).unwrap();
        assert!((f - 0.9921977023110261).abs() < 1e-12);
        let (amp, center) = double_mod_extrema(tau).unwrap();
        assert!((amp - (1.0 - 0.9921977023110261) / 2.0).abs() < 1e-12);
        assert!((center - (1.0 + 0.9921977023110261) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn double_mod_zero_period_is_flat() {
        for t in [0.0, 3.7, 11.0, 60.0] {
            assert!((fidelity_double(t, 1e-9).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn regime_gates() {
        assert!(fidelity_single(1.0, 24.0).is_err());
        assert!(fidelity_double(1.0, 14.0).is_err());
    }

    #[test]
    fn detuned_coeffs_at_zero_detuning() {
        let c = detuned_coeffs(0.1, 0.0);
        assert!((c.a1 - 7.8125e-5).abs() < 1e-18);
        assert!((c.a2 - 7.8125e-5).abs() < 1e-18);
        assert_eq!(c.a3, 0.0);
        assert!((c.a4 - (1.0 - 0.01 / 64.0)).abs() < 1e-15);
        let f_expected = SQRT2 / 4.0 - SQRT2 * 0.01 / 3072.0;
        assert!((c.f1 - f_expected).abs() < 1e-15);
        assert_eq!(c.f1, c.f2);
        assert!((c.b7 - 0.00625).abs() < 1e-15);
        assert!((c.b1 + 0.003125).abs() < 1e-15);
        assert_eq!(c.b4, 0.0);
        assert_eq!(c.b4, c.b5);
        assert!(!c.extrapolated);
    }

    #[test]
    fn coefficient_sum_rule() {
        for tau in [0.01, 0.1, 0.5, 1.0] {
            for delta in [-0.2, -0.1, -0.01, 0.0, 0.01, 0.1, 0.2] {
                let c = detuned_coeffs(tau, delta);
                assert!(
                    (c.a1 + c.a2 + c.a3 + c.a4 - 1.0).abs() < 1e-12,
                    "sum rule broken at tau={tau}, delta={delta}"
                );
            }
        }
    }

    #[test]
    fn detuned_fidelity_at_zero_time() {
        for delta in [-0.15, 0.0, 0.08] {
            assert!((fidelity_detuned(0.0, 0.1, delta) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn detuned_reduces_to_double_mod() {
        let mut max_dev: f64 = 0.0;
        let mut t = 0.0;
        while t <= 60.0 {
            let dev = (fidelity_detuned(t, 0.1, 0.0) - fidelity_double(t, 0.1).unwrap()).abs();
            max_dev = max_dev.max(dev);
            t += 0.1;
        }
        assert!(max_dev <= 1e-6, "max dev = {max_dev:.3e}");
    }

    #[test]
    fn absorption_zero_at_time_zero_on_resonance() {
        // b1 + b2 + b3 + b7 = -tau/32 - tau/32 + 0 + tau/16 = 0.
        assert!(absorption_detuned(0.0, 0.1, 0.0).abs() < 1e-15);
    }

    #[test]
    fn absorption_vanishes_with_period() {
        for t in [0.0, 1.0, 7.3, 42.0] {
            assert!(absorption_detuned(t, 1e-12, 0.0).abs() < 1e-12);
        }
    }

    #[test]
    fn envelope_values() {
        assert!(absorption_envelope(1e-12, 0.0).abs() < 1e-12);
        assert!((absorption_envelope(0.1, 0.0) - 3.0 * 0.1 / 32.0).abs() < 1e-15);
        assert!((absorption_envelope(0.1, -0.1) - 0.04417211108890732).abs() < 1e-12);
    }

    #[test]
    fn envelope_on_resonance_grows_linearly() {
        let mut prev = 0.0;
        for k in 1..=20 {
            let tau = 0.05 * k as f64;
            let env = absorption_envelope(tau, 0.0);
            assert!((env - 3.0 * tau / 32.0).abs() < 1e-14);
            assert!(env > prev);
            prev = env;
        }
    }

    #[test]
    fn reflection_pairing_under_detuning_sign() {
        for delta in [0.03, 0.1, 0.19] {
            let plus = detuned_coeffs(0.1, delta);
            let minus = detuned_coeffs(0.1, -delta);
            assert!((plus.f1 - minus.f2).abs() < 1e-15);
            assert!((plus.a1 - minus.a2).abs() < 1e-15);
            assert!((plus.b1 - minus.b2).abs() < 1e-15);
            assert!((plus.b4 - minus.b5).abs() < 1e-15);
        }
    }

    #[test]
    fn extrapolation_flag() {
        assert!(!detuned_coeffs(0.5, 0.2).extrapolated);
        assert!(detuned_coeffs(0.5, 0.25).extrapolated);
        assert!(detuned_coeffs(1.2, 0.0).extrapolated);
    }

    #[test]
    fn fidelity_formulas_bounded() {
        for tau in [0.01, 0.1, 0.5, 1.0] {
            let mut t = 0.0;
            while t <= 200.0 {
                let fs = fidelity_single(t, tau).unwrap();
                let fd = fidelity_double(t, tau).unwrap();
                assert!((0.0..=1.0 + 1e-12).contains(&fs));
                assert!((0.0..=1.0 + 1e-12).contains(&fd));
                for delta in [-0.2, -0.1, 0.1, 0.2] {
                    let f = fidelity_detuned(t, tau, delta);
                    assert!((0.0..=1.0 + 1e-12).contains(&f), "F={f} at t={t}, tau={tau}, delta={delta}");
                }
                t += 0.25;
            }
        }
    }

    #[test]
    fn coeffset_csv_row_shape() {
        let c = detuned_coeffs(0.1, -0.1);
        let row = c.csv_row();
        assert_eq!(row.split(',').count(), CoeffSet::CSV_HEADER.split(',').count());
    }
}
