//! Closed-system evolution: exact piecewise cycle unitaries, stroboscopic
//! trajectories, the truncated product-formula effective Hamiltonian, and
//! eigendecomposition-based long-time evolution.
//!
//! Hamiltonians are piecewise constant, so within each segment the
//! propagator is an exact matrix exponential; the only error source is
//! eigendecomposition roundoff.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{commutator, expm_hermitian, hermitian_eig, ComplexMatrix};
use crate::model::{
    build_hamiltonians, ModulationSchedule, PureState, SystemParams, STATE_A, STATE_B,
};
use crate::observables::TimeSeries;

/// Sampled pure-state trajectory with its provenance.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<PureState>,
    schedule: ModulationSchedule,
    params: SystemParams,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn schedule(&self) -> &ModulationSchedule {
        &self.schedule
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// Last sampled time; equals the requested end time truncated to the
    /// final complete cycle boundary.
    pub fn realized_t_end(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Fidelity |<psi(0)|psi(t)>|^2 against the trajectory's own initial
    /// state, per sample.
    pub fn fidelity_series(&self) -> TimeSeries {
        let reference = &self.states[0];
        let values = self
            .states
            .iter()
            .map(|s| reference.amplitudes().inner(s.amplitudes()).norm_sqr())
            .collect();
        TimeSeries::new_unchecked(self.times.clone(), values, "fidelity")
    }

    /// Probe absorption Im(rho_ab) of the pure-state projector, per sample.
    pub fn absorption_series(&self) -> TimeSeries {
        let values = self
            .states
            .iter()
            .map(|s| (s.amplitudes()[STATE_A] * s.amplitudes()[STATE_B].conj()).im)
            .collect();
        TimeSeries::new_unchecked(self.times.clone(), values, "absorption")
    }
}

/// Half-cycle Hamiltonian pair (H1, H2) of a schedule; the unmodulated
/// schedule repeats the both-fields Hamiltonian in both slots.
pub fn half_cycle_hamiltonians(
    schedule: &ModulationSchedule,
    params: &SystemParams,
) -> (ComplexMatrix, ComplexMatrix) {
    let h = build_hamiltonians(params);
    match schedule {
        ModulationSchedule::Standard => (h.both.clone(), h.both),
        ModulationSchedule::SingleMod { .. } => (h.coupling_only, h.both),
        ModulationSchedule::DoubleMod { .. } => (h.coupling_only, h.probe_only),
    }
}

/// One-period propagator U(tau) = exp(-i tau H2 / 2) exp(-i tau H1 / 2).
pub fn cycle_unitary(
    schedule: &ModulationSchedule,
    params: &SystemParams,
) -> Result<ComplexMatrix> {
    let tau = schedule.tau().ok_or(Error::NoCycle)?;
    let (h1, h2) = half_cycle_hamiltonians(schedule, params);
    let u1 = expm_hermitian(&h1, tau / 2.0)?;
    let u2 = expm_hermitian(&h2, tau / 2.0)?;
    Ok(&u2 * &u1)
}

/// Exact piecewise propagation of a pure state up to the last complete
/// cycle boundary at or before `t_end`.
///
/// `samples_per_cycle = 1` records cycle boundaries only (stroboscopic);
/// larger values subdivide each half-cycle into `ceil(samples_per_cycle/2)`
/// equal exponential sub-steps and record every sub-step.
pub fn evolve_pure(
    initial: &PureState,
    schedule: &ModulationSchedule,
    params: &SystemParams,
    t_end: f64,
    samples_per_cycle: usize,
) -> Result<Trajectory> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidParams(format!("t_end must be > 0, got {t_end}")));
    }
    if samples_per_cycle < 1 {
        return Err(Error::InvalidParams("samples_per_cycle must be >= 1".into()));
    }
    let tau = schedule.sampling_period();
    let n_cycles = (t_end / tau + 1e-9).floor() as usize;

    let (h1, h2) = half_cycle_hamiltonians(schedule, params);
    let sub_steps = if samples_per_cycle == 1 { 1 } else { samples_per_cycle.div_ceil(2) };
    let dt = tau / 2.0 / sub_steps as f64;
    let u1 = expm_hermitian(&h1, dt)?;
    let u2 = expm_hermitian(&h2, dt)?;
    let record_substeps = samples_per_cycle > 1;

    let mut state = initial.amplitudes().clone();
    let mut times = Vec::with_capacity(n_cycles + 1);
    let mut states = Vec::with_capacity(n_cycles + 1);
    times.push(0.0);
    states.push(initial.clone());

    for cycle in 0..n_cycles {
        let t0 = cycle as f64 * tau;
        for (half, u) in [(0usize, &u1), (1usize, &u2)] {
            for step in 1..=sub_steps {
                state = u.apply(&state)?;
                let t = t0 + (half * sub_steps + step) as f64 * dt;
                let at_boundary = half == 1 && step == sub_steps;
                if record_substeps || at_boundary {
                    let t = if at_boundary { (cycle + 1) as f64 * tau } else { t };
                    times.push(t);
                    states.push(PureState::from_vector_unchecked(state.clone()));
                }
            }
        }
    }

    Ok(Trajectory { times, states, schedule: *schedule, params: params.clone() })
}

/// Three-term effective Hamiltonian of the split cycle,
/// (H1 + H2)/2 - (i tau / 8) [H2, H1] - (tau^2 / 96) [H2 - H1, [H2, H1]].
///
/// The result is Hermitian: the commutator of Hermitian matrices is
/// anti-Hermitian, so the i-weighted term is Hermitian again.
pub fn effective_hamiltonian(
    h1: &ComplexMatrix,
    h2: &ComplexMatrix,
    tau: f64,
) -> Result<ComplexMatrix> {
    if h1.dim() != h2.dim() {
        return Err(Error::DimensionMismatch(h1.dim(), h2.dim()));
    }
    if tau < 0.0 {
        return Err(Error::InvalidParams(format!("tau must be >= 0, got {tau}")));
    }
    for h in [h1, h2] {
        let dev = h.hermiticity_deviation();
        let tol = 1e-10 * h.frobenius_norm().max(1.0);
        if dev > tol {
            return Err(Error::NotHermitian { deviation: dev, tolerance: tol });
        }
    }
    let mean = (h1 + h2).scale(Complex64::new(0.5, 0.0));
    let comm = commutator(h2, h1)?;
    let first = comm.scale(Complex64::new(0.0, -tau / 8.0));
    let nested = commutator(&(h2 - h1), &comm)?;
    let second = nested.scale(Complex64::new(-tau * tau / 96.0, 0.0));
    Ok(&(&mean + &first) + &second)
}

/// Evolve a state for `n` cycles under a fixed effective Hamiltonian with
/// a single eigendecomposition: psi(n tau) = V exp(-i n tau D) V' psi(0).
pub fn evolve_eff(
    initial: &PureState,
    h_eff: &ComplexMatrix,
    tau: f64,
    n: u64,
) -> Result<PureState> {
    let (eigenvalues, v) = hermitian_eig(h_eff)?;
    let coeffs = v.dagger().apply(initial.amplitudes())?;
    let mut rotated = coeffs;
    for (k, lambda) in eigenvalues.iter().enumerate() {
        rotated[k] *= Complex64::from_polar(1.0, -lambda * tau * n as f64);
    }
    let out = v.apply(&rotated)?;
    Ok(PureState::from_vector_unchecked(out))
}

/// Squared overlap |<reference|state>|^2; symmetric in its arguments.
pub fn fidelity(reference: &PureState, state: &PureState) -> Result<f64> {
    for s in [reference, state] {
        let norm_sq = s.norm() * s.norm();
        if (norm_sq - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(norm_sq));
        }
    }
    Ok(reference.amplitudes().inner(state.amplitudes()).norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexVector;
    use crate::model::dark_state;
    use crate::open_system::DecaySpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_params() -> SystemParams {
        SystemParams::new(1.0, 1.0, 0.0, DecaySpec::None).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cycle_unitary_rejects_standard() {
        let err = cycle_unitary(&ModulationSchedule::Standard, &unit_params()).unwrap_err();
        assert!(matches!(err, Error::NoCycle));
    }

    #[test]
    fn cycle_unitary_zero_period_limit() {
        let s = ModulationSchedule::double(1e-8).unwrap();
        let u = cycle_unitary(&s, &unit_params()).unwrap();
        assert!((&u - &ComplexMatrix::identity(3)).frobenius_norm() <= 1e-7);
    }

    #[test]
    fn cycle_unitary_is_unitary() {
        for tau in [0.01, 0.1, 0.8, 1.9] {
            for s in [
                ModulationSchedule::single(tau).unwrap(),
                ModulationSchedule::double(tau).unwrap(),
            ] {
                let u = cycle_unitary(&s, &unit_params()).unwrap();
                let dev = (&(&u.dagger() * &u) - &ComplexMatrix::identity(3)).frobenius_norm();
                assert!(dev <= 1e-12);
            }
        }
    }

    #[test]
    fn double_mod_without_probe_keeps_b() {
        // With the probe off, |b> decouples from the coupling-only halves.
        let p = SystemParams::new(1.0, 0.0, 0.0, DecaySpec::None).unwrap();
        let s = ModulationSchedule::double(0.7).unwrap();
        let u = cycle_unitary(&s, &p).unwrap();
        let b = ComplexVector::basis(3, STATE_B);
        let out = u.apply(&b).unwrap();
        assert!((out.inner(&b).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolve_pure_zero_cycles() {
        let p = unit_params();
        let s = ModulationSchedule::double(1.0).unwrap();
        let d = dark_state(&p).unwrap();
        let traj = evolve_pure(&d, &s, &p, 0.5, 1).unwrap();
        assert_eq!(traj.len(), 1);
        assert!((fidelity(&d, &traj.states()[0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn evolve_pure_truncates_to_cycle_boundary() {
        let p = unit_params();
        let s = ModulationSchedule::double(0.3).unwrap();
        let d = dark_state(&p).unwrap();
        let traj = evolve_pure(&d, &s, &p, 1.0, 1).unwrap();
        assert!((traj.realized_t_end() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn evolve_pure_matches_cycle_unitary_stroboscopically() {
        let p = unit_params();
        for s in [
            ModulationSchedule::single(0.25).unwrap(),
            ModulationSchedule::double(0.25).unwrap(),
        ] {
            let d = dark_state(&p).unwrap();
            let traj = evolve_pure(&d, &s, &p, 5.0, 1).unwrap();
            let u = cycle_unitary(&s, &p).unwrap();
            let mut psi = d.amplitudes().clone();
            for state in traj.states().iter().skip(1) {
                psi = u.apply(&psi).unwrap();
                let dev = psi.sub(state.amplitudes()).norm();
                assert!(dev <= 1e-11, "dev = {dev:.3e}");
            }
        }
    }

    #[test]
    fn evolve_pure_intracycle_sampling_consistent() {
        let p = unit_params();
        let s = ModulationSchedule::single(0.4).unwrap();
        let d = dark_state(&p).unwrap();
        let coarse = evolve_pure(&d, &s, &p, 4.0, 1).unwrap();
        let fine = evolve_pure(&d, &s, &p, 4.0, 10).unwrap();
        assert_eq!(fine.len(), 10 * 10 + 1);
        // Cycle boundaries agree between the samplings.
        for (k, t) in coarse.times().iter().enumerate().skip(1) {
            let idx = fine.times().iter().position(|x| (x - t).abs() < 1e-12).unwrap();
            let dev = coarse.states()[k]
                .amplitudes()
                .sub(fine.states()[idx].amplitudes())
                .norm();
            assert!(dev < 1e-11);
        }
    }

    #[test]
    fn evolve_pure_conserves_norm() {
        let p = unit_params();
        let s = ModulationSchedule::double(0.1).unwrap();
        let d = dark_state(&p).unwrap();
        let traj = evolve_pure(&d, &s, &p, 60.0, 3).unwrap();
        for state in traj.states() {
            assert!((state.norm() - 1.0).abs() < 1e-9);
        }
        for w in traj.times().windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn effective_hamiltonian_commuting_pair() {
        let p = unit_params();
        let (h1, _) = half_cycle_hamiltonians(&ModulationSchedule::single(0.3).unwrap(), &p);
        let h2 = h1.scale(c(2.0, 0.0));
        let h_eff = effective_hamiltonian(&h1, &h2, 0.9).unwrap();
        let mean = (&h1 + &h2).scale(c(0.5, 0.0));
        assert!((&h_eff - &mean).frobenius_norm() < 1e-14);
    }

    #[test]
    fn effective_hamiltonian_zero_tau_is_mean() {
        let p = unit_params();
        let (h1, h2) = half_cycle_hamiltonians(&ModulationSchedule::double(0.3).unwrap(), &p);
        let h_eff = effective_hamiltonian(&h1, &h2, 0.0).unwrap();
        let mean = (&h1 + &h2).scale(c(0.5, 0.0));
        assert!((&h_eff - &mean).frobenius_norm() < 1e-15);
    }

    #[test]
    fn effective_hamiltonian_is_hermitian() {
        let p = SystemParams::new(1.2, 0.7, -0.15, DecaySpec::None).unwrap();
        let (h1, h2) = half_cycle_hamiltonians(&ModulationSchedule::double(0.5).unwrap(), &p);
        let h_eff = effective_hamiltonian(&h1, &h2, 0.5).unwrap();
        assert!(h_eff.hermiticity_deviation() <= 1e-12);
    }

    #[test]
    fn effective_hamiltonian_residual_order() {
        // Halving tau shrinks ||U(tau) - exp(-i tau H_eff)|| by ~2^4 for
        // the single-modulation pair (the kept expansion is O(tau^3)).
        let p = unit_params();
        let mut residuals = Vec::new();
        for tau in [0.2, 0.1] {
            let s = ModulationSchedule::single(tau).unwrap();
            let (h1, h2) = half_cycle_hamiltonians(&s, &p);
            let u = cycle_unitary(&s, &p).unwrap();
            let h_eff = effective_hamiltonian(&h1, &h2, tau).unwrap();
            let ue = expm_hermitian(&h_eff, tau).unwrap();
            residuals.push((&u - &ue).frobenius_norm());
        }
        let ratio = residuals[0] / residuals[1];
        assert!((12.0..=20.0).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn evolve_eff_identity_and_diagonal() {
        let p = unit_params();
        let d = dark_state(&p).unwrap();
        let h = ComplexMatrix::from_diagonal(&[c(0.3, 0.0), c(-0.2, 0.0), c(0.9, 0.0)]);
        let same = evolve_eff(&d, &h, 0.7, 0).unwrap();
        assert!((fidelity(&d, &same).unwrap() - 1.0).abs() < 1e-12);

        let out = evolve_eff(&d, &h, 0.7, 3).unwrap();
        for (k, lambda) in [0.3, -0.2, 0.9].iter().enumerate() {
            let expected = d.amplitudes()[k] * Complex64::from_polar(1.0, -lambda * 0.7 * 3.0);
            assert!((out.amplitudes()[k] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn evolve_eff_matches_repeated_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut h = ComplexMatrix::zeros(3);
        for i in 0..3 {
            h[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..3 {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        let tau = 0.1;
        let n = 1000u64;
        let psi0 = dark_state(&unit_params()).unwrap();
        let fast = evolve_eff(&psi0, &h, tau, n).unwrap();
        let u = expm_hermitian(&h, tau).unwrap();
        let mut psi = psi0.amplitudes().clone();
        for _ in 0..n {
            psi = u.apply(&psi).unwrap();
        }
        let dev = fast.amplitudes().sub(&psi).norm();
        assert!(dev <= 1e-10, "dev = {dev:.3e}");
    }

    #[test]
    fn fidelity_basics() {
        let b = PureState::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let cst = PureState::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let superpos = dark_state(&unit_params()).unwrap();
        assert!((fidelity(&b, &b).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&b, &cst).unwrap().abs() < 1e-15);
        assert!((fidelity(&superpos, &b).unwrap() - 0.5).abs() < 1e-15);
        assert!(
            (fidelity(&superpos, &b).unwrap() - fidelity(&b, &superpos).unwrap()).abs() < 1e-15
        );
    }
}
