//! Dissipative dynamics: the projector-decay master equation with
//! per-cycle renormalization, and the trace-preserving Lindblad variant,
//! over any drive schedule.
//!
//! Density matrices are column-stacked into 9-vectors and advanced by
//! cached half-cycle superoperator exponentials, so a single pair of 9x9
//! exponentials drives an arbitrarily long trajectory.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{expm_general, ComplexMatrix, ComplexVector};
use crate::model::{DensityMatrix, ModulationSchedule, SystemParams, STATE_A, STATE_B, STATE_C};
use crate::observables::TimeSeries;
use crate::propagate::half_cycle_hamiltonians;

/// Population decay channel of the excited state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecaySpec {
    /// Closed system.
    None,
    /// Anticommutator decay -1/2 {gamma |a><a|, rho}; trace-decreasing,
    /// compensated by per-cycle renormalization.
    Projector { gamma: f64 },
    /// Spontaneous emission |a> -> |b> and |a> -> |c| in Lindblad form;
    /// trace-preserving.
    Lindblad { gamma_ab: f64, gamma_ac: f64 },
}

impl DecaySpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            DecaySpec::None => true,
            DecaySpec::Projector { gamma } => *gamma >= 0.0 && gamma.is_finite(),
            DecaySpec::Lindblad { gamma_ab, gamma_ac } => {
                *gamma_ab >= 0.0 && *gamma_ac >= 0.0 && gamma_ab.is_finite() && gamma_ac.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams("decay rates must be finite and >= 0".into()))
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, DecaySpec::None)
    }
}

/// Column-stack a 3x3 matrix into a 9-vector (columns concatenated).
pub fn vec_density(rho: &ComplexMatrix) -> ComplexVector {
    debug_assert_eq!(rho.dim(), 3);
    let mut v = ComplexVector::zeros(9);
    for j in 0..3 {
        for i in 0..3 {
            v[j * 3 + i] = rho[(i, j)];
        }
    }
    v
}

/// Inverse of [`vec_density`].
pub fn unvec_density(v: &ComplexVector) -> ComplexMatrix {
    debug_assert_eq!(v.dim(), 9);
    let mut rho = ComplexMatrix::zeros(3);
    for j in 0..3 {
        for i in 0..3 {
            rho[(i, j)] = v[j * 3 + i];
        }
    }
    rho
}

fn projector_matrix(level: usize, weight: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(3);
    m[(level, level)] = Complex64::new(weight, 0.0);
    m
}

fn jump_matrix(to: usize, from: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(3);
    m[(to, from)] = Complex64::new(1.0, 0.0);
    m
}

/// Superoperator L with d vec(rho)/dt = L vec(rho) for the sign
/// convention i[rho, H] plus the selected decay generator.
pub fn liouvillian(h: &ComplexMatrix, decay: &DecaySpec) -> ComplexMatrix {
    let id = ComplexMatrix::identity(3);
    // i[rho, H] = i (rho H - H rho)  ->  i (H^T (x) I - I (x) H).
    let mut l = (&h.transposed().kron(&id) - &id.kron(h)).scale(Complex64::new(0.0, 1.0));
    match decay {
        DecaySpec::None => {}
        DecaySpec::Projector { gamma } => {
            // -1/2 {Gamma, rho} with Gamma = gamma |a><a|.
            let g = projector_matrix(STATE_A, *gamma);
            let anti = &id.kron(&g) + &g.transposed().kron(&id);
            l = &l + &anti.scale(Complex64::new(-0.5, 0.0));
        }
        DecaySpec::Lindblad { gamma_ab, gamma_ac } => {
            for (target, rate) in [(STATE_B, *gamma_ab), (STATE_C, *gamma_ac)] {
                let jump = jump_matrix(target, STATE_A);
                let number = &jump.dagger() * &jump;
                let sandwich = jump.conjugated().kron(&jump);
                let anti = &id.kron(&number) + &number.transposed().kron(&id);
                let dissipator =
                    &sandwich.scale(Complex64::new(2.0, 0.0)) - &anti;
                l = &l + &dissipator.scale(Complex64::new(rate / 2.0, 0.0));
            }
        }
    }
    l
}

/// Sampled density-matrix trajectory. Stored states are normalized to
/// unit trace; the raw trace at each sample and the per-cycle
/// pre-renormalization traces are kept alongside.
#[derive(Debug, Clone)]
pub struct DensityTrajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    sample_traces: Vec<f64>,
    renorm_log: Vec<f64>,
    schedule: ModulationSchedule,
    params: SystemParams,
}

impl DensityTrajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Raw trace of each stored sample before display normalization.
    pub fn sample_traces(&self) -> &[f64] {
        &self.sample_traces
    }

    /// Pre-normalization traces logged at each cycle boundary (empty
    /// unless projector decay runs with renormalization).
    pub fn renorm_log(&self) -> &[f64] {
        &self.renorm_log
    }

    pub fn schedule(&self) -> &ModulationSchedule {
        &self.schedule
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn realized_t_end(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Probe absorption Im(rho_ab) per sample.
    pub fn absorption_series(&self) -> TimeSeries {
        let values = self.states.iter().map(|rho| rho.entry(STATE_A, STATE_B).im).collect();
        TimeSeries::new_unchecked(self.times.clone(), values, "absorption")
    }

    /// Fidelity tr(rho(0) rho(t)) against the initial state (coincides
    /// with the pure-state fidelity when both endpoints are pure).
    pub fn overlap_series(&self) -> TimeSeries {
        let initial = self.states[0].matrix();
        let values = self
            .states
            .iter()
            .map(|rho| (initial * rho.matrix()).trace().re)
            .collect();
        TimeSeries::new_unchecked(self.times.clone(), values, "overlap")
    }
}

/// Advance a density matrix through the schedule by exact half-cycle
/// superoperator exponentials.
///
/// `samples_per_cycle` mirrors the pure-state propagator. For projector
/// decay with `renorm_per_cycle`, the state is renormalized at every
/// cycle boundary and the pre-normalization trace logged; the flag is
/// ignored for the trace-preserving variants. The unmodulated schedule
/// uses the fixed reference period as its cycle.
pub fn evolve_master(
    initial: &DensityMatrix,
    schedule: &ModulationSchedule,
    params: &SystemParams,
    t_end: f64,
    samples_per_cycle: usize,
    renorm_per_cycle: bool,
) -> Result<DensityTrajectory> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidParams(format!("t_end must be > 0, got {t_end}")));
    }
    if samples_per_cycle < 1 {
        return Err(Error::InvalidParams("samples_per_cycle must be >= 1".into()));
    }
    let tau = schedule.sampling_period();
    let n_cycles = (t_end / tau + 1e-9).floor() as usize;
    let renormalize = renorm_per_cycle && matches!(params.decay, DecaySpec::Projector { .. });

    let (h1, h2) = half_cycle_hamiltonians(schedule, params);
    let sub_steps = if samples_per_cycle == 1 { 1 } else { samples_per_cycle.div_ceil(2) };
    let dt = tau / 2.0 / sub_steps as f64;
    let scale = Complex64::new(dt, 0.0);
    let e1 = expm_general(&liouvillian(&h1, &params.decay).scale(scale))?;
    let e2 = expm_general(&liouvillian(&h2, &params.decay).scale(scale))?;
    let record_substeps = samples_per_cycle > 1;

    let mut v = vec_density(initial.matrix());
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut sample_traces = Vec::new();
    let mut renorm_log = Vec::new();
    times.push(0.0);
    states.push(initial.clone());
    sample_traces.push(initial.trace());

    let store = |v: &ComplexVector| -> Result<(DensityMatrix, f64)> {
        let rho = unvec_density(v);
        let symmetrized = (&rho + &rho.dagger()).scale(Complex64::new(0.5, 0.0));
        let trace = symmetrized.trace().re;
        if trace < 1e-12 {
            return Err(Error::TraceCollapse(trace));
        }
        let normalized = symmetrized.scale(Complex64::new(1.0 / trace, 0.0));
        Ok((DensityMatrix::new(normalized)?, trace))
    };

    for cycle in 0..n_cycles {
        let t0 = cycle as f64 * tau;
        for (half, e) in [(0usize, &e1), (1usize, &e2)] {
            for step in 1..=sub_steps {
                v = e.apply(&v)?;
                let at_boundary = half == 1 && step == sub_steps;
                if record_substeps && !at_boundary {
                    let (rho, trace) = store(&v)?;
                    times.push(t0 + (half * sub_steps + step) as f64 * dt);
                    states.push(rho);
                    sample_traces.push(trace);
                }
            }
        }
        // Cycle boundary: symmetrize against roundoff, log the trace, and
        // renormalize where the decay model is trace-decreasing.
        let rho = unvec_density(&v);
        let symmetrized = (&rho + &rho.dagger()).scale(Complex64::new(0.5, 0.0));
        let trace = symmetrized.trace().re;
        if trace < 1e-12 {
            return Err(Error::TraceCollapse(trace));
        }
        let next = if renormalize {
            renorm_log.push(trace);
            symmetrized.scale(Complex64::new(1.0 / trace, 0.0))
        } else {
            symmetrized
        };
        v = vec_density(&next);
        let stored = next.scale(Complex64::new(1.0 / next.trace().re, 0.0));
        times.push((cycle + 1) as f64 * tau);
        states.push(DensityMatrix::new(stored)?);
        sample_traces.push(trace);
    }

    Ok(DensityTrajectory {
        times,
        states,
        sample_traces,
        renorm_log,
        schedule: *schedule,
        params: params.clone(),
    })
}
