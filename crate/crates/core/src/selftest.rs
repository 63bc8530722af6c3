//! Runtime invariant suite behind the `selftest` command: a quick sweep
//! of the library's structural guarantees, one named check per line.

use num_complex::Complex64;

use crate::analytic;
use crate::linalg::{commutator, expm_general, expm_hermitian, hermitian_eig, ComplexMatrix};
use crate::model::{build_hamiltonians, dark_state, hamiltonian_at, ModulationSchedule, SystemParams};
use crate::observables;
use crate::open_system::{evolve_master, DecaySpec};
use crate::propagate::{cycle_unitary, evolve_pure};

/// Outcome of one named invariant check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub outcome: Result<(), String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(), String>) -> CheckResult {
    CheckResult { name, outcome: f() }
}

fn closed(omega_c: f64, omega_p: f64, delta: f64) -> SystemParams {
    SystemParams { omega_c, omega_p, delta, decay: DecaySpec::None }
}

fn ensure(cond: bool, detail: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(detail)
    }
}

/// Run every check; the list is deterministic and completes in seconds.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check("eig reconstruction and unitarity", || {
            let h = build_hamiltonians(&closed(1.3, 0.7, -0.2)).both;
            let (vals, v) = hermitian_eig(&h).map_err(|e| e.to_string())?;
            let diag = ComplexMatrix::from_diagonal(
                &vals.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(),
            );
            let rec = &(&v * &diag) * &v.dagger();
            let dev = (&rec - &h).frobenius_norm();
            let unit = (&(&v.dagger() * &v) - &ComplexMatrix::identity(3)).frobenius_norm();
            ensure(dev <= 1e-11 && unit <= 1e-12, format!("dev={dev:.2e} unit={unit:.2e}"))
        }),
        check("propagator group law", || {
            let h = build_hamiltonians(&closed(1.0, 1.0, 0.1)).both;
            let u1 = expm_hermitian(&h, 0.3).map_err(|e| e.to_string())?;
            let u2 = expm_hermitian(&h, 0.4).map_err(|e| e.to_string())?;
            let u = expm_hermitian(&h, 0.7).map_err(|e| e.to_string())?;
            let dev = (&(&u1 * &u2) - &u).frobenius_norm();
            ensure(dev <= 1e-11, format!("dev={dev:.2e}"))
        }),
        check("exponential doubling identity", || {
            let p = SystemParams {
                decay: DecaySpec::Lindblad { gamma_ab: 0.5, gamma_ac: 0.5 },
                ..closed(1.0, 1.0, -0.1)
            };
            let l = crate::open_system::liouvillian(&build_hamiltonians(&p).both, &p.decay);
            let whole = expm_general(&l).map_err(|e| e.to_string())?;
            let half =
                expm_general(&l.scale(Complex64::new(0.5, 0.0))).map_err(|e| e.to_string())?;
            let rel = (&whole - &(&half * &half)).frobenius_norm() / whole.frobenius_norm();
            ensure(rel <= 1e-10, format!("rel={rel:.2e}"))
        }),
        check("commutator trace vanishes", || {
            let h = build_hamiltonians(&closed(1.0, 1.0, 0.0));
            let comm =
                commutator(&h.coupling_only, &h.probe_only).map_err(|e| e.to_string())?;
            ensure(comm.trace().norm() <= 1e-12, format!("trace={}", comm.trace()))
        }),
        check("dark state annihilation at resonance", || {
            for (oc, op) in [(1.0, 1.0), (99f64.sqrt(), 1.0), (0.4, 1.9)] {
                let p = closed(oc, op, 0.0);
                let d = dark_state(&p).map_err(|e| e.to_string())?;
                let residual =
                    build_hamiltonians(&p).both.apply(d.amplitudes()).map_err(|e| e.to_string())?;
                ensure(residual.norm() <= 1e-12, format!("residual={:.2e}", residual.norm()))?;
            }
            Ok(())
        }),
        check("schedule periodicity", || {
            let p = closed(1.0, 1.0, 0.05);
            let s = ModulationSchedule::double(0.3).map_err(|e| e.to_string())?;
            for k in 0..30 {
                let t = 0.013 * k as f64;
                let dev = (&hamiltonian_at(&s, &p, t) - &hamiltonian_at(&s, &p, t + 0.3))
                    .frobenius_norm();
                ensure(dev <= 1e-12, format!("dev={dev:.2e} at t={t}"))?;
            }
            Ok(())
        }),
        check("stroboscopic consistency with cycle unitary", || {
            let p = closed(1.0, 1.0, 0.0);
            let s = ModulationSchedule::single(0.25).map_err(|e| e.to_string())?;
            let d = dark_state(&p).map_err(|e| e.to_string())?;
            let traj = evolve_pure(&d, &s, &p, 10.0, 1).map_err(|e| e.to_string())?;
            let u = cycle_unitary(&s, &p).map_err(|e| e.to_string())?;
            let mut psi = d.amplitudes().clone();
            for state in traj.states().iter().skip(1) {
                psi = u.apply(&psi).map_err(|e| e.to_string())?;
                let dev = psi.sub(state.amplitudes()).norm();
                ensure(dev <= 1e-11, format!("dev={dev:.2e}"))?;
            }
            Ok(())
        }),
        check("trajectory norm conservation", || {
            let p = closed(1.0, 1.0, -0.1);
            let s = ModulationSchedule::double(0.1).map_err(|e| e.to_string())?;
            let d = dark_state(&p).map_err(|e| e.to_string())?;
            let traj = evolve_pure(&d, &s, &p, 60.0, 2).map_err(|e| e.to_string())?;
            for state in traj.states() {
                ensure((state.norm() - 1.0).abs() <= 1e-9, format!("norm={}", state.norm()))?;
            }
            Ok(())
        }),
        check("single-modulation zero-period limit", || {
            let p = closed(1.0, 1.0, 0.0);
            let s = ModulationSchedule::single(0.01).map_err(|e| e.to_string())?;
            let d = dark_state(&p).map_err(|e| e.to_string())?;
            let traj = evolve_pure(&d, &s, &p, 30.0, 1).map_err(|e| e.to_string())?;
            let fid = traj.fidelity_series();
            for (t, f) in fid.iter() {
                let dev = (f - analytic::fidelity_single_limit(t)).abs();
                ensure(dev <= 5e-3, format!("dev={dev:.2e} at t={t}"))?;
            }
            Ok(())
        }),
        check("double-modulation transparency onset", || {
            let p = closed(1.0, 1.0, 0.0);
            let s = ModulationSchedule::double(0.01).map_err(|e| e.to_string())?;
            let d = dark_state(&p).map_err(|e| e.to_string())?;
            let traj = evolve_pure(&d, &s, &p, 100.0, 1).map_err(|e| e.to_string())?;
            let min =
                traj.fidelity_series().values().iter().copied().fold(f64::INFINITY, f64::min);
            ensure(min >= 0.9999, format!("min F = {min}"))
        }),
        check("coefficient sum rule", || {
            for tau in [0.01, 0.1, 0.5, 1.0] {
                for delta in [-0.2, -0.05, 0.0, 0.05, 0.2] {
                    let c = analytic::detuned_coeffs(tau, delta);
                    let sum = c.a1 + c.a2 + c.a3 + c.a4;
                    ensure((sum - 1.0).abs() <= 1e-12, format!("sum={sum} at ({tau},{delta})"))?;
                }
            }
            Ok(())
        }),
        check("unit fidelity at time zero", || {
            for tau in [0.01, 0.1, 0.5, 1.0, 1.6, 1.9] {
                let fs = analytic::fidelity_single(0.0, tau).map_err(|e| e.to_string())?;
                let fd = analytic::fidelity_double(0.0, tau).map_err(|e| e.to_string())?;
                ensure((fs - 1.0).abs() <= 1e-12, format!("single {fs} at tau={tau}"))?;
                ensure((fd - 1.0).abs() <= 1e-12, format!("double {fd} at tau={tau}"))?;
            }
            Ok(())
        }),
        check("on-resonance envelope is 3 tau / 32", || {
            let mut prev = -1.0;
            for k in 1..=19 {
                let tau = 0.1 * k as f64;
                let env = analytic::absorption_envelope(tau, 0.0);
                ensure(
                    (env - 3.0 * tau / 32.0).abs() <= 1e-13 && env > prev,
                    format!("env={env} at tau={tau}"),
                )?;
                prev = env;
            }
            Ok(())
        }),
        check("lindblad trace preservation and positivity", || {
            let p = SystemParams {
                decay: DecaySpec::Lindblad { gamma_ab: 0.5, gamma_ac: 0.5 },
                ..closed(1.0, 1.0, -0.1)
            };
            let s = ModulationSchedule::double(0.5).map_err(|e| e.to_string())?;
            let d = dark_state(&p).map_err(|e| e.to_string())?;
            let traj =
                evolve_master(&d.density(), &s, &p, 30.0, 2, false).map_err(|e| e.to_string())?;
            for (trace, rho) in traj.sample_traces().iter().zip(traj.states()) {
                ensure((trace - 1.0).abs() <= 1e-8, format!("trace={trace}"))?;
                let min = rho.smallest_eigenvalue();
                ensure(min >= -1e-8, format!("min eigenvalue {min:.2e}"))?;
            }
            Ok(())
        }),
        check("zero-decay master equation reduces to unitary", || {
            let p = closed(1.0, 1.0, -0.1);
            let s = ModulationSchedule::double(0.2).map_err(|e| e.to_string())?;
            let d = dark_state(&p).map_err(|e| e.to_string())?;
            let pure = evolve_pure(&d, &s, &p, 20.0, 1).map_err(|e| e.to_string())?;
            let master =
                evolve_master(&d.density(), &s, &p, 20.0, 1, false).map_err(|e| e.to_string())?;
            for (ps, ms) in pure.states().iter().zip(master.states()) {
                let dev = (ps.density().matrix() - ms.matrix()).frobenius_norm();
                ensure(dev <= 1e-8, format!("dev={dev:.2e}"))?;
            }
            Ok(())
        }),
        check("projector renormalization log in unit interval", || {
            let p = SystemParams {
                decay: DecaySpec::Projector { gamma: 1.0 },
                ..closed(1.0, 1.0, -0.1)
            };
            let s = ModulationSchedule::double(0.5).map_err(|e| e.to_string())?;
            let d = dark_state(&p).map_err(|e| e.to_string())?;
            let traj =
                evolve_master(&d.density(), &s, &p, 20.0, 1, true).map_err(|e| e.to_string())?;
            ensure(!traj.renorm_log().is_empty(), "no renormalization events".into())?;
            for &trace in traj.renorm_log() {
                ensure(trace > 0.0 && trace <= 1.0 + 1e-12, format!("trace={trace}"))?;
            }
            Ok(())
        }),
        check("fidelity formulas bounded in [0, 1]", || {
            for tau in [0.01, 0.1, 0.5, 1.0] {
                let mut t = 0.0;
                while t <= 200.0 {
                    for delta in [-0.2, 0.0, 0.2] {
                        let f = analytic::fidelity_detuned(t, tau, delta);
                        ensure(
                            (-1e-12..=1.0 + 1e-12).contains(&f),
                            format!("F={f} at (t={t}, tau={tau}, delta={delta})"),
                        )?;
                    }
                    t += 0.5;
                }
            }
            Ok(())
        }),
        check("interference amplitudes cancel over the full period", || {
            let p = closed(1.0, 1.0, 0.0);
            for tau in [0.5, 0.2, 0.1, 0.05] {
                let (half, full) = observables::qdi_phase_estimate(&p, tau);
                ensure(
                    full.norm() / half.norm() < 0.01,
                    format!("ratio {} at tau={tau}", full.norm() / half.norm()),
                )?;
            }
            Ok(())
        }),
    ]
}
