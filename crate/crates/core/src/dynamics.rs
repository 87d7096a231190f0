//! Excited-state amplitude B(t) of the driven two-level atom.
//!
//! During the pulse (t ∈ [−θ, 0]) relaxation is neglected and the
//! resonant drive is taken in the rotating-wave approximation:
//!
//! ```text
//! i dA/dt = (Ω(t)/2) B,   i dB/dt = (Ω(t)/2) A,   A(−θ) = 1, B(−θ) = 0
//! ```
//!
//! whose solution is A = cos(A(t)/2), B = −i sin(A(t)/2) with A(t) the
//! accumulated pulse area. After the pulse the atom decays freely,
//! B(t) = −i e^{−γt}.

use num_complex::Complex64;
use serde::Serialize;

use crate::envelopes::Envelope;
use crate::error::{Error, Result};
use crate::ode::{DenseSolution, Dopri5};

/// Below this Ω/γ the two-stage picture (no decay during the pulse) is
/// only qualitative.
pub const STRONG_PULSE_RATIO: f64 = 10.0;

/// Dimensionless problem definition. Rates are in units of γ unless the
/// caller picks another unit consistently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    omega: f64,
    gamma: f64,
}

impl SystemParams {
    pub fn new(omega: f64, gamma: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!("Rabi rate must be positive, got {omega}")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("decay rate must be positive, got {gamma}")));
        }
        Ok(Self { omega, gamma })
    }

    /// Ω = `ratio`·γ with γ = 1.
    pub fn from_ratio(ratio: f64) -> Result<Self> {
        Self::new(ratio, 1.0)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Population decay rate Γ = 2γ.
    pub fn big_gamma(&self) -> f64 {
        2.0 * self.gamma
    }

    pub fn ratio(&self) -> f64 {
        self.omega / self.gamma
    }

    pub fn strong_pulse(&self) -> bool {
        self.ratio() >= STRONG_PULSE_RATIO
    }

    /// Regime where the weak-drive Mollow comparison applies.
    pub fn weak_drive(&self) -> bool {
        self.omega <= self.gamma
    }

    pub fn rectangular(&self) -> Envelope {
        Envelope::Rectangular { omega: self.omega }
    }

    pub fn sine(&self) -> Envelope {
        Envelope::Sine { omega: self.omega }
    }
}

/// B(t) from the accumulated-area formula on the pulse and exponential
/// decay afterwards. Continuous at t = 0 with B(0) = −i for a pi pulse.
pub fn amplitude_analytic(env: &Envelope, params: &SystemParams, t: f64) -> Complex64 {
    if t > 0.0 {
        // B(0) is −i sin(π/2) = −i for every valid envelope
        let b0 = (0.5 * env.total_area()).sin();
        Complex64::new(0.0, -b0 * (-params.gamma() * t).exp())
    } else {
        Complex64::new(0.0, -(0.5 * env.area(t)).sin())
    }
}

/// Ground-state amplitude on the pulse, A(t) = cos(A(t)/2).
pub fn ground_analytic(env: &Envelope, t: f64) -> Complex64 {
    Complex64::new((0.5 * env.area(t)).cos(), 0.0)
}

/// Sampled pulse-stage amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub ground_values: Vec<Complex64>,
}

impl AmplitudeTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// max |(|A|² + |B|²) − 1| over the samples.
    pub fn max_norm_defect(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.ground_values)
            .map(|(b, a)| (b.norm_sqr() + a.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// max |Re B| over the samples; B stays on the −i·real axis for a real
    /// resonant envelope.
    pub fn max_phase_defect(&self) -> f64 {
        self.values.iter().map(|b| b.re.abs()).fold(0.0, f64::max)
    }

    /// max |B_sampled − B_analytic| over the samples.
    pub fn max_deviation_from_analytic(&self, env: &Envelope, params: &SystemParams) -> f64 {
        self.times
            .iter()
            .zip(&self.values)
            .map(|(&t, b)| (b - amplitude_analytic(env, params, t)).norm())
            .fold(0.0, f64::max)
    }
}

/// Numerically integrated pulse stage, callable at any time in the
/// support through the dense output of each integration piece.
#[derive(Debug, Clone)]
pub struct PulseSolution {
    start: f64,
    pieces: Vec<DenseSolution<4>>,
}

fn rwa_rhs(env: &Envelope) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] + '_ {
    move |t, y| {
        let half = 0.5 * env.evaluate(t);
        // y = [Re A, Im A, Re B, Im B]
        [half * y[3], -half * y[2], half * y[1], -half * y[0]]
    }
}

impl PulseSolution {
    /// Integrates the pulse stage with relative/absolute step tolerance
    /// `tol`, restarting at every envelope breakpoint.
    pub fn integrate(env: &Envelope, tol: f64) -> Result<Self> {
        if !(1e-14..=1e-6).contains(&tol) {
            return Err(Error::InvalidParameter(format!(
                "ODE tolerance must lie in [1e-14, 1e-6], got {tol:e}"
            )));
        }
        let solver = Dopri5::new(tol, tol);
        let rhs = rwa_rhs(env);
        let bps = env.breakpoints();
        let mut state = [1.0, 0.0, 0.0, 0.0];
        let mut pieces = Vec::with_capacity(bps.len() - 1);
        for w in bps.windows(2) {
            let sol = solver.solve(&rhs, w[0], state, w[1])?;
            state = sol.final_state();
            pieces.push(sol);
        }
        Ok(Self { start: bps[0], pieces })
    }

    /// (A(t), B(t)) with t clamped to the pulse support.
    pub fn eval(&self, t: f64) -> (Complex64, Complex64) {
        let idx = self
            .pieces
            .partition_point(|p| p.t_end() < t)
            .min(self.pieces.len() - 1);
        let y = self.pieces[idx].eval(t.max(self.start));
        (Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]))
    }

    pub fn excited(&self, t: f64) -> Complex64 {
        self.eval(t).1
    }

    pub fn steps(&self) -> usize {
        self.pieces.iter().map(|p| p.steps()).sum()
    }

    /// Samples the solution at the given times.
    pub fn sample(&self, times: &[f64]) -> AmplitudeTrajectory {
        let (ground_values, values) = times.iter().map(|&t| self.eval(t)).unzip();
        AmplitudeTrajectory {
            times: times.to_vec(),
            values,
            ground_values,
        }
    }
}

/// Default sample times: 64 per unit of pulse area, at least 256, uniform
/// in time and including both ends.
pub fn default_sample_times(env: &Envelope) -> Vec<f64> {
    let n = ((64.0 * env.total_area()).ceil() as usize).max(256);
    let start = env.start();
    let th = env.duration();
    (0..n)
        .map(|k| {
            if k + 1 == n {
                0.0
            } else {
                start + th * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Integrates the RWA equations over the pulse and samples the
/// trajectory at the default times.
pub fn amplitude_ode(env: &Envelope, tol: f64) -> Result<AmplitudeTrajectory> {
    let sol = PulseSolution::integrate(env, tol)?;
    Ok(sol.sample(&default_sample_times(env)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn analytic_examples() {
        let p = SystemParams::from_ratio(10.0).unwrap();
        let rect = p.rectangular();
        assert!(amplitude_analytic(&rect, &p, -PI / 10.0).norm() < 1e-15);
        let b0 = amplitude_analytic(&rect, &p, 0.0);
        assert!((b0 - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        let sine = p.sine();
        let mid = amplitude_analytic(&sine, &p, -PI / 20.0);
        assert!((mid.im + (PI / 4.0).sin()).abs() < 1e-15);
        assert_eq!(mid.re, 0.0);
    }

    #[test]
    fn analytic_continuous_at_pulse_end() {
        let p = SystemParams::from_ratio(25.0).unwrap();
        for env in [p.rectangular(), p.sine()] {
            let before = amplitude_analytic(&env, &p, -1e-12);
            let after = amplitude_analytic(&env, &p, 1e-12);
            assert!((before - after).norm() < 1e-10);
        }
        let b = amplitude_analytic(&p.rectangular(), &p, 2.0);
        assert!((b.im + (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn rectangular_matches_phase_shifted_cosine() {
        // −i sin(A(t)/2) = −i cos(Ωt/2) for the rectangular pulse
        let p = SystemParams::from_ratio(10.0).unwrap();
        let env = p.rectangular();
        for k in 0..=20 {
            let t = -PI / 10.0 * k as f64 / 20.0;
            let b = amplitude_analytic(&env, &p, t);
            assert!((b.im + (5.0 * t).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn ode_matches_analytic_midpoint_and_end() {
        let p = SystemParams::from_ratio(10.0).unwrap();
        for env in [p.rectangular(), p.sine()] {
            let sol = PulseSolution::integrate(&env, 1e-12).unwrap();
            let (a_end, b_end) = sol.eval(0.0);
            assert!((b_end - Complex64::new(0.0, -1.0)).norm() < 1e-8, "{}", env.name());
            assert!(a_end.norm() < 1e-8);
        }
        let rect = p.rectangular();
        let sol = PulseSolution::integrate(&rect, 1e-12).unwrap();
        let mid = sol.excited(-PI / 20.0);
        assert!((mid - Complex64::new(0.0, -(PI / 4.0).sin())).norm() < 1e-8);
    }

    #[test]
    fn trajectory_invariants() {
        let p = SystemParams::from_ratio(100.0).unwrap();
        for env in [p.rectangular(), p.sine()] {
            let traj = amplitude_ode(&env, 1e-12).unwrap();
            assert_eq!(traj.len(), 256);
            assert_eq!(traj.values[0], Complex64::new(0.0, 0.0));
            assert_eq!(traj.ground_values[0], Complex64::new(1.0, 0.0));
            assert!(traj.max_norm_defect() < 1e-8);
            assert!(traj.max_phase_defect() < 1e-8);
            assert!(traj.max_deviation_from_analytic(&env, &p) < 1e-8);
        }
    }

    #[test]
    fn tabulated_envelope_integrates_piecewise() {
        let env = Envelope::tabulated(&[(-1.0, 0.0), (-0.5, 2.0 * PI), (0.0, 0.0)]).unwrap();
        let p = SystemParams::from_ratio(10.0).unwrap();
        let sol = PulseSolution::integrate(&env, 1e-12).unwrap();
        for k in 0..=40 {
            let t = -1.0 + k as f64 / 40.0;
            assert!((sol.excited(t) - amplitude_analytic(&env, &p, t)).norm() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn rejects_out_of_range_tolerance() {
        let env = Envelope::rectangular(10.0).unwrap();
        assert!(amplitude_ode(&env, 1e-3).is_err());
        assert!(amplitude_ode(&env, 1e-16).is_err());
    }

    #[test]
    fn params_validation_and_regimes() {
        assert!(SystemParams::new(0.0, 1.0).is_err());
        assert!(SystemParams::new(1.0, -1.0).is_err());
        let p = SystemParams::new(20.0, 2.0).unwrap();
        assert_eq!(p.big_gamma(), 4.0);
        assert!(p.strong_pulse());
        assert!(!SystemParams::from_ratio(5.0).unwrap().strong_pulse());
        assert!(SystemParams::from_ratio(0.5).unwrap().weak_drive());
    }
}
