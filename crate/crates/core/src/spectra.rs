//! Spectral amplitude F(Δ) and photon spectral density S(Δ) = N|F(Δ)|².
//!
//! Detuning is Δ = ω₀ − ω. For an envelope with pulse-stage amplitude
//! B(t) the emitted-photon amplitude is
//!
//! ```text
//! F(Δ) = i ∫_{−θ}^{0} B(t) e^{−iΔt} dt + i B(0) / (γ + iΔ)
//! ```
//!
//! where the second term is the free-decay stage integrated in closed
//! form. For the rectangular pulse the first term is elementary as well
//! and [`amplitude_rect`] evaluates it directly.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::{LineSource, TailLaw};
use crate::dynamics::{amplitude_analytic, PulseSolution, SystemParams};
use crate::envelopes::Envelope;
use crate::error::{Error, Result};
use crate::quadrature::{composite, FourierPanels, GaussLegendre, PanelRun, DEFAULT_ORDER};

/// Half-width (relative to Ω) of the window around Δ = ±Ω/2 in which the
/// pulse term of the rectangular amplitude is evaluated from its Taylor
/// expansion instead of the 0/0 quotient.
pub const SINGULARITY_WINDOW: f64 = 1e-4;

/// Tolerance used by the ODE pass behind tabulated envelopes.
pub const TABULATED_ODE_TOL: f64 = 1e-12;

/// Default relative tolerance of the numeric amplitude.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

const MAX_NODES: usize = 1 << 23;

/// Weisskopf-Wigner line (1/π)·γ/(Δ² + γ²), unit area.
pub fn lorentzian(delta: f64, gamma: f64) -> f64 {
    gamma / (PI * (delta * delta + gamma * gamma))
}

/// Pulse term of the rectangular amplitude,
/// (2Ω e^{iπΔ/Ω} − 4iΔ)/(Ω² − 4Δ²), for Δ ≥ 0.
fn rect_pulse_term_nonneg(delta: f64, omega: f64) -> Complex64 {
    let d = delta - 0.5 * omega;
    if d.abs() < SINGULARITY_WINDOW * omega {
        // expansion about Δ = Ω/2 in powers of d/Ω; coefficients from the
        // series of the quotient, both zeros being simple
        let x = d / omega;
        let c0 = Complex64::new(0.5 * PI, 1.0);
        let c1 = Complex64::new(-0.5 * PI, 0.25 * PI * PI - 1.0);
        let c2 = Complex64::new(0.5 * PI - PI.powi(3) / 12.0, 1.0 - 0.25 * PI * PI);
        return (c0 + x * (c1 + x * c2)) / omega;
    }
    let phase = Complex64::from_polar(1.0, PI * delta / omega);
    (2.0 * omega * phase - Complex64::new(0.0, 4.0 * delta)) / (omega * omega - 4.0 * delta * delta)
}

fn rect_pulse_term(delta: f64, omega: f64) -> Complex64 {
    let v = rect_pulse_term_nonneg(delta.abs(), omega);
    if delta < 0.0 {
        v.conj()
    } else {
        v
    }
}

fn decay_term(b_end: Complex64, gamma: f64, delta: f64) -> Complex64 {
    Complex64::new(0.0, 1.0) * b_end / Complex64::new(gamma, delta)
}

/// Closed-form spectral amplitude for the rectangular pi pulse.
///
/// Finite and continuous through the removable singularities at
/// Δ = ±Ω/2.
pub fn amplitude_rect(delta: f64, params: &SystemParams) -> Complex64 {
    rect_amplitude(delta, params.omega(), params.gamma())
}

fn rect_amplitude(delta: f64, omega: f64, gamma: f64) -> Complex64 {
    rect_pulse_term(delta, omega) + Complex64::new(1.0, 0.0) / Complex64::new(gamma, delta)
}

/// Large-detuning asymptote of the rectangular-pulse line,
/// γΩ²/(4πΔ⁴) (normalizer γ/π).
pub fn asymptote_rect(delta: f64, params: &SystemParams) -> Result<f64> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::Domain(format!("asymptote needs a nonzero finite detuning, got {delta}")));
    }
    let (omega, gamma) = (params.omega(), params.gamma());
    Ok(gamma * omega * omega / (4.0 * PI * delta.powi(4)))
}

/// Incoherent part of the weak-drive resonance-fluorescence spectrum,
/// (Ω²/2γ²)·2Ω²γ/(Δ² + γ²)².
pub fn mollow_incoherent(delta: f64, params: &SystemParams) -> f64 {
    let (omega, gamma) = (params.omega(), params.gamma());
    let w2 = omega * omega;
    let l = delta * delta + gamma * gamma;
    w2 / (2.0 * gamma * gamma) * 2.0 * w2 * gamma / (l * l)
}

/// Unit-area shape of the incoherent part, (2γ³/π)/(Δ² + γ²)².
pub fn mollow_incoherent_normalized(delta: f64, gamma: f64) -> f64 {
    let l = delta * delta + gamma * gamma;
    2.0 * gamma.powi(3) / (PI * l * l)
}

/// Weight of the coherent (elastic) delta-function line, (Ω²/2γ²)·2π.
pub fn mollow_coherent_weight(params: &SystemParams) -> f64 {
    let (omega, gamma) = (params.omega(), params.gamma());
    omega * omega / (2.0 * gamma * gamma) * 2.0 * PI
}

#[derive(Debug)]
struct Level {
    panels: FourierPanels,
    weighted: Vec<Complex64>,
    magnitude: f64,
}

/// Numeric spectral amplitude for an arbitrary envelope.
///
/// The pulse integral is a composite Gauss-Legendre sum over panels no
/// wider than min(θ/16, π/(4|Δ|)), split at the envelope breakpoints.
/// Panel layouts come in levels that halve the width; each level's
/// weighted amplitude samples are computed once and reused for every Δ.
/// The error estimate compares two consecutive levels.
#[derive(Debug)]
pub struct NumericAmplitude {
    env: Envelope,
    params: SystemParams,
    gamma: f64,
    quad_tol: f64,
    rule: GaussLegendre,
    base: Vec<PanelRun>,
    pulse: Option<PulseSolution>,
    b_end: Complex64,
    levels: Vec<OnceLock<Level>>,
}

impl NumericAmplitude {
    pub fn new(env: &Envelope, params: &SystemParams, quad_tol: f64) -> Result<Self> {
        if !(1e-12..=1e-6).contains(&quad_tol) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerance must lie in [1e-12, 1e-6], got {quad_tol:e}"
            )));
        }
        let pulse = if env.is_builtin() {
            None
        } else {
            Some(PulseSolution::integrate(env, TABULATED_ODE_TOL)?)
        };
        let theta = env.duration();
        let base: Vec<PanelRun> = env
            .breakpoints()
            .windows(2)
            .map(|w| PanelRun::covering(w[0], w[1], theta / 16.0))
            .collect();
        let base_nodes: usize = base.iter().map(|r| r.panels).sum::<usize>() * DEFAULT_ORDER;
        let max_level = (MAX_NODES / base_nodes.max(1)).max(1).ilog2() as usize;
        let b_end = match &pulse {
            Some(sol) => sol.excited(0.0),
            None => amplitude_analytic(env, params, 0.0),
        };
        Ok(Self {
            env: env.clone(),
            params: *params,
            gamma: params.gamma(),
            quad_tol,
            rule: GaussLegendre::new(DEFAULT_ORDER),
            base,
            pulse,
            b_end,
            levels: (0..=max_level).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn envelope(&self) -> &Envelope {
        &self.env
    }

    /// B(t) on the pulse as used by the quadrature.
    pub fn excited(&self, t: f64) -> Complex64 {
        match &self.pulse {
            Some(sol) => sol.excited(t),
            None => amplitude_analytic(&self.env, &self.params, t),
        }
    }

    /// B(0), the amplitude handed to the free-decay stage.
    pub fn excited_at_end(&self) -> Complex64 {
        self.b_end
    }

    fn level(&self, k: usize) -> &Level {
        self.levels[k].get_or_init(|| {
            let runs: Vec<PanelRun> = self
                .base
                .iter()
                .map(|r| PanelRun {
                    start: r.start,
                    width: r.width / (1u64 << k) as f64,
                    panels: r.panels << k,
                })
                .collect();
            let panels = FourierPanels::new(self.rule.clone(), runs);
            let i = Complex64::new(0.0, 1.0);
            let weighted = panels.weigh(|t| i * self.excited(t));
            let magnitude = FourierPanels::magnitude(&weighted);
            Level {
                panels,
                weighted,
                magnitude,
            }
        })
    }

    fn widest_base(&self) -> f64 {
        self.base.iter().map(|r| r.width).fold(0.0, f64::max)
    }

    fn pulse_sum(&self, k: usize, delta: f64) -> Complex64 {
        let lv = self.level(k);
        lv.panels.transform(&lv.weighted, delta)
    }

    /// i∫B e^{−iΔt} dt over the pulse, with its error estimate.
    pub fn pulse_integral(&self, delta: f64) -> Result<(Complex64, f64)> {
        let limit = if delta == 0.0 { f64::INFINITY } else { 0.25 * PI / delta.abs() };
        let mut k = 0;
        while k + 1 < self.levels.len() && self.widest_base() / (1u64 << k) as f64 > limit {
            k += 1;
        }
        let tail = decay_term(self.b_end, self.gamma, delta);
        let (mut coarse, mut fine, mut k_fine) = if k == 0 {
            (self.pulse_sum(0, delta), self.pulse_sum(1, delta), 1)
        } else {
            (self.pulse_sum(k - 1, delta), self.pulse_sum(k, delta), k)
        };
        loop {
            let estimate = (fine - coarse).norm();
            let floor = 64.0 * f64::EPSILON * self.level(k_fine).magnitude;
            let requested = self.quad_tol * (fine + tail).norm() + floor;
            if estimate <= requested {
                return Ok((fine, estimate));
            }
            if k_fine + 1 >= self.levels.len() {
                return Err(Error::QuadratureNonConvergence { estimate, requested });
            }
            k_fine += 1;
            coarse = fine;
            fine = self.pulse_sum(k_fine, delta);
        }
    }

    /// F(Δ).
    pub fn at(&self, delta: f64) -> Result<Complex64> {
        let (pulse, _) = self.pulse_integral(delta)?;
        Ok(pulse + decay_term(self.b_end, self.gamma, delta))
    }

    /// Time-domain norm ∫|B|² dt over the pulse plus |B(0)|²/(2γ); by
    /// Parseval, ∫|F|² dΔ equals 2π times this.
    pub fn time_norm(&self) -> f64 {
        let rule = GaussLegendre::new(DEFAULT_ORDER);
        let theta = self.env.duration();
        let f = |t: f64| self.excited(t).norm_sqr();
        let pulse: f64 = self
            .env
            .breakpoints()
            .windows(2)
            .map(|w| composite(&rule, &f, w[0], w[1], crate::quadrature::panel_count(w[0], w[1], theta / 64.0)))
            .sum();
        pulse + self.b_end.norm_sqr() / (2.0 * self.gamma)
    }
}

/// Numeric F(Δ) for any envelope. Builds a fresh [`NumericAmplitude`];
/// keep one around when evaluating many detunings.
pub fn amplitude_numeric(env: &Envelope, delta: f64, params: &SystemParams, quad_tol: f64) -> Result<Complex64> {
    NumericAmplitude::new(env, params, quad_tol)?.at(delta)
}

/// How the spectral density is scaled from |F|².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Unit area.
    #[default]
    ExactUnit,
    /// N = γ/π, the large-Ω approximation.
    PaperApprox,
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact_unit" | "exact-unit" => Ok(Self::ExactUnit),
            "paper" | "approx" | "paper_approx" | "paper-approx" => Ok(Self::PaperApprox),
            other => Err(Error::InvalidParameter(format!("unknown normalization {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizationRecord {
    pub mode: Normalization,
    pub constant: f64,
}

/// Spectral amplitude evaluator dispatching on the envelope kind:
/// closed form for rectangular pulses, quadrature otherwise.
#[derive(Debug)]
pub enum Amplitude {
    ClosedForm { omega: f64, gamma: f64 },
    Numeric(Box<NumericAmplitude>),
}

impl Amplitude {
    pub fn new(env: &Envelope, params: &SystemParams, quad_tol: f64) -> Result<Self> {
        match env {
            Envelope::Rectangular { omega } => Ok(Self::ClosedForm {
                omega: *omega,
                gamma: params.gamma(),
            }),
            _ => Ok(Self::Numeric(Box::new(NumericAmplitude::new(env, params, quad_tol)?))),
        }
    }

    pub fn at(&self, delta: f64) -> Result<Complex64> {
        match self {
            Self::ClosedForm { omega, gamma } => Ok(rect_amplitude(delta, *omega, *gamma)),
            Self::Numeric(num) => num.at(delta),
        }
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self, Self::ClosedForm { .. })
    }
}

/// Sampled spectral density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub normalization: NormalizationRecord,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("detuning grid is empty".into()));
    }
    if grid.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidParameter("detuning grid contains non-finite values".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("detuning grid must be strictly ascending".into()));
    }
    Ok(())
}

/// `count` evenly spaced detunings from `min` to `max` inclusive.
pub fn linear_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !min.is_finite() || !max.is_finite() || min >= max {
        return Err(Error::InvalidParameter(format!(
            "grid needs min < max and at least two points (got {min}, {max}, {count})"
        )));
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| if k + 1 == count { max } else { min + step * k as f64 })
        .collect())
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Quartic-tail mass beyond the grid end `side` (+1 right, −1 left),
/// with the coefficient fitted as the trapezoid mean of y·Δ⁴ over the
/// last oscillation period inside the grid.
fn grid_tail(x: &[f64], y: &[f64], period: f64, side: f64) -> f64 {
    let n = x.len();
    let idx: Vec<usize> = if side > 0.0 {
        let end = x[n - 1];
        (0..n).filter(|&i| x[i] >= end - period).collect()
    } else {
        let end = x[0];
        (0..n).filter(|&i| x[i] <= end + period).collect()
    };
    let end = if side > 0.0 { x[n - 1] } else { x[0] };
    let coefficient = if idx.len() >= 2 {
        let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| y[i] * x[i].powi(4)).collect();
        trapezoid(&xs, &ys) / (xs[xs.len() - 1] - xs[0])
    } else {
        y[idx[0]] * end.powi(4)
    };
    coefficient / (3.0 * end.abs().powi(3))
}

impl Spectrum {
    /// Lorentzian reference line on `grid` (already of unit area).
    pub fn lorentzian(gamma: f64, grid: &[f64]) -> Result<Self> {
        check_grid(grid)?;
        Ok(Self {
            grid: grid.to_vec(),
            density: grid.iter().map(|&d| lorentzian(d, gamma)).collect(),
            normalization: NormalizationRecord {
                mode: Normalization::ExactUnit,
                constant: gamma / PI,
            },
        })
    }

    /// Trapezoid integral of the density over the grid.
    pub fn trapezoid(&self) -> f64 {
        trapezoid(&self.grid, &self.density)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// First detuning Δ ≥ 0 on the grid where `density` falls to `fraction`
/// of `reference`, interpolated linearly in the log of the ratio.
/// `None` if it never does.
pub fn crossover(grid: &[f64], density: &[f64], reference: &[f64], fraction: f64) -> Option<f64> {
    let ratio = |i: usize| (density[i] / (fraction * reference[i])).ln();
    let start = grid.iter().position(|&d| d >= 0.0)?;
    if ratio(start) <= 0.0 {
        return Some(grid[start]);
    }
    (start + 1..grid.len()).find(|&i| ratio(i) <= 0.0).map(|i| {
        let (r0, r1) = (ratio(i - 1), ratio(i));
        grid[i - 1] + (grid[i] - grid[i - 1]) * r0 / (r0 - r1)
    })
}

/// Evaluates S = N|F|² for `env` on `grid`.
///
/// `PaperApprox` uses N = γ/π. `ExactUnit` picks N so that the grid
/// trapezoid plus quartic tail corrections beyond both grid ends equals
/// one; this needs a grid that straddles the line centre and reaches the
/// asymptotic wings (|Δ| well beyond Ω).
pub fn build_spectrum(env: &Envelope, params: &SystemParams, grid: &[f64], mode: Normalization) -> Result<Spectrum> {
    check_grid(grid)?;
    let amp = Amplitude::new(env, params, DEFAULT_QUAD_TOL)?;
    let mut raw = Vec::with_capacity(grid.len());
    for &d in grid {
        raw.push(amp.at(d)?.norm_sqr());
    }
    let constant = match mode {
        Normalization::PaperApprox => params.gamma() / PI,
        Normalization::ExactUnit => {
            if grid.len() < 2 || !(grid[0] < 0.0 && grid[grid.len() - 1] > 0.0) {
                return Err(Error::InvalidParameter(
                    "exact normalization needs a grid with points on both sides of the line centre".into(),
                ));
            }
            let period = 2.0 * PI / env.duration();
            let total = trapezoid(grid, &raw) + grid_tail(grid, &raw, period, 1.0) + grid_tail(grid, &raw, period, -1.0);
            1.0 / total
        }
    };
    Ok(Spectrum {
        grid: grid.to_vec(),
        density: raw.into_iter().map(|r| constant * r).collect(),
        normalization: NormalizationRecord { mode, constant },
    })
}

impl Spectrum {
    /// Quartic tail corrections beyond both grid ends for an envelope of
    /// duration `duration`, in the same units as the density.
    pub fn tail_corrections(&self, duration: f64) -> f64 {
        let period = 2.0 * PI / duration;
        grid_tail(&self.grid, &self.density, period, 1.0) + grid_tail(&self.grid, &self.density, period, -1.0)
    }
}

/// Photon line of an atom excited by a pi pulse, usable as a moment and
/// decay-law source.
#[derive(Debug)]
pub struct PulseLine {
    env: Envelope,
    params: SystemParams,
    amplitude: Amplitude,
    normalization: NormalizationRecord,
    unit_constant: f64,
}

impl PulseLine {
    pub fn new(env: &Envelope, params: &SystemParams, mode: Normalization) -> Result<Self> {
        Self::with_tolerance(env, params, mode, DEFAULT_QUAD_TOL)
    }

    pub fn with_tolerance(env: &Envelope, params: &SystemParams, mode: Normalization, quad_tol: f64) -> Result<Self> {
        let amplitude = Amplitude::new(env, params, quad_tol)?;
        let norm = match &amplitude {
            Amplitude::Numeric(num) => num.time_norm(),
            Amplitude::ClosedForm { omega, gamma } => PI / (2.0 * omega) + 1.0 / (2.0 * gamma),
        };
        let unit_constant = 1.0 / (2.0 * PI * norm);
        let constant = match mode {
            Normalization::ExactUnit => unit_constant,
            Normalization::PaperApprox => params.gamma() / PI,
        };
        Ok(Self {
            env: env.clone(),
            params: *params,
            amplitude,
            normalization: NormalizationRecord { mode, constant },
            unit_constant,
        })
    }

    pub fn envelope(&self) -> &Envelope {
        &self.env
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn normalization(&self) -> NormalizationRecord {
        self.normalization
    }

    /// The normalizer that gives unit area, from the time-domain norm.
    pub fn unit_constant(&self) -> f64 {
        self.unit_constant
    }

    pub fn amplitude(&self, delta: f64) -> Result<Complex64> {
        self.amplitude.at(delta)
    }

    /// Oscillation period in Δ of the wings, 2π/θ.
    pub fn wing_period(&self) -> f64 {
        2.0 * PI / self.env.duration()
    }
}

impl LineSource for PulseLine {
    fn label(&self) -> String {
        self.env.name().to_string()
    }

    fn density(&self, delta: f64) -> Result<f64> {
        Ok(self.normalization.constant * self.amplitude.at(delta)?.norm_sqr())
    }

    fn tail(&self) -> TailLaw {
        TailLaw::Power {
            exponent: 4.0,
            coefficient: None,
            period: Some(self.wing_period()),
        }
    }

    fn gamma(&self) -> f64 {
        self.params.gamma()
    }

    fn reference_scale(&self) -> f64 {
        (PI / self.env.duration()).max(self.params.gamma())
    }

    fn features(&self) -> Vec<f64> {
        let w = PI / self.env.duration();
        vec![self.params.gamma(), 0.5 * w, w, 2.0 * w]
    }

    fn exact_total(&self) -> Option<f64> {
        Some(self.normalization.constant / self.unit_constant)
    }

    fn default_delta_max(&self) -> f64 {
        // quadrature cost grows with |Δ| for numeric amplitudes
        let factor = if self.amplitude.is_closed_form() { 1e3 } else { 1e2 };
        factor * self.reference_scale()
    }
}

/// The Lorentzian line as a source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianLine {
    pub gamma: f64,
}

impl LineSource for LorentzianLine {
    fn label(&self) -> String {
        "lorentzian".into()
    }

    fn density(&self, delta: f64) -> Result<f64> {
        Ok(lorentzian(delta, self.gamma))
    }

    fn tail(&self) -> TailLaw {
        TailLaw::Power {
            exponent: 2.0,
            coefficient: Some(self.gamma / PI),
            period: None,
        }
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn reference_scale(&self) -> f64 {
        self.gamma
    }

    fn features(&self) -> Vec<f64> {
        vec![self.gamma]
    }

    fn exact_total(&self) -> Option<f64> {
        Some(1.0)
    }

    fn exact_tail_fraction(&self, cutoff: f64) -> Option<f64> {
        Some(1.0 - 2.0 / PI * (cutoff / self.gamma).atan())
    }
}

/// Unit-area incoherent weak-drive fluorescence line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollowLine {
    pub params: SystemParams,
}

impl LineSource for MollowLine {
    fn label(&self) -> String {
        "mollow".into()
    }

    fn density(&self, delta: f64) -> Result<f64> {
        Ok(mollow_incoherent_normalized(delta, self.params.gamma()))
    }

    fn tail(&self) -> TailLaw {
        TailLaw::Power {
            exponent: 4.0,
            coefficient: Some(2.0 * self.params.gamma().powi(3) / PI),
            period: None,
        }
    }

    fn gamma(&self) -> f64 {
        self.params.gamma()
    }

    fn reference_scale(&self) -> f64 {
        self.params.gamma()
    }

    fn features(&self) -> Vec<f64> {
        vec![self.params.gamma()]
    }

    fn exact_total(&self) -> Option<f64> {
        Some(1.0)
    }
}
