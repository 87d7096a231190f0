//! Pi-pulse envelopes Ω(t) supported on [−θ, 0].
//!
//! The pulse always ends at t = 0, where free decay takes over. Built-in
//! shapes are parametrised by a rate `Ω` with duration `θ = π/Ω`:
//!
//! * rectangular: Ω(t) = Ω on the support;
//! * sine: Ω(t) = −(π/2)·Ω·sin(Ωt), non-negative on the support with peak
//!   value πΩ/2 at t = −θ/2 (so `Ω` is a rate parameter, not the peak).
//!
//! Tabulated envelopes are linearly interpolated and must already carry
//! pulse area π; they are validated, never rescaled.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};

/// Relative tolerance on the pulse area of a tabulated envelope.
pub const TABULATED_AREA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum Envelope {
    Rectangular { omega: f64 },
    Sine { omega: f64 },
    Tabulated(Table),
}

/// Samples `(t, Ω(t))` with ascending times ending at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    times: Vec<f64>,
    values: Vec<f64>,
    // running trapezoid area at each node
    areas: Vec<f64>,
}

impl Table {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn segment(&self, t: f64) -> usize {
        self.times
            .partition_point(|&x| x <= t)
            .saturating_sub(1)
            .min(self.times.len() - 2)
    }

    fn evaluate(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    fn area(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let t0 = self.times[i];
        let v0 = self.values[i];
        let v = self.evaluate(t);
        self.areas[i] + 0.5 * (v0 + v) * (t - t0)
    }
}

fn check_rate(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEnvelope(format!(
            "rate parameter must be positive and finite, got {omega}"
        )))
    }
}

impl Envelope {
    pub fn rectangular(omega: f64) -> Result<Self> {
        check_rate(omega)?;
        Ok(Self::Rectangular { omega })
    }

    pub fn sine(omega: f64) -> Result<Self> {
        check_rate(omega)?;
        Ok(Self::Sine { omega })
    }

    /// Builds a tabulated envelope from `(t, Ω(t))` samples.
    ///
    /// The times must be strictly ascending, start below zero and end at
    /// exactly zero; the trapezoid area must equal π to
    /// [`TABULATED_AREA_TOL`] relative.
    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidEnvelope(format!(
                "table needs at least two samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidEnvelope("table contains non-finite values".into()));
        }
        if let Some(w) = samples.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidEnvelope(format!(
                "table times must be strictly ascending ({} then {})",
                w[0].0, w[1].0
            )));
        }
        let last = samples[samples.len() - 1].0;
        if last != 0.0 {
            return Err(Error::InvalidEnvelope(format!(
                "table must end at t = 0 (pulse end), last time is {last}"
            )));
        }
        let times: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let mut areas = Vec::with_capacity(times.len());
        let mut acc = 0.0;
        areas.push(0.0);
        for i in 1..times.len() {
            acc += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
            areas.push(acc);
        }
        if ((acc - PI) / PI).abs() > TABULATED_AREA_TOL {
            return Err(Error::InvalidEnvelope(format!(
                "pulse area {acc} differs from pi by more than {TABULATED_AREA_TOL} relative"
            )));
        }
        Ok(Self::Tabulated(Table { times, values, areas }))
    }

    /// Parses the two-column `t omega` text format (whitespace separated,
    /// `#` comments and blank lines ignored).
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split_whitespace();
            let mut next = |name: &str| -> Result<f64> {
                let raw = cols.next().ok_or_else(|| {
                    Error::InvalidEnvelope(format!("line {}: missing {name} column", lineno + 1))
                })?;
                raw.parse::<f64>().map_err(|e| {
                    Error::InvalidEnvelope(format!("line {}: bad {name} value {raw:?}: {e}", lineno + 1))
                })
            };
            let t = next("t")?;
            let v = next("omega")?;
            if cols.next().is_some() {
                return Err(Error::InvalidEnvelope(format!(
                    "line {}: expected two columns",
                    lineno + 1
                )));
            }
            samples.push((t, v));
        }
        Self::tabulated(&samples)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidEnvelope(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_table(&text)
    }

    /// Pulse duration θ.
    pub fn duration(&self) -> f64 {
        match self {
            Self::Rectangular { omega } | Self::Sine { omega } => PI / omega,
            Self::Tabulated(table) => -table.times[0],
        }
    }

    /// Start of the support, −θ.
    pub fn start(&self) -> f64 {
        match self {
            Self::Tabulated(table) => table.times[0],
            _ => -self.duration(),
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, Self::Tabulated(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Rectangular { .. } => "rect",
            Self::Sine { .. } => "sine",
            Self::Tabulated(_) => "tabulated",
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start() && t <= 0.0
    }

    /// Ω(t); exactly zero outside the support.
    pub fn evaluate(&self, t: f64) -> f64 {
        if !self.contains(t) {
            return 0.0;
        }
        match self {
            Self::Rectangular { omega } => *omega,
            Self::Sine { omega } => -0.5 * PI * omega * (omega * t).sin(),
            Self::Tabulated(table) => table.evaluate(t),
        }
    }

    /// Accumulated area A(t) = ∫_{−θ}^{t} Ω(s) ds, with `t` clamped to the
    /// support.
    pub fn area(&self, t: f64) -> f64 {
        let t = t.clamp(self.start(), 0.0);
        match self {
            Self::Rectangular { omega } => omega * (t - self.start()),
            Self::Sine { omega } => 0.5 * PI * ((omega * t).cos() + 1.0),
            Self::Tabulated(table) => table.area(t),
        }
    }

    pub fn total_area(&self) -> f64 {
        self.area(0.0)
    }

    /// Points inside the support where Ω(t) is not smooth, including both
    /// ends. Numerical integration over the pulse splits at these.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Tabulated(table) => table.times.clone(),
            _ => vec![self.start(), 0.0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{composite, GaussLegendre};
    use std::f64::consts::FRAC_PI_2;

    fn sine_table(n: usize) -> Vec<(f64, f64)> {
        let env = Envelope::sine(2.0).unwrap();
        let th = env.duration();
        (0..=n)
            .map(|k| {
                let t = if k == n { 0.0 } else { -th + th * k as f64 / n as f64 };
                (t, env.evaluate(t))
            })
            .collect()
    }

    #[test]
    fn evaluate_examples() {
        let rect = Envelope::rectangular(1.0).unwrap();
        assert_eq!(rect.evaluate(-FRAC_PI_2), 1.0);
        assert_eq!(rect.evaluate(0.1), 0.0);
        let sine = Envelope::sine(1.0).unwrap();
        assert!((sine.evaluate(-FRAC_PI_2) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn zero_outside_support() {
        for env in [Envelope::rectangular(3.0).unwrap(), Envelope::sine(3.0).unwrap()] {
            let th = env.duration();
            for t in [-10.0, -th - 1e-12, 1e-12, 0.5, 100.0] {
                assert_eq!(env.evaluate(t), 0.0, "{} at {t}", env.name());
            }
        }
    }

    #[test]
    fn area_examples() {
        let rect = Envelope::rectangular(7.0).unwrap();
        assert!((rect.area(0.0) - PI).abs() < 1e-15);
        let sine = Envelope::sine(7.0).unwrap();
        assert!((sine.area(0.0) - PI).abs() < 1e-15);
        assert!((sine.area(-PI / 14.0) - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(sine.area(-1.0), 0.0);
        assert!((sine.area(5.0) - PI).abs() < 1e-15);
    }

    #[test]
    fn sine_area_closed_form_and_quadrature() {
        let omega = 10.0;
        let env = Envelope::sine(omega).unwrap();
        let th = env.duration();
        let rule = GaussLegendre::new(12);
        let f = |s: f64| env.evaluate(s);
        for k in 0..100 {
            let t = -th + th * (k as f64 + 0.5) / 100.0;
            let closed = 0.5 * PI * ((omega * t).cos() + 1.0);
            assert!((env.area(t) - closed).abs() <= 1e-12 * closed.abs().max(1e-300));
            let numeric: f64 = composite(&rule, &f, -th, t, 4);
            assert!((numeric - env.area(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn builtin_area_by_quadrature_is_pi() {
        let rule = GaussLegendre::new(12);
        for env in [Envelope::rectangular(10.0).unwrap(), Envelope::sine(10.0).unwrap()] {
            let f = |s: f64| env.evaluate(s);
            let a: f64 = composite(&rule, &f, env.start(), 0.0, 8);
            assert!((a - PI).abs() < 1e-10, "{} area {a}", env.name());
        }
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let env = Envelope::tabulated(&[(-1.0, 0.0), (-0.5, 2.0 * PI), (0.0, 0.0)]).unwrap();
        assert!((env.evaluate(-0.75) - PI).abs() < 1e-15);
        assert!((env.total_area() - PI).abs() < 1e-15);
        assert!((env.area(-0.5) - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(env.duration(), 1.0);
        assert_eq!(env.breakpoints(), vec![-1.0, -0.5, 0.0]);
    }

    #[test]
    fn tabulated_sampled_sine_is_accepted() {
        let env = Envelope::tabulated(&sine_table(4000)).unwrap();
        assert!((env.total_area() - PI).abs() < 1e-6 * PI);
    }

    #[test]
    fn tabulated_rejections() {
        assert!(Envelope::tabulated(&[]).is_err());
        assert!(Envelope::tabulated(&[(0.0, 1.0)]).is_err());
        // unsorted
        let err = Envelope::tabulated(&[(-1.0, PI), (-2.0, PI), (0.0, PI)]).unwrap_err();
        assert!(matches!(err, Error::InvalidEnvelope(_)));
        // wrong area
        assert!(Envelope::tabulated(&[(-1.0, 1.0), (0.0, 1.0)]).is_err());
        // does not end at zero
        assert!(Envelope::tabulated(&[(-2.0, PI), (-1.0, PI)]).is_err());
    }

    #[test]
    fn parse_two_column_text() {
        let text = "# t omega\n-1.0  3.141592653589793\n\n0.0 3.141592653589793 # end\n";
        let env = Envelope::parse_table(text).unwrap();
        assert!(matches!(env, Envelope::Tabulated(_)));
        assert!(Envelope::parse_table("-1 x\n0 1\n").is_err());
        assert!(Envelope::parse_table("-1 1 2\n0 1\n").is_err());
        assert!(Envelope::parse_table("").is_err());
    }

    #[test]
    fn invalid_rates() {
        assert!(Envelope::rectangular(0.0).is_err());
        assert!(Envelope::sine(-1.0).is_err());
        assert!(Envelope::rectangular(f64::NAN).is_err());
    }
}
