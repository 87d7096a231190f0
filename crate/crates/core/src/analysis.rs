//! Moments and decay law of emission lines.
//!
//! Lines are handed over as a [`LineSource`]: a density callable plus a
//! declared large-detuning law. Moments are always adaptive quadrature
//! over |Δ| ≤ Δ_max plus closed-form integrals of the declared C/|Δ|^p
//! tail beyond it; summing a finite grid would silently truncate the
//! Δ²-weighted integrand, which only falls off as Δ⁻².

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{Adaptive, FourierPanels, GaussLegendre, PanelRun, DEFAULT_ORDER};
use crate::special::{cos_tail_inverse_quartic, cos_tail_inverse_square};

/// Declared behaviour of a density for |Δ| → ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailLaw {
    /// S ≈ C/|Δ|^exponent. A missing coefficient is fitted as the mean of
    /// S·|Δ|^exponent over the last `period` (or a short window) before
    /// Δ_max on each side.
    Power {
        exponent: f64,
        coefficient: Option<f64>,
        period: Option<f64>,
    },
    Undeclared,
}

/// A spectral density over detuning Δ (units of the caller's choice,
/// usually γ).
pub trait LineSource {
    fn label(&self) -> String;

    fn density(&self, delta: f64) -> Result<f64>;

    fn tail(&self) -> TailLaw;

    /// Amplitude decay rate γ; the population rate is Γ = 2γ.
    fn gamma(&self) -> f64;

    /// max(Ω, γ): the widest structural scale of the line.
    fn reference_scale(&self) -> f64;

    /// Positive detunings where the density changes character; used as
    /// initial breakpoints.
    fn features(&self) -> Vec<f64> {
        Vec::new()
    }

    /// ∫S dΔ over the whole line when known in closed form.
    fn exact_total(&self) -> Option<f64> {
        None
    }

    fn exact_tail_fraction(&self, _cutoff: f64) -> Option<f64> {
        None
    }

    fn default_delta_max(&self) -> f64 {
        1e3 * self.reference_scale()
    }
}

/// A closure-backed source.
pub struct FnSource<F> {
    pub label: String,
    pub density: F,
    pub tail: TailLaw,
    pub gamma: f64,
    pub reference_scale: f64,
}

impl<F: Fn(f64) -> f64> LineSource for FnSource<F> {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn density(&self, delta: f64) -> Result<f64> {
        Ok((self.density)(delta))
    }

    fn tail(&self) -> TailLaw {
        self.tail
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn reference_scale(&self) -> f64 {
        self.reference_scale
    }

    fn features(&self) -> Vec<f64> {
        vec![self.gamma, self.reference_scale]
    }
}

/// Wraps a fallible density for use inside the infallible quadrature
/// callbacks; the first error is kept and reported afterwards.
struct Guarded<'a, S: ?Sized> {
    source: &'a S,
    error: RefCell<Option<Error>>,
}

impl<'a, S: LineSource + ?Sized> Guarded<'a, S> {
    fn new(source: &'a S) -> Self {
        Self {
            source,
            error: RefCell::new(None),
        }
    }

    fn eval(&self, delta: f64) -> f64 {
        match self.source.density(delta) {
            Ok(v) => v,
            Err(e) => {
                self.error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    fn finish<T>(self, value: T) -> Result<T> {
        match self.error.into_inner() {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentOptions {
    /// Quadrature range |Δ| ≤ delta_max; `None` uses the source default.
    pub delta_max: Option<f64>,
    pub rel_tol: f64,
    /// Cutoff for the reported tail fraction; `None` uses the reference
    /// scale max(Ω, γ).
    pub cutoff: Option<f64>,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            delta_max: None,
            rel_tol: 1e-10,
            cutoff: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFraction {
    pub cutoff: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentsReport {
    /// ∫S dΔ.
    pub total: f64,
    pub mean_detuning: f64,
    /// Δω² = ⟨Δ²⟩ − ⟨Δ⟩².
    pub dispersion: f64,
    /// τ_Z = (Δω²)^{−1/2}.
    pub zeno_time: f64,
    /// τ_J = Γ·τ_Z².
    pub jump_time: f64,
    pub big_gamma: f64,
    pub tail_fraction: TailFraction,
    pub delta_max: f64,
    /// Tail coefficients C used beyond −Δ_max and +Δ_max.
    pub tail_coefficients: [f64; 2],
    pub tail_exponent: f64,
}

/// Resolved tail: exponent and the fitted density level at ±D, so steep
/// inferred tails never form D^p.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Tail {
    exponent: f64,
    left: f64,
    right: f64,
}

impl Tail {
    fn declared(exponent: f64, coefficient: f64, d: f64) -> Self {
        let edge = coefficient * d.powf(-exponent);
        Self {
            exponent,
            left: edge,
            right: edge,
        }
    }

    /// ∫_{D}^{∞} Δ^k ρ(D)(Δ/D)^{−p} dΔ for one side.
    fn moment(&self, edge: f64, d: f64, k: i32) -> f64 {
        let p = self.exponent;
        edge * d.powi(k + 1) / (p - k as f64 - 1.0)
    }

    fn coefficients(&self, d: f64) -> [f64; 2] {
        let s = d.powf(self.exponent);
        [self.left * s, self.right * s]
    }
}

fn symmetric_points(source_features: &[f64], period: Option<f64>, d: f64) -> Vec<f64> {
    let mut pos: Vec<f64> = source_features.iter().copied().filter(|&x| x > 0.0 && x < d).collect();
    if let Some(p) = period {
        let count = (d / p).floor() as usize;
        if count <= 4096 {
            pos.extend((1..=count).map(|k| k as f64 * p).filter(|&x| x < d));
        }
    }
    let mut x = source_features.iter().copied().fold(f64::INFINITY, f64::min).max(d * 1e-9);
    while x < d {
        pos.push(x);
        x *= 4.0;
    }
    pos.push(d);
    pos.sort_by(f64::total_cmp);
    pos.dedup();
    let mut pts: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
    pts.push(0.0);
    pts.extend(pos);
    pts
}

fn resolve_tail<S: LineSource + ?Sized>(source: &S, d: f64, rel_tol: f64, what: &str) -> Result<Tail> {
    let (exponent, coefficient, period) = match source.tail() {
        TailLaw::Power {
            exponent,
            coefficient,
            period,
        } => (exponent, coefficient, period),
        TailLaw::Undeclared => {
            // probe the local power law; anything slower than Δ⁻³ makes the
            // second moment diverge
            let hi = source.density(d)?;
            let lo = source.density(0.5 * d)?;
            if !(hi > 0.0 && lo > 0.0) {
                return Err(Error::DivergentMoment(format!("{what} (cannot infer tail of {})", source.label())));
            }
            ((lo / hi).log2(), None, None)
        }
    };
    if exponent <= 3.0 {
        return Err(Error::DivergentMoment(format!(
            "{what}: {} falls off as |Δ|^-{exponent}",
            source.label()
        )));
    }
    let fit = |side: f64| -> Result<f64> {
        if let Some(c) = coefficient {
            return Ok(c * d.powf(-exponent));
        }
        let window = period.unwrap_or(0.05 * d).min(0.5 * d);
        let (a, b) = if side > 0.0 { (d - window, d) } else { (-d, -d + window) };
        let guarded = Guarded::new(source);
        let f = |x: f64| guarded.eval(x) * (x.abs() / d).powf(exponent);
        let est = Adaptive::with_tolerance(rel_tol, 0.0).integrate(&f, &[a, 0.5 * (a + b), b]);
        let est = guarded.finish(est)??;
        Ok(est.value / window)
    };
    Ok(Tail {
        exponent,
        left: fit(-1.0)?,
        right: fit(1.0)?,
    })
}

/// Mean, dispersion, Zeno and quantum-jump times of a line.
///
/// Fails with [`Error::DivergentMoment`] for lines whose tails are not
/// integrable against Δ² (e.g. the Lorentzian).
pub fn moments<S: LineSource + ?Sized>(source: &S, options: &MomentOptions) -> Result<MomentsReport> {
    let d = options.delta_max.unwrap_or_else(|| source.default_delta_max());
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta_max must be positive, got {d}")));
    }
    let tail = resolve_tail(source, d, options.rel_tol, "second moment")?;
    let scale = source.reference_scale();
    let period = match source.tail() {
        TailLaw::Power { period, .. } => period,
        TailLaw::Undeclared => None,
    };
    let points = symmetric_points(&source.features(), period, d);
    let guarded = Guarded::new(source);
    // the first moment is shifted by scale·S so a relative tolerance stays
    // meaningful when the mean vanishes
    let f = |x: f64| {
        let s = guarded.eval(x);
        [s, (x + scale) * s, x * x * s]
    };
    let q = Adaptive::with_tolerance(options.rel_tol, 0.0);
    let est = q.integrate_vec(&f, &points, [0.0; 3]);
    let [i0, i1s, i2] = guarded.finish(est)??;
    let i1 = i1s.value - scale * i0.value;

    let total = i0.value + tail.moment(tail.left, d, 0) + tail.moment(tail.right, d, 0);
    let first = i1 + tail.moment(tail.right, d, 1) - tail.moment(tail.left, d, 1);
    let second = i2.value + tail.moment(tail.left, d, 2) + tail.moment(tail.right, d, 2);
    let mean = first / total;
    let dispersion = second / total - mean * mean;
    let big_gamma = 2.0 * source.gamma();
    let zeno_time = 1.0 / dispersion.sqrt();
    let cutoff = options.cutoff.unwrap_or(scale);
    let fraction = tail_fraction_with_total(source, cutoff, total, options.rel_tol)?;
    Ok(MomentsReport {
        total,
        mean_detuning: mean,
        dispersion,
        zeno_time,
        jump_time: big_gamma * zeno_time * zeno_time,
        big_gamma,
        tail_fraction: TailFraction {
            cutoff,
            value: fraction,
        },
        delta_max: d,
        tail_coefficients: tail.coefficients(d),
        tail_exponent: tail.exponent,
    })
}

/// ∫S over the whole line: quadrature to Δ_max plus the declared tail.
pub fn total_weight<S: LineSource + ?Sized>(source: &S, delta_max: Option<f64>, rel_tol: f64) -> Result<f64> {
    if let Some(t) = source.exact_total() {
        return Ok(t);
    }
    let d = delta_max.unwrap_or_else(|| source.default_delta_max());
    let (exponent, coefficient, period) = match source.tail() {
        TailLaw::Power {
            exponent,
            coefficient,
            period,
        } => (exponent, coefficient, period),
        TailLaw::Undeclared => (f64::INFINITY, Some(0.0), None),
    };
    if exponent <= 1.0 {
        return Err(Error::DivergentMoment(format!("total weight of {}", source.label())));
    }
    let tail = if exponent.is_finite() {
        let fitted = TailLaw::Power {
            exponent,
            coefficient,
            period,
        };
        let t = match fitted {
            TailLaw::Power { coefficient: Some(c), .. } => Tail::declared(exponent, c, d),
            _ => resolve_tail(source, d, rel_tol, "total weight")?,
        };
        t.moment(t.left, d, 0) + t.moment(t.right, d, 0)
    } else {
        0.0
    };
    let points = symmetric_points(&source.features(), period, d);
    let guarded = Guarded::new(source);
    let f = |x: f64| guarded.eval(x);
    let est = Adaptive::with_tolerance(rel_tol, 0.0).integrate(&f, &points);
    Ok(guarded.finish(est)??.value + tail)
}

fn tail_fraction_with_total<S: LineSource + ?Sized>(source: &S, cutoff: f64, total: f64, rel_tol: f64) -> Result<f64> {
    if let Some(v) = source.exact_tail_fraction(cutoff) {
        return Ok(v);
    }
    let mut pts: Vec<f64> = source.features().into_iter().filter(|&x| x > 0.0 && x < cutoff).collect();
    pts.push(cutoff);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut points: Vec<f64> = pts.iter().rev().map(|x| -x).collect();
    points.push(0.0);
    points.extend(pts);
    let guarded = Guarded::new(source);
    let f = |x: f64| guarded.eval(x);
    let est = Adaptive::with_tolerance(rel_tol, 0.0).integrate(&f, &points);
    let inner = guarded.finish(est)??.value;
    Ok((total - inner) / total)
}

/// Fraction of the line's weight at |Δ| > `cutoff`.
pub fn tail_fraction<S: LineSource + ?Sized>(source: &S, cutoff: f64) -> Result<f64> {
    if cutoff.is_nan() || cutoff <= 0.0 {
        return Err(Error::InvalidParameter(format!("cutoff must be positive, got {cutoff}")));
    }
    if let Some(v) = source.exact_tail_fraction(cutoff) {
        return Ok(v);
    }
    let total = total_weight(source, None, 1e-11)?;
    tail_fraction_with_total(source, cutoff, total, 1e-11)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecayOptions {
    pub delta_max: Option<f64>,
}

/// Panel layout over [−D, D]: geometric segments outward from the line
/// centre, each panel no wider than an eighth of its segment, a
/// sixteenth of the wing period, or a quarter of the shortest time
/// oscillation π/(4 t_max).
fn decay_panels(first_scale: f64, period: Option<f64>, d: f64, t_max: f64) -> FourierPanels {
    let osc = if t_max > 0.0 { 0.25 * PI / t_max } else { f64::INFINITY };
    let per = period.map(|p| p / 16.0).unwrap_or(f64::INFINITY);
    let mut edges = vec![0.0];
    let mut x = first_scale.min(d);
    while x < d {
        edges.push(x);
        x *= 2.0;
    }
    edges.push(d);
    let mut pos = Vec::new();
    for (j, w) in edges.windows(2).enumerate() {
        let seg = if j == 0 { (w[1] - w[0]) / 16.0 } else { (w[1] - w[0]) / 8.0 };
        pos.push(PanelRun::covering(w[0], w[1], seg.min(per).min(osc)));
    }
    let mut runs: Vec<PanelRun> = pos
        .iter()
        .rev()
        .map(|r| PanelRun {
            start: -r.end(),
            width: r.width,
            panels: r.panels,
        })
        .collect();
    runs.extend(pos);
    FourierPanels::new(GaussLegendre::new(DEFAULT_ORDER), runs)
}

/// Survival probability Φ(t) = |∫W(Δ) e^{−iΔt} dΔ|² of the initial state
/// whose energy distribution W is the (renormalized) line.
pub fn decay_law<S: LineSource + ?Sized>(source: &S, times: &[f64], options: &DecayOptions) -> Result<Vec<f64>> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidParameter("decay times must be finite and non-negative".into()));
    }
    let d = options.delta_max.unwrap_or_else(|| source.default_delta_max());
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let (tail, period) = match source.tail() {
        TailLaw::Power {
            exponent, period, ..
        } => {
            if exponent != 2.0 && exponent != 4.0 {
                return Err(Error::InvalidParameter(format!(
                    "decay law supports |Δ|^-2 and |Δ|^-4 tails, got exponent {exponent}"
                )));
            }
            let t = match source.tail() {
                TailLaw::Power {
                    coefficient: Some(c), ..
                } => Tail::declared(exponent, c, d),
                _ => resolve_tail(source, d, 1e-10, "decay law")?,
            };
            (Some(t), period)
        }
        TailLaw::Undeclared => (None, None),
    };
    let first = source.features().into_iter().fold(source.gamma(), f64::min);
    let panels = decay_panels(first, period, d, t_max);
    let guarded = Guarded::new(source);
    let weighted = panels.weigh(|x| Complex64::new(guarded.eval(x), 0.0));
    guarded.finish(())?;
    let tail_sum = |t: f64| -> f64 {
        match tail {
            None => 0.0,
            Some(tl) => {
                // even part of the two tails; odd parts cancel for
                // symmetric coefficients
                let c = (tl.left + tl.right) * d.powf(tl.exponent);
                if tl.exponent == 2.0 {
                    c * cos_tail_inverse_square(d, t)
                } else {
                    c * cos_tail_inverse_quartic(d, t)
                }
            }
        }
    };
    let total = weighted.iter().map(|v| v.re).sum::<f64>() + tail_sum(0.0);
    Ok(times
        .iter()
        .map(|&t| {
            let amp = (panels.transform(&weighted, t) + tail_sum(t)) / total;
            amp.norm_sqr()
        })
        .collect())
}

/// Short-time behaviour 1 − Φ(t) ≈ a·t² + b·|t|³.
///
/// The cubic term is the leading correction for lines with Δ⁻⁴ wings,
/// so it is fitted alongside the curvature rather than ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShortTimeFit {
    pub curvature: f64,
    pub cubic: f64,
    pub zeno_time: f64,
    pub t_max: f64,
}

/// Least-squares fit of 1 − Φ on `samples` uniformly spaced times in
/// (0, t_max].
pub fn short_time_fit<S: LineSource + ?Sized>(
    source: &S,
    t_max: f64,
    samples: usize,
    options: &DecayOptions,
) -> Result<ShortTimeFit> {
    if t_max.is_nan() || t_max <= 0.0 || samples < 2 {
        return Err(Error::InvalidParameter("short-time fit needs t_max > 0 and two samples".into()));
    }
    let times: Vec<f64> = (1..=samples).map(|k| t_max * k as f64 / samples as f64).collect();
    let phi = decay_law(source, &times, options)?;
    // normal equations for y = a t² + b t³
    let (mut s44, mut s45, mut s66, mut r2, mut r3) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (t, p) in times.iter().zip(&phi) {
        let y = 1.0 - p;
        let (t2, t3) = (t * t, t * t * t);
        s44 += t2 * t2;
        s45 += t2 * t3;
        s66 += t3 * t3;
        r2 += t2 * y;
        r3 += t3 * y;
    }
    let det = s44 * s66 - s45 * s45;
    let curvature = (r2 * s66 - r3 * s45) / det;
    let cubic = (s44 * r3 - s45 * r2) / det;
    Ok(ShortTimeFit {
        curvature,
        cubic,
        zeno_time: 1.0 / curvature.sqrt(),
        t_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SystemParams;
    use crate::spectra::{LorentzianLine, MollowLine, Normalization, PulseLine};

    #[test]
    fn lorentzian_moments_diverge() {
        let err = moments(&LorentzianLine { gamma: 1.0 }, &MomentOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DivergentMoment(_)), "{err}");
        assert!(err.to_string().contains("second moment"));
    }

    #[test]
    fn lorentzian_tail_fraction() {
        let l = LorentzianLine { gamma: 1.0 };
        assert!((tail_fraction(&l, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let ten = tail_fraction(&l, 10.0).unwrap();
        assert!((ten - (1.0 - 2.0 / PI * 10f64.atan())).abs() < 1e-15);
        assert!((ten - 0.0635).abs() < 5e-4);
    }

    #[test]
    fn mollow_moments() {
        let src = MollowLine {
            params: SystemParams::new(0.1, 1.0).unwrap(),
        };
        let r = moments(&src, &MomentOptions::default()).unwrap();
        assert!((r.total - 1.0).abs() < 1e-9);
        assert!(r.mean_detuning.abs() < 1e-9);
        assert!((r.dispersion - 1.0).abs() < 1e-6, "{}", r.dispersion);
        assert!((r.zeno_time - 1.0).abs() < 1e-6);
        assert!((r.jump_time - 2.0).abs() < 1e-6);
    }

    #[test]
    fn undeclared_slow_tail_is_rejected() {
        let src = FnSource {
            label: "cauchy".into(),
            density: |x: f64| 1.0 / (PI * (1.0 + x * x)),
            tail: TailLaw::Undeclared,
            gamma: 1.0,
            reference_scale: 1.0,
        };
        assert!(matches!(
            moments(&src, &MomentOptions::default()),
            Err(Error::DivergentMoment(_))
        ));
    }

    #[test]
    fn undeclared_fast_tail_is_integrated() {
        // Gaussian: σ² = 4
        let src = FnSource {
            label: "gauss".into(),
            density: |x: f64| (-x * x / 8.0).exp() / (8.0 * PI).sqrt(),
            tail: TailLaw::Undeclared,
            gamma: 1.0,
            reference_scale: 0.05,
        };
        let opts = MomentOptions {
            delta_max: Some(40.0),
            ..MomentOptions::default()
        };
        let r = moments(&src, &opts).unwrap();
        assert!((r.dispersion - 4.0).abs() < 1e-8, "{}", r.dispersion);
    }

    #[test]
    fn rectangular_dispersion_matches_time_domain() {
        // Parseval: ∫Δ²|F|² = 2π∫|B'|², giving
        // Δω² = (πΩγ/4 + γ²)/(1 + πγ/Ω)
        for ratio in [10.0, 100.0] {
            let p = SystemParams::from_ratio(ratio).unwrap();
            let line = PulseLine::new(&p.rectangular(), &p, Normalization::ExactUnit).unwrap();
            let r = moments(&line, &MomentOptions::default()).unwrap();
            let want = (PI * ratio / 4.0 + 1.0) / (1.0 + PI / ratio);
            assert!((r.total - 1.0).abs() < 1e-6, "total {}", r.total);
            assert!((r.dispersion / want - 1.0).abs() < 1e-6, "{} vs {want}", r.dispersion);
        }
    }

    #[test]
    fn lorentzian_decay_is_exponential() {
        let l = LorentzianLine { gamma: 1.0 };
        let times: Vec<f64> = (0..=25).map(|k| 0.1 * k as f64).collect();
        let phi = decay_law(&l, &times, &DecayOptions::default()).unwrap();
        for (t, p) in times.iter().zip(&phi) {
            let want = (-2.0 * t).exp();
            assert!((p / want - 1.0).abs() < 1e-4, "t = {t}: {p} vs {want}");
        }
        assert!((phi[0] - 1.0).abs() < 1e-12, "{}", phi[0]);
    }

    #[test]
    fn decay_rejects_negative_time() {
        let l = LorentzianLine { gamma: 1.0 };
        assert!(decay_law(&l, &[-1.0], &DecayOptions::default()).is_err());
    }
}
