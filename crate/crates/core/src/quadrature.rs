//! Gauss-Legendre rules, composite panel sums and a globally adaptive
//! integrator for smooth real integrands.
//!
//! Everything here is deterministic: panelization depends only on the
//! arguments and sums are accumulated in a fixed order.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default number of nodes per panel.
pub const DEFAULT_ORDER: usize = 10;

/// Gauss-Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]` with a single application of the rule.
    pub fn integrate<T, F>(&self, f: &F, a: f64, b: f64) -> T
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (*w);
        }
        acc * half
    }

    /// Maps the rule onto `[a, b]`, yielding `(node, weight)` pairs.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Number of equal panels needed so that none is wider than `max_width`.
pub fn panel_count(a: f64, b: f64, max_width: f64) -> usize {
    let len = (b - a).abs();
    if len == 0.0 {
        return 0;
    }
    ((len / max_width).ceil() as usize).max(1)
}

/// Composite rule over `panels` equal panels of `[a, b]`.
pub fn composite<T, F>(rule: &GaussLegendre, f: &F, a: f64, b: f64, panels: usize) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let mut acc = T::default();
    if panels == 0 {
        return acc;
    }
    let h = (b - a) / panels as f64;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let hi = if k + 1 == panels { b } else { lo + h };
        acc = acc + rule.integrate(f, lo, hi);
    }
    acc
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Interval<const K: usize> {
    a: f64,
    b: f64,
    left: [f64; K],
    right: [f64; K],
    value: [f64; K],
    error: [f64; K],
}

/// Globally adaptive bisection driven by a rule-vs-halves error estimate.
///
/// Vector-valued integrands share one subdivision; every component must
/// meet `max(abs_tol[c], rel_tol·|I_c|)`.
#[derive(Debug, Clone)]
pub struct Adaptive {
    rule: GaussLegendre,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            rule: GaussLegendre::new(DEFAULT_ORDER),
            rel_tol: 1e-11,
            abs_tol: 1e-300,
            max_intervals: 100_000,
        }
    }
}

impl Adaptive {
    pub fn with_tolerance(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    fn rule_sum<const K: usize, F: Fn(f64) -> [f64; K]>(&self, f: &F, a: f64, b: f64) -> [f64; K] {
        let mut acc = [0.0; K];
        for (x, w) in self.rule.mapped(a, b) {
            let v = f(x);
            for c in 0..K {
                acc[c] += w * v[c];
            }
        }
        acc
    }

    /// Rule on the whole interval against the rule on both halves; the
    /// whole-interval sum is reused from the parent when available.
    fn assess<const K: usize, F: Fn(f64) -> [f64; K]>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        whole: Option<[f64; K]>,
    ) -> Interval<K> {
        let m = 0.5 * (a + b);
        let whole = whole.unwrap_or_else(|| self.rule_sum(f, a, b));
        let left = self.rule_sum(f, a, m);
        let right = self.rule_sum(f, m, b);
        let value = std::array::from_fn(|c| left[c] + right[c]);
        let error = std::array::from_fn(|c| (whole[c] - value[c]).abs());
        Interval {
            a,
            b,
            left,
            right,
            value,
            error,
        }
    }

    /// Integrates `f` over `[points[0], points[last]]`, starting from the
    /// subdivision given by the ascending breakpoints.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, points: &[f64]) -> Result<Estimate> {
        let [est] = self.integrate_vec(&|x| [f(x)], points, [self.abs_tol])?;
        Ok(est)
    }

    /// Vector-valued version of [`Adaptive::integrate`] with a separate
    /// absolute floor per component.
    pub fn integrate_vec<const K: usize, F: Fn(f64) -> [f64; K]>(
        &self,
        f: &F,
        points: &[f64],
        abs_tol: [f64; K],
    ) -> Result<[Estimate; K]> {
        let mut intervals: Vec<Interval<K>> = points
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| self.assess(f, w[0], w[1], None))
            .collect();
        loop {
            let mut value = [0.0; K];
            let mut error = [0.0; K];
            for iv in &intervals {
                for c in 0..K {
                    value[c] += iv.value[c];
                    error[c] += iv.error[c];
                }
            }
            let target: [f64; K] = std::array::from_fn(|c| abs_tol[c].max(self.rel_tol * value[c].abs()));
            if (0..K).all(|c| error[c] <= target[c]) || intervals.is_empty() {
                return Ok(std::array::from_fn(|c| Estimate {
                    value: value[c],
                    error: error[c],
                    intervals: intervals.len(),
                }));
            }
            let (worst_c, worst) = (0..K)
                .map(|c| (c, error[c] / target[c]))
                .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if intervals.len() >= self.max_intervals {
                return Err(Error::QuadratureNonConvergence {
                    estimate: error[worst_c],
                    requested: target[worst_c],
                });
            }
            // split every interval holding at least an average share of the
            // normalized excess; one always qualifies
            let score = |iv: &Interval<K>| (0..K).map(|c| iv.error[c] / target[c]).fold(0.0, f64::max);
            let threshold = worst / intervals.len() as f64;
            let mut next = Vec::with_capacity(2 * intervals.len());
            for iv in intervals {
                if score(&iv) >= threshold {
                    let m = 0.5 * (iv.a + iv.b);
                    if !(m > iv.a && m < iv.b) {
                        return Err(Error::QuadratureNonConvergence {
                            estimate: error[worst_c],
                            requested: target[worst_c],
                        });
                    }
                    next.push(self.assess(f, iv.a, m, Some(iv.left)));
                    next.push(self.assess(f, m, iv.b, Some(iv.right)));
                } else {
                    next.push(iv);
                }
            }
            intervals = next;
        }
    }
}

/// Uniform run of `panels` panels of equal `width` starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelRun {
    pub start: f64,
    pub width: f64,
    pub panels: usize,
}

impl PanelRun {
    pub fn covering(a: f64, b: f64, max_width: f64) -> Self {
        let panels = panel_count(a, b, max_width);
        Self {
            start: a,
            width: if panels == 0 { 0.0 } else { (b - a) / panels as f64 },
            panels,
        }
    }

    pub fn end(&self) -> f64 {
        self.start + self.width * self.panels as f64
    }
}

/// Composite Gauss-Legendre layout for Fourier-type sums
/// Σ_j w_j f(x_j) e^{−iνx_j} evaluated at many frequencies ν.
///
/// Node weights times integrand values are computed once; each frequency
/// then costs one complex multiply-add per node. Panel phases advance by
/// recurrence and are refreshed from `sin_cos` every few panels.
#[derive(Debug, Clone)]
pub struct FourierPanels {
    rule: GaussLegendre,
    runs: Vec<PanelRun>,
}

const PHASE_REFRESH: usize = 32;

fn cis(x: f64) -> Complex64 {
    let (s, c) = x.sin_cos();
    Complex64::new(c, s)
}

impl FourierPanels {
    pub fn new(rule: GaussLegendre, runs: Vec<PanelRun>) -> Self {
        Self { rule, runs }
    }

    pub fn runs(&self) -> &[PanelRun] {
        &self.runs
    }

    pub fn len(&self) -> usize {
        self.runs.iter().map(|r| r.panels).sum::<usize>() * self.rule.order()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nodes and weights in storage order.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for run in &self.runs {
            for p in 0..run.panels {
                let a = run.start + p as f64 * run.width;
                out.extend(self.rule.mapped(a, a + run.width));
            }
        }
        out
    }

    /// Multiplies integrand values into the weights: returns w_j·f(x_j).
    pub fn weigh<F: Fn(f64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.nodes().into_iter().map(|(x, w)| f(x) * w).collect()
    }

    /// Σ_j weighted[j]·e^{−iνx_j}.
    pub fn transform(&self, weighted: &[Complex64], nu: f64) -> Complex64 {
        assert_eq!(weighted.len(), self.len(), "weighted values do not match layout");
        let n = self.rule.order();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = 0;
        let mut offsets = vec![Complex64::new(0.0, 0.0); n];
        for run in &self.runs {
            let half = 0.5 * run.width;
            for (o, x) in offsets.iter_mut().zip(self.rule.nodes()) {
                *o = cis(-nu * half * (1.0 + x));
            }
            let step = cis(-nu * run.width);
            let mut base = Complex64::new(1.0, 0.0);
            for p in 0..run.panels {
                if p % PHASE_REFRESH == 0 {
                    base = cis(-nu * (run.start + p as f64 * run.width));
                }
                let mut inner = Complex64::new(0.0, 0.0);
                for (v, o) in weighted[idx..idx + n].iter().zip(&offsets) {
                    inner += v * o;
                }
                acc += base * inner;
                base *= step;
                idx += n;
            }
        }
        acc
    }

    /// Σ_j |weighted[j]|, the scale of round-off in [`Self::transform`].
    pub fn magnitude(weighted: &[Complex64]) -> f64 {
        weighted.iter().map(|v| v.norm()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rule_is_exact_for_polynomials_of_degree_2n_minus_1() {
        let rule = GaussLegendre::new(5);
        let f = |x: f64| x.powi(9) + 3.0 * x.powi(8) - x.powi(3) + 2.0;
        let got: f64 = rule.integrate(&f, -1.0, 1.0);
        let want = 3.0 * 2.0 / 9.0 + 4.0;
        assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        let wsum: f64 = rule.weights().iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn nodes_are_symmetric_and_ascending() {
        for n in [1, 2, 7, 10, 20] {
            let rule = GaussLegendre::new(n);
            let x = rule.nodes();
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-15);
            }
            assert!(x.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn composite_complex_oscillatory() {
        let rule = GaussLegendre::new(DEFAULT_ORDER);
        let k = 200.0;
        let f = |t: f64| Complex64::new(0.0, -k * t).exp();
        let got: Complex64 = composite(&rule, &f, 0.0, 1.0, panel_count(0.0, 1.0, 0.25 * std::f64::consts::PI / k));
        let want = (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -k).exp()) / Complex64::new(0.0, k);
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn adaptive_handles_narrow_peak() {
        let f = |x: f64| 1.0 / (x * x + 1e-4);
        let est = Adaptive::default().integrate(&f, &[-1.0, 0.0, 1.0]).unwrap();
        let want = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((est.value - want).abs() / want < 1e-11);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let f = |x: f64| 1.0 / x.abs().sqrt();
        let q = Adaptive {
            max_intervals: 8,
            ..Adaptive::with_tolerance(1e-14, 0.0)
        };
        let err = q.integrate(&f, &[-1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn fourier_panels_match_sinc() {
        // ∫_{−a}^{a} e^{−iνx} dx = 2 sin(νa)/ν, over many panels so the
        // phase recurrence is refreshed several times
        let a = 50.0;
        let left = PanelRun::covering(-a, 0.0, 0.05);
        let right = PanelRun::covering(0.0, a, 0.05);
        let panels = FourierPanels::new(GaussLegendre::new(DEFAULT_ORDER), vec![left, right]);
        let w = panels.weigh(|_| Complex64::new(1.0, 0.0));
        for nu in [0.0, 0.3, 7.0, 40.0] {
            let want = if nu == 0.0 { 2.0 * a } else { 2.0 * (nu * a).sin() / nu };
            let got = panels.transform(&w, nu);
            assert!((got.re - want).abs() < 1e-11, "ν = {nu}: {got} vs {want}");
            assert!(got.im.abs() < 1e-11);
        }
    }
}
