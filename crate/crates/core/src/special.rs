//! Sine integral and the cosine-weighted power-law tail integrals built on it.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

const SERIES_LIMIT: f64 = 4.0;

/// Si(x) = ∫₀ˣ sin(u)/u du.
pub fn sine_integral(x: f64) -> f64 {
    let t = x.abs();
    let si = if t == 0.0 {
        0.0
    } else if t <= SERIES_LIMIT {
        let mut term = t;
        let mut sum = t;
        let t2 = t * t;
        let mut k = 0usize;
        loop {
            let n = 2 * k + 1;
            // term_k = (-1)^k t^(2k+1) / (2k+1)!, accumulated as term_k / (2k+1)
            term *= -t2 / ((n + 1) * (n + 2)) as f64;
            let add = term / (n + 2) as f64;
            sum += add;
            k += 1;
            if add.abs() < 1e-17 * sum.abs() || k > 60 {
                break;
            }
        }
        sum
    } else {
        // modified Lentz evaluation of the continued fraction for E1(i t)
        let tiny = 1e-300;
        let mut b = Complex64::new(1.0, t);
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        for i in 2..200 {
            let a = -(((i - 1) * (i - 1)) as f64);
            b += 2.0;
            d = Complex64::new(1.0, 0.0) / (d * a + b);
            c = b + Complex64::new(a, 0.0) / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        h *= Complex64::new(t.cos(), -t.sin());
        FRAC_PI_2 + h.im
    };
    if x < 0.0 {
        -si
    } else {
        si
    }
}

/// ∫_D^∞ cos(Δt)/Δ² dΔ for D > 0, t ≥ 0.
pub fn cos_tail_inverse_square(d: f64, t: f64) -> f64 {
    (d * t).cos() / d - t * (FRAC_PI_2 - sine_integral(d * t))
}

/// ∫_D^∞ cos(Δt)/Δ⁴ dΔ for D > 0, t ≥ 0, reduced by parts to the
/// inverse-square case.
pub fn cos_tail_inverse_quartic(d: f64, t: f64) -> f64 {
    let (s, c) = (d * t).sin_cos();
    c / (3.0 * d.powi(3)) - t * s / (6.0 * d * d) - t * t / 6.0 * cos_tail_inverse_square(d, t)
}
