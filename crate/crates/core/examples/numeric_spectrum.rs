//! Quadrature amplitude for any envelope, checked on the rectangle.

use lineshape::dynamics::SystemParams;
use lineshape::spectra::{amplitude_rect, NumericAmplitude, DEFAULT_QUAD_TOL};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = SystemParams::from_ratio(10.0)?;
    let rect = NumericAmplitude::new(&params.rectangular(), &params, DEFAULT_QUAD_TOL)?;
    let sine = NumericAmplitude::new(&params.sine(), &params, DEFAULT_QUAD_TOL)?;
    let mut worst = 0.0f64;
    for k in -200..=200 {
        let delta = 5.0 * k as f64;
        let exact = amplitude_rect(delta, &params);
        worst = worst.max((rect.at(delta)? - exact).norm() / exact.norm());
    }
    println!("rect: numeric vs closed form, max relative deviation {worst:.2e}");
    for delta in [0.0, 5.0, 50.0] {
        let f = sine.at(delta)?;
        println!("sine: F({delta}) = {:.10} {:+.10}i", f.re, f.im);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
