//! Rectangular pulse spectral amplitude, including the removable point Δ = Ω/2.

use lineshape::dynamics::SystemParams;
use lineshape::spectra::{amplitude_rect, asymptote_rect, lorentzian};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = SystemParams::from_ratio(10.0)?;
    let n = params.gamma() / std::f64::consts::PI;
    println!("{:>8} {:>14} {:>14} {:>14}", "Δ/γ", "S", "S_lorentz", "asymptote");
    for delta in [0.0, 1.0, 5.0, 5.0 + 1e-9, 20.0, 100.0, 500.0] {
        let f = amplitude_rect(delta, &params);
        let asym = if delta == 0.0 { f64::NAN } else { n * asymptote_rect(delta, &params)? };
        println!(
            "{delta:>8.2} {:>14.6e} {:>14.6e} {:>14.6e}",
            n * f.norm_sqr(),
            lorentzian(delta, params.gamma()),
            asym
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
