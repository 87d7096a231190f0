//! Survival probability from the line shape.

use lineshape::analysis::{decay_law, short_time_fit, DecayOptions};
use lineshape::dynamics::SystemParams;
use lineshape::spectra::{LorentzianLine, Normalization, PulseLine};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let opts = DecayOptions::default();
    let times: Vec<f64> = (0..=5).map(|k| 0.5 * k as f64).collect();
    let phi = decay_law(&LorentzianLine { gamma: 1.0 }, &times, &opts)?;
    for (t, p) in times.iter().zip(&phi) {
        println!("Γt = {:.1}  Φ = {p:.8}  e^-Γt = {:.8}", 2.0 * t, (-2.0 * t).exp());
    }

    let p = SystemParams::from_ratio(100.0)?;
    let line = PulseLine::new(&p.rectangular(), &p, Normalization::ExactUnit)?;
    let fit = short_time_fit(&line, 1e-2 / p.big_gamma(), 40, &opts)?;
    println!("rect Ω = 100γ: 1 − Φ ≈ {:.4}t² {:+.3}t³, τ_Z = {:.5}", fit.curvature, fit.cubic, fit.zeno_time);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
