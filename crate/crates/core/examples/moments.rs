//! Dispersion, Zeno time and jump time of pi-pulse lines.

use lineshape::analysis::{moments, MomentOptions};
use lineshape::dynamics::SystemParams;
use lineshape::spectra::{LorentzianLine, Normalization, PulseLine};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for ratio in [10.0, 100.0, 1000.0] {
        let p = SystemParams::from_ratio(ratio)?;
        let line = PulseLine::new(&p.rectangular(), &p, Normalization::ExactUnit)?;
        let r = moments(&line, &MomentOptions::default())?;
        println!(
            "Ω = {ratio:>6}γ  Δω²/(ΩΓ) = {:.4}  τ_Z = {:.4e}  τ_J·Ω = {:.3}",
            r.dispersion / (p.omega() * p.big_gamma()),
            r.zeno_time,
            r.jump_time * p.omega()
        );
    }
    let err = moments(&LorentzianLine { gamma: 1.0 }, &MomentOptions::default()).unwrap_err();
    println!("lorentzian: {err}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
