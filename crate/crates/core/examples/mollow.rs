//! Weak-drive resonance fluorescence as a comparison line.

use lineshape::analysis::{moments, MomentOptions};
use lineshape::dynamics::SystemParams;
use lineshape::spectra::{mollow_coherent_weight, mollow_incoherent, MollowLine};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = SystemParams::new(0.1, 1.0)?;
    println!("coherent weight {:.6e}", mollow_coherent_weight(&p));
    for delta in [0.0, 1.0, 10.0, 100.0] {
        let s = mollow_incoherent(delta, &p);
        println!("Δ = {delta:>5}  S_inc = {s:.6e}  S·Δ⁴ = {:.6e}", s * delta.powi(4));
    }
    let r = moments(&MollowLine { params: p }, &MomentOptions::default())?;
    println!("dispersion {:.10}  τ_Z·Γ = {:.6}  τ_J·Γ = {:.6}", r.dispersion, r.zeno_time * 2.0, r.jump_time * 2.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
