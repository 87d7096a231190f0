//! Laboratory numbers for a real transition.

use lineshape::analysis::tail_fraction;
use lineshape::spectra::LorentzianLine;
use lineshape::units::{PhysicalScenario, RateChoice, REFERENCE_OMEGA0, REFERENCE_P12};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let quoted = PhysicalScenario::reference(10.0)?;
    let dipole = PhysicalScenario::new(REFERENCE_OMEGA0, REFERENCE_P12, 10.0, RateChoice::Dipole)?;
    for (label, s) in [("quoted Γ", quoted), ("dipole Γ", dipole)] {
        println!(
            "{label}: Γ = {:.3e}/s  E = {:.4e} statV/cm  I = {:.1} mW/cm²  θ = {:.1} ns",
            s.rate, s.field, s.intensity_mw_cm2, s.duration_ns
        );
    }
    let f = tail_fraction(&LorentzianLine { gamma: 1.0 }, 10.0)?;
    println!("Lorentzian weight beyond |Δ| = 10γ: {:.2}%", 100.0 * f);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
