//! The three curves at Ω = 10γ and where each pulse line drops below half
//! the Lorentzian.

use lineshape::dynamics::SystemParams;
use lineshape::spectra::{build_spectrum, crossover, linear_grid, Normalization, Spectrum};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = SystemParams::from_ratio(10.0)?;
    let grid = linear_grid(-100.0, 100.0, 2001)?;
    let lor = Spectrum::lorentzian(p.gamma(), &grid)?;
    let rect = build_spectrum(&p.rectangular(), &p, &grid, Normalization::PaperApprox)?;
    let sine = build_spectrum(&p.sine(), &p, &grid, Normalization::PaperApprox)?;
    for i in (1000..=2000).step_by(100) {
        println!(
            "{:>6.1}  ln S: {:>9.4} {:>9.4} {:>9.4}",
            grid[i],
            lor.density[i].ln(),
            rect.density[i].ln(),
            sine.density[i].ln()
        );
    }
    for (name, s) in [("rect", &rect), ("sine", &sine)] {
        match crossover(&grid, &s.density, &lor.density, 0.5) {
            Some(x) => println!("{name}: half-Lorentzian crossover at Δ = {x:.2}γ"),
            None => println!("{name}: no crossover on the grid"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
