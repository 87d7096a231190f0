//! Built-in and tabulated pi-pulse envelopes.

use lineshape::envelopes::Envelope;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rect = Envelope::rectangular(10.0)?;
    let sine = Envelope::sine(10.0)?;
    for env in [&rect, &sine] {
        println!(
            "{:<5} duration {:.6}  Ω(−θ/2) {:.6}  area {:.12}",
            env.name(),
            env.duration(),
            env.evaluate(-0.5 * env.duration()),
            env.total_area()
        );
    }

    // a triangle of unit height needs base 2π to hold area π
    let table = "# t omega\n-6.283185307179586 0\n-3.141592653589793 1\n0 0\n";
    let tri = Envelope::parse_table(table)?;
    println!("tabulated area {:.12}, half area at t = −π: {:.6}", tri.total_area(), tri.area(-std::f64::consts::PI));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
