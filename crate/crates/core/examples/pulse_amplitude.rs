//! Excited-state amplitude during the pulse: ODE against the area formula.

use lineshape::dynamics::{amplitude_analytic, amplitude_ode, SystemParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = SystemParams::from_ratio(10.0)?;
    for env in [params.rectangular(), params.sine()] {
        let traj = amplitude_ode(&env, 1e-12)?;
        println!(
            "{:<5} {} samples, |B − B_area| ≤ {:.2e}, norm defect ≤ {:.2e}",
            env.name(),
            traj.len(),
            traj.max_deviation_from_analytic(&env, &params),
            traj.max_norm_defect()
        );
    }
    let rect = params.rectangular();
    for t in [-rect.duration(), -0.5 * rect.duration(), 0.0, 0.1, 1.0] {
        let b = amplitude_analytic(&rect, &params, t);
        println!("t = {t:+.4}  |B|² = {:.6}", b.norm_sqr());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
