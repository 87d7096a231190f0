//! CGS conversions between atomic parameters and laboratory quantities.
//!
//! Everything here is in Gaussian units; the only SI values are the
//! reported mW/cm² and ns.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Elementary charge [statC].
pub const ELECTRON_CHARGE: f64 = 4.8032e-10;
/// Electron mass [g].
pub const ELECTRON_MASS: f64 = 9.1094e-28;
/// Reduced Planck constant [erg·s].
pub const HBAR: f64 = 1.0546e-27;
/// Speed of light [cm/s].
pub const SPEED_OF_LIGHT: f64 = 2.9979e10;

/// Reference atom: transition frequency [rad/s].
pub const REFERENCE_OMEGA0: f64 = 3.5e15;
/// Reference atom: momentum matrix element [g·cm/s].
pub const REFERENCE_P12: f64 = 1.6e-20;
/// Emission rate quoted for the reference atom [1/s].
pub const REFERENCE_RATE: f64 = 1.3e7;

/// erg/(s·cm²) to mW/cm².
const ERG_FLUX_TO_MW: f64 = 1e-4;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Electric-dipole spontaneous emission rate Γ = 4e²ω₀p²/(3ħc³m²) [1/s].
pub fn emission_rate(omega0: f64, p12: f64) -> Result<f64> {
    positive("omega0", omega0)?;
    positive("p12", p12)?;
    let e2 = ELECTRON_CHARGE * ELECTRON_CHARGE;
    Ok(4.0 * e2 * omega0 * p12 * p12
        / (3.0 * HBAR * SPEED_OF_LIGHT.powi(3) * ELECTRON_MASS * ELECTRON_MASS))
}

/// Field envelope E = Ω·m·ω₀·ħ/(e·p₁₂) [statvolt/cm] for Rabi rate Ω [rad/s].
pub fn rabi_to_field(omega: f64, omega0: f64, p12: f64) -> Result<f64> {
    positive("omega", omega)?;
    positive("omega0", omega0)?;
    positive("p12", p12)?;
    Ok(omega * ELECTRON_MASS * omega0 * HBAR / (ELECTRON_CHARGE * p12))
}

/// Inverse of [`rabi_to_field`].
pub fn field_to_rabi(field: f64, omega0: f64, p12: f64) -> Result<f64> {
    positive("field", field)?;
    positive("omega0", omega0)?;
    positive("p12", p12)?;
    Ok(field * ELECTRON_CHARGE * p12 / (ELECTRON_MASS * omega0 * HBAR))
}

/// Time-averaged flux cE²/8π [erg/(s·cm²)].
pub fn field_to_intensity(field: f64) -> Result<f64> {
    positive("field", field)?;
    Ok(SPEED_OF_LIGHT * field * field / (8.0 * PI))
}

pub fn erg_flux_to_mw_cm2(intensity: f64) -> f64 {
    intensity * ERG_FLUX_TO_MW
}

/// Which Γ sets the time scale of the scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateChoice {
    /// The dipole-formula rate.
    Dipole,
    /// A given rate [1/s], e.g. a measured value.
    Given(f64),
}

/// A pi pulse on a real atom, in CGS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalScenario {
    pub omega0: f64,
    pub p12: f64,
    /// Γ from the dipole formula [1/s].
    pub dipole_rate: f64,
    /// Γ used for everything below [1/s].
    pub rate: f64,
    /// γ = Γ/2 [1/s].
    pub gamma: f64,
    pub omega_ratio: f64,
    /// Ω [rad/s].
    pub omega: f64,
    /// E [statvolt/cm].
    pub field: f64,
    /// I [erg/(s·cm²)].
    pub intensity_cgs: f64,
    pub intensity_mw_cm2: f64,
    /// θ = π/Ω [s].
    pub duration_s: f64,
    pub duration_ns: f64,
}

impl PhysicalScenario {
    pub fn new(omega0: f64, p12: f64, omega_ratio: f64, rate: RateChoice) -> Result<Self> {
        positive("omega_ratio", omega_ratio)?;
        let dipole_rate = emission_rate(omega0, p12)?;
        let rate = match rate {
            RateChoice::Dipole => dipole_rate,
            RateChoice::Given(r) => {
                positive("rate", r)?;
                r
            }
        };
        let gamma = 0.5 * rate;
        let omega = omega_ratio * gamma;
        let field = rabi_to_field(omega, omega0, p12)?;
        let intensity_cgs = field_to_intensity(field)?;
        let duration_s = PI / omega;
        Ok(Self {
            omega0,
            p12,
            dipole_rate,
            rate,
            gamma,
            omega_ratio,
            omega,
            field,
            intensity_cgs,
            intensity_mw_cm2: erg_flux_to_mw_cm2(intensity_cgs),
            duration_s,
            duration_ns: duration_s * 1e9,
        })
    }

    /// The reference atom at the quoted rate.
    pub fn reference(omega_ratio: f64) -> Result<Self> {
        Self::new(REFERENCE_OMEGA0, REFERENCE_P12, omega_ratio, RateChoice::Given(REFERENCE_RATE))
    }

    /// Ω/γ recovered from the field.
    pub fn dimensionless_ratio(&self) -> f64 {
        field_to_rabi(self.field, self.omega0, self.p12).map_or(f64::NAN, |w| w / self.gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    #[test]
    fn reference_rate() {
        let g = emission_rate(REFERENCE_OMEGA0, REFERENCE_P12).unwrap();
        assert!(rel(g, 1.1693e7) < 1e-3, "{g}");
        assert!(rel(g, 1.3e7) < 0.15);
        let g2 = emission_rate(REFERENCE_OMEGA0, 2.0 * REFERENCE_P12).unwrap();
        assert!(rel(g2, 4.0 * g) < 1e-14);
        let g3 = emission_rate(2.0 * REFERENCE_OMEGA0, REFERENCE_P12).unwrap();
        assert!(rel(g3, 2.0 * g) < 1e-14);
        assert!(rel(g / REFERENCE_OMEGA0, 3.3e-9) < 0.05);
    }

    #[test]
    fn field_and_intensity() {
        let e = rabi_to_field(6.5e7, REFERENCE_OMEGA0, REFERENCE_P12).unwrap();
        assert!(rel(e, 2.844e-2) < 1e-3, "{e}");
        let e2 = rabi_to_field(1.3e8, REFERENCE_OMEGA0, REFERENCE_P12).unwrap();
        assert!(rel(e2, 2.0 * e) < 1e-14);
        let back = field_to_rabi(e, REFERENCE_OMEGA0, REFERENCE_P12).unwrap();
        assert!(rel(back, 6.5e7) < 1e-12);
        let i = erg_flux_to_mw_cm2(field_to_intensity(e).unwrap());
        assert!(rel(i, 96.5) < 0.01, "{i}");
        assert!(rel(i, 92.0) < 0.10);
        assert!(rel(field_to_intensity(2.0 * e).unwrap(), 4.0 * field_to_intensity(e).unwrap()) < 1e-14);
    }

    #[test]
    fn scenario() {
        let s = PhysicalScenario::reference(10.0).unwrap();
        assert_eq!(s.gamma, s.rate / 2.0);
        assert!((s.duration_s * s.omega / PI - 1.0).abs() < 1e-12);
        assert!(rel(s.duration_ns, 48.33) < 1e-3, "{}", s.duration_ns);
        assert!(rel(s.duration_ns, 47.0) < 0.05);
        assert!(rel(s.dimensionless_ratio(), 10.0) < 1e-12);
        let s20 = PhysicalScenario::reference(20.0).unwrap();
        assert!(rel(s20.duration_s, 0.5 * s.duration_s) < 1e-14);
        let d = PhysicalScenario::new(REFERENCE_OMEGA0, REFERENCE_P12, 10.0, RateChoice::Dipole).unwrap();
        assert_eq!(d.rate, d.dipole_rate);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(emission_rate(-1.0, 1.0).is_err());
        assert!(rabi_to_field(1.0, 0.0, 1.0).is_err());
        assert!(field_to_intensity(f64::NAN).is_err());
        assert!(PhysicalScenario::new(1.0, 1.0, 10.0, RateChoice::Given(0.0)).is_err());
        assert!(PhysicalScenario::reference(-1.0).is_err());
    }
}
