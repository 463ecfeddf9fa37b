//! Dimensionless unit convention.
//!
//! Flux is measured in Φ0/2π, current in the bulk critical current I_c,
//! capacitance in the bulk junction capacitance C_J and length in the cell
//! size a. Time is then measured in 1/ω_J and energy in E_J = I_c·Φ0/2π.

use std::f64::consts::PI;

/// Default discreteness a/λ_J.
pub const DEFAULT_A_OVER_LAMBDA: f64 = 1.0 / 3.0;

/// Derived quantities for a chosen discreteness a/λ_J.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UnitSystem {
    pub a_over_lambda: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self {
            a_over_lambda: DEFAULT_A_OVER_LAMBDA,
        }
    }
}

impl UnitSystem {
    pub fn new(a_over_lambda: f64) -> Self {
        Self { a_over_lambda }
    }

    /// Plasma frequency, the unit of inverse time.
    pub fn omega_j(&self) -> f64 {
        1.0
    }

    /// Cell inductance L = (a/λ_J)².
    pub fn cell_inductance(&self) -> f64 {
        self.a_over_lambda * self.a_over_lambda
    }

    /// Penetration depth in cells.
    pub fn lambda_j(&self) -> f64 {
        1.0 / self.a_over_lambda
    }

    /// Maximum fluxon speed in cells per unit time.
    pub fn c(&self) -> f64 {
        self.omega_j() * self.lambda_j()
    }

    /// Energy unit E_0 = λ_J/a in units of E_J.
    pub fn e0(&self) -> f64 {
        self.lambda_j()
    }

    /// Rest energy of a fluxon in E_J.
    pub fn rest_energy(&self) -> f64 {
        8.0 * self.e0()
    }

    /// Characteristic impedance Z = √(L/C_J).
    pub fn z(&self) -> f64 {
        self.cell_inductance().sqrt()
    }

    /// One plasma period 1/ν_J = 2π/ω_J.
    pub fn plasma_period(&self) -> f64 {
        2.0 * PI / self.omega_j()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_discreteness() {
        let u = UnitSystem::default();
        assert!((u.cell_inductance() - 1.0 / 9.0).abs() < 1e-15);
        assert!((u.lambda_j() - 3.0).abs() < 1e-15);
        assert!((u.c() - 3.0).abs() < 1e-15);
        assert!((u.e0() - 3.0).abs() < 1e-15);
        assert!((u.rest_energy() - 24.0).abs() < 1e-12);
        assert!((u.z() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_from_inductance() {
        // λ_J = a/√L for any discreteness
        for r in [0.1, 0.25, 0.5] {
            let u = UnitSystem::new(r);
            assert!((u.lambda_j() - 1.0 / u.cell_inductance().sqrt()).abs() < 1e-12);
        }
    }
}
