//! Unit system. Internally everything is dimensionless with ħ = m = κ = 1;
//! [`Scales`] converts to SI at the I/O boundary.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s (CODATA 2018, exact).
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Physical scales fixing the dimensionless units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    mass_kg: f64,
    kappa_per_m: f64,
    hbar_js: f64,
}

impl Scales {
    pub fn new(mass_kg: f64, kappa_per_m: f64, hbar_js: f64) -> Result<Self> {
        for (name, v) in [("mass_kg", mass_kg), ("kappa_per_m", kappa_per_m), ("hbar_js", hbar_js)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { mass_kg, kappa_per_m, hbar_js })
    }

    /// κ from the laser wavevector, κ = (√2 − 1) k_l.
    pub fn from_laser_wavevector(mass_kg: f64, k_l_per_m: f64) -> Result<Self> {
        Self::new(mass_kg, (2f64.sqrt() - 1.0) * k_l_per_m, HBAR_SI)
    }

    pub fn mass_kg(&self) -> f64 {
        self.mass_kg
    }

    pub fn kappa_per_m(&self) -> f64 {
        self.kappa_per_m
    }

    pub fn hbar_js(&self) -> f64 {
        self.hbar_js
    }

    /// m / (ħκ²), seconds.
    pub fn time_unit(&self) -> f64 {
        self.mass_kg / (self.hbar_js * self.kappa_per_m * self.kappa_per_m)
    }

    /// 1/κ, meters.
    pub fn length_unit(&self) -> f64 {
        1.0 / self.kappa_per_m
    }

    /// ħκ, kg·m/s.
    pub fn momentum_unit(&self) -> f64 {
        self.hbar_js * self.kappa_per_m
    }

    /// ħκ/m, m/s.
    pub fn velocity_unit(&self) -> f64 {
        self.hbar_js * self.kappa_per_m / self.mass_kg
    }

    /// ħ²κ²/m, joules.
    pub fn energy_unit(&self) -> f64 {
        let hk = self.hbar_js * self.kappa_per_m;
        hk * hk / self.mass_kg
    }

    /// ħκ²/m, 1/s.
    pub fn frequency_unit(&self) -> f64 {
        self.hbar_js * self.kappa_per_m * self.kappa_per_m / self.mass_kg
    }

    pub fn unit_of(&self, kind: QuantityKind) -> f64 {
        match kind {
            QuantityKind::Time => self.time_unit(),
            QuantityKind::Length => self.length_unit(),
            QuantityKind::Momentum => self.momentum_unit(),
            QuantityKind::Velocity => self.velocity_unit(),
            QuantityKind::Frequency => self.frequency_unit(),
            QuantityKind::Energy => self.energy_unit(),
        }
    }
}

impl Default for Scales {
    /// m = 1e−25 kg, κ = 1e6 m⁻¹.
    fn default() -> Self {
        Self { mass_kg: 1e-25, kappa_per_m: 1e6, hbar_js: HBAR_SI }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantityKind {
    Time,
    Length,
    Momentum,
    Velocity,
    Frequency,
    Energy,
}

impl QuantityKind {
    pub const ALL: [QuantityKind; 6] = [
        QuantityKind::Time,
        QuantityKind::Length,
        QuantityKind::Momentum,
        QuantityKind::Velocity,
        QuantityKind::Frequency,
        QuantityKind::Energy,
    ];

    pub fn si_unit(&self) -> &'static str {
        match self {
            QuantityKind::Time => "s",
            QuantityKind::Length => "m",
            QuantityKind::Momentum => "kg m/s",
            QuantityKind::Velocity => "m/s",
            QuantityKind::Frequency => "1/s",
            QuantityKind::Energy => "J",
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            QuantityKind::Time => "time",
            QuantityKind::Length => "length",
            QuantityKind::Momentum => "momentum",
            QuantityKind::Velocity => "velocity",
            QuantityKind::Frequency => "frequency",
            QuantityKind::Energy => "energy",
        }
    }
}

impl FromStr for QuantityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QuantityKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown quantity tag '{s}'")))
    }
}

impl fmt::Display for QuantityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A dimensionless value tagged with its physical kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub kind: QuantityKind,
    pub value: f64,
}

impl Quantity {
    pub fn new(kind: QuantityKind, value: f64) -> Self {
        Self { kind, value }
    }

    /// Parses a tag such as `"frequency"`; unknown tags are rejected.
    pub fn tagged(tag: &str, value: f64) -> Result<Self> {
        Ok(Self { kind: tag.parse()?, value })
    }
}

/// SI value of a dimensionless quantity.
pub fn to_si(scales: &Scales, q: Quantity) -> f64 {
    q.value * scales.unit_of(q.kind)
}

/// Inverse of [`to_si`].
pub fn from_si(scales: &Scales, kind: QuantityKind, si_value: f64) -> Quantity {
    Quantity::new(kind, si_value / scales.unit_of(kind))
}
