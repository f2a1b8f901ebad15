//! Unit-modulus phase bookkeeping.
//!
//! Clifford-circuit contributions (CZ signs, measurement bookkeeping signs)
//! accumulate in an exact quarter-turn counter, so long Clifford circuits see
//! no rounding drift; RZ angles spill into a separate radian accumulator.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// An accumulated phase e^{i(quarters*pi/2 + radians)}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phase {
    quarters: u8,
    radians: f64,
}

impl Phase {
    pub const ZERO: Phase = Phase { quarters: 0, radians: 0.0 };
    pub const PI: Phase = Phase { quarters: 2, radians: 0.0 };

    pub fn from_quarters(k: i64) -> Self {
        Phase { quarters: k.rem_euclid(4) as u8, radians: 0.0 }
    }

    pub fn from_radians(theta: f64) -> Self {
        Phase { quarters: 0, radians: theta }
    }

    #[inline]
    pub fn add_quarters(&mut self, k: i64) {
        self.quarters = ((self.quarters as i64 + k).rem_euclid(4)) as u8;
    }

    /// Add a half turn (multiply by -1).
    #[inline]
    pub fn flip_sign(&mut self) {
        self.quarters = (self.quarters + 2) & 3;
    }

    #[inline]
    pub fn add_radians(&mut self, theta: f64) {
        self.radians += theta;
    }

    pub fn add(&mut self, other: Phase) {
        self.add_quarters(other.quarters as i64);
        self.radians += other.radians;
    }

    pub fn conj(self) -> Phase {
        Phase { quarters: (4 - self.quarters) & 3, radians: -self.radians }
    }

    /// True when no irrational angle has been accumulated; `re`/`im` are then exact.
    pub fn is_exact(&self) -> bool {
        self.radians == 0.0
    }

    /// Re e^{i phase}; returns +-1 or 0 exactly for quarter-turn phases.
    pub fn re(self) -> f64 {
        if self.radians == 0.0 {
            match self.quarters {
                0 => 1.0,
                1 | 3 => 0.0,
                _ => -1.0,
            }
        } else {
            let (s, c) = self.radians.sin_cos();
            match self.quarters {
                0 => c,
                1 => -s,
                2 => -c,
                _ => s,
            }
        }
    }

    pub fn to_complex(self) -> Complex64 {
        let (s, c) = self.radians.sin_cos();
        let base = Complex64::new(c, s);
        match self.quarters {
            0 => base,
            1 => base * Complex64::new(0.0, 1.0),
            2 => -base,
            _ => base * Complex64::new(0.0, -1.0),
        }
    }

    /// Total angle in radians (not reduced).
    pub fn angle(self) -> f64 {
        self.quarters as f64 * FRAC_PI_2 + self.radians
    }
}
